"""Command-line front end: ``agent-economy <verb> [economy.json] [options]``.

Agents are numbered from 1 on the command line and in reports, matching the
CSV header ``x_1..x_n``. Errors are always printed as a JSON object
``{"error": {"code", "kind", "message"}}`` with a nonzero exit status.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import best_response as br
from . import dynamics, nash, two_agent
from .economy import (
    DimensionError,
    Economy,
    EconomyFormatError,
    InvalidEconomyError,
    dumps_economy,
    is_irreducible,
    load_economy,
    sufficient_irreducibility_check,
    validate,
)

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_USAGE = 2
EXIT_PARSE = 3
EXIT_DIMENSION = 4
EXIT_MISMATCH = 5
EXIT_CONSTRAINT = 6
EXIT_REDUCIBLE = 7
EXIT_SCENARIO = 8
EXIT_SINGULAR = 9


class CLIError(Exception):
    def __init__(self, code: int, kind: str, message: str):
        self.code, self.kind, self.message = code, kind, message
        super().__init__(message)


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise CLIError(EXIT_USAGE, "usage_error", f"{self.prog}: {message}")


def returning_seller_economy() -> Economy:
    """Three agents; agent 1 chooses between a 9.8-utility seller and a 1-utility seller."""
    alpha = 0.01
    P = np.array([
        [1.0, alpha, 0.5],
        [0.0, 1 - alpha - 0.02, 0.01],
        [0.0, 0.02, 0.49],
    ])
    U = np.array([[0, 1, 1], [9.8, 0, 1], [1, 1, 2]], dtype=float)
    return Economy(P, U)


def _fmt_vec(v) -> str:
    return "(" + ", ".join(f"{x:.6g}" for x in v) + ")"


def _emit(args, payload: dict, text: str) -> None:
    if args.json:
        out = json.dumps(payload, indent=2)
    else:
        out = text
    if getattr(args, "output", None) and args.command not in ("simulate", "scenario"):
        Path(args.output).write_text(out + "\n")
    else:
        print(out)


def _load(args) -> Economy:
    try:
        return load_economy(args.economy)
    except FileNotFoundError as exc:
        raise CLIError(EXIT_PARSE, "parse_error", f"cannot read {args.economy}: {exc.strerror}") from None
    except EconomyFormatError as exc:
        raise CLIError(EXIT_PARSE, "parse_error", str(exc)) from None


def _agent(args, economy: Economy) -> int:
    if not 1 <= args.agent <= economy.n:
        raise CLIError(EXIT_MISMATCH, "verb_mismatch", f"--agent must be in 1..{economy.n}")
    return args.agent - 1


# -- verbs --------------------------------------------------------------------

def cmd_validate(args) -> int:
    e = _load(args)
    report = validate(e)
    payload = {
        "ok": report.ok,
        "violations": [
            {"constraint": v.constraint, "index": [i + 1 for i in v.index], "observed": v.observed}
            for v in report.violations
        ],
    }
    if report.ok:
        payload["irreducible"] = is_irreducible(e)
        if e.n >= 2:
            payload["sufficient_irreducibility"] = sufficient_irreducibility_check(e)
    lines = [f"valid: {report.ok}"]
    lines += [f"  violation: {v}" for v in report.violations]
    if report.ok:
        lines.append(f"irreducible: {payload['irreducible']}")
    _emit(args, payload, "\n".join(lines))
    return EXIT_OK if report.ok else EXIT_INVALID


def cmd_stationary(args) -> int:
    e = _load(args).require_valid()
    x = dynamics.stationary_distribution(e)
    payload = {"stationary": x.tolist(), "method": "linear_solve"}
    lines = [f"stationary: {_fmt_vec(x)}"]
    if e.n == 3:
        try:
            cf = dynamics.stationary_three_agent_closed_form(e)
        except dynamics.SingularSystemError as exc:
            payload["closed_form"] = None
            payload["closed_form_note"] = str(exc)
        else:
            agree = bool(np.max(np.abs(cf.values - x.values)) <= 1e-9)
            payload["closed_form"] = cf.tolist()
            payload["closed_form_agrees"] = agree
            lines.append(f"closed form: {_fmt_vec(cf)} (agrees: {agree})")
    _emit(args, payload, "\n".join(lines))
    return EXIT_OK


def cmd_simulate(args) -> int:
    e = _load(args).require_valid()
    trace = dynamics.simulate(e, args.episodes, args.tol, thin=args.thin)
    csv_text = trace.to_csv()
    summary = {
        "episodes": trace.episodes,
        "cesaro_average": trace.cesaro_average.tolist(),
        "converged": trace.converged,
        "final_delta": trace.final_delta,
    }
    if args.output:
        Path(args.output).write_text(csv_text)
        summary["csv"] = args.output
        text = (f"episodes: {trace.episodes}\ncesaro average: {_fmt_vec(trace.cesaro_average)}\n"
                f"converged: {trace.converged} (delta {trace.final_delta:.3g})\ncsv: {args.output}")
        _emit(args, summary, text)
    elif args.json:
        summary["csv_data"] = csv_text
        print(json.dumps(summary, indent=2))
    else:
        sys.stdout.write(csv_text)
    return EXIT_OK


def cmd_best_response(args) -> int:
    e = _load(args).require_valid()
    j = _agent(args, e)
    lp = br.best_response_grid_lp(e, j, args.grid)
    rescored = br.rescore_by_dynamics(e, j, lp.column)
    results = {"grid_lp": {**lp.to_dict(), "agent": j + 1, "rescored_utility": rescored}}
    lines = [f"agent {j + 1} best response (grid LP, {args.grid} points): column {_fmt_vec(lp.column)}",
             f"  LP utility {lp.utility:.6g}, dynamics-rescored {rescored:.6g}"]
    if e.n <= nash.BRUTE_FORCE_MAX_AGENTS:
        bf = br.best_response_brute_force(e, j, args.resolution)
        bound = 2 * (1 / (args.grid - 1) + 1 / args.resolution) * float(e.utility.max())
        agree = abs(lp.utility - bf.utility) <= bound
        results["brute_force"] = {**bf.to_dict(), "agent": j + 1}
        results["agreement"] = {"agree": agree, "difference": lp.utility - bf.utility, "bound": bound}
        lines.append(f"brute force (resolution {args.resolution}): column {_fmt_vec(bf.column)}, "
                     f"utility {bf.utility:.6g}")
        lines.append(f"  methods agree within {bound:.3g}: {agree}")
    _emit(args, results, "\n".join(lines))
    return EXIT_OK


def _parse_game(text: str) -> two_agent.TwoAgentGame:
    try:
        a, b, c, d = (float(v) for v in text.split(","))
    except ValueError:
        raise CLIError(EXIT_PARSE, "parse_error", "--game expects a,b,c,d") from None
    return two_agent.TwoAgentGame(a, b, c, d)


def _interval(bounds, upper_open: bool) -> str:
    lo, hi = bounds
    if lo == hi:
        return f"{{{lo:.6g}}}"
    return f"[{lo:.6g}, {hi:.6g}{')' if upper_open else ']'}"


def cmd_classify2(args) -> int:
    if args.game is not None:
        game = _parse_game(args.game)
    elif args.economy is not None:
        e = _load(args)
        if e.n != 2:
            raise CLIError(EXIT_MISMATCH, "verb_mismatch", f"classify2 needs a two-agent economy, got n = {e.n}")
        game = two_agent.TwoAgentGame.from_economy(e)
    else:
        raise CLIError(EXIT_USAGE, "usage_error", "classify2 needs an economy file or --game a,b,c,d")
    catalog = two_agent.classify_equilibria(game)
    lines = [f"game a={game.a:g} b={game.b:g} c={game.c:g} d={game.d:g}"]
    for entry in catalog:
        if entry.is_point:
            where = f"(p, q) = ({entry.p_range[0]:.6g}, {entry.q_range[0]:.6g})"
        else:
            where = f"p in {_interval(entry.p_range, entry.upper_open)}, q in {_interval(entry.q_range, entry.upper_open)}"
        flags = f" [{', '.join(entry.flags)}]" if entry.flags else ""
        lines.append(f"  {entry.scenario.value:<18} {where}  ({entry.proposition}){flags}")
    _emit(args, catalog.to_dict(), "\n".join(lines))
    return EXIT_OK


def cmd_verify(args) -> int:
    e = _load(args).require_valid()
    if args.coalition:
        report = nash.verify_collaboration(e, args.tol, args.resolution)
    else:
        report = nash.verify_equilibrium(e, args.resolution, args.tol)
    payload = report.to_dict()
    for row in payload["per_agent"]:
        row["agent"] += 1
    for row in payload.get("coalitions", []):
        row["agents"] = [k + 1 for k in row["agents"]]
    lines = [f"equilibrium: {report.is_equilibrium} (tol {args.tol:g})",
             f"  {'agent':>5} {'current':>12} {'deviation':>12} {'gap':>12}  best deviation column"]
    for v in report.per_agent:
        lines.append(f"  {v.agent + 1:>5} {v.current_utility:>12.6g} {v.deviation_utility:>12.6g} "
                     f"{v.gap:>12.3g}  {_fmt_vec(v.best_deviation_column)}")
    for c in report.coalitions:
        members = " and ".join(str(k + 1) for k in c.agents)
        lines.append(f"  coalition {members}: proportion {c.current_proportion:.6g} "
                     f"(best {c.best_proportion:.6g}), gap {c.gap:.3g}")
    _emit(args, payload, "\n".join(lines))
    return EXIT_OK


def _parse_param(text: str):
    key, sep, value = text.partition("=")
    if not sep:
        raise CLIError(EXIT_USAGE, "usage_error", f"--param expects key=value, got {text!r}")
    try:
        return key, json.loads(value)
    except json.JSONDecodeError:
        return key, value


def cmd_scenario(args) -> int:
    params = dict(_parse_param(p) for p in args.param or [])
    try:
        e = nash.make_scenario(nash.ScenarioSpec(args.name, params))
    except (ValueError, TypeError) as exc:
        raise CLIError(EXIT_SCENARIO, "scenario_error", str(exc)) from None
    text = dumps_economy(e)
    if args.output:
        Path(args.output).write_text(text)
        if args.json:
            print(json.dumps({"scenario": args.name, "output": args.output}))
        else:
            print(f"wrote {args.name} economy to {args.output}")
    else:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_demo(args) -> int:
    e = returning_seller_economy()
    lp = br.best_response_grid_lp(e, 0, args.grid)
    bf = br.best_response_brute_force(e, 0, args.resolution)
    to3 = br.rescore_by_dynamics(e, 0, [0, 0, 1])
    to2 = br.rescore_by_dynamics(e, 0, [0, 1, 0])
    favourite = int(np.argmax(e.utility[:, 0]))
    chosen = int(np.argmax(lp.column))
    payload = {
        "economy": {"spending": e.spending.tolist(), "utility": e.utility.tolist()},
        "agent": 1,
        "grid_lp": {**lp.to_dict(), "agent": 1},
        "brute_force": {**bf.to_dict(), "agent": 1},
        "utility_all_on_agent_3": to3,
        "utility_all_on_agent_2": to2,
        "note": (f"agent {chosen + 1} is chosen although agent {favourite + 1} offers the highest "
                 f"per-dollar utility ({e.utility[favourite, 0]:g}); it returns too little currency"),
    }
    text = "\n".join([
        "Agent 1 best response, other columns fixed:",
        f"  grid LP ({args.grid} points): column {_fmt_vec(lp.column)}  utility {lp.utility:.6f}",
        f"  brute force (resolution {args.resolution}): column {_fmt_vec(bf.column)}  utility {bf.utility:.6f}",
        f"  all on agent 3: {to3:.6f}   all on agent 2: {to2:.6f}",
        "  " + payload["note"],
    ])
    _emit(args, payload, text)
    return EXIT_OK


# -- parser -----------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="agent-economy", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def verb(name, func, *, economy=True, output=True, help=None):
        p = sub.add_parser(name, help=help)
        if economy == "optional":
            p.add_argument("economy", nargs="?")
        elif economy:
            p.add_argument("economy")
        p.add_argument("--json", action="store_true", help="machine-readable output")
        if output:
            p.add_argument("--output", help="write the report to this path")
        p.set_defaults(func=func)
        return p

    verb("validate", cmd_validate, help="check an economy file")
    verb("stationary", cmd_stationary, help="stationary currency distribution")
    p = verb("simulate", cmd_simulate, help="iterate the currency dynamics; CSV trajectory")
    p.add_argument("--episodes", type=int, default=dynamics.DEFAULT_EPISODES)
    p.add_argument("--tol", type=float, default=dynamics.DEFAULT_CONVERGENCE_TOL)
    p.add_argument("--thin", type=int, default=1, help="record every k-th stepped episode")
    p = verb("best-response", cmd_best_response, help="best spending column of one agent")
    p.add_argument("--agent", type=int, required=True)
    p.add_argument("--grid", type=int, default=br.DEFAULT_GRID_POINTS)
    p.add_argument("--resolution", type=int, default=br.DEFAULT_RESOLUTION)
    p = verb("classify2", cmd_classify2, economy="optional", help="all two-agent equilibria")
    p.add_argument("--game", help="utilities a,b,c,d instead of an economy file")
    p = verb("verify", cmd_verify, help="check that no agent can deviate profitably")
    p.add_argument("--resolution", type=int, default=br.DEFAULT_RESOLUTION)
    p.add_argument("--tol", type=float, default=nash.DEFAULT_TOL)
    p.add_argument("--coalition", action="store_true",
                   help="collaboration check: agent 1 alone, agents 2 and 3 jointly")
    p = verb("scenario", cmd_scenario, economy=False, help="write a canonical scenario economy")
    p.add_argument("--name", required=True, choices=[s.value for s in nash.ScenarioName])
    p.add_argument("--param", action="append", help="scenario parameter key=value (JSON value)")
    p = verb("demo", cmd_demo, economy=False, help="three-agent example end to end")
    p.add_argument("--grid", type=int, default=br.DEFAULT_GRID_POINTS)
    p.add_argument("--resolution", type=int, default=br.DEFAULT_RESOLUTION)
    return parser


def run(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        return args.func(args)
    except CLIError as exc:
        err = exc
    except DimensionError as exc:
        err = CLIError(EXIT_DIMENSION, "dimension_error", str(exc))
    except InvalidEconomyError as exc:
        err = CLIError(EXIT_CONSTRAINT, "invalid_economy", str(exc))
    except dynamics.ReducibleChainError as exc:
        err = CLIError(EXIT_REDUCIBLE, "reducible_chain", str(exc))
    except dynamics.SingularSystemError as exc:
        err = CLIError(EXIT_SINGULAR, "singular_system", str(exc))
    except nash.ScenarioError as exc:
        err = CLIError(EXIT_SCENARIO, "scenario_error", str(exc))
    print(json.dumps({"error": {"code": err.code, "kind": err.kind, "message": err.message}}))
    return err.code


def main(argv=None) -> None:
    sys.exit(run(argv))


if __name__ == "__main__":
    main()
