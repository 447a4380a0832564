"""Command-line front end: dissemination tables, attack solves, equilibria,
parameter sweeps, and crossover reports, all as CSV (optionally with an SVG
line chart).

Exit codes: 0 success, 2 invalid arguments or input, 3 solver
non-convergence.  Identical invocations with identical seeds produce
byte-identical output.  The NETSEC_THREADS environment variable caps the
number of worker threads used for grid sweeps.
"""

from __future__ import annotations

import argparse
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import game
from ._svg import render_line_chart
from .attack import attacker_payoff, optimal_attack
from .dissemination import (
    METHOD_CLOSED,
    METHOD_EXACT,
    Params,
    disseminate,
    p_for_half_coverage,
    topology_docs,
)
from .game import NonConvergenceError
from .graph import COMPLETE, CUSTOM, RING, STAR, Graph, build_topology, load_edge_list

_VT_TOPOLOGIES = (RING, COMPLETE)


def _fmt(x: float) -> str:
    """12 significant digits, the fixed CSV number format."""
    return f"{float(x):.12g}"


def _max_workers() -> int:
    try:
        return max(1, int(os.environ.get("NETSEC_THREADS", "1")))
    except ValueError:
        return 1


def _map_ordered(fn, items):
    workers = _max_workers()
    if workers == 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


def _parse_grid(text: str) -> np.ndarray:
    try:
        lo_s, hi_s, steps_s = text.split(":")
        lo, hi, steps = float(lo_s), float(hi_s), int(steps_s)
    except ValueError:
        raise ValueError(f"expected --p-grid as a:b:steps, got {text!r}") from None
    if steps < 2:
        raise ValueError("p-grid needs at least 2 steps")
    if not (0.0 <= lo < hi <= 1.0):
        raise ValueError("p-grid bounds must satisfy 0 <= a < b <= 1")
    return np.linspace(lo, hi, steps)


def _parse_vector(text: str) -> np.ndarray:
    try:
        return np.array([float(tok) for tok in text.split(",") if tok != ""])
    except ValueError:
        raise ValueError(f"expected comma-separated numbers, got {text!r}") from None


def _resolve_graph(args) -> Graph:
    if getattr(args, "edges", None):
        with open(args.edges, encoding="utf-8") as handle:
            return load_edge_list(handle.read())
    if args.topology:
        if args.n is None:
            raise ValueError("--n is required with --topology")
        return build_topology(args.topology, args.n)
    raise ValueError("specify a graph with --topology/--n or --edges FILE")


def _resolve_dissemination(g: Graph, p: float, args):
    method = getattr(args, "method", None)
    if method is None:
        method = METHOD_CLOSED if g.topology != CUSTOM else METHOD_EXACT
    return disseminate(
        g, p, method, samples=getattr(args, "samples", 100_000),
        seed=getattr(args, "seed", 0),
    )


def _emit(args, text: str) -> None:
    if getattr(args, "out", None):
        with open(args.out, "w", encoding="utf-8") as handle:
            handle.write(text)
    else:
        sys.stdout.write(text)


def _emit_svg(args, xs, series: dict, title: str) -> None:
    if getattr(args, "svg", None):
        with open(args.svg, "w", encoding="utf-8") as handle:
            handle.write(render_line_chart(xs, series, title=title))


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------

def _cmd_disseminate(args) -> str:
    g = _resolve_graph(args)
    diss = _resolve_dissemination(g, args.p, args)
    lines = ["i,j,P_ij"]
    for i in range(g.n):
        for j in range(g.n):
            lines.append(f"{i},{j},{_fmt(diss.reach[i, j])}")
    lines.append("i,D_i")
    for i in range(g.n):
        lines.append(f"{i},{_fmt(diss.expected_docs[i])}")
    return "\n".join(lines) + "\n"


def _cmd_attack(args) -> str:
    g = _resolve_graph(args)
    q = _parse_vector(args.q)
    if q.size != g.n:
        raise ValueError(f"--q needs {g.n} entries, got {q.size}")
    diss = _resolve_dissemination(g, args.p, args)
    sol = optimal_attack(q, diss.expected_docs, args.omega)
    payoff = attacker_payoff(sol.a, q, diss.expected_docs, args.omega)
    lines = ["i,a_i"]
    lines.extend(f"{i},{_fmt(sol.a[i])}" for i in range(g.n))
    lines.append("lambda,n_star,active_set,payoff")
    active = ";".join(str(i) for i in sol.active)
    lines.append(f"{_fmt(sol.lam)},{sol.n_star},{active},{_fmt(payoff)}")
    return "\n".join(lines) + "\n"


def _equilibrium_q(g: Graph, diss, params: Params, regime: str, numeric: bool):
    docs = diss.expected_docs
    n = g.n
    if regime == game.NASH_RANDOM:
        return game.nash_random(n, params.alpha)
    if regime == game.OPT_RANDOM:
        return game.social_optimum_random(docs, params.alpha)
    closed_ok = g.topology in _VT_TOPOLOGIES and not numeric
    if regime == game.NASH_STRATEGIC:
        if closed_ok:
            return game.nash_strategic_vt(docs, n, params.alpha, params.omega)
        return game.best_response_dynamics(g, diss, params).q
    if closed_ok:
        return game.social_optimum_strategic_vt(docs, n, params.alpha)
    return game.social_optimum_numeric(g, diss, params).q


def _cmd_equilibrium(args) -> str:
    g = _resolve_graph(args)
    params = Params(args.p, args.alpha, args.omega)
    diss = _resolve_dissemination(g, args.p, args)
    q = _equilibrium_q(g, diss, params, args.regime, args.numeric)
    outcome = game.evaluate_outcome(diss, params, q, args.regime)
    lines = ["i,q_i,a_i,reward_i"]
    for i in range(g.n):
        lines.append(
            f"{i},{_fmt(outcome.q[i])},{_fmt(outcome.attack_vector[i])},"
            f"{_fmt(outcome.rewards[i])}"
        )
    lines.append("S,lambda,n_star")
    if outcome.attack is not None:
        lam, n_star = outcome.attack.lam, outcome.attack.n_star
    else:
        lam, n_star = math.nan, g.n
    lines.append(f"{_fmt(outcome.welfare)},{_fmt(lam)},{n_star}")
    return "\n".join(lines) + "\n"


def _numeric_profiles(g: Graph, p: float, params_base: Params, args):
    """(q_NS, q_OS) from the iterative solvers at one grid point."""
    params = Params(p, params_base.alpha, params_base.omega)
    diss = _resolve_dissemination(g, p, args)
    q_ns = game.best_response_dynamics(g, diss, params).q
    q_os = game.social_optimum_numeric(g, diss, params).q
    return q_ns, q_os


def _cmd_sweep_investments(args) -> str:
    g = _resolve_graph(args)
    params = Params(0.0, args.alpha, args.omega)
    grid = _parse_grid(args.p_grid)
    n = g.n
    vt_closed = g.topology in _VT_TOPOLOGIES
    if vt_closed:
        header = ["p", "q_NR", "q_OR", "q_NS", "q_OS"]

        def row(p):
            d = topology_docs(g.topology, n, p)[0]
            q_nr = 1.0 / (args.alpha * n)
            q_or = d / (args.alpha * n)
            q_ns = game.nash_strategic_vt(d, n, args.alpha, args.omega)[0]
            return [p, q_nr, q_or, q_ns, q_or]

    else:
        header = ["p"]
        for tag in ("q_NR", "q_OR", "q_NS", "q_OS"):
            header.extend(f"{tag}_{i}" for i in range(n))

        def row(p):
            diss = _resolve_dissemination(g, p, args)
            q_nr = game.nash_random(n, args.alpha)
            q_or = game.social_optimum_random(diss.expected_docs, args.alpha)
            q_ns, q_os = _numeric_profiles(g, p, params, args)
            return [p, *q_nr, *q_or, *q_ns, *q_os]

    rows = _map_ordered(row, grid)
    lines = [",".join(header)]
    lines.extend(",".join(_fmt(v) for v in vals) for vals in rows)
    series = {
        name: [vals[idx] for vals in rows] for idx, name in enumerate(header) if idx
    }
    _emit_svg(args, list(grid), series, f"investments on {g.topology} n={n}")
    return "\n".join(lines) + "\n"


def _cmd_sweep_documents(args) -> str:
    topologies = [t.strip() for t in args.topology.split(",")] if args.topology else [RING, COMPLETE]
    grid = _parse_grid(args.p_grid)
    n = args.n
    if n is None:
        raise ValueError("--n is required")
    header = ["topology", "n", "p"] + [f"D_{i}" for i in range(n)]
    lines = [",".join(header)]
    series = {}
    for topology in topologies:
        docs_rows = _map_ordered(lambda p: topology_docs(topology, n, p), grid)
        for p, docs in zip(grid, docs_rows):
            lines.append(
                f"{topology},{n},{_fmt(p)}," + ",".join(_fmt(v) for v in docs)
            )
        series[topology] = [float(np.mean(docs)) for docs in docs_rows]
    _emit_svg(args, list(grid), series, f"expected documents, n={n}")
    return "\n".join(lines) + "\n"


def _cmd_crossover(args) -> str:
    g = _resolve_graph(args)
    n = g.n
    lines = ["agent_class,p_star"]
    metrics = []
    if g.topology in _VT_TOPOLOGIES:
        p_star, info = game.find_crossover_p(
            g.topology, n, args.alpha, args.omega, details=True
        )
        lines.append(f"all,{_fmt(p_star)}")
        interval = info["condition_interval"]
        if interval is not None:
            metrics.append(("strengthen_from", interval[0]))
            metrics.append(("strengthen_to", interval[1]))
        for extra in info["sign_changes"][1:]:
            lines.append(f"all,{_fmt(extra)}")
    elif g.topology == STAR:
        params = Params(0.0, args.alpha, args.omega)
        grid = _parse_grid(args.p_grid)
        profiles = _map_ordered(
            lambda p: _numeric_profiles(g, p, params, args), grid
        )
        for label, idx in (("center", 0), ("leaf", 1)):
            gaps = np.array([q_ns[idx] - q_os[idx] for q_ns, q_os in profiles])
            found = False
            for k in np.nonzero(np.sign(gaps[:-1]) * np.sign(gaps[1:]) < 0)[0]:
                frac = gaps[k] / (gaps[k] - gaps[k + 1])
                lines.append(f"{label},{_fmt(grid[k] + frac * (grid[k + 1] - grid[k]))}")
                found = True
            if not found:
                lines.append(f"{label},nan")
    else:
        raise ValueError("crossover needs a ring, complete, or star topology")
    metrics.append(("p_half_coverage", p_for_half_coverage(g)))
    lines.append("metric,value")
    lines.extend(f"{name},{_fmt(value)}" for name, value in metrics)
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------

def _add_graph_options(sub, need_p=True):
    sub.add_argument("--topology", choices=[RING, STAR, COMPLETE], help="named topology family")
    sub.add_argument("--n", type=int, help="number of agents")
    sub.add_argument("--edges", help="edge-list file, one 'u v' pair per line")
    if need_p:
        sub.add_argument("--p", type=float, required=True, help="transmission probability")


def _add_method_options(sub):
    sub.add_argument(
        "--method", choices=["exact", "closed", "mc"], default=None,
        help="dissemination route (default: closed for named topologies, exact otherwise)",
    )
    sub.add_argument("--samples", type=int, default=100_000, help="Monte Carlo samples")
    sub.add_argument("--seed", type=int, default=0, help="Monte Carlo seed")


def _add_output_options(sub):
    sub.add_argument("--out", help="write CSV here instead of stdout")
    sub.add_argument("--svg", help="also render an SVG line chart to this path")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="netsec",
        description="Two-stage network security game: dissemination, attacks, equilibria.",
    )
    subs = parser.add_subparsers(dest="command", required=True)

    sub = subs.add_parser("disseminate", help="reach probabilities and expected documents")
    _add_graph_options(sub)
    _add_method_options(sub)
    sub.add_argument("--out", help="write CSV here instead of stdout")
    sub.set_defaults(func=_cmd_disseminate)

    sub = subs.add_parser("attack", help="optimal attack against given investments")
    _add_graph_options(sub)
    _add_method_options(sub)
    sub.add_argument("--q", required=True, help="comma-separated investments")
    sub.add_argument("--omega", type=float, default=1.0, help="attacker cost coefficient")
    sub.add_argument("--out", help="write CSV here instead of stdout")
    sub.set_defaults(func=_cmd_attack)

    sub = subs.add_parser("equilibrium", help="equilibrium or socially optimal investments")
    _add_graph_options(sub)
    _add_method_options(sub)
    sub.add_argument(
        "--regime", required=True,
        choices=[game.NASH_RANDOM, game.OPT_RANDOM, game.NASH_STRATEGIC, game.OPT_STRATEGIC],
    )
    sub.add_argument("--alpha", type=float, default=1.0, help="defender cost coefficient")
    sub.add_argument("--omega", type=float, default=1.0, help="attacker cost coefficient")
    sub.add_argument(
        "--numeric", action="store_true",
        help="force the iterative solvers even when a closed form applies",
    )
    sub.add_argument("--out", help="write CSV here instead of stdout")
    sub.set_defaults(func=_cmd_equilibrium)

    sub = subs.add_parser("sweep-investments", help="all four investment profiles over a p grid")
    _add_graph_options(sub, need_p=False)
    _add_method_options(sub)
    sub.add_argument("--p-grid", default="0:1:101", help="grid as a:b:steps")
    sub.add_argument("--alpha", type=float, default=1.0)
    sub.add_argument("--omega", type=float, default=1.0)
    _add_output_options(sub)
    sub.set_defaults(func=_cmd_sweep_investments)

    sub = subs.add_parser("sweep-documents", help="expected documents over a p grid")
    sub.add_argument("--topology", help="comma-separated topologies (default ring,complete)")
    sub.add_argument("--n", type=int, help="number of agents")
    sub.add_argument("--p-grid", default="0:1:101", help="grid as a:b:steps")
    _add_output_options(sub)
    sub.set_defaults(func=_cmd_sweep_documents)

    sub = subs.add_parser("crossover", help="over- to under-investment crossover report")
    _add_graph_options(sub, need_p=False)
    _add_method_options(sub)
    sub.add_argument("--p-grid", default="0:1:101", help="grid for the star sweep")
    sub.add_argument("--alpha", type=float, default=1.0)
    sub.add_argument("--omega", type=float, default=1.0)
    sub.add_argument("--out", help="write CSV here instead of stdout")
    sub.set_defaults(func=_cmd_crossover)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        text = args.func(args)
    except NonConvergenceError as exc:
        print(f"netsec: solver did not converge: {exc}", file=sys.stderr)
        return 3
    except (ValueError, OSError) as exc:
        print(f"netsec: {exc}", file=sys.stderr)
        return 2
    _emit(args, text)
    return 0


if __name__ == "__main__":
    sys.exit(main())
