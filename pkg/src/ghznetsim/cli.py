"""Command-line interface.

Subcommands: ``topo gen-grid``, ``topo validate``, ``run``, ``sweep``,
``speedup``, ``analyze``. Tables go to ``--out`` (default stdout) as CSV
or JSON. Exit codes: 0 success, 2 validation error, 3 infeasible scenario.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import replace

from . import __version__, harness
from ._engine import default_engine
from .errors import InfeasibleScenarioError, ValidationError
from .topology import build_grid, catalog_stats, load_topology, serialize_topology


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--seed", type=int, default=None, help="override the scenario seed")
    p.add_argument("--trials", type=int, default=None, help="override the trial count")
    p.add_argument("--out", default="-", help="output path (default: stdout)")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--engine", choices=("auto", "python", "compiled"), default="auto")
    p.add_argument("--workers", type=int, default=1)


def _parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="ghznetsim",
                                 description="Monte Carlo simulator for multipath "
                                             "GHZ distribution over quantum networks")
    ap.add_argument("--version", action="version", version=f"ghznetsim {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    topo = sub.add_parser("topo", help="topology utilities")
    tsub = topo.add_subparsers(dest="topo_command", required=True)
    gen = tsub.add_parser("gen-grid", help="write an MxM uniform-probability grid")
    gen.add_argument("--m", type=int, required=True, help="grid width")
    gen.add_argument("--p", type=float, required=True, help="uniform link probability")
    gen.add_argument("--out", default="-")
    gen.add_argument("--format", choices=("text", "json"), default="text")
    val = tsub.add_parser("validate", help="parse and validate a topology file")
    val.add_argument("file")

    run = sub.add_parser("run", help="run one scenario")
    run.add_argument("scenario")
    _add_common(run)

    sw = sub.add_parser("sweep", help="run a scenario once per axis value")
    sw.add_argument("scenario")
    sw.add_argument("--axis", required=True, choices=harness.SWEEP_AXES)
    sw.add_argument("--values", required=True,
                    help="comma-separated values, e.g. 0.25,0.5,0.75 or 1,2,inf")
    _add_common(sw)

    sp = sub.add_parser("speedup", help="ER ratio of two protocols over a (p, q_c) sweep")
    sp.add_argument("scenario")
    sp.add_argument("--p-range", required=True,
                    help="comma list (0.2,0.4) or start:stop:count (0.1:1.0:10)")
    sp.add_argument("--qc-range", required=True, help="comma list, 'inf' allowed")
    sp.add_argument("--protocol-a", default="MP-P")
    sp.add_argument("--protocol-b", default="SP")
    sp.add_argument("--analytic-sp", action="store_true",
                    help="use the product-form SP rate for q_c=1 cells")
    _add_common(sp)

    an = sub.add_parser("analyze", help="closed-form estimators for a scenario")
    an.add_argument("scenario")
    an.add_argument("--samples", type=int, default=20000,
                    help="link-subgraph samples for the component estimate")
    _add_common(an)
    return ap


def _parse_values(axis: str, raw: str) -> list:
    out = []
    for tok in raw.split(","):
        tok = tok.strip()
        if axis in ("p", "p_op"):
            out.append(float(tok))
        elif axis == "q_c":
            out.append(None if tok in ("inf", "none", "null") else int(tok))
        elif axis in ("users", "grid_M"):
            out.append(int(tok))
        else:
            out.append(tok)
    return out


def _parse_p_range(raw: str) -> list:
    if ":" in raw:
        start, stop, count = raw.split(":")
        start, stop, count = float(start), float(stop), int(count)
        if count < 1:
            raise ValidationError("p-range count must be >= 1")
        if count == 1:
            return [start]
        step = (stop - start) / (count - 1)
        return [start + i * step for i in range(count)]
    return [float(tok) for tok in raw.split(",")]


def _parse_qc_range(raw: str) -> list:
    return [None if tok.strip() in ("inf", "none", "null") else int(tok)
            for tok in raw.split(",")]


def _load_scenario(args) -> harness.Scenario:
    sc = harness.Scenario.from_file(args.scenario)
    if args.seed is not None:
        sc = replace(sc, seed=args.seed)
    if args.trials is not None:
        sc = replace(sc, trials=args.trials)
    if args.engine != "auto":
        sc = replace(sc, engine=args.engine)
    return sc


def _cmd_topo(args) -> int:
    if args.topo_command == "gen-grid":
        doc = serialize_topology(build_grid(args.m, args.p), fmt=args.format)
        if args.out == "-":
            print(doc, end="")
        else:
            with open(args.out, "w", encoding="utf-8") as fh:
                fh.write(doc)
        return 0
    t = load_topology(args.file)
    stats = catalog_stats(t)
    print(f"{t.name}: {stats.node_count} nodes, {stats.edge_count} edges, "
          f"mean length {stats.mean_edge_length_km:.4g} km, "
          f"mean degree {stats.mean_nodal_degree:.4g}")
    return 0


def _cmd_run(args) -> int:
    sc = _load_scenario(args)
    stats = harness.run_scenario(sc, engine=args.engine, workers=args.workers)
    cells = {"protocol": sc.protocol, "seed": sc.seed}
    cells.update({c: getattr(stats, c) for c in harness._STATS_COLUMNS})
    table = harness.Table(list(cells), [cells])
    harness.export(table, args.format, args.out)
    return 0


def _cmd_sweep(args) -> int:
    sc = _load_scenario(args)
    values = _parse_values(args.axis, args.values)
    table = harness.sweep(sc, args.axis, values, engine=args.engine,
                          workers=args.workers)
    harness.export(table, args.format, args.out)
    return 0


def _cmd_speedup(args) -> int:
    sc = _load_scenario(args)
    table = harness.speedup_report(sc, _parse_p_range(args.p_range),
                                   _parse_qc_range(args.qc_range),
                                   protocol_a=args.protocol_a,
                                   protocol_b=args.protocol_b,
                                   analytic_sp=args.analytic_sp,
                                   engine=args.engine, workers=args.workers)
    harness.export(table, args.format, args.out)
    return 0


def _cmd_analyze(args) -> int:
    sc = _load_scenario(args)
    table = harness.analyze(sc, samples=args.samples, engine=args.engine)
    harness.export(table, args.format, args.out)
    return 0


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    try:
        if args.command == "topo":
            return _cmd_topo(args)
        if args.command == "run":
            return _cmd_run(args)
        if args.command == "sweep":
            return _cmd_sweep(args)
        if args.command == "speedup":
            return _cmd_speedup(args)
        return _cmd_analyze(args)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except InfeasibleScenarioError as exc:
        print(f"infeasible scenario: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
