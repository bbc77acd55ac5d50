"""Monte Carlo experiment harness: scenarios, sweeps, and table export.

A scenario bundles a topology, a protocol, a user specification, the
cut-off, and a trial budget behind one root seed. Per-trial generators are
spawned as ``SeedSequence(seed, spawn_key=(axis_index, trial_index))``, so
results are independent of scheduling and identical across engines,
worker counts, and sweep orderings; the bootstrap stream uses a reserved
spawn key. Random user placements are drawn from the trial's own stream
before any link is generated.

The entanglement-rate estimate is total GHZ states over total timeslots.
Failed trials contribute zero states and the full timeslot budget; a
datapoint whose failure fraction exceeds 5% is flagged invalid, the same
suppression rule used for plotted results.
"""

from __future__ import annotations

import concurrent.futures
import json
import math
import os
from dataclasses import dataclass, replace

import numpy as np

from . import analytics, routing, topology as topo_mod
from .errors import InfeasibleScenarioError, ValidationError
from .protocols import DEFAULT_MAX_TIMESLOTS, PROTOCOL_NAMES, ProtocolConfig, run_protocol
from .topology import Topology, build_grid, load_topology, scale_lengths, with_p_op

FAIL_FRACTION_LIMIT = 0.05
BOOTSTRAP_RESAMPLES = 1000
_BOOTSTRAP_KEY = 2**31 - 1

SWEEP_AXES = ("p", "p_op", "q_c", "users", "grid_M", "protocol")


@dataclass(frozen=True)
class Scenario:
    """One experiment: field-for-field mirror of the scenario file format."""

    topology: dict
    protocol: str
    users: object  # list of node ids | "corners" | "random:k"
    q_c: int | None = 1
    trials: int = 1000
    max_timeslots: int = DEFAULT_MAX_TIMESLOTS
    seed: int = 0
    engine: str = "auto"

    def __post_init__(self):
        if self.protocol not in PROTOCOL_NAMES:
            raise ValidationError(
                f"unknown protocol {self.protocol!r} (expected one of {PROTOCOL_NAMES})")
        if self.trials < 1:
            raise ValidationError("trials must be >= 1")
        if self.q_c is not None and self.q_c < 1:
            raise ValidationError("q_c must be >= 1 or null (unbounded)")
        _parse_users_spec(self.users)

    @classmethod
    def from_dict(cls, doc: dict) -> "Scenario":
        unknown = set(doc) - {"topology", "protocol", "users", "q_c", "trials",
                              "max_timeslots", "seed", "engine"}
        if unknown:
            raise ValidationError(f"unknown scenario fields: {sorted(unknown)}")
        for key in ("topology", "protocol", "users"):
            if key not in doc:
                raise ValidationError(f"scenario is missing the {key!r} field")
        return cls(
            topology=dict(doc["topology"]),
            protocol=doc["protocol"],
            users=doc["users"],
            q_c=doc.get("q_c", 1),
            trials=int(doc.get("trials", 1000)),
            max_timeslots=int(doc.get("max_timeslots", DEFAULT_MAX_TIMESLOTS)),
            seed=int(doc.get("seed", 0)),
            engine=doc.get("engine", "auto"),
        )

    @classmethod
    def from_file(cls, path) -> "Scenario":
        try:
            doc = json.loads(open(path, "r", encoding="utf-8").read())
        except json.JSONDecodeError as exc:
            raise ValidationError(f"{path}: invalid scenario JSON: {exc}") from None
        if not isinstance(doc, dict):
            raise ValidationError(f"{path}: scenario document must be a JSON object")
        return cls.from_dict(doc)

    def to_dict(self) -> dict:
        return {
            "topology": dict(self.topology),
            "protocol": self.protocol,
            "users": self.users,
            "q_c": self.q_c,
            "trials": self.trials,
            "max_timeslots": self.max_timeslots,
            "seed": self.seed,
            "engine": self.engine,
        }

    def resolve_topology(self) -> Topology:
        return _resolve_topology(self.topology)

    def protocol_config(self, users) -> ProtocolConfig:
        return ProtocolConfig(users=tuple(users), q_c=self.q_c,
                              max_timeslots=self.max_timeslots,
                              sp_tree=self.protocol == "SP-tree")


def _resolve_topology(spec: dict) -> Topology:
    if "grid_m" in spec:
        allowed = {"grid_m", "p"}
        if set(spec) - allowed:
            raise ValidationError(f"grid topology spec allows {sorted(allowed)}, "
                                  f"got {sorted(spec)}")
        return build_grid(int(spec["grid_m"]), float(spec.get("p", 1.0)))
    if "file" in spec:
        allowed = {"file", "p_op", "length_scale"}
        if set(spec) - allowed:
            raise ValidationError(f"file topology spec allows {sorted(allowed)}, "
                                  f"got {sorted(spec)}")
        t = load_topology(spec["file"])
        scale = float(spec.get("length_scale", 1.0))
        if scale != 1.0:
            t = scale_lengths(t, scale)
        if spec.get("p_op") is not None:
            t = with_p_op(t, float(spec["p_op"]))
        return t
    raise ValidationError("topology spec needs either 'grid_m' or 'file'")


def _parse_users_spec(spec):
    if isinstance(spec, str):
        if spec == "corners":
            return ("corners", None)
        if spec.startswith("random:"):
            try:
                k = int(spec.split(":", 1)[1])
            except ValueError:
                raise ValidationError(f"bad random user spec {spec!r}") from None
            if k < 2:
                raise ValidationError("random user count must be >= 2")
            return ("random", k)
        raise ValidationError(f"unknown user spec {spec!r}")
    try:
        users = tuple(int(u) for u in spec)
    except (TypeError, ValueError):
        raise ValidationError(f"user spec must be a node list, 'corners' or "
                              f"'random:k', got {spec!r}") from None
    if len(set(users)) < 2:
        raise ValidationError("need at least two distinct users")
    return ("fixed", users)


def trial_rng(seed: int, axis_index: int, trial_index: int) -> np.random.Generator:
    """The deterministic per-trial stream (documented derivation scheme)."""
    return np.random.default_rng(np.random.SeedSequence(seed,
                                                        spawn_key=(axis_index, trial_index)))


def _resolve_users(kind, arg, t: Topology, rng) -> tuple:
    if kind == "fixed":
        for u in arg:
            if not 0 <= u < t.n_nodes:
                raise ValidationError(f"user {u} outside node range 0..{t.n_nodes - 1}")
        return tuple(sorted(arg))
    if kind == "corners":
        return t.corner_users()
    return tuple(sorted(int(u) for u in rng.choice(t.n_nodes, size=arg, replace=False)))


@dataclass(frozen=True)
class TrialRecord:
    ghz: int
    slots: int
    succeeded: bool
    users: tuple


@dataclass(frozen=True)
class ErStats:
    er: float
    ci95_low: float
    ci95_high: float
    fail_fraction: float
    valid: bool
    trials: int
    mean_ghz_per_success: float


def _run_trial_range(scenario_doc: dict, axis_index: int, start: int, stop: int,
                     engine: str):
    sc = Scenario.from_dict(scenario_doc)
    t = sc.resolve_topology()
    kind, arg = _parse_users_spec(sc.users)
    out = []
    for idx in range(start, stop):
        rng = trial_rng(sc.seed, axis_index, idx)
        users = _resolve_users(kind, arg, t, rng)
        cfg = sc.protocol_config(users)
        outcome = run_protocol(sc.protocol, t, cfg, rng, engine=engine)
        out.append((idx, TrialRecord(outcome.ghz_count, outcome.timeslots_used,
                                     outcome.succeeded, users)))
    return out


def run_trials(sc: Scenario, axis_index: int = 0, engine: str | None = None,
               workers: int = 1) -> list:
    """All trial records for a scenario, ordered by trial index."""
    engine = sc.engine if engine is None else engine
    doc = sc.to_dict()
    records: list = [None] * sc.trials
    if workers <= 1:
        for idx, rec in _run_trial_range(doc, axis_index, 0, sc.trials, engine):
            records[idx] = rec
        return records
    chunk = math.ceil(sc.trials / workers)
    spans = [(s, min(s + chunk, sc.trials)) for s in range(0, sc.trials, chunk)]
    with concurrent.futures.ProcessPoolExecutor(max_workers=workers) as pool:
        futures = [pool.submit(_run_trial_range, doc, axis_index, s, e, engine)
                   for s, e in spans]
        for fut in concurrent.futures.as_completed(futures):
            for idx, rec in fut.result():
                records[idx] = rec
    return records


def compute_er_stats(records, seed: int, axis_index: int = 0) -> ErStats:
    """Ratio estimate with a seeded bootstrap confidence interval."""
    ghz = np.array([r.ghz for r in records], dtype=np.float64)
    slots = np.array([r.slots for r in records], dtype=np.float64)
    n = len(records)
    er = float(ghz.sum() / slots.sum())
    fails = sum(1 for r in records if not r.succeeded)
    fail_fraction = fails / n
    successes = n - fails
    mean_ghz = float(ghz.sum() / successes) if successes else 0.0
    rng = np.random.default_rng(np.random.SeedSequence(seed,
                                                       spawn_key=(axis_index, _BOOTSTRAP_KEY)))
    if n > 1:
        idx = rng.integers(0, n, size=(BOOTSTRAP_RESAMPLES, n))
        er_samples = ghz[idx].sum(axis=1) / slots[idx].sum(axis=1)
        lo, hi = np.percentile(er_samples, [2.5, 97.5])
    else:
        lo = hi = er
    return ErStats(er=er, ci95_low=float(lo), ci95_high=float(hi),
                   fail_fraction=fail_fraction,
                   valid=fail_fraction <= FAIL_FRACTION_LIMIT,
                   trials=n, mean_ghz_per_success=mean_ghz)


def run_scenario(sc: Scenario, axis_index: int = 0, engine: str | None = None,
                 workers: int = 1) -> ErStats:
    records = run_trials(sc, axis_index, engine, workers)
    return compute_er_stats(records, sc.seed, axis_index)


# ---------------------------------------------------------------------------
# tables, sweeps, speedup
# ---------------------------------------------------------------------------

@dataclass
class Table:
    columns: list
    rows: list  # list of dicts keyed by column


_STATS_COLUMNS = ["er", "ci95_low", "ci95_high", "fail_fraction", "valid",
                  "trials", "mean_ghz_per_success"]


def _stats_cells(stats: ErStats | None) -> dict:
    if stats is None:
        return {c: (False if c == "valid" else math.nan) for c in _STATS_COLUMNS}
    return {c: getattr(stats, c) for c in _STATS_COLUMNS}


def _mean_p_e(t: Topology) -> float:
    return float(np.mean([e.p_e for e in t.edges]))


def _apply_axis(base: Scenario, axis: str, value) -> Scenario:
    if axis == "p":
        if "grid_m" not in base.topology:
            raise ValidationError("axis 'p' applies to grid topologies; use 'p_op' "
                                  "for file topologies")
        spec = dict(base.topology, p=float(value))
        return replace(base, topology=spec)
    if axis == "p_op":
        if "file" not in base.topology:
            raise ValidationError("axis 'p_op' applies to file topologies")
        spec = dict(base.topology, p_op=float(value))
        return replace(base, topology=spec)
    if axis == "q_c":
        return replace(base, q_c=None if value in (None, "inf") else int(value))
    if axis == "users":
        return replace(base, users=f"random:{int(value)}")
    if axis == "grid_M":
        if "grid_m" not in base.topology:
            raise ValidationError("axis 'grid_M' applies to grid topologies")
        spec = dict(base.topology, grid_m=int(value))
        return replace(base, topology=spec)
    if axis == "protocol":
        return replace(base, protocol=str(value))
    raise ValidationError(f"unknown sweep axis {axis!r} (expected one of {SWEEP_AXES})")


def sweep(base: Scenario, axis: str, values, engine: str | None = None,
          workers: int = 1) -> Table:
    """One scenario run per axis value; rows carry validity and status."""
    columns = ["axis", "value", "status", "mean_p_e"] + _STATS_COLUMNS
    rows = []
    for axis_index, value in enumerate(values):
        sc = _apply_axis(base, axis, value)
        t = sc.resolve_topology()
        row = {"axis": axis, "value": value, "mean_p_e": _mean_p_e(t)}
        try:
            stats = run_scenario(sc, axis_index=axis_index, engine=engine,
                                 workers=workers)
            row["status"] = "ok"
        except InfeasibleScenarioError:
            stats = None
            row["status"] = "infeasible"
        row.update(_stats_cells(stats))
        rows.append(row)
    return Table(columns, rows)


def sp_analytic_denominator(sc: Scenario) -> float:
    """Product-form rate of the precomputed-path protocol for this scenario.

    Only defined for a fixed user set (explicit list or grid corners) and
    single-slot storage.
    """
    t = sc.resolve_topology()
    kind, arg = _parse_users_spec(sc.users)
    if kind == "random":
        raise ValidationError("analytic SP rate needs a fixed user set")
    users = _resolve_users(kind, arg, t, rng=None)
    _, solution = routing.select_centre_with_paths(t, users)
    edge_ids = [eid for path in solution.paths.values() for eid in path]
    return analytics.sp_analytic_er([t.edges[eid] for eid in edge_ids])


def speedup_report(base: Scenario, p_values, qc_values, protocol_a: str = "MP-P",
                   protocol_b: str = "SP", analytic_sp: bool = False,
                   engine: str | None = None, workers: int = 1) -> Table:
    """ER ratio of two protocols over a (p, q_c) sweep.

    Cells where either side is invalid (more than 5% failed runs) are
    blank: the ratio is NaN and the reason recorded. With ``analytic_sp``,
    single-slot cells replace the simulated denominator with the product
    form, which stays usable deep below the percolation threshold.
    """
    axis_p = "p" if "grid_m" in base.topology else "p_op"
    columns = ["p", "q_c", "ratio", "valid", "reason",
               "er_a", "er_b", "protocol_a", "protocol_b"]
    rows = []
    cell = 0
    for qc in qc_values:
        for p in p_values:
            sc_p = _apply_axis(_apply_axis(base, axis_p, p), "q_c", qc)
            sc_a = replace(sc_p, protocol=protocol_a)
            row = {"p": float(p), "q_c": qc, "protocol_a": protocol_a,
                   "protocol_b": protocol_b, "ratio": math.nan, "valid": False,
                   "reason": "", "er_a": math.nan, "er_b": math.nan}
            try:
                stats_a = run_scenario(sc_a, axis_index=2 * cell, engine=engine,
                                       workers=workers)
                row["er_a"] = stats_a.er
            except InfeasibleScenarioError:
                stats_a = None
                row["reason"] = f"{protocol_a} infeasible"
            use_analytic = analytic_sp and protocol_b == "SP" and (qc == 1)
            er_b = math.nan
            b_valid = False
            if row["reason"] == "":
                if use_analytic:
                    er_b = sp_analytic_denominator(sc_p)
                    b_valid = True
                else:
                    sc_b = replace(sc_p, protocol=protocol_b)
                    try:
                        stats_b = run_scenario(sc_b, axis_index=2 * cell + 1,
                                               engine=engine, workers=workers)
                        er_b = stats_b.er
                        b_valid = stats_b.valid
                    except InfeasibleScenarioError:
                        row["reason"] = f"{protocol_b} infeasible"
                row["er_b"] = er_b
            if row["reason"] == "":
                if not stats_a.valid:
                    row["reason"] = f"{protocol_a} above fail limit"
                elif not b_valid:
                    row["reason"] = f"{protocol_b} above fail limit"
                elif er_b == 0:
                    row["reason"] = f"{protocol_b} rate is zero"
                else:
                    row["ratio"] = stats_a.er / er_b
                    row["valid"] = True
            rows.append(row)
            cell += 1
    return Table(columns, rows)


def analyze(sc: Scenario, samples: int = 20000, engine: str | None = None) -> Table:
    """Closed-form estimators for the scenario's parameters in one row."""
    t = sc.resolve_topology()
    kind, arg = _parse_users_spec(sc.users)
    engine = sc.engine if engine is None else engine
    uniform_p = float(sc.topology["p"]) if "grid_m" in sc.topology else None
    mean_pe = _mean_p_e(t)
    p_scalar = uniform_p if uniform_p is not None else mean_pe
    qc = sc.q_c
    n_users = arg if kind == "random" else len(_resolve_users(kind, arg, t, None))
    row = {
        "topology": t.name,
        "n_users": n_users,
        "q_c": "inf" if qc is None else qc,
        "mean_p_e": mean_pe,
        "expected_link_presence": analytics.expected_link_presence(p_scalar, qc),
        "min_user_cut": math.nan,
        "er_upper_bound": math.nan,
        "sp_analytic_er": math.nan,
        "analytic_er_estimate": math.nan,
    }
    if kind != "random":
        users = _resolve_users(kind, arg, t, None)
        row["min_user_cut"] = routing.min_user_cut_bound(t, users)
        row["er_upper_bound"] = analytics.er_upper_bound(t, users, p_scalar, qc)
        try:
            row["sp_analytic_er"] = sp_analytic_denominator(sc)
        except InfeasibleScenarioError:
            pass
    if qc is not None:
        rng = trial_rng(sc.seed, 0, _BOOTSTRAP_KEY - 1)
        dist = analytics.estimate_component_distribution(
            t, uniform_p, qc, samples, rng, engine=engine)
        row["analytic_er_estimate"] = analytics.analytic_er_estimate(t, n_users, dist)
    return Table(list(row), [row])


# ---------------------------------------------------------------------------
# export
# ---------------------------------------------------------------------------

def _format_cell(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if value is None:
        return "nan"
    if isinstance(value, float):
        return f"{value:.17g}"
    return str(value)


def export(table: Table, fmt: str, path) -> None:
    """Write a table as CSV or JSON with a stable column order."""
    if fmt == "csv":
        lines = [",".join(table.columns)]
        for row in table.rows:
            lines.append(",".join(_format_cell(row.get(c)) for c in table.columns))
        text = "\n".join(lines) + "\n"
    elif fmt == "json":
        clean_rows = []
        for row in table.rows:
            clean = {}
            for c in table.columns:
                v = row.get(c)
                if isinstance(v, float) and math.isnan(v):
                    v = None
                clean[c] = v
            clean_rows.append(clean)
        text = json.dumps({"columns": table.columns, "rows": clean_rows}, indent=2) + "\n"
    else:
        raise ValidationError(f"unknown export format {fmt!r} (expected csv or json)")
    if path in ("-", None):
        print(text, end="")
        return
    try:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
    except OSError as exc:
        raise ValidationError(f"cannot write {path}: {exc}") from None


def _coerce(cell: str):
    if cell == "true":
        return True
    if cell == "false":
        return False
    if cell == "nan":
        return math.nan
    for cast in (int, float):
        try:
            return cast(cell)
        except ValueError:
            continue
    return cell


def read_table(path, fmt: str = "csv") -> Table:
    """Read back an exported table (used by round-trip tests and tooling)."""
    with open(path, "r", encoding="utf-8") as fh:
        text = fh.read()
    if fmt == "json":
        doc = json.loads(text)
        return Table(doc["columns"], doc["rows"])
    lines = [ln for ln in text.splitlines() if ln]
    columns = lines[0].split(",")
    rows = []
    for ln in lines[1:]:
        cells = ln.split(",")
        rows.append({c: _coerce(v) for c, v in zip(columns, cells)})
    return Table(columns, rows)
