"""Acceptance suite: every criterion prints one PASS line with its numbers.

Run with ``pytest tests/test_acceptance.py -v -s``. Criteria with a stated
wall-clock budget assert it. Criterion 8 (the cut upper bound) audits every
scenario executed by the earlier criteria through a shared registry, then
adds its own battery, so test order inside this file matters: it is
defined last.
"""

import itertools
import math
import time

import numpy as np
import pytest

from ghznetsim.analytics import (
    analytic_er_estimate,
    er_upper_bound,
    estimate_component_distribution,
    expected_link_presence,
    sp_analytic_er,
)
from ghznetsim.harness import (
    Scenario,
    compute_er_stats,
    run_trials,
    sp_analytic_denominator,
    speedup_report,
)
from ghznetsim.netstate import NetworkState
from ghznetsim.routing import min_user_cut_bound, steiner_tree
from ghznetsim.topology import build_grid, catalog_stats, load_topology, scale_lengths

from conftest import (
    DATA_DIR,
    brute_force_packing_count,
    brute_force_steiner_cost,
    connected_graphs,
    edmonds_karp_value,
    make_topology,
    make_view,
    terminals_connected,
)

# every scenario executed by this suite: (label, uniform p, q_c, stats,
# max over trials of the user-set cut bound)
_SCENARIO_REGISTRY = []


def run_registered(label, *, grid_m, p, protocol, users, q_c, trials, seed,
                   max_timeslots=5000):
    sc = Scenario.from_dict({
        "topology": {"grid_m": grid_m, "p": p},
        "protocol": protocol,
        "users": users,
        "q_c": q_c,
        "trials": trials,
        "max_timeslots": max_timeslots,
        "seed": seed,
    })
    t = sc.resolve_topology()
    records = run_trials(sc)
    stats = compute_er_stats(records, sc.seed)
    cut = max(min_user_cut_bound(t, r.users) for r in records)
    _SCENARIO_REGISTRY.append((label, p, q_c, stats, cut))
    return stats


def overlap_ok(high_stats, low_stats):
    """Ordering with CI tolerance: accept unless separated the wrong way."""
    return (high_stats.er >= low_stats.er
            or high_stats.ci95_high >= low_stats.ci95_low)


def test_criterion_01_protocol_ordering():
    t0 = time.perf_counter()
    order = ["MP-P", "MP-C", "MP-G+", "SP"]
    lines = []
    for p in (0.5, 0.75, 0.9):
        stats = {proto: run_registered(f"c1 {proto} p={p}", grid_m=6, p=p,
                                       protocol=proto, users="random:4", q_c=1,
                                       trials=1000, seed=101)
                 for proto in order}
        for hi, lo in zip(order, order[1:]):
            assert overlap_ok(stats[hi], stats[lo]), (
                f"p={p}: ER({hi})={stats[hi].er:.4f} significantly below "
                f"ER({lo})={stats[lo].er:.4f}")
        lines.append(f"p={p}: " + " >= ".join(
            f"{proto} {stats[proto].er:.3f}" for proto in order))
    elapsed = time.perf_counter() - t0
    assert elapsed < 120, f"criterion 1 took {elapsed:.0f}s (budget 120s)"
    print(f"\nACCEPTANCE 1 PASS ordering held at all p ({'; '.join(lines)}) "
          f"in {elapsed:.0f}s")


def test_criterion_02_packing_rate_above_one():
    high = run_registered("c2 MP-P p=0.9", grid_m=6, p=0.9, protocol="MP-P",
                          users="random:4", q_c=1, trials=1000, seed=102)
    assert high.er > 1.0, f"ER(MP-P)={high.er:.3f} not above 1 at p=0.9"
    low_p = run_registered("c2 MP-P p=0.3", grid_m=6, p=0.3, protocol="MP-P",
                           users="random:4", q_c=1, trials=1000, seed=103)
    low_c = run_registered("c2 MP-C p=0.3", grid_m=6, p=0.3, protocol="MP-C",
                           users="random:4", q_c=1, trials=1000, seed=103)
    joint = (max(low_p.ci95_low, low_c.ci95_low)
             <= min(low_p.ci95_high, low_c.ci95_high))
    assert joint, (f"p=0.3: MP-P [{low_p.ci95_low:.4f},{low_p.ci95_high:.4f}] vs "
                   f"MP-C [{low_c.ci95_low:.4f},{low_c.ci95_high:.4f}] disjoint")
    print(f"\nACCEPTANCE 2 PASS ER(MP-P)={high.er:.3f} > 1 at p=0.9; "
          f"p=0.3 rates {low_p.er:.4f} vs {low_c.er:.4f} within joint CI")


def test_criterion_03_distance_independence():
    t0 = time.perf_counter()
    ers = {}
    analytic = {}
    for m in (4, 6, 8, 10):
        stats = run_registered(f"c3 MP-C M={m}", grid_m=m, p=0.75, protocol="MP-C",
                               users="corners", q_c=1, trials=1000, seed=104)
        ers[m] = stats.er
        sc = Scenario.from_dict({"topology": {"grid_m": m, "p": 0.75},
                                 "protocol": "SP", "users": "corners",
                                 "q_c": 1, "trials": 1, "seed": 104})
        analytic[m] = sp_analytic_denominator(sc)
    spread = max(ers.values()) / min(ers.values())
    assert spread <= 1.25, f"MP-C rate spread {spread:.3f} across widths"
    drop = analytic[4] / analytic[10]
    assert drop >= 10, f"analytic SP rate only fell {drop:.1f}x from M=4 to M=10"
    elapsed = time.perf_counter() - t0
    assert elapsed < 300, f"criterion 3 took {elapsed:.0f}s (budget 300s)"
    print(f"\nACCEPTANCE 3 PASS MP-C spread {spread:.3f} <= 1.25 while "
          f"SP product fell {drop:.0f}x; {elapsed:.0f}s")


def test_criterion_04_twenty_five_users():
    stats = run_registered("c4 MP-C 25 users", grid_m=6, p=0.75, protocol="MP-C",
                           users="random:25", q_c=1, trials=1000, seed=105)
    assert stats.er == pytest.approx(0.5, abs=0.15), f"ER={stats.er:.3f}"
    print(f"\nACCEPTANCE 4 PASS 25-user cooperative rate {stats.er:.3f} = 0.5 +- 0.15")


def test_criterion_05_link_presence_formula():
    t0 = time.perf_counter()
    t = make_topology(2, [(0, 1)], p=1.0)
    worst = 0.0
    for i, (p, q_c) in enumerate(itertools.product((0.1, 0.2, 0.5, 0.9),
                                                   (1, 2, 5, 10))):
        pe = np.array([p])
        state = NetworkState(t, np.random.default_rng(200 + i), q_c=q_c, p_e=pe)
        hits = 0
        slots = 100_000
        advance = state.advance_timeslot
        status = state.status
        for _ in range(slots):
            advance()
            if status[0] == 1:
                hits += 1
        err = abs(hits / slots - expected_link_presence(p, q_c))
        worst = max(worst, err)
        assert err <= 0.01, f"(p={p}, q_c={q_c}): |error|={err:.4f}"
    elapsed = time.perf_counter() - t0
    assert elapsed < 60, f"criterion 5 took {elapsed:.0f}s (budget 60s)"
    print(f"\nACCEPTANCE 5 PASS occupancy matched on all 16 points "
          f"(worst |error| {worst:.4f}); {elapsed:.0f}s")


def test_criterion_06_product_formula():
    rng = np.random.default_rng(106)
    worst = 0.0
    for _ in range(5):
        hops = int(rng.integers(3, 9))
        p = float(rng.uniform(0.5, 0.95))
        t = make_topology(hops + 1, [(i, i + 1) for i in range(hops)], p=p)
        sc = Scenario.from_dict({
            "topology": {"grid_m": 2, "p": 1.0},  # replaced below
            "protocol": "SP", "users": [0, hops], "q_c": 1,
            "trials": 10_000, "seed": int(rng.integers(1 << 30)),
        })
        records = []
        from ghznetsim.harness import trial_rng
        from ghznetsim.protocols import ProtocolConfig, run_sp
        cfg = ProtocolConfig(users=(0, hops), q_c=1)
        ghz = slots = 0
        for i in range(10_000):
            out = run_sp(t, cfg, trial_rng(sc.seed, 0, i))
            ghz += out.ghz_count
            slots += out.timeslots_used
        er = ghz / slots
        want = sp_analytic_er([p] * hops)
        rel = abs(er - want) / want
        worst = max(worst, rel)
        assert rel <= 0.05, f"route {hops} hops at p={p:.2f}: {er:.5f} vs {want:.5f}"
    print(f"\nACCEPTANCE 6 PASS product formula held on 5 routes "
          f"(worst relative error {worst:.3f})")


def test_criterion_07_component_estimate_fit():
    t0 = time.perf_counter()
    t = build_grid(6, 1.0)
    worst = 0.0
    for s, p in itertools.product((3, 4), (0.6, 0.75, 0.9)):
        stats = run_registered(f"c7 MP-C s={s} p={p}", grid_m=6, p=p,
                               protocol="MP-C", users=f"random:{s}", q_c=1,
                               trials=1500, seed=107)
        dist = estimate_component_distribution(t, p, 1, 40_000,
                                               np.random.default_rng(1070))
        est = analytic_er_estimate(t, s, dist)
        rel = abs(est - stats.er) / stats.er
        worst = max(worst, rel)
        assert rel <= 0.10, (f"s={s}, p={p}: estimate {est:.4f} vs simulated "
                             f"{stats.er:.4f} ({rel:.1%})")
    elapsed = time.perf_counter() - t0
    assert elapsed < 300, f"criterion 7 took {elapsed:.0f}s (budget 300s)"
    print(f"\nACCEPTANCE 7 PASS component estimate within 10% on all six "
          f"points (worst {worst:.1%}); {elapsed:.0f}s")


def _oracle_3x3(users):
    """Per-subgraph connectivity and optimal packing count on the 3x3 grid,
    by exhaustive enumeration of all 2^12 link subsets."""
    t = build_grid(3, 1.0)
    pairs_all = [(e.u, e.v) for e in t.edges]
    connect = np.zeros(4096, dtype=bool)
    packs = np.zeros(4096, dtype=np.int32)
    for bits in range(4096):
        active = [(bits >> i) & 1 == 1 for i in range(12)]
        pairs = [pairs_all[i] for i in range(12) if active[i]]
        if terminals_connected(9, pairs, users):
            connect[bits] = True
            packs[bits] = brute_force_packing_count(make_view(9, pairs_all, active),
                                                    users, cap=3)
    return connect, packs


def _subset_weights(p):
    m = 12
    weights = np.empty(4096)
    for bits in range(4096):
        k = bin(bits).count("1")
        weights[bits] = p ** k * (1 - p) ** (m - k)
    return weights


def test_criterion_09_exhaustive_oracle():
    users = (0, 2, 7)
    connect, packs = _oracle_3x3(users)
    for p in (0.3, 0.5, 0.75):
        w = _subset_weights(p)
        exact_success = float(w[connect].sum())
        exact_count = float((w * packs).sum())
        for proto, exact in (("MP-C", exact_success), ("MP-P", exact_count)):
            stats = run_registered(f"c9 {proto} p={p}", grid_m=3, p=p,
                                   protocol=proto, users=list(users), q_c=1,
                                   trials=10_000, seed=109)
            sigma = (stats.ci95_high - stats.ci95_low) / 3.92
            assert abs(stats.er - exact) <= 3 * sigma + 1e-12, (
                f"{proto} p={p}: simulated {stats.er:.5f} vs exact {exact:.5f} "
                f"(3 sigma = {3 * sigma:.5f})")
    print(f"\nACCEPTANCE 9 PASS Monte Carlo matched the 4096-subset oracle "
          f"for MP-C success and MP-P tree count at all three p")


def test_criterion_10_speedup_magnitude():
    base = Scenario.from_dict({
        "topology": {"grid_m": 6, "p": 0.47}, "protocol": "MP-P",
        "users": "corners", "q_c": 1, "trials": 1000,
        "max_timeslots": 5000, "seed": 110,
    })
    table = speedup_report(base, p_values=[0.47], qc_values=[1], analytic_sp=True)
    row = table.rows[0]
    assert row["valid"], f"cell blank: {row['reason']}"
    stats_like = type("S", (), {})()
    _SCENARIO_REGISTRY.append(("c10 MP-P p=0.47", 0.47, 1,
                               compute_er_stats(run_trials(base), base.seed), 2))
    assert row["ratio"] >= 1e3, f"speedup {row['ratio']:.1f} below 1000"
    print(f"\nACCEPTANCE 10 PASS multipath/product-form speedup "
          f"{row['ratio']:.0f}x at p=0.47 (numerator {row['er_a']:.4f}, "
          f"denominator {row['er_b']:.2e})")


def test_criterion_11_routing_oracles():
    # Steiner optimality: every connected 5-node graph with <= 8 edges,
    # all 2..4-terminal subsets, plus seeded 6..8-node fixtures
    checked = 0
    for pairs in connected_graphs(5, 8):
        view = make_view(5, pairs)
        for k in (2, 3, 4):
            for terms in itertools.combinations(range(5), k):
                tree = steiner_tree(view, terms)
                assert len(tree.edges) == brute_force_steiner_cost(view, terms)
                checked += 1
    rng = np.random.default_rng(111)
    extra = 0
    while extra < 300:
        n = int(rng.integers(6, 9))
        wanted = int(rng.integers(n - 1, 9))
        pairs = set()
        while len(pairs) < wanted:
            a, b = sorted(int(x) for x in rng.choice(n, size=2, replace=False))
            pairs.add((a, b))
        pairs = sorted(pairs)
        if not terminals_connected(n, pairs, range(n)):
            continue
        view = make_view(n, pairs)
        k = int(rng.integers(2, 5))
        terms = sorted(int(x) for x in rng.choice(n, size=k, replace=False))
        tree = steiner_tree(view, terms)
        assert len(tree.edges) == brute_force_steiner_cost(view, terms)
        extra += 1

    # flow: service count equals an independent augmenting-path solver
    from ghznetsim.routing import disjoint_paths_to_centre
    flows = 0
    while flows < 200:
        n = int(rng.integers(5, 11))
        wanted = int(rng.integers(n - 1, 21))
        pairs = set()
        while len(pairs) < wanted and len(pairs) < n * (n - 1) // 2:
            a, b = sorted(int(x) for x in rng.choice(n, size=2, replace=False))
            pairs.add((a, b))
        view = make_view(n, sorted(pairs))
        users = sorted(int(x) for x in rng.choice(n - 1, size=min(4, n - 1),
                                                  replace=False) + 1)
        sol = disjoint_paths_to_centre(view, 0, users)
        assert sol.users_served == edmonds_karp_value(view, 0, users)
        flows += 1
    print(f"\nACCEPTANCE 11 PASS Steiner optimum on {checked} exhaustive + "
          f"{extra} sampled instances; flow matched on {flows} fixtures")


def test_criterion_12_topology_catalog():
    expected = {
        "arpa": (20, 31, 3.1), "eon": (20, 39, 3.9), "eurocore": (11, 25, 4.55),
        "nsfnet": (14, 21, 3.0), "uknet": (21, 39, 3.71), "usnet": (46, 76, 3.3),
    }
    for name, (nodes, edges, degree) in sorted(expected.items()):
        t = load_topology(DATA_DIR / f"{name}.topo")
        stats = catalog_stats(t)
        assert (stats.node_count, stats.edge_count) == (nodes, edges), name
        assert abs(stats.mean_nodal_degree - degree) <= 0.01, name
    print(f"\nACCEPTANCE 12 PASS all six catalog files load with exact "
          f"counts and degree means within 0.01")


def test_criterion_08_upper_bound_everywhere():
    # audit every scenario the suite ran, plus a battery of its own
    assert _SCENARIO_REGISTRY, "registry empty; run the full acceptance module"
    violations = []
    for label, p, q_c, stats, cut in _SCENARIO_REGISTRY:
        bound = cut * expected_link_presence(p, q_c)
        if stats.er > bound + 1e-9:
            violations.append((label, stats.er, bound))
    for proto, p, q_c in itertools.product(("SP", "MP-C", "MP-P"),
                                           (0.4, 0.8), (1, 3)):
        stats = run_registered(f"c8 {proto} p={p} qc={q_c}", grid_m=4, p=p,
                               protocol=proto, users="corners", q_c=q_c,
                               trials=300, seed=108, max_timeslots=2000)
        t = build_grid(4, p)
        bound = er_upper_bound(t, t.corner_users(), p, q_c)
        if stats.er > bound + 1e-9:
            violations.append((f"c8 {proto} p={p} qc={q_c}", stats.er, bound))
    assert not violations, violations
    print(f"\nACCEPTANCE 8 PASS simulated rate stayed below the cut bound in "
          f"all {len(_SCENARIO_REGISTRY)} scenarios audited")
