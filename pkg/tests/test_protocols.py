import numpy as np
import pytest

from ghznetsim.errors import InfeasibleScenarioError, ValidationError
from ghznetsim.harness import trial_rng
from ghznetsim.protocols import (
    ProtocolConfig,
    run_mp_c,
    run_mp_gplus,
    run_mp_p,
    run_protocol,
    run_sp,
)
from ghznetsim.topology import build_grid

from conftest import make_topology


def path_topology(n, p=1.0):
    return make_topology(n, [(i, i + 1) for i in range(n - 1)], p=p)


def rng(seed=0):
    return np.random.default_rng(seed)


class TestConfig:
    def test_users_deduplicated_and_sorted(self):
        cfg = ProtocolConfig(users=(5, 0, 5, 3))
        assert cfg.users == (0, 3, 5)

    def test_single_user_rejected(self):
        with pytest.raises(ValidationError):
            ProtocolConfig(users=(1,))

    def test_bad_cutoff_rejected(self):
        with pytest.raises(ValidationError):
            ProtocolConfig(users=(0, 1), q_c=0)

    def test_user_outside_topology_rejected(self):
        with pytest.raises(ValidationError):
            run_mp_c(build_grid(3, 1.0), ProtocolConfig(users=(0, 99)), rng())


class TestSp:
    def test_certain_links_take_one_slot(self):
        out = run_sp(build_grid(4, 1.0), ProtocolConfig(users=(0, 3, 12, 15)), rng())
        assert out == out.__class__(True, 1, 1, (4,))

    def test_adjacent_users_geometric_wait(self):
        # centre at one user: a single edge at p = 0.5, so two slots on average
        t = path_topology(2, p=0.5)
        cfg = ProtocolConfig(users=(0, 1))
        slots = [run_sp(t, cfg, trial_rng(1, 0, i)).timeslots_used
                 for i in range(10_000)]
        assert np.mean(slots) == pytest.approx(2.0, rel=0.05)

    def test_failure_consumes_budget(self):
        t = build_grid(3, 0.0)
        out = run_sp(t, ProtocolConfig(users=(0, 8), max_timeslots=40), rng())
        assert (out.succeeded, out.timeslots_used, out.ghz_count) == (False, 40, 0)

    def test_paths_accumulate_across_slots(self):
        # two users with different path lengths get served independently
        t = path_topology(5, p=0.35)
        cfg = ProtocolConfig(users=(0, 4), max_timeslots=5000)
        wins = sum(run_sp(t, cfg, trial_rng(2, 0, i)).succeeded for i in range(200))
        assert wins == 200

    def test_infeasible_centre_raises(self):
        t = build_grid(4, 0.5)
        with pytest.raises(InfeasibleScenarioError):
            run_sp(t, ProtocolConfig(users=(0, 3, 12, 15, 1)), rng())

    def test_tree_variant_requires_simultaneous_links(self):
        t = path_topology(3, p=1.0)
        cfg = ProtocolConfig(users=(0, 2), sp_tree=True)
        out = run_sp(t, cfg, rng())
        assert out.succeeded and out.timeslots_used == 1

    def test_tree_variant_no_accumulation(self):
        # with p = 0.5 on two edges, simultaneity is a 1/4-per-slot event
        t = path_topology(3, p=0.5)
        cfg = ProtocolConfig(users=(0, 2), sp_tree=True)
        slots = [run_sp(t, cfg, trial_rng(3, 0, i)).timeslots_used
                 for i in range(4000)]
        assert np.mean(slots) == pytest.approx(4.0, rel=0.1)


class TestMpGplus:
    def test_certain_links_take_one_slot(self):
        out = run_mp_gplus(build_grid(4, 1.0), ProtocolConfig(users=(0, 3, 12, 15)),
                           rng())
        assert out.succeeded and out.timeslots_used == 1 and out.ghz_count == 1

    def test_zero_probability_fails(self):
        out = run_mp_gplus(build_grid(3, 0.0),
                           ProtocolConfig(users=(0, 2, 6), max_timeslots=25), rng())
        assert not out.succeeded and out.timeslots_used == 25

    def test_reroutes_around_precomputed_paths(self):
        # in expectation MP-G+ beats SP on the same topology and seed set
        t = build_grid(5, 0.6)
        cfg = ProtocolConfig(users=(0, 4, 20, 24))
        sp = np.mean([run_sp(t, cfg, trial_rng(4, 0, i)).timeslots_used
                      for i in range(300)])
        mg = np.mean([run_mp_gplus(t, cfg, trial_rng(4, 0, i)).timeslots_used
                      for i in range(300)])
        assert mg < sp


class TestMpC:
    def test_certain_links(self):
        out = run_mp_c(build_grid(6, 1.0), ProtocolConfig(users=(0, 5, 30, 35)), rng())
        assert out.succeeded and out.timeslots_used == 1
        assert out.ghz_sizes == (4,)

    def test_no_centre_needed_for_many_users(self):
        users = tuple(range(0, 32, 2))  # 16 users, far above any node degree
        out = run_mp_c(build_grid(6, 1.0), ProtocolConfig(users=users), rng())
        assert out.succeeded and out.ghz_sizes == (16,)

    def test_zero_probability_fails(self):
        out = run_mp_c(build_grid(3, 0.0), ProtocolConfig(users=(0, 8),
                                                          max_timeslots=30), rng())
        assert (out.succeeded, out.ghz_count) == (False, 0)


class TestMpP:
    def test_corner_pack_of_two(self):
        # at p = 1 the terminal-leaf tie-break leaves a second disjoint tree
        out = run_mp_p(build_grid(6, 1.0), ProtocolConfig(users=(0, 5, 30, 35)), rng())
        assert out.succeeded and out.timeslots_used == 1
        assert out.ghz_count == 2
        assert out.ghz_sizes == (4, 4)

    def test_never_below_cooperative(self):
        # identical stream: same success slot, at least as many states
        t = build_grid(6, 0.65)
        cfg = ProtocolConfig(users=(3, 17, 22, 31))
        for i in range(200):
            c = run_mp_c(t, cfg, trial_rng(5, 0, i))
            p = run_mp_p(t, cfg, trial_rng(5, 0, i))
            assert p.timeslots_used == c.timeslots_used
            assert p.ghz_count >= c.ghz_count

    def test_pack_bounded_by_user_cut(self):
        from ghznetsim.routing import min_user_cut_bound
        t = build_grid(5, 0.9)
        users = (0, 4, 20, 24)
        bound = min_user_cut_bound(t, users)
        for i in range(200):
            out = run_mp_p(t, ProtocolConfig(users=users), trial_rng(6, 0, i))
            assert out.ghz_count <= bound


class TestDeterminism:
    @pytest.mark.parametrize("proto", ["SP", "SP-tree", "MP-G+", "MP-C", "MP-P"])
    def test_replay_equality(self, proto):
        t = build_grid(4, 0.55)
        cfg = ProtocolConfig(users=(0, 3, 12, 15), q_c=2, max_timeslots=400)
        a = run_protocol(proto, t, cfg, trial_rng(7, 0, 0))
        b = run_protocol(proto, t, cfg, trial_rng(7, 0, 0))
        assert a == b

    def test_distinct_streams_differ(self):
        t = build_grid(4, 0.55)
        cfg = ProtocolConfig(users=(0, 15), max_timeslots=400)
        outs = {run_mp_c(t, cfg, trial_rng(8, 0, i)).timeslots_used for i in range(20)}
        assert len(outs) > 1
