from __future__ import annotations

import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import chain_instance, instances
from rcg.errors import PolicyError, ResourceLimitError
from rcg.game import GameState, Winner, initial_state, legal_announcements, replay
from rcg.generate import with_budget
from rcg.kernel import available_implementations, make_kernel
from rcg.oracle import adversary_policy_wins, minimax, traveler_policy_wins
from rcg.solver import (
    Mode,
    Solver,
    adversary_policy,
    blocking_announcement,
    default_max_states,
    relevant_times,
    solve,
    solve_state,
    solver_playout,
    traveler_policy,
)
from rcg.temporal import DelayRecord, RcgInstance, TemporalGraph

KERNELS = available_implementations()


def at(v, t, *delayed):
    return GameState(v, t, DelayRecord(frozenset(delayed), 1))


class TestRelevantTimes:
    def test_chain(self, chain):
        assert relevant_times(chain).times == (1, 2, 3, 4)

    def test_single_arc_wide_delta(self):
        inst = RcgInstance(TemporalGraph.from_tuples(2, [(1, 2, 1, 1)]), 1, 2, 0, 2)
        assert relevant_times(inst).times == (1, 2, 4)

    def test_no_arcs(self):
        assert relevant_times(RcgInstance(TemporalGraph(1, ()), 1, 1, 0, 1)).times == (1,)

    @given(instances())
    def test_size_bound(self, inst):
        assert len(relevant_times(inst)) <= 2 * inst.graph.arc_count + 1


@pytest.mark.parametrize("kernel", KERNELS)
@pytest.mark.parametrize("mode", list(Mode))
class TestSolveExamples:
    def test_free_chain(self, chain0, mode, kernel):
        assert solve(chain0, mode, implementation=kernel).winner is Winner.TRAVELER

    def test_chain(self, chain, mode, kernel):
        assert solve(chain, mode, implementation=kernel).winner is Winner.ADVERSARY

    def test_relaxed_chain(self, relaxed_chain, mode, kernel):
        assert solve(relaxed_chain, mode, implementation=kernel).winner is Winner.TRAVELER

    def test_state_values(self, chain, mode, kernel):
        s = Solver(chain, mode, implementation=kernel)
        assert s.value(at(3, 99, 2))
        assert not s.value(at(2, 3, 1))
        assert s.value(at(2, 2, 1))


class TestStateQueries:
    def test_solve_state(self, chain):
        assert solve_state(chain, at(2, 2, 1))
        assert not solve_state(chain, at(2, 3, 1), "dfs")

    def test_foreign_state_rejected(self, chain):
        with pytest.raises(ValueError):
            Solver(chain).value(at(9, 1))
        with pytest.raises(ValueError):
            Solver(chain).value(GameState(1, 1, DelayRecord(frozenset(), 2)))


class TestPolicies:
    def test_traveler_only_arc(self, chain0):
        assert traveler_policy(chain0)(at(1, 1), set()) == 1

    def test_traveler_after_delay(self, relaxed_chain):
        assert traveler_policy(relaxed_chain)(at(1, 1), {1}) == 1

    def test_traveler_at_losing_state(self, chain):
        with pytest.raises(PolicyError):
            traveler_policy(chain)(at(1, 1), {1})
        assert traveler_policy(chain, strict=False)(at(1, 1), {1}) == 1

    def test_adversary_examples(self, chain):
        pol = adversary_policy(chain)
        assert pol(at(1, 1)) == {1}
        assert pol(at(2, 3, 1)) == frozenset()

    def test_adversary_no_budget_left(self):
        inst = chain_instance(budget=1)
        assert adversary_policy(inst)(at(2, 3, 1)) == frozenset()

    def test_adversary_at_winning_state(self, relaxed_chain):
        with pytest.raises(PolicyError):
            adversary_policy(relaxed_chain)(at(1, 1))
        assert adversary_policy(relaxed_chain, strict=False)(at(1, 1)) in legal_announcements(
            relaxed_chain, at(1, 1)
        )

    def test_least_id_tie_break(self):
        g = TemporalGraph.from_tuples(2, [(1, 2, 1, 1), (1, 2, 1, 1), (1, 2, 2, 1)])
        inst = RcgInstance(g, 1, 2, 1, 1)
        pol = traveler_policy(inst)
        assert pol(at(1, 1), set()) == 1
        assert pol(at(1, 1), {1}) == 1

    @given(instances(max_arcs=5, max_budget=2))
    def test_policies_certified(self, inst):
        solver = Solver(inst)
        if solver.solve().winner is Winner.TRAVELER:
            assert traveler_policy_wins(inst, traveler_policy(inst, solver=solver))
        else:
            assert adversary_policy_wins(inst, adversary_policy(inst, solver=solver))

    @given(instances(max_arcs=6))
    def test_playout_matches_verdict(self, inst):
        solver = Solver(inst)
        outcome, tr = solver_playout(inst, solver)
        assert outcome.winner is solver.solve().winner
        assert replay(inst, tr) == outcome


class TestBlocking:
    def test_blocks_two_move_escape(self):
        # 1 -> 2 -> 3 with a slow detour; delaying arc 2 strands the fast route
        g = TemporalGraph.from_tuples(3, [(1, 2, 1, 1), (2, 3, 2, 1)])
        inst = RcgInstance(g, 1, 3, 1, 1)
        assert blocking_announcement(inst, at(1, 1)) == {1}

    def test_falls_back_to_empty(self, relaxed_chain):
        assert blocking_announcement(relaxed_chain, at(1, 1)) == frozenset()


class TestAgreement:
    @given(instances())
    def test_modes_and_kernels_match_minimax(self, inst):
        truth = minimax(inst)
        for kernel in KERNELS:
            for mode in Mode:
                assert solve(inst, mode, implementation=kernel).winner is truth

    @given(instances())
    def test_memo_key_schemes_agree(self, inst):
        live = Solver(inst, memo_key="live")
        full = Solver(inst, memo_key="full")
        assert live.solve().winner is full.solve().winner
        assert live.kernel.memo_size <= full.kernel.memo_size

    @given(instances())
    def test_budget_monotone(self, inst):
        wins = [solve(with_budget(inst, x)).winner is Winner.TRAVELER for x in range(inst.budget + 1)]
        assert wins == sorted(wins, reverse=True)

    @given(instances(), st.randoms(use_true_random=False))
    def test_relabeling_invariance(self, inst, rng):
        n, arcs = inst.graph.vertex_count, list(inst.graph.arcs)
        perm = list(range(1, n + 1))
        rng.shuffle(perm)
        rng.shuffle(arcs)
        g = TemporalGraph.from_tuples(
            n, [(perm[a.tail - 1], perm[a.head - 1], a.label, a.traversal) for a in arcs]
        )
        other = RcgInstance(g, perm[inst.start - 1], perm[inst.target - 1], inst.budget, inst.delta)
        assert solve(other).winner is solve(inst).winner


class TestStructure:
    @given(instances())
    def test_memo_clocks_are_relevant(self, inst):
        s = Solver(inst, short_circuit=False)
        s.solve()
        times = relevant_times(inst)
        assert all(t in times for _, t, _, _, _ in s.kernel.memo_items())

    @given(instances(max_arcs=5))
    def test_memo_entries_recompute(self, inst):
        s = Solver(inst, short_circuit=False)
        s.solve()
        g = inst.graph
        arcs = [(a.tail, a.head, a.label, a.traversal) for a in g.arcs]
        items = s.kernel.memo_items()
        for v, t, ids, used, value in random.Random(0).sample(items, min(10, len(items))):
            fresh = make_kernel(g.vertex_count, arcs, inst.target, inst.budget, inst.delta, memo_key="full")
            mask = sum(1 << a for a in ids)
            assert fresh.solve(v, t, mask, used) == value

    @given(instances())
    def test_dfs_depth_and_no_memo(self, inst):
        v = solve(inst, Mode.DFS)
        assert v.peak_depth <= 2 * len(relevant_times(inst)) + 2
        assert v.memo_entries == 0

    def test_state_cap(self, example_reduction):
        _, inst, _ = example_reduction
        with pytest.raises(ResourceLimitError):
            solve(inst, max_states=1000)

    def test_state_cap_env(self, monkeypatch):
        monkeypatch.setenv("RCG_MAX_STATES", "123")
        assert default_max_states() == 123
        monkeypatch.delenv("RCG_MAX_STATES")
        assert default_max_states() == 50_000_000

    def test_dfs_uncapped_by_default(self, chain):
        assert Solver(chain, Mode.DFS, implementation="python").kernel.max_states is None

    def test_dfs_cap_when_requested(self, example_reduction):
        _, inst, _ = example_reduction
        with pytest.raises(ResourceLimitError):
            solve(inst, Mode.DFS, max_states=500)

    def test_verdict_stats(self, chain):
        v = solve(chain)
        line = v.stats_line()
        assert "states=" in line and "depth=" in line and "time=" in line
        assert v.states >= 1


def test_initial_state_value_matches_verdict(example_reduction):
    _, inst, _ = example_reduction
    s = Solver(inst)
    assert s.value(initial_state(inst)) == (s.solve().winner is Winner.TRAVELER)
