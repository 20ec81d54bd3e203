"""Acceptance criteria, one test per criterion.

Each test prints a single ``criterion N: PASS|FAIL ...`` line (visible in
``pytest -v`` output as well as with ``-s``) and then asserts.
"""

from __future__ import annotations

import math
import random
import time
from dataclasses import replace
from itertools import combinations

import pytest

from rcg.game import GameState, Winner, initial_state, play, step
from rcg.generate import chain
from rcg.oracle import (
    CORPUS1_LIMITS,
    adversary_policy_wins,
    enumerate_instances,
    minimax,
    qbf_eval,
    random_instances,
    traveler_policy_wins,
)
from rcg.qbf import EXAMPLE_QDIMACS, Qbf, Quantifier, interpret_transcript, parse_qdimacs, random_qbf, reduce
from rcg.solver import (
    AdversaryPolicy,
    Mode,
    Solver,
    TravelerPolicy,
    blocking_announcement,
    relevant_times,
    solve,
    solver_playout,
)
from rcg.sweep import log_slope, sweep
from rcg.temporal import DelayRecord

CORPUS2_SEED = 2024
FORMULA_SEED = 424242
FORMULA_COUNT = 210
SOLVE_LIMIT_SECONDS = 60.0
CORPUS1_LIMIT_SECONDS = 300.0


@pytest.fixture(autouse=True)
def _uncaptured(capsys):
    """Let the verdict line through pytest's capture."""
    global _capsys
    _capsys = capsys
    yield


def report(number: int, ok: bool, detail: str) -> None:
    with _capsys.disabled():
        print(f"\ncriterion {number}: {'PASS' if ok else 'FAIL'} {detail}")


@pytest.fixture(scope="module")
def corpus1():
    insts = list(enumerate_instances(CORPUS1_LIMITS))
    began = time.perf_counter()
    truth = [minimax(i) for i in insts]
    return insts, truth, time.perf_counter() - began


@pytest.fixture(scope="module")
def corpus2():
    insts = random_instances(500, CORPUS2_SEED)
    return insts, [minimax(i) for i in insts]


def formula_corpus() -> list[tuple[str, Qbf]]:
    def q(prefix, *clauses):
        return Qbf(tuple((Quantifier(c), i) for i, c in enumerate(prefix, start=1)), clauses)

    cases = [
        ("exists x (x)", q("e", (1,))),
        ("forall x (x)", q("a", (1,))),
        ("exists x forall y (x | y)", q("ea", (1, 2))),
        ("forall x exists y (x | y)", q("ae", (1, 2))),
        ("example formula", parse_qdimacs(EXAMPLE_QDIMACS)),
    ]
    rng = random.Random(FORMULA_SEED)
    for k in range(FORMULA_COUNT):
        n, m = rng.randint(1, 3), rng.randint(1, 3)
        cases.append((f"random #{k} n={n} m={m}", random_qbf(rng, n, m)))
    return cases


@pytest.fixture(scope="module")
def formulas():
    return [(name, q, qbf_eval(q)) for name, q in formula_corpus()]


def test_criterion_1_exhaustive_oracle(corpus1):
    insts, truth, oracle_seconds = corpus1
    began = time.perf_counter()
    wrong = [
        k for k, (inst, w) in enumerate(zip(insts, truth))
        if solve(inst, Mode.MEMO).winner is not w or solve(inst, Mode.DFS).winner is not w
    ]
    seconds = oracle_seconds + time.perf_counter() - began
    ok = not wrong and seconds <= CORPUS1_LIMIT_SECONDS
    report(1, ok, f"{len(insts)} instances, {len(wrong)} disagreements, {seconds:.1f}s total")
    assert not wrong, f"first disagreement at instance {wrong[0]}"
    assert seconds <= CORPUS1_LIMIT_SECONDS


def test_criterion_2_random_oracle(corpus2):
    insts, truth = corpus2
    wrong = [
        k for k, (inst, w) in enumerate(zip(insts, truth))
        if solve(inst, Mode.MEMO).winner is not w or solve(inst, Mode.DFS).winner is not w
    ]
    travelers = sum(w is Winner.TRAVELER for w in truth)
    report(2, not wrong, f"{len(insts)} instances ({travelers} traveler wins), {len(wrong)} disagreements")
    assert not wrong


_AGREEMENT: dict[str, tuple[list[str], float]] = {}


def _reduction_agreement(formulas, budget_rule):
    if budget_rule in _AGREEMENT:
        return _AGREEMENT[budget_rule]
    wrong, slowest = [], 0.0
    for name, q, truth in formulas:
        inst, _ = reduce(q, budget_rule=budget_rule)
        verdict = solve(inst)
        slowest = max(slowest, verdict.elapsed)
        if (verdict.winner is Winner.TRAVELER) is not truth:
            wrong.append(name)
    _AGREEMENT[budget_rule] = wrong, slowest
    return wrong, slowest


def test_criterion_3_reduction(formulas):
    wrong, slowest = _reduction_agreement(formulas, "derived")
    ok = not wrong and slowest <= SOLVE_LIMIT_SECONDS
    true_count = sum(t for _, _, t in formulas)
    report(
        3, ok,
        f"{len(formulas)} formulas ({true_count} true), {len(wrong)} disagreements, slowest solve {slowest:.2f}s",
    )
    assert not wrong, wrong[:5]
    assert slowest <= SOLVE_LIMIT_SECONDS


def _states_along(inst, transcript):
    state = initial_state(inst)
    states = [state]
    for k, r in enumerate(transcript.rounds, start=1):
        state = step(inst, state, r.announcement, r.move, k)
        states.append(state)
    return states


def _first_at(states, vertex):
    return next(s for s in states if s.position == vertex)


def _gadget_probes(example_reduction):
    """Returns a list of failed probe descriptions (empty when all hold)."""
    q, inst, gm = example_reduction
    m = q.m
    failures: list[str] = []
    solver = Solver(inst)
    exits = [g.entry for g in gm.variables[1:]] + [gm.exit_vertex]
    g1, g2, g3 = gm.variables

    def check(cond, what):
        if not cond:
            failures.append(what)

    # existential sides, walked against the blocking adversary
    for g, nxt in ((g1, exits[0]), (g3, exits[2])):
        for side in ("pos", "neg"):
            state = GameState(g.entry, gm.entry_times[g.index - 1], inst.no_delays())
            for arc_id in getattr(g, f"{side}_path"):
                state = step(inst, state, blocking_announcement(inst, state), arc_id)
            lits = getattr(g, f"{side}_literal")
            check(len(lits) == m, f"gadget {g.index} {side}: {len(lits)} literal arcs")
            check(state.delayed == frozenset(lits), f"gadget {g.index} {side}: delays {sorted(state.delayed)}")
            check(state.position == nxt, f"gadget {g.index} {side}: ends at {state.position}")

    # natural playout: every gadget charges its positive literals, universal side is (a)
    outcome, tr = solver_playout(inst, solver)
    check(outcome.winner is Winner.TRAVELER, "natural playout lost")
    states = _states_along(inst, tr)
    for g, nxt in zip(gm.variables, exits):
        arrived = _first_at(states, nxt)
        inside = arrived.delayed & frozenset(g.arc_ids())
        check(inside == frozenset(g.pos_literal), f"playout gadget {g.index}: delays {sorted(inside)}")
        check(arrived.clock <= gm.entry_times[g.index], f"playout gadget {g.index}: late at {arrived.clock}")
    check(len(g2.pos_literal) == m + 1, "universal positive side lacks the extra pair")
    at_c1 = _first_at(states, gm.clauses[0].entry)
    check(len(at_c1.delayed) == inst.budget, f"budget not exhausted at c1: {len(at_c1.delayed)} used")
    check(gm.bridge_bypass_arc in at_c1.delayed, "bypass arc not delayed on arrival at c1")

    # situation (c): first arc of the positive path delayed at the entry
    traveler = TravelerPolicy(inst, strict=False, solver=solver)
    adversary = AdversaryPolicy(inst, strict=False, solver=solver)

    def adversary_c(state):
        return frozenset({g2.pos_path[0]}) if state.position == g2.entry else adversary(state)

    outcome, tr = play(inst, traveler, adversary_c)
    inside = _first_at(_states_along(inst, tr), exits[1]).delayed & frozenset(g2.arc_ids())
    check(outcome.winner is Winner.TRAVELER, "situation (c) lost")
    check(inside == frozenset(g2.neg_literal) | {g2.pos_path[0]}, f"situation (c): delays {sorted(inside)}")
    check(len(inside) == m + 1, f"situation (c): {len(inside)} delays")
    check(interpret_transcript(gm, tr)[2] is False, "situation (c) does not read as x2 = false")

    # situation (b): negative path taken although the positive path was open
    def traveler_b(state, ann):
        if state.position == g2.entry and g2.pos_path[0] not in ann:
            return g2.neg_path[0]
        return traveler(state, ann)

    outcome, tr = play(inst, traveler_b, adversary)
    arrived = _first_at(_states_along(inst, tr), exits[1])
    check(arrived.delayed & frozenset(g2.arc_ids()) == frozenset(g2.neg_literal), "situation (b): delays")
    check(not solver.value(arrived), "situation (b): traveler still winning after the gadget")
    check(outcome.winner is Winner.ADVERSARY, "situation (b) traveler won")

    # clause gadgets, every subset of literal arcs, budget otherwise exhausted
    padding = [a for g in gm.variables for a in (*g.pos_path, *g.neg_path)]
    ends = [c.entry for c in gm.clauses[1:]] + [gm.final_clause_vertex]
    for cg, nxt in zip(gm.clauses, ends):
        probe = Solver(replace(inst, target=nxt))
        lits = [gm.variable(abs(lit)).literal_arc(cg.index, lit > 0) for lit in cg.literals]
        for r in range(len(lits) + 1):
            for subset in combinations(lits, r):
                delayed = frozenset(subset) | frozenset(padding[: inst.budget - r])
                state = GameState(cg.entry, gm.clause_times[cg.index - 1], DelayRecord(delayed, inst.delta))
                check(probe.value(state) is bool(subset), f"clause {cg.index} with {subset}")
    return failures


def test_criterion_4_gadget_probes(example_reduction):
    failures = _gadget_probes(example_reduction)
    report(4, not failures, f"{len(failures)} failed probes" + (f": {failures[:3]}" if failures else ""))
    assert not failures


def _certify(inst):
    s = Solver(inst)
    if s.solve().winner is Winner.TRAVELER:
        return traveler_policy_wins(inst, TravelerPolicy(inst, solver=s))
    return adversary_policy_wins(inst, AdversaryPolicy(inst, solver=s))


def test_criterion_5_certification(corpus1, corpus2):
    insts = corpus1[0] + corpus2[0]
    bad = sum(not _certify(i) for i in insts)
    report(5, bad == 0, f"{len(insts)} policies certified, {bad} counterexamples")
    assert bad == 0


def test_criterion_6_space(corpus1, corpus2):
    over, allocated = 0, 0
    for k, inst in enumerate(corpus1[0] + corpus2[0]):
        v = solve(inst, Mode.DFS)
        over += v.peak_depth > 2 * len(relevant_times(inst)) + 2
        allocated += k < len(corpus1[0]) and v.memo_entries > 0
    ok = over == 0 and allocated == 0
    report(6, ok, f"{over} depth-bound violations, {allocated} corpus-1 solves with memo entries")
    assert ok


def test_criterion_7_scaling():
    rows = sweep(chain(4, 0, 1, 3), range(0, 4))
    slope = log_slope(rows)
    ok = math.isfinite(slope)
    states = ", ".join(f"x={r.budget}:{r.states}" for r in rows)
    report(7, ok, f"chain(length 4, width 3) states {states}; fitted log-slope {slope:.3f}")
    assert ok


def test_criterion_8_literal_budget(formulas):
    derived_wrong, _ = _reduction_agreement(formulas, "derived")
    literal_wrong, _ = _reduction_agreement(formulas, "literal")
    total = len(formulas)
    rate = 100.0 * (total - len(literal_wrong)) / total
    risky = [
        name for name, q, _ in formulas
        if q.universal_count >= 1 and q.n >= 2 and name in literal_wrong
    ]
    report(
        8, not derived_wrong,
        f"derived budget {total - len(derived_wrong)}/{total}; literal budget agreement "
        f"{total - len(literal_wrong)}/{total} ({rate:.1f}%), "
        f"{len(risky)} of its misses have a universal and n >= 2",
    )
    assert not derived_wrong
