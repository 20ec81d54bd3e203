"""Ground-truth engines used to cross-check the solver and the reduction.

Nothing here imports the solver: the minimax below recurses over the
referee's own legality functions with no caching and no restriction of the
clock domain, so agreement with the solver is evidence, not tautology.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from itertools import combinations_with_replacement, product
from typing import TYPE_CHECKING, Callable, Iterator

from rcg.errors import ResourceLimitError
from rcg.game import (
    GameState,
    Winner,
    initial_state,
    is_terminal,
    legal_announcements,
    legal_moves,
    step,
)
from rcg.temporal import RcgInstance, TemporalGraph

if TYPE_CHECKING:
    from rcg.qbf import Qbf

MAX_ORACLE_ARCS = 12
MAX_ORACLE_BUDGET = 4
MAX_QBF_VARS = 20


def _traveler_wins(inst: RcgInstance, state: GameState) -> bool:
    done = is_terminal(inst, state)
    if done is not None:
        return done.winner is Winner.TRAVELER
    return all(
        any(_traveler_wins(inst, step(inst, state, ann, move)) for move in legal_moves(inst, state, ann))
        for ann in legal_announcements(inst, state)
    )


def minimax(
    inst: RcgInstance,
    state: GameState | None = None,
    max_arcs: int = MAX_ORACLE_ARCS,
    max_budget: int = MAX_ORACLE_BUDGET,
) -> Winner:
    if inst.graph.arc_count > max_arcs or inst.budget > max_budget:
        raise ResourceLimitError(
            f"oracle guard: {inst.graph.arc_count} arcs (max {max_arcs}), budget {inst.budget} (max {max_budget})"
        )
    root = initial_state(inst) if state is None else state
    return Winner.TRAVELER if _traveler_wins(inst, root) else Winner.ADVERSARY


# --- strategy certification -------------------------------------------------


def traveler_policy_wins(inst: RcgInstance, policy: Callable, state: GameState | None = None) -> bool:
    """True iff ``policy`` reaches the target against every adversary behavior."""
    state = initial_state(inst) if state is None else state
    done = is_terminal(inst, state)
    if done is not None:
        return done.winner is Winner.TRAVELER
    for ann in legal_announcements(inst, state):
        if not traveler_policy_wins(inst, policy, step(inst, state, ann, policy(state, ann))):
            return False
    return True


def adversary_policy_wins(inst: RcgInstance, policy: Callable, state: GameState | None = None) -> bool:
    """True iff ``policy`` strands the traveler against every traveler behavior."""
    state = initial_state(inst) if state is None else state
    done = is_terminal(inst, state)
    if done is not None:
        return done.winner is Winner.ADVERSARY
    ann = frozenset(policy(state))
    return all(
        adversary_policy_wins(inst, policy, step(inst, state, ann, move))
        for move in legal_moves(inst, state, ann)
    )


# --- QBF --------------------------------------------------------------------


def qbf_eval(qbf: Qbf) -> bool:
    """Truth value of a closed prenex-CNF formula by full quantifier expansion."""
    if len(qbf.prefix) > MAX_QBF_VARS:
        raise ResourceLimitError(f"qbf_eval guard: {len(qbf.prefix)} variables (max {MAX_QBF_VARS})")
    clauses = [tuple(c) for c in qbf.matrix]

    def expand(i: int, assignment: dict[int, bool]) -> bool:
        if i == len(qbf.prefix):
            return all(any(assignment[abs(l)] == (l > 0) for l in c) for c in clauses)
        quant, var = qbf.prefix[i]
        branches = (expand(i + 1, {**assignment, var: val}) for val in (True, False))
        return any(branches) if quant == "e" else all(branches)

    return expand(0, {})


# --- exhaustive instance enumeration ----------------------------------------


@dataclass(frozen=True)
class EnumerationLimits:
    max_vertices: int
    max_arcs: int
    labels: tuple[int, ...]
    traversals: tuple[int, ...]
    max_budget: int
    deltas: tuple[int, ...] = (1,)
    min_vertices: int = 1


def enumerate_instances(limits: EnumerationLimits) -> Iterator[RcgInstance]:
    """All valid instances within ``limits``, in a fixed canonical order.

    Arc lists are enumerated as multisets (nondecreasing sequences of
    ``(tail, head, label, traversal)``): reordering arc ids yields the same
    game, so each class of arc-id permutations is emitted once.
    """
    for n in range(limits.min_vertices, limits.max_vertices + 1):
        kinds = [
            (u, v, t, lam)
            for u in range(1, n + 1)
            for v in range(1, n + 1)
            if u != v
            for t in limits.labels
            for lam in limits.traversals
        ]
        for a in range(limits.max_arcs + 1):
            if a > 0 and not kinds:
                break
            for arcs in combinations_with_replacement(kinds, a):
                graph = TemporalGraph.from_tuples(n, arcs)
                for delta, s, z in product(limits.deltas, range(1, n + 1), range(1, n + 1)):
                    for x in range(min(limits.max_budget, a) + 1):
                        yield RcgInstance(graph, s, z, x, delta)


CORPUS1_LIMITS = EnumerationLimits(
    max_vertices=3, max_arcs=3, labels=(1, 2), traversals=(1, 2), max_budget=2, deltas=(1,)
)


@dataclass(frozen=True)
class RandomLimits:
    max_vertices: int
    max_arcs: int
    max_label: int
    max_traversal: int
    max_budget: int
    deltas: tuple[int, ...]


CORPUS2_LIMITS = RandomLimits(
    max_vertices=6, max_arcs=10, max_label=8, max_traversal=2, max_budget=3, deltas=(1, 2)
)


def _journey_arcs(rng: random.Random, n: int, s: int, z: int, count: int, limits: RandomLimits):
    """Arcs laid along random s-z journeys with little slack, so delays matter."""
    arcs: list[tuple[int, int, int, int]] = []
    mids = [v for v in range(1, n + 1) if v not in (s, z)]
    while len(arcs) < count:
        walk = [s, *rng.sample(mids, rng.randint(0, min(3, len(mids)))), z]
        t = rng.randint(1, 2)
        for u, v in zip(walk, walk[1:]):
            if len(arcs) == count or t > limits.max_label:
                break
            lam = rng.randint(1, limits.max_traversal)
            arcs.append((u, v, t, lam))
            t += lam + rng.choice((0, 0, 1))
    rng.shuffle(arcs)
    return arcs


def random_instances(count: int, seed: int, limits: RandomLimits = CORPUS2_LIMITS) -> list[RcgInstance]:
    """``count`` instances within ``limits`` from one seeded stream.

    Start and target are distinct. A third of the instances have uniformly
    random arcs; the rest are built from tight start-to-target journeys,
    which produces far more games where the budget decides the winner.
    """
    rng = random.Random(seed)
    out = []
    for _ in range(count):
        n = rng.randint(2, limits.max_vertices)
        s, z = rng.sample(range(1, n + 1), 2)
        a = rng.randint(0 if rng.random() < 1 / 3 else 1, limits.max_arcs)
        if a == 0 or rng.random() < 1 / 3:
            arcs = []
            for _ in range(a):
                u, v = rng.sample(range(1, n + 1), 2)
                arcs.append((u, v, rng.randint(1, limits.max_label), rng.randint(1, limits.max_traversal)))
        else:
            arcs = _journey_arcs(rng, n, s, z, a, limits)
        x = rng.randint(0, min(limits.max_budget, len(arcs)))
        out.append(RcgInstance(TemporalGraph.from_tuples(n, arcs), s, z, x, rng.choice(limits.deltas)))
    return out
