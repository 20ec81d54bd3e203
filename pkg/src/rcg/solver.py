"""Exact game-value solver and strategy extraction.

The value of a state ``(v, t, D)`` is True when the traveler can force a win:
it is True at the target, and elsewhere it is the conjunction over all legal
announcements of the disjunction over the moves left after that
announcement. ``Mode.MEMO`` caches state values; ``Mode.DFS`` keeps only the
current search path.
"""

from __future__ import annotations

import enum
import os
import time
from dataclasses import dataclass

from rcg.errors import PolicyError, StructuralError
from rcg.game import (
    GameState,
    Winner,
    check_announcement,
    initial_state,
    legal_announcements,
    legal_moves,
)
from rcg.kernel import make_kernel
from rcg.temporal import RcgInstance, available_arcs

DEFAULT_MAX_STATES = 50_000_000


class Mode(enum.Enum):
    MEMO = "memo"
    DFS = "dfs"


@dataclass(frozen=True)
class RelevantTimes:
    times: tuple[int, ...]

    def __contains__(self, t: object) -> bool:
        return t in self.times

    def __len__(self) -> int:
        return len(self.times)

    def __iter__(self):
        return iter(self.times)


@dataclass(frozen=True)
class Verdict:
    winner: Winner
    states: int
    memo_hits: int
    peak_depth: int
    memo_entries: int
    elapsed: float
    kernel: str

    def stats_line(self) -> str:
        return (
            f"states={self.states} memo_hits={self.memo_hits} memo_entries={self.memo_entries} "
            f"depth={self.peak_depth} time={self.elapsed:.3f}s kernel={self.kernel}"
        )


def relevant_times(inst: RcgInstance) -> RelevantTimes:
    times = {1}
    for a in inst.graph.arcs:
        arr = a.label + a.traversal
        times.add(arr)
        times.add(arr + inst.delta)
    return RelevantTimes(tuple(sorted(times)))


def default_max_states() -> int:
    env = os.environ.get("RCG_MAX_STATES")
    return int(env) if env else DEFAULT_MAX_STATES


def _mask(ids) -> int:
    m = 0
    for a in ids:
        m |= 1 << a
    return m


class Solver:
    """Game-value oracle for one instance; the memo table persists across queries."""

    def __init__(
        self,
        inst: RcgInstance,
        mode: Mode = Mode.MEMO,
        max_states: int | None = None,
        short_circuit: bool = True,
        implementation: str | None = None,
        memo_key: str = "live",
    ):
        self.inst = inst
        self.mode = Mode(mode)
        g = inst.graph
        self.kernel = make_kernel(
            g.vertex_count,
            [(a.tail, a.head, a.label, a.traversal) for a in g.arcs],
            inst.target,
            inst.budget,
            inst.delta,
            memo=self.mode is Mode.MEMO,
            max_states=(max_states or default_max_states()) if self.mode is Mode.MEMO else max_states,
            short_circuit=short_circuit,
            implementation=implementation,
            memo_key=memo_key,
        )

    def _check_state(self, state: GameState) -> None:
        inst = self.inst
        if state.delays.delta != inst.delta:
            raise StructuralError("state delay magnitude differs from the instance's")
        if len(state.delays) > inst.budget:
            raise StructuralError("state has more delays than the budget allows")
        if not 1 <= state.position <= inst.graph.vertex_count:
            raise StructuralError(f"vertex {state.position} not in the instance")
        if any(not 1 <= a <= inst.graph.arc_count for a in state.delays.delayed):
            raise StructuralError("state delays an unknown arc")

    def value(self, state: GameState) -> bool:
        self._check_state(state)
        return self.kernel.solve(state.position, state.clock, _mask(state.delays.delayed))

    def solve(self) -> Verdict:
        began = time.perf_counter()
        win = self.value(initial_state(self.inst))
        k = self.kernel
        return Verdict(
            Winner.TRAVELER if win else Winner.ADVERSARY,
            k.states,
            k.hits,
            k.peak_depth,
            k.memo_size,
            time.perf_counter() - began,
            k.implementation,
        )

    def winning_moves(self, state: GameState, ann) -> list[int]:
        delays = state.delays.union(ann)
        out = []
        for arc_id in legal_moves(self.inst, state, ann):
            arc = self.inst.graph.arc(arc_id)
            nxt = GameState(arc.head, self._arrival(arc, delays), delays)
            if self.value(nxt):
                out.append(arc_id)
        return out

    @staticmethod
    def _arrival(arc, delays) -> int:
        return arc.label + arc.traversal + (delays.delta if arc.id in delays.delayed else 0)

    def refuting_announcement(self, state: GameState) -> frozenset[int] | None:
        """First announcement in canonical order after which every move loses."""
        inst = self.inst
        for ann in legal_announcements(inst, state):
            delays = state.delays.union(ann)
            if not any(
                self.value(GameState(a.head, self._arrival(a, delays), delays))
                for a in (inst.graph.arc(i) for i in legal_moves(inst, state, ann))
            ):
                return ann
        return None


def solve(
    inst: RcgInstance,
    mode: Mode | str = Mode.MEMO,
    max_states: int | None = None,
    implementation: str | None = None,
    short_circuit: bool = True,
) -> Verdict:
    """Solve from the initial state.

    ``max_states`` caps memo entries in MEMO mode (default from
    ``RCG_MAX_STATES``) and evaluated states in DFS mode (default unbounded).
    """
    return Solver(inst, Mode(mode), max_states, short_circuit, implementation).solve()


def solve_state(inst: RcgInstance, state: GameState, mode: Mode | str = Mode.MEMO) -> bool:
    return Solver(inst, Mode(mode)).value(state)


class TravelerPolicy:
    """Least-id winning move for any legal announcement at a winning state.

    With ``strict=False`` a losing state yields the least-id legal move
    instead of raising :class:`PolicyError`.
    """

    def __init__(self, inst: RcgInstance, strict: bool = True, solver: Solver | None = None):
        self.inst = inst
        self.strict = strict
        self.solver = solver or Solver(inst)

    def __call__(self, state: GameState, ann) -> int:
        ann = check_announcement(self.inst, state, ann)
        for arc_id in legal_moves(self.inst, state, ann):
            arc = self.inst.graph.arc(arc_id)
            delays = state.delays.union(ann)
            if self.solver.value(GameState(arc.head, Solver._arrival(arc, delays), delays)):
                return arc_id
        if self.strict:
            raise PolicyError(
                f"no winning move at vertex {state.position}, time {state.clock} after {sorted(ann)}"
            )
        moves = legal_moves(self.inst, state, ann)
        if not moves:
            raise PolicyError("traveler has no legal move")
        return moves[0]


class AdversaryPolicy:
    """First refuting announcement at a losing state.

    With ``strict=False`` a winning state yields a blocking announcement
    (see :func:`blocking_announcement`) instead of raising.
    """

    def __init__(self, inst: RcgInstance, strict: bool = True, solver: Solver | None = None):
        self.inst = inst
        self.strict = strict
        self.solver = solver or Solver(inst)

    def __call__(self, state: GameState) -> frozenset[int]:
        ann = self.solver.refuting_announcement(state)
        if ann is not None:
            return ann
        if self.strict:
            raise PolicyError(f"state at vertex {state.position}, time {state.clock} is winning for the traveler")
        return blocking_announcement(self.inst, state)


def traveler_policy(inst: RcgInstance, strict: bool = True, solver: Solver | None = None) -> TravelerPolicy:
    return TravelerPolicy(inst, strict, solver)


def adversary_policy(inst: RcgInstance, strict: bool = True, solver: Solver | None = None) -> AdversaryPolicy:
    return AdversaryPolicy(inst, strict, solver)


def blocking_announcement(inst: RcgInstance, state: GameState) -> frozenset[int]:
    """First announcement that rules out a forced arrival within two moves.

    Delays never remove availability, so "reach the target within two moves"
    can be decided from the delays in force after this announcement alone.
    Falls back to the empty announcement when no announcement blocks.
    """
    g = inst.graph
    for ann in legal_announcements(inst, state):
        delays = state.delays.union(ann)
        escapes = False
        for arc_id in available_arcs(g, state.position, state.clock, delays):
            arc = g.arc(arc_id)
            if arc.head == inst.target:
                escapes = True
                break
            t = Solver._arrival(arc, delays)
            if any(b.head == inst.target for b in (g.arc(i) for i in available_arcs(g, arc.head, t, delays))):
                escapes = True
                break
        if not escapes:
            return ann
    return frozenset()


def solver_playout(inst: RcgInstance, solver: Solver | None = None):
    """Play the extracted strategies against each other; returns (Outcome, Transcript)."""
    from rcg.game import play

    solver = solver or Solver(inst)
    return play(
        inst,
        TravelerPolicy(inst, strict=False, solver=solver),
        AdversaryPolicy(inst, strict=False, solver=solver),
    )
