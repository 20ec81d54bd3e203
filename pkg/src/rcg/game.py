"""Referee for the round-based traveler/adversary game.

Each round the adversary announces fresh delays on arcs leaving the
traveler's vertex, then the traveler boards one available arc. The game ends
when the traveler reaches the target (traveler wins) or has no arc left to
board (adversary wins).
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from functools import lru_cache
from itertools import combinations
from math import comb
from typing import Callable, Iterable, Iterator

from rcg.errors import FormatError, RefereeViolation, ReplayError, StructuralError
from rcg.temporal import DelayRecord, RcgInstance, available_arcs, arrival

RULE_ONCE = "delayed at most once"
RULE_TAIL = "delays only on arcs leaving the current vertex"
RULE_DEPARTED = "delays only on arcs not yet departed"
RULE_BUDGET = "announcements within the remaining budget"
RULE_MOVE = "moves only along available arcs"
RULE_OVER = "no rounds after the game has ended"


class Winner(enum.Enum):
    TRAVELER = "TRAVELER"
    ADVERSARY = "ADVERSARY"

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True)
class GameState:
    position: int
    clock: int
    delays: DelayRecord

    @property
    def delayed(self) -> frozenset[int]:
        return self.delays.delayed


@dataclass(frozen=True)
class Outcome:
    winner: Winner
    state: GameState


@dataclass(frozen=True)
class Round:
    announcement: tuple[int, ...]
    move: int


@dataclass
class Transcript:
    rounds: list[Round] = field(default_factory=list)
    winner: Winner | None = None

    def __len__(self) -> int:
        return len(self.rounds)


Announcement = frozenset
AdversaryPolicy = Callable[[GameState], Iterable[int]]
TravelerPolicy = Callable[[GameState, frozenset], int]


@lru_cache(maxsize=256)
def reachable_clocks(inst: RcgInstance) -> frozenset[int]:
    """Every clock value a playout can produce: 1 and each (delayed) arrival."""
    out = {1}
    for a in inst.graph.arcs:
        t = a.label + a.traversal
        out.update((t, t + inst.delta))
    return frozenset(out)


def initial_state(inst: RcgInstance) -> GameState:
    return GameState(inst.start, 1, inst.no_delays())


def remaining_budget(inst: RcgInstance, state: GameState) -> int:
    return inst.budget - len(state.delays)


def delay_candidates(inst: RcgInstance, state: GameState) -> list[int]:
    """Arcs the adversary may still delay at this state, ascending id."""
    g = inst.graph
    return [
        a.id
        for a in g.out_arcs[state.position]
        if a.id not in state.delays.delayed and state.clock <= a.label
    ]


class AnnouncementSet:
    """The legal announcements at a state.

    Iteration yields frozensets by increasing size, then lexicographically on
    sorted arc ids; the empty announcement always comes first.
    """

    def __init__(self, inst: RcgInstance, state: GameState):
        self.candidates = tuple(delay_candidates(inst, state))
        self.limit = min(remaining_budget(inst, state), len(self.candidates))

    def __iter__(self) -> Iterator[frozenset[int]]:
        for size in range(self.limit + 1):
            for combo in combinations(self.candidates, size):
                yield frozenset(combo)

    def __len__(self) -> int:
        return sum(comb(len(self.candidates), k) for k in range(self.limit + 1))

    def __contains__(self, ann: object) -> bool:
        try:
            ann = frozenset(ann)  # type: ignore[arg-type]
        except TypeError:
            return False
        return len(ann) <= self.limit and ann <= set(self.candidates)


def legal_announcements(inst: RcgInstance, state: GameState) -> AnnouncementSet:
    return AnnouncementSet(inst, state)


def check_announcement(
    inst: RcgInstance, state: GameState, ann: Iterable[int], round_index: int | None = None
) -> frozenset[int]:
    """Return ``ann`` as a frozenset, raising :class:`RefereeViolation` if illegal."""
    ann = frozenset(ann)
    g = inst.graph
    for arc_id in sorted(ann):
        if not 1 <= arc_id <= g.arc_count:
            raise RefereeViolation(RULE_TAIL, f"arc {arc_id} does not exist", round_index)
        if arc_id in state.delays.delayed:
            raise RefereeViolation(RULE_ONCE, f"arc {arc_id} was already delayed", round_index)
        arc = g.arc(arc_id)
        if arc.tail != state.position:
            raise RefereeViolation(
                RULE_TAIL, f"arc {arc_id} leaves {arc.tail}, traveler is at {state.position}", round_index
            )
        if state.clock > arc.label:
            raise RefereeViolation(
                RULE_DEPARTED, f"arc {arc_id} left at {arc.label}, clock is {state.clock}", round_index
            )
    if len(ann) > remaining_budget(inst, state):
        raise RefereeViolation(
            RULE_BUDGET,
            f"{len(ann)} delays announced, {remaining_budget(inst, state)} remaining",
            round_index,
        )
    return ann


def legal_moves(inst: RcgInstance, state: GameState, ann: Iterable[int]) -> list[int]:
    delays = state.delays.union(ann)
    return available_arcs(inst.graph, state.position, state.clock, delays)


def is_terminal(inst: RcgInstance, state: GameState) -> Outcome | None:
    if state.position == inst.target:
        return Outcome(Winner.TRAVELER, state)
    # announcements only raise labels, so an empty set here means stuck for good
    if not available_arcs(inst.graph, state.position, state.clock, state.delays):
        return Outcome(Winner.ADVERSARY, state)
    return None


def step(
    inst: RcgInstance,
    state: GameState,
    ann: Iterable[int],
    move: int,
    round_index: int | None = None,
) -> GameState:
    if is_terminal(inst, state) is not None:
        raise RefereeViolation(RULE_OVER, "the game has already ended", round_index)
    ann = check_announcement(inst, state, ann, round_index)
    delays = state.delays.union(ann)
    if move not in available_arcs(inst.graph, state.position, state.clock, delays):
        raise RefereeViolation(
            RULE_MOVE, f"arc {move} is not available at vertex {state.position}, time {state.clock}", round_index
        )
    arc = inst.graph.arc(move)
    clock = arrival(arc, delays)
    if clock not in reachable_clocks(inst):
        raise StructuralError(f"clock {clock} outside the reachable clock set")
    return GameState(arc.head, clock, delays)


def play(
    inst: RcgInstance,
    traveler: TravelerPolicy,
    adversary: AdversaryPolicy,
    round_cap: int | None = None,
) -> tuple[Outcome, Transcript]:
    """Run one referee-checked game between two policies."""
    cap = 2 * inst.graph.arc_count + 2 if round_cap is None else round_cap
    state = initial_state(inst)
    transcript = Transcript()
    k = 0
    while (outcome := is_terminal(inst, state)) is None:
        k += 1
        if k > cap:
            raise StructuralError(f"game did not terminate within {cap} rounds")
        ann = check_announcement(inst, state, adversary(state), k)
        move = traveler(state, ann)
        state = step(inst, state, ann, move, k)
        transcript.rounds.append(Round(tuple(sorted(ann)), move))
    transcript.winner = outcome.winner
    return outcome, transcript


def replay(inst: RcgInstance, transcript: Transcript) -> Outcome:
    """Re-execute ``transcript`` and check that it ends as recorded."""
    state = initial_state(inst)
    for k, rnd in enumerate(transcript.rounds, start=1):
        if is_terminal(inst, state) is not None:
            raise ReplayError("game already ended before this round", k)
        try:
            state = step(inst, state, rnd.announcement, rnd.move, k)
        except RefereeViolation as exc:
            raise ReplayError(str(exc), k) from exc
    outcome = is_terminal(inst, state)
    if outcome is None:
        raise ReplayError("transcript ends before the game is over", len(transcript.rounds))
    if transcript.winner is not None and outcome.winner is not transcript.winner:
        raise ReplayError(
            f"recorded outcome {transcript.winner} but replay gives {outcome.winner}",
            len(transcript.rounds),
        )
    return outcome


# --- .rcgt text format ------------------------------------------------------


def serialize_transcript(transcript: Transcript) -> str:
    lines = [f"p rcgt {len(transcript.rounds)}"]
    for k, rnd in enumerate(transcript.rounds, start=1):
        lines.append(" ".join(["d", str(k), *map(str, rnd.announcement)]))
        lines.append(f"m {k} {rnd.move}")
    if transcript.winner is None:
        raise ValueError("transcript has no outcome")
    lines.append(f"o {transcript.winner}")
    return "\n".join(lines) + "\n"


def parse_transcript(text: str) -> Transcript:
    lines = [
        (n, raw.split())
        for n, raw in enumerate(text.splitlines(), start=1)
        if raw.split() and raw.split()[0] != "c"
    ]
    if not lines:
        raise FormatError("empty transcript", 1, "header")
    n, head = lines[0]
    if len(head) != 3 or head[:2] != ["p", "rcgt"] or not head[2].isdigit():
        raise FormatError("expected header 'p rcgt <rounds>'", n, "header")
    count = int(head[2])
    body = lines[1:]
    if len(body) != 2 * count + 1:
        raise FormatError(
            f"expected {2 * count + 1} lines after header, found {len(body)}",
            body[-1][0] if body else n,
            "truncated",
        )
    rounds: list[Round] = []
    try:
        for k in range(1, count + 1):
            (dn, d), (mn, m) = body[2 * k - 2], body[2 * k - 1]
            if d[0] != "d" or len(d) < 2 or int(d[1]) != k:
                raise FormatError(f"expected 'd {k} ...'", dn, "round")
            if m[0] != "m" or len(m) != 3 or int(m[1]) != k:
                raise FormatError(f"expected 'm {k} <arc>'", mn, "round")
            ann = tuple(int(t) for t in d[2:])
            if len(set(ann)) != len(ann):
                raise FormatError("arc repeated within one announcement", dn, "round")
            rounds.append(Round(tuple(sorted(ann)), int(m[2])))
    except ValueError as exc:
        if isinstance(exc, FormatError):
            raise
        raise FormatError("non-integer field", None, "token") from None
    on, o = body[-1]
    if len(o) != 2 or o[0] != "o" or o[1] not in ("TRAVELER", "ADVERSARY"):
        raise FormatError("expected final 'o TRAVELER' or 'o ADVERSARY'", on, "outcome")
    return Transcript(rounds, Winner(o[1]))
