"""Temporal graphs with starting delays, and the ``.rcg`` instance format.

Arcs are identified by their 1-based position in the arc list; that id is
what delay sets, transcripts and memo keys refer to.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Sequence

from rcg.errors import FormatError, StructuralError


@dataclass(frozen=True)
class TemporalArc:
    id: int
    tail: int
    head: int
    label: int
    traversal: int

    def __post_init__(self) -> None:
        if self.tail == self.head:
            raise StructuralError(f"arc {self.id}: self-loop at vertex {self.tail}")
        if self.label < 1:
            raise StructuralError(f"arc {self.id}: time label must be positive, got {self.label}")
        if self.traversal < 1:
            raise StructuralError(
                f"arc {self.id}: traversal time must be positive, got {self.traversal}"
            )


@dataclass(frozen=True)
class TemporalGraph:
    vertex_count: int
    arcs: tuple[TemporalArc, ...]

    def __post_init__(self) -> None:
        if self.vertex_count < 1:
            raise StructuralError("a temporal graph needs at least one vertex")
        object.__setattr__(self, "arcs", tuple(self.arcs))
        for k, arc in enumerate(self.arcs, start=1):
            if arc.id != k:
                raise StructuralError(f"arc ids must be 1..{len(self.arcs)} in order; found {arc.id} at {k}")
            for v in (arc.tail, arc.head):
                if not 1 <= v <= self.vertex_count:
                    raise StructuralError(f"arc {arc.id}: vertex {v} outside 1..{self.vertex_count}")

    @classmethod
    def from_tuples(cls, vertex_count: int, arcs: Iterable[Sequence[int]]) -> TemporalGraph:
        """Build a graph from ``(tail, head, label, traversal)`` tuples in id order."""
        return cls(
            vertex_count,
            tuple(TemporalArc(k, *a) for k, a in enumerate(arcs, start=1)),
        )

    @property
    def arc_count(self) -> int:
        return len(self.arcs)

    def arc(self, arc_id: int) -> TemporalArc:
        if not 1 <= arc_id <= len(self.arcs):
            raise StructuralError(f"unknown arc id {arc_id}")
        return self.arcs[arc_id - 1]

    @cached_property
    def out_arcs(self) -> tuple[tuple[TemporalArc, ...], ...]:
        # index 0 unused so vertex ids index directly
        buckets: list[list[TemporalArc]] = [[] for _ in range(self.vertex_count + 1)]
        for arc in self.arcs:
            buckets[arc.tail].append(arc)
        return tuple(tuple(b) for b in buckets)


@dataclass(frozen=True)
class DelayRecord:
    """Set of already-delayed arc ids together with the delay magnitude."""

    delayed: frozenset[int]
    delta: int
    # validation context only; two records with the same delays are equal
    arc_count: int | None = field(default=None, compare=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "delayed", frozenset(self.delayed))
        if self.delta < 1:
            raise StructuralError(f"delay magnitude must be positive, got {self.delta}")
        if self.arc_count is not None:
            bad = [a for a in self.delayed if not 1 <= a <= self.arc_count]
            if bad:
                raise StructuralError(f"delay record names unknown arcs {sorted(bad)}")

    @classmethod
    def empty(cls, delta: int, arc_count: int | None = None) -> DelayRecord:
        return cls(frozenset(), delta, arc_count)

    def union(self, extra: Iterable[int]) -> DelayRecord:
        return DelayRecord(self.delayed | frozenset(extra), self.delta, self.arc_count)

    def __contains__(self, arc_id: object) -> bool:
        return arc_id in self.delayed

    def __len__(self) -> int:
        return len(self.delayed)


@dataclass(frozen=True)
class RcgInstance:
    graph: TemporalGraph
    start: int
    target: int
    budget: int
    delta: int

    def __post_init__(self) -> None:
        n = self.graph.vertex_count
        for role, v in (("start", self.start), ("target", self.target)):
            if not 1 <= v <= n:
                raise StructuralError(f"{role} vertex {v} outside 1..{n}")
        if self.delta < 1:
            raise StructuralError(f"delta must be positive, got {self.delta}")
        if not 0 <= self.budget <= self.graph.arc_count:
            raise StructuralError(
                f"budget {self.budget} outside 0..{self.graph.arc_count} (number of arcs)"
            )

    def no_delays(self) -> DelayRecord:
        return DelayRecord.empty(self.delta, self.graph.arc_count)


def _check_arc(arc: TemporalArc, delays: DelayRecord) -> None:
    if delays.arc_count is not None and not 1 <= arc.id <= delays.arc_count:
        raise StructuralError(f"arc {arc.id} does not belong to the delayed graph")


def effective_label(arc: TemporalArc, delays: DelayRecord) -> int:
    """Departure time of ``arc`` once the delays in ``delays`` are applied."""
    _check_arc(arc, delays)
    return arc.label + delays.delta if arc.id in delays.delayed else arc.label


def arrival(arc: TemporalArc, delays: DelayRecord) -> int:
    return effective_label(arc, delays) + arc.traversal


def available_arcs(g: TemporalGraph, v: int, now: int, delays: DelayRecord) -> list[int]:
    """Ids of arcs leaving ``v`` that can still be boarded at time ``now``."""
    if not 1 <= v <= g.vertex_count:
        raise StructuralError(f"vertex {v} outside 1..{g.vertex_count}")
    return [a.id for a in g.out_arcs[v] if now <= effective_label(a, delays)]


@dataclass(frozen=True)
class WalkCheck:
    temporal: bool
    path: bool

    def __bool__(self) -> bool:
        return self.temporal


def validate_walk(g: TemporalGraph, arc_ids: Sequence[int], delays: DelayRecord) -> WalkCheck:
    """Check that ``arc_ids`` forms a temporal walk in the delayed graph.

    ``WalkCheck.path`` additionally reports whether the visited vertices are
    pairwise distinct. Consecutive arcs that do not meet head-to-tail raise
    :class:`StructuralError`.
    """
    if not arc_ids:
        raise StructuralError("a walk needs at least one arc")
    arcs = [g.arc(a) for a in arc_ids]
    for prev, nxt in zip(arcs, arcs[1:]):
        if prev.head != nxt.tail:
            raise StructuralError(f"arcs {prev.id} and {nxt.id} are not incident")
    temporal = all(
        arrival(prev, delays) <= effective_label(nxt, delays) for prev, nxt in zip(arcs, arcs[1:])
    )
    visited = [arcs[0].tail] + [a.head for a in arcs]
    return WalkCheck(temporal, len(set(visited)) == len(visited))


# --- .rcg text format -------------------------------------------------------


def _ints(tokens: list[str], lineno: int, kind: str) -> list[int]:
    try:
        return [int(t) for t in tokens]
    except ValueError:
        raise FormatError(f"non-integer field in {kind} line", lineno, "token") from None


def parse_instance(text: str) -> RcgInstance:
    header: tuple[int, int, int, int] | None = None
    start = target = None
    arcs: list[TemporalArc] = []
    last_line = 0
    for lineno, raw in enumerate(text.splitlines(), start=1):
        last_line = lineno
        tokens = raw.split()
        if not tokens or tokens[0] == "c":
            continue
        tag, rest = tokens[0], tokens[1:]
        if header is None:
            if tag != "p" or len(rest) != 5 or rest[0] != "rcg":
                raise FormatError("expected header 'p rcg <V> <A> <delta> <budget>'", lineno, "header")
            V, A, delta, budget = _ints(rest[1:], lineno, "header")
            if V < 1 or A < 0:
                raise FormatError(f"bad vertex/arc counts {V} {A}", lineno, "header")
            if delta < 1:
                raise FormatError(f"delta must be positive, got {delta}", lineno, "delta")
            if not 0 <= budget <= A:
                raise FormatError(f"budget {budget} exceeds arc count {A}", lineno, "budget")
            header = (V, A, delta, budget)
            continue
        V = header[0]
        if tag in ("s", "z"):
            if len(rest) != 1:
                raise FormatError(f"'{tag}' line takes exactly one vertex", lineno, "token")
            if arcs:
                raise FormatError(f"'{tag}' line must precede arc lines", lineno, "order")
            (vertex,) = _ints(rest, lineno, tag)
            if not 1 <= vertex <= V:
                raise FormatError(f"vertex {vertex} outside 1..{V}", lineno, "vertex")
            if tag == "s":
                if start is not None:
                    raise FormatError("duplicate 's' line", lineno, "duplicate")
                start = vertex
            else:
                if target is not None:
                    raise FormatError("duplicate 'z' line", lineno, "duplicate")
                target = vertex
        elif tag == "a":
            if start is None or target is None:
                raise FormatError("'s' and 'z' lines must precede arc lines", lineno, "order")
            if len(rest) != 4:
                raise FormatError("arc line needs 'a <tail> <head> <label> <traversal>'", lineno, "token")
            tail, head, label, trav = _ints(rest, lineno, "arc")
            for v in (tail, head):
                if not 1 <= v <= V:
                    raise FormatError(f"vertex {v} outside 1..{V}", lineno, "vertex")
            if tail == head:
                raise FormatError(f"self-loop at vertex {tail}", lineno, "self-loop")
            if label < 1:
                raise FormatError(f"time label must be >= 1, got {label}", lineno, "label")
            if trav < 1:
                raise FormatError(f"traversal time must be >= 1, got {trav}", lineno, "traversal")
            if len(arcs) == header[1]:
                raise FormatError(f"more than {header[1]} arc lines", lineno, "arc-count")
            arcs.append(TemporalArc(len(arcs) + 1, tail, head, label, trav))
        else:
            raise FormatError(f"unknown line type '{tag}'", lineno, "token")
    if header is None:
        raise FormatError("missing 'p rcg' header", last_line, "header")
    if start is None or target is None:
        raise FormatError("missing 's' or 'z' line", last_line, "order")
    if len(arcs) != header[1]:
        raise FormatError(f"expected {header[1]} arc lines, found {len(arcs)}", last_line, "arc-count")
    V, _, delta, budget = header
    return RcgInstance(TemporalGraph(V, tuple(arcs)), start, target, budget, delta)


def serialize_instance(inst: RcgInstance, comments: Sequence[str] = ()) -> str:
    g = inst.graph
    lines = [f"c {c}" for c in comments]
    lines.append(f"p rcg {g.vertex_count} {g.arc_count} {inst.delta} {inst.budget}")
    lines.append(f"s {inst.start}")
    lines.append(f"z {inst.target}")
    lines.extend(f"a {a.tail} {a.head} {a.label} {a.traversal}" for a in g.arcs)
    return "\n".join(lines) + "\n"


def read_instance(path: str) -> RcgInstance:
    with open(path) as fh:
        return parse_instance(fh.read())


def write_instance(path: str, inst: RcgInstance, comments: Sequence[str] = ()) -> None:
    with open(path, "w") as fh:
        fh.write(serialize_instance(inst, comments))
