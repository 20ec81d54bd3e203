"""Prenex-CNF QBFs, QDIMACS I/O, and the compilation of a QBF into a game instance.

The compiled instance has one variable gadget per quantified variable (two
parallel paths whose side arcs the adversary is forced to delay), a bridge
vertex, and one clause gadget per clause that is traversable only through a
delayed literal arc. All traversal times are 1 and the delay magnitude is 1.
"""

from __future__ import annotations

import enum
import random
from dataclasses import dataclass
from typing import Iterable, Sequence

from rcg.errors import FormatError, InterpretationError, StructuralError
from rcg.game import Transcript
from rcg.temporal import RcgInstance, TemporalGraph


class Quantifier(str, enum.Enum):
    EXISTS = "e"
    FORALL = "a"


def _normalize_clause(lits: Iterable[int]) -> tuple[int, ...]:
    return tuple(sorted(set(lits), key=lambda l: (abs(l), l < 0)))


@dataclass(frozen=True)
class Qbf:
    prefix: tuple[tuple[Quantifier, int], ...]
    matrix: tuple[tuple[int, ...], ...]

    def __post_init__(self) -> None:
        prefix = tuple((Quantifier(q), int(v)) for q, v in self.prefix)
        matrix = tuple(_normalize_clause(c) for c in self.matrix)
        object.__setattr__(self, "prefix", prefix)
        object.__setattr__(self, "matrix", matrix)
        seen: set[int] = set()
        for _, v in prefix:
            if v < 1:
                raise StructuralError(f"variable indices must be positive, got {v}")
            if v in seen:
                raise StructuralError(f"variable {v} quantified twice")
            seen.add(v)
        if not matrix:
            raise StructuralError("the matrix needs at least one clause")
        for j, clause in enumerate(matrix, start=1):
            for lit in clause:
                if lit == 0 or abs(lit) not in seen:
                    raise StructuralError(f"clause {j}: literal {lit} has no quantified variable")
                if -lit in clause:
                    raise StructuralError(f"clause {j} is tautological (contains {abs(lit)} and -{abs(lit)})")

    @property
    def n(self) -> int:
        return len(self.prefix)

    @property
    def m(self) -> int:
        return len(self.matrix)

    @property
    def universal_count(self) -> int:
        return sum(q is Quantifier.FORALL for q, _ in self.prefix)


# --- QDIMACS ----------------------------------------------------------------


def parse_qdimacs(text: str) -> Qbf:
    declared: tuple[int, int] | None = None
    prefix: list[tuple[Quantifier, int]] = []
    quantified: set[int] = set()
    clauses: list[list[int]] = []
    current: list[int] = []
    last = 0
    for lineno, raw in enumerate(text.splitlines(), start=1):
        last = lineno
        tokens = raw.split()
        if not tokens or tokens[0] == "c":
            continue
        if declared is None:
            if tokens[0] != "p" or len(tokens) != 4 or tokens[1] != "cnf":
                raise FormatError("expected problem line 'p cnf <vars> <clauses>'", lineno, "header")
            try:
                declared = (int(tokens[2]), int(tokens[3]))
            except ValueError:
                raise FormatError("non-integer field in problem line", lineno, "header") from None
            continue
        if tokens[0] in ("e", "a"):
            if clauses or current:
                raise FormatError("quantifier line after clauses", lineno, "order")
            try:
                ids = [int(t) for t in tokens[1:]]
            except ValueError:
                raise FormatError("non-integer variable", lineno, "token") from None
            if not ids or ids[-1] != 0:
                raise FormatError("quantifier line must end with 0", lineno, "token")
            for v in ids[:-1]:
                if not 1 <= v <= declared[0]:
                    raise FormatError(f"variable {v} outside 1..{declared[0]}", lineno, "literal-range")
                if v in quantified:
                    raise FormatError(f"variable {v} quantified twice", lineno, "duplicate-quantifier")
                quantified.add(v)
                prefix.append((Quantifier(tokens[0]), v))
            continue
        try:
            lits = [int(t) for t in tokens]
        except ValueError:
            raise FormatError("non-integer literal", lineno, "token") from None
        for lit in lits:
            if lit == 0:
                clause = _normalize_clause(current)
                if any(-l in clause for l in clause):
                    raise FormatError("tautological clause", lineno, "tautology")
                clauses.append(list(clause))
                current = []
            elif abs(lit) > declared[0]:
                raise FormatError(f"literal {lit} outside declared range 1..{declared[0]}", lineno, "literal-range")
            else:
                current.append(lit)
    if declared is None:
        raise FormatError("missing problem line 'p cnf <vars> <clauses>'", last or 1, "header")
    if current:
        raise FormatError("last clause is not terminated by 0", last, "token")
    if len(clauses) != declared[1]:
        raise FormatError(f"declared {declared[1]} clauses, found {len(clauses)}", last, "clause-count")
    if not clauses:
        raise FormatError("formula has no clauses", last, "empty-matrix")
    free = sorted({abs(l) for c in clauses for l in c} - quantified)
    prefix = [(Quantifier.EXISTS, v) for v in free] + prefix
    return Qbf(tuple(prefix), tuple(tuple(c) for c in clauses))


def serialize_qdimacs(qbf: Qbf) -> str:
    nvars = max([v for _, v in qbf.prefix], default=0)
    lines = [f"p cnf {nvars} {qbf.m}"]
    block: list[tuple[Quantifier, list[int]]] = []
    for q, v in qbf.prefix:
        if block and block[-1][0] is q:
            block[-1][1].append(v)
        else:
            block.append((q, [v]))
    lines.extend(" ".join([q.value, *map(str, vs), "0"]) for q, vs in block)
    lines.extend(" ".join([*map(str, c), "0"]) for c in qbf.matrix)
    return "\n".join(lines) + "\n"


def random_qbf(rng: random.Random, n_vars: int, n_clauses: int, max_width: int = 3) -> Qbf:
    """A closed prenex-CNF formula with random quantifiers and non-tautological clauses."""
    prefix = tuple((rng.choice((Quantifier.EXISTS, Quantifier.FORALL)), v) for v in range(1, n_vars + 1))
    matrix = []
    for _ in range(n_clauses):
        width = rng.randint(1, min(max_width, n_vars))
        chosen = rng.sample(range(1, n_vars + 1), width)
        matrix.append(tuple(v if rng.random() < 0.5 else -v for v in chosen))
    return Qbf(prefix, tuple(matrix))


# --- reduction --------------------------------------------------------------


@dataclass
class VariableGadget:
    index: int
    variable: int
    quantifier: Quantifier
    entry: int
    pos_path: tuple[int, ...] = ()
    neg_path: tuple[int, ...] = ()
    pos_literal: tuple[int, ...] = ()
    neg_literal: tuple[int, ...] = ()
    pos_escape: tuple[int, ...] = ()
    neg_escape: tuple[int, ...] = ()
    pos_vertices: tuple[int, ...] = ()
    neg_vertices: tuple[int, ...] = ()
    pos_escape_vertices: tuple[int, ...] = ()
    neg_escape_vertices: tuple[int, ...] = ()

    def arc_ids(self) -> list[int]:
        return [
            *self.pos_path, *self.neg_path, *self.pos_literal,
            *self.neg_literal, *self.pos_escape, *self.neg_escape,
        ]

    def literal_arc(self, clause: int, positive: bool) -> int:
        return (self.pos_literal if positive else self.neg_literal)[clause - 1]


@dataclass
class ClauseGadget:
    index: int
    entry: int
    literals: tuple[int, ...]
    in_arcs: tuple[int, ...] = ()
    out_arcs: tuple[int, ...] = ()


@dataclass
class GadgetMap:
    variables: list[VariableGadget]
    clauses: list[ClauseGadget]
    exit_vertex: int = 0
    bypass_vertex: int = 0
    final_clause_vertex: int = 0
    target: int = 0
    bridge_clause_arc: int = 0
    bridge_bypass_arc: int = 0
    bypass_escape_arc: int = 0
    final_arc: int = 0
    entry_times: tuple[int, ...] = ()
    clause_times: tuple[int, ...] = ()

    def variable(self, var: int) -> VariableGadget:
        for g in self.variables:
            if g.variable == var:
                return g
        raise KeyError(var)

    def special_arcs(self) -> list[int]:
        return [self.bridge_clause_arc, self.bridge_bypass_arc, self.bypass_escape_arc, self.final_arc]

    def all_arc_ids(self) -> list[int]:
        ids = [a for g in self.variables for a in g.arc_ids()]
        ids += [a for c in self.clauses for a in (*c.in_arcs, *c.out_arcs)]
        return ids + self.special_arcs()


def entry_time(i: int, m: int) -> int:
    """Common departure time of all arcs leaving the i-th gadget entry (1-based)."""
    return 1 + (i - 1) * 2 * (m + 2)


def clause_time(j: int, n: int, m: int) -> int:
    return entry_time(n + 1, m) + 1 + 3 * (j - 1)


def derived_budget(qbf: Qbf) -> int:
    return qbf.n * qbf.m + qbf.universal_count + 1


def paper_budget(qbf: Qbf) -> int:
    return qbf.n * (qbf.m + qbf.universal_count) + 1


def reduce(qbf: Qbf, budget_rule: str = "derived") -> tuple[RcgInstance, GadgetMap]:
    """Compile ``qbf`` into an instance whose traveler wins iff ``qbf`` is true.

    ``budget_rule="literal"`` emits ``n(m+|forall|)+1`` instead of the default
    ``n*m + |forall| + 1``; it exists only for comparison runs.
    """
    if budget_rule not in ("derived", "literal"):
        raise ValueError(f"unknown budget rule {budget_rule!r}")
    n, m = qbf.n, qbf.m
    counter = iter(range(1, 1 << 62))
    new = lambda: next(counter)  # noqa: E731

    # vertices first, so arcs can refer to z and the clause entries
    entries = [new()]
    gadgets: list[VariableGadget] = []
    for i, (q, var) in enumerate(qbf.prefix, start=1):
        pairs_pos = m + 1 if q is Quantifier.FORALL else m
        g = VariableGadget(i, var, q, entries[-1])
        g.pos_vertices = tuple(new() for _ in range(pairs_pos))
        g.pos_escape_vertices = tuple(new() for _ in range(pairs_pos))
        g.neg_vertices = tuple(new() for _ in range(m))
        g.neg_escape_vertices = tuple(new() for _ in range(m))
        gadgets.append(g)
        entries.append(new())
    gm = GadgetMap(gadgets, [])
    gm.exit_vertex = entries[-1]
    gm.bypass_vertex = new()
    clause_vertices = [new() for _ in range(m + 1)]
    gm.final_clause_vertex = clause_vertices[-1]
    z = gm.target = new()
    vertex_count = z

    arcs: list[tuple[int, int, int, int]] = []

    def emit(tail: int, head: int, label: int) -> int:
        arcs.append((tail, head, label, 1))
        return len(arcs)

    def chain(vertices: Sequence[int], labels: Sequence[int]) -> tuple[int, ...]:
        return tuple(emit(a, b, t) for a, b, t in zip(vertices, vertices[1:], labels))

    ts = [entry_time(i, m) for i in range(1, n + 2)]
    tc = [clause_time(j, n, m) for j in range(1, m + 2)]
    gm.entry_times, gm.clause_times = tuple(ts), tuple(tc)

    for g in gadgets:
        i = g.index
        t0 = ts[i - 1]
        exit_ = entries[i]
        if g.quantifier is Quantifier.FORALL:
            pos_labels = [t0] + [t0 + 2 * k - 1 for k in range(1, m + 2)]
        else:
            pos_labels = [t0 + 2 * k for k in range(m + 1)]
        neg_labels = [t0 + 2 * k for k in range(m + 1)]
        g.pos_path = chain([g.entry, *g.pos_vertices, exit_], pos_labels)
        g.neg_path = chain([g.entry, *g.neg_vertices, exit_], neg_labels)
        # literal arc j departs at the j-th clause time; the universal extra pair uses the last one
        g.pos_literal = tuple(emit(p, e, tc[j]) for j, (p, e) in enumerate(zip(g.pos_vertices, g.pos_escape_vertices)))
        g.neg_literal = tuple(emit(p, e, tc[j]) for j, (p, e) in enumerate(zip(g.neg_vertices, g.neg_escape_vertices)))
        g.pos_escape = tuple(emit(e, z, tc[j] + 1) for j, e in enumerate(g.pos_escape_vertices))
        g.neg_escape = tuple(emit(e, z, tc[j] + 1) for j, e in enumerate(g.neg_escape_vertices))

    gm.bridge_clause_arc = emit(gm.exit_vertex, clause_vertices[0], ts[n])
    gm.bridge_bypass_arc = emit(gm.exit_vertex, gm.bypass_vertex, ts[n])
    gm.bypass_escape_arc = emit(gm.bypass_vertex, z, ts[n] + 1)

    by_var = {g.variable: g for g in gadgets}
    for j, clause in enumerate(qbf.matrix, start=1):
        cg = ClauseGadget(j, clause_vertices[j - 1], clause)
        ins, outs = [], []
        for lit in clause:
            g = by_var[abs(lit)]
            path_v = (g.pos_vertices if lit > 0 else g.neg_vertices)[j - 1]
            esc_v = (g.pos_escape_vertices if lit > 0 else g.neg_escape_vertices)[j - 1]
            ins.append(emit(cg.entry, path_v, tc[j - 1]))
            outs.append(emit(esc_v, clause_vertices[j], tc[j - 1] + 2))
        cg.in_arcs, cg.out_arcs = tuple(ins), tuple(outs)
        gm.clauses.append(cg)
    gm.final_arc = emit(gm.final_clause_vertex, z, tc[m])

    budget = derived_budget(qbf) if budget_rule == "derived" else paper_budget(qbf)
    inst = RcgInstance(TemporalGraph.from_tuples(vertex_count, arcs), entries[0], z, budget, 1)
    return inst, gm


# --- gadget map file --------------------------------------------------------

_VAR_ROLES = (
    "pos-path", "neg-path", "pos-literal", "neg-literal", "pos-escape", "neg-escape",
    "pos-vertices", "neg-vertices", "pos-escape-vertices", "neg-escape-vertices",
)
_SPECIALS = (
    ("exit-vertex", "exit_vertex"),
    ("bypass-vertex", "bypass_vertex"),
    ("final-clause-vertex", "final_clause_vertex"),
    ("target-vertex", "target"),
    ("bridge-clause-arc", "bridge_clause_arc"),
    ("bridge-bypass-arc", "bridge_bypass_arc"),
    ("bypass-escape-arc", "bypass_escape_arc"),
    ("final-arc", "final_arc"),
)


def serialize_gadget_map(gm: GadgetMap) -> str:
    lines = []
    for g in gm.variables:
        lines.append(f"var {g.index} variable {g.variable}")
        lines.append(f"var {g.index} {'forall' if g.quantifier is Quantifier.FORALL else 'exists'}")
        lines.append(f"var {g.index} entry {g.entry}")
        for role in _VAR_ROLES:
            ids = getattr(g, role.replace("-", "_"))
            lines.append(" ".join(["var", str(g.index), role, *map(str, ids)]))
    for c in gm.clauses:
        lines.append(f"clause {c.index} entry {c.entry}")
        lines.append(" ".join(["clause", str(c.index), "literals", *map(str, c.literals)]))
        lines.append(" ".join(["clause", str(c.index), "in-arcs", *map(str, c.in_arcs)]))
        lines.append(" ".join(["clause", str(c.index), "out-arcs", *map(str, c.out_arcs)]))
    for name, attr in _SPECIALS:
        lines.append(f"special {name} {getattr(gm, attr)}")
    lines.append(" ".join(["special", "entry-times", *map(str, gm.entry_times)]))
    lines.append(" ".join(["special", "clause-times", *map(str, gm.clause_times)]))
    return "\n".join(lines) + "\n"


def parse_gadget_map(text: str) -> GadgetMap:
    variables: dict[int, VariableGadget] = {}
    clauses: dict[int, ClauseGadget] = {}
    gm = GadgetMap([], [])
    for lineno, raw in enumerate(text.splitlines(), start=1):
        tok = raw.split()
        if not tok or tok[0] == "c":
            continue
        try:
            if tok[0] == "var":
                i, role, ids = int(tok[1]), tok[2], tuple(int(t) for t in tok[3:])
                g = variables.setdefault(i, VariableGadget(i, 0, Quantifier.EXISTS, 0))
                if role == "variable":
                    g.variable = ids[0]
                elif role in ("forall", "exists"):
                    g.quantifier = Quantifier.FORALL if role == "forall" else Quantifier.EXISTS
                elif role == "entry":
                    g.entry = ids[0]
                elif role in _VAR_ROLES:
                    setattr(g, role.replace("-", "_"), ids)
                else:
                    raise FormatError(f"unknown variable role {role!r}", lineno, "role")
            elif tok[0] == "clause":
                j, role, ids = int(tok[1]), tok[2], tuple(int(t) for t in tok[3:])
                c = clauses.setdefault(j, ClauseGadget(j, 0, ()))
                if role == "entry":
                    c.entry = ids[0]
                elif role == "literals":
                    c.literals = ids
                elif role == "in-arcs":
                    c.in_arcs = ids
                elif role == "out-arcs":
                    c.out_arcs = ids
                else:
                    raise FormatError(f"unknown clause role {role!r}", lineno, "role")
            elif tok[0] == "special":
                name, ids = tok[1], tuple(int(t) for t in tok[2:])
                attrs = dict(_SPECIALS)
                if name in attrs:
                    setattr(gm, attrs[name], ids[0])
                elif name == "entry-times":
                    gm.entry_times = ids
                elif name == "clause-times":
                    gm.clause_times = ids
                else:
                    raise FormatError(f"unknown special {name!r}", lineno, "role")
            else:
                raise FormatError(f"unknown line type {tok[0]!r}", lineno, "token")
        except (ValueError, IndexError) as exc:
            if isinstance(exc, FormatError):
                raise
            raise FormatError("malformed gadget-map line", lineno, "token") from None
    gm.variables = [variables[i] for i in sorted(variables)]
    gm.clauses = [clauses[j] for j in sorted(clauses)]
    return gm


# --- reading assignments back out of a playout --------------------------------


def interpret_transcript(gm: GadgetMap, transcript: Transcript) -> dict[int, bool | None]:
    """Truth assignment chosen by the traveler's path sides.

    A variable is True if its gadget was crossed along the positive path,
    False along the negative one, and None if the gadget was not crossed.
    """
    moved = [r.move for r in transcript.rounds]
    moved_set = set(moved)
    out: dict[int, bool | None] = {}
    for g in gm.variables:
        on_pos = moved_set & set(g.pos_path)
        on_neg = moved_set & set(g.neg_path)
        if on_pos and on_neg:
            raise InterpretationError(f"gadget {g.index} uses both the positive and the negative path")
        if g.pos_path and g.pos_path[-1] in moved_set:
            out[g.variable] = True
        elif g.neg_path and g.neg_path[-1] in moved_set:
            out[g.variable] = False
        else:
            out[g.variable] = None
    return out


EXAMPLE_QDIMACS = """\
c exists x1 forall x2 exists x3 (x1|-x2|-x3) & (-x1|x2|-x3) & (x1|-x2|x3)
p cnf 3 3
e 1 0
a 2 0
e 3 0
1 -2 -3 0
-1 2 -3 0
1 -2 3 0
"""
