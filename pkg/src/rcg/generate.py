"""Seeded instance generators for tests, benchmarks and the ``gen`` command.

Every generator is deterministic in its arguments and returns a validated
:class:`RcgInstance`. Invalid size combinations raise ``ValueError``.
"""

from __future__ import annotations

import random
from dataclasses import replace

from rcg.qbf import random_qbf, reduce
from rcg.temporal import RcgInstance, TemporalGraph


def _check_budget(budget: int, arc_count: int) -> None:
    if not 0 <= budget <= arc_count:
        raise ValueError(f"budget {budget} must lie in 0..{arc_count}")


def chain(length: int, budget: int = 1, delta: int = 1, width: int = 1) -> RcgInstance:
    """A path ``1 -> 2 -> ... -> length+1`` with ``width`` parallel arcs per hop.

    Hop ``i`` carries labels ``(i-1)*width + 1 .. i*width`` and unit traversal
    times, so the undelayed graph always has a temporal path. ``chain(2)`` is
    the two-arc example used throughout the tests.
    """
    if length < 1 or width < 1:
        raise ValueError("chain length and width must be positive")
    arcs = [
        (i, i + 1, (i - 1) * width + j, 1)
        for i in range(1, length + 1)
        for j in range(1, width + 1)
    ]
    _check_budget(budget, len(arcs))
    return RcgInstance(TemporalGraph.from_tuples(length + 1, arcs), 1, length + 1, budget, delta)


def random_instance(
    seed: int,
    vertices: int = 5,
    arcs: int = 8,
    max_label: int = 6,
    max_traversal: int = 2,
    budget: int = 2,
    delta: int = 1,
) -> RcgInstance:
    """Uniform random arcs between distinct vertices; start 1, target ``vertices``."""
    if vertices < 1 or arcs < 0 or max_label < 1 or max_traversal < 1 or delta < 1:
        raise ValueError("random model sizes must be positive")
    if arcs > 0 and vertices < 2:
        raise ValueError("arcs need at least two vertices")
    _check_budget(budget, arcs)
    rng = random.Random(seed)
    tuples = []
    for _ in range(arcs):
        u = rng.randint(1, vertices)
        v = rng.choice([w for w in range(1, vertices + 1) if w != u])
        tuples.append((u, v, rng.randint(1, max_label), rng.randint(1, max_traversal)))
    return RcgInstance(TemporalGraph.from_tuples(vertices, tuples), 1, vertices, budget, delta)


def layered(
    seed: int,
    layers: int = 3,
    width: int = 2,
    budget: int = 1,
    delta: int = 1,
) -> RcgInstance:
    """Start, ``layers`` layers of ``width`` vertices, then the target.

    Consecutive layers are joined by a random bipartite arc set in which every
    vertex keeps at least one outgoing arc. Hop ``k`` draws its labels from
    ``{2k-1, 2k}``, so late arrivals can miss the next hop.
    """
    if layers < 1 or width < 1:
        raise ValueError("layered model needs positive layers and width")
    rng = random.Random(seed)
    start, target = 1, layers * width + 2
    levels = [[start]] + [
        list(range(2 + k * width, 2 + (k + 1) * width)) for k in range(layers)
    ] + [[target]]
    tuples = []
    for k in range(len(levels) - 1):
        for u in levels[k]:
            heads = [v for v in levels[k + 1] if rng.random() < 0.5] or [rng.choice(levels[k + 1])]
            for v in heads:
                tuples.append((u, v, 2 * k + rng.randint(1, 2), 1))
    _check_budget(budget, len(tuples))
    return RcgInstance(TemporalGraph.from_tuples(target, tuples), start, target, budget, delta)


def qbf_family(seed: int, variables: int = 2, clauses: int = 2, paper_budget: bool = False) -> RcgInstance:
    """Reduction of ``random_qbf(Random(seed), variables, clauses)``."""
    if variables < 1 or clauses < 1:
        raise ValueError("qbf-family needs at least one variable and one clause")
    qbf = random_qbf(random.Random(seed), variables, clauses)
    inst, _ = reduce(qbf, budget_rule="literal" if paper_budget else "derived")
    return inst


def with_budget(inst: RcgInstance, budget: int) -> RcgInstance:
    """Copy of ``inst`` with a different delay budget."""
    _check_budget(budget, inst.graph.arc_count)
    return replace(inst, budget=budget)
