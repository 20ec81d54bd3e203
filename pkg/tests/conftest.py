from __future__ import annotations

import os

import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from rcg.qbf import EXAMPLE_QDIMACS, parse_qdimacs, reduce
from rcg.temporal import RcgInstance, TemporalGraph, parse_instance

settings.register_profile(
    "default", max_examples=150, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.register_profile("thorough", max_examples=1500, deadline=None)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

CHAIN_TEXT = "p rcg 3 2 1 1\ns 1\nz 3\na 1 2 1 1\na 2 3 2 1\n"


def chain_instance(budget: int = 1, a2_label: int = 2, delta: int = 1) -> RcgInstance:
    """s=1 -a1-> u=2 -a2-> z=3 with a1=(t 1, λ 1) and a2=(t a2_label, λ 1)."""
    g = TemporalGraph.from_tuples(3, [(1, 2, 1, 1), (2, 3, a2_label, 1)])
    return RcgInstance(g, 1, 3, budget, delta)


@pytest.fixture
def chain() -> RcgInstance:
    return parse_instance(CHAIN_TEXT)


@pytest.fixture
def chain0() -> RcgInstance:
    return chain_instance(budget=0)


@pytest.fixture
def relaxed_chain() -> RcgInstance:
    return chain_instance(budget=1, a2_label=3)


@pytest.fixture(scope="session")
def example_reduction():
    qbf = parse_qdimacs(EXAMPLE_QDIMACS)
    inst, gm = reduce(qbf)
    return qbf, inst, gm


@st.composite
def instances(draw, max_vertices=4, max_arcs=6, max_label=6, max_traversal=2, max_budget=3, distinct_ends=False):
    """Small valid instances for property tests."""
    n = draw(st.integers(2, max_vertices))
    pair = st.tuples(st.integers(1, n), st.integers(1, n)).filter(lambda p: p[0] != p[1])
    arcs = draw(
        st.lists(
            st.tuples(pair, st.integers(1, max_label), st.integers(1, max_traversal)).map(
                lambda a: (a[0][0], a[0][1], a[1], a[2])
            ),
            max_size=max_arcs,
        )
    )
    s = draw(st.integers(1, n))
    z = draw(st.integers(1, n).filter(lambda v: v != s) if distinct_ends else st.integers(1, n))
    x = draw(st.integers(0, min(max_budget, len(arcs))))
    delta = draw(st.integers(1, 2))
    return RcgInstance(TemporalGraph.from_tuples(n, arcs), s, z, x, delta)
