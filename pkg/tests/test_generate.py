from __future__ import annotations

import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import CHAIN_TEXT
from rcg.generate import chain, layered, qbf_family, random_instance, with_budget
from rcg.sweep import log_slope, sweep
from rcg.temporal import parse_instance, serialize_instance


def test_chain_matches_the_example():
    assert serialize_instance(chain(2)) == CHAIN_TEXT


def test_wide_chain_has_a_free_route():
    inst = chain(3, budget=0, width=2)
    assert [a.label for a in inst.graph.arcs] == [1, 2, 3, 4, 5, 6]


@pytest.mark.parametrize(
    "call",
    [lambda: chain(0), lambda: chain(2, budget=3), lambda: random_instance(1, vertices=1, arcs=2),
     lambda: layered(1, layers=0), lambda: qbf_family(1, 0, 1), lambda: with_budget(chain(2), 5)],
)
def test_invalid_sizes(call):
    with pytest.raises(ValueError):
        call()


@given(st.integers(0, 10**6))
def test_generators_emit_parseable_deterministic_text(seed):
    for make in (lambda: random_instance(seed), lambda: layered(seed), lambda: qbf_family(seed, 2, 2)):
        text = serialize_instance(make())
        assert text == serialize_instance(make())
        assert serialize_instance(parse_instance(text)) == text


def test_sweep_is_monotone_and_deterministic():
    base = chain(4, 0, 1, 3)
    rows = sweep(base, range(0, 4))
    states = [r.states for r in rows]
    assert states == sorted(states)
    assert [r.states for r in sweep(base, range(0, 4))] == states
    assert all(r.dfs_depth <= r.depth_bound for r in rows)
    assert log_slope(rows) > 0
