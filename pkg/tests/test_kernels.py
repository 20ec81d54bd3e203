from __future__ import annotations

import importlib

import pytest
from hypothesis import given

from conftest import instances
from rcg import kernel
from rcg.generate import chain, qbf_family
from rcg.solver import Mode, Solver

needs_cython = pytest.mark.skipif(
    "cython" not in kernel.available_implementations(), reason="compiled kernel not built"
)


def counters(inst, impl, mode=Mode.MEMO, **kw):
    s = Solver(inst, mode, implementation=impl, **kw)
    v = s.solve()
    return v.winner, v.states, v.memo_hits, v.peak_depth, v.memo_entries


@needs_cython
class TestCompiledMatchesPython:
    @given(instances(max_vertices=5, max_arcs=8))
    def test_identical_counters(self, inst):
        for mode in Mode:
            assert counters(inst, "python", mode) == counters(inst, "cython", mode)

    @pytest.mark.parametrize("memo_key", ["live", "full"])
    def test_reduction_instance(self, memo_key):
        inst = qbf_family(5, 2, 2)
        assert counters(inst, "python", memo_key=memo_key) == counters(inst, "cython", memo_key=memo_key)

    def test_memo_items_agree(self):
        inst = qbf_family(1, 2, 2)
        py = Solver(inst, implementation="python", short_circuit=False)
        cy = Solver(inst, implementation="cython", short_circuit=False)
        py.solve()
        cy.solve()
        assert set(py.kernel.memo_items()) == set(cy.kernel.memo_items())
        assert len(py.kernel.memo_items()) == len(cy.kernel.memo_items())

    def test_live_masks_agree(self):
        inst = chain(5, 2, 1, 3)
        py, cy = (Solver(inst, implementation=i).kernel for i in ("python", "cython"))
        for t in range(0, 20):
            assert py.live_mask(t) == cy.live_mask(t)

    def test_wide_instances_fall_back(self):
        inst = chain(64, 1, 1, 2)  # 128 arcs, beyond the packed mask
        assert Solver(inst).kernel.implementation == "python"
        with pytest.raises(ValueError):
            Solver(inst, implementation="cython")


class TestSelection:
    def test_python_always_available(self):
        assert "python" in kernel.available_implementations()

    def test_env_forces_fallback(self, monkeypatch):
        monkeypatch.setenv("RCG_KERNEL", "python")
        assert kernel.default_implementation() == "python"
        assert Solver(chain(2)).kernel.implementation == "python"

    def test_default_prefers_compiled(self, monkeypatch):
        monkeypatch.delenv("RCG_KERNEL", raising=False)
        expected = "cython" if kernel._ckernel is not None else "python"
        assert kernel.default_implementation() == expected

    def test_unknown_implementation(self):
        with pytest.raises(ValueError):
            Solver(chain(2), implementation="fortran")

    def test_unknown_memo_key(self):
        with pytest.raises(ValueError):
            Solver(chain(2), memo_key="partial")

    def test_missing_extension_degrades(self, monkeypatch):
        import rcg._pykernel

        monkeypatch.setattr(kernel, "_ckernel", None)
        assert kernel.available_implementations() == ["python"]
        assert kernel.default_implementation() == "python"
        assert isinstance(Solver(chain(2)).kernel, rcg._pykernel.SearchKernel)
        with pytest.raises(ImportError):
            Solver(chain(2), implementation="cython")
        importlib.reload(kernel)
