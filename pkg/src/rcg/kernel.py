"""Selects the search kernel: compiled when importable, pure Python otherwise.

Set ``RCG_KERNEL=python`` to force the fallback.
"""

from __future__ import annotations

import os

from rcg import _pykernel

try:
    from rcg import _ckernel
except ImportError:  # extension not built
    _ckernel = None

# the compiled kernel packs delay sets into two 64-bit words
C_MAX_ARC_ID = 127
C_MAX_TIME = 2**62


def available_implementations() -> list[str]:
    return ["python"] + (["cython"] if _ckernel is not None else [])


def default_implementation() -> str:
    if os.environ.get("RCG_KERNEL", "").lower() == "python" or _ckernel is None:
        return "python"
    return "cython"


def make_kernel(
    vertex_count: int,
    arcs: list[tuple[int, int, int, int]],
    target: int,
    budget: int,
    delta: int,
    memo: bool = True,
    max_states: int | None = None,
    short_circuit: bool = True,
    implementation: str | None = None,
    memo_key: str = "live",
):
    impl = implementation or default_implementation()
    if impl not in ("python", "cython"):
        raise ValueError(f"unknown kernel implementation {impl!r}")
    if impl == "cython":
        if _ckernel is None:
            raise ImportError("compiled kernel rcg._ckernel is not built")
        too_big = len(arcs) > C_MAX_ARC_ID or any(
            a[2] + a[3] + delta > C_MAX_TIME for a in arcs
        )
        if too_big and implementation is None:
            impl = "python"
        elif too_big:
            raise ValueError("instance exceeds the compiled kernel's limits")
    module = _ckernel if impl == "cython" else _pykernel
    return module.SearchKernel(
        vertex_count, arcs, target, budget, delta, memo, max_states, short_circuit, memo_key
    )
