"""Compare the compiled and pure-Python search kernels on fixed workloads.

Run with ``python3 benchmarks/bench_kernels.py``. Each workload is solved by
every available kernel; the script checks that winners and state counts agree
and prints the best-of-``--repeat`` wall time per kernel.
"""

from __future__ import annotations

import argparse
import time

from rcg import generate
from rcg.kernel import available_implementations
from rcg.qbf import EXAMPLE_QDIMACS, parse_qdimacs, reduce
from rcg.solver import Mode, Solver


def workloads():
    yield "chain len=8 width=4 x=4", generate.chain(8, 4, 1, 4), Mode.DFS
    yield "chain len=6 width=3 x=3", generate.chain(6, 3, 1, 3), Mode.MEMO
    yield "qbf-family n=2 m=3 seed=5", generate.qbf_family(5, 2, 3), Mode.MEMO
    yield "example formula n=3 m=3", reduce(parse_qdimacs(EXAMPLE_QDIMACS))[0], Mode.MEMO


def best_of(inst, mode, impl, repeat):
    best, verdict = float("inf"), None
    for _ in range(repeat):
        began = time.perf_counter()
        verdict = Solver(inst, mode, implementation=impl).solve()
        best = min(best, time.perf_counter() - began)
    return best, verdict


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args(argv)
    impls = available_implementations()
    if "cython" not in impls:
        print("compiled kernel not built; only the Python kernel is timed")
    print(f"{'workload':<28} {'mode':<5} {'states':>9} " + " ".join(f"{i:>9}" for i in impls) + "  speedup")
    for name, inst, mode in workloads():
        times, verdicts = {}, {}
        for impl in impls:
            times[impl], verdicts[impl] = best_of(inst, mode, impl, args.repeat)
        ref = verdicts["python"]
        for impl, v in verdicts.items():
            if (v.winner, v.states) != (ref.winner, ref.states):
                raise SystemExit(f"kernels disagree on {name}: {impl} gave {v.winner}/{v.states}")
        speed = f"{times['python'] / times['cython']:7.1f}x" if "cython" in times else "      -"
        cols = " ".join(f"{times[i]:>8.3f}s" for i in impls)
        print(f"{name:<28} {mode.value:<5} {ref.states:>9} {cols} {speed}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
