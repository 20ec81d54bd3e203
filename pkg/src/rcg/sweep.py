"""Budget sweeps: how the search grows as the adversary's budget rises."""

from __future__ import annotations

import math
import time
from dataclasses import dataclass
from typing import Iterable

from rcg.generate import with_budget
from rcg.solver import Mode, Solver, relevant_times
from rcg.temporal import RcgInstance


@dataclass(frozen=True)
class SweepRow:
    budget: int
    winner: str
    states: int
    seconds: float
    dfs_depth: int
    depth_bound: int


def sweep(
    base: RcgInstance,
    budgets: Iterable[int],
    max_states: int | None = None,
    implementation: str | None = None,
) -> list[SweepRow]:
    """One row per budget.

    ``states`` comes from a memo search without short-circuiting, so it counts
    every state reachable under that budget and can only grow with the budget.
    ``dfs_depth`` is the peak recursion depth of a plain DFS solve.
    """
    rows = []
    bound = 2 * len(relevant_times(base)) + 2
    for x in budgets:
        inst = with_budget(base, x)
        began = time.perf_counter()
        full = Solver(inst, Mode.MEMO, max_states, short_circuit=False, implementation=implementation).solve()
        seconds = time.perf_counter() - began
        dfs = Solver(inst, Mode.DFS, max_states, implementation=implementation).solve()
        rows.append(SweepRow(x, str(full.winner), full.states, seconds, dfs.peak_depth, bound))
    return rows


def log_slope(rows: list[SweepRow]) -> float:
    """Least-squares slope of ``ln(states)`` against the budget."""
    if len(rows) < 2:
        return 0.0
    xs = [r.budget for r in rows]
    ys = [math.log(max(r.states, 1)) for r in rows]
    mx, my = sum(xs) / len(xs), sum(ys) / len(ys)
    den = sum((x - mx) ** 2 for x in xs)
    return sum((x - mx) * (y - my) for x, y in zip(xs, ys)) / den


def format_table(rows: list[SweepRow]) -> str:
    lines = [f"{'x':>3} {'winner':>9} {'states':>10} {'seconds':>9} {'dfs_depth':>9} {'bound':>6}"]
    for r in rows:
        lines.append(
            f"{r.budget:>3} {r.winner:>9} {r.states:>10} {r.seconds:>9.3f} {r.dfs_depth:>9} {r.depth_bound:>6}"
        )
    return "\n".join(lines)
