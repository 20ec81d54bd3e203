"""Pure-Python game-value search (fallback for the compiled kernel).

Delay sets are int bitmasks with bit ``k`` standing for arc id ``k``.

Memo keys are ``(vertex, clock, |D|, D & live(clock))`` where ``live(t)``
holds the arcs whose delayed departure ``label + delta`` is still ``>= t``.
An arc outside ``live(t)`` can neither be boarded nor delayed from time
``t`` on, so its membership in ``D`` affects nothing but the budget count,
which is keyed separately. ``memo_key="full"`` keys on the whole of ``D``.
"""

from __future__ import annotations

from bisect import bisect_left
from itertools import combinations

from rcg.errors import ResourceLimitError


class SearchKernel:
    implementation = "python"

    def __init__(
        self,
        vertex_count: int,
        arcs: list[tuple[int, int, int, int]],
        target: int,
        budget: int,
        delta: int,
        memo: bool = True,
        max_states: int | None = None,
        short_circuit: bool = True,
        memo_key: str = "live",
    ):
        if memo_key not in ("live", "full"):
            raise ValueError(f"unknown memo key scheme {memo_key!r}")
        self.target = target
        self.budget = budget
        self.delta = delta
        self.short_circuit = short_circuit
        self.max_states = max_states
        self.live_keys = memo_key == "live"
        # index 0 is a placeholder so arc ids index directly
        self.head = [0] + [a[1] for a in arcs]
        self.label = [0] + [a[2] for a in arcs]
        self.trav = [0] + [a[3] for a in arcs]
        self.out: list[list[int]] = [[] for _ in range(vertex_count + 1)]
        for k, a in enumerate(arcs, start=1):
            self.out[a[0]].append(k)
        order = sorted(range(1, len(arcs) + 1), key=lambda k: self.label[k])
        self._expiry = [self.label[k] + delta for k in order]
        self._live = [0] * (len(order) + 1)
        for i in range(len(order) - 1, -1, -1):
            self._live[i] = self._live[i + 1] | (1 << order[i])
        self.memo: dict[tuple[int, int, int, int], bool] | None = {} if memo else None
        self.states = 0
        self.hits = 0
        self.peak_depth = 0

    def live_mask(self, t: int) -> int:
        return self._live[bisect_left(self._expiry, t)]

    def solve(self, v: int, t: int, mask: int, used: int | None = None) -> bool:
        if used is None:
            used = bin(mask).count("1")
        return self._eval(v, t, mask, used, 0)

    def _eval(self, v: int, t: int, mask: int, used: int, depth: int) -> bool:
        if depth > self.peak_depth:
            self.peak_depth = depth
        if v == self.target:
            return True
        memo = self.memo
        if memo is not None:
            key = (v, t, used, mask & self.live_mask(t) if self.live_keys else mask)
            hit = memo.get(key)
            if hit is not None:
                self.hits += 1
                return hit
            if self.max_states is not None and len(memo) >= self.max_states:
                raise ResourceLimitError(f"memo table reached {self.max_states} states")
        elif self.max_states is not None and self.states >= self.max_states:
            raise ResourceLimitError(f"search evaluated {self.max_states} states")
        self.states += 1

        label, delta = self.label, self.delta
        moves = []
        cand = []
        for a in self.out[v]:
            if mask >> a & 1:
                if t <= label[a] + delta:
                    moves.append(a)
            elif t <= label[a]:
                moves.append(a)
                cand.append(a)

        head, trav = self.head, self.trav
        short = self.short_circuit
        result = True
        for size in range(min(self.budget - used, len(cand)) + 1):
            for combo in combinations(cand, size):
                amask = mask
                for a in combo:
                    amask |= 1 << a
                escaped = False
                for a in moves:
                    arr = label[a] + trav[a] + (delta if amask >> a & 1 else 0)
                    if self._eval(head[a], arr, amask, used + size, depth + 2):
                        escaped = True
                        if short:
                            break
                if not escaped:
                    result = False
                    if short:
                        break
            if not result and short:
                break

        if memo is not None:
            memo[key] = result
        return result

    def memo_items(self) -> list[tuple[int, int, frozenset[int], int, bool]]:
        """``(vertex, clock, keyed_delay_ids, delay_count, value)`` per cached state."""
        if self.memo is None:
            return []
        return [
            (v, t, frozenset(k for k in range(mask.bit_length()) if mask >> k & 1), used, value)
            for (v, t, used, mask), value in self.memo.items()
        ]

    @property
    def memo_size(self) -> int:
        return 0 if self.memo is None else len(self.memo)
