# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
# distutils: language = c++
"""Compiled game-value search; same contract as ``rcg._pykernel``.

Delay sets are two 64-bit words (bit ``k`` of the 128-bit value is arc id
``k``), so at most 127 arcs are supported. Memo entries live in a C++ hash
map keyed on ``(vertex, clock, delay count, live delay bits)``; see
``rcg._pykernel`` for why only live delays need to be keyed.
"""

from libc.stdint cimport int64_t, uint64_t, int32_t
from libc.stdlib cimport malloc, free

from rcg.errors import ResourceLimitError

cdef extern from *:
    """
    #include <unordered_map>
    #include <vector>
    #include <cstdint>

    struct RcgKey {
        int64_t t;
        uint64_t lo, hi;
        int32_t v, used;
        bool operator==(const RcgKey& o) const {
            return t == o.t && lo == o.lo && hi == o.hi && v == o.v && used == o.used;
        }
    };
    struct RcgKeyHash {
        size_t operator()(const RcgKey& k) const {
            uint64_t h = k.lo * 0x9E3779B97F4A7C15ULL;
            h ^= (k.hi + 0x632BE59BD9B4E019ULL + (h << 6) + (h >> 2));
            h ^= ((uint64_t)k.t * 0xC2B2AE3D27D4EB4FULL + (h << 6) + (h >> 2));
            h ^= ((uint64_t)(uint32_t)k.v * 0x165667B19E3779F9ULL + (h << 6) + (h >> 2));
            h ^= ((uint64_t)(uint32_t)k.used * 0x27D4EB2F165667C5ULL + (h << 6) + (h >> 2));
            return (size_t)(h ^ (h >> 29));
        }
    };
    typedef std::unordered_map<RcgKey, char, RcgKeyHash> RcgMemo;

    static inline void* rcg_memo_new() { return new RcgMemo(); }
    static inline void rcg_memo_free(void* m) { delete (RcgMemo*)m; }
    static inline size_t rcg_memo_size(void* m) { return ((RcgMemo*)m)->size(); }
    static inline int rcg_memo_get(void* m, int32_t v, int32_t used, int64_t t, uint64_t lo, uint64_t hi) {
        RcgKey k{t, lo, hi, v, used};
        auto it = ((RcgMemo*)m)->find(k);
        return it == ((RcgMemo*)m)->end() ? -1 : (int)it->second;
    }
    static inline void rcg_memo_put(void* m, int32_t v, int32_t used, int64_t t, uint64_t lo, uint64_t hi, int val) {
        RcgKey k{t, lo, hi, v, used};
        (*(RcgMemo*)m)[k] = (char)val;
    }
    static inline size_t rcg_memo_dump(void* m, int32_t* vs, int32_t* us, int64_t* ts, uint64_t* los, uint64_t* his, char* vals) {
        size_t i = 0;
        for (auto& kv : *(RcgMemo*)m) {
            vs[i] = kv.first.v; us[i] = kv.first.used; ts[i] = kv.first.t; los[i] = kv.first.lo; his[i] = kv.first.hi;
            vals[i] = kv.second; ++i;
        }
        return i;
    }
    """
    void* rcg_memo_new()
    void rcg_memo_free(void* m)
    size_t rcg_memo_size(void* m)
    int rcg_memo_get(void* m, int32_t v, int32_t used, int64_t t, uint64_t lo, uint64_t hi)
    void rcg_memo_put(void* m, int32_t v, int32_t used, int64_t t, uint64_t lo, uint64_t hi, int val)
    size_t rcg_memo_dump(void* m, int32_t* vs, int32_t* us, int64_t* ts, uint64_t* los, uint64_t* his, char* vals)

cdef enum:
    MAX_OUT = 128


cdef inline bint has_bit(uint64_t lo, uint64_t hi, int a) nogil:
    if a < 64:
        return (lo >> a) & 1
    return (hi >> (a - 64)) & 1


cdef class SearchKernel:
    cdef int target, budget, n_arcs
    cdef int64_t delta
    cdef int* head
    cdef int64_t* label
    cdef int64_t* trav
    cdef int* out_start
    cdef int* out_arcs
    cdef int64_t* expiry
    cdef uint64_t* live_lo
    cdef uint64_t* live_hi
    cdef void* memo
    cdef bint short_circuit, live_keys
    cdef size_t cap
    cdef public long long states
    cdef public long long hits
    cdef public int peak_depth

    def __cinit__(self, int vertex_count, arcs, int target, int budget, delta,
                  bint memo=True, max_states=None, bint short_circuit=True, memo_key="live"):
        cdef int m = len(arcs)
        cdef int k, v
        if m > MAX_OUT - 1:
            raise ValueError("compiled kernel supports at most 127 arcs")
        if memo_key not in ("live", "full"):
            raise ValueError(f"unknown memo key scheme {memo_key!r}")
        self.live_keys = memo_key == "live"
        self.n_arcs = m
        self.target = target
        self.budget = budget
        self.delta = delta
        self.short_circuit = short_circuit
        self.cap = 0 if max_states is None else <size_t>max_states
        self.head = <int*>malloc((m + 1) * sizeof(int))
        self.label = <int64_t*>malloc((m + 1) * sizeof(int64_t))
        self.trav = <int64_t*>malloc((m + 1) * sizeof(int64_t))
        self.out_start = <int*>malloc((vertex_count + 2) * sizeof(int))
        self.out_arcs = <int*>malloc((m + 1) * sizeof(int))
        self.expiry = <int64_t*>malloc((m + 1) * sizeof(int64_t))
        self.live_lo = <uint64_t*>malloc((m + 1) * sizeof(uint64_t))
        self.live_hi = <uint64_t*>malloc((m + 1) * sizeof(uint64_t))
        if not (self.head and self.label and self.trav and self.out_start and self.out_arcs
                and self.expiry and self.live_lo and self.live_hi):
            raise MemoryError()
        for v in range(vertex_count + 2):
            self.out_start[v] = 0
        for k in range(1, m + 1):
            tail, hd, lab, tr = arcs[k - 1]
            self.head[k] = hd
            self.label[k] = lab
            self.trav[k] = tr
            self.out_start[tail + 1] += 1
        for v in range(1, vertex_count + 2):
            self.out_start[v] += self.out_start[v - 1]
        # arcs are visited in id order, so each bucket stays sorted
        fill = [self.out_start[v] for v in range(vertex_count + 1)]
        for k in range(1, m + 1):
            tail = arcs[k - 1][0]
            self.out_arcs[fill[tail]] = k
            fill[tail] += 1
        # live(t) = arcs with label + delta >= t, as suffix unions over
        # arcs sorted by expiry
        order = sorted(range(1, m + 1), key=lambda k: arcs[k - 1][2])
        self.live_lo[m] = 0
        self.live_hi[m] = 0
        for i in range(m - 1, -1, -1):
            k = order[i]
            self.expiry[i] = arcs[k - 1][2] + delta
            self.live_lo[i] = self.live_lo[i + 1]
            self.live_hi[i] = self.live_hi[i + 1]
            if k < 64:
                self.live_lo[i] |= (<uint64_t>1) << k
            else:
                self.live_hi[i] |= (<uint64_t>1) << (k - 64)
        self.memo = rcg_memo_new() if memo else NULL
        self.states = 0
        self.hits = 0
        self.peak_depth = 0

    def __dealloc__(self):
        free(self.head)
        free(self.label)
        free(self.trav)
        free(self.out_start)
        free(self.out_arcs)
        free(self.expiry)
        free(self.live_lo)
        free(self.live_hi)
        if self.memo != NULL:
            rcg_memo_free(self.memo)

    @property
    def implementation(self):
        return "cython"

    @property
    def memo_size(self):
        return 0 if self.memo == NULL else rcg_memo_size(self.memo)

    def solve(self, int v, t, mask, used=None):
        cdef uint64_t lo = mask & 0xFFFFFFFFFFFFFFFF
        cdef uint64_t hi = mask >> 64
        if used is None:
            used = bin(mask).count("1")
        return bool(self._eval(v, t, lo, hi, used, 0))

    def live_mask(self, t):
        cdef int i = self._live_index(t)
        return (<object>self.live_hi[i] << 64) | <object>self.live_lo[i]

    cdef inline int _live_index(self, int64_t t) nogil:
        # first position whose expiry is >= t
        cdef int lo = 0, hi = self.n_arcs, mid
        while lo < hi:
            mid = (lo + hi) >> 1
            if self.expiry[mid] < t:
                lo = mid + 1
            else:
                hi = mid
        return lo

    cdef int _eval(self, int v, int64_t t, uint64_t lo, uint64_t hi, int used, int depth) except -1:
        cdef int moves[MAX_OUT]
        cdef int cand[MAX_OUT]
        cdef int idx[MAX_OUT]
        cdef int n_moves = 0, n_cand = 0
        cdef int i, a, size, limit, j
        cdef int64_t arr
        cdef uint64_t alo, ahi
        cdef int result = 1, escaped, r
        cdef uint64_t klo = lo, khi = hi

        if depth > self.peak_depth:
            self.peak_depth = depth
        if v == self.target:
            return 1
        if self.memo != NULL:
            if self.live_keys:
                i = self._live_index(t)
                klo = lo & self.live_lo[i]
                khi = hi & self.live_hi[i]
            r = rcg_memo_get(self.memo, v, used, t, klo, khi)
            if r >= 0:
                self.hits += 1
                return r
            if self.cap and rcg_memo_size(self.memo) >= self.cap:
                raise ResourceLimitError(f"memo table reached {self.cap} states")
        elif self.cap and <size_t>self.states >= self.cap:
            raise ResourceLimitError(f"search evaluated {self.cap} states")
        self.states += 1

        for i in range(self.out_start[v], self.out_start[v + 1]):
            a = self.out_arcs[i]
            if has_bit(lo, hi, a):
                if t <= self.label[a] + self.delta:
                    moves[n_moves] = a
                    n_moves += 1
            elif t <= self.label[a]:
                moves[n_moves] = a
                n_moves += 1
                cand[n_cand] = a
                n_cand += 1

        limit = self.budget - used
        if limit > n_cand:
            limit = n_cand
        size = 0
        while size <= limit:
            for i in range(size):
                idx[i] = i
            while True:
                alo = lo
                ahi = hi
                for i in range(size):
                    a = cand[idx[i]]
                    if a < 64:
                        alo |= (<uint64_t>1) << a
                    else:
                        ahi |= (<uint64_t>1) << (a - 64)
                escaped = 0
                for i in range(n_moves):
                    a = moves[i]
                    arr = self.label[a] + self.trav[a]
                    if has_bit(alo, ahi, a):
                        arr += self.delta
                    if self._eval(self.head[a], arr, alo, ahi, used + size, depth + 2):
                        escaped = 1
                        if self.short_circuit:
                            break
                if not escaped:
                    result = 0
                    if self.short_circuit:
                        break
                # next combination of `size` out of n_cand, lexicographic
                j = size - 1
                while j >= 0 and idx[j] == n_cand - size + j:
                    j -= 1
                if j < 0:
                    break
                idx[j] += 1
                for i in range(j + 1, size):
                    idx[i] = idx[i - 1] + 1
            if not result and self.short_circuit:
                break
            size += 1

        if self.memo != NULL:
            rcg_memo_put(self.memo, v, used, t, klo, khi, result)
        return result

    def memo_items(self):
        """``(vertex, clock, keyed_delay_ids, delay_count, value)`` per cached state."""
        if self.memo == NULL:
            return []
        cdef size_t n = rcg_memo_size(self.memo)
        cdef int32_t* vs = <int32_t*>malloc((n + 1) * sizeof(int32_t))
        cdef int32_t* us = <int32_t*>malloc((n + 1) * sizeof(int32_t))
        cdef int64_t* ts = <int64_t*>malloc((n + 1) * sizeof(int64_t))
        cdef uint64_t* los = <uint64_t*>malloc((n + 1) * sizeof(uint64_t))
        cdef uint64_t* his = <uint64_t*>malloc((n + 1) * sizeof(uint64_t))
        cdef char* vals = <char*>malloc((n + 1) * sizeof(char))
        cdef size_t i
        try:
            rcg_memo_dump(self.memo, vs, us, ts, los, his, vals)
            out = []
            for i in range(n):
                mask = (<object>his[i] << 64) | <object>los[i]
                ids = frozenset(k for k in range(mask.bit_length()) if mask >> k & 1)
                out.append((vs[i], ts[i], ids, us[i], bool(vals[i])))
        finally:
            free(vs); free(us); free(ts); free(los); free(his); free(vals)
        return out
