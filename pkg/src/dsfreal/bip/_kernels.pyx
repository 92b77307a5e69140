# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled selection kernels with 64-bit masks.

Mirrors ``_kernels_py``; callers route problems wider than 63 groups or
64 vertices to the pure-Python module.
"""

from libc.stdint cimport uint64_t, int64_t
from libc.stdlib cimport malloc, free


cdef inline int _ctz(uint64_t x) nogil:
    cdef int i = 0
    while not (x & 1):
        x >>= 1
        i += 1
    return i


cdef inline int _popcount(uint64_t x) nogil:
    cdef int c = 0
    while x:
        x &= x - 1
        c += 1
    return c


def exhaustive(costs, weights, cap):
    cdef int g = len(costs)
    cdef int p = len(cap)
    if g > 63:
        raise ValueError("exhaustive kernel limited to 63 groups")
    cdef int64_t *c = <int64_t *> malloc(max(g * p, 1) * sizeof(int64_t))
    cdef int64_t *w = <int64_t *> malloc(max(g, 1) * sizeof(int64_t))
    cdef int64_t *cp = <int64_t *> malloc(max(p, 1) * sizeof(int64_t))
    cdef int64_t *used = <int64_t *> malloc(max(p, 1) * sizeof(int64_t))
    cdef int i, j, over = 0
    cdef int64_t weight = 0, best_weight = 0, cj
    cdef uint64_t k, bit, mask = 0, best_mask = 0, diff, total
    try:
        for i in range(g):
            w[i] = weights[i]
            for j in range(p):
                c[i * p + j] = costs[i][j]
        for j in range(p):
            cp[j] = cap[j]
            used[j] = 0
        total = (<uint64_t> 1) << g
        with nogil:
            k = 1
            while k < total:
                i = _ctz(k)
                bit = (<uint64_t> 1) << i
                if mask & bit:
                    mask ^= bit
                    weight -= w[i]
                    for j in range(p):
                        cj = c[i * p + j]
                        if cj:
                            if used[j] > cp[j] and used[j] - cj <= cp[j]:
                                over -= 1
                            used[j] -= cj
                else:
                    mask |= bit
                    weight += w[i]
                    for j in range(p):
                        cj = c[i * p + j]
                        if cj:
                            if used[j] <= cp[j] and cp[j] < used[j] + cj:
                                over += 1
                            used[j] += cj
                k += 1
                if over:
                    continue
                if weight > best_weight:
                    best_mask = mask
                    best_weight = weight
                elif weight == best_weight:
                    diff = mask ^ best_mask
                    if mask & diff & (~diff + 1):
                        best_mask = mask
    finally:
        free(c)
        free(w)
        free(cp)
        free(used)
    return [i for i in range(g) if (best_mask >> i) & 1], int(best_weight)


cdef struct BBState:
    int g
    int p
    int64_t *c
    int64_t *w
    int64_t *slack
    int64_t *suffix
    int64_t free_w
    double ratio
    int64_t best
    uint64_t best_mask


cdef void _bb_visit(BBState *st, int i, int64_t cur, uint64_t mask) nogil:
    cdef int j
    cdef int64_t tot = 0
    cdef double by_slack
    cdef int64_t by_count
    cdef bint fits
    if cur > st.best:
        st.best = cur
        st.best_mask = mask
    if i == st.g:
        return
    for j in range(st.p):
        tot += st.slack[j]
    by_count = st.suffix[i]
    by_slack = st.free_w + st.ratio * tot
    if cur + (by_count if by_count < by_slack else by_slack) <= st.best:
        return
    fits = True
    for j in range(st.p):
        if st.c[i * st.p + j] > st.slack[j]:
            fits = False
            break
    if fits:
        for j in range(st.p):
            st.slack[j] -= st.c[i * st.p + j]
        _bb_visit(st, i + 1, cur + st.w[i], mask | ((<uint64_t> 1) << i))
        for j in range(st.p):
            st.slack[j] += st.c[i * st.p + j]
    _bb_visit(st, i + 1, cur, mask)


def branch_bound(costs, weights, cap):
    cdef int g = len(costs)
    cdef int p = len(cap)
    if g > 63:
        raise ValueError("branch-and-bound kernel limited to 63 groups")
    cdef BBState st
    cdef int i, j
    cdef int64_t rowsum
    st.g = g
    st.p = p
    st.c = <int64_t *> malloc(max(g * p, 1) * sizeof(int64_t))
    st.w = <int64_t *> malloc(max(g, 1) * sizeof(int64_t))
    st.slack = <int64_t *> malloc(max(p, 1) * sizeof(int64_t))
    st.suffix = <int64_t *> malloc((g + 1) * sizeof(int64_t))
    st.free_w = 0
    st.ratio = 0.0
    st.best = 0
    st.best_mask = 0
    try:
        for i in range(g):
            st.w[i] = weights[i]
            rowsum = 0
            for j in range(p):
                st.c[i * p + j] = costs[i][j]
                rowsum += costs[i][j]
            if rowsum == 0:
                st.free_w += st.w[i]
            st.ratio = max(st.ratio, st.w[i] / <double> max(rowsum, 1))
        for j in range(p):
            st.slack[j] = cap[j]
        st.suffix[g] = 0
        for i in range(g - 1, -1, -1):
            st.suffix[i] = st.suffix[i + 1] + st.w[i]
        with nogil:
            _bb_visit(&st, 0, 0, 0)
        result = [i for i in range(g) if (st.best_mask >> i) & 1], int(st.best)
    finally:
        free(st.c)
        free(st.w)
        free(st.slack)
        free(st.suffix)
    return result


cdef int _colour_bound(uint64_t cand, uint64_t *adj) nogil:
    cdef int colours = 0, v
    cdef uint64_t rest = cand, avail
    while rest:
        colours += 1
        avail = rest
        while avail:
            v = _ctz(avail)
            rest &= ~((<uint64_t> 1) << v)
            avail &= ~((<uint64_t> 1) << v) & ~adj[v]
    return colours


cdef void _mc_visit(uint64_t *adj, uint64_t clique, int size, uint64_t cand,
                    int *best, uint64_t *best_set) nogil:
    cdef int v
    if size > best[0]:
        best[0] = size
        best_set[0] = clique
    if not cand or size + _colour_bound(cand, adj) <= best[0]:
        return
    while cand:
        v = _ctz(cand)
        _mc_visit(adj, clique | ((<uint64_t> 1) << v), size + 1, cand & adj[v], best, best_set)
        cand &= ~((<uint64_t> 1) << v)
        if size + _popcount(cand) <= best[0]:
            return


def max_clique(adj_rows):
    cdef int n = len(adj_rows)
    if n > 64:
        raise ValueError("clique kernel limited to 64 vertices")
    cdef uint64_t adj[64]
    cdef int best = 0, v
    cdef uint64_t best_set = 0
    cdef uint64_t everyone
    for v in range(n):
        adj[v] = <uint64_t> adj_rows[v]
    everyone = ((<uint64_t> 1) << n) - 1 if n < 64 else ~(<uint64_t> 0)
    with nogil:
        _mc_visit(adj, 0, 0, everyone, &best, &best_set)
    return [v for v in range(n) if (best_set >> v) & 1]
