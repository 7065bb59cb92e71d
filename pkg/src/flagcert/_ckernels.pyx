# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot kernels on 64-bit vertex masks.

Mirrors ``_pykernels`` step for step (same refinement order, same branch
order, same tie-breaking) so both backends return identical results.
"""

from libc.stdint cimport uint64_t
from libc.string cimport memcmp, memcpy

cdef extern from *:
    int __builtin_popcountll(unsigned long long) nogil
    int __builtin_ctzll(unsigned long long) nogil

BACKEND = "cython"

cdef enum:
    MAXN = 64
    MAXPAIRS = 2016


cdef struct Ctx:
    int n
    uint64_t red[MAXN]
    uint64_t blue[MAXN]
    int sig[MAXN * 2 * MAXN]
    unsigned char code[MAXPAIRS]
    unsigned char best[MAXPAIRS]
    int best_order[MAXN]
    int have_best


cdef inline int _sig_cmp(const int* a, const int* b, int width) nogil:
    cdef int t
    for t in range(width):
        if a[t] != b[t]:
            return -1 if a[t] < b[t] else 1
    return 0


cdef void _refine(Ctx* ctx, int* lab, int* cstart, int* ncells) nogil:
    cdef uint64_t masks[MAXN]
    cdef int nlab[MAXN]
    cdef int ncstart[MAXN + 1]
    cdef int idx[MAXN]
    cdef int n = ctx.n
    cdef int nc, k, t, i, j, s, start, v, width, tmp, nnc, pos, split
    cdef uint64_t m, rv, bv
    cdef int* base
    while True:
        nc = ncells[0]
        for k in range(nc):
            m = 0
            for i in range(cstart[k], cstart[k + 1]):
                m |= (<uint64_t>1) << lab[i]
            masks[k] = m
        width = 2 * nc
        nnc = 0
        pos = 0
        split = 0
        for k in range(nc):
            start = cstart[k]
            s = cstart[k + 1] - start
            if s == 1:
                ncstart[nnc] = pos
                nnc += 1
                nlab[pos] = lab[start]
                pos += 1
                continue
            for i in range(s):
                v = lab[start + i]
                rv = ctx.red[v]
                bv = ctx.blue[v]
                base = &ctx.sig[i * width]
                for t in range(nc):
                    base[2 * t] = __builtin_popcountll(rv & masks[t])
                    base[2 * t + 1] = __builtin_popcountll(bv & masks[t])
                idx[i] = i
            # stable insertion sort by signature
            for i in range(1, s):
                tmp = idx[i]
                j = i - 1
                while j >= 0 and _sig_cmp(&ctx.sig[idx[j] * width], &ctx.sig[tmp * width], width) > 0:
                    idx[j + 1] = idx[j]
                    j -= 1
                idx[j + 1] = tmp
            for i in range(s):
                if i == 0 or _sig_cmp(&ctx.sig[idx[i - 1] * width], &ctx.sig[idx[i] * width], width) != 0:
                    if i > 0:
                        split = 1
                    ncstart[nnc] = pos
                    nnc += 1
                nlab[pos] = lab[start + idx[i]]
                pos += 1
        ncstart[nnc] = pos
        memcpy(lab, nlab, n * sizeof(int))
        memcpy(cstart, ncstart, (nnc + 1) * sizeof(int))
        ncells[0] = nnc
        if not split:
            return


cdef inline bint _twins(Ctx* ctx, int u, int w) nogil:
    cdef uint64_t keep = ~(((<uint64_t>1) << u) | ((<uint64_t>1) << w))
    return (ctx.red[u] & keep) == (ctx.red[w] & keep) and (ctx.blue[u] & keep) == (ctx.blue[w] & keep)


cdef void _leaf(Ctx* ctx, int* lab) nogil:
    cdef int n = ctx.n
    cdef int i, j, a, p = 0
    cdef uint64_t ra, ba, bit
    for i in range(n):
        a = lab[i]
        ra = ctx.red[a]
        ba = ctx.blue[a]
        for j in range(i + 1, n):
            bit = (<uint64_t>1) << lab[j]
            if ra & bit:
                ctx.code[p] = 1
            elif ba & bit:
                ctx.code[p] = 2
            else:
                ctx.code[p] = 0
            p += 1
    if not ctx.have_best or memcmp(ctx.code, ctx.best, p) < 0:
        memcpy(ctx.best, ctx.code, p)
        memcpy(ctx.best_order, lab, n * sizeof(int))
        ctx.have_best = 1


cdef void _search(Ctx* ctx, int* lab_in, int* cstart_in, int ncells) nogil:
    cdef int lab[MAXN]
    cdef int cstart[MAXN + 1]
    cdef int clab[MAXN]
    cdef int ccstart[MAXN + 1]
    cdef int reps[MAXN]
    cdef int n = ctx.n
    cdef int nc = ncells
    cdef int k, s, target, size, start, i, r, v, nreps, p, q
    cdef bint twin
    memcpy(lab, lab_in, n * sizeof(int))
    memcpy(cstart, cstart_in, (ncells + 1) * sizeof(int))
    _refine(ctx, lab, cstart, &nc)
    target = -1
    size = n + 1
    for k in range(nc):
        s = cstart[k + 1] - cstart[k]
        if 1 < s < size:
            target = k
            size = s
    if target < 0:
        _leaf(ctx, lab)
        return
    start = cstart[target]
    nreps = 0
    for i in range(size):
        v = lab[start + i]
        twin = False
        for r in range(nreps):
            if _twins(ctx, v, reps[r]):
                twin = True
                break
        if twin:
            continue
        reps[nreps] = v
        nreps += 1
        memcpy(clab, lab, n * sizeof(int))
        clab[start] = v
        p = start + 1
        for q in range(size):
            if lab[start + q] != v:
                clab[p] = lab[start + q]
                p += 1
        for k in range(target + 1):
            ccstart[k] = cstart[k]
        ccstart[target + 1] = start + 1
        for k in range(target + 1, nc + 1):
            ccstart[k + 1] = cstart[k]
        _search(ctx, clab, ccstart, nc + 1)


def canon(int n, red, blue, int nfixed=0):
    """Canonical pair-color code and the labeling that realizes it."""
    cdef Ctx ctx
    cdef int lab[MAXN]
    cdef int cstart[MAXN + 1]
    cdef int i, nc
    if n == 0:
        return b"", []
    if n > MAXN:
        raise ValueError(f"compiled kernel supports at most {MAXN} vertices")
    ctx.n = n
    ctx.have_best = 0
    for i in range(n):
        ctx.red[i] = red[i]
        ctx.blue[i] = blue[i]
        lab[i] = i
    nc = 0
    for i in range(nfixed):
        cstart[nc] = i
        nc += 1
    if n > nfixed:
        cstart[nc] = nfixed
        nc += 1
    cstart[nc] = n
    with nogil:
        _search(&ctx, lab, cstart, nc)
    npairs = n * (n - 1) // 2
    return bytes(ctx.best[:npairs]), [ctx.best_order[i] for i in range(n)]


cdef struct CycCtx:
    int n
    uint64_t adj[MAXN]
    int dist[MAXN * MAXN]
    int path[MAXN + 1]
    int plen


cdef void _bfs(CycCtx* c, int src) nogil:
    cdef int n = c.n
    cdef int* dist = &c.dist[src * MAXN]
    cdef uint64_t frontier, seen, nxt, f, low
    cdef int d = 0, i, v
    for i in range(n):
        dist[i] = n + 1
    dist[src] = 0
    frontier = (<uint64_t>1) << src
    seen = frontier
    while frontier:
        d += 1
        nxt = 0
        f = frontier
        while f:
            v = __builtin_ctzll(f)
            f &= f - 1
            nxt |= c.adj[v]
        nxt &= ~seen
        seen |= nxt
        f = nxt
        while f:
            dist[__builtin_ctzll(f)] = d
            f &= f - 1
        frontier = nxt


cdef bint _dfs(CycCtx* c, const int* dt, int x, uint64_t visited, int target, int left) nogil:
    cdef uint64_t cand, low
    cdef int y
    if left == 1:
        return (c.adj[x] >> target) & 1
    cand = c.adj[x] & ~visited & ~((<uint64_t>1) << target)
    while cand:
        low = cand & (~cand + 1)
        y = __builtin_ctzll(cand)
        cand ^= low
        if dt[y] > left - 1:
            continue
        c.path[c.plen] = y
        c.plen += 1
        if _dfs(c, dt, y, visited | low, target, left - 1):
            return True
        c.plen -= 1
    return False


cdef bint _find_path(CycCtx* c, const int* dt, int start, int target, int steps) nogil:
    if dt[start] > steps:
        return False
    c.path[0] = start
    c.plen = 1
    if _dfs(c, dt, start, ((<uint64_t>1) << start) | ((<uint64_t>1) << target), target, steps):
        c.path[c.plen] = target
        c.plen += 1
        return True
    return False


def cycle_edges(int n, adj, int length):
    """Edges ``(u, v)`` with ``u < v`` that lie on a cycle of exactly ``length`` edges."""
    cdef CycCtx c
    cdef unsigned char on[MAXN * MAXN]
    cdef int u, v, i, a, b
    if n > MAXN:
        raise ValueError(f"compiled kernel supports at most {MAXN} vertices")
    c.n = n
    for i in range(n):
        c.adj[i] = adj[i]
    for i in range(n * MAXN):
        on[i] = 0
    with nogil:
        for u in range(n):
            _bfs(&c, u)
        for u in range(n):
            for v in range(u + 1, n):
                if not ((c.adj[u] >> v) & 1) or on[u * MAXN + v]:
                    continue
                if _find_path(&c, &c.dist[u * MAXN], v, u, length - 1):
                    c.path[c.plen] = v
                    for i in range(c.plen):
                        a = c.path[i]
                        b = c.path[i + 1]
                        if a < b:
                            on[a * MAXN + b] = 1
                        else:
                            on[b * MAXN + a] = 1
    return [(u, v) for u in range(n) for v in range(u + 1, n) if on[u * MAXN + v]]
