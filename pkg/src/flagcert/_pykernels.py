"""Pure-Python hot kernels.

Graphs arrive as per-vertex bitmasks ``red[v]`` and ``blue[v]`` (plain
adjacency for the cycle kernel). ``_ckernels.pyx`` implements the same
functions with identical results; keep the two in lockstep.
"""

from __future__ import annotations

BACKEND = "python"


def _popcount(x: int) -> int:
    return bin(x).count("1")


def _refine(cells, red, blue):
    """Iterated equitable refinement; cells are lists of vertices, kept in order."""
    while True:
        masks = []
        for c in cells:
            m = 0
            for v in c:
                m |= 1 << v
            masks.append(m)
        out = []
        split = False
        for c in cells:
            if len(c) == 1:
                out.append(c)
                continue
            groups: dict[tuple, list[int]] = {}
            for v in c:
                rv, bv = red[v], blue[v]
                sig = tuple((_popcount(rv & m), _popcount(bv & m)) for m in masks)
                groups.setdefault(sig, []).append(v)
            if len(groups) == 1:
                out.append(c)
                continue
            split = True
            for sig in sorted(groups):
                out.append(groups[sig])
        cells = out
        if not split:
            return cells


def _code(order, red, blue) -> bytes:
    n = len(order)
    buf = bytearray()
    for i in range(n):
        a = order[i]
        ra, ba = red[a], blue[a]
        for j in range(i + 1, n):
            bit = 1 << order[j]
            buf.append(1 if ra & bit else (2 if ba & bit else 0))
    return bytes(buf)


def _twins(u, w, red, blue) -> bool:
    keep = ~((1 << u) | (1 << w))
    return (red[u] & keep) == (red[w] & keep) and (blue[u] & keep) == (blue[w] & keep)


def canon(n: int, red, blue, nfixed: int = 0):
    """Canonical pair-color code and the labeling that realizes it.

    The first ``nfixed`` vertices are individualized in order before
    refinement, so the code is canonical for graphs with a labeled prefix.
    Returns ``(code, order)`` where ``order[i]`` is the original vertex placed
    at position ``i``.
    """
    if n == 0:
        return b"", []
    red = list(red)
    blue = list(blue)
    cells = [[v] for v in range(nfixed)]
    if n > nfixed:
        cells.append(list(range(nfixed, n)))
    best = [None, None]

    def search(cells):
        cells = _refine(cells, red, blue)
        target = -1
        size = n + 1
        for idx, c in enumerate(cells):
            if 1 < len(c) < size:
                target, size = idx, len(c)
        if target < 0:
            order = [c[0] for c in cells]
            code = _code(order, red, blue)
            if best[0] is None or code < best[0]:
                best[0], best[1] = code, order
            return
        cell = cells[target]
        reps: list[int] = []
        for v in cell:
            if any(_twins(v, r, red, blue) for r in reps):
                continue
            reps.append(v)
            rest = [x for x in cell if x != v]
            search(cells[:target] + [[v], rest] + cells[target + 1:])

    search(cells)
    return best[0], best[1]


def _bfs_dist(adj, src: int, n: int):
    dist = [n + 1] * n
    dist[src] = 0
    frontier = 1 << src
    seen = frontier
    d = 0
    while frontier:
        d += 1
        nxt = 0
        f = frontier
        while f:
            low = f & -f
            v = low.bit_length() - 1
            f ^= low
            nxt |= adj[v]
        nxt &= ~seen
        seen |= nxt
        f = nxt
        while f:
            low = f & -f
            dist[low.bit_length() - 1] = d
            f ^= low
        frontier = nxt
    return dist


def cycle_edges(n: int, adj, length: int):
    """Edges ``(u, v)`` with ``u < v`` that lie on a cycle of exactly ``length`` edges."""
    adj = list(adj)
    dists = [_bfs_dist(adj, v, n) for v in range(n)]
    on_cycle: set[tuple[int, int]] = set()
    for u in range(n):
        nb = adj[u] >> (u + 1)
        v = u + 1
        while nb:
            if nb & 1 and (u, v) not in on_cycle:
                path = _find_path(adj, dists[u], v, u, length - 1)
                if path is not None:
                    cyc = path + [v]
                    for a, b in zip(cyc, cyc[1:]):
                        on_cycle.add((a, b) if a < b else (b, a))
            nb >>= 1
            v += 1
    return sorted(on_cycle)


def _find_path(adj, dist_to_target, start, target, steps):
    """Simple path start -> target with exactly ``steps`` edges, or None."""
    path = [start]

    def dfs(x, visited, left):
        if left == 1:
            return bool(adj[x] >> target & 1)
        cand = adj[x] & ~visited & ~(1 << target)
        while cand:
            low = cand & -cand
            y = low.bit_length() - 1
            cand ^= low
            if dist_to_target[y] > left - 1:
                continue
            path.append(y)
            if dfs(y, visited | low, left - 1):
                return True
            path.pop()
        return False

    if dist_to_target[start] > steps:
        return None
    if dfs(start, (1 << start) | (1 << target), steps):
        return path + [target]
    return None


def witness_cycle(n: int, adj, u: int, v: int, length: int):
    """Vertex sequence of a ``length``-cycle through edge ``uv``, or None."""
    adj = list(adj)
    if not adj[u] >> v & 1:
        return None
    dist = _bfs_dist(adj, u, n)
    path = _find_path(adj, dist, v, u, length - 1)
    return None if path is None else path
