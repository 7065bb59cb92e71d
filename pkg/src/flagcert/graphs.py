"""Red/blue-colored graphs, patterns with wildcard edges, canonical forms and cycles."""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from importlib import resources
from itertools import product
from typing import Iterable, Sequence

import networkx as nx

from . import kernels

__all__ = [
    "NONE",
    "RED",
    "BLUE",
    "BLACK",
    "ColoredGraph",
    "PatternGraph",
    "ForbiddenFamily",
    "canonical_form",
    "contains_pattern",
    "is_family_free",
    "cycle_edge_set",
    "cycle_witness",
    "coloring_is_valid",
    "get_family",
    "named_pattern",
    "pair_index",
]

NONE, RED, BLUE, BLACK = 0, 1, 2, 3
MAX_VERTICES = 64


def pair_index(n: int, i: int, j: int) -> int:
    """Position of the pair ``{i, j}`` in row-major upper-triangular order."""
    if i > j:
        i, j = j, i
    return i * n - i * (i + 1) // 2 + (j - i - 1)


@lru_cache(maxsize=None)
def _pairs(n: int) -> tuple[tuple[int, int], ...]:
    return tuple((i, j) for i in range(n) for j in range(i + 1, n))


class ColoredGraph:
    """Immutable graph on vertices ``0..n-1`` with pair colors NONE/RED/BLUE.

    ``colors`` lists the ``n(n-1)/2`` pair colors in row-major
    upper-triangular order, the same order as the text encoding ``n:digits``.
    Equality is labeled equality; use :func:`canonical_form` for isomorphism.
    """

    __slots__ = ("n", "colors", "_red", "_blue", "_key")
    _max_color = BLUE

    def __init__(self, n: int, colors: Sequence[int]):
        colors = tuple(colors)
        if n < 0 or n > MAX_VERTICES:
            raise ValueError(f"vertex count {n} outside 0..{MAX_VERTICES}")
        if len(colors) != n * (n - 1) // 2:
            raise ValueError(f"{n} vertices need {n * (n - 1) // 2} pair colors, got {len(colors)}")
        if colors and (min(colors) < 0 or max(colors) > self._max_color):
            raise ValueError(f"pair color out of range 0..{self._max_color}")
        self.n = n
        self.colors = colors
        self._red = None
        self._blue = None
        self._key = None

    # -- construction -------------------------------------------------------
    @classmethod
    def from_edges(cls, n: int, red: Iterable[tuple[int, int]] = (), blue: Iterable[tuple[int, int]] = (),
                   black: Iterable[tuple[int, int]] = ()):
        colors = [NONE] * (n * (n - 1) // 2)
        for col, edges in ((RED, red), (BLUE, blue), (BLACK, black)):
            for i, j in edges:
                if i == j:
                    raise ValueError("self-pairs are not allowed")
                colors[pair_index(n, i, j)] = col
        return cls(n, colors)

    @classmethod
    def empty(cls, n: int):
        return cls(n, (NONE,) * (n * (n - 1) // 2))

    @classmethod
    def complete(cls, n: int, color: int = RED):
        return cls(n, (color,) * (n * (n - 1) // 2))

    @classmethod
    def decode(cls, text: str):
        """Parse ``n:digits`` (0=none, 1=red, 2=blue, 3=black for patterns)."""
        head, sep, digits = text.strip().partition(":")
        if not sep or not head.isdigit() or (digits and not digits.isdigit()):
            raise ValueError(f"malformed graph encoding {text!r}")
        return cls(int(head), [int(c) for c in digits])

    def encode(self) -> str:
        return f"{self.n}:" + "".join(map(str, self.colors))

    # -- accessors ----------------------------------------------------------
    def color(self, i: int, j: int) -> int:
        if i == j:
            raise ValueError("no self-pairs")
        return self.colors[pair_index(self.n, i, j)]

    def _masks(self):
        if self._red is None:
            n = self.n
            red = [0] * n
            blue = [0] * n
            for (i, j), c in zip(_pairs(n), self.colors):
                if c == RED:
                    red[i] |= 1 << j
                    red[j] |= 1 << i
                elif c == BLUE:
                    blue[i] |= 1 << j
                    blue[j] |= 1 << i
            self._red = tuple(red)
            self._blue = tuple(blue)
        return self._red, self._blue

    @property
    def red_masks(self) -> tuple[int, ...]:
        return self._masks()[0]

    @property
    def blue_masks(self) -> tuple[int, ...]:
        return self._masks()[1]

    @property
    def adjacency(self) -> tuple[int, ...]:
        red, blue = self._masks()
        return tuple(r | b for r, b in zip(red, blue))

    def edges(self, color: int | None = None) -> list[tuple[int, int]]:
        if color is None:
            return [p for p, c in zip(_pairs(self.n), self.colors) if c != NONE]
        return [p for p, c in zip(_pairs(self.n), self.colors) if c == color]

    def num_edges(self, color: int | None = None) -> int:
        if color is None:
            return sum(1 for c in self.colors if c != NONE)
        return self.colors.count(color)

    def plain(self) -> ColoredGraph:
        """Same edge set, every edge red."""
        return ColoredGraph(self.n, [RED if c else NONE for c in self.colors])

    def recolor(self, blue_edges: Iterable[tuple[int, int]]) -> ColoredGraph:
        colors = list(self.colors)
        for i, j in blue_edges:
            k = pair_index(self.n, i, j)
            if colors[k] == NONE:
                raise ValueError(f"({i}, {j}) is not an edge")
            colors[k] = BLUE
        return type(self)(self.n, colors)

    def relabel(self, perm: Sequence[int]) -> ColoredGraph:
        """Graph with vertex ``v`` renamed to ``perm[v]``."""
        n = self.n
        colors = [NONE] * len(self.colors)
        for (i, j), c in zip(_pairs(n), self.colors):
            colors[pair_index(n, perm[i], perm[j])] = c
        return type(self)(n, colors)

    def induced(self, verts: Sequence[int]) -> ColoredGraph:
        """Subgraph on ``verts``; new vertex ``k`` is old vertex ``verts[k]``."""
        n, cols = self.n, self.colors
        k = len(verts)
        out = []
        for a in range(k):
            va = verts[a]
            for b in range(a + 1, k):
                vb = verts[b]
                out.append(cols[pair_index(n, va, vb)])
        return type(self)(k, out)

    def canonical_key(self) -> bytes:
        if self._key is None:
            self._key = canonical_form(self)
        return self._key

    def canonical(self) -> ColoredGraph:
        """The canonical representative of the isomorphism class."""
        return type(self)(self.n, canonical_key_colors(self.canonical_key()))

    def __eq__(self, other):
        if not isinstance(other, ColoredGraph):
            return NotImplemented
        return self.n == other.n and self.colors == other.colors

    def __hash__(self):
        return hash((self.n, self.colors))

    def __repr__(self) -> str:
        return f"{type(self).__name__}({self.encode()!r})"

    def to_networkx(self) -> nx.Graph:
        g = nx.Graph()
        g.add_nodes_from(range(self.n))
        for (i, j), c in zip(_pairs(self.n), self.colors):
            if c:
                g.add_edge(i, j, color=c)
        return g


class PatternGraph(ColoredGraph):
    """Colored graph whose BLACK edges match either RED or BLUE."""

    __slots__ = ()
    _max_color = BLACK

    def recolorings(self) -> list[ColoredGraph]:
        black = [k for k, c in enumerate(self.colors) if c == BLACK]
        out = []
        for choice in product((RED, BLUE), repeat=len(black)):
            colors = list(self.colors)
            for k, c in zip(black, choice):
                colors[k] = c
            out.append(ColoredGraph(self.n, colors))
        return out


def canonical_key_colors(key: bytes) -> tuple[int, ...]:
    return tuple(key[1:])


def canonical_form(g: ColoredGraph, root: Sequence[int] = ()) -> bytes:
    """Isomorphism-invariant key; with ``root``, invariant for root-preserving maps.

    The key is ``bytes([n, len(root)])`` followed by the pair colors of the
    canonical labeling, in which the root vertices come first, in order.
    """
    n = g.n
    if BLACK in g.colors:
        raise ValueError("canonical forms are defined for red/blue graphs only")
    if root:
        rest = [v for v in range(n) if v not in root]
        perm = [0] * n
        for pos, v in enumerate(list(root) + rest):
            perm[v] = pos
        g = g.relabel(perm)
    red, blue = g._masks()
    code, _ = kernels.canon(n, red, blue, len(root))
    if root:
        return bytes([n, len(root)]) + code
    return bytes([n]) + code


def canonical_order(g: ColoredGraph) -> list[int]:
    red, blue = g._masks()
    _, order = kernels.canon(g.n, red, blue, 0)
    return order


def graph_from_key(key: bytes) -> ColoredGraph:
    """Canonical representative graph for an unrooted key."""
    return ColoredGraph(key[0], key[1:])


# -- pattern containment ------------------------------------------------------

def _search_order(p: ColoredGraph) -> list[int]:
    order: list[int] = []
    adj = [0] * p.n
    for (i, j), c in zip(_pairs(p.n), p.colors):
        if c != NONE:
            adj[i] |= 1 << j
            adj[j] |= 1 << i
    remaining = set(range(p.n))
    while remaining:
        # start from the highest-degree remaining vertex, then grow greedily
        start = max(sorted(remaining), key=lambda v: bin(adj[v]).count("1"))
        order.append(start)
        remaining.discard(start)
        while True:
            mask = 0
            for v in order:
                mask |= adj[v]
            frontier = [v for v in sorted(remaining) if mask >> v & 1]
            if not frontier:
                break
            nxt = max(frontier, key=lambda v: sum(1 for w in order if adj[v] >> w & 1))
            order.append(nxt)
            remaining.discard(nxt)
    return order


def contains_pattern(g: ColoredGraph, p: ColoredGraph, induced: bool = False) -> bool:
    """Whether some injective vertex map realizes ``p`` inside ``g``.

    BLACK pattern edges match RED or BLUE. Pattern non-edges constrain the
    image only when ``induced`` is true.
    """
    if p.n > g.n:
        return False
    if p.n == 0:
        return True
    gred, gblue = g._masks()
    gadj = [r | b for r, b in zip(gred, gblue)]
    full = (1 << g.n) - 1
    order = _search_order(p)
    pos = {v: k for k, v in enumerate(order)}
    # constraints[k] = list of (earlier position, pattern color)
    constraints = []
    for k, x in enumerate(order):
        cons = []
        for w in order[:k]:
            c = p.color(x, w)
            if c != NONE or induced:
                cons.append((pos[w], c))
        constraints.append(cons)
    image = [0] * p.n
    m = p.n

    def extend(k: int, used: int) -> bool:
        if k == m:
            return True
        cand = full & ~used
        for w, c in constraints[k]:
            y = image[w]
            if c == RED:
                cand &= gred[y]
            elif c == BLUE:
                cand &= gblue[y]
            elif c == BLACK:
                cand &= gadj[y]
            else:
                cand &= ~gadj[y]
            if not cand:
                return False
        while cand:
            low = cand & -cand
            cand ^= low
            image[k] = low.bit_length() - 1
            if extend(k + 1, used | low):
                return True
        return False

    return extend(0, 0)


# -- forbidden families -------------------------------------------------------

@dataclass(frozen=True)
class ForbiddenFamily:
    name: str
    patterns: tuple[PatternGraph, ...]
    pattern_names: tuple[str, ...] = ()

    def __str__(self) -> str:
        return self.name


@lru_cache(maxsize=None)
def _pattern_table() -> tuple[dict[str, PatternGraph], dict[str, tuple[str, ...]]]:
    patterns: dict[str, PatternGraph] = {}
    families: dict[str, tuple[str, ...]] = {}
    text = resources.files("flagcert").joinpath("data/patterns.txt").read_text()
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if parts[0] == "pattern" and len(parts) == 3:
            patterns[parts[1]] = PatternGraph.decode(parts[2])
        elif parts[0] == "family" and len(parts) >= 2:
            families[parts[1]] = tuple(parts[2:])
        else:
            raise ValueError(f"patterns.txt:{lineno}: cannot parse {raw!r}")
    return patterns, families


def named_pattern(name: str) -> PatternGraph:
    return _pattern_table()[0][name]


@lru_cache(maxsize=None)
def get_family(name: str | None) -> ForbiddenFamily | None:
    """``"FC5"``, ``"FC7"``, or ``None``/``"NONE"`` for no restriction."""
    if name is None or str(name).upper() == "NONE":
        return None
    if isinstance(name, ForbiddenFamily):
        return name
    patterns, families = _pattern_table()
    key = str(name).upper()
    if key not in families:
        raise KeyError(f"unknown family {name!r}; known: {sorted(families)}")
    names = families[key]
    return ForbiddenFamily(key, tuple(patterns[n] for n in names), names)


def is_family_free(g: ColoredGraph, family: ForbiddenFamily | str | None) -> bool:
    fam = family if isinstance(family, ForbiddenFamily) else get_family(family)
    if fam is None:
        return True
    return not any(contains_pattern(g, p) for p in fam.patterns)


# -- cycles -------------------------------------------------------------------

def _blocks(g: ColoredGraph, length: int):
    """Biconnected blocks that can host a cycle of the given length."""
    nxg = nx.Graph()
    nxg.add_edges_from(g.edges())
    for comp in nx.biconnected_components(nxg):
        if len(comp) < length:
            continue
        sub = nxg.subgraph(comp)
        if length % 2 == 1 and nx.is_bipartite(sub):
            continue
        yield sorted(comp)


def cycle_edge_set(g: ColoredGraph, length: int) -> set[tuple[int, int]]:
    """Edges of ``g`` on at least one cycle with exactly ``length`` edges; colors ignored.

    Every cycle lies inside one biconnected block, so each block is searched
    on its own.
    """
    if length < 3:
        raise ValueError("cycle length must be at least 3")
    adj = g.adjacency
    out: set[tuple[int, int]] = set()
    for verts in _blocks(g, length):
        index = {v: k for k, v in enumerate(verts)}
        local = []
        for v in verts:
            m = 0
            a = adj[v]
            for w in verts:
                if a >> w & 1:
                    m |= 1 << index[w]
            local.append(m)
        for a, b in kernels.cycle_edges(len(verts), local, length):
            u, v = verts[a], verts[b]
            out.add((u, v) if u < v else (v, u))
    return out


def cycle_witness(g: ColoredGraph, edge: tuple[int, int], length: int) -> list[int] | None:
    """A cycle ``[x0, ..., x_{L-1}]`` through ``edge`` (closing back to ``x0``), or None."""
    u, v = edge
    return kernels.witness_cycle(g.n, g.adjacency, u, v, length)


def coloring_is_valid(g: ColoredGraph, k: int) -> bool:
    """No blue edge lies on a cycle of length ``2k + 1``."""
    if k < 2:
        raise ValueError("k must be at least 2")
    blue = g.edges(BLUE)
    if not blue:
        return True
    cyc = cycle_edge_set(g, 2 * k + 1)
    return not any(e in cyc for e in blue)


# -- memoized keys of raw color tuples ----------------------------------------

_KEY_MEMO: dict[tuple[int, int, tuple[int, ...]], bytes] = {}
_KEY_MEMO_LIMIT = 2_000_000


def key_of_colors(n: int, colors: tuple[int, ...], nroot: int = 0) -> bytes:
    """Canonical key of the graph with these pair colors, vertices ``0..nroot-1`` rooted."""
    k = (n, nroot, colors)
    key = _KEY_MEMO.get(k)
    if key is None:
        if len(_KEY_MEMO) > _KEY_MEMO_LIMIT:
            _KEY_MEMO.clear()
        key = canonical_form(ColoredGraph(n, colors), tuple(range(nroot)))
        _KEY_MEMO[k] = key
    return key


def induced_colors(g: ColoredGraph, verts: Sequence[int]) -> tuple[int, ...]:
    n, cols = g.n, g.colors
    k = len(verts)
    return tuple(
        cols[pair_index(n, verts[a], verts[b])] for a in range(k) for b in range(a + 1, k)
    )
