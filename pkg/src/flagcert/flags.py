"""Flag-algebra machinery over red/blue-colored graphs.

Graphs and flags are identified by canonical keys (see
:func:`flagcert.graphs.canonical_form`). Linear combinations are
:class:`GraphCombo` objects with exact coefficients in Q[sqrt 2].
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from itertools import combinations, permutations
from math import comb, perm
from typing import Iterable, Mapping, Sequence

from .enumeration import enumerate_colored_graphs
from .errors import ContractViolation
from .field import ZERO, QSqrt2, as_qsqrt2
from .graphs import (
    BLACK,
    BLUE,
    NONE,
    RED,
    ColoredGraph,
    ForbiddenFamily,
    PatternGraph,
    canonical_form,
    get_family,
    induced_colors,
    key_of_colors,
)
from .linalg import SymMatrix

__all__ = [
    "TypeSigma",
    "Flag",
    "FlagBasis",
    "GraphCombo",
    "LAMBDA",
    "BETA",
    "RHO",
    "EMPTY_TYPE",
    "density",
    "pair_density",
    "split_density",
    "flag_density",
    "flag_product",
    "graph_product",
    "average_down",
    "extend_level",
    "flag_basis",
    "quadratic_form_expand",
    "expansion_counts",
    "subgraph_distribution",
]


def _fam(family) -> ForbiddenFamily | None:
    if family is None or isinstance(family, ForbiddenFamily):
        return family
    return get_family(family)


def _fam_name(family) -> str:
    f = _fam(family)
    return "NONE" if f is None else f.name


# -- types and flags ------------------------------------------------------------

@dataclass(frozen=True)
class TypeSigma:
    """A fully labeled graph; label ``i+1`` is vertex ``i``."""

    name: str
    graph: ColoredGraph

    @property
    def size(self) -> int:
        return self.graph.n


EMPTY_TYPE = TypeSigma("empty", ColoredGraph(0, ()))
VERTEX_TYPE = TypeSigma("vertex", ColoredGraph(1, ()))
LAMBDA = TypeSigma("lambda", ColoredGraph(2, (NONE,)))
BETA = TypeSigma("beta", ColoredGraph(2, (BLUE,)))
RHO = TypeSigma("rho", ColoredGraph(2, (RED,)))
TYPES = {t.name: t for t in (EMPTY_TYPE, VERTEX_TYPE, LAMBDA, BETA, RHO)}


class Flag:
    """Colored graph with an embedded, labeled copy of a type.

    ``root[i]`` is the vertex carrying label ``i+1``.
    """

    __slots__ = ("graph", "root", "_key")

    def __init__(self, graph: ColoredGraph, root: Sequence[int]):
        root = tuple(root)
        if len(set(root)) != len(root) or any(not 0 <= v < graph.n for v in root):
            raise ContractViolation(f"invalid root {root} for a {graph.n}-vertex graph")
        self.graph = graph
        self.root = root
        self._key = None

    @property
    def n(self) -> int:
        return self.graph.n

    @property
    def sigma_graph(self) -> ColoredGraph:
        return self.graph.induced(self.root)

    def is_sigma_flag(self, sigma: TypeSigma) -> bool:
        return self.sigma_graph == sigma.graph

    @property
    def key(self) -> bytes:
        if self._key is None:
            self._key = canonical_form(self.graph, self.root)
        return self._key

    @classmethod
    def from_key(cls, key: bytes) -> Flag:
        n = key[0]
        if len(key) == 1 + n * (n - 1) // 2:
            # empty-type flags carry plain unrooted keys
            f = cls(ColoredGraph(n, key[1:]), ())
        else:
            f = cls(ColoredGraph(n, key[2:]), tuple(range(key[1])))
        f._key = key
        return f

    def dump(self) -> str:
        return f"{self.graph.encode()}|{' '.join(map(str, self.root))}"

    @classmethod
    def parse(cls, text: str) -> Flag:
        g, _, r = text.partition("|")
        return cls(ColoredGraph.decode(g), [int(x) for x in r.split()])

    def __eq__(self, other):
        if not isinstance(other, Flag):
            return NotImplemented
        return self.key == other.key

    def __hash__(self):
        return hash(self.key)

    def __repr__(self) -> str:
        return f"Flag({self.dump()!r})"


def _flag_key(n: int, s: int, colors: tuple[int, ...]) -> bytes:
    if s == 0:
        return key_of_colors(n, colors)
    return key_of_colors(n, colors, s)


@dataclass
class FlagBasis:
    sigma: TypeSigma
    size: int
    family: str
    flags: list[Flag]
    index: dict[bytes, int] = field(default_factory=dict, repr=False)

    def __post_init__(self):
        self.index = {f.key: i for i, f in enumerate(self.flags)}

    def __len__(self) -> int:
        return len(self.flags)

    def __iter__(self):
        return iter(self.flags)

    def __getitem__(self, i: int) -> Flag:
        return self.flags[i]

    def position(self, flag: Flag) -> int:
        return self.index[flag.key]

    def dump(self) -> str:
        return "\n".join(f.dump() for f in self.flags)

    def digest(self) -> str:
        h = hashlib.sha256()
        h.update(f"{self.sigma.name}:{self.size}:{self.family}\n".encode())
        h.update(self.dump().encode())
        return h.hexdigest()


@lru_cache(maxsize=None)
def _flag_basis(sigma: TypeSigma, size: int, family_name: str) -> FlagBasis:
    fam = get_family(family_name)
    s = sigma.size
    if size < s:
        raise ContractViolation(f"flag size {size} below type size {s}")
    found: dict[bytes, bytes] = {}
    for h in enumerate_colored_graphs(size, fam):
        hkey = h.canonical_key()
        for theta in permutations(range(size), s):
            if induced_colors(h, theta) != sigma.graph.colors:
                continue
            rest = [v for v in range(size) if v not in theta]
            key = _flag_key(size, s, induced_colors(h, list(theta) + rest))
            found.setdefault(key, hkey)
    ordered = sorted(found, key=lambda k: (found[k], k))
    return FlagBasis(sigma, size, family_name, [Flag.from_key(k) for k in ordered])


def flag_basis(sigma: TypeSigma, size: int, family=None) -> FlagBasis:
    """All ``size``-vertex family-free sigma-flags, one per root-preserving class.

    Ordered by (canonical key of the unlabeled graph, flag key).
    """
    return _flag_basis(sigma, size, _fam_name(family))


# -- linear combinations ---------------------------------------------------------

class GraphCombo:
    """Finite linear combination of graphs (or sigma-flags) of one vertex count."""

    __slots__ = ("level", "sigma", "terms")

    def __init__(self, level: int, terms: Mapping[bytes, object] | None = None, sigma: TypeSigma | None = None):
        self.level = level
        self.sigma = sigma
        self.terms: dict[bytes, QSqrt2] = {}
        for k, v in (terms or {}).items():
            v = as_qsqrt2(v)
            if v:
                self._check_key(k)
                self.terms[k] = self.terms.get(k, ZERO) + v

    def _check_key(self, k: bytes) -> None:
        if k[0] != self.level:
            raise ContractViolation(f"term on {k[0]} vertices in a level-{self.level} combination")

    @classmethod
    def of(cls, g: ColoredGraph, coeff=1) -> GraphCombo:
        return cls(g.n, {g.canonical_key(): coeff})

    @classmethod
    def of_flag(cls, f: Flag, sigma: TypeSigma, coeff=1) -> GraphCombo:
        return cls(f.n, {f.key: coeff}, sigma)

    def coefficient(self, key_or_graph) -> QSqrt2:
        if isinstance(key_or_graph, ColoredGraph):
            key_or_graph = key_or_graph.canonical_key()
        elif isinstance(key_or_graph, Flag):
            key_or_graph = key_or_graph.key
        return self.terms.get(key_or_graph, ZERO)

    def items(self):
        return sorted(self.terms.items())

    def graphs(self) -> list[tuple[ColoredGraph, QSqrt2]]:
        return [(ColoredGraph(k[0], k[1:]), v) for k, v in self.items()]

    def __len__(self) -> int:
        return len(self.terms)

    def __bool__(self) -> bool:
        return bool(self.terms)

    def _compatible(self, other: GraphCombo) -> None:
        if self.level != other.level or self.sigma != other.sigma:
            raise ContractViolation("combinations live at different levels or types")

    def __add__(self, other: GraphCombo) -> GraphCombo:
        self._compatible(other)
        out = dict(self.terms)
        for k, v in other.terms.items():
            out[k] = out.get(k, ZERO) + v
        return GraphCombo(self.level, {k: v for k, v in out.items() if v}, self.sigma)

    def __neg__(self) -> GraphCombo:
        return self.scale(-1)

    def __sub__(self, other: GraphCombo) -> GraphCombo:
        return self + (-other)

    def scale(self, c) -> GraphCombo:
        c = as_qsqrt2(c)
        return GraphCombo(self.level, {k: c * v for k, v in self.terms.items()}, self.sigma)

    __rmul__ = scale

    def __eq__(self, other):
        if not isinstance(other, GraphCombo):
            return NotImplemented
        return self.level == other.level and self.sigma == other.sigma and self.terms == other.terms

    def sum_of_coefficients(self) -> QSqrt2:
        return sum(self.terms.values(), ZERO)

    def evaluate(self, g: ColoredGraph) -> QSqrt2:
        """Value of the unrooted combination on the densities of ``g``."""
        if self.sigma is not None:
            raise ContractViolation("evaluate() needs an unrooted combination")
        if not self.terms:
            return ZERO
        dist = subgraph_distribution(g, self.level)
        total = comb(g.n, self.level)
        return sum((v * Fraction(dist.get(k, 0), total) for k, v in self.terms.items()), ZERO)

    def __repr__(self) -> str:
        tag = f", sigma={self.sigma.name}" if self.sigma else ""
        return f"GraphCombo(level={self.level}, terms={len(self.terms)}{tag})"


# -- densities -------------------------------------------------------------------

def subgraph_distribution(g: ColoredGraph, k: int) -> dict[bytes, int]:
    """Counts of canonical keys over all ``k``-subsets of ``V(g)``."""
    return dict(_subgraph_distribution(g, k))


@lru_cache(maxsize=50_000)
def _subgraph_distribution(g: ColoredGraph, k: int) -> tuple[tuple[bytes, int], ...]:
    counts: dict[bytes, int] = {}
    if 0 <= k <= g.n:
        for sub in combinations(range(g.n), k):
            key = key_of_colors(k, induced_colors(g, sub))
            counts[key] = counts.get(key, 0) + 1
    return tuple(counts.items())


def _pattern_keys(f: ColoredGraph) -> frozenset[bytes]:
    if isinstance(f, PatternGraph) or BLACK in f.colors:
        pf = f if isinstance(f, PatternGraph) else PatternGraph(f.n, f.colors)
        return frozenset(h.canonical_key() for h in pf.recolorings())
    return frozenset((f.canonical_key(),))


def density(f: ColoredGraph, g: ColoredGraph) -> Fraction:
    """Probability that a uniform ``v(f)``-subset of ``g`` induces a copy of ``f``.

    BLACK edges of a pattern ``f`` match RED or BLUE.
    """
    if f.n > g.n:
        return Fraction(0)
    targets = _pattern_keys(f)
    dist = _subgraph_distribution(g, f.n)
    hits = sum(c for k, c in dist if k in targets)
    return Fraction(hits, comb(g.n, f.n))


def split_density(f1: ColoredGraph, f2: ColoredGraph, h: ColoredGraph) -> Fraction:
    """Probability that disjoint uniform subsets of sizes ``v(f1)``, ``v(f2)`` induce ``f1``, ``f2``."""
    a, b, n = f1.n, f2.n, h.n
    if a + b > n:
        return Fraction(0)
    k1, k2 = f1.canonical_key(), f2.canonical_key()
    hits = 0
    for s1 in combinations(range(n), a):
        if key_of_colors(a, induced_colors(h, s1)) != k1:
            continue
        rest = [v for v in range(n) if v not in s1]
        for s2 in combinations(rest, b):
            if key_of_colors(b, induced_colors(h, s2)) == k2:
                hits += 1
    return Fraction(hits, comb(n, a) * comb(n - a, b))


def pair_density(f1: ColoredGraph, f2: ColoredGraph, h: ColoredGraph) -> Fraction:
    """``p(f1, f2; h)`` for ``v(f1) + v(f2) = v(h)``."""
    if f1.n + f2.n != h.n:
        raise ContractViolation(f"pair_density needs v(f1)+v(f2)=v(h), got {f1.n}+{f2.n} vs {h.n}")
    return split_density(f1, f2, h)


def _same_type(f: Flag, g: Flag) -> None:
    if len(f.root) != len(g.root) or f.sigma_graph != g.sigma_graph:
        raise ContractViolation("flags are rooted on different types")


def flag_density(f: Flag, big: Flag) -> Fraction:
    """Probability that ``root + random (v(f)-s)-subset`` of ``big`` is isomorphic to ``f``."""
    _same_type(f, big)
    s = len(f.root)
    if f.n > big.n:
        raise ContractViolation("flag larger than host flag")
    others = [v for v in range(big.n) if v not in big.root]
    k = f.n - s
    target = f.key
    hits = 0
    for sub in combinations(others, k):
        key = _flag_key(f.n, s, induced_colors(big.graph, list(big.root) + list(sub)))
        if key == target:
            hits += 1
    return Fraction(hits, comb(len(others), k))


def _flag_split_density(f1: Flag, f2: Flag, host: Flag) -> Fraction:
    s = len(host.root)
    others = [v for v in range(host.n) if v not in host.root]
    a = f1.n - s
    k1, k2 = f1.key, f2.key
    root = list(host.root)
    hits = 0
    for s1 in combinations(others, a):
        if _flag_key(f1.n, s, induced_colors(host.graph, root + list(s1))) != k1:
            continue
        s2 = [v for v in others if v not in s1]
        if _flag_key(f2.n, s, induced_colors(host.graph, root + s2)) == k2:
            hits += 1
    return Fraction(hits, comb(len(others), a))


def flag_product(f1: Flag, f2: Flag, family=None, sigma: TypeSigma | None = None) -> GraphCombo:
    """``f1 x f2`` expanded over the flag basis of size ``v(f1) + v(f2) - s``.

    Flags outside the family are dropped.
    """
    _same_type(f1, f2)
    s = len(f1.root)
    if sigma is None:
        sigma = TypeSigma(f"type{s}", f1.sigma_graph)
    elif sigma.graph != f1.sigma_graph:
        raise ContractViolation("flags are not rooted on the given type")
    level = f1.n + f2.n - s
    basis = flag_basis(sigma, level, family)
    terms = {}
    for host in basis:
        p = _flag_split_density(f1, f2, host)
        if p:
            terms[host.key] = p
    return GraphCombo(level, terms, None if s == 0 else sigma)


def graph_product(g1: ColoredGraph, g2: ColoredGraph, family=None) -> GraphCombo:
    """Unrooted product ``g1 x g2`` on ``v(g1) + v(g2)`` vertices."""
    level = g1.n + g2.n
    terms = {}
    for h in enumerate_colored_graphs(level, _fam(family)):
        p = split_density(g1, g2, h)
        if p:
            terms[h.canonical_key()] = p
    return GraphCombo(level, terms)


def average_down(f: Flag) -> tuple[Fraction, ColoredGraph]:
    """Coefficient and underlying graph of the averaging operator applied to ``f``."""
    s = len(f.root)
    n = f.n
    target = f.key
    sig = f.sigma_graph.colors
    hits = 0
    for theta in permutations(range(n), s):
        if induced_colors(f.graph, theta) != sig:
            continue
        rest = [v for v in range(n) if v not in theta]
        if _flag_key(n, s, induced_colors(f.graph, list(theta) + rest)) == target:
            hits += 1
    return Fraction(hits, perm(n, s)), f.graph.canonical()


def extend_level(c: GraphCombo, target_level: int, family=None) -> GraphCombo:
    """Rewrite ``c`` at a higher level through the chain relation.

    Each term ``H`` becomes ``sum_{H'} p(H, H') H'`` over family-free ``H'``
    with ``target_level`` vertices.
    """
    if target_level < c.level:
        raise ContractViolation(f"cannot extend level {c.level} down to {target_level}")
    if target_level == c.level or not c.terms:
        return GraphCombo(target_level, c.terms, c.sigma) if target_level == c.level else GraphCombo(target_level, sigma=c.sigma)
    fam = _fam(family)
    if c.sigma is not None:
        basis = flag_basis(c.sigma, target_level, fam)
        terms = {}
        small = {k: Flag.from_key(k) for k in c.terms}
        for host in basis:
            acc = ZERO
            for k, v in c.terms.items():
                p = flag_density(small[k], host)
                if p:
                    acc = acc + v * p
            if acc:
                terms[host.key] = acc
        return GraphCombo(target_level, terms, c.sigma)
    terms = {}
    total = comb(target_level, c.level)
    for h in enumerate_colored_graphs(target_level, fam):
        dist = _subgraph_distribution(h, c.level)
        acc = ZERO
        for k, cnt in dist:
            v = c.terms.get(k)
            if v is not None:
                acc = acc + v * Fraction(cnt, total)
        if acc:
            terms[h.canonical_key()] = acc
    return GraphCombo(target_level, terms)


# -- quadratic forms --------------------------------------------------------------

@dataclass
class ExpansionCounts:
    """Per-graph split counts behind the averaged quadratic form of a flag basis.

    ``counts[h][(i, j)]`` is the number of (injective root map, ordered
    split) pairs of ``h`` that produce basis flags ``i`` and ``j``;
    ``normalizer`` is the total number of such pairs.
    """

    sigma: TypeSigma
    basis: FlagBasis
    level: int
    graphs: list[ColoredGraph]
    counts: list[dict[tuple[int, int], int]]
    normalizer: int


@lru_cache(maxsize=None)
def _expansion_counts(sigma: TypeSigma, size: int, family_name: str) -> ExpansionCounts:
    fam = get_family(family_name)
    basis = flag_basis(sigma, size, fam)
    s = sigma.size
    level = 2 * size - s
    half = size - s
    graphs = enumerate_colored_graphs(level, fam)
    index = basis.index
    sig = sigma.graph.colors
    normalizer = perm(level, s) * comb(level - s, half)
    all_counts = []
    for h in graphs:
        counts: dict[tuple[int, int], int] = {}
        for theta in permutations(range(level), s):
            if induced_colors(h, theta) != sig:
                continue
            root = list(theta)
            others = [v for v in range(level) if v not in theta]
            for s1 in combinations(others, half):
                s2 = [v for v in others if v not in s1]
                i = index[_flag_key(size, s, induced_colors(h, root + list(s1)))]
                j = index[_flag_key(size, s, induced_colors(h, root + s2))]
                counts[(i, j)] = counts.get((i, j), 0) + 1
        all_counts.append(counts)
    return ExpansionCounts(sigma, basis, level, graphs, all_counts, normalizer)


def expansion_counts(sigma: TypeSigma, size: int, family=None) -> ExpansionCounts:
    return _expansion_counts(sigma, size, _fam_name(family))


def quadratic_form_expand(sigma: TypeSigma, basis: FlagBasis, q, family=None) -> GraphCombo:
    """Expand the averaged quadratic form of ``q`` over ``basis`` into unrooted graphs.

    The coefficient of a graph ``H`` on ``2*size - s`` vertices is
    ``sum_ij q_ij`` times the probability that a uniform injective label map
    into ``H`` embeds ``sigma`` and a uniform split of the remaining
    vertices yields flags ``i`` and ``j``.
    """
    rows = q.rows if isinstance(q, SymMatrix) else [[as_qsqrt2(x) for x in r] for r in q]
    if len(rows) != len(basis) or any(len(r) != len(basis) for r in rows):
        raise ContractViolation(f"matrix is {len(rows)}x{len(rows[0]) if rows else 0}, basis has {len(basis)} flags")
    if basis.sigma != sigma:
        raise ContractViolation("basis is rooted on a different type")
    ec = expansion_counts(sigma, basis.size, basis.family if family is None else family)
    if ec.basis.flags != basis.flags:
        raise ContractViolation("basis does not match the family's generated basis")
    terms = {}
    for h, counts in zip(ec.graphs, ec.counts):
        acc = ZERO
        for (i, j), c in counts.items():
            x = rows[i][j]
            if x:
                acc = acc + x * c
        if acc:
            terms[h.canonical_key()] = acc * Fraction(1, ec.normalizer)
    return GraphCombo(ec.level, terms)


def combo_from_graphs(level: int, items: Iterable[tuple[ColoredGraph, object]]) -> GraphCombo:
    terms: dict[bytes, QSqrt2] = {}
    for g, c in items:
        if g.n != level:
            raise ContractViolation(f"graph on {g.n} vertices in a level-{level} combination")
        k = g.canonical_key()
        terms[k] = terms.get(k, ZERO) + as_qsqrt2(c)
    return GraphCombo(level, terms)
