"""Brute-force ground truth and closed forms for edges on odd cycles.

Graphs here are plain (every edge RED). ``F(n)`` is the least number of
edges on an ``L``-cycle over ``n``-vertex graphs with ``n^2/4 + 1`` edges.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from functools import lru_cache
from itertools import combinations
from math import comb
from typing import Sequence

import networkx as nx
import numpy as np

from .errors import CapacityError, ContractViolation
from .field import SQRT2, QSqrt2
from .graphs import RED, ColoredGraph, cycle_edge_set

__all__ = [
    "Quadruple",
    "ExtremalReport",
    "edge_budget",
    "construction_g1",
    "construction_g2",
    "default_quadruple",
    "block_edge_counts",
    "solve_nextremal_qp",
    "solve_nextremal_qp_exhaustive",
    "f_formula",
    "f_product_form",
    "f_mod6_table",
    "f_structural_form",
    "check_formulas",
    "long_cycle_part_sizes",
    "long_cycle_construction",
    "stability_optimizers",
    "bipartite_objective",
    "path_objective",
    "budget_classes",
    "brute_force_min",
    "brute_force_min_labeled",
    "duality_check",
    "truncate_to_budget",
    "MAX_ORACLE_VERTICES",
]

MAX_ORACLE_VERTICES = 9


def edge_budget(n: int) -> int:
    return n * n // 4 + 1


def _plain(n: int, edges) -> ColoredGraph:
    return ColoredGraph.from_edges(n, red=edges)


# -- constructions ------------------------------------------------------------------

def construction_g1(n: int) -> ColoredGraph:
    """Clique on ``(2n+4)//3`` vertices glued at one vertex to a balanced complete bipartite block.

    The bipartite block has ``(n+1)//3`` vertices; the shared vertex sits in
    its larger part. Vertices ``0..k-1`` form the clique.
    """
    if n < 5:
        raise ContractViolation("construction_g1 needs n >= 5")
    k = (2 * n + 4) // 3
    m = (n + 1) // 3
    if k + m - 1 != n:
        raise ContractViolation(f"block sizes {k} + {m} - 1 do not add up to {n}")
    edges = list(combinations(range(k), 2))
    big = (m + 1) // 2
    # shared vertex k-1, then the rest of the larger part, then the smaller part
    part1 = [k - 1] + list(range(k, k + big - 1))
    part2 = list(range(k + big - 1, n))
    edges += [(u, v) for u in part1 for v in part2]
    return _plain(n, edges)


def construction_g1_blocks(n: int) -> tuple[list[int], list[int], list[int]]:
    """Clique vertices and the two bipartite parts of :func:`construction_g1`."""
    k = (2 * n + 4) // 3
    m = (n + 1) // 3
    big = (m + 1) // 2
    return list(range(k)), [k - 1] + list(range(k, k + big - 1)), list(range(k + big - 1, n))


@dataclass(frozen=True)
class Quadruple:
    a: int
    b: int
    c: int
    d: int

    @property
    def n(self) -> int:
        return self.a + self.b + self.c + self.d

    def parts(self) -> tuple[range, range, range, range]:
        a, b, c = self.a, self.b, self.c
        return (range(0, a), range(a, a + b), range(a + b, a + b + c), range(a + b + c, self.n))


def construction_g2(n: int, q: Quadruple | None = None) -> ColoredGraph:
    """Blow-up of a path: joins A-B, B-C, C-D and a clique on D."""
    q = default_quadruple(n) if q is None else q
    if q.n != n or min(q.a, q.b, q.c, q.d) < 0:
        raise ContractViolation(f"quadruple {q} does not split {n} vertices")
    A, B, C, D = q.parts()
    edges = [(u, v) for u in A for v in B]
    edges += [(u, v) for u in B for v in C]
    edges += [(u, v) for u in C for v in D]
    edges += list(combinations(D, 2))
    return _plain(n, edges)


def block_edge_counts(q: Quadruple) -> dict[str, int]:
    return {"AB": q.a * q.b, "BC": q.b * q.c, "CD": q.c * q.d, "D": comb(q.d, 2)}


def default_quadruple(n: int) -> Quadruple:
    """Lexicographically first maximizer of the integer program."""
    sols = solve_nextremal_qp(n)
    if not sols:
        raise ContractViolation(f"integer program infeasible at n={n}")
    return sols[0]


# -- the integer program ---------------------------------------------------------------

@dataclass
class QPResult:
    n: int
    value: int
    quadruples: list[Quadruple]
    margins: list[Fraction]

    def __iter__(self):
        return iter(self.quadruples)

    def __len__(self):
        return len(self.quadruples)

    def __getitem__(self, i):
        return self.quadruples[i]


def _qp_feasible4(n: int, a: int, b: int, c: int) -> int:
    # 4 * (ab + bc + cd + C(d,2)) - n^2; feasible iff positive
    d = n - a - b - c
    return 4 * (a * b + b * c + c * d) + 2 * d * (d - 1) - n * n


def solve_nextremal_qp(n: int) -> QPResult:
    """All ``(a, b, c, d)`` maximizing ``a*b`` subject to ``ab + bc + cd + C(d,2) > n^2/4``.

    For fixed ``a, b`` the left side is a concave quadratic in ``c`` peaking
    at ``c = b`` or ``b + 1``, so feasibility of a pair is checked in O(1);
    the maximizing pairs are then expanded over every feasible ``c``.
    """
    if n < 5:
        raise ContractViolation("the integer program is stated for n >= 5")
    best = -1
    pairs: list[tuple[int, int]] = []
    bs = np.arange(n + 1, dtype=np.int64)
    for a in range(n + 1):
        b = bs[: n - a + 1]
        r = n - a - b
        ok = np.zeros(b.shape, dtype=bool)
        for c in (b, b + 1, np.zeros_like(b), r):
            cc = np.minimum(np.maximum(c, 0), r)
            d = r - cc
            val = 4 * (a * b + b * cc + cc * d) + 2 * d * (d - 1) - n * n
            ok |= val > 0
        if not ok.any():
            continue
        prod = np.where(ok, a * b, -1)
        top = int(prod.max())
        if top > best:
            best, pairs = top, []
        if top == best:
            pairs += [(a, int(x)) for x in b[prod == top]]
    quads, margins = [], []
    for a, b in sorted(pairs):
        for c in range(n - a - b + 1):
            v = _qp_feasible4(n, a, b, c)
            if v > 0:
                quads.append(Quadruple(a, b, c, n - a - b - c))
                margins.append(Fraction(v, 4))
    return QPResult(n, best, quads, margins)


def solve_nextremal_qp_exhaustive(n: int) -> QPResult:
    """Plain triple loop over ``(a, b, c)``; the reference for :func:`solve_nextremal_qp`."""
    best, quads, margins = -1, [], []
    for a in range(n + 1):
        for b in range(n - a + 1):
            for c in range(n - a - b + 1):
                v = _qp_feasible4(n, a, b, c)
                if v <= 0:
                    continue
                if a * b > best:
                    best, quads, margins = a * b, [], []
                if a * b == best:
                    quads.append(Quadruple(a, b, c, n - a - b - c))
                    margins.append(Fraction(v, 4))
    return QPResult(n, best, quads, margins)


# -- closed formulas -------------------------------------------------------------------------

def f_product_form(n: int) -> int:
    return n * n // 4 + 1 - ((n + 4) // 6) * ((n + 1) // 6)


_MOD6 = {0: (0, 18), 1: (1, 13), 2: (-1, 22), 3: (0, 18), 4: (1, 22), 5: (-1, 13)}


def f_mod6_table(n: int) -> Fraction:
    """``2n^2/9`` plus the residue-dependent correction (returned exactly)."""
    s, t = _MOD6[n % 6]
    return Fraction(4 * n * n + s * n + t, 18)


def long_cycle_part_sizes(n: int) -> tuple[int, int, int, int]:
    return (n - 2) // 6, (n + 1) // 6, 1, (2 * n + 1) // 3


def f_structural_form(n: int) -> int:
    a, b, _, _ = long_cycle_part_sizes(n)
    return n * n // 4 + 1 - (a + 1) * b


def f_formula(n: int) -> int:
    """``F_{2k+1}(n)``; raises if the three closed forms disagree."""
    if n < 1:
        raise ContractViolation("n must be positive")
    p = f_product_form(n)
    s, t = _MOD6[n % 6]
    num = 4 * n * n + s * n + t
    if num % 18 or num // 18 != p or f_structural_form(n) != p:
        raise ContractViolation(f"closed forms disagree at n={n}")
    return p


def check_formulas(n_max: int) -> bool:
    """Vectorized check of all three forms for ``1 <= n <= n_max``."""
    n = np.arange(1, n_max + 1, dtype=np.int64)
    prod = n * n // 4 + 1 - ((n + 4) // 6) * ((n + 1) // 6)
    r = n % 6
    s = np.array([_MOD6[i][0] for i in range(6)], dtype=np.int64)[r]
    t = np.array([_MOD6[i][1] for i in range(6)], dtype=np.int64)[r]
    num = 4 * n * n + s * n + t
    struct = n * n // 4 + 1 - ((n - 2) // 6 + 1) * ((n + 1) // 6)
    return bool(np.all(num % 18 == 0) and np.all(num // 18 == prod) and np.all(struct == prod))


# -- long odd cycles ------------------------------------------------------------------------------

def _removal_order(d: Sequence[int]) -> list[tuple[int, int]]:
    """Pairs of ``d`` in deletion order: a maximum matching, then the remaining
    consecutive pairs, then pairs at distance 2, 3, ..."""
    k = len(d)
    out = [(d[i], d[i + 1]) for i in range(0, k - 1, 2)]
    out += [(d[i], d[i + 1]) for i in range(1, k - 1, 2)]
    for step in range(2, k):
        out += [(d[i], d[i + step]) for i in range(k - step)]
    return out


def long_cycle_construction(n: int) -> tuple[ColoredGraph, dict[str, list[int]]]:
    """Partitioned graph with ``n^2/4 + 1`` edges and ``(|A|+1)|B|`` edges off every odd cycle.

    A and B are independent, ``A + C`` is completely joined to B, C is joined
    to all of D, and D is a clique minus as many edges as the budget needs
    (a maximum matching first).
    """
    if n < 7:
        raise ContractViolation("long_cycle_construction needs n >= 7")
    na, nb, nc, nd = long_cycle_part_sizes(n)
    if na + nb + nc + nd != n:
        raise ContractViolation(f"part sizes {na},{nb},{nc},{nd} do not add to {n}")
    A = list(range(na))
    B = list(range(na, na + nb))
    C = [na + nb]
    D = list(range(na + nb + 1, n))
    base = [(u, v) for u in A + C for v in B] + [(C[0], v) for v in D]
    need = edge_budget(n) - len(base)
    full = comb(nd, 2)
    drop = full - need
    if need < 0 or drop < 0:
        raise ContractViolation(f"edge budget unreachable at n={n}")
    removed = set(_removal_order(D)[:drop])
    edges = base + [e for e in combinations(D, 2) if e not in removed]
    g = _plain(n, edges)
    if g.num_edges() != edge_budget(n):
        raise ContractViolation("edge count does not match the budget")
    return g, {"A": A, "B": B, "C": C, "D": D}


# -- stability optimizers ------------------------------------------------------------------------

def bipartite_objective(a) -> Fraction:
    a = Fraction(a)
    return a * a + (1 - a) ** 2 / 2


def path_objective(a, b, c, d):
    return 2 * a * b + 2 * b * c + 2 * c * d + d * d


@dataclass
class StabilityRecord:
    bipartite_argmax: Fraction
    bipartite_value: Fraction
    bipartite_interval: tuple[Fraction, Fraction]
    path_argmax: tuple[QSqrt2, QSqrt2, QSqrt2, QSqrt2]
    path_value: QSqrt2
    path_constraint_tight: bool
    grid_step: Fraction
    grid_points: int
    grid_feasible: int
    grid_max: Fraction
    grid_argmax: tuple[Fraction, Fraction, Fraction, Fraction]

    def to_dict(self) -> dict:
        from .field import format_number

        def fmt(x):
            if isinstance(x, tuple):
                return [fmt(v) for v in x]
            return format_number(x) if isinstance(x, (QSqrt2, Fraction)) else x

        return {k: fmt(v) for k, v in asdict(self).items()}


def stability_optimizers(delta: Fraction = Fraction(1, 100), grid: int = 200) -> StabilityRecord:
    """Exact optima of the two small programs used in the stability arguments.

    ``a^2 + (1-a)^2/2`` is convex, so on ``[delta, 2/3]`` its maximum is at
    an endpoint. The path objective is evaluated exactly at its known
    maximizer and on every point of the ``1/grid`` lattice satisfying
    ``ab >= (2 - sqrt 2)/16`` and ``d >= delta/2``, in integer arithmetic.
    """
    delta = Fraction(delta)
    lo, hi = delta, Fraction(2, 3)
    candidates = [lo, hi, Fraction(1, 3)]
    vals = {a: bipartite_objective(a) for a in candidates if lo <= a <= hi}
    arg = max(vals, key=lambda a: vals[a])
    if sum(1 for v in vals.values() if v == vals[arg]) != 1:
        raise ContractViolation("bipartite objective maximum is not unique on the interval")

    point = (QSqrt2(Fraction(1, 2), Fraction(-1, 4)), QSqrt2(Fraction(1, 4)), QSqrt2(Fraction(1, 4)),
             QSqrt2(0, Fraction(1, 4)))
    a, b, c, d = point
    value = path_objective(a, b, c, d)
    bound = (2 - SQRT2) * Fraction(1, 16)
    tight = a * b == bound

    N = grid
    A = np.arange(N + 1, dtype=np.int64)
    best, best_pt, feasible = -1, None, 0
    for ia in range(N + 1):
        for ib in range(N + 1 - ia):
            # ab >= (2 - sqrt2)/16  <=>  x + sqrt2 * N^2 >= 0 with x = 16 ia ib - 2 N^2
            x = 16 * ia * ib - 2 * N * N
            if x < 0 and x * x > 2 * N ** 4:
                continue
            ic = A[: N + 1 - ia - ib]
            id_ = N - ia - ib - ic
            ok = 2 * id_ * delta.denominator >= delta.numerator * N
            if not ok.any():
                continue
            vals2 = 2 * ia * ib + 2 * ib * ic + 2 * ic * id_ + id_ * id_
            vals2 = np.where(ok, vals2, -1)
            feasible += int(ok.sum())
            j = int(vals2.argmax())
            if int(vals2[j]) > best:
                best = int(vals2[j])
                best_pt = (ia, ib, int(ic[j]), int(id_[j]))
    step = Fraction(1, N)
    return StabilityRecord(
        bipartite_argmax=arg,
        bipartite_value=vals[arg],
        bipartite_interval=(lo, hi),
        path_argmax=point,
        path_value=value,
        path_constraint_tight=tight,
        grid_step=step,
        grid_points=(N + 1) * (N + 2) * (N + 3) // 6,
        grid_feasible=feasible,
        grid_max=Fraction(best, N * N),
        grid_argmax=tuple(Fraction(v, N) for v in best_pt),
    )


# -- brute-force oracle -------------------------------------------------------------------------

@dataclass
class ExtremalReport:
    n: int
    L: int
    edge_budget: int
    min_cycle_edges: int
    witnesses: list[ColoredGraph]
    search_stats: dict = field(default_factory=dict)

    def to_tsv(self) -> str:
        head = [str(self.n), str(self.L), str(self.edge_budget), str(self.min_cycle_edges)]
        return "\t".join(head + [w.encode() for w in self.witnesses])

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "L": self.L,
            "edge_budget": self.edge_budget,
            "min_cycle_edges": self.min_cycle_edges,
            "witnesses": [w.encode() for w in self.witnesses],
            "search_stats": self.search_stats,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)


def _complement(g: ColoredGraph) -> ColoredGraph:
    return ColoredGraph(g.n, [0 if c else RED for c in g.colors])


@lru_cache(maxsize=None)
def budget_classes(n: int) -> tuple[tuple[ColoredGraph, ...], tuple[int, ...]]:
    """One plain graph per isomorphism class with exactly ``n^2/4 + 1`` edges.

    Complements are grown one edge at a time from the empty graph, keeping
    one representative per canonical key at each edge count; the complement
    side has only ``C(n,2) - budget`` edges, which keeps the levels small.
    Returns the graphs (sorted by canonical key) and the per-level class counts.
    """
    if n > MAX_ORACLE_VERTICES:
        raise CapacityError(f"oracle supports n <= {MAX_ORACLE_VERTICES}, got {n}")
    total = comb(n, 2)
    k = total - edge_budget(n)
    if k < 0:
        return (), ()
    level = {ColoredGraph(n, [0] * total).canonical_key(): ColoredGraph(n, [0] * total)}
    counts = [1]
    for _ in range(k):
        nxt: dict[bytes, ColoredGraph] = {}
        for g in level.values():
            cols = g.colors
            for idx, c in enumerate(cols):
                if c:
                    continue
                h = ColoredGraph(n, cols[:idx] + (RED,) + cols[idx + 1:])
                key = h.canonical_key()
                if key not in nxt:
                    nxt[key] = h
        level = nxt
        counts.append(len(level))
    graphs = [_complement(g) for g in level.values()]
    graphs.sort(key=lambda g: g.canonical_key())
    return tuple(graphs), tuple(counts)


def brute_force_min(n: int, L: int, max_witnesses: int = 5) -> ExtremalReport:
    """Exact minimum of ``|C_L(G)|`` over isomorphism classes with the edge budget."""
    if L not in (3, 5, 7, 9):
        raise ContractViolation("cycle length must be 3, 5, 7 or 9")
    if n < 1 or n > MAX_ORACLE_VERTICES:
        raise CapacityError(f"oracle supports 1 <= n <= {MAX_ORACLE_VERTICES}, got {n}")
    graphs, levels = budget_classes(n)
    best, wits = None, []
    for g in graphs:
        m = len(cycle_edge_set(g, L))
        if best is None or m < best:
            best, wits = m, [g]
        elif m == best:
            wits.append(g)
    if best is None:
        raise ContractViolation(f"no {n}-vertex graph has {edge_budget(n)} edges")
    stats = {"classes": len(graphs), "complement_levels": list(levels), "minimizers": len(wits)}
    return ExtremalReport(n, L, edge_budget(n), best, wits[:max_witnesses], stats)


def brute_force_min_labeled(n: int, L: int) -> int:
    """Minimum over all labeled edge sets of the budget size (small ``n`` only)."""
    if n > 7:
        raise CapacityError("labeled search is limited to n <= 7")
    pairs = list(combinations(range(n), 2))
    best = None
    for es in combinations(pairs, edge_budget(n)):
        m = len(cycle_edge_set(_plain(n, es), L))
        if best is None or m < best:
            best = m
    return best


def _noncycle_edges_nx(g: ColoredGraph, L: int) -> int:
    G = nx.Graph()
    G.add_nodes_from(range(g.n))
    G.add_edges_from(g.edges())
    on = set()
    for cyc in nx.simple_cycles(G, length_bound=L):
        if len(cyc) == L:
            for u, v in zip(cyc, cyc[1:] + cyc[:1]):
                on.add((min(u, v), max(u, v)))
    return G.number_of_edges() - len(on)


def duality_check(report: ExtremalReport) -> bool:
    """Max edges off every ``L``-cycle equals ``budget - min`` over the same classes.

    The maximum is computed twice: with the package's cycle search and with
    networkx's bounded cycle enumeration.
    """
    graphs, _ = budget_classes(report.n)
    first = max(g.num_edges() - len(cycle_edge_set(g, report.L)) for g in graphs)
    second = max(_noncycle_edges_nx(g, report.L) for g in graphs)
    return first == second == report.edge_budget - report.min_cycle_edges


def truncate_to_budget(g: ColoredGraph, L: int) -> ColoredGraph:
    """Drop surplus edges, cycle edges first, to reach exactly ``n^2/4 + 1`` edges.

    Deleting edges never adds cycles, so ``|C_L|`` can only go down.
    """
    extra = g.num_edges() - edge_budget(g.n)
    if extra < 0:
        raise ContractViolation("graph has fewer edges than the budget")
    cyc = sorted(cycle_edge_set(g, L))
    rest = [e for e in g.edges() if e not in set(cyc)]
    drop = set((cyc + rest)[:extra])
    return _plain(g.n, [e for e in g.edges() if e not in drop])

