"""Sum-of-squares certificates for the red-density bounds in the C5 and C7 problems.

A certificate asserts the exact level-6 identity

    target = sum_blocks [[v^T Q v]]_sigma + sum_slack c * D x g1 x g2 + sum_H c_H H

where ``D = red + blue - nonedge`` (nonnegative on graphs with more than
``n^2/4`` edges), every ``Q`` is PSD and every ``c`` is nonnegative.
"""

from __future__ import annotations

import hashlib
import random
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from itertools import combinations
from typing import Iterable, Sequence

from .enumeration import enumerate_colored_graphs
from .errors import CertificateSyntaxError, ContractViolation, RoundingError
from .field import ONE, SQRT2, ZERO, QSqrt2, as_qsqrt2, format_number, parse_number
from .flags import (
    BETA,
    LAMBDA,
    RHO,
    FlagBasis,
    GraphCombo,
    TypeSigma,
    expansion_counts,
    extend_level,
    flag_basis,
    graph_product,
    quadratic_form_expand,
    subgraph_distribution,
)
from .graphs import (
    BLUE,
    NONE,
    RED,
    ColoredGraph,
    contains_pattern,
    get_family,
    induced_colors,
    key_of_colors,
    named_pattern,
)
from .linalg import SymMatrix, psd_check

__all__ = [
    "PROBLEMS",
    "LEVEL",
    "Block",
    "SlackTerm",
    "Certificate",
    "VerificationReport",
    "target_expression",
    "target_expression_by_level3",
    "parse_certificate",
    "emit_certificate",
    "verify",
    "side_condition_graphs",
    "side_condition_graphs_by_density",
    "slack_expansion",
    "basis_hash",
    "export_sdp",
    "default_slack_multipliers",
    "round_solution",
    "synthetic_certificate",
    "shape_colorings",
    "perturbable_entries",
    "perturb",
    "expand_certificate",
]

LEVEL = 6
FLAG_SIZE = 4
PROBLEMS = {"C5": "FC5", "C7": "FC7"}
BLOCK_TYPES: dict[str, TypeSigma] = {"lambda": LAMBDA, "beta": BETA, "rho": RHO}
SIDE_PATTERNS = {"C5": ("P5", "C4X"), "C7": ("P4",)}

RED_TRIANGLE = ColoredGraph(3, (RED, RED, RED))
RED_EDGE = ColoredGraph(2, (RED,))
BLUE_EDGE = ColoredGraph(2, (BLUE,))
NON_EDGE = ColoredGraph(2, (NONE,))
VERTEX = ColoredGraph(1, ())
UNIT = ColoredGraph(0, ())


def _family(problem: str):
    try:
        return get_family(PROBLEMS[problem])
    except KeyError:
        raise ContractViolation(f"unknown problem {problem!r}; expected C5 or C7") from None


def _edge_multiplier(problem: str) -> tuple[int, QSqrt2]:
    # triangle x (a * red edge - b * vertex)
    if problem == "C5":
        return 8, QSqrt2(2, 1)
    if problem == "C7":
        return 9, QSqrt2(4)
    raise ContractViolation(f"unknown problem {problem!r}; expected C5 or C7")


# -- targets -----------------------------------------------------------------------

@lru_cache(maxsize=None)
def target_expression(problem: str) -> GraphCombo:
    """``red triangle x (a * red edge - b * vertex)`` expanded to six vertices.

    C5 uses ``a = 8``, ``b = 2 + sqrt 2``; C7 uses ``a = 9``, ``b = 4``.
    """
    fam = _family(problem)
    a, b = _edge_multiplier(problem)
    with_edge = extend_level(graph_product(RED_TRIANGLE, RED_EDGE, fam), LEVEL, fam)
    with_vertex = extend_level(graph_product(RED_TRIANGLE, VERTEX, fam), LEVEL, fam)
    return with_edge.scale(a) - with_vertex.scale(b)


def target_expression_by_level3(problem: str) -> GraphCombo:
    """Same target, computed by lifting the multiplier to three vertices first."""
    fam = _family(problem)
    a, b = _edge_multiplier(problem)
    mult3 = extend_level(GraphCombo.of(RED_EDGE, a), 3, fam) - extend_level(GraphCombo.of(VERTEX, b), 3, fam)
    total = GraphCombo(LEVEL)
    for key, coeff in mult3.items():
        h = ColoredGraph(key[0], key[1:])
        total = total + graph_product(RED_TRIANGLE, h, fam).scale(coeff)
    return total


# -- certificate objects --------------------------------------------------------------

@dataclass
class Block:
    name: str
    matrix: SymMatrix

    @property
    def sigma(self) -> TypeSigma:
        return BLOCK_TYPES[self.name]


@dataclass(frozen=True)
class SlackTerm:
    """``coeff * (red + blue - nonedge) x g1 x g2``; ``g2`` may be the empty graph."""

    coeff: QSqrt2
    g1: ColoredGraph
    g2: ColoredGraph = UNIT


@dataclass
class Certificate:
    problem: str
    blocks: list[Block]
    slack_terms: list[SlackTerm] = field(default_factory=list)
    c: dict[bytes, QSqrt2] = field(default_factory=dict)
    target: GraphCombo | None = None

    @property
    def family(self):
        return _family(self.problem)

    def resolved_target(self) -> GraphCombo:
        return self.target if self.target is not None else target_expression(self.problem)

    def block(self, name: str) -> Block:
        for b in self.blocks:
            if b.name == name:
                return b
        raise KeyError(name)


@dataclass
class VerificationReport:
    identity_ok: bool
    psd_ok: bool
    side_conditions_ok: bool
    diff: GraphCombo
    violations: list[tuple[str, str]]
    target_is_problem: bool = True

    @property
    def ok(self) -> bool:
        return self.identity_ok and self.psd_ok and self.side_conditions_ok

    def to_dict(self) -> dict:
        return {
            "identity_ok": self.identity_ok,
            "psd_ok": self.psd_ok,
            "side_conditions_ok": self.side_conditions_ok,
            "target_is_problem": self.target_is_problem,
            "residual": [
                [ColoredGraph(k[0], k[1:]).encode(), format_number(v)] for k, v in self.diff.items()
            ],
            "violations": [list(v) for v in self.violations],
        }


def basis_hash(problem: str) -> str:
    fam = _family(problem)
    h = hashlib.sha256()
    for name, sigma in BLOCK_TYPES.items():
        h.update(f"{name}\n".encode())
        h.update(flag_basis(sigma, FLAG_SIZE, fam).dump().encode())
        h.update(b"\n")
    return h.hexdigest()


def _bases(problem: str) -> dict[str, FlagBasis]:
    fam = _family(problem)
    return {name: flag_basis(sigma, FLAG_SIZE, fam) for name, sigma in BLOCK_TYPES.items()}


# -- slack terms -----------------------------------------------------------------------

_D_SIGN = {RED: 1, BLUE: 1, NONE: -1}


@lru_cache(maxsize=4096)
def _slack_vector(g1_key: bytes, g2_key: bytes, family_name: str) -> tuple[tuple[bytes, Fraction], ...]:
    n1, n2 = g1_key[0], g2_key[0]
    if 2 + n1 + n2 > LEVEL:
        raise ContractViolation(f"slack term needs {2 + n1 + n2} vertices, more than {LEVEL}")
    fam = get_family(family_name)
    out = []
    for h in enumerate_colored_graphs(LEVEL, fam):
        hits = 0
        total = 0
        for pair in combinations(range(LEVEL), 2):
            sgn = _D_SIGN[h.color(*pair)]
            rest = [v for v in range(LEVEL) if v not in pair]
            for s1 in combinations(rest, n1):
                ok1 = key_of_colors(n1, induced_colors(h, s1)) == g1_key
                rest2 = [v for v in rest if v not in s1]
                for s2 in combinations(rest2, n2):
                    total += 1
                    if ok1 and key_of_colors(n2, induced_colors(h, s2)) == g2_key:
                        hits += sgn
        if hits:
            out.append((h.canonical_key(), Fraction(hits, total)))
    return tuple(out)


def slack_expansion(g1: ColoredGraph, g2: ColoredGraph, problem: str) -> GraphCombo:
    """``(red + blue - nonedge) x g1 x g2`` expanded to six vertices in the problem's family."""
    fam = _family(problem)
    return GraphCombo(LEVEL, dict(_slack_vector(g1.canonical_key(), g2.canonical_key(), fam.name)))


def default_slack_multipliers(problem: str) -> list[tuple[ColoredGraph, ColoredGraph]]:
    """Every family-free four-vertex graph, paired with the empty graph."""
    return [(g, UNIT) for g in enumerate_colored_graphs(FLAG_SIZE, _family(problem))]


# -- side conditions ----------------------------------------------------------------------

@lru_cache(maxsize=None)
def side_condition_graphs(problem: str) -> frozenset[bytes]:
    """Level-6 graphs containing an induced copy of a side-condition shape (wildcard match)."""
    fam = _family(problem)
    shapes = [named_pattern(p) for p in SIDE_PATTERNS[problem]]
    return frozenset(
        h.canonical_key()
        for h in enumerate_colored_graphs(LEVEL, fam)
        if any(contains_pattern(h, p, induced=True) for p in shapes)
    )


@lru_cache(maxsize=None)
def side_condition_graphs_by_density(problem: str) -> frozenset[bytes]:
    """Same set, found by listing every red/blue coloring of each shape and scanning subsets."""
    fam = _family(problem)
    targets: dict[int, set[bytes]] = {}
    for name in SIDE_PATTERNS[problem]:
        p = named_pattern(name)
        targets.setdefault(p.n, set()).update(g.canonical_key() for g in p.recolorings())
    out = set()
    for h in enumerate_colored_graphs(LEVEL, fam):
        for k, keys in targets.items():
            if any(key in keys for key in subgraph_distribution(h, k)):
                out.add(h.canonical_key())
                break
    return frozenset(out)


def shape_colorings(name: str) -> list[ColoredGraph]:
    """Non-isomorphic red/blue colorings of a side-condition shape."""
    seen = {}
    for g in named_pattern(name).recolorings():
        seen.setdefault(g.canonical_key(), g)
    return [seen[k] for k in sorted(seen)]


# -- verification ------------------------------------------------------------------------

def expand_certificate(cert: Certificate) -> GraphCombo:
    """Left-hand side of the identity: squares plus slack plus ``c_H`` terms."""
    bases = _bases(cert.problem)
    total = GraphCombo(LEVEL)
    for b in sorted(cert.blocks, key=lambda b: b.name):
        total = total + quadratic_form_expand(b.sigma, bases[b.name], b.matrix, cert.family)
    for t in cert.slack_terms:
        total = total + slack_expansion(t.g1, t.g2, cert.problem).scale(t.coeff)
    total = total + GraphCombo(LEVEL, cert.c)
    return total


def verify(cert: Certificate) -> VerificationReport:
    violations: list[tuple[str, str]] = []
    bases = _bases(cert.problem)

    psd_ok = True
    for b in sorted(cert.blocks, key=lambda b: b.name):
        if b.matrix.dim != len(bases[b.name]):
            psd_ok = False
            violations.append((b.name, f"dimension {b.matrix.dim}, basis has {len(bases[b.name])}"))
            continue
        if b.matrix.factor is not None:
            core = b.matrix.factor[1]
            res = psd_check(core)
            if res.positive_definite:
                continue
        res = psd_check(b.matrix)
        if not res.is_psd:
            psd_ok = False
            violations.append((b.name, f"not PSD: {res.reason}"))

    for t in cert.slack_terms:
        if t.coeff.sign() < 0:
            violations.append((t.g1.encode(), "negative slack coefficient"))
    for k, v in sorted(cert.c.items()):
        if v.sign() < 0:
            violations.append((ColoredGraph(k[0], k[1:]).encode(), "negative c_H"))

    free = {g.canonical_key() for g in enumerate_colored_graphs(LEVEL, cert.family)}
    for k in sorted(cert.c):
        if k not in free:
            violations.append((ColoredGraph(k[0], k[1:]).encode(), "c_H on a graph outside the family"))

    target = cert.resolved_target()
    diff = target - expand_certificate(cert)
    identity_ok = not diff
    for k, v in diff.items():
        violations.append((ColoredGraph(k[0], k[1:]).encode(), f"residual {format_number(v)}"))

    side_ok = True
    for k in sorted(side_condition_graphs(cert.problem)):
        if cert.c.get(k, ZERO).sign() <= 0:
            side_ok = False
            violations.append((ColoredGraph(k[0], k[1:]).encode(), "side condition needs c_H > 0"))

    coeff_ok = all(t.coeff.sign() >= 0 for t in cert.slack_terms) and all(
        v.sign() >= 0 for v in cert.c.values()
    )
    return VerificationReport(
        identity_ok=identity_ok and coeff_ok and all(k in free for k in cert.c),
        psd_ok=psd_ok,
        side_conditions_ok=side_ok,
        diff=diff,
        violations=violations,
        target_is_problem=target == target_expression(cert.problem),
    )


# -- text format -----------------------------------------------------------------------------

def emit_certificate(cert: Certificate) -> str:
    out = [f"problem {cert.problem}", f"basis-hash {basis_hash(cert.problem)}"]
    for b in cert.blocks:
        m = b.matrix
        out.append(f"block {b.name} {m.dim}")
        if m.factor is not None:
            mm, core = m.factor
            out.append(f"factored {len(mm)} {m.dim}")
            out.extend(" ".join(format_number(x) for x in row) for row in mm)
            out.append(f"core {core.dim}")
            out.extend(" ".join(format_number(x) for x in row) for row in core.upper())
        else:
            out.append("dense")
            out.extend(" ".join(format_number(x) for x in row) for row in m.upper())
    for t in cert.slack_terms:
        out.append(f"slack {format_number(t.coeff)} {t.g1.encode()} {t.g2.encode()}")
    for k, v in sorted(cert.c.items()):
        out.append(f"c {ColoredGraph(k[0], k[1:]).encode()} {format_number(v)}")
    if cert.target is not None:
        for k, v in cert.target.items():
            out.append(f"target {ColoredGraph(k[0], k[1:]).encode()} {format_number(v)}")
    return "\n".join(out) + "\n"


class _Lines:
    def __init__(self, text: str):
        self.items = []
        for no, raw in enumerate(text.splitlines(), 1):
            line = raw.split("#", 1)[0].strip()
            if line:
                self.items.append((no, line.split()))
        self.pos = 0

    def peek(self):
        return self.items[self.pos] if self.pos < len(self.items) else (None, None)

    def next(self):
        item = self.peek()
        self.pos += 1
        return item

    def numbers(self, count: int, what: str) -> tuple[list[QSqrt2], int]:
        vals: list[QSqrt2] = []
        first = None
        while len(vals) < count:
            no, toks = self.peek()
            if toks is None or (toks[0][:1].isalpha() and not toks[0].startswith("r2")):
                if no is None and self.pos:
                    # ran off the end; blame the last line read
                    no = self.items[self.pos - 1][0]
                raise CertificateSyntaxError(f"{what}: expected {count} numbers, got {len(vals)}", no)
            self.pos += 1
            first = first or no
            for t in toks:
                try:
                    vals.append(parse_number(t))
                except ValueError as exc:
                    raise CertificateSyntaxError(str(exc), no) from None
        if len(vals) != count:
            raise CertificateSyntaxError(f"{what}: expected {count} numbers, got {len(vals)}", first)
        return vals, first


def _graph(tok: str, no: int) -> ColoredGraph:
    try:
        return ColoredGraph.decode(tok)
    except (ValueError, IndexError) as exc:
        raise CertificateSyntaxError(f"bad graph encoding {tok!r}: {exc}", no) from None


def _number(tok: str, no: int) -> QSqrt2:
    try:
        return parse_number(tok)
    except ValueError as exc:
        raise CertificateSyntaxError(str(exc), no) from None


def _int(tok: str, no: int) -> int:
    try:
        return int(tok)
    except ValueError:
        raise CertificateSyntaxError(f"expected an integer, got {tok!r}", no) from None


def parse_certificate(text: str, check_hash: bool = True) -> Certificate:
    """Parse the line-oriented certificate format.

    Raises :class:`CertificateSyntaxError` (with a line number) on malformed
    input, a basis-hash mismatch, or a negative coefficient.
    """
    lines = _Lines(text)
    no, toks = lines.next()
    if toks is None or toks[0] != "problem" or len(toks) != 2 or toks[1] not in PROBLEMS:
        raise CertificateSyntaxError("first line must be 'problem C5' or 'problem C7'", no)
    problem = toks[1]
    blocks: list[Block] = []
    slack: list[SlackTerm] = []
    c: dict[bytes, QSqrt2] = {}
    target_terms: dict[bytes, QSqrt2] = {}
    seen_hash = False
    bases = None
    while True:
        no, toks = lines.next()
        if toks is None:
            break
        kw = toks[0]
        if kw == "basis-hash":
            if len(toks) != 2:
                raise CertificateSyntaxError("basis-hash takes one argument", no)
            if check_hash and toks[1] != basis_hash(problem):
                raise CertificateSyntaxError("basis hash does not match the generated flag bases", no)
            seen_hash = True
        elif kw == "block":
            if len(toks) != 3 or toks[1] not in BLOCK_TYPES:
                raise CertificateSyntaxError("expected 'block <lambda|beta|rho> <dim>'", no)
            name, dim = toks[1], _int(toks[2], no)
            if bases is None:
                bases = _bases(problem)
            if dim != len(bases[name]):
                raise CertificateSyntaxError(f"block {name} has dimension {len(bases[name])}, not {dim}", no)
            if any(b.name == name for b in blocks):
                raise CertificateSyntaxError(f"duplicate block {name}", no)
            no2, kind = lines.next()
            if kind is None:
                raise CertificateSyntaxError("block body missing", no)
            if kind[0] == "dense" and len(kind) == 1:
                vals, _ = lines.numbers(dim * (dim + 1) // 2, f"block {name}")
                upper, pos = [], 0
                for i in range(dim):
                    upper.append(vals[pos:pos + dim - i])
                    pos += dim - i
                blocks.append(Block(name, SymMatrix.from_upper(dim, upper)))
            elif kind[0] == "factored" and len(kind) == 3:
                rows, cols = _int(kind[1], no2), _int(kind[2], no2)
                if cols != dim:
                    raise CertificateSyntaxError(f"factor has {cols} columns, block dimension is {dim}", no2)
                vals, _ = lines.numbers(rows * cols, f"factor of block {name}")
                mm = [vals[r * cols:(r + 1) * cols] for r in range(rows)]
                no3, core_t = lines.next()
                if core_t is None or core_t[0] != "core" or len(core_t) != 2 or _int(core_t[1], no3) != rows:
                    raise CertificateSyntaxError(f"expected 'core {rows}'", no3)
                cvals, _ = lines.numbers(rows * (rows + 1) // 2, f"core of block {name}")
                upper, pos = [], 0
                for i in range(rows):
                    upper.append(cvals[pos:pos + rows - i])
                    pos += rows - i
                blocks.append(Block(name, SymMatrix.factored(mm, SymMatrix.from_upper(rows, upper))))
            else:
                raise CertificateSyntaxError("expected 'dense' or 'factored <rows> <cols>'", no2)
        elif kw == "slack":
            if len(toks) not in (3, 4):
                raise CertificateSyntaxError("expected 'slack <coeff> <g1> [<g2>]'", no)
            coeff = _number(toks[1], no)
            if coeff.sign() < 0:
                raise CertificateSyntaxError(f"negative slack coefficient {toks[1]}", no)
            g1 = _graph(toks[2], no)
            g2 = _graph(toks[3], no) if len(toks) == 4 else UNIT
            if 2 + g1.n + g2.n > LEVEL:
                raise CertificateSyntaxError("slack term exceeds six vertices", no)
            slack.append(SlackTerm(coeff, g1, g2))
        elif kw in ("c", "target"):
            if len(toks) != 3:
                raise CertificateSyntaxError(f"expected '{kw} <graph> <coeff>'", no)
            g = _graph(toks[1], no)
            if g.n != LEVEL:
                raise CertificateSyntaxError(f"{kw} graph {toks[1]} must have {LEVEL} vertices", no)
            v = _number(toks[2], no)
            key = g.canonical_key()
            if kw == "c":
                if v.sign() < 0:
                    raise CertificateSyntaxError(f"negative c_H for graph {toks[1]}", no)
                c[key] = c.get(key, ZERO) + v
            else:
                target_terms[key] = target_terms.get(key, ZERO) + v
        else:
            raise CertificateSyntaxError(f"unknown keyword {kw!r}", no)
    if not seen_hash:
        raise CertificateSyntaxError("missing basis-hash line", None)
    target = GraphCombo(LEVEL, target_terms) if target_terms else None
    return Certificate(problem, blocks, slack, {k: v for k, v in c.items() if v}, target)


# -- SDP export ----------------------------------------------------------------------------------

def _float(x) -> str:
    return repr(float(x))


def export_sdp(problem: str, multipliers: Sequence[tuple[ColoredGraph, ColoredGraph]] | None = None) -> str:
    """Feasibility SDP in SDPA sparse format.

    One constraint per level-6 family-free graph. Blocks 1-3 are the
    lambda, beta, rho Gram matrices; block 4 is diagonal and holds the slack
    coefficients followed by the ``c_H`` variables. Target coefficients with
    an irrational part are written as double-precision approximations.
    """
    fam = _family(problem)
    graphs = enumerate_colored_graphs(LEVEL, fam)
    index = {g.canonical_key(): i for i, g in enumerate(graphs)}
    mult = default_slack_multipliers(problem) if multipliers is None else list(multipliers)
    target = target_expression(problem)
    nslack = len(mult)
    ndiag = nslack + len(graphs)
    names = list(BLOCK_TYPES)
    sizes = [len(flag_basis(BLOCK_TYPES[n], FLAG_SIZE, fam)) for n in names]

    out = [
        f'"flagcert feasibility SDP for {problem}; constraints follow the level-6 graph order below',
        f'"slack terms (block 4, entries 1..{nslack}): (red+blue-nonedge) x g1 x g2',
    ]
    for k, (g1, g2) in enumerate(mult, 1):
        out.append(f'"slack {k} {g1.encode()} {g2.encode()}')
    for k, g in enumerate(graphs, 1):
        out.append(f'"graph {k} {g.encode()}')
    out.append(str(len(graphs)))
    out.append(str(len(names) + 1))
    out.append(" ".join(str(s) for s in sizes) + f" -{ndiag}")
    out.append(" ".join(_float(target.coefficient(g.canonical_key())) for g in graphs))

    entries: list[list[str]] = [[] for _ in graphs]
    for blk, name in enumerate(names, 1):
        ec = expansion_counts(BLOCK_TYPES[name], FLAG_SIZE, fam)
        for h, counts in zip(ec.graphs, ec.counts):
            row = index[h.canonical_key()]
            merged: dict[tuple[int, int], int] = {}
            for (i, j), cnt in counts.items():
                a, b = (i, j) if i <= j else (j, i)
                merged[(a, b)] = merged.get((a, b), 0) + cnt
            for (i, j), cnt in sorted(merged.items()):
                v = Fraction(cnt, ec.normalizer) if i == j else Fraction(cnt, 2 * ec.normalizer)
                entries[row].append(f"{row + 1} {blk} {i + 1} {j + 1} {_float(v)}")
    diag = len(names) + 1
    for s, (g1, g2) in enumerate(mult, 1):
        for key, v in slack_expansion(g1, g2, problem).items():
            row = index[key]
            entries[row].append(f"{row + 1} {diag} {s} {s} {_float(v)}")
    for row in range(len(graphs)):
        entries[row].append(f"{row + 1} {diag} {nslack + row + 1} {nslack + row + 1} 1.0")
    for row in entries:
        out.extend(row)
    return "\n".join(out) + "\n"


# -- rounding ------------------------------------------------------------------------------------

def _round_value(x, bound: int) -> QSqrt2:
    if isinstance(x, (tuple, list)):
        p, q = x
        return QSqrt2(Fraction(p).limit_denominator(bound), Fraction(q).limit_denominator(bound))
    return QSqrt2(Fraction(x).limit_denominator(bound))


def round_solution(
    problem: str,
    blocks: dict[str, Sequence[Sequence]],
    slack: Sequence[float] = (),
    denominator_bound: int = 10**6,
    multipliers: Sequence[tuple[ColoredGraph, ColoredGraph]] | None = None,
    tolerance: float = 1e-9,
    strict: bool = True,
    target: GraphCombo | None = None,
) -> Certificate:
    """Round a floating solution into an exact certificate.

    Entries are floats or ``(p, q)`` pairs for ``p + q sqrt 2``. Each
    coordinate is replaced by its best rational approximation with
    denominator at most ``denominator_bound``; ``c_H`` is then recomputed
    exactly as the target minus everything else. Values of ``c_H`` in
    ``[-tolerance, 0)`` are set to zero, which leaves a residual that
    :func:`verify` reports. With ``strict=False`` negative values are kept
    as they are and left for :func:`verify` to flag.
    """
    bases = _bases(problem)
    mult = default_slack_multipliers(problem) if multipliers is None else list(multipliers)
    if len(slack) not in (0, len(mult)):
        raise ContractViolation(f"{len(slack)} slack values for {len(mult)} multipliers")
    out_blocks = []
    for name in BLOCK_TYPES:
        if name not in blocks:
            continue
        raw = blocks[name]
        dim = len(bases[name])
        if len(raw) != dim or any(len(r) != dim for r in raw):
            raise ContractViolation(f"block {name} must be {dim}x{dim}")
        rows = [[_round_value(raw[i][j] if i <= j else raw[j][i], denominator_bound) for j in range(dim)]
                for i in range(dim)]
        out_blocks.append(Block(name, SymMatrix(rows, check=False)))
    terms = []
    for (g1, g2), v in zip(mult, slack):
        coeff = _round_value(v, denominator_bound)
        if coeff.sign() < 0:
            if float(coeff) < -tolerance:
                raise RoundingError(f"slack coefficient {float(coeff):.3g} is negative; raise the denominator bound")
            coeff = ZERO
        if coeff:
            terms.append(SlackTerm(coeff, g1, g2))
    cert = Certificate(problem, out_blocks, terms, {}, target)
    rest = cert.resolved_target() - expand_certificate(cert)
    c = {}
    for k, v in rest.items():
        if v.sign() < 0 and strict:
            if float(v) < -tolerance:
                g = ColoredGraph(k[0], k[1:]).encode()
                raise RoundingError(
                    f"c_H for {g} is {float(v):.3g} < 0; try a larger denominator bound"
                )
            continue
        c[k] = v
    cert.c = c
    return cert


# -- synthetic certificates ----------------------------------------------------------------------

def synthetic_certificate(
    problem: str,
    seed: int = 0,
    rank: int = 2,
    factored: bool = True,
    n_slack: int = 2,
    irrational: bool = True,
) -> Certificate:
    """A valid certificate for a made-up target.

    Each block is a sum of ``rank`` squared integer linear forms, stored either
    densely or as ``W^T I W``; slack coefficients and every ``c_H`` are
    positive, and the target is defined as the resulting sum.
    """
    rng = random.Random(seed)
    fam = _family(problem)
    bases = _bases(problem)
    blocks = []
    for name in BLOCK_TYPES:
        dim = len(bases[name])
        w = [[Fraction(rng.randint(-3, 3)) for _ in range(dim)] for _ in range(rank)]
        core = SymMatrix.identity(rank)
        if irrational:
            core = SymMatrix([[ONE + SQRT2 if i == j else ZERO for j in range(rank)] for i in range(rank)], check=False)
        m = SymMatrix.factored(w, core)
        if not factored:
            m = SymMatrix(m.rows, check=False)
        blocks.append(Block(name, m))
    free4 = enumerate_colored_graphs(FLAG_SIZE, fam)
    terms = [
        SlackTerm(QSqrt2(Fraction(rng.randint(1, 9), rng.randint(1, 9))), free4[rng.randrange(len(free4))], UNIT)
        for _ in range(n_slack)
    ]
    c = {
        g.canonical_key(): QSqrt2(Fraction(rng.randint(1, 20), 1000))
        for g in enumerate_colored_graphs(LEVEL, fam)
    }
    cert = Certificate(problem, blocks, terms, c, None)
    cert.target = expand_certificate(cert)
    return cert


def perturbable_entries(cert: Certificate) -> Iterable[tuple[str, tuple]]:
    """Positions whose change always moves the expanded identity.

    Matrix entries ``(i, j)`` qualify when flags ``i`` and ``j`` co-occur in
    some family-free six-vertex graph.
    """
    fam = cert.family
    for b in cert.blocks:
        ec = expansion_counts(b.sigma, FLAG_SIZE, fam)
        pairs = set()
        for counts in ec.counts:
            for i, j in counts:
                pairs.add((min(i, j), max(i, j)))
        for ij in sorted(pairs):
            yield ("block", (b.name, ij))
    for s in range(len(cert.slack_terms)):
        yield ("slack", (s,))
    for k in sorted(cert.c):
        yield ("c", (k,))


def perturb(cert: Certificate, where: tuple[str, tuple], eps=Fraction(1, 10**6)) -> Certificate:
    """Copy of ``cert`` with one entry shifted by ``eps`` (the factored form is dropped)."""
    kind, pos = where
    blocks = [Block(b.name, b.matrix) for b in cert.blocks]
    slack = list(cert.slack_terms)
    c = dict(cert.c)
    if kind == "block":
        name, (i, j) = pos
        for b in blocks:
            if b.name == name:
                rows = [list(r) for r in b.matrix.rows]
                rows[i][j] = rows[i][j] + eps
                if i != j:
                    rows[j][i] = rows[j][i] + eps
                b.matrix = SymMatrix(rows, check=False)
    elif kind == "slack":
        (s,) = pos
        t = slack[s]
        slack[s] = SlackTerm(t.coeff + eps, t.g1, t.g2)
    elif kind == "c":
        (k,) = pos
        c[k] = c.get(k, ZERO) + eps
    else:
        raise ValueError(kind)
    return Certificate(cert.problem, blocks, slack, c, cert.target)

