"""Symmetric matrices over Q[sqrt 2] and exact positive-semidefiniteness checks."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import isqrt
from typing import Sequence

from .field import ONE, ZERO, QSqrt2, as_qsqrt2

__all__ = [
    "SymMatrix",
    "PSDResult",
    "psd_check",
    "factored_value",
    "quadratic_form",
]


class SymMatrix:
    """Dense symmetric matrix with optional factored form ``M^T H M``.

    When a factorization is present it is authoritative: ``rows`` is derived
    from it on construction.
    """

    __slots__ = ("dim", "rows", "factor")

    def __init__(self, rows: Sequence[Sequence], factor=None, check: bool = True):
        self.rows = [[as_qsqrt2(x) for x in r] for r in rows]
        self.dim = len(self.rows)
        self.factor = factor
        if check:
            for i, r in enumerate(self.rows):
                if len(r) != self.dim:
                    raise ValueError(f"row {i} has length {len(r)}, expected {self.dim}")
            for i in range(self.dim):
                for j in range(i):
                    if self.rows[i][j] != self.rows[j][i]:
                        raise ValueError(f"matrix not symmetric at ({j}, {i})")

    @classmethod
    def zeros(cls, dim: int) -> SymMatrix:
        return cls([[ZERO] * dim for _ in range(dim)], check=False)

    @classmethod
    def identity(cls, dim: int) -> SymMatrix:
        return cls([[ONE if i == j else ZERO for j in range(dim)] for i in range(dim)], check=False)

    @classmethod
    def from_upper(cls, dim: int, upper: Sequence[Sequence]) -> SymMatrix:
        """Build from row-wise upper triangles (row ``i`` holds entries ``i..dim-1``)."""
        rows = [[ZERO] * dim for _ in range(dim)]
        if len(upper) != dim:
            raise ValueError(f"expected {dim} upper-triangle rows, got {len(upper)}")
        for i, r in enumerate(upper):
            if len(r) != dim - i:
                raise ValueError(f"upper row {i} has {len(r)} entries, expected {dim - i}")
            for off, x in enumerate(r):
                x = as_qsqrt2(x)
                rows[i][i + off] = x
                rows[i + off][i] = x
        return cls(rows, check=False)

    @classmethod
    def factored(cls, m: Sequence[Sequence], core: SymMatrix) -> SymMatrix:
        """The matrix ``M^T core M`` for ``M`` of shape ``core.dim x k``."""
        mm = [[as_qsqrt2(x) for x in r] for r in m]
        dense = _congruence(mm, core)
        return cls(dense, factor=(mm, core), check=False)

    @classmethod
    def outer(cls, w: Sequence) -> SymMatrix:
        w = [as_qsqrt2(x) for x in w]
        return cls([[a * b for b in w] for a in w], check=False)

    def upper(self) -> list[list[QSqrt2]]:
        return [self.rows[i][i:] for i in range(self.dim)]

    def transpose(self) -> SymMatrix:
        return SymMatrix([list(c) for c in zip(*self.rows)], check=False)

    def __getitem__(self, ij):
        i, j = ij
        return self.rows[i][j]

    def __eq__(self, other):
        if not isinstance(other, SymMatrix):
            return NotImplemented
        return self.rows == other.rows

    def __add__(self, other: SymMatrix) -> SymMatrix:
        if self.dim != other.dim:
            raise ValueError("dimension mismatch")
        return SymMatrix(
            [[a + b for a, b in zip(r, s)] for r, s in zip(self.rows, other.rows)], check=False
        )

    def scale(self, c) -> SymMatrix:
        c = as_qsqrt2(c)
        return SymMatrix([[c * a for a in r] for r in self.rows], check=False)

    def is_zero(self) -> bool:
        return not any(x for r in self.rows for x in r)

    def to_float(self):
        import numpy as np

        return np.array([[float(x) for x in r] for r in self.rows], dtype=float)

    def __repr__(self) -> str:
        tag = ", factored" if self.factor is not None else ""
        return f"SymMatrix(dim={self.dim}{tag})"


def _congruence(m: list[list[QSqrt2]], core: SymMatrix) -> list[list[QSqrt2]]:
    r = len(m)
    if r != core.dim:
        raise ValueError(f"factor has {r} rows but core is {core.dim}x{core.dim}")
    k = len(m[0]) if r else 0
    if any(len(row) != k for row in m):
        raise ValueError("ragged factor matrix")
    # hm = core @ m  (r x k)
    hm = [[sum((core.rows[i][t] * m[t][j] for t in range(r) if core.rows[i][t] and m[t][j]), ZERO)
           for j in range(k)] for i in range(r)]
    out = [[ZERO] * k for _ in range(k)]
    for a in range(k):
        for b in range(a, k):
            s = sum((m[t][a] * hm[t][b] for t in range(r) if m[t][a] and hm[t][b]), ZERO)
            out[a][b] = s
            out[b][a] = s
    return out


def factored_value(m: SymMatrix) -> SymMatrix:
    """Dense value ``M^T H M`` of a factored matrix."""
    if m.factor is None:
        raise ValueError("matrix carries no factorization")
    mm, core = m.factor
    return SymMatrix(_congruence(mm, core), check=False)


def quadratic_form(m: SymMatrix | Sequence[Sequence], x: Sequence) -> QSqrt2:
    rows = m.rows if isinstance(m, SymMatrix) else m
    x = [as_qsqrt2(v) for v in x]
    total = ZERO
    for i, xi in enumerate(x):
        if not xi:
            continue
        s = sum((a * xj for a, xj in zip(rows[i], x) if a and xj), ZERO)
        total = total + xi * s
    return total


@dataclass
class PSDResult:
    is_psd: bool
    pivots: list[QSqrt2]
    rank: int
    positive_definite: bool
    witness: list[Fraction] | None = None
    witness_value: QSqrt2 | None = None
    reason: str = ""

    def __bool__(self) -> bool:
        return self.is_psd


@dataclass
class _Step:
    k: int
    pivot: QSqrt2
    row: dict[int, QSqrt2] = field(default_factory=dict)


def psd_check(m: SymMatrix | Sequence[Sequence]) -> PSDResult:
    """Decide positive semidefiniteness by exact symmetric elimination.

    Pivots are taken on the diagonal, largest first. A negative diagonal or a
    zero diagonal with a nonzero off-diagonal entry in its row proves
    indefiniteness; in that case a rational witness ``w`` with
    ``w^T m w < 0`` is returned.
    """
    if not isinstance(m, SymMatrix):
        m = SymMatrix(m)
    n = m.dim
    a = [list(r) for r in m.rows]
    remaining = list(range(n))
    steps: list[_Step] = []
    pivots: list[QSqrt2] = []

    while remaining:
        best = None
        for i in remaining:
            d = a[i][i]
            if d.sign() < 0:
                y = {i: ONE}
                return _fail(m, steps, y, pivots, f"negative pivot at index {i}")
            if best is None or d > a[best][best]:
                best = i
        k = best
        d = a[k][k]
        if not d:
            for i in remaining:
                for j in remaining:
                    x = a[i][j]
                    if x:
                        # [[0, x], [x, 0]] minor: (e_j - e_i/(2x)) gives value -1
                        y = {i: -(ONE / (2 * x)), j: ONE}
                        return _fail(m, steps, y, pivots, f"zero pivot with nonzero entry at ({i}, {j})")
            pivots.extend(ZERO for _ in remaining)
            break
        remaining.remove(k)
        row = {j: a[k][j] for j in remaining if a[k][j]}
        steps.append(_Step(k, d, row))
        pivots.append(d)
        inv = ONE / d
        for i, aik in row.items():
            f = aik * inv
            ai = a[i]
            for j, akj in row.items():
                if j >= i:
                    v = ai[j] - f * akj
                    ai[j] = v
                    a[j][i] = v
    rank = sum(1 for p in pivots if p)
    return PSDResult(True, pivots, rank, rank == n)


def _fail(m: SymMatrix, steps: list[_Step], y: dict[int, QSqrt2], pivots, reason: str) -> PSDResult:
    x = [ZERO] * m.dim
    for i, v in y.items():
        x[i] = v
    for st in reversed(steps):
        s = sum((c * x[j] for j, c in st.row.items() if x[j]), ZERO)
        x[st.k] = -(s / st.pivot)
    w = _rationalize(m, x)
    value = quadratic_form(m, w)
    rank = sum(1 for p in pivots if p)
    return PSDResult(False, pivots, rank, False, witness=w, witness_value=value, reason=reason)


def _sqrt2_approx(digits: int) -> Fraction:
    scale = 10**digits
    return Fraction(isqrt(2 * scale * scale), scale)


def _rationalize(m: SymMatrix, x: list[QSqrt2]) -> list[Fraction]:
    """Replace a Q[sqrt 2] witness by a nearby rational one that still works."""
    if all(v.q == 0 for v in x):
        return [v.p for v in x]
    digits = 8
    while True:
        r2 = _sqrt2_approx(digits)
        w = [v.p + v.q * r2 for v in x]
        if quadratic_form(m, w).sign() < 0:
            return w
        digits *= 2
        if digits > 4096:  # pragma: no cover - the form is continuous, so this never triggers
            raise ArithmeticError("could not rationalize indefiniteness witness")
