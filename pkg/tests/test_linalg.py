from __future__ import annotations

import random
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from flagcert.field import ONE, SQRT2, ZERO, QSqrt2
from flagcert.linalg import SymMatrix, factored_value, psd_check, quadratic_form


def _random_element(rng: random.Random, irrational: bool = True) -> QSqrt2:
    p = Fraction(rng.randint(-6, 6), rng.randint(1, 4))
    q = Fraction(rng.randint(-3, 3), rng.randint(1, 4)) if irrational else 0
    return QSqrt2(p, q)


def random_symmetric(rng: random.Random, dim: int) -> SymMatrix:
    upper = [[_random_element(rng) for _ in range(dim - i)] for i in range(dim)]
    return SymMatrix.from_upper(dim, upper)


def random_gram(rng: random.Random, dim: int, rank: int, shift) -> SymMatrix:
    b = [[_random_element(rng) for _ in range(rank)] for _ in range(dim)]
    rows = [[sum((x * y for x, y in zip(b[i], b[j])), ZERO) + (shift if i == j else 0) for j in range(dim)]
            for i in range(dim)]
    return SymMatrix(rows)


@pytest.mark.parametrize("dim", [0, 1, 4, 9])
def test_identity_is_psd(dim):
    res = psd_check(SymMatrix.identity(dim))
    assert res.is_psd and res.positive_definite


def test_indefinite_two_by_two_gives_witness():
    res = psd_check(SymMatrix([[1, 2], [2, 1]]))
    assert not res.is_psd
    w = res.witness
    assert quadratic_form(SymMatrix([[1, 2], [2, 1]]), w).sign() < 0
    assert quadratic_form(SymMatrix([[1, 2], [2, 1]]), [1, -1]) == QSqrt2(-2)


def test_singular_irrational_matrix_is_psd():
    m = SymMatrix([[2, -SQRT2], [-SQRT2, ONE]])
    res = psd_check(m)
    assert res.is_psd and not res.positive_definite
    assert res.rank == 1
    assert sorted(res.pivots) == [ZERO, QSqrt2(2)]


def test_zero_pivot_with_nonzero_row_is_indefinite():
    m = SymMatrix([[0, 1], [1, 0]])
    res = psd_check(m)
    assert not res.is_psd
    assert quadratic_form(m, res.witness).sign() < 0


def test_factored_identity():
    m = SymMatrix.factored([[1, 0], [0, 1]], SymMatrix.identity(2))
    assert factored_value(m) == SymMatrix.identity(2)


def test_factored_column_gives_all_ones():
    m = SymMatrix.factored([[1, 1]], SymMatrix([[1]]))
    assert m == SymMatrix([[1, 1], [1, 1]])


def test_factored_dimension_mismatch():
    with pytest.raises(ValueError):
        SymMatrix.factored([[1, 1], [1, 0], [0, 0]], SymMatrix.identity(2))


def test_asymmetric_input_rejected():
    with pytest.raises(ValueError):
        SymMatrix([[1, 2], [3, 1]])


@given(st.integers(0, 10_000))
def test_factored_with_positive_definite_core_is_psd(seed):
    rng = random.Random(seed)
    k, r = rng.randint(1, 5), rng.randint(1, 3)
    mm = [[Fraction(rng.randint(-4, 4), rng.randint(1, 3)) for _ in range(k)] for _ in range(r)]
    core = random_gram(rng, r, r, QSqrt2(1))
    assert psd_check(core).positive_definite
    assert psd_check(SymMatrix.factored(mm, core)).is_psd


@given(st.integers(0, 10_000))
def test_verdict_independent_of_symmetric_permutation(seed):
    rng = random.Random(seed)
    dim = rng.randint(1, 6)
    m = random_gram(rng, dim, rng.randint(1, dim), QSqrt2(rng.choice([0, 0, -1, 1])))
    perm = list(range(dim))
    rng.shuffle(perm)
    p = SymMatrix([[m.rows[perm[i]][perm[j]] for j in range(dim)] for i in range(dim)])
    a, b = psd_check(m), psd_check(p)
    assert a.is_psd == b.is_psd
    assert a.rank == b.rank


@given(st.integers(0, 10_000))
def test_not_psd_witness_is_exactly_negative(seed):
    rng = random.Random(seed)
    m = random_symmetric(rng, rng.randint(1, 7))
    res = psd_check(m)
    if not res.is_psd:
        assert all(isinstance(x, Fraction) for x in res.witness)
        assert quadratic_form(m, res.witness).sign() < 0


def test_agrees_with_float_eigenvalues_on_clear_cases(rng):
    checked = 0
    while checked < 60:
        dim = rng.randint(1, 8)
        if rng.random() < 0.5:
            m = random_gram(rng, dim, rng.randint(1, dim), QSqrt2(Fraction(rng.choice([-1, 1]), 3)))
        else:
            m = random_symmetric(rng, dim)
        lo = np.linalg.eigvalsh(m.to_float()).min()
        if abs(lo) < 1e-6:
            continue
        checked += 1
        assert psd_check(m).is_psd == (lo > 0)
