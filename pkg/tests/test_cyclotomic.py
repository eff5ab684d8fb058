"""Exact cyclotomic arithmetic and linear algebra.

Independent oracles: complex floating point for field values, and rank by
expansion over minors (Leibniz determinants in exact arithmetic) for the
elimination-based rank.
"""

import cmath
import itertools
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from meshulam.cyclotomic import (
    CycMatrix,
    CycNum,
    cyclotomic_poly,
    determinant,
    euler_phi,
    float_rank_estimate,
    monomial_determinant,
    rank,
    rank_kernel,
    root_of_unity,
)
from meshulam.errors import LevelMismatch

LEVELS = [1, 2, 3, 4, 5, 6, 7, 9, 10, 12, 15]


@pytest.mark.parametrize(
    "N, coeffs",
    [(1, (-1, 1)), (4, (1, 0, 1)), (9, (1, 0, 0, 1, 0, 0, 1)), (6, (1, -1, 1)), (15, (1, -1, 0, 1, -1, 1, 0, -1, 1))],
)
def test_cyclotomic_poly(N, coeffs):
    assert tuple(cyclotomic_poly(N)) == coeffs


@pytest.mark.parametrize("N", range(1, 31))
def test_cyclotomic_poly_roots_numerically(N):
    c = cyclotomic_poly(N)
    assert len(c) - 1 == euler_phi(N)
    z = cmath.exp(2j * cmath.pi / N)
    assert abs(sum(a * z**i for i, a in enumerate(c))) < 1e-8


def test_root_of_unity_examples():
    assert root_of_unity(0, 7) == CycNum.one(7)
    assert root_of_unity(2, 4) == CycNum.rational(-1, 4)
    w = root_of_unity(3, 9)
    assert w * w + w + 1 == CycNum.zero(9)
    assert root_of_unity(-1, 5) == root_of_unity(4, 5)


def test_field_examples():
    i = root_of_unity(1, 4)
    assert i * i == CycNum.rational(-1, 4)
    z3 = root_of_unity(1, 3)
    assert (1 + z3 + z3 * z3).is_zero()
    z5 = root_of_unity(1, 5)
    assert z5.conjugate() * z5 == CycNum.one(5)


def test_level_mismatch():
    with pytest.raises(LevelMismatch):
        root_of_unity(1, 3) + root_of_unity(1, 5)


@pytest.mark.parametrize("N", LEVELS)
def test_geometric_sum(N):
    total = CycNum.zero(N)
    for e in range(N):
        total = total + root_of_unity(e, N)
    assert total == (CycNum.one(N) if N == 1 else CycNum.zero(N))


def test_representation_is_canonical():
    # 1 + zeta_9^3 + zeta_9^6 = 0, so adding it changes nothing
    a = root_of_unity(1, 9) * 5 + Fraction(1, 3)
    b = a + root_of_unity(0, 9) + root_of_unity(3, 9) + root_of_unity(6, 9)
    assert a == b and hash(a) == hash(b)
    assert len(a.coeffs) == euler_phi(9)


def _cycnums(N):
    exps = st.lists(st.tuples(st.integers(-3, 3), st.integers(0, N - 1)), min_size=0, max_size=4)
    dens = st.integers(1, 4)

    def build(terms, den):
        x = CycNum.zero(N)
        for c, e in terms:
            x = x + root_of_unity(e, N) * c
        return x / den

    return st.builds(build, exps, dens)


@settings(max_examples=80, deadline=None)
@given(st.sampled_from(LEVELS).flatmap(lambda N: st.tuples(_cycnums(N), _cycnums(N), _cycnums(N))))
def test_field_axioms(abc):
    a, b, c = abc
    assert (a + b) + c == a + (b + c)
    assert a * (b + c) == a * b + a * c
    assert a * b == b * a
    assert (a - a).is_zero()
    if not a.is_zero():
        assert a * a.inverse() == CycNum.one(a.level)
    assert (a * b).conjugate() == a.conjugate() * b.conjugate()
    assert abs((a * b).to_complex() - a.to_complex() * b.to_complex()) < 1e-6


@settings(max_examples=60, deadline=None)
@given(st.sampled_from(LEVELS).flatmap(_cycnums))
def test_json_round_trip(a):
    assert CycNum.from_json(a.to_json(), a.level) == a


# rank and kernel --------------------------------------------------------------------------


def _minor_rank(exps, N):
    """Rank as the largest size of a nonzero minor (independent of elimination)."""
    r, c = len(exps), len(exps[0])
    for s in range(min(r, c), 0, -1):
        for I in itertools.combinations(range(r), s):
            for J in itertools.combinations(range(c), s):
                if monomial_determinant([[exps[i][j] for j in J] for i in I], N):
                    return s
    return 0


def test_rank_examples():
    assert rank_kernel(CycMatrix.identity(3, 5)) == (3, [])
    z3 = root_of_unity(1, 3)
    one = CycNum.one(3)
    M = CycMatrix([[one, one], [one, z3]])
    assert rank(M) == 2
    assert determinant(M) == z3 - 1
    z5 = root_of_unity(1, 5)
    r, basis = rank_kernel(CycMatrix([[CycNum.one(5), z5]]))
    assert r == 1 and len(basis) == 1
    v = basis[0]
    # first nonzero coordinate normalized to 1
    assert v[0] == -z5 or v[0] == CycNum.one(5)
    assert all(x.is_zero() for x in CycMatrix([[CycNum.one(5), z5]]).matvec(v))


@pytest.mark.parametrize("N", [2, 3, 4, 5, 6, 7, 9])
def test_rank_matches_minor_expansion(N):
    rng = np.random.default_rng(1000 + N)
    for _ in range(40):
        r, c = (int(x) for x in rng.integers(1, 5, size=2))
        exps = rng.integers(0, N, size=(r, c))
        if rng.random() < 0.4 and r > 1:
            # plant a dependent row: a root-of-unity multiple of another row
            exps[-1] = (exps[0] + rng.integers(0, N)) % N
        M = CycMatrix.from_exponents(exps, N)
        rk, basis = rank_kernel(M)
        assert rk == _minor_rank(exps.tolist(), N)
        assert len(basis) == c - rk
        for v in basis:
            assert all(x.is_zero() for x in M.matvec(v))
            lead = next(x for x in v if not x.is_zero())
            assert lead == CycNum.one(N)


def test_rank_with_rational_entries():
    M = CycMatrix([[CycNum.rational(Fraction(1, 2), 7), CycNum.rational(3, 7)], [CycNum.rational(1, 7), CycNum.rational(6, 7)]])
    assert rank(M) == 1


def test_determinant_agrees_with_monomial_leibniz():
    rng = np.random.default_rng(7)
    for N in (3, 5, 8):
        for _ in range(10):
            exps = rng.integers(0, N, size=(3, 3))
            assert determinant(CycMatrix.from_exponents(exps, N)) == monomial_determinant(exps.tolist(), N)


def test_float_rank_estimate_examples():
    assert float_rank_estimate(np.eye(3)) == 3
    u = np.array([1, 2j, -1])
    v = np.array([3, 1 - 1j])
    assert float_rank_estimate(np.outer(u, v)) == 1
    z = np.exp(-2j * np.pi / 3)
    F3 = np.array([[z ** (i * j) for j in range(3)] for i in range(3)])
    assert float_rank_estimate(F3) == 3
    assert float_rank_estimate(CycMatrix.from_exponents(np.array([[0, 1], [0, 1]]), 5)) == 1


@pytest.mark.parametrize("N", [3, 5, 9])
def test_float_rank_agrees_with_exact_rank(N):
    rng = np.random.default_rng(N)
    for _ in range(30):
        exps = rng.integers(0, N, size=(3, 4))
        if rng.random() < 0.5:
            exps[2] = (exps[1] + 1) % N
        M = CycMatrix.from_exponents(exps, N)
        assert float_rank_estimate(M) == rank(M)
