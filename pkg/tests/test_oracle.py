"""Brute-force theta and E_0 search.

The symmetry-reduced exact search is compared with a float brute force over
every (A, B) pair (numpy SVD null spaces), which shares no code with it.
"""

import itertools

import numpy as np
import pytest

from meshulam.errors import GroupTooLarge, InvariantViolation, OutOfRange
from meshulam.groups import parse_group
from meshulam.oracle import (
    as_indices,
    eab_dimension,
    enumerate_E0,
    min_spectrum_for_support,
    oracle_cap,
    support_representatives,
    theta_oracle,
)
from meshulam.transform import dft
from meshulam.uncertainty import theta_profile


def _fourier(G):
    N = G.exponent
    return np.array([[np.exp(-2j * np.pi * G.pairing_exponent(x, y) / N) for x in G.elements] for y in G.elements])


def _float_E0(G, k, l, tol=1e-8):
    """Every (A, B) with a kernel line supported exactly on A with spectrum exactly B."""
    F = _fourier(G)
    n = G.order
    out = set()
    for A in itertools.combinations(range(n), k):
        for B in itertools.combinations(range(n), l):
            Z = [i for i in range(n) if i not in B]
            if Z:
                M = F[np.ix_(Z, A)]
                s, vh = np.linalg.svd(M)[1:]
                null = k - int(np.sum(s > tol * max(s[0], 1)))
                if null == 0:
                    continue
                assert null == 1, "theta level must give lines"
                v = vh[-1].conj()
            else:
                if k != 1:
                    continue
                v = np.ones(1)
            if np.min(np.abs(v)) < tol:
                continue
            spec = F[:, A] @ v
            if all((abs(spec[i]) > tol) == (i in B) for i in range(n)):
                out.add((A, B))
    return out


@pytest.mark.parametrize("spec", ["Z2", "Z3", "Z5", "Z7", "Z4", "Z9", "Z2xZ2", "Z2xZ3", "Z3xZ3", "Z2xZ5"])
def test_theta_oracle_matches_closed_form(spec):
    G = parse_group(spec)
    prof = theta_profile(G)
    assert [theta_oracle(k, G) for k in range(1, G.order + 1)] == list(prof.theta)


def test_theta_oracle_examples():
    assert [theta_oracle(k, parse_group("Z5")) for k in range(1, 6)] == [5, 4, 3, 2, 1]
    assert theta_oracle(4, parse_group("Z2xZ5")) == 4
    for spec in ("Z4", "Z2xZ3", "Z8"):
        G = parse_group(spec)
        assert theta_oracle(1, G) == G.order


def test_theta_oracle_outside_the_families():
    # product recursion against brute force on groups without a direct closed form
    for spec in ("Z2xZ4", "Z2xZ2xZ2"):
        G = parse_group(spec)
        assert [theta_oracle(k, G) for k in range(1, G.order + 1)] == list(theta_profile(G).theta)
    Z8 = parse_group("Z8")
    assert [theta_oracle(k, Z8) for k in range(1, 9)] == [8, 4, 4, 2, 2, 2, 2, 1]


def test_parallel_oracle_is_deterministic():
    G = parse_group("Z3xZ3")
    assert [theta_oracle(k, G, jobs=2) for k in range(1, 10)] == [theta_oracle(k, G) for k in range(1, 10)]
    a = enumerate_E0(3, 3, G, jobs=2)
    b = enumerate_E0(3, 3, G)
    assert [(e.support, e.spectrum, e.function) for e in a] == [(e.support, e.spectrum, e.function) for e in b]


def test_min_spectrum_examples():
    Z9 = parse_group("Z9")
    assert min_spectrum_for_support([(0,)], Z9) == 9
    assert min_spectrum_for_support([(0,), (3,), (6,)], Z9) == 3
    assert min_spectrum_for_support([(0,), (1,)], parse_group("Z5")) == 4


def test_eab_dimension_examples():
    Z5 = parse_group("Z5")
    assert eab_dimension([(0,), (1,), (2,)], [(0,), (1,), (2,), (3,)], Z5) == 2
    Z4 = parse_group("Z4")
    assert eab_dimension([(0,), (2,)], [(0,), (2,)], Z4) == 1
    G = parse_group("Z2xZ3")
    assert eab_dimension(G.elements[:4], G.elements, G) == 4


@pytest.mark.parametrize("spec", ["Z2xZ3", "Z4", "Z5", "Z2xZ2"])
def test_at_least_one_solution_when_sizes_exceed_order(spec):
    G = parse_group(spec)
    n = G.order
    rng = np.random.default_rng(n)
    for _ in range(40):
        k = int(rng.integers(1, n + 1))
        A = rng.choice(n, size=k, replace=False)
        B = rng.choice(n, size=n - k + 1, replace=False)
        assert eab_dimension([G.elements[i] for i in A], [G.elements[i] for i in B], G) >= 1


@pytest.mark.parametrize("spec", ["Z2xZ3", "Z4", "Z9", "Z2xZ2", "Z5"])
def test_dimension_at_most_one_at_theta(spec):
    G = parse_group(spec)
    n = G.order
    prof = theta_profile(G)
    for k in range(1, n + 1):
        for A in itertools.combinations(range(n), k):
            if A[0] != 0:
                continue
            for B in itertools.combinations(range(n), prof[k]):
                assert eab_dimension([G.elements[i] for i in A], [G.elements[i] for i in B], G) <= 1


def test_cap_enforced(monkeypatch):
    with pytest.raises(GroupTooLarge):
        theta_oracle(1, parse_group("Z17"))
    with pytest.raises(GroupTooLarge):
        oracle_cap(26)
    monkeypatch.setenv("FAG_ORACLE_CAP", "18")
    assert oracle_cap() == 18
    assert theta_oracle(16, parse_group("Z17")) == 2
    monkeypatch.setenv("FAG_ORACLE_CAP", "8")
    with pytest.raises(GroupTooLarge):
        theta_oracle(1, parse_group("Z9"))


def test_out_of_range_k():
    with pytest.raises(OutOfRange):
        theta_oracle(0, parse_group("Z5"))
    with pytest.raises(OutOfRange):
        enumerate_E0(6, 1, parse_group("Z5"))


@pytest.mark.parametrize("spec", ["Z4", "Z9", "Z2xZ3", "Z2xZ2", "Z3xZ3", "Z8"])
def test_support_representatives_cover_every_subset(spec):
    G = parse_group(spec)
    n = G.order
    units = G.units
    for k in range(1, n + 1):
        orbits = set()
        for S in support_representatives(G, k):
            for u in units:
                for a in G.elements:
                    orbits.add(tuple(sorted(G.index(G.add(G.scale(u, G.elements[s]), a)) for s in S)))
        assert orbits == set(itertools.combinations(range(n), k))


def test_e0_examples():
    G = parse_group("Z2xZ3")
    ones = enumerate_E0(1, 6, G)
    assert [e.support for e in ones] == [(x,) for x in G.elements]
    assert all(e.function.normalized() == e.function and len(dft(e.function)) == 6 for e in ones)
    assert enumerate_E0(3, 5, parse_group("Z2xZ5")) == []
    Z9 = parse_group("Z9")
    entries = enumerate_E0(8, 2, Z9)
    assert len(entries) > 0
    for e in entries:
        (x,), (y,) = e.spectrum[0], e.spectrum[1]
        assert (x - y) % 3 != 0


@pytest.mark.parametrize("spec", ["Z4", "Z5", "Z2xZ2", "Z2xZ3", "Z9", "Z3xZ3"])
def test_e0_matches_float_brute_force(spec):
    G = parse_group(spec)
    prof = theta_profile(G)
    for k in range(1, G.order + 1):
        exact = {(as_indices(G, e.support), as_indices(G, e.spectrum)) for e in enumerate_E0(k, prof[k], G)}
        assert exact == _float_E0(G, k, prof[k]), (spec, k)


def test_e0_representatives_have_exact_sizes():
    G = parse_group("Z2xZ5")
    prof = theta_profile(G)
    for k in (1, 2, 4, 5, 8, 9, 10):
        for e in enumerate_E0(k, prof[k], G):
            assert len(e.function) == k
            assert as_indices(G, dft(e.function).support) == as_indices(G, e.spectrum)


def test_e0_above_theta_and_unexpanded():
    G = parse_group("Z5")
    # l > theta: kernels of dimension 2, still listed with exact supports
    entries = enumerate_E0(2, 5, G)
    assert len(entries) == 10
    reduced = enumerate_E0(2, 4, G, expand=False)
    assert len(reduced) < len(enumerate_E0(2, 4, G))


def test_e0_line_assertion_fires_on_a_wrong_theta():
    G = parse_group("Z5")
    with pytest.raises(InvariantViolation):
        enumerate_E0(2, 5, G, theta_value=5)
