import itertools

import pytest
from hypothesis import given, settings, strategies as st

from meshulam.cyclotomic import root_of_unity, CycNum
from meshulam.errors import MalformedSpec, NotPrimePower, ShapeMismatch
from meshulam.groups import (
    FiniteAbelianGroup,
    annihilator,
    coset,
    enumerate_cyclic_subgroups,
    enumerate_subgroups,
    generated_subgroup,
    parse_group,
)

SMALL = ["Z2", "Z3", "Z4", "Z5", "Z9", "Z2xZ2", "Z2xZ3", "Z3xZ3", "Z2xZ5", "Z3xZ5", "Z2xZ4"]


@pytest.mark.parametrize(
    "spec, factors, order, exponent",
    [
        ("Z9", ((3, 2),), 9, 9),
        ("Z3xZ5", ((3, 1), (5, 1)), 15, 15),
        ("Z3xZ3", ((3, 1), (3, 1)), 9, 3),
        ("Z2xZ4", ((2, 1), (2, 2)), 8, 4),
    ],
)
def test_parse_group(spec, factors, order, exponent):
    G = parse_group(spec)
    assert G.factors == factors
    assert G.order == order
    assert G.exponent == exponent
    assert G.spec == spec


@pytest.mark.parametrize("spec", ["", "Z", "z5", "Z5x", "Z5 xZ3", "5", "Z3*Z5"])
def test_malformed_specs(spec):
    with pytest.raises(MalformedSpec):
        parse_group(spec)


@pytest.mark.parametrize("spec", ["Z6", "Z10", "Z2xZ15", "Z1", "Z0"])
def test_composite_moduli_rejected(spec):
    with pytest.raises(NotPrimePower):
        parse_group(spec)


def test_pairing_examples():
    Z9 = parse_group("Z9")
    assert Z9.pairing_exponent((3,), (3,)) == 0
    G = parse_group("Z3xZ5")
    assert G.pairing_exponent((1, 0), (1, 0)) == 5
    for y in G.elements:
        assert G.pairing_exponent(G.zero, y) == 0


def test_pairing_shape_mismatch():
    G = parse_group("Z3xZ5")
    with pytest.raises(ShapeMismatch):
        G.pairing_exponent((1,), (1, 0))


def test_elements_are_lexicographic():
    G = parse_group("Z2xZ3")
    assert G.elements == ((0, 0), (0, 1), (0, 2), (1, 0), (1, 1), (1, 2))
    assert [G.index(x) for x in G.elements] == list(range(6))


@pytest.mark.parametrize("spec", SMALL)
def test_pairing_bilinear_and_nondegenerate(spec):
    G = parse_group(spec)
    N = G.exponent
    els = G.elements
    for x, x2, y in itertools.product(els[:6], els[:6], els):
        assert G.pairing_exponent(G.add(x, x2), y) == (G.pairing_exponent(x, y) + G.pairing_exponent(x2, y)) % N
    for y in els:
        if y != G.zero:
            assert any(G.pairing_exponent(x, y) for x in els)


@pytest.mark.parametrize("spec", SMALL)
def test_character_orthogonality_exact(spec):
    G = parse_group(spec)
    N = G.exponent
    for y in G.elements:
        total = CycNum.zero(N)
        for x in G.elements:
            total = total + root_of_unity(G.pairing_exponent(x, y), N)
        assert total == (CycNum.rational(G.order, N) if y == G.zero else CycNum.zero(N))


def _brute_subgroups(G):
    """All subsets closed under addition that contain 0 (tiny groups only)."""
    els = G.elements
    found = set()
    for r in range(1, len(els) + 1):
        if G.order % r:
            continue
        for S in itertools.combinations(els, r):
            s = set(S)
            if G.zero in s and all(G.add(a, b) in s for a in S for b in S):
                found.add(frozenset(S))
    return found


@pytest.mark.parametrize(
    "spec, cyclic_count, total",
    # Z3xZ3 and Z2xZ2 are not cyclic: {0} plus p + 1 lines, and the whole
    # group only among all subgroups.
    [("Z9", 3, 3), ("Z3xZ3", 5, 6), ("Z2xZ5", 4, 4), ("Z2xZ2", 4, 5), ("Z2xZ4", 6, 8), ("Z4", 3, 3)],
)
def test_subgroup_enumeration(spec, cyclic_count, total):
    G = parse_group(spec)
    cyc = enumerate_cyclic_subgroups(G)
    allsub = enumerate_subgroups(G)
    assert len(cyc) == cyclic_count
    assert len(allsub) == total
    for H in allsub:
        assert H.is_closed()
        assert G.order % H.order == 0
    if G.order <= 9:
        assert {frozenset(H.members) for H in allsub} == _brute_subgroups(G)


def test_cyclic_subgroups_contain_trivial_and_whole_cyclic_group():
    G = parse_group("Z9")
    orders = sorted(H.order for H in enumerate_cyclic_subgroups(G))
    assert orders == [1, 3, 9]


def test_coset_examples():
    Z9 = parse_group("Z9")
    H = generated_subgroup(Z9, [(3,)])
    assert coset(Z9, (1,), H) == frozenset({(1,), (4,), (7,)})
    assert coset(Z9, (6,), H) == frozenset(H.members)
    G = parse_group("Z2xZ5")
    K = generated_subgroup(G, [(0, 1)])
    assert coset(G, (1, 0), K) == frozenset((1, y) for y in range(5))


def test_annihilator_from_pairing():
    G = parse_group("Z3xZ3")
    for H in enumerate_subgroups(G):
        Hp = annihilator(H)
        assert H.order * Hp.order == G.order
        for h in H.members:
            for y in Hp.members:
                assert G.pairing_exponent(h, y) == 0


@settings(max_examples=60, deadline=None)
@given(st.sampled_from(SMALL), st.data())
def test_group_law_properties(spec, data):
    G = parse_group(spec)
    idx = st.integers(0, G.order - 1)
    x, y = G.elements[data.draw(idx)], G.elements[data.draw(idx)]
    assert G.add(x, y) == G.add(y, x)
    assert G.add(x, G.neg(x)) == G.zero
    assert G.sub(G.add(x, y), y) == x
    assert G.exponent % G.element_order(x) == 0


def test_group_is_hashable_and_immutable():
    a, b = parse_group("Z2xZ3"), FiniteAbelianGroup(((2, 1), (3, 1)))
    assert a == b and hash(a) == hash(b)
