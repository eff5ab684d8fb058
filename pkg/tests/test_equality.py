import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from meshulam.cyclotomic import CycNum, root_of_unity
from meshulam.equality import (
    CHAR_TENSOR,
    DIRAC_TENSOR,
    PSQ_CHAR_G,
    PSQ_COSET_G,
    PSQ_DIFF_PAIR,
    TP_DIFF_PAIR,
    TP_EXCEPTIONAL_EITHER,
    TP_F_TENSOR_DIRAC,
    VEC_AM_TENSOR_CHAR,
    VEC_AM_TENSOR_DIRAC,
    classify,
    construct,
    construct_prime_square,
    construct_two_primes,
    construct_vector_case,
    construct_zp,
    diagonal_support_check,
    family_members,
    paper_predicts_equality,
    random_diagonal_function,
    tensor_factors,
    verify_classification,
)
from meshulam.errors import BadSizes, InvariantViolation, NotDiagonalForm, SideConditionViolated, UnsupportedGroup
from meshulam.groups import parse_group
from meshulam.transform import GroupFunction, dft, idft, random_value, tensor

ROUND_TRIP_GROUPS = ["Z2", "Z3", "Z5", "Z7", "Z4", "Z9", "Z2xZ2", "Z3xZ3", "Z2xZ3", "Z2xZ5", "Z3xZ5", "Z2xZ7"]


def sizes(f):
    return len(f), len(dft(f))


# constructors ------------------------------------------------------------------------------


def test_construct_zp_examples():
    Z5 = parse_group("Z5")
    assert construct_zp({0}, range(5), 5) == GroupFunction.delta(Z5)
    assert construct_zp(range(5), {0}, 5) == GroupFunction.constant(Z5)
    f = construct_zp({0, 1}, {0, 1, 2, 3}, 5)
    assert sizes(f) == (2, 4)
    # the single constraint row is the character 4: f(0) + f(1) zeta^-4 = 0
    assert f((0,)) + f((1,)) * root_of_unity(-4, 5) == CycNum.zero(5)
    with pytest.raises(BadSizes):
        construct_zp({0, 1}, {0, 1}, 5)


def test_two_primes_examples():
    g = construct_two_primes(TP_F_TENSOR_DIRAC, {"A": (0, 1), "B": (0, 1), "shift": 0}, 3, 5)
    assert sizes(g) == (2, 10)
    f1 = construct_two_primes(
        TP_EXCEPTIONAL_EITHER, {"A": (0, 1), "B": (0, 1, 2, 3), "char": 0, "form": CHAR_TENSOR}, 2, 5
    )
    assert sizes(f1) == (4, 4)
    f2 = construct_two_primes(
        TP_EXCEPTIONAL_EITHER, {"A": (0, 1, 2, 3), "B": (0, 1), "shift": 1, "form": DIRAC_TENSOR}, 2, 5
    )
    assert sizes(f2) == (4, 4)
    assert {x[0] for x in f2.support} == {1}


def test_two_primes_side_conditions():
    # no exceptional point on Z2 x Z3 ((3 + 1)/(2 + 1) is not an integer)
    with pytest.raises(SideConditionViolated):
        construct_two_primes(TP_EXCEPTIONAL_EITHER, {"A": (0,), "B": (0, 1, 2), "char": 0, "form": CHAR_TENSOR}, 2, 3)
    with pytest.raises(UnsupportedGroup):
        construct_two_primes(TP_F_TENSOR_DIRAC, {"A": (0,), "B": (0, 1), "shift": 0}, 5, 2)


def test_vector_examples():
    base = {"A": (0, 1), "B": (0, 1), "shift": 0}
    f = construct_vector_case(VEC_AM_TENSOR_DIRAC, base, 3)
    assert sizes(f) == (2, 6)
    g = construct_vector_case(VEC_AM_TENSOR_DIRAC, dict(base, direction=(1, 1)), 3)
    assert sizes(g) == (2, 6)
    assert g.support != f.support
    h = construct_vector_case(VEC_AM_TENSOR_CHAR, {"A": (0,), "B": (0, 1), "char": 0}, 2)
    assert sizes(h) == (2, 2)


def test_prime_square_examples():
    f = construct_prime_square(PSQ_COSET_G, {"A": (0, 1), "B": (0, 1), "coset": 1}, 3)
    assert sizes(f) == (2, 6)
    assert all(x[0] % 3 == 1 for x in f.support)
    Z9 = parse_group("Z9")
    d = construct_prime_square(PSQ_DIFF_PAIR, {"x": 1, "y": 2, "c": 0}, 3)
    for n in range(9):
        assert d((n,)) == (root_of_unity(n, 9) - root_of_unity(2 * n, 9)) / 9
    assert sizes(d) == (8, 2)
    assert d.group == Z9
    with pytest.raises(SideConditionViolated):
        construct_prime_square(PSQ_DIFF_PAIR, {"x": 1, "y": 4, "c": 0}, 3)
    c = construct_prime_square(PSQ_CHAR_G, {"A": (0, 1, 2), "B": (0,), "char": 1}, 3)
    assert sizes(c) == (9, 1)


def test_construct_dispatch_rejects_foreign_family():
    with pytest.raises(SideConditionViolated):
        construct(PSQ_COSET_G, parse_group("Z3xZ3"), {"A": (0,), "B": (0, 1, 2), "coset": 0})
    with pytest.raises(UnsupportedGroup):
        construct(PSQ_COSET_G, parse_group("Z8"), {})


# classification ----------------------------------------------------------------------------


def test_classify_examples():
    G = parse_group("Z2xZ5")
    d = classify(GroupFunction.delta(G, (1, 3)))
    assert d and d.k == 1
    f1 = construct_two_primes(
        TP_EXCEPTIONAL_EITHER, {"A": (0, 1), "B": (0, 1, 2, 3), "char": 0, "form": CHAR_TENSOR}, 2, 5
    )
    desc = classify(f1)
    assert desc.family == TP_EXCEPTIONAL_EITHER and desc.params["form"] == CHAR_TENSOR
    Z9 = parse_group("Z9")
    f = idft(GroupFunction(Z9, {(1,): CycNum.one(9), (2,): CycNum.rational(-1, 9)}))
    desc = classify(f)
    assert desc.family == PSQ_DIFF_PAIR
    assert (desc.params["x"], desc.params["y"], desc.params["c"]) == (1, 2, 0)
    assert desc.params["alpha"] == CycNum.one(9)


def test_classify_not_extremal_and_unsupported():
    G = parse_group("Z2xZ5")
    f = GroupFunction.indicator(G, [(0, 0), (0, 1), (1, 3)])
    verdict = classify(f)
    assert not verdict
    with pytest.raises(UnsupportedGroup):
        classify(GroupFunction.delta(parse_group("Z8")))
    with pytest.raises(UnsupportedGroup):
        classify(GroupFunction.delta(parse_group("Z5xZ2")))


@pytest.mark.parametrize("spec", ROUND_TRIP_GROUPS)
def test_round_trip_every_family_member(spec):
    """classify(construct(d)) rebuilds the input exactly, for every parameter choice."""
    G = parse_group(spec)
    rng = np.random.default_rng(G.order)
    for k in range(1, G.order + 1):
        for d in family_members(G, k):
            f = d.representative.scaled(random_value(rng, G.exponent))
            if f.is_zero():
                continue
            desc = classify(f)
            assert desc, (spec, k, d.family)
            assert desc.build() == f
            assert desc.representative == f


@pytest.mark.parametrize("spec", ["Z2xZ3", "Z2xZ5", "Z3xZ5"])
def test_extremal_functions_are_tensor_products(spec):
    """Every classified extremal function is g (x) h with a character or Dirac factor,
    except the difference pair at k = pq - 1."""
    G = parse_group(spec)
    for k in range(1, G.order + 1):
        for d in family_members(G, k):
            desc = classify(d.representative)
            if desc.family == TP_DIFF_PAIR:
                assert k == G.order - 1
                continue
            g, h, kind = tensor_factors(desc)
            assert tensor(g, h) == d.representative
            assert kind in {"char_left", "char_right", "dirac_left", "dirac_right"}


def test_difference_pair_on_two_primes_is_not_a_tensor_product():
    G = parse_group("Z2xZ5")
    f = construct_two_primes(TP_DIFF_PAIR, {"x": (1, 1), "y": (0, 0), "c": (0, 0)}, 2, 5)
    assert f.group == G and sizes(f) == (9, 2)
    # a tensor product g (x) h with |supp| = 9 = 1 * 9 or 9 * 1 cannot exist on Z2 x Z5
    assert not any(a * b == 9 for a in (1, 2) for b in range(1, 6))


@pytest.mark.parametrize(
    "spec, ks",
    [("Z9", [1, 2, 3, 6, 8, 9]), ("Z2xZ2", [1, 2, 4]), ("Z4", [1, 2, 3, 4]), ("Z3xZ3", [1, 2, 3, 6, 9])],
)
def test_equality_existence_on_prime_squares(spec, ks):
    rows = verify_classification(parse_group(spec))
    assert [r.k for r in rows if r.observed] == ks
    assert all(r.lines_match and r.rule_agrees for r in rows)


def test_existence_on_z2xz5_differs_from_the_drop_rule():
    """Observed equality points are {1, 2, 4, 5, 8, 9, 10}; theta does not drop at
    8 (char (x) h above the kink) or 9 (difference pair).  Lines still match the
    constructions everywhere."""
    rows = verify_classification(parse_group("Z2xZ5"))
    assert [r.k for r in rows if r.observed] == [1, 2, 4, 5, 8, 9, 10]
    assert [r.k for r in rows if r.predicted] == [1, 2, 4, 5, 10]
    assert all(r.lines_match for r in rows)
    k4 = rows[3].classified
    assert k4 == {f"{TP_EXCEPTIONAL_EITHER}:{CHAR_TENSOR}": 100, f"{TP_EXCEPTIONAL_EITHER}:{DIRAC_TENSOR}": 100}


def test_paper_rule():
    Z9 = parse_group("Z9")
    assert [k for k in range(1, 10) if paper_predicts_equality(Z9, k)] == [1, 2, 3, 6, 8, 9]


def test_verify_classification_reports_missing_lines(monkeypatch):
    import meshulam.equality as eq

    monkeypatch.setattr(eq, "family_members", lambda G, k: [])
    with pytest.raises(InvariantViolation) as err:
        eq.verify_k(parse_group("Z4"), 2)
    assert err.value.payload["not_constructed"] == 4  # 2 cosets of {0, 2} times 2 characters


# diagonal lemma ----------------------------------------------------------------------------


def test_diagonal_examples():
    Z9 = parse_group("Z9")
    one, minus = CycNum.one(9), CycNum.rational(-1, 9)
    v = diagonal_support_check(GroupFunction(Z9, {(1,): one, (2,): minus}))
    assert v.branch == "one_zero" and v.zeros == 1
    rng = np.random.default_rng(3)
    for _ in range(20):
        f = GroupFunction(Z9, {(n,): random_value(rng, 9) for n in (0, 1, 2)})
        if len(f) == 3:
            assert diagonal_support_check(f).spectrum_size >= 6
    Z4 = parse_group("Z4")
    for a, b in itertools.product((0, 1, 2), repeat=2):
        f = GroupFunction(Z4, {(0,): root_of_unity(a, 4), (1,): root_of_unity(b, 4)})
        v = diagonal_support_check(f)
        assert v.spectrum_size >= 4 or v.zeros == 1


def test_diagonal_rejects_other_forms():
    Z9 = parse_group("Z9")
    with pytest.raises(NotDiagonalForm):
        diagonal_support_check(GroupFunction.indicator(Z9, [(0,), (3,)]))
    with pytest.raises(NotDiagonalForm):
        diagonal_support_check(GroupFunction.delta(Z9))
    with pytest.raises(NotDiagonalForm):
        diagonal_support_check(GroupFunction.delta(parse_group("Z5")))


@settings(max_examples=80, deadline=None)
@given(st.sampled_from([("Z4", 2), ("Z9", 3), ("Z25", 5)]), st.integers(0, 2**32 - 1), st.data())
def test_diagonal_lemma_property(group_p, seed, data):
    spec, p = group_p
    k = data.draw(st.integers(2, p))
    f = random_diagonal_function(parse_group(spec), k, np.random.default_rng(seed))
    v = diagonal_support_check(f)
    assert v.spectrum_size >= p * (p - k + 2) or (k == 2 and v.zeros == 1)
