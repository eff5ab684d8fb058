"""Meshulam's function theta(k, G): closed forms, product recursion, bounds.

theta(k, G) is the least spectrum size of a nonzero function whose support
has at most k points.  Closed forms cover Z_p, Z_q x Z_p, Z_p x Z_p and
Z_{p^2}; any other product of cyclic factors goes through the product
recursion, and single factors without a closed form fall back to the
brute-force oracle in :mod:`meshulam.oracle`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from .cyclotomic import CycNum, root_of_unity
from .errors import InvariantViolation, OutOfRange
from .groups import FiniteAbelianGroup, Subgroup, generated_subgroup, is_prime
from .transform import GroupFunction, dft

CLOSED_FORM = "closed_form"
PRODUCT_RECURSION = "product_recursion"
ORACLE = "oracle"


def _check_k(k: int, n: int):
    if not 1 <= k <= n:
        raise OutOfRange(f"k = {k} outside [1, {n}]")


def theta_tao(k: int, p: int) -> int:
    if not is_prime(p):
        raise OutOfRange(f"{p} is not prime")
    _check_k(k, p)
    return p - k + 1


def theta_two_primes(k: int, q: int, p: int) -> int:
    """theta(k, Z_q x Z_p) for primes q < p.

    The four branches overlap at their end points; every branch whose range
    contains k is evaluated and they must agree.
    """
    if not (is_prime(q) and is_prime(p) and q < p):
        raise OutOfRange(f"need primes q < p, got q={q}, p={p}")
    _check_k(k, p * q)
    kink = Fraction(q * (p + 1), q + 1)
    values = []
    if k <= q:
        values.append(p * (q - k + 1))
    if q <= k <= kink:
        values.append(p - k // q + 1)
    if kink <= k <= p:
        values.append(q * (p - k + 1))
    if k >= p:
        values.append(q - k // p + 1)
    if len(set(values)) != 1:
        raise InvariantViolation(f"branches disagree at k={k} on Z{q}xZ{p}: {values}", {"k": k, "q": q, "p": p, "values": values})
    return values[0]


def theta_prime_square(k: int, p: int) -> int:
    """theta(k, G) for G = Z_{p^2} or Z_p x Z_p (the two coincide)."""
    if not is_prime(p):
        raise OutOfRange(f"{p} is not prime")
    _check_k(k, p * p)
    values = []
    if k <= p:
        values.append(p * (p - k + 1))
    if k >= p:
        values.append(p - k // p + 1)
    if len(set(values)) != 1:
        raise InvariantViolation(f"branches disagree at k={k} for p={p}: {values}", {"k": k, "p": p, "values": values})
    return values[0]


def _theta_list(profile) -> list:
    return list(profile.theta) if isinstance(profile, ThetaProfile) else list(profile)


def theta_product(k: int, profile1, profile2):
    """min theta(k1, G1) theta(k2, G2) over k1 k2 <= k, and its argmin couples.

    Profiles are sequences with ``profile[k - 1] == theta(k)`` (or
    ThetaProfile objects).
    """
    t1, t2 = _theta_list(profile1), _theta_list(profile2)
    n1, n2 = len(t1), len(t2)
    _check_k(k, n1 * n2)
    best = None
    argmin = []
    for k1 in range(1, n1 + 1):
        for k2 in range(1, min(n2, k // k1) + 1):
            v = t1[k1 - 1] * t2[k2 - 1]
            if best is None or v < best:
                best, argmin = v, [(k1, k2)]
            elif v == best:
                argmin.append((k1, k2))
    return best, argmin


def meshulam_bound(k: int, G) -> Fraction:
    """Largest convex function on [1, |G|] equal to |G|/d at divisors d."""
    n = G if isinstance(G, int) else G.order
    _check_k(k, n)
    divisors = [d for d in range(1, n + 1) if n % d == 0]
    for lo, hi in zip(divisors, divisors[1:]):
        if lo <= k <= hi:
            y0, y1 = Fraction(n, lo), Fraction(n, hi)
            return y0 + (y1 - y0) * Fraction(k - lo, hi - lo)
    return Fraction(n, k)  # n == 1


# family recognition ---------------------------------------------------------


@dataclass(frozen=True)
class Family:
    """Which of the classified families a group belongs to.

    kind is one of 'zp', 'two_primes', 'vector', 'prime_square'; for
    'two_primes' ``q`` is the first factor's prime and ``p`` the second's.
    """

    kind: str
    p: int
    q: int | None = None

    @property
    def ordered(self) -> bool:
        return self.kind != "two_primes" or self.q < self.p


def family_of(G: FiniteAbelianGroup) -> Family | None:
    f = G.factors
    if len(f) == 1:
        p, n = f[0]
        if n == 1:
            return Family("zp", p)
        if n == 2:
            return Family("prime_square", p)
        return None
    if len(f) == 2 and f[0][1] == 1 and f[1][1] == 1:
        q, p = f[0][0], f[1][0]
        if q == p:
            return Family("vector", p)
        return Family("two_primes", p, q)
    return None


@lru_cache(maxsize=None)
def _closed_profile(G: FiniteAbelianGroup):
    """(thetas, methods) from closed forms / product recursion, or None."""
    fam = family_of(G)
    n = G.order
    if fam is not None:
        if fam.kind == "zp":
            return tuple(theta_tao(k, fam.p) for k in range(1, n + 1)), CLOSED_FORM
        if fam.kind in ("vector", "prime_square"):
            return tuple(theta_prime_square(k, fam.p) for k in range(1, n + 1)), CLOSED_FORM
        q, p = sorted((fam.q, fam.p))
        return tuple(theta_two_primes(k, q, p) for k in range(1, n + 1)), CLOSED_FORM
    if len(G.factors) >= 2:
        G1 = FiniteAbelianGroup(G.factors[:1])
        G2 = FiniteAbelianGroup(G.factors[1:])
        c1, c2 = _closed_profile(G1), _closed_profile(G2)
        if c1 is None or c2 is None:
            return None
        return tuple(theta_product(k, c1[0], c2[0])[0] for k in range(1, n + 1)), PRODUCT_RECURSION
    return None


def theta_closed(k: int, G: FiniteAbelianGroup):
    """(theta, method) without search, or None when no formula applies."""
    _check_k(k, G.order)
    prof = _closed_profile(G)
    if prof is None:
        return None
    return prof[0][k - 1], prof[1]


def theta(k: int, G: FiniteAbelianGroup, **oracle_kwargs) -> int:
    closed = theta_closed(k, G)
    if closed is not None:
        return closed[0]
    from .oracle import theta_oracle

    return theta_oracle(k, G, **oracle_kwargs)


@dataclass(frozen=True)
class ThetaProfile:
    group: FiniteAbelianGroup
    theta: tuple
    method: tuple
    meshulam_u: tuple

    def __getitem__(self, k: int) -> int:
        return self.theta[k - 1]

    def has_drop(self, k: int) -> bool:
        """theta(k) < theta(k-1), with theta(0) taken as +infinity."""
        return k == 1 or self.theta[k - 1] < self.theta[k - 2]

    def check(self):
        n = self.group.order
        t = self.theta
        problems = []
        if t[0] != n:
            problems.append("theta(1) != |G|")
        if t[-1] != 1:
            problems.append("theta(|G|) != 1")
        for k in range(1, n + 1):
            if k > 1 and t[k - 1] > t[k - 2]:
                problems.append(f"theta increases at k={k}")
            if t[k - 1] > n - k + 1:
                problems.append(f"theta({k}) > |G| - k + 1")
            if t[k - 1] < math.ceil(self.meshulam_u[k - 1]):
                problems.append(f"theta({k}) < ceil(u({k}))")
        if problems:
            raise InvariantViolation("; ".join(problems), {"group": self.group.spec, "theta": list(t)})
        return True

    def to_rows(self) -> list:
        return [
            {"k": k, "theta": self.theta[k - 1], "method": self.method[k - 1], "u": self.meshulam_u[k - 1]}
            for k in range(1, self.group.order + 1)
        ]


def theta_profile(G: FiniteAbelianGroup, use_oracle: bool = False, **oracle_kwargs) -> ThetaProfile:
    n = G.order
    closed = None if use_oracle else _closed_profile(G)
    if closed is not None:
        thetas, methods = closed[0], (closed[1],) * n
    else:
        from .oracle import theta_oracle

        thetas = tuple(theta_oracle(k, G, **oracle_kwargs) for k in range(1, n + 1))
        methods = (ORACLE,) * n
    u = tuple(meshulam_bound(k, G) for k in range(1, n + 1))
    return ThetaProfile(G, thetas, methods, u)


def duality_check(k: int, G: FiniteAbelianGroup, profile: ThetaProfile | None = None) -> bool:
    """If theta(k) < theta(k-1), require theta(theta(k), G^) == k.

    Returns whether the hypothesis held; the dual group is identified with G.
    """
    if k < 2:
        raise OutOfRange("duality check needs k >= 2")
    profile = profile or theta_profile(G)
    if not profile[k] < profile[k - 1]:
        return False
    back = profile[profile[k]]
    if back != k:
        raise InvariantViolation(
            f"theta(theta({k})) = {back} != {k} on {G.spec}",
            {"group": G.spec, "k": k, "theta_k": profile[k], "theta_theta_k": back},
        )
    return True


# Donoho-Stark equality cases -------------------------------------------------


@dataclass(frozen=True)
class DonohoStarkDecomposition:
    """f = constant * chi_character * indicator(translation + subgroup)."""

    subgroup: Subgroup
    translation: tuple
    character: tuple
    constant: CycNum

    def reconstruct(self) -> GroupFunction:
        G = self.subgroup.group
        vals = {}
        for h in self.subgroup.members:
            x = G.add(self.translation, h)
            vals[x] = self.constant.times_root(G.pairing_exponent(x, self.character))
        return GroupFunction(G, vals)


def donoho_stark_classify(f: GroupFunction) -> DonohoStarkDecomposition | None:
    """Decompose an equality case of |supp f| * |supp f^| >= |G|.

    Canonical parameters: translation = smallest support point, character =
    smallest index realising the phase pattern on the subgroup.
    """
    if f.is_zero():
        raise ValueError("f must be nonzero")
    G = f.group
    supp = sorted(f.support)
    if len(supp) * len(dft(f).support) != G.order:
        return None
    a = supp[0]
    H = generated_subgroup(G, [G.sub(x, a) for x in supp])
    fa = f.values[a]
    inv = fa.inverse()
    char = None
    if H.order == len(supp):
        ratios = {G.sub(x, a): f.values[x] * inv for x in supp}
        N = G.exponent
        for y in G.elements:
            if all(r == root_of_unity(G.pairing_exponent(h, y), N) for h, r in ratios.items()):
                char = y
                break
    if char is None:
        raise InvariantViolation(
            f"equality case of the product inequality that is not a modulated coset indicator on {G.spec}",
            {"function": f.to_json()},
        )
    c = fa.times_root(-G.pairing_exponent(a, char))
    dec = DonohoStarkDecomposition(H, a, char, c)
    if dec.reconstruct() != f:
        raise InvariantViolation("Donoho-Stark reconstruction mismatch", {"function": f.to_json()})
    return dec
