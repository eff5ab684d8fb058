"""Equality cases of Meshulam's function for Z_p, Z_q x Z_p, Z_p x Z_p, Z_{p^2}.

Every family is built from a Tao equality case g on Z_p: a pair (A, B) with
|A| + |B| = p + 1 carries a unique line of functions with support A and
spectrum B, and ``construct_zp`` returns its member whose value at min(A)
is 1.  A descriptor stores the combinatorial data (A, B, shifts, characters,
directions) plus one scalar ``alpha``; rebuilding it reproduces the
classified function exactly, not just up to a scalar.

Family tags
-----------
ZP_GENERIC                 Z_p, any Tao pair (A, B).
TP_F_TENSOR_DIRAC          Z_q x Z_p, g (x) delta_b, |supp g| = k <= q.
TP_CHAR_TENSOR_F           Z_q x Z_p, chi_c (x) h, k = q r.
TP_DIRAC_TENSOR_F          Z_q x Z_p, delta_a (x) h, |supp h| = k <= p.
TP_F_TENSOR_CHAR           Z_q x Z_p, g (x) chi_c, k = p r.
TP_EXCEPTIONAL_EITHER      Z_q x Z_p at k = q r with r = (p+1)/(q+1); form
                           'char_tensor' or 'dirac_tensor'.
TP_DIFF_PAIR               Z_q x Z_p at k = pq - 1, f^ = alpha chi_c (delta_x - delta_y)
                           with x - y of order pq.  The group is cyclic, so this
                           is the analogue of PSQ_DIFF_PAIR; it is an equality
                           case although theta does not drop at pq - 1.
VEC_AM_TENSOR_DIRAC        Z_p x Z_p, L(g (x) delta_b) with L(1, 0) = d.
VEC_AM_TENSOR_CHAR         Z_p x Z_p, L(g (x) chi_c) with L(0, 1) = d.
PSQ_COSET_G                Z_{p^2}, f(p x + a) = g(x), zero off a + H.
PSQ_CHAR_G                 Z_{p^2}, f(n) = chi_Y(n) g(n mod p).
PSQ_DIFF_PAIR              Z_{p^2}, f^ = alpha chi_c (delta_x - delta_y).

A family member is admitted only when its spectrum size equals theta(k, G)
(size gating); the tag ranges follow the classification theorems.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import lru_cache
from fractions import Fraction

from .cyclotomic import CycNum, root_of_unity
from .errors import (
    BadSizes,
    InvariantViolation,
    NotDiagonalForm,
    SideConditionViolated,
    SingularTransform,
    UnsupportedGroup,
)
from .groups import FiniteAbelianGroup
from .oracle import as_indices, dft_block, enumerate_E0
from .cyclotomic import rank_kernel
from .transform import (
    GroupFunction,
    am_determinant,
    am_matrix,
    dft,
    idft,
    linear_transform,
    _mat_inverse2,
)
from .uncertainty import Family, family_of, theta_closed, theta_profile

ZP_GENERIC = "ZP_GENERIC"
TP_F_TENSOR_DIRAC = "TP_F_TENSOR_DIRAC"
TP_CHAR_TENSOR_F = "TP_CHAR_TENSOR_F"
TP_DIRAC_TENSOR_F = "TP_DIRAC_TENSOR_F"
TP_F_TENSOR_CHAR = "TP_F_TENSOR_CHAR"
TP_EXCEPTIONAL_EITHER = "TP_EXCEPTIONAL_EITHER"
TP_DIFF_PAIR = "TP_DIFF_PAIR"
VEC_AM_TENSOR_DIRAC = "VEC_AM_TENSOR_DIRAC"
VEC_AM_TENSOR_CHAR = "VEC_AM_TENSOR_CHAR"
PSQ_COSET_G = "PSQ_COSET_G"
PSQ_CHAR_G = "PSQ_CHAR_G"
PSQ_DIFF_PAIR = "PSQ_DIFF_PAIR"

TWO_PRIME_TAGS = (TP_F_TENSOR_DIRAC, TP_CHAR_TENSOR_F, TP_DIRAC_TENSOR_F, TP_F_TENSOR_CHAR, TP_EXCEPTIONAL_EITHER, TP_DIFF_PAIR)
VECTOR_TAGS = (VEC_AM_TENSOR_DIRAC, VEC_AM_TENSOR_CHAR)
PRIME_SQUARE_TAGS = (PSQ_COSET_G, PSQ_CHAR_G, PSQ_DIFF_PAIR)
ALL_TAGS = (ZP_GENERIC,) + TWO_PRIME_TAGS + VECTOR_TAGS + PRIME_SQUARE_TAGS

CHAR_TENSOR = "char_tensor"
DIRAC_TENSOR = "dirac_tensor"


class NotExtremal:
    """Returned by :func:`classify` for functions that are not equality cases."""

    __slots__ = ("support_size", "spectrum_size", "theta")

    def __init__(self, support_size: int, spectrum_size: int, theta: int):
        self.support_size = support_size
        self.spectrum_size = spectrum_size
        self.theta = theta

    def __bool__(self):
        return False

    def __repr__(self):
        return f"NotExtremal(|supp|={self.support_size}, |spec|={self.spectrum_size}, theta={self.theta})"

    def to_json(self) -> dict:
        return {"family": None, "k": self.support_size, "spectrum": self.spectrum_size, "theta": self.theta}


@dataclass(frozen=True)
class EqualityCaseDescriptor:
    family: str
    group: FiniteAbelianGroup
    k: int
    params: dict = field(hash=False, compare=False)
    representative: GroupFunction = field(hash=False, compare=False, default=None)

    def build(self) -> GroupFunction:
        return construct(self.family, self.group, self.params)

    def to_json(self) -> dict:
        params = {}
        for key, val in sorted(self.params.items()):
            if isinstance(val, CycNum):
                val = val.to_json()
            elif isinstance(val, tuple):
                val = list(val)
            params[key] = val
        rep = self.representative if self.representative is not None else self.build()
        return {
            "family": self.family,
            "group": self.group.spec,
            "k": self.k,
            "params": params,
            "representative": rep.to_json(),
        }


# Tao equality cases on Z_p --------------------------------------------------------


@lru_cache(maxsize=None)
def _zp_group(p: int) -> FiniteAbelianGroup:
    return FiniteAbelianGroup(((p, 1),))


@lru_cache(maxsize=None)
def _construct_zp_cached(A: tuple, B: tuple, p: int) -> GroupFunction:
    G = _zp_group(p)
    rows = [y for y in range(p) if y not in B]
    if not rows:
        f = GroupFunction.delta(G, A[0])
    else:
        rk, basis = rank_kernel(dft_block(G, rows, A))
        if len(basis) != 1:
            raise InvariantViolation(
                f"E(A, B) on Z{p} has dimension {len(basis)}, expected 1",
                {"A": list(A), "B": list(B)},
            )
        f = GroupFunction(G, {(a,): v for a, v in zip(A, basis[0])})
    f = f.normalized()
    if as_indices(G, f.support) != A or as_indices(G, dft(f).support) != B:
        raise InvariantViolation(
            f"Tao equality case on Z{p} with wrong support or spectrum",
            {"A": list(A), "B": list(B), "function": f.to_json()},
        )
    return f


def construct_zp(A, B, p: int) -> GroupFunction:
    """The member of the line E(A, B) on Z_p whose value at min(A) is 1."""
    A = tuple(sorted({int(a) % p for a in A}))
    B = tuple(sorted({int(b) % p for b in B}))
    if not A or not B or len(A) + len(B) != p + 1:
        raise BadSizes(f"need |A| + |B| = p + 1 = {p + 1}, got {len(A)} + {len(B)}")
    return _construct_zp_cached(A, B, p)


def tao_pairs(p: int, k: int):
    """All (A, B) on Z_p with |A| = k and |B| = p - k + 1."""
    for A in itertools.combinations(range(p), k):
        for B in itertools.combinations(range(p), p - k + 1):
            yield A, B


def _alpha(params: dict, level: int) -> CycNum:
    a = params.get("alpha", 1)
    if isinstance(a, CycNum):
        return a.lift(level) if a.level != level else a
    return CycNum.rational(a, level)


def _check_sizes(f: GroupFunction, k: int, family: str):
    G = f.group
    th = theta_closed(k, G)[0]
    s = len(dft(f).support)
    if len(f.support) != k or s != th:
        raise SideConditionViolated(
            f"{family} member has |supp| = {len(f.support)}, |spec| = {s}; an equality case needs {k} and theta = {th}"
        )
    return f


# Z_q x Z_p ------------------------------------------------------------------------


def exceptional_r(q: int, p: int):
    """r = (p + 1)/(q + 1) when it is an integer, else None."""
    return (p + 1) // (q + 1) if (p + 1) % (q + 1) == 0 else None


def _two_primes_group(q: int, p: int) -> FiniteAbelianGroup:
    if not q < p:
        raise UnsupportedGroup(f"two-prime families need the smaller prime first, got Z{q}xZ{p}")
    return FiniteAbelianGroup(((q, 1), (p, 1)))


def _tensor_on(G: FiniteAbelianGroup, u: dict, v: dict, alpha: CycNum) -> GroupFunction:
    """(x1, x2) -> alpha u(x1) v(x2), with u, v given as {coord: CycNum-or-root-exponent}."""
    vals = {}
    for x1, a in u.items():
        for x2, b in v.items():
            vals[(x1, x2)] = alpha * a * b
    return GroupFunction(G, vals)


def _lifted(g: GroupFunction, N: int) -> dict:
    return {x[0]: v.lift(N) for x, v in g.values.items()}


def _char_values(c: int, m: int, N: int) -> dict:
    return {x: root_of_unity(x * c * (N // m), N) for x in range(m)}


def _dirac_values(b: int, N: int) -> dict:
    return {b: CycNum.one(N)}


def construct_two_primes(family: str, params: dict, q: int, p: int) -> GroupFunction:
    """Build a member of a Z_q x Z_p family and check it is an equality case.

    params: "A", "B" for the Tao pair of the non-trivial factor, "shift" for
    a Dirac position, "char" for a character index, optional "alpha", and for
    TP_EXCEPTIONAL_EITHER a "form" in {'char_tensor', 'dirac_tensor'}.
    """
    G = _two_primes_group(q, p)
    N = G.exponent
    alpha = _alpha(params, N)
    if family == TP_DIFF_PAIR:
        return _check_sizes(_diff_pair(G, params, alpha), G.order - 1, family)
    form = family
    if family == TP_EXCEPTIONAL_EITHER:
        r = exceptional_r(q, p)
        if r is None:
            raise SideConditionViolated(f"(p + 1)/(q + 1) = {Fraction(p + 1, q + 1)} is not an integer")
        form = {CHAR_TENSOR: TP_CHAR_TENSOR_F, DIRAC_TENSOR: TP_DIRAC_TENSOR_F}.get(params.get("form"))
        if form is None:
            raise SideConditionViolated("TP_EXCEPTIONAL_EITHER needs form 'char_tensor' or 'dirac_tensor'")
        size = len(params["A"])
        k_expected = q * r
        if (form == TP_CHAR_TENSOR_F and size != r) or (form == TP_DIRAC_TENSOR_F and size != k_expected):
            raise SideConditionViolated(f"exceptional form {params['form']} needs k = q r = {k_expected}")
    if form == TP_F_TENSOR_DIRAC:
        g = construct_zp(params["A"], params["B"], q)
        f = _tensor_on(G, _lifted(g, N), _dirac_values(params["shift"] % p, N), alpha)
        k = len(g)
        if k > q:
            raise SideConditionViolated("TP_F_TENSOR_DIRAC needs k <= q")
    elif form == TP_DIRAC_TENSOR_F:
        h = construct_zp(params["A"], params["B"], p)
        f = _tensor_on(G, _dirac_values(params["shift"] % q, N), _lifted(h, N), alpha)
        k = len(h)
    elif form == TP_CHAR_TENSOR_F:
        h = construct_zp(params["A"], params["B"], p)
        f = _tensor_on(G, _char_values(params["char"] % q, q, N), _lifted(h, N), alpha)
        k = q * len(h)
    elif form == TP_F_TENSOR_CHAR:
        g = construct_zp(params["A"], params["B"], q)
        f = _tensor_on(G, _lifted(g, N), _char_values(params["char"] % p, p, N), alpha)
        k = p * len(g)
    else:
        raise SideConditionViolated(f"unknown two-prime family {family!r}")
    return _check_sizes(f, k, family)


def _diff_pair(G: FiniteAbelianGroup, params: dict, alpha: CycNum) -> GroupFunction:
    """idft(alpha chi_c (delta_x - delta_y)) on a cyclic G, x - y a generator."""
    x, y = G.coerce(params["x"]), G.coerce(params["y"])
    if G.element_order(G.sub(x, y)) != G.order:
        raise SideConditionViolated(f"x - y = {G.sub(x, y)} does not generate {G.spec}")
    c = G.coerce(params.get("c", 0))
    fh = GroupFunction(G, {x: alpha.times_root(G.pairing_exponent(c, x)), y: -alpha.times_root(G.pairing_exponent(c, y))})
    return idft(fh)


def _diff_pair_params(f: GroupFunction):
    """(x, y, c) with f^ proportional to chi_c (delta_x - delta_y), or None."""
    G = f.group
    fh = dft(f)
    if len(fh) != 2:
        return None
    x, y = sorted(fh.values)
    d = G.sub(y, x)
    if G.element_order(d) != G.order:
        return None
    ratio = -(fh.values[y] / fh.values[x])
    N = G.exponent
    for c in G.elements:
        if ratio == root_of_unity(G.pairing_exponent(c, d), N):
            return x, y, c
    return None


# Z_p x Z_p ------------------------------------------------------------------------


def canonical_directions(p: int) -> tuple:
    """One nonzero vector per line through 0 in Z_p^2: (1, t) then (0, 1)."""
    return tuple((1, t) for t in range(p)) + ((0, 1),)


def normalize_direction(d, p: int) -> tuple:
    d = (d[0] % p, d[1] % p)
    if d == (0, 0):
        raise SingularTransform("direction must be nonzero")
    inv = pow(d[0] if d[0] else d[1], -1, p)
    return (d[0] * inv % p, d[1] * inv % p)


def dirac_transform(d, p: int):
    """(matrix, m) with matrix (1, 0) = d: A(d) if invertible, else a shear (m None)."""
    d = (d[0] % p, d[1] % p)
    if am_determinant(d, p):
        return am_matrix(d, p), d
    return ((d[0], 0), (d[1], 1)), None


def char_transform(d, p: int):
    """(matrix, m) with matrix (0, 1) = d: A(m) for m = (d2, -d1) if invertible, else a shear."""
    d = (d[0] % p, d[1] % p)
    m = (d[1], -d[0] % p)
    if am_determinant(m, p):
        return am_matrix(m, p), m
    return ((1, d[0]), (0, d[1])), None


def construct_vector_case(family: str, params: dict, p: int) -> GroupFunction:
    """L applied to g (x) delta_b or g (x) chi_c on Z_p x Z_p.

    params: "A", "B" (Tao pair for g), "shift" or "char", "direction" d,
    optional "alpha".  The matrix L is A(m) whenever that sends the base line
    onto the line through d; otherwise a shear does.
    """
    G = FiniteAbelianGroup(((p, 1), (p, 1)))
    N = G.exponent
    alpha = _alpha(params, N)
    g = construct_zp(params["A"], params["B"], p)
    d = params.get("direction", (1, 0))
    if family == VEC_AM_TENSOR_DIRAC:
        if len(g) > p:
            raise SideConditionViolated("VEC_AM_TENSOR_DIRAC needs k <= p")
        L, _ = dirac_transform(d, p)
        base = _tensor_on(G, _lifted(g, N), _dirac_values(params["shift"] % p, N), alpha)
        k = len(g)
    elif family == VEC_AM_TENSOR_CHAR:
        L, _ = char_transform(d, p)
        base = _tensor_on(G, _lifted(g, N), _char_values(params["char"] % p, p, N), alpha)
        k = p * len(g)
    else:
        raise SideConditionViolated(f"unknown vector family {family!r}")
    return _check_sizes(linear_transform(base, L), k, family)


# Z_{p^2} --------------------------------------------------------------------------


def construct_prime_square(family: str, params: dict, p: int) -> GroupFunction:
    """Members of the Z_{p^2} families; H = p Z_{p^2} throughout.

    PSQ_COSET_G: "A", "B" (Tao pair on Z_p), "coset" a in [0, p).
    PSQ_CHAR_G: "A", "B", "char" Y; f(n) = zeta^(Y n) g(n mod p).
    PSQ_DIFF_PAIR: "x", "y", "c"; f = idft(alpha chi_c (delta_x - delta_y)),
    chi_c(xi) = zeta^(c xi), with x - y outside H.
    """
    n = p * p
    G = FiniteAbelianGroup(((p, 2),))
    alpha = _alpha(params, n)
    if family == PSQ_COSET_G:
        g = construct_zp(params["A"], params["B"], p)
        a = params["coset"] % p
        f = GroupFunction(G, {(p * x[0] + a,): alpha * v.lift(n) for x, v in g.values.items()})
        k = len(g)
    elif family == PSQ_CHAR_G:
        g = construct_zp(params["A"], params["B"], p)
        Y = params["char"] % n
        vals = {}
        for m in range(n):
            v = g.values.get((m % p,))
            if v is not None:
                vals[(m,)] = alpha * v.lift(n).times_root(Y * m)
        f = GroupFunction(G, vals)
        k = p * len(g)
    elif family == PSQ_DIFF_PAIR:
        x, y = params["x"] % n, params["y"] % n
        if (x - y) % p == 0:
            raise SideConditionViolated(f"x - y = {x - y} lies in H = {p}Z_{n}")
        f = _diff_pair(G, params, alpha)
        k = n - 1
    else:
        raise SideConditionViolated(f"unknown prime-square family {family!r}")
    return _check_sizes(f, k, family)


def construct(family: str, G: FiniteAbelianGroup, params: dict) -> GroupFunction:
    fam = family_of(G)
    if fam is None:
        raise UnsupportedGroup(f"no equality-case families on {G.spec}")
    if family == ZP_GENERIC and fam.kind == "zp":
        f = construct_zp(params["A"], params["B"], fam.p).scaled(_alpha(params, fam.p))
        return f
    if family in TWO_PRIME_TAGS and fam.kind == "two_primes":
        return construct_two_primes(family, params, fam.q, fam.p)
    if family in VECTOR_TAGS and fam.kind == "vector":
        return construct_vector_case(family, params, fam.p)
    if family in PRIME_SQUARE_TAGS and fam.kind == "prime_square":
        return construct_prime_square(family, params, fam.p)
    raise SideConditionViolated(f"family {family} does not live on {G.spec}")


# classification -------------------------------------------------------------------


def _proj(points, i) -> tuple:
    return tuple(sorted({x[i] for x in points}))


def _attempt(family: str, G: FiniteAbelianGroup, params: dict, f: GroupFunction):
    """Descriptor reproducing f exactly, or None if this family/params does not."""
    try:
        unit = construct(family, G, dict(params, alpha=1))
    except (BadSizes, SideConditionViolated, SingularTransform):
        return None
    x0 = min(f.values)
    if x0 not in unit.values:
        return None
    alpha = f.values[x0] / unit.values[x0]
    if unit.scaled(alpha) != f:
        return None
    params = dict(params, alpha=alpha)
    return EqualityCaseDescriptor(family, G, len(f), params, f)


def _two_prime_candidates(f: GroupFunction, q: int, p: int, k: int):
    supp, spec = f.support, dft(f).support
    S, T = _proj(supp, 0), _proj(supp, 1)
    Sh, Th = _proj(spec, 0), _proj(spec, 1)
    r_exc = exceptional_r(q, p)
    exceptional = r_exc is not None and k == q * r_exc
    if k <= q and len(T) == 1:
        yield TP_F_TENSOR_DIRAC, {"A": S, "B": Sh, "shift": T[0]}
    if k % p == 0 and len(Th) == 1:
        yield TP_F_TENSOR_CHAR, {"A": S, "B": Sh, "char": Th[0]}
    if k % q == 0 and len(Sh) == 1:
        params = {"A": T, "B": Th, "char": Sh[0]}
        yield (TP_EXCEPTIONAL_EITHER, dict(params, form=CHAR_TENSOR)) if exceptional else (TP_CHAR_TENSOR_F, params)
    if k <= p and len(S) == 1:
        params = {"A": T, "B": Th, "shift": S[0]}
        yield (TP_EXCEPTIONAL_EITHER, dict(params, form=DIRAC_TENSOR)) if exceptional else (TP_DIRAC_TENSOR_F, params)
    if k == p * q - 1:
        found = _diff_pair_params(f)
        if found is not None:
            x, y, c = found
            yield TP_DIFF_PAIR, {"x": x, "y": y, "c": c}


def _vector_candidates(f: GroupFunction, p: int, k: int):
    for d in canonical_directions(p):
        if k <= p:
            L, _ = dirac_transform(d, p)
            g = linear_transform(f, _mat_inverse2(L, p))
            supp, spec = g.support, dft(g).support
            T = _proj(supp, 1)
            if len(T) == 1:
                yield VEC_AM_TENSOR_DIRAC, {"A": _proj(supp, 0), "B": _proj(spec, 0), "shift": T[0], "direction": d}
        if k % p == 0:
            L, _ = char_transform(d, p)
            g = linear_transform(f, _mat_inverse2(L, p))
            spec = dft(g).support
            Th = _proj(spec, 1)
            if len(Th) == 1:
                yield VEC_AM_TENSOR_CHAR, {"A": _proj(g.support, 0), "B": _proj(spec, 0), "char": Th[0], "direction": d}


def _prime_square_candidates(f: GroupFunction, p: int, k: int):
    n = p * p
    supp = sorted(x[0] for x in f.support)
    spec = sorted(x[0] for x in dft(f).support)
    if k <= p:
        a = supp[0] % p
        if all(m % p == a for m in supp):
            yield PSQ_COSET_G, {"A": tuple(m // p for m in supp), "B": tuple(sorted({m % p for m in spec})), "coset": a}
    if k % p == 0:
        Y = spec[0] % p
        if all((m - Y) % p == 0 for m in spec):
            yield PSQ_CHAR_G, {
                "A": tuple(sorted({m % p for m in supp})),
                "B": tuple(sorted((m - Y) // p for m in spec)),
                "char": Y,
            }
    if k == n - 1 and len(spec) == 2:
        found = _diff_pair_params(f)
        if found is not None:
            x, y, c = found
            yield PSQ_DIFF_PAIR, {"x": x[0], "y": y[0], "c": c[0]}


def _candidates(f: GroupFunction, fam: Family, k: int):
    if fam.kind == "zp":
        yield ZP_GENERIC, {"A": tuple(x[0] for x in sorted(f.support)), "B": tuple(x[0] for x in sorted(dft(f).support))}
    elif fam.kind == "two_primes":
        yield from _two_prime_candidates(f, fam.q, fam.p, k)
    elif fam.kind == "vector":
        yield from _vector_candidates(f, fam.p, k)
    else:
        yield from _prime_square_candidates(f, fam.p, k)


def _supported_family(G: FiniteAbelianGroup) -> Family:
    fam = family_of(G)
    if fam is None or not fam.ordered:
        raise UnsupportedGroup(f"{G.spec} is outside the classified families (Z_p, Z_q x Z_p with q < p, Z_p x Z_p, Z_p^2)")
    return fam


def classify(f: GroupFunction):
    """Descriptor of an equality case, or a falsy NotExtremal.

    Families are tried in a fixed order and the first exact reconstruction
    wins.  An equality case that matches no family raises InvariantViolation.
    """
    if f.is_zero():
        raise ValueError("f must be nonzero")
    G = f.group
    fam = _supported_family(G)
    k = len(f)
    th = theta_closed(k, G)[0]
    s = len(dft(f).support)
    if s != th:
        return NotExtremal(k, s, th)
    for family, params in _candidates(f, fam, k):
        desc = _attempt(family, G, params, f)
        if desc is not None:
            return desc
    raise InvariantViolation(
        f"equality case on {G.spec} with k = {k} matches no family",
        {"group": G.spec, "k": k, "function": f.to_json()},
    )


def tensor_factors(desc: EqualityCaseDescriptor):
    """(g, h, kind) with the classified Z_q x Z_p function equal to g (x) h.

    kind names which factor is a character or a Dirac mass.
    """
    fam = family_of(desc.group)
    if fam is None or fam.kind != "two_primes":
        raise UnsupportedGroup("tensor factorisation applies to Z_q x Z_p")
    q, p = fam.q, fam.p
    P = desc.params
    family = desc.family
    if family == TP_EXCEPTIONAL_EITHER:
        family = TP_CHAR_TENSOR_F if P["form"] == CHAR_TENSOR else TP_DIRAC_TENSOR_F
    Gq, Gp = _zp_group(q), _zp_group(p)
    if family == TP_F_TENSOR_DIRAC:
        return construct_zp(P["A"], P["B"], q), GroupFunction.delta(Gp, P["shift"]), "dirac_right"
    if family == TP_F_TENSOR_CHAR:
        return construct_zp(P["A"], P["B"], q), GroupFunction.character(Gp, P["char"]), "char_right"
    if family == TP_CHAR_TENSOR_F:
        return GroupFunction.character(Gq, P["char"]), construct_zp(P["A"], P["B"], p), "char_left"
    return GroupFunction.delta(Gq, P["shift"]), construct_zp(P["A"], P["B"], p), "dirac_left"


# the diagonal lemma on Z_{p^2} -------------------------------------------------------


@dataclass(frozen=True)
class DiagonalVerdict:
    k: int
    spectrum_size: int
    bound: int
    zeros: int
    branch: str  # 'bound' or 'one_zero'


def diagonal_support_check(f: GroupFunction) -> DiagonalVerdict:
    """Spectrum bound for sums of Diracs at points with distinct residues mod p.

    Either |spec f| >= p (p - k + 2), or k = 2 and f^ has exactly one zero.
    """
    G = f.group
    fam = family_of(G)
    if fam is None or fam.kind != "prime_square":
        raise NotDiagonalForm(f"{G.spec} is not Z_(p^2)")
    p = fam.p
    residues = [x[0] % p for x in f.support]
    k = len(residues)
    if k < 2 or len(set(residues)) != k:
        raise NotDiagonalForm("need at least two support points with pairwise distinct residues mod p")
    s = len(dft(f).support)
    bound = p * (p - k + 2)
    zeros = G.order - s
    if s >= bound:
        return DiagonalVerdict(k, s, bound, zeros, "bound")
    if k == 2 and zeros == 1:
        return DiagonalVerdict(k, s, bound, zeros, "one_zero")
    raise InvariantViolation(
        f"diagonal-form function with k = {k} has spectrum {s} < {bound}",
        {"function": f.to_json(), "spectrum_size": s, "bound": bound},
    )


def random_diagonal_function(G: FiniteAbelianGroup, k: int, rng) -> GroupFunction:
    from .transform import random_value

    p = family_of(G).p
    residues = rng.choice(p, size=k, replace=False)
    vals = {}
    for r in residues:
        n = int(r) + p * int(rng.integers(0, p))
        vals[(n,)] = random_value(rng, G.exponent)
    return GroupFunction(G, vals)


# family generators --------------------------------------------------------------------


def family_members(G: FiniteAbelianGroup, k: int):
    """Every descriptor (alpha = 1) of the families on G at this k.

    Constructions failing the size gate are skipped; distinct descriptors
    may describe the same line.
    """
    fam = _supported_family(G)
    out = []

    def add(family, params):
        try:
            f = construct(family, G, params)
        except SideConditionViolated:
            return
        out.append(EqualityCaseDescriptor(family, G, k, dict(params, alpha=1), f))

    if fam.kind == "zp":
        for A, B in tao_pairs(fam.p, k):
            add(ZP_GENERIC, {"A": A, "B": B})
        return out
    p = fam.p
    if fam.kind == "two_primes":
        q = fam.q
        r_exc = exceptional_r(q, p)
        exceptional = r_exc is not None and k == q * r_exc
        if k <= q:
            for A, B in tao_pairs(q, k):
                for b in range(p):
                    add(TP_F_TENSOR_DIRAC, {"A": A, "B": B, "shift": b})
        if k % p == 0 and k // p <= q:
            for A, B in tao_pairs(q, k // p):
                for c in range(p):
                    add(TP_F_TENSOR_CHAR, {"A": A, "B": B, "char": c})
        if k % q == 0 and k // q <= p:
            for A, B in tao_pairs(p, k // q):
                for c in range(q):
                    params = {"A": A, "B": B, "char": c}
                    if exceptional:
                        add(TP_EXCEPTIONAL_EITHER, dict(params, form=CHAR_TENSOR))
                    else:
                        add(TP_CHAR_TENSOR_F, params)
        if k <= p:
            for A, B in tao_pairs(p, k):
                for a in range(q):
                    params = {"A": A, "B": B, "shift": a}
                    if exceptional:
                        add(TP_EXCEPTIONAL_EITHER, dict(params, form=DIRAC_TENSOR))
                    else:
                        add(TP_DIRAC_TENSOR_F, params)
        if k == G.order - 1:
            els = G.elements
            for i, x in enumerate(els):
                for y in els[i + 1:]:
                    if G.element_order(G.sub(x, y)) == G.order:
                        for c in els:
                            add(TP_DIFF_PAIR, {"x": x, "y": y, "c": c})
        return out
    if fam.kind == "vector":
        for d in canonical_directions(p):
            if k <= p:
                for A, B in tao_pairs(p, k):
                    for b in range(p):
                        add(VEC_AM_TENSOR_DIRAC, {"A": A, "B": B, "shift": b, "direction": d})
            if k % p == 0:
                for A, B in tao_pairs(p, k // p):
                    for c in range(p):
                        add(VEC_AM_TENSOR_CHAR, {"A": A, "B": B, "char": c, "direction": d})
        return out
    n = p * p
    if k <= p:
        for A, B in tao_pairs(p, k):
            for a in range(p):
                add(PSQ_COSET_G, {"A": A, "B": B, "coset": a})
    if k % p == 0:
        for A, B in tao_pairs(p, k // p):
            for Y in range(p):
                add(PSQ_CHAR_G, {"A": A, "B": B, "char": Y})
    if k == n - 1:
        for x in range(n):
            for y in range(x + 1, n):
                if (y - x) % p:
                    for c in range(n):
                        add(PSQ_DIFF_PAIR, {"x": x, "y": y, "c": c})
    return out


def paper_predicts_equality(G: FiniteAbelianGroup, k: int, profile=None) -> bool:
    """The stated existence rule: a strict drop of theta at k, plus k = p^2 - 1 on Z_{p^2}."""
    profile = profile or theta_profile(G)
    if profile.has_drop(k):
        return True
    fam = family_of(G)
    return fam is not None and fam.kind == "prime_square" and k == G.order - 1


@dataclass
class ClassificationRow:
    k: int
    theta: int
    predicted: bool
    family_lines: int
    observed_pairs: int
    observed_lines: int
    classified: dict
    lines_match: bool

    @property
    def observed(self) -> bool:
        return self.observed_pairs > 0

    @property
    def rule_agrees(self) -> bool:
        return self.predicted == self.observed

    def to_json(self) -> dict:
        return {
            "k": self.k,
            "theta": self.theta,
            "predicted": self.predicted,
            "observed": self.observed,
            "observed_pairs": self.observed_pairs,
            "observed_lines": self.observed_lines,
            "family_lines": self.family_lines,
            "classified": dict(sorted(self.classified.items())),
            "lines_match": self.lines_match,
            "rule_agrees": self.rule_agrees,
        }


def verify_k(G: FiniteAbelianGroup, k: int, profile=None, cap=None) -> ClassificationRow:
    """Compare E_0(k, theta(k)) with the family constructions at one k."""
    profile = profile or theta_profile(G)
    th = profile[k]
    entries = enumerate_E0(k, th, G, cap=cap, theta_value=th)
    observed = {}
    counts = {}
    for e in entries:
        f = e.function
        desc = classify(f)
        if not desc:
            raise InvariantViolation(
                f"enumerated equality case on {G.spec} at k = {k} is not extremal",
                {"group": G.spec, "k": k, "function": f.to_json()},
            )
        key = desc.family if desc.family != TP_EXCEPTIONAL_EITHER else f"{desc.family}:{desc.params['form']}"
        counts[key] = counts.get(key, 0) + 1
        observed[f.line_key()] = f
    constructed = {d.representative.line_key() for d in family_members(G, k)}
    match = constructed == set(observed)
    row = ClassificationRow(
        k=k,
        theta=th,
        predicted=paper_predicts_equality(G, k, profile),
        family_lines=len(constructed),
        observed_pairs=len(entries),
        observed_lines=len(observed),
        classified=counts,
        lines_match=match,
    )
    if not match:
        def order(key):
            return [(x, str(v.to_json())) for x, v in key]

        missing = sorted(constructed - set(observed), key=order)
        extra = sorted(set(observed) - constructed, key=order)
        witness = (missing or extra)[0]
        raise InvariantViolation(
            f"E_0 lines and family lines differ on {G.spec} at k = {k}",
            {
                "group": G.spec,
                "k": k,
                "missing_from_enumeration": len(missing),
                "not_constructed": len(extra),
                "witness": [[list(x), v.to_json()] for x, v in witness],
            },
        )
    return row


def verify_classification(G: FiniteAbelianGroup, cap=None, ks=None) -> list:
    """One ClassificationRow per k (all k by default)."""
    _supported_family(G)
    profile = theta_profile(G)
    ks = range(1, G.order + 1) if ks is None else ks
    return [verify_k(G, k, profile, cap) for k in ks]
