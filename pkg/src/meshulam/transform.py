"""Functions on a finite Abelian group and their exact Fourier transforms.

The transform is  f^(y) = sum_x f(x) * zeta_N^(-<x, y>),  its inverse
f(x) = |G|^-1 sum_y g(y) zeta_N^(<x, y>).  Functions only store nonzero
values, so the support is the key set and never depends on rounding.
"""

from __future__ import annotations

import math
from fractions import Fraction
from functools import reduce
from typing import Iterable, Mapping

import numpy as np

from .cyclotomic import CycNum, field, from_cyclic_counts, root_of_unity
from .errors import LevelMismatch, ShapeMismatch, SingularTransform, UnsupportedGroup
from .groups import FiniteAbelianGroup, direct_product, parse_group


class GroupFunction:
    """Finitely supported map G -> Q(zeta_N), N the exponent of G."""

    __slots__ = ("group", "values")

    def __init__(self, group: FiniteAbelianGroup, values: Mapping | None = None):
        N = group.exponent
        clean = {}
        for x, v in (values or {}).items():
            x = group.coerce(x)
            if not isinstance(v, CycNum):
                v = CycNum.rational(v, N)
            elif v.level != N:
                raise LevelMismatch(f"value at {x} lives in Q(zeta_{v.level}), expected Q(zeta_{N})")
            if v:
                clean[x] = v
        self.group = group
        self.values = clean

    # constructors -------------------------------------------------------

    @classmethod
    def delta(cls, G: FiniteAbelianGroup, a=None) -> "GroupFunction":
        a = G.zero if a is None else G.coerce(a)
        return cls(G, {a: CycNum.one(G.exponent)})

    @classmethod
    def indicator(cls, G: FiniteAbelianGroup, points: Iterable) -> "GroupFunction":
        one = CycNum.one(G.exponent)
        return cls(G, {G.coerce(x): one for x in points})

    @classmethod
    def constant(cls, G: FiniteAbelianGroup, c=1) -> "GroupFunction":
        c = c if isinstance(c, CycNum) else CycNum.rational(c, G.exponent)
        return cls(G, {x: c for x in G.elements})

    @classmethod
    def character(cls, G: FiniteAbelianGroup, y) -> "GroupFunction":
        y = G.coerce(y)
        N = G.exponent
        return cls(G, {x: root_of_unity(G.pairing_exponent(x, y), N) for x in G.elements})

    # access -------------------------------------------------------------

    @property
    def level(self) -> int:
        return self.group.exponent

    def __call__(self, x) -> CycNum:
        x = self.group.coerce(x)
        return self.values.get(x) or CycNum.zero(self.level)

    @property
    def support(self) -> frozenset:
        return frozenset(self.values)

    def support_indices(self) -> tuple:
        return tuple(sorted(self.group.index(x) for x in self.values))

    def items(self):
        return sorted(self.values.items())

    def is_zero(self) -> bool:
        return not self.values

    def __len__(self):
        return len(self.values)

    def __eq__(self, other):
        if not isinstance(other, GroupFunction):
            return NotImplemented
        return self.group == other.group and self.values == other.values

    def __hash__(self):
        return hash((self.group, frozenset(self.values.items())))

    def __repr__(self):
        body = ", ".join(f"{x}: {v}" for x, v in self.items())
        return f"GroupFunction[{self.group.spec}]({{{body}}})"

    # arithmetic ---------------------------------------------------------

    def _same(self, other: "GroupFunction"):
        if self.group != other.group:
            raise ShapeMismatch(f"functions live on different groups {self.group} and {other.group}")

    def __add__(self, other: "GroupFunction") -> "GroupFunction":
        self._same(other)
        out = dict(self.values)
        for x, v in other.values.items():
            out[x] = out[x] + v if x in out else v
        return GroupFunction(self.group, out)

    def __neg__(self):
        return GroupFunction(self.group, {x: -v for x, v in self.values.items()})

    def __sub__(self, other):
        return self + (-other)

    def scaled(self, c) -> "GroupFunction":
        if not isinstance(c, CycNum):
            c = CycNum.rational(c, self.level)
        return GroupFunction(self.group, {x: v * c for x, v in self.values.items()})

    def pointwise(self, other: "GroupFunction") -> "GroupFunction":
        self._same(other)
        return GroupFunction(self.group, {x: v * other.values[x] for x, v in self.values.items() if x in other.values})

    def normalized(self) -> "GroupFunction":
        """Scalar multiple whose value at the smallest support point is 1."""
        if not self.values:
            return self
        lead = self.values[min(self.values)]
        return self.scaled(lead.inverse())

    def line_key(self) -> tuple:
        """Hashable identifier of the line C*f."""
        return tuple(self.normalized().items())

    def norm2(self) -> CycNum:
        acc = CycNum.zero(self.level)
        for v in self.values.values():
            acc = acc + v.abs2()
        return acc

    # serialisation ------------------------------------------------------

    def to_json(self) -> dict:
        return {
            "group": self.group.spec,
            "values": [[list(x), v.to_json()] for x, v in self.items()],
        }

    @classmethod
    def from_json(cls, data: Mapping) -> "GroupFunction":
        G = parse_group(data["group"])
        return cls(G, {tuple(x): CycNum.from_json(v, G.exponent) for x, v in data["values"]})


def _common_denominator(values: Iterable[CycNum]) -> int:
    return reduce(math.lcm, (v.den for v in values), 1)


def _transform(f: GroupFunction, sign: int) -> dict:
    """Return {y: sum_x f(x) zeta^(sign*<x,y>)} with zero values dropped."""
    G = f.group
    N = G.exponent
    if not f.values:
        return {}
    D = _common_denominator(f.values.values())
    terms = [(G.index(x), [c * (D // v.den) for c in v.num]) for x, v in f.values.items()]
    table = G.pairing_table
    out = {}
    for iy, y in enumerate(G.elements):
        counts = [0] * N
        row = table[iy]
        for ix, num in terms:
            e = sign * int(row[ix])
            for i, c in enumerate(num):
                if c:
                    counts[(i + e) % N] += c
        val = from_cyclic_counts(counts, N, D)
        if val:
            out[y] = val
    return out


def dft(f: GroupFunction) -> GroupFunction:
    return GroupFunction(f.group, _transform(f, -1))


def idft(g: GroupFunction) -> GroupFunction:
    n = g.group.order
    vals = _transform(g, +1)
    inv = Fraction(1, n)
    return GroupFunction(g.group, {x: v * inv for x, v in vals.items()})


def support(f: GroupFunction) -> frozenset:
    return f.support


def spectrum(f: GroupFunction) -> frozenset:
    return dft(f).support


def translate(f: GroupFunction, a) -> GroupFunction:
    """x -> f(x - a)."""
    G = f.group
    a = G.coerce(a)
    return GroupFunction(G, {G.add(x, a): v for x, v in f.values.items()})


def modulate(f: GroupFunction, y) -> GroupFunction:
    """x -> chi_y(x) f(x); shifts the spectrum by y."""
    G = f.group
    y = G.coerce(y)
    return GroupFunction(G, {x: v.times_root(G.pairing_exponent(x, y)) for x, v in f.values.items()})


def reflect(f: GroupFunction) -> GroupFunction:
    G = f.group
    return GroupFunction(G, {G.neg(x): v for x, v in f.values.items()})


def scale_argument(f: GroupFunction, u: int) -> GroupFunction:
    """x -> f(u^-1 x) for a unit u modulo the exponent (an automorphism)."""
    G = f.group
    if math.gcd(u, G.exponent) != 1:
        raise SingularTransform(f"{u} is not a unit modulo {G.exponent}")
    return GroupFunction(G, {G.scale(u, x): v for x, v in f.values.items()})


def tensor(f1: GroupFunction, f2: GroupFunction) -> GroupFunction:
    """(f1 x f2)(x1, x2) = f1(x1) f2(x2) on G1 x G2."""
    G = direct_product(f1.group, f2.group)
    N = G.exponent
    vals = {}
    for x1, v1 in f1.values.items():
        a = v1.lift(N)
        for x2, v2 in f2.values.items():
            vals[x1 + x2] = a * v2.lift(N)
    return GroupFunction(G, vals)


def lift_values(f: GroupFunction, G: FiniteAbelianGroup, embed) -> GroupFunction:
    """Transport f to G along the injective map ``embed``, lifting values to G's level."""
    N = G.exponent
    return GroupFunction(G, {embed(x): v.lift(N) for x, v in f.values.items()})


# Z_p x Z_p linear actions -------------------------------------------------


def _vector_prime(G: FiniteAbelianGroup) -> int:
    if len(G.factors) != 2 or G.factors[0] != G.factors[1] or G.factors[0][1] != 1:
        raise UnsupportedGroup(f"{G.spec} is not Z_p x Z_p")
    return G.factors[0][0]


def am_matrix(m, p: int) -> tuple:
    m1, m2 = m[0] % p, m[1] % p
    return ((m1, -m2 % p), (m2, m1))


def am_determinant(m, p: int) -> int:
    return (m[0] * m[0] + m[1] * m[1]) % p


def am_inverse_param(m, p: int) -> tuple:
    """m~ = (m1^2 + m2^2)^-1 (m1, -m2), so that A(m)^-1 = A(m~)."""
    d = am_determinant(m, p)
    if d == 0:
        raise SingularTransform(f"A{tuple(m)} is singular modulo {p}")
    inv = pow(d, -1, p)
    return (m[0] * inv % p, -m[1] * inv % p)


def _mat_inverse2(L, p: int) -> tuple:
    (a, b), (c, d) = L
    det = (a * d - b * c) % p
    if det == 0:
        raise SingularTransform(f"matrix {L} is singular modulo {p}")
    inv = pow(det, -1, p)
    return ((d * inv % p, -b * inv % p), (-c * inv % p, a * inv % p))


def linear_transform(f: GroupFunction, L) -> GroupFunction:
    """g(x) = f(L^-1 x) on Z_p x Z_p for an invertible 2x2 matrix L."""
    G = f.group
    p = _vector_prime(G)
    _mat_inverse2(L, p)
    (a, b), (c, d) = L
    return GroupFunction(G, {((a * x1 + b * x2) % p, (c * x1 + d * x2) % p): v for (x1, x2), v in f.values.items()})


def am_transform(f: GroupFunction, m) -> GroupFunction:
    """g(x) = f(A(m)^-1 x); preserves support and spectrum sizes."""
    p = _vector_prime(f.group)
    if am_determinant(m, p) == 0:
        raise SingularTransform(f"m1^2 + m2^2 = 0 mod {p} for m = {tuple(m)}")
    return linear_transform(f, am_matrix(m, p))


def line_transform_matrix(m, p: int) -> tuple:
    """An invertible matrix sending (1, 0) to m.

    A(m) when it is invertible; otherwise (m1^2 + m2^2 = 0, which forces
    m1 != 0) the shear [[m1, 0], [m2, 1]].
    """
    m = (m[0] % p, m[1] % p)
    if m == (0, 0):
        raise SingularTransform("direction vector must be nonzero")
    if am_determinant(m, p):
        return am_matrix(m, p)
    return ((m[0], 0), (m[1], 1))


# random functions for property checks -------------------------------------


def random_value(rng: np.random.Generator, N: int, max_int: int = 3) -> CycNum:
    """Small nonzero element: a rational times a root of unity plus noise."""
    phi = field(N).phi
    if rng.random() < 0.5:
        c = int(rng.integers(1, max_int + 1)) * (1 if rng.random() < 0.5 else -1)
        return root_of_unity(int(rng.integers(0, N)), N) * c
    while True:
        num = [int(v) for v in rng.integers(-max_int, max_int + 1, size=phi)]
        den = int(rng.integers(1, max_int + 1))
        val = CycNum(N, num, den)
        if val:
            return val


def random_function(G: FiniteAbelianGroup, rng: np.random.Generator, size: int | None = None) -> GroupFunction:
    n = G.order
    if size is None:
        size = int(rng.integers(1, n + 1))
    idx = rng.choice(n, size=size, replace=False)
    return GroupFunction(G, {G.elements[int(i)]: random_value(rng, G.exponent) for i in idx})
