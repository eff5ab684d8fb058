"""Finite Abelian groups written as products of prime-power cyclic groups.

Elements and characters are plain tuples of reduced residues; the dual group
is identified with the group itself through the pairing

    chi_y(x) = zeta_N ** pairing_exponent(x, y),
    pairing_exponent(x, y) = sum_j x_j * y_j * (N / m_j)  (mod N),

where ``m_j`` are the factor moduli and ``N`` is their lcm.
"""

from __future__ import annotations

import itertools
import math
import re
from dataclasses import dataclass, field
from functools import cached_property, lru_cache
from typing import Iterable, Sequence

import numpy as np

from .errors import GroupTooLarge, MalformedSpec, NotPrimePower, ShapeMismatch

Element = tuple  # tuple[int, ...] of reduced residues

ENUMERATION_CAP = 10**6

_TERM = re.compile(r"Z([0-9]+)")


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n < 4:
        return True
    if n % 2 == 0:
        return False
    d = 3
    while d * d <= n:
        if n % d == 0:
            return False
        d += 2
    return True


def prime_power(n: int):
    """Return ``(p, e)`` with ``n == p**e`` and ``p`` prime, or None."""
    if n < 2:
        return None
    p = 2
    while p * p <= n and n % p:
        p += 1
    if n % p:
        p = n
    e = 0
    m = n
    while m % p == 0:
        m //= p
        e += 1
    if m != 1 or not is_prime(p):
        return None
    return p, e


@dataclass(frozen=True)
class FiniteAbelianGroup:
    """Z_{p_1^{n_1}} x ... x Z_{p_r^{n_r}}, factors kept in written order."""

    factors: tuple

    def __post_init__(self):
        if not self.factors:
            raise MalformedSpec("a group needs at least one cyclic factor")
        for p, n in self.factors:
            if not is_prime(p) or n < 1:
                raise NotPrimePower(f"invalid factor Z{p}^{n}")

    @classmethod
    def from_moduli(cls, moduli: Iterable[int]) -> "FiniteAbelianGroup":
        factors = []
        for m in moduli:
            pp = prime_power(m)
            if pp is None:
                raise NotPrimePower(f"Z{m}: {m} is not a prime power; write it as a product of prime-power factors")
            factors.append(pp)
        return cls(tuple(factors))

    @cached_property
    def moduli(self) -> tuple:
        return tuple(p**n for p, n in self.factors)

    @cached_property
    def order(self) -> int:
        return math.prod(self.moduli)

    @cached_property
    def exponent(self) -> int:
        return math.lcm(*self.moduli)

    @property
    def rank(self) -> int:
        return len(self.factors)

    def __len__(self):
        return self.order

    def __str__(self):
        return self.spec

    @property
    def spec(self) -> str:
        return "x".join(f"Z{m}" for m in self.moduli)

    @property
    def is_cyclic(self) -> bool:
        return self.exponent == self.order

    @property
    def zero(self) -> Element:
        return (0,) * self.rank

    # element bookkeeping -------------------------------------------------

    @cached_property
    def elements(self) -> tuple:
        """All elements in lexicographic order; position == index."""
        if self.order > ENUMERATION_CAP:
            raise GroupTooLarge(f"|G| = {self.order} exceeds the enumeration cap {ENUMERATION_CAP}")
        return tuple(itertools.product(*(range(m) for m in self.moduli)))

    @cached_property
    def _strides(self) -> tuple:
        strides = []
        s = 1
        for m in reversed(self.moduli):
            strides.append(s)
            s *= m
        return tuple(reversed(strides))

    def index(self, x: Element) -> int:
        return sum(c * s for c, s in zip(self.check(x), self._strides))

    def element(self, i: int) -> Element:
        return self.elements[i]

    def check(self, x: Sequence[int]) -> Element:
        if len(x) != self.rank:
            raise ShapeMismatch(f"element {tuple(x)} has {len(x)} coordinates, {self.spec} needs {self.rank}")
        return tuple(int(c) % m for c, m in zip(x, self.moduli))

    def coerce(self, x) -> Element:
        """Accept an index, a bare int (cyclic groups) or a coordinate tuple."""
        if isinstance(x, (int, np.integer)):
            if self.rank == 1:
                return (int(x) % self.moduli[0],)
            return self.element(int(x))
        return self.check(x)

    def add(self, x: Element, y: Element) -> Element:
        return tuple((a + b) % m for a, b, m in zip(x, y, self.moduli))

    def sub(self, x: Element, y: Element) -> Element:
        return tuple((a - b) % m for a, b, m in zip(x, y, self.moduli))

    def neg(self, x: Element) -> Element:
        return tuple(-a % m for a, m in zip(x, self.moduli))

    def scale(self, u: int, x: Element) -> Element:
        return tuple(u * a % m for a, m in zip(x, self.moduli))

    def element_order(self, x: Element) -> int:
        return math.lcm(*(m // math.gcd(a, m) for a, m in zip(x, self.moduli)))

    @cached_property
    def units(self) -> tuple:
        """Integers u in [1, N) coprime to N; x -> u*x is an automorphism."""
        N = self.exponent
        return tuple(u for u in range(1, N) if math.gcd(u, N) == 1) or (1,)

    # characters ----------------------------------------------------------

    @cached_property
    def _weights(self) -> tuple:
        return tuple(self.exponent // m for m in self.moduli)

    def pairing_exponent(self, x: Element, y: Element) -> int:
        if len(x) != self.rank or len(y) != self.rank:
            raise ShapeMismatch("element and character must both have one coordinate per factor")
        return sum(a * b * w for a, b, w in zip(x, y, self._weights)) % self.exponent

    @cached_property
    def pairing_table(self) -> np.ndarray:
        """``table[iy, ix] = pairing_exponent(x, y)`` over element indices."""
        els = np.array(self.elements, dtype=np.int64).reshape(self.order, self.rank)
        weighted = els * np.array(self._weights, dtype=np.int64)
        table = (els @ weighted.T) % self.exponent
        table.setflags(write=False)
        return table

    @cached_property
    def fourier_matrix(self) -> np.ndarray:
        """Complex matrix of chi_y(x), rows indexed by characters."""
        return np.exp(2j * np.pi * self.pairing_table / self.exponent)

    def translate_indices(self, idx: Iterable[int], a: Element) -> tuple:
        return tuple(sorted(self.index(self.add(self.elements[i], a)) for i in idx))


@lru_cache(maxsize=None)
def parse_group(spec: str) -> FiniteAbelianGroup:
    """Parse ``Z<n>`` terms joined by ``x``, e.g. ``Z2xZ5``."""
    if not isinstance(spec, str) or not spec:
        raise MalformedSpec("empty group spec")
    moduli = []
    for term in spec.split("x"):
        m = _TERM.fullmatch(term)
        if m is None:
            raise MalformedSpec(f"bad term {term!r} in group spec {spec!r}; expected Z<n> terms joined by 'x'")
        moduli.append(int(m.group(1)))
    return FiniteAbelianGroup.from_moduli(moduli)


def direct_product(G1: FiniteAbelianGroup, G2: FiniteAbelianGroup) -> FiniteAbelianGroup:
    return FiniteAbelianGroup(G1.factors + G2.factors)


@dataclass(frozen=True)
class Subgroup:
    group: FiniteAbelianGroup
    members: tuple
    generators: tuple = field(default=())

    def __post_init__(self):
        object.__setattr__(self, "members", tuple(sorted(set(self.members))))

    def __contains__(self, x) -> bool:
        return tuple(x) in self._memberset

    def __len__(self):
        return len(self.members)

    def __iter__(self):
        return iter(self.members)

    @cached_property
    def _memberset(self) -> frozenset:
        return frozenset(self.members)

    @property
    def order(self) -> int:
        return len(self.members)

    @property
    def indices(self) -> tuple:
        return tuple(self.group.index(x) for x in self.members)

    def is_closed(self) -> bool:
        G = self.group
        if G.zero not in self:
            return False
        return all(G.add(x, y) in self and G.neg(x) in self for x in self.members for y in self.members)

    def annihilator(self) -> "Subgroup":
        return annihilator(self)


def generated_subgroup(G: FiniteAbelianGroup, gens: Iterable[Element]) -> Subgroup:
    gens = tuple(G.check(g) for g in gens)
    members = {G.zero}
    frontier = [G.zero]
    while frontier:
        nxt = []
        for x in frontier:
            for g in gens:
                y = G.add(x, g)
                if y not in members:
                    members.add(y)
                    nxt.append(y)
        frontier = nxt
    return Subgroup(G, tuple(members), gens)


def enumerate_cyclic_subgroups(G: FiniteAbelianGroup) -> list:
    """Every subgroup <m>, deduplicated, sorted by (order, members)."""
    seen = {}
    for m in G.elements:
        H = generated_subgroup(G, [m])
        if H.members not in seen:
            seen[H.members] = H
    return sorted(seen.values(), key=lambda H: (H.order, H.members))


def coset(G: FiniteAbelianGroup, a: Element, H: Subgroup) -> frozenset:
    a = G.check(a)
    return frozenset(G.add(a, h) for h in H.members)


def annihilator(H: Subgroup) -> Subgroup:
    """Characters trivial on H, computed from the pairing."""
    G = H.group
    members = tuple(y for y in G.elements if all(G.pairing_exponent(h, y) == 0 for h in H.members))
    return Subgroup(G, members)


def enumerate_subgroups(G: FiniteAbelianGroup) -> list:
    """Every subgroup, as joins of cyclic subgroups, sorted by (order, members)."""
    cyclic = enumerate_cyclic_subgroups(G)
    found = {H.members: H for H in cyclic}
    frontier = list(cyclic)
    while frontier:
        nxt = []
        for H in frontier:
            for C in cyclic:
                if set(C.members) <= set(H.members):
                    continue
                J = generated_subgroup(G, H.members[1:] + C.members[1:])
                if J.members not in found:
                    found[J.members] = J
                    nxt.append(J)
        frontier = nxt
    return sorted(found.values(), key=lambda H: (H.order, H.members))
