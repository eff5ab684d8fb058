"""Exact arithmetic in Q(zeta_N) and exact linear algebra over it.

A ``CycNum`` stores ``num / den`` where ``num`` is the integer coefficient
vector in the power basis 1, z, ..., z^(phi-1) of Q[X]/(Phi_N).  The
representation is canonical (content of ``num`` coprime to ``den`` and
``den > 0``), so equality and the zero test are plain tuple comparisons.
"""

from __future__ import annotations

import cmath
import itertools
import math
from fractions import Fraction
from functools import lru_cache, reduce
from typing import Iterable, Sequence

import numpy as np

from .errors import LevelMismatch, ShapeMismatch

DEFAULT_TOLERANCE = 1e-9


def _poly_divexact(num: list, den: Sequence[int]) -> list:
    """Exact quotient of integer polynomials (low-to-high), ``den`` monic."""
    num = list(num)
    dn = len(den) - 1
    q = [0] * (len(num) - dn)
    for i in range(len(num) - 1, dn - 1, -1):
        c = num[i]
        if c:
            q[i - dn] = c
            for j, d in enumerate(den):
                num[i - dn + j] -= c * d
    assert not any(num), "division was not exact"
    return q


@lru_cache(maxsize=None)
def cyclotomic_poly(N: int) -> tuple:
    """Phi_N as integer coefficients, lowest degree first."""
    if N < 1:
        raise ValueError("N must be >= 1")
    poly = [-1] + [0] * (N - 1) + [1]
    for d in range(1, N):
        if N % d == 0:
            poly = _poly_divexact(poly, cyclotomic_poly(d))
    return tuple(poly)


def euler_phi(N: int) -> int:
    return len(cyclotomic_poly(N)) - 1


class CyclotomicField:
    """Reduction tables for Q(zeta_N); obtain instances via ``field(N)``."""

    def __init__(self, N: int):
        self.N = N
        self.poly = cyclotomic_poly(N)
        self.phi = len(self.poly) - 1
        # X^phi == -sum_t poly[t] X^t
        self._tail = tuple((t, c) for t, c in enumerate(self.poly[:-1]) if c)
        self.xpow = tuple(tuple(self.reduce(self._monomial(e))) for e in range(N))
        self.units = tuple(j for j in range(N) if math.gcd(j, N) == 1)
        self._zero = (0,) * self.phi

    def _monomial(self, e: int) -> list:
        v = [0] * (e + 1)
        v[e] = 1
        return v

    def reduce(self, coeffs: list) -> list:
        """Reduce an integer coefficient list modulo Phi_N (in place)."""
        phi = self.phi
        for e in range(len(coeffs) - 1, phi - 1, -1):
            c = coeffs[e]
            if c:
                base = e - phi
                for t, ct in self._tail:
                    coeffs[base + t] -= c * ct
        if len(coeffs) < phi:
            coeffs = coeffs + [0] * (phi - len(coeffs))
        return coeffs[:phi]

    def reduce_cyclic(self, counts: Sequence[int]) -> list:
        """Reduce sum_e counts[e] * zeta^e (e in [0, N)) to the power basis."""
        phi = self.phi
        if len(counts) <= phi:
            return list(counts) + [0] * (phi - len(counts))
        return self.reduce(list(counts))

    def mul(self, a: Sequence[int], b: Sequence[int]) -> list:
        phi = self.phi
        conv = [0] * (2 * phi - 1)
        for i, x in enumerate(a):
            if x:
                for j, y in enumerate(b):
                    if y:
                        conv[i + j] += x * y
        return self.reduce(conv)

    def galois(self, a: Sequence[int], j: int) -> list:
        """Apply zeta -> zeta^j."""
        N = self.N
        counts = [0] * N
        for i, x in enumerate(a):
            if x:
                counts[i * j % N] += x
        return self.reduce_cyclic(counts)

    def shift(self, a: Sequence[int], e: int) -> list:
        """Multiply by zeta^e."""
        N = self.N
        counts = [0] * N
        for i, x in enumerate(a):
            if x:
                counts[(i + e) % N] += x
        return self.reduce_cyclic(counts)

    def integral_inverse(self, a: Sequence[int]):
        """Return ``(P, c)`` with ``a * P == c``, ``c`` a nonzero integer."""
        P = [1] + [0] * (self.phi - 1)
        for j in self.units:
            if j != 1 % self.N:
                P = self.mul(P, self.galois(a, j))
        prod = self.mul(a, P)
        assert not any(prod[1:]), "norm is not rational"
        return P, prod[0]


@lru_cache(maxsize=None)
def field(N: int) -> CyclotomicField:
    return CyclotomicField(N)


def _content(vals: Iterable[int]) -> int:
    g = 0
    for v in vals:
        if v:
            g = math.gcd(g, v)
            if g == 1:
                return 1
    return g


class CycNum:
    """Element of Q(zeta_N); immutable and hashable."""

    __slots__ = ("level", "num", "den")

    def __init__(self, level: int, num: Sequence[int], den: int = 1):
        F = field(level)
        if len(num) != F.phi:
            num = F.reduce(list(num))
        if den == 0:
            raise ZeroDivisionError("zero denominator")
        if den < 0:
            num = [-x for x in num]
            den = -den
        g = math.gcd(_content(num), den)
        if g == 0:
            num, den = (0,) * F.phi, 1
        elif g > 1:
            num = tuple(x // g for x in num)
            den //= g
        self.level = level
        self.num = tuple(num)
        self.den = den

    @classmethod
    def _raw(cls, level: int, num: tuple, den: int) -> "CycNum":
        obj = object.__new__(cls)
        obj.level = level
        obj.num = num
        obj.den = den
        return obj

    # constructors -------------------------------------------------------

    @classmethod
    def rational(cls, value, level: int) -> "CycNum":
        q = Fraction(value)
        phi = field(level).phi
        return cls(level, (q.numerator,) + (0,) * (phi - 1), q.denominator)

    @classmethod
    def zero(cls, level: int) -> "CycNum":
        return cls._raw(level, field(level)._zero, 1)

    @classmethod
    def one(cls, level: int) -> "CycNum":
        return root_of_unity(0, level)

    @classmethod
    def from_coeffs(cls, coeffs: Sequence, level: int) -> "CycNum":
        """Build from rational coefficients in the power basis."""
        qs = [Fraction(c) for c in coeffs]
        den = reduce(math.lcm, (q.denominator for q in qs), 1)
        return cls(level, [q.numerator * (den // q.denominator) for q in qs], den)

    # views --------------------------------------------------------------

    @property
    def coeffs(self) -> tuple:
        return tuple(Fraction(x, self.den) for x in self.num)

    def is_zero(self) -> bool:
        return not any(self.num)

    def __bool__(self):
        return not self.is_zero()

    def is_rational(self) -> bool:
        return not any(self.num[1:])

    def to_complex(self) -> complex:
        N = self.level
        return sum(x * cmath.exp(2j * math.pi * i / N) for i, x in enumerate(self.num) if x) / self.den

    def __repr__(self):
        terms = []
        for i, q in enumerate(self.coeffs):
            if q:
                terms.append(f"{q}" if i == 0 else f"{q}*z^{i}")
        return f"CycNum<{self.level}>({' + '.join(terms) or '0'})"

    def __eq__(self, other):
        if isinstance(other, CycNum):
            return self.level == other.level and self.num == other.num and self.den == other.den
        if isinstance(other, (int, Fraction)):
            q = Fraction(other)
            return self.is_rational() and Fraction(self.num[0], self.den) == q
        return NotImplemented

    def __hash__(self):
        return hash((self.level, self.num, self.den))

    # arithmetic ---------------------------------------------------------

    def _coerce(self, other) -> "CycNum":
        if isinstance(other, CycNum):
            if other.level != self.level:
                raise LevelMismatch(f"cannot combine Q(zeta_{self.level}) with Q(zeta_{other.level})")
            return other
        if isinstance(other, (int, Fraction)):
            return CycNum.rational(other, self.level)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        if self.den == other.den:
            return CycNum(self.level, [a + b for a, b in zip(self.num, other.num)], self.den)
        d1, d2 = self.den, other.den
        return CycNum(self.level, [a * d2 + b * d1 for a, b in zip(self.num, other.num)], d1 * d2)

    __radd__ = __add__

    def __neg__(self):
        return CycNum._raw(self.level, tuple(-a for a in self.num), self.den)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        F = field(self.level)
        return CycNum(self.level, F.mul(self.num, other.num), self.den * other.den)

    __rmul__ = __mul__

    def inverse(self) -> "CycNum":
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero in a cyclotomic field")
        P, c = field(self.level).integral_inverse(self.num)
        return CycNum(self.level, [x * self.den for x in P], c)

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self * other.inverse()

    def __rtruediv__(self, other):
        return self.inverse() * other

    def __pow__(self, n: int):
        if n < 0:
            return self.inverse() ** (-n)
        result = CycNum.one(self.level)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def galois(self, j: int) -> "CycNum":
        if math.gcd(j, self.level) != 1:
            raise ValueError(f"{j} is not a unit modulo {self.level}")
        return CycNum(self.level, field(self.level).galois(self.num, j % self.level), self.den)

    def conjugate(self) -> "CycNum":
        """Complex conjugation, zeta -> zeta^-1."""
        return self.galois(-1)

    def abs2(self) -> "CycNum":
        return self * self.conjugate()

    def times_root(self, e: int) -> "CycNum":
        """Multiply by zeta_N^e."""
        return CycNum._raw(self.level, tuple(field(self.level).shift(self.num, e)), self.den)

    def lift(self, M: int) -> "CycNum":
        """Embed into Q(zeta_M) via zeta_N = zeta_M^(M/N); explicit, never implicit."""
        if M % self.level:
            raise LevelMismatch(f"Q(zeta_{self.level}) does not embed in Q(zeta_{M})")
        if M == self.level:
            return self
        step = M // self.level
        counts = [0] * M
        for i, x in enumerate(self.num):
            if x:
                counts[i * step] += x
        return CycNum(M, field(M).reduce_cyclic(counts), self.den)

    # serialisation ------------------------------------------------------

    def to_json(self) -> list:
        return [[q.numerator, q.denominator] for q in self.coeffs]

    @classmethod
    def from_json(cls, data: list, level: int) -> "CycNum":
        return cls.from_coeffs([Fraction(n, d) for n, d in data], level)


def root_of_unity(e: int, N: int) -> CycNum:
    return CycNum._raw(N, field(N).xpow[e % N], 1)


def from_cyclic_counts(counts: Sequence[int], N: int, den: int = 1) -> CycNum:
    """``sum_e counts[e] zeta_N^e / den`` for ``len(counts) == N``."""
    return CycNum(N, field(N).reduce_cyclic(counts), den)


# matrices ---------------------------------------------------------------


class CycMatrix:
    """Dense matrix of CycNum entries at a single level."""

    def __init__(self, entries: Sequence[Sequence[CycNum]], level: int | None = None, cols: int | None = None):
        rows = [list(r) for r in entries]
        if level is None:
            if not rows or not rows[0]:
                raise ShapeMismatch("cannot infer the level of an empty matrix")
            level = rows[0][0].level
        ncols = cols if cols is not None else (len(rows[0]) if rows else 0)
        for r in rows:
            if len(r) != ncols:
                raise ShapeMismatch("ragged matrix")
            for x in r:
                if x.level != level:
                    raise LevelMismatch("matrix entries must share one level")
        self.level = level
        self.rows = len(rows)
        self.cols = ncols
        self.entries = rows

    @classmethod
    def from_exponents(cls, exps, N: int) -> "CycMatrix":
        exps = np.asarray(exps, dtype=np.int64)
        if exps.ndim != 2:
            raise ShapeMismatch("exponent array must be 2-dimensional")
        entries = [[root_of_unity(int(e), N) for e in row] for row in exps]
        return cls(entries, N, cols=exps.shape[1])

    @classmethod
    def identity(cls, n: int, level: int = 1) -> "CycMatrix":
        return cls([[CycNum.one(level) if i == j else CycNum.zero(level) for j in range(n)] for i in range(n)], level)

    def __getitem__(self, ij):
        i, j = ij
        return self.entries[i][j]

    @property
    def shape(self):
        return self.rows, self.cols

    def submatrix(self, rows: Sequence[int], cols: Sequence[int]) -> "CycMatrix":
        return CycMatrix([[self.entries[i][j] for j in cols] for i in rows], self.level, cols=len(cols))

    def matvec(self, v: Sequence[CycNum]) -> list:
        if len(v) != self.cols:
            raise ShapeMismatch("vector length does not match column count")
        out = []
        zero = CycNum.zero(self.level)
        for row in self.entries:
            acc = zero
            for a, x in zip(row, v):
                if a and x:
                    acc = acc + a * x
            out.append(acc)
        return out

    def to_complex(self) -> np.ndarray:
        out = np.zeros((self.rows, self.cols), dtype=complex)
        for i, row in enumerate(self.entries):
            for j, x in enumerate(row):
                out[i, j] = x.to_complex()
        return out


def _integral_rows(M: CycMatrix) -> list:
    """Scale each row by the lcm of its denominators; rank and kernel are unchanged."""
    out = []
    for row in M.entries:
        d = reduce(math.lcm, (x.den for x in row), 1)
        out.append([tuple(c * (d // x.den) for c in x.num) for x in row])
    return out


def _pivot_cost(v: tuple):
    nnz = 0
    big = 0
    for c in v:
        if c:
            nnz += 1
            if abs(c) > big:
                big = abs(c)
    return nnz, big


def _echelon(M: CycMatrix):
    """Fraction-free row echelon form over Z[zeta_N].

    Row updates are r_i <- p*r_i - a*r_p with the integer content divided
    out afterwards, so all coefficients stay integral and small.
    """
    F = field(M.level)
    rows = _integral_rows(M)
    nrows, ncols = M.rows, M.cols
    zero = F._zero
    pivots = []
    r = 0
    for c in range(ncols):
        if r == nrows:
            break
        best, best_cost = None, None
        for i in range(r, nrows):
            v = rows[i][c]
            if any(v):
                cost = _pivot_cost(v)
                if best is None or cost < best_cost:
                    best, best_cost = i, cost
        if best is None:
            continue
        rows[r], rows[best] = rows[best], rows[r]
        prow = rows[r]
        p = prow[c]
        for i in range(r + 1, nrows):
            row = rows[i]
            a = row[c]
            if not any(a):
                continue
            new = [zero] * ncols
            for j in range(c + 1, ncols):
                x = F.mul(p, row[j]) if any(row[j]) else None
                y = F.mul(a, prow[j]) if any(prow[j]) else None
                if x is None and y is None:
                    continue
                if y is None:
                    new[j] = tuple(x)
                elif x is None:
                    new[j] = tuple(-t for t in y)
                else:
                    new[j] = tuple(s - t for s, t in zip(x, y))
            g = _content(t for v in new for t in v)
            if g > 1:
                new = [tuple(t // g for t in v) for v in new]
            rows[i] = new
        pivots.append(c)
        r += 1
    return rows[:r], pivots


def rank(M: CycMatrix) -> int:
    if M.rows == 0 or M.cols == 0:
        return 0
    return len(_echelon(M)[1])


def rank_kernel(M: CycMatrix):
    """Exact rank and a normalised kernel basis.

    Kernel vectors come from the reduced echelon form (one per free column)
    and are then scaled so their first nonzero coordinate equals 1.
    """
    N = M.level
    if M.cols == 0:
        return 0, []
    if M.rows == 0:
        basis = []
        for f in range(M.cols):
            v = [CycNum.zero(N)] * M.cols
            v[f] = CycNum.one(N)
            basis.append(tuple(v))
        return 0, basis
    ech, pivots = _echelon(M)
    rk = len(pivots)
    free = [c for c in range(M.cols) if c not in set(pivots)]
    if not free:
        return rk, []
    R = [[CycNum(N, v, 1) for v in row] for row in ech]
    pinv = [R[i][pivots[i]].inverse() for i in range(rk)]
    basis = []
    for f in free:
        v = [CycNum.zero(N)] * M.cols
        v[f] = CycNum.one(N)
        for i in range(rk - 1, -1, -1):
            pc = pivots[i]
            s = CycNum.zero(N)
            for j in range(pc + 1, M.cols):
                if v[j] and R[i][j]:
                    s = s + R[i][j] * v[j]
            v[pc] = -(s * pinv[i])
        lead = next(x for x in v if x)
        if lead != 1:
            linv = lead.inverse()
            v = [x * linv for x in v]
        basis.append(tuple(v))
    return rk, basis


def determinant(M: CycMatrix) -> CycNum:
    """Exact determinant by Gaussian elimination over the field."""
    if M.rows != M.cols:
        raise ShapeMismatch("determinant of a non-square matrix")
    N = M.level
    a = [list(r) for r in M.entries]
    n = M.rows
    det = CycNum.one(N)
    for c in range(n):
        piv = next((i for i in range(c, n) if a[i][c]), None)
        if piv is None:
            return CycNum.zero(N)
        if piv != c:
            a[c], a[piv] = a[piv], a[c]
            det = -det
        det = det * a[c][c]
        inv = a[c][c].inverse()
        for i in range(c + 1, n):
            if a[i][c]:
                f = a[i][c] * inv
                for j in range(c + 1, n):
                    if a[c][j]:
                        a[i][j] = a[i][j] - f * a[c][j]
    return det


@lru_cache(maxsize=None)
def _signed_permutations(n: int) -> tuple:
    out = []
    for perm in itertools.permutations(range(n)):
        inv = sum(1 for i in range(n) for j in range(i + 1, n) if perm[i] > perm[j])
        out.append((perm, -1 if inv & 1 else 1))
    return tuple(out)


def monomial_determinant(exps, N: int) -> CycNum:
    """Exact det of (zeta_N^exps[i][j]) by the Leibniz expansion.

    Every term is a signed root of unity, so the sum is accumulated as a
    length-N integer vector and reduced modulo Phi_N once.
    """
    exps = [[int(e) % N for e in row] for row in exps]
    n = len(exps)
    counts = [0] * N
    for perm, sign in _signed_permutations(n):
        counts[sum(exps[i][perm[i]] for i in range(n)) % N] += sign
    return from_cyclic_counts(counts, N)


def float_rank_estimate(M, tolerance: float = DEFAULT_TOLERANCE) -> int:
    """Numerical rank; a pruning heuristic, never an authoritative answer."""
    if tolerance <= 0:
        raise ValueError("tolerance must be positive")
    A = M.to_complex() if isinstance(M, CycMatrix) else np.asarray(M, dtype=complex)
    if A.size == 0:
        return 0
    s = np.linalg.svd(A, compute_uv=False)
    if s[0] == 0:
        return 0
    return int(np.sum(s > tolerance * s[0]))


def singular_ratio(stack: np.ndarray) -> np.ndarray:
    """smallest/largest singular value for a stack of (rows >= cols) matrices."""
    s = np.linalg.svd(stack, compute_uv=False)
    return s[..., -1] / s[..., 0]
