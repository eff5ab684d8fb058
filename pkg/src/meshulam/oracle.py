"""Brute-force search for theta(k, G) and for the equality cases E_0(k, l).

For a support A the spectrum can be made as small as l exactly when some
B of size l leaves the extracted Fourier block (rows outside B, columns A)
rank deficient.  The search only looks at

* supports A up to translation and unit scaling x -> u x (both preserve
  support and spectrum sizes), taking one canonical representative per
  orbit, and
* spectra B containing 0 (modulating f translates its spectrum).

Blocks are screened in batches with floating-point singular values; every
block the screen does not clearly reject is decided by exact rank over
Q(zeta_N).
"""

from __future__ import annotations

import itertools
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .cyclotomic import CycMatrix, rank, rank_kernel, singular_ratio
from .errors import GroupTooLarge, InvariantViolation, OutOfRange
from .groups import FiniteAbelianGroup
from .transform import GroupFunction, dft, modulate, scale_argument, translate

DEFAULT_ORACLE_CAP = 16
MAX_ORACLE_CAP = 25
SCREEN_THRESHOLD = 1e-6
BATCH = 4096


def oracle_cap(override: int | None = None) -> int:
    if override is None:
        env = os.environ.get("FAG_ORACLE_CAP")
        override = int(env) if env else DEFAULT_ORACLE_CAP
    if override > MAX_ORACLE_CAP:
        raise GroupTooLarge(f"oracle cap {override} exceeds the hard limit {MAX_ORACLE_CAP}")
    return override


def _check_cap(G: FiniteAbelianGroup, cap: int | None):
    cap = oracle_cap(cap)
    if G.order > cap:
        raise GroupTooLarge(f"|{G.spec}| = {G.order} exceeds the oracle cap {cap}")


def as_indices(G: FiniteAbelianGroup, S) -> tuple:
    return tuple(sorted({G.index(G.coerce(x)) for x in S}))


# index arithmetic tables -----------------------------------------------------


@lru_cache(maxsize=None)
def _tables(G: FiniteAbelianGroup):
    els = G.elements
    add = np.array([[G.index(G.add(x, y)) for y in els] for x in els], dtype=np.int64)
    neg = np.array([G.index(G.neg(x)) for x in els], dtype=np.int64)
    scale = {u: np.array([G.index(G.scale(u, x)) for x in els], dtype=np.int64) for u in G.units}
    inverse_unit = {u: pow(u, -1, G.exponent) if G.exponent > 1 else 1 for u in G.units}
    return add, neg, scale, inverse_unit


def _canonical(G: FiniteAbelianGroup, S: tuple, use_units: bool = True) -> tuple:
    """Smallest sorted index tuple in the orbit of S under translation and units."""
    add, neg, scale, _ = _tables(G)
    units = G.units if use_units else (1,)
    best = None
    for a in S:
        shifted = add[list(S), neg[a]]
        for u in units:
            cand = tuple(sorted(scale[u][shifted].tolist())) if u != 1 else tuple(sorted(shifted.tolist()))
            if best is None or cand < best:
                best = cand
    return best


@lru_cache(maxsize=None)
def support_representatives(G: FiniteAbelianGroup, k: int, use_units: bool = True) -> tuple:
    """One k-subset (containing 0) per orbit of translations and unit scalings."""
    n = G.order
    if not 1 <= k <= n:
        raise OutOfRange(f"k = {k} outside [1, {n}]")
    reps = []
    for rest in itertools.combinations(range(1, n), k - 1):
        S = (0,) + rest
        if _canonical(G, S, use_units) == S:
            reps.append(S)
    return tuple(reps)


def _spectra_through_zero(n: int, l: int):
    """All l-subsets of range(n) containing 0, in lexicographic order."""
    for rest in itertools.combinations(range(1, n), l - 1):
        yield (0,) + rest


def _batched(it, size):
    it = iter(it)
    while True:
        chunk = list(itertools.islice(it, size))
        if not chunk:
            return
        yield chunk


def _complements(n: int, Bs: np.ndarray) -> np.ndarray:
    mask = np.ones((len(Bs), n), dtype=bool)
    np.put_along_axis(mask, Bs, False, axis=1)
    return np.nonzero(mask)[1].reshape(len(Bs), n - Bs.shape[1])


# extracted blocks ---------------------------------------------------------------


def dft_block(G: FiniteAbelianGroup, rows, cols) -> CycMatrix:
    """Exact block (zeta^-<x, y>)_{y in rows, x in cols}: its kernel is E(A, B)."""
    exps = (-G.pairing_table[np.ix_(list(rows), list(cols))]) % G.exponent
    return CycMatrix.from_exponents(exps, G.exponent)


def _screen(G: FiniteAbelianGroup, A: tuple, Zs: np.ndarray) -> np.ndarray:
    """Indices of row sets whose block is not clearly of full column rank."""
    if Zs.shape[1] < len(A):
        return np.arange(len(Zs))
    F = G.fourier_matrix
    blocks = F[Zs][:, :, list(A)]
    return np.nonzero(singular_ratio(blocks) < SCREEN_THRESHOLD)[0]


def eab_dimension(A, B, G: FiniteAbelianGroup) -> int:
    """dim of {f : supp f in A, spectrum in B}, by exact rank."""
    A = as_indices(G, A)
    B = set(as_indices(G, B))
    if not A or not B:
        raise ValueError("A and B must be nonempty")
    rows = [i for i in range(G.order) if i not in B]
    if not rows:
        return len(A)
    return len(A) - rank(dft_block(G, rows, A))


def min_spectrum_for_support(A, G: FiniteAbelianGroup, cap: int | None = None, upper: int | None = None):
    """Least |spectrum f| over nonzero f with supp f inside A.

    With ``upper`` set, returns None as soon as it is clear the answer is
    not below ``upper``.
    """
    _check_cap(G, cap)
    A = as_indices(G, A)
    if not A:
        raise ValueError("A must be nonempty")
    n, k = G.order, len(A)
    for l in range(1, n + 1):
        if upper is not None and l >= upper:
            return None
        if n - l < k:
            return l
        for chunk in _batched(_spectra_through_zero(n, l), BATCH):
            Bs = np.array(chunk, dtype=np.int64)
            Zs = _complements(n, Bs)
            for i in _screen(G, A, Zs):
                if rank(dft_block(G, Zs[i], A)) < k:
                    return l
    return n


def _oracle_worker(args):
    G, reps, cap = args
    best = None
    for A in reps:
        v = min_spectrum_for_support(A, G, cap=cap, upper=best)
        if v is not None:
            best = v
    return best


def theta_oracle(k: int, G: FiniteAbelianGroup, cap: int | None = None, jobs: int = 1) -> int:
    """theta(k, G) by exhaustive search, independent of any closed form."""
    _check_cap(G, cap)
    if not 1 <= k <= G.order:
        raise OutOfRange(f"k = {k} outside [1, {G.order}]")
    reps = support_representatives(G, k)
    if jobs <= 1 or len(reps) < 2:
        return _oracle_worker((G, reps, cap))
    chunks = [reps[i::jobs] for i in range(jobs)]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        results = [r for r in pool.map(_oracle_worker, [(G, c, cap) for c in chunks if c]) if r is not None]
    return min(results)


# equality cases -------------------------------------------------------------------


@dataclass(frozen=True)
class E0Entry:
    """One pair (A, B) of E_0(k, l) with a representative (normalised) function."""

    support: tuple
    spectrum: tuple
    function: GroupFunction

    def key(self, G: FiniteAbelianGroup) -> tuple:
        return as_indices(G, self.support), as_indices(G, self.spectrum)

    def to_json(self) -> dict:
        return {
            "A": [list(x) for x in self.support],
            "B": [list(y) for y in self.spectrum],
            "representative": self.function.to_json(),
        }


def _generic_member(G: FiniteAbelianGroup, basis, A: tuple, B: tuple):
    """A kernel combination with support exactly A and spectrum exactly B, or None."""
    dim = len(basis)
    for t in range(1, 4 * G.order * dim + 2):
        coeffs = [t**i for i in range(dim)]
        vec = [sum((b[j] * c for b, c in zip(basis, coeffs)), basis[0][j] * 0) for j in range(len(A))]
        f = GroupFunction(G, {G.elements[a]: v for a, v in zip(A, vec)})
        if as_indices(G, f.support) == A and as_indices(G, dft(f).support) == B:
            return f
        if dim == 1:
            return None
    return None


def _e0_worker(args):
    G, reps, l, expect_line = args
    n = G.order
    found = []
    for A in reps:
        k = len(A)
        for chunk in _batched(_spectra_through_zero(n, l), BATCH):
            Bs = np.array(chunk, dtype=np.int64)
            if l == n:
                cands = [(tuple(Bs[0].tolist()), None)]
            else:
                Zs = _complements(n, Bs)
                cands = [(tuple(Bs[i].tolist()), Zs[i]) for i in _screen(G, A, Zs)]
            for B, Z in cands:
                if Z is None:
                    rk, basis = 0, _identity_basis(G, k)
                else:
                    rk, basis = rank_kernel(dft_block(G, Z, A))
                if not basis:
                    continue
                if expect_line and len(basis) > 1:
                    raise InvariantViolation(
                        f"E(A, B) of dimension {len(basis)} at l = theta on {G.spec}",
                        {"group": G.spec, "A": list(A), "B": list(B), "dimension": len(basis)},
                    )
                f = _generic_member(G, basis, A, B)
                if f is not None:
                    found.append((A, B, f.normalized()))
    return found


def _identity_basis(G, k):
    from .cyclotomic import CycNum

    N = G.exponent
    return [tuple(CycNum.one(N) if i == j else CycNum.zero(N) for j in range(k)) for i in range(k)]


def _expand_orbit(G: FiniteAbelianGroup, A: tuple, B: tuple, f: GroupFunction, out: dict):
    add, neg, scale, inverse_unit = _tables(G)
    for u in G.units:
        uA = scale[u][list(A)]
        uB = scale[inverse_unit[u]][list(B)]
        fu = scale_argument(f, u) if u != 1 else f
        for a in range(G.order):
            A2 = tuple(sorted(add[uA, a].tolist()))
            fa = None
            for y in range(G.order):
                B2 = tuple(sorted(add[uB, y].tolist()))
                if (A2, B2) in out:
                    continue
                if fa is None:
                    fa = translate(fu, G.elements[a])
                out[(A2, B2)] = modulate(fa, G.elements[y]).normalized()


def enumerate_E0(
    k: int,
    l: int,
    G: FiniteAbelianGroup,
    cap: int | None = None,
    jobs: int = 1,
    expand: bool = True,
    theta_value: int | None = None,
    line_check: bool = True,
) -> list:
    """All (A, B), |A| = k, |B| = l, carrying f with supp f = A and spectrum B.

    When l equals theta(k, G) every E(A, B) met must be a line; a larger
    kernel aborts with InvariantViolation.  With ``expand=False`` only the
    symmetry-reduced pairs actually searched are returned.  ``line_check``
    switches the one-dimensional-kernel assertion off, for groups where it
    is not a theorem.
    """
    _check_cap(G, cap)
    n = G.order
    if not (1 <= k <= n and 1 <= l <= n):
        raise OutOfRange(f"k = {k}, l = {l} must lie in [1, {n}]")
    if theta_value is None:
        from .uncertainty import theta_closed

        closed = theta_closed(k, G)
        theta_value = closed[0] if closed is not None else None
    expect_line = line_check and theta_value is not None and l == theta_value
    reps = support_representatives(G, k)
    if jobs <= 1 or len(reps) < 2:
        raw = _e0_worker((G, reps, l, expect_line))
    else:
        chunks = [reps[i::jobs] for i in range(jobs)]
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            parts = list(pool.map(_e0_worker, [(G, c, l, expect_line) for c in chunks if c]))
        raw = sorted((item for part in parts for item in part), key=lambda t: (t[0], t[1]))
    pairs = {}
    if expand:
        for A, B, f in raw:
            _expand_orbit(G, A, B, f, pairs)
    else:
        for A, B, f in raw:
            pairs.setdefault((A, B), f)
    els = G.elements
    return [
        E0Entry(tuple(els[i] for i in A), tuple(els[i] for i in B), pairs[(A, B)])
        for A, B in sorted(pairs)
    ]
