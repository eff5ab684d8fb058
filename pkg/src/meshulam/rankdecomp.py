"""Extracted Fourier matrices M_{A,B} and their rank-one block decompositions.

M_{A,B} has rows indexed by the characters outside B and columns by A, with
entry chi_i(j) = zeta_N^<j, i>.  Its kernel (for the conjugate sign) is the
space E(A, B), so when |B| = theta(|A|) the rank is |A| or |A| - 1.  In the
second case the unique kernel line is an equality case f0 with support
A0 inside A and spectrum exactly B, and the matrix splits into |A| - 1
rank-one blocks:

* row groups: when A0 sits in one coset a0 + K, rows in the same coset of
  the annihilator of K are proportional; each group gives one block
  spanning all of A0;
* coset blocks: when A0 is a union of cosets of its stabiliser K and B lies
  in one coset y0 + K^perp, the blocks (a + K^perp) x (c + K) for a outside
  y0 + K^perp, then single rows {b} x A0 for the remaining b in y0 + K^perp;
* single rows: when there are only |A0| - 1 rows.

Columns of A outside A0 are appended as single-column blocks.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .cyclotomic import CycMatrix, monomial_determinant, rank, rank_kernel
from .errors import EmptyRowSet, FullRank, InvariantViolation, SideConditionViolated, UnsupportedGroup
from .groups import FiniteAbelianGroup, Subgroup, annihilator
from .oracle import as_indices, dft_block
from .transform import GroupFunction
from .uncertainty import family_of, theta_closed


@dataclass(frozen=True)
class ExtractedMatrix:
    group: FiniteAbelianGroup
    rows: tuple  # character indices outside B, increasing
    cols: tuple  # element indices of A, increasing
    exponents: np.ndarray  # exponents[r, c] = <cols[c], rows[r]> mod N

    @property
    def shape(self):
        return len(self.rows), len(self.cols)

    @property
    def matrix(self) -> CycMatrix:
        return CycMatrix.from_exponents(self.exponents, self.group.exponent)

    def block(self, rows, cols) -> np.ndarray:
        r = [self.rows.index(i) for i in rows]
        c = [self.cols.index(j) for j in cols]
        return self.exponents[np.ix_(r, c)]


def extract_matrix(A, B, G: FiniteAbelianGroup) -> ExtractedMatrix:
    A = as_indices(G, A)
    Bs = set(as_indices(G, B))
    if not A or not Bs:
        raise ValueError("A and B must be nonempty")
    rows = tuple(i for i in range(G.order) if i not in Bs)
    if not rows:
        raise EmptyRowSet("B is the whole dual group; the extracted matrix has no rows")
    exps = G.pairing_table[np.ix_(rows, A)].copy()
    exps.setflags(write=False)
    return ExtractedMatrix(G, rows, A, exps)


def rank_extracted(M: ExtractedMatrix, check: bool = True) -> int:
    """Exact rank; at |B| = theta(|A|) on a family group it must be k or k - 1."""
    r = rank(M.matrix)
    G = M.group
    k = len(M.cols)
    b = G.order - len(M.rows)
    if check and family_of(G) is not None:
        closed = theta_closed(k, G)
        if closed is not None and b == closed[0] and r not in (k - 1, k):
            raise InvariantViolation(
                f"rank {r} of M_(A,B) outside {{k-1, k}} with k = {k} on {G.spec}",
                {"group": G.spec, "A": list(M.cols), "rows": list(M.rows), "rank": r},
            )
    return r


def block_rank_at_most_one(exps: np.ndarray, N: int) -> bool:
    """Exact test for a block of roots of unity: every 2x2 minor vanishes.

    zeta^a zeta^d = zeta^b zeta^c iff a + d = b + c mod N, so it suffices to
    compare each row's exponents with the first row's, up to a constant shift.
    """
    if exps.size == 0:
        return True
    diff = (exps - exps[:1, :]) % N
    return bool(np.all(diff == diff[:, :1]))


@dataclass
class BlockDecomposition:
    group: FiniteAbelianGroup
    A: tuple
    B: tuple
    rank: int
    blocks: list  # list of (rows tuple, cols tuple), original indices
    translate: tuple
    modulate: tuple
    recipe: str

    def to_json(self) -> dict:
        return {
            "group": self.group.spec,
            "A": list(self.A),
            "B": list(self.B),
            "rank": self.rank,
            "recipe": self.recipe,
            "blocks": [{"rows": list(r), "cols": list(c)} for r, c in self.blocks],
            "normalization": {"translate": list(self.translate), "modulate": list(self.modulate)},
        }


def verify_decomposition(M: ExtractedMatrix, blocks) -> bool:
    """Exact partition of rows x cols into len(cols) - 1 blocks, each of rank one."""
    if isinstance(blocks, BlockDecomposition):
        blocks = blocks.blocks
    k = len(M.cols)
    if len(blocks) != k - 1:
        return False
    rowset, colset = set(M.rows), set(M.cols)
    seen = set()
    for rows, cols in blocks:
        if not rows or not cols:
            return False
        if not set(rows) <= rowset or not set(cols) <= colset:
            return False
        for cell in itertools.product(rows, cols):
            if cell in seen:
                return False
            seen.add(cell)
        if not block_rank_at_most_one(M.block(rows, cols), M.group.exponent):
            return False
    return len(seen) == len(M.rows) * k


# recipes ----------------------------------------------------------------------------


def _row_groups(G: FiniteAbelianGroup, rows, A0, a0):
    """Group rows by their exponent pattern on A0 - a0 (proportional rows)."""
    groups = {}
    shifted = [G.index(G.sub(G.elements[j], a0)) for j in A0]
    table = G.pairing_table
    for i in rows:
        key = tuple(int(table[i, j]) for j in shifted)
        groups.setdefault(key, []).append(i)
    return sorted((tuple(g), tuple(A0)) for g in groups.values())


def _stabiliser(G: FiniteAbelianGroup, S: set) -> Subgroup:
    members = [h for h in G.elements if all(G.index(G.add(G.elements[s], h)) in S for s in S)]
    return Subgroup(G, tuple(members))


def _coset_blocks(G: FiniteAbelianGroup, rows, A0, B):
    """Coset blocks for A0 a union of K-cosets and B - y0 inside K^perp, or None."""
    K = _stabiliser(G, set(A0))
    Kp = annihilator(K)
    y0 = G.elements[B[0]]
    Kp_set = set(Kp.members)
    if not all(G.sub(G.elements[b], y0) in Kp_set for b in B):
        return None
    col_cosets = {}
    for j in A0:
        c = min(G.index(G.add(G.elements[j], h)) for h in K.members)
        col_cosets.setdefault(c, []).append(j)
    row_cosets = {}
    singles = []
    for i in rows:
        z = G.sub(G.elements[i], y0)
        if z in Kp_set:
            singles.append(i)
        else:
            a = min(G.index(G.add(z, h)) for h in Kp.members)
            row_cosets.setdefault(a, []).append(i)
    blocks = []
    for a in sorted(row_cosets):
        for c in sorted(col_cosets):
            blocks.append((tuple(row_cosets[a]), tuple(col_cosets[c])))
    for b in sorted(singles):
        blocks.append(((b,), tuple(A0)))
    return blocks


def kernel_basis(A, B, G: FiniteAbelianGroup) -> list:
    """Basis of E(A, B) as GroupFunctions (exact)."""
    A = as_indices(G, A)
    Bs = set(as_indices(G, B))
    rows = [i for i in range(G.order) if i not in Bs]
    if not rows:
        return [GroupFunction.delta(G, G.elements[a]) for a in A]
    _, basis = rank_kernel(dft_block(G, rows, A))
    return [GroupFunction(G, {G.elements[a]: c for a, c in zip(A, v)}) for v in basis]


def kernel_function_support(A, B, G: FiniteAbelianGroup):
    """(A0, dimension) where A0 is the union of the supports of a basis of E(A, B)."""
    basis = kernel_basis(A, B, G)
    support = set()
    for f in basis:
        support |= set(f.support_indices())
    return tuple(sorted(support)), len(basis)


def decompose_rank_one(A, B, G: FiniteAbelianGroup, kernel=None) -> BlockDecomposition:
    """k - 1 rank-one blocks partitioning M_{A,B} when its rank is k - 1.

    ``kernel`` may pass a precomputed (A0, dimension) from
    :func:`kernel_function_support`.
    """
    fam = family_of(G)
    if fam is None or not fam.ordered:
        raise UnsupportedGroup(f"rank-one decompositions are only built on the classified families, not {G.spec}")
    M = extract_matrix(A, B, G)
    k = len(M.cols)
    A0, dim = kernel if kernel is not None else kernel_function_support(M.cols, B, G)
    r = k - dim
    if dim == 0:
        raise FullRank(f"M_(A,B) has full rank {k}; nothing to decompose")
    if dim > 1:
        raise SideConditionViolated(f"rank {r} < k - 1 = {k - 1}; the decomposition needs a one-dimensional kernel")
    Bt = tuple(sorted(set(range(G.order)) - set(M.rows)))
    a0 = G.elements[A0[0]]
    y0 = G.elements[Bt[0]]
    k0 = len(A0)
    candidates = []
    coset = _coset_blocks(G, M.rows, A0, Bt)
    if coset is not None and len(_stabiliser(G, set(A0))) > 1:
        candidates.append(("coset_blocks", coset))
    if k0 >= 2:
        candidates.append(("row_groups", _row_groups(G, M.rows, A0, a0)))
    candidates.append(("single_rows", [((i,), tuple(A0)) for i in M.rows]))
    extra = [(M.rows, (j,)) for j in M.cols if j not in set(A0)]
    for recipe, blocks in candidates:
        if len(blocks) != k0 - 1:
            continue
        full = blocks + extra
        if verify_decomposition(M, full):
            return BlockDecomposition(G, M.cols, Bt, r, full, a0, y0, recipe)
    raise InvariantViolation(
        f"no rank-one decomposition found for M_(A,B) on {G.spec}",
        {"group": G.spec, "A": list(M.cols), "B": list(Bt), "kernel_support": list(A0)},
    )


# Chebotarev's lemma -------------------------------------------------------------------


@dataclass
class ChebotarevReport:
    p: int
    max_minor: int
    checked: int
    witness: tuple | None  # (rows, cols) of a vanishing minor

    @property
    def ok(self) -> bool:
        return self.witness is None

    def __bool__(self):
        return self.ok

    def to_json(self) -> dict:
        return {
            "p": self.p,
            "max_minor": self.max_minor,
            "minors_checked": self.checked,
            "ok": self.ok,
            "witness": None if self.witness is None else {"rows": list(self.witness[0]), "cols": list(self.witness[1])},
        }


def chebotarev_check(p: int, max_minor: int | None = None) -> ChebotarevReport:
    """Exact determinant of every square minor of the Z_p Fourier matrix up to max_minor."""
    from .groups import is_prime

    if not is_prime(p):
        raise ValueError(f"{p} is not prime")
    max_minor = p if max_minor is None else max_minor
    if not 1 <= max_minor <= p:
        raise ValueError(f"max_minor must lie in [1, {p}]")
    checked = 0
    for s in range(1, max_minor + 1):
        for I in itertools.combinations(range(p), s):
            for J in itertools.combinations(range(p), s):
                exps = [[i * j % p for j in J] for i in I]
                checked += 1
                if not monomial_determinant(exps, p):
                    return ChebotarevReport(p, max_minor, checked, (I, J))
    return ChebotarevReport(p, max_minor, checked, None)
