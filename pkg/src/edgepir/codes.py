"""Linear MDS codes used for storage and retrieval.

Provides generalized Reed-Solomon (GRS) construction, generic
generator-matrix codes (needed for the binary repetition / single
parity-check pair, which is MDS but not GRS since n > q-1), puncturing,
Hadamard product and sum codes, information sets, erasure-pattern
correctability, and erasure decoding.

Codewords and matrices are lists of field-element ints as in
:mod:`edgepir.gf`.  Coordinates are 0-based throughout.
"""

from __future__ import annotations

from itertools import combinations, product
from typing import Optional, Sequence

from . import gf
from .gf import Field


class LinearCode:
    """An (n, k) linear code over a field, held by its generator matrix.

    The parity-check matrix H is computed from the null space of G and
    satisfies G Ht = 0.  ``mds`` is True when the code is known to be
    maximum distance separable (always for GRS; verified exhaustively for
    generic generators when n is small, else None for unknown).
    """

    def __init__(self, field: Field, G: list, mds: Optional[bool] = None):
        self.field = field
        self.n = len(G[0])
        self.k = len(G)
        if gf.rank(field, G) != self.k:
            raise ValueError("generator matrix is rank deficient")
        self.G = [list(r) for r in G]
        self.H = gf.null_space(field, self.G)
        if mds is None and self.n <= 12:
            mds = self._check_mds()
        self.mds = mds

    def _check_mds(self) -> bool:
        return all(
            gf.rank(self.field, [[row[c] for c in I] for row in self.G]) == self.k
            for I in combinations(range(self.n), self.k)
        )

    def encode(self, message: Sequence[int]) -> list[int]:
        if len(message) != self.k:
            raise ValueError("message length must equal k")
        return gf.mat_vec(self.field, _transpose(self.G), message)

    def codewords(self):
        """Iterate all q^k codewords (desk scale only)."""
        for msg in product(self.field.elements(), repeat=self.k):
            yield self.encode(msg)

    def contains(self, word: Sequence[int]) -> bool:
        return all(v == 0 for v in gf.mat_vec(self.field, self.H, word)) if self.H else True

    def __repr__(self) -> str:
        return f"LinearCode(n={self.n}, k={self.k}, field={self.field})"


class GrsCode(LinearCode):
    """GRS code with parameters (n, k, v, kappa): codewords are
    (v_1 f(kappa_1), ..., v_n f(kappa_n)) for polynomials f of degree < k.
    """

    def __init__(self, field: Field, n: int, k: int, v: Sequence[int], kappa: Sequence[int]):
        if k > n:
            raise ValueError("k must be <= n")
        if len(v) != n or len(kappa) != n:
            raise ValueError("v and kappa must have length n")
        if any(x == 0 for x in v):
            raise ValueError("weighting vector entries must be nonzero")
        if any(x == 0 for x in kappa):
            raise ValueError("evaluation points must be nonzero")
        if len(set(kappa)) != n:
            raise ValueError("evaluation points must be pairwise distinct")
        if n > field.order - 1:
            raise ValueError("need n <= q-1 distinct nonzero evaluation points")
        G = []
        for row in range(k):
            G.append([field.mul(v[j], field.pow(kappa[j], row)) for j in range(n)])
        super().__init__(field, G, mds=True)
        self.v = list(v)
        self.kappa = list(kappa)

    def __repr__(self) -> str:
        return f"GrsCode(n={self.n}, k={self.k}, field={self.field})"


def default_kappa(field: Field, n: int) -> list[int]:
    """First n nonzero field elements in encoding order."""
    if n > field.order - 1:
        raise ValueError("field too small for n distinct nonzero points")
    return list(range(1, n + 1))


def grs(field: Field, n: int, k: int, v: Optional[Sequence[int]] = None,
        kappa: Optional[Sequence[int]] = None) -> GrsCode:
    if kappa is None:
        kappa = default_kappa(field, n)
    if v is None:
        v = [1] * n
    return GrsCode(field, n, k, v, kappa)


def from_generator(field: Field, G: list, mds: Optional[bool] = None) -> LinearCode:
    return LinearCode(field, G, mds=mds)


def repetition_code(field: Field, n: int) -> LinearCode:
    return LinearCode(field, [[1] * n], mds=True)


def spc_code(field: Field, n: int) -> LinearCode:
    """(n, n-1) single parity-check code, systematic generator."""
    G = [[1 if j == i else (1 if j == n - 1 else 0) for j in range(n)]
         for i in range(n - 1)]
    # last column makes each row sum to zero only over GF(2); in general
    # use -1 so that codewords satisfy the all-ones parity check
    for i in range(n - 1):
        G[i][n - 1] = field.neg(1)
    return LinearCode(field, G, mds=True)


def puncture(code: LinearCode, keep_coords: Sequence[int]) -> LinearCode:
    """Restrict the code to the given ordered coordinate set."""
    keep = list(keep_coords)
    if len(set(keep)) != len(keep):
        raise ValueError("keep_coords must be distinct")
    if any(c < 0 or c >= code.n for c in keep):
        raise ValueError("coordinate out of range")
    if len(keep) < code.k:
        raise ValueError("puncturing below dimension k loses information")
    G = [[row[c] for c in keep] for row in code.G]
    if isinstance(code, GrsCode):
        return GrsCode(code.field, len(keep), code.k,
                       [code.v[c] for c in keep], [code.kappa[c] for c in keep])
    return LinearCode(code.field, G, mds=code.mds if len(keep) <= 12 else None)


def _transpose(A: list) -> list:
    return [list(col) for col in zip(*A)]


def _row_basis(field: Field, rows: list) -> list:
    R, pivots = gf.rref(field, rows)
    return [R[i] for i in range(len(pivots))]


def hadamard(codeA: LinearCode, codeB: LinearCode) -> LinearCode:
    """Span of all element-wise products of codewords of A and B."""
    if codeA.n != codeB.n or codeA.field != codeB.field:
        raise ValueError("codes must share length and field")
    F = codeA.field
    rows = [[F.mul(a, b) for a, b in zip(ra, rb)]
            for ra in codeA.G for rb in codeB.G]
    basis = _row_basis(F, rows)
    return LinearCode(F, basis)


def sum_code(codeA: LinearCode, codeB: LinearCode) -> LinearCode:
    if codeA.n != codeB.n or codeA.field != codeB.field:
        raise ValueError("codes must share length and field")
    basis = _row_basis(codeA.field, codeA.G + codeB.G)
    return LinearCode(codeA.field, basis)


def is_information_set(code: LinearCode, I: Sequence[int]) -> bool:
    if len(I) != code.k:
        raise ValueError("information set must have size k")
    sub = [[row[c] for c in I] for row in code.G]
    return gf.rank(code.field, sub) == code.k


def correctable(code: LinearCode, pattern: Sequence[int]) -> bool:
    """True iff the erasure pattern (1 = erased) is correctable: the
    parity-check columns on the erased support are linearly independent."""
    if len(pattern) != code.n:
        raise ValueError("pattern length must equal n")
    chi = [j for j, e in enumerate(pattern) if e]
    if not chi:
        return True
    if not code.H:
        return False
    sub = [[row[c] for c in chi] for row in code.H]
    return gf.rank(code.field, sub) == len(chi)


def erasure_decode(code: LinearCode, word: Sequence[Optional[int]],
                   symbol_field: Optional[Field] = None) -> list[int]:
    """Recover the unique codeword agreeing with ``word`` on its non-None
    coordinates.

    ``symbol_field`` lets symbols live in an extension of the code's field
    (the code's generator entries are embedded); defaults to the code field.
    """
    F = symbol_field or code.field
    known = [j for j, w in enumerate(word) if w is not None]
    Gk = [[gf.embed(row[c], code.field, F) for c in known] for row in code.G]
    # message m with m G|_known = word|_known, i.e. (G|_known)^T m = b
    A = _transpose(Gk)
    try:
        msg = gf.solve(F, A, [word[c] for c in known])
    except gf.NoSolution:
        raise ValueError("received symbols are not consistent with the code")
    if gf.rank(F, A) < code.k:
        raise ValueError("erasure pattern not decodable: no information set survives")
    Gfull = [[gf.embed(x, code.field, F) for x in row] for row in code.G]
    return gf.mat_vec(F, _transpose(Gfull), msg)


def dual_min_distance(code: LinearCode) -> int:
    """Minimum Hamming distance of the dual code.

    GRS duals are GRS, so d = k + 1 analytically; otherwise the dual's
    codewords are scanned exhaustively (desk scale only).
    """
    if isinstance(code, GrsCode):
        return code.k + 1
    dual_dim = code.n - code.k
    if dual_dim == 0:
        raise ValueError("dual code is trivial (k = n)")
    if code.field.order ** dual_dim > 1 << 20:
        raise ValueError("instance too large for exhaustive dual-distance scan")
    dual = LinearCode(code.field, _row_basis(code.field, code.H))
    best = None
    for cw in dual.codewords():
        w = sum(1 for x in cw if x)
        if w and (best is None or w < best):
            best = w
    return best
