"""Private information retrieval over the coded SBS caches.

A retrieval of file i from n storage-code coordinates, tolerating T
colluding SBSs, works in d = k_max subquery rounds.  Each coordinate l
receives a d x (beta*F_c) query matrix over GF(q) whose rows are a shared
random blinding vector c_ring_l plus, on rounds where coordinate l is
"useful", a unit vector selecting one stripe of the requested file.  The
blinding vectors are coordinates of random codewords of an (n, T) code Cbar
whose dual distance exceeds T, so any T query matrices are jointly
independent of the requested index.

Responses are inner products with the SBS cache column over
GF(q^{delta_max}).  Stacking round j's subresponses gives a vector that is
a codeword of the retrieval code Ctilde = (sum_i C'_i) o Cbar plus the
useful symbols on the support J_j of row j of the erasure matrix Ehat;
applying Ctilde's parity check isolates and solves for those symbols.
Gamma = n - (k_max + T - 1) symbols are freed per round, and the
stripe bookkeeping {I_m}, {F_l} routes them to erasure decoders of the
per-file storage codes.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field as dfield
from itertools import product
from typing import Optional, Sequence

from . import codes, gf
from .cache import EncodedCache


@dataclass
class ProtocolParams:
    cache: EncodedCache
    T: int
    n: int
    coords: list  # storage-code coordinates in use, len n
    d: int
    Gamma: int
    beta: int
    Cbar: codes.LinearCode
    Ctilde: codes.LinearCode
    Cprime: dict  # file index -> punctured storage code on coords
    cached: list  # cached file indices, ascending

    @property
    def base_field(self):
        return self.Cbar.field

    @property
    def big_field(self):
        return self.cache.symbol_field

    @property
    def width(self) -> int:
        """Query-vector length: beta stripes for each cached file."""
        return self.beta * len(self.cached)


def _retrieval_randomness_code(field, n: int, T: int,
                               kappa: Optional[Sequence[int]] = None) -> codes.LinearCode:
    """(n, T) MDS code with dual distance T+1 used to blind queries."""
    if n <= field.order - 1:
        return codes.grs(field, n, T, kappa=kappa)
    if T == 1:
        return codes.repetition_code(field, n)
    if T == n - 1:
        return codes.spc_code(field, n)
    raise ValueError(
        f"no (n={n}, T={T}) blinding code available over GF({field.order})")


def plan_protocol(cache: EncodedCache, T: int, n: int,
                  coords: Optional[Sequence[int]] = None) -> ProtocolParams:
    scheme = cache.scheme
    cached = scheme.cached_files()
    if not cached:
        raise ValueError("nothing is cached; PIR retrieval needs cached files")
    k_max = scheme.k_max
    if n < k_max + T:
        raise ValueError(f"need n >= k_max + T = {k_max + T}, got n = {n}")
    if coords is None:
        coords = list(range(n))
    coords = list(coords)
    if len(coords) != n or len(set(coords)) != n:
        raise ValueError("coords must be n distinct storage coordinates")
    if any(c < 0 or c >= scheme.N_sbs for c in coords):
        raise ValueError("coordinate outside the storage code")
    Gamma = n - (k_max + T - 1)
    beta = Gamma
    if beta != cache.library.beta:
        raise ValueError(
            f"library must have beta = {beta} stripes per file for these "
            f"protocol parameters, found {cache.library.beta}")
    field = gf.make_field(scheme.q)
    kappa = None
    if scheme.N_sbs <= field.order - 1:
        kappa_global = codes.default_kappa(field, scheme.N_sbs)
        kappa = [kappa_global[c] for c in coords]
    Cbar = _retrieval_randomness_code(field, n, T, kappa=kappa)
    if codes.dual_min_distance(Cbar) < T + 1:
        raise ValueError("blinding code cannot tolerate T colluders")
    Cprime = {i: codes.puncture(cache.codes[i], coords) for i in cached}
    Csum = None
    for i in cached:
        Csum = Cprime[i] if Csum is None else codes.sum_code(Csum, Cprime[i])
    Ctilde = codes.hadamard(Csum, Cbar)
    if Ctilde.k != k_max + T - 1:
        raise ValueError(
            f"retrieval code has dimension {Ctilde.k}, expected {k_max + T - 1}")
    if Ctilde.k >= n:
        raise ValueError("retrieval code rate must be strictly below 1")
    return ProtocolParams(cache, T, n, coords, k_max, Gamma, beta,
                          Cbar, Ctilde, Cprime, cached)


@dataclass
class ErasureMatrix:
    Ehat: list  # d rows of n bits
    J: list     # row supports, each a list of Gamma coordinates
    I_sets: list  # beta information sets of C'_max, each size k_max
    F_sets: list  # per coordinate l, sorted list of stripes m with l in I_m


def build_erasure_matrix(params: ProtocolParams) -> ErasureMatrix:
    d, n, Gamma = params.d, params.n, params.Gamma
    J = [[(j + t) % n for t in range(Gamma)] for j in range(d)]
    Ehat = [[1 if l in set(row) else 0 for l in range(n)] for row in J]
    for row in Ehat:
        assert sum(row) == Gamma
        if not codes.correctable(params.Ctilde, row):
            raise ValueError("erasure-matrix row not correctable by the retrieval code")
    I_sets, F_sets = build_information_sets(Ehat, params.beta, n, params.d)
    k_max = params.cache.scheme.k_max
    i_max = max(params.cached, key=lambda i: params.cache.scheme.k[i])
    for I in I_sets:
        if len(I) != k_max or not codes.is_information_set(params.Cprime[i_max], sorted(I)):
            raise ValueError("constructed set is not an information set")
    for l in range(n):
        assert len(F_sets[l]) == sum(Ehat[j][l] for j in range(d))
    return ErasureMatrix(Ehat, J, I_sets, F_sets)


def build_information_sets(Ehat: list, beta: int, n: int, d: int):
    """Greedy construction of stripe information sets {I_m} and the
    coordinate-to-stripe maps F_l = {m : l in I_m}.

    Column l of Ehat has weight w_l; coordinate l must serve w_l distinct
    stripes.  Scanning stripes in order and assigning each coordinate to the
    first stripe that still needs members and does not already contain it
    fills every I_m to size k_max = (sum of weights) / beta.
    """
    weights = [sum(Ehat[j][l] for j in range(d)) for l in range(n)]
    total = sum(weights)
    if total % beta:
        raise ValueError("column weights do not split evenly across stripes")
    k_max = total // beta
    I_sets: list[set] = [set() for _ in range(beta)]
    F_sets: list[list[int]] = [[] for _ in range(n)]
    for l in range(n):
        for _ in range(weights[l]):
            m = next((m for m in range(beta)
                      if len(I_sets[m]) < k_max and l not in I_sets[m]), None)
            if m is None:
                raise ValueError("information-set construction got stuck")
            I_sets[m].add(l)
            F_sets[l].append(m)
    return [set(I) for I in I_sets], [sorted(F) for F in F_sets]


@dataclass
class QuerySet:
    file_index: int          # library index of the requested file
    iota: int                # position of the file among cached files
    Q: list                  # n matrices, each d x width, over GF(q)
    s_assign: dict           # (l, j) -> stripe index m for useful rounds
    codewords: list          # d rows of beta*F_c blinding codewords


def _s_assignment(em: ErasureMatrix, d: int, n: int) -> dict:
    """Assign stripe indices s^(l)_j: rows using coordinate l consume the
    sorted F_l in ascending row order."""
    out = {}
    for l in range(n):
        rows = [j for j in range(d) if em.Ehat[j][l]]
        for j, m in zip(rows, em.F_sets[l]):
            out[(l, j)] = m
    return out


def _queries_from_codewords(params: ProtocolParams, em: ErasureMatrix,
                            iota: int, codewords: list) -> QuerySet:
    """Assemble query matrices from given blinding codewords.

    ``codewords`` has d rows of beta*F_c length-n codewords of Cbar: each
    subquery round blinds with its own codewords, so the joint distribution
    of any T query matrices is uniform and carries no information about the
    requested file; reusing codewords across rounds would make row
    differences deterministic and leak the file index.
    """
    F = params.base_field
    d, n, beta, width = params.d, params.n, params.beta, params.width
    s_assign = _s_assignment(em, d, n)
    Q = []
    for l in range(n):
        rows = []
        for j in range(d):
            row = [codewords[j][t][l] for t in range(width)]
            if em.Ehat[j][l]:
                t = beta * iota + s_assign[(l, j)]
                row[t] = F.add(row[t], 1)
            rows.append(row)
        Q.append(rows)
    return QuerySet(params.cached[iota], iota, Q, s_assign, codewords)


def generate_queries(params: ProtocolParams, em: ErasureMatrix,
                     file_index: int, rng) -> QuerySet:
    """Fresh query matrices for retrieving ``file_index`` (must be cached).

    The blinding codewords are drawn independently and uniformly from Cbar
    by encoding uniform message vectors, fresh for every subquery round.
    """
    if file_index not in params.cached:
        raise ValueError("requested file is not cached")
    iota = params.cached.index(file_index)
    q = params.base_field.order
    codewords = []
    for _ in range(params.d):
        round_cws = []
        for _ in range(params.width):
            msg = [int(rng.integers(q)) for _ in range(params.Cbar.k)]
            round_cws.append(params.Cbar.encode(msg))
        codewords.append(round_cws)
    return _queries_from_codewords(params, em, iota, codewords)


def respond(params: ProtocolParams, Q_l: list, column: Sequence[int]) -> list[int]:
    """One coordinate's response: Q^(l) times its cache column over
    GF(q^{delta_max})."""
    big = params.big_field
    if any(len(row) != len(column) for row in Q_l):
        raise ValueError("query width does not match cache column length")
    return [
        _dot(big, row, column)
        for row in Q_l
    ]


def _dot(field, row: Sequence[int], col: Sequence[int]) -> int:
    acc = 0
    for a, b in zip(row, col):
        if a and b:
            acc = field.add(acc, field.mul(a, b))
    return acc


def collect_responses(params: ProtocolParams, queries: QuerySet,
                      columns: Sequence[Sequence[int]]) -> list[list[int]]:
    """Responses from all n coordinates given their cache columns."""
    return [respond(params, queries.Q[l], columns[l]) for l in range(params.n)]


def recover(params: ProtocolParams, em: ErasureMatrix, queries: QuerySet,
            responses: list) -> list[list[int]]:
    """Solve for the useful symbols round by round, regroup them into
    stripes, erasure-decode each stripe, and unpack to bits."""
    big = params.big_field
    i = queries.file_index
    code = params.Cprime[i]
    small = params.cache.fields[i]
    H = params.Ctilde.H
    recovered: dict[tuple[int, int], int] = {}  # (stripe m, coord l) -> symbol
    for j in range(params.d):
        rho = [responses[l][j] for l in range(params.n)]
        syndrome = [_dot(big, Hrow, rho) for Hrow in H]
        support = em.J[j]
        A = [[Hrow[l] for l in support] for Hrow in H]
        try:
            sol = gf.solve(big, A, syndrome)
        except gf.NoSolution:
            raise ValueError("inconsistent responses: corrupted subresponse")
        for l, val in zip(support, sol):
            m = queries.s_assign[(l, j)]
            recovered[(m, l)] = val
    stripes_bits = []
    from .cache import unpack_stripe
    for m in range(params.beta):
        word: list[Optional[int]] = [None] * params.n
        for l in sorted(em.I_sets[m]):
            word[l] = gf.project(recovered[(m, l)], small, big)
        cw = codes.erasure_decode(code, word, symbol_field=small)
        Gt = [list(r) for r in zip(
            *[[gf.embed(x, code.field, small) for x in row] for row in code.G])]
        msg = gf.solve(small, Gt, cw)
        stripes_bits.append(unpack_stripe(msg, small, params.cache.library.L))
    return stripes_bits


# ---------------------------------------------------------------------------
# privacy verification
# ---------------------------------------------------------------------------

def _view(queries: QuerySet, coalition: Sequence[int]) -> tuple:
    return tuple(tuple(tuple(row) for row in queries.Q[l]) for l in coalition)


def verify_privacy(params: ProtocolParams, em: ErasureMatrix,
                   coalition: Sequence[int], mode: str = "exact",
                   sessions: int = 100000, rng=None, level: float = 0.01) -> dict:
    """Check that the coalition's joint query view is independent of the
    requested file.

    Exact mode enumerates the full blinding-randomness space and reports the
    maximum total-variation distance between view distributions across all
    pairs of requested files.  Statistical mode samples sessions and runs a
    chi-square independence test of (view, file index).
    """
    coalition = sorted(coalition)
    if len(coalition) > params.T:
        raise ValueError("coalition larger than the tolerated collusion size")
    if not coalition:
        return {"mode": mode, "max_tv": 0.0, "private": True}
    if mode == "exact":
        return _verify_exact(params, em, coalition)
    if mode == "statistical":
        return _verify_statistical(params, em, coalition, sessions, rng, level)
    raise ValueError(f"unknown mode {mode!r}")


def _verify_exact(params: ProtocolParams, em: ErasureMatrix,
                  coalition: list) -> dict:
    q = params.base_field.order
    msgs = list(product(range(q), repeat=params.Cbar.k))
    draws = params.d * params.width
    space = len(msgs) ** draws
    if space > 1 << 20:
        raise ValueError("randomness space too large for exact enumeration")
    encoded = [params.Cbar.encode(list(m)) for m in msgs]
    dists = []
    for iota in range(len(params.cached)):
        counts: Counter = Counter()
        for combo in product(encoded, repeat=draws):
            codewords = [list(combo[j * params.width:(j + 1) * params.width])
                         for j in range(params.d)]
            qs = _queries_from_codewords(params, em, iota, codewords)
            counts[_view(qs, coalition)] += 1
        dists.append({k: v / space for k, v in counts.items()})
    max_tv = 0.0
    for a in range(len(dists)):
        for b in range(a + 1, len(dists)):
            keys = set(dists[a]) | set(dists[b])
            tv = 0.5 * sum(abs(dists[a].get(k, 0.0) - dists[b].get(k, 0.0))
                           for k in keys)
            max_tv = max(max_tv, tv)
    return {"mode": "exact", "max_tv": max_tv, "private": max_tv == 0.0}


def _verify_statistical(params: ProtocolParams, em: ErasureMatrix,
                        coalition: list, sessions: int, rng,
                        level: float) -> dict:
    import numpy as np
    from scipy.stats import chi2_contingency

    if rng is None:
        rng = np.random.default_rng(0)
    n_files = len(params.cached)
    view_ids: dict = {}
    table: list[list[int]] = []
    for _ in range(sessions):
        iota = int(rng.integers(n_files))
        qs = generate_queries(params, em, params.cached[iota], rng)
        v = _view(qs, coalition)
        if v not in view_ids:
            view_ids[v] = len(view_ids)
            for row in table:
                row.append(0)
        col = view_ids[v]
        while len(table) < n_files:
            table.append([0] * len(view_ids))
        table[iota][col] += 1
    arr = np.array(table)
    arr = arr[arr.sum(axis=1) > 0][:, arr.sum(axis=0) > 0]
    if arr.shape[0] < 2 or arr.shape[1] < 2:
        return {"mode": "statistical", "p_value": 1.0, "reject": False}
    _, p_value, _, _ = chi2_contingency(arr)
    return {"mode": "statistical", "p_value": float(p_value),
            "reject": bool(p_value < level)}
