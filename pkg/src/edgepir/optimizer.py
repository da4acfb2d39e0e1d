"""Content-placement and protocol-parameter optimization.

With PIR, uniform placement (one cached fraction mu = 1/k shared by the
min(M*k, F) most popular files) is optimal, so the PIR optimizers scan the
(k, n) grid exhaustively.  Without PIR the per-file placement matters and
is solved by a knapsack-style dynamic program over a discretized cache
budget.  All optimizers compare against the no-caching baseline (rate 1)
and report mu = 0 when caching never helps.

Tie-breaking is deterministic: smaller n first, then larger mu (smaller k),
so sweep transition tables are reproducible.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import floor, lcm
from typing import Optional, Sequence

import numpy as np

from . import rates, topology

SLACK = 1e-12


@dataclass
class Optimum:
    mu_star: object          # Fraction (uniform scans) or list (per-file DP)
    k_star: object           # int, None (no caching), or list
    n_star: Optional[int]
    files_cached: int
    value: float
    table: list = field(default_factory=list, repr=False)


def _prefix_sums(p: Sequence[float]) -> list[float]:
    out = [0.0]
    for x in p:
        out.append(out[-1] + x)
    return out


class _GammaSums:
    """Prefix sums of gamma enabling O(1) evaluation of the expected MBS
    and SBS coordinate counts E[n - min(b, n)] and E[min(b, n)]."""

    def __init__(self, gamma: list):
        self.cdf = [0.0]
        self.first_moment = [0.0]
        for b, gb in enumerate(gamma):
            self.cdf.append(self.cdf[-1] + gb)
            self.first_moment.append(self.first_moment[-1] + b * gb)
        self.total = self.cdf[-1]

    def mbs(self, n: int) -> float:
        """E[(n - b)^+] = sum_{b < n} gamma_b (n - b)."""
        m = min(n, len(self.cdf) - 1)
        return n * self.cdf[m] - self.first_moment[m]

    def sbs(self, n: int) -> float:
        """E[min(b, n)]."""
        m = min(n, len(self.cdf) - 1)
        return self.first_moment[m] + n * (self.total - self.cdf[m])


def _mbs_coord_sum(gamma: list, n: int) -> float:
    """Expected count of protocol coordinates the MBS must answer."""
    return sum(gb * (n - min(b, n)) for b, gb in enumerate(gamma))


def optimize_pir(p: Sequence[float], gamma, M, T: int,
                 k_candidates: Optional[Sequence[int]] = None,
                 n_cap: Optional[int] = None, theta: float = 0.0) -> Optimum:
    """Exhaustive (k, n) scan of the uniform-placement objective
    R + theta*D; theta = 0 optimizes the backhaul rate alone."""
    g = rates._gamma_list(gamma)
    F = len(p)
    M = Fraction(M)
    N_max = max((b for b, x in enumerate(g) if x > 0), default=0)
    if k_candidates is None:
        k_candidates = range(1, max(2, 2 * N_max) + 1)
    P = _prefix_sums(p)
    table = []
    best = None
    candidates = []
    for k in k_candidates:
        cap = n_cap if n_cap is not None else N_max + k + T
        for n in range(k + T, cap + 1):
            candidates.append((n, k))
    sums = _GammaSums(g)
    for n, k in sorted(candidates):
        files_cached = min(int(floor(M * k)), F)
        if files_cached == 0:
            continue
        factor = 1.0 / (n - T + 1 - k)
        obj = factor * (P[files_cached] * sums.mbs(n)
                        + theta * sums.sbs(n)) + (P[F] - P[files_cached])
        table.append({"k": k, "n": n, "files_cached": files_cached, "value": obj})
        if best is None or obj < best["value"] - SLACK:
            best = table[-1]
    baseline = float(P[F])  # no caching: full file from the MBS every time
    if best is None or best["value"] >= baseline - SLACK:
        return Optimum(Fraction(0), None, None, 0, baseline, table)
    return Optimum(Fraction(1, best["k"]), best["k"], best["n"],
                   best["files_cached"], best["value"], table)


def optimize_weighted(p: Sequence[float], gamma, M, T: int, theta: float,
                      **kwargs) -> Optimum:
    """Minimize the weighted rate C = R + theta*D over uniform placements."""
    if not 0 <= theta <= 1:
        raise ValueError("theta must lie in [0, 1]")
    return optimize_pir(p, gamma, M, T, theta=theta, **kwargs)


def popular_pir(p: Sequence[float], gamma, M: int, T: int,
                n_cap: Optional[int] = None) -> Optimum:
    """PIR rate when the M most popular files are cached whole (k = 1),
    minimized over the number of contacted coordinates n."""
    g = rates._gamma_list(gamma)
    F = len(p)
    if M > F:
        raise ValueError("cannot cache more files than exist")
    N_max = max((b for b, x in enumerate(g) if x > 0), default=0)
    cap = n_cap if n_cap is not None else N_max + 1 + T
    P = _prefix_sums(p)
    table = []
    best = None
    for n in range(T + 1, cap + 1):
        obj = P[M] * _mbs_coord_sum(g, n) / (n - T) + (P[F] - P[M])
        table.append({"k": 1, "n": n, "files_cached": M, "value": obj})
        if best is None or obj < best["value"] - SLACK:
            best = table[-1]
    if best is None:
        raise ValueError("empty feasible range for n")
    return Optimum(Fraction(1), 1, best["n"], M, best["value"], table)


def optimize_nopir(p: Sequence[float], gamma, M,
                   k_candidates: Optional[Sequence[int]] = None,
                   max_budget_units: int = 2_000_000) -> Optimum:
    """Per-file placement without privacy, by dynamic programming.

    The cache budget is discretized in units of 1/lcm(k_candidates); each
    file independently picks mu_i in {0} union {1/k}.  The default
    candidate set {1, ..., 2*N_max} suffices because gamma_b = 0 above
    N_max makes every k >= N_max equally effective per unit of budget, so
    spreading thinner than that is dominated.
    """
    g = rates._gamma_list(gamma)
    F = len(p)
    M = Fraction(M)
    N_max = max((b for b, x in enumerate(g) if x > 0), default=0)
    if k_candidates is None:
        k_candidates = list(range(1, max(2, 2 * N_max) + 1))
    k_candidates = sorted(set(k_candidates))
    unit = lcm(*k_candidates)
    budget = int(floor(M * unit))
    if budget > max_budget_units:
        raise ValueError(
            f"budget discretization needs {budget} units "
            f"(> {max_budget_units}); pass a smaller k_candidates set")
    costs = [unit // k for k in k_candidates]
    # saving of caching file i at 1/k, relative to fetching it whole
    miss = {k: sum(gb * max(0, k - b) for b, gb in enumerate(g)) / k
            for k in k_candidates}
    savings = [1.0 - miss[k] for k in k_candidates]
    dp = np.zeros(budget + 1)
    choice = np.zeros((F, budget + 1), dtype=np.int16)
    for i in range(F):
        best_val = dp.copy()
        best_choice = np.zeros(budget + 1, dtype=np.int16)
        for ci, (cost, save) in enumerate(zip(costs, savings), start=1):
            if cost > budget or save <= 0:
                continue
            cand = dp[:-cost] + p[i] * save
            upd = cand > best_val[cost:] + SLACK
            best_val[cost:][upd] = cand[upd]
            best_choice[cost:][upd] = ci
        dp = best_val
        choice[i] = best_choice
    b = budget
    mu = [Fraction(0)] * F
    ks: list[Optional[int]] = [None] * F
    for i in range(F - 1, -1, -1):
        ci = int(choice[i][b])
        if ci:
            k = k_candidates[ci - 1]
            mu[i] = Fraction(1, k)
            ks[i] = k
            b -= costs[ci - 1]
    value = float(sum(p)) - float(dp[budget])
    cached = sum(1 for m in mu if m)
    return Optimum(mu, ks, None, cached, value)


def sweep_cache_size(p: Sequence[float], gamma, M_values: Sequence, T: int,
                     theta: float = 0.0) -> list[dict]:
    """One uniform-placement optimum per cache size M."""
    out = []
    for M in M_values:
        opt = optimize_pir(p, gamma, M, T, theta=theta)
        out.append({"M": M, "mu_star": opt.mu_star, "k_star": opt.k_star,
                    "n_star": opt.n_star, "value": opt.value})
    return out


def sweep_density(p: Sequence[float], M, T: int, lam_values: Sequence[float],
                  r_u: float, theta: float = 0.0) -> list[dict]:
    """PPP density sweep: one optimum per SBS density lambda."""
    out = []
    for lam in lam_values:
        gamma = topology.ppp_gamma(topology.PppModel(lam, r_u))
        opt = optimize_pir(p, gamma, M, T, theta=theta)
        out.append({"lambda": lam, "mu_star": opt.mu_star, "k_star": opt.k_star,
                    "n_star": opt.n_star, "value": opt.value})
    return out


def transition_points(rows: list[dict], axis: str) -> list[dict]:
    """Collapse a sweep table to the rows where (n*, k*) changes."""
    out = []
    prev = object()
    for row in rows:
        key = (row["n_star"], row["k_star"])
        if key != prev:
            out.append(row)
            prev = key
    return out
