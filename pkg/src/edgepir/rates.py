"""Closed-form average rates for coded caching with and without PIR.

All rates are normalized by the file size (beta * L bits).  ``gamma`` is
the distribution of the number b of in-range SBSs; placements are vectors
mu with mu_i in {0} union {1/k}.  Arithmetic is carried out with whatever
number types are supplied, so exact Fractions flow through untouched.

Conventions:
* a file with mu_i = 0 is not cached and costs a full file from the MBS;
* gamma mass at b > n behaves like b = n (extra SBSs beyond the n protocol
  coordinates are not contacted), which is the gamma-tilde tail absorption.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Sequence


def _gamma_list(gamma) -> list:
    if hasattr(gamma, "gamma"):
        return list(gamma.gamma)
    return list(gamma)


def _check_mu(mu) -> list[Fraction]:
    out = []
    for m in mu:
        f = Fraction(m)
        if f != 0 and f.numerator != 1:
            raise ValueError(f"placement entries must be 0 or 1/k, got {m}")
        out.append(f)
    return out


def backhaul_nopir(p: Sequence, mu: Sequence, gamma) -> object:
    """Average MBS rate without privacy: in-range SBSs each contribute one
    of the k_i coded symbols, the MBS supplies the max(0, k_i - b) missing
    ones; uncached files are fetched whole."""
    g = _gamma_list(gamma)
    mu = _check_mu(mu)
    total = 0
    for pi, mi in zip(p, mu):
        if mi == 0:
            total += pi
            continue
        k = mi.denominator
        total += pi * sum(gb * max(0, k - b) for b, gb in enumerate(g)) * mi
    return total


def backhaul_nopir_popular(p: Sequence, M: int, gamma) -> object:
    """No-privacy rate when the M most popular files are replicated whole
    in every SBS: a cached file costs a full file only with no SBS in range."""
    g = _gamma_list(gamma)
    if M > len(p):
        raise ValueError("cannot cache more files than exist")
    g0 = g[0] if g else 0
    return g0 * sum(p[:M]) + sum(p[M:])


def _pir_factor(mu_min: Fraction, mu_max: Fraction, n: int, T: int):
    den = mu_min * (n - T + 1) - 1
    if den <= 0:
        raise ValueError(
            f"infeasible protocol: mu_min*(n-T+1)-1 = {den} must be positive")
    return mu_max / den


def backhaul_pir(p: Sequence, mu: Sequence, gamma, n: int, T: int) -> object:
    """Average MBS rate with PIR: the MBS answers the n - b query matrices
    that in-range SBSs cannot, each answer d*L*mu_max bits; uncached files
    are fetched whole."""
    g = _gamma_list(gamma)
    mu = _check_mu(mu)
    cached = [m for m in mu if m != 0]
    if not cached:
        return sum(p)
    factor = _pir_factor(min(cached), max(cached), n, T)
    mbs_coords = sum(gb * (n - min(b, n)) for b, gb in enumerate(g))
    total = 0
    for pi, mi in zip(p, mu):
        if mi == 0:
            total += pi
        else:
            total += pi * factor * mbs_coords
    return total


def sbs_rate_pir(p: Sequence, mu: Sequence, gamma, n: int, T: int) -> object:
    """Average SBS download rate with PIR.  Privacy forces queries to all
    min(b, n) in-range SBSs regardless of which file is requested, so the
    rate does not depend on the popularity profile."""
    g = _gamma_list(gamma)
    mu = _check_mu(mu)
    cached = [m for m in mu if m != 0]
    if not cached:
        return 0
    factor = _pir_factor(min(cached), max(cached), n, T)
    return factor * sum(gb * min(b, n) for b, gb in enumerate(g))


def weighted_rate(R_pir, D_pir, theta) -> object:
    """C = R + theta * D, theta in [0, 1] weighting SBS traffic against the
    backhaul bottleneck."""
    if not 0 <= theta <= 1:
        raise ValueError("theta must lie in [0, 1]")
    return R_pir + theta * D_pir


def gamma_tilde(gamma, n: int) -> list:
    """Cap the in-range count at n: gamma_tilde_b = gamma_b for b < n and
    the whole tail mass at b = n."""
    g = _gamma_list(gamma)
    out = [g[b] if b < len(g) else 0 for b in range(n)]
    out.append(sum(g[n:]))
    return out
