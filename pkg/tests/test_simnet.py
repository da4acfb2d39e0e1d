"""Simulated network sessions and their exact bit accounting."""

from fractions import Fraction

import numpy as np
import pytest

from edgepir import cache, rates, simnet
from edgepir.topology import CoverageDistribution


def example_network(gamma=None):
    lib = cache.FileLibrary([[[1, 0, 0, 1, 1]], [[0, 1, 1, 0, 1]]], 5,
                            [0.5, 0.5])
    scheme = cache.CachingScheme(6, Fraction(6, 5),
                                 [Fraction(1), Fraction(1, 5)], q=2)
    enc = cache.EncodedCache(lib, scheme)
    if gamma is None:
        gamma = [0.0] * 6 + [1.0]
    return simnet.Network(enc, gamma)


def partial_network(gamma):
    """Three files, only the first two cached."""
    rng = np.random.default_rng(0)
    lib = cache.FileLibrary.random(3, 1, 6, [0.5, 0.3, 0.2], rng)
    mu = [Fraction(1), Fraction(1, 2), Fraction(0)]
    scheme = cache.CachingScheme(7, Fraction(3, 2), mu, q=8)
    enc = cache.EncodedCache(lib, scheme)
    return simnet.Network(enc, gamma)


def test_network_validates_gamma():
    with pytest.raises(ValueError):
        example_network([0.5, 0.6])
    net = example_network(CoverageDistribution([0.0, 1.0]))
    assert net.gamma == [0.0, 1.0]


def test_sample_b_distribution():
    net = example_network([0.0, 0.25, 0.75])
    rng = np.random.default_rng(1)
    draws = [net.sample_b(rng) for _ in range(4000)]
    assert abs(draws.count(1) / 4000 - 0.25) < 0.03
    assert 0 not in draws


def test_response_bits_worked_example():
    net = example_network()
    # d = 5 subresponses of a 5-bit symbol each
    assert simnet.response_bits(net.cache, 5) == 25


def test_transcript_bit_counts_closed_form():
    net = example_network()
    # cached, all n = 6 in range: everything from SBSs
    assert simnet.transcript_bit_counts(net.cache, True, 6, 6, 5) == (0, 150)
    # cached, b = 0: the MBS answers all 6 coordinates
    assert simnet.transcript_bit_counts(net.cache, True, 0, 6, 5) == (150, 0)
    # cached, b = 4: split 2 / 4
    assert simnet.transcript_bit_counts(net.cache, True, 4, 6, 5) == (50, 100)
    # b beyond n behaves like b = n
    assert simnet.transcript_bit_counts(net.cache, True, 9, 6, 5) == (0, 150)
    # uncached: whole file from the MBS plus dummy SBS downloads
    assert simnet.transcript_bit_counts(net.cache, False, 4, 6, 5) == (5, 100)


def test_run_retrieval_recovers_and_accounts():
    net = example_network()
    rng = np.random.default_rng(2)
    for b in (0, 3, 6):
        tr = simnet.run_retrieval(net, 1, 6, 0, rng, b=b)
        assert tr.success and tr.cached
        assert (tr.bits_from_mbs, tr.bits_from_sbs) == \
            simnet.transcript_bit_counts(net.cache, True, b, 6, 5)
        assert len(tr.coords) == 6 and len(set(tr.coords)) == 6


def test_run_retrieval_uncached_uses_dummy_queries():
    gamma = [0.0, 0.0, 0.0, 1.0]
    net = partial_network(gamma)
    rng = np.random.default_rng(3)
    tr = simnet.run_retrieval(net, 1, 3, 2, rng, keep_messages=True)
    assert not tr.cached and tr.success
    assert tr.bits_from_mbs == net.cache.library.L  # beta = 1
    assert tr.bits_from_sbs == 3 * simnet.response_bits(net.cache, 2)
    # the dummy queries target some cached file
    assert tr.queries.file_index in (0, 1)


def test_run_retrieval_cached_partial_coverage():
    net = partial_network([0.0, 1.0])
    rng = np.random.default_rng(4)
    for i in (0, 1):
        tr = simnet.run_retrieval(net, 1, 3, i, rng, b=1)
        assert tr.success
        assert tr.bits_from_sbs == simnet.response_bits(net.cache, 2)
        assert tr.bits_from_mbs == 2 * simnet.response_bits(net.cache, 2)


def test_run_retrieval_deterministic_under_seed():
    net = example_network([0.2, 0.1, 0.1, 0.1, 0.1, 0.2, 0.2])
    a = simnet.run_retrieval(net, 1, 6, 1, np.random.default_rng(9),
                             keep_messages=True)
    b = simnet.run_retrieval(net, 1, 6, 1, np.random.default_rng(9),
                             keep_messages=True)
    assert a.summary() == b.summary()
    assert a.queries.Q == b.queries.Q and a.responses == b.responses


def test_monte_carlo_matches_closed_form_rates():
    gamma = [0.0, 0.1, 0.2, 0.4, 0.2, 0.1]
    net = partial_network(gamma)
    rng = np.random.default_rng(5)
    est = simnet.monte_carlo(net, 1, 3, trials=40000, rng=rng,
                             full_sessions=20)
    lib = net.cache.library
    mu = net.cache.scheme.mu
    R = float(rates.backhaul_pir(lib.popularity, mu, gamma, 3, 1))
    D = float(rates.sbs_rate_pir(lib.popularity, mu, gamma, 3, 1))
    assert abs(est["R_hat"] - R) <= 3 * est["R_stderr"] + 1e-9
    assert abs(est["D_hat"] - D) <= 3 * est["D_stderr"] + 1e-9
    assert est["full_sessions"] == 20


def test_monte_carlo_point_mass_exact():
    net = example_network([0.0] * 6 + [1.0])  # b = 6 always, everything cached
    rng = np.random.default_rng(6)
    est = simnet.monte_carlo(net, 1, 6, trials=500, rng=rng, full_sessions=5)
    assert est["R_hat"] == 0.0
    assert est["D_hat"] == pytest.approx(6 * 25 / 5)


def test_spy_coalition_accepts_honest_protocol():
    net = example_network()
    rng = np.random.default_rng(7)
    rep = simnet.spy_coalition(net, 1, 6, [3], sessions=3000, rng=rng)
    assert not rep["reject"]


def test_spy_coalition_empty_is_trivial():
    net = example_network()
    rep = simnet.spy_coalition(net, 1, 6, [], sessions=10,
                               rng=np.random.default_rng(0))
    assert rep["p_value"] == 1.0 and not rep["reject"]


def test_spy_coalition_detects_sabotage():
    net = example_network()
    rng = np.random.default_rng(8)
    rep = simnet.spy_coalition(net, 1, 6, [0], sessions=400, rng=rng,
                               sabotage=True)
    assert rep["reject"] and rep["p_value"] < 1e-6
