"""Coverage distributions for grid and PPP deployments."""

import math

import numpy as np
import pytest

from edgepir import topology


def test_coverage_validation():
    with pytest.raises(ValueError):
        topology.CoverageDistribution([0.5, 0.6])
    with pytest.raises(ValueError):
        topology.CoverageDistribution([-0.1, 1.1])
    cd = topology.CoverageDistribution([0.25, 0.5, 0.25])
    assert cd.N_max == 2
    assert topology.CoverageDistribution([1.0, 0.0]).N_max == 0


def test_zipf_basics():
    p = topology.zipf(5, 0.0)
    assert p == [0.2] * 5
    p = topology.zipf(4, 1.0)
    s = 1 + 1 / 2 + 1 / 3 + 1 / 4
    assert abs(p[0] - 1 / s) < 1e-12
    assert all(a >= b for a, b in zip(p, p[1:]))
    assert abs(sum(p) - 1.0) < 1e-12
    with pytest.raises(ValueError):
        topology.zipf(0, 1.0)
    with pytest.raises(ValueError):
        topology.zipf(3, -0.5)


def test_grid_positions_symmetric_and_in_reach():
    m = topology.GridModel(D=500.0, spacing=60.0, r=60.0)
    pts = m.sbs_positions()
    reach = m.D + m.r
    assert (np.hypot(pts[:, 0], pts[:, 1]) <= reach + 1e-6).all()
    # origin is a lattice point, and the set is symmetric under negation
    assert any((p == [0.0, 0.0]).all() for p in pts)
    keys = {(round(x, 6), round(y, 6)) for x, y in pts}
    assert all((-x, -y) in keys for x, y in keys)


def test_sbs_count_in_cell():
    m = topology.GridModel(D=500.0, spacing=60.0, r=60.0)
    # lattice points with x,y multiples of 60 inside radius 500
    brute = sum(1 for i in range(-9, 10) for j in range(-9, 10)
                if (60 * i) ** 2 + (60 * j) ** 2 <= 500 ** 2 + 1e-9)
    assert m.sbs_count_in_cell() == brute


def test_spacing_for_count_hits_attainable_targets():
    for target in (5, 9, 21, 221):
        s = topology.spacing_for_count(500.0, target)
        m = topology.GridModel(D=500.0, spacing=s, r=0.0)
        assert m.sbs_count_in_cell() == target


def test_spacing_for_count_near_316():
    """316 points are not attainable on a centered square lattice in a
    500 m disc; the closest count is 317, at spacing just under 50 m."""
    s = topology.spacing_for_count(500.0, 316)
    m = topology.GridModel(D=500.0, spacing=s, r=0.0)
    assert m.sbs_count_in_cell() == 317
    assert 49.0 < s < 51.0


def test_grid_gamma_matches_reference_curve():
    """60 m spacing and range in a 500 m cell: mostly 3-5 SBSs in range."""
    m = topology.GridModel(D=500.0, spacing=60.0, r=60.0)
    cd = topology.grid_gamma(m, mc_samples=200000, seed=0)
    ref = [0.0, 0.0, 0.1736, 0.5113, 0.3151]
    assert cd.N_max == 4
    for b, g in enumerate(ref):
        assert abs(cd.gamma[b] - g) < 0.01


def test_grid_gamma_deterministic_in_seed():
    m = topology.GridModel(D=100.0, spacing=40.0, r=50.0)
    a = topology.grid_gamma(m, mc_samples=5000, seed=3)
    b = topology.grid_gamma(m, mc_samples=5000, seed=3)
    assert a.gamma == b.gamma


def test_grid_gamma_geometry_oracle():
    """A single SBS at the origin, always in range: gamma is a point mass."""
    m = topology.GridModel(D=50.0, spacing=3000.0, r=1000.0)
    pts = m.sbs_positions()
    assert len(pts) == 1
    cd = topology.grid_gamma(m, mc_samples=1000, seed=0)
    assert cd.gamma == [0.0, 1.0]


def test_ppp_gamma_is_poisson():
    model = topology.PppModel(lam=1e-4, r_u=60.0)
    psi = model.psi
    assert abs(psi - 1e-4 * math.pi * 3600) < 1e-12
    cd = topology.ppp_gamma(model)
    for b in range(6):
        expect = math.exp(-psi) * psi ** b / math.factorial(b)
        assert abs(cd.gamma[b] - expect) < 1e-9
    assert abs(sum(cd.gamma) - 1.0) < 1e-12


def test_ppp_gamma_zero_density():
    cd = topology.ppp_gamma(topology.PppModel(lam=0.0, r_u=60.0))
    assert cd.gamma[0] == 1.0 and cd.N_max == 0


def test_sample_coverage_grid_agrees_with_gamma():
    m = topology.GridModel(D=200.0, spacing=80.0, r=80.0)
    cd = topology.grid_gamma(m, mc_samples=400000, seed=1)
    rng = np.random.default_rng(2)
    trials = 20000
    counts = {}
    for _ in range(trials):
        _, inrange = topology.sample_coverage(m, rng)
        counts[len(inrange)] = counts.get(len(inrange), 0) + 1
    for b, g in enumerate(cd.gamma):
        obs = counts.get(b, 0) / trials
        sigma = math.sqrt(max(g * (1 - g), 1e-12) / trials)
        assert abs(obs - g) <= max(4 * sigma, 1e-3)


def test_sample_coverage_ppp_agrees_with_gamma():
    model = topology.PppModel(lam=2e-4, r_u=60.0)
    cd = topology.ppp_gamma(model)
    rng = np.random.default_rng(4)
    trials = 20000
    counts = {}
    for _ in range(trials):
        _, inrange = topology.sample_coverage(model, rng)
        counts[len(inrange)] = counts.get(len(inrange), 0) + 1
    for b in range(6):
        g = cd.gamma[b]
        obs = counts.get(b, 0) / trials
        sigma = math.sqrt(max(g * (1 - g), 1e-12) / trials)
        assert abs(obs - g) <= max(4 * sigma, 1e-3)


def test_sample_coverage_indices_are_in_range():
    m = topology.GridModel(D=150.0, spacing=70.0, r=90.0)
    pts = m.sbs_positions()
    rng = np.random.default_rng(6)
    for _ in range(50):
        (ux, uy), inrange = topology.sample_coverage(m, rng)
        assert math.hypot(ux, uy) <= m.D + 1e-9
        for i in range(len(pts)):
            d = math.hypot(pts[i, 0] - ux, pts[i, 1] - uy)
            assert (i in inrange) == (d <= m.r + 1e-9)


def test_sample_coverage_rejects_unknown_model():
    with pytest.raises(TypeError):
        topology.sample_coverage(object(), np.random.default_rng(0))
