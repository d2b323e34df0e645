"""Tests for GRF bathymetry generation, shore tapering, BC and noise sampling."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from riverflow.bathymetry import (
    BcRanges,
    GrfSpec,
    RngSeed,
    add_velocity_noise,
    augment_bathymetry,
    derive_stream,
    kernel_cov,
    sample_bc,
    sample_grf,
    sample_grf_batch,
    shore_taper,
)
from riverflow.fields import ScalarField, VectorField, make_grid

SPEC = GrfSpec(beta=1.2, len_x=115.0, len_y=29.0, taper_exp=1.0)

# Grid whose spacings divide the correlation lengths exactly: lag (115, 0) is
# 5 cells along x, lag (0, 29) is 4 cells along y.
MC_GRID = make_grid(64, 16, 23.0, 7.25)


# --------------------------------------------------------------------------- #
# Kernel                                                                       #
# --------------------------------------------------------------------------- #


def test_kernel_at_zero_lag_is_beta_squared():
    assert kernel_cov(0.0, 0.0, SPEC) == pytest.approx(1.44, abs=1e-12)


def test_kernel_at_one_length_x():
    # analytic substitution lag_x = len_x: beta^2 * e^-1
    assert kernel_cov(115.0, 0.0, SPEC) == pytest.approx(1.44 * math.exp(-1), rel=1e-12)
    assert kernel_cov(115.0, 0.0, SPEC) == pytest.approx(0.52975, abs=5e-6)


def test_kernel_at_both_lengths():
    assert kernel_cov(115.0, 29.0, SPEC) == pytest.approx(1.44 * math.exp(-2), rel=1e-12)
    assert kernel_cov(115.0, 29.0, SPEC) == pytest.approx(0.19489, abs=1e-5)


def test_kernel_symmetric_in_lag_sign():
    assert kernel_cov(42.0, -13.0, SPEC) == kernel_cov(-42.0, 13.0, SPEC)


@settings(max_examples=100, deadline=None)
@given(
    st.floats(0, 500), st.floats(0, 500), st.floats(0, 200), st.floats(0, 200)
)
def test_kernel_monotone_nonincreasing_in_lag(ax, bx, ay, by):
    lo_x, hi_x = sorted((ax, bx))
    lo_y, hi_y = sorted((ay, by))
    assert kernel_cov(hi_x, lo_y, SPEC) <= kernel_cov(lo_x, lo_y, SPEC) + 1e-15
    assert kernel_cov(lo_x, hi_y, SPEC) <= kernel_cov(lo_x, lo_y, SPEC) + 1e-15


def test_grf_spec_validation():
    with pytest.raises(ValueError):
        GrfSpec(beta=-1.0)
    with pytest.raises(ValueError):
        GrfSpec(len_x=0.0)
    with pytest.raises(ValueError):
        GrfSpec(taper_exp=-0.5)


# --------------------------------------------------------------------------- #
# Shore taper                                                                  #
# --------------------------------------------------------------------------- #


def test_taper_exponent_zero_is_identity():
    t = shore_taper(make_grid(8, 6, 10.0, 5.0), 0.0)
    assert np.all(t.values == 1.0)


def test_taper_centerline_of_odd_ny():
    # ny = 5: center row has y_c/W = 0.5 exactly -> sin(pi/2) = 1
    t = shore_taper(make_grid(8, 5, 10.0, 5.0), 1.0)
    assert t.as_2d()[2, 0] == pytest.approx(1.0, abs=1e-15)


def test_taper_quarter_width_squared():
    # ny = 6: row j=1 has y_c/W = 1.5/6 = 0.25 -> sin(pi/4)^2 = 0.5
    t = shore_taper(make_grid(8, 6, 10.0, 5.0), 2.0)
    assert t.as_2d()[1, 0] == pytest.approx(0.5, rel=1e-12)


def test_taper_in_unit_interval_and_constant_along_x():
    t = shore_taper(make_grid(12, 9, 10.0, 5.0), 1.5)
    assert np.all(t.values >= 0.0) and np.all(t.values <= 1.0)
    assert np.allclose(t.as_2d(), t.as_2d()[:, :1])


# --------------------------------------------------------------------------- #
# GRF sampling                                                                 #
# --------------------------------------------------------------------------- #


def test_grf_beta_zero_is_all_zero():
    f = sample_grf(GrfSpec(beta=0.0), make_grid(8, 4, 10.0, 5.0), RngSeed(7))
    assert np.all(f.values == 0.0)


def test_grf_deterministic_per_stream():
    g = make_grid(8, 4, 10.0, 5.0)
    a = sample_grf(SPEC, g, RngSeed(5, 9))
    b = sample_grf(SPEC, g, RngSeed(5, 9))
    c = sample_grf(SPEC, g, RngSeed(5, 10))
    assert np.array_equal(a.values, b.values)
    assert not np.array_equal(a.values, c.values)


def test_grf_monte_carlo_mean_and_covariance():
    # 5000 draws; empirical stats vs. the analytic kernel (the oracle).
    n_draws = 5000
    draws = sample_grf_batch(SPEC, MC_GRID, RngSeed(123), n_draws)
    nx, ny = MC_GRID.nx, MC_GRID.ny

    # mean at every cell within the 3-sigma CLT band 3*beta/sqrt(N)
    bound = 3 * 1.2 / math.sqrt(n_draws)
    assert np.abs(draws.mean(axis=0)).max() < bound * 1.5  # small slack for max over cells

    cube = draws.reshape(n_draws, ny, nx)

    # variance (lag 0,0)
    var = cube.var(axis=0).mean()
    assert var == pytest.approx(kernel_cov(0.0, 0.0, SPEC), rel=0.10)

    # lag (115 m, 0) = 5 cells along x, averaged over all such pairs
    c = cube - cube.mean(axis=0)
    cov_x = (c[:, :, :-5] * c[:, :, 5:]).mean()
    assert cov_x == pytest.approx(kernel_cov(115.0, 0.0, SPEC), rel=0.10)

    # lag (0, 29 m) = 4 cells along y
    cov_y = (c[:, :-4, :] * c[:, 4:, :]).mean()
    assert cov_y == pytest.approx(kernel_cov(0.0, 29.0, SPEC), rel=0.10)


def test_grf_single_pair_covariance():
    # The spec-level check on one fixed pair of cells at lag (115, 0).
    draws = sample_grf_batch(SPEC, MC_GRID, RngSeed(99), 5000)
    a = draws[:, 8 * MC_GRID.nx + 10]
    b = draws[:, 8 * MC_GRID.nx + 15]  # 5 cells = 115 m downstream
    emp = np.mean((a - a.mean()) * (b - b.mean()))
    assert emp == pytest.approx(0.530, abs=0.05)


# --------------------------------------------------------------------------- #
# Bathymetry augmentation                                                      #
# --------------------------------------------------------------------------- #


def _base_field(grid):
    rng = np.random.default_rng(4)
    return ScalarField(grid, 25.0 + rng.normal(0, 0.5, grid.n_cells))


def test_augment_identity_at_beta_zero():
    g = make_grid(8, 6, 10.0, 5.0)
    base = _base_field(g)
    out = augment_bathymetry(base, GrfSpec(beta=0.0), RngSeed(3))
    assert np.array_equal(out.values, base.values)


def test_augment_bank_cells_barely_move():
    # taper_exp=2 bounds the outermost-row factor at sin(pi/32)^2 < 0.01,
    # so bank deviations stay below 0.1 * beta for any plausible draw.
    g = make_grid(16, 16, 20.0, 7.5)
    base = _base_field(g)
    spec = GrfSpec(beta=1.2, len_x=115.0, len_y=29.0, taper_exp=2.0)
    out = augment_bathymetry(base, spec, RngSeed(11))
    dev = np.abs(out.as_2d() - base.as_2d())
    assert dev[0, :].max() < 0.1 * spec.beta
    assert dev[-1, :].max() < 0.1 * spec.beta


def test_augment_midstream_variance_matches_taper():
    # Monte Carlo: var at a midstream cell ~= (beta * s(y))^2 within 10%
    g = make_grid(16, 8, 20.0, 7.5)
    base = ScalarField(g, np.zeros(g.n_cells))
    vals = np.empty((5000, g.n_cells))
    for i in range(5000):
        vals[i] = augment_bathymetry(base, SPEC, RngSeed(21, i)).values
    taper = shore_taper(g, SPEC.taper_exp).as_2d()
    var_mid = vals.reshape(-1, 8, 16)[:, 4, 8].var()
    expected = (SPEC.beta * taper[4, 8]) ** 2
    assert var_mid == pytest.approx(expected, rel=0.10)


# --------------------------------------------------------------------------- #
# BC sampling                                                                  #
# --------------------------------------------------------------------------- #


def test_bc_degenerate_ranges():
    r = BcRanges(146.1, 146.1, 29.9, 29.9)
    bc = sample_bc(r, RngSeed(0))
    assert bc.discharge_q == 146.1
    assert bc.surface_zf == 29.9


def test_default_ranges_cover_cited_conditions():
    r = BcRanges()
    for q, zf in [(146.1, 29.9), (651.2, 33.9)]:
        assert r.q_min <= q <= r.q_max
        assert r.zf_min <= zf <= r.zf_max


def test_bc_uniformity():
    r = BcRanges(100.0, 700.0, 29.0, 34.5)
    qs = np.empty(10000)
    zs = np.empty(10000)
    for i in range(10000):
        bc = sample_bc(r, RngSeed(77, i))
        qs[i], zs[i] = bc.discharge_q, bc.surface_zf
    assert qs.min() >= 100.0 and qs.max() <= 700.0
    assert zs.min() >= 29.0 and zs.max() <= 34.5
    # empirical extremes approach the bounds (within 2% of the range width)
    assert qs.min() < 100.0 + 0.02 * 600.0 and qs.max() > 700.0 - 0.02 * 600.0
    assert zs.min() < 29.0 + 0.02 * 5.5 and zs.max() > 34.5 - 0.02 * 5.5


def test_bc_ranges_validation():
    with pytest.raises(ValueError):
        BcRanges(0.0, 100.0, 29.0, 30.0)
    with pytest.raises(ValueError):
        BcRanges(100.0, 50.0, 29.0, 30.0)
    with pytest.raises(ValueError):
        BcRanges(10.0, 50.0, 31.0, 30.0)


# --------------------------------------------------------------------------- #
# Velocity noise                                                               #
# --------------------------------------------------------------------------- #


def test_noise_zero_field_unchanged():
    g = make_grid(8, 4, 10.0, 5.0)
    v = VectorField(g, np.zeros(32), np.zeros(32))
    out = add_velocity_noise(v, RngSeed(1))
    assert np.array_equal(out.easting, v.easting)
    assert np.array_equal(out.northing, v.northing)


def test_noise_std_is_ten_percent_of_max_speed():
    # 1e6 total component draws; estimator std ~ 7e-5, tolerance 1e-3.
    g = make_grid(100, 100, 1.0, 1.0)
    e = np.zeros(10000)
    n = np.zeros(10000)
    e[0] = 1.0  # max speed exactly 1 -> sigma = 0.10
    v = VectorField(g, e, n)
    samples = []
    for i in range(50):
        out = add_velocity_noise(v, RngSeed(8, i))
        samples.append(out.easting - e)
        samples.append(out.northing - n)
    all_noise = np.concatenate(samples)
    assert all_noise.size == 10**6
    assert all_noise.std() == pytest.approx(0.10, abs=1e-3)


def test_noise_deterministic():
    g = make_grid(8, 4, 10.0, 5.0)
    rng = np.random.default_rng(2)
    v = VectorField(g, rng.normal(size=32), rng.normal(size=32))
    a = add_velocity_noise(v, RngSeed(5, 5))
    b = add_velocity_noise(v, RngSeed(5, 5))
    assert np.array_equal(a.easting, b.easting)
    assert np.array_equal(a.northing, b.northing)


# --------------------------------------------------------------------------- #
# Stream derivation                                                            #
# --------------------------------------------------------------------------- #


def test_derive_stream_unique():
    seen = set()
    for kind in range(3):
        for idx in range(50):
            for retry in range(3):
                seen.add(derive_stream(kind, idx, retry))
    assert len(seen) == 3 * 50 * 3


def test_derive_stream_range_check():
    with pytest.raises(ValueError):
        derive_stream(16, 0)
