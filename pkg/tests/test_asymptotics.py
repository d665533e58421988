import math

import numpy as np
import pytest

from conftest import complex_gaussian
from relaysec.asymptotics import (AsymptoticReport, difference_eigmax, high_snr_constants,
                                  high_snr_gap, high_snr_report, large_m_gap, large_m_report,
                                  low_snr_report, low_snr_slopes, measured_low_snr_slopes)
from relaysec.channel import FadingConfig, sample_channel
from relaysec.errors import InvalidInputError, UnsupportedDimensionError
from relaysec.pencil import PencilSpec, pencil_eigmax


def null_gain_oracle(h, z, trials, seed):
    """Max of |h^H x|^2 over random unit x orthogonal to z.

    Trial vectors are drawn in span{h, z} before projection: components
    outside the span do not change |h^H x| and only dilute the search.
    """
    rng = np.random.default_rng(seed)
    raw = rng.standard_normal((trials, 2)) + 1j * rng.standard_normal((trials, 2))
    v = raw[:, :1] * h[None, :] + raw[:, 1:] * z[None, :]
    v -= np.outer(v @ z.conj(), z) / np.vdot(z, z).real
    v /= np.linalg.norm(v, axis=1, keepdims=True)
    return float(np.max(np.abs(v @ h.conj()) ** 2))


def test_constants_examples():
    assert high_snr_constants([1, 1, 0], [1, 0, 0])[0] == pytest.approx(1.0, abs=1e-15)
    h, z = np.array([1.0, 2j, 0]), np.array([0, 0, 3.0])
    c_d, c_e = high_snr_constants(h, z)
    assert c_d == pytest.approx(5.0) and c_e == pytest.approx(9.0)
    assert high_snr_constants(h, (1 - 1j) * h) == (0.0, 0.0)


def test_constants_against_oracle():
    rng = np.random.default_rng(21)
    h, z = complex_gaussian(rng, 5), complex_gaussian(rng, 5)
    c_d, c_e = high_snr_constants(h, z)
    oracle = null_gain_oracle(h, z, 100_000, 1)
    assert oracle <= c_d * (1 + 1e-12)
    assert (c_d - oracle) / c_d <= 0.01
    assert (c_e - null_gain_oracle(z, h, 100_000, 2)) / c_e <= 0.01


def test_constants_need_two_relays():
    with pytest.raises(UnsupportedDimensionError):
        high_snr_constants([1.0], [1.0])
    with pytest.raises(InvalidInputError):
        high_snr_constants([0.0, 0.0], [1.0, 0.0])


def test_high_snr_gap_examples():
    rng = np.random.default_rng(3)
    h, z = complex_gaussian(rng, 3), complex_gaussian(rng, 3)
    far = high_snr_gap(h, z, 0.5, 1e6)
    near = high_snr_gap(h, z, 0.5, 1e2)
    assert far.gap_d <= 0.05
    assert far.gap_d <= near.gap_d + 1e-6
    ortho = high_snr_gap([1, 0, 0], [0, 1j, 0], 0.5, 37.0)
    assert ortho.gap_d == 0.0 and ortho.gap_e == 0.0


def test_high_snr_asymptote_converges():
    rng = np.random.default_rng(4)
    h, z = complex_gaussian(rng, 4), complex_gaussian(rng, 4)
    gaps = [high_snr_gap(h, z, 0.3, p).asymptote_gap_d for p in (1e2, 1e4, 1e6, 1e8)]
    assert all(g >= 0 for g in gaps)
    assert np.all(np.diff(gaps) < 0)
    assert gaps[-1] < 1e-5


def test_high_snr_gap_alpha_must_be_interior():
    with pytest.raises(InvalidInputError):
        high_snr_gap([1, 0], [0, 1], 0.0, 10.0)


def test_high_snr_gap_shrinks_tenfold_every_instance():
    cfg = FadingConfig(m=3, seed=11)
    for i in range(50):
        real = sample_channel(cfg, i)
        lo = high_snr_gap(real.h, real.z, 0.5, 1e2)
        hi = high_snr_gap(real.h, real.z, 0.5, 1e6)
        for a, b in ((lo.gap_d, hi.gap_d), (lo.gap_e, hi.gap_e)):
            assert a >= -1e-9 and b >= -1e-9
            assert b <= a / 10 + 1e-12


def test_difference_eigmax_examples():
    assert difference_eigmax([1, 0], [0, 1]) == 1.0
    h = np.array([3.0, 1j, 0.5])
    assert difference_eigmax(h, 0.5 * h) == pytest.approx(0.75 * np.vdot(h, h).real)
    # z dominates along a shared direction: largest eigenvalue is the zero
    # eigenvalue of the orthogonal complement
    assert difference_eigmax(h, 2 * h) == 0.0


def test_difference_eigmax_against_dense(rng):
    for m in (2, 3, 6):
        h, z = complex_gaussian(rng, m), complex_gaussian(rng, m)
        dense = np.linalg.eigvalsh(np.outer(h, h.conj()) - np.outer(z, z.conj()))[-1]
        assert difference_eigmax(h, z) == pytest.approx(dense, rel=1e-10)


def test_low_snr_slope_matches_small_power_pencil():
    rng = np.random.default_rng(30)
    h, z = complex_gaussian(rng, 4), complex_gaussian(rng, 4)
    p = 1e-4
    measured = pencil_eigmax(PencilSpec(h, z, p, p)).excess / p
    assert measured == pytest.approx(difference_eigmax(h, z), rel=1e-2)


def test_low_snr_outer_equals_tdma_exactly(rng):
    h, z = complex_gaussian(rng, 5), complex_gaussian(rng, 5)
    s = low_snr_slopes(h, z, 0.4, p_r=1e-3)
    assert s["slope_outer_d"] == s["slope_tdma_d"]
    assert s["slope_outer_e"] == s["slope_tdma_e"]
    assert s["slope_single_d"] == s["slope_outer_d"]


def test_low_snr_slopes_units(rng):
    h, z = complex_gaussian(rng, 3), complex_gaussian(rng, 3)
    bits = low_snr_slopes(h, z, 0.5)
    nats = low_snr_slopes(h, z, 0.5, unit="nats")
    for key in bits:
        assert bits[key] == pytest.approx(nats[key] / math.log(2), rel=1e-15)


def test_low_snr_consistency_every_scheme():
    cfg = FadingConfig(m=5, seed=12)
    p = 1e-4
    for i in range(30):
        real = sample_channel(cfg, i)
        for alpha in (0.2, 0.5, 0.8):
            predicted = low_snr_slopes(real.h, real.z, alpha, p_r=p)
            measured = measured_low_snr_slopes(real.h, real.z, alpha, p)
            for key, value in predicted.items():
                if value == 0.0:
                    assert abs(measured[key]) <= 1e-6
                else:
                    assert measured[key] == pytest.approx(value, rel=0.02), key


def test_large_m_gap_examples():
    assert large_m_gap([1, 0], [0, 1], 0.5, 3.0) == 0.0
    h = np.array([1.0, 2.0, 2.0j])
    a = 0.5 * 3.0
    expected = a * 9.0 / (1.0 + a * 9.0)
    assert large_m_gap(h, (0.2 + 1j) * h, 0.5, 3.0) == pytest.approx(expected, rel=1e-14)


def mean_large_m_gap(m, seed, draws=50):
    cfg = FadingConfig(m=m, sigma_h=2.0, sigma_z=2.0, seed=seed)
    return float(np.mean([large_m_gap(r.h, r.z, 0.5, 2.0)
                          for r in (sample_channel(cfg, i) for i in range(draws))]))


def test_large_m_ensemble_below_threshold():
    assert mean_large_m_gap(100, seed=0) < 0.05


def test_large_m_decreasing_across_ensembles():
    decreasing = 0
    for seed in range(20):
        g = [mean_large_m_gap(m, seed) for m in (5, 20, 100)]
        decreasing += g[0] > g[1] > g[2]
    assert decreasing >= 19


def test_reports_have_consistent_lengths(rng):
    h, z = complex_gaussian(rng, 3), complex_gaussian(rng, 3)
    grid = [1e2, 1e4]
    hi = high_snr_report(h, z, 0.5, grid)
    lo = low_snr_report(h, z, 0.5, [1e-3, 1e-4])
    lm = large_m_report(h, z, 0.5, [1.0])
    for rep in (hi, lo, lm):
        assert all(len(v) == len(rep.p_r_values) for v in rep.gaps.values())
    assert len(hi.rows()) == 2 * (2 + 4)
    with pytest.raises(InvalidInputError):
        AsymptoticReport("high_snr", 0.5, np.array([1.0]), gaps={"g": np.zeros(2)})
    with pytest.raises(InvalidInputError):
        AsymptoticReport("medium", 0.5, np.array([1.0]))
    with pytest.raises(InvalidInputError):
        high_snr_report(h, z, 0.5, [])
