"""Tests for spectrum estimation.

Oracles: direct DFT sums evaluated with explicit outer products (no
rfft), the closed-form sine-taper expression, Parseval's identity, and
exact power-law inputs for the slope fit.
"""

import numpy as np
import pytest

from paleorecon import spectral
from paleorecon.errors import DegenerateInputError, ParameterDomainError
from paleorecon.noise import sample_fgn


def direct_periodogram(x):
    """P_j = |sum_t x_t e^{-2 pi i j t / n}|^2 / n by explicit sums."""
    x = np.asarray(x, dtype=float)
    x = x - x.mean()
    n = x.size
    t = np.arange(n)
    out = []
    for j in range(1, n // 2 + 1):
        c = np.sum(x * np.exp(-2j * np.pi * j * t / n))
        out.append(abs(c) ** 2 / n)
    return np.array(out)


class TestPeriodogram:
    def test_matches_direct_dft(self):
        rng = np.random.default_rng(0)
        for n in (8, 17, 32, 101):
            x = rng.standard_normal(n)
            est = spectral.periodogram(x)
            np.testing.assert_allclose(est.power, direct_periodogram(x), rtol=1e-10)
            np.testing.assert_allclose(
                est.frequencies, np.arange(1, n // 2 + 1) / n, rtol=0
            )

    def test_parseval(self):
        # sum of ordinates relates to the centered sum of squares
        rng = np.random.default_rng(1)
        for n in (24, 25):
            x = rng.standard_normal(n)
            est = spectral.periodogram(x)
            ss = np.sum((x - x.mean()) ** 2)
            total = est.power.sum()
            if n % 2 == 0:
                total -= est.power[-1] / 2.0  # Nyquist counted once
            assert abs(total - ss / 2.0) < 1e-9

    def test_pure_cosine_concentrates(self):
        n, j, amp = 64, 5, 2.0
        t = np.arange(n)
        x = amp * np.cos(2 * np.pi * j * t / n)
        est = spectral.periodogram(x)
        # |sum A cos(2 pi j t / n) e^{-2 pi i j t / n}|^2 / n = A^2 n / 4
        assert abs(est.power[j - 1] - amp**2 * n / 4.0) < 1e-9
        others = np.delete(est.power, j - 1)
        assert others.max() < 1e-18

    def test_mean_invariance(self):
        rng = np.random.default_rng(2)
        x = rng.standard_normal(50)
        a = spectral.periodogram(x).power
        b = spectral.periodogram(x + 100.0).power
        np.testing.assert_allclose(a, b, atol=1e-8)

    def test_degenerate_inputs(self):
        with pytest.raises(DegenerateInputError):
            spectral.periodogram(np.ones(32))
        with pytest.raises(DegenerateInputError):
            spectral.periodogram(np.arange(5.0))
        with pytest.raises(DegenerateInputError):
            spectral.periodogram(np.array([1.0, np.nan] + [0.0] * 10))


class TestSineTapers:
    def test_closed_form(self):
        n, k = 30, 4
        v = spectral.sine_tapers(n, k)
        t = np.arange(1, n + 1)
        for order in range(1, k + 1):
            expected = np.sqrt(2.0 / (n + 1)) * np.sin(np.pi * order * t / (n + 1))
            np.testing.assert_allclose(v[order - 1], expected, rtol=1e-14)

    def test_orthonormal(self):
        v = spectral.sine_tapers(128, 9)
        gram = v @ v.T
        np.testing.assert_allclose(gram, np.eye(9), atol=1e-12)


class TestMultitaper:
    def test_single_taper_is_eigen_spectrum(self):
        rng = np.random.default_rng(3)
        x = rng.standard_normal(96)
        est = spectral.multitaper(x, tapers=1)
        xc = x - x.mean()
        v = spectral.sine_tapers(96, 1)[0]
        tapered = v * xc
        direct = direct_periodogram_unnormalized(tapered)
        np.testing.assert_allclose(est.power, direct, rtol=1e-10)

    def test_variance_reduction_on_white_noise(self):
        rng = np.random.default_rng(4)
        x = rng.standard_normal(512)
        rough = spectral.periodogram(x).power
        smooth = spectral.multitaper(x, tapers=8).power
        assert np.var(np.log(smooth)) < 0.5 * np.var(np.log(rough))

    def test_level_on_white_noise(self):
        # density of unit white noise in cycles units is 1 (two-sided)
        rng = np.random.default_rng(5)
        x = rng.standard_normal(4096)
        est = spectral.multitaper(x, tapers=10)
        assert abs(est.power.mean() - 1.0) < 0.1

    def test_taper_count_validation(self):
        x = np.random.default_rng(6).standard_normal(64)
        with pytest.raises(ParameterDomainError):
            spectral.multitaper(x, tapers=0)
        with pytest.raises(ParameterDomainError):
            spectral.multitaper(x, tapers=17)  # > n/4

    def test_metadata(self):
        x = np.random.default_rng(7).standard_normal(100)
        est = spectral.multitaper(x, tapers=5)
        assert est.method == "multitaper"
        assert est.taper_count == 5
        assert spectral.periodogram(x).method == "periodogram"


def direct_periodogram_unnormalized(y):
    """|DFT|^2 at positive frequencies without the 1/n factor (for unit
    energy tapers)."""
    n = y.size
    t = np.arange(n)
    out = []
    for j in range(1, n // 2 + 1):
        c = np.sum(y * np.exp(-2j * np.pi * j * t / n))
        out.append(abs(c) ** 2)
    return np.array(out)


class TestLoglogSlope:
    def test_exact_power_law(self):
        freqs = np.arange(1, 101) / 200.0
        alpha = 0.62
        est = spectral.SpectrumEstimate(freqs, freqs ** (-alpha), "periodogram")
        fit = spectral.loglog_slope(est)
        assert abs(fit.slope + alpha) < 1e-12
        assert abs(fit.implied_hurst - (1 + alpha) / 2.0) < 1e-12

    def test_fraction_selects_low_band(self):
        freqs = np.arange(1, 101) / 200.0
        power = freqs ** (-0.5)
        power[50:] = 1e6  # corrupt the high band
        est = spectral.SpectrumEstimate(freqs, power, "periodogram")
        fit = spectral.loglog_slope(est, freq_fraction=0.5)
        assert abs(fit.slope + 0.5) < 1e-12

    def test_fraction_validation(self):
        freqs = np.arange(1, 101) / 200.0
        est = spectral.SpectrumEstimate(freqs, freqs**-0.2, "periodogram")
        with pytest.raises(ParameterDomainError):
            spectral.loglog_slope(est, freq_fraction=0.0)
        with pytest.raises(DegenerateInputError):
            spectral.loglog_slope(est, freq_fraction=0.05)  # < 8 points

    def test_nonpositive_power_rejected(self):
        freqs = np.arange(1, 20) / 40.0
        power = np.ones(19)
        power[3] = 0.0
        with pytest.raises(DegenerateInputError):
            spectral.loglog_slope(spectral.SpectrumEstimate(freqs, power, "x"))

    def test_fgn_sample_slope(self):
        h = 0.8
        x = sample_fgn(h, 4096, seed=12)
        est = spectral.multitaper(x, tapers=8)
        fit = spectral.loglog_slope(est, freq_fraction=0.25)
        assert abs(fit.implied_hurst - h) < 0.15
