"""Tests for the long-memory tests and the local Whittle estimator.

Statistical checks use fixed seeds and operating points chosen so the
margins are overwhelming (n = 2048, H = 0.8 gives essentially certain
rejections); calibration-rate checks over many replicates live in the
acceptance suite.
"""

import numpy as np
import pytest

from paleorecon import memtests
from paleorecon.errors import DegenerateInputError, ParameterDomainError
from paleorecon.noise import NoiseModel, sample_fgn, sample_path


class TestBandwidth:
    def test_default_formula(self):
        for n in (100, 500, 2048, 9999):
            assert memtests.default_bandwidth(n) == int(n**0.65)

    def test_bounds_enforced(self):
        x = np.random.default_rng(0).standard_normal(64)
        with pytest.raises(ParameterDomainError):
            memtests.local_whittle(x, m=1)
        with pytest.raises(ParameterDomainError):
            memtests.local_whittle(x, m=32)  # > (n-1)//2


class TestLocalWhittle:
    def test_recovers_h_single_path(self):
        for h in (0.6, 0.8):
            x = sample_fgn(h, 2048, seed=21)
            assert abs(memtests.local_whittle(x) - h) < 0.12

    def test_white_noise_near_half(self):
        x = np.random.default_rng(22).standard_normal(2048)
        assert abs(memtests.local_whittle(x) - 0.5) < 0.1

    def test_scale_invariance(self):
        x = sample_fgn(0.7, 512, seed=23)
        a = memtests.local_whittle(x)
        b = memtests.local_whittle(1e6 * x)
        c = memtests.local_whittle(1e-6 * x)
        assert abs(a - b) < 1e-12
        assert abs(a - c) < 1e-12

    def test_objective_minimum(self):
        # the returned H must beat a grid of alternatives on the
        # documented profiled objective
        x = sample_fgn(0.75, 1024, seed=24)
        m = memtests.default_bandwidth(1024)
        n = x.size
        xc = x - x.mean()
        coef = np.fft.rfft(xc)[1 : m + 1]
        ordinates = (coef.real**2 + coef.imag**2) / (2 * np.pi * n)
        lam = 2 * np.pi * np.arange(1, m + 1) / n

        def objective(h):
            g_hat = np.mean(ordinates * lam ** (2 * h - 1))
            return np.log(g_hat) - (2 * h - 1) * np.mean(np.log(lam))

        h_hat = memtests.local_whittle(x)
        best = objective(h_hat)
        for h in np.linspace(0.02, 0.98, 97):
            assert best <= objective(h) + 1e-8

    def test_input_checks(self):
        with pytest.raises(DegenerateInputError):
            memtests.local_whittle(np.ones(100))
        with pytest.raises(DegenerateInputError):
            memtests.local_whittle(np.arange(4.0))


class TestRobinson:
    def test_statistic_definition(self):
        x = sample_fgn(0.7, 1024, seed=30)
        m = 140
        res = memtests.robinson_test(x, m=m)
        h_hat = memtests.local_whittle(x, m=m)
        assert abs(res.statistic - 2.0 * np.sqrt(m) * (h_hat - 0.5)) < 1e-12
        assert res.estimate == pytest.approx(h_hat)
        assert res.bandwidth == m

    def test_rejects_long_memory(self):
        x = sample_fgn(0.8, 2048, seed=31)
        res = memtests.robinson_test(x)
        assert res.statistic > 3.0
        assert res.p_value < 1e-3

    def test_accepts_white_noise(self):
        x = np.random.default_rng(32).standard_normal(2048)
        res = memtests.robinson_test(x)
        assert res.p_value > 0.01

    def test_p_value_is_upper_tail(self):
        # antipersistent data must give a p-value near 1
        x = sample_fgn(0.2, 2048, seed=33)
        res = memtests.robinson_test(x)
        assert res.p_value > 0.9


class TestBeran:
    def test_fgn_null_fits_fgn_data(self):
        x = sample_fgn(0.8, 2048, seed=40)
        res = memtests.beran_test(x, null_model="fgn")
        assert res.p_value > 0.01
        assert abs(res.estimate - 0.8) < 0.1

    def test_white_null_rejected_on_fgn_data(self):
        x = sample_fgn(0.8, 2048, seed=41)
        res = memtests.beran_test(x, null_model="white")
        assert res.p_value < 1e-4

    def test_ar1_null_fits_ar1_data(self):
        x = sample_path(NoiseModel.ar1(0.6), 2048, np.random.default_rng(42))
        res = memtests.beran_test(x, null_model="ar1")
        assert res.p_value > 0.01
        assert "ar1" in res.null_model

    def test_white_null_fits_white_data(self):
        x = np.random.default_rng(43).standard_normal(2048)
        res = memtests.beran_test(x, null_model="white")
        assert res.p_value > 0.01
        assert res.estimate is None

    def test_unknown_null_rejected(self):
        x = np.random.default_rng(44).standard_normal(256)
        with pytest.raises(ParameterDomainError):
            memtests.beran_test(x, null_model="arma")

    def test_minimum_length(self):
        with pytest.raises(DegenerateInputError):
            memtests.beran_test(np.random.default_rng(45).standard_normal(32))


class TestDaviesHarte:
    def test_exact_null_moments_by_simulation(self):
        # the standardized statistic must have mean ~0 and variance ~1
        # under the white null; moments here are exact, not asymptotic
        reps, n = 400, 128
        stats_ = np.empty(reps)
        for r in range(reps):
            x = np.random.default_rng(5000 + r).standard_normal(n)
            stats_[r] = memtests.davies_harte_test(x).statistic
        assert abs(stats_.mean()) < 3.0 / np.sqrt(reps)
        assert abs(stats_.var(ddof=1) - 1.0) < 0.25

    def test_rejects_long_memory(self):
        x = sample_fgn(0.8, 1024, seed=50)
        res = memtests.davies_harte_test(x)
        assert res.p_value < 1e-4

    def test_upper_tail_orientation(self):
        x = sample_fgn(0.2, 1024, seed=51)
        assert memtests.davies_harte_test(x).p_value > 0.9

    def test_scale_and_shift_invariance(self):
        x = np.random.default_rng(52).standard_normal(256)
        a = memtests.davies_harte_test(x).statistic
        b = memtests.davies_harte_test(7.0 * x + 3.0).statistic
        assert abs(a - b) < 1e-9

    def test_quadratic_form_matches_direct(self):
        # statistic ratio R = x'Ax / x'x with A_ij = a(|i-j|), a(0)=0,
        # evaluated by explicit matrix assembly
        x = np.random.default_rng(53).standard_normal(80)
        n = x.size
        xc = x - x.mean()
        k = np.arange(1, n, dtype=float)
        a = (k + 1) * np.log(k + 1) - 2 * k * np.log(k)
        a[1:] += (k[1:] - 1) * np.log(k[1:] - 1)
        coeffs = np.concatenate([[0.0], a])
        i = np.arange(n)
        amat = coeffs[np.abs(i[:, None] - i[None, :])]
        ratio = xc @ amat @ xc / (xc @ xc)

        p = np.eye(n) - np.ones((n, n)) / n
        ap = amat @ p
        r = n - 1
        mean_r = np.trace(ap) / r
        var_r = 2 * (np.trace(ap @ ap) - np.trace(ap) ** 2 / r) / (r * (r + 2))
        expected = (ratio - mean_r) / np.sqrt(var_r)
        got = memtests.davies_harte_test(x).statistic
        assert abs(got - expected) < 1e-8
