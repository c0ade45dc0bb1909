"""Tests for the pseudoproxy generator.

The generator is checked against the model equations it claims to
simulate: zero noise variances make both regressions exact, white-noise
runs are recoverable by OLS to sampling error, and the residual series
in the truth dict carry the memory they were drawn with.
"""

import numpy as np
import pytest

from paleorecon.errors import ConfigurationError
from paleorecon.memtests import robinson_test
from paleorecon.sampler import ReconstructionData, forcing_design
from paleorecon.synthetic import ForcingShapes, SyntheticSpec, generate


class TestExactRelations:
    def test_zero_variances_make_regressions_exact(self):
        spec = SyntheticSpec(
            years=(1800, 1998), sigma_p2=0.0, sigma_t2=0.0,
            alpha=(0.5, 2.0), beta=(0.1, 0.4, 0.8, 1.0),
        )
        frame, truth = generate(spec)
        design = forcing_design(
            frame.column("solar"), frame.column("volcanic"), frame.column("ghg"),
        )
        np.testing.assert_allclose(
            truth["temperature"], design @ np.array(spec.beta), rtol=1e-12, atol=1e-12
        )
        np.testing.assert_allclose(
            frame.column("rp"), 0.5 + 2.0 * truth["temperature"], rtol=1e-12
        )
        np.testing.assert_array_equal(truth["process_residuals"], 0.0)
        np.testing.assert_array_equal(truth["proxy_residuals"], 0.0)

    def test_instrumental_masking(self):
        spec = SyntheticSpec(years=(1700, 1998), calibration_start=1900)
        frame, truth = generate(spec)
        temp = frame.column("temp")
        pre = frame.years < 1900
        assert np.isnan(temp[pre]).all()
        np.testing.assert_array_equal(temp[~pre], truth["temperature"][~pre])

    def test_forcings_off_uses_intercept_only(self):
        spec = SyntheticSpec(
            years=(1800, 1998), forcings_included=False,
            beta=(0.7, 0.4, 0.8, 1.0), sigma_t2=0.0, sigma_p2=0.0,
        )
        frame, truth = generate(spec)
        np.testing.assert_array_equal(truth["temperature"], 0.7)
        np.testing.assert_array_equal(truth["beta"], [0.7])
        # forcing columns are still produced for workflows that want them
        assert {"solar", "volcanic", "ghg"} <= set(frame.names())


class TestParameterRecovery:
    def test_ols_recovers_regressions_with_white_noise(self):
        spec = SyntheticSpec(
            years=(1399, 1998),
            alpha=(0.3, 1.5),
            beta=(0.2, 0.5, 0.9, 1.2),
            sigma_p2=0.04,
            sigma_t2=0.04,
            proxy_error="white",
            process_error="white",
            seed=2,
        )
        frame, truth = generate(spec)
        n = frame.years.size
        design = forcing_design(
            frame.column("solar"), frame.column("volcanic"), frame.column("ghg"),
        )
        t = truth["temperature"]

        beta_hat, *_ = np.linalg.lstsq(design, t, rcond=None)
        cov = 0.04 * np.linalg.inv(design.T @ design)
        for j in range(4):
            assert abs(beta_hat[j] - spec.beta[j]) < 3 * np.sqrt(cov[j, j])

        w = np.column_stack([np.ones(n), t])
        alpha_hat, *_ = np.linalg.lstsq(w, frame.column("rp"), rcond=None)
        cov = 0.04 * np.linalg.inv(w.T @ w)
        assert abs(alpha_hat[0] - 0.3) < 3 * np.sqrt(cov[0, 0])
        assert abs(alpha_hat[1] - 1.5) < 3 * np.sqrt(cov[1, 1])

    def test_residual_variances_match_spec(self):
        spec = SyntheticSpec(
            years=(999, 1998), sigma_p2=0.25, sigma_t2=0.09,
            proxy_error="white", process_error="white", seed=3,
        )
        _, truth = generate(spec)
        n = truth["years"].size
        for key, var in (("proxy_residuals", 0.25), ("process_residuals", 0.09)):
            sample = truth[key].var(ddof=1)
            # chi-square spread of a white sample variance
            assert abs(sample - var) < 3 * var * np.sqrt(2.0 / (n - 1))

    def test_long_memory_residuals_detectable(self):
        hits = 0
        for rep in range(20):
            spec = SyntheticSpec(
                years=(999, 1998), process_error="fgn", process_memory=0.8,
                seed=100 + rep,
            )
            _, truth = generate(spec)
            if robinson_test(truth["process_residuals"]).p_value < 0.05 :
                hits += 1
        assert hits >= 16

    def test_white_residuals_not_flagged(self):
        hits = 0
        for rep in range(20):
            spec = SyntheticSpec(
                years=(999, 1998), process_error="white", seed=200 + rep
            )
            _, truth = generate(spec)
            if robinson_test(truth["process_residuals"]).p_value < 0.05:
                hits += 1
        assert hits <= 4


class TestFrameLayout:
    def test_roles_and_columns(self):
        frame, _ = generate(SyntheticSpec(years=(1850, 1998)))
        assert frame.roles["rp"] == "proxy"
        assert frame.roles["temp"] == "temperature"
        for name in ("solar", "volcanic", "ghg"):
            assert frame.roles[name] == "forcing"

    def test_panel_columns(self):
        spec = SyntheticSpec(years=(1850, 1998), panel=3, panel_noise=0.2, seed=4)
        frame, _ = generate(spec)
        names = [n for n in frame.names() if n.startswith("proxy")]
        assert names == ["proxy01", "proxy02", "proxy03"]
        rp = frame.column("rp")
        for name in names:
            resid = frame.column(name) - rp
            assert 0.05 < resid.std(ddof=1) < 0.4
            assert frame.roles[name] == "proxy"
        # distinct noise per panel member
        assert not np.array_equal(frame.column("proxy01"), frame.column("proxy02"))

    def test_volcanic_nonpositive_with_fallback_spike(self):
        # rate small enough that no spike lands: the guard must still
        # give the column variation, with every value nonpositive
        spec = SyntheticSpec(
            years=(1950, 1998),
            calibration_start=1980,
            forcing_shapes=ForcingShapes(volcanic_rate=1e-12, volcanic_scale=2.0),
        )
        frame, _ = generate(spec)
        v = frame.column("volcanic")
        assert np.all(v <= 0.0)
        assert v.min() == -2.0
        assert np.count_nonzero(v) == 1

    def test_ghg_exponential_shape(self):
        shapes = ForcingShapes(ghg_base=300.0, ghg_growth=0.5)
        frame, _ = generate(SyntheticSpec(years=(1899, 1998), forcing_shapes=shapes))
        ghg = frame.column("ghg")
        assert ghg[0] == 300.0
        assert abs(ghg[-1] - 300.0 * np.exp(0.5)) < 1e-9
        # log-linear in time
        assert np.allclose(np.diff(np.log(ghg)), 0.5 / 99.0, rtol=1e-9)

    def test_determinism_and_seed_divergence(self):
        spec = SyntheticSpec(years=(1800, 1998), seed=5)
        frame_a, truth_a = generate(spec)
        frame_b, truth_b = generate(spec)
        np.testing.assert_array_equal(frame_a.column("rp"), frame_b.column("rp"))
        np.testing.assert_array_equal(truth_a["temperature"], truth_b["temperature"])
        frame_c, _ = generate(SyntheticSpec(years=(1800, 1998), seed=6))
        assert not np.array_equal(frame_a.column("rp"), frame_c.column("rp"))


class TestTruthDict:
    def test_keys_and_values(self):
        spec = SyntheticSpec(
            years=(1850, 1998), proxy_error="ar1", proxy_memory=0.4,
            process_error="fgn", process_memory=0.75,
        )
        _, truth = generate(spec)
        assert set(truth) == {
            "alpha", "beta", "sigma_P2", "sigma_T2", "H", "K",
            "proxy_error", "process_error", "forcings_included",
            "years", "calibration_start", "temperature",
            "process_residuals", "proxy_residuals",
        }
        assert truth["H"] == 0.4
        assert truth["K"] == 0.75
        assert truth["calibration_start"] == 1900

    def test_white_memory_pinned(self):
        spec = SyntheticSpec(
            years=(1850, 1998), proxy_error="white", process_error="white",
            proxy_memory=0.9, process_memory=0.9,
        )
        _, truth = generate(spec)
        assert truth["H"] == 0.5
        assert truth["K"] == 0.5

    def test_feeds_reconstruction_data(self):
        frame, _ = generate(SyntheticSpec(years=(1799, 1998), calibration_start=1950))
        data = ReconstructionData.from_frame(
            frame, forcings_included=True,
            calibration_window=(1950, 1998), prediction_window=(1799, 1949),
        )
        assert data.n == 200
        assert data.n_obs == 49


class TestSpecValidation:
    @pytest.mark.parametrize(
        "kwargs",
        [
            dict(years=(1998, 1998)),
            dict(years=(1900, 1998), calibration_start=1900),
            dict(years=(1900, 1998), calibration_start=1999),
            dict(alpha=(1.0,)),
            dict(beta=(0.0, 1.0)),
            dict(sigma_p2=-0.1),
            dict(proxy_error="pink"),
            dict(proxy_error="fgn", proxy_memory=1.0),
            dict(process_error="ar1", process_memory=0.0),
            dict(panel=-1),
            dict(panel_noise=-0.5),
        ],
    )
    def test_bad_specs(self, kwargs):
        with pytest.raises(ConfigurationError):
            SyntheticSpec(**kwargs)

    @pytest.mark.parametrize(
        "kwargs",
        [
            dict(solar_period=0.0),
            dict(volcanic_rate=1.0),
            dict(volcanic_rate=-0.1),
            dict(volcanic_scale=0.0),
            dict(ghg_base=-280.0),
        ],
    )
    def test_bad_shapes(self, kwargs):
        with pytest.raises(ConfigurationError):
            ForcingShapes(**kwargs)
