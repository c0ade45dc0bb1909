"""Two-level hierarchical Bayesian reconstruction model and its Gibbs /
Metropolis-Hastings sampler.

Data level:     RP_t = alpha0 + alpha1 * T_t + sigma_P * eta_t
Process level:  T_t  = X_t' beta + sigma_T * eps_t

where eta and eps are unit-variance stationary Gaussian errors (white,
AR(1), or fGn per scenario) and X is [1, S*, Vtilde*, Ctilde*] when
forcings are included, else [1]; starred columns are the transformed
forcings standardized (mean 0, unit sample sd) over the modeling span,
which puts the N(1, 1) priors on comparable coefficient scales and
makes beta3 * log(2) / sd(log C) the temperature response to a
doubling of C.  Temperatures are observed over the calibration window
and latent over the prediction window; the sampler draws the latent
block jointly.

Parameters are updated in the fixed scan order
alpha -> beta -> sigma_P^2 -> sigma_T^2 -> H -> K -> T_u.
Regression coefficients and variances use conjugate full conditionals
(Gaussian and inverse-gamma); memory parameters use truncated-normal
random-walk Metropolis-Hastings with the proposal-asymmetry correction,
with the proposal likelihood evaluated by the Levinson recursion and
covariance inverses cached per accepted memory value.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field, replace
from typing import NamedTuple

import numpy as np
from scipy.linalg import lapack, solve_triangular, toeplitz
from scipy.special import ndtr, ndtri

from . import noise
from .errors import ConfigurationError, DataError, NumericalDegeneracyError
from .frame import TimeSeriesFrame

__all__ = [
    "SCENARIOS",
    "ChainSettings",
    "PriorConfig",
    "ScenarioConfig",
    "scenario_config",
    "ModelState",
    "PosteriorDraws",
    "ReconstructionData",
    "LevelCache",
    "build_level_cache",
    "transform_forcings",
    "forcing_design",
    "regression_conditional_moments",
    "variance_conditional_params",
    "latent_conditional_moments",
    "sample_regression_coeffs",
    "sample_variances",
    "sample_latent_temperatures",
    "MemoryUpdate",
    "mh_update_memory",
    "run_chain",
    "run_chains",
]

log = logging.getLogger(__name__)

# label -> (proxy error kind, process error kind, forcings included)
SCENARIOS: dict[str, tuple[str, str, bool]] = {
    "A": (noise.FGN, noise.FGN, True),
    "B": (noise.FGN, noise.AR1, True),
    "C": (noise.AR1, noise.FGN, True),
    "D": (noise.AR1, noise.AR1, True),
    "E": (noise.WHITE, noise.WHITE, True),
    "F": (noise.FGN, noise.FGN, False),
    "G": (noise.AR1, noise.AR1, False),
    "H": (noise.WHITE, noise.WHITE, False),
}

ACCEPTANCE_BAND = (0.1, 0.7)


@dataclass(frozen=True)
class ChainSettings:
    iterations: int = 5000
    burn_in: int = 1000
    chains: int = 1
    seed: int = 0
    mh_step_h: float = 0.02
    mh_step_k: float = 0.02

    def __post_init__(self) -> None:
        if self.iterations < 1:
            raise ConfigurationError("iterations must be >= 1")
        if not 0 <= self.burn_in < self.iterations:
            raise ConfigurationError(
                f"burn_in {self.burn_in} must lie in [0, iterations)"
            )
        if self.chains < 1:
            raise ConfigurationError("chains must be >= 1")
        if self.mh_step_h <= 0 or self.mh_step_k <= 0:
            raise ConfigurationError("MH step sizes must be positive")


@dataclass(frozen=True)
class PriorConfig:
    """Priors: alpha ~ N(alpha_mean, I2), beta ~ N(beta_mean, I),
    sigma^2 ~ InvGamma(sigma_shape, sigma_scale), memory ~ Unif(0,1)."""

    alpha_mean: tuple[float, float] = (0.0, 1.0)
    beta_mean: tuple[float, ...] = (0.0, 1.0, 1.0, 1.0)
    sigma_shape: float = 2.0
    sigma_scale: float = 0.1

    def __post_init__(self) -> None:
        if len(self.alpha_mean) != 2:
            raise ConfigurationError("alpha_mean must have 2 components")
        if len(self.beta_mean) != 4:
            raise ConfigurationError("beta_mean must have 4 components")
        if self.sigma_shape <= 0 or self.sigma_scale <= 0:
            raise ConfigurationError("inverse-gamma prior parameters must be positive")


@dataclass(frozen=True)
class ScenarioConfig:
    label: str
    proxy_error: str
    process_error: str
    forcings_included: bool
    chain: ChainSettings = field(default_factory=ChainSettings)
    priors: PriorConfig = field(default_factory=PriorConfig)

    def __post_init__(self) -> None:
        if self.label not in SCENARIOS:
            raise ConfigurationError(
                f"unknown scenario {self.label!r}; expected one of {sorted(SCENARIOS)}"
            )
        expected = SCENARIOS[self.label]
        got = (self.proxy_error, self.process_error, self.forcings_included)
        if got != expected:
            raise ConfigurationError(
                f"scenario {self.label} requires (proxy, process, forcings) = "
                f"{expected}, got {got}"
            )


def scenario_config(
    label: str,
    chain: ChainSettings | None = None,
    priors: PriorConfig | None = None,
) -> ScenarioConfig:
    """ScenarioConfig for one of the labels A..H."""
    if label not in SCENARIOS:
        raise ConfigurationError(
            f"unknown scenario {label!r}; expected one of {sorted(SCENARIOS)}"
        )
    proxy_error, process_error, forcings = SCENARIOS[label]
    return ScenarioConfig(
        label=label,
        proxy_error=proxy_error,
        process_error=process_error,
        forcings_included=forcings,
        chain=chain or ChainSettings(),
        priors=priors or PriorConfig(),
    )


@dataclass
class ModelState:
    """Current parameter state of one chain.

    ``h`` and ``k`` are the proxy- and process-level memory parameters:
    the Hurst parameter for an fGn level, the autoregressive coefficient
    for an AR(1) level, and fixed at 0.5 for a white level.
    """

    alpha: np.ndarray
    beta: np.ndarray
    sigma_p2: float
    sigma_t2: float
    h: float
    k: float
    t_u: np.ndarray

    def __post_init__(self) -> None:
        self.alpha = np.asarray(self.alpha, dtype=float)
        self.beta = np.asarray(self.beta, dtype=float)
        self.t_u = np.asarray(self.t_u, dtype=float)
        if self.alpha.shape != (2,):
            raise ConfigurationError("alpha must have 2 components")
        if self.sigma_p2 <= 0 or self.sigma_t2 <= 0:
            raise ConfigurationError("variance parameters must be positive")
        if not (0.0 < self.h < 1.0 and 0.0 < self.k < 1.0):
            raise ConfigurationError("memory parameters must lie in (0, 1)")


@dataclass(frozen=True)
class PosteriorDraws:
    """Post-burn-in draws of one chain."""

    parameters: np.ndarray
    parameter_names: tuple[str, ...]
    latent: np.ndarray
    latent_years: np.ndarray
    scenario: ScenarioConfig
    acceptance_rates: dict[str, float]


# ---------------------------------------------------------------------------
# data preparation


def transform_forcings(v, c, years=None):
    """Transform raw volcanic and greenhouse-gas series for the process
    regression: Vtilde = log(-V + 1), Ctilde = log(C).

    Volcanic forcing is nonpositive by convention, making -V + 1 >= 1;
    values in (0, 1) still transform but are warned about.

    Raises
    ------
    DataError
        If -V_t + 1 <= 0 or C_t <= 0, naming the offending year.
    """
    v = np.asarray(v, dtype=float)
    c = np.asarray(c, dtype=float)
    if years is None:
        years = np.arange(v.size)
    years = np.asarray(years)

    bad = v >= 1.0
    if np.any(bad):
        raise DataError(
            f"volcanic forcing must satisfy -V+1 > 0; violated in year "
            f"{years[bad][0]} (V = {v[bad][0]:g})"
        )
    if np.any(v > 0.0):
        log.warning(
            "volcanic forcing is positive in %d years; the nonpositive "
            "convention is expected",
            int(np.sum(v > 0.0)),
        )
    bad = ~(c > 0.0)
    if np.any(bad):
        raise DataError(
            f"greenhouse-gas series must be positive; violated in year "
            f"{years[bad][0]} (C = {c[bad][0]:g})"
        )
    return np.log1p(-v), np.log(c)


def _standardize_forcing(col: np.ndarray, name: str) -> np.ndarray:
    sd = col.std(ddof=1)
    if not np.isfinite(sd) or sd == 0.0:
        raise DataError(f"forcing column {name!r} is constant over the modeling span")
    return (col - col.mean()) / sd


def forcing_design(s, v, c, years=None) -> np.ndarray:
    """Design matrix [1, S*, Vtilde*, Ctilde*] from raw forcing series.

    Applies the volcanic and greenhouse-gas transforms, then centers
    and scales every forcing column to unit sample sd (ddof=1) over the
    given span.  Used identically by data preparation and by the
    synthetic generator so that coefficient scales agree.
    """
    s = np.asarray(s, dtype=float)
    vtilde, ctilde = transform_forcings(v, c, years)
    return np.column_stack(
        [
            np.ones(s.size),
            _standardize_forcing(s, "solar"),
            _standardize_forcing(vtilde, "volcanic"),
            _standardize_forcing(ctilde, "ghg"),
        ]
    )


@dataclass
class ReconstructionData:
    """Aligned arrays over the contiguous union of the prediction and
    calibration windows, ordered by year."""

    years: np.ndarray
    rp: np.ndarray
    obs_mask: np.ndarray
    temp_obs: np.ndarray
    design: np.ndarray
    forcings_included: bool
    calibration_window: tuple[int, int]
    prediction_window: tuple[int, int]

    @property
    def n(self) -> int:
        return self.years.size

    @property
    def n_obs(self) -> int:
        return int(self.obs_mask.sum())

    @property
    def n_latent(self) -> int:
        return self.n - self.n_obs

    @property
    def latent_years(self) -> np.ndarray:
        return self.years[~self.obs_mask]

    def full_temperature(self, t_u: np.ndarray) -> np.ndarray:
        """Temperature vector with latent values filled in."""
        full = np.empty(self.n)
        full[self.obs_mask] = self.temp_obs
        full[~self.obs_mask] = t_u
        return full

    @classmethod
    def from_frame(
        cls,
        frame: TimeSeriesFrame,
        forcings_included: bool,
        rp_column: str = "rp",
        temperature_column: str = "temp",
        solar_column: str = "solar",
        volcanic_column: str = "volcanic",
        ghg_column: str = "ghg",
        calibration_window: tuple[int, int] = (1900, 1998),
        prediction_window: tuple[int, int] = (1000, 1899),
    ) -> "ReconstructionData":
        cal_lo, cal_hi = calibration_window
        pred_lo, pred_hi = prediction_window
        if cal_lo > cal_hi or pred_lo > pred_hi:
            raise ConfigurationError("window start must not exceed window end")
        if max(cal_lo, pred_lo) <= min(cal_hi, pred_hi):
            raise ConfigurationError(
                "calibration and prediction windows must not overlap"
            )
        wanted = np.concatenate(
            [np.arange(pred_lo, pred_hi + 1), np.arange(cal_lo, cal_hi + 1)]
        )
        wanted.sort()
        if np.any(np.diff(wanted) != 1):
            raise ConfigurationError(
                "prediction and calibration windows must form one contiguous span"
            )
        missing = np.setdiff1d(wanted, frame.years)
        if missing.size:
            raise DataError(f"year {missing[0]} is absent from the data")
        take = np.searchsorted(frame.years, wanted)
        years = wanted

        rp = frame.column(rp_column)[take]
        if np.any(~np.isfinite(rp)):
            bad = years[~np.isfinite(rp)][0]
            raise DataError(f"reduced proxy {rp_column!r} is missing in year {bad}")

        obs_mask = (years >= cal_lo) & (years <= cal_hi)
        temp = frame.column(temperature_column)[take]
        missing_temp = obs_mask & ~np.isfinite(temp)
        if np.any(missing_temp):
            bad = years[missing_temp][0]
            raise DataError(
                f"instrumental year {bad} is missing within the calibration window"
            )
        if obs_mask.sum() < 2:
            raise DataError("need at least 2 calibration years")

        if forcings_included:
            cols = []
            for name in (solar_column, volcanic_column, ghg_column):
                col = frame.column(name)[take]
                if np.any(~np.isfinite(col)):
                    bad = years[~np.isfinite(col)][0]
                    raise DataError(f"forcing {name!r} is missing in year {bad}")
                cols.append(col)
            design = forcing_design(cols[0], cols[1], cols[2], years)
        else:
            design = np.ones((years.size, 1))

        return cls(
            years=years,
            rp=rp,
            obs_mask=obs_mask,
            temp_obs=temp[obs_mask],
            design=design,
            forcings_included=forcings_included,
            calibration_window=tuple(calibration_window),
            prediction_window=tuple(prediction_window),
        )


# ---------------------------------------------------------------------------
# per-level covariance cache


@dataclass
class LevelCache:
    """Unit-scale error covariance state for one level at one memory value.

    ``inv`` and ``logdet`` are the inverse and log-determinant of the
    n-by-n unit-variance Toeplitz covariance; both trivial (None / 0)
    for white noise, which never touches the fGn code path.
    """

    kind: str
    param: float
    n: int
    inv: np.ndarray | None
    logdet: float


def _invert_spd(matrix: np.ndarray, gamma0: float):
    """Inverse and log-determinant of an SPD matrix via LAPACK Cholesky,
    with the one-shot diagonal jitter policy."""
    factor, info = lapack.dpotrf(matrix, lower=1)
    if info != 0:
        matrix = matrix.copy()
        matrix[np.diag_indices_from(matrix)] += noise.JITTER_FRACTION * gamma0
        factor, info = lapack.dpotrf(matrix, lower=1)
        if info != 0:
            raise NumericalDegeneracyError(
                "covariance factorization failed even after jitter"
            )
    logdet = 2.0 * float(np.sum(np.log(np.diag(factor))))
    inv, info = lapack.dpotri(factor, lower=1)
    if info != 0:
        raise NumericalDegeneracyError("covariance inversion failed")
    inv = np.tril(inv) + np.tril(inv, -1).T
    return inv, logdet


def build_level_cache(kind: str, param: float, n: int) -> LevelCache:
    """Covariance cache for one error level at one memory value."""
    if kind == noise.WHITE:
        return LevelCache(kind, 0.5, n, None, 0.0)
    model = noise.NoiseModel(kind, param)
    g = noise.acvf(model, n - 1)
    inv, logdet = _invert_spd(toeplitz(g), g[0])
    return LevelCache(kind, param, n, inv, logdet)


def _qform(cache: LevelCache, v: np.ndarray) -> float:
    if cache.inv is None:
        return float(v @ v)
    return float(v @ (cache.inv @ v))


def _qmatvec(cache: LevelCache, v: np.ndarray) -> np.ndarray:
    if cache.inv is None:
        return np.array(v, dtype=float, copy=True)
    return cache.inv @ v


def _qmatmat(cache: LevelCache, m: np.ndarray) -> np.ndarray:
    if cache.inv is None:
        return np.array(m, dtype=float, copy=True)
    return cache.inv @ m


def _qblock(cache: LevelCache, idx: np.ndarray) -> np.ndarray:
    if cache.inv is None:
        return np.eye(idx.size)
    return cache.inv[np.ix_(idx, idx)]


# ---------------------------------------------------------------------------
# full conditionals


def regression_conditional_moments(y, design, cache, sigma2, prior_mean):
    """Gaussian full-conditional mean and covariance of regression
    coefficients with prior N(prior_mean, I) and likelihood
    y ~ N(design @ coef, sigma2 * Sigma_cache).

    Handles zero data rows (returns the prior).
    """
    prior_mean = np.asarray(prior_mean, dtype=float)
    design = np.asarray(design, dtype=float)
    y = np.asarray(y, dtype=float)
    p = prior_mean.size
    if y.size == 0:
        return prior_mean.copy(), np.eye(p)
    qw = _qmatmat(cache, design)
    precision = np.eye(p) + design.T @ qw / sigma2
    rhs = prior_mean + qw.T @ y / sigma2
    cov = np.linalg.inv(precision)
    cov = 0.5 * (cov + cov.T)
    return cov @ rhs, cov


def _draw_gaussian_precision(precision, rhs, rng):
    """Draw from N(precision^-1 rhs, precision^-1) via the Cholesky
    factor of the precision matrix."""
    try:
        lower = np.linalg.cholesky(precision)
    except np.linalg.LinAlgError:
        raise NumericalDegeneracyError(
            "conditional precision matrix is not positive definite"
        ) from None
    mean = np.linalg.solve(precision, rhs)
    z = rng.standard_normal(rhs.size)
    return mean + solve_triangular(lower.T, z, lower=False)


def sample_regression_coeffs(state, data, proxy_cache, process_cache, priors, rng):
    """Draw (alpha, beta) from their Gaussian full conditionals."""
    t_full = data.full_temperature(state.t_u)

    w = np.column_stack([np.ones(data.n), t_full])
    qw = _qmatmat(proxy_cache, w)
    prec_a = np.eye(2) + w.T @ qw / state.sigma_p2
    rhs_a = np.asarray(priors.alpha_mean) + qw.T @ data.rp / state.sigma_p2
    alpha = _draw_gaussian_precision(prec_a, rhs_a, rng)

    p = data.design.shape[1]
    qx = _qmatmat(process_cache, data.design)
    prec_b = np.eye(p) + data.design.T @ qx / state.sigma_t2
    rhs_b = np.asarray(priors.beta_mean[:p]) + qx.T @ t_full / state.sigma_t2
    beta = _draw_gaussian_precision(prec_b, rhs_b, rng)
    return alpha, beta


def variance_conditional_params(resid, cache, priors):
    """Inverse-gamma full-conditional (shape, scale) given residuals."""
    n = np.asarray(resid).size
    q = _qform(cache, np.asarray(resid, dtype=float)) if n else 0.0
    if n and q <= 0.0:
        raise NumericalDegeneracyError("residual quadratic form is not positive")
    return priors.sigma_shape + 0.5 * n, priors.sigma_scale + 0.5 * q


def _draw_inverse_gamma(shape, scale, rng):
    return scale / rng.gamma(shape)


def sample_variances(state, data, proxy_cache, process_cache, priors, rng):
    """Draw (sigma_P^2, sigma_T^2) from inverse-gamma full conditionals."""
    t_full = data.full_temperature(state.t_u)
    resid_p = data.rp - state.alpha[0] - state.alpha[1] * t_full
    shape_p, scale_p = variance_conditional_params(resid_p, proxy_cache, priors)
    resid_t = t_full - data.design @ state.beta
    shape_t, scale_t = variance_conditional_params(resid_t, process_cache, priors)
    return (
        float(_draw_inverse_gamma(shape_p, scale_p, rng)),
        float(_draw_inverse_gamma(shape_t, scale_t, rng)),
    )


def _latent_system(state, data, proxy_cache, process_cache):
    """Precision matrix and right-hand side of the latent-temperature
    full conditional (jointly over all prediction years)."""
    u_idx = np.flatnonzero(~data.obs_mask)
    t_obs_padded = np.zeros(data.n)
    t_obs_padded[data.obs_mask] = data.temp_obs

    a1 = state.alpha[1]
    precision = (
        _qblock(process_cache, u_idx) / state.sigma_t2
        + (a1 * a1 / state.sigma_p2) * _qblock(proxy_cache, u_idx)
    )
    mean_t = data.design @ state.beta
    c = data.rp - state.alpha[0]
    rhs = (
        _qmatvec(process_cache, mean_t - t_obs_padded)[u_idx] / state.sigma_t2
        + (a1 / state.sigma_p2) * _qmatvec(proxy_cache, c - a1 * t_obs_padded)[u_idx]
    )
    return precision, rhs


def latent_conditional_moments(state, data, proxy_cache, process_cache):
    """Mean and covariance of the latent-temperature full conditional."""
    precision, rhs = _latent_system(state, data, proxy_cache, process_cache)
    cov = np.linalg.inv(precision)
    cov = 0.5 * (cov + cov.T)
    return cov @ rhs, cov


def sample_latent_temperatures(state, data, proxy_cache, process_cache, rng):
    """Joint draw of the latent temperature block."""
    if data.n_latent == 0:
        return np.empty(0)
    precision, rhs = _latent_system(state, data, proxy_cache, process_cache)
    return _draw_gaussian_precision(precision, rhs, rng)


# ---------------------------------------------------------------------------
# Metropolis-Hastings on memory parameters

_MEMORY_EPS = 1e-12


def _truncnorm_unit_draw(rng, center: float, step: float) -> float:
    """Draw from Normal(center, step^2) truncated to (0, 1)."""
    lo = ndtr(-center / step)
    hi = ndtr((1.0 - center) / step)
    u = lo + (hi - lo) * rng.uniform()
    x = center + step * ndtri(u)
    return float(np.clip(x, _MEMORY_EPS, 1.0 - _MEMORY_EPS))


def _truncnorm_log_mass(center: float, step: float) -> float:
    return float(np.log(ndtr((1.0 - center) / step) - ndtr(-center / step)))


def _cached_loglik(cache: LevelCache, resid: np.ndarray, sigma2: float) -> float:
    n = resid.size
    return -0.5 * (
        n * np.log(2.0 * np.pi * sigma2) + cache.logdet + _qform(cache, resid) / sigma2
    )


class MemoryUpdate(NamedTuple):
    value: float
    accepted: bool
    cache: LevelCache
    log_ratio: float


def mh_update_memory(
    state, data, which, proxy_cache, process_cache, rng, step=0.02, proposal=None
) -> MemoryUpdate:
    """One Metropolis-Hastings step on a memory parameter.

    ``which`` is "H" (proxy level) or "K" (process level).  The
    proposal is a truncated normal on (0, 1) centered at the current
    value; the acceptance ratio includes the truncation-asymmetry
    correction log Z(current) - log Z(proposal).  The uniform (0, 1)
    prior contributes nothing.  The proposal's likelihood is evaluated
    with the Levinson recursion; the current point reuses the cached
    inverse and log-determinant.

    ``proposal`` forces a specific proposal value (used by tests); a
    forced proposal equal to the current point is accepted with ratio
    exactly 1, both densities being identical.
    """
    if which == "H":
        cache = proxy_cache
        current = state.h
        resid = data.rp - state.alpha[0] - state.alpha[1] * data.full_temperature(state.t_u)
        sigma2 = state.sigma_p2
    elif which == "K":
        cache = process_cache
        current = state.k
        resid = data.full_temperature(state.t_u) - data.design @ state.beta
        sigma2 = state.sigma_t2
    else:
        raise ConfigurationError(f"memory parameter must be 'H' or 'K', got {which!r}")
    if cache.kind == noise.WHITE:
        raise ConfigurationError(f"{which} is fixed at 0.5 for a white error level")
    if step <= 0:
        raise ConfigurationError("MH step size must be positive")

    if proposal is None:
        proposal = _truncnorm_unit_draw(rng, current, step)
    if proposal == current:
        # degenerate proposal: densities cancel exactly
        return MemoryUpdate(current, True, cache, 0.0)

    model = noise.NoiseModel(cache.kind, proposal)
    ll_prop = noise.loglik_durbin_levinson(
        resid, sigma2 * noise.acvf(model, data.n - 1)
    )
    ll_cur = _cached_loglik(cache, resid, sigma2)
    log_ratio = (ll_prop - ll_cur) + (
        _truncnorm_log_mass(current, step) - _truncnorm_log_mass(proposal, step)
    )
    accept = np.log(rng.uniform()) < log_ratio
    if accept:
        new_cache = build_level_cache(cache.kind, proposal, data.n)
        return MemoryUpdate(float(proposal), True, new_cache, float(log_ratio))
    return MemoryUpdate(float(current), False, cache, float(log_ratio))


# ---------------------------------------------------------------------------
# chain driver


def _parameter_names(p: int) -> tuple[str, ...]:
    beta_names = ("beta0", "beta1", "beta2", "beta3")[:p]
    return ("alpha0", "alpha1", *beta_names, "sigma_P2", "sigma_T2", "H", "K")


def _validate_run(config: ScenarioConfig, data: ReconstructionData) -> None:
    if config.forcings_included != data.forcings_included:
        raise ConfigurationError(
            "scenario and data disagree about forcings "
            f"(scenario: {config.forcings_included}, data: {data.forcings_included})"
        )
    expected_p = 4 if config.forcings_included else 1
    if data.design.shape[1] != expected_p:
        raise ConfigurationError(
            f"design has {data.design.shape[1]} columns; expected {expected_p}"
        )


def run_chain(
    config: ScenarioConfig, data: ReconstructionData, chain_index: int = 0
) -> PosteriorDraws:
    """Run one chain; deterministic given (config.chain.seed, chain_index).

    Returns post-burn-in draws: a kept-iteration by parameter matrix,
    the latent temperature draws, and MH acceptance rates for the
    sampled memory parameters.
    """
    _validate_run(config, data)
    settings = config.chain
    priors = config.priors
    rng = np.random.default_rng(
        np.random.SeedSequence(entropy=settings.seed, spawn_key=(chain_index,))
    )

    n = data.n
    p = data.design.shape[1]
    sigma0 = priors.sigma_scale / max(priors.sigma_shape - 1.0, 0.5)
    state = ModelState(
        alpha=np.asarray(priors.alpha_mean, dtype=float),
        beta=np.asarray(priors.beta_mean[:p], dtype=float),
        sigma_p2=sigma0,
        sigma_t2=sigma0,
        h=0.5,
        k=0.5,
        t_u=np.zeros(data.n_latent),
    )
    proxy_cache = build_level_cache(config.proxy_error, state.h, n)
    process_cache = build_level_cache(config.process_error, state.k, n)

    sample_h = config.proxy_error != noise.WHITE
    sample_k = config.process_error != noise.WHITE
    kept = settings.iterations - settings.burn_in
    params = np.empty((kept, 2 + p + 4))
    latent = np.empty((kept, data.n_latent))
    accepted = {"H": 0, "K": 0}

    for it in range(settings.iterations):
        alpha, beta = sample_regression_coeffs(
            state, data, proxy_cache, process_cache, priors, rng
        )
        state.alpha, state.beta = alpha, beta
        state.sigma_p2, state.sigma_t2 = sample_variances(
            state, data, proxy_cache, process_cache, priors, rng
        )
        if sample_h:
            update = mh_update_memory(
                state, data, "H", proxy_cache, process_cache, rng, settings.mh_step_h
            )
            state.h, proxy_cache = update.value, update.cache
            accepted["H"] += update.accepted
        if sample_k:
            update = mh_update_memory(
                state, data, "K", proxy_cache, process_cache, rng, settings.mh_step_k
            )
            state.k, process_cache = update.value, update.cache
            accepted["K"] += update.accepted
        state.t_u = sample_latent_temperatures(
            state, data, proxy_cache, process_cache, rng
        )
        if it >= settings.burn_in:
            row = it - settings.burn_in
            params[row, :2] = state.alpha
            params[row, 2 : 2 + p] = state.beta
            params[row, 2 + p :] = (state.sigma_p2, state.sigma_t2, state.h, state.k)
            latent[row] = state.t_u

    rates = {}
    for name, flag in (("H", sample_h), ("K", sample_k)):
        if not flag:
            continue
        rate = accepted[name] / settings.iterations
        rates[name] = rate
        if not ACCEPTANCE_BAND[0] <= rate <= ACCEPTANCE_BAND[1]:
            log.warning(
                "MH acceptance rate for %s is %.3f, outside the sanity band %s",
                name,
                rate,
                ACCEPTANCE_BAND,
            )
    return PosteriorDraws(
        parameters=params,
        parameter_names=_parameter_names(p),
        latent=latent,
        latent_years=data.latent_years.copy(),
        scenario=config,
        acceptance_rates=rates,
    )


def run_chains(config: ScenarioConfig, data: ReconstructionData) -> list[PosteriorDraws]:
    """Run ``config.chain.chains`` chains with RNG streams derived from
    (seed, chain index); results are collected after all chains finish."""
    return [run_chain(config, data, i) for i in range(config.chain.chains)]
