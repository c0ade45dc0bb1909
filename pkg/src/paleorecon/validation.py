"""Reconstruction scoring, MCMC convergence diagnostics, and the
transient-climate-response posterior transform.

Scoring follows the usual proper-scoring conventions (Gneiting and
Raftery 2007): interval score and CRPS are negatively oriented, so
smaller is better.  Central credible intervals use type-7 empirical
quantiles (numpy's default linear interpolation) and sample variances
use the n-1 convention throughout; both conventions are load-bearing
for the rmse and coverage identities asserted in the tests.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import (
    ConfigurationError,
    DataError,
    DegenerateInputError,
    InsufficientSampleError,
    ParameterDomainError,
)

__all__ = [
    "PointMetrics",
    "point_metrics",
    "ecp",
    "interval_score",
    "crps_sample",
    "psrf",
    "psrf_multivariate",
    "ValidationReport",
    "validation_report",
    "TcrDensity",
    "tcr_density",
]

MIN_INTERVAL_DRAWS = 40
MIN_PSRF_LENGTH = 100


class PointMetrics(NamedTuple):
    sq_bias: float
    variance: float
    rmse: float


def _check_level(level: float) -> float:
    if not 0.0 < level < 1.0:
        raise ParameterDomainError(f"level must lie in (0, 1), got {level}")
    return float(level)


def _check_draw_matrix(draws, observed, min_draws):
    draws = np.asarray(draws, dtype=float)
    observed = np.asarray(observed, dtype=float)
    if draws.ndim != 2:
        raise DataError(f"draws must be a (draws x years) matrix, got ndim={draws.ndim}")
    if observed.ndim != 1 or observed.size != draws.shape[1]:
        raise DataError(
            f"observed length {observed.size} does not match draw columns "
            f"{draws.shape[1]}"
        )
    if draws.shape[0] < min_draws:
        raise InsufficientSampleError(
            f"need at least {min_draws} draws, got {draws.shape[0]}"
        )
    if not (np.all(np.isfinite(draws)) and np.all(np.isfinite(observed))):
        raise DataError("draws and observations must be finite")
    return draws, observed


def point_metrics(posterior_mean, observed) -> PointMetrics:
    """Squared bias, sample variance (ddof=1), and rmse of the
    differences posterior_mean - observed; rmse^2 = sq_bias + variance
    by construction."""
    posterior_mean = np.asarray(posterior_mean, dtype=float)
    observed = np.asarray(observed, dtype=float)
    if posterior_mean.shape != observed.shape or posterior_mean.ndim != 1:
        raise DataError(
            f"series shapes differ: {posterior_mean.shape} vs {observed.shape}"
        )
    if posterior_mean.size < 2:
        raise InsufficientSampleError("need at least 2 years for the variance term")
    if not (np.all(np.isfinite(posterior_mean)) and np.all(np.isfinite(observed))):
        raise DataError("series must be finite")
    diff = posterior_mean - observed
    sq_bias = float(diff.mean()) ** 2
    variance = float(diff.var(ddof=1))
    return PointMetrics(sq_bias, variance, float(np.sqrt(sq_bias + variance)))


def _central_interval(draws, level):
    alpha = 1.0 - level
    lower = np.quantile(draws, alpha / 2.0, axis=0)
    upper = np.quantile(draws, 1.0 - alpha / 2.0, axis=0)
    return lower, upper


def ecp(draws, observed, level: float = 0.95) -> float:
    """Empirical coverage probability, as a percentage in [0, 100]:
    the share of years whose observation falls inside the central
    credible interval of mass ``level``."""
    level = _check_level(level)
    draws, observed = _check_draw_matrix(draws, observed, MIN_INTERVAL_DRAWS)
    lower, upper = _central_interval(draws, level)
    inside = (observed >= lower) & (observed <= upper)
    return float(100.0 * inside.mean())


def interval_score(draws, observed, level: float = 0.95) -> float:
    """Mean interval score at mass ``level``: (u-l) + (2/a)(l-y)+ +
    (2/a)(y-u)+ with a = 1-level.  Negatively oriented; equals the
    interval width exactly when the observation is covered."""
    level = _check_level(level)
    draws, observed = _check_draw_matrix(draws, observed, MIN_INTERVAL_DRAWS)
    alpha = 1.0 - level
    lower, upper = _central_interval(draws, level)
    penalty_low = np.clip(lower - observed, 0.0, None)
    penalty_high = np.clip(observed - upper, 0.0, None)
    scores = (upper - lower) + (2.0 / alpha) * (penalty_low + penalty_high)
    return float(scores.mean())


def _crps_columns(draws: np.ndarray, observed: np.ndarray) -> np.ndarray:
    """Per-column empirical CRPS, mean|X-y| - 0.5 mean|X-X'|, via the
    sorted-sample identity for the spread term."""
    m = draws.shape[0]
    term_abs = np.abs(draws - observed).mean(axis=0)
    xs = np.sort(draws, axis=0)
    coef = 2.0 * np.arange(1, m + 1) - m - 1
    spread = coef @ xs / (m * m)
    return term_abs - spread


def crps_sample(draws_for_year, observed_value: float) -> float:
    """Empirical CRPS of one year's draw ensemble against a scalar."""
    draws = np.asarray(draws_for_year, dtype=float)
    if draws.ndim != 1:
        raise DataError("draws_for_year must be one-dimensional")
    if draws.size < 2:
        raise InsufficientSampleError("CRPS needs at least 2 draws")
    if not (np.all(np.isfinite(draws)) and np.isfinite(observed_value)):
        raise DataError("draws and observation must be finite")
    return float(_crps_columns(draws[:, None], np.array([observed_value]))[0])


# ---------------------------------------------------------------------------
# convergence diagnostics


def _stack_chains(chains, expect_ndim):
    if len(chains) < 2:
        raise ConfigurationError("PSRF needs at least 2 chains")
    arrays = [np.asarray(c, dtype=float) for c in chains]
    shapes = {a.shape for a in arrays}
    if len(shapes) != 1:
        raise DataError(f"chains must have identical shapes, got {sorted(shapes)}")
    (shape,) = shapes
    if len(shape) != expect_ndim:
        raise DataError(f"each chain must be {expect_ndim}-dimensional, got {shape}")
    if shape[0] < MIN_PSRF_LENGTH:
        raise InsufficientSampleError(
            f"chains must have length >= {MIN_PSRF_LENGTH}, got {shape[0]}"
        )
    return np.stack(arrays)


def psrf(chains) -> float:
    """Univariate Gelman-Rubin potential scale reduction factor.

    With m chains of length L, W the mean within-chain variance and
    B/L the variance of chain means (both ddof=1), the statistic is
    sqrt(Vhat / W) with Vhat = (L-1)/L W + B/L + B/(m L).  Identical
    chains give sqrt((L-1)/L) <= 1; values near 1 indicate convergence.
    """
    stacked = _stack_chains(chains, 1)
    m, length = stacked.shape
    within = stacked.var(axis=1, ddof=1).mean()
    if within <= 0.0:
        raise DegenerateInputError("within-chain variance is zero")
    b_over_l = stacked.mean(axis=1).var(ddof=1)
    vhat = (length - 1) / length * within + b_over_l + b_over_l / m
    return float(np.sqrt(vhat / within))


def psrf_multivariate(chains) -> float:
    """Brooks-Gelman multivariate PSRF (largest-eigenvalue form):
    sqrt((L-1)/L + (m+1)/m * lambda1(W^-1 B/L))."""
    stacked = _stack_chains(chains, 2)
    m, length, _ = stacked.shape
    within = sum(np.cov(chain, rowvar=False, ddof=1) for chain in stacked) / m
    means = stacked.mean(axis=1)
    b_over_l = np.cov(means, rowvar=False, ddof=1)
    within = np.atleast_2d(within)
    b_over_l = np.atleast_2d(b_over_l)
    try:
        eigvals = np.linalg.eigvals(np.linalg.solve(within, b_over_l))
    except np.linalg.LinAlgError:
        raise DegenerateInputError("within-chain covariance is singular") from None
    lam = float(np.max(eigvals.real))
    return float(np.sqrt((length - 1) / length + (m + 1) / m * max(lam, 0.0)))


# ---------------------------------------------------------------------------
# report assembly


@dataclass(frozen=True)
class ValidationReport:
    """Reconstruction scores in the conventional reporting order."""

    sq_bias: float
    variance: float
    rmse: float
    ecp95: float
    ecp80: float
    is95: float
    is80: float
    crps: float

    FIELDS = ("sq_bias", "variance", "rmse", "ecp95", "ecp80", "is95", "is80", "crps")

    def as_row(self) -> tuple[float, ...]:
        return tuple(getattr(self, name) for name in self.FIELDS)


def validation_report(draws, observed) -> ValidationReport:
    """Score a (draws x years) latent matrix against observations."""
    draws, observed = _check_draw_matrix(draws, observed, MIN_INTERVAL_DRAWS)
    metrics = point_metrics(draws.mean(axis=0), observed)
    return ValidationReport(
        sq_bias=metrics.sq_bias,
        variance=metrics.variance,
        rmse=metrics.rmse,
        ecp95=ecp(draws, observed, 0.95),
        ecp80=ecp(draws, observed, 0.80),
        is95=interval_score(draws, observed, 0.95),
        is80=interval_score(draws, observed, 0.80),
        crps=float(_crps_columns(draws, observed).mean()),
    )


# ---------------------------------------------------------------------------
# transient climate response


@dataclass(frozen=True)
class TcrDensity:
    """Posterior draws of the transient climate response (degrees C
    at CO2-equivalent doubling) plus summary quantiles."""

    draws: np.ndarray
    median: float
    ci95: tuple[float, float]
    scenario_mix: tuple[tuple[str, float], ...]


def tcr_density(
    beta3_draws_by_scenario: dict,
    weights: dict,
    log_c,
    n_samples: int | None = None,
    seed: int = 0,
) -> TcrDensity:
    """Pooled posterior of TCR = beta3 * log(2) / sd(log C).

    ``log_c`` is the log greenhouse-gas series over the full record;
    its sample sd (ddof=1) converts the standardized-covariate beta3
    into the response to one doubling.  Scenarios are pooled by
    deterministic weight-resampling: multinomial scenario counts
    followed by within-scenario resampling with replacement, seeded.
    A single positive-weight scenario passes its transformed draws
    through verbatim.
    """
    weights = {str(k): float(v) for k, v in weights.items()}
    if not weights:
        raise ConfigurationError("weights must name at least one scenario")
    if any(w < 0 for w in weights.values()):
        raise ConfigurationError("scenario weights must be nonnegative")
    total = sum(weights.values())
    if abs(total - 1.0) > 1e-8:
        raise ConfigurationError(f"scenario weights must sum to 1, got {total!r}")

    log_c = np.asarray(log_c, dtype=float)
    if log_c.size < 2 or not np.all(np.isfinite(log_c)):
        raise DataError("log_c must be a finite series of length >= 2")
    sd = float(log_c.std(ddof=1))
    if sd == 0.0:
        raise DegenerateInputError("log greenhouse-gas series is constant")
    factor = float(np.log(2.0)) / sd

    active = sorted(label for label, w in weights.items() if w > 0.0)
    if not active:
        raise ConfigurationError("at least one scenario weight must be positive")
    transformed = {}
    for label in active:
        if label not in beta3_draws_by_scenario:
            raise ConfigurationError(f"no draws supplied for scenario {label!r}")
        draws = np.asarray(beta3_draws_by_scenario[label], dtype=float).ravel()
        if draws.size == 0:
            raise InsufficientSampleError(f"scenario {label!r} has no draws")
        transformed[label] = draws * factor

    if n_samples is not None and n_samples < 1:
        raise ConfigurationError("n_samples must be >= 1 when given")
    if len(active) == 1:
        pooled = transformed[active[0]].copy()
    else:
        probs = np.array([weights[label] for label in active])
        probs = probs / probs.sum()
        total_draws = n_samples or sum(t.size for t in transformed.values())
        rng = np.random.default_rng(seed)
        counts = rng.multinomial(total_draws, probs)
        pooled = np.concatenate(
            [
                rng.choice(transformed[label], size=count, replace=True)
                for label, count in zip(active, counts)
            ]
        )

    return TcrDensity(
        draws=pooled,
        median=float(np.quantile(pooled, 0.5)),
        ci95=(float(np.quantile(pooled, 0.025)), float(np.quantile(pooled, 0.975))),
        scenario_mix=tuple(sorted(weights.items())),
    )
