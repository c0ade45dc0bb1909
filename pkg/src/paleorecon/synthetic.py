"""Pseudoproxy data generator.

Simulates the two-level model forward from known parameters: latent
temperature follows the process regression on synthetic forcings with
the chosen error process, the reduced proxy follows the data-level
regression on that temperature, and an optional panel of noisy proxy
copies supports the reduction workflow.  Everything is deterministic
given the seed in SyntheticSpec.

Synthetic forcings are shaped to exercise the volcanic and
greenhouse-gas transforms: a small-amplitude solar sinusoid, sparse
negative volcanic spikes, and an exponentially growing GHG series.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import noise
from .errors import ConfigurationError
from .frame import TimeSeriesFrame
from .sampler import forcing_design

__all__ = ["ForcingShapes", "SyntheticSpec", "generate"]


@dataclass(frozen=True)
class ForcingShapes:
    """Shape parameters of the synthetic forcing series."""

    solar_amplitude: float = 1.0
    solar_period: float = 80.0
    volcanic_rate: float = 0.06
    volcanic_scale: float = 1.0
    ghg_base: float = 280.0
    ghg_growth: float = 0.3

    def __post_init__(self) -> None:
        if self.solar_period <= 0:
            raise ConfigurationError("solar_period must be positive")
        if not 0.0 <= self.volcanic_rate < 1.0:
            raise ConfigurationError("volcanic_rate must lie in [0, 1)")
        if self.volcanic_scale <= 0:
            raise ConfigurationError("volcanic_scale must be positive")
        if self.ghg_base <= 0:
            raise ConfigurationError("ghg_base must be positive")


@dataclass(frozen=True)
class SyntheticSpec:
    """True parameters and layout of one pseudoproxy dataset.

    ``beta`` has four components (intercept, solar, volcanic, ghg);
    only the intercept is used when forcings are excluded.  Zero noise
    variances are allowed and produce exact regression relations.
    """

    years: tuple[int, int] = (1400, 1998)
    calibration_start: int = 1900
    alpha: tuple[float, float] = (0.0, 1.0)
    beta: tuple[float, ...] = (0.0, 0.4, 0.8, 1.0)
    sigma_p2: float = 0.09
    sigma_t2: float = 0.04
    proxy_error: str = noise.FGN
    proxy_memory: float = 0.7
    process_error: str = noise.FGN
    process_memory: float = 0.7
    forcings_included: bool = True
    panel: int = 0
    panel_noise: float = 0.3
    forcing_shapes: ForcingShapes = field(default_factory=ForcingShapes)
    seed: int = 0

    def __post_init__(self) -> None:
        lo, hi = self.years
        if lo >= hi:
            raise ConfigurationError("years must satisfy start < end")
        if not lo < self.calibration_start <= hi:
            raise ConfigurationError(
                "calibration_start must split the span into nonempty "
                "prediction and calibration parts"
            )
        if len(self.alpha) != 2:
            raise ConfigurationError("alpha must have 2 components")
        if len(self.beta) != 4:
            raise ConfigurationError("beta must have 4 components")
        if self.sigma_p2 < 0 or self.sigma_t2 < 0:
            raise ConfigurationError("noise variances must be nonnegative")
        for kind, memory in (
            (self.proxy_error, self.proxy_memory),
            (self.process_error, self.process_memory),
        ):
            if kind not in (noise.WHITE, noise.AR1, noise.FGN):
                raise ConfigurationError(f"unknown error kind {kind!r}")
            if kind != noise.WHITE and not 0.0 < memory < 1.0:
                raise ConfigurationError("memory parameters must lie in (0, 1)")
        if self.panel < 0:
            raise ConfigurationError("panel size must be nonnegative")
        if self.panel_noise < 0:
            raise ConfigurationError("panel_noise must be nonnegative")

    @property
    def true_memory(self) -> tuple[float, float]:
        """(H, K) with white levels pinned at 0.5."""
        h = 0.5 if self.proxy_error == noise.WHITE else self.proxy_memory
        k = 0.5 if self.process_error == noise.WHITE else self.process_memory
        return h, k


def _error_path(kind: str, memory: float, variance: float, n: int, rng) -> np.ndarray:
    if variance == 0.0:
        return np.zeros(n)
    param = None if kind == noise.WHITE else memory
    model = noise.NoiseModel(kind, param, scale=float(np.sqrt(variance)))
    return noise.sample_path(model, n, rng)


def generate(spec: SyntheticSpec) -> tuple[TimeSeriesFrame, dict]:
    """Simulate one pseudoproxy dataset.

    Returns the frame (reduced proxy ``rp``, instrumental ``temp``
    masked to the calibration years, forcing columns, optional proxy
    panel) and a truth dict holding every generating parameter, the
    full latent temperature, and both residual series.
    """
    lo, hi = spec.years
    years = np.arange(lo, hi + 1)
    n = years.size
    shapes = spec.forcing_shapes
    rng = np.random.default_rng(np.random.SeedSequence(spec.seed))

    solar = shapes.solar_amplitude * np.sin(
        2.0 * np.pi * (years - lo) / shapes.solar_period
    )
    spike_mask = rng.random(n) < shapes.volcanic_rate
    magnitudes = rng.exponential(shapes.volcanic_scale, n)
    volcanic = -np.where(spike_mask, magnitudes, 0.0)
    if shapes.volcanic_rate > 0.0 and not spike_mask.any():
        # tiny-probability guard: a constant volcanic column cannot be
        # standardized, so place one average-size eruption
        volcanic[n // 3] = -shapes.volcanic_scale
    frac = (years - lo) / (hi - lo)
    ghg = shapes.ghg_base * np.exp(shapes.ghg_growth * frac)

    if spec.forcings_included:
        design = forcing_design(solar, volcanic, ghg, years)
        beta = np.asarray(spec.beta, dtype=float)
    else:
        design = np.ones((n, 1))
        beta = np.asarray(spec.beta[:1], dtype=float)

    process_resid = _error_path(
        spec.process_error, spec.process_memory, spec.sigma_t2, n, rng
    )
    temperature = design @ beta + process_resid
    proxy_resid = _error_path(
        spec.proxy_error, spec.proxy_memory, spec.sigma_p2, n, rng
    )
    rp = spec.alpha[0] + spec.alpha[1] * temperature + proxy_resid

    temp_column = np.where(years >= spec.calibration_start, temperature, np.nan)
    columns = {"rp": rp, "temp": temp_column, "solar": solar,
               "volcanic": volcanic, "ghg": ghg}
    roles = {"rp": "proxy", "temp": "temperature", "solar": "forcing",
             "volcanic": "forcing", "ghg": "forcing"}
    width = max(2, len(str(spec.panel)))
    for i in range(spec.panel):
        name = f"proxy{i + 1:0{width}d}"
        columns[name] = rp + spec.panel_noise * rng.standard_normal(n)
        roles[name] = "proxy"

    frame = TimeSeriesFrame(years=years, columns=columns, roles=roles)
    h, k = spec.true_memory
    truth = {
        "alpha": np.asarray(spec.alpha, dtype=float),
        "beta": beta.copy(),
        "sigma_P2": float(spec.sigma_p2),
        "sigma_T2": float(spec.sigma_t2),
        "H": h,
        "K": k,
        "proxy_error": spec.proxy_error,
        "process_error": spec.process_error,
        "forcings_included": spec.forcings_included,
        "years": years.copy(),
        "calibration_start": int(spec.calibration_start),
        "temperature": temperature,
        "process_residuals": process_resid,
        "proxy_residuals": proxy_resid,
    }
    return frame, truth
