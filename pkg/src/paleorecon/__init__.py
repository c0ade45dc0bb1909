"""Temperature-field reconstruction with short- and long-memory errors.

A hierarchical Bayesian model links a reduced proxy series to latent
temperatures driven by external forcings, with fractional Gaussian,
AR(1), or white error laws at both levels.  Subpackages cover noise
models, spectral estimation, long-memory hypothesis tests, proxy
screening/reduction, the Gibbs-within-Metropolis sampler, validation
scoring, synthetic pseudoproxy experiments, and a CLI.
"""

__version__ = "0.1.0"

from .errors import (
    CollinearityError,
    ConfigurationError,
    DataError,
    DegenerateInputError,
    EstimationFailureError,
    InsufficientSampleError,
    NumericalDegeneracyError,
    PaleoreconError,
    ParameterDomainError,
)
from .frame import TimeSeriesFrame, merge_frames, read_role_csv, write_csv
from .memtests import (
    TestResult,
    beran_test,
    davies_harte_test,
    default_bandwidth,
    local_whittle,
    robinson_test,
)
from .noise import (
    AR1,
    FGN,
    WHITE,
    NoiseModel,
    acvf,
    covariance_matrix,
    fgn_acvf,
    loglik_durbin_levinson,
    sample_fgn,
    sample_path,
    spectral_density,
)
from .reduction import (
    ReducedProxy,
    ScreeningRow,
    fit_reduced_proxy,
    screen_proxies,
    screening_report,
    standardize,
)
from .sampler import (
    SCENARIOS,
    ChainSettings,
    PosteriorDraws,
    PriorConfig,
    ReconstructionData,
    ScenarioConfig,
    forcing_design,
    run_chain,
    run_chains,
    scenario_config,
    transform_forcings,
)
from .spectral import (
    SlopeFit,
    SpectrumEstimate,
    loglog_slope,
    multitaper,
    periodogram,
    sine_tapers,
)
from .synthetic import ForcingShapes, SyntheticSpec, generate
from .validation import (
    PointMetrics,
    TcrDensity,
    ValidationReport,
    crps_sample,
    ecp,
    interval_score,
    point_metrics,
    psrf,
    psrf_multivariate,
    tcr_density,
    validation_report,
)

__all__ = [
    "__version__",
    "AR1",
    "FGN",
    "WHITE",
    "SCENARIOS",
    "ChainSettings",
    "CollinearityError",
    "ConfigurationError",
    "DataError",
    "DegenerateInputError",
    "EstimationFailureError",
    "ForcingShapes",
    "InsufficientSampleError",
    "NoiseModel",
    "NumericalDegeneracyError",
    "PaleoreconError",
    "ParameterDomainError",
    "PointMetrics",
    "PosteriorDraws",
    "PriorConfig",
    "ReconstructionData",
    "ReducedProxy",
    "ScenarioConfig",
    "ScreeningRow",
    "SlopeFit",
    "SpectrumEstimate",
    "SyntheticSpec",
    "TcrDensity",
    "TestResult",
    "TimeSeriesFrame",
    "ValidationReport",
    "acvf",
    "beran_test",
    "covariance_matrix",
    "crps_sample",
    "davies_harte_test",
    "default_bandwidth",
    "ecp",
    "fgn_acvf",
    "fit_reduced_proxy",
    "forcing_design",
    "generate",
    "interval_score",
    "local_whittle",
    "loglik_durbin_levinson",
    "loglog_slope",
    "merge_frames",
    "multitaper",
    "periodogram",
    "point_metrics",
    "psrf",
    "psrf_multivariate",
    "read_role_csv",
    "robinson_test",
    "run_chain",
    "run_chains",
    "sample_fgn",
    "sample_path",
    "scenario_config",
    "screen_proxies",
    "screening_report",
    "sine_tapers",
    "spectral_density",
    "standardize",
    "tcr_density",
    "transform_forcings",
    "validation_report",
    "write_csv",
]
