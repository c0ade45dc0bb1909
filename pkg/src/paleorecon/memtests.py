"""Hypothesis tests and semiparametric estimation for memory length.

Three complementary tests are provided.  Robinson's test uses the
asymptotic normality of the semiparametric (local Whittle) Gaussian
estimate of H to test H = 0.5 against H > 0.5 without committing to a
parametric spectrum.  Beran's goodness-of-fit test asks whether a fitted
parametric spectral family (fGn, AR(1), or white noise nested in fGn) is
consistent with the full periodogram.  The Davies-Harte test is the
locally most powerful invariant test of H = 0.5 within the fGn family.

References
----------
.. [1] Robinson, P. M. (1995). Gaussian semiparametric estimation of
       long range dependence. Annals of Statistics 23, 1630-1661.
.. [2] Beran, J. (1992). A goodness-of-fit test for time series with
       long range dependence. JRSS B 54, 749-760.
.. [3] Davies, R. B. and Harte, D. S. (1987). Tests for Hurst effect.
       Biometrika 74, 95-101.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import ndtr

from . import noise
from .errors import DegenerateInputError, EstimationFailureError, ParameterDomainError

__all__ = [
    "TestResult",
    "default_bandwidth",
    "local_whittle",
    "robinson_test",
    "beran_test",
    "davies_harte_test",
]


@dataclass(frozen=True)
class TestResult:
    """Outcome of a memory test.

    ``estimate`` holds a Hurst estimate in (0, 1) where the test
    produces one; ``bandwidth`` the number of low-frequency periodogram
    ordinates used by semiparametric tests; ``null_model`` a text label
    of the null (carrying fitted nuisance parameters where relevant).
    """

    statistic: float
    p_value: float
    null_model: str
    estimate: float | None = None
    bandwidth: int | None = None


def default_bandwidth(n: int) -> int:
    """Default semiparametric bandwidth m = floor(n^0.65)."""
    return int(n**0.65)


_GOLD = (np.sqrt(5.0) - 1.0) / 2.0


def _golden_minimize(fun, lo: float, hi: float, tol: float = 1e-6) -> float:
    """Golden-section minimizer of a unimodal function on [lo, hi]."""
    a, b = float(lo), float(hi)
    c = b - _GOLD * (b - a)
    d = a + _GOLD * (b - a)
    fc, fd = fun(c), fun(d)
    if not (np.isfinite(fc) and np.isfinite(fd)):
        raise EstimationFailureError("objective not finite inside the search interval")
    while b - a > tol:
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - _GOLD * (b - a)
            fc = fun(c)
        else:
            a, c, fc = c, d, fd
            d = a + _GOLD * (b - a)
            fd = fun(d)
    return 0.5 * (a + b)


def _angular_periodogram(x: np.ndarray, m: int):
    """Periodogram at angular Fourier frequencies 2 pi j / n, j = 1..m."""
    n = x.size
    xc = x - x.mean()
    coef = np.fft.rfft(xc)[1 : m + 1]
    ordinates = (coef.real**2 + coef.imag**2) / (2.0 * np.pi * n)
    lam = 2.0 * np.pi * np.arange(1, m + 1, dtype=float) / n
    return lam, ordinates


def _check_series(x, min_len: int) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.ndim != 1:
        raise ValueError("series must be one-dimensional")
    if x.size < min_len:
        raise DegenerateInputError(f"need at least {min_len} observations, got {x.size}")
    if not np.all(np.isfinite(x)):
        raise DegenerateInputError("series contains non-finite values")
    if np.all(x == x[0]):
        raise DegenerateInputError("constant series carries no spectral information")
    return x


def local_whittle(x, m: int | None = None) -> float:
    """Semiparametric Gaussian (local Whittle) estimate of H.

    Minimizes over H in (0.01, 0.99) the profiled objective

        R(H) = log( mean_j lambda_j^{2H-1} I_j ) - (2H - 1) mean_j log lambda_j

    built from the first ``m`` periodogram ordinates (Robinson 1995).
    Scale-invariant: rescaling x shifts R by a constant.

    Parameters
    ----------
    x : array_like
    m : int, optional
        Bandwidth, 2 <= m <= (n-1)//2; defaults to floor(n^0.65).
    """
    x = _check_series(x, 8)
    n = x.size
    if m is None:
        m = default_bandwidth(n)
    if not 2 <= m <= (n - 1) // 2:
        raise ParameterDomainError(
            f"bandwidth m={m} outside [2, {(n - 1) // 2}] for n={n}"
        )
    lam, ordinates = _angular_periodogram(x, m)
    loglam = np.log(lam)
    mean_loglam = loglam.mean()

    def objective(h: float) -> float:
        g_hat = np.mean(ordinates * np.exp((2.0 * h - 1.0) * loglam))
        return np.log(g_hat) - (2.0 * h - 1.0) * mean_loglam

    return _golden_minimize(objective, 0.01, 0.99)


def robinson_test(x, m: int | None = None) -> TestResult:
    """Robinson's semiparametric test of H = 0.5 against H > 0.5.

    Uses sqrt(m) (H_hat - H) -> N(0, 1/4), so the statistic is
    2 sqrt(m) (H_hat - 0.5) with an upper-tail normal p-value.
    """
    x = _check_series(x, 8)
    if m is None:
        m = default_bandwidth(x.size)
    h_hat = local_whittle(x, m)
    statistic = 2.0 * np.sqrt(m) * (h_hat - 0.5)
    return TestResult(
        statistic=float(statistic),
        p_value=float(1.0 - ndtr(statistic)),
        null_model="white noise (H=0.5), alternative H>0.5",
        estimate=float(h_hat),
        bandwidth=int(m),
    )


_BERAN_NULLS = ("fgn", "ar1", "white")


def beran_test(x, null_model: str = "fgn") -> TestResult:
    """Beran's (1992) goodness-of-fit test of a spectral family.

    The null family's parameter is Whittle-estimated (scale profiled
    out), then with r_j = I(lambda_j) / f(lambda_j; theta_hat) over the
    m = (n-1)//2 interior Fourier frequencies the statistic is built
    from xi = mean(r^2) / mean(r)^2.  Under the null the r_j are
    asymptotically iid standard exponential, giving xi -> 2 and

        z = sqrt(m) (xi - 2) / 2  ->  N(0, 1)

    by the delta method; the p-value is two-sided.  Non-rejection is
    consistent with the null family.

    Parameters
    ----------
    x : array_like
        Series of length >= 64.
    null_model : str
        "fgn" (fit H), "ar1" (fit phi), or "white" (white noise nested
        in fGn at H = 0.5; no shape parameter fitted).
    """
    x = _check_series(x, 64)
    if null_model not in _BERAN_NULLS:
        raise ParameterDomainError(
            f"null_model must be one of {_BERAN_NULLS}, got {null_model!r}"
        )
    n = x.size
    m = (n - 1) // 2
    lam, ordinates = _angular_periodogram(x, m)

    estimate = None
    if null_model == "fgn":
        def objective(h: float) -> float:
            g = noise.spectral_density(noise.NoiseModel.fgn(h), lam)
            return np.log(np.mean(ordinates / g)) + np.mean(np.log(g))

        theta = _golden_minimize(objective, 0.01, 0.99)
        shape = noise.spectral_density(noise.NoiseModel.fgn(theta), lam)
        estimate = float(theta)
        label = "fgn"
    elif null_model == "ar1":
        def objective(phi: float) -> float:
            g = noise.spectral_density(noise.NoiseModel.ar1(phi), lam)
            return np.log(np.mean(ordinates / g)) + np.mean(np.log(g))

        theta = _golden_minimize(objective, -0.99, 0.99)
        shape = noise.spectral_density(noise.NoiseModel.ar1(theta), lam)
        label = f"ar1(phi={theta:.4f})"
    else:
        shape = np.full(m, 1.0 / (2.0 * np.pi))
        label = "white (H=0.5 within fgn)"

    ratio = ordinates / shape
    ratio = ratio / ratio.mean()
    xi = float(np.mean(ratio * ratio))
    statistic = np.sqrt(m) * (xi - 2.0) / 2.0
    p_value = 2.0 * (1.0 - ndtr(abs(statistic)))
    return TestResult(
        statistic=float(statistic),
        p_value=float(p_value),
        null_model=label,
        estimate=estimate,
        bandwidth=None,
    )


def _dh_derivative_coeffs(n: int) -> np.ndarray:
    """d gamma_H(k) / dH at H = 1/2 for k = 1..n-1.

    a(k) = (k+1) ln(k+1) - 2k ln k + (k-1) ln(k-1); a(0) = 0 because
    gamma(0) is 1 for every H.
    """
    k = np.arange(1, n, dtype=float)
    up = (k + 1.0) * np.log(k + 1.0) - 2.0 * k * np.log(k)
    up[1:] += (k[1:] - 1.0) * np.log(k[1:] - 1.0)
    return up


def davies_harte_test(x) -> TestResult:
    """Davies-Harte (1987) locally optimal test of H = 0.5 within fGn.

    The score statistic is the quadratic-form ratio R = x'Ax / x'x on
    the demeaned series, where A is the Toeplitz matrix of
    autocovariance derivatives in H at the white-noise null.  Because R
    is scale-free and the demeaned null is spherically symmetric on an
    (n-1)-dimensional subspace, its null mean and variance are exact:

        E[R] = tr(AP)/r,
        Var[R] = 2 (tr((AP)^2) - tr(AP)^2 / r) / (r (r + 2)),

    with P the centering projection and r = n - 1.  The standardized
    statistic is asymptotically standard normal; the p-value is the
    upper tail (alternative H > 0.5).
    """
    x = _check_series(x, 64)
    n = x.size
    xc = x - x.mean()
    a = _dh_derivative_coeffs(n)

    # cross-products sum_t x_t x_{t+k} for k = 0..n-1, via FFT
    pad = 1 << int(np.ceil(np.log2(2 * n)))
    f = np.fft.rfft(xc, pad)
    cross = np.fft.irfft(f.real**2 + f.imag**2, pad)[:n]
    quad = 2.0 * (a @ cross[1:])
    ratio = quad / cross[0]

    # exact null moments under the centering projection
    w = n - np.arange(1, n, dtype=float)
    one_a_one = 2.0 * (w @ a)
    tr_a2 = 2.0 * (w @ (a * a))
    prefix = np.concatenate([[0.0], np.cumsum(a)])
    i = np.arange(n)
    rowsums = prefix[i] + prefix[n - 1 - i]
    one_a2_one = rowsums @ rowsums
    tr_ap = -one_a_one / n
    tr_apap = tr_a2 - 2.0 * one_a2_one / n + one_a_one**2 / n**2
    r = n - 1
    mean_r = tr_ap / r
    var_r = 2.0 * (tr_apap - tr_ap**2 / r) / (r * (r + 2.0))
    if var_r <= 0:
        raise EstimationFailureError("null variance of the score ratio vanished")
    statistic = (ratio - mean_r) / np.sqrt(var_r)
    return TestResult(
        statistic=float(statistic),
        p_value=float(1.0 - ndtr(statistic)),
        null_model="white noise (H=0.5) within fgn, alternative H>0.5",
        estimate=None,
        bandwidth=None,
    )
