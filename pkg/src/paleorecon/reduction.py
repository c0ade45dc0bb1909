"""Collapse a proxy panel into a single reduced-proxy series.

Proxies are screened by correlation against a designated local
instrumental reference, transformed and standardized over a long
standardization window, and combined by OLS against instrumental
temperature over a short fit window.  The fitted linear combination is
then evaluated over every year where all retained proxies exist,
extending the instrumental signal back through the pre-instrumental era.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np
from scipy import stats

from .errors import (
    CollinearityError,
    ConfigurationError,
    DataError,
    DegenerateInputError,
)
from .frame import TimeSeriesFrame, apply_transform

__all__ = [
    "ReducedProxy",
    "ScreeningRow",
    "standardize",
    "screening_report",
    "screen_proxies",
    "fit_reduced_proxy",
]

log = logging.getLogger(__name__)

# Condition number above which the standardized design is treated as
# rank-deficient.
CONDITION_LIMIT = 1e8

MIN_OVERLAP = 10


def standardize(
    frame: TimeSeriesFrame, column: str, window: tuple[int, int] | None = None
) -> np.ndarray:
    """Column centered and scaled to unit sample variance over ``window``.

    Statistics use only the non-missing cells inside the window (ddof=1);
    the whole column is then shifted and scaled, so cells outside the
    window are standardized by the window's statistics.  Missing cells
    stay missing.
    """
    values = frame.column(column)
    inside = frame.window_mask(window) & np.isfinite(values)
    if inside.sum() < 2:
        raise DegenerateInputError(
            f"column {column!r} has {int(inside.sum())} observed cells in the window; need 2"
        )
    sample = values[inside]
    sd = sample.std(ddof=1)
    if sd == 0.0:
        raise DegenerateInputError(f"column {column!r} is constant over the window")
    return (values - sample.mean()) / sd


@dataclass(frozen=True)
class ScreeningRow:
    proxy: str
    reference: str
    correlation: float
    p_value: float
    overlap: int
    retained: bool


def screening_report(
    frame: TimeSeriesFrame,
    local_reference: dict[str, str],
    level: float = 0.05,
    proxies: list[str] | None = None,
) -> list[ScreeningRow]:
    """Per-proxy correlation screening against local references.

    A proxy is retained when its Pearson correlation with its reference
    over the mutual overlap is significant in a two-sided t test at
    ``level``.
    """
    if not 0.0 < level < 1.0:
        raise ConfigurationError(f"screening level must be in (0,1), got {level}")
    if proxies is None:
        proxies = frame.names("proxy")
    rows = []
    for name in proxies:
        if name not in local_reference:
            raise ConfigurationError(f"proxy {name!r} has no local reference series")
        ref = local_reference[name]
        overlap = frame.present(name) & frame.present(ref)
        n = int(overlap.sum())
        if n < MIN_OVERLAP:
            raise DataError(
                f"proxy {name!r} and reference {ref!r} overlap in {n} years; need {MIN_OVERLAP}"
            )
        a = frame.column(name)[overlap]
        b = frame.column(ref)[overlap]
        if a.std() == 0.0 or b.std() == 0.0:
            raise DegenerateInputError(
                f"constant series in overlap of {name!r} and {ref!r}"
            )
        r = float(np.corrcoef(a, b)[0, 1])
        if abs(r) >= 1.0:
            p = 0.0
        else:
            t = r * np.sqrt((n - 2) / (1.0 - r * r))
            p = float(2.0 * stats.t.sf(abs(t), df=n - 2))
        rows.append(ScreeningRow(name, ref, r, p, n, p < level))
    return rows


def screen_proxies(
    frame: TimeSeriesFrame,
    local_reference: dict[str, str],
    level: float = 0.05,
    proxies: list[str] | None = None,
) -> set[str]:
    """Names of proxies passing correlation screening (see
    :func:`screening_report`)."""
    rows = screening_report(frame, local_reference, level, proxies)
    retained = {row.proxy for row in rows if row.retained}
    log.info(
        "screening retained %d of %d proxies at level %g", len(retained), len(rows), level
    )
    return retained


@dataclass(frozen=True)
class ReducedProxy:
    """A fitted reduced proxy.

    ``series`` is aligned with the source frame's year axis and holds
    intercept + sum_i weights[i] * P_std[i, t] wherever every retained
    proxy is observed, NaN elsewhere.
    """

    weights: dict[str, float]
    intercept: float
    series: np.ndarray
    r_squared: float
    fit_window: tuple[int, int]


def fit_reduced_proxy(
    frame: TimeSeriesFrame,
    temperature_column: str,
    fit_window: tuple[int, int],
    proxies: list[str] | None = None,
    standardize_window: tuple[int, int] | None = None,
) -> ReducedProxy:
    """OLS of temperature on standardized proxies over the fit window.

    Each proxy is first passed through its declared transform and
    standardized over ``standardize_window`` (default: the full
    record).  The regression runs on rows of the fit window where the
    temperature and all proxies are observed; the fitted combination is
    evaluated over every year where all proxies exist.

    Raises
    ------
    DegenerateInputError
        If a proxy is constant over the fit window.
    CollinearityError
        If the design's condition number exceeds ``CONDITION_LIMIT``,
        naming the implicated columns.
    """
    if proxies is None:
        proxies = frame.names("proxy")
    if not proxies:
        raise ConfigurationError("no proxy columns to fit")
    temp = frame.column(temperature_column)

    std_cols = []
    for name in proxies:
        transformed = apply_transform(frame.column(name), frame.transforms[name])
        carrier = frame.with_column(f"__t_{name}", transformed, role="proxy")
        std_cols.append(standardize(carrier, f"__t_{name}", standardize_window))
    panel = np.column_stack(std_cols)

    in_fit = frame.window_mask(fit_window)
    complete = np.all(np.isfinite(panel), axis=1)
    fit_rows = in_fit & complete & np.isfinite(temp)
    n_fit = int(fit_rows.sum())
    p = len(proxies)
    if n_fit < p + 2:
        raise DataError(
            f"{n_fit} complete rows in fit window; need at least {p + 2} for {p} proxies"
        )

    for j, name in enumerate(proxies):
        if np.ptp(panel[fit_rows, j]) == 0.0:
            raise DegenerateInputError(
                f"proxy {name!r} is constant over the fit window"
            )

    design = np.column_stack([np.ones(n_fit), panel[fit_rows]])
    singular = np.linalg.svd(design, compute_uv=False)
    cond = singular[0] / singular[-1] if singular[-1] > 0 else np.inf
    if cond > CONDITION_LIMIT:
        _, _, vt = np.linalg.svd(design)
        participation = np.abs(vt[-1][1:])  # skip intercept coordinate
        offenders = [
            proxies[j]
            for j in np.argsort(participation)[::-1]
            if participation[j] > 0.1
        ]
        raise CollinearityError(
            f"design condition number {cond:.3g} exceeds {CONDITION_LIMIT:.0e}; "
            f"implicated columns: {', '.join(offenders) or 'unknown'}"
        )

    y = temp[fit_rows]
    coef, *_ = np.linalg.lstsq(design, y, rcond=None)
    residuals = y - design @ coef
    total = y - y.mean()
    sst = float(total @ total)
    if sst == 0.0:
        raise DegenerateInputError("temperature is constant over the fit window")
    r_squared = 1.0 - float(residuals @ residuals) / sst

    series = np.full(frame.years.size, np.nan)
    series[complete] = coef[0] + panel[complete] @ coef[1:]
    return ReducedProxy(
        weights={name: float(c) for name, c in zip(proxies, coef[1:])},
        intercept=float(coef[0]),
        series=series,
        r_squared=float(r_squared),
        fit_window=tuple(fit_window),
    )
