"""Command-line interface.

Subcommands: synth, reduce, spectrum, memtest, reconstruct, validate,
tcr.  Configuration uses INI files with a strict schema (unknown
sections or keys are hard errors); paths inside a config resolve
relative to the config file's directory.  All result files are written
atomically (temp file + rename) with a fixed float format, so the same
argv + config + seed produces byte-identical CSVs.  Each reconstruct
run appends exactly one JSON line to ``manifest.jsonl`` in the output
directory (the manifest carries timings, so it is exempt from the
byte-identical guarantee).

Exit codes: 0 success, 2 configuration error, 3 data error,
4 numerical degeneracy.
"""

from __future__ import annotations

import argparse
import configparser
import contextlib
import csv
import hashlib
import json
import logging
import os
import sys
import tempfile
import time
from datetime import datetime, timezone

import numpy as np

from . import __version__, memtests, noise, spectral
from .errors import ConfigurationError, DataError, NumericalDegeneracyError
from .frame import TimeSeriesFrame, merge_frames, read_role_csv, write_csv
from .reduction import fit_reduced_proxy, screening_report
from .sampler import (
    SCENARIOS,
    ChainSettings,
    PriorConfig,
    ReconstructionData,
    run_chains,
    scenario_config,
    transform_forcings,
)
from .synthetic import ForcingShapes, SyntheticSpec, generate
from .validation import tcr_density, validation_report

__all__ = ["run", "main"]

log = logging.getLogger(__name__)

_FLOAT_FMT = ".17g"

_SCHEMA: dict[str, set[str]] = {
    "data": {
        "proxies", "temperature", "forcings",
        "rp_column", "temperature_column",
        "solar_column", "volcanic_column", "ghg_column",
    },
    "windows": {
        "calibration_start", "calibration_end",
        "prediction_start", "prediction_end",
    },
    "chain": {"iterations", "burn_in", "chains", "seed", "mh_step_h", "mh_step_k"},
    "priors": {"alpha_mean", "beta_mean", "sigma_shape", "sigma_scale"},
    "scenario": {"label"},
    "synthetic": {
        "start_year", "end_year", "calibration_start",
        "alpha", "beta", "sigma_p2", "sigma_t2",
        "proxy_error", "proxy_memory", "process_error", "process_memory",
        "forcings_included", "panel", "panel_noise", "seed",
        "solar_amplitude", "solar_period", "volcanic_rate", "volcanic_scale",
        "ghg_base", "ghg_growth",
    },
    "reduce": {
        "fit_start", "fit_end", "standardize_start", "standardize_end",
        "screen", "screen_level", "screen_reference", "proxies",
    },
}


class Config:
    """Strictly validated INI configuration."""

    def __init__(self, parser: configparser.ConfigParser, base_dir: str, digest: str | None):
        self._parser = parser
        self.base_dir = base_dir
        self.digest = digest

    @classmethod
    def empty(cls) -> "Config":
        return cls(configparser.ConfigParser(interpolation=None), os.getcwd(), None)

    @classmethod
    def load(cls, path: str) -> "Config":
        parser = configparser.ConfigParser(interpolation=None)
        try:
            with open(path, encoding="utf-8") as handle:
                raw = handle.read()
        except OSError as exc:
            raise ConfigurationError(f"cannot read config {path!r}: {exc}") from exc
        try:
            parser.read_string(raw, source=path)
        except configparser.Error as exc:
            raise ConfigurationError(f"malformed config {path!r}: {exc}") from exc
        for section in parser.sections():
            if section not in _SCHEMA:
                raise ConfigurationError(
                    f"unknown config section [{section}]; expected one of "
                    f"{sorted(_SCHEMA)}"
                )
            unknown = set(parser.options(section)) - _SCHEMA[section]
            if unknown:
                raise ConfigurationError(
                    f"unknown key(s) {sorted(unknown)} in section [{section}]"
                )
        digest = hashlib.sha256(raw.encode("utf-8")).hexdigest()
        base = os.path.dirname(os.path.abspath(path))
        return cls(parser, base, digest)

    def _raw(self, section: str, key: str) -> str | None:
        if self._parser.has_option(section, key):
            value = self._parser.get(section, key).strip()
            return value if value else None
        return None

    def get_str(self, section, key, default=None):
        value = self._raw(section, key)
        return default if value is None else value

    def get_path(self, section, key, default=None):
        value = self._raw(section, key)
        if value is None:
            return default
        return os.path.normpath(os.path.join(self.base_dir, value))

    def _cast(self, section, key, value, cast, kind):
        try:
            return cast(value)
        except ValueError:
            raise ConfigurationError(
                f"config {section}.{key} must be {kind}, got {value!r}"
            ) from None

    def get_int(self, section, key, default=None):
        value = self._raw(section, key)
        if value is None:
            return default
        return self._cast(section, key, value, int, "an integer")

    def get_float(self, section, key, default=None):
        value = self._raw(section, key)
        if value is None:
            return default
        return self._cast(section, key, value, float, "a number")

    def get_bool(self, section, key, default=None):
        value = self._raw(section, key)
        if value is None:
            return default
        lowered = value.lower()
        if lowered in ("1", "true", "yes", "on"):
            return True
        if lowered in ("0", "false", "no", "off"):
            return False
        raise ConfigurationError(f"config {section}.{key} must be a boolean, got {value!r}")

    def get_floats(self, section, key, default=None):
        value = self._raw(section, key)
        if value is None:
            return default
        return tuple(
            self._cast(section, key, part.strip(), float, "a number")
            for part in value.split(",")
        )

    def get_names(self, section, key, default=None):
        value = self._raw(section, key)
        if value is None:
            return default
        return [part.strip() for part in value.split(",") if part.strip()]


# ---------------------------------------------------------------------------
# atomic output helpers


def _atomic_write(path: str, writer) -> None:
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix=".part")
    os.close(fd)
    try:
        writer(tmp)
        os.replace(tmp, path)
    except BaseException:
        with contextlib.suppress(OSError):
            os.unlink(tmp)
        raise


def _write_table(path: str, header: list[str], rows) -> None:
    def writer(tmp: str) -> None:
        with open(tmp, "w", newline="") as handle:
            out = csv.writer(handle)
            out.writerow(header)
            out.writerows(rows)

    _atomic_write(path, writer)


def _write_frame_csv(path: str, years: np.ndarray, columns: dict) -> None:
    _atomic_write(path, lambda tmp: write_csv(tmp, years, columns))


def _write_json(path: str, payload) -> None:
    def writer(tmp: str) -> None:
        with open(tmp, "w", encoding="utf-8") as handle:
            json.dump(payload, handle, indent=2, sort_keys=True)
            handle.write("\n")

    _atomic_write(path, writer)


def _write_text(path: str, text: str) -> None:
    def writer(tmp: str) -> None:
        with open(tmp, "w", encoding="utf-8") as handle:
            handle.write(text)

    _atomic_write(path, writer)


def _fmt(value: float) -> str:
    return format(float(value), _FLOAT_FMT)


def _jsonable(value):
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, (np.floating, np.integer)):
        return value.item()
    if isinstance(value, dict):
        return {k: _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    return value


# ---------------------------------------------------------------------------
# input helpers


def _read_draws_csv(path: str):
    """Read an ``iteration,<name>...`` draws CSV into (names, matrix)."""
    try:
        handle = open(path, newline="")
    except OSError as exc:
        raise DataError(f"cannot read draws file {path!r}: {exc}") from exc
    with handle:
        reader = csv.reader(handle)
        try:
            header = next(reader)
        except StopIteration:
            raise DataError(f"draws file {path!r} is empty") from None
        if len(header) < 2 or header[0] != "iteration":
            raise DataError(
                f"draws file {path!r} must start with an 'iteration' column"
            )
        names = header[1:]
        rows = []
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != len(header):
                raise DataError(f"{path}:{lineno}: expected {len(header)} cells")
            try:
                rows.append([float(cell) for cell in row[1:]])
            except ValueError:
                raise DataError(f"{path}:{lineno}: non-numeric cell") from None
    if not rows:
        raise DataError(f"draws file {path!r} has no draws")
    return names, np.asarray(rows)


def _series_from_frame(frame: TimeSeriesFrame, column: str | None, path: str):
    """Pick one column (the only one, unless named) and return its
    observed values in year order."""
    names = frame.names()
    if column is None:
        if len(names) != 1:
            raise ConfigurationError(
                f"{path!r} has columns {names}; pick one with --column"
            )
        column = names[0]
    values = frame.column(column)
    mask = np.isfinite(values)
    if not mask.any():
        raise DataError(f"column {column!r} of {path!r} has no observed values")
    if not mask.all():
        present = np.flatnonzero(mask)
        interior_gap = np.any(~mask[present[0] : present[-1] + 1])
        if interior_gap:
            log.warning(
                "column %r has interior missing years; analyzing the %d observed "
                "values as a contiguous series",
                column,
                int(mask.sum()),
            )
    return column, values[mask]


def _load_config(args) -> Config:
    config_path = getattr(args, "config", None)
    return Config.load(config_path) if config_path else Config.empty()


# ---------------------------------------------------------------------------
# synth


def _synthetic_spec(cfg: Config, seed_override: int | None) -> SyntheticSpec:
    sec = "synthetic"
    shapes = ForcingShapes(
        solar_amplitude=cfg.get_float(sec, "solar_amplitude", 1.0),
        solar_period=cfg.get_float(sec, "solar_period", 80.0),
        volcanic_rate=cfg.get_float(sec, "volcanic_rate", 0.06),
        volcanic_scale=cfg.get_float(sec, "volcanic_scale", 1.0),
        ghg_base=cfg.get_float(sec, "ghg_base", 280.0),
        ghg_growth=cfg.get_float(sec, "ghg_growth", 0.3),
    )
    seed = seed_override if seed_override is not None else cfg.get_int(sec, "seed", 0)
    alpha = cfg.get_floats(sec, "alpha", (0.0, 1.0))
    beta = cfg.get_floats(sec, "beta", (0.0, 0.4, 0.8, 1.0))
    if len(alpha) != 2:
        raise ConfigurationError("synthetic.alpha must have 2 components")
    if len(beta) != 4:
        raise ConfigurationError("synthetic.beta must have 4 components")
    return SyntheticSpec(
        years=(cfg.get_int(sec, "start_year", 1400), cfg.get_int(sec, "end_year", 1998)),
        calibration_start=cfg.get_int(sec, "calibration_start", 1900),
        alpha=alpha,
        beta=beta,
        sigma_p2=cfg.get_float(sec, "sigma_p2", 0.09),
        sigma_t2=cfg.get_float(sec, "sigma_t2", 0.04),
        proxy_error=cfg.get_str(sec, "proxy_error", noise.FGN),
        proxy_memory=cfg.get_float(sec, "proxy_memory", 0.7),
        process_error=cfg.get_str(sec, "process_error", noise.FGN),
        process_memory=cfg.get_float(sec, "process_memory", 0.7),
        forcings_included=cfg.get_bool(sec, "forcings_included", True),
        panel=cfg.get_int(sec, "panel", 0),
        panel_noise=cfg.get_float(sec, "panel_noise", 0.3),
        forcing_shapes=shapes,
        seed=seed,
    )


def _matching_label(spec: SyntheticSpec) -> str | None:
    combo = (spec.proxy_error, spec.process_error, spec.forcings_included)
    for label, expected in SCENARIOS.items():
        if expected == combo:
            return label
    return None


def _cmd_synth(args) -> int:
    cfg = _load_config(args)
    spec = _synthetic_spec(cfg, args.seed)
    frame, truth = generate(spec)
    out = args.out_dir
    os.makedirs(out, exist_ok=True)

    proxy_names = frame.names("proxy")
    _write_frame_csv(
        os.path.join(out, "proxies.csv"),
        frame.years,
        {name: frame.columns[name] for name in proxy_names},
    )
    _write_frame_csv(
        os.path.join(out, "temperature.csv"), frame.years, {"temp": frame.columns["temp"]}
    )
    _write_frame_csv(
        os.path.join(out, "forcings.csv"),
        frame.years,
        {name: frame.columns[name] for name in ("solar", "volcanic", "ghg")},
    )
    _write_json(os.path.join(out, "truth.json"), _jsonable(truth))
    # full latent temperature, for scoring reconstructions with `validate`
    _write_frame_csv(
        os.path.join(out, "truth.csv"), frame.years, {"temp": truth["temperature"]}
    )

    lo, hi = spec.years
    lines = [
        "[data]",
        "proxies = proxies.csv",
        "temperature = temperature.csv",
        "forcings = forcings.csv",
        "",
        "[windows]",
        f"prediction_start = {lo}",
        f"prediction_end = {spec.calibration_start - 1}",
        f"calibration_start = {spec.calibration_start}",
        f"calibration_end = {hi}",
    ]
    label = _matching_label(spec)
    if label is not None:
        lines += ["", "[scenario]", f"label = {label}"]
    _write_text(os.path.join(out, "run.ini"), "\n".join(lines) + "\n")

    print(f"synthetic dataset written to {out} ({frame.years.size} years, seed {spec.seed})")
    return 0


# ---------------------------------------------------------------------------
# reduce


def _cmd_reduce(args) -> int:
    cfg = _load_config(args)
    proxies_path = cfg.get_path("data", "proxies")
    temperature_path = cfg.get_path("data", "temperature")
    if proxies_path is None or temperature_path is None:
        raise ConfigurationError(
            "reduce requires data.proxies and data.temperature paths in the config"
        )
    frames = [
        read_role_csv(proxies_path, "proxy"),
        read_role_csv(temperature_path, "temperature"),
    ]
    frame = merge_frames(frames)

    temp_col = cfg.get_str("data", "temperature_column", "temp")
    cal_lo = cfg.get_int("windows", "calibration_start", 1900)
    cal_hi = cfg.get_int("windows", "calibration_end", 1998)
    fit_window = (
        cfg.get_int("reduce", "fit_start", cal_lo),
        cfg.get_int("reduce", "fit_end", cal_hi),
    )
    std_lo = cfg.get_int("reduce", "standardize_start")
    std_hi = cfg.get_int("reduce", "standardize_end")
    if (std_lo is None) != (std_hi is None):
        raise ConfigurationError(
            "reduce.standardize_start and reduce.standardize_end must be given together"
        )
    standardize_window = None if std_lo is None else (std_lo, std_hi)

    proxies = cfg.get_names("reduce", "proxies") or frame.names("proxy")
    out = args.out_dir
    os.makedirs(out, exist_ok=True)

    if cfg.get_bool("reduce", "screen", False):
        reference = cfg.get_str("reduce", "screen_reference", temp_col)
        level = cfg.get_float("reduce", "screen_level", 0.05)
        rows = screening_report(
            frame, {name: reference for name in proxies}, level, proxies
        )
        _write_table(
            os.path.join(out, "screening.csv"),
            ["proxy", "reference", "correlation", "p_value", "overlap", "retained"],
            [
                [r.proxy, r.reference, _fmt(r.correlation), _fmt(r.p_value),
                 str(r.overlap), str(int(r.retained))]
                for r in rows
            ],
        )
        proxies = sorted(r.proxy for r in rows if r.retained)
        if not proxies:
            raise DataError("screening removed every proxy")

    reduced = fit_reduced_proxy(
        frame, temp_col, fit_window, proxies=sorted(proxies),
        standardize_window=standardize_window,
    )
    _write_frame_csv(os.path.join(out, "reduced.csv"), frame.years, {"rp": reduced.series})
    _write_json(
        os.path.join(out, "reduction.json"),
        {
            "intercept": reduced.intercept,
            "weights": _jsonable(dict(reduced.weights)),
            "r_squared": reduced.r_squared,
            "fit_window": list(reduced.fit_window),
            "proxies": sorted(proxies),
        },
    )
    print(
        f"reduced proxy written to {out} (R^2 = {reduced.r_squared:.4f}, "
        f"{len(proxies)} proxies)"
    )
    return 0


# ---------------------------------------------------------------------------
# spectrum / memtest


def _cmd_spectrum(args) -> int:
    frame = read_role_csv(args.input, "proxy")
    column, values = _series_from_frame(frame, args.column, args.input)
    if args.method == "periodogram":
        estimate = spectral.periodogram(values)
    else:
        estimate = spectral.multitaper(values, tapers=args.tapers)
    out = args.out_dir
    os.makedirs(out, exist_ok=True)
    _write_table(
        os.path.join(out, "spectrum.csv"),
        ["frequency", "power"],
        [[_fmt(f), _fmt(p)] for f, p in zip(estimate.frequencies, estimate.power)],
    )
    fit = spectral.loglog_slope(estimate, args.slope_fraction)
    print(
        f"{args.method} spectrum of {column!r}: {estimate.frequencies.size} "
        f"frequencies; log-log slope {fit.slope:.4f} "
        f"(implied Hurst {fit.implied_hurst:.4f})"
    )
    return 0


def _cmd_memtest(args) -> int:
    frame = read_role_csv(args.input, "proxy")
    column, values = _series_from_frame(frame, args.column, args.input)
    tests = [t.strip() for t in args.tests.split(",") if t.strip()]
    nulls = [t.strip() for t in args.nulls.split(",") if t.strip()]
    known = {"robinson", "beran", "davies_harte"}
    unknown = set(tests) - known
    if unknown:
        raise ConfigurationError(f"unknown test(s) {sorted(unknown)}; expected {sorted(known)}")

    results = []
    for test in tests:
        if test == "robinson":
            results.append(("robinson", memtests.robinson_test(values, m=args.bandwidth)))
        elif test == "davies_harte":
            results.append(("davies_harte", memtests.davies_harte_test(values)))
        else:
            for null in nulls:
                results.append((f"beran[{null}]", memtests.beran_test(values, null_model=null)))

    rows = []
    for name, res in results:
        rows.append(
            [
                name,
                res.null_model,
                _fmt(res.statistic),
                _fmt(res.p_value),
                "" if res.estimate is None else _fmt(res.estimate),
                "" if res.bandwidth is None else str(res.bandwidth),
            ]
        )
        extra = "" if res.estimate is None else f", estimate={res.estimate:.4f}"
        print(f"{name}: statistic={res.statistic:.4f}, p={res.p_value:.4g}{extra}")
    out = args.out_dir
    os.makedirs(out, exist_ok=True)
    _write_table(
        os.path.join(out, "memtest.csv"),
        ["test", "null_model", "statistic", "p_value", "estimate", "bandwidth"],
        rows,
    )
    return 0


# ---------------------------------------------------------------------------
# reconstruct


def _chain_settings(cfg: Config, args) -> ChainSettings:
    def pick(flag, section_key, default):
        if flag is not None:
            return flag
        return cfg.get_int("chain", section_key, default)

    return ChainSettings(
        iterations=pick(args.iterations, "iterations", 5000),
        burn_in=pick(args.burn_in, "burn_in", 1000),
        chains=pick(args.chains, "chains", 1),
        seed=pick(args.seed, "seed", 0),
        mh_step_h=cfg.get_float("chain", "mh_step_h", 0.02),
        mh_step_k=cfg.get_float("chain", "mh_step_k", 0.02),
    )


def _prior_config(cfg: Config) -> PriorConfig:
    return PriorConfig(
        alpha_mean=cfg.get_floats("priors", "alpha_mean", (0.0, 1.0)),
        beta_mean=cfg.get_floats("priors", "beta_mean", (0.0, 1.0, 1.0, 1.0)),
        sigma_shape=cfg.get_float("priors", "sigma_shape", 2.0),
        sigma_scale=cfg.get_float("priors", "sigma_scale", 0.1),
    )


def _cmd_reconstruct(args) -> int:
    cfg = _load_config(args)
    label = args.scenario or cfg.get_str("scenario", "label")
    if label is None:
        raise ConfigurationError("a scenario label is required (--scenario or [scenario])")

    frames = []
    forcings_path = cfg.get_path("data", "forcings")
    for key, role in (("proxies", "proxy"), ("temperature", "temperature")):
        path = cfg.get_path("data", key)
        if path is None:
            raise ConfigurationError(f"reconstruct requires data.{key} in the config")
        frames.append(read_role_csv(path, role))

    settings = _chain_settings(cfg, args)
    config = scenario_config(label, chain=settings, priors=_prior_config(cfg))

    if config.forcings_included:
        if forcings_path is None:
            raise ConfigurationError(
                f"scenario {label} includes forcings; set data.forcings in the config"
            )
        frames.append(read_role_csv(forcings_path, "forcing"))
    elif forcings_path is not None:
        log.warning(
            "scenario %s excludes forcings; ignoring supplied forcing file %s",
            label,
            forcings_path,
        )
    frame = merge_frames(frames)

    data = ReconstructionData.from_frame(
        frame,
        forcings_included=config.forcings_included,
        rp_column=cfg.get_str("data", "rp_column", "rp"),
        temperature_column=cfg.get_str("data", "temperature_column", "temp"),
        solar_column=cfg.get_str("data", "solar_column", "solar"),
        volcanic_column=cfg.get_str("data", "volcanic_column", "volcanic"),
        ghg_column=cfg.get_str("data", "ghg_column", "ghg"),
        calibration_window=(
            cfg.get_int("windows", "calibration_start", 1900),
            cfg.get_int("windows", "calibration_end", 1998),
        ),
        prediction_window=(
            cfg.get_int("windows", "prediction_start", 1000),
            cfg.get_int("windows", "prediction_end", 1899),
        ),
    )

    started = time.perf_counter()
    chains = run_chains(config, data)
    wall = time.perf_counter() - started

    out = args.out_dir
    os.makedirs(out, exist_ok=True)
    outputs = []
    for index, draws in enumerate(chains):
        params_path = os.path.join(out, f"parameters_chain{index}.csv")
        _write_table(
            params_path,
            ["iteration", *draws.parameter_names],
            (
                [str(row_index), *(_fmt(v) for v in row)]
                for row_index, row in enumerate(draws.parameters)
            ),
        )
        latent_path = os.path.join(out, f"latent_chain{index}.csv")
        _write_table(
            latent_path,
            ["iteration", *(str(y) for y in draws.latent_years)],
            (
                [str(row_index), *(_fmt(v) for v in row)]
                for row_index, row in enumerate(draws.latent)
            ),
        )
        outputs += [os.path.basename(params_path), os.path.basename(latent_path)]

    pooled = np.vstack([d.latent for d in chains])
    summary_path = os.path.join(out, "summary.csv")
    _write_table(
        summary_path,
        ["year", "mean", "q025", "q975"],
        (
            [str(year), _fmt(mean), _fmt(lo), _fmt(hi)]
            for year, mean, lo, hi in zip(
                chains[0].latent_years,
                pooled.mean(axis=0),
                np.quantile(pooled, 0.025, axis=0),
                np.quantile(pooled, 0.975, axis=0),
            )
        ),
    )
    outputs.append(os.path.basename(summary_path))

    manifest = {
        "command": "reconstruct",
        "version": __version__,
        "timestamp": datetime.now(timezone.utc).isoformat(),
        "config_hash": cfg.digest,
        "scenario": label,
        "seed": settings.seed,
        "chain_indices": list(range(settings.chains)),
        "iterations": settings.iterations,
        "burn_in": settings.burn_in,
        "acceptance_rates": [_jsonable(d.acceptance_rates) for d in chains],
        "wall_time_seconds": wall,
        "outputs": outputs,
    }
    if len(chains) >= 2 and chains[0].parameters.shape[0] >= 100:
        from .validation import psrf, psrf_multivariate

        names = chains[0].parameter_names
        sampled = [
            j
            for j in range(len(names))
            if np.ptp([c.parameters[:, j] for c in chains]) > 0
        ]
        per_param = {
            names[j]: psrf([c.parameters[:, j] for c in chains]) for j in sampled
        }
        manifest["psrf"] = _jsonable(per_param)
        if sampled:
            manifest["psrf_multivariate"] = float(
                psrf_multivariate([c.parameters[:, sampled] for c in chains])
            )
    with open(os.path.join(out, "manifest.jsonl"), "a", encoding="utf-8") as handle:
        handle.write(json.dumps(manifest, sort_keys=True) + "\n")

    rates = "; ".join(
        f"chain {i}: "
        + ", ".join(f"{k}={v:.3f}" for k, v in sorted(d.acceptance_rates.items()))
        for i, d in enumerate(chains)
        if d.acceptance_rates
    )
    print(
        f"scenario {label}: {settings.chains} chain(s) x {settings.iterations} "
        f"iterations in {wall:.1f}s; outputs in {out}"
        + (f" (acceptance {rates})" if rates else "")
    )
    return 0


# ---------------------------------------------------------------------------
# validate


def _cmd_validate(args) -> int:
    matrices = []
    names = None
    for path in args.draws:
        file_names, matrix = _read_draws_csv(path)
        if names is None:
            names = file_names
        elif names != file_names:
            raise DataError(f"draw files disagree on year columns ({path!r})")
        matrices.append(matrix)
    draws = np.vstack(matrices)
    try:
        years = np.array([int(name) for name in names])
    except ValueError:
        raise DataError("latent draw columns must be years") from None

    observed_frame = read_role_csv(args.observed, "temperature")
    column = args.column
    if column is None:
        names_obs = observed_frame.names()
        if len(names_obs) != 1:
            raise ConfigurationError(
                f"{args.observed!r} has columns {names_obs}; pick one with --column"
            )
        column = names_obs[0]
    observed = observed_frame.column(column)

    lo = args.start if args.start is not None else years.min()
    hi = args.end if args.end is not None else years.max()
    keep = []
    values = []
    year_to_index = {int(y): i for i, y in enumerate(observed_frame.years)}
    for j, year in enumerate(years):
        if lo <= year <= hi and year in year_to_index:
            value = observed[year_to_index[year]]
            if np.isfinite(value):
                keep.append(j)
                values.append(value)
    if len(keep) < 2:
        raise DataError(
            "need at least 2 years where draws and observations overlap"
        )
    report = validation_report(draws[:, keep], np.asarray(values))

    out = args.out_dir
    os.makedirs(out, exist_ok=True)
    _write_table(
        os.path.join(out, "report.csv"),
        list(report.FIELDS),
        [[_fmt(v) for v in report.as_row()]],
    )
    for name, value in zip(report.FIELDS, report.as_row()):
        print(f"{name} = {value:.6g}")
    print(f"scored {len(keep)} years against {column!r}")
    return 0


# ---------------------------------------------------------------------------
# tcr


def _parse_label_path(text: str) -> tuple[str, str]:
    label, sep, path = text.partition("=")
    if not sep or not label or not path:
        raise ConfigurationError(f"expected LABEL=PATH, got {text!r}")
    return label, path


def _cmd_tcr(args) -> int:
    draws_by_label: dict[str, list[np.ndarray]] = {}
    for item in args.draws:
        label, path = _parse_label_path(item)
        names, matrix = _read_draws_csv(path)
        if "beta3" not in names:
            raise DataError(
                f"{path!r} has no beta3 column; TCR needs draws from a "
                "forcings-included scenario"
            )
        draws_by_label.setdefault(label, []).append(matrix[:, names.index("beta3")])
    if not draws_by_label:
        raise ConfigurationError("at least one --draws LABEL=PATH is required")
    pooled_draws = {k: np.concatenate(v) for k, v in draws_by_label.items()}

    weights = {}
    for part in args.weights.split(","):
        part = part.strip()
        if not part:
            continue
        label, sep, value = part.partition("=")
        if not sep:
            raise ConfigurationError(f"expected LABEL=WEIGHT, got {part!r}")
        try:
            weights[label.strip()] = float(value)
        except ValueError:
            raise ConfigurationError(f"weight for {label!r} must be a number") from None

    forcings = read_role_csv(args.forcings, "forcing")
    ghg = forcings.column(args.ghg_column)
    mask = np.isfinite(ghg)
    if mask.sum() < 2:
        raise DataError(f"column {args.ghg_column!r} needs >= 2 observed values")
    _, log_c = transform_forcings(
        np.zeros(int(mask.sum())), ghg[mask], forcings.years[mask]
    )

    density = tcr_density(
        pooled_draws, weights, log_c, n_samples=args.n_samples, seed=args.seed
    )
    out = args.out_dir
    os.makedirs(out, exist_ok=True)
    _write_table(
        os.path.join(out, "tcr_draws.csv"),
        ["iteration", "tcr"],
        ([str(i), _fmt(v)] for i, v in enumerate(density.draws)),
    )
    _write_json(
        os.path.join(out, "tcr_summary.json"),
        {
            "median": density.median,
            "ci95": list(density.ci95),
            "n_draws": int(density.draws.size),
            "scenario_mix": [[label, w] for label, w in density.scenario_mix],
            "sd_log_c": float(np.std(log_c, ddof=1)),
        },
    )
    lo, hi = density.ci95
    print(
        f"TCR median {density.median:.3f} C, 95% interval [{lo:.3f}, {hi:.3f}] C "
        f"({density.draws.size} pooled draws)"
    )
    return 0


# ---------------------------------------------------------------------------
# parser / dispatch


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="paleorecon",
        description="Hierarchical Bayesian temperature reconstruction toolkit",
    )
    parser.add_argument(
        "--log-level",
        default="INFO",
        choices=["DEBUG", "INFO", "WARNING", "ERROR"],
        help="logging verbosity (default INFO)",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_out(p):
        p.add_argument("--out-dir", default=".", help="output directory (default .)")

    p = sub.add_parser("synth", help="generate a pseudoproxy dataset")
    p.add_argument("--config", help="INI config with a [synthetic] section")
    p.add_argument("--seed", type=int, help="override the generator seed")
    add_out(p)
    p.set_defaults(func=_cmd_synth)

    p = sub.add_parser("reduce", help="screen proxies and fit the reduced proxy")
    p.add_argument("--config", required=True, help="INI config with [data] paths")
    add_out(p)
    p.set_defaults(func=_cmd_reduce)

    p = sub.add_parser("spectrum", help="periodogram or multitaper spectrum of one column")
    p.add_argument("--input", required=True, help="year-indexed CSV")
    p.add_argument("--column", help="column name (default: the only column)")
    p.add_argument(
        "--method", default="multitaper", choices=["periodogram", "multitaper"]
    )
    p.add_argument("--tapers", type=int, default=7, help="sine tapers (default 7)")
    p.add_argument(
        "--slope-fraction",
        type=float,
        default=1.0,
        help="low-frequency fraction for the log-log slope (default 1.0)",
    )
    add_out(p)
    p.set_defaults(func=_cmd_spectrum)

    p = sub.add_parser("memtest", help="long-memory diagnostic tests on one column")
    p.add_argument("--input", required=True, help="year-indexed CSV")
    p.add_argument("--column", help="column name (default: the only column)")
    p.add_argument(
        "--tests",
        default="robinson,beran,davies_harte",
        help="comma list from {robinson,beran,davies_harte}",
    )
    p.add_argument(
        "--nulls",
        default="fgn,ar1,white",
        help="comma list of Beran goodness-of-fit null families",
    )
    p.add_argument("--bandwidth", type=int, help="Robinson/local-Whittle bandwidth m")
    add_out(p)
    p.set_defaults(func=_cmd_memtest)

    p = sub.add_parser("reconstruct", help="run the Gibbs/MH sampler for one scenario")
    p.add_argument("--scenario", choices=sorted(SCENARIOS), help="scenario label A..H")
    p.add_argument("--config", required=True, help="INI config with [data] paths")
    p.add_argument("--seed", type=int, help="override chain.seed")
    p.add_argument("--chains", type=int, help="override chain.chains")
    p.add_argument("--iterations", type=int, help="override chain.iterations")
    p.add_argument("--burn-in", type=int, help="override chain.burn_in")
    add_out(p)
    p.set_defaults(func=_cmd_reconstruct)

    p = sub.add_parser("validate", help="score latent draws against observations")
    p.add_argument(
        "--draws",
        action="append",
        required=True,
        help="latent draws CSV (repeat to pool chains)",
    )
    p.add_argument("--observed", required=True, help="year-indexed observation CSV")
    p.add_argument("--column", help="observation column (default: the only column)")
    p.add_argument("--start", type=int, help="first validation year")
    p.add_argument("--end", type=int, help="last validation year")
    add_out(p)
    p.set_defaults(func=_cmd_validate)

    p = sub.add_parser("tcr", help="transient-climate-response posterior")
    p.add_argument(
        "--draws",
        action="append",
        required=True,
        metavar="LABEL=PATH",
        help="parameter draws CSV for one scenario (repeatable)",
    )
    p.add_argument(
        "--weights",
        required=True,
        metavar="LABEL=W,...",
        help="scenario mixture weights summing to 1",
    )
    p.add_argument("--forcings", required=True, help="year-indexed forcing CSV")
    p.add_argument("--ghg-column", default="ghg", help="GHG column name (default ghg)")
    p.add_argument("--n-samples", type=int, help="pooled resample size")
    p.add_argument("--seed", type=int, default=0, help="resampling seed (default 0)")
    add_out(p)
    p.set_defaults(func=_cmd_tcr)

    return parser


def run(argv=None) -> int:
    """Parse argv, dispatch, and map failures to exit codes
    (2 configuration, 3 data, 4 numerical)."""
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(
        level=getattr(logging, args.log_level),
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )
    try:
        return int(args.func(args))
    except ConfigurationError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2
    except DataError as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return 3
    except NumericalDegeneracyError as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return 4


def main() -> None:
    sys.exit(run())
