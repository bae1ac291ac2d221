"""Scale diagnostics: plot-ready series and straight-line slope checks.

A geometric pmf is a straight line with slope log(1-q) in linear-log
scale; a zeta pmf is a straight line with slope -alpha in log-log scale.
The diagnostic regressions compare how straight the observed data look in
each scale and report the model-predicted slopes next to the fitted ones.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import NamedTuple

from .estimation import FitResult
from .histogram import RankHistogram
from .models import ModelKind, ModelParams, expected_frequency

__all__ = [
    "Scale",
    "PlotSeries",
    "SlopeFit",
    "DiagnosticReport",
    "transform_series",
    "expected_series",
    "slope_fit",
    "diagnose",
    "emit_plot_data",
    "DEFAULT_R2_MARGIN",
]

DEFAULT_R2_MARGIN = 0.02

VERDICT_EXPONENTIAL = "exponential-like"
VERDICT_POWER_LAW = "power-law-like"
VERDICT_INCONCLUSIVE = "inconclusive"


class Scale(str, Enum):
    NORMAL = "normal"
    LINEAR_LOG = "linear-log"
    LOG_LOG = "log-log"


@dataclass(frozen=True)
class PlotSeries:
    """Points of one curve in one scale.

    normal: (r, f(r)); linear-log: (r, log f(r)); log-log: (log r, log f(r)).
    ``source`` is "observed" or "expected"; expected series carry the model
    kind they came from.
    """

    scale: Scale
    points: tuple[tuple[float, float], ...]
    source: str
    model: ModelKind | None = None


class SlopeFit(NamedTuple):
    slope: float
    intercept: float
    r2: float


@dataclass(frozen=True)
class DiagnosticReport:
    linlog_slope: float
    linlog_r2: float
    loglog_slope: float
    loglog_r2: float
    geometric_slope_prediction: float
    zeta_slope_prediction: float
    verdict: str
    margin: float

    def as_dict(self) -> dict:
        return {
            "linlog_slope": self.linlog_slope,
            "linlog_r2": self.linlog_r2,
            "loglog_slope": self.loglog_slope,
            "loglog_r2": self.loglog_r2,
            "geometric_slope_prediction": self.geometric_slope_prediction,
            "zeta_slope_prediction": self.zeta_slope_prediction,
            "verdict": self.verdict,
            "margin": self.margin,
        }


def _transform(points, scale: Scale):
    if scale == Scale.NORMAL:
        return tuple((float(r), float(f)) for r, f in points)
    if scale == Scale.LINEAR_LOG:
        return tuple((float(r), math.log(f)) for r, f in points)
    return tuple((math.log(r), math.log(f)) for r, f in points)


def transform_series(hist: RankHistogram, scale: Scale | str) -> PlotSeries:
    """Observed (rank, frequency) pairs in the requested scale, natural logs."""
    scale = Scale(scale)
    return PlotSeries(scale=scale, points=_transform(hist.entries, scale),
                      source="observed")


def expected_series(m: ModelParams, F0: float, scale: Scale | str) -> PlotSeries:
    """Model-expected frequencies F0*p(r) over the support 1..R, transformed."""
    scale = Scale(scale)
    pts = [(r, expected_frequency(m, F0, r)) for r in range(1, m.R + 1)]
    pts = [(r, f) for r, f in pts if f > 0]
    return PlotSeries(scale=scale, points=_transform(pts, scale),
                      source="expected", model=m.kind)


def slope_fit(series: PlotSeries) -> SlopeFit:
    """Unweighted ordinary least squares over the series points.

    r2 = 1 - SSres/SStot, with the all-equal-y case (SStot = 0) defined as
    a perfect horizontal fit: slope 0, r2 = 1.
    """
    pts = series.points
    if len(pts) < 2:
        raise ValueError("slope fit needs at least 2 points")
    n = len(pts)
    xbar = math.fsum(x for x, _ in pts) / n
    ybar = math.fsum(y for _, y in pts) / n
    sxx = math.fsum((x - xbar) ** 2 for x, _ in pts)
    if sxx == 0.0:
        raise ValueError("slope fit needs at least 2 distinct x values")
    sstot = math.fsum((y - ybar) ** 2 for _, y in pts)
    if sstot == 0.0:
        return SlopeFit(slope=0.0, intercept=ybar, r2=1.0)
    sxy = math.fsum((x - xbar) * (y - ybar) for x, y in pts)
    slope = sxy / sxx
    intercept = ybar - slope * xbar
    ssres = math.fsum((y - (intercept + slope * x)) ** 2 for x, y in pts)
    return SlopeFit(slope=slope, intercept=intercept, r2=1.0 - ssres / sstot)


def _pick(fits, want_geometric: bool) -> FitResult:
    group = [f for f in fits if f.params.kind.is_geometric == want_geometric]
    if not group:
        family = "geometric" if want_geometric else "zeta"
        raise ValueError(f"diagnose needs at least one {family} fit")
    # best log-likelihood wins; ties go to the simpler model
    return max(group, key=lambda f: (f.loglik, -f.n_params))


def diagnose(hist: RankHistogram, fits, margin: float = DEFAULT_R2_MARGIN) -> DiagnosticReport:
    """Regress the observed data in both log scales and compare linearity.

    The verdict is exponential-like iff the linear-log r2 beats the
    log-log r2 by more than ``margin``, power-law-like in the mirrored
    case, inconclusive otherwise. Slope predictions come from the best
    geometric fit (log(1-q)) and the best zeta fit (-alpha) supplied.
    """
    geo = _pick(fits, want_geometric=True)
    zet = _pick(fits, want_geometric=False)
    linlog = slope_fit(transform_series(hist, Scale.LINEAR_LOG))
    loglog = slope_fit(transform_series(hist, Scale.LOG_LOG))
    if linlog.r2 - loglog.r2 > margin:
        verdict = VERDICT_EXPONENTIAL
    elif loglog.r2 - linlog.r2 > margin:
        verdict = VERDICT_POWER_LAW
    else:
        verdict = VERDICT_INCONCLUSIVE
    return DiagnosticReport(
        linlog_slope=linlog.slope,
        linlog_r2=linlog.r2,
        loglog_slope=loglog.slope,
        loglog_r2=loglog.r2,
        geometric_slope_prediction=math.log1p(-geo.params.q),
        zeta_slope_prediction=-zet.params.alpha,
        verdict=verdict,
        margin=margin,
    )


def _fmt(x: float) -> str:
    if x == int(x) and abs(x) < 1e16:
        return str(int(x))
    return repr(x)


_SCALE_SLUG = {Scale.NORMAL: "normal", Scale.LINEAR_LOG: "linear_log",
               Scale.LOG_LOG: "log_log"}


def _write_series(path: Path, series: PlotSeries):
    try:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write("x\ty\n")
            for x, y in series.points:
                fh.write(f"{_fmt(x)}\t{_fmt(y)}\n")
    except OSError as exc:
        raise OSError(f"writing plot series {path}: {exc}") from exc


def emit_plot_data(hist: RankHistogram, fits, directory) -> list[Path]:
    """Write one TSV per (scale, source) plus a series manifest.

    Observed data produce three files (one per scale); every fit adds
    three expected-frequency files. ``manifest.json`` lists each series
    with its file, scale, source and model. Returns all written paths,
    manifest last.
    """
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    F0 = math.fsum(hist.frequencies)

    written: list[Path] = []
    manifest = []
    for scale in Scale:
        series = transform_series(hist, scale)
        path = directory / f"observed_{_SCALE_SLUG[scale]}.tsv"
        _write_series(path, series)
        written.append(path)
        manifest.append({"file": path.name, "scale": scale.value, "source": "observed"})
    for fr in fits:
        for scale in Scale:
            series = expected_series(fr.params, F0, scale)
            path = directory / f"expected_{fr.params.kind.value}_{_SCALE_SLUG[scale]}.tsv"
            _write_series(path, series)
            written.append(path)
            manifest.append({"file": path.name, "scale": scale.value,
                             "source": "expected", "model": fr.params.kind.value})

    manifest_path = directory / "manifest.json"
    try:
        with open(manifest_path, "w", encoding="utf-8", newline="\n") as fh:
            json.dump({"series": manifest}, fh, indent=2)
            fh.write("\n")
    except OSError as exc:
        raise OSError(f"writing manifest {manifest_path}: {exc}") from exc
    written.append(manifest_path)
    return written
