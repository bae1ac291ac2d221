"""Monte Carlo engine: sampling, undersampling estimates, recovery runs.

Randomness comes from numpy's PCG64 generator. Each trial derives its own
substream from (seed, indices) through SeedSequence, so results do not
depend on execution order; identical configurations reproduce identical
outputs bit for bit.
"""

from __future__ import annotations

import math
import statistics
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .histogram import RankHistogram
from .models import ModelParams, pmf
from .selection import DEFAULT_ENSEMBLE, select

__all__ = [
    "SimulationConfig",
    "UndersamplingEstimate",
    "SizeRecovery",
    "RecoveryStats",
    "sample",
    "sample_counts",
    "undersampling_probability",
    "recovery_experiment",
]


@dataclass(frozen=True)
class SimulationConfig:
    """One recovery experiment: a true model, trial count and sample sizes."""

    seed: int
    trials: int
    sample_sizes: tuple[float, ...]
    model: ModelParams

    def __post_init__(self):
        if not (isinstance(self.seed, int) and 0 <= self.seed < 2 ** 64):
            raise ValueError("seed must be a 64-bit unsigned integer")
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        object.__setattr__(self, "sample_sizes", tuple(float(s) for s in self.sample_sizes))
        if not self.sample_sizes or any(s < 1 for s in self.sample_sizes):
            raise ValueError("sample sizes must be >= 1")

    def as_dict(self) -> dict:
        return {
            "seed": self.seed,
            "trials": self.trials,
            "sample_sizes": list(self.sample_sizes),
            "model": self.model.as_dict(),
        }


class UndersamplingEstimate(NamedTuple):
    estimate: float
    half_width: float


def _child_seed(seed: int, *key: int) -> int:
    ss = np.random.SeedSequence((int(seed),) + tuple(int(k) for k in key))
    return int(ss.generate_state(1, np.uint64)[0])


def _cumulative(m: ModelParams) -> np.ndarray:
    cum = np.cumsum([pmf(m, r) for r in range(1, m.R + 1)])
    cum[-1] = 1.0  # close the table against rounding in the last cell
    return cum


def sample_counts(m: ModelParams, n: int, seed: int) -> np.ndarray:
    """Draw n ranks from the model pmf; returns counts per category 1..R.

    Inverse-CDF sampling over the R-point support with a precomputed
    cumulative table. Deterministic for a fixed seed.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    rng = np.random.default_rng(seed)
    u = rng.random(int(n))
    idx = np.searchsorted(_cumulative(m), u, side="right")
    return np.bincount(idx, minlength=m.R)


def sample(m: ModelParams, n: int, seed: int) -> RankHistogram:
    """Sample n draws and aggregate them into a rank histogram.

    Categories are re-ranked by descending observed count (count ties break
    by category index), mirroring how rank-frequency data are built from
    raw category counts; unattested categories are omitted.
    """
    counts = sample_counts(m, n, seed)
    order = sorted(range(m.R), key=lambda i: (-counts[i], i))
    attested = [i for i in order if counts[i] > 0]
    width = len(str(m.R))
    return RankHistogram.from_frequencies(
        [float(counts[i]) for i in attested],
        names=[f"c{i + 1:0{width}d}" for i in attested],
        label=f"sample from {m.kind.value} (seed {seed}, n {int(n)})",
        unit="draws",
    )


def undersampling_probability(m: ModelParams, n: int, trials: int,
                              seed: int) -> UndersamplingEstimate:
    """Monte Carlo probability that n draws attest fewer than N ranks.

    The half width is the 95% normal-approximation interval with a 1/(2T)
    continuity correction, which keeps coverage conservative at moderate
    trial counts.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    under = 0
    for t in range(trials):
        counts = sample_counts(m, n, _child_seed(seed, t))
        if int(np.count_nonzero(counts)) < m.N:
            under += 1
    p = under / trials
    half_width = 1.96 * math.sqrt(p * (1.0 - p) / trials) + 0.5 / trials
    return UndersamplingEstimate(estimate=p, half_width=half_width)


@dataclass(frozen=True)
class SizeRecovery:
    sample_size: int
    trials: int
    failures: int
    median_abs_param_error: float | None
    aicc_true_fraction: float | None
    bic_true_fraction: float | None
    undersampled_fraction: float | None

    def as_dict(self) -> dict:
        return {
            "sample_size": self.sample_size,
            "trials": self.trials,
            "failures": self.failures,
            "median_abs_param_error": self.median_abs_param_error,
            "aicc_true_fraction": self.aicc_true_fraction,
            "bic_true_fraction": self.bic_true_fraction,
            "undersampled_fraction": self.undersampled_fraction,
        }


@dataclass(frozen=True)
class RecoveryStats:
    config: SimulationConfig
    ensemble: tuple
    per_size: tuple[SizeRecovery, ...]

    def as_dict(self) -> dict:
        d = self.config.as_dict()
        d["ensemble"] = [k.value for k in self.ensemble]
        d["per_size"] = [s.as_dict() for s in self.per_size]
        return d

    def to_tsv(self) -> str:
        """Per-size summary table, one row per sample size."""
        columns = ("sample_size", "trials", "failures", "median_abs_param_error",
                   "aicc_true_fraction", "bic_true_fraction", "undersampled_fraction")
        lines = ["\t".join(columns)]
        for s in self.per_size:
            row = s.as_dict()
            lines.append("\t".join(
                "NA" if row[c] is None else
                (repr(row[c]) if isinstance(row[c], float) else str(row[c]))
                for c in columns))
        return "\n".join(lines) + "\n"


def recovery_experiment(cfg: SimulationConfig, ensemble=None) -> RecoveryStats:
    """Sample, select and score: can the criteria find the true model back?

    For every (sample size, trial) pair a fresh histogram is drawn from the
    true model and run through ensemble selection. Recorded per size: the
    median absolute error of the true kind's fitted scalar, the fraction of
    trials where each criterion picks the true kind, and the fraction of
    undersampled trials (r_max < N). Trials whose selection fails (for
    instance AICc undefined at tiny F0) count as failures and drop out of
    the aggregates.
    """
    kinds = tuple(ensemble if ensemble is not None else DEFAULT_ENSEMBLE)
    true_kind = cfg.model.kind
    if true_kind not in kinds:
        raise ValueError("ensemble must contain the true model kind")
    truth = cfg.model.scalar

    per_size = []
    for i_size, size in enumerate(cfg.sample_sizes):
        n = int(size)
        errors = []
        aicc_hits = 0
        bic_hits = 0
        undersampled = 0
        failures = 0
        for t in range(cfg.trials):
            hist = sample(cfg.model, n, _child_seed(cfg.seed, i_size, t))
            try:
                table = select(hist, N=cfg.model.N, ensemble=kinds)
            except ValueError:
                failures += 1
                continue
            row = table.row(true_kind)
            if row.fit is None:
                failures += 1
                continue
            errors.append(abs(row.fit.params.scalar - truth))
            aicc_hits += table.best_by_aicc == true_kind
            bic_hits += table.best_by_bic == true_kind
            undersampled += hist.r_max < cfg.model.N
        done = cfg.trials - failures
        per_size.append(SizeRecovery(
            sample_size=n,
            trials=cfg.trials,
            failures=failures,
            median_abs_param_error=statistics.median(errors) if errors else None,
            aicc_true_fraction=aicc_hits / done if done else None,
            bic_true_fraction=bic_hits / done if done else None,
            undersampled_fraction=undersampled / done if done else None,
        ))
    return RecoveryStats(config=cfg, ensemble=kinds, per_size=tuple(per_size))
