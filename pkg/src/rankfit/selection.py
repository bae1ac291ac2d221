"""Information-criterion scoring and ensemble-level model selection.

Both criteria are of the form -2*loglik + penalty, lower is better:

  AICc = -2 L + 2 K F0 / (F0 - K - 1)
  BIC  = -2 L + K log F0

Criterion weights are exp(-delta/2) normalized over the ensemble, where
delta is the score difference to the best model; the ratio of two weights
is the evidence of one model over the other.
"""

from __future__ import annotations

import math
import warnings as _warnings
from dataclasses import dataclass

from .estimation import FitResult, fit
from .histogram import RankHistogram, summarize
from .models import DEFAULT_DOMAIN_CEILING, ModelKind, log_likelihood

__all__ = [
    "DEFAULT_ENSEMBLE",
    "SelectionRow",
    "SelectionTable",
    "aicc",
    "bic",
    "weights",
    "evidence_ratio",
    "aicc_evidence_ratio",
    "bic_evidence_ratio",
    "select",
    "cross_apply",
    "selection_table_tsv",
    "selection_table_dict",
    "best_params_tsv",
    "best_params_dict",
]

DEFAULT_ENSEMBLE = (
    ModelKind.ZETA1,
    ModelKind.ZETA2,
    ModelKind.GEOMETRIC1,
    ModelKind.GEOMETRIC2,
)

SELECTION_COLUMNS = ("model", "loglik", "AICc", "delta_AICc", "w_AICc",
                     "BIC", "delta_BIC", "w_BIC")


def aicc(loglik: float, K: int, F0: float) -> float:
    """Corrected Akaike criterion; requires F0 > K + 1."""
    if K < 1:
        raise ValueError("K must be >= 1")
    if not F0 > K + 1:
        raise ValueError(f"AICc needs F0 > K + 1 (got F0={F0}, K={K})")
    return -2.0 * loglik + 2.0 * K * F0 / (F0 - K - 1.0)


def bic(loglik: float, K: int, F0: float) -> float:
    """Bayesian information criterion; requires F0 > 1."""
    if K < 1:
        raise ValueError("K must be >= 1")
    if not F0 > 1:
        raise ValueError(f"BIC needs F0 > 1 (got F0={F0})")
    return -2.0 * loglik + K * math.log(F0)


def weights(scores: list[float]) -> list[float]:
    """Criterion weights exp(-delta/2) / sum, deltas against the minimum.

    Scores may be +inf (a model with -inf log-likelihood), which yields
    weight exactly 0. Deltas are taken against the finite minimum, so the
    largest exponential term is exactly 1 and the sum cannot overflow.
    """
    if not scores:
        raise ValueError("empty score list")
    for s in scores:
        if math.isnan(s) or s == -math.inf:
            raise ValueError(f"scores must be finite or +inf, got {s}")
    best = min(scores)
    if math.isinf(best):
        raise ValueError("all scores are infinite; no model can be weighted")
    raw = [math.exp(-0.5 * (s - best)) for s in scores]
    total = math.fsum(raw)
    return [w / total for w in raw]


def evidence_ratio(w_i: float, w_j: float) -> float:
    """Ratio w_i / w_j of two criterion weights."""
    if w_j == 0.0:
        _warnings.warn("evidence ratio against a zero-weight model is +inf")
        return math.inf
    return w_i / w_j


def _exp(x: float) -> float:
    # likelihood ratios overflow the double range long before they stop
    # being meaningful; saturate instead of raising
    try:
        return math.exp(x)
    except OverflowError:
        return math.inf


def aicc_evidence_ratio(loglik_i: float, k_i: int, loglik_j: float, k_j: int,
                        F0: float) -> float:
    """AICc evidence of model i over model j from raw fits.

    Equals (L_i/L_j) * exp(F0 * (K_j/(F0-K_j-1) - K_i/(F0-K_i-1))), the
    closed form of the weight ratio.
    """
    lr = _exp(loglik_i - loglik_j)
    return lr * _exp(F0 * (k_j / (F0 - k_j - 1.0) - k_i / (F0 - k_i - 1.0)))


def bic_evidence_ratio(loglik_i: float, k_i: int, loglik_j: float, k_j: int,
                       F0: float) -> float:
    """BIC evidence of model i over model j: (L_i/L_j) * F0**((K_j-K_i)/2).

    The penalty factor is computed as sqrt(F0)**(K_j-K_i) so that integer
    parameter-count differences stay exact (equal likelihoods and a one
    parameter gap at F0=36 give exactly 6).
    """
    lr = _exp(loglik_i - loglik_j)
    dk = k_j - k_i
    root = math.sqrt(F0)
    return lr * (root ** dk if dk >= 0 else 1.0 / root ** -dk)


@dataclass(frozen=True)
class SelectionRow:
    kind: ModelKind
    fit: FitResult | None
    loglik: float | None
    aicc: float | None
    delta_aicc: float | None
    w_aicc: float | None
    bic: float | None
    delta_bic: float | None
    w_bic: float | None
    error: str | None = None


@dataclass(frozen=True)
class SelectionTable:
    """Per-model criterion scores for one histogram (one row per kind)."""

    rows: tuple[SelectionRow, ...]
    best_by_aicc: ModelKind
    best_by_bic: ModelKind
    F0: float

    def row(self, kind: ModelKind | str) -> SelectionRow:
        kind = ModelKind(kind)
        for r in self.rows:
            if r.kind == kind:
                return r
        raise KeyError(kind.value)


def _argbest(rows: list[SelectionRow], score_of) -> ModelKind:
    scored = [r for r in rows if score_of(r) is not None]
    # ties break toward fewer parameters, then kind name
    best = min(scored, key=lambda r: (score_of(r), r.kind.n_params, r.kind.value))
    return best.kind


def select(hist: RankHistogram, N: int = DEFAULT_DOMAIN_CEILING,
           ensemble=None) -> SelectionTable:
    """Fit every ensemble member and score it with AICc and BIC.

    Rows whose fit or scoring fails (for instance AICc with F0 <= K + 1)
    keep their error message and are excluded from delta and weight
    normalization; the remaining weights still sum to 1.
    """
    kinds = tuple(ModelKind(k) for k in (ensemble if ensemble is not None else DEFAULT_ENSEMBLE))
    if not kinds:
        raise ValueError("ensemble must not be empty")
    F0 = summarize(hist).F0

    fitted: list[tuple[ModelKind, FitResult | None, float | None, float | None, str | None]] = []
    for kind in kinds:
        try:
            fr = fit(kind, hist, N)
            a = aicc(fr.loglik, fr.n_params, F0)
            b = bic(fr.loglik, fr.n_params, F0)
            fitted.append((kind, fr, a, b, None))
        except ValueError as exc:
            fitted.append((kind, None, None, None, str(exc)))

    valid = [(i, a, b) for i, (_, _, a, b, err) in enumerate(fitted) if err is None]
    if not valid:
        raise ValueError("no ensemble member could be fitted and scored")
    w_a = weights([a for _, a, _ in valid])
    w_b = weights([b for _, _, b in valid])
    min_a = min(a for _, a, _ in valid)
    min_b = min(b for _, _, b in valid)

    by_index = {i: (w_a[k], w_b[k]) for k, (i, _, _) in enumerate(valid)}
    rows = []
    for i, (kind, fr, a, b, err) in enumerate(fitted):
        if err is None:
            rows.append(SelectionRow(
                kind=kind, fit=fr, loglik=fr.loglik,
                aicc=a, delta_aicc=a - min_a, w_aicc=by_index[i][0],
                bic=b, delta_bic=b - min_b, w_bic=by_index[i][1],
            ))
        else:
            rows.append(SelectionRow(
                kind=kind, fit=fr, loglik=None,
                aicc=None, delta_aicc=None, w_aicc=None,
                bic=None, delta_bic=None, w_bic=None,
                error=err,
            ))

    return SelectionTable(
        rows=tuple(rows),
        best_by_aicc=_argbest(rows, lambda r: r.aicc),
        best_by_bic=_argbest(rows, lambda r: r.bic),
        F0=F0,
    )


def cross_apply(fit_result: FitResult, other: RankHistogram) -> float:
    """Log-likelihood of a previously fitted model on another dataset.

    -inf when the other dataset attests ranks beyond the fitted support
    (r_max > R); that is a legitimate value, not an error.
    """
    return log_likelihood(fit_result.params, summarize(other))


def _cell(x) -> str:
    if x is None:
        return "NA"
    if isinstance(x, float):
        return repr(x)
    return str(x)


def selection_table_tsv(table: SelectionTable) -> str:
    lines = ["\t".join(SELECTION_COLUMNS)]
    for r in table.rows:
        lines.append("\t".join(_cell(v) for v in (
            r.kind.value, r.loglik, r.aicc, r.delta_aicc, r.w_aicc,
            r.bic, r.delta_bic, r.w_bic)))
    return "\n".join(lines) + "\n"


def selection_table_dict(table: SelectionTable) -> dict:
    return {
        "F0": table.F0,
        "best_by_AICc": table.best_by_aicc.value,
        "best_by_BIC": table.best_by_bic.value,
        "rows": [
            {
                "model": r.kind.value,
                "loglik": r.loglik,
                "AICc": r.aicc,
                "delta_AICc": r.delta_aicc,
                "w_AICc": r.w_aicc,
                "BIC": r.bic,
                "delta_BIC": r.delta_bic,
                "w_BIC": r.w_bic,
                "error": r.error,
            }
            for r in table.rows
        ],
    }


def best_params_tsv(table: SelectionTable) -> str:
    """Fitted-parameter table: one row per model with R, alpha and q."""
    lines = ["model\tR\talpha\tq"]
    for r in table.rows:
        if r.fit is None:
            lines.append(f"{r.kind.value}\tNA\tNA\tNA")
        else:
            p = r.fit.params
            lines.append("\t".join((
                r.kind.value, str(p.R), _cell(p.alpha), _cell(p.q))))
    return "\n".join(lines) + "\n"


def best_params_dict(table: SelectionTable) -> dict:
    rows = []
    for r in table.rows:
        if r.fit is None:
            rows.append({"model": r.kind.value, "R": None, "alpha": None,
                         "q": None, "error": r.error})
        else:
            p = r.fit.params
            rows.append({"model": r.kind.value, "R": p.R, "alpha": p.alpha,
                         "q": p.q, "error": None})
    return {"rows": rows}
