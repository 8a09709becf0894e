"""Sensitivity analyses: leave-one-out ablation and DBSCAN parameter sweeps."""
from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from typing import Sequence

from .metrics import DEFAULT_THRESHOLD_KM, MetricsReport, evaluate, macro_average
from .predictions import PredictionSet
from .voting import EnsembleConfig, resolve_corpus

SWEEP_PARAMETERS = ("eps_km", "min_pts")
DEFAULT_EPS_VALUES = tuple(range(1, 801, 30))
DEFAULT_MIN_PTS_VALUES = tuple(range(1, 12))


@dataclass
class EvalSet:
    """One dataset and the prediction sets available for it."""
    corpus: object
    predictions: list[PredictionSet] = field(default_factory=list)


@dataclass(frozen=True)
class AblationResult:
    approach_id: str
    delta_accuracy: float
    delta_auc: float
    delta_me: float


@dataclass
class SweepCurve:
    parameter: str
    points: list[tuple[float, float, float, float]] = field(default_factory=list)

    def __post_init__(self):
        values = [p[0] for p in self.points]
        if any(b <= a for a, b in zip(values, values[1:])):
            raise ValueError("sweep values must be strictly increasing")


def ensemble_report(config: EnsembleConfig, evalsets: Sequence[EvalSet], *,
                    system: str = "voting", threshold_km: float = DEFAULT_THRESHOLD_KM,
                    auc_mode: str = "mean") -> MetricsReport:
    """Macro-averaged metrics of ``config`` over every non-empty dataset."""
    members = set(config.approach_ids)
    reports = []
    for es in evalsets:
        if not es.corpus.mentions:
            continue
        psets = [p for p in es.predictions if p.approach_id in members]
        resolutions = resolve_corpus(es.corpus, psets, config)
        reports.append(evaluate(resolutions, es.corpus, system=system, threshold_km=threshold_km,
                                auc_mode=auc_mode, per_category=False))
    if not reports:
        raise ValueError("no non-empty dataset to evaluate")
    return macro_average(reports)


def ablate(basic: EnsembleConfig, evalsets: Sequence[EvalSet], **kwargs) -> list[AblationResult]:
    """Contribution of each approach: basic-ensemble metric minus degraded-ensemble metric.

    Positive ``delta_accuracy`` means the ensemble is more accurate with the
    approach than without it; for ``delta_me`` and ``delta_auc`` (lower is
    better) a helpful approach shows up negative.
    """
    if len(basic.approaches) < 2:
        raise ValueError("ablation needs an ensemble of at least two approaches")
    base = ensemble_report(basic, evalsets, **kwargs)
    results = []
    for approach_id in basic.approach_ids:
        degraded = ensemble_report(basic.without(approach_id), evalsets, **kwargs)
        results.append(AblationResult(
            approach_id,
            base.accuracy - degraded.accuracy,
            base.auc - degraded.auc,
            base.mean_error_km - degraded.mean_error_km,
        ))
    return results


def sweep(config: EnsembleConfig, parameter: str, values: Sequence, evalsets: Sequence[EvalSet],
          **kwargs) -> SweepCurve:
    """Re-run the ensemble for each value of one DBSCAN parameter, all else fixed."""
    if parameter not in SWEEP_PARAMETERS:
        raise ValueError(f"unknown sweep parameter {parameter!r}; expected one of {SWEEP_PARAMETERS}")
    if not values:
        raise ValueError("sweep needs at least one value")
    for v in values:
        if parameter == "eps_km" and not v > 0:
            raise ValueError(f"eps_km must be positive, got {v}")
        if parameter == "min_pts" and (int(v) != v or v < 1):
            raise ValueError(f"min_pts must be a positive integer, got {v}")
    if any(b <= a for a, b in zip(values, values[1:])):
        raise ValueError("sweep values must be strictly increasing")
    points = []
    for v in values:
        cfg = config.with_params(eps_km=v) if parameter == "eps_km" else config.with_params(min_pts=int(v))
        rep = ensemble_report(cfg, evalsets, **kwargs)
        points.append((v, rep.accuracy, rep.auc, rep.mean_error_km))
    return SweepCurve(parameter, points)


def ablation_to_csv(results: Sequence[AblationResult]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(("approach_id", "delta_accuracy", "delta_auc", "delta_me_km"))
    for r in results:
        w.writerow((r.approach_id, f"{r.delta_accuracy:.6f}", f"{r.delta_auc:.6f}", f"{r.delta_me:.6f}"))
    return buf.getvalue()


def ablation_to_json(results: Sequence[AblationResult], head: dict | None = None) -> str:
    items = [{"approach_id": r.approach_id, "delta_accuracy": round(r.delta_accuracy, 6),
              "delta_auc": round(r.delta_auc, 6), "delta_me_km": round(r.delta_me, 6)}
             for r in results]
    return json.dumps({"header": head or {}, "ablation": items}, indent=2) + "\n"


def sweep_to_long_csv(curve: SweepCurve, accuracy_name: str = "accuracy_at_161") -> str:
    """Plot-ready long format: parameter,value,metric,score."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(("parameter", "value", "metric", "score"))
    for v, acc, auc, me in curve.points:
        value = f"{v:g}"
        w.writerow((curve.parameter, value, accuracy_name, f"{acc:.6f}"))
        w.writerow((curve.parameter, value, "auc", f"{auc:.6f}"))
        w.writerow((curve.parameter, value, "mean_error_km", f"{me:.6f}"))
    return buf.getvalue()


def sweep_to_json(curve: SweepCurve, head: dict | None = None) -> str:
    pts = [{"value": v, "accuracy": round(a, 6), "auc": round(u, 6), "mean_error_km": round(m, 6)}
           for v, a, u, m in curve.points]
    return json.dumps({"header": head or {}, "parameter": curve.parameter, "points": pts}, indent=2) + "\n"
