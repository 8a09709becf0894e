"""Distance-error metrics for toponym resolution.

* accuracy@k: share of errors strictly below ``k`` km (161 km = 100 miles)
* mean error in km
* AUC: normalised log error, ``ln(x + 1) / ln(20039)``, aggregated either as
  a plain mean (default) or as the trapezoidal area under the sorted curve

Unresolved mentions are charged :data:`~geovote.geodesy.MAX_ERROR_KM`.
"""
from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from typing import Mapping, Optional, Sequence

from . import kernels
from .gazetteer import PlaceCategory, categorize_mention
from .geodesy import MAX_ERROR_KM, GeoPoint

AUC_MODES = ("mean", "trapezoid")
DEFAULT_THRESHOLD_KM = 161.0
_LOG_MAX = math.log(MAX_ERROR_KM)


def error_distance(res, gold: GeoPoint) -> float:
    if res is None or not res.resolved:
        return MAX_ERROR_KM
    return min(kernels.haversine(res.point.lat, res.point.lon, gold.lat, gold.lon), MAX_ERROR_KM)


def _nonempty(ev: Sequence[float]) -> Sequence[float]:
    if len(ev) == 0:
        raise ValueError("metric of an empty error vector")
    return ev


def accuracy_at(ev: Sequence[float], threshold_km: float = DEFAULT_THRESHOLD_KM) -> float:
    ev = _nonempty(ev)
    return sum(1 for x in ev if x < threshold_km) / len(ev)


def mean_error(ev: Sequence[float]) -> float:
    ev = _nonempty(ev)
    return math.fsum(ev) / len(ev)


def auc_norm_log(ev: Sequence[float], mode: str = "mean") -> float:
    ev = _nonempty(ev)
    ys = sorted(math.log1p(x) / _LOG_MAX for x in ev)
    if mode == "mean":
        return math.fsum(ys) / len(ys)
    if mode == "trapezoid":
        n = len(ys)
        if n == 1:
            return ys[0]
        # unit-length index axis: spacing 1/(n-1)
        return (math.fsum(ys) - 0.5 * (ys[0] + ys[-1])) / (n - 1)
    raise ValueError(f"unknown AUC mode {mode!r}; expected one of {AUC_MODES}")


@dataclass
class MetricsReport:
    system: str
    dataset: str
    n: int
    accuracy: float
    mean_error_km: float
    auc: float
    threshold_km: float = DEFAULT_THRESHOLD_KM
    auc_mode: str = "mean"
    per_category: dict[str, tuple[int, float]] = field(default_factory=dict)

    @property
    def accuracy_metric_name(self) -> str:
        return f"accuracy_at_{self.threshold_km:g}"

    def to_dict(self) -> dict:
        return {
            "system": self.system,
            "dataset": self.dataset,
            "n": self.n,
            self.accuracy_metric_name: round(self.accuracy, 6),
            "mean_error_km": round(self.mean_error_km, 6),
            "auc": round(self.auc, 6),
            "per_category": {
                cat: {"n": n, self.accuracy_metric_name: round(acc, 6)}
                for cat, (n, acc) in self.per_category.items()
            },
        }


def error_vector(resolutions: Mapping, corpus) -> list[float]:
    return [error_distance(resolutions.get(m.mention_id), m.gold) for m in corpus.mentions]


def evaluate(resolutions: Mapping, corpus, gaz=None, *, system: str = "voting",
             threshold_km: float = DEFAULT_THRESHOLD_KM, auc_mode: str = "mean",
             per_category: bool = True) -> MetricsReport:
    """Score one system on one corpus. Mentions without a resolution count as invalid."""
    if auc_mode not in AUC_MODES:
        raise ValueError(f"unknown AUC mode {auc_mode!r}")
    ev = error_vector(resolutions, corpus)
    cats: dict[str, tuple[int, float]] = {}
    if per_category:
        buckets: dict[str, list[float]] = {}
        for m, err in zip(corpus.mentions, ev):
            buckets.setdefault(categorize_mention(m, gaz).value, []).append(err)
        for cat in PlaceCategory:
            if cat.value in buckets:
                errs = buckets[cat.value]
                cats[cat.value] = (len(errs), accuracy_at(errs, threshold_km))
    return MetricsReport(
        system=system,
        dataset=corpus.name,
        n=len(ev),
        accuracy=accuracy_at(ev, threshold_km),
        mean_error_km=mean_error(ev),
        auc=auc_norm_log(ev, auc_mode),
        threshold_km=threshold_km,
        auc_mode=auc_mode,
        per_category=cats,
    )


def macro_average(reports: Sequence[MetricsReport], dataset: str = "macro") -> MetricsReport:
    """Unweighted mean of each metric over per-dataset reports."""
    if not reports:
        raise ValueError("macro_average needs at least one report")
    systems = {r.system for r in reports}
    if len(systems) != 1:
        raise ValueError(f"cannot average reports of different systems: {sorted(systems)}")
    k = len(reports)
    cats: dict[str, tuple[int, float]] = {}
    for cat in PlaceCategory:
        present = [r.per_category[cat.value] for r in reports if cat.value in r.per_category]
        if present:
            cats[cat.value] = (sum(n for n, _ in present), math.fsum(a for _, a in present) / len(present))
    first = reports[0]
    return MetricsReport(
        system=first.system,
        dataset=dataset,
        n=sum(r.n for r in reports),
        accuracy=math.fsum(r.accuracy for r in reports) / k,
        mean_error_km=math.fsum(r.mean_error_km for r in reports) / k,
        auc=math.fsum(r.auc for r in reports) / k,
        threshold_km=first.threshold_km,
        auc_mode=first.auc_mode,
        per_category=cats,
    )


# --- emission -----------------------------------------------------------------

def _fmt(x) -> str:
    return str(x) if isinstance(x, int) else f"{x:.6f}"


def report_rows(report: MetricsReport, with_categories: bool = True) -> list[tuple[str, str, str, str]]:
    acc = report.accuracy_metric_name
    rows = [
        (report.system, report.dataset, "n", _fmt(report.n)),
        (report.system, report.dataset, acc, _fmt(report.accuracy)),
        (report.system, report.dataset, "mean_error_km", _fmt(report.mean_error_km)),
        (report.system, report.dataset, "auc", _fmt(report.auc)),
    ]
    if with_categories:
        for cat, (n, a) in report.per_category.items():
            rows.append((report.system, report.dataset, f"n[{cat}]", _fmt(n)))
            rows.append((report.system, report.dataset, f"{acc}[{cat}]", _fmt(a)))
    return rows


def header(auc_mode: str, threshold_km: float, **extra) -> dict:
    out = {"auc_mode": auc_mode, "threshold_km": threshold_km}
    out.update(extra)
    return out


def reports_to_csv(reports: Sequence[MetricsReport], head: Optional[dict] = None,
                   with_categories: bool = True) -> str:
    buf = io.StringIO()
    if head:
        buf.write("# " + " ".join(f"{k}={v}" for k, v in head.items()) + "\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(("system", "dataset", "metric", "value"))
    for r in reports:
        writer.writerows(report_rows(r, with_categories))
    return buf.getvalue()


def reports_to_json(reports: Sequence[MetricsReport], head: Optional[dict] = None,
                    with_categories: bool = True) -> str:
    items = []
    for r in reports:
        d = r.to_dict()
        if not with_categories:
            d.pop("per_category")
        items.append(d)
    return json.dumps({"header": head or {}, "reports": items}, indent=2, ensure_ascii=False) + "\n"
