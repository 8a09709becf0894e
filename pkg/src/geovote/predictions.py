"""Per-approach prediction files produced by external toponym resolvers.

File format: UTF-8 JSON lines, one record per mention::

    {"approach": "GENRE", "mention_id": "lgl-17", "lat": 48.85, "lon": 2.35}
    {"approach": "GENRE", "mention_id": "lgl-18", "invalid": true}

Lines starting with ``#`` and blank lines are ignored. Exact (0, 0) is the
"no estimate" sentinel and is stored as invalid.
"""
from __future__ import annotations

import json
import logging
import os
from dataclasses import dataclass, field
from typing import Mapping, Optional

from .geodesy import GeoPoint

logger = logging.getLogger(__name__)


class PredictionFormatError(ValueError):
    pass


@dataclass(frozen=True)
class Prediction:
    mention_id: str
    point: Optional[GeoPoint] = None

    def __post_init__(self):
        if self.point is not None and self.point.lat == 0.0 and self.point.lon == 0.0:
            raise ValueError("(0, 0) is the invalid-estimate sentinel; use point=None")

    @property
    def valid(self) -> bool:
        return self.point is not None

    @property
    def kind(self) -> str:
        return "valid" if self.point is not None else "invalid"


@dataclass
class PredictionSet:
    approach_id: str
    predictions: dict[str, Prediction] = field(default_factory=dict)

    def get(self, mention_id: str) -> Prediction:
        """Prediction for a mention; mentions the file does not cover count as invalid."""
        return self.predictions.get(mention_id) or Prediction(mention_id)

    def __len__(self):
        return len(self.predictions)


def normalize_invalid(raw: Mapping) -> Prediction:
    """Turn one raw record into a :class:`Prediction`.

    Explicit ``invalid`` flags, missing or out-of-range coordinates and the
    exact (0, 0) sentinel all become invalid predictions.
    """
    mention_id = str(raw.get("mention_id"))
    if raw.get("invalid"):
        return Prediction(mention_id)
    lat, lon = raw.get("lat"), raw.get("lon")
    if isinstance(lat, bool) or isinstance(lon, bool) or not GeoPoint.in_range(lat, lon):
        return Prediction(mention_id)
    lat, lon = float(lat), float(lon)
    if lat == 0.0 and lon == 0.0:
        return Prediction(mention_id)
    return Prediction(mention_id, GeoPoint(lat, lon))


def load_predictions(path) -> PredictionSet:
    approach = None
    preds: dict[str, Prediction] = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            try:
                rec = json.loads(line)
            except json.JSONDecodeError as exc:
                raise PredictionFormatError(f"{path}:{lineno}: invalid JSON ({exc.msg})") from None
            if not isinstance(rec, dict):
                raise PredictionFormatError(f"{path}:{lineno}: expected a JSON object")
            for key in ("approach", "mention_id"):
                if key not in rec:
                    raise PredictionFormatError(f"{path}:{lineno}: missing field {key!r}")
            rec_approach = str(rec["approach"])
            if approach is None:
                approach = rec_approach
            elif rec_approach != approach:
                raise PredictionFormatError(
                    f"{path}:{lineno}: approach {rec_approach!r} differs from {approach!r}"
                )
            pred = normalize_invalid(rec)
            if pred.mention_id in preds:
                raise PredictionFormatError(
                    f"{path}:{lineno}: duplicate mention_id {pred.mention_id!r}"
                )
            preds[pred.mention_id] = pred
    if approach is None:
        raise PredictionFormatError(f"{path}: no records, approach id unknown")
    n_invalid = sum(not p.valid for p in preds.values())
    logger.debug("loaded %d predictions for %s (%d invalid)", len(preds), approach, n_invalid)
    return PredictionSet(approach, preds)


def prediction_record(approach_id: str, pred: Prediction) -> dict:
    if pred.point is None:
        return {"approach": approach_id, "mention_id": pred.mention_id, "invalid": True}
    return {
        "approach": approach_id,
        "mention_id": pred.mention_id,
        "lat": pred.point.lat,
        "lon": pred.point.lon,
    }


def write_predictions(pset: PredictionSet, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for pred in pset.predictions.values():
            fh.write(json.dumps(prediction_record(pset.approach_id, pred)) + "\n")


def split_prediction_filename(path) -> tuple[str, Optional[str]]:
    """``GENRE__lgl.jsonl`` -> ("GENRE", "lgl"); no dataset part -> (stem, None)."""
    stem = os.path.basename(path)
    if stem.endswith(".jsonl"):
        stem = stem[: -len(".jsonl")]
    if "__" in stem:
        approach, dataset = stem.split("__", 1)
        return approach, dataset
    return stem, None
