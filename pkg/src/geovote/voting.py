"""Cluster-based voting over the coordinate estimates of several resolvers.

For one mention: drop invalid estimates, run weighted DBSCAN, and return the
centroid of the heaviest cluster. Without any cluster, fall back to the
first valid estimate in configured approach order.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from importlib import resources
from typing import Iterable, Mapping, Optional, Sequence

from .clustering import ClusterParams, WeightedEstimate, dbscan_weighted, largest_cluster
from .geodesy import GeoPoint, spherical_centroid
from .predictions import Prediction, PredictionSet

RESOLVED = "resolved"
INVALID = "invalid"
CLUSTER_CENTROID = "cluster_centroid"
FALLBACK_FIRST_VALID = "fallback_first_valid"

# Every resolver compared in the original study, in its listing order; used
# to order the equal-weight ensemble for leave-one-out ablation.
KNOWN_APPROACHES = (
    "DBpediaSpotlight",
    "EntityFishing",
    "MulRelNEL",
    "DCA",
    "BLINK",
    "Bootleg",
    "GENRE",
    "ExtEnD",
    "LUKE",
    "Nominatim",
    "AdaptiveLearning",
    "EdinburghGeoparser",
    "PopulationHeuristics",
    "CLAVIN",
    "TopoCluster",
    "Mordecai",
    "CBH",
    "SHS",
    "CHF",
    "CamCoder",
)


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class EnsembleConfig:
    approaches: tuple[tuple[str, int], ...]
    params: ClusterParams = field(default_factory=ClusterParams)
    rng_seed: int = 0

    def __post_init__(self):
        approaches = tuple((str(a), int(w)) for a, w in self.approaches)
        ids = [a for a, _ in approaches]
        dupes = sorted({a for a in ids if ids.count(a) > 1})
        if dupes:
            raise ConfigError(f"duplicate approach ids: {', '.join(dupes)}")
        for a, w in approaches:
            if w < 1:
                raise ConfigError(f"weight of {a!r} must be >= 1, got {w}")
        object.__setattr__(self, "approaches", approaches)

    @property
    def approach_ids(self) -> tuple[str, ...]:
        return tuple(a for a, _ in self.approaches)

    @property
    def weights(self) -> dict[str, int]:
        return dict(self.approaches)

    def without(self, approach_id: str) -> "EnsembleConfig":
        return replace(self, approaches=tuple(p for p in self.approaches if p[0] != approach_id))

    def with_params(self, eps_km: Optional[float] = None, min_pts: Optional[int] = None,
                    rng_seed: Optional[int] = None) -> "EnsembleConfig":
        params = ClusterParams(
            self.params.eps_km if eps_km is None else eps_km,
            self.params.min_pts if min_pts is None else min_pts,
        )
        return replace(self, params=params,
                       rng_seed=self.rng_seed if rng_seed is None else rng_seed)

    def to_dict(self) -> dict:
        return {
            "approaches": [{"id": a, "weight": w} for a, w in self.approaches],
            "eps_km": self.params.eps_km,
            "min_pts": self.params.min_pts,
            "rng_seed": self.rng_seed,
        }

    @classmethod
    def from_dict(cls, doc: Mapping) -> "EnsembleConfig":
        try:
            approaches = tuple((item["id"], item.get("weight", 1)) for item in doc["approaches"])
            params = ClusterParams(float(doc.get("eps_km", 10.0)), int(doc.get("min_pts", 2)))
        except (KeyError, TypeError, ValueError) as exc:
            raise ConfigError(f"bad ensemble config: {exc}") from None
        return cls(approaches, params, int(doc.get("rng_seed", 0)))


def load_config(path) -> EnsembleConfig:
    with open(path, encoding="utf-8") as fh:
        return EnsembleConfig.from_dict(json.load(fh))


def default_config() -> EnsembleConfig:
    """The seven-resolver weighted ensemble with eps=10 km, min_pts=2."""
    text = resources.files("geovote").joinpath("data/default_ensemble.json").read_text("utf-8")
    return EnsembleConfig.from_dict(json.loads(text))


def basic_config(approach_ids: Iterable[str], params: Optional[ClusterParams] = None,
                 rng_seed: int = 0) -> EnsembleConfig:
    """Equal-weight ensemble over the given approaches (the ablation baseline).

    Known resolvers keep their canonical order; anything else follows in the
    order given.
    """
    ids = list(dict.fromkeys(approach_ids))
    rank = {a: i for i, a in enumerate(KNOWN_APPROACHES)}
    known = sorted((a for a in ids if a in rank), key=rank.__getitem__)
    ordered = known + [a for a in ids if a not in rank]
    return EnsembleConfig(tuple((a, 1) for a in ordered), params or ClusterParams(), rng_seed)


@dataclass(frozen=True)
class Resolution:
    kind: str
    point: Optional[GeoPoint] = None
    provenance: Optional[str] = None
    winning_weight: int = 0

    def __post_init__(self):
        if (self.kind == RESOLVED) != (self.point is not None):
            raise ValueError("a resolved Resolution needs a point, an invalid one must not have one")

    @property
    def resolved(self) -> bool:
        return self.kind == RESOLVED

    @classmethod
    def invalid(cls) -> "Resolution":
        return cls(INVALID)

    @classmethod
    def from_prediction(cls, pred: Prediction) -> "Resolution":
        """Score a single resolver's output as if it were a system on its own."""
        if pred.point is None:
            return cls.invalid()
        return cls(RESOLVED, pred.point, FALLBACK_FIRST_VALID, 1)


def vote(estimates_by_approach: Mapping[str, Prediction], config: EnsembleConfig) -> Resolution:
    weights = config.weights
    unknown = [a for a in estimates_by_approach if a not in weights]
    if unknown:
        raise ConfigError(f"prediction from approach not in ensemble config: {unknown[0]!r}")

    estimates = []
    for approach_id, weight in config.approaches:
        pred = estimates_by_approach.get(approach_id)
        if pred is not None and pred.point is not None:
            estimates.append(WeightedEstimate(approach_id, pred.point, weight))
    if not estimates:
        return Resolution.invalid()

    winner = largest_cluster(dbscan_weighted(estimates, config.params), config.rng_seed)
    if winner is not None:
        centre = spherical_centroid([(m.point, m.weight) for m in winner.members])
        return Resolution(RESOLVED, centre.point, CLUSTER_CENTROID, winner.total_weight)
    first = estimates[0]
    return Resolution(RESOLVED, first.point, FALLBACK_FIRST_VALID, first.weight)


def resolve_corpus(corpus, predictions: Sequence[PredictionSet],
                   config: EnsembleConfig) -> dict[str, Resolution]:
    """Vote every mention of ``corpus``; uncovered mentions count as invalid."""
    by_approach: dict[str, PredictionSet] = {}
    for pset in predictions:
        if pset.approach_id in by_approach:
            raise ConfigError(f"duplicate prediction set for approach {pset.approach_id!r}")
        by_approach[pset.approach_id] = pset
    unknown = [a for a in by_approach if a not in config.weights]
    if unknown:
        raise ConfigError(f"prediction set for approach not in ensemble config: {unknown[0]!r}")

    out: dict[str, Resolution] = {}
    for mention in corpus.mentions:
        mid = mention.mention_id
        estimates = {a: ps.predictions[mid] for a, ps in by_approach.items() if mid in ps.predictions}
        out[mid] = vote(estimates, config)
    return out
