"""Weighted DBSCAN over geographic estimates.

An estimate with weight ``w`` behaves exactly like ``w`` coincident points:
weights are summed when testing the core-point condition instead of
materialising replicas.
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Optional, Sequence

from . import kernels
from .geodesy import GeoPoint


@dataclass(frozen=True)
class WeightedEstimate:
    approach_id: str
    point: GeoPoint
    weight: int = 1

    def __post_init__(self):
        if int(self.weight) != self.weight or self.weight < 1:
            raise ValueError(f"weight must be a positive integer, got {self.weight!r}")


@dataclass(frozen=True)
class ClusterParams:
    eps_km: float = 10.0
    min_pts: int = 2

    def __post_init__(self):
        if not self.eps_km > 0:
            raise ValueError(f"eps_km must be positive, got {self.eps_km}")
        if int(self.min_pts) != self.min_pts or self.min_pts < 1:
            raise ValueError(f"min_pts must be a positive integer, got {self.min_pts}")


@dataclass(frozen=True)
class Cluster:
    members: tuple[WeightedEstimate, ...]
    total_weight: int = field(init=False)

    def __post_init__(self):
        if not self.members:
            raise ValueError("a cluster needs at least one member")
        object.__setattr__(self, "total_weight", sum(m.weight for m in self.members))

    @property
    def approach_ids(self) -> frozenset:
        return frozenset(m.approach_id for m in self.members)


def dbscan_weighted(estimates: Sequence[WeightedEstimate], params: ClusterParams) -> list[Cluster]:
    """Cluster estimates; noise estimates are left out of every cluster.

    Clusters come back in discovery order (by their first core estimate in
    input order). A border estimate reachable from two clusters joins the one
    discovered first.
    """
    if not estimates:
        return []
    labels = kernels.dbscan_labels(
        [e.point.lat for e in estimates],
        [e.point.lon for e in estimates],
        [e.weight for e in estimates],
        float(params.eps_km),
        int(params.min_pts),
    )
    groups: dict[int, list[WeightedEstimate]] = {}
    for est, label in zip(estimates, labels):
        if label != kernels.NOISE:
            groups.setdefault(label, []).append(est)
    return [Cluster(tuple(groups[k])) for k in sorted(groups)]


def largest_cluster(clusters: Sequence[Cluster], rng_seed: int = 0) -> Optional[Cluster]:
    """Heaviest cluster; equal-weight ties are broken by a generator seeded with ``rng_seed``."""
    if not clusters:
        return None
    best = max(c.total_weight for c in clusters)
    tied = [c for c in clusters if c.total_weight == best]
    if len(tied) == 1:
        return tied[0]
    return random.Random(rng_seed).choice(tied)
