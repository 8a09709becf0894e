"""Coordinates on the sphere, great-circle distance and weighted centroids."""
from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple, Sequence

from . import kernels

EARTH_RADIUS_KM = kernels.EARTH_RADIUS_KM

# Scoring penalty for an unresolved toponym (half the Earth's circumference by
# convention). Deliberately not 2*pi*R/2: haversine tops out near 20,015 km.
MAX_ERROR_KM = 20039.0


def normalize_lon(lon: float) -> float:
    """Wrap a longitude into [-180, 180)."""
    if -180.0 <= lon < 180.0:
        return float(lon)
    wrapped = (lon + 180.0) % 360.0 - 180.0
    return -180.0 if wrapped >= 180.0 else wrapped


@dataclass(frozen=True)
class GeoPoint:
    lat: float
    lon: float

    def __post_init__(self):
        lat = float(self.lat)
        lon = float(self.lon)
        if not -90.0 <= lat <= 90.0:
            raise ValueError(f"latitude out of range: {lat}")
        if lon != lon or lon in (float("inf"), float("-inf")):
            raise ValueError(f"longitude is not finite: {lon}")
        object.__setattr__(self, "lat", lat)
        object.__setattr__(self, "lon", normalize_lon(lon))

    @staticmethod
    def in_range(lat: float, lon: float) -> bool:
        """True when (lat, lon) is a valid raw coordinate pair (lon in [-180, 180])."""
        try:
            return -90.0 <= float(lat) <= 90.0 and -180.0 <= float(lon) <= 180.0
        except (TypeError, ValueError):
            return False


def haversine_km(a: GeoPoint, b: GeoPoint) -> float:
    """Great-circle distance in km on a sphere of radius 6371 km."""
    return kernels.haversine(a.lat, a.lon, b.lat, b.lon)


class Centroid(NamedTuple):
    point: GeoPoint
    degenerate: bool


def spherical_centroid(points: Sequence[tuple[GeoPoint, int]]) -> Centroid:
    """Weighted mean direction of ``(point, weight)`` pairs.

    If the weighted vectors cancel out (norm below 1e-12) the first point is
    returned and ``degenerate`` is set.
    """
    if not points:
        raise ValueError("spherical_centroid needs at least one point")
    lats, lons, weights = [], [], []
    for p, w in points:
        if w < 1:
            raise ValueError(f"weights must be >= 1, got {w}")
        lats.append(p.lat)
        lons.append(p.lon)
        weights.append(int(w))
    lat, lon, degenerate = kernels.centroid(lats, lons, weights)
    lat = min(90.0, max(-90.0, lat))
    return Centroid(GeoPoint(lat, lon), bool(degenerate))
