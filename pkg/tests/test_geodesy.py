import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from geovote.geodesy import MAX_ERROR_KM, GeoPoint, haversine_km, normalize_lon, spherical_centroid

lats = st.floats(-90, 90, allow_nan=False)
lons = st.floats(-180, 180, allow_nan=False)
points = st.builds(GeoPoint, lats, lons)


def test_geopoint_normalizes_longitude():
    assert GeoPoint(0, 180).lon == -180.0
    assert GeoPoint(0, -180).lon == -180.0
    assert GeoPoint(10, 190).lon == pytest.approx(-170.0)
    assert GeoPoint(10, -541).lon == pytest.approx(179.0)
    assert normalize_lon(179.5) == 179.5


@pytest.mark.parametrize("lat", [90.0001, -91, float("nan")])
def test_geopoint_rejects_bad_latitude(lat):
    with pytest.raises(ValueError):
        GeoPoint(lat, 0)


def test_haversine_examples(backend):
    # oracle: mpmath chord distance on the same sphere, 343.556060341... km
    paris, london = GeoPoint(48.8566, 2.3522), GeoPoint(51.5074, -0.1278)
    assert haversine_km(paris, london) == pytest.approx(343.6, abs=0.5)
    assert haversine_km(paris, london) == pytest.approx(343.5560603410417, abs=1e-9)
    assert haversine_km(paris, paris) == 0.0
    # 2*pi*6371/360
    assert haversine_km(GeoPoint(0, 0), GeoPoint(0, 1)) == pytest.approx(111.19, abs=0.05)
    assert haversine_km(GeoPoint(0, 0), GeoPoint(0, 1)) == pytest.approx(2 * math.pi * 6371 / 360, rel=1e-12)


def test_max_error_constant_exceeds_antipodal_distance():
    antipodal = haversine_km(GeoPoint(0, 0), GeoPoint(0, -180))
    assert MAX_ERROR_KM == 20039.0
    assert antipodal == pytest.approx(math.pi * 6371, rel=1e-12)
    assert antipodal < MAX_ERROR_KM


@given(points, points)
def test_haversine_symmetric_and_nonnegative(a, b):
    d = haversine_km(a, b)
    assert d == haversine_km(b, a)
    assert 0.0 <= d <= MAX_ERROR_KM


@given(points, points, points)
def test_triangle_inequality(a, b, c):
    assert haversine_km(a, c) <= haversine_km(a, b) + haversine_km(b, c) + 1e-6


@settings(max_examples=60)
@given(points, points)
def test_haversine_matches_chord_oracle(a, b):
    ref = float(oracles.chord_distance_km((a.lat, a.lon), (b.lat, b.lon)))
    # haversine loses relative precision only near antipodes (asin near 1)
    assert haversine_km(a, b) == pytest.approx(ref, abs=1e-6)


def test_centroid_examples(backend):
    p = GeoPoint(12.5, -33.25)
    assert spherical_centroid([(p, 4)]).point == p
    c = spherical_centroid([(GeoPoint(0, 0), 1), (GeoPoint(0, 10), 1)])
    assert c.point.lat == pytest.approx(0.0, abs=1e-9)
    assert c.point.lon == pytest.approx(5.0, abs=1e-9)
    assert not c.degenerate
    c = spherical_centroid([(GeoPoint(10, 20), 3), (GeoPoint(10.1, 20.1), 1)])
    # mpmath vector mean: (10.0250027997, 20.0249941959)
    assert c.point.lat == pytest.approx(10.025, abs=1e-3)
    assert c.point.lon == pytest.approx(20.025, abs=1e-3)
    assert c.point.lat == pytest.approx(10.025002799660597, abs=1e-9)
    assert c.point.lon == pytest.approx(20.024994195949699, abs=1e-9)


def test_centroid_across_antimeridian(backend):
    c = spherical_centroid([(GeoPoint(0, 179), 1), (GeoPoint(0, -179), 1)])
    assert abs(c.point.lon) == pytest.approx(180.0, abs=1e-9)


def test_centroid_degenerate_antipodes(backend):
    a, b = GeoPoint(0, 0.5), GeoPoint(0, -179.5)
    c = spherical_centroid([(a, 1), (b, 1)])
    assert c.degenerate
    assert c.point == a


def test_centroid_rejects_bad_input():
    with pytest.raises(ValueError):
        spherical_centroid([])
    with pytest.raises(ValueError):
        spherical_centroid([(GeoPoint(0, 1), 0)])


@given(points, st.integers(1, 20), st.integers(1, 5))
def test_centroid_of_copies_is_the_point(p, k, w):
    c = spherical_centroid([(p, w)] * k)
    if abs(p.lat) < 89.9:
        assert c.point.lat == pytest.approx(p.lat, abs=1e-9)
        assert math.isclose(c.point.lon, p.lon, abs_tol=1e-9) or \
            math.isclose(abs(c.point.lon - p.lon), 360.0, abs_tol=1e-9)
    else:
        assert haversine_km(c.point, p) < 1e-6


@settings(max_examples=100)
@given(st.lists(st.tuples(st.floats(-60, 60), st.floats(-30, 30), st.integers(1, 5)), min_size=1, max_size=8),
       st.integers(2, 7))
def test_centroid_weight_scaling_invariance(raw, k):
    pts = [(GeoPoint(a, b), w) for a, b, w in raw]
    c1 = spherical_centroid(pts)
    c2 = spherical_centroid([(p, w * k) for p, w in pts])
    if not c1.degenerate:
        assert haversine_km(c1.point, c2.point) < 1e-6
