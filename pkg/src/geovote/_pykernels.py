"""Pure-Python hot kernels.

Reference twin of ``_ckernels.pyx``; both expose the same four functions and
must agree to the last bit on identical inputs (the compiled one is only
faster). Coordinates are plain floats in degrees.
"""
from math import asin, atan2, cos, degrees, radians, sin, sqrt

EARTH_RADIUS_KM = 6371.0

_UNSEEN = -2
NOISE = -1


def haversine(lat1, lon1, lat2, lon2):
    phi1 = radians(lat1)
    phi2 = radians(lat2)
    s_phi = sin((phi2 - phi1) * 0.5)
    s_lam = sin(radians(lon2 - lon1) * 0.5)
    a = s_phi * s_phi + (cos(phi1) * cos(phi2)) * (s_lam * s_lam)
    if a > 1.0:
        a = 1.0
    return 2.0 * EARTH_RADIUS_KM * asin(sqrt(a))


def haversine_batch(lats1, lons1, lats2, lons2):
    return [haversine(a, b, c, d) for a, b, c, d in zip(lats1, lons1, lats2, lons2)]


def centroid(lats, lons, weights):
    """Weighted mean of unit vectors, returned as ``(lat, lon, degenerate)``."""
    n = len(lats)
    if n == 1:
        return float(lats[0]), float(lons[0]), False
    x = y = z = 0.0
    for i in range(n):
        phi = radians(lats[i])
        lam = radians(lons[i])
        w = float(weights[i])
        c = cos(phi)
        x += w * c * cos(lam)
        y += w * c * sin(lam)
        z += w * sin(phi)
    total = float(sum(weights))
    x /= total
    y /= total
    z /= total
    if sqrt(x * x + y * y + z * z) < 1e-12:
        return float(lats[0]), float(lons[0]), True
    return degrees(atan2(z, sqrt(x * x + y * y))), degrees(atan2(y, x)), False


def dbscan_labels(lats, lons, weights, eps_km, min_pts):
    """Weighted DBSCAN labels: cluster ids in discovery order, ``-1`` for noise.

    A point of weight ``w`` counts as ``w`` coincident points. Neighbourhoods
    are closed balls (``<= eps_km``) and contain the point itself.
    """
    n = len(lats)
    neighbours = [[] for _ in range(n)]
    for i in range(n):
        neighbours[i].append(i)
        for j in range(i + 1, n):
            if haversine(lats[i], lons[i], lats[j], lons[j]) <= eps_km:
                neighbours[i].append(j)
                neighbours[j].append(i)
    core = [sum(weights[j] for j in nb) >= min_pts for nb in neighbours]

    labels = [_UNSEEN] * n
    cluster = 0
    for i in range(n):
        if labels[i] != _UNSEEN:
            continue
        if not core[i]:
            labels[i] = NOISE
            continue
        labels[i] = cluster
        queue = [i]
        head = 0
        while head < len(queue):
            p = queue[head]
            head += 1
            for q in neighbours[p]:
                if labels[q] == NOISE:
                    labels[q] = cluster
                elif labels[q] == _UNSEEN:
                    labels[q] = cluster
                    if core[q]:
                        queue.append(q)
        cluster += 1
    return labels
