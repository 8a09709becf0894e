# cython: language_level=3
"""Compiled hot kernels; same API and results as ``_pykernels``."""
from libc.math cimport asin, atan2, cos, sin, sqrt, M_PI
from libc.stdlib cimport malloc, free

cdef double EARTH_RADIUS_KM = 6371.0
cdef double DEG = M_PI / 180.0
cdef double RAD2DEG = 180.0 / M_PI
cdef int UNSEEN = -2
cdef int NOISE = -1


cdef inline double _rad(double d) nogil:
    return d * DEG


cdef inline double _hav(double lat1, double lon1, double lat2, double lon2) nogil:
    cdef double phi1 = _rad(lat1)
    cdef double phi2 = _rad(lat2)
    cdef double s_phi = sin((phi2 - phi1) * 0.5)
    cdef double s_lam = sin(_rad(lon2 - lon1) * 0.5)
    cdef double a = s_phi * s_phi + (cos(phi1) * cos(phi2)) * (s_lam * s_lam)
    if a > 1.0:
        a = 1.0
    return 2.0 * EARTH_RADIUS_KM * asin(sqrt(a))


def haversine(double lat1, double lon1, double lat2, double lon2):
    return _hav(lat1, lon1, lat2, lon2)


def haversine_batch(lats1, lons1, lats2, lons2):
    cdef Py_ssize_t n = min(len(lats1), len(lons1), len(lats2), len(lons2))
    cdef Py_ssize_t i
    out = [0.0] * n
    for i in range(n):
        out[i] = _hav(lats1[i], lons1[i], lats2[i], lons2[i])
    return out


def centroid(lats, lons, weights):
    cdef Py_ssize_t n = len(lats)
    cdef Py_ssize_t i
    cdef double x = 0.0, y = 0.0, z = 0.0, w, c, phi, lam, total = 0.0
    if n == 1:
        return float(lats[0]), float(lons[0]), False
    for i in range(n):
        phi = _rad(lats[i])
        lam = _rad(lons[i])
        w = weights[i]
        c = cos(phi)
        x += w * c * cos(lam)
        y += w * c * sin(lam)
        z += w * sin(phi)
        total += w
    x /= total
    y /= total
    z /= total
    if sqrt(x * x + y * y + z * z) < 1e-12:
        return float(lats[0]), float(lons[0]), True
    return atan2(z, sqrt(x * x + y * y)) * RAD2DEG, atan2(y, x) * RAD2DEG, False


def dbscan_labels(lats, lons, weights, double eps_km, long min_pts):
    cdef Py_ssize_t n = len(lats)
    cdef Py_ssize_t i, j, p, q, head, tail
    cdef int cluster = 0
    cdef long acc
    if n == 0:
        return []
    cdef double *la = <double *> malloc(n * sizeof(double))
    cdef double *lo = <double *> malloc(n * sizeof(double))
    cdef long *wt = <long *> malloc(n * sizeof(long))
    cdef char *adj = <char *> malloc(n * n * sizeof(char))
    cdef char *core = <char *> malloc(n * sizeof(char))
    cdef int *labels = <int *> malloc(n * sizeof(int))
    cdef Py_ssize_t *queue = <Py_ssize_t *> malloc(n * sizeof(Py_ssize_t))
    if not (la and lo and wt and adj and core and labels and queue):
        free(la); free(lo); free(wt); free(adj); free(core); free(labels); free(queue)
        raise MemoryError()
    try:
        for i in range(n):
            la[i] = lats[i]
            lo[i] = lons[i]
            wt[i] = weights[i]
        for i in range(n):
            adj[i * n + i] = 1
            for j in range(i + 1, n):
                if _hav(la[i], lo[i], la[j], lo[j]) <= eps_km:
                    adj[i * n + j] = 1
                    adj[j * n + i] = 1
                else:
                    adj[i * n + j] = 0
                    adj[j * n + i] = 0
        for i in range(n):
            acc = 0
            for j in range(n):
                if adj[i * n + j]:
                    acc += wt[j]
            core[i] = acc >= min_pts
            labels[i] = UNSEEN

        for i in range(n):
            if labels[i] != UNSEEN:
                continue
            if not core[i]:
                labels[i] = NOISE
                continue
            labels[i] = cluster
            queue[0] = i
            head = 0
            tail = 1
            while head < tail:
                p = queue[head]
                head += 1
                for q in range(n):
                    if not adj[p * n + q]:
                        continue
                    if labels[q] == NOISE:
                        labels[q] = cluster
                    elif labels[q] == UNSEEN:
                        labels[q] = cluster
                        if core[q]:
                            queue[tail] = q
                            tail += 1
            cluster += 1
        return [labels[i] for i in range(n)]
    finally:
        free(la); free(lo); free(wt); free(adj); free(core); free(labels); free(queue)
