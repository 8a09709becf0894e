"""Compare the compiled and pure-Python kernel backends.

    python benchmarks/bench_kernels.py [--repeat 5]

Times the raw kernels on random inputs and a full vote over the bundled
200-mention test fixture, once per importable backend.
"""
import argparse
import glob
import math
import os
import random
import timeit

from geovote import kernels
from geovote.corpus import parse_mentions_jsonl
from geovote.predictions import load_predictions
from geovote.voting import default_config, resolve_corpus

FIXTURE = os.path.join(os.path.dirname(__file__), os.pardir, "tests", "fixtures", "voting200")
SWAPPED = ("haversine", "haversine_batch", "centroid", "dbscan_labels")


def scatter(rng, n, spread_km=30.0):
    lat0, lon0 = rng.uniform(-60, 60), rng.uniform(-180, 180)
    lats = [lat0 + rng.uniform(-spread_km, spread_km) / 111.2 for _ in range(n)]
    lons = [lon0 + rng.uniform(-spread_km, spread_km) / (111.2 * math.cos(math.radians(lat0))) for _ in range(n)]
    return lats, lons, [rng.randint(1, 3) for _ in range(n)]


def workloads():
    rng = random.Random(0)
    small = [scatter(rng, 7) for _ in range(1000)]
    big = scatter(rng, 400)
    corpus = parse_mentions_jsonl(os.path.join(FIXTURE, "mentions.jsonl"), "voting200")
    psets = [load_predictions(p) for p in sorted(glob.glob(os.path.join(FIXTURE, "*__voting200.jsonl")))]
    cfg = default_config()

    def dbscan_small():
        for lats, lons, ws in small:
            kernels.dbscan_labels(lats, lons, ws, 10.0, 2)

    def dbscan_400():
        kernels.dbscan_labels(*big, 10.0, 2)

    def haversine_batch_400():
        kernels.haversine_batch(big[0], big[1], big[0][::-1], big[1][::-1])

    def centroid_small():
        for lats, lons, ws in small:
            kernels.centroid(lats, lons, ws)

    def vote_fixture():
        resolve_corpus(corpus, psets, cfg)

    return {
        "dbscan 1000 x 7 pts": dbscan_small,
        "dbscan 1 x 400 pts": dbscan_400,
        "haversine_batch 400": haversine_batch_400,
        "centroid 1000 x 7 pts": centroid_small,
        "vote 200-mention fixture": vote_fixture,
    }


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args(argv)

    backends = kernels.available_backends()
    jobs = workloads()
    saved = {n: getattr(kernels, n) for n in SWAPPED}
    timings: dict[str, dict[str, float]] = {}
    try:
        for name, impl in sorted(backends.items()):
            for n in SWAPPED:
                setattr(kernels, n, getattr(impl, n))
            for label, fn in jobs.items():
                timings.setdefault(label, {})[name] = min(timeit.repeat(fn, number=1, repeat=args.repeat))
    finally:
        for n, f in saved.items():
            setattr(kernels, n, f)

    names = sorted(backends)
    print(f"{'workload':<28}" + "".join(f"{n:>12}" for n in names) + ("     speedup" if len(names) > 1 else ""))
    for label, row in timings.items():
        line = f"{label:<28}" + "".join(f"{row[n] * 1e3:>10.2f}ms" for n in names)
        if "cython" in row and "python" in row:
            line += f"{row['python'] / row['cython']:>11.1f}x"
        print(line)
    if len(names) == 1:
        print("(compiled extension not importable; only the Python backend was timed)")


if __name__ == "__main__":
    main()
