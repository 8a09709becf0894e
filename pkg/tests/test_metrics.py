import json
import math
import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

import oracles
from geovote.corpus import Corpus, Mention
from geovote.gazetteer import Gazetteer, GazetteerEntry
from geovote.geodesy import MAX_ERROR_KM, GeoPoint
from geovote.metrics import (MetricsReport, accuracy_at, auc_norm_log, error_distance, evaluate, macro_average,
                             mean_error, reports_to_csv, reports_to_json)
from geovote.voting import CLUSTER_CENTROID, RESOLVED, Resolution

UPPER = math.log(20040) / math.log(20039)
errors_st = st.lists(st.floats(0, MAX_ERROR_KM), min_size=1, max_size=200)


def resolved(lat, lon):
    return Resolution(RESOLVED, GeoPoint(lat, lon), CLUSTER_CENTROID, 1)


def test_error_distance(backend):
    gold = GeoPoint(0, 0.5)
    assert error_distance(Resolution.invalid(), gold) == 20039.0
    assert error_distance(None, gold) == 20039.0
    assert error_distance(resolved(0, 0.5), gold) == 0.0
    assert error_distance(resolved(0, 1.5), gold) == pytest.approx(111.19, abs=0.01)
    assert error_distance(resolved(0, -179.5), gold) < MAX_ERROR_KM


def test_accuracy_examples():
    assert accuracy_at([0, 160.9, 161, 1000]) == 0.5
    assert accuracy_at([0, 0, 0]) == 1.0
    assert accuracy_at([0, 160.9, 161, 1000], 161.0001) == 0.75
    with pytest.raises(ValueError):
        accuracy_at([])


def test_mean_error_examples():
    assert mean_error([0]) == 0
    assert mean_error([20039, 20039]) == 20039
    assert mean_error([100, 300]) == 200
    with pytest.raises(ValueError):
        mean_error([])


def test_auc_examples():
    assert auc_norm_log([0, 0, 0]) == 0.0
    assert auc_norm_log([20039.0]) == pytest.approx(UPPER, rel=1e-15)
    # mpmath, 40 digits: 1.0000050377839402, 0.50000251889197010
    assert auc_norm_log([20039.0]) == pytest.approx(1.0000050377839402, abs=1e-15)
    assert auc_norm_log([0, 20039.0]) == pytest.approx(0.5000025188919701, abs=1e-15)
    assert auc_norm_log([0, 20039.0], "trapezoid") == pytest.approx(0.5000025188919701, abs=1e-15)
    assert auc_norm_log([5.0], "trapezoid") == auc_norm_log([5.0])
    with pytest.raises(ValueError):
        auc_norm_log([1.0], "median")
    with pytest.raises(ValueError):
        auc_norm_log([])


def test_metrics_match_oracle_on_random_vectors():
    rng = random.Random(2024)
    for _ in range(200):
        n = rng.randint(1, 500)
        ev = [rng.choice([0.0, MAX_ERROR_KM, rng.uniform(0, 300), rng.uniform(0, MAX_ERROR_KM)]) for _ in range(n)]
        thr = rng.choice([161.0, 50.0, 1000.0])
        assert accuracy_at(ev, thr) == pytest.approx(float(oracles.accuracy(ev, thr)), rel=1e-9, abs=0)
        assert mean_error(ev) == pytest.approx(float(oracles.mean(ev)), rel=1e-9, abs=1e-300)
        assert auc_norm_log(ev) == pytest.approx(float(oracles.auc_mean(ev)), rel=1e-9, abs=1e-300)
        assert auc_norm_log(ev, "trapezoid") == pytest.approx(float(oracles.auc_trapezoid(ev)), rel=1e-9, abs=1e-300)


@given(errors_st, st.floats(0, 25000), st.floats(0, 25000))
def test_accuracy_monotone_in_threshold(ev, t1, t2):
    lo, hi = sorted((t1, t2))
    assert accuracy_at(ev, lo) <= accuracy_at(ev, hi)


@given(errors_st, st.randoms())
def test_permutation_invariance(ev, rnd):
    shuffled = ev[:]
    rnd.shuffle(shuffled)
    assert mean_error(shuffled) == mean_error(ev)
    assert auc_norm_log(shuffled) == auc_norm_log(ev)
    assert auc_norm_log(shuffled, "trapezoid") == auc_norm_log(ev, "trapezoid")


@given(errors_st)
def test_auc_bounds(ev):
    a = auc_norm_log(ev)
    assert 0.0 <= a <= UPPER + 1e-15
    t = auc_norm_log(ev, "trapezoid")
    top = max(math.log1p(x) for x in ev) / math.log(20039)
    assert abs(a - t) <= top / len(ev) + 1e-12


def _corpus(golds, surfaces=None, ids=None):
    surfaces = surfaces or ["X"] * len(golds)
    ids = ids or [None] * len(golds)
    return Corpus("ds", [Mention(f"m{i}", "d", s, 0, len(s), GeoPoint(*g), gid)
                         for i, (g, s, gid) in enumerate(zip(golds, surfaces, ids))])


def test_evaluate_exact_hit():
    corpus = _corpus([(10, 10)])
    rep = evaluate({"m0": resolved(10, 10)}, corpus)
    assert (rep.n, rep.accuracy, rep.mean_error_km, rep.auc) == (1, 1.0, 0.0, 0.0)


def test_evaluate_all_invalid():
    corpus = _corpus([(1, 1), (2, 2), (3, 3)])
    rep = evaluate({"m0": Resolution.invalid()}, corpus)
    assert rep.accuracy == 0.0
    assert rep.mean_error_km == 20039.0
    assert rep.auc == pytest.approx(UPPER, abs=1e-6)


def test_evaluate_per_category():
    gaz = Gazetteer.from_entries([GazetteerEntry(7, "Berlin", "Berlin", GeoPoint(52.5, 13.4), "P")])
    corpus = _corpus([(52.5, 13.4), (51.5, -0.1), (30, -94)], ["Berlin", "High Street", "Hope Creek"], [7, None, None])
    res = {"m0": resolved(52.5, 13.4), "m1": resolved(40, 40)}
    rep = evaluate(res, corpus, gaz)
    assert rep.per_category == {"AdminUnit": (1, 1.0), "NaturalFeature": (1, 0.0), "TrafficWay": (1, 0.0)}
    assert evaluate(res, corpus, gaz, per_category=False).per_category == {}
    with pytest.raises(ValueError):
        evaluate(res, corpus, auc_mode="median")


def _report(system, acc, me=100.0, auc=0.3, dataset="d"):
    return MetricsReport(system, dataset, 10, acc, me, auc, per_category={"POI": (2, acc)})


def test_macro_average():
    r = _report("voting", 0.8)
    single = macro_average([r])
    assert (single.accuracy, single.mean_error_km, single.auc, single.n) == (0.8, 100.0, 0.3, 10)
    both = macro_average([_report("voting", 0.8, 100, 0.2), _report("voting", 0.9, 300, 0.4)])
    assert both.accuracy == pytest.approx(0.85)
    assert both.mean_error_km == pytest.approx(200)
    assert both.auc == pytest.approx(0.3)
    assert both.per_category["POI"] == (4, pytest.approx(0.85))
    assert both.dataset == "macro"
    with pytest.raises(ValueError):
        macro_average([_report("a", 1), _report("b", 1)])
    with pytest.raises(ValueError):
        macro_average([])


def test_emission_is_stable():
    reps = [_report("voting", 0.8), _report("GENRE", 0.7)]
    head = {"auc_mode": "trapezoid", "threshold_km": 161.0}
    text = reports_to_csv(reps, head)
    lines = text.splitlines()
    assert lines[0] == "# auc_mode=trapezoid threshold_km=161.0"
    assert lines[1] == "system,dataset,metric,value"
    assert lines[2:6] == ["voting,d,n,10", "voting,d,accuracy_at_161,0.800000", "voting,d,mean_error_km,100.000000",
                          "voting,d,auc,0.300000"]
    assert "voting,d,accuracy_at_161[POI],0.800000" in lines
    assert "[POI]" not in reports_to_csv(reps, head, with_categories=False)
    doc = json.loads(reports_to_json(reps, head))
    assert doc["header"]["auc_mode"] == "trapezoid"
    assert [r["system"] for r in doc["reports"]] == ["voting", "GENRE"]
    assert list(doc["reports"][0]) == ["system", "dataset", "n", "accuracy_at_161", "mean_error_km", "auc",
                                       "per_category"]
    assert reports_to_csv(reps, head) == text
