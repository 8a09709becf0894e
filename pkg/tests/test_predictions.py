import json

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from geovote.geodesy import GeoPoint
from geovote.predictions import (Prediction, PredictionFormatError, PredictionSet, load_predictions,
                                 normalize_invalid, split_prediction_filename, write_predictions)


def write_lines(path, lines):
    path.write_text("".join(line + "\n" for line in lines), encoding="utf-8")
    return path


@pytest.mark.parametrize("raw,valid", [
    ({"mention_id": "m", "lat": 0, "lon": 0}, False),
    ({"mention_id": "m", "lat": 0.0, "lon": -0.0}, False),
    ({"mention_id": "m", "lat": 0.0001, "lon": 0}, True),
    ({"mention_id": "m", "lat": 95, "lon": 0}, False),
    ({"mention_id": "m", "lat": 10, "lon": 180.5}, False),
    ({"mention_id": "m", "lat": 10, "lon": 180}, True),
    ({"mention_id": "m", "invalid": True, "lat": 10, "lon": 10}, False),
    ({"mention_id": "m", "lat": None, "lon": 3}, False),
    ({"mention_id": "m", "lat": "abc", "lon": 3}, False),
    ({"mention_id": "m"}, False),
])
def test_normalize_invalid(raw, valid):
    pred = normalize_invalid(raw)
    assert pred.valid is valid
    assert pred.kind == ("valid" if valid else "invalid")


def test_normalized_longitude():
    assert normalize_invalid({"mention_id": 1, "lat": 10, "lon": 180}).point == GeoPoint(10, -180)
    assert normalize_invalid({"mention_id": 1, "lat": 10, "lon": 180}).mention_id == "1"


def test_prediction_refuses_sentinel():
    with pytest.raises(ValueError):
        Prediction("m", GeoPoint(0, 0))


def test_load_three_valid(tmp_path):
    p = write_lines(tmp_path / "GENRE__x.jsonl", [
        "# produced by an adapter",
        json.dumps({"approach": "GENRE", "mention_id": "a", "lat": 1, "lon": 2}),
        json.dumps({"approach": "GENRE", "mention_id": "b", "lat": 3, "lon": 4}),
        "",
        json.dumps({"approach": "GENRE", "mention_id": "c", "lat": 5, "lon": 6}),
    ])
    ps = load_predictions(p)
    assert ps.approach_id == "GENRE"
    assert len(ps) == 3
    assert list(ps.predictions) == ["a", "b", "c"]


def test_sentinel_record_stored_invalid(tmp_path):
    p = write_lines(tmp_path / "p.jsonl", [json.dumps({"approach": "X", "mention_id": "a", "lat": 0, "lon": 0})])
    assert not load_predictions(p).predictions["a"].valid


def test_header_only_file_is_error(tmp_path):
    p = write_lines(tmp_path / "p.jsonl", ["# nothing yet"])
    with pytest.raises(PredictionFormatError, match="approach id unknown"):
        load_predictions(p)


def test_mixed_approaches_error(tmp_path):
    p = write_lines(tmp_path / "p.jsonl", [
        json.dumps({"approach": "X", "mention_id": "a", "lat": 1, "lon": 1}),
        json.dumps({"approach": "Y", "mention_id": "b", "lat": 1, "lon": 1}),
    ])
    with pytest.raises(PredictionFormatError, match=":2:"):
        load_predictions(p)


def test_duplicate_mention_error_names_line(tmp_path):
    p = write_lines(tmp_path / "p.jsonl", [
        json.dumps({"approach": "X", "mention_id": "a", "lat": 1, "lon": 1}),
        json.dumps({"approach": "X", "mention_id": "b", "invalid": True}),
        json.dumps({"approach": "X", "mention_id": "a", "lat": 2, "lon": 2}),
    ])
    with pytest.raises(PredictionFormatError, match=r"p\.jsonl:3: duplicate mention_id 'a'"):
        load_predictions(p)


def test_missing_field_and_bad_json(tmp_path):
    with pytest.raises(PredictionFormatError, match="mention_id"):
        load_predictions(write_lines(tmp_path / "a.jsonl", ['{"approach": "X", "lat": 1, "lon": 1}']))
    with pytest.raises(PredictionFormatError, match="invalid JSON"):
        load_predictions(write_lines(tmp_path / "b.jsonl", ['{"approach": ']))


def test_uncovered_mention_is_invalid():
    ps = PredictionSet("X", {"a": Prediction("a", GeoPoint(1, 1))})
    assert ps.get("a").valid
    assert not ps.get("zzz").valid


def test_filename_convention():
    assert split_prediction_filename("/d/GENRE__lgl.jsonl") == ("GENRE", "lgl")
    assert split_prediction_filename("BLINK.jsonl") == ("BLINK", None)


raw_records = st.lists(
    st.one_of(
        st.tuples(st.floats(-90, 90), st.floats(-180, 180)),
        st.just((0.0, 0.0)),
        st.just(None),
    ),
    max_size=30,
)


@settings(max_examples=100)
@given(raw_records)
def test_round_trip(tmp_path_factory, raws):
    tmp = tmp_path_factory.mktemp("rt")
    src = tmp / "src.jsonl"
    lines = []
    for i, r in enumerate(raws):
        rec = {"approach": "A", "mention_id": f"m{i}"}
        if r is None:
            rec["invalid"] = True
        else:
            rec["lat"], rec["lon"] = r
        lines.append(json.dumps(rec))
    lines.append(json.dumps({"approach": "A", "mention_id": "last", "lat": 1.5, "lon": 2.5}))
    first = load_predictions(write_lines(src, lines))
    write_predictions(first, tmp / "out.jsonl")
    second = load_predictions(tmp / "out.jsonl")
    assert second == first
    assert all(p.point != GeoPoint(0, 0) for p in second.predictions.values())
