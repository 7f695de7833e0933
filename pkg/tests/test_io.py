import csv
import json
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from fucikwave import __version__, io
from fucikwave.curves import Region


@given(st.floats(allow_nan=False, allow_infinity=False))
def test_floats_round_trip_exactly(x):
    assert json.loads(io.dumps({"x": x}))["x"] == x


def test_non_finite_become_null():
    data = json.loads(io.dumps([math.nan, math.inf, -math.inf, 1.5]))
    assert data == [None, None, None, 1.5]


def test_numpy_and_enum_values():
    text = io.dumps({"a": np.float64(0.1), "b": np.int64(3), "c": np.array([1.0, 2.0]),
                     "d": Region.ON_C, "e": np.bool_(True), "f": (1, "x"), "g": {}})
    data = json.loads(text)
    assert data == {"a": 0.1, "b": 3, "c": [1.0, 2.0], "d": "ON_C", "e": True,
                    "f": [1, "x"], "g": {}}
    assert "0.10000000000000001" in text


def test_unsupported_type():
    with pytest.raises(TypeError):
        io.dumps({"x": object()})


def test_key_order_is_preserved():
    text = io.dumps({"z": 1, "a": 2})
    assert text.index('"z"') < text.index('"a"')


def test_envelope_and_files(tmp_path):
    art = io.envelope("demo", {"k": 1}, 7, {"value": 0.25})
    assert art["tool"] == io.TOOL and art["version"] == __version__ and art["seed"] == 7
    path = io.write_json(tmp_path / "sub" / "a.json", art)
    assert io.read_json(path) == json.loads(io.dumps(art))
    assert path.read_text().endswith("\n")


def test_csv_format(tmp_path):
    path = io.write_csv(tmp_path / "c.csv", ("r", "x", "flag"),
                        [(1.0, 0.1, Region.BELOW_C), (2.0, math.nan, "ok")])
    rows = list(csv.reader(path.open()))
    assert rows[0] == ["r", "x", "flag"]
    assert rows[1] == ["1", "0.10000000000000001", "BELOW_C"]
    assert rows[2][1] == "nan"
