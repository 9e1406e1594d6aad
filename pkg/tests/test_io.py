import numpy as np
from hypothesis import given, strategies as st

from rydconv import io


def test_csv_round_trip_exact(tmp_path):
    x = np.random.default_rng(1).normal(size=20) * 1e-9
    p = tmp_path / "t.csv"
    io.write_csv(p, ["x", "label"], zip(x, ["a"] * 20))
    header, cols = io.read_csv(p)
    assert header == ["x", "label"]
    assert np.array_equal(cols["x"], x)
    assert cols["label"] == ["a"] * 20
    assert p.read_bytes().startswith(b"x,label\n")


def test_csv_blank_is_nan(tmp_path):
    p = tmp_path / "t.csv"
    io.write_csv(p, ["a", "b"], [(1.0, None)])
    assert np.isnan(io.read_csv(p)[1]["b"][0])


def test_json_numpy_and_sorted(tmp_path):
    p = tmp_path / "r.json"
    io.write_json(p, {"b": np.float64(1.5), "a": np.arange(3), "c": float("inf")})
    text = p.read_text()
    assert text.index('"a"') < text.index('"b"')
    assert io.read_json(p) == {"a": [0, 1, 2], "b": 1.5, "c": "inf"}


@given(st.lists(st.integers(0, 10**13), min_size=1, max_size=50, unique=True))
def test_timetags_binary_round_trip(ps_ticks):
    import tempfile, os
    t = np.sort(np.array(ps_ticks)) * 1e-12
    with tempfile.TemporaryDirectory() as d:
        p = os.path.join(d, "t.bin")
        io.write_timetags_binary(p, t)
        back = io.read_timetags_binary(p)
        assert os.path.getsize(p) == 8 * t.size
    assert np.array_equal(np.round(back * 1e12), np.round(t * 1e12))


def test_timetags_csv(tmp_path):
    t = np.array([1e-9, 2.5e-6, 0.01])
    io.write_timetags_csv(tmp_path / "t.csv", t)
    assert np.array_equal(io.read_timetags_csv(tmp_path / "t.csv"), t)
