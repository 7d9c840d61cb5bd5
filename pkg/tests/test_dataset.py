import csv

import numpy as np
import pytest

from tab2img.dataset import (
    BINARY,
    CATEGORICAL,
    NUMERICAL,
    DatasetError,
    ingest,
    normalize,
    split,
    undersample,
    write_normalized_csv,
)


def _write(path, header, rows):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        w.writerows(rows)
    return path


@pytest.fixture
def toy(tmp_path):
    return _write(
        tmp_path / "toy.csv",
        ["size", "flag", "color", "grade", "y"],
        [
            ["1.5", "t", "red", "3", "a"],
            ["2.5", "f", "green", "1", "b"],
            ["?", "t", "blue", "2", "a"],
            ["4.0", "t", "red", "3", "b"],
            ["0.5", "f", "red", "", "a"],
            ["3.0", "t", "green", "1", "b"],
        ],
    )


def test_kind_inference(toy):
    ds = ingest(toy, "y")
    kinds = {n: k.kind for n, k in zip(ds.feature_names, ds.kinds)}
    assert kinds == {
        "size": NUMERICAL,
        "flag": BINARY,
        "color": CATEGORICAL,
        "grade": CATEGORICAL,   # integers, few distinct values
    }
    assert ds.classes == ("a", "b")
    assert ds.n_samples == 6


def test_float_column_stays_numerical(tmp_path):
    rows = [[f"{0.37 * i + 0.11:.3f}", "x" if i % 2 else "y"] for i in range(40)]
    ds = ingest(_write(tmp_path / "f.csv", ["v", "y"], rows), "y")
    assert ds.kinds[0].kind == NUMERICAL


def test_integer_column_with_many_values_is_numerical(tmp_path):
    rows = [[str(i), "x" if i % 2 else "y"] for i in range(60)]
    ds = ingest(_write(tmp_path / "i.csv", ["v", "y"], rows), "y")
    # 60 distinct integers > max(10, 3) -> not treated as levels
    assert ds.kinds[0].kind == NUMERICAL


def test_missing_imputation(toy):
    ds = ingest(toy, "y")
    size = ds.columns[ds.feature_index("size")]
    # median of observed {1.5, 2.5, 4.0, 0.5, 3.0} = 2.5
    assert size[2] == pytest.approx(2.5)
    grade = ds.columns[ds.feature_index("grade")]
    # modes are "1" and "3" (two each); lexicographic tie-break keeps "1"
    assert grade[4] == "1"
    assert ds.missing_mask[2, ds.feature_index("size")]
    assert ds.missing_mask[4, ds.feature_index("grade")]
    assert int(ds.missing_mask.sum()) == 2


def test_ingest_errors(tmp_path):
    p = _write(tmp_path / "bad.csv", ["a", "y"], [["1", "x"], ["2"]])
    with pytest.raises(DatasetError, match="row 3"):
        ingest(p, "y")
    p2 = _write(tmp_path / "nolabel.csv", ["a", "y"], [["1", "x"]])
    with pytest.raises(DatasetError, match="no column named"):
        ingest(p2, "z")
    p3 = _write(tmp_path / "misslabel.csv", ["a", "y"], [["1", "?"]])
    with pytest.raises(DatasetError, match="label"):
        ingest(p3, "y")
    p4 = _write(tmp_path / "empty.csv", ["a", "y"], [])
    with pytest.raises(DatasetError, match="no data rows"):
        ingest(p4, "y")
    p5 = _write(tmp_path / "hole.csv", ["a", "y"], [["?", "x"], ["", "x"]])
    with pytest.raises(DatasetError, match="no observed values"):
        ingest(p5, "y")


def test_constant_column_rules(tmp_path):
    p = _write(tmp_path / "c.csv", ["k", "y"], [["5.0", "x"], ["5.0", "z"]])
    ds = ingest(p, "y")
    assert ds.kinds[0].kind == NUMERICAL
    p2 = _write(tmp_path / "c2.csv", ["k", "y"], [["abc", "x"], ["abc", "z"]])
    with pytest.raises(DatasetError, match="constant and non-numeric"):
        ingest(p2, "y")


def test_schema_overrides(tmp_path):
    p = _write(tmp_path / "s.csv", ["g", "y"],
               [["1", "x"], ["2", "z"], ["3", "x"], ["2", "z"]])
    assert ingest(p, "y").kinds[0].kind == CATEGORICAL
    ds = ingest(p, "y", schema={"g": NUMERICAL})
    assert ds.kinds[0].kind == NUMERICAL
    with pytest.raises(DatasetError, match="declared binary"):
        ingest(p, "y", schema={"g": BINARY})
    with pytest.raises(DatasetError, match="unknown kind"):
        ingest(p, "y", schema={"g": "ordinal"})


def test_schema_categorical_needs_three_levels(tmp_path):
    p = _write(tmp_path / "two.csv", ["g", "y"],
               [["a", "x"], ["b", "z"], ["a", "x"]])
    with pytest.raises(DatasetError, match="declared categorical"):
        ingest(p, "y", schema={"g": CATEGORICAL})


def test_normalize_ranges(toy):
    ds = ingest(toy, "y")
    norm, spec = normalize(ds)
    for col in norm.columns:
        assert float(np.min(col)) >= 0.0 and float(np.max(col)) <= 1.0
    size = norm.columns[ds.feature_index("size")]
    assert size.min() == 0.0 and size.max() == 1.0
    assert spec.numeric["size"] == (0.5, 4.0)
    flag = norm.columns[ds.feature_index("flag")]
    assert set(flag.tolist()) == {0.0, 1.0}
    assert spec.codes["flag"] == {"f": 0.0, "t": 1.0}
    # red(3) > green(2) > blue(1) by frequency -> codes 0, 1/2, 1
    assert spec.codes["color"] == {"red": 0.0, "green": 0.5, "blue": 1.0}


def test_normalize_constant_numerical_hits_half(tmp_path):
    p = _write(tmp_path / "c.csv", ["k", "v", "y"],
               [["5.0", "1.0", "x"], ["5.0", "2.0", "z"]])
    norm, _ = normalize(ingest(p, "y"))
    assert norm.columns[0].tolist() == [0.5, 0.5]


def test_normalize_fit_indices_clip_and_code(tmp_path):
    p = _write(tmp_path / "fit.csv", ["v", "c", "y"],
               [["0.5", "a", "x"], ["1.5", "a", "x"], ["2.5", "b", "z"],
                ["10.5", "c", "z"]])
    ds = ingest(p, "y")
    norm, spec = normalize(ds, fit_indices=[0, 1, 2])
    v = norm.columns[0]
    assert spec.numeric["v"] == (0.5, 2.5)
    assert v[3] == 1.0                      # clipped into the fit range
    # level "c" absent from fit rows still gets a trailing code
    assert spec.codes["c"]["c"] == 1.0
    assert set(spec.codes["c"]) == {"a", "b", "c"}


def test_undersample_balances_classes(datasets):
    ds = undersample(datasets("hepatitis"), seed=3)
    counts = ds.class_counts()
    assert set(counts.values()) == {32}
    again = undersample(datasets("hepatitis"), seed=3)
    assert again.labels.tolist() == ds.labels.tolist()


def test_split_stratified(datasets):
    ds = datasets("tae")
    pairs = split(ds, 0.7, 3, seed=5)
    assert len(pairs) == 3
    train, test = pairs[0]
    assert sorted(train + test) == list(range(ds.n_samples))
    assert not set(train) & set(test)
    for cls, count in ds.class_counts().items():
        in_train = sum(1 for i in train if ds.labels[i] == cls)
        assert in_train == round(0.7 * count)
    assert split(ds, 0.7, 3, seed=5)[1] == pairs[1]
    assert pairs[0] != pairs[1]


def test_split_clamps_small_classes(tmp_path):
    p = _write(tmp_path / "tiny.csv", ["v", "y"],
               [["0.1", "a"], ["0.9", "a"], ["1.7", "b"], ["2.2", "b"]])
    ds = ingest(p, "y")
    (train, test), = split(ds, 0.95, 1, seed=0)
    for cls in ds.classes:
        assert sum(1 for i in train if ds.labels[i] == cls) == 1
        assert sum(1 for i in test if ds.labels[i] == cls) == 1


def test_split_parameter_errors(datasets):
    ds = datasets("tae")
    with pytest.raises(DatasetError):
        split(ds, 1.5, 2, seed=0)
    with pytest.raises(DatasetError):
        split(ds, 0.7, 0, seed=0)


def test_write_normalized_csv_round_trip(tmp_path, datasets):
    norm, _ = normalize(datasets("tae"))
    out = tmp_path / "norm.csv"
    write_normalized_csv(norm, out)
    with open(out, newline="") as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == list(norm.feature_names) + [norm.label_name]
    assert len(rows) == norm.n_samples + 1
    for j in range(norm.n_features):
        assert float(rows[1][j]) == float(norm.columns[j][0])
