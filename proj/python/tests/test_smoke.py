import os
from pathlib import Path

import numpy as np
import pytest

import treesvm

DATA = Path(os.environ.get("TREESVM_DATA_DIR", Path(__file__).resolve().parents[2] / "data"))


def test_parse_and_arrays():
    ds = treesvm.parse_libsvm("1 1:0.5 3:2.0\n2 2:1.0\n")
    assert len(ds) == 2
    assert ds.dim == 3
    assert ds.label_names == ["1", "2"]
    np.testing.assert_array_equal(ds.X, [[0.5, 0.0, 2.0], [0.0, 1.0, 0.0]])
    with pytest.raises(treesvm.ParseError):
        treesvm.parse_libsvm("1 1:abc\n")


def test_dataset_from_numpy():
    X = np.array([[0.0, 0.0], [1.0, 1.0], [0.1, 0.0]])
    ds = treesvm.dataset(X, ["a", "b", "a"])
    assert ds.labels == [0, 1, 0]
    assert ds.num_classes == 2


def test_binary_midpoint():
    ds = treesvm.dataset(np.array([[0.0], [1.0]]), [0, 1])
    m = treesvm.train_binary(ds, [-1, 1], kernel="linear", C=1.0)
    assert abs(m.decision_value(np.array([0.5]))) < 1e-6
    assert m.predict_sign(np.array([1.0])) == 1
    assert m.predict_sign(np.array([0.0])) == -1


def test_iris_strategies_and_persistence(tmp_path):
    iris = treesvm.load_libsvm(str(DATA / "iris.libsvm"))
    train, test, warnings = treesvm.shuffle_split(iris, seed=1)
    assert (len(train), len(test)) == (100, 50)
    scaler = treesvm.fit_scaler(train)
    train, test = treesvm.apply_scaler(scaler, train), treesvm.apply_scaler(scaler, test)
    for strategy, n in [("cbts", 2), ("ovo", 3), ("ova", 3)]:
        m = treesvm.train_multiclass(train, strategy, gamma=1.0, C=4.0, seed=1)
        assert m.num_classifiers == n
        assert m.accuracy(test) > 0.85
        m.save(tmp_path / strategy)
        back = treesvm.MulticlassModel.load(tmp_path / strategy)
        assert back.predict_many(test.X) == m.predict_many(test.X)
    cbts = treesvm.train_multiclass(train, "cbts", seed=1)
    assert cbts.topology.count("(") == 2


def test_kmeans_and_partition():
    ds = treesvm.dataset(np.array([[0.0], [0.1], [10.0], [10.1]]), ["a", "a", "b", "b"])
    cr = treesvm.kmeans2(ds, seed=3)
    assert cr.assignment[0] == cr.assignment[1] != cr.assignment[2] == cr.assignment[3]
    assert all(b <= a for a, b in zip(cr.sse_history, cr.sse_history[1:]))
    left, right, sse = treesvm.majority_partition(ds, cr)
    assert sorted(left + right) == [0, 1]


def test_grid_counts_and_cli():
    blobs = treesvm.synth_blobs(3, 20, 2, 0.05, seed=4)
    train, test, _ = treesvm.shuffle_split(blobs, seed=0)
    records, best = treesvm.grid_search(train, test, "ovo", (0, 2), (0, 2), 2)
    assert len(records) == 4
    assert records[best]["accuracy"] == max(r["accuracy"] for r in records)
    assert treesvm.classifier_count("ovo", 10) == (45, 45)
    assert treesvm.classifier_count("cbts", 10)[0] == 9
    code, out, err = treesvm.run_cli(["train", "/nonexistent.libsvm"])
    assert code == 2 and "cannot open" in err
