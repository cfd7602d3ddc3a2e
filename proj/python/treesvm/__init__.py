"""Multiclass kernel SVMs: centroid-based binary tree (CBTS), one-vs-one and one-vs-all."""

from ._core import (
    BinaryModel,
    ClusterResult,
    Dataset,
    MulticlassModel,
    ParseError,
    Scaler,
    apply_scaler,
    classifier_count,
    fit_scaler,
    grid_search,
    kmeans2,
    load_libsvm,
    majority_partition,
    parse_libsvm,
    run_cli,
    shuffle_split,
    synth_blobs,
    train_binary,
    train_multiclass,
)


def dataset(X, y):
    """Dataset from a 2-D array and any sequence of labels (compared as strings)."""
    return Dataset.from_arrays(X, [str(v) for v in y])


__all__ = [
    "BinaryModel",
    "ClusterResult",
    "Dataset",
    "MulticlassModel",
    "ParseError",
    "Scaler",
    "apply_scaler",
    "classifier_count",
    "dataset",
    "fit_scaler",
    "grid_search",
    "kmeans2",
    "load_libsvm",
    "majority_partition",
    "parse_libsvm",
    "run_cli",
    "shuffle_split",
    "synth_blobs",
    "train_binary",
    "train_multiclass",
]
