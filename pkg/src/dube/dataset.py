"""Dataset model, CSV ingestion, cross-validation folds, label noise and
synthetic generators.

A :class:`Dataset` is an immutable (N, d) table of finite reals with
integer class labels in ``{0, ..., m-1}`` and a per-class row index.
All randomized operations take an explicit integer seed and are
bit-reproducible (see :mod:`dube.rng`).
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field

import numpy as np

from . import rng


class DatasetError(ValueError):
    """Raised for malformed input data or violated preconditions."""


@dataclass(frozen=True)
class Dataset:
    """Feature table plus labels and a per-class row index.

    Parameters
    ----------
    features : ndarray of shape (N, d)
        Finite float features.
    labels : ndarray of shape (N,)
        Class ids in ``{0, ..., m-1}``.
    m : int, optional
        Size of the label space. Defaults to ``max(labels) + 1``. A
        subset of a dataset keeps the parent's ``m`` even if some class
        has no rows in the subset.
    label_names : tuple of str, optional
        Original label values, index ``c`` naming class ``c``. Recorded
        by :func:`load_csv` for reporting.
    """

    features: np.ndarray
    labels: np.ndarray
    m: int = 0
    label_names: tuple[str, ...] = ()
    class_index: tuple[np.ndarray, ...] = field(default=(), compare=False)

    def __post_init__(self):
        # always copy so freezing below never flips a caller-owned array
        feats = np.array(self.features, dtype=np.float64, order="C", copy=True)
        labels = np.array(self.labels, dtype=np.int64, copy=True)
        if feats.ndim != 2:
            raise DatasetError(f"features must be 2-D, got shape {feats.shape}")
        if labels.shape != (feats.shape[0],):
            raise DatasetError("labels length must match feature rows")
        if feats.shape[0] == 0:
            raise DatasetError("empty dataset")
        if not np.isfinite(feats).all():
            raise DatasetError("features contain NaN or infinite values")
        if labels.size and labels.min() < 0:
            raise DatasetError("negative class id")
        m = self.m if self.m else int(labels.max()) + 1
        if labels.max() >= m:
            raise DatasetError(f"label {labels.max()} out of range for m={m}")
        index = tuple(np.flatnonzero(labels == c) for c in range(m))
        for arr in (feats, labels) + index:
            arr.flags.writeable = False
        object.__setattr__(self, "features", feats)
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "m", m)
        object.__setattr__(self, "class_index", index)

    @property
    def n_rows(self) -> int:
        return self.features.shape[0]

    @property
    def n_features(self) -> int:
        return self.features.shape[1]

    def subset(self, rows: np.ndarray) -> "Dataset":
        """Dataset restricted to ``rows`` (order preserved, same m)."""
        rows = np.asarray(rows)
        return Dataset(self.features[rows], self.labels[rows], m=self.m,
                       label_names=self.label_names)


@dataclass(frozen=True)
class FoldPlan:
    """Stratified fold assignment: ``assignments[i]`` is row i's fold."""

    k_folds: int
    assignments: np.ndarray

    def split(self, ds: Dataset, fold: int) -> tuple[Dataset, Dataset]:
        """Return (train, test) datasets for one held-out fold."""
        if not 0 <= fold < self.k_folds:
            raise DatasetError(f"fold {fold} out of range")
        test_rows = np.flatnonzero(self.assignments == fold)
        train_rows = np.flatnonzero(self.assignments != fold)
        return ds.subset(train_rows), ds.subset(test_rows)


def class_counts(ds: Dataset) -> np.ndarray:
    """Number of rows per class, length m."""
    return np.bincount(ds.labels, minlength=ds.m)


def load_csv(path, label_column) -> Dataset:
    """Load a comma-separated table into a :class:`Dataset`.

    Feature cells must parse as finite reals; the label column may hold
    arbitrary strings, mapped to dense class ids by first appearance in
    file order (the mapping is kept in ``label_names``). A header row is
    required when ``label_column`` is a name; with a column index the
    first row is treated as a header iff any of its feature cells fails
    to parse as a number.

    Parameters
    ----------
    path : str or Path
        CSV file location.
    label_column : str or int
        Column name (requires a header) or zero-based column index.

    Raises
    ------
    DatasetError
        Missing file or column, non-numeric or non-finite feature cell,
        empty file, or a single distinct label (at least two classes are
        required).
    """
    try:
        with open(path, newline="") as fh:
            raw = [row for row in csv.reader(fh)
                   if row and any(cell.strip() for cell in row)
                   and not row[0].lstrip().startswith("#")]
    except OSError as exc:
        raise DatasetError(f"cannot read {path}: {exc}") from exc
    if not raw:
        raise DatasetError(f"{path}: empty file")

    width = len(raw[0])
    if any(len(row) != width for row in raw):
        raise DatasetError(f"{path}: ragged rows")

    if isinstance(label_column, str):
        header = [cell.strip() for cell in raw[0]]
        try:
            label_idx = header.index(label_column)
        except ValueError:
            raise DatasetError(f"{path}: no column named {label_column!r}") from None
        rows = raw[1:]
    else:
        label_idx = int(label_column)
        if not 0 <= label_idx < width:
            raise DatasetError(f"{path}: label column index {label_idx} out of range")
        rows = raw
        if rows and not _numeric_row(rows[0], label_idx):
            rows = rows[1:]  # header row
    if not rows:
        raise DatasetError(f"{path}: no data rows")

    n, d = len(rows), width - 1
    feats = np.empty((n, d), dtype=np.float64)
    labels = np.empty(n, dtype=np.int64)
    name_to_id: dict[str, int] = {}
    for i, row in enumerate(rows):
        j = 0
        for k, cell in enumerate(row):
            if k == label_idx:
                continue
            try:
                value = float(cell)
            except ValueError:
                raise DatasetError(f"{path}: row {i}: non-numeric cell {cell!r}") from None
            if not math.isfinite(value):
                raise DatasetError(f"{path}: row {i}: non-finite cell {cell!r}")
            feats[i, j] = value
            j += 1
        name = row[label_idx].strip()
        if name not in name_to_id:
            name_to_id[name] = len(name_to_id)
        labels[i] = name_to_id[name]

    if len(name_to_id) < 2:
        raise DatasetError(f"{path}: single-class dataset (need m >= 2)")
    return Dataset(feats, labels, m=len(name_to_id),
                   label_names=tuple(name_to_id))


def _numeric_row(row, label_idx) -> bool:
    for k, cell in enumerate(row):
        if k == label_idx:
            continue
        try:
            float(cell)
        except ValueError:
            return False
    return True


def stratified_k_fold(ds: Dataset, k: int, seed: int) -> FoldPlan:
    """Assign rows to k folds, stratified by class.

    Within each class the rows are shuffled by a seeded stream and dealt
    round-robin, so per-class fold sizes differ by at most one and the
    assignment is a pure function of (dataset, k, seed).

    Raises
    ------
    DatasetError
        If k < 2 or any class has fewer than k rows.
    """
    if k < 2:
        raise DatasetError(f"k must be >= 2, got {k}")
    counts = class_counts(ds)
    small = np.flatnonzero(counts < k)
    if small.size:
        raise DatasetError(f"class {small[0]} has {counts[small[0]]} rows, fewer than k={k}")
    assignments = np.empty(ds.n_rows, dtype=np.int64)
    for c, rows in enumerate(ds.class_index):
        gen = rng.stream(seed, rng.FOLD, c)
        shuffled = rows[gen.permutation(rows.size)]
        assignments[shuffled] = np.arange(rows.size) % k
    return FoldPlan(k_folds=k, assignments=assignments)


def inject_flip_noise(ds: Dataset, r: float, seed: int) -> Dataset:
    """Flip labels symmetrically between the two classes of a binary dataset.

    Exactly ``floor(r * n_minority)`` distinct minority rows receive the
    majority label and the same number of distinct majority rows receive
    the minority label, chosen uniformly by a seeded stream. Class counts
    are therefore preserved and features are untouched.
    """
    if ds.m != 2:
        raise DatasetError("flip noise is defined for binary datasets only")
    if not 0.0 <= r <= 1.0:
        raise DatasetError(f"noise ratio must be in [0, 1], got {r}")
    counts = class_counts(ds)
    minority = int(np.argmin(counts))
    majority = 1 - minority
    flips = int(math.floor(r * counts[minority]))
    if flips > counts[majority]:
        raise DatasetError("flip count exceeds majority class size")
    if flips == 0:
        return ds
    gen = rng.stream(seed, rng.FLIP)
    flip_min = gen.choice(ds.class_index[minority], size=flips, replace=False)
    flip_maj = gen.choice(ds.class_index[majority], size=flips, replace=False)
    labels = ds.labels.copy()
    labels[flip_min] = majority
    labels[flip_maj] = minority
    return Dataset(ds.features, labels, m=2, label_names=ds.label_names)


def make_gaussian_1d(n_min: int, n_maj: int, mu_min: float, mu_maj: float,
                     sigma: float, seed: int) -> Dataset:
    """1-D two-class Gaussian sample: majority (class 0) around ``mu_maj``,
    minority (class 1, the "positive" class) around ``mu_min``, shared
    standard deviation ``sigma``."""
    if n_min < 1 or n_maj < 1:
        raise DatasetError("class sizes must be >= 1")
    if sigma <= 0:
        raise DatasetError(f"sigma must be positive, got {sigma}")
    gen = rng.stream(seed, rng.GAUSS_1D)
    x_maj = gen.normal(mu_maj, sigma, n_maj)
    x_min = gen.normal(mu_min, sigma, n_min)
    feats = np.concatenate([x_maj, x_min])[:, None]
    labels = np.repeat([0, 1], [n_maj, n_min])
    return Dataset(feats, labels, m=2, label_names=("majority", "minority"))


# Distance (in component standard deviations) between the nearest
# opposite-class blob centers, per overlap level.
_OVERLAP_SEPARATION = {"low": 4.0, "mid": 2.5, "high": 1.5}


def make_overlap_2d(n_min: int, n_maj: int, overlap_level: str, seed: int) -> Dataset:
    """2-D two-class mixture with controlled class overlap.

    Each class is an equal mixture of two unit-variance Gaussian blobs;
    the minority blobs sit above the majority blobs at a vertical offset
    of 4 / 2.5 / 1.5 standard deviations for overlap level ``low`` /
    ``mid`` / ``high``. Majority rows (class 0) come first.
    """
    if n_min < 1 or n_maj < 1:
        raise DatasetError("class sizes must be >= 1")
    try:
        sep = _OVERLAP_SEPARATION[overlap_level]
    except KeyError:
        raise DatasetError(f"unknown overlap level {overlap_level!r}") from None
    gen = rng.stream(seed, rng.OVERLAP_2D)
    maj_centers = np.array([[0.0, 0.0], [4.0, 0.0]])
    min_centers = maj_centers + np.array([0.0, sep])
    blocks = []
    for n, centers in ((n_maj, maj_centers), (n_min, min_centers)):
        which = gen.integers(0, 2, size=n)
        blocks.append(centers[which] + gen.normal(0.0, 1.0, (n, 2)))
    feats = np.concatenate(blocks)
    labels = np.repeat([0, 1], [n_maj, n_min])
    return Dataset(feats, labels, m=2, label_names=("majority", "minority"))
