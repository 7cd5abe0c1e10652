"""Dataset ingestion and per-attribute summaries.

Datasets are plain numeric tables: one row per sample, one column per
attribute, with an optional class-label column.  Attribute values are kept
in their source units; any scaling happens downstream.
"""

import csv
from dataclasses import dataclass, field
from importlib import resources

import numpy as np


class DataError(ValueError):
    """Raised for malformed or degenerate input data."""


@dataclass(frozen=True)
class Dataset:
    """Numeric samples with optional class labels.

    samples is an (n, M) float array; labels, when present, is a list of n
    class identifiers (strings).
    """

    samples: np.ndarray
    labels: list[str] | None
    attribute_names: list[str]

    def __post_init__(self):
        samples = np.asarray(self.samples, dtype=float)
        object.__setattr__(self, "samples", samples)
        if samples.ndim != 2 or samples.shape[1] < 1:
            raise DataError("samples must be a non-empty (n, M) table with M >= 1")
        if not np.all(np.isfinite(samples)):
            raise DataError("non-finite attribute value in dataset")
        if len(self.attribute_names) != samples.shape[1]:
            raise DataError("attribute_names length does not match sample width")
        if self.labels is not None and len(self.labels) != samples.shape[0]:
            raise DataError("labels length does not match number of samples")

    @property
    def n_samples(self) -> int:
        return self.samples.shape[0]

    @property
    def n_attributes(self) -> int:
        return self.samples.shape[1]

    def classes(self) -> list[str]:
        """Sorted distinct class labels; class id = index in this list."""
        if self.labels is None:
            raise DataError("dataset has no labels")
        return sorted(set(self.labels))

    def label_ids(self) -> np.ndarray:
        """Integer class id per sample, under the classes() ordering."""
        if self.labels is None:
            raise DataError("dataset has no labels")
        return encode_labels(self.labels)[1]


def encode_labels(labels) -> tuple[list, np.ndarray]:
    """Map arbitrary labels to dense class ids in sorted-label order."""
    labels = list(labels)
    if not labels:
        raise DataError("empty label sequence")
    classes = sorted(set(labels))
    index = {c: i for i, c in enumerate(classes)}
    return classes, np.array([index[l] for l in labels], dtype=int)


@dataclass(frozen=True)
class AttributeSummary:
    """Per-attribute min, max and span over all samples."""

    mins: np.ndarray
    maxs: np.ndarray
    spans: np.ndarray = field(init=False)

    def __post_init__(self):
        mins = np.asarray(self.mins, dtype=float)
        maxs = np.asarray(self.maxs, dtype=float)
        if np.any(mins > maxs):
            raise DataError("attribute min exceeds max")
        object.__setattr__(self, "mins", mins)
        object.__setattr__(self, "maxs", maxs)
        object.__setattr__(self, "spans", maxs - mins)


def load_csv(path, label_column: str | None = None) -> Dataset:
    """Load a comma-separated file with a header row into a Dataset.

    All columns except label_column must parse as finite reals.  Labels are
    populated iff label_column is given.
    """
    with open(path, newline="") as f:
        reader = csv.reader(f)
        try:
            header = next(reader)
        except StopIteration:
            raise DataError(f"{path}: empty file") from None
        header = [h.strip() for h in header]
        if label_column is not None:
            if label_column not in header:
                raise DataError(f"{path}: label column {label_column!r} not in header")
            label_idx = header.index(label_column)
        else:
            label_idx = None

        rows, labels = [], []
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != len(header):
                raise DataError(f"{path}:{lineno}: expected {len(header)} fields, got {len(row)}")
            values = []
            for i, cell in enumerate(row):
                if i == label_idx:
                    labels.append(cell.strip())
                    continue
                try:
                    values.append(float(cell))
                except ValueError:
                    raise DataError(f"{path}:{lineno}: non-numeric value {cell!r}") from None
            rows.append(values)

    if not rows:
        raise DataError(f"{path}: zero data rows")
    names = [h for i, h in enumerate(header) if i != label_idx]
    return Dataset(
        samples=np.array(rows, dtype=float),
        labels=labels if label_idx is not None else None,
        attribute_names=names,
    )


def summarize(dataset: Dataset) -> AttributeSummary:
    """Exact per-attribute min/max/span over all samples."""
    return AttributeSummary(
        mins=dataset.samples.min(axis=0),
        maxs=dataset.samples.max(axis=0),
    )


def iris_path() -> str:
    """Filesystem path of the bundled 150x4 Iris table."""
    return str(resources.files("somblocks.data").joinpath("iris.csv"))
