"""Partially labeled datasets: construction, CSV ingestion, centering, rotation.

A dataset is an immutable ``n x d`` matrix of covariates plus a per-row
label in ``{POS, NEG, UNLABELED}``.  Observed labels are the only labels a
dataset ever holds; predicted cluster ids live in
:class:`~sigpal.cluster_index.ClusterAssignment`, never here.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from .errors import CsvFormatError, DatasetError, DegenerateDataError

POS = 1
NEG = -1
UNLABELED = 0

_LABEL_TOKENS = {"+1": POS, "1": POS, "-1": NEG, "NA": UNLABELED, "": UNLABELED}
_LABEL_NAMES = {POS: "+1", NEG: "-1", UNLABELED: "NA"}


@dataclass(frozen=True)
class PartiallyLabeledDataset:
    """Covariate matrix with ternary row labels.

    Parameters
    ----------
    X : ndarray, shape (n, d)
        Real covariates; every entry must be finite, n >= 2, d >= 1.
    labels : ndarray, shape (n,)
        Per-row label: ``POS`` (+1), ``NEG`` (-1) or ``UNLABELED`` (0).
    """

    X: np.ndarray
    labels: np.ndarray

    def __post_init__(self) -> None:
        X = np.array(self.X, dtype=float)
        if X.ndim != 2:
            raise DatasetError(f"X must be 2-d, got shape {X.shape}")
        n, d = X.shape
        if n < 2 or d < 1:
            raise DatasetError(f"need n >= 2 rows and d >= 1 columns, got {n} x {d}")
        if not np.all(np.isfinite(X)):
            bad = np.argwhere(~np.isfinite(X))[0]
            raise DatasetError(f"non-finite covariate at row {bad[0]}, column {bad[1]}")
        labels = np.array(self.labels, dtype=np.int8)
        if labels.shape != (n,):
            raise DatasetError(
                f"labels must have length {n} (one per row), got shape {labels.shape}"
            )
        if not np.all(np.isin(labels, (POS, NEG, UNLABELED))):
            raise DatasetError("labels must be in {+1, -1, 0}")
        X.setflags(write=False)
        labels.setflags(write=False)
        object.__setattr__(self, "X", X)
        object.__setattr__(self, "labels", labels)

    @property
    def n(self) -> int:
        return self.X.shape[0]

    @property
    def d(self) -> int:
        return self.X.shape[1]

    @property
    def labeled_mask(self) -> np.ndarray:
        return self.labels != UNLABELED

    @property
    def n_labeled(self) -> int:
        return int(np.count_nonzero(self.labels))

    @property
    def n_unlabeled(self) -> int:
        return self.n - self.n_labeled

    @property
    def n_pos(self) -> int:
        return int(np.count_nonzero(self.labels == POS))

    @property
    def n_neg(self) -> int:
        return int(np.count_nonzero(self.labels == NEG))

    @property
    def theta(self) -> float:
        """Fraction of rows with an observed label, exactly n_labeled / n."""
        return self.n_labeled / self.n

    def with_matrix(self, X: np.ndarray) -> "PartiallyLabeledDataset":
        """Same labels on a new covariate matrix (same row count)."""
        return PartiallyLabeledDataset(X, self.labels)


@dataclass(frozen=True)
class RotationResult:
    """Outcome of :func:`rotate_to_diagonal`.

    ``rotated.X == (original.X - center) @ rotation`` with ``rotation``
    orthogonal and the rotated sample covariance diagonal, variances
    nonincreasing across columns.
    """

    rotated: PartiallyLabeledDataset
    rotation: np.ndarray
    center: np.ndarray

    def __post_init__(self) -> None:
        r = np.asarray(self.rotation, dtype=float)
        gram_err = np.abs(r.T @ r - np.eye(r.shape[1])).max()
        if gram_err > 1e-10:
            raise DatasetError(f"rotation not orthogonal (max deviation {gram_err:.3e})")


def center(dataset: PartiallyLabeledDataset) -> tuple[PartiallyLabeledDataset, np.ndarray]:
    """Subtract column means; returns the centered dataset and the mean vector."""
    mean = dataset.X.mean(axis=0)
    return dataset.with_matrix(dataset.X - mean), mean


def total_sum_of_squares(X: np.ndarray) -> float:
    """Sum of squared distances of all rows to the overall mean."""
    return float(((X - X.mean(axis=0)) ** 2).sum())


def rotate_to_diagonal(dataset: PartiallyLabeledDataset) -> RotationResult:
    """Center the data and rotate onto the sample-covariance eigenbasis.

    Uses the covariance of all rows (labeled and unlabeled).  Columns of
    the rotation are ordered so rotated sample variances are nonincreasing;
    each eigenvector's sign is fixed so its first nonzero component is
    nonnegative.  Pairwise distances and any cluster-index value are
    unchanged by this transform.
    """
    centered, mean = center(dataset)
    Xc = centered.X
    if total_sum_of_squares(Xc) <= 0.0:
        raise DegenerateDataError("all rows identical: rotation undefined")
    cov = Xc.T @ Xc / (dataset.n - 1)
    eigvals, eigvecs = np.linalg.eigh(cov)
    order = np.argsort(eigvals)[::-1]
    eigvecs = eigvecs[:, order]
    # sign convention: first component with magnitude above 1e-12 made nonnegative
    for j in range(eigvecs.shape[1]):
        col = eigvecs[:, j]
        nz = np.flatnonzero(np.abs(col) > 1e-12)
        if nz.size and col[nz[0]] < 0:
            eigvecs[:, j] = -col
    rotated = dataset.with_matrix(Xc @ eigvecs)
    return RotationResult(rotated=rotated, rotation=eigvecs, center=mean)


def _parse_label(token: str, row: int) -> int:
    key = token.strip()
    if key in _LABEL_TOKENS:
        return _LABEL_TOKENS[key]
    raise CsvFormatError(
        f"row {row}: label {token!r} not in {{+1, 1, -1, NA, empty}}"
    )


def _looks_like_data_row(cells: list[str], label_idx: int) -> bool:
    for j, cell in enumerate(cells):
        if j == label_idx:
            if cell.strip() not in _LABEL_TOKENS:
                return False
            continue
        try:
            float(cell)
        except ValueError:
            return False
    return True


def load_csv(path, label_column: "str | int | None" = None) -> PartiallyLabeledDataset:
    """Read a dataset from a UTF-8, comma-separated file.

    The label column holds ``+1``/``1``, ``-1``, or ``NA``/empty; all other
    columns must be numeric (scientific notation accepted).  A header row is
    detected by a non-numeric first row.  ``label_column`` may be a header
    name or a 0-based index; it defaults to the column named ``label`` when
    a header is present and to the last column otherwise.
    """
    with open(path, "r", encoding="utf-8", newline="") as fh:
        rows = [r for r in csv.reader(fh) if r]
    if not rows:
        raise CsvFormatError(f"{path}: empty file")

    width = len(rows[0])
    if any(len(r) != width for r in rows):
        bad = next(i for i, r in enumerate(rows) if len(r) != width)
        raise CsvFormatError(f"{path}: row {bad} has {len(rows[bad])} cells, expected {width}")

    header: list[str] | None = None
    # guess the label index used only for header detection
    probe_idx = label_column if isinstance(label_column, int) else width - 1
    if not _looks_like_data_row(rows[0], probe_idx):
        header = [c.strip() for c in rows[0]]
        rows = rows[1:]

    if isinstance(label_column, int):
        label_idx = label_column
    elif isinstance(label_column, str):
        if header is None:
            raise CsvFormatError(f"{path}: no header row, select the label column by index")
        if label_column not in header:
            raise CsvFormatError(f"{path}: no column named {label_column!r} in header")
        label_idx = header.index(label_column)
    elif header is not None:
        if "label" not in header:
            raise CsvFormatError(f"{path}: header has no 'label' column; pass label_column")
        label_idx = header.index("label")
    else:
        label_idx = width - 1
    if not 0 <= label_idx < width:
        raise CsvFormatError(f"{path}: label column index {label_idx} out of range")

    if len(rows) < 2:
        raise CsvFormatError(f"{path}: need at least 2 data rows, found {len(rows)}")

    labels = np.empty(len(rows), dtype=np.int8)
    data = np.empty((len(rows), width - 1), dtype=float)
    for i, cells in enumerate(rows):
        labels[i] = _parse_label(cells[label_idx], i)
        k = 0
        for j, cell in enumerate(cells):
            if j == label_idx:
                continue
            try:
                value = float(cell)
            except ValueError:
                raise CsvFormatError(
                    f"{path}: non-numeric covariate {cell!r} at row {i}, column {j}"
                ) from None
            if not np.isfinite(value):
                raise CsvFormatError(
                    f"{path}: non-finite covariate {cell!r} at row {i}, column {j}"
                )
            data[i, k] = value
            k += 1
    return PartiallyLabeledDataset(data, labels)


def write_csv(dataset: PartiallyLabeledDataset, path) -> None:
    """Write a dataset so that :func:`load_csv` reads it back exactly.

    Covariates are written with ``repr`` (shortest exact float form), so
    the load/write round trip is bit-exact.
    """
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow([f"x{j + 1}" for j in range(dataset.d)] + ["label"])
        for i in range(dataset.n):
            row = [repr(float(v)) for v in dataset.X[i]]
            row.append(_LABEL_NAMES[int(dataset.labels[i])])
            writer.writerow(row)
