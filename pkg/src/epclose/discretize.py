"""Equal-frequency discretization of continuous columns.

Cut points sit at order statistics so that each bin holds (about) the same
number of fitted values.  A value equal to a cut point falls in the lower
bin, so bin ``j`` (1-based) holds ``cut[j-2] < v <= cut[j-1]`` with open
ends.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

logger = logging.getLogger(__name__)

#: Display suffix for a missing value in any column.
MISSING = "NA"


@dataclass(frozen=True)
class BinBoundaries:
    """Cut points of one column; ``len(cut_points) + 1`` bins."""

    column: str
    cut_points: tuple

    def __post_init__(self):
        cuts = self.cut_points
        if any(b <= a for a, b in zip(cuts, cuts[1:])):
            raise ValueError(f"cut points of {self.column!r} must be strictly increasing: {cuts}")

    @property
    def n_bins(self) -> int:
        return len(self.cut_points) + 1

    def assign(self, values) -> np.ndarray:
        """1-based bin number of each value; 0 marks a missing (NaN) value."""
        arr = np.asarray(values, dtype=float)
        bins = np.searchsorted(np.asarray(self.cut_points, dtype=float), arr, side="left") + 1
        bins[np.isnan(arr)] = 0
        return bins

    def item_name(self, bin_number: int) -> str:
        """Display string of a bin: ``col=bin_j``, or ``col=NA`` for bin 0."""
        if bin_number == 0:
            return f"{self.column}={MISSING}"
        if not 1 <= bin_number <= self.n_bins:
            raise ValueError(f"{self.column!r} has no bin {bin_number}")
        return f"{self.column}=bin_{bin_number}"


def fit_equal_frequency_bins(values, k: int, column: str = "") -> BinBoundaries:
    """Cut points at the ``ceil(i*n/k)``-th smallest value, ``i = 1..k-1``.

    NaN values are ignored.  Equal consecutive cut points are merged, and a
    cut point at the maximum (which would leave the top bin empty) is
    dropped, so heavily repeated data yields fewer than ``k`` bins.
    """
    if isinstance(k, bool) or not isinstance(k, (int, np.integer)) or k < 2:
        raise ValueError(f"bin count must be an integer >= 2, got {k!r}")
    arr = np.asarray(values, dtype=float).ravel()
    arr = np.sort(arr[~np.isnan(arr)])
    n = arr.size
    if n == 0:
        raise ValueError(f"column {column!r} has no values to fit bins on")
    top = arr[-1]
    cuts = []
    for i in range(1, k):
        cut = float(arr[-(-i * n // k) - 1])
        if cut < top and (not cuts or cut > cuts[-1]):
            cuts.append(cut)
    if arr[0] == top:
        logger.warning("column %r has a single distinct value; it becomes one bin", column)
    elif len(cuts) < k - 1:
        logger.info("column %r: %d of %d bins after merging repeated cut points",
                    column, len(cuts) + 1, k)
    return BinBoundaries(column, tuple(cuts))


class EqualFrequencyDiscretizer(TransformerMixin, BaseEstimator):
    """Per-column equal-frequency binning of a numeric matrix.

    ``transform`` returns 1-based bin numbers, with 0 where the input is NaN.

    Parameters
    ----------
    n_bins : int, default=4
        Requested bins per column; repetitive columns may get fewer.
    """

    def __init__(self, n_bins: int = 4):
        self.n_bins = n_bins

    def fit(self, X, y=None):
        columns = getattr(X, "columns", None)
        X = self._as_matrix(X)
        names = ([str(c) for c in columns] if columns is not None
                 else [f"x{j}" for j in range(X.shape[1])])
        self.boundaries_ = [fit_equal_frequency_bins(X[:, j], self.n_bins, names[j])
                            for j in range(X.shape[1])]
        self.n_features_in_ = X.shape[1]
        return self

    def transform(self, X):
        check_is_fitted(self, "boundaries_")
        X = self._as_matrix(X)
        if X.shape[1] != self.n_features_in_:
            raise ValueError(f"expected {self.n_features_in_} columns, got {X.shape[1]}")
        return np.column_stack([b.assign(X[:, j]) for j, b in enumerate(self.boundaries_)])

    def get_feature_names_out(self, input_features=None):
        check_is_fitted(self, "boundaries_")
        return np.array([b.column for b in self.boundaries_], dtype=object)

    @staticmethod
    def _as_matrix(X):
        X = np.asarray(X, dtype=float)
        if X.ndim != 2 or X.shape[0] == 0:
            raise ValueError(f"expected a non-empty 2-d array, got shape {X.shape}")
        return X
