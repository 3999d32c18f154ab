"""scikit-learn style wrapper: fit on labeled transactions, transform to pattern indicators."""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from ._validation import check_min_growth_rate, check_min_support, check_sides, check_transactions
from .engine import BACKENDS, mine_ccps
from .model import EncodedDatasetPair


class ContrastPatternMiner(TransformerMixin, BaseEstimator):
    """Closed contrast patterns of the target rows against the background rows.

    ``fit(X, y)`` takes transactions ``X`` (an iterable of item iterables, or
    a 2-d 0/1 array whose column indices become items) and a side indicator
    ``y``: truthy rows form the target dataset, falsy rows the background.
    ``transform(X)`` returns a 0/1 matrix with one column per pattern, set
    when the row contains the pattern.

    Parameters
    ----------
    min_support : fraction, default=0.1
        Share of target rows a pattern must occur in.
    min_growth_rate : rational > 1, default=2
        Required ratio of target support to background support.
    backend : {"auto", "python", "numba"}, default="auto"
    """

    def __init__(self, min_support=0.1, min_growth_rate=2, backend="auto"):
        self.min_support = min_support
        self.min_growth_rate = min_growth_rate
        self.backend = backend

    def fit(self, X, y):
        sigma = check_min_support(self.min_support)
        rho = check_min_growth_rate(self.min_growth_rate)
        if self.backend not in BACKENDS:
            raise ValueError(f"backend must be one of {BACKENDS}, got {self.backend!r}")
        rows = check_transactions(X)
        sides = check_sides(y, len(rows))
        background = [sorted(r, key=str) for r, s in zip(rows, sides) if not s]
        target = [sorted(r, key=str) for r, s in zip(rows, sides) if s]
        pair = EncodedDatasetPair.from_itemsets(background, target)
        self.symbols_ = pair.symbols
        self.n_background_, self.n_target_ = pair.n_b, pair.n_t
        self.ccps_ = mine_ccps(pair, sigma, rho, self.backend)
        self.patterns_ = [frozenset(pair.symbols[i] for i in c.items) for c in self.ccps_]
        return self

    def transform(self, X):
        check_is_fitted(self, "ccps_")
        rows = [frozenset(map(str, r)) for r in check_transactions(X)]
        out = np.zeros((len(rows), len(self.patterns_)), dtype=np.uint8)
        for j, pattern in enumerate(self.patterns_):
            for i, row in enumerate(rows):
                if pattern <= row:
                    out[i, j] = 1
        return out

    def get_feature_names_out(self, input_features=None):
        check_is_fitted(self, "ccps_")
        return np.array(["{" + ",".join(self.symbols_[i] for i in c.items) + "}"
                         for c in self.ccps_], dtype=object)
