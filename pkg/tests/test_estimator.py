import numpy as np
import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError

from epclose import ContrastPatternMiner

from conftest import TABLE1_BACKGROUND, TABLE1_CCPS, TABLE1_TARGET


def table1_xy():
    X = [set(r) for r in TABLE1_BACKGROUND + TABLE1_TARGET]
    y = [0] * 5 + [1] * 5
    return X, y


def test_fit_finds_table1_patterns():
    X, y = table1_xy()
    est = ContrastPatternMiner(min_support=0.4, min_growth_rate=1.5).fit(X, y)
    assert (est.n_background_, est.n_target_) == (5, 5)
    found = {(tuple(sorted(p)), c.counts.count_t, c.counts.count_b)
             for p, c in zip(est.patterns_, est.ccps_)}
    assert found == TABLE1_CCPS
    assert list(est.get_feature_names_out()) == ["{a,b,c,e}", "{b,e}", "{b,c,e}", "{a,b}"]


def test_transform_marks_containing_rows():
    X, y = table1_xy()
    est = ContrastPatternMiner(min_support=0.4, min_growth_rate=1.5).fit(X, y)
    out = est.transform([{"a", "b", "c", "e"}, {"b"}, {"b", "e", "z"}])
    assert out.dtype == np.uint8
    assert out.tolist() == [[1, 1, 1, 1], [0, 0, 0, 0], [0, 1, 0, 0]]
    # column sums over the target rows equal the stored target counts
    target_cols = est.transform(X[5:]).sum(axis=0)
    assert target_cols.tolist() == [c.counts.count_t for c in est.ccps_]


def test_binary_matrix_input():
    X = np.array([[1, 0, 1], [1, 0, 0], [1, 1, 1], [1, 1, 0]])
    est = ContrastPatternMiner(min_support=0.5, min_growth_rate=2).fit(X, [0, 0, 1, 1])
    # [DERIVED] {0,1} (2:0) and {0,1,2} (1:0) are closed and absent from the background
    assert sorted(sorted(p) for p in est.patterns_) == [["0", "1"], ["0", "1", "2"]]


def test_params_and_clone():
    est = ContrastPatternMiner(min_support=0.2, min_growth_rate=3, backend="python")
    assert est.get_params() == {"min_support": 0.2, "min_growth_rate": 3, "backend": "python"}
    assert clone(est).get_params() == est.get_params()


def test_errors():
    X, y = table1_xy()
    with pytest.raises(NotFittedError):
        ContrastPatternMiner().transform(X)
    with pytest.raises(ValueError):
        ContrastPatternMiner(min_growth_rate=1).fit(X, y)
    with pytest.raises(ValueError):
        ContrastPatternMiner(backend="gpu").fit(X, y)
    with pytest.raises(ValueError):
        ContrastPatternMiner().fit(X, y[:3])
