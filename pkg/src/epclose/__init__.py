"""Closed contrast pattern mining between a background and a target dataset.

>>> from epclose import EncodedDatasetPair, mine_ccps
>>> pair = EncodedDatasetPair.from_itemsets(
...     ["abf", "bce", "bcfg", "bc", "abd"], ["abd", "bce", "abce", "be", "abce"])
>>> [(pair.decode(c.items), str(c.counts)) for c in mine_ccps(pair, "0.4", "1.5")]
[(('a', 'b', 'c', 'e'), '(2:0)'), (('b', 'e'), '(4:1)'), (('b', 'c', 'e'), '(3:1)'), (('a', 'b'), '(3:2)')]
"""

__version__ = "0.1.0"

from .baseline import OracleReport, bruteforce_ccps, compare_outputs, extcp_baseline
from .cfi import CFITree
from .discretize import BinBoundaries, EqualFrequencyDiscretizer, fit_equal_frequency_bins
from .engine import EPClose, mine_ccps, mine_closed_itemsets
from .estimator import ContrastPatternMiner
from .evaluate import PurityReport, attack_ratio, purity_summary
from .exceptions import (
    ConsistencyError,
    EPCloseError,
    IngestError,
    InvalidDatasetError,
    LabelingError,
    NoSupportError,
    OracleGuardError,
)
from .fptree import FList, FPTree, build_flist, build_fptree, conditional_pattern_base
from .ingest import SchemaConfig, encode_dataset_pair, load_pair
from .model import (
    CCP,
    INFINITE,
    DualCount,
    EncodedDatasetPair,
    Label,
    Origin,
    Pattern,
    Transaction,
    closure_of,
    growth_rate,
    support_counts,
)

__all__ = [
    "BinBoundaries", "CCP", "CFITree", "ConsistencyError", "ContrastPatternMiner",
    "DualCount", "EPClose", "EPCloseError", "EncodedDatasetPair",
    "EqualFrequencyDiscretizer", "FList", "FPTree", "INFINITE", "IngestError",
    "InvalidDatasetError", "Label", "LabelingError", "NoSupportError",
    "OracleGuardError", "OracleReport", "Origin", "Pattern", "PurityReport",
    "SchemaConfig", "Transaction", "attack_ratio", "bruteforce_ccps", "build_flist",
    "build_fptree", "closure_of", "compare_outputs", "conditional_pattern_base",
    "encode_dataset_pair", "extcp_baseline", "fit_equal_frequency_bins", "growth_rate",
    "load_pair", "mine_ccps", "mine_closed_itemsets", "purity_summary", "support_counts",
]
