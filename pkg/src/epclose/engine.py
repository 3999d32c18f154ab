"""EPClose: closed contrast patterns mined directly during closed-itemset search.

The search is FP-close run over the join of the background and target
datasets, with three changes: target-infrequent items are pruned at every
level, full-support items are lifted out of each (conditional) tree and
carried alongside it, and each closed itemset is tested for support and
growth rate the moment it is stored.

Two interchangeable backends run the same search.  ``"python"`` walks
:class:`~epclose.fptree.FPTree` objects and stores results in a
:class:`~epclose.cfi.CFITree`; ``"numba"`` runs a compiled array version (see
:mod:`epclose._compiled`).  ``"auto"`` picks the compiled one for large inputs.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable

from ._validation import check_min_growth_rate, check_min_support, min_count
from .cfi import CFITree
from .exceptions import InvalidDatasetError
from .fptree import (
    FList,
    FPTree,
    build_flist,
    build_fptree,
    conditional_pattern_base,
    extract_single_branch,
)
from .model import (
    CCP,
    DualCount,
    EncodedDatasetPair,
    Origin,
    Pattern,
    Transaction,
    growth_rate,
    meets_support_and_growth,
    sort_ccps,
)

logger = logging.getLogger(__name__)

BACKENDS = ("auto", "python", "numba")

#: Above this many transactions ``backend="auto"`` uses the compiled search.
AUTO_COMPILED_MIN_TRANSACTIONS = 2000

#: The compiled search keeps one frame per tree level; past this many items
#: the pure-Python work stack is used instead.
COMPILED_MAX_ITEMS = 10_000


def generate_single_branch_cfis(branch, base: Pattern, fsi: Iterable) -> list:
    """Closed-itemset candidates of a tree that is a single chain.

    Along a chain the join count can only fall; each position where it falls
    (and the leaf) closes one candidate made of the base, the full-support
    items and the chain prefix up to there.  An empty chain yields just the
    base plus full-support items.
    """
    scope = set(base.items) | set(fsi)
    if not branch:
        return [(tuple(sorted(scope)), base.counts)] if scope else []
    out = []
    prefix = []
    for k, (item, counts) in enumerate(branch):
        prefix.append(item)
        if k + 1 == len(branch) or branch[k + 1][1].join != counts.join:
            out.append((tuple(sorted(scope.union(prefix))), counts))
    return out


@dataclass
class _Frame:
    tree: FPTree
    fsi: frozenset
    pending: list


class ClosedMiner:
    """Closed itemsets of a join dataset whose target count reaches ``sigma``.

    ``view`` needs ``transactions`` (each with ``items`` and ``origin``),
    ``n_b`` and ``n_t``.  ``on_closed(items, counts)`` is called once per
    stored closed itemset, in discovery order.
    """

    def __init__(self, view, sigma: Fraction, on_closed: Callable | None = None):
        self.view = view
        self.sigma = sigma
        self.on_closed = on_closed
        self.min_target = min_count(sigma, view.n_t)
        self.flist: FList | None = None
        self.fsi: frozenset = frozenset()
        self.cfi: CFITree | None = None
        self.n_trees = 0

    def run(self) -> CFITree:
        flist, fsi, candidate = build_flist(self.view, self.sigma)
        self.flist, self.fsi = flist, fsi
        self.cfi = CFITree(sorted(fsi) + list(flist.items))
        if candidate is not None:
            self._offer(candidate.items, candidate.counts)
        tree = build_fptree(self.view, flist, Pattern((), DualCount(self.view.n_b, self.view.n_t)))
        self.n_trees = 1
        self.mine_tree(tree, fsi)
        return self.cfi

    def _offer(self, items, counts: DualCount):
        if not items or not self.cfi.closed_check(items, counts.join):
            return
        self.cfi.insert(items, counts)
        if self.on_closed is not None:
            self.on_closed(tuple(sorted(items)), counts)

    def mine_tree(self, tree: FPTree, fsi: frozenset):
        """Depth-first search below ``tree`` with an explicit frame stack."""
        stack: list = []
        self._enter(tree, fsi, stack)
        while stack:
            frame = stack[-1]
            if not frame.pending:
                stack.pop()
                continue
            # least frequent header item first
            self._expand(frame, frame.pending.pop(), stack)

    def _enter(self, tree: FPTree, fsi: frozenset, stack: list):
        branch = extract_single_branch(tree)
        if branch is not None:
            for items, counts in generate_single_branch_cfis(branch, tree.base, fsi):
                self._offer(items, counts)
        else:
            stack.append(_Frame(tree, fsi, tree.header_items()))

    def _expand(self, frame: _Frame, item, stack: list):
        tree, fsi = frame.tree, frame.fsi
        beta_counts = tree.header_counts(item)
        beta = tree.base.items + (item,)
        if not self.cfi.closed_check(beta + tuple(fsi), beta_counts.join):
            return
        pattern_base, frequency = conditional_pattern_base(tree, item)
        local_fsi = set()
        kept = {}
        for i, counts in frequency.items():
            if counts.join == beta_counts.join:
                local_fsi.add(i)
            elif counts.count_t >= self.min_target:
                kept[i] = counts
        self._offer(set(beta) | local_fsi | fsi, beta_counts)
        if not kept:
            return
        child = build_fptree(pattern_base, self.flist.restrict(kept),
                             Pattern(tuple(sorted(beta)), beta_counts))
        self.n_trees += 1
        if not child.is_empty:
            self._enter(child, fsi | local_fsi, stack)


class EPClose(ClosedMiner):
    """One mining run over a dataset pair; :meth:`run` returns the CCP list.

    The closed-itemset index stays available as :attr:`cfi` afterwards.
    """

    def __init__(self, pair: EncodedDatasetPair, min_support, min_growth_rate):
        sigma = check_min_support(min_support)
        self.rho = check_min_growth_rate(min_growth_rate)
        super().__init__(pair, sigma, self._ccp_checking)
        self.pair = pair
        self.ccps: list = []

    def _ccp_checking(self, items, counts: DualCount):
        n_b, n_t = self.pair.n_b, self.pair.n_t
        if meets_support_and_growth(counts, self.sigma, self.rho, n_b, n_t):
            self.ccps.append(CCP(items, counts, growth_rate(counts, n_b, n_t)))

    def run(self) -> list:
        self.ccps = []
        super().run()
        self.ccps = sort_ccps(self.ccps)
        return self.ccps


def _resolve_backend(backend: str, n_transactions: int, n_items: int) -> str:
    if backend not in BACKENDS:
        raise ValueError(f"backend must be one of {BACKENDS}, got {backend!r}")
    if backend == "numba" and n_items > COMPILED_MAX_ITEMS:
        logger.warning("%d items exceed the compiled search limit; using the python backend",
                       n_items)
        return "python"
    if backend != "auto":
        return backend
    if n_transactions >= AUTO_COMPILED_MIN_TRANSACTIONS and n_items <= COMPILED_MAX_ITEMS:
        return "numba"
    return "python"


def warm_up(backend: str = "auto"):
    """Load the compiled search, so a first timed call does not pay for it."""
    if backend == "python":
        return
    from ._compiled import mine_compiled

    tiny = SingleDatasetView.of([Transaction((0, 1), Origin.TARGET),
                                 Transaction((0,), Origin.TARGET)])
    mine_compiled(tiny, Fraction(1, 2), None)


def mine_ccps(pair: EncodedDatasetPair, min_support, min_growth_rate,
              backend: str = "auto") -> list:
    """All closed contrast patterns of ``pair`` in canonical order.

    ``min_support`` is the fraction of target transactions a pattern must
    occur in; ``min_growth_rate`` the target-to-background support ratio it
    must reach (strictly above 1).
    """
    sigma = check_min_support(min_support)
    rho = check_min_growth_rate(min_growth_rate)
    chosen = _resolve_backend(backend, len(pair.transactions), pair.n_items)
    if chosen == "python":
        return EPClose(pair, sigma, rho).run()
    from ._compiled import mine_compiled

    result = mine_compiled(pair, sigma, rho)
    n_b, n_t = pair.n_b, pair.n_t
    ccps = [CCP(items, counts, growth_rate(counts, n_b, n_t))
            for items, counts in result.ccps()]
    return sort_ccps(ccps)


@dataclass(frozen=True)
class SingleDatasetView:
    """One dataset presented to the closed-itemset search as a target-only join."""

    transactions: tuple

    @classmethod
    def of(cls, transactions: Iterable) -> SingleDatasetView:
        return cls(tuple(Transaction(t.items, Origin.TARGET) for t in transactions))

    @property
    def n_b(self) -> int:
        return 0

    @property
    def n_t(self) -> int:
        return len(self.transactions)


def mine_closed_itemsets(transactions: Iterable, min_occurrences: int,
                         backend: str = "auto") -> dict:
    """Closed itemsets of one dataset occurring at least ``min_occurrences`` times.

    Returns ``{items: count}`` with ``items`` a sorted tuple of ids.  The empty
    set is never reported.
    """
    view = SingleDatasetView.of(transactions)
    if view.n_t == 0:
        raise InvalidDatasetError("cannot mine closed itemsets of an empty dataset")
    if min_occurrences < 1:
        raise ValueError("min_occurrences must be at least 1")
    sigma = Fraction(min_occurrences, view.n_t)
    if sigma > 1:
        return {}
    n_items = len({i for t in view.transactions for i in t.items})
    chosen = _resolve_backend(backend, view.n_t, n_items)
    if chosen == "python":
        found = {}
        ClosedMiner(view, sigma, lambda items, c: found.__setitem__(items, c.count_t)).run()
        return found
    from ._compiled import mine_compiled

    result = mine_compiled(view, sigma, None)
    return {items: counts.count_t for items, counts in result.closed()}
