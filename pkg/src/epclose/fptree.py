"""F-list construction and FP-trees that keep background and target counts apart.

Two departures from a textbook FP-tree:

* every node carries a :class:`~epclose.model.DualCount` instead of a single
  count, so conditional trees still know how a prefix splits between the
  background and target datasets;
* items present in every transaction of the current scope (full-support
  items) are kept out of the tree and tracked as a separate set, as are
  items whose target count is below the support threshold.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Iterator, Sequence

from .model import DualCount, EncodedDatasetPair, Origin, Pattern


@dataclass(frozen=True)
class FList:
    """Surviving items in descending join-count order, ties by ascending id."""

    items: tuple
    counts: dict = field(repr=False)
    rank: dict = field(repr=False)

    @classmethod
    def from_counts(cls, counts: dict) -> FList:
        items = tuple(sorted(counts, key=lambda i: (-counts[i].join, i)))
        return cls(items, dict(counts), {item: r for r, item in enumerate(items)})

    def restrict(self, counts: dict) -> FList:
        """Sub-list over the items of ``counts`` keeping this list's order."""
        items = tuple(sorted(counts, key=self.rank.__getitem__))
        return FList(items, dict(counts), {item: r for r, item in enumerate(items)})

    def __len__(self):
        return len(self.items)

    def __iter__(self):
        return iter(self.items)

    def __contains__(self, item):
        return item in self.rank


def count_items(pair: EncodedDatasetPair) -> dict:
    """Per-item dual counts over the join dataset."""
    cb: Counter = Counter()
    ct: Counter = Counter()
    for t in pair.transactions:
        (ct if t.origin is Origin.TARGET else cb).update(t.items)
    return {i: DualCount(cb[i], ct[i]) for i in set(cb) | set(ct)}


def build_flist(pair: EncodedDatasetPair, sigma: Fraction):
    """Scan the join dataset once and split its items three ways.

    Returns ``(flist, fsi, candidate)``: the ordered surviving items, the set of
    items present in every transaction, and the pattern formed by those items
    (``None`` when there are none).  Items whose target count is below
    ``sigma * n_t`` are dropped outright.
    """
    n_b, n_t = pair.n_b, pair.n_t
    n = n_b + n_t
    fsi = set()
    kept = {}
    for item, counts in count_items(pair).items():
        if counts.join == n:
            fsi.add(item)
        elif counts.count_t >= sigma * n_t:
            kept[item] = counts
    candidate = Pattern(tuple(sorted(fsi)), DualCount(n_b, n_t)) if fsi else None
    return FList.from_counts(kept), frozenset(fsi), candidate


class FPNode:
    __slots__ = ("item", "count_b", "count_t", "parent", "children", "link")

    def __init__(self, item, parent):
        self.item = item
        self.parent = parent
        self.count_b = 0
        self.count_t = 0
        self.children = {}
        self.link = None

    @property
    def counts(self) -> DualCount:
        return DualCount(self.count_b, self.count_t)

    def __repr__(self):
        return f"FPNode({self.item!r}, {self.count_t}:{self.count_b})"


class _HeaderEntry:
    __slots__ = ("head", "tail", "count_b", "count_t")

    def __init__(self):
        self.head = self.tail = None
        self.count_b = self.count_t = 0


class FPTree:
    """Prefix tree over F-list-ordered transactions with per-item node-links.

    ``base`` is the pattern this tree is conditioned on (empty for the tree
    built from the whole join dataset).
    """

    def __init__(self, rank: dict, base: Pattern):
        self.rank = rank
        self.base = base
        self.root = FPNode(None, None)
        self.header: dict = {}
        self.branching = False

    def insert(self, items: Sequence, count_b: int, count_t: int):
        """Insert one path; ``items`` must already be in rank order."""
        node = self.root
        for item in items:
            child = node.children.get(item)
            if child is None:
                if node.children:
                    self.branching = True
                child = FPNode(item, node)
                node.children[item] = child
                entry = self.header.get(item)
                if entry is None:
                    entry = self.header[item] = _HeaderEntry()
                if entry.tail is None:
                    entry.head = child
                else:
                    entry.tail.link = child
                entry.tail = child
            else:
                entry = self.header[item]
            child.count_b += count_b
            child.count_t += count_t
            entry.count_b += count_b
            entry.count_t += count_t
            node = child

    @property
    def is_empty(self) -> bool:
        return not self.root.children

    def header_items(self) -> list:
        """Items present in the tree, most frequent first."""
        return sorted(self.header, key=self.rank.__getitem__)

    def header_counts(self, item) -> DualCount:
        entry = self.header[item]
        return DualCount(entry.count_b, entry.count_t)

    def nodes(self, item) -> Iterator[FPNode]:
        """Walk the node-link chain of ``item``."""
        node = self.header[item].head
        while node is not None:
            yield node
            node = node.link

    def dump(self, symbols: Sequence[str] | None = None) -> str:
        """Indented text rendering, one ``item(count_t:count_b)`` node per line."""
        lines = []

        def walk(node, depth):
            for child in sorted(node.children.values(), key=lambda n: self.rank[n.item]):
                name = symbols[child.item] if symbols is not None else str(child.item)
                lines.append(f"{'  ' * depth}{name}({child.count_t}:{child.count_b})")
                walk(child, depth + 1)

        walk(self.root, 0)
        return "\n".join(lines)

    def __repr__(self):
        return f"FPTree(base={self.base.items}, items={len(self.header)})"


#: A conditional pattern base: ``(prefix items root-first, DualCount)`` pairs.
PatternBase = list


def build_fptree(source, flist: FList, base: Pattern | None = None) -> FPTree:
    """Build an FP-tree from a dataset pair or from a conditional pattern base.

    Items outside ``flist`` are dropped from every path and the rest are
    reordered by F-list rank before insertion.  Duplicate transactions are
    inserted one by one.
    """
    rank = flist.rank
    is_dataset = hasattr(source, "transactions")
    if base is None:
        if not is_dataset:
            raise TypeError("a conditional tree needs an explicit base pattern")
        base = Pattern((), DualCount(source.n_b, source.n_t))
    tree = FPTree(rank, base)
    if is_dataset:
        rows = ((t.items, (0, 1) if t.origin is Origin.TARGET else (1, 0))
                for t in source.transactions)
    else:
        rows = ((prefix, (c.count_b, c.count_t)) for prefix, c in source)
    for items, (cb, ct) in rows:
        path = sorted((i for i in items if i in rank), key=rank.__getitem__)
        if path:
            tree.insert(path, cb, ct)
    return tree


def conditional_pattern_base(tree: FPTree, item):
    """Prefix paths of ``item`` and the dual count of every item over them.

    Returns ``(pattern_base, frequency_map)``.  Each prefix lists the
    ancestors of one ``item`` node from the root down, paired with that node's
    counts; ``frequency_map`` sums those counts per item.
    """
    if item not in tree.header:
        raise KeyError(f"item {item!r} is not in the tree header")
    base = []
    cb: Counter = Counter()
    ct: Counter = Counter()
    for node in tree.nodes(item):
        prefix = []
        parent = node.parent
        while parent.item is not None:
            prefix.append(parent.item)
            parent = parent.parent
        prefix.reverse()
        base.append((tuple(prefix), node.counts))
        for i in prefix:
            cb[i] += node.count_b
            ct[i] += node.count_t
    frequency = {i: DualCount(cb[i], ct[i]) for i in set(cb) | set(ct)}
    return base, frequency


def extract_single_branch(tree: FPTree):
    """``[(item, DualCount), ...]`` root to leaf if the tree never branches."""
    if tree.branching:
        return None
    branch = []
    node = tree.root
    while node.children:
        (node,) = node.children.values()
        branch.append((node.item, node.counts))
    return branch


def iter_paths(tree: FPTree) -> Iterable:
    """Every root-to-node path with the node's counts (for invariant checks)."""
    stack = [(tree.root, ())]
    while stack:
        node, path = stack.pop()
        for child in node.children.values():
            child_path = path + (child.item,)
            yield child_path, child.counts
            stack.append((child, child_path))
