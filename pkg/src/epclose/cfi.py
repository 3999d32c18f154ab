"""Index of discovered closed itemsets answering superset-with-same-count queries."""

from __future__ import annotations

from typing import Iterable, Iterator

from .model import DualCount


class _CFINode:
    __slots__ = ("item", "parent", "children", "counts", "max_join", "depth")

    def __init__(self, item, parent, depth):
        self.item = item
        self.parent = parent
        self.children = {}
        self.counts = None  # DualCount of the pattern ending here, if any
        self.max_join = -1  # largest join count stored in this subtree
        self.depth = depth


class CFITree:
    """Prefix tree of closed itemsets ordered by a fixed item ranking.

    ``order`` lists every item that may appear in a stored pattern, most
    frequent first.  Each item keeps the list of its nodes (the node-link
    chain) and the largest join count stored under any of them, used to
    reject queries without walking the chain.
    """

    def __init__(self, order: Iterable):
        self.rank = {item: r for r, item in enumerate(order)}
        self.root = _CFINode(None, None, 0)
        self.links: dict = {}
        self.item_max: dict = {}
        self._size = 0

    def _sorted(self, items) -> list:
        return sorted(set(items), key=self.rank.__getitem__)

    def closed_check(self, items: Iterable, join_count: int) -> bool:
        """``True`` (pass) unless a stored superset of ``items``, or ``items``
        itself, has exactly ``join_count`` occurrences in the join dataset."""
        path = self._sorted(items)
        if not path:
            return not self._subtree_has(self.root, join_count)
        last = path[-1]
        if self.item_max.get(last, -1) < join_count:
            return True
        required = path[:-1]
        for node in self.links[last]:
            if node.max_join < join_count or node.depth < len(path):
                continue
            if required and not _ancestors_contain(node, required):
                continue
            if self._subtree_has(node, join_count):
                return False
        return True

    @staticmethod
    def _subtree_has(node, join_count) -> bool:
        stack = [node]
        while stack:
            n = stack.pop()
            if n.counts is not None and n.counts.join == join_count:
                return True
            stack.extend(c for c in n.children.values() if c.max_join >= join_count)
        return False

    def insert(self, items: Iterable, counts: DualCount):
        """Store a closed pattern; re-inserting an equal pattern is a no-op."""
        path = self._sorted(items)
        join = counts.join
        node = self.root
        node.max_join = max(node.max_join, join)
        for item in path:
            child = node.children.get(item)
            if child is None:
                child = _CFINode(item, node, node.depth + 1)
                node.children[item] = child
                self.links.setdefault(item, []).append(child)
            child.max_join = max(child.max_join, join)
            if join > self.item_max.get(item, -1):
                self.item_max[item] = join
            node = child
        if node.counts is None:
            node.counts = counts
            self._size += 1

    def patterns(self) -> Iterator:
        """Yield ``(items, counts)`` for every stored pattern, items in rank order."""
        stack = [(self.root, ())]
        while stack:
            node, path = stack.pop()
            if node.counts is not None:
                yield path, node.counts
            for child in node.children.values():
                stack.append((child, path + (child.item,)))

    def __contains__(self, items) -> bool:
        node = self.root
        for item in self._sorted(items):
            node = node.children.get(item)
            if node is None:
                return False
        return node.counts is not None

    def get(self, items) -> DualCount | None:
        node = self.root
        for item in self._sorted(items):
            node = node.children.get(item)
            if node is None:
                return None
        return node.counts

    def __len__(self):
        return self._size


def _ancestors_contain(node, required) -> bool:
    # required is rank-sorted; walk upwards matching from its end
    k = len(required) - 1
    parent = node.parent
    while parent is not None and parent.item is not None and k >= 0:
        if parent.item == required[k]:
            k -= 1
        parent = parent.parent
    return k < 0
