"""Compiled version of the EPClose search.

The search is the one in :mod:`epclose.engine`, over array-backed trees:
each node is one int32 row of a node table (item rank, parent, first child,
next sibling, node-link, background count, target count), so a walk up the
tree touches at most one cache line per node.  Items are F-list ranks, and
itemsets are bitmasks of ``W`` 64-bit words.

Closed-checking uses projected CFI lists (FP-close's conditional CFI-trees)
instead of one global index.  Each recursion depth ``d`` keeps a copy of the
masks and join counts of the stored itemsets that contain the current scope
(base plus full-support items) of depth ``d``.  A query at depth ``d`` only
needs that list, because any stored superset of the query contains the scope.
A new itemset found at depth ``d`` is appended to the lists of depths
``0..d``.  Lists hold copies rather than indices so that scans run over
contiguous memory.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numba import njit
from numba.typed import List

from ._validation import min_count
from .fptree import build_flist
from .model import DualCount, Origin

# columns of a tree's node table; a node's row is 32 bytes
ITEM, PARENT, CHILD, SIBLING, LINK, CB, CT = 0, 1, 2, 3, 4, 5, 6

#: Node ids and node counts are int32, which bounds the input size.
MAX_OCCURRENCES = 2 ** 31 - 2


@njit(cache=True)
def _new_tree(capacity, m):
    nodes = np.empty((capacity, 8), np.int32)
    head = np.full(m, -1, np.int32)
    tail = np.full(m, -1, np.int32)
    header = np.zeros((m, 2), np.int64)
    meta = np.zeros(2, np.int64)  # node count, branching flag
    nodes[0, ITEM] = -1
    nodes[0, PARENT] = -1
    nodes[0, CHILD] = -1
    nodes[0, SIBLING] = -1
    nodes[0, LINK] = -1
    nodes[0, CB] = 0
    nodes[0, CT] = 0
    meta[0] = 1
    return (nodes, head, tail, header, meta)


@njit(cache=True)
def _reuse_tree(tree, capacity, m):
    """Empty ``tree`` for reuse, or a new tree if it cannot hold ``capacity`` nodes."""
    nodes, head, tail, header, meta = tree
    if nodes.shape[0] < capacity:
        return _new_tree(max(capacity, 2 * nodes.shape[0]), m)
    head[:] = -1
    tail[:] = -1
    header[:] = 0
    nodes[0, CHILD] = -1
    meta[0] = 1
    meta[1] = 0
    return tree


@njit(cache=True)
def _insert(tree, path, n, vb, vt):
    """Insert ``path[:n]`` (ascending ranks) with the given counts."""
    nodes, head, tail, header, meta = tree
    node = 0
    for k in range(n):
        r = path[k]
        c = nodes[node, CHILD]
        if c != -1 and nodes[c, ITEM] != r:
            # move the match to the front: consecutive paths share prefixes
            prev = c
            c = nodes[c, SIBLING]
            while c != -1 and nodes[c, ITEM] != r:
                prev = c
                c = nodes[c, SIBLING]
            if c != -1:
                nodes[prev, SIBLING] = nodes[c, SIBLING]
                nodes[c, SIBLING] = nodes[node, CHILD]
                nodes[node, CHILD] = c
        if c == -1:
            c = meta[0]
            meta[0] += 1
            first = nodes[node, CHILD]
            if first != -1:
                meta[1] = 1
            nodes[c, ITEM] = r
            nodes[c, PARENT] = node
            nodes[c, CHILD] = -1
            nodes[c, SIBLING] = first
            nodes[c, LINK] = -1
            nodes[node, CHILD] = c
            nodes[c, CB] = 0
            nodes[c, CT] = 0
            if head[r] == -1:
                head[r] = c
            else:
                nodes[tail[r], LINK] = c
            tail[r] = c
        nodes[c, CB] += vb
        nodes[c, CT] += vt
        header[r, 0] += vb
        header[r, 1] += vt
        node = c


@njit(cache=True)
def _passes(masks, join, n_entries, query, count):
    """Closed-check: no listed itemset contains ``query`` with join count ``count``."""
    W = query.shape[0]
    for e in range(n_entries):
        if join[e] != count:
            continue
        contained = True
        for w in range(W):
            if masks[e, w] & query[w] != query[w]:
                contained = False
                break
        if contained:
            return False
    return True


@njit(cache=True)
def _set_bit(mask, r):
    mask[r >> 6] |= np.uint64(1) << np.uint64(r & 63)


@njit(cache=True)
def _store(masks, ocb, oct_, oflag, n_out, mask, vb, vt, flag):
    if n_out == masks.shape[0]:
        cap = masks.shape[0] * 2
        grown = np.zeros((cap, masks.shape[1]), np.uint64)
        grown[:n_out] = masks
        masks = grown
        ocb = np.concatenate((ocb, np.zeros(cap - n_out, np.int64)))
        oct_ = np.concatenate((oct_, np.zeros(cap - n_out, np.int64)))
        oflag = np.concatenate((oflag, np.zeros(cap - n_out, np.bool_)))
    masks[n_out] = mask
    ocb[n_out] = vb
    oct_[n_out] = vt
    oflag[n_out] = flag
    return masks, ocb, oct_, oflag


@njit(cache=True)
def _list_append(lmasks, ljoins, sizes, depth, mask, join):
    masks = lmasks[depth]
    joins = ljoins[depth]
    n = sizes[depth]
    if n == joins.shape[0]:
        grown = np.empty((2 * n, masks.shape[1]), np.uint64)
        grown[:n] = masks
        lmasks[depth] = grown
        masks = grown
        grown_join = np.empty(2 * n, np.int64)
        grown_join[:n] = joins
        ljoins[depth] = grown_join
        joins = grown_join
    masks[n] = mask
    joins[n] = join
    sizes[depth] = n + 1


@njit(cache=True)
def _is_ccp(vb, vt, min_t, n_b, n_t, rho_num, rho_den, check):
    if not check or vt < min_t:
        return False
    return vt * n_b * rho_den >= rho_num * vb * n_t


@njit(cache=True)
def _search(indptr, ranks, is_target, m, W, min_t, n_b, n_t, rho_num, rho_den, check):
    n_rows = indptr.shape[0] - 1
    levels = m + 2
    # one reusable tree per depth; the search never holds two at the same depth
    trees = List()
    trees.append(_new_tree(ranks.shape[0] + 1, m))
    for _ in range(1, levels):
        trees.append(_new_tree(1, m))
    for t in range(n_rows):
        lo = indptr[t]
        if indptr[t + 1] > lo:
            vt = np.int64(is_target[t])
            _insert(trees[0], ranks[lo:indptr[t + 1]], indptr[t + 1] - lo, 1 - vt, vt)

    cap = 1024
    masks = np.zeros((cap, W), np.uint64)
    ocb = np.zeros(cap, np.int64)
    oct_ = np.zeros(cap, np.int64)
    oflag = np.zeros(cap, np.bool_)
    n_out = 0

    lmasks = List()
    ljoins = List()
    for _ in range(levels):
        lmasks.append(np.zeros((16, W), np.uint64))
        ljoins.append(np.zeros(16, np.int64))
    sizes = np.zeros(levels, np.int64)
    scope = np.zeros((levels, W), np.uint64)
    pos = np.zeros(levels, np.int64)

    width = max(m, 1)
    fcb = np.zeros(width, np.int64)
    fct = np.zeros(width, np.int64)
    keep = np.zeros(width, np.bool_)
    buf = np.empty(width, np.int32)
    query = np.zeros(W, np.uint64)
    closed = np.zeros(W, np.uint64)
    cand = np.zeros(W, np.uint64)
    # a conditional pattern base never holds more item occurrences or paths
    # than the input, since its paths stand for disjoint sets of transactions
    path_items = np.empty(max(ranks.shape[0], 1), np.int32)
    path_end = np.empty(max(n_rows, 1), np.int64)
    path_cb = np.empty(max(n_rows, 1), np.int64)
    path_ct = np.empty(max(n_rows, 1), np.int64)

    depth = 0
    pos[0] = m - 1
    # a non-branching tree is handled by the chain enumeration below
    pending_chain = trees[0][4][1] == 0
    chain_depth = -1  # the depth whose list checks the chain (-1: the input tree)

    while True:
        if pending_chain:
            # closed candidates of a single-chain tree: cut wherever the count drops
            nodes, head, tail, header, meta = trees[chain_depth + 1]
            check_level = max(chain_depth, 0)
            for w in range(W):
                cand[w] = scope[chain_depth + 1, w] if chain_depth >= 0 else np.uint64(0)
            node = nodes[0, CHILD]
            while node != -1:
                _set_bit(cand, nodes[node, ITEM])
                nxt = nodes[node, CHILD]
                vb = nodes[node, CB]
                vt = nodes[node, CT]
                if nxt == -1 or nodes[nxt, CB] + nodes[nxt, CT] != vb + vt:
                    if _passes(lmasks[check_level], ljoins[check_level], sizes[check_level],
                               cand, vb + vt):
                        flag = _is_ccp(vb, vt, min_t, n_b, n_t, rho_num, rho_den, check)
                        masks, ocb, oct_, oflag = _store(
                            masks, ocb, oct_, oflag, n_out, cand, vb, vt, flag)
                        for e in range(check_level + 1):
                            _list_append(lmasks, ljoins, sizes, e, cand, vb + vt)
                        n_out += 1
                node = nxt
            pending_chain = False
            if chain_depth < 0:
                break

        nodes, head, tail, header, meta = trees[depth]
        r = pos[depth]
        while r >= 0 and head[r] == -1:
            r -= 1
        if r < 0:
            depth -= 1
            if depth < 0:
                break
            continue
        pos[depth] = r - 1

        vb = header[r, 0]
        vt = header[r, 1]
        bj = vb + vt
        for w in range(W):
            query[w] = scope[depth, w]
        _set_bit(query, r)
        if not _passes(lmasks[depth], ljoins[depth], sizes[depth], query, bj):
            continue

        # conditional pattern base of r, recorded leaf-first, with item counts
        for i in range(r):
            fcb[i] = 0
            fct[i] = 0
        n_paths = 0
        n_items = 0
        node = head[r]
        while node != -1:
            nb = nodes[node, CB]
            nt = nodes[node, CT]
            start = n_items
            p = nodes[node, PARENT]
            while p > 0:
                i = nodes[p, ITEM]
                fcb[i] += nb
                fct[i] += nt
                path_items[n_items] = i
                n_items += 1
                p = nodes[p, PARENT]
            if n_items > start:
                path_end[n_paths] = n_items
                path_cb[n_paths] = nb
                path_ct[n_paths] = nt
                n_paths += 1
            node = nodes[node, LINK]

        for w in range(W):
            closed[w] = query[w]
        n_keep = 0
        for i in range(r):
            keep[i] = False
            j = fcb[i] + fct[i]
            if j == 0:
                continue
            if j == bj:
                _set_bit(closed, i)
            elif fct[i] >= min_t:
                keep[i] = True
                n_keep += 1

        # closed contains query, so it passes the check query just passed
        flag = _is_ccp(vb, vt, min_t, n_b, n_t, rho_num, rho_den, check)
        masks, ocb, oct_, oflag = _store(
            masks, ocb, oct_, oflag, n_out, closed, vb, vt, flag)
        for e in range(depth + 1):
            _list_append(lmasks, ljoins, sizes, e, closed, bj)
        n_out += 1
        if n_keep == 0:
            continue

        d2 = depth + 1
        sub = _reuse_tree(trees[d2], n_items + 1, m)
        trees[d2] = sub
        start = 0
        for k in range(n_paths):
            end = path_end[k]
            n = 0
            for e in range(end - 1, start - 1, -1):
                if keep[path_items[e]]:
                    buf[n] = path_items[e]
                    n += 1
            if n > 0:
                _insert(sub, buf, n, path_cb[k], path_ct[k])
            start = end

        for w in range(W):
            scope[d2, w] = closed[w]
        if sub[4][1] == 0:
            # scope[d2] holds the chain's starting itemset; checks use this depth's list
            pending_chain = True
            chain_depth = depth
            continue

        # the child's list: stored itemsets containing its scope
        parent_masks = lmasks[depth]
        parent_joins = ljoins[depth]
        sizes[d2] = 0
        for e in range(sizes[depth]):
            contained = True
            for w in range(W):
                if parent_masks[e, w] & closed[w] != closed[w]:
                    contained = False
                    break
            if contained:
                _list_append(lmasks, ljoins, sizes, d2, parent_masks[e], parent_joins[e])
        pos[d2] = r - 1
        depth = d2

    return masks[:n_out].copy(), ocb[:n_out].copy(), oct_[:n_out].copy(), oflag[:n_out].copy()


@dataclass
class CompiledResult:
    """Raw output of the compiled search plus what is needed to decode it."""

    masks: np.ndarray
    count_b: np.ndarray
    count_t: np.ndarray
    is_ccp: np.ndarray
    rank_to_item: np.ndarray
    fsi: tuple
    fsi_counts: DualCount | None
    fsi_is_ccp: bool

    def __len__(self):
        return len(self.count_b) + (self.fsi_counts is not None)

    def _decode(self, rows):
        if len(rows) == 0:
            return
        bits = np.unpackbits(self.masks[rows].view(np.uint8), axis=1, bitorder="little")
        row_idx, ranks = np.nonzero(bits)
        items = self.rank_to_item[ranks]
        bounds = np.searchsorted(row_idx, np.arange(len(rows) + 1))
        extra = self.fsi
        cb, ct = self.count_b[rows].tolist(), self.count_t[rows].tolist()
        items = items.tolist()
        bounds = bounds.tolist()
        for k in range(len(rows)):
            chosen = items[bounds[k]:bounds[k + 1]]
            yield tuple(sorted(chosen + list(extra)) if extra else sorted(chosen)), DualCount(cb[k], ct[k])

    def closed(self):
        """``(items, DualCount)`` for every closed itemset found."""
        if self.fsi_counts is not None:
            yield self.fsi, self.fsi_counts
        yield from self._decode(np.arange(len(self.count_b)))

    def ccps(self):
        """``(items, DualCount)`` for the closed itemsets flagged as CCPs."""
        if self.fsi_counts is not None and self.fsi_is_ccp:
            yield self.fsi, self.fsi_counts
        yield from self._decode(np.flatnonzero(self.is_ccp))


def encode_ranks(view, rank: dict):
    """CSR arrays of per-transaction F-list ranks, ascending."""
    lengths = []
    flat = []
    for t in view.transactions:
        rs = sorted(rank[i] for i in t.items if i in rank)
        lengths.append(len(rs))
        flat.extend(rs)
    indptr = np.zeros(len(lengths) + 1, np.int64)
    np.cumsum(lengths, out=indptr[1:])
    is_target = np.fromiter((t.origin is Origin.TARGET for t in view.transactions),
                            dtype=np.int64, count=len(view.transactions))
    return indptr, np.asarray(flat, dtype=np.int32), is_target


_INT64_SAFE = 2 ** 62


def mine_compiled(view, sigma, rho) -> CompiledResult:
    """Run the compiled search; ``rho=None`` skips contrast-pattern flagging."""
    flist, fsi, candidate = build_flist(view, sigma)
    m = len(flist)
    W = max(1, (m + 63) // 64)
    n_b, n_t = view.n_b, view.n_t
    min_t = min_count(sigma, n_t)
    check = rho is not None
    rho_num, rho_den = (rho.numerator, rho.denominator) if check else (1, 1)
    # beyond this the in-kernel cross-multiplication could overflow int64
    exact_in_kernel = check and n_t * n_b * max(rho_num, rho_den) < _INT64_SAFE
    indptr, ranks, is_target = encode_ranks(view, flist.rank)
    if len(ranks) > MAX_OCCURRENCES or len(is_target) > MAX_OCCURRENCES:
        raise ValueError("input too large for the compiled search; use backend='python'")
    if not exact_in_kernel:
        rho_num = rho_den = 1  # unused by the kernel; keeps the arguments in int64
    masks, cb, ct, flag = _search(indptr, ranks, is_target, m, W, min_t, n_b, n_t,
                                  rho_num, rho_den, exact_in_kernel)
    fsi_items = tuple(sorted(fsi))
    fsi_counts = candidate.counts if candidate is not None else None
    fsi_ccp = False
    if check and candidate is not None:
        fsi_ccp = candidate.counts.count_t >= sigma * n_t and _exact_growth_ok(
            candidate.counts.count_b, candidate.counts.count_t, n_b, n_t, rho)
    if check and not exact_in_kernel:
        flag = np.array([
            c_t >= sigma * n_t and _exact_growth_ok(c_b, c_t, n_b, n_t, rho)
            for c_b, c_t in zip(cb.tolist(), ct.tolist())], dtype=bool)
    return CompiledResult(masks, cb, ct, flag, np.asarray(flist.items, dtype=np.int64),
                          fsi_items, fsi_counts, fsi_ccp)


def _exact_growth_ok(count_b, count_t, n_b, n_t, rho) -> bool:
    return count_t * n_b * rho.denominator >= rho.numerator * count_b * n_t
