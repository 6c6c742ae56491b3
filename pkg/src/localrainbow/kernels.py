"""Counting kernels shared by the extraction lemmas and the finders.

Everything here is deterministic: pigeonhole selections return the
maximum-size class with lexicographic tie-breaking, and peeling chunks
color classes in ascending item order.
"""

from __future__ import annotations

from math import comb

import numpy as np


def edge_index(n: int, a, b):
    """Lexicographic index of host edge {a,b} among all pairs of [0,n).

    Pairs are ordered (0,1),(0,2),...,(0,n-1),(1,2),...  Accepts scalars or
    broadcastable arrays; endpoints need not be pre-sorted.
    """
    a = np.asarray(a, dtype=np.int64)
    b = np.asarray(b, dtype=np.int64)
    lo = np.minimum(a, b)
    hi = np.maximum(a, b)
    return lo * (2 * n - lo - 1) // 2 + (hi - lo - 1)


def edge_index_int(n: int, a: int, b: int) -> int:
    lo, hi = (a, b) if a < b else (b, a)
    return lo * (2 * n - lo - 1) // 2 + (hi - lo - 1)


def all_edges(n: int) -> np.ndarray:
    """(m, 2) array of host edges in index order."""
    a, b = np.triu_indices(n, k=1)
    return np.column_stack((a, b)).astype(np.int64)


def min_bucket_pairs(total: int, classes: int) -> int:
    """Minimum of sum-of-C(size,2) over distributions of ``total`` items
    into ``classes`` buckets (achieved by the near-equal split)."""
    if classes <= 0 or total <= 0:
        return 0
    q, r = divmod(total, classes)
    return r * comb(q + 1, 2) + (classes - r) * comb(q, 2)


def min_bucket_tuples(total: int, classes: int, size: int) -> int:
    """Same as :func:`min_bucket_pairs` for C(size_i, size) summands."""
    if classes <= 0 or total <= 0:
        return 0
    q, r = divmod(total, classes)
    return r * comb(q + 1, size) + (classes - r) * comb(q, size)


def colliding_pairs_per_row(matrix: np.ndarray, num_colors: int) -> np.ndarray:
    """For each row, the number of unordered position pairs with equal
    values, computed by color bucketing (sum of C(bucket,2)).

    Processed in row blocks to keep the scratch index arrays small.
    """
    rows, cols = matrix.shape
    out = np.empty(rows, dtype=np.int64)
    block = max(1, 4_000_000 // max(cols, 1))
    for start in range(0, rows, block):
        chunk = matrix[start : start + block]
        counts = np.zeros((chunk.shape[0], num_colors + 1), dtype=np.int64)
        row_idx = np.repeat(np.arange(chunk.shape[0]), cols)
        np.add.at(counts, (row_idx, chunk.ravel().astype(np.int64)), 1)
        out[start : start + block] = (counts * (counts - 1) // 2).sum(axis=1)
    return out


def largest_class(values) -> tuple[int, np.ndarray]:
    """(class value, member indices) of the largest class, smallest value
    on ties.  ``values`` is a 1-d integer array."""
    values = np.asarray(values)
    uniq, counts = np.unique(values, return_counts=True)
    best = int(uniq[np.argmax(counts)])  # np.unique sorts, argmax takes first
    return best, np.flatnonzero(values == best)


def best_equal_pair(matrix: np.ndarray, pool: int | None = None) -> tuple[int, int, int]:
    """Column pair (i, j), i < j, maximizing the number of rows on which
    the two columns agree.  Ties break to the lexicographically least
    (i, j).  Only the first ``pool`` columns are candidates.

    Returns (count, i, j); count is 0 when no rows agree anywhere.
    """
    _, cols = matrix.shape
    limit = cols if pool is None else min(pool, cols)
    if limit < 2:
        return (-1, 0, 0)
    best_count, best_i, best_j = -1, 0, 1
    for i in range(limit - 1):
        counts = (matrix[:, i + 1 : limit] == matrix[:, i : i + 1]).sum(axis=0)
        j = int(np.argmax(counts))
        if int(counts[j]) > best_count:
            best_count, best_i, best_j = int(counts[j]), i, i + 1 + j
    return best_count, best_i, best_j


def equal_rows(matrix: np.ndarray, i: int, j: int) -> np.ndarray:
    """Row indices on which columns i and j agree."""
    return np.flatnonzero(matrix[:, i] == matrix[:, j])


def best_equal_triple(matrix: np.ndarray, pool: int | None = None) -> tuple[int, int, int, int]:
    """Column triple (i, j, l), i < j < l, maximizing the number of rows on
    which all three columns agree; lexicographically least on ties.

    Uses the identity count(i,j,l) = (Q_i^T Q_i)[j,l] with
    Q_i[r,c] = [matrix[r,c] == matrix[r,i]].
    """
    _, cols = matrix.shape
    limit = cols if pool is None else min(pool, cols)
    if limit < 3:
        return (-1, 0, 1, 2)
    best = (-1, 0, 1, 2)
    for i in range(limit - 2):
        q = (matrix[:, i + 1 : limit] == matrix[:, i : i + 1]).astype(np.float32)
        gram = q.T @ q
        width = gram.shape[0]
        iu = np.triu_indices(width, k=1)
        counts = gram[iu]
        flat = int(np.argmax(counts))
        count = int(counts[flat])
        if count > best[0]:
            j = int(iu[0][flat]) + i + 1
            l = int(iu[1][flat]) + i + 1
            best = (count, i, j, l)
    return best


def rows_equal_on(matrix: np.ndarray, cols: tuple[int, ...]) -> np.ndarray:
    """Row indices on which all listed columns agree."""
    base = matrix[:, cols[0]]
    mask = np.ones(matrix.shape[0], dtype=bool)
    for c in cols[1:]:
        mask &= matrix[:, c] == base
    return np.flatnonzero(mask)


def peel_disjoint_tuples(keys: np.ndarray, size: int) -> list[tuple[int, ...]]:
    """Greedily extract disjoint ``size``-tuples of item indices whose keys
    are all equal, until every class has fewer than ``size`` leftovers.

    Items are chunked per class in ascending index order; classes are
    processed in ascending key order.  Returns the list of tuples; the
    achieved coverage is ``size * len(result) / len(keys)``.
    """
    keys = np.asarray(keys)
    order = np.argsort(keys, kind="stable")
    sorted_keys = keys[order]
    boundaries = np.flatnonzero(np.diff(sorted_keys)) + 1
    groups = np.split(order, boundaries)
    out: list[tuple[int, ...]] = []
    for group in groups:
        for start in range(0, len(group) - size + 1, size):
            out.append(tuple(int(x) for x in group[start : start + size]))
    return out


def tuple_membership(tuples: list[tuple[int, ...]], total: int) -> np.ndarray:
    """member[i] = index of the tuple containing item i, or -1."""
    member = np.full(total, -1, dtype=np.int64)
    for t_idx, tup in enumerate(tuples):
        for item in tup:
            member[item] = t_idx
    return member


def joint_keys(*color_arrays: np.ndarray) -> np.ndarray:
    """Collapse several color arrays into one joint key per position."""
    arrays = [np.asarray(a, dtype=np.int64) for a in color_arrays]
    key = arrays[0].copy()
    for extra in arrays[1:]:
        key = key * (int(extra.max(initial=0)) + 1) + extra
    return key
