"""The four pigeonhole extraction primitives.

Each operation partitions the host deterministically (by vertex index;
optional seeded splits), buckets colors per outside vertex, and returns a
structured witness whose count is re-checkable by an independent recount.
The stated lower bounds hold for any split once the host passes the
per-lemma threshold (pure convexity), so trying extra splits only
strengthens the witness.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .kernels import colliding_pairs_per_row, min_bucket_pairs
from .model import ColoringFamily, ScaleGuardError, canonical_edge
from .rng import stream_values

Edge = tuple[int, int]


@dataclass(frozen=True)
class StarExtraction:
    """Vertex x, a set S monochromatic under f_x on the edges xs, the
    complement P, and the number of collisions (unordered {s,s'}, p) with
    f_p(xs) = f_p(xs')."""

    x: int
    s_vertices: tuple[int, ...]
    p_vertices: tuple[int, ...]
    triple_count: int | None
    star_color: int


@dataclass(frozen=True)
class MatchingExtraction:
    y_vertices: tuple[int, ...]
    matching: tuple[Edge, ...]
    triple_count: int | None


@dataclass(frozen=True)
class BipartitionExtraction:
    a_vertices: tuple[int, ...]
    b_vertices: tuple[int, ...]
    triple_count: int | None


@dataclass(frozen=True)
class CliqueExtraction:
    x_vertices: tuple[int, ...]
    l_vertices: tuple[int, ...]
    pair_count: int | None


# ---------------------------------------------------------------------------
# Lemma thresholds.  Counts use unordered pairs throughout; each n0 is the
# smallest size for which the floor-exact convexity chain already yields
# the stated bound.


def star_bound(n: int, k: int) -> float:
    return n**3 / (24 * k**3)


def star_threshold(k: int, limit: int = 10**6) -> int:
    """Smallest n such that (n/2) * min-split(ceil((n-1)/k), k) reaches
    n^3/(24 k^3); the bound is asserted when also |P| >= n/2."""
    import math

    for n in range(3, limit):
        s0 = math.ceil((n - 1) / k)
        if (n / 2) * min_bucket_pairs(s0, k) >= star_bound(n, k):
            return n
    raise RuntimeError("threshold scan exhausted")


def matching_bound(n: int, k: int) -> float:
    return n**3 / (3 * k)


def matching_threshold(k: int, limit: int = 10**6) -> int:
    """Smallest component size n (host 3n) with n * min-split(n, k)
    >= n^3/(3k); holds for every Y/M split past this point."""
    for n in range(1, limit):
        if n * min_bucket_pairs(n, k) >= matching_bound(n, k):
            return n
    raise RuntimeError("threshold scan exhausted")


bipartition_bound = matching_bound
bipartition_threshold = matching_threshold


def clique_bound(n: int, k: int) -> float:
    return n**5 / (3 * k)


def clique_threshold(k: int, limit: int = 10**6) -> int:
    for n in range(1, limit):
        edges = n * (2 * n - 1)
        if n * min_bucket_pairs(edges, k) >= clique_bound(n, k):
            return n
    raise RuntimeError("threshold scan exhausted")


# ---------------------------------------------------------------------------
# Split helpers


def _shuffled(n: int, seed: int) -> np.ndarray:
    keys = stream_values(seed, np.arange(n, dtype=np.uint64))
    return np.argsort(keys, kind="stable").astype(np.int64)


def _splits(n: int, split_seeds: tuple[int, ...]) -> list[np.ndarray]:
    out = [np.arange(n, dtype=np.int64)]
    out.extend(_shuffled(n, s) for s in split_seeds)
    return out


# ---------------------------------------------------------------------------
# Star extraction (owner x, leaves S, outside P)


def _star_row_colors(family: ColoringFamily, x: int) -> np.ndarray:
    others = np.array([v for v in range(family.n) if v != x], dtype=np.int64)
    return others, family.colors(np.int64(x), np.full(family.n - 1, x), others)


def _best_star_vertex(family: ColoringFamily, block: int = 512, limit: int | None = None) -> int:
    """x maximizing the size of f_x's largest color class on its star,
    over all vertices or the first ``limit`` candidates."""
    n = family.n
    scan = n if limit is None else min(limit, n)
    width = family.k + 1
    best_x, best_size = 0, -1
    others = np.arange(n, dtype=np.int64)
    for start in range(0, scan, block):
        xs = np.arange(start, min(start + block, scan), dtype=np.int64)
        rows = len(xs)
        colors = family.colors(xs[:, None], xs[:, None], others[None, :])
        colors[np.arange(rows), xs] = 0  # self-edge sentinel, bin 0 ignored
        keys = colors + np.arange(rows, dtype=np.int64)[:, None] * width
        counts = np.bincount(keys.ravel(), minlength=rows * width).reshape(rows, width)
        counts[:, 0] = 0
        sizes = counts.max(axis=1)
        j = int(np.argmax(sizes))
        if int(sizes[j]) > best_size:
            best_size, best_x = int(sizes[j]), int(xs[j])
    return best_x


def star_triple_count(family: ColoringFamily, x: int, s_verts, p_verts) -> int:
    """Bucketing count of collisions (unordered {s,s'}, p)."""
    s_arr = np.asarray(s_verts, dtype=np.int64)
    p_arr = np.asarray(p_verts, dtype=np.int64)
    if len(s_arr) < 2 or len(p_arr) == 0:
        return 0
    matrix = family.colors(p_arr[:, None], np.full((len(p_arr), 1), x), s_arr[None, :])
    return int(colliding_pairs_per_row(matrix, family.k).sum())


def star_extract(
    family: ColoringFamily,
    x: int | None = None,
    select: str = "bucket",
    s_cap: int | None = None,
    count: bool = True,
    x_pool: int | None = None,
    scan_guard: int = 2 * 10**9,
) -> StarExtraction:
    """Find x, a monochromatic star set S (largest f_x color class, capped
    to ``s_cap`` smallest members when given), P, and the collision count.

    ``select='bucket'`` (default) scans candidate x for the largest class
    (all of them, or the first ``x_pool``); ``select='triples'`` scans all
    x for the largest resulting collision count, which costs O(n^3/k) and
    is scale-guarded.  Any single x already carries the lemma's guarantee.
    """
    n = family.n
    if n < 3:
        raise ValueError("star extraction needs a host with >= 3 vertices")
    if x is None:
        if select == "bucket":
            x = _best_star_vertex(family, limit=x_pool)
        elif select == "triples":
            if n * n * (n // max(family.k, 1) + 1) > scan_guard:
                raise ScaleGuardError("triple-count scan over all x exceeds the guard")
            best = None
            for cand in range(n):
                ex = star_extract(family, x=cand, s_cap=s_cap)  # counted: selection needs it
                key = (ex.triple_count, -cand)
                if best is None or key > best[0]:
                    best = (key, ex)
            return best[1]
        else:
            raise ValueError(f"unknown select mode {select!r}")
    others, row = _star_row_colors(family, x)
    counts = np.bincount(row, minlength=family.k + 1)
    star_color = int(np.argmax(counts))
    s_all = others[row == star_color]
    s_verts = tuple(int(v) for v in (s_all[:s_cap] if s_cap else s_all))
    chosen = set(s_verts)
    p_verts = tuple(int(v) for v in others if int(v) not in chosen)
    triple_count = star_triple_count(family, x, s_verts, p_verts) if count else None
    return StarExtraction(int(x), s_verts, p_verts, triple_count, star_color)


# ---------------------------------------------------------------------------
# Matching extraction on K_{3n}


def matching_count(family: ColoringFamily, matching, y_verts) -> int:
    m_arr = np.asarray(matching, dtype=np.int64)
    y_arr = np.asarray(y_verts, dtype=np.int64)
    if len(m_arr) < 2 or len(y_arr) == 0:
        return 0
    matrix = family.colors(y_arr[:, None], m_arr[None, :, 0], m_arr[None, :, 1])
    return int(colliding_pairs_per_row(matrix, family.k).sum())


def matching_extract(
    family: ColoringFamily, split_seeds: tuple[int, ...] = (), count: bool = True
) -> MatchingExtraction:
    """Split K_{3n} into Y (n vertices) and a perfect matching M (n edges)
    on the rest; maximize the collision count over the candidate splits
    (index order first, then any seeded shuffles).  ``count=False`` skips
    the O(|Y| |M|) collision count and uses the index split only."""
    if family.n % 3 != 0:
        raise ValueError(f"host size {family.n} is not divisible by 3")
    n = family.n // 3
    best: MatchingExtraction | None = None
    for perm in _splits(family.n, split_seeds):
        matching = tuple(
            canonical_edge(int(perm[2 * i]), int(perm[2 * i + 1])) for i in range(n)
        )
        y_verts = tuple(int(v) for v in perm[2 * n :])
        if not count:
            return MatchingExtraction(y_verts, matching, None)
        total = matching_count(family, matching, y_verts)
        if best is None or total > best.triple_count:
            best = MatchingExtraction(y_verts, matching, total)
    return best


# ---------------------------------------------------------------------------
# Bipartition extraction on K_{2n}


def bipartition_count(family: ColoringFamily, a_verts, b_verts) -> int:
    a_arr = np.asarray(a_verts, dtype=np.int64)
    b_arr = np.asarray(b_verts, dtype=np.int64)
    if len(b_arr) < 2 or len(a_arr) == 0:
        return 0
    matrix = family.colors(a_arr[:, None], a_arr[:, None], b_arr[None, :])
    return int(colliding_pairs_per_row(matrix, family.k).sum())


def bipartition_extract(
    family: ColoringFamily, split_seeds: tuple[int, ...] = (), count: bool = True
) -> BipartitionExtraction:
    """Split K_{2n} into equal halves A (owners) and B; count collisions
    (a, {b1,b2}) with f_a(a b1) = f_a(a b2)."""
    if family.n % 2 != 0:
        raise ValueError(f"host size {family.n} is odd")
    n = family.n // 2
    best: BipartitionExtraction | None = None
    for perm in _splits(family.n, split_seeds):
        a_verts = tuple(int(v) for v in perm[:n])
        b_verts = tuple(int(v) for v in perm[n:])
        if not count:
            return BipartitionExtraction(a_verts, b_verts, None)
        total = bipartition_count(family, a_verts, b_verts)
        if best is None or total > best.triple_count:
            best = BipartitionExtraction(a_verts, b_verts, total)
    return best


# ---------------------------------------------------------------------------
# Clique extraction on K_{3n}


def clique_pair_count(
    family: ColoringFamily, x_verts, l_verts, guard: int = 10**9
) -> int:
    """Collisions (b, {e,e'}) over edges within L, bucketed per b; cost is
    |X| * |E(L)| color evaluations, guarded."""
    x_arr = np.asarray(x_verts, dtype=np.int64)
    l_arr = np.asarray(l_verts, dtype=np.int64)
    ia, ib = np.triu_indices(len(l_arr), k=1)
    ea, eb = l_arr[ia], l_arr[ib]
    cells = len(x_arr) * len(ea)
    if cells > guard:
        raise ScaleGuardError(f"clique pair count needs {cells} evaluations (guard {guard})")
    total = 0
    for b in x_arr:
        row = family.colors(np.int64(b), ea, eb)
        counts = np.bincount(row, minlength=family.k + 1)
        total += int((counts * (counts - 1) // 2).sum())
    return total


def clique_extract(
    family: ColoringFamily,
    split_seeds: tuple[int, ...] = (),
    count: bool = True,
    guard: int = 10**9,
) -> CliqueExtraction:
    """Split K_{3n} into X (n outside vertices) and L (2n clique vertices).
    ``count=False`` skips the O(|X| |E(L)|) collision count (pair_count is
    then None); the witness sets remain usable by downstream finders."""
    if family.n % 3 != 0:
        raise ValueError(f"host size {family.n} is not divisible by 3")
    n = family.n // 3
    best: CliqueExtraction | None = None
    for perm in _splits(family.n, split_seeds):
        l_verts = tuple(int(v) for v in perm[: 2 * n])
        x_verts = tuple(int(v) for v in perm[2 * n :])
        if not count:
            return CliqueExtraction(x_verts, l_verts, None)
        pair_count = clique_pair_count(family, x_verts, l_verts, guard=guard)
        if best is None or pair_count > best.pair_count:
            best = CliqueExtraction(x_verts, l_verts, pair_count)
    return best
