"""Violation finders: one deterministic algorithm per graph family, each
walking the corresponding counting proof stage by stage.

Every finder either returns a verified :class:`AnchoredViolation` or an
explicit :class:`ThresholdNotMet` naming the first pigeonhole stage whose
class fell below its requirement — at finite scale the counting arguments
can legitimately run out of room, and refusal is the honest outcome.

All pigeonhole selections take the maximum-size class with lexicographic
tie-breaking.  Pair/triple selections scan a deterministic candidate pool
(``FinderConfig.pair_pool`` columns; exact when the universe fits in the
pool), which keeps the desk-scale grid affordable.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field

import numpy as np

from .extract import (
    bipartition_extract,
    clique_extract,
    matching_extract,
    star_extract,
)
from .kernels import (
    best_equal_pair,
    best_equal_triple,
    equal_rows,
    joint_keys,
    largest_class,
    min_bucket_tuples,
    peel_disjoint_tuples,
    rows_equal_on,
    tuple_membership,
)
from .model import (
    AnchoredViolation,
    ColoringFamily,
    Embedding,
    PatternGraph,
    ViolationCertificate,
    canonical_edge,
    count_copies,
    make_pattern,
    subgraph_contains,
)
from .verify import check_anchored, extend_violation, extend_with_slack, find_bad_copy


@dataclass(frozen=True)
class FinderConfig:
    """Knobs for the proofs' unspecified constants.

    coverage: target fraction for the 99%-style peeling loops.
    star_coverage: target for the star finder's triple systems (the proof
        peels 2|A|/9 triples, i.e. 2/3 of A).
    pair_pool: max columns scanned by the best-pair/triple selections.
    triple_pool: pool for the path finder's three-way selection (cubic cost).
    """

    coverage: float = 0.99
    star_coverage: float = 2.0 / 3.0
    pair_pool: int = 512
    triple_pool: int = 256
    star_pool: int = 2048
    self_check: bool = True
    extraction_counts: bool = False
    fallback_guard: int = 200_000


DEFAULT_CONFIG = FinderConfig()


@dataclass(frozen=True)
class ThresholdNotMet:
    stage: str
    required: float
    available: float
    detail: str = ""


@dataclass(frozen=True)
class FinderOutcome:
    finder: str
    violation: AnchoredViolation | None
    refusal: ThresholdNotMet | None
    diagnostics: dict = field(default_factory=dict)

    @property
    def success(self) -> bool:
        return self.violation is not None


def _refuse(finder: str, stage: str, required, available, diag: dict, detail: str = "") -> FinderOutcome:
    return FinderOutcome(
        finder, None, ThresholdNotMet(stage, required, available, detail), diag
    )


def _succeed(
    family: ColoringFamily, finder: str, violation: AnchoredViolation, diag: dict, config: FinderConfig
) -> FinderOutcome:
    if config.self_check and not check_anchored(family, violation):
        raise AssertionError(f"{finder}: constructed certificate failed re-verification")
    return FinderOutcome(finder, violation, None, diag)


def _first_two(values) -> tuple[int, int]:
    return int(values[0]), int(values[1])


def _coverage(tuples: list, size: int, total: int) -> float:
    return (size * len(tuples) / total) if total else 0.0


def _covered(tuples: list, size: int, total: int, target: float) -> bool:
    # integer-exact at the boundary: covered/total >= target
    return total > 0 and size * len(tuples) >= target * total - 1e-9


# ---------------------------------------------------------------------------
# Shared star-anchor pipeline (S4 / P2+P2 / P2+K2+K2 / S_t / P2+3K2)
#
# star class -> best leaf pair (s, s') -> anchor-qualified set A of outside
# vertices whose coloring collides on (xs, xs').


def _compact(matrix: np.ndarray, k: int) -> np.ndarray:
    return matrix.astype(np.uint8) if k < 256 else matrix


def _star_anchor(family: ColoringFamily, config: FinderConfig, diag: dict):
    n, k = family.n, family.k
    s_cap = math.ceil((n - 1) / k)
    ex = star_extract(family, s_cap=s_cap, count=config.extraction_counts, x_pool=config.star_pool)
    diag["star_vertex"] = ex.x
    diag["star_class_size"] = len(ex.s_vertices)
    if ex.triple_count is not None:
        diag["star_triple_count"] = ex.triple_count
    diag["pair_pool"] = config.pair_pool
    if len(ex.s_vertices) < 2:
        return None, ("star-class", 2, len(ex.s_vertices))
    s_arr = np.asarray(ex.s_vertices[: config.pair_pool], dtype=np.int64)
    p_arr = np.asarray(ex.p_vertices, dtype=np.int64)
    if len(p_arr) == 0:
        return None, ("anchor-pair", 1, 0)
    matrix = _compact(
        family.colors(p_arr[:, None], np.full((len(p_arr), 1), ex.x), s_arr[None, :]), k
    )
    count, i, j = best_equal_pair(matrix, config.pair_pool)
    s1, s2 = int(s_arr[i]), int(s_arr[j])
    qualified = p_arr[equal_rows(matrix, i, j)]
    diag["anchor_pair"] = [s1, s2]
    diag["anchor_class_size"] = int(count)
    return (ex.x, s1, s2, [int(v) for v in qualified]), None


def _star_edges(x: int, leaves) -> list:
    return [canonical_edge(x, v) for v in leaves]


def find_s4(family: ColoringFamily, config: FinderConfig = DEFAULT_CONFIG) -> FinderOutcome:
    """Star with 4 leaves on {x, s, s', a, a'}: two leaf-class pigeonholes
    inside the anchor-qualified set."""
    name = "find_s4"
    diag: dict = {}
    if family.n < 5:
        raise ValueError("S4 needs a host with >= 5 vertices")
    got, refusal = _star_anchor(family, config, diag)
    if refusal:
        return _refuse(name, *refusal, diag)
    x, s1, s2, qualified = got
    if len(qualified) < 2:
        return _refuse(name, "anchor-pair", 2, len(qualified), diag)
    a_arr = np.asarray(qualified, dtype=np.int64)
    colors_s1 = family.colors(np.int64(s1), np.full(len(a_arr), x), a_arr)
    _, idx = largest_class(colors_s1)
    a_prime = a_arr[idx]
    diag["leaf_class_s"] = len(a_prime)
    if len(a_prime) < 2:
        return _refuse(name, "leaf-class-s", 2, len(a_prime), diag)
    colors_s2 = family.colors(np.int64(s2), np.full(len(a_prime), x), a_prime)
    _, idx2 = largest_class(colors_s2)
    a_second = a_prime[idx2]
    diag["leaf_class_s2"] = len(a_second)
    if len(a_second) < 2:
        return _refuse(name, "leaf-class-s2", 2, len(a_second), diag)
    a1, a2 = _first_two(a_second)

    pattern = make_pattern("S4")
    emb = Embedding(pattern, (x, s1, s2, a1, a2))
    anchor = (canonical_edge(x, s1), canonical_edge(x, s2))
    leaf_pair = (canonical_edge(x, a1), canonical_edge(x, a2))
    cert = ViolationCertificate(emb, (anchor, leaf_pair, leaf_pair, anchor, anchor))
    slack = tuple(int(v) for v in a_second[2:])
    violation = AnchoredViolation(cert, anchor_edges=anchor, slack=slack)
    return _succeed(family, name, violation, diag, config)


def find_p2_k2_k2(family: ColoringFamily, config: FinderConfig = DEFAULT_CONFIG) -> FinderOutcome:
    """P2 + K2 + K2: anchor path (s x s') plus two matching edges inside A
    agreeing under the joint (f_s, f_s') coloring."""
    name = "find_p2_k2_k2"
    diag: dict = {}
    if family.n < 7:
        raise ValueError("P2+K2+K2 needs a host with >= 7 vertices")
    got, refusal = _star_anchor(family, config, diag)
    if refusal:
        return _refuse(name, *refusal, diag)
    x, s1, s2, qualified = got
    if len(qualified) < 4:
        return _refuse(name, "anchor-pair", 4, len(qualified), diag)
    edges = [
        canonical_edge(qualified[2 * i], qualified[2 * i + 1])
        for i in range(len(qualified) // 2)
    ]
    ea = np.asarray([e[0] for e in edges], dtype=np.int64)
    eb = np.asarray([e[1] for e in edges], dtype=np.int64)
    keys = joint_keys(
        family.colors(np.int64(s1), ea, eb), family.colors(np.int64(s2), ea, eb)
    )
    _, members = largest_class(keys)
    diag["edge_class_size"] = len(members)
    if len(members) < 2:
        return _refuse(name, "edge-class", 2, len(members), diag)
    e1, e2 = edges[int(members[0])], edges[int(members[1])]

    pattern = make_pattern("P2+K2+K2")
    emb = Embedding(pattern, (s1, x, s2, e1[0], e1[1], e2[0], e2[1]))
    anchor = (canonical_edge(x, s1), canonical_edge(x, s2))
    pair = (e1, e2)
    cert = ViolationCertificate(emb, (pair, anchor, pair, anchor, anchor, anchor, anchor))
    used = {e1[0], e1[1], e2[0], e2[1]}
    slack = tuple(v for v in qualified if v not in used)
    violation = AnchoredViolation(cert, anchor_edges=anchor, slack=slack)
    return _succeed(family, name, violation, diag, config)


def find_p2_p2(family: ColoringFamily, config: FinderConfig = DEFAULT_CONFIG) -> FinderOutcome:
    """P2 + P2: anchor path plus a second path (a p b) found by pigeonholing
    the joint (f_s, f_s') coloring of the spokes at a fixed p in A."""
    name = "find_p2_p2"
    diag: dict = {}
    if family.n < 6:
        raise ValueError("P2+P2 needs a host with >= 6 vertices")
    got, refusal = _star_anchor(family, config, diag)
    if refusal:
        return _refuse(name, *refusal, diag)
    x, s1, s2, qualified = got
    if len(qualified) < 3:
        return _refuse(name, "anchor-pair", 3, len(qualified), diag)
    p = qualified[0]
    rest = np.asarray(qualified[1:], dtype=np.int64)
    keys = joint_keys(
        family.colors(np.int64(s1), np.full(len(rest), p), rest),
        family.colors(np.int64(s2), np.full(len(rest), p), rest),
    )
    _, members = largest_class(keys)
    diag["spoke_class_size"] = len(members)
    if len(members) < 2:
        return _refuse(name, "spoke-class", 2, len(members), diag)
    a, b = int(rest[members[0]]), int(rest[members[1]])

    pattern = make_pattern("P2+P2")
    emb = Embedding(pattern, (s1, x, s2, a, p, b))
    anchor = (canonical_edge(x, s1), canonical_edge(x, s2))
    spokes = (canonical_edge(p, a), canonical_edge(p, b))
    cert = ViolationCertificate(emb, (spokes, anchor, spokes, anchor, anchor, anchor))
    slack = tuple(v for v in qualified if v not in {p, a, b})
    violation = AnchoredViolation(cert, anchor_edges=anchor, slack=slack)
    return _succeed(family, name, violation, diag, config)


def find_star(
    family: ColoringFamily, t: int, config: FinderConfig = DEFAULT_CONFIG
) -> FinderOutcome:
    """S_t for t >= 5: two triple systems peeled from the anchor-qualified
    set under f_s and f_s', intersected to supply three more leaves; any
    further leaves come straight from the qualified set."""
    name = "find_star"
    if t < 5:
        raise ValueError("find_star handles t >= 5; use find_s4 for t = 4")
    diag: dict = {"t": t}
    if family.n < t + 1:
        raise ValueError(f"S{t} needs a host with >= {t + 1} vertices")
    got, refusal = _star_anchor(family, config, diag)
    if refusal:
        return _refuse(name, *refusal, diag)
    x, s1, s2, qualified = got
    if len(qualified) < 3:
        return _refuse(name, "anchor-pair", 3, len(qualified), diag)
    a_arr = np.asarray(qualified, dtype=np.int64)
    spokes = np.full(len(a_arr), x)
    systems = []
    for stage, owner in (("leaf-peel-s", s1), ("leaf-peel-s2", s2)):
        keys = family.colors(np.int64(owner), spokes, a_arr)
        tuples = peel_disjoint_tuples(keys, 3)
        cov = _coverage(tuples, 3, len(a_arr))
        diag[stage.replace("-", "_") + "_coverage"] = cov
        if not _covered(tuples, 3, len(a_arr), config.star_coverage):
            return _refuse(name, stage, config.star_coverage, cov, diag)
        systems.append(tuples)
    member1 = tuple_membership(systems[0], len(a_arr))
    member2 = tuple_membership(systems[1], len(a_arr))
    common = np.flatnonzero((member1 >= 0) & (member2 >= 0))
    diag["leaf_intersection"] = len(common)
    if len(common) == 0:
        return _refuse(name, "leaf-intersection", 1, 0, diag)
    pt_idx = int(common[0])
    triple_s = systems[0][member1[pt_idx]]
    triple_s2 = systems[1][member2[pt_idx]]
    pk_idx = next(i for i in triple_s if i != pt_idx)
    ph_idx = next(i for i in triple_s2 if i != pt_idx and i != pk_idx)
    p_t, p_k, p_h = int(a_arr[pt_idx]), int(a_arr[pk_idx]), int(a_arr[ph_idx])
    used = {p_t, p_k, p_h}
    extras = [v for v in qualified if v not in used][: t - 5]
    if len(extras) < t - 5:
        return _refuse(name, "leaf-padding", t - 5, len(extras), diag)

    leaves = [s1, s2, p_t, p_h, p_k] + extras
    pattern = make_pattern(f"S{t}")
    emb = Embedding(pattern, tuple([x] + leaves))
    anchor = (canonical_edge(x, s1), canonical_edge(x, s2))
    collisions = [anchor]  # center x
    for leaf in leaves:
        if leaf == s1:
            collisions.append((canonical_edge(x, p_t), canonical_edge(x, p_k)))
        elif leaf == s2:
            collisions.append((canonical_edge(x, p_t), canonical_edge(x, p_h)))
        else:
            collisions.append(anchor)
    cert = ViolationCertificate(emb, tuple(collisions))
    slack = tuple(v for v in qualified if v not in set(leaves))
    violation = AnchoredViolation(cert, anchor_edges=anchor, slack=slack)
    return _succeed(family, name, violation, diag, config)


def find_p2_3k2(family: ColoringFamily, config: FinderConfig = DEFAULT_CONFIG) -> FinderOutcome:
    """P2 + K2 + K2 + K2 (reconstructed: the source omits this proof).

    Combines the star anchor with the large-matching machinery: peel
    quintuples of an inner matching on A under f_s and under f_s'
    separately, intersect, and take three edges from the two quintuples.
    """
    name = "find_p2_3k2"
    diag: dict = {"reconstructed": True}
    if family.n < 9:
        raise ValueError("P2+3K2 needs a host with >= 9 vertices")
    got, refusal = _star_anchor(family, config, diag)
    if refusal:
        return _refuse(name, *refusal, diag)
    x, s1, s2, qualified = got
    if len(qualified) < 6:
        return _refuse(name, "anchor-pair", 6, len(qualified), diag)
    edges = [
        canonical_edge(qualified[2 * i], qualified[2 * i + 1])
        for i in range(len(qualified) // 2)
    ]
    ea = np.asarray([e[0] for e in edges], dtype=np.int64)
    eb = np.asarray([e[1] for e in edges], dtype=np.int64)
    systems = []
    for stage, owner in (("edge-peel-s", s1), ("edge-peel-s2", s2)):
        keys = family.colors(np.int64(owner), ea, eb)
        tuples = peel_disjoint_tuples(keys, 5)
        cov = _coverage(tuples, 5, len(edges))
        diag[stage.replace("-", "_") + "_coverage"] = cov
        if not _covered(tuples, 5, len(edges), config.coverage):
            return _refuse(name, stage, config.coverage, cov, diag)
        systems.append(tuples)
    member1 = tuple_membership(systems[0], len(edges))
    member2 = tuple_membership(systems[1], len(edges))
    common = np.flatnonzero((member1 >= 0) & (member2 >= 0))
    diag["edge_intersection"] = len(common)
    if len(common) == 0:
        return _refuse(name, "edge-intersection", 1, 0, diag)
    m0_idx = int(common[0])
    quint_s = systems[0][member1[m0_idx]]
    quint_s2 = systems[1][member2[m0_idx]]
    m1_idx = next(i for i in quint_s if i != m0_idx)
    m2_idx = next(i for i in quint_s2 if i != m0_idx and i != m1_idx)
    m0, m1, m2 = edges[m0_idx], edges[m1_idx], edges[m2_idx]

    pattern = make_pattern("P2+3K2")
    emb = Embedding(pattern, (s1, x, s2) + m0 + m1 + m2)
    anchor = (canonical_edge(x, s1), canonical_edge(x, s2))
    cert = ViolationCertificate(
        emb,
        ((m0, m1), anchor, (m0, m2)) + (anchor,) * 6,
    )
    used = set(m0) | set(m1) | set(m2)
    slack = tuple(v for v in qualified if v not in used)
    violation = AnchoredViolation(cert, anchor_edges=anchor, slack=slack)
    return _succeed(family, name, violation, diag, config)


# ---------------------------------------------------------------------------
# Path of length 4


def find_p4(family: ColoringFamily, config: FinderConfig = DEFAULT_CONFIG) -> FinderOutcome:
    """P4 on {b1, a1, b2, a2, b3}: count monochromatic spoke triples per
    owner in A, pigeonhole the best center triple in B, then pigeonhole the
    joint (f_b1, f_b2, f_b3) coloring of the b2-spokes."""
    name = "find_p4"
    diag: dict = {}
    if family.n % 2 != 0:
        raise ValueError(f"find_p4 needs an even host, got {family.n}")
    if family.n < 6:
        raise ValueError("P4 needs a host with >= 6 vertices (even split)")
    n = family.n // 2
    a_verts = np.arange(n, dtype=np.int64)
    b_verts = np.arange(n, 2 * n, dtype=np.int64)
    matrix = _compact(family.colors(a_verts[:, None], a_verts[:, None], b_verts[None, :]), family.k)
    counts = np.zeros((n, family.k + 1), dtype=np.int64)
    row_idx = np.broadcast_to(np.arange(n)[:, None], matrix.shape)
    np.add.at(counts, (row_idx, matrix), 1)
    quad = int((counts * (counts - 1) * (counts - 2) // 6).sum())
    floor_bound = n * min_bucket_tuples(n, family.k, 3)
    diag["quadruple_count"] = quad
    diag["quadruple_floor_bound"] = floor_bound
    assert quad >= floor_bound, "convexity floor violated (counting bug)"
    if quad < 1:
        return _refuse(name, "collision-quadruples", 1, quad, diag)

    count, i, j, l = best_equal_triple(matrix, config.triple_pool)
    b1, b2, b3 = int(b_verts[i]), int(b_verts[j]), int(b_verts[l])
    rows = rows_equal_on(matrix, (i, j, l))
    diag["center_triple"] = [b1, b2, b3]
    diag["spoke_class_size"] = int(len(rows))
    if len(rows) < 2:
        return _refuse(name, "center-triple", 2, len(rows), diag)
    a_prime = a_verts[rows]
    spokes_b2 = np.full(len(a_prime), b2)
    keys = joint_keys(
        family.colors(np.int64(b1), spokes_b2, a_prime),
        family.colors(np.int64(b2), spokes_b2, a_prime),
        family.colors(np.int64(b3), spokes_b2, a_prime),
    )
    _, members = largest_class(keys)
    diag["spine_class_size"] = len(members)
    if len(members) < 2:
        return _refuse(name, "spine-class", 2, len(members), diag)
    a1, a2 = int(a_prime[members[0]]), int(a_prime[members[1]])

    pattern = make_pattern("P4")
    emb = Embedding(pattern, (b1, a1, b2, a2, b3))
    spine = (canonical_edge(b2, a1), canonical_edge(b2, a2))
    cert = ViolationCertificate(
        emb,
        (
            spine,
            (canonical_edge(a1, b1), canonical_edge(a1, b2)),
            spine,
            (canonical_edge(a2, b2), canonical_edge(a2, b3)),
            spine,
        ),
    )
    violation = AnchoredViolation(cert)
    return _succeed(family, name, violation, diag, config)


# ---------------------------------------------------------------------------
# Matchings


def _matching_anchor(family: ColoringFamily, config: FinderConfig, diag: dict):
    """Shared head of the matching finders: split, best edge pair (e1, e2),
    anchor-qualified subset A of Y, inner matching H on A."""
    ex = matching_extract(family, count=config.extraction_counts)
    if ex.triple_count is not None:
        diag["matching_triple_count"] = ex.triple_count
    diag["pair_pool"] = config.pair_pool
    if len(ex.matching) < 2:
        return None, ("anchor-pair", 2, len(ex.matching))
    y_arr = np.asarray(ex.y_vertices, dtype=np.int64)
    pool = ex.matching[: config.pair_pool]
    ea = np.asarray([e[0] for e in pool], dtype=np.int64)
    eb = np.asarray([e[1] for e in pool], dtype=np.int64)
    matrix = _compact(family.colors(y_arr[:, None], ea[None, :], eb[None, :]), family.k)
    count, i, j = best_equal_pair(matrix, config.pair_pool)
    e1, e2 = pool[i], pool[j]
    qualified = [int(v) for v in y_arr[equal_rows(matrix, i, j)]]
    diag["anchor_pair"] = [list(e1), list(e2)]
    diag["anchor_class_size"] = len(qualified)
    return (e1, e2, qualified), None


def _inner_matching(qualified: list[int]) -> list:
    return [
        canonical_edge(qualified[2 * i], qualified[2 * i + 1])
        for i in range(len(qualified) // 2)
    ]


def find_i4(family: ColoringFamily, config: FinderConfig = DEFAULT_CONFIG) -> FinderOutcome:
    """Matching of size 4: four successive edge-class pigeonholes on an
    inner matching drawn from the anchor-qualified set."""
    name = "find_i4"
    diag: dict = {}
    got, refusal = _matching_anchor(family, config, diag)
    if refusal:
        return _refuse(name, *refusal, diag)
    e1, e2, qualified = got
    if len(qualified) < 4:
        return _refuse(name, "anchor-pair", 4, len(qualified), diag)
    h_edges = _inner_matching(qualified)
    current = h_edges
    v1, u1 = e1
    v2, u2 = e2
    for stage, owner in (
        ("edge-class-v1", v1),
        ("edge-class-u1", u1),
        ("edge-class-v2", v2),
        ("edge-class-u2", u2),
    ):
        ea = np.asarray([e[0] for e in current], dtype=np.int64)
        eb = np.asarray([e[1] for e in current], dtype=np.int64)
        _, members = largest_class(family.colors(np.int64(owner), ea, eb))
        current = [current[int(m)] for m in members]
        diag[stage.replace("-", "_")] = len(current)
        if len(current) < 2:
            return _refuse(name, stage, 2, len(current), diag)
    h1, h2 = current[0], current[1]

    pattern = make_pattern("I4")
    emb = Embedding(pattern, e1 + e2 + h1 + h2)
    hp = (h1, h2)
    ep = (e1, e2)
    cert = ViolationCertificate(emb, (hp, hp, hp, hp, ep, ep, ep, ep))
    used = set(h1) | set(h2)
    slack = tuple(v for v in qualified if v not in used)
    violation = AnchoredViolation(cert, anchor_edges=ep, slack=slack)
    return _succeed(family, name, violation, diag, config)


def find_matching_56(
    family: ColoringFamily, t: int, config: FinderConfig = DEFAULT_CONFIG
) -> FinderOutcome:
    """Matchings of size 5 or 6: peel joint-colored triples of the inner
    matching under (f_v1, f_u1) and under (f_v2, f_u2), intersect, and pad
    with one extra inner edge for t = 6."""
    name = "find_matching_56"
    if t not in (5, 6):
        raise ValueError("find_matching_56 handles t in {5, 6}")
    diag: dict = {"t": t}
    got, refusal = _matching_anchor(family, config, diag)
    if refusal:
        return _refuse(name, *refusal, diag)
    e1, e2, qualified = got
    needed_vertices = 2 * (t - 2)
    if len(qualified) < needed_vertices:
        return _refuse(name, "anchor-pair", needed_vertices, len(qualified), diag)
    h_edges = _inner_matching(qualified)
    ea = np.asarray([e[0] for e in h_edges], dtype=np.int64)
    eb = np.asarray([e[1] for e in h_edges], dtype=np.int64)
    v1, u1 = e1
    v2, u2 = e2
    systems = []
    for stage, owners in (("pair-peel-1", (v1, u1)), ("pair-peel-2", (v2, u2))):
        keys = joint_keys(
            family.colors(np.int64(owners[0]), ea, eb),
            family.colors(np.int64(owners[1]), ea, eb),
        )
        tuples = peel_disjoint_tuples(keys, 3)
        cov = _coverage(tuples, 3, len(h_edges))
        diag[stage.replace("-", "_") + "_coverage"] = cov
        if not _covered(tuples, 3, len(h_edges), config.coverage):
            return _refuse(name, stage, config.coverage, cov, diag)
        systems.append(tuples)
    member1 = tuple_membership(systems[0], len(h_edges))
    member2 = tuple_membership(systems[1], len(h_edges))
    common = np.flatnonzero((member1 >= 0) & (member2 >= 0))
    diag["tuple_intersection"] = len(common)
    if len(common) == 0:
        return _refuse(name, "tuple-intersection", 1, 0, diag)
    ht_idx = int(common[0])
    triple1 = systems[0][member1[ht_idx]]
    triple2 = systems[1][member2[ht_idx]]
    hj_idx = next(i for i in triple1 if i != ht_idx)
    hm_idx = next(i for i in triple2 if i != ht_idx and i != hj_idx)
    chosen = [ht_idx, hj_idx, hm_idx]
    if t == 6:
        spare = next((i for i in range(len(h_edges)) if i not in chosen), None)
        if spare is None:
            return _refuse(name, "edge-padding", 1, 0, diag)
        chosen.append(spare)
    h_t, h_j, h_m = h_edges[ht_idx], h_edges[hj_idx], h_edges[hm_idx]

    pattern = make_pattern(f"I{t}")
    copy_edges = [e1, e2] + [h_edges[i] for i in chosen]
    emb = Embedding(pattern, tuple(v for e in copy_edges for v in e))
    ep = (e1, e2)
    collisions = [(h_t, h_j), (h_t, h_j), (h_t, h_m), (h_t, h_m)]
    collisions += [ep] * (2 * (t - 2))
    cert = ViolationCertificate(emb, tuple(collisions))
    used = {v for i in chosen for v in h_edges[i]}
    slack = tuple(v for v in qualified if v not in used)
    violation = AnchoredViolation(cert, anchor_edges=ep, slack=slack)
    return _succeed(family, name, violation, diag, config)


def find_matching_large(
    family: ColoringFamily, t: int, config: FinderConfig = DEFAULT_CONFIG
) -> FinderOutcome:
    """Matchings of size >= 7: four quintuple systems (one per end of the
    anchor edges), a common edge, four pairwise-distinct partners, and
    inner-edge padding up to size t."""
    name = "find_matching_large"
    if t < 7:
        raise ValueError("find_matching_large handles t >= 7")
    diag: dict = {"t": t}
    got, refusal = _matching_anchor(family, config, diag)
    if refusal:
        return _refuse(name, *refusal, diag)
    e1, e2, qualified = got
    needed_vertices = 2 * (t - 2)
    if len(qualified) < needed_vertices:
        return _refuse(name, "anchor-pair", needed_vertices, len(qualified), diag)
    h_edges = _inner_matching(qualified)
    ea = np.asarray([e[0] for e in h_edges], dtype=np.int64)
    eb = np.asarray([e[1] for e in h_edges], dtype=np.int64)
    v1, u1 = e1
    v2, u2 = e2
    systems = []
    for stage, owner in (
        ("quintuple-peel-v1", v1),
        ("quintuple-peel-u1", u1),
        ("quintuple-peel-v2", v2),
        ("quintuple-peel-u2", u2),
    ):
        keys = family.colors(np.int64(owner), ea, eb)
        tuples = peel_disjoint_tuples(keys, 5)
        cov = _coverage(tuples, 5, len(h_edges))
        diag[stage.replace("-", "_") + "_coverage"] = cov
        if not _covered(tuples, 5, len(h_edges), config.coverage):
            return _refuse(name, stage, config.coverage, cov, diag)
        systems.append(tuples)
    members = [tuple_membership(sys, len(h_edges)) for sys in systems]
    mask = (members[0] >= 0) & (members[1] >= 0) & (members[2] >= 0) & (members[3] >= 0)
    common = np.flatnonzero(mask)
    diag["tuple_intersection"] = len(common)
    if len(common) == 0:
        return _refuse(name, "tuple-intersection", 1, 0, diag)
    ht_idx = int(common[0])
    partners = []
    for sys_idx in range(4):
        quint = systems[sys_idx][members[sys_idx][ht_idx]]
        pick = next(i for i in quint if i != ht_idx and i not in partners)
        partners.append(pick)
    chosen = [ht_idx] + partners
    for i in range(len(h_edges)):
        if len(chosen) >= t - 2:
            break
        if i not in chosen:
            chosen.append(i)
    if len(chosen) < t - 2:
        return _refuse(name, "edge-padding", t - 2, len(chosen), diag)

    pattern = make_pattern(f"I{t}")
    copy_edges = [e1, e2] + [h_edges[i] for i in chosen]
    emb = Embedding(pattern, tuple(v for e in copy_edges for v in e))
    ep = (e1, e2)
    h_t = h_edges[ht_idx]
    collisions = [
        (h_t, h_edges[partners[0]]),
        (h_t, h_edges[partners[1]]),
        (h_t, h_edges[partners[2]]),
        (h_t, h_edges[partners[3]]),
    ]
    collisions += [ep] * (2 * (t - 2))
    cert = ViolationCertificate(emb, tuple(collisions))
    used = {v for i in chosen for v in h_edges[i]}
    slack = tuple(v for v in qualified if v not in used)
    violation = AnchoredViolation(cert, anchor_edges=ep, slack=slack)
    return _succeed(family, name, violation, diag, config)


# ---------------------------------------------------------------------------
# C4 and cliques


def _bipartition_pair(family: ColoringFamily, config: FinderConfig, diag: dict):
    ex = bipartition_extract(family, count=config.extraction_counts)
    if ex.triple_count is not None:
        diag["bipartition_triple_count"] = ex.triple_count
    diag["pair_pool"] = config.pair_pool
    a_arr = np.asarray(ex.a_vertices, dtype=np.int64)
    b_arr = np.asarray(ex.b_vertices[: config.pair_pool], dtype=np.int64)
    matrix = _compact(family.colors(a_arr[:, None], a_arr[:, None], b_arr[None, :]), family.k)
    count, i, j = best_equal_pair(matrix, config.pair_pool)
    b1, b2 = int(b_arr[i]), int(b_arr[j])
    qualified = [int(v) for v in a_arr[equal_rows(matrix, i, j)]]
    diag["center_pair"] = [b1, b2]
    diag["center_class_size"] = len(qualified)
    return b1, b2, qualified


def find_c4(family: ColoringFamily, config: FinderConfig = DEFAULT_CONFIG) -> FinderOutcome:
    """C4 on {a1, b2, a2, b1}: best column pair over the A-to-B color
    matrix, then the joint (f_b1, f_b2) spoke pigeonhole."""
    name = "find_c4"
    diag: dict = {}
    if family.n % 2 != 0:
        raise ValueError(f"find_c4 needs an even host, got {family.n}")
    if family.n < 4:
        raise ValueError("C4 needs a host with >= 4 vertices")
    b1, b2, qualified = _bipartition_pair(family, config, diag)
    if len(qualified) < 2:
        return _refuse(name, "center-pair", 2, len(qualified), diag)
    a_arr = np.asarray(qualified, dtype=np.int64)
    keys = joint_keys(
        family.colors(np.int64(b1), np.full(len(a_arr), b1), a_arr),
        family.colors(np.int64(b2), np.full(len(a_arr), b2), a_arr),
    )
    _, members = largest_class(keys)
    diag["spoke_class_size"] = len(members)
    if len(members) < 2:
        return _refuse(name, "spoke-class", 2, len(members), diag)
    a1, a2 = int(a_arr[members[0]]), int(a_arr[members[1]])

    pattern = make_pattern("C4")
    emb = Embedding(pattern, (a1, b1, a2, b2))
    cert = ViolationCertificate(
        emb,
        (
            (canonical_edge(a1, b1), canonical_edge(a1, b2)),
            (canonical_edge(b1, a1), canonical_edge(b1, a2)),
            (canonical_edge(a2, b1), canonical_edge(a2, b2)),
            (canonical_edge(b2, a1), canonical_edge(b2, a2)),
        ),
    )
    violation = AnchoredViolation(cert)
    return _succeed(family, name, violation, diag, config)


def find_clique(
    family: ColoringFamily, r: int = 8, config: FinderConfig = DEFAULT_CONFIG
) -> FinderOutcome:
    """K_r for r >= 8: peel monochromatic edge triples of E(A') under
    f_b1 and f_b2, intersect, and pad vertices from A'."""
    name = "find_clique"
    if r < 8:
        raise ValueError("find_clique handles r >= 8 (the theorem's range)")
    diag: dict = {"r": r}
    if family.n % 2 != 0:
        raise ValueError(f"find_clique needs an even host, got {family.n}")
    if family.n < r + 2:
        raise ValueError(f"K{r} plus the center pair needs a host with >= {r + 2} vertices")
    b1, b2, qualified = _bipartition_pair(family, config, diag)
    if len(qualified) < r - 2:
        return _refuse(name, "center-pair", r - 2, len(qualified), diag)
    a_arr = np.asarray(qualified, dtype=np.int64)
    ia, ib = np.triu_indices(len(a_arr), k=1)
    edges = [(int(a_arr[p]), int(a_arr[q])) for p, q in zip(ia, ib)]
    ea, eb = a_arr[ia], a_arr[ib]
    systems = []
    for stage, owner in (("edge-peel-b1", b1), ("edge-peel-b2", b2)):
        keys = family.colors(np.int64(owner), ea, eb)
        tuples = peel_disjoint_tuples(keys, 3)
        cov = _coverage(tuples, 3, len(edges))
        diag[stage.replace("-", "_") + "_coverage"] = cov
        if not _covered(tuples, 3, len(edges), config.coverage):
            return _refuse(name, stage, config.coverage, cov, diag)
        systems.append(tuples)
    member1 = tuple_membership(systems[0], len(edges))
    member2 = tuple_membership(systems[1], len(edges))
    common = np.flatnonzero((member1 >= 0) & (member2 >= 0))
    diag["edge_intersection"] = len(common)
    if len(common) == 0:
        return _refuse(name, "edge-intersection", 1, 0, diag)
    c_idx = int(common[0])
    e_one = edges[c_idx]
    triple1 = systems[0][member1[c_idx]]
    triple2 = systems[1][member2[c_idx]]
    e_two = edges[next(i for i in triple1 if i != c_idx)]
    e_three = edges[
        next(i for i in triple2 if i != c_idx and edges[i] != e_two)
    ]
    core = []
    for v in (*e_one, *e_two, *e_three):
        if v not in core:
            core.append(v)
    for v in qualified:
        if len(core) >= 6 + (r - 8):
            break
        if v not in core:
            core.append(v)
    if len(core) < 6 + (r - 8):
        return _refuse(name, "vertex-assembly", 6 + (r - 8), len(core), diag)

    pattern = make_pattern(f"K{r}")
    emb = Embedding(pattern, tuple([b1, b2] + core))
    collisions = [(e_one, e_two), (e_one, e_three)]
    collisions += [
        (canonical_edge(a, b1), canonical_edge(a, b2)) for a in core
    ]
    cert = ViolationCertificate(emb, tuple(collisions))
    slack = tuple(v for v in qualified if v not in set(core))
    violation = AnchoredViolation(cert, anchor_vertices=(b1, b2), slack=slack)
    return _succeed(family, name, violation, diag, config)


# ---------------------------------------------------------------------------
# Complete bipartite graphs


def _edges_bipartite(edge_list: list) -> bool:
    adj: dict[int, list[int]] = {}
    for a, b in edge_list:
        adj.setdefault(a, []).append(b)
        adj.setdefault(b, []).append(a)
    color: dict[int, int] = {}
    for start in adj:
        if start in color:
            continue
        color[start] = 0
        queue = [start]
        while queue:
            v = queue.pop()
            for w in adj[v]:
                if w not in color:
                    color[w] = 1 - color[v]
                    queue.append(w)
                elif color[w] == color[v]:
                    return False
    return True


def _two_color_components(vertices: list[int], edge_list: list):
    """Connected components of (vertices, edges) with a 2-coloring each;
    returns a list of (side0_members, side1_members)."""
    adj: dict[int, list[int]] = {v: [] for v in vertices}
    for a, b in edge_list:
        adj[a].append(b)
        adj[b].append(a)
    seen: dict[int, int] = {}
    comps = []
    for start in vertices:
        if start in seen:
            continue
        seen[start] = 0
        queue = [start]
        side0, side1 = [start], []
        while queue:
            v = queue.pop()
            for w in adj[v]:
                if w not in seen:
                    seen[w] = 1 - seen[v]
                    (side0 if seen[w] == 0 else side1).append(w)
                    queue.append(w)
                elif seen[w] == seen[v]:
                    raise AssertionError("odd cycle slipped through the bipartite checks")
        comps.append((sorted(side0), sorted(side1)))
    return comps


def _assign_sides(comps, target: int):
    """Orient each component's two classes so side 0 ends up with exactly
    ``target`` vertices; subset-sum DP, deterministic reconstruction."""
    reachable = [{0: None}]
    for p, q in ((len(c0), len(c1)) for c0, c1 in comps):
        nxt: dict[int, tuple] = {}
        for total in reachable[-1]:
            for flip, add in ((0, p), (1, q)):
                new = total + add
                if new <= target and new not in nxt:
                    nxt[new] = (total, flip)
        reachable.append(nxt)
    if target not in reachable[-1]:
        return None
    flips = []
    at = target
    for level in range(len(comps), 0, -1):
        prev, flip = reachable[level][at]
        flips.append(flip)
        at = prev
    flips.reverse()
    side0, side1 = [], []
    for (c0, c1), flip in zip(comps, flips):
        first, second = (c0, c1) if flip == 0 else (c1, c0)
        side0.extend(first)
        side1.extend(second)
    return sorted(side0), sorted(side1)


def find_complete_bipartite(
    family: ColoringFamily, s: int = 7, t: int = 7, config: FinderConfig = DEFAULT_CONFIG
) -> FinderOutcome:
    """K_{s,t} for s, t >= 7: anchor edge pair from the clique split, four
    peeled systems (pairs / 7-sets / 16-sets / 29-sets), odd-cycle-avoiding
    partner picks, and balanced side assembly."""
    name = "find_complete_bipartite"
    if min(s, t) < 7:
        raise ValueError("find_complete_bipartite handles s, t >= 7")
    s, t = min(s, t), max(s, t)
    diag: dict = {"s": s, "t": t}
    if family.n % 3 != 0:
        raise ValueError(f"find_complete_bipartite needs a host divisible by 3, got {family.n}")
    ex = clique_extract(family, count=config.extraction_counts)
    if ex.pair_count is not None:
        diag["clique_pair_count"] = ex.pair_count
    x_arr = np.asarray(ex.x_vertices, dtype=np.int64)
    l_list = list(ex.l_vertices)

    # candidate anchor pairs: edges among a prefix of L sized to the pool
    w = 2
    while w * (w - 1) // 2 < config.pair_pool and w < len(l_list):
        w += 1
    prefix = np.asarray(l_list[:w], dtype=np.int64)
    pa, pb = np.triu_indices(len(prefix), k=1)
    pool_edges = [(int(prefix[p]), int(prefix[q])) for p, q in zip(pa, pb)]
    diag["pair_pool"] = len(pool_edges)
    if len(pool_edges) < 2:
        return _refuse(name, "anchor-pair", 2, len(pool_edges), diag)
    matrix = _compact(
        family.colors(x_arr[:, None], prefix[pa][None, :], prefix[pb][None, :]), family.k
    )
    count, i, j = best_equal_pair(matrix, len(pool_edges))
    e1, e2 = pool_edges[i], pool_edges[j]
    qualified = [int(v) for v in x_arr[equal_rows(matrix, i, j)]]
    diag["anchor_pair"] = [list(e1), list(e2)]
    diag["anchor_class_size"] = len(qualified)
    if len(qualified) < s + t - 4:
        return _refuse(name, "anchor-pair", s + t - 4, len(qualified), diag)

    v1, v2 = e1
    shared = set(e1) & set(e2)
    if shared:
        u1 = next(v for v in e2 if v not in shared)
        u2 = next(v for v in l_list if v not in {v1, v2, u1})
        diag["shared_endpoint"] = True
    else:
        u1, u2 = e2
        diag["shared_endpoint"] = False

    r_arr = np.asarray(qualified, dtype=np.int64)
    ia, ib = np.triu_indices(len(r_arr), k=1)
    inner_edges = [(int(r_arr[p]), int(r_arr[q])) for p, q in zip(ia, ib)]
    ea, eb = r_arr[ia], r_arr[ib]
    plan = (
        ("pair-peel-v1", v1, 2),
        ("7set-peel-v2", v2, 7),
        ("16set-peel-u1", u1, 16),
        ("29set-peel-u2", u2, 29),
    )
    systems = []
    for stage, owner, size in plan:
        keys = family.colors(np.int64(owner), ea, eb)
        tuples = peel_disjoint_tuples(keys, size)
        cov = _coverage(tuples, size, len(inner_edges))
        diag[stage.replace("-", "_") + "_coverage"] = cov
        if not _covered(tuples, size, len(inner_edges), config.coverage):
            return _refuse(name, stage, config.coverage, cov, diag)
        systems.append(tuples)
    members = [tuple_membership(sys, len(inner_edges)) for sys in systems]
    mask = (members[0] >= 0) & (members[1] >= 0) & (members[2] >= 0) & (members[3] >= 0)
    common = np.flatnonzero(mask)
    diag["4way_intersection"] = len(common)
    if len(common) == 0:
        return _refuse(name, "4way-intersection", 1, 0, diag)
    c_idx = int(common[0])
    e_star = [inner_edges[c_idx]]  # e^1
    pair_tuple = systems[0][members[0][c_idx]]
    e_star.append(inner_edges[next(i for i in pair_tuple if i != c_idx)])  # e^2 forced
    for sys_idx in (1, 2, 3):
        group = systems[sys_idx][members[sys_idx][c_idx]]
        pick = None
        for idx in group:
            cand = inner_edges[idx]
            if cand in e_star:
                continue
            if _edges_bipartite(e_star + [cand]):
                pick = cand
                break
        if pick is None:
            raise AssertionError(
                "odd-cycle-avoiding pick failed; the counting argument excludes this"
            )
        e_star.append(pick)

    special = [e1, e2] + e_star
    core_vertices: list[int] = []
    for e in special:
        for v in e:
            if v not in core_vertices:
                core_vertices.append(v)
    inner_used = {v for e in e_star for v in e}
    padding = [v for v in qualified if v not in inner_used]
    pad_iter = iter(padding)
    copy_vertices = list(core_vertices)
    if u2 not in copy_vertices:
        copy_vertices.append(u2)
    while len(copy_vertices) < s + t:
        copy_vertices.append(next(pad_iter))

    comps = _two_color_components(copy_vertices, special)
    assigned = _assign_sides(comps, s)
    if assigned is None:
        raise AssertionError("side balancing failed; the counting argument excludes this")
    side_s, side_t = assigned

    pattern = make_pattern(f"K{s},{t}")
    emb = Embedding(pattern, tuple(side_s + side_t))
    role_pairs = {
        v1: (e_star[0], e_star[1]),
        v2: (e_star[0], e_star[2]),
        u1: (e_star[0], e_star[3]),
        u2: (e_star[0], e_star[4]),
    }
    anchor = (e1, e2)
    collisions = []
    for host in side_s + side_t:
        collisions.append(role_pairs.get(host, anchor))
    cert = ViolationCertificate(emb, tuple(collisions))
    in_copy = set(copy_vertices)
    slack = tuple(v for v in qualified if v not in in_copy)
    violation = AnchoredViolation(cert, anchor_edges=anchor, slack=slack)
    return _succeed(family, name, violation, diag, config)


# ---------------------------------------------------------------------------
# The six-edge detector and the generic dispatcher

H6_PREFERENCE = ("I4", "S4", "P2+P2", "P2+K2+K2", "P4", "C4")


def detect_h6_member(pattern: PatternGraph) -> tuple[str, dict[int, int]]:
    """Some member of the six-edge family embedded in ``pattern``.

    Preference order puts the common-anchor members first so that the
    dispatcher can extend with slack vertices whenever possible.
    """
    if pattern.num_edges < 6:
        raise ValueError(f"detector needs >= 6 edges, got {pattern.num_edges}")
    for tag in H6_PREFERENCE:
        member = make_pattern(tag)
        mapping = subgraph_contains(pattern, member)
        if mapping is not None:
            return tag, mapping
    raise AssertionError("six-edge graph without any family member (contradicts the lemma)")


_MEMBER_FINDERS = {
    "I4": (find_i4, 3),
    "S4": (find_s4, 1),
    "P2+P2": (find_p2_p2, 1),
    "P2+K2+K2": (find_p2_k2_k2, 1),
    "P4": (find_p4, 2),
    "C4": (find_c4, 2),
}

_COMMON_ANCHOR_MEMBERS = {"I4", "S4", "P2+P2", "P2+K2+K2"}


def generic_find(
    family: ColoringFamily, pattern: PatternGraph, config: FinderConfig = DEFAULT_CONFIG
) -> FinderOutcome:
    """Dispatcher for any target with >= 6 edges: run the detected member's
    finder, then extend the violation to the full target.

    When the only member present is C4 or P4 and the target carries extra
    vertices there is no common anchor to extend with; a scale-guarded
    brute-force search over copies stands in (``fallback: true``).
    """
    name = "generic_find"
    if pattern.num_edges < 6:
        raise ValueError("generic_find needs a target with >= 6 edges")
    if pattern.num_vertices > family.n:
        raise ValueError("target does not fit the host")
    tag, _ = detect_h6_member(pattern)
    finder, modulus = _MEMBER_FINDERS[tag]
    usable = family.n - (family.n % modulus)
    member_family = family.restrict(usable) if usable < family.n else family
    diag: dict = {"member": tag, "member_host": usable, "fallback": False}

    extra = pattern.num_vertices - make_pattern(tag).num_vertices
    if extra > 0 and tag not in _COMMON_ANCHOR_MEMBERS:
        return _fallback_search(family, pattern, diag, config)

    outcome = finder(member_family, config=config)
    diag["member_diagnostics"] = outcome.diagnostics
    if not outcome.success:
        return FinderOutcome(name, None, outcome.refusal, diag)
    av = outcome.violation
    if extra == 0:
        cert = extend_violation(family, av.certificate, pattern)
        violation = AnchoredViolation(
            cert, av.anchor_edges, av.anchor_vertices, av.slack
        )
    else:
        if extra > len(av.slack):
            return _refuse(name, "slack-extension", extra, len(av.slack), diag)
        cert = extend_with_slack(family, av, pattern)
        violation = AnchoredViolation(
            cert, av.anchor_edges, av.anchor_vertices, av.slack[extra:]
        )
    return _succeed(family, name, violation, diag, config)


def _fallback_search(
    family: ColoringFamily, pattern: PatternGraph, diag: dict, config: FinderConfig
) -> FinderOutcome:
    diag["fallback"] = True
    total = count_copies(pattern, family.n)
    limit = min(total, config.fallback_guard)
    diag["fallback_copies_scanned"] = limit
    cert, scanned = find_bad_copy(family, pattern, max_copies=limit)
    if cert is None:
        detail = "scan truncated by guard" if total > limit else "no bad copy exists"
        return _refuse("generic_find", "fallback", 1, 0, diag, detail)
    violation = AnchoredViolation(cert)
    return _succeed(family, "generic_find", violation, diag, config)


# ---------------------------------------------------------------------------
# Tag-based dispatch used by the CLI

def finder_for_tag(tag: str):
    """Map a pattern tag to (callable, kwargs) for the specialized finders;
    None when only generic_find applies."""
    tag = tag.strip()
    direct = {
        "P4": (find_p4, {}),
        "S4": (find_s4, {}),
        "C4": (find_c4, {}),
        "I4": (find_i4, {}),
        "P2+P2": (find_p2_p2, {}),
        "P2+K2+K2": (find_p2_k2_k2, {}),
        "P2+K2+K2+K2": (find_p2_3k2, {}),
        "P2+3K2": (find_p2_3k2, {}),
    }
    if tag in direct:
        return direct[tag]
    m = re.match(r"^([SIK])(\d+)(?:,(\d+))?$", tag)
    if not m:
        return None
    kind, first = m.group(1), int(m.group(2))
    if kind == "S" and first >= 5:
        return find_star, {"t": first}
    if kind == "I" and first in (5, 6):
        return find_matching_56, {"t": first}
    if kind == "I" and first >= 7:
        return find_matching_large, {"t": first}
    if kind == "K" and m.group(3) is not None:
        s, t = first, int(m.group(3))
        if min(s, t) >= 7:
            return find_complete_bipartite, {"s": s, "t": t}
        return None
    if kind == "K" and first >= 8:
        return find_clique, {"r": first}
    return None
