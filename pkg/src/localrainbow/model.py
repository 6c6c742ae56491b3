"""Core data model: pattern graphs, coloring families, embeddings,
violation certificates, and their file formats.

Conventions used throughout the package:

* Host vertices are ``0..n-1``; host edges are unordered pairs stored as
  ``(min, max)`` and indexed lexicographically (see :mod:`.kernels`).
* Colors are 1-based integers in ``[1, k]``.
* A copy of a pattern ``H`` in ``K_n`` is identified by its image, i.e.
  the pair (vertex set, edge set); automorphic relabelings are one copy.
"""

from __future__ import annotations

import functools
import itertools
import json
import re
from dataclasses import dataclass, field

import numpy as np

from .kernels import edge_index, edge_index_int
from .rng import GOLDEN, MASK64, MIX_A, MIX_B, stream_value

Edge = tuple[int, int]


class PatternError(ValueError):
    """Bad pattern tag or parameters."""


class FamilyFormatError(ValueError):
    """Malformed family file."""


class ColorRangeError(FamilyFormatError):
    """A stored color falls outside [1, k]."""


class SizeMismatchError(FamilyFormatError):
    """Token count does not match the declared n."""


class ScaleGuardError(RuntimeError):
    """An exhaustive operation would exceed its documented scale."""


def canonical_edge(a: int, b: int) -> Edge:
    return (a, b) if a < b else (b, a)


# ---------------------------------------------------------------------------
# Pattern graphs


@dataclass(frozen=True)
class PatternGraph:
    """A small target graph: ``num_vertices`` labeled 0..v-1 plus an edge
    list.  Vertices not covered by any edge are isolated (kept explicitly;
    they matter for which colorings may rescue a copy)."""

    num_vertices: int
    edges: tuple[Edge, ...]
    name: str | None = None

    def __post_init__(self):
        seen = set()
        for a, b in self.edges:
            if a == b:
                raise PatternError(f"loop edge ({a},{b})")
            if not (0 <= a < self.num_vertices and 0 <= b < self.num_vertices):
                raise PatternError(f"edge ({a},{b}) outside 0..{self.num_vertices - 1}")
            e = canonical_edge(a, b)
            if e in seen:
                raise PatternError(f"duplicate edge {e}")
            seen.add(e)
        object.__setattr__(self, "edges", tuple(sorted(canonical_edge(a, b) for a, b in self.edges)))

    @property
    def num_edges(self) -> int:
        return len(self.edges)

    def degrees(self) -> list[int]:
        deg = [0] * self.num_vertices
        for a, b in self.edges:
            deg[a] += 1
            deg[b] += 1
        return deg

    def isolated_count(self) -> int:
        return sum(1 for d in self.degrees() if d == 0)

    def adjacency(self) -> list[set[int]]:
        adj: list[set[int]] = [set() for _ in range(self.num_vertices)]
        for a, b in self.edges:
            adj[a].add(b)
            adj[b].add(a)
        return adj

    def key(self) -> tuple:
        return (self.num_vertices, self.edges)


_TERM_RE = re.compile(r"^(\d+)?([PSIC])(\d+)$|^(\d+)?K(\d+)(?:,(\d+))?$")


def _term_graph(term: str) -> tuple[int, list[Edge]]:
    """(vertex count, edges) for one union term such as P4, S5, K7,7, 3K2."""
    m = _TERM_RE.match(term)
    if not m:
        raise PatternError(f"unrecognized pattern term {term!r}")
    if m.group(2):  # P/S/I/C family
        mult = int(m.group(1)) if m.group(1) else 1
        kind, t = m.group(2), int(m.group(3))
        if t < 1:
            raise PatternError(f"{kind}{t}: size must be >= 1")
        if kind == "P":
            v, edges = t + 1, [(i, i + 1) for i in range(t)]
        elif kind == "S":
            v, edges = t + 1, [(0, i) for i in range(1, t + 1)]
        elif kind == "I":
            v, edges = 2 * t, [(2 * i, 2 * i + 1) for i in range(t)]
        else:  # C
            if t < 3:
                raise PatternError(f"C{t}: cycles need length >= 3")
            v, edges = t, [(i, (i + 1) % t) for i in range(t)]
    else:  # K_r or K_{s,t}
        mult = int(m.group(4)) if m.group(4) else 1
        r = int(m.group(5))
        if m.group(6) is not None:
            s, t = r, int(m.group(6))
            if s < 1 or t < 1:
                raise PatternError(f"K{s},{t}: sides must be >= 1")
            v = s + t
            edges = [(i, s + j) for i in range(s) for j in range(t)]
        else:
            if r < 1:
                raise PatternError(f"K{r}: size must be >= 1")
            v = r
            edges = [(i, j) for i in range(r) for j in range(i + 1, r)]
    if mult < 1:
        raise PatternError(f"multiplicity in {term!r} must be >= 1")
    # expand multiplicity as disjoint union
    total_v, total_e = 0, []
    for _ in range(mult):
        total_e.extend((a + total_v, b + total_v) for a, b in edges)
        total_v += v
    return total_v, total_e


def make_pattern(tag: str) -> PatternGraph:
    """Build a named pattern graph.

    Tags: ``P<t>`` path of length t, ``S<t>`` star with t leaves, ``I<t>``
    matching of size t, ``C<t>`` cycle, ``K<r>`` clique, ``K<s>,<t>``
    complete bipartite, and ``+``-joined disjoint unions with optional
    multiplicities, e.g. ``P2+K2+K2``, ``P2+3K2``, ``S4+2K1``.
    """
    tag = tag.strip()
    if not tag:
        raise PatternError("empty pattern tag")
    v_total = 0
    edges: list[Edge] = []
    for term in tag.split("+"):
        term = term.strip()
        tv, te = _term_graph(term)
        edges.extend((a + v_total, b + v_total) for a, b in te)
        v_total += tv
    return PatternGraph(v_total, tuple(edges), name=tag)


def patterns_isomorphic(g: PatternGraph, h: PatternGraph) -> bool:
    """Exact isomorphism test for small patterns (edge-injective map in one
    direction plus matching vertex/edge counts)."""
    if g.num_vertices != h.num_vertices or g.num_edges != h.num_edges:
        return False
    if sorted(g.degrees()) != sorted(h.degrees()):
        return False
    return subgraph_contains(g, h) is not None


def validate_pattern_tag(pattern: PatternGraph) -> bool:
    """True iff the canonical tag (when present) matches the structure."""
    if pattern.name is None:
        return True
    try:
        reference = make_pattern(pattern.name)
    except PatternError:
        return False
    return patterns_isomorphic(reference, pattern)


# ---------------------------------------------------------------------------
# Subgraph containment (backtracking, intended for patterns up to ~20 vertices)


def subgraph_contains(haystack: PatternGraph, needle: PatternGraph) -> dict[int, int] | None:
    """An injective map sending every needle edge to a haystack edge, or
    None.  Not induced: haystack may have extra edges between images."""
    if needle.num_vertices > haystack.num_vertices or needle.num_edges > haystack.num_edges:
        return None
    hay_adj = haystack.adjacency()
    ndl_adj = needle.adjacency()
    hay_deg = [len(s) for s in hay_adj]
    ndl_deg = [len(s) for s in ndl_adj]

    # order needle vertices: keep connectivity to already-placed vertices,
    # highest degree first among the unplaced
    order: list[int] = []
    placed = set()
    remaining = set(range(needle.num_vertices))
    while remaining:
        anchored = [v for v in remaining if ndl_adj[v] & placed]
        pool = anchored if anchored else list(remaining)
        nxt = max(pool, key=lambda v: (ndl_deg[v], -v))
        order.append(nxt)
        placed.add(nxt)
        remaining.remove(nxt)

    mapping: dict[int, int] = {}
    used: set[int] = set()

    def extend(pos: int) -> bool:
        if pos == len(order):
            return True
        v = order[pos]
        anchors = [u for u in ndl_adj[v] if u in mapping]
        if anchors:
            candidates = set(hay_adj[mapping[anchors[0]]])
            for u in anchors[1:]:
                candidates &= hay_adj[mapping[u]]
            candidates = sorted(candidates - used)
        else:
            candidates = [w for w in range(haystack.num_vertices) if w not in used]
        for w in candidates:
            if hay_deg[w] < ndl_deg[v]:
                continue
            mapping[v] = w
            used.add(w)
            if extend(pos + 1):
                return True
            del mapping[v]
            used.remove(w)
        return False

    return dict(mapping) if extend(0) else None


# ---------------------------------------------------------------------------
# Coloring families


class ColoringFamily:
    """n colorings of E(K_n) with k colors, one per owner vertex.

    Subclasses provide ``colors`` (vectorized, broadcastable over owner and
    endpoint arrays).  Families are immutable after construction.
    """

    n: int
    k: int
    kind: str = "abstract"

    def colors(self, v, a, b) -> np.ndarray:
        raise NotImplementedError

    def _edge_indices(self, a, b) -> np.ndarray:
        """Vectorized edge index with a cached per-row offset table; kept
        allocation-lean because this sits on the counting hot path."""
        offsets = getattr(self, "_offsets", None)
        if offsets is None:
            lo_all = np.arange(self.n, dtype=np.int64)
            offsets = lo_all * (2 * self.n - lo_all - 1) // 2
            self._offsets = offsets
        a = np.asarray(a, dtype=np.int64)
        b = np.asarray(b, dtype=np.int64)
        lo = np.minimum(a, b)
        hi = np.maximum(a, b)
        hi -= lo
        hi -= 1
        out = offsets[lo]
        out += hi
        return out

    def color(self, v: int, a: int, b: int) -> int:
        return int(self.colors(np.asarray([v]), np.asarray([a]), np.asarray([b]))[0])

    @property
    def num_edges(self) -> int:
        return self.n * (self.n - 1) // 2

    def materialize(self) -> "DenseFamily":
        if isinstance(self, DenseFamily):
            return self
        cells = self.n * self.num_edges
        if cells > 50_000_000:
            raise ScaleGuardError(f"materializing {cells} color cells exceeds the dense guard")
        a, b = np.triu_indices(self.n, k=1)
        table = np.empty((self.n, self.num_edges), dtype=np.int32)
        for v in range(self.n):
            table[v] = self.colors(np.full(len(a), v), a, b)
        return DenseFamily(self.n, self.k, table)

    def restrict(self, m: int) -> "ColoringFamily":
        """View of the family on host vertices 0..m-1 (colors unchanged)."""
        if not 2 <= m <= self.n:
            raise ValueError(f"cannot restrict host {self.n} to {m}")
        if m == self.n:
            return self
        return RestrictedFamily(self, m)


class DenseFamily(ColoringFamily):
    kind = "dense"

    def __init__(self, n: int, k: int, table: np.ndarray):
        if table.shape != (n, n * (n - 1) // 2):
            raise SizeMismatchError(f"color table shape {table.shape} does not match n={n}")
        if table.size and (table.min() < 1 or table.max() > k):
            raise ColorRangeError("colors outside [1, k]")
        self.n = n
        self.k = k
        self.table = table
        self.table.setflags(write=False)

    def colors(self, v, a, b):
        idx = self._edge_indices(a, b)
        return self.table[np.asarray(v, dtype=np.int64), idx].astype(np.int64)


class SeededFamily(ColoringFamily):
    """Uniform-random family evaluated lazily from a splitmix64 stream:
    cell (owner v, edge e) is stream position ``v * num_edges + e``."""

    kind = "uniform-random"

    def __init__(self, n: int, k: int, seed: int):
        if k < 1:
            raise ValueError("k must be >= 1")
        self.n = n
        self.k = k
        self.seed = seed & MASK64

    def colors(self, v, a, b):
        idx = self._edge_indices(a, b)
        vterm = np.asarray(v, dtype=np.int64) * self.num_edges
        if np.ndim(idx) and np.broadcast_shapes(idx.shape, vterm.shape) == idx.shape:
            idx += vterm
            cell = idx
        else:
            cell = np.asarray(idx + vterm)
        z = cell.view(np.uint64)  # fresh buffer either way; mutate in place
        z += np.uint64(1)
        z *= np.uint64(GOLDEN)
        z += np.uint64(self.seed)
        z ^= z >> np.uint64(30)
        z *= np.uint64(MIX_A)
        z ^= z >> np.uint64(27)
        z *= np.uint64(MIX_B)
        z ^= z >> np.uint64(31)
        z %= np.uint64(self.k)
        z += np.uint64(1)
        return z.view(np.int64)

    def color(self, v: int, a: int, b: int) -> int:
        cell = v * self.num_edges + edge_index_int(self.n, a, b)
        return stream_value(self.seed, cell) % self.k + 1


class MonochromaticFamily(ColoringFamily):
    kind = "monochromatic"

    def __init__(self, n: int, k: int = 1):
        if k < 1:
            raise ValueError("k must be >= 1")
        self.n = n
        self.k = k

    def colors(self, v, a, b):
        shape = np.broadcast_shapes(np.shape(v), np.shape(a), np.shape(b))
        return np.ones(shape, dtype=np.int64)


class InjectiveFamily(ColoringFamily):
    """Every edge gets a distinct color, identically across owners."""

    kind = "injective"

    def __init__(self, n: int, k: int | None = None):
        m = n * (n - 1) // 2
        if k is None:
            k = m
        if k < m:
            raise ValueError(f"injective family on {n} vertices needs k >= {m}")
        self.n = n
        self.k = k

    def colors(self, v, a, b):
        idx = self._edge_indices(a, b)
        shape = np.broadcast_shapes(np.shape(v), idx.shape)
        return np.broadcast_to(idx + 1, shape).astype(np.int64)


class RoundRobinFamily(ColoringFamily):
    """Structured adversary: every owner uses f({a,b}) = (a+b) mod k + 1,
    which is a proper edge coloring of K_n when k = n for odd n."""

    kind = "proper-ish"

    def __init__(self, n: int, k: int):
        if k < 1:
            raise ValueError("k must be >= 1")
        self.n = n
        self.k = k

    def colors(self, v, a, b):
        total = np.asarray(a, dtype=np.int64) + np.asarray(b, dtype=np.int64)
        shape = np.broadcast_shapes(np.shape(v), total.shape)
        return np.broadcast_to(total % self.k + 1, shape).astype(np.int64)


class RestrictedFamily(ColoringFamily):
    """Prefix-host view: same colorings, host limited to 0..m-1."""

    kind = "restricted"

    def __init__(self, base: ColoringFamily, m: int):
        self.base = base
        self.n = m
        self.k = base.k

    def colors(self, v, a, b):
        return self.base.colors(v, a, b)

    def color(self, v, a, b):
        return self.base.color(v, a, b)


# ---------------------------------------------------------------------------
# Embeddings and certificates


@dataclass(frozen=True)
class Embedding:
    """Injective placement of a pattern: ``vertices[i]`` is the host image
    of pattern vertex i."""

    pattern: PatternGraph
    vertices: tuple[int, ...]

    def __post_init__(self):
        if len(self.vertices) != self.pattern.num_vertices:
            raise ValueError("embedding length does not match pattern")
        if len(set(self.vertices)) != len(self.vertices):
            raise ValueError("embedding is not injective")

    def edge_images(self) -> tuple[Edge, ...]:
        return tuple(
            canonical_edge(self.vertices[a], self.vertices[b]) for a, b in self.pattern.edges
        )

    def vertex_set(self) -> frozenset[int]:
        return frozenset(self.vertices)


@dataclass(frozen=True)
class ViolationCertificate:
    """For every pattern vertex, a pair of distinct copy edges on which
    that vertex's owner coloring collides; proof the copy defeats the
    family."""

    embedding: Embedding
    collisions: tuple[tuple[Edge, Edge], ...]

    def __post_init__(self):
        if len(self.collisions) != self.embedding.pattern.num_vertices:
            raise ValueError("one collision pair per pattern vertex required")


@dataclass(frozen=True)
class AnchoredViolation:
    """A certificate plus extension data.

    ``anchor_edges`` (e1, e2): copy edges on which every slack vertex's own
    coloring collides — supports adding arbitrary extra pattern vertices.
    ``anchor_vertices`` (b1, b2): copy vertices such that each slack vertex
    p collides on (p b1, p b2) — the clique-style anchor, valid only for
    targets that contain both of those edges.
    """

    certificate: ViolationCertificate
    anchor_edges: tuple[Edge, Edge] | None = None
    anchor_vertices: tuple[int, int] | None = None
    slack: tuple[int, ...] = ()

    def __post_init__(self):
        if self.anchor_edges is not None and self.anchor_vertices is not None:
            raise ValueError("anchor is either an edge pair or a vertex pair, not both")
        if self.slack and self.anchor_edges is None and self.anchor_vertices is None:
            raise ValueError("slack vertices require an anchor")


# ---------------------------------------------------------------------------
# Copy enumeration

_MAX_ENUM_VERTICES = 10


@functools.lru_cache(maxsize=128)
def _distinct_placements(key: tuple) -> tuple[tuple[int, ...], ...]:
    """Lexicographically-least representative permutation for each distinct
    image of the pattern on vertex set {0..v-1}.  len == v!/|Aut|."""
    num_vertices, edges = key
    if num_vertices > _MAX_ENUM_VERTICES:
        raise ScaleGuardError(
            f"copy enumeration supports patterns with <= {_MAX_ENUM_VERTICES} vertices"
        )
    seen: dict[frozenset, tuple[int, ...]] = {}
    for perm in itertools.permutations(range(num_vertices)):
        image = frozenset(canonical_edge(perm[a], perm[b]) for a, b in edges)
        if image not in seen:
            seen[image] = perm
    return tuple(sorted(seen.values()))


def automorphism_count(pattern: PatternGraph) -> int:
    import math

    return math.factorial(pattern.num_vertices) // len(_distinct_placements(pattern.key()))


def count_copies(pattern: PatternGraph, n: int) -> int:
    import math

    v = pattern.num_vertices
    if v > n:
        return 0
    return math.comb(n, v) * len(_distinct_placements(pattern.key()))


def enumerate_copies(pattern: PatternGraph, n: int):
    """Yield each copy of the pattern in K_n exactly once, as an Embedding.

    Copies are images (vertex set + edge set); the count is
    C(n, v) * v! / |Aut|.  Order: vertex subsets in combination order, then
    placements in representative order — this order defines "first bad
    copy" everywhere in the package.
    """
    v = pattern.num_vertices
    if v > n:
        raise ValueError(f"pattern with {v} vertices does not fit host {n}")
    placements = _distinct_placements(pattern.key())
    for subset in itertools.combinations(range(n), v):
        for perm in placements:
            yield Embedding(pattern, tuple(subset[perm[i]] for i in range(v)))


# ---------------------------------------------------------------------------
# Family file I/O
#
# Format: header line "n k", then n owner blocks, block v holding the
# colors of all host edges {a,b} (a < b) in lexicographic order, as
# whitespace-separated integers.


def write_family(family: ColoringFamily, path) -> None:
    dense = family.materialize()
    with open(path, "w") as fh:
        fh.write(f"{dense.n} {dense.k}\n")
        for v in range(dense.n):
            fh.write(" ".join(str(int(c)) for c in dense.table[v]))
            fh.write("\n")


def read_family(path) -> DenseFamily:
    with open(path) as fh:
        text = fh.read()
    tokens = text.split()
    if len(tokens) < 2:
        raise FamilyFormatError("missing 'n k' header")
    try:
        n, k = int(tokens[0]), int(tokens[1])
    except ValueError as exc:
        raise FamilyFormatError(f"non-integer header: {exc}") from None
    if n < 2 or k < 1:
        raise FamilyFormatError(f"invalid header n={n} k={k}")
    m = n * (n - 1) // 2
    body = tokens[2:]
    if len(body) != n * m:
        raise SizeMismatchError(f"expected {n * m} colors for n={n}, found {len(body)}")
    try:
        values = np.array([int(t) for t in body], dtype=np.int64).reshape(n, m)
    except ValueError as exc:
        raise FamilyFormatError(f"non-integer color token: {exc}") from None
    if values.min() < 1 or values.max() > k:
        bad = values.min() if values.min() < 1 else values.max()
        raise ColorRangeError(f"color {bad} outside [1, {k}]")
    return DenseFamily(n, k, values.astype(np.int32))


def read_pattern_file(path) -> PatternGraph:
    """Pattern file: first line ``v``, then one ``a b`` pair per line,
    optional trailing line ``isolated r`` adding r isolated vertices."""
    with open(path) as fh:
        lines = [ln.strip() for ln in fh if ln.strip()]
    if not lines:
        raise PatternError("empty pattern file")
    try:
        v = int(lines[0])
    except ValueError:
        raise PatternError(f"bad vertex count line {lines[0]!r}") from None
    edges = []
    extra = 0
    for ln in lines[1:]:
        parts = ln.split()
        if parts[0] == "isolated":
            extra = int(parts[1])
            continue
        if len(parts) != 2:
            raise PatternError(f"bad edge line {ln!r}")
        edges.append((int(parts[0]), int(parts[1])))
    return PatternGraph(v + extra, tuple(edges))


# ---------------------------------------------------------------------------
# Certificate JSON


def _edge_to_list(e: Edge) -> list[int]:
    return [int(e[0]), int(e[1])]


def certificate_to_dict(cert: ViolationCertificate) -> dict:
    return {
        "pattern": {
            "num_vertices": cert.embedding.pattern.num_vertices,
            "edges": [_edge_to_list(e) for e in cert.embedding.pattern.edges],
            "name": cert.embedding.pattern.name,
        },
        "embedding": [int(x) for x in cert.embedding.vertices],
        "collisions": [[_edge_to_list(e1), _edge_to_list(e2)] for e1, e2 in cert.collisions],
    }


def anchored_to_dict(av: AnchoredViolation) -> dict:
    out = {"certificate": certificate_to_dict(av.certificate)}
    if av.anchor_edges is not None:
        out["anchor_edges"] = [_edge_to_list(e) for e in av.anchor_edges]
    if av.anchor_vertices is not None:
        out["anchor_vertices"] = [int(x) for x in av.anchor_vertices]
    out["slack"] = [int(x) for x in av.slack]
    return out


def certificate_from_dict(data: dict) -> ViolationCertificate:
    pat = data["pattern"]
    pattern = PatternGraph(
        pat["num_vertices"], tuple(tuple(e) for e in pat["edges"]), pat.get("name")
    )
    embedding = Embedding(pattern, tuple(data["embedding"]))
    collisions = tuple((tuple(p[0]), tuple(p[1])) for p in data["collisions"])
    return ViolationCertificate(embedding, collisions)


def anchored_from_dict(data: dict) -> AnchoredViolation:
    cert = certificate_from_dict(data["certificate"])
    anchor_edges = data.get("anchor_edges")
    anchor_vertices = data.get("anchor_vertices")
    return AnchoredViolation(
        cert,
        tuple(tuple(e) for e in anchor_edges) if anchor_edges else None,
        tuple(anchor_vertices) if anchor_vertices else None,
        tuple(data.get("slack", ())),
    )


def write_certificate(av: AnchoredViolation, path) -> None:
    with open(path, "w") as fh:
        json.dump(anchored_to_dict(av), fh, indent=1)
        fh.write("\n")


def read_certificate(path) -> AnchoredViolation:
    with open(path) as fh:
        return anchored_from_dict(json.load(fh))
