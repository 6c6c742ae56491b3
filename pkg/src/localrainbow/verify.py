"""Ground-truth semantics: rainbow checks, goodness of a family,
certificate validation, and certificate extension.

Everything downstream (finders, exact solver, generators) is checked
against this module; it contains no pigeonhole machinery of its own.
"""

from __future__ import annotations

from dataclasses import dataclass

from .model import (
    AnchoredViolation,
    ColoringFamily,
    Embedding,
    PatternGraph,
    ScaleGuardError,
    ViolationCertificate,
    canonical_edge,
    count_copies,
    enumerate_copies,
    subgraph_contains,
)

DEFAULT_COPY_GUARD = 10**8


@dataclass(frozen=True)
class GoodnessReport:
    is_good: bool
    witness: ViolationCertificate | None
    copies_checked: int


def is_rainbow(family: ColoringFamily, owner: int, embedding: Embedding) -> bool:
    """True iff ``owner``'s coloring gives pairwise-distinct colors to all
    edges of the copy."""
    if not 0 <= owner < family.n:
        raise ValueError(f"owner {owner} outside host 0..{family.n - 1}")
    seen = set()
    for a, b in embedding.edge_images():
        c = family.color(owner, a, b)
        if c in seen:
            return False
        seen.add(c)
    return True


def copy_is_good(family: ColoringFamily, embedding: Embedding) -> bool:
    """True iff some vertex of the copy induces a rainbow coloring on it."""
    return any(is_rainbow(family, owner, embedding) for owner in embedding.vertices)


def _collision_pairs(family: ColoringFamily, embedding: Embedding) -> tuple | None:
    """Per-vertex lexicographically-least colliding copy-edge pair, or None
    if some vertex is rainbow (copy is good)."""
    images = embedding.edge_images()
    pairs = []
    for owner in embedding.vertices:
        colors = [family.color(owner, a, b) for a, b in images]
        found = None
        for i in range(len(images)):
            for j in range(i + 1, len(images)):
                if colors[i] == colors[j]:
                    found = (images[i], images[j])
                    break
            if found:
                break
        if found is None:
            return None
        pairs.append(found)
    return tuple(pairs)


def find_bad_copy(
    family: ColoringFamily,
    pattern: PatternGraph,
    max_copies: int | None = None,
) -> tuple[ViolationCertificate | None, int]:
    """Scan copies in enumeration order for one with no rainbow vertex;
    returns (certificate or None, copies scanned).  ``max_copies`` bounds
    the scan (None = all)."""
    checked = 0
    for embedding in enumerate_copies(pattern, family.n):
        if max_copies is not None and checked >= max_copies:
            break
        checked += 1
        pairs = _collision_pairs(family, embedding)
        if pairs is not None:
            return ViolationCertificate(embedding, pairs), checked
    return None, checked


def family_is_good(
    family: ColoringFamily,
    pattern: PatternGraph,
    copy_guard: int = DEFAULT_COPY_GUARD,
) -> GoodnessReport:
    """Exhaustively decide goodness; on failure return the first bad copy
    (enumeration order) as a re-checkable certificate."""
    total = count_copies(pattern, family.n)
    if total > copy_guard:
        raise ScaleGuardError(f"{total} copies exceed the guard of {copy_guard}")
    witness, checked = find_bad_copy(family, pattern)
    return GoodnessReport(witness is None, witness, checked)


def certificate_problems(family: ColoringFamily, cert: ViolationCertificate) -> list[str]:
    """Per-vertex diagnosis; empty list means the certificate is valid."""
    problems: list[str] = []
    embedding = cert.embedding
    if any(not 0 <= x < family.n for x in embedding.vertices):
        return [f"embedding image outside host 0..{family.n - 1}"]
    copy_edges = set(embedding.edge_images())
    for pv, (e1, e2) in enumerate(cert.collisions):
        owner = embedding.vertices[pv]
        e1 = canonical_edge(*e1)
        e2 = canonical_edge(*e2)
        if e1 == e2:
            problems.append(f"vertex {pv}: collision edges are not distinct")
            continue
        if e1 not in copy_edges or e2 not in copy_edges:
            problems.append(f"vertex {pv}: collision edge outside the copy")
            continue
        if family.color(owner, *e1) != family.color(owner, *e2):
            problems.append(f"vertex {pv}: colors differ, recorded collision is false")
    return problems


def check_certificate(family: ColoringFamily, cert: ViolationCertificate) -> bool:
    """True iff every recorded collision is a genuine equal-color pair of
    distinct copy edges.  Validity implies the copy is not good."""
    return not certificate_problems(family, cert)


def check_anchored(family: ColoringFamily, av: AnchoredViolation) -> bool:
    """Certificate validity plus re-check of the anchor property for every
    slack vertex."""
    if not check_certificate(family, av.certificate):
        return False
    embedding = av.certificate.embedding
    image = set(embedding.vertices)
    if av.anchor_edges is not None:
        e1, e2 = av.anchor_edges
        copy_edges = set(embedding.edge_images())
        if canonical_edge(*e1) not in copy_edges or canonical_edge(*e2) not in copy_edges:
            return False
        for p in av.slack:
            if p in image or not 0 <= p < family.n:
                return False
            if family.color(p, *e1) != family.color(p, *e2):
                return False
    elif av.anchor_vertices is not None:
        b1, b2 = av.anchor_vertices
        if b1 not in image or b2 not in image:
            return False
        for p in av.slack:
            if p in image or not 0 <= p < family.n:
                return False
            if family.color(p, p, b1) != family.color(p, p, b2):
                return False
    elif av.slack:
        return False
    return True


def extend_violation(
    family: ColoringFamily,
    cert: ViolationCertificate,
    target: PatternGraph,
) -> ViolationCertificate:
    """Extend a certificate for H' to a supergraph H on the same number of
    vertices: non-rainbow on a subset of edges is non-rainbow on a superset.
    """
    source = cert.embedding.pattern
    if source.num_vertices != target.num_vertices:
        raise ValueError(
            f"vertex counts differ ({source.num_vertices} vs {target.num_vertices})"
        )
    mapping = subgraph_contains(target, source)
    if mapping is None:
        raise ValueError("certified pattern is not a subgraph of the target")
    inverse = {w: v for v, w in mapping.items()}
    vertices = tuple(cert.embedding.vertices[inverse[u]] for u in range(target.num_vertices))
    collisions = tuple(cert.collisions[inverse[u]] for u in range(target.num_vertices))
    return ViolationCertificate(Embedding(target, vertices), collisions)


def extend_with_slack(
    family: ColoringFamily,
    av: AnchoredViolation,
    target: PatternGraph,
) -> ViolationCertificate:
    """Extend an anchored violation to a target containing the certified
    pattern plus extra vertices; each added vertex's collision pair comes
    from the anchor."""
    cert = av.certificate
    source = cert.embedding.pattern
    extra = target.num_vertices - source.num_vertices
    if extra < 0:
        raise ValueError("target has fewer vertices than the certified pattern")
    if extra > len(av.slack):
        raise ValueError(f"slack of size {len(av.slack)} cannot supply {extra} vertices")
    if av.anchor_edges is None and av.anchor_vertices is None and extra > 0:
        raise ValueError("violation carries no anchor")
    mapping = subgraph_contains(target, source)
    if mapping is None:
        raise ValueError("certified pattern is not a subgraph of the target")

    vertices: list[int | None] = [None] * target.num_vertices
    collisions: list[tuple | None] = [None] * target.num_vertices
    for sv, tv in mapping.items():
        vertices[tv] = cert.embedding.vertices[sv]
        collisions[tv] = cert.collisions[sv]

    slack_iter = iter(av.slack)
    if av.anchor_edges is not None:
        e1, e2 = av.anchor_edges
        for tv in range(target.num_vertices):
            if vertices[tv] is None:
                p = next(slack_iter)
                vertices[tv] = p
                collisions[tv] = (e1, e2)
    else:
        b1, b2 = av.anchor_vertices  # type: ignore[misc]
        # locate the pattern vertices mapped onto the anchor vertices
        loc = {cert.embedding.vertices[sv]: mapping[sv] for sv in mapping}
        tb1, tb2 = loc.get(b1), loc.get(b2)
        if tb1 is None or tb2 is None:
            raise ValueError("anchor vertices are not part of the certified copy")
        target_edges = set(target.edges)
        for tv in range(target.num_vertices):
            if vertices[tv] is None:
                if (
                    canonical_edge(tv, tb1) not in target_edges
                    or canonical_edge(tv, tb2) not in target_edges
                ):
                    raise ValueError(
                        "vertex-pair anchor requires the target to join every new "
                        "vertex to both anchor vertices"
                    )
                p = next(slack_iter)
                vertices[tv] = p
                collisions[tv] = (canonical_edge(p, b1), canonical_edge(p, b2))

    result = ViolationCertificate(
        Embedding(target, tuple(vertices)), tuple(collisions)  # type: ignore[arg-type]
    )
    problems = certificate_problems(family, result)
    if problems:
        raise ValueError("extension produced an invalid certificate: " + "; ".join(problems))
    return result
