"""Coloring-family generators: seeded random, structured adversaries, and
a resampling constructor for the upper-bound side.

The resampler is a search heuristic in the style of constructive local
lemma algorithms; the verifier is the sole authority on its output.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .model import (
    ColoringFamily,
    DenseFamily,
    InjectiveFamily,
    MonochromaticFamily,
    PatternGraph,
    RoundRobinFamily,
    SeededFamily,
)
from .rng import SplitMix64
from .verify import family_is_good

KINDS = ("uniform-random", "monochromatic", "injective", "proper-ish", "resampled-good")


@dataclass(frozen=True)
class GeneratorSpec:
    kind: str
    n: int
    k: int
    seed: int = 0
    pattern: PatternGraph | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown generator kind {self.kind!r}")
        if self.kind == "resampled-good" and self.pattern is None:
            raise ValueError("resampled-good requires a pattern")


def generate(spec: GeneratorSpec) -> ColoringFamily:
    """Build the family described by ``spec``; the seed fully determines
    the output for every kind."""
    if spec.kind == "uniform-random":
        return SeededFamily(spec.n, spec.k, spec.seed)
    if spec.kind == "monochromatic":
        return MonochromaticFamily(spec.n, spec.k)
    if spec.kind == "injective":
        return InjectiveFamily(spec.n, spec.k)
    if spec.kind == "proper-ish":
        return RoundRobinFamily(spec.n, spec.k)
    family, _ = construct_good_family(spec.n, spec.pattern, spec.k, seed=spec.seed)
    if family is None:
        raise RuntimeError("resampled-good: budget exhausted without a good family")
    return family


@dataclass(frozen=True)
class ResampleReport:
    success: bool
    resamples: int
    bad_copies_seen: int


def construct_good_family(
    n: int,
    pattern: PatternGraph,
    k: int,
    seed: int = 0,
    budget: int = 10**6,
) -> tuple[DenseFamily | None, ResampleReport]:
    """Search for a good family by resampling bad copies.

    Start from the seeded uniform family; while some copy has no rainbow
    vertex, redraw every (owner, copy-edge) cell owned by the copy's
    vertices, always taking the first bad copy in enumeration order.  The
    returned family, when present, has been certified by
    :func:`family_is_good`; the heuristic itself carries no guarantee.
    """
    stream = SplitMix64(seed)
    m = n * (n - 1) // 2
    table = np.empty((n, m), dtype=np.int32)
    flat = table.reshape(-1)
    for i in range(n * m):
        flat[i] = stream.next_below(k) + 1

    from .kernels import edge_index_int

    resamples = 0
    while True:
        report = family_is_good(DenseFamily(n, k, table.copy()), pattern)
        if report.is_good:
            return DenseFamily(n, k, table.copy()), ResampleReport(True, resamples, resamples)
        if resamples >= budget:
            return None, ResampleReport(False, resamples, resamples)
        witness = report.witness
        images = witness.embedding.edge_images()
        for owner in witness.embedding.vertices:
            for a, b in images:
                table[owner, edge_index_int(n, a, b)] = stream.next_below(k) + 1
        resamples += 1
