"""Exact computation of the minimum color count at desk scale.

Three routes, from slowest-but-simplest to most structured:

* ``raw_good_exists`` — enumerate every family; the independence anchor.
* ``decide_good_exists`` — backtracking over color cells with per-owner
  first-use symmetry breaking and pruning on falsified copies.
* ``export_cnf`` + any complete DIMACS solver (a small reference DPLL is
  bundled for the bundled tests and the CLI round trip).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .kernels import edge_index_int
from .model import (
    ColoringFamily,
    DenseFamily,
    PatternGraph,
    ScaleGuardError,
    enumerate_copies,
)
from .verify import family_is_good

RAW_LOOP_LIMIT = 400_000
RAW_BIT_CELLS = 26


class SearchBudgetExceeded(RuntimeError):
    """Backtracking ran past its node budget."""


@dataclass(frozen=True)
class ExactResult:
    n: int
    pattern: PatternGraph
    value: int | None  # exact minimum when known
    lower: int  # largest k proven infeasible, plus one
    upper: int | None  # smallest k with a verified witness
    witness_family: DenseFamily | None
    method: str


def _copies_data(pattern: PatternGraph, n: int):
    m = n * (n - 1) // 2
    copies = []
    for emb in enumerate_copies(pattern, n):
        edge_idx = tuple(edge_index_int(n, a, b) for a, b in emb.edge_images())
        copies.append((emb.vertices, edge_idx))
    affected: dict[tuple[int, int], list[int]] = {}
    for cid, (verts, edges) in enumerate(copies):
        for v in verts:
            for e in edges:
                affected.setdefault((v, e), []).append(cid)
    return m, copies, affected


def decide_good_exists(
    n: int,
    pattern: PatternGraph,
    k: int,
    node_budget: int = 5_000_000,
) -> tuple[bool, DenseFamily | None]:
    """Complete search for a good family with k colors.

    Colors are assigned cell by cell (owner-major); each owner's colors
    must appear in first-use order, which quotients per-owner color
    permutations.  A branch dies as soon as some copy has every vertex
    completely colored and non-rainbow on it.
    """
    if pattern.num_vertices > n:
        raise ValueError("pattern does not fit the host")
    m, copies, affected = _copies_data(pattern, n)
    assign = [[0] * m for _ in range(n)]
    max_used = [0] * n
    nodes = 0

    def vertex_dead(cid: int, w: int) -> bool:
        seen = set()
        for e in copies[cid][1]:
            c = assign[w][e]
            if c == 0:
                return False
            if c in seen:
                return True
            seen.add(c)
        return False

    def copy_falsified(cid: int) -> bool:
        return all(vertex_dead(cid, w) for w in copies[cid][0])

    def dfs(cell: int) -> bool:
        nonlocal nodes
        if cell == n * m:
            return True
        v, e = divmod(cell, m)
        old_max = max_used[v]
        for c in range(1, min(k, old_max + 1) + 1):
            nodes += 1
            if nodes > node_budget:
                raise SearchBudgetExceeded(f"budget {node_budget} exhausted")
            assign[v][e] = c
            max_used[v] = max(old_max, c)
            if not any(copy_falsified(cid) for cid in affected.get((v, e), ())):
                if dfs(cell + 1):
                    return True
            assign[v][e] = 0
            max_used[v] = old_max
        return False

    if dfs(0):
        table = np.array(assign, dtype=np.int32)
        family = DenseFamily(n, k, table)
        report = family_is_good(family, pattern)
        assert report.is_good, "search returned a family the verifier rejects"
        return True, family
    return False, None


def _naive_good(family: ColoringFamily, pattern: PatternGraph) -> bool:
    """Labeled-embedding goodness check (no copy dedup); oracle use only."""
    v = pattern.num_vertices
    for image in itertools.permutations(range(family.n), v):
        ok = False
        for owner in image:
            colors = [family.color(owner, image[a], image[b]) for a, b in pattern.edges]
            if len(set(colors)) == len(colors):
                ok = True
                break
        if not ok:
            return False
    return True


def raw_good_exists(n: int, pattern: PatternGraph, k: int) -> bool:
    """Exhaustive loop over all k^(n*m) families.

    Plain product loop for tiny spaces; for k = 2 a vectorized bit sweep
    extends the envelope to n*m <= 26 cells.  Raises ScaleGuardError
    beyond that.
    """
    m = n * (n - 1) // 2
    total = k ** (n * m)
    if total <= RAW_LOOP_LIMIT:
        for combo in itertools.product(range(1, k + 1), repeat=n * m):
            table = np.array(combo, dtype=np.int32).reshape(n, m)
            if _naive_good(DenseFamily(n, k, table), pattern):
                return True
        return False
    if k == 2 and n * m <= RAW_BIT_CELLS:
        return _raw_bit_sweep(n, pattern)
    raise ScaleGuardError(f"{total} families exceed the raw-loop envelope")


def _raw_bit_sweep(n: int, pattern: PatternGraph) -> bool:
    """All 2-colorings at once: one bit per (owner, edge) cell."""
    m = n * (n - 1) // 2
    cells = n * m
    arr = np.arange(1 << cells, dtype=np.uint32)
    all_good = np.ones(len(arr), dtype=bool)
    for emb in enumerate_copies(pattern, n):
        edges = [edge_index_int(n, a, b) for a, b in emb.edge_images()]
        good_copy = np.zeros(len(arr), dtype=bool)
        for owner in emb.vertices:
            if len(edges) <= 1:
                good_copy |= True
                break
            if len(edges) == 2:
                b0 = owner * m + edges[0]
                b1 = owner * m + edges[1]
                good_copy |= ((arr >> b0) ^ (arr >> b1)) & 1 == 1
            # >= 3 edges with 2 colors can never be rainbow
        all_good &= good_copy
        if not all_good.any():
            return False
    return bool(all_good.any())


def compute_c(
    n: int,
    pattern: PatternGraph,
    k_max: int,
    node_budget: int = 5_000_000,
) -> ExactResult:
    """Scan k = 1..k_max with the backtracking decision; returns the exact
    value or the best proven bracket when the budget runs out."""
    lower = 1
    for k in range(1, k_max + 1):
        try:
            ok, witness = decide_good_exists(n, pattern, k, node_budget)
        except SearchBudgetExceeded:
            return ExactResult(n, pattern, None, lower, None, None, "backtracking-bracket")
        if ok:
            return ExactResult(n, pattern, k, lower, k, witness, "backtracking")
        lower = k + 1
    return ExactResult(n, pattern, None, lower, None, None, "backtracking-bracket")


# ---------------------------------------------------------------------------
# DIMACS CNF export
#
# One-hot color variables per (owner, edge); per copy, a disjunction of
# per-vertex rainbow selectors, where selecting a vertex forbids every
# monochromatic copy-edge pair under that owner.


@dataclass(frozen=True)
class CnfInfo:
    num_vars: int
    num_clauses: int
    color_vars: int
    aux_vars: int
    num_copies: int


def _color_var(n: int, m: int, k: int, v: int, e: int, c: int) -> int:
    return 1 + (v * m + e) * k + (c - 1)


def export_cnf(n: int, pattern: PatternGraph, k: int, path) -> CnfInfo:
    m = n * (n - 1) // 2
    copies = list(enumerate_copies(pattern, n))
    color_vars = n * m * k
    aux_vars = len(copies) * pattern.num_vertices
    clauses: list[list[int]] = []

    for v in range(n):
        for e in range(m):
            base = [_color_var(n, m, k, v, e, c) for c in range(1, k + 1)]
            clauses.append(base)
            for i in range(k):
                for j in range(i + 1, k):
                    clauses.append([-base[i], -base[j]])

    aux = color_vars
    for emb in copies:
        edges = [edge_index_int(n, a, b) for a, b in emb.edge_images()]
        selectors = []
        for owner in emb.vertices:
            aux += 1
            selectors.append(aux)
            for i in range(len(edges)):
                for j in range(i + 1, len(edges)):
                    for c in range(1, k + 1):
                        clauses.append(
                            [
                                -aux,
                                -_color_var(n, m, k, owner, edges[i], c),
                                -_color_var(n, m, k, owner, edges[j], c),
                            ]
                        )
        clauses.append(selectors)

    info = CnfInfo(color_vars + aux_vars, len(clauses), color_vars, aux_vars, len(copies))
    with open(path, "w") as fh:
        fh.write(f"c good-family encoding: n={n} k={k} pattern={pattern.name or pattern.edges}\n")
        fh.write(f"c color var for (owner v, edge e, color c) = 1 + (v*{m} + e)*{k} + (c-1)\n")
        fh.write(f"c aux rainbow selectors start at {color_vars + 1}, one per (copy, copy-vertex)\n")
        fh.write(f"p cnf {info.num_vars} {info.num_clauses}\n")
        for clause in clauses:
            fh.write(" ".join(str(lit) for lit in clause) + " 0\n")
    return info


def decode_model(n: int, k: int, model: set[int]) -> DenseFamily:
    """Rebuild a family from the true color variables of a model."""
    m = n * (n - 1) // 2
    table = np.zeros((n, m), dtype=np.int32)
    for v in range(n):
        for e in range(m):
            for c in range(1, k + 1):
                if _color_var(n, m, k, v, e, c) in model:
                    table[v, e] = c
                    break
    return DenseFamily(n, k, table)


# ---------------------------------------------------------------------------
# Reference DPLL (complete; tiny instances only)


def parse_dimacs(path) -> tuple[int, list[list[int]]]:
    clauses = []
    num_vars = 0
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith("c"):
                continue
            if line.startswith("p"):
                num_vars = int(line.split()[2])
                continue
            lits = [int(tok) for tok in line.split()]
            assert lits[-1] == 0
            clauses.append(lits[:-1])
    return num_vars, clauses


def solve_cnf(num_vars: int, clauses: list[list[int]]) -> set[int] | None:
    """Unit-propagating DPLL; returns the set of true literals or None."""
    assignment: dict[int, bool] = {}

    def value(lit: int):
        var = abs(lit)
        if var not in assignment:
            return None
        return assignment[var] == (lit > 0)

    def propagate(trail: list[int]) -> bool:
        changed = True
        while changed:
            changed = False
            for clause in clauses:
                unassigned = None
                satisfied = False
                count = 0
                for lit in clause:
                    val = value(lit)
                    if val is True:
                        satisfied = True
                        break
                    if val is None:
                        unassigned = lit
                        count += 1
                if satisfied:
                    continue
                if count == 0:
                    return False
                if count == 1:
                    var = abs(unassigned)
                    assignment[var] = unassigned > 0
                    trail.append(var)
                    changed = True
        return True

    def dfs() -> bool:
        trail: list[int] = []
        if not propagate(trail):
            for var in trail:
                del assignment[var]
            return False
        branch = None
        for var in range(1, num_vars + 1):
            if var not in assignment:
                branch = var
                break
        if branch is None:
            return True
        for choice in (True, False):
            assignment[branch] = choice
            if dfs():
                return True
            del assignment[branch]
        for var in trail:
            del assignment[var]
        return False

    if not dfs():
        return None
    return {var if val else -var for var, val in assignment.items()}
