"""The acceptance suite: one callable check per criterion.

Each criterion function returns a :class:`CriterionResult`; ``run_all`` runs
the whole battery.  The pytest acceptance module and the ``selftest`` command
both drive these, so the printed pass/fail lines match in both places.

Sizes: counts fixed by the criteria (trees per dimension, sample counts) live
in the ``default`` preset; the ``tiny`` preset scales them down for smoke
runs and is never used by the shipped tests.  Input sizes the criteria leave
open (vertex counts per tree) are drawn from ranges chosen to keep the whole
battery at desk scale; dimension-3 towers grow quickly, so their trees are
the smallest.
"""

from __future__ import annotations

import random
import time
from dataclasses import dataclass, field, replace
from typing import Callable, Optional

from . import verify
from .construction import (completion_round, degree_bounds, grow_edges,
                           localize, mapping_telescope, projection_map,
                           telescope)
from .core import (Complex, base_restriction, induced_subcomplex, skeleton,
                   union, vertex_degrees)
from .homology import homology, induced_map_homology, is_acyclic
from .verify import (check_pseudofibration, check_telescope_lemmas,
                     collapse_to_point, degree_audit, fixture, shelled_tree,
                     surjective_on_simplices)


@dataclass
class Sizes:
    name: str
    degree_trees: int = 200          # per dimension, <= 30 vertices each
    homology_trees: int = 50         # per dimension
    fiber_trees: dict = field(default_factory=lambda: {1: 25, 2: 10, 3: 4})
    telescope_pairs: int = 100
    grow_outputs: int = 20           # per dimension
    telescope_inputs: int = 10       # mapping-telescope runs per dimension
    truncation_runs: int = 20
    max_vertices: dict = field(default_factory=lambda: {1: 30, 2: 30, 3: 30})
    homology_sizes: dict = field(default_factory=lambda: {1: 20, 2: 7, 3: 2})
    seed: int = 7


def preset(name: str) -> Sizes:
    if name == "default":
        return Sizes("default")
    if name == "tiny":
        return Sizes("tiny", degree_trees=12, homology_trees=6,
                     fiber_trees={1: 4, 2: 2, 3: 1}, telescope_pairs=20,
                     grow_outputs=4, telescope_inputs=3, truncation_runs=6,
                     homology_sizes={1: 8, 2: 4, 3: 1})
    raise ValueError(f"unknown size preset {name!r}")


@dataclass
class CriterionResult:
    number: int
    name: str
    passed: bool
    detail: str
    seconds: float = 0.0

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"criterion {self.number:2d} {self.name:<24s} {status}  {self.detail}"


def _rng(sizes: Sizes, *tags) -> random.Random:
    # string seeding is stable across processes (tuple hashes are not)
    return random.Random(":".join([str(sizes.seed), *map(str, tags)]))


def _tree_sizes(rng: random.Random, dim: int, count: int, max_vertices: int) -> list:
    """Top-simplex counts for random trees, <= max_vertices vertices each.

    Level-3 towers have millions of edges near thirty vertices, so dimension 3
    draws mostly small trees plus a fixed ladder of large ones; the lower
    dimensions sample the full range.
    """
    cap = max(1, max_vertices - dim)         # vertices = dim + 1 + (size - 1)
    if dim < 3:
        return [min(rng.randint(1, cap), rng.randint(1, cap)) for _ in range(count)]
    ladder = [s for s in (12, 16, 20) if s <= cap][:max(0, count - 1)]
    small = [1 + min(rng.randint(0, 10), rng.randint(0, 10), cap - 1)
             for _ in range(count - len(ladder))]
    return small + ladder


def _degree_corpus(sizes: Sizes, dim: int):
    rng = _rng(sizes, "degree", dim)
    for i, size in enumerate(_tree_sizes(rng, dim, sizes.degree_trees,
                                         sizes.max_vertices[dim])):
        yield f"tree{dim}#{i}", shelled_tree(dim, size, seed=rng.randrange(2 ** 30))
    for name in _fixtures_of_dim(dim):
        yield name, fixture(name)


def _fixtures_of_dim(dim: int) -> list:
    names = {1: ["circle_3", "path_5", "star_6"],
             2: ["sphere2_4", "torus7", "rp2_6", "klein8"],
             3: []}
    return names.get(dim, [])


def _homology_corpus(sizes: Sizes, dim: int, count: Optional[int] = None):
    rng = _rng(sizes, "homology", dim)
    n = count if count is not None else sizes.homology_trees
    cap = dim + sizes.homology_sizes[dim]
    for i in range(n):
        size = min(rng.randint(1, cap - dim), rng.randint(1, cap - dim))
        yield f"tree{dim}#{i}", shelled_tree(dim, size, seed=rng.randrange(2 ** 30))


# ---------------------------------------------------------------------------
# criteria
# ---------------------------------------------------------------------------

def criterion_constants(sizes: Sizes) -> CriterionResult:
    """Degree-bound table: fixed small values and recurrence = closed form."""
    t0 = time.time()
    problems = []
    b1, b2, b3 = degree_bounds(1), degree_bounds(2), degree_bounds(3)
    if (b1.one_sided, b1.total) != (3, 4):
        problems.append(f"level 1 gave {b1}")
    if (b2.one_sided, b2.total) != (12, 22):
        problems.append(f"level 2 gave {b2}")
    if (b3.one_sided, b3.total) != (40, 78):
        problems.append(f"level 3 gave {b3}")
    for n in range(1, 21):
        b = degree_bounds(n)          # raises if recurrence != closed form
        if b.total != 2 * (b.one_sided - 1):
            problems.append(f"total != 2(K-1) at n={n}")
    return CriterionResult(1, "constants", not problems,
                           "; ".join(problems) or "bounds(1)=(3,4) bounds(2)=(12,22), closed form to n=20",
                           time.time() - t0)


def criterion_degree_bound(sizes: Sizes) -> CriterionResult:
    """Every localize output stays under the level bound, edge-graph pipeline.

    Random trees run with the dimension cap at 1 (the pipeline is
    dimension-local, so the capped run has the same edge graph); a slice of
    them and all fixtures run fully, and full-vs-capped edge graphs are
    compared on that slice.
    """
    t0 = time.time()
    checked = 0
    problems = []
    for dim in (1, 2, 3):
        M = degree_bounds(dim).total
        K = degree_bounds(dim).one_sided
        for i, (name, S) in enumerate(_degree_corpus(sizes, dim)):
            full = S.count(0) <= {1: 30, 2: 14, 3: 7}[dim]
            T1, _, _ = localize(S, dim_cap=1)
            rep = degree_audit(T1, M)
            checked += 1
            if not rep.ok:
                problems.append(f"{name}: degree {rep.max_degree} > {M}")
            if rep.max_up > K - 1 or rep.max_down > K - 1:
                problems.append(f"{name}: one-sided count exceeds {K - 1}")
            if full and i % 29 == 0:
                T, _, _ = localize(S)
                if skeleton(T, 1).simplices != T1.simplices:
                    problems.append(f"{name}: capped run differs from full skeleton")
            if problems[5:]:
                break
    detail = f"{checked} inputs, max bound M_3={degree_bounds(3).total}"
    return CriterionResult(2, "degree-bound", not problems,
                           "; ".join(problems[:5]) or detail, time.time() - t0)


def criterion_dimension(sizes: Sizes) -> CriterionResult:
    """dim(T) == dim(S) across the homology corpus and fixtures."""
    t0 = time.time()
    problems = []
    checked = 0
    for dim in (1, 2, 3):
        corpus = list(_homology_corpus(sizes, dim, count=max(
            2, sizes.homology_trees // 5)))
        corpus += [(n, fixture(n)) for n in _fixtures_of_dim(dim)]
        for name, S in corpus:
            T, _, tower = localize(S)
            checked += 1
            if T.dim != S.dim:
                problems.append(f"{name}: dim {T.dim} != {S.dim}")
            for st in tower.stages:
                if st.complex.dim != st.skeleton.dim:
                    problems.append(f"{name} level {st.level}: stage dim differs")
    return CriterionResult(3, "dimension", not problems,
                           "; ".join(problems[:5]) or f"{checked} inputs",
                           time.time() - t0)


def criterion_homology(sizes: Sizes) -> CriterionResult:
    """Betti plus torsion preserved; projection iso over Q and mod 2."""
    t0 = time.time()
    problems = []
    checked = 0
    for dim in (1, 2, 3):
        corpus = [(n, fixture(n)) for n in _fixtures_of_dim(dim)
                  if n in ("circle_3", "sphere2_4", "torus7", "rp2_6", "klein8")]
        corpus += list(_homology_corpus(sizes, dim))
        for name, S in corpus:
            T, p, _ = localize(S)
            checked += 1
            HS, HT = homology(S), homology(T)
            if not HS.same_groups(HT):
                problems.append(f"{name}: {HT} != {HS}")
                continue
            for coeff in ("Q", 2):
                r = induced_map_homology(p, coeff)
                if not r.all_iso:
                    problems.append(f"{name}: not iso over {r.coefficients}")
    return CriterionResult(4, "homology", not problems,
                           "; ".join(problems[:5]) or f"{checked} inputs, Z groups + Q/mod-2 isos",
                           time.time() - t0)


def criterion_fibers(sizes: Sizes) -> CriterionResult:
    """Every fiber of every tower level collapses (and is acyclic)."""
    t0 = time.time()
    problems = []
    fibers = 0
    for dim in (1, 2, 3):
        corpus = [(n, fixture(n)) for n in _fixtures_of_dim(dim)]
        corpus += list(_homology_corpus(sizes, dim, count=sizes.fiber_trees[dim]))
        for name, S in corpus:
            _, _, tower = localize(S)
            for st in tower.stages[1:]:
                rep = check_pseudofibration(st.projection, restarts=32, seed=sizes.seed)
                fibers += len(rep.fibers)
                if not rep.all_collapsed:
                    problems.append(f"{name} level {st.level}: {rep.counts()}"
                                    + (f", {len(rep.unhit)} unhit" if rep.unhit else ""))
                prev_sk = tower.stages[st.level - 1].skeleton
                rep2 = check_pseudofibration(projection_map(st.spread, prev_sk),
                                             restarts=32, seed=sizes.seed)
                fibers += len(rep2.fibers)
                if not rep2.all_collapsed:
                    problems.append(f"{name} spread {st.level}: {rep2.counts()}")
    return CriterionResult(5, "fibers", not problems,
                           "; ".join(problems[:5]) or f"{fibers} fibers all collapsed",
                           time.time() - t0)


def criterion_surjectivity(sizes: Sizes) -> CriterionResult:
    """Projections hit every simplex of every skeleton level."""
    t0 = time.time()
    problems = []
    checked = 0
    for dim in (1, 2, 3):
        corpus = [(n, fixture(n)) for n in _fixtures_of_dim(dim)]
        corpus += list(_homology_corpus(sizes, dim, count=sizes.fiber_trees[dim]))
        for name, S in corpus:
            _, _, tower = localize(S)
            for st in tower.stages:
                checked += 1
                if not surjective_on_simplices(st.projection):
                    problems.append(f"{name} level {st.level}")
    return CriterionResult(6, "surjectivity", not problems,
                           "; ".join(problems[:5]) or f"{checked} projections",
                           time.time() - t0)


def criterion_telescope_laws(sizes: Sizes) -> CriterionResult:
    """Containment, restriction-compatibility and dimension bound on sampled
    pipeline intermediates."""
    t0 = time.time()
    rng = random.Random(sizes.seed + 3)
    pool = []
    for dim in (1, 2):
        for name in _fixtures_of_dim(dim):
            S = fixture(name)
            _, _, tower = localize(S)
            for st in tower.stages[1:]:
                for s in S.simplices_of_dim(st.level + 1) or []:
                    pool.append((f"{name} level {st.level}",
                                 base_restriction(st.complex, (v[0] for v in s))))
                pool.append((f"{name} T{st.level}", st.complex))
    for dim in (1, 2, 3):
        for name, S in _homology_corpus(sizes, dim, count=4):
            _, _, tower = localize(S)
            for st in tower.stages[1:]:
                pool.append((f"{name} T{st.level}", st.complex))
    problems = []
    done = 0
    while done < sizes.telescope_pairs and pool:
        name, T = pool[rng.randrange(len(pool))]
        rep = check_telescope_lemmas(T, samples=3, seed=rng.randrange(2 ** 30))
        done += 3
        if not rep.ok:
            problems.append(f"{name}: {rep.failures[:1]}")
    return CriterionResult(7, "telescope-laws", not problems,
                           "; ".join(problems[:5]) or f"{done} (T, Z) samples",
                           time.time() - t0)


def criterion_grow(sizes: Sizes) -> CriterionResult:
    """Exact-degree growth at M_n for M_n + 3 rounds, plus collapse back."""
    t0 = time.time()
    problems = []
    checked = 0
    for dim in (1, 2, 3):
        M = degree_bounds(dim).total
        rounds = M + 3
        corpus = [(n, fixture(n)) for n in _fixtures_of_dim(dim)]
        corpus += list(_homology_corpus(sizes, dim, count=sizes.grow_outputs))
        for name, S in corpus[:sizes.grow_outputs]:
            T, _, _ = localize(S)
            G = grow_edges(T, M, rounds)
            checked += 1
            degs = vertex_degrees(G)
            comp = completion_round(T, M)
            bad = [v for v, r in comp.items() if r <= rounds and degs[v] != M]
            if bad:
                problems.append(f"{name}: {len(bad)} vertices missed exact degree")
            back = collapse_to_point(G, restarts=4, seed=sizes.seed, target=T)
            if not back.collapsed:
                problems.append(f"{name}: grown complex did not collapse back")
    return CriterionResult(8, "exact-degree-growth", not problems,
                           "; ".join(problems[:5]) or f"{checked} grown outputs",
                           time.time() - t0)


def criterion_mapping_telescope(sizes: Sizes) -> CriterionResult:
    """Telescope over the tower: homology of the input, bounded degrees."""
    t0 = time.time()
    problems = []
    checked = 0
    seen_ratio = 0.0
    for dim in (2, 3):
        b = degree_bounds(dim)
        bound = b.total + 2 * b.one_sided
        corpus = [(n, fixture(n)) for n in _fixtures_of_dim(dim)]
        corpus += list(_homology_corpus(sizes, dim, count=sizes.telescope_inputs))
        for name, S in corpus[:sizes.telescope_inputs]:
            _, _, tower = localize(S)
            tele, proj = mapping_telescope(tower)
            checked += 1
            if not homology(tele).same_groups(homology(S)):
                problems.append(f"{name}: homology differs")
            rep = degree_audit(tele, bound)
            seen_ratio = max(seen_ratio, rep.max_degree / bound)
            if not rep.ok:
                problems.append(f"{name}: telescope degree {rep.max_degree} > {bound}")
            if tele.dim != S.dim:
                problems.append(f"{name}: telescope dim {tele.dim} != {S.dim}")
    detail = (f"{checked} telescopes, observed max degree <= "
              f"{seen_ratio:.2f} of the recorded M+2K bound")
    return CriterionResult(9, "mapping-telescope", not problems,
                           "; ".join(problems[:5]) or detail,
                           time.time() - t0)


def criterion_truncation(sizes: Sizes) -> CriterionResult:
    """Doubling every ray bound changes no homology group and no degree of a
    vertex present at the smaller truncation."""
    t0 = time.time()
    problems = []
    checked = 0
    corpus = []
    share = {1: (2, max(1, sizes.truncation_runs * 2 // 5)),
             2: (2, max(1, sizes.truncation_runs * 2 // 5)),
             3: (0, max(1, sizes.truncation_runs // 10))}
    for dim in (1, 2, 3):
        nfix, ntree = share[dim]
        corpus += [(n, fixture(n)) for n in _fixtures_of_dim(dim)][:nfix]
        corpus += list(_homology_corpus(sizes, dim, count=ntree))
    for name, S in corpus[:sizes.truncation_runs]:
        T, _, tower = localize(S)
        T2, _, _ = localize(S, ray_policy=lambda lvl, mc: 2 * (mc + 2))
        checked += 1
        if not homology(T).same_groups(homology(T2)):
            problems.append(f"{name}: homology changed under doubling")
        d1, d2 = vertex_degrees(T), vertex_degrees(T2)
        moved = [v for v in d1 if d2.get(v) != d1[v]]
        if moved:
            problems.append(f"{name}: {len(moved)} degrees changed, e.g. {moved[0]}")
    return CriterionResult(10, "truncation-stability", not problems,
                           "; ".join(problems[:5]) or f"{checked} doubled runs",
                           time.time() - t0)


ALL_CRITERIA: list = [
    criterion_constants,
    criterion_degree_bound,
    criterion_dimension,
    criterion_homology,
    criterion_fibers,
    criterion_surjectivity,
    criterion_telescope_laws,
    criterion_grow,
    criterion_mapping_telescope,
    criterion_truncation,
]


def run_all(sizes: Optional[Sizes] = None, emit: Optional[Callable] = print) -> list:
    sizes = sizes or preset("default")
    results = []
    for crit in ALL_CRITERIA:
        res = crit(sizes)
        results.append(res)
        if emit:
            emit(res.line())
    return results
