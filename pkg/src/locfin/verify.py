"""Oracles and generators: degree audits, greedy collapsing, fiber
certification, telescope-law checks, fixtures and random complexes.

Collapsibility is certified one-sidedly: a successful greedy collapse proves
contractibility, while vanishing reduced homology is merely necessary.  A
fiber that is acyclic but does not collapse within the given restarts is
reported as ``acyclic_only`` and treated as a soft failure to be reviewed,
never silently accepted.  All randomness is seeded and the seeds appear in
the reports.
"""

from __future__ import annotations

import itertools
import random
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

from .core import (Complex, SimplicialMap, closure, edge_degree,
                   induced_subcomplex, poset_leq, union, vertex_degrees)
from .construction import telescope
from .homology import homology, is_acyclic


# ---------------------------------------------------------------------------
# degree audits
# ---------------------------------------------------------------------------

@dataclass
class DegreeReport:
    bound: int
    max_degree: int
    histogram: dict                  # degree -> count of vertices
    violators: list                  # vertices over the bound
    max_up: int = 0                  # max neighbors strictly above a vertex
    max_down: int = 0

    @property
    def ok(self) -> bool:
        return not self.violators


def degree_audit(C: Complex, M: int) -> DegreeReport:
    """Exact per-vertex edge counts against the bound M."""
    deg = vertex_degrees(C)
    hist = Counter(deg.values())
    violators = sorted(v for v, d in deg.items() if d > M)
    up: Counter = Counter()
    down: Counter = Counter()
    for a, b in C.simplices_of_dim(1):
        up[a] += 1
        down[b] += 1
    return DegreeReport(M, max(deg.values(), default=0), dict(sorted(hist.items())),
                        violators, max(up.values(), default=0),
                        max(down.values(), default=0))


# ---------------------------------------------------------------------------
# greedy collapsing
# ---------------------------------------------------------------------------

@dataclass
class CollapseReport:
    collapsed: bool
    restarts_used: int
    seed: int
    remaining: int                   # simplices left in the final attempt

    @property
    def status(self) -> str:
        return "collapsible" if self.collapsed else "not_collapsed"


def _coface_map(simplices: frozenset, skip=frozenset()) -> dict:
    """Proper-coface sets for every simplex outside ``skip``."""
    cofaces: dict = {s: set() for s in simplices if s not in skip}
    for t in simplices:
        if len(t) == 1:
            continue
        for k in range(1, len(t)):
            for f in itertools.combinations(t, k):
                if f in cofaces:
                    cofaces[f].add(t)
    return cofaces


def _collapse_once(simplices: set, cofaces: dict, skip: frozenset, rng) -> None:
    """Greedily remove free pairs in place; mutates both arguments.

    Without an rng the initial candidates are sorted ascending and processed
    LIFO, so collapsing starts at the lexicographically largest free face and
    then follows the freed neighbors (this eats product cylinders from their
    far ends); with an rng candidates are drawn at random.
    """
    free = sorted(s for s, cf in cofaces.items() if len(cf) == 1)
    while free:
        if rng is None:
            s = free.pop()
        else:
            s = free.pop(rng.randrange(len(free)))
        cf = cofaces.get(s)
        if cf is None or len(cf) != 1:
            continue
        (t,) = cf
        if t not in simplices or t in skip:
            continue
        simplices.discard(s)
        simplices.discard(t)
        del cofaces[s]
        touched = []
        for dead in (s, t):
            for k in range(1, len(dead)):
                for f in itertools.combinations(dead, k):
                    cf2 = cofaces.get(f)
                    if cf2 is not None:
                        cf2.discard(t)
                        cf2.discard(s)
                        touched.append(f)
        if t in cofaces:
            del cofaces[t]
        for f in touched:
            cf2 = cofaces.get(f)
            if cf2 is not None and len(cf2) == 1:
                free.append(f)


def collapse_to_point(C: Complex, restarts: int = 32, seed: int = 0,
                      target: Optional[Complex] = None) -> CollapseReport:
    """Repeatedly remove free pairs; succeed when a single vertex remains.

    With ``target`` the collapse stops at that subcomplex: only pairs outside
    it are removed and success means reaching it exactly.  The first attempt
    is deterministic (largest simplices first, which eats cylinders from their
    far ends); later attempts shuffle with the recorded seed.  Failure is
    inconclusive by design.
    """
    if not C.simplices:
        raise ValueError("cannot collapse the empty complex")
    skip = target.simplices if target is not None else frozenset()
    last = len(C.simplices)
    for attempt in range(max(1, restarts)):
        simplices = set(C.simplices)
        cofaces = _coface_map(C.simplices, skip)
        rng = None if attempt == 0 else random.Random((seed << 20) + attempt)
        _collapse_once(simplices, cofaces, skip, rng)
        last = len(simplices)
        if target is not None:
            if simplices == set(skip):
                return CollapseReport(True, attempt, seed, last)
        elif last == 1:
            return CollapseReport(True, attempt, seed, last)
    return CollapseReport(False, max(1, restarts) - 1, seed, last)


# ---------------------------------------------------------------------------
# fibers of simplicial maps
# ---------------------------------------------------------------------------

@dataclass
class FiberStatus:
    status: str                      # collapsed | acyclic_only | failed
    size: int
    restarts_used: int = 0


@dataclass
class FiberReport:
    fibers: dict                     # target simplex -> FiberStatus
    unhit: list                      # target simplices with no preimage simplex
    seed: int

    @property
    def all_collapsed(self) -> bool:
        return not self.unhit and all(f.status == "collapsed" for f in self.fibers.values())

    @property
    def surjective(self) -> bool:
        return not self.unhit

    def counts(self) -> dict:
        return dict(Counter(f.status for f in self.fibers.values()))


def check_pseudofibration(f: SimplicialMap, restarts: int = 32,
                          seed: int = 0) -> FiberReport:
    """Certify every fiber of a simplicial map as contractible.

    For each target simplex t the induced subcomplex on the vertex preimage
    of t is checked with the collapse oracle and with reduced homology;
    a collapse implies acyclicity, which is asserted.  Also records target
    simplices that are not the image of any source simplex.
    """
    preimage: dict = {}
    for v in f.source.vertices:
        preimage.setdefault(f.mapping[v], []).append(v)
    hit = {f.image_simplex(s) for s in f.source.simplices}
    fibers: dict = {}
    unhit = []
    for t in f.target.sorted_simplices():
        if t not in hit:
            unhit.append(t)
        verts = [v for w in t for v in preimage.get(w, [])]
        fib = induced_subcomplex(f.source, verts)
        if not fib.simplices:
            fibers[t] = FiberStatus("failed", 0)
            continue
        rep = collapse_to_point(fib, restarts, seed)
        if rep.collapsed:
            if not is_acyclic(fib):
                raise AssertionError("collapsed fiber with nonzero homology")
            fibers[t] = FiberStatus("collapsed", len(fib), rep.restarts_used)
        elif is_acyclic(fib):
            fibers[t] = FiberStatus("acyclic_only", len(fib), rep.restarts_used)
        else:
            fibers[t] = FiberStatus("failed", len(fib), rep.restarts_used)
    return FiberReport(fibers, unhit, seed)


def surjective_on_simplices(f: SimplicialMap) -> bool:
    hit = {f.image_simplex(s) for s in f.source.simplices}
    return all(t in hit for t in f.target.simplices)


# ---------------------------------------------------------------------------
# telescope laws
# ---------------------------------------------------------------------------

@dataclass
class TelescopeReport:
    contains_input: bool
    restriction_commutes: bool
    dimension_bounded: bool
    samples: int
    seed: int
    failures: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return (self.contains_input and self.restriction_commutes
                and self.dimension_bounded)


def check_telescope_lemmas(T: Complex, n: Optional[int] = None,
                           ray_bound=None, samples: int = 10,
                           seed: int = 0) -> TelescopeReport:
    """Check the three telescope laws on one complex.

    (a) the input embeds in its telescope; (c) telescoping commutes with
    restricting the base to sampled vertex subsets, as exact set equality at
    equal ray bounds; (d) the dimension grows by at most one.
    """
    if n is None:
        n = T.level
    if ray_bound is None:
        ray_bound = max((c for s in T.simplices for v in s for c in v[1:]),
                        default=0) + 1
    tel = telescope(T, n, ray_bound)
    failures = []
    contains = T.simplices <= tel.simplices
    if not contains:
        failures.append("input not contained in telescope")
    dim_ok = tel.dim <= T.dim + 1
    if not dim_ok:
        failures.append(f"dim {tel.dim} exceeds {T.dim} + 1")
    rng = random.Random(seed)
    bases = sorted({v[0] for v in T.vertices})
    commutes = True
    for i in range(samples):
        if i == 0:
            Z = []
        elif i == 1:
            Z = bases
        else:
            Z = rng.sample(bases, rng.randint(0, len(bases)))
        zs = set(Z)
        left = induced_subcomplex(tel, [v for v in tel.vertices if v[0] in zs])
        right = telescope(
            induced_subcomplex(T, [v for v in T.vertices if v[0] in zs]),
            n, ray_bound)
        if left.simplices != right.simplices:
            commutes = False
            failures.append(f"restriction to {sorted(zs)} does not commute")
    return TelescopeReport(contains, commutes, dim_ok, samples, seed, failures)


# ---------------------------------------------------------------------------
# fixtures and generators
# ---------------------------------------------------------------------------

def _fixture_torus7():
    tris = [[i, (i + 1) % 7, (i + 3) % 7] for i in range(7)]
    tris += [[i, (i + 2) % 7, (i + 3) % 7] for i in range(7)]
    return tris, 7

def _fixture_rp2_6():
    tris = [[0, 1, 4], [0, 1, 5], [0, 2, 3], [0, 2, 4], [0, 3, 5],
            [1, 2, 3], [1, 2, 5], [1, 3, 4], [2, 4, 5], [3, 4, 5]]
    return tris, 6

def _fixture_klein8():
    # vertex-minimal closed surface with chi = 0 and H1 = Z + Z/2; built by
    # gluing two copies of the six-vertex projective plane and contracting
    # (the tests re-verify the surface conditions and the homology)
    tris = [[0, 1, 4], [0, 1, 6], [0, 2, 3], [0, 2, 6], [0, 3, 5], [0, 4, 7],
            [0, 5, 7], [1, 2, 3], [1, 2, 5], [1, 3, 4], [1, 5, 7], [1, 6, 7],
            [2, 4, 5], [2, 4, 6], [3, 4, 5], [4, 6, 7]]
    return tris, 8

_FIXTURES = {
    "circle_3": (lambda: ([[0, 1], [1, 2], [0, 2]], 3)),
    "sphere2_4": (lambda: ([[0, 1, 2], [0, 1, 3], [0, 2, 3], [1, 2, 3]], 4)),
    "torus7": _fixture_torus7,
    "rp2_6": _fixture_rp2_6,
    "klein8": _fixture_klein8,
}


def fixture(name: str) -> Complex:
    """Named test complexes; ``path_k`` and ``star_k`` take the k inline."""
    if name in _FIXTURES:
        maximal, nverts = _FIXTURES[name]()
    elif name.startswith("path_"):
        k = int(name.split("_", 1)[1])
        maximal, nverts = [[i, i + 1] for i in range(k)], k + 1
    elif name.startswith("star_"):
        k = int(name.split("_", 1)[1])
        maximal, nverts = [[0, i] for i in range(1, k + 1)], k + 1
    else:
        raise ValueError(f"unknown fixture {name!r}")
    return closure(maximal, universe=[f"v{i}" for i in range(nverts)])


FIXTURE_NAMES = tuple(_FIXTURES) + ("path_k", "star_k")


def shelled_tree(dimension: int, size: int, seed: int = 0) -> Complex:
    """Random collapsible complex: ``size`` top simplices glued one at a time.

    Starts from one full simplex; each step picks a random codimension-1 face
    of the current complex and glues a fresh simplex along it with a brand-new
    apex vertex.  Every step is an expansion, so the result collapses back.
    """
    if size < 1:
        raise ValueError("size must be >= 1")
    if dimension < 1:
        raise ValueError("dimension must be >= 1")
    rng = random.Random(seed)
    tops = [tuple(range(dimension + 1))]
    faces = sorted(itertools.combinations(range(dimension + 1), dimension))
    nverts = dimension + 1
    for _ in range(size - 1):
        glue = faces[rng.randrange(len(faces))]
        new = nverts
        nverts += 1
        top = tuple(sorted(glue + (new,)))
        tops.append(top)
        faces.extend(sorted(itertools.combinations(top, dimension)))
        faces.sort()
    return closure([list(t) for t in tops],
                   universe=[f"v{i}" for i in range(nverts)])


def cone(C: Complex) -> Complex:
    """Cone over a level-0 complex: a fresh top vertex joined to everything."""
    if C.level != 0 or C.has_stage:
        raise ValueError("cone is defined for level-0 complexes")
    apex_base = (max((v[0] for v in C.vertices), default=-1) + 1)
    if C.universe is not None:
        apex_base = max(apex_base, len(C.universe))
        universe = C.universe + tuple([f"v{apex_base}"])
    else:
        universe = None
    apex = (apex_base,)
    out = set(C.simplices)
    out.add((apex,))
    for s in C.simplices:
        out.add(s + (apex,))
    return Complex(out, universe, 0, False)


@dataclass(frozen=True)
class GeneratorSpec:
    kind: str                        # shelled_tree | cone | fixture
    dimension: int = 1
    size: int = 1
    seed: int = 0
    name: str = ""                   # fixture name, or fixture to cone over


def generate(spec: GeneratorSpec) -> Complex:
    if spec.kind == "shelled_tree":
        return shelled_tree(spec.dimension, spec.size, spec.seed)
    if spec.kind == "cone":
        base = fixture(spec.name) if spec.name else shelled_tree(
            spec.dimension, spec.size, spec.seed)
        return cone(base)
    if spec.kind == "fixture":
        return fixture(spec.name)
    raise ValueError(f"unknown generator kind {spec.kind!r}")
