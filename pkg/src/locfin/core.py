"""Finite ordered simplicial complexes over coordinate vertices.

Conventions shared by the whole package:

* A vertex is a flat tuple of ints ``(base, c1, ..., ck)``: an index into
  the input vertex-label list followed by ``k`` natural-number coordinates
  (``k`` is the *level* of the complex).  Complexes produced by the mapping
  telescope carry one extra trailing coordinate, the *stage*; whether the
  last entry is a stage is recorded on the complex (``has_stage``), not on
  the vertex.
* The linear order on vertices is plain tuple comparison (lexicographic on
  base, then coordinates, then stage).
* The partial order is the product poset: ``v <= w`` iff every component of
  ``v`` is ``<=`` the corresponding component of ``w``.
* A simplex is a tuple of distinct vertices sorted in the linear order.
* A :class:`Complex` stores the full downward-closed set of simplices.

All values are immutable after construction and every operation is a pure
function, so independent operations can safely run in parallel.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Iterable, Mapping, Optional, Sequence, Union

Vertex = tuple
Simplex = tuple


# ---------------------------------------------------------------------------
# vertex order
# ---------------------------------------------------------------------------

def poset_leq(v: Vertex, w: Vertex) -> bool:
    """Componentwise (product poset) order on coordinate vertices."""
    if len(v) != len(w):
        raise ValueError(f"vertices live at different levels: {v!r} vs {w!r}")
    return all(a <= b for a, b in zip(v, w))


def comparable(v: Vertex, w: Vertex) -> bool:
    return poset_leq(v, w) or poset_leq(w, v)


def is_chain(vertices: Sequence[Vertex]) -> bool:
    """True if the (sorted) vertex sequence is totally ordered in the poset.

    Tuple order refines the product poset, so a sorted sequence is a chain
    exactly when every consecutive pair is componentwise comparable.
    """
    return all(poset_leq(a, b) for a, b in zip(vertices, vertices[1:]))


def make_simplex(vertices: Iterable[Vertex]) -> Simplex:
    s = tuple(sorted(vertices))
    if any(a == b for a, b in zip(s, s[1:])):
        raise ValueError(f"repeated vertex in simplex {s!r}")
    return s


# ---------------------------------------------------------------------------
# the complex
# ---------------------------------------------------------------------------

class Complex:
    """A finite, downward-closed set of simplices.

    The constructor trusts its input to be closed and canonical; use
    :func:`closure` to build a complex from arbitrary vertex lists and
    :func:`validate` to re-check the invariants of any instance.
    """

    __slots__ = ("simplices", "universe", "level", "has_stage",
                 "_by_dim", "_vertices", "_degrees")

    def __init__(self, simplices: Iterable[Simplex] = (),
                 universe: Optional[Sequence[str]] = None,
                 level: int = 0, has_stage: bool = False):
        self.simplices = frozenset(simplices)
        self.universe = tuple(universe) if universe is not None else None
        self.has_stage = bool(has_stage)
        if self.simplices:
            sample = next(iter(self.simplices))
            level = len(sample[0]) - 1 - (1 if has_stage else 0)
        self.level = level
        self._by_dim = None
        self._vertices = None
        self._degrees = None

    # -- basic queries ------------------------------------------------------

    @property
    def by_dim(self) -> dict:
        """Simplices grouped by dimension (groups in set order; use
        :meth:`simplices_of_dim` where a canonical order matters)."""
        if self._by_dim is None:
            groups: dict = {}
            for s in self.simplices:
                groups.setdefault(len(s) - 1, []).append(s)
            self._by_dim = groups
        return self._by_dim

    @property
    def dim(self) -> int:
        """Dimension; -1 for the empty complex."""
        return max(self.by_dim, default=-1)

    @property
    def vertices(self) -> list:
        if self._vertices is None:
            self._vertices = sorted(s[0] for s in self.by_dim.get(0, []))
        return self._vertices

    def simplices_of_dim(self, d: int) -> list:
        """The d-simplices in canonical (lexicographic) order."""
        return sorted(self.by_dim.get(d, []))

    def sorted_simplices(self) -> list:
        out = []
        for d in sorted(self.by_dim):
            out.extend(sorted(self.by_dim[d]))
        return out

    def count(self, d: Optional[int] = None) -> int:
        if d is None:
            return len(self.simplices)
        return len(self.by_dim.get(d, []))

    def __contains__(self, simplex) -> bool:
        return tuple(simplex) in self.simplices

    def __len__(self) -> int:
        return len(self.simplices)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Complex):
            return NotImplemented
        return (self.simplices == other.simplices
                and self.level == other.level
                and self.has_stage == other.has_stage)

    def __ne__(self, other) -> bool:
        eq = self.__eq__(other)
        return NotImplemented if eq is NotImplemented else not eq

    def __repr__(self) -> str:
        counts = ",".join(f"{d}:{len(self.by_dim[d])}" for d in sorted(self.by_dim))
        return f"Complex(level={self.level}, dim={self.dim}, counts={{{counts}}})"

    def relabel(self, universe: Sequence[str]) -> "Complex":
        return Complex(self.simplices, universe, self.level, self.has_stage)


# ---------------------------------------------------------------------------
# construction helpers
# ---------------------------------------------------------------------------

def _faces(simplex: Simplex, max_dim: Optional[int] = None):
    """All nonempty subsets of a simplex, as sorted tuples."""
    n = len(simplex)
    top = n if max_dim is None else min(n, max_dim + 1)
    for k in range(1, top + 1):
        yield from itertools.combinations(simplex, k)


def closure(maximal: Iterable[Iterable], universe: Optional[Sequence[str]] = None,
            level: int = 0, has_stage: bool = False,
            max_dim: Optional[int] = None) -> Complex:
    """Smallest downward-closed complex containing the given simplices.

    Vertices may be given as plain ints (wrapped as level-0 vertices) or as
    coordinate tuples.  When a universe is supplied for a level-0 complex,
    every universe element contributes its singleton, so isolated vertices
    survive the round trip through maximal-simplex lists.
    """
    out = set()
    nbases = len(universe) if universe is not None else None
    for raw in maximal:
        verts = []
        for v in raw:
            if isinstance(v, int):
                v = (v,)
            else:
                v = tuple(v)
            if nbases is not None and not (0 <= v[0] < nbases):
                raise ValueError(f"vertex base {v[0]} outside universe of size {nbases}")
            verts.append(v)
        if not verts:
            raise ValueError("empty simplex in input")
        s = tuple(sorted(verts))
        if any(a == b for a, b in zip(s, s[1:])):
            raise ValueError(f"repeated vertex in simplex {raw!r}")
        out.update(_faces(s, max_dim))
    if universe is not None and level == 0 and not has_stage:
        out.update(((i,),) for i in range(len(universe)))
    return Complex(out, universe, level, has_stage)


@dataclass
class ValidationReport:
    ok: bool
    problems: list = field(default_factory=list)

    def __str__(self) -> str:
        if self.ok:
            return "valid"
        return "invalid:\n" + "\n".join(f"  - {p}" for p in self.problems)


def validate(C: Complex, ordered: bool = True) -> ValidationReport:
    """Re-check the closure, singleton, uniform-level and chain invariants."""
    problems = []
    want = C.level + 1 + (1 if C.has_stage else 0)
    seen_vertices = set()
    for s in C.sorted_simplices():
        for v in s:
            if len(v) != want:
                problems.append(f"vertex {v!r} has {len(v)} components, expected {want}")
            seen_vertices.add(v)
        if list(s) != sorted(set(s)):
            problems.append(f"simplex {s!r} is not a sorted set of distinct vertices")
        if len(s) > 1:
            for f_ in itertools.combinations(s, len(s) - 1):
                if f_ not in C.simplices:
                    problems.append(f"closure violation: face {f_!r} of {s!r} missing")
        if ordered and not is_chain(s):
            problems.append(f"chain violation: simplex {s!r} is not a chain")
    for v in seen_vertices:
        if (v,) not in C.simplices:
            problems.append(f"singleton violation: vertex {v!r} has no singleton simplex")
    return ValidationReport(not problems, problems)


def skeleton(C: Complex, n: int) -> Complex:
    """All simplices of dimension at most ``n``."""
    if n < 0:
        raise ValueError("skeleton dimension must be >= 0")
    if n >= C.dim:
        return C
    keep = [s for d, group in C.by_dim.items() if d <= n for s in group]
    return Complex(keep, C.universe, C.level, C.has_stage)


def induced_subcomplex(C: Complex, vertices: Iterable[Vertex]) -> Complex:
    """Simplices of ``C`` whose vertices all lie in the given set."""
    Y = set(vertices)
    keep = [s for s in C.simplices if all(v in Y for v in s)]
    return Complex(keep, C.universe, C.level, C.has_stage)


def base_restriction(C: Complex, bases: Iterable[int]) -> Complex:
    """Induced subcomplex on all vertices whose base index lies in ``bases``."""
    B = set(bases)
    keep = [s for s in C.simplices if all(v[0] in B for v in s)]
    return Complex(keep, C.universe, C.level, C.has_stage)


def image_complex(f: Union[Callable, Mapping], C: Complex,
                  universe: Optional[Sequence[str]] = None,
                  has_stage: bool = False, level: int = 0) -> Complex:
    """Complex of images ``{f(s) | s in C}``; dimensions may drop.

    ``f`` is applied vertexwise; each image simplex is the *set* of image
    vertices.  Downward closure is preserved automatically.  ``level`` only
    matters when the image is empty (it cannot be inferred then).
    """
    fn = f.__getitem__ if isinstance(f, Mapping) else f
    out = set()
    for s in C.simplices:
        out.add(tuple(sorted(set(map(fn, s)))))
    return Complex(out, universe, level, has_stage)


def ray_segment(a: int, b: int) -> Complex:
    """Path complex on ``{a, ..., b}`` with edges between consecutive ints."""
    if a > b:
        raise ValueError(f"ray segment needs a <= b, got {a} > {b}")
    simplices = [((i,),) for i in range(a, b + 1)]
    simplices += [((i,), (i + 1,)) for i in range(a, b)]
    return Complex(simplices, None, 0, False)


def point(i: int) -> Complex:
    return ray_segment(i, i)


@lru_cache(maxsize=None)
def _grid_chains(m: int, k: int, max_len: int) -> tuple:
    """Chains in the (m+1) x (k+1) grid poset from (0,0) to (m,k) that cover
    every row and every column, i.e. monotone staircases whose steps increase
    one or both indices by 1.  These are exactly the product simplices whose
    projections are the full factors.
    """
    out = []

    def extend(chain, i, j):
        if len(chain) > max_len:
            return
        if i == m and j == k:
            out.append(tuple(chain))
            return
        for di, dj in ((1, 0), (0, 1), (1, 1)):
            i2, j2 = i + di, j + dj
            if i2 <= m and j2 <= k:
                chain.append((i2, j2))
                extend(chain, i2, j2)
                chain.pop()

    extend([(0, 0)], 0, 0)
    return tuple(out)


def _product_into(out: set, C: Complex, D: Complex,
                  max_dim: Optional[int] = None) -> None:
    """Write the product simplices into an accumulator set.

    Points and edges of ``D`` (the only shapes the pipeline multiplies by)
    take unrolled fast paths; higher-dimensional factors fall back to the
    generic staircase enumeration.
    """
    cap = max_dim + 1 if max_dim is not None else None
    points = [sd[0][0] for sd in D.by_dim.get(0, [])]
    steps = [(sd[0][0], sd[1][0]) for sd in D.by_dim.get(1, [])]
    higher = [sd for d, g in D.by_dim.items() if d >= 2 for sd in g]
    add = out.add
    for sc in C.simplices:
        m = len(sc) - 1
        if cap is not None and m + 1 > cap:
            continue
        for x in points:
            add(tuple(v + (x,) for v in sc))
        if steps and (cap is None or max(m, 1) + 1 <= cap):
            chain_cap = m + 2 if cap is None else min(m + 2, cap)
            chains = _grid_chains(m, 1, chain_cap)
            for a, b in steps:
                for chain in chains:
                    add(tuple(sc[i] + (a if j == 0 else b,) for i, j in chain))
        for sd in higher:
            k = len(sd) - 1
            if cap is not None and max(m, k) + 1 > cap:
                continue
            chain_cap = m + k + 1 if cap is None else min(m + k + 1, cap)
            for chain in _grid_chains(m, k, chain_cap):
                add(tuple(sc[i] + (sd[j][0],) for i, j in chain))


def product(C: Complex, D: Complex, as_stage: bool = False,
            max_dim: Optional[int] = None) -> Complex:
    """Product of ordered complexes, with the second factor a level-0 complex
    on natural numbers whose value becomes a new trailing coordinate.

    Simplices of the result are exactly the chains in the product poset whose
    two coordinate projections are simplices of ``C`` and ``D``.  With
    ``as_stage=True`` the new coordinate is marked as a stage (used by the
    mapping telescope); otherwise the level goes up by one.
    """
    if D.level != 0 or D.has_stage:
        raise ValueError("second product factor must be a level-0 complex on ints")
    if C.has_stage:
        raise ValueError("cannot extend a complex that already has a stage coordinate")
    out: set = set()
    _product_into(out, C, D, max_dim)
    return Complex(out, C.universe, C.level + (0 if as_stage else 1), as_stage)


def _merge_universe(C: Complex, D: Complex):
    if C.universe is not None and D.universe is not None and C.universe != D.universe:
        raise ValueError("universes differ")
    return C.universe if C.universe is not None else D.universe


def union(C: Complex, *rest: Complex) -> Complex:
    out = set(C.simplices)
    universe = C.universe
    for D in rest:
        if D.level != C.level or D.has_stage != C.has_stage:
            raise ValueError(f"union of mismatched levels: {C.level} vs {D.level}")
        universe = _merge_universe(Complex((), universe, C.level, C.has_stage), D)
        out.update(D.simplices)
    return Complex(out, universe, C.level, C.has_stage)


def intersection(C: Complex, D: Complex) -> Complex:
    if D.level != C.level or D.has_stage != C.has_stage:
        raise ValueError(f"intersection of mismatched levels: {C.level} vs {D.level}")
    return Complex(C.simplices & D.simplices, _merge_universe(C, D),
                   C.level, C.has_stage)


def pad_to_level(C: Complex, level: int) -> Complex:
    """Embed a complex into a higher level by appending zero coordinates."""
    if C.has_stage:
        raise ValueError("cannot pad a staged complex")
    if level < C.level:
        raise ValueError("target level below current level")
    if level == C.level:
        return C
    tail = (0,) * (level - C.level)
    out = [tuple(v + tail for v in s) for s in C.simplices]
    return Complex(out, C.universe, level, False)


# ---------------------------------------------------------------------------
# degrees
# ---------------------------------------------------------------------------

def vertex_degrees(C: Complex) -> dict:
    """Number of edges containing each vertex."""
    if C._degrees is None:
        deg = {v: 0 for v in C.vertices}
        for e in C.by_dim.get(1, []):
            deg[e[0]] += 1
            deg[e[1]] += 1
        C._degrees = deg
    return C._degrees


def edge_degree(C: Complex, v) -> int:
    v = tuple(v)
    deg = vertex_degrees(C)
    if v not in deg:
        raise ValueError(f"unknown vertex {v!r}")
    return deg[v]


# ---------------------------------------------------------------------------
# simplicial maps
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SimplicialMap:
    """A vertex map sending every source simplex (as a set) to a target simplex."""
    source: Complex
    target: Complex
    mapping: Mapping

    def __call__(self, v: Vertex) -> Vertex:
        return self.mapping[v]

    def image_simplex(self, s: Simplex) -> Simplex:
        return tuple(sorted({self.mapping[v] for v in s}))

    def validate(self) -> ValidationReport:
        problems = []
        for v in self.source.vertices:
            if v not in self.mapping:
                problems.append(f"vertex {v!r} has no image")
        if problems:
            return ValidationReport(False, problems)
        for s in self.source.simplices:
            img = self.image_simplex(s)
            if img not in self.target.simplices:
                problems.append(f"image {img!r} of {s!r} not in target")
        return ValidationReport(not problems, problems)

    def is_monotone(self) -> bool:
        for e in self.source.by_dim.get(1, []):
            a, b = self.mapping[e[0]], self.mapping[e[1]]
            if a != b and not poset_leq(a, b):
                return False
        return True

    def image(self) -> Complex:
        return image_complex(dict(self.mapping), self.source,
                             self.target.universe, self.target.has_stage)

    def compose(self, other: "SimplicialMap") -> "SimplicialMap":
        """self after other (``self . other``)."""
        m = {v: self.mapping[w] for v, w in other.mapping.items()}
        return SimplicialMap(other.source, self.target, m)


def identity_map(C: Complex) -> SimplicialMap:
    return SimplicialMap(C, C, {v: v for v in C.vertices})
