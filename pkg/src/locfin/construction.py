"""The localization pipeline: colorings, telescopes, the level tower, degree
bounds, edge growing and the mapping telescope.

Starting from a finite ordered complex on base vertices, each level ``k``
multiplies the previous stage by a truncated ray and re-attaches the
k-simplices of the input, spread out along the new coordinate at the color of
the simplex so that distinct overlapping simplices land at distinct heights.
The result is a complex of the same dimension, mapping back onto the input by
dropping coordinates, in which every vertex meets a bounded number of edges.

All arithmetic is exact; nothing here uses floating point.  Stages are built
sequentially but the per-simplex attachments inside one stage are independent
and deterministic, so the output never depends on evaluation order.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Callable, Mapping, Optional, Sequence, Union

from .core import (Complex, SimplicialMap, _product_into, base_restriction,
                   identity_map, image_complex, pad_to_level, point, product,
                   ray_segment, skeleton, union, vertex_degrees)


class PipelineError(RuntimeError):
    """An internal invariant of the construction failed."""


# ---------------------------------------------------------------------------
# colorings
# ---------------------------------------------------------------------------

def first_fit_coloring(C: Complex, m: int) -> dict:
    """Greedy proper coloring of the intersection graph on m-simplices.

    Simplices are visited in canonical lexicographic order and each receives
    the least color not used by an earlier m-simplex sharing a vertex.  The
    result is deterministic and proper by construction.
    """
    if m < 1:
        raise ValueError("coloring is defined for dimension m >= 1")
    colors: dict = {}
    at_vertex: dict = {}
    for s in C.simplices_of_dim(m):
        used = {colors[t] for v in s for t in at_vertex.get(v, ())}
        c = 0
        while c in used:
            c += 1
        colors[s] = c
        for v in s:
            at_vertex.setdefault(v, []).append(s)
    return colors


# ---------------------------------------------------------------------------
# telescopes
# ---------------------------------------------------------------------------

def _ray_precondition(T: Complex) -> Optional[str]:
    for s in T.simplices:
        last = {v[-1] for v in s}
        if len(last) == 1:
            continue
        if len(last) == 2 and max(last) - min(last) == 1:
            continue
        return f"simplex {s!r} has last-coordinate set {sorted(last)}, not a ray simplex"
    return None


def _direction_bounds(bounds, n: int) -> list:
    if isinstance(bounds, int):
        return [bounds] * n
    bounds = list(bounds)
    if len(bounds) != n:
        raise ValueError(f"need {n} ray bounds, got {len(bounds)}")
    return bounds


def telescope(T: Complex, n: Optional[int] = None,
              ray_bound: Union[int, Sequence[int]] = 2,
              max_dim: Optional[int] = None) -> Complex:
    """Spread a level-n complex out along its coordinate rays.

    Level 0 is the identity.  For n >= 1 the result is the cylinder over the
    last-coordinate projection, together with the telescope of that projection
    sitting at height 0: attachments accumulated at one vertex get pushed
    apart along the rays.  ``ray_bound`` truncates the rays, either uniformly
    or per coordinate direction; every existing coordinate must stay within
    its bound so that the input embeds in the output.
    """
    if n is None:
        n = T.level
    if n != T.level:
        raise ValueError(f"telescope index {n} differs from complex level {T.level}")
    if T.has_stage:
        raise ValueError("telescope of a staged complex is not defined")
    if n == 0:
        return T
    msg = _ray_precondition(T)
    if msg:
        raise ValueError(msg)
    bounds = _direction_bounds(ray_bound, n)
    hi = max((v[-1] for s in T.simplices for v in s), default=0)
    if hi > bounds[-1]:
        raise ValueError(f"coordinate {hi} exceeds ray bound {bounds[-1]}")
    proj = image_complex(lambda v: v[:-1], T, T.universe)
    out: set = set()
    _product_into(out, proj, ray_segment(0, bounds[-1]), max_dim)
    _product_into(out, telescope(proj, n - 1, bounds[:-1], max_dim=max_dim),
                  point(0), max_dim)
    return Complex(out, T.universe, n, False)


# ---------------------------------------------------------------------------
# tower levels
# ---------------------------------------------------------------------------

def spread_level(T: Complex, S: Complex, coloring: Mapping, ray_bound: int,
                 inner_bounds: Sequence[int], max_dim: Optional[int] = None) -> Complex:
    """Cylinder over the current stage plus telescoped attachment sites.

    ``T`` is the level-n stage, ``coloring`` a proper coloring of the
    (n+1)-simplices of the input ``S``.  Each such simplex contributes the
    telescope of the stage restricted over it, placed at the simplex's color
    along the new coordinate.  ``ray_bound`` must exceed every color used.
    """
    new_simplices = S.simplices_of_dim(T.level + 1)
    values = [coloring[s] for s in new_simplices]
    if values and ray_bound <= max(values):
        raise ValueError(f"ray bound {ray_bound} does not exceed max color {max(values)}")
    out: set = set()
    _product_into(out, T, ray_segment(0, ray_bound), max_dim)
    for s in new_simplices:
        fiber = base_restriction(T, (v[0] for v in s))
        tel = telescope(fiber, T.level, list(inner_bounds), max_dim=max_dim)
        _product_into(out, tel, point(coloring[s]), max_dim)
    return Complex(out, T.universe, T.level + 1, False)


def attach_level(T_prime: Complex, S: Complex, coloring: Mapping,
                 max_dim: Optional[int] = None) -> Complex:
    """Add each input simplex of the new dimension at its color height.

    The attached simplex is ``s`` at coordinates ``(0, ..., 0, color)``.  Its
    proper faces must already be present in the spread stage; a missing face
    signals a pipeline bug, so this asserts instead of re-closing.
    """
    level = T_prime.level
    out = set(T_prime.simplices)
    tail = (0,) * (level - 1)
    face_cap = len(tail) + 2 if max_dim is None else min(len(tail) + 2, max_dim + 1)
    for s in S.simplices_of_dim(level):
        c = coloring[s]
        top = tuple(sorted((v[0],) + tail + (c,) for v in s))
        for k in range(1, min(len(top), face_cap + 1)):
            for face in itertools.combinations(top, k):
                if face not in out:
                    raise PipelineError(
                        f"face {face!r} of attached simplex {top!r} missing")
        if max_dim is None or level <= max_dim:
            out.add(top)
    return Complex(out, T_prime.universe, level, False)


# ---------------------------------------------------------------------------
# degree bounds
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class DegreeBounds:
    """Edge bounds for a level-n output: at most ``one_sided`` neighbors above
    (and below) any vertex including itself, hence at most ``total`` edges."""
    level: int
    one_sided: int
    total: int


def degree_bounds(n: int) -> DegreeBounds:
    """Bounds via the recurrence, cross-checked against the closed form."""
    if n < 1:
        raise ValueError("degree bounds are defined for n >= 1")
    K = 3
    for m in range(1, n):
        K = 2 * K + (m + 2) * 2 ** m
    if 2 * K != 2 ** (n - 1) * (n * n + 3 * n + 2):
        raise AssertionError(f"recurrence disagrees with closed form at n={n}")
    return DegreeBounds(n, K, 2 * (K - 1))


# ---------------------------------------------------------------------------
# the tower
# ---------------------------------------------------------------------------

@dataclass
class TowerStage:
    level: int
    skeleton: Complex
    complex: Complex
    spread: Optional[Complex]          # cylinder-plus-attachment-sites stage
    coloring: Optional[dict]
    ray_bound: Optional[int]
    projection: SimplicialMap
    max_degree: int = 0


@dataclass
class Tower:
    """All intermediate stages of one localization run."""
    S: Complex
    stages: list
    dim_cap: Optional[int] = None

    @property
    def n(self) -> int:
        return len(self.stages) - 1

    @property
    def complexes(self) -> list:
        return [st.complex for st in self.stages]

    @property
    def ray_bounds(self) -> dict:
        return {st.level: st.ray_bound for st in self.stages
                if st.ray_bound is not None}

    def summary(self) -> list:
        rows = []
        for st in self.stages:
            counts = {d: st.complex.count(d) for d in sorted(st.complex.by_dim)}
            rows.append({"level": st.level, "ray_bound": st.ray_bound,
                         "counts": counts, "max_degree": st.max_degree,
                         "max_color": max(st.coloring.values()) if st.coloring else None})
        return rows


RayPolicy = Union[None, int, Mapping, Callable]


def _resolve_ray_bound(policy: RayPolicy, level: int, max_color: int) -> int:
    default = max_color + 2
    if policy is None:
        bound = default
    elif isinstance(policy, int):
        bound = policy
    elif callable(policy):
        bound = policy(level, max_color)
    else:
        bound = policy.get(level, default)
    if bound <= max_color:
        raise ValueError(
            f"ray bound {bound} at level {level} does not exceed max color {max_color}")
    if bound < 1:
        raise ValueError("ray bound must be at least 1")
    return bound


def projection_map(T: Complex, target: Complex) -> SimplicialMap:
    """Drop trailing coordinates (and any stage); errors if some image simplex
    is missing from the target."""
    if target.has_stage:
        raise ValueError("projection targets must be unstaged")
    keep = target.level + 1
    mapping = {v: v[:keep] for v in T.vertices}
    f = SimplicialMap(T, target, mapping)
    rep = f.validate()
    if not rep.ok:
        raise ValueError("projection is not simplicial: " + rep.problems[0])
    return f


def localize(S: Complex, ray_policy: RayPolicy = None,
             dim_cap: Optional[int] = None):
    """Run the full pipeline on a finite level-0 complex.

    Returns ``(T, p, tower)``: the localized complex at level dim(S), the
    projection back onto the input, and the tower of intermediate stages.
    With ``dim_cap=k`` only simplices of dimension <= k are materialized at
    every step; the construction is dimension-local, so the capped run equals
    the k-skeleton of the full run (handy for edge-degree audits).
    """
    if S.level != 0 or S.has_stage:
        raise ValueError("localize expects a level-0 input complex")
    n = S.dim
    S0 = skeleton(S, 0) if n >= 0 else S
    stages = [TowerStage(0, S0, S0, None, None, None, identity_map(S0), 0)]
    inner_bounds: list = []
    for k in range(1, n + 1):
        S_k = skeleton(S, k)
        coloring = first_fit_coloring(S, k)
        max_color = max(coloring.values(), default=-1)
        R = _resolve_ray_bound(ray_policy, k, max_color)
        prev = stages[-1].complex
        spread = spread_level(prev, S, coloring, R, inner_bounds, max_dim=dim_cap)
        attached = attach_level(spread, S, coloring, max_dim=dim_cap)
        target = skeleton(S_k, dim_cap) if dim_cap is not None else S_k
        proj = projection_map(attached, target)
        st = TowerStage(k, S_k, attached, spread, coloring, R, proj)
        st.max_degree = max(vertex_degrees(attached).values(), default=0)
        stages.append(st)
        inner_bounds.append(R)
    tower = Tower(S, stages, dim_cap)
    final = stages[-1]
    return final.complex, final.projection, tower


# ---------------------------------------------------------------------------
# growing edges
# ---------------------------------------------------------------------------

def grow_edges(T: Complex, M: int, rounds: int) -> Complex:
    """Attach pendant edges until every base vertex meets exactly M edges.

    One round adds, for each vertex of ``T`` with fewer than M edges, one new
    leaf vertex joined to it; a vertex of initial degree d therefore reaches
    exactly M edges after M - d rounds.  The added leaves stay leaves: they
    are padding vertices, and the grown complex collapses back onto ``T`` by
    deleting them.
    """
    degs = dict(vertex_degrees(T))
    over = [v for v, d in sorted(degs.items()) if d > M]
    if over:
        raise ValueError(f"vertex {over[0]!r} already has {degs[over[0]]} > {M} edges")
    labels = list(T.universe) if T.universe is not None else None
    width = T.level + 1 + (1 if T.has_stage else 0)
    next_base = max((v[0] for v in degs), default=-1) + 1
    if labels is not None:
        next_base = max(next_base, len(labels))
        labels += [f"+{i}" for i in range(len(labels), next_base)]
    out = set(T.simplices)
    originals = sorted(degs)
    for _ in range(rounds):
        grew = False
        for v in originals:
            if degs[v] >= M:
                continue
            leaf = (next_base,) + v[1:width]
            if labels is not None:
                labels.append(f"+{next_base}")
            next_base += 1
            out.add((leaf,))
            out.add(tuple(sorted((v, leaf))))
            degs[v] += 1
            grew = True
        if not grew:
            break
    return Complex(out, tuple(labels) if labels is not None else None,
                   T.level, T.has_stage)


def completion_round(T: Complex, M: int) -> dict:
    """Round at which each original vertex reaches exactly M edges."""
    return {v: max(0, M - d) for v, d in vertex_degrees(T).items()}


# ---------------------------------------------------------------------------
# mapping telescope
# ---------------------------------------------------------------------------

def mapping_telescope(tower: Union[Tower, Sequence[Complex]]):
    """Union of cylinders over an increasing tower of complexes.

    Each stage is padded with zero coordinates to the top level and extended
    by a stage coordinate; stage k contributes the cylinder over the segment
    ``{k, k+1}`` and the last stage a single copy at its own height, so the
    result keeps the dimension of the top stage.  Returns the telescope and
    the projection that drops all coordinates and the stage.
    """
    if isinstance(tower, Tower):
        levels = tower.complexes
        target = tower.S
    else:
        levels = list(tower)
        target = None
    if not levels:
        raise ValueError("mapping telescope of an empty tower")
    top = max(c.level for c in levels)
    padded = [pad_to_level(c, top) for c in levels]
    for a, b in zip(padded, padded[1:]):
        if not a.simplices <= b.simplices:
            raise PipelineError("tower stages do not include into one another")
    n = len(levels) - 1
    parts = []
    for k, P in enumerate(padded):
        seg = ray_segment(k, k + 1) if k < n else point(n)
        parts.append(product(P, seg, as_stage=True))
    tele = union(*parts)
    if target is None:
        target = levels[-1]
        keep = target.level + 1
    else:
        keep = 1
    mapping = {v: v[:keep] for v in tele.vertices}
    proj = SimplicialMap(tele, target, mapping)
    rep = proj.validate()
    if not rep.ok:
        raise PipelineError("telescope projection failed: " + rep.problems[0])
    return tele, proj
