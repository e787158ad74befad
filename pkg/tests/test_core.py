import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from locfin.core import (Complex, SimplicialMap, closure, edge_degree,
                         identity_map, image_complex, induced_subcomplex,
                         intersection, is_chain, point, poset_leq, product,
                         ray_segment, skeleton, union, validate,
                         vertex_degrees)
from locfin.verify import fixture


def brute_product(C, D):
    """Definitional oracle: chains in the product poset whose projections are
    simplices of the factors."""
    verts = sorted(u + (w[0],) for u in C.vertices for w in D.vertices)
    out = set()
    for k in range(1, len(verts) + 1):
        for sub in itertools.combinations(verts, k):
            if not is_chain(sub):
                continue
            p1 = tuple(sorted({v[:-1] for v in sub}))
            p2 = tuple(sorted({(v[-1],) for v in sub}))
            if p1 in C.simplices and p2 in D.simplices:
                out.add(sub)
    return out


# --- closure -----------------------------------------------------------------

def test_closure_of_triangle():
    C = closure([[0, 1, 2]], universe=list("abc"))
    assert len(C.simplices) == 7
    assert ((0,), (1,)) in C and ((0,),) in C
    assert validate(C).ok


def test_closure_single_vertex():
    C = closure([[0]], universe=["a"])
    assert set(C.simplices) == {((0,),)}


def test_closure_path():
    C = closure([[0, 1], [1, 2]], universe=list("abc"))
    assert len(C.simplices) == 5


def test_closure_rejects_duplicates_and_unknowns():
    with pytest.raises(ValueError):
        closure([[0, 0]], universe=["a"])
    with pytest.raises(ValueError):
        closure([[0, 5]], universe=["a", "b"])


def test_closure_universe_singletons():
    C = closure([[0, 1]], universe=list("abc"))
    assert ((2,),) in C     # isolated universe vertex keeps its singleton


# --- validate ----------------------------------------------------------------

def test_validate_detects_closure_violation():
    C = Complex([((0,), (1,))])
    rep = validate(C)
    assert not rep.ok
    assert any("singleton" in p or "closure" in p for p in rep.problems)


def test_validate_detects_chain_violation():
    # (0; 1) and (1; 0) are incomparable in the product order
    C = Complex([((0, 1), (1, 0)), ((0, 1),), ((1, 0),)])
    rep = validate(C)
    assert not rep.ok
    assert any("chain" in p for p in rep.problems)


# --- skeleton ----------------------------------------------------------------

def test_skeleton_of_triangle():
    C = closure([[0, 1, 2]])
    s = skeleton(C, 1)
    assert s.dim == 1 and s.count(1) == 3


def test_skeleton_identity_at_top_dim():
    C = closure([[0, 1, 2]])
    assert skeleton(C, 2) == C


def test_skeleton_zero_of_torus():
    assert skeleton(fixture("torus7"), 0).count() == 7


# --- induced subcomplex / image ------------------------------------------------

def test_induced_subcomplex():
    C = closure([[0, 1, 2]])
    sub = induced_subcomplex(C, [(0,), (1,)])
    assert set(sub.simplices) == {((0,),), ((1,),), ((0,), (1,))}
    assert induced_subcomplex(C, []).count() == 0


def test_image_complex_constant_and_identity():
    C = closure([[0, 1, 2]])
    pointed = image_complex(lambda v: (9,), C)
    assert set(pointed.simplices) == {((9,),)}
    assert image_complex(lambda v: v, C) == C


def test_image_complex_composition():
    C = closure([[0, 1], [1, 2], [2, 3]])
    f = lambda v: (v[0] // 2,)
    g = lambda v: (v[0] + 1,)
    lhs = image_complex(lambda v: g(f(v)), C)
    rhs = image_complex(g, image_complex(f, C))
    assert lhs == rhs


def test_projection_of_cylinder_is_base():
    C = closure([[0, 1], [1, 2]])
    cyl = product(C, ray_segment(0, 3))
    assert image_complex(lambda v: v[:-1], cyl) == C


# --- product -----------------------------------------------------------------

def test_product_edge_point():
    E = closure([[0, 1]])
    P = product(E, point(5))
    assert P.count(0) == 2 and P.count(1) == 1 and P.dim == 1


def test_product_edge_edge_staircase():
    E = closure([[0, 1]])
    P = product(E, ray_segment(0, 1))
    assert {d: P.count(d) for d in sorted(P.by_dim)} == {0: 4, 1: 5, 2: 2}
    assert ((0, 0), (1, 0), (1, 1)) in P
    assert ((0, 0), (0, 1), (1, 1)) in P
    assert P.simplices == brute_product(E, ray_segment(0, 1))


def test_product_triangle_edge():
    T = closure([[0, 1, 2]])
    P = product(T, ray_segment(0, 1))
    assert P.count(3) == 3          # three top simplices triangulate the prism
    assert P.simplices == brute_product(T, ray_segment(0, 1))


def test_product_against_oracle_random():
    import random
    rng = random.Random(2)
    for _ in range(25):
        nc = rng.randint(1, 4)
        maximal = [rng.sample(range(5), rng.randint(1, 3)) for _ in range(nc)]
        C = closure(maximal)
        D = ray_segment(0, rng.randint(0, 2))
        assert product(C, D).simplices == brute_product(C, D)


def test_product_chain_property():
    C = closure([[0, 1, 2], [1, 2, 3]])
    P = product(C, ray_segment(0, 2))
    assert validate(P).ok


# --- rays, unions, degrees -----------------------------------------------------

def test_ray_segment():
    r = ray_segment(0, 2)
    assert r.count(0) == 3 and r.count(1) == 2
    assert ray_segment(0, 0).count() == 1
    assert ray_segment(1, 2).count(1) == 1
    with pytest.raises(ValueError):
        ray_segment(3, 1)


def test_union_intersection():
    A = closure([[0, 1]])
    B = closure([[1, 2]])
    assert union(A, B).count(1) == 2
    assert union(A, Complex([], level=0)).simplices == A.simplices
    assert intersection(A, A) == A
    assert intersection(A, B).count() == 1      # the shared vertex
    with pytest.raises(ValueError):
        union(A, product(A, point(0)))


def test_edge_degree():
    path = closure([[0, 1], [1, 2]])
    assert edge_degree(path, (1,)) == 2
    assert edge_degree(path, (0,)) == 1
    tri = fixture("circle_3")
    assert all(edge_degree(tri, v) == 2 for v in tri.vertices)
    with pytest.raises(ValueError):
        edge_degree(path, (9,))


# --- simplicial maps -----------------------------------------------------------

def test_simplicial_map_validate():
    C = closure([[0, 1]])
    D = closure([[0]])
    ok = SimplicialMap(C, D, {(0,): (0,), (1,): (0,)})
    assert ok.validate().ok
    bad = SimplicialMap(C, closure([[0], [1]]), {(0,): (0,), (1,): (1,)})
    assert not bad.validate().ok        # image edge missing from target


def test_identity_map_roundtrip():
    C = fixture("circle_3")
    f = identity_map(C)
    assert f.validate().ok and f.image() == C


# --- property tests ------------------------------------------------------------

@st.composite
def small_complexes(draw):
    n = draw(st.integers(min_value=1, max_value=5))
    count = draw(st.integers(min_value=1, max_value=4))
    maximal = [draw(st.lists(st.integers(min_value=0, max_value=n - 1),
                             min_size=1, max_size=min(3, n), unique=True))
               for _ in range(count)]
    return closure(maximal)


@given(small_complexes())
@settings(max_examples=60, deadline=None)
def test_closure_is_downward_closed(C):
    for s in C.simplices:
        for k in range(1, len(s)):
            for face in itertools.combinations(s, k):
                assert face in C


@given(small_complexes(), st.integers(min_value=0, max_value=2))
@settings(max_examples=40, deadline=None)
def test_product_projections_land_in_factors(C, r):
    D = ray_segment(0, r)
    P = product(C, D)
    for s in P.simplices:
        assert tuple(sorted({v[:-1] for v in s})) in C.simplices
        assert tuple(sorted({(v[-1],) for v in s})) in D.simplices


@given(small_complexes())
@settings(max_examples=40, deadline=None)
def test_product_with_point_is_isomorphic(C):
    P = product(C, point(0))
    stripped = image_complex(lambda v: v[:-1], P)
    assert stripped == C
