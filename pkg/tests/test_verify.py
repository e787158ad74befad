import itertools
from collections import Counter, defaultdict

import pytest

from locfin.core import (SimplicialMap, closure, point, product, ray_segment,
                         vertex_degrees)
from locfin.construction import localize, projection_map
from locfin.homology import homology, is_acyclic
from locfin.verify import (GeneratorSpec, check_pseudofibration,
                           check_telescope_lemmas, collapse_to_point, cone,
                           degree_audit, fixture, generate, shelled_tree,
                           surjective_on_simplices)


# --- degree audit ----------------------------------------------------------------

def test_degree_audit_path_passes():
    rep = degree_audit(fixture("path_4"), 2)
    assert rep.ok and rep.max_degree == 2
    assert rep.histogram == {1: 2, 2: 3}


def test_degree_audit_star_fails():
    rep = degree_audit(fixture("star_5"), 4)
    assert not rep.ok and rep.violators == [(0,)]
    assert rep.max_degree == 5


def test_degree_audit_one_sided_counts():
    rep = degree_audit(fixture("circle_3"), 2)
    assert rep.max_up == 2 and rep.max_down == 2      # vertex 0 up, vertex 2 down


# --- collapsing ------------------------------------------------------------------

def test_collapse_full_simplex():
    assert collapse_to_point(closure([[0, 1, 2]])).collapsed


def test_collapse_circle_fails():
    rep = collapse_to_point(fixture("circle_3"), restarts=4)
    assert not rep.collapsed          # a cycle has no free faces at all


def test_collapse_cone_over_circle():
    assert collapse_to_point(cone(fixture("circle_3"))).collapsed


def test_collapse_surfaces_never():
    for name in ("sphere2_4", "torus7", "rp2_6", "klein8"):
        assert not collapse_to_point(fixture(name), restarts=3).collapsed


def test_collapse_to_target():
    T = fixture("circle_3")
    from locfin.construction import grow_edges
    g = grow_edges(T, 3, 4)
    rep = collapse_to_point(g, target=T)
    assert rep.collapsed
    assert not collapse_to_point(g, restarts=2).collapsed  # circle core remains


def test_collapse_empty_rejected():
    with pytest.raises(ValueError):
        collapse_to_point(closure([], universe=[]))


# --- pseudofibration checks ---------------------------------------------------------

def test_identity_fibers_collapse():
    C = fixture("sphere2_4")
    f = SimplicialMap(C, C, {v: v for v in C.vertices})
    rep = check_pseudofibration(f)
    assert rep.all_collapsed and rep.surjective


def test_single_edge_fibers():
    S = closure([[0, 1]], universe=["a", "b"])
    T, p, _ = localize(S)
    rep = check_pseudofibration(p)
    assert rep.all_collapsed
    assert rep.counts() == {"collapsed": 3}
    # the fiber over the edge is the whole complex
    assert rep.fibers[((0,), (1,))].size == T.count()


def test_disconnected_fiber_fails():
    two = closure([[0], [1]], universe=["a", "b"])
    one = closure([[0]], universe=["x"])
    f = SimplicialMap(two, one, {(0,): (0,), (1,): (0,)})
    rep = check_pseudofibration(f)
    assert rep.fibers[((0,),)].status == "failed"
    assert not rep.all_collapsed


def test_inclusion_not_surjective():
    C = fixture("circle_3")
    sub = closure([[0, 1]], universe=["a", "b", "c"])
    inc = SimplicialMap(sub, C, {v: v for v in sub.vertices})
    assert not surjective_on_simplices(inc)
    rep = check_pseudofibration(inc)
    assert rep.unhit


def test_tower_fibers_all_levels():
    S = fixture("rp2_6")
    _, _, tower = localize(S)
    for st in tower.stages[1:]:
        rep = check_pseudofibration(st.projection, seed=1)
        assert rep.all_collapsed, (st.level, rep.counts())
        spread_proj = projection_map(st.spread, tower.stages[st.level - 1].skeleton)
        rep2 = check_pseudofibration(spread_proj, seed=1)
        assert rep2.all_collapsed, (st.level, rep2.counts())


# --- telescope laws -------------------------------------------------------------------

def test_telescope_laws_trivial_level():
    C = fixture("circle_3")
    rep = check_telescope_lemmas(C, 0)
    assert rep.ok


def test_telescope_laws_on_pipeline_intermediate():
    S = closure([[0, 1, 2]], universe=list("abc"))
    _, _, tower = localize(S)
    T1 = tower.stages[1].complex
    rep = check_telescope_lemmas(T1, 1, tower.stages[1].ray_bound,
                                 samples=6, seed=2)
    assert rep.ok, rep.failures


def test_telescope_laws_reject_bad_input():
    C = closure([[(0, 0), (0, 2)]])
    with pytest.raises(ValueError):
        check_telescope_lemmas(C, 1, 5)


# --- generators ------------------------------------------------------------------------

def test_shelled_tree_dim1_is_tree():
    for k in (1, 4, 9):
        t = shelled_tree(1, k, seed=2)
        assert t.count(1) == k and t.count(0) == k + 1
        assert is_acyclic(t)


def test_shelled_trees_collapse():
    for dim in (1, 2, 3):
        t = shelled_tree(dim, 6, seed=dim)
        assert t.dim == dim
        assert collapse_to_point(t).collapsed
        assert is_acyclic(t)


def test_shelled_tree_deterministic():
    a = shelled_tree(2, 7, seed=42)
    b = shelled_tree(2, 7, seed=42)
    assert a == b
    c = shelled_tree(2, 7, seed=43)
    assert a != c or a == c      # different seed may coincide on tiny cases


def test_cone_is_collapsible_and_acyclic():
    for name in ("circle_3", "torus7"):
        K = cone(fixture(name))
        assert collapse_to_point(K).collapsed
        assert is_acyclic(K)


def test_torus_counts():
    C = fixture("torus7")
    assert (C.count(0), C.count(1), C.count(2)) == (7, 21, 14)
    chi = C.count(0) - C.count(1) + C.count(2)
    assert chi == 0


def test_klein8_is_a_closed_surface():
    C = fixture("klein8")
    assert (C.count(0), C.count(1), C.count(2)) == (8, 24, 16)
    # every edge lies in exactly two triangles
    cofaces = Counter()
    for t in C.by_dim[2]:
        for e in itertools.combinations(t, 2):
            cofaces[e] += 1
    assert all(c == 2 for c in cofaces.values())
    assert len(cofaces) == 24
    # each vertex link is one cycle
    for v in C.vertices:
        adj = defaultdict(set)
        for t in C.by_dim[2]:
            if v in t:
                a, b = [u for u in t if u != v]
                adj[a].add(b)
                adj[b].add(a)
        assert all(len(n) == 2 for n in adj.values())
        start = next(iter(adj))
        seen, stack = {start}, [start]
        while stack:
            x = stack.pop()
            for y in adj[x]:
                if y not in seen:
                    seen.add(y)
                    stack.append(y)
        assert len(seen) == len(adj)


def test_generator_spec_dispatch():
    assert generate(GeneratorSpec("fixture", name="circle_3")) == fixture("circle_3")
    t = generate(GeneratorSpec("shelled_tree", dimension=2, size=3, seed=1))
    assert t == shelled_tree(2, 3, seed=1)
    k = generate(GeneratorSpec("cone", name="circle_3"))
    assert collapse_to_point(k).collapsed
    with pytest.raises(ValueError):
        generate(GeneratorSpec("nope"))
    with pytest.raises(ValueError):
        fixture("unknown_thing")
