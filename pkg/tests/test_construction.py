import pytest

from locfin.core import (base_restriction, closure, edge_degree,
                         image_complex, induced_subcomplex, point, product,
                         ray_segment, skeleton, union, validate,
                         vertex_degrees)
from locfin.construction import (PipelineError, attach_level, completion_round,
                                 degree_bounds, first_fit_coloring, grow_edges,
                                 localize, mapping_telescope, projection_map,
                                 spread_level, telescope)
from locfin.homology import homology
from locfin.verify import fixture, shelled_tree


# --- coloring ------------------------------------------------------------------

def test_first_fit_triangle_edges():
    C = fixture("circle_3")
    col = first_fit_coloring(C, 1)
    assert col == {((0,), (1,)): 0, ((0,), (2,)): 1, ((1,), (2,)): 2}


def test_first_fit_disjoint_edges_share_color():
    C = closure([[0, 1], [2, 3]])
    col = first_fit_coloring(C, 1)
    assert set(col.values()) == {0}


def test_first_fit_path():
    C = closure([[0, 1], [1, 2]])
    col = first_fit_coloring(C, 1)
    assert col[((0,), (1,))] == 0 and col[((1,), (2,))] == 1


def test_first_fit_is_proper():
    C = shelled_tree(2, 9, seed=12)
    for m in (1, 2):
        col = first_fit_coloring(C, m)
        simplices = list(col)
        for i, s in enumerate(simplices):
            for t in simplices[i + 1:]:
                if set(s) & set(t):
                    assert col[s] != col[t]


# --- telescope -------------------------------------------------------------------

def test_telescope_level_zero_is_identity():
    C = closure([[0, 1]])
    assert telescope(C, 0, 5) == C


def test_telescope_of_vertex_is_ray():
    C = product(closure([[0]]), point(0))      # single vertex at level 1
    tel = telescope(C, 1, 4)
    assert tel == product(closure([[0]]), ray_segment(0, 4))


def test_telescope_dimension_bound():
    S = fixture("circle_3")
    T1, _, tower = localize(S)
    tel = telescope(T1, 1, tower.stages[1].ray_bound)
    assert tel.dim <= T1.dim + 1
    assert T1.simplices <= tel.simplices


def test_telescope_rejects_bad_last_coordinates():
    C = closure([[(0, 0), (0, 2)]])            # last-coordinate set {0, 2}
    with pytest.raises(ValueError):
        telescope(C, 1, 5)


def test_telescope_rejects_small_bound():
    C = product(closure([[0]]), point(4))
    with pytest.raises(ValueError):
        telescope(C, 1, 2)                     # existing coordinate 4 > bound


# --- tower levels -----------------------------------------------------------------

def test_spread_level_single_edge_is_cylinder():
    S = closure([[0, 1]], universe=["a", "b"])
    T0 = skeleton(S, 0)
    col = first_fit_coloring(S, 1)
    sp = spread_level(T0, S, col, 2, [])
    assert sp == product(T0, ray_segment(0, 2))


def test_spread_level_empty_attachments():
    S = closure([[0, 1]], universe=["a", "b"])
    T1, _, tower = localize(S)
    sp = spread_level(T1, S, {}, 3, [tower.stages[1].ray_bound])
    assert sp == product(T1, ray_segment(0, 3))


def test_attach_level_single_edge():
    S = closure([[0, 1]], universe=["a", "b"])
    T0 = skeleton(S, 0)
    col = first_fit_coloring(S, 1)
    sp = spread_level(T0, S, col, 2, [])
    T1 = attach_level(sp, S, col)
    assert ((0, 0), (1, 0)) in T1              # the edge lands at color 0
    assert T1.count() == sp.count() + 1


def test_attach_level_asserts_closure():
    S = closure([[0, 1]], universe=["a", "b"])
    col = first_fit_coloring(S, 1)
    bad = closure([[(0, 0)]])                  # missing the (1; 0) vertex
    with pytest.raises(PipelineError):
        attach_level(bad, S, col)


# --- degree bounds -----------------------------------------------------------------

def test_degree_bounds_table():
    assert (degree_bounds(1).one_sided, degree_bounds(1).total) == (3, 4)
    assert (degree_bounds(2).one_sided, degree_bounds(2).total) == (12, 22)
    assert (degree_bounds(3).one_sided, degree_bounds(3).total) == (40, 78)


def test_degree_bounds_closed_form():
    for n in range(1, 21):
        b = degree_bounds(n)
        assert 2 * b.one_sided == 2 ** (n - 1) * (n * n + 3 * n + 2)
        assert b.total == 2 * (b.one_sided - 1)
    with pytest.raises(ValueError):
        degree_bounds(0)


# --- localize ---------------------------------------------------------------------

def test_localize_single_vertex():
    S = closure([[0]], universe=["a"])
    T, p, tower = localize(S)
    assert T == S and tower.n == 0


def test_localize_empty():
    S = closure([], universe=[])
    T, p, tower = localize(S)
    assert T.count() == 0


def test_localize_single_edge_worked_example():
    S = closure([[0, 1]], universe=["a", "b"])
    T, p, tower = localize(S)
    # color 0, ray bound 2: two rays of length 2 joined at height 0
    expected = {
        ((0, 0),), ((0, 1),), ((0, 2),), ((1, 0),), ((1, 1),), ((1, 2),),
        ((0, 0), (0, 1)), ((0, 1), (0, 2)),
        ((1, 0), (1, 1)), ((1, 1), (1, 2)),
        ((0, 0), (1, 0)),
    }
    assert set(T.simplices) == expected
    assert edge_degree(T, (0, 0)) == 2
    assert max(vertex_degrees(T).values()) == 2 <= degree_bounds(1).total
    assert p.validate().ok
    assert tower.stages[1].ray_bound == 2


def test_localize_single_edge_vertex_fiber_is_ray():
    S = closure([[0, 1]], universe=["a", "b"])
    T, p, tower = localize(S)
    fib = base_restriction(T, [0])
    assert fib == product(closure([[0]]), ray_segment(0, 2))


def test_localize_circle_preserves_homology():
    S = fixture("circle_3")
    T, p, _ = localize(S)
    assert homology(T).betti_vector() == [1, 1]
    assert T.dim == 1
    assert max(vertex_degrees(T).values()) <= degree_bounds(1).total


def test_localize_stage_containments():
    S = fixture("torus7")
    _, _, tower = localize(S)
    for k in range(1, tower.n + 1):
        prev = tower.stages[k - 1].complex
        spread = tower.stages[k].spread
        stage = tower.stages[k].complex
        lifted = {tuple(v + (0,) for v in s) for s in prev.simplices}
        assert lifted <= spread.simplices      # the cylinder contains level 0
        assert spread.simplices <= stage.simplices


def test_localize_dim_cap_matches_full_skeleton():
    for dim, size in ((2, 6), (3, 2)):
        S = shelled_tree(dim, size, seed=3)
        full, _, _ = localize(S)
        capped, _, _ = localize(S, dim_cap=1)
        assert skeleton(full, 1).simplices == capped.simplices


def test_localize_ray_policy_override():
    S = fixture("circle_3")
    _, _, tower = localize(S, ray_policy=9)
    assert tower.stages[1].ray_bound == 9
    with pytest.raises(ValueError):
        localize(S, ray_policy=1)              # does not exceed the max color


# --- projection -----------------------------------------------------------------

def test_projection_map_drops_coordinates():
    S = fixture("circle_3")
    T, p, _ = localize(S)
    assert p.image() == S
    assert projection_map(product(S, ray_segment(0, 2)), S).validate().ok


def test_projection_map_rejects_missing_targets():
    S = closure([[0, 1]])
    sub = closure([[0], [1]])
    with pytest.raises(ValueError):
        projection_map(product(S, point(0)), sub)


# --- grow edges ------------------------------------------------------------------

def test_grow_path_one_round():
    path = closure([[0, 1], [1, 2]], universe=list("abc"))
    g = grow_edges(path, 3, 1)
    degs = vertex_degrees(g)
    assert degs[(1,)] == 3 and degs[(0,)] == 2 and degs[(2,)] == 2


def test_grow_single_vertex_reaches_bound():
    pt = closure([[0]], universe=["a"])
    g = grow_edges(pt, 2, 3)
    assert vertex_degrees(g)[(0,)] == 2
    assert g.count(0) == 3


def test_grow_noop_when_regular():
    C = fixture("circle_3")
    assert grow_edges(C, 2, 5) == C


def test_grow_rejects_overfull():
    star = fixture("star_5")
    with pytest.raises(ValueError):
        grow_edges(star, 4, 1)


def test_grow_completion_rounds():
    S = fixture("circle_3")
    T, _, _ = localize(S)
    M = degree_bounds(1).total
    g = grow_edges(T, M, M + 3)
    comp = completion_round(T, M)
    degs = vertex_degrees(g)
    assert all(degs[v] == M for v, r in comp.items() if r <= M + 3)


# --- mapping telescope --------------------------------------------------------------

def test_mapping_telescope_point_tower():
    S = closure([[0]], universe=["a"])
    _, _, tower = localize(S)
    tele, proj = mapping_telescope(tower)
    assert tele.count() == 1 and tele.has_stage


def test_mapping_telescope_chain_of_points_is_path():
    pt = closure([[0]])
    tele, _ = mapping_telescope([pt, pt, pt])
    assert tele.count(0) == 3 and tele.count(1) == 2
    assert homology(tele).betti_vector() == [1, 0]


def test_mapping_telescope_constant_tower_keeps_homology():
    C = fixture("circle_3")
    tele, _ = mapping_telescope([C, C])
    assert homology(tele).same_groups(homology(C))


def test_mapping_telescope_of_torus_tower():
    S = fixture("torus7")
    _, _, tower = localize(S)
    tele, proj = mapping_telescope(tower)
    assert tele.dim == S.dim
    assert homology(tele).same_groups(homology(S))
    assert proj.validate().ok
    assert proj.image() == S


def test_mapping_telescope_empty():
    with pytest.raises(ValueError):
        mapping_telescope([])
