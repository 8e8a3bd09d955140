import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from flaggrowth.chains import integral_homology, reduced_betti
from flaggrowth.complexes import (
    SimplicialComplex, barycentric_subdivision, build_complex, builtin, default_suite, delete_vertex,
    dumps, empty_triangles, flagify_by_edge_subdivision, full_subcomplex, is_flag, is_isomorphic,
    join, library, link, load, loads, octahedralize, relabel, save, star, subdivide_edge)
from oracles import clique_facets


def test_empty_facet_set_and_empty_facet_rejected():
    with pytest.raises(ValueError):
        build_complex([])
    with pytest.raises(ValueError):
        build_complex([["a"], []])


@pytest.mark.parametrize("bad", [[["a", "a"]], [["a b"]], [["#x"]], [[""]]])
def test_bad_tokens(bad):
    with pytest.raises(ValueError):
        build_complex(bad)


def test_redundant_facets_are_dropped():
    c = build_complex([["a", "b", "c"], ["a", "b"], ["c"]])
    assert c.facets == (("a", "b", "c"),)
    assert c.f_vector == (1, 3, 3, 1)


def test_two_vertex_graph_flagness():
    assert is_flag(build_complex([["a", "b"]]))
    assert is_flag(build_complex([["a"], ["b"]]))


def test_boundary_of_triangle_is_not_flag():
    c = builtin("sphere_boundary_1")
    assert c.f_vector == (1, 3, 3)
    assert not is_flag(c)
    assert empty_triangles(c) == [tuple(c.vertices)]


@pytest.mark.parametrize("name,fv,flag", [
    ("point", (1, 1), True),
    ("s0", (1, 2), True),
    ("cycle_4", (1, 4, 4), True),
    ("path_3", (1, 3, 2), True),
    ("simplex_2", (1, 3, 3, 1), True),
    ("sphere_boundary_2", (1, 4, 6, 4), False),
    ("octahedron", (1, 6, 12, 8), True),
    ("icosahedron", (1, 12, 30, 20), True),
    ("rp2_6", (1, 6, 15, 10), False),
    ("rp2_flag", (1, 12, 33, 22), True),
    ("moore_3", (1, 13, 39, 27), False),
])
def test_builtin_f_vectors(name, fv, flag):
    c = builtin(name)
    assert c.f_vector == fv
    assert is_flag(c) == flag


def test_builtin_aliases_and_unknown():
    assert builtin("cycle(5)") == builtin("cycle_5")
    with pytest.raises(KeyError):
        builtin("torus_7")
    with pytest.raises(KeyError):
        builtin("cycle_2")
    assert set(library()) >= {"point", "rp2_flag", "moore_p"}


def test_rp2_flag_is_a_subdivided_projective_plane():
    c = builtin("rp2_flag")
    # every edge lies in exactly two triangles: a closed surface
    count = {}
    for f in c.facets:
        for e in itertools.combinations(f, 2):
            count[e] = count.get(e, 0) + 1
    assert set(count.values()) == {2}
    assert c.euler_characteristic() == 1
    assert integral_homology(c) == [(1, []), (0, [2]), (0, [])]


def test_moore_space_homology():
    assert integral_homology(builtin("moore_3")) == [(1, []), (0, [3]), (0, [])]
    assert integral_homology(builtin("moore_2")) == [(1, []), (0, [2]), (0, [])]


def test_link_star_full_subcomplex_octahedron():
    c = builtin("octahedron")
    v = c.vertices[0]
    assert link(c, v).f_vector == (1, 4, 4)
    assert is_isomorphic(link(c, v), builtin("cycle_4"))
    assert star(c, v).f_vector == (1, 5, 8, 4)
    assert delete_vertex(c, v).f_vector == (1, 5, 8, 4)
    assert full_subcomplex(c, c.vertices[:2]).f_vector in {(1, 2), (1, 2, 1)}
    with pytest.raises(KeyError):
        link(c, "nope")


def test_link_of_edge_in_octahedron_is_two_points():
    c = builtin("octahedron")
    e = next(f[:2] for f in c.facets)
    assert link(c, e).f_vector == (1, 2)


def test_octahedralize_point_and_s0():
    assert octahedralize(builtin("point")).f_vector == (1, 2)
    ol = octahedralize(builtin("cycle_4"))
    assert ol.f_vector == (1, 8, 16)
    assert is_flag(ol)


def test_octahedralize_simplex_is_cross_polytope():
    ol = octahedralize(builtin("simplex_2"))
    assert is_isomorphic(ol, builtin("octahedron"))


def test_barycentric_subdivision_of_triangle():
    sd = barycentric_subdivision(builtin("simplex_2"))
    # frozen: 7 nonempty faces, 12 comparable pairs, 3! maximal chains
    assert sd.f_vector == (1, 7, 12, 6)
    assert is_flag(sd)


def test_subdivide_edge():
    c = build_complex([["a", "b", "c"]])
    d = subdivide_edge(c, ("a", "b"), "w")
    assert d.f_vector == (1, 4, 5, 2)
    with pytest.raises(ValueError):
        subdivide_edge(d, ("a", "b"))


def test_flagify_rp2_6_minimal():
    c = flagify_by_edge_subdivision(builtin("rp2_6"))
    assert is_flag(c) and len(c.vertices) == 12


def test_join_with_empty_and_collisions():
    p = builtin("point")
    empty = SimplicialComplex([])
    assert join(p, empty) == p
    j = join(builtin("s0"), builtin("s0"))
    assert j.f_vector == (1, 4, 4)
    assert is_isomorphic(j, builtin("cycle_4"))


def test_isomorphism_detects_difference():
    assert not is_isomorphic(builtin("cycle_5"), builtin("path_5"))
    r = relabel(builtin("cycle_5"), lambda v: "x" + v)
    assert is_isomorphic(r, builtin("cycle_5"))


def test_text_round_trip(tmp_path):
    c = builtin("rp2_flag")
    assert loads(dumps(c)) == c
    path = tmp_path / "rp2.txt"
    save(c, path)
    assert load(path) == c
    assert load(path).name == "rp2"


def test_loads_ignores_comments_and_blank_lines():
    c = loads("# a comment\n\na b\nb c\n")
    assert c.facets == (("a", "b"), ("b", "c"))


@st.composite
def flag_complexes(draw, max_vertices=7):
    n = draw(st.integers(1, max_vertices))
    pairs = list(itertools.combinations(range(n), 2))
    edges = [e for e in pairs if draw(st.booleans())]
    return build_complex(clique_facets(n, edges))


@settings(max_examples=60, deadline=None)
@given(flag_complexes())
def test_clique_complexes_are_flag_and_links_flag(c):
    assert is_flag(c)
    for v in c.vertices:
        lk = link(c, v)
        assert not lk.vertices or is_flag(lk)


@settings(max_examples=40, deadline=None)
@given(flag_complexes(5))
def test_barycentric_subdivision_preserves_homology(c):
    assert reduced_betti(barycentric_subdivision(c), 0) == reduced_betti(c, 0)


@settings(max_examples=40, deadline=None)
@given(flag_complexes(6))
def test_euler_characteristic_matches_betti(c):
    b = reduced_betti(c, 2)
    assert c.euler_characteristic() - 1 == sum((-1) ** i * x for i, x in enumerate(b))


def test_default_suite_names_resolve():
    for name in default_suite():
        builtin(name)


@st.composite
def any_complexes(draw, max_vertices=6):
    n = draw(st.integers(1, max_vertices))
    verts = [str(i) for i in range(n)]
    facets = draw(st.lists(st.lists(st.sampled_from(verts), min_size=1, max_size=4, unique=True),
                           min_size=1, max_size=6))
    return build_complex(facets)


@settings(max_examples=50, deadline=None)
@given(any_complexes())
def test_barycentric_subdivision_is_flag(c):
    assert is_flag(barycentric_subdivision(c))


@settings(max_examples=50, deadline=None)
@given(any_complexes())
def test_octahedralization_f_vector(c):
    ol = octahedralize(c)
    assert ol.f_vector == tuple(f << k for k, f in enumerate(c.f_vector))


@settings(max_examples=30, deadline=None)
@given(any_complexes(3), any_complexes(3))
def test_octahedralize_commutes_with_join(a, b):
    assert is_isomorphic(octahedralize(join(a, b)), join(octahedralize(a), octahedralize(b)))


@settings(max_examples=50, deadline=None)
@given(flag_complexes())
def test_flag_link_is_full_subcomplex_on_neighbours(c):
    for v in c.vertices:
        nb = c.neighbors(v)
        if nb:
            assert link(c, v) == full_subcomplex(c, nb)


@settings(max_examples=40, deadline=None)
@given(any_complexes(5), st.data())
def test_subdivision_preserves_betti(c, data):
    edges = c.faces(2)
    for char in (0, 2, 3):
        base = reduced_betti(c, char)
        assert reduced_betti(barycentric_subdivision(c), char) == base
        if edges:
            e = c.names(data.draw(st.sampled_from(edges)))
            assert reduced_betti(subdivide_edge(c, e), char) == base


def test_join_examples():
    s0, p = builtin("s0"), builtin("point")
    assert is_isomorphic(join(join(s0, s0), s0), builtin("octahedron"))
    cone = join(p, builtin("rp2_6"))
    assert reduced_betti(cone, 2) == [0, 0, 0, 0]


def test_moore_space_flagified_by_barycentric_subdivision():
    sd = barycentric_subdivision(builtin("moore_2"))
    assert is_flag(sd)
    assert integral_homology(sd) == [(1, []), (0, [2]), (0, [])]
