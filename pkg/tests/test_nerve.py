import math
import warnings
from fractions import Fraction

import numpy as np
import pytest

from flaggrowth.chains import reduced_betti_at
from flaggrowth.complexes import builtin, is_isomorphic
from flaggrowth.linalg import SizeLimitError
from flaggrowth.nerve import (NerveData, coefficient_nerve_homology, collapse_report,
                              e1_dimensions, nerve_subcomplex, relative_nerve_complex,
                              torus_preimage_dims)
from flaggrowth.salvetti import CoverSpec, build_cover_complex, cover_betti

SMALL = ["point", "s0", "path_3", "cycle_4", "cycle_5", "simplex_2", "octahedron"]


def test_nerve_of_cycle_is_cycle():
    assert is_isomorphic(nerve_subcomplex(builtin("cycle_5")), builtin("cycle_5"))


def test_nerve_of_simplex_is_point():
    assert nerve_subcomplex(builtin("simplex_3")).f_vector == (1, 1)


def test_nerve_of_octahedron():
    # eight triangles, opposite pairs disjoint; vertex stars are 4-simplices
    assert nerve_subcomplex(builtin("octahedron")).f_vector == (1, 8, 24, 24, 6)


def test_nerve_has_homotopy_type_of_L():
    for name in ["cycle_5", "octahedron", "rp2_6", "path_3"]:
        L = builtin(name)
        N = nerve_subcomplex(L)
        for char in (0, 2):
            got = [reduced_betti_at(N, i, char) for i in range(4)]
            want = [reduced_betti_at(L, i, char) for i in range(4)]
            assert got == want


def test_tau_of_facet_sets():
    nd = NerveData.of(builtin("cycle_4"))
    assert nd.tau([0]) == nd.masks[0]
    assert nd.tau([]) == 0
    shared = [i for i in range(1, 4) if nd.masks[0] & nd.masks[i]]
    assert len(nd.tau_names([0, shared[0]])) == 1


@pytest.mark.parametrize("name,n", [("cycle_4", 2), ("cycle_4", 3), ("path_3", 2), ("octahedron", 2)])
def test_e1_euler_characteristic_equals_cover(name, n):
    L = builtin(name)
    e1 = e1_dimensions(L, n)
    chi = sum((-1) ** (i + j) * d for (i, j), d in e1.dims.items())
    assert chi == cover_betti(L, n, 0).euler_characteristic()


def test_e1_truncation():
    L = builtin("cycle_4")
    full = e1_dimensions(L, 2)
    part = e1_dimensions(L, 2, up_to_subset_size=2)
    assert all(i <= 1 for i, _ in part.dims)
    assert all(part.dims[k] == full.dims[k] for k in part.dims)


@pytest.mark.parametrize("name,n", [("cycle_4", 3), ("octahedron", 2), ("path_3", 2)])
def test_torus_preimage_against_direct_computation(name, n):
    L = builtin(name)
    spec = CoverSpec.uniform(L, n)
    cx = build_cover_complex(L, spec)
    for face in L.facets[:3]:
        idx = L.ids(face)
        masks = []
        for k, fk in enumerate(L.f_vector):
            inside = np.array([set(f) <= set(idx) for f in L.faces(k)], dtype=bool)
            # cell id = q * f_k + face index
            masks.append(np.tile(inside, spec.order))
        sub = cx.subcomplex(masks)
        assert sub.betti(0)[:len(face) + 1] == torus_preimage_dims(L, spec, face)


@pytest.mark.parametrize("name", SMALL)
@pytest.mark.parametrize("n", [2, 3])
def test_coefficient_identity(name, n):
    L = builtin(name)
    order = n ** len(L.vertices)
    for char in (0, 2, 3):
        dims = coefficient_nerve_homology(L, n, char)
        assert dims == [reduced_betti_at(L, i - 1, char) * order for i in range(len(dims))]


def test_coefficient_identity_materialized_and_tensor_routes_agree():
    L = builtin("cycle_5")
    a = coefficient_nerve_homology(L, 2, 0, materialize=True)
    b = coefficient_nerve_homology(L, 2, 0, materialize=False)
    assert a == b


def test_coefficient_identity_sees_field():
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        L = builtin("rp2_6")
        assert coefficient_nerve_homology(L, 2, 2) == [0, 0, 64, 64] + [0] * 6
        assert coefficient_nerve_homology(L, 2, 0) == [0] * 10


def test_relative_complex_limit():
    with pytest.raises(SizeLimitError):
        relative_nerve_complex(builtin("icosahedron"))


@pytest.mark.parametrize("name,n", [("point", 2), ("cycle_4", 3), ("cycle_5", 2), ("octahedron", 2)])
def test_collapse_report_within_bound(name, n):
    rows = collapse_report(builtin(name), n, 0)
    assert [r["degree"] for r in rows] == list(range(len(rows)))
    for r in rows:
        assert r["within_bound"]
        assert Fraction(r["gap"]) == abs(Fraction(r["cover_normalized"]) - Fraction(r["nerve_normalized"]))


def test_collapse_report_top_degree_for_four_cycle():
    rows = collapse_report(builtin("cycle_4"), 3, 0)
    assert rows[2]["cover_normalized"] == "100/81"
    assert rows[2]["nerve_normalized"] == "1"
    assert rows[2]["e1_offrow_mass"] == "16/9"
