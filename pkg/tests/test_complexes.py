"""Skeletons, invariant faces and fixed-point models, against brute force."""

from __future__ import annotations

import math
from itertools import combinations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from acatlab.complexes import (
    SimplicialComplex,
    check_translation_equivariance,
    empty_complex,
    expected_fixed_connectivity,
    fixed_point_model,
    full_skeleton,
    group_skeleton,
    invariant_faces,
    is_invariant_face,
    translate_face,
    verify_fixed_model,
)
from acatlab.config import CapExceeded, InputError, RunConfig
from acatlab.enumeration import all_subgroups
from acatlab.groups import catalog, cyclic_group, subgroup_closure


def brute_invariant_faces(G, H, n):
    """Oracle: scan every subset of size <= n+1 for elementwise invariance."""
    out = []
    for k in range(1, n + 2):
        for sub in combinations(range(G.order), k):
            s = set(sub)
            if all(G.mul(v, h) in s for v in sub for h in H.elements()):
                out.append(tuple(sub))
    return sorted(out)


def test_closure_of_triangle():
    K = SimplicialComplex([(1, 2, 3)])
    assert K.num_faces == 7
    assert K.f_vector() == [3, 3, 1]
    assert K.is_full_simplex()
    assert K.connectivity() == math.inf


def test_empty_complex():
    K = empty_complex()
    assert K.dim == -1 and K.num_faces == 0
    assert K.connectivity() == -2


def test_two_disjoint_edges():
    K = SimplicialComplex([(0, 1), (2, 3)])
    assert K.components() == [[0, 1], [2, 3]]
    assert K.connectivity() == -1


def test_full_skeleton_counts_and_cap():
    K = full_skeleton(5, 2)
    assert K.f_vector() == [5, 10, 10]
    with pytest.raises(CapExceeded):
        full_skeleton(40, 10, RunConfig(face_cap=1000))


def test_skeleton_homology_binomial_oracle():
    # n-skeleton of the simplex on m vertices: reduced homology is free of
    # rank C(m-1, n+1), concentrated in degree n
    for m, n in [(4, 1), (5, 1), (5, 2), (6, 2)]:
        K = full_skeleton(m, n)
        H = K.reduced_homology(n)
        assert H.free_rank == math.comb(m - 1, n + 1) and not H.torsion, (m, n)
        for k in range(n):
            assert K.reduced_homology(k).is_zero()


def test_frozen_skeleton_4_1():
    K = full_skeleton(4, 1)
    assert K.connectivity() == 0
    H1 = K.reduced_homology(1)
    assert H1.free_rank == 3 and not H1.torsion


def test_group_skeleton_is_full_skeleton_on_order():
    G = catalog("S3")
    K = group_skeleton(G, 2)
    assert len(K.vertices) == 6
    assert K.dim == 2


def test_translate_face():
    G = cyclic_group(4)
    assert translate_face(G, (0, 1), 1) == (1, 2)
    assert translate_face(G, (0, 2), 2) == (0, 2)


def test_frozen_invariant_faces_c4():
    G = cyclic_group(4)
    H = subgroup_closure(G, [2])  # the order-2 subgroup
    faces = invariant_faces(G, H, 3)
    assert faces == [(0, 1, 2, 3), (0, 2), (1, 3)]
    assert all(is_invariant_face(G, H, f) for f in faces)


def test_invariant_faces_match_brute_force():
    cases = []
    for name in ["C4", "C6", "S3", "D4", "Q8"]:
        G = catalog(name)
        for H in all_subgroups(G, limit=G.order):
            for n in range(0, min(G.order, 7)):
                cases.append((G, H, n))
    for G, H, n in cases:
        assert invariant_faces(G, H, n) == brute_invariant_faces(G, H, n), (
            G.name, sorted(H.elements()), n)


def test_invariant_faces_empty_below_subgroup_order():
    G = catalog("S3")
    H = subgroup_closure(G, [next(g for g in range(6)
                                  if G.element_order(g) == 3)])
    assert invariant_faces(G, H, 1) == []
    assert fixed_point_model(G, H, 1).num_faces == 0


def test_fixed_model_counts():
    G = catalog("C12")
    H = subgroup_closure(G, [6])  # order 2
    n = 5
    q = (n + 1) // 2  # 3 cosets fit
    r = 6
    expected = sum(math.comb(r, k) for k in range(1, q + 1))
    assert len(invariant_faces(G, H, n)) == expected
    assert fixed_point_model(G, H, n).num_faces == expected


def test_verify_fixed_model_grid():
    for name in ["C4", "C6", "C8", "S3", "D4", "A4"]:
        G = catalog(name)
        for H in all_subgroups(G, limit=G.order):
            if H.size == 1:
                continue
            for n in range(0, min(G.order + 1, 9)):
                rep = verify_fixed_model(G, H, n)
                assert rep["invariant_faces"] >= 0
                expected = expected_fixed_connectivity(G, H, n)
                model = fixed_point_model(G, H, n)
                assert model.connectivity() == expected, (name, H, n)


def test_equivariance_under_normalizer():
    G = catalog("S3")
    t = next(g for g in range(6) if G.element_order(g) == 2)
    H = subgroup_closure(G, [t])
    # H self-normalizing: only one transversal element (identity coset)
    assert check_translation_equivariance(G, H, 3) == 1
    r = next(g for g in range(6) if G.element_order(g) == 3)
    K = subgroup_closure(G, [r])  # normal: transversal covers G/K
    assert check_translation_equivariance(G, K, 5) == 2


def test_fixed_model_of_c4_mod_center_is_interval():
    G = cyclic_group(4)
    H = subgroup_closure(G, [2])
    model = fixed_point_model(G, H, 3)
    # two coset-vertices plus the edge between them
    assert model.f_vector() == [2, 1]
    assert model.connectivity() == math.inf  # contractible by fullness


def test_invariant_faces_rejects_non_subgroup():
    from acatlab.groups import subgroup_set
    G = catalog("S3")
    with pytest.raises(InputError):
        invariant_faces(G, subgroup_set([0, 1, 2], 6), 2)


@settings(max_examples=40, deadline=None)
@given(st.sampled_from(["C4", "C6", "S3", "D4"]), st.integers(0, 6))
def test_invariant_count_formula(name, n):
    """|invariant faces| = sum_k C(r, k) for k = 1..floor((n+1)/|H|)."""
    G = catalog(name)
    for H in all_subgroups(G, limit=G.order):
        q = (n + 1) // H.size
        r = G.order // H.size
        expected = sum(math.comb(r, k) for k in range(1, q + 1))
        assert len(invariant_faces(G, H, n)) == expected
