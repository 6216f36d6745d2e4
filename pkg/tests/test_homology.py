"""SNF and homology, checked against determinant divisors and known spaces.

The simplicial builder in this file is deliberately independent of the
package's own complex constructors: tests here must not trust the code under
test to produce its own expected values.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import combinations, permutations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from acatlab.config import InputError, InvariantViolation, VerificationFailure
from acatlab.homology import (
    ChainComplex,
    HomologyGroup,
    p_primary_part,
    rank_mod_p,
    smith_diagonal,
    smith_normal_form,
)

# ---------------------------------------------------------------------------
# oracles


def exact_det(M):
    """Integer determinant by permutation expansion (tiny matrices only)."""
    n = len(M)
    if n == 0:
        return 1
    total = 0
    for perm in permutations(range(n)):
        sign = 1
        seen = list(perm)
        for i in range(n):  # count inversions
            for j in range(i + 1, n):
                if seen[i] > seen[j]:
                    sign = -sign
        term = 1
        for i in range(n):
            term *= int(M[i][perm[i]])
        total += sign * term
    return total


def determinant_divisors(A):
    """gcd of all k x k minors, for each k; d_1*...*d_k must equal this."""
    import math
    A = np.asarray(A, dtype=object)
    m, n = A.shape
    out = []
    for k in range(1, min(m, n) + 1):
        g = 0
        for rows in combinations(range(m), k):
            for cols in combinations(range(n), k):
                g = math.gcd(g, abs(exact_det(A[np.ix_(rows, cols)])))
        out.append(g)
    return out


def fraction_rank(A):
    """Rank over Q via Fraction Gaussian elimination."""
    rows = [[Fraction(int(x)) for x in row] for row in np.asarray(A)]
    rank, ncols = 0, (len(rows[0]) if rows else 0)
    for c in range(ncols):
        piv = next((i for i in range(rank, len(rows)) if rows[i][c] != 0), None)
        if piv is None:
            continue
        rows[rank], rows[piv] = rows[piv], rows[rank]
        inv = 1 / rows[rank][c]
        rows[rank] = [x * inv for x in rows[rank]]
        for i in range(len(rows)):
            if i != rank and rows[i][c] != 0:
                f = rows[i][c]
                rows[i] = [a - f * b for a, b in zip(rows[i], rows[rank])]
        rank += 1
    return rank


def reduced_complex_from_facets(facets):
    """Reduced simplicial chain complex, built from scratch for cross-checks."""
    faces = set()
    for f in facets:
        f = tuple(sorted(f))
        for k in range(1, len(f) + 1):
            faces.update(combinations(f, k))
    by_dim = {}
    for f in faces:
        by_dim.setdefault(len(f) - 1, []).append(f)
    for k in by_dim:
        by_dim[k].sort()
    dims = {k: len(v) for k, v in by_dim.items()}
    dims[-1] = 1
    boundaries = {}
    if 0 in by_dim:
        boundaries[0] = np.ones((1, dims[0]), dtype=np.int64)
    for k in sorted(by_dim):
        if k == 0:
            continue
        rows = {f: i for i, f in enumerate(by_dim[k - 1])}
        M = np.zeros((dims[k - 1], dims[k]), dtype=np.int64)
        for c, f in enumerate(by_dim[k]):
            for pos in range(len(f)):
                sub = f[:pos] + f[pos + 1:]
                M[rows[sub], c] = (-1) ** pos
        boundaries[k] = M
    return ChainComplex(dims, boundaries)


RP2_FACETS = [  # antipodal quotient of the icosahedron, 6 vertices
    (1, 2, 5), (1, 2, 6), (1, 3, 4), (1, 3, 6), (1, 4, 5),
    (2, 3, 4), (2, 3, 5), (2, 4, 6), (3, 5, 6), (4, 5, 6),
]


# ---------------------------------------------------------------------------
# SNF


def test_snf_frozen_example():
    res = smith_normal_form([[2, 0], [0, 3]])
    assert res.diagonal == (1, 6)
    res.verify(np.array([[2, 0], [0, 3]]))


def test_snf_zero_and_empty():
    assert smith_normal_form(np.zeros((3, 2), dtype=int)).diagonal == (0, 0)
    res = smith_normal_form(np.zeros((0, 4), dtype=int))
    assert res.rank == 0
    assert res.kernel_basis().shape == (4, 4)


def test_snf_identity_like():
    A = np.array([[1, 0, 0], [0, 1, 0]])
    res = smith_normal_form(A)
    assert res.diagonal == (1, 1)
    assert res.rank == 2
    res.verify(A)


def test_snf_rejects_non_integer():
    with pytest.raises(InputError):
        smith_normal_form(np.array([[0.5]]))
    with pytest.raises(InputError):
        smith_normal_form(np.array([1, 2, 3]))


def test_snf_promotes_past_int64():
    big = 2**61
    A = np.array([[big, big], [big, -big]], dtype=object)
    res = smith_normal_form(A)
    assert res.diagonal == (big, 2 * big)
    res.verify(A)
    # same matrix provided as int64 must promote, not overflow
    B = np.array([[big, big], [big, -big]], dtype=np.int64)
    res2 = smith_normal_form(B)
    assert res2.diagonal == (big, 2 * big)


def test_snf_verify_catches_tampering():
    A = np.array([[2, 4], [6, 8]])
    res = smith_normal_form(A)
    res.verify(A)
    res.D = res.D.copy()
    res.D[0, 0] = 5
    with pytest.raises(VerificationFailure):
        res.verify(A)


@settings(max_examples=80, deadline=None)
@given(st.integers(1, 4), st.integers(1, 4), st.data())
def test_snf_matches_determinant_divisors(m, n, data):
    A = np.array([[data.draw(st.integers(-6, 6)) for _ in range(n)]
                  for _ in range(m)])
    res = smith_normal_form(A)
    res.verify(A)
    divisors = determinant_divisors(A)
    prod = 1
    for k, d in enumerate(res.diagonal):
        prod *= d
        assert prod == divisors[k]
    assert res.rank == fraction_rank(A)
    # kernel columns really lie in the kernel
    K = res.kernel_basis().astype(object)
    assert not (A.astype(object) @ K).any()


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 5), st.integers(1, 5), st.data())
def test_smith_diagonal_is_nonzero_prefix_of_snf(m, n, data):
    A = np.array([[data.draw(st.integers(-9, 9)) for _ in range(n)]
                  for _ in range(m)])
    diag = smith_diagonal(A)
    full = smith_normal_form(A)
    full.verify(A)
    assert diag == tuple(d for d in full.diagonal if d)
    assert len(diag) == full.rank


def test_smith_diagonal_drops_zero_rows():
    assert smith_diagonal(np.zeros((3, 2), dtype=int)) == ()
    assert smith_diagonal(np.array([[2, 0], [0, 0]])) == (2,)


# ---------------------------------------------------------------------------
# mod-p rank


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 4), st.integers(1, 4), st.sampled_from([2, 3, 5]),
       st.data())
def test_rank_mod_p_matches_minor_oracle(m, n, p, data):
    A = np.array([[data.draw(st.integers(-6, 6)) for _ in range(n)]
                  for _ in range(m)])
    best = 0
    for k in range(1, min(m, n) + 1):
        for rows in combinations(range(m), k):
            for cols in combinations(range(n), k):
                if exact_det(A[np.ix_(rows, cols)]) % p != 0:
                    best = max(best, k)
    assert rank_mod_p(A, p) == best


# ---------------------------------------------------------------------------
# chain complexes


def test_chain_complex_rejects_bad_composition():
    with pytest.raises(InvariantViolation):
        ChainComplex({0: 1, 1: 1, 2: 1},
                     {1: np.array([[1]]), 2: np.array([[1]])})


def test_chain_complex_shape_mismatch():
    with pytest.raises(InputError):
        ChainComplex({0: 2, 1: 2}, {1: np.array([[1, 0]])})


def test_torsion_assembly_diag_2_3():
    # C_1 = Z^2 --diag(2,3)--> C_0 = Z^2 gives H_0 = Z/6 in normal form
    C = ChainComplex({0: 2, 1: 2}, {1: np.array([[2, 0], [0, 3]])})
    H0 = C.homology(0)
    assert H0.free_rank == 0 and H0.torsion == (6,)
    assert C.homology(1).is_zero()


def test_circle_homology():
    C = reduced_complex_from_facets([(1, 2), (2, 3), (1, 3)])
    assert C.homology(0).is_zero()
    H1 = C.homology(1)
    assert H1.free_rank == 1 and H1.torsion == ()
    assert H1.describe() == "Z"
    assert not C.is_p_acyclic(2) and not C.is_p_acyclic(3)


def test_sphere_homology():
    C = reduced_complex_from_facets(list(combinations((1, 2, 3, 4), 3)))
    assert C.homology(0).is_zero() and C.homology(1).is_zero()
    assert C.homology(2).free_rank == 1


def test_full_simplex_is_acyclic():
    C = reduced_complex_from_facets([(1, 2, 3, 4)])
    for k in C.degrees():
        assert C.homology(k).is_zero()
    assert C.is_p_acyclic(2) and C.is_p_acyclic(3) and C.is_p_acyclic(5)


def test_two_points():
    C = reduced_complex_from_facets([(1,), (2,)])
    H0 = C.homology(0)
    assert H0.free_rank == 1 and not H0.torsion


def test_empty_complex_not_acyclic():
    C = ChainComplex({-1: 1}, {})
    assert C.homology(-1).free_rank == 1
    assert not C.is_p_acyclic(2)


def test_projective_plane():
    C = reduced_complex_from_facets(RP2_FACETS)
    assert C.dim(0) == 6 and C.dim(1) == 15 and C.dim(2) == 10
    assert C.homology(0).is_zero()
    H1 = C.homology(1)
    assert H1.free_rank == 0 and H1.torsion == (2,)
    assert C.homology(2).is_zero()
    assert C.is_p_acyclic(3) and C.is_p_acyclic(5)
    assert not C.is_p_acyclic(2)
    assert C.euler_characteristic() == 0  # reduced: 1 - 6 + 15 - 10 = 0


def test_homology_generators_certified():
    C = reduced_complex_from_facets(RP2_FACETS)
    H1 = C.homology(1, want_generators=True)
    assert H1.orders == (2,)
    g = H1.generators[:, 0]
    # the generator is a cycle ...
    assert not (C.boundary(1).astype(object) @ g).any()
    # ... is not itself a boundary, but twice it is
    B = C.boundary(2)
    assert not _in_image(B, g)
    assert _in_image(B, 2 * g)


def test_free_generator_of_circle():
    C = reduced_complex_from_facets([(1, 2), (2, 3), (1, 3)])
    H1 = C.homology(1, want_generators=True)
    assert H1.orders == (0,)
    g = H1.generators[:, 0]
    assert not (C.boundary(1).astype(object) @ g).any()
    assert not _in_image(C.boundary(2), g)


def _in_image(A, b):
    """Solvability of A x = b over Z, decided through the SNF certificate."""
    res = smith_normal_form(np.asarray(A))
    c = res.U.astype(object) @ np.asarray(b, dtype=object)
    diag = res.diagonal
    for i, x in enumerate(c):
        d = diag[i] if i < len(diag) else 0
        if d == 0:
            if x != 0:
                return False
        elif x % d != 0:
            return False
    return True


def test_betti_mod_p_of_projective_plane():
    C = reduced_complex_from_facets(RP2_FACETS)
    assert C.betti_mod_p(1, 2) == 1  # Z/2 contributes in degree 1 mod 2
    assert C.betti_mod_p(2, 2) == 1  # ... and in degree 2 by universal coefficients
    assert C.betti_mod_p(1, 3) == 0


def test_p_primary_part():
    assert p_primary_part((6, 4, 9), 2) == (2, 4)
    assert p_primary_part((6, 4, 9), 3) == (3, 9)
    assert p_primary_part((5,), 2) == ()


def test_describe():
    assert HomologyGroup(2, (2, 6)).describe() == "Z^2 + Z/2 + Z/6"
    assert HomologyGroup(0, ()).describe() == "0"
