"""Chain-level equivariant cell complexes over a finite group.

A ``GCWComplex`` stores one *orbit cell* per G-orbit of cells: an isotropy
subgroup K and the boundary of a chosen representative, written as a formal
integer combination of pairs (group element g, lower orbit cell).  The
point-level chain complex has one basis element per coset gK of each orbit
(``expand``), and the boundary of the translate g'.(representative) is the
g'-translate of the representative boundary.

Two structural checks run on every construction: the expanded complex must
satisfy boundary-of-boundary = 0, and every representative boundary must be
supported on basis elements fixed by the cell's own isotropy group (each
term gK' must satisfy g^-1 K g <= K').  The second condition is what makes
fixed subcomplexes work: the H-fixed basis elements {gK : g^-1 H g <= K}
then form a subcomplex for every subgroup H (``fixed_chain_complex``), and
it also forces the representative boundary to be isotropy-invariant.

On top of the data type sit the constructions used to certify category
bounds: Cayley one-complexes, induction from a subgroup (with optional
inflation from a quotient), greedy homology-killing cell attachment with a
semisimple splitting self-check, the per-prime staged builder ``build_X_p``
driven by the Sylow intersection lattice, the all-primes ``build_X``, the
Smith-acyclicity scan, and the fixed-point-connectivity certificate for the
upper bound.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .config import (
    DEFAULT_CONFIG,
    CapExceeded,
    InputError,
    InvariantViolation,
    RunConfig,
)
from .groups import (
    FiniteGroup,
    SubgroupSet,
    is_prime,
    left_coset_reps,
    normalizer,
    prime_factors,
    quotient_group,
    subgroup_set,
    subgroup_sort_key,
    conjugacy_orbit,
)
from .homology import ChainComplex, HomologyGroup
from .enumeration import p_subgroup_class_reps
from .sylow import PIntersectionLattice, sylow_subgroup
from .complexes import expected_fixed_connectivity


@dataclass(frozen=True)
class OrbitCell:
    """One G-orbit of cells: isotropy plus the representative's boundary.

    ``boundary`` is a tuple of (group element, lower orbit index, coefficient)
    terms; the referenced orbit index counts cells one dimension down.
    """

    isotropy: SubgroupSet
    boundary: Tuple[Tuple[int, int, int], ...] = ()
    provenance: str = "base"


class GCWComplex:
    """Equivariant cell complex given by orbit cells per dimension."""

    def __init__(self, group: FiniteGroup,
                 cells: Dict[int, Sequence[OrbitCell]],
                 validate: bool = True):
        self.group = group
        self.cells: Dict[int, Tuple[OrbitCell, ...]] = {
            int(k): tuple(v) for k, v in cells.items() if v}
        self._exp: Optional[_Expansion] = None
        if validate:
            self._validate()

    # -- structure -----------------------------------------------------------
    def dimensions(self) -> List[int]:
        return sorted(self.cells)

    @property
    def dimension(self) -> int:
        return max(self.cells) if self.cells else -1

    def orbit_count(self) -> int:
        return sum(len(v) for v in self.cells.values())

    def point_counts(self) -> Dict[int, int]:
        """Expanded basis size per dimension (number of actual cells)."""
        return dict(self.expansion().dims)

    def expansion(self) -> "_Expansion":
        if self._exp is None:
            self._exp = _Expansion(self)
        return self._exp

    def with_cells(self, k: int, new_cells: Sequence[OrbitCell]
                   ) -> "GCWComplex":
        """A new complex with ``new_cells`` appended in dimension k."""
        cells = {d: list(v) for d, v in self.cells.items()}
        cells.setdefault(k, []).extend(new_cells)
        return GCWComplex(self.group, cells)

    def _validate(self) -> None:
        G = self.group
        for k, cells in self.cells.items():
            if k < 0:
                raise InputError(f"cell dimension {k} is negative")
            lower = self.cells.get(k - 1, ())
            for i, cell in enumerate(cells):
                if not G.is_subgroup(cell.isotropy):
                    raise InputError(
                        f"isotropy of orbit {k}.{i} is not a subgroup")
                if k == 0 and cell.boundary:
                    raise InputError(f"0-cell orbit 0.{i} has a boundary")
                for g, j, c in cell.boundary:
                    if not 0 <= g < G.order:
                        raise InputError(
                            f"orbit {k}.{i}: element {g} out of range")
                    if not 0 <= j < len(lower):
                        raise InputError(
                            f"orbit {k}.{i}: no orbit {k - 1}.{j} below")
                    if c == 0:
                        raise InputError(
                            f"orbit {k}.{i}: zero coefficient term")
                    # the referenced coset gK' must be fixed by the isotropy
                    moved = G.conjugate_subgroup(cell.isotropy, G.inv(g))
                    if not moved <= lower[j].isotropy:
                        raise InvariantViolation(
                            f"orbit {k}.{i}: boundary term through element "
                            f"{g} lands outside the isotropy-fixed basis "
                            f"(g^-1 K g is not inside the lower isotropy)")
        self.expansion().chain_complex(check=True)

    def to_json(self) -> dict:
        out: Dict[str, list] = {}
        for k in self.dimensions():
            out[str(k)] = [{
                "id": f"{k}.{i}",
                "isotropy": sorted(c.isotropy.elements()),
                "provenance": c.provenance,
                "boundary": [[g, f"{k - 1}.{j}", coeff]
                             for g, j, coeff in c.boundary],
            } for i, c in enumerate(self.cells[k])]
        return {"schema": 1, "group": self.group.name, "cells": out}

    def __repr__(self) -> str:
        sizes = {k: len(v) for k, v in sorted(self.cells.items())}
        return f"GCWComplex({self.group.name}, orbits={sizes})"


class _Expansion:
    """Point-level basis bookkeeping for a GCWComplex.

    Per dimension: one basis element per coset of each orbit cell, ordered
    orbit by orbit with each orbit's cosets in minimal-representative order.
    """

    def __init__(self, X: GCWComplex):
        self.X = X
        G = X.group
        # info[k][i] = (cell, coset reps, element -> coset index, offset)
        self.info: Dict[int, list] = {}
        self.dims: Dict[int, int] = {}
        self.flat: Dict[int, List[Tuple[int, int]]] = {}  # (orbit, rep)
        for k in sorted(X.cells):
            entries, flat, off = [], [], 0
            for i, cell in enumerate(X.cells[k]):
                reps = left_coset_reps(G, cell.isotropy)
                ci = np.full(G.order, -1, dtype=np.int64)
                for t, r in enumerate(reps):
                    for h in cell.isotropy.elements():
                        ci[G.mul(r, h)] = t
                entries.append((cell, reps, ci, off))
                flat.extend((i, r) for r in reps)
                off += len(reps)
            self.info[k] = entries
            self.flat[k] = flat
            self.dims[k] = off
        self.matrices: Dict[int, np.ndarray] = {}
        for k, entries in self.info.items():
            lower = self.info.get(k - 1)
            if lower is None:
                continue
            M = np.zeros((self.dims[k - 1], self.dims[k]), dtype=np.int64)
            for cell, reps, ci, off in entries:
                for t, r in enumerate(reps):
                    for g, j, c in cell.boundary:
                        _, _, lci, loff = lower[j]
                        M[loff + int(lci[G.mul(r, g)]), off + t] += c
            self.matrices[k] = M

    def labels(self) -> Dict[int, List[str]]:
        return {k: [f"{i}@{r}" for i, r in flat]
                for k, flat in self.flat.items()}

    def chain_complex(self, check: bool = False,
                      reduced: bool = False) -> ChainComplex:
        if check:
            for k, M in self.matrices.items():
                upper = self.matrices.get(k + 1)
                if upper is None:
                    continue
                bad = _nonzero_product_column(M, upper)
                if bad is not None:
                    orbit = self.flat[k + 1][bad][0]
                    cell = self.X.cells[k + 1][orbit]
                    raise InvariantViolation(
                        f"boundary of boundary is nonzero at orbit "
                        f"{k + 1}.{orbit} ({cell.provenance})")
        dims = dict(self.dims)
        boundaries = dict(self.matrices)
        labels = self.labels()
        if reduced:
            dims[-1] = 1
            labels[-1] = ["[]"]
            if self.dims.get(0):
                boundaries[0] = np.ones((1, self.dims[0]), dtype=np.int64)
        return ChainComplex(dims, boundaries, labels=labels, check=False)

    # -- fixed points ---------------------------------------------------------
    def fixed_indices(self, k: int, H: SubgroupSet) -> List[int]:
        """Basis indices in dimension k fixed by H (g^-1 H g inside K)."""
        G = self.X.group
        out = []
        for idx, (i, r) in enumerate(self.flat.get(k, [])):
            K = self.X.cells[k][i].isotropy
            if G.conjugate_subgroup(H, G.inv(r)) <= K:
                out.append(idx)
        return out

    def fixed_complex(self, H: SubgroupSet, reduced: bool = False
                      ) -> Tuple[ChainComplex, Dict[int, List[int]]]:
        fixed = {k: self.fixed_indices(k, H) for k in self.info}
        dims = {k: len(v) for k, v in fixed.items() if v}
        boundaries: Dict[int, np.ndarray] = {}
        all_labels = self.labels()
        labels = {k: [all_labels[k][i] for i in v]
                  for k, v in fixed.items() if v}
        for k, M in self.matrices.items():
            cols = fixed.get(k, [])
            if not cols:
                continue
            rows = fixed.get(k - 1, [])
            sub = M[:, cols]
            mask = np.ones(M.shape[0], dtype=bool)
            mask[rows] = False
            if np.any(sub[mask]):
                raise InvariantViolation(
                    f"boundary leaves the fixed basis of a subgroup of "
                    f"order {H.size} in dimension {k}")
            if rows:
                boundaries[k] = sub[~mask]
        if reduced:
            dims[-1] = 1
            labels[-1] = ["[]"]
            if dims.get(0):
                boundaries[0] = np.ones((1, dims[0]), dtype=np.int64)
        return ChainComplex(dims, boundaries, labels=labels,
                            check=False), fixed

    # -- translation action ----------------------------------------------------
    def act_index(self, k: int, w: int, idx: int) -> int:
        """Index of w . (basis element idx) in dimension k."""
        G = self.X.group
        i, r = self.flat[k][idx]
        _, _, ci, off = self.info[k][i]
        return off + int(ci[G.mul(w, r)])

    def fixed_permutation(self, k: int, fixed: List[int],
                          w: int) -> np.ndarray:
        """Permutation of the fixed basis induced by translation by w."""
        pos = {g: i for i, g in enumerate(fixed)}
        perm = np.empty(len(fixed), dtype=np.int64)
        for i, g in enumerate(fixed):
            target = self.act_index(k, w, g)
            if target not in pos:
                raise InvariantViolation(
                    "translation moved a fixed basis element off the "
                    "fixed basis")
            perm[i] = pos[target]
        return perm


def _nonzero_product_column(A: np.ndarray, B: np.ndarray) -> Optional[int]:
    """Column index where A @ B is nonzero, or None (exact arithmetic)."""
    if A.size == 0 or B.size == 0:
        return None
    bound = int(np.abs(A).max()) * int(np.abs(B).max()) * A.shape[1]
    if bound < 2**62:
        P = A @ B
    else:
        P = A.astype(object) @ B.astype(object)
    cols = np.nonzero(P)[1]
    return int(cols[0]) if cols.size else None


def expand(X: GCWComplex, check: bool = True,
           reduced: bool = False) -> ChainComplex:
    """Point-level chain complex: one basis element per coset per orbit."""
    return X.expansion().chain_complex(check=check, reduced=reduced)


def fixed_chain_complex(X: GCWComplex, H: SubgroupSet,
                        reduced: bool = False) -> ChainComplex:
    """Cellular chain complex of the H-fixed subcomplex.

    The fixed basis in each dimension is {gK : g^-1 H g <= K}; the
    representative-boundary support condition guarantees the boundary
    restricts (checked, with an error if it does not).
    """
    if not X.group.is_subgroup(H):
        raise InputError("H is not a subgroup")
    cc, _ = X.expansion().fixed_complex(H, reduced=reduced)
    return cc


# ---------------------------------------------------------------------------
# basic constructions


def cayley_one_complex(K: FiniteGroup) -> GCWComplex:
    """Connected free 1-complex: the Cayley graph on the full generator set.

    One free vertex orbit; one free edge orbit per non-identity element k,
    the representative edge running from the identity vertex to the vertex
    k (boundary k.v - v).  For the trivial group this is a single vertex.
    """
    trivial = K.trivial_set()
    cells: Dict[int, List[OrbitCell]] = {
        0: [OrbitCell(trivial, (), "base")]}
    if K.order > 1:
        cells[1] = [OrbitCell(trivial, ((k, 0, 1), (0, 0, -1)), "base")
                    for k in range(1, K.order)]
    X = GCWComplex(K, cells)
    if X.dimension > 1:
        raise InvariantViolation("Cayley one-complex exceeded dimension 1")
    if not expand(X, check=False, reduced=True).homology(0).is_zero():
        raise InvariantViolation("Cayley one-complex is not connected")
    return X


def subgroup_group(G: FiniteGroup, S: SubgroupSet
                   ) -> Tuple[FiniteGroup, List[int]]:
    """The subgroup S as a standalone group, plus its element embedding.

    Elements are sorted ascending, so the identity keeps index 0; the
    returned list maps new indices back to elements of G.
    """
    if not G.is_subgroup(S):
        raise InputError("S is not a subgroup")
    elems = sorted(S.elements())
    index = {g: i for i, g in enumerate(elems)}
    table = np.empty((S.size, S.size), dtype=np.int32)
    for i, a in enumerate(elems):
        for j, b in enumerate(elems):
            table[i, j] = index[G.mul(a, b)]
    grp = FiniteGroup(table, labels=[G.labels[g] for g in elems],
                      name=f"{G.name}[{S.size}]", validated=True)
    return grp, elems


def inflate(N: FiniteGroup, P: SubgroupSet, X_Q: GCWComplex) -> GCWComplex:
    """Pull a complex over the quotient N/P back to N.

    Isotropy groups become their preimages; boundary elements are lifted
    through the minimal-index section of the projection.
    """
    Q, proj = quotient_group(N, P)
    if (X_Q.group.order != Q.order
            or not np.array_equal(X_Q.group.table, Q.table)):
        raise InputError("complex is not over the quotient group N/P")
    section = [-1] * Q.order
    for n in range(N.order - 1, -1, -1):
        section[proj[n]] = n
    preimage = {}
    cells: Dict[int, List[OrbitCell]] = {}
    for k, orbit_cells in X_Q.cells.items():
        lifted = []
        for cell in orbit_cells:
            key = cell.isotropy.mask
            if key not in preimage:
                members = [n for n in range(N.order)
                           if proj[n] in cell.isotropy]
                preimage[key] = subgroup_set(members, N.order)
            boundary = tuple((section[g], j, c) for g, j, c in cell.boundary)
            lifted.append(OrbitCell(preimage[key], boundary, cell.provenance))
        cells[k] = lifted
    return GCWComplex(N, cells)


def induce(G: FiniteGroup, H: SubgroupSet, X_H: GCWComplex) -> GCWComplex:
    """G x_H X: re-express a complex over the subgroup H as one over G.

    ``X_H`` must be a complex over ``subgroup_group(G, H)``.  Cell lists are
    unchanged; isotropy and boundary elements are transported through the
    embedding, so point-level basis sizes multiply by [G:H].
    """
    grp, embed = subgroup_group(G, H)
    if (X_H.group.order != grp.order
            or not np.array_equal(X_H.group.table, grp.table)):
        raise InputError("complex is not over the given subgroup")
    cells: Dict[int, List[OrbitCell]] = {}
    for k, orbit_cells in X_H.cells.items():
        moved = []
        for cell in orbit_cells:
            iso = subgroup_set((embed[s] for s in cell.isotropy.elements()),
                               G.order)
            boundary = tuple((embed[g], j, c) for g, j, c in cell.boundary)
            moved.append(OrbitCell(iso, boundary, cell.provenance))
        cells[k] = moved
    return GCWComplex(G, cells)


def disjoint_union(parts: Sequence[GCWComplex]) -> GCWComplex:
    """Disjoint union over a common group (orbit lists concatenated)."""
    if not parts:
        raise InputError("need at least one complex")
    G = parts[0].group
    cells: Dict[int, List[OrbitCell]] = {}
    for part in parts:
        if part.group is not G and not np.array_equal(part.group.table,
                                                      G.table):
            raise InputError("disjoint union across different groups")
        snap = {d: len(v) for d, v in cells.items()}
        for k, orbit_cells in sorted(part.cells.items()):
            shift = snap.get(k - 1, 0)
            cells.setdefault(k, []).extend(
                OrbitCell(c.isotropy,
                          tuple((g, j + shift, co) for g, j, co in c.boundary),
                          c.provenance)
                for c in orbit_cells)
    return GCWComplex(G, cells)


# ---------------------------------------------------------------------------
# mod-p linear algebra helpers (small exact solvers)


def _rref_mod_p(A: np.ndarray, p: int) -> Tuple[np.ndarray, List[int]]:
    """Row-reduced echelon form over F_p with its pivot columns."""
    B = (np.array(A, dtype=np.int64, copy=True)) % p
    m, n = B.shape
    pivots: List[int] = []
    r = 0
    for c in range(n):
        if r == m:
            break
        live = np.nonzero(B[r:, c])[0]
        if live.size == 0:
            continue
        i = r + int(live[0])
        if i != r:
            B[[r, i]] = B[[i, r]]
        B[r] = (B[r] * pow(int(B[r, c]), -1, p)) % p
        col = B[:, c].copy()
        col[r] = 0
        B = (B - np.outer(col, B[r])) % p
        pivots.append(c)
        r += 1
    return B, pivots


def _solve_mod_p(A: np.ndarray, B: np.ndarray, p: int
                 ) -> Optional[np.ndarray]:
    """One solution X of A X = B over F_p (free variables zero), or None."""
    A = np.asarray(A, dtype=np.int64) % p
    B = np.asarray(B, dtype=np.int64) % p
    single = B.ndim == 1
    if single:
        B = B[:, None]
    m, n = A.shape
    R, pivots = _rref_mod_p(np.hstack([A, B]), p)
    X = np.zeros((n, B.shape[1]), dtype=np.int64)
    for r, c in enumerate(pivots):
        if c >= n:
            return None  # pivot in the augmented block: inconsistent
        X[c] = R[r, n:]
    return X[:, 0] if single else X


def _column_basis_mod_p(A: np.ndarray, p: int) -> np.ndarray:
    """Columns of A forming a basis of its column space over F_p."""
    _, pivots = _rref_mod_p(A, p)
    return (np.asarray(A, dtype=np.int64) % p)[:, pivots]


# ---------------------------------------------------------------------------
# homology killing


@dataclass
class AttachOutcome:
    """Result of a killing pass: the new complex plus what survived."""

    complex: GCWComplex
    attached: Dict[int, int]            # dimension -> orbit cells added
    residual: Dict[int, str]            # degree -> surviving homology
    @property
    def acyclic(self) -> bool:
        return not self.residual


def _selected_generators(hom: HomologyGroup, p: Optional[int]) -> List[int]:
    """Generator columns relevant to the chosen coefficients.

    Integrally everything matters; over F_p only free generators and
    torsion of order divisible by p survive the coefficient change.
    """
    if p is None:
        return list(range(len(hom.orders)))
    return [i for i, d in enumerate(hom.orders) if d == 0 or d % p == 0]


def attach_cells_to_kill(X: GCWComplex, coefficients: Optional[int],
                         target_dim_cap: int,
                         isotropy: Optional[SubgroupSet] = None,
                         provenance: str = "attached",
                         config: RunConfig = DEFAULT_CONFIG) -> AttachOutcome:
    """Greedily attach orbit cells killing homology of the fixed subcomplex.

    Works degree by degree from the bottom (including the reduced degree -1:
    an empty fixed set is cured by a 0-cell orbit).  In each degree the
    integral homology generators relevant to ``coefficients`` (a prime p for
    F_p, None for integral) become representative boundaries of new orbit
    cells with the given isotropy; using integral generator cycles keeps the
    expanded complex exact while killing exactly the F_p classes.  When the
    acting group N(H)/H has order prime to p, the free cover of the homology
    module must split; the splitting is solved explicitly (averaging) and
    verified, as a self-check of the equivariant structure.

    Stops at ``target_dim_cap``: no cell of larger dimension is attached,
    and whatever homology survives is reported in ``residual`` rather than
    raised.
    """
    G = X.group
    H = isotropy if isotropy is not None else G.trivial_set()
    if not G.is_subgroup(H):
        raise InputError("isotropy is not a subgroup")
    p = coefficients
    if p is not None and not is_prime(p):
        raise InputError(f"coefficients must be a prime or None, got {p}")
    N = normalizer(G, H)
    semisimple = p is not None and (N.size // H.size) % p != 0
    current = X
    attached: Dict[int, int] = {}
    k = -1
    while k + 1 <= target_dim_cap:
        exp = current.expansion()
        F, fixed = exp.fixed_complex(H, reduced=True)
        if p is not None and F.betti_mod_p(k, p) == 0:
            # rank-only test; lower degrees are already clean over F_p, so
            # a zero Betti number means nothing survives to kill here
            k += 1
            continue
        hom = F.homology(k, want_generators=True, config=config)
        take = _selected_generators(hom, p)
        if not take:
            k += 1
            continue
        if k == -1:
            # empty fixed set: a single 0-cell orbit makes it nonempty
            new_cells = [OrbitCell(H, (), provenance)]
        else:
            if semisimple:
                _maschke_splitting_check(
                    exp, fixed, F, k, H, N, p,
                    hom.generators[:, take], config)
            new_cells = []
            for col in take:
                chain = hom.generators[:, col]
                terms = []
                for pos in np.nonzero(chain)[0]:
                    orbit, rep = exp.flat[k][fixed[k][int(pos)]]
                    terms.append((rep, orbit, int(chain[pos])))
                new_cells.append(OrbitCell(H, tuple(terms), provenance))
        current = current.with_cells(k + 1, new_cells)
        attached[k + 1] = attached.get(k + 1, 0) + len(new_cells)
        # do not advance: re-check the same degree until it is clean
    F, _ = current.expansion().fixed_complex(H, reduced=True)
    residual: Dict[int, str] = {}
    for deg in F.degrees():
        if p is not None:
            betti = F.betti_mod_p(deg, p)
            if betti:
                residual[deg] = f"F_{p}^{betti}"
        else:
            group = F.homology(deg, config=config)
            if not group.is_zero():
                residual[deg] = group.describe()
    return AttachOutcome(current, attached, residual)


def _maschke_splitting_check(exp: _Expansion, fixed: Dict[int, List[int]],
                             F: ChainComplex, k: int, H: SubgroupSet,
                             N: SubgroupSet, p: int, gens: np.ndarray,
                             config: RunConfig) -> None:
    """Verify the free cover of H_k(X^H; F_p) splits W-equivariantly.

    W = N(H)/H acts on the fixed basis (H itself acts trivially there), so
    the homology is an F_p[W]-module M.  The generator classes give a
    surjection phi from a free module; since p does not divide |W| the
    averaged right inverse must be an equivariant splitting.  Solvability is
    a theorem, so any failure here exposes a defect in the complex.
    """
    G = exp.X.group
    w_reps = [g for g in left_coset_reps(G, H) if g in N]
    wn = len(w_reps)
    if wn == 1 or gens.shape[1] == 0:
        return
    rep_index = {}
    for idx, w in enumerate(w_reps):
        for h in H.elements():
            rep_index[G.mul(w, h)] = idx
    fx = fixed[k]
    r = gens.shape[1]
    Z = np.array(gens % p, dtype=np.int64)
    image = _column_basis_mod_p(F.boundary(k + 1), p)
    b = image.shape[1]
    A = np.hstack([image, Z]) % p
    _, pivots = _rref_mod_p(A, p)
    if len(pivots) != b + r:
        raise InvariantViolation(
            "selected generators are dependent modulo boundaries")

    def coords(cycles: np.ndarray) -> np.ndarray:
        sol = _solve_mod_p(A, cycles, p)
        if sol is None:
            raise InvariantViolation("translated generator is not a cycle")
        return sol[b:, :] % p

    rho: Dict[int, np.ndarray] = {}
    for w in w_reps:
        perm = exp.fixed_permutation(k, fx, w)
        moved = np.zeros_like(Z)
        moved[perm] = Z
        rho[w] = coords(moved)
    phi = np.zeros((r, r * wn), dtype=np.int64)
    for i in range(r):
        for m, w in enumerate(w_reps):
            phi[:, i * wn + m] = rho[w][:, i]
    sigma0 = _solve_mod_p(phi, np.eye(r, dtype=np.int64), p)
    if sigma0 is None:
        raise InvariantViolation("free cover fails to surject onto homology")
    sigma = np.zeros((r * wn, r), dtype=np.int64)
    for w in w_reps:
        w_inv = w_reps[rep_index[G.inv(w)]]
        permuted = np.zeros_like(sigma0)
        for i in range(r):
            for m, wm in enumerate(w_reps):
                target = rep_index[G.mul(w, wm)]
                permuted[i * wn + target] = sigma0[i * wn + m]
        sigma = (sigma + permuted @ rho[w_inv]) % p
    sigma = (sigma * pow(wn % p, -1, p)) % p
    if not np.array_equal((phi @ sigma) % p, np.eye(r, dtype=np.int64) % p):
        raise InvariantViolation(
            "averaged splitting failed verification (Maschke case)")


# ---------------------------------------------------------------------------
# staged builders


@dataclass
class BuildResult:
    """A built complex plus the audit trail of its stages and checks."""

    group_id: str
    p: Optional[int]
    complex: GCWComplex
    stages: List[dict] = field(default_factory=list)
    residual: List[dict] = field(default_factory=list)
    checks: List[dict] = field(default_factory=list)

    @property
    def fully_acyclic(self) -> bool:
        return not self.residual

    def to_json(self) -> dict:
        return {
            "schema": 1,
            "group": self.group_id,
            "p": self.p,
            "orbit_cells": {str(k): len(v)
                            for k, v in sorted(self.complex.cells.items())},
            "stages": self.stages,
            "residual": self.residual,
            "checks": self.checks,
        }


def _is_prime_power(n: int) -> bool:
    return len(prime_factors(n)) == 1


def _restrict_to(sub_elems: List[int], S: SubgroupSet) -> SubgroupSet:
    """Re-express a subgroup contained in ``sub_elems`` in local indices."""
    index = {g: i for i, g in enumerate(sub_elems)}
    return subgroup_set((index[g] for g in S.elements()), len(sub_elems))


def _conjugacy_class_reps(G: FiniteGroup,
                          nodes: List[SubgroupSet]) -> List[SubgroupSet]:
    reps: List[SubgroupSet] = []
    seen: set = set()
    for H in sorted(nodes, key=subgroup_sort_key):
        if H.mask in seen:
            continue
        orbit = conjugacy_orbit(G, H)
        seen.update(s.mask for s in orbit)
        reps.append(orbit[0])
    return reps


def build_X_p(G: FiniteGroup, p: int,
              config: RunConfig = DEFAULT_CONFIG) -> BuildResult:
    """Staged one-prime construction driven by the intersection lattice.

    Stage 0 induces the Cayley one-complex of N(P)/P up to G (cells acquire
    isotropy P).  Stage d then walks the conjugacy classes of depth-d
    intersection nodes H and kills the mod-p homology of the H-fixed
    subcomplex by attaching orbit cells with isotropy H and dimension at
    most d+1.  Attaching at depth d cannot disturb the fixed subcomplex of
    any node of smaller depth (strict antitonicity of depth under
    containment), which is what makes the stages cumulative.

    After the last stage, the fixed subcomplex of every nontrivial
    p-subgroup class representative must be p-acyclic; a failure raises
    with the offending subgroup.  Residual homology at a trivial-isotropy
    stage (Sylow subgroups intersecting trivially) is reported, not raised:
    only nontrivial subgroups enter the acyclicity contract.
    """
    if _is_prime_power(G.order):
        raise InputError("construction requires non-prime-power order")
    if not is_prime(p) or G.order % p != 0:
        raise InputError(f"{p} is not a prime divisor of the order")
    lat = PIntersectionLattice(G, p, config)
    P = sylow_subgroup(G, p)
    N = normalizer(G, P)
    Ngrp, embed = subgroup_group(G, N)
    W, _ = quotient_group(Ngrp, _restrict_to(embed, P))
    X = induce(G, N, inflate(Ngrp, _restrict_to(embed, P),
                             cayley_one_complex(W)))
    result = BuildResult(group_id=G.name, p=p, complex=X)
    result.stages.append({
        "stage": 0,
        "weyl_order": W.order,
        "orbit_cells": X.orbit_count(),
        "points": X.point_counts(),
    })
    for d in range(1, lat.d_p + 1):
        stage = {"stage": d, "classes": []}
        for Hnode in _conjugacy_class_reps(G, lat.nodes_at_depth(d)):
            outcome = attach_cells_to_kill(
                X, coefficients=p, target_dim_cap=d + 1, isotropy=Hnode,
                provenance=f"attached-at-stage-{d}", config=config)
            X = outcome.complex
            entry = {
                "isotropy_order": Hnode.size,
                "attached": dict(outcome.attached),
                "residual": {str(k): v for k, v in outcome.residual.items()},
            }
            stage["classes"].append(entry)
            if outcome.residual:
                if Hnode.size > 1:
                    raise InvariantViolation(
                        f"p-acyclicity unreachable for the depth-{d} "
                        f"subgroup of order {Hnode.size} "
                        f"(elements {sorted(Hnode.elements())}): residual "
                        f"{outcome.residual} within dimension {d + 1}")
                for deg, desc in outcome.residual.items():
                    result.residual.append({
                        "stage": d, "isotropy_order": 1,
                        "degree": deg, "homology": desc})
        result.stages.append(stage)
    if X.dimension > lat.d_p + 1:
        raise InvariantViolation(
            f"dimension {X.dimension} exceeds d_p+1 = {lat.d_p + 1}")
    for rep in p_subgroup_class_reps(G, p, P):
        depth = lat.subgroup_depth(rep)
        acyclic = fixed_chain_complex(X, rep, reduced=True).is_p_acyclic(p)
        result.checks.append({
            "subgroup_order": rep.size,
            "depth": depth,
            "p_acyclic": acyclic,
        })
        if not acyclic:
            raise InvariantViolation(
                f"fixed subcomplex of the order-{rep.size} subgroup "
                f"(elements {sorted(rep.elements())}, depth {depth}) "
                f"is not {p}-acyclic")
    result.complex = X
    return result


def build_X(G: FiniteGroup, config: RunConfig = DEFAULT_CONFIG) -> BuildResult:
    """Disjoint union of the per-prime complexes plus an integral patch-up.

    Nontrivial p-subgroups act without fixed points on every other prime's
    component (their isotropy groups are q-groups), which is checked; the
    union is then Smith-acyclicity-checked, and free cells are attached
    integrally up to dimension max_p d_p + 3.  Residual integral homology
    at the cap is reported in the result, not raised.
    """
    if _is_prime_power(G.order):
        raise InputError("construction requires non-prime-power order")
    primes = sorted(prime_factors(G.order))
    parts: Dict[int, BuildResult] = {}
    for p in primes:
        parts[p] = build_X_p(G, p, config)
    for p in primes:
        for q in primes:
            if p == q:
                continue
            for rep in p_subgroup_class_reps(G, p, sylow_subgroup(G, p)):
                fc = fixed_chain_complex(parts[q].complex, rep)
                if fc.dims:
                    raise InvariantViolation(
                        f"an order-{rep.size} {p}-subgroup has fixed points "
                        f"on the {q}-component")
    X = disjoint_union([parts[p].complex for p in primes])
    result = BuildResult(group_id=G.name, p=None, complex=X)
    for p in primes:
        result.stages.append({"prime": p, "stages": parts[p].stages})
        result.residual.extend(
            dict(entry, prime=p) for entry in parts[p].residual)
        result.checks.extend(
            dict(entry, prime=p) for entry in parts[p].checks)
    smith = smith_acyclicity_check(X, config)
    result.checks.append({"smith_acyclic": smith.ok,
                          "witnesses": smith.witnesses})
    if not smith.ok:
        raise InvariantViolation(
            f"union of per-prime complexes is not Smith acyclic: "
            f"{smith.witnesses}")
    cap = max(PIntersectionLattice(G, p, config).d_p for p in primes) + 3
    outcome = attach_cells_to_kill(X, coefficients=None, target_dim_cap=cap,
                                   provenance="attached-integral",
                                   config=config)
    result.complex = outcome.complex
    result.stages.append({"integral_cap": cap,
                          "attached": dict(outcome.attached)})
    for deg, desc in outcome.residual.items():
        result.residual.append({"stage": "integral", "isotropy_order": 1,
                                "degree": deg, "homology": desc})
    return result


# ---------------------------------------------------------------------------
# acyclicity scanning and the upper-bound certificate


@dataclass
class SmithReport:
    """Outcome of the all-primes fixed-point acyclicity scan."""

    ok: bool
    witnesses: List[dict] = field(default_factory=list)

    def __bool__(self) -> bool:
        return self.ok


def smith_acyclicity_check(X: GCWComplex,
                           config: RunConfig = DEFAULT_CONFIG) -> SmithReport:
    """For every prime p and nontrivial p-subgroup class: X^P is p-acyclic.

    Representatives come from the Sylow-subgroup enumeration (every
    p-subgroup is conjugate into the Sylow).  An empty fixed set is not
    p-acyclic and is reported as a witness.
    """
    G = X.group
    witnesses: List[dict] = []
    for p in sorted(prime_factors(G.order)):
        for rep in p_subgroup_class_reps(G, p, sylow_subgroup(G, p)):
            fc = fixed_chain_complex(X, rep, reduced=True)
            if not fc.is_p_acyclic(p):
                witnesses.append({
                    "p": p,
                    "subgroup_order": rep.size,
                    "elements": sorted(rep.elements()),
                })
    return SmithReport(ok=not witnesses, witnesses=witnesses)


def certificate_from_complex(G: FiniteGroup, X: GCWComplex,
                             config: RunConfig = DEFAULT_CONFIG) -> int:
    """Least n so every cell's extension step is unobstructed over Delta_n.

    A cell of dimension k with isotropy K needs the K-fixed points of the
    n-skeleton simplex on G to be (k-1)-connected; their connectivity is
    floor((n+1)/|K|) - 2 (or infinite once the fixed model is a full
    simplex), so the per-cell threshold is n >= |K| * min(k+1, [G:K]) - 1.
    """
    if not X.cells:
        raise InputError("cannot certify an empty complex")
    need = 0
    for k, cells in X.cells.items():
        for cell in cells:
            index = G.order // cell.isotropy.size
            need = max(need,
                       cell.isotropy.size * min(k + 1, index) - 1)
    for k, cells in X.cells.items():
        for cell in cells:
            if expected_fixed_connectivity(G, cell.isotropy, need) < k - 1:
                raise InvariantViolation(
                    f"certificate n={need} leaves a dimension-{k} cell "
                    f"obstructed")
    if need > 0:
        tight = any(
            expected_fixed_connectivity(G, cell.isotropy, need - 1) < k - 1
            for k, cells in X.cells.items() for cell in cells)
        if not tight:
            raise InvariantViolation(f"certificate n={need} is not minimal")
    return need


def certified_upper_bound(G: FiniteGroup,
                          config: RunConfig = DEFAULT_CONFIG
                          ) -> Tuple[Optional[int], str]:
    """Map-existence certificate: acat(G) <= n, or why none was produced.

    Requires the full construction to come out acyclic (integrally and in
    the Smith sense); the certificate is then the least skeleton dimension
    with all equivariant extension steps unobstructed, and must come in at
    or below 3q-1 for q the largest prime-power divisor.
    """
    try:
        built = build_X(G, config)
    except (InvariantViolation, CapExceeded) as exc:
        return None, f"construction failed: {exc}"
    if built.residual:
        degrees = sorted({str(e["degree"]) for e in built.residual})
        return None, ("no certificate: residual homology in degrees "
                      + ", ".join(degrees))
    n = certificate_from_complex(G, built.complex, config)
    from .bounds import largest_prime_power_divisor
    q = largest_prime_power_divisor(G.order)
    if n > 3 * q - 1:
        raise InvariantViolation(
            f"certificate {n} exceeds the guaranteed bound 3q-1 = {3 * q - 1}")
    return n, "certified"
