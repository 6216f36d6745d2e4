"""Simplex skeletons, translation actions, and fixed-point models.

The ambient object is the n-skeleton of the full simplex on the elements of
a group G, with G acting by right translation on vertices.  A subgroup H
fixes no vertex (the action is free), so the fixed points of the realization
are modeled combinatorially by the poset of H-invariant faces: a face is
H-invariant exactly when it is a union of left cosets gH, hence a union of
at most floor((n+1)/|H|) of them.  That poset is isomorphic to the face
poset of the floor((n+1)/|H|)-1 skeleton of the full simplex on the coset
space, which is what ``fixed_point_model`` returns.

Connectivity here always means homological connectivity: the largest c such
that every reduced homology group in degrees <= c vanishes (-2 for the empty
complex, -1 for a disconnected one, math.inf when all reduced homology
vanishes, e.g. for a full simplex).
"""

from __future__ import annotations

import math
from itertools import combinations
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from .config import (
    DEFAULT_CONFIG,
    CapExceeded,
    InputError,
    InvariantViolation,
    RunConfig,
    VerificationFailure,
)
from .groups import FiniteGroup, SubgroupSet, left_coset_reps, normalizer
from .homology import ChainComplex, HomologyGroup, smith_diagonal

Face = Tuple[int, ...]


def _canon(face: Iterable[int]) -> Face:
    t = tuple(sorted(set(face)))
    if not t:
        raise InputError("faces must be nonempty")
    return t


class SimplicialComplex:
    """Finite abstract simplicial complex on integer vertices.

    ``faces`` may be any iterable of faces; unless ``closed=True`` the
    downward closure is taken (every nonempty subset of a face is a face).
    """

    def __init__(self, faces: Iterable[Iterable[int]], closed: bool = False,
                 config: RunConfig = DEFAULT_CONFIG):
        seen = set()
        for f in faces:
            t = _canon(f)
            if closed:
                seen.add(t)
                continue
            if len(t) > 30:
                raise CapExceeded("face_cap", config.face_cap, 2 ** len(t) - 1,
                                  "closure of a single face is too large")
            for k in range(1, len(t) + 1):
                seen.update(combinations(t, k))
            if len(seen) > config.face_cap:
                raise CapExceeded("face_cap", config.face_cap, len(seen))
        if len(seen) > config.face_cap:
            raise CapExceeded("face_cap", config.face_cap, len(seen))
        self._by_dim: Dict[int, List[Face]] = {}
        for t in seen:
            self._by_dim.setdefault(len(t) - 1, []).append(t)
        for k in self._by_dim:
            self._by_dim[k].sort()
        self._face_set = seen

    # -- structure ----------------------------------------------------------
    @property
    def dim(self) -> int:
        return max(self._by_dim) if self._by_dim else -1

    @property
    def vertices(self) -> List[int]:
        return [f[0] for f in self._by_dim.get(0, [])]

    @property
    def num_faces(self) -> int:
        return len(self._face_set)

    def faces(self, k: int) -> List[Face]:
        return list(self._by_dim.get(k, []))

    def all_faces(self) -> List[Face]:
        out: List[Face] = []
        for k in sorted(self._by_dim):
            out.extend(self._by_dim[k])
        return out

    def has_face(self, face: Iterable[int]) -> bool:
        return _canon(face) in self._face_set

    def f_vector(self) -> List[int]:
        return [len(self._by_dim.get(k, [])) for k in range(self.dim + 1)]

    def euler_characteristic(self) -> int:
        return sum((-1) ** k * n for k, n in enumerate(self.f_vector()))

    def is_full_simplex(self) -> bool:
        v = len(self.vertices)
        return v > 0 and self.num_faces == 2 ** v - 1

    # -- topology -------------------------------------------------------------
    def components(self) -> List[List[int]]:
        """Connected components as sorted vertex lists (union-find on edges)."""
        parent = {v: v for v in self.vertices}

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for a, b in self._by_dim.get(1, []):
            ra, rb = find(a), find(b)
            if ra != rb:
                parent[ra] = rb
        groups: Dict[int, List[int]] = {}
        for v in self.vertices:
            groups.setdefault(find(v), []).append(v)
        return sorted(sorted(g) for g in groups.values())

    def chain_complex(self, reduced: bool = True) -> ChainComplex:
        dims = {k: len(v) for k, v in self._by_dim.items()}
        labels: Dict[int, List[str]] = {
            k: [str(list(f)) for f in v] for k, v in self._by_dim.items()}
        boundaries: Dict[int, np.ndarray] = {}
        for k in sorted(self._by_dim):
            if k == 0:
                continue
            rows = {f: i for i, f in enumerate(self._by_dim[k - 1])}
            M = np.zeros((dims[k - 1], dims[k]), dtype=np.int64)
            for c, f in enumerate(self._by_dim[k]):
                for pos in range(len(f)):
                    M[rows[f[:pos] + f[pos + 1:]], c] = (-1) ** pos
            boundaries[k] = M
        if reduced:
            dims[-1] = 1
            labels[-1] = ["[]"]
            if 0 in self._by_dim:
                boundaries[0] = np.ones((1, dims[0]), dtype=np.int64)
        return ChainComplex(dims, boundaries, labels=labels, check=False)

    def reduced_homology(self, k: int,
                         config: RunConfig = DEFAULT_CONFIG) -> HomologyGroup:
        return self.chain_complex(reduced=True).homology(k, config=config)

    def connectivity(self, config: RunConfig = DEFAULT_CONFIG):
        """Homological connectivity (see module docstring for conventions)."""
        if self.num_faces == 0:
            return -2
        if self.is_full_simplex():
            return math.inf
        C = self.chain_complex(reduced=True)
        # H_k = Z^(dim_k - rank d_k - rank d_{k+1}) + torsion of d_{k+1},
        # so the invariant factors of each boundary matrix suffice
        factors = {}

        def invariants(k: int):
            if k not in factors:
                factors[k] = smith_diagonal(C.boundary(k), config)
            return factors[k]

        for k in range(0, self.dim + 1):
            free = C.dim(k) - len(invariants(k)) - len(invariants(k + 1))
            if free or any(d != 1 for d in invariants(k + 1)):
                return k - 1
        return math.inf

    def __repr__(self) -> str:
        return f"SimplicialComplex(f={self.f_vector()})"


def empty_complex() -> SimplicialComplex:
    return SimplicialComplex([], closed=True)


def full_skeleton(vertices, n: int,
                  config: RunConfig = DEFAULT_CONFIG) -> SimplicialComplex:
    """n-skeleton of the full simplex: all faces on <= n+1 of the vertices.

    ``vertices`` is a vertex list or a count m (meaning 0..m-1).  The face
    count is checked against the cap before anything is generated.
    """
    if isinstance(vertices, int):
        vertices = range(vertices)
    verts = sorted(set(vertices))
    m = len(verts)
    if n < -1:
        raise InputError(f"skeleton dimension {n} out of range")
    total = sum(math.comb(m, k) for k in range(1, min(n + 1, m) + 1))
    if total > config.face_cap:
        raise CapExceeded("face_cap", config.face_cap, total,
                          f"{m} vertices in dimension {n}")
    faces: List[Face] = []
    for k in range(1, min(n + 1, m) + 1):
        faces.extend(combinations(verts, k))
    return SimplicialComplex(faces, closed=True, config=config)


def group_skeleton(G: FiniteGroup, n: int,
                   config: RunConfig = DEFAULT_CONFIG) -> SimplicialComplex:
    """n-skeleton of the full simplex on the elements of G."""
    return full_skeleton(G.order, n, config)


# ---------------------------------------------------------------------------
# translation action and invariant faces


def translate_face(G: FiniteGroup, face: Face, g: int) -> Face:
    """Right translation v -> v*g on every vertex of the face."""
    return _canon(G.mul(v, g) for v in face)


def is_invariant_face(G: FiniteGroup, H: SubgroupSet, face: Face) -> bool:
    s = set(face)
    return all(G.mul(v, h) in s for v in face for h in H.elements())


def invariant_faces(G: FiniteGroup, H: SubgroupSet, n: int,
                    config: RunConfig = DEFAULT_CONFIG) -> List[Face]:
    """All H-invariant faces of the n-skeleton on G, sorted.

    A face is invariant under right translation by H iff it is a union of
    left cosets gH; at most floor((n+1)/|H|) of them fit in a face of the
    n-skeleton.
    """
    if not G.is_subgroup(H):
        raise InputError("H is not a subgroup")
    reps = left_coset_reps(G, H)
    cosets = [tuple(sorted(G.mul(r, h) for h in H.elements())) for r in reps]
    q = (n + 1) // H.size
    total = sum(math.comb(len(cosets), k) for k in range(1, q + 1))
    if total > config.face_cap:
        raise CapExceeded("face_cap", config.face_cap, total)
    out: List[Face] = []
    for k in range(1, q + 1):
        for chosen in combinations(cosets, k):
            face: List[int] = []
            for c in chosen:
                face.extend(c)
            out.append(tuple(sorted(face)))
    out.sort()
    return out


def fixed_point_model(G: FiniteGroup, H: SubgroupSet, n: int,
                      config: RunConfig = DEFAULT_CONFIG) -> SimplicialComplex:
    """The fixed points of the H-action on the n-skeleton, as a complex.

    Returns the floor((n+1)/|H|)-1 skeleton of the full simplex on the coset
    representatives; its face poset is isomorphic to the poset of
    H-invariant faces (``verify_fixed_model`` checks that directly).
    """
    if not G.is_subgroup(H):
        raise InputError("H is not a subgroup")
    reps = left_coset_reps(G, H)
    q = (n + 1) // H.size
    return full_skeleton(reps, q - 1, config)


def verify_fixed_model(G: FiniteGroup, H: SubgroupSet, n: int,
                       config: RunConfig = DEFAULT_CONFIG,
                       with_connectivity: bool = True) -> dict:
    """Check the coset-skeleton model against the raw invariant-face poset.

    Establishes that projection (face -> its set of coset representatives)
    and expansion (representative set -> union of those cosets) are mutually
    inverse bijections between the invariant faces and the model faces.
    Both maps are monotone by construction (set image / set union), so the
    two inverse identities make them a poset isomorphism — no quadratic
    pairwise-inclusion scan is needed.  Also checks equivariance: right
    translation by each normalizer transversal element commutes with the
    projection.  Raises VerificationFailure on any defect; returns a summary.
    """
    faces = invariant_faces(G, H, n, config)
    model = fixed_point_model(G, H, n, config)
    reps = left_coset_reps(G, H)
    rep_of = {}
    coset_of = {}
    for r in reps:
        coset = tuple(sorted(G.mul(r, h) for h in H.elements()))
        coset_of[r] = coset
        for v in coset:
            rep_of[v] = r

    def project(face: Face) -> Face:
        return tuple(sorted({rep_of[v] for v in face}))

    def expand(mface: Face) -> Face:
        out: List[int] = []
        for r in mface:
            out.extend(coset_of[r])
        return tuple(sorted(out))

    image = set()
    for f in faces:
        pf = project(f)
        if not model.has_face(pf):
            raise VerificationFailure(f"projection {pf} missing from model")
        if expand(pf) != f:
            raise VerificationFailure(
                f"invariant face {f} is not the union of its cosets")
        if not is_invariant_face(G, H, f):
            raise VerificationFailure(f"face {f} is not H-invariant")
        image.add(pf)
    for mf in model.all_faces():
        if mf not in image:
            raise VerificationFailure(
                f"model face {mf} has no invariant preimage")
    if len(image) != len(faces) or len(faces) != model.num_faces:
        raise VerificationFailure(
            f"{len(faces)} invariant faces vs {model.num_faces} model faces")
    # equivariance: translating by x in N(H) then projecting agrees with
    # projecting then acting on representatives
    N = normalizer(G, H)
    transversal = [r for r in reps if r in N]
    face_set = set(faces)
    for x in transversal:
        for f in faces:
            tf = translate_face(G, f, x)
            if tf not in face_set:
                raise VerificationFailure(
                    f"translate of invariant face {f} by {x} not invariant")
            acted = tuple(sorted(rep_of[G.mul(r, x)] for r in project(f)))
            if project(tf) != acted:
                raise VerificationFailure(
                    f"projection not equivariant at face {f}, element {x}")
    return {
        "group": G.name,
        "subgroup_order": H.size,
        "n": n,
        "invariant_faces": len(faces),
        "transversal_checked": len(transversal),
        "model_f_vector": model.f_vector(),
        # the homology pass is optional: sweeps over thousands of cases
        # only need the poset isomorphism and equivariance checks
        "model_connectivity": (connectivity_label(model.connectivity(config))
                               if with_connectivity else None),
    }


def check_translation_equivariance(G: FiniteGroup, H: SubgroupSet, n: int,
                                   config: RunConfig = DEFAULT_CONFIG) -> int:
    """Translation by the normalizer permutes the invariant faces.

    For each coset of H in N(H) (one transversal element apiece) checks that
    right translation maps the invariant-face set onto itself.  Returns the
    number of transversal elements checked; raises on any defect.
    """
    faces = set(invariant_faces(G, H, n, config))
    N = normalizer(G, H)
    reps = [r for r in left_coset_reps(G, H) if r in N]
    for r in reps:
        translated = {translate_face(G, f, r) for f in faces}
        if translated != faces:
            raise VerificationFailure(
                f"translation by element {r} does not preserve "
                f"the invariant faces")
    return len(reps)


def expected_fixed_connectivity(G: FiniteGroup, H: SubgroupSet, n: int):
    """Connectivity the fixed-point model must have, from the counts alone.

    With q = floor((n+1)/|H|) cosets usable and r = [G:H] cosets total: the
    model is empty (-2) when q = 0, a full simplex (inf) when q >= r, and a
    proper skeleton with connectivity q-2 otherwise.
    """
    q = (n + 1) // H.size
    r = G.order // H.size
    if q == 0:
        return -2
    if q >= r:
        return math.inf
    return q - 2


def connectivity_label(c):
    """JSON/text rendering: full simplices and acyclic complexes get a tag."""
    return "contractible-by-fullness" if c == math.inf else int(c)
