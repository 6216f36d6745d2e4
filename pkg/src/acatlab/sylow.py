"""Sylow subgroups and the intersection-depth lattice for a prime p.

A Sylow p-subgroup is found by normalizer climbing: start from an element of
order p (Cauchy) and, while the current p-subgroup Q is smaller than the full
p-part, adjoin an element of N(Q) whose coset has order p in N(Q)/Q.  Each
step multiplies |Q| by exactly p, so the loop runs s times for |G| = p^s * m.

The p-intersection lattice is the closure of the set of Sylow p-subgroups
under pairwise intersection.  The depth of a node H is the length d of the
longest chain H = H_d < ... < H_1 = P ending in a Sylow subgroup, all links
strict containments of lattice nodes; Sylow subgroups themselves have depth 1.
d_p(G) is the maximum depth over the lattice, with d_p(G) = 0 when p does not
divide |G| (empty lattice).
"""

from __future__ import annotations

from typing import Dict, List, Optional, Tuple

from .config import DEFAULT_CONFIG, InputError, InvariantViolation, RunConfig
from .groups import (
    FiniteGroup,
    SubgroupSet,
    conjugacy_orbit,
    is_prime,
    normalizer,
    p_part,
    subgroup_closure,
    subgroup_sort_key,
)


def _coset_order(G: FiniteGroup, Q: SubgroupSet, n: int) -> int:
    """Order of the coset nQ in N/Q, i.e. least m >= 1 with n^m in Q."""
    m, x = 1, n
    while x not in Q:
        x = G.mul(x, n)
        m += 1
    return m


def sylow_subgroup(G: FiniteGroup, p: int) -> SubgroupSet:
    """One Sylow p-subgroup of G (the trivial subgroup when p does not divide |G|)."""
    if not is_prime(p):
        raise InputError(f"p={p} is not prime")
    target = p_part(G.order, p)
    if target == 1:
        return G.trivial_set()

    # Cauchy seed: power an element of order divisible by p down to order p.
    seed = None
    for g in range(1, G.order):
        k = G.element_order(g)
        if k % p == 0:
            x, e = g, k // p
            y = 0
            while e:  # y = x^e by repeated multiplication (orders are tiny)
                y = G.mul(y, x)
                e -= 1
            seed = y
            break
    if seed is None:
        raise InvariantViolation(f"no element of order divisible by {p} in {G.name}")

    Q = subgroup_closure(G, [seed])
    while Q.size < target:
        N = normalizer(G, Q)
        lifted = None
        for n in N.elements():
            if n in Q:
                continue
            m = _coset_order(G, Q, n)
            if m % p == 0:
                x, e, y = n, m // p, 0
                while e:
                    y = G.mul(y, x)
                    e -= 1
                lifted = y
                break
        if lifted is None:
            raise InvariantViolation(
                f"normalizer climb stalled at order {Q.size} (target {target})")
        grown = subgroup_closure(G, list(Q.elements()) + [lifted])
        if grown.size != Q.size * p:
            raise InvariantViolation(
                f"climb step produced order {grown.size}, expected {Q.size * p}")
        Q = grown
    return Q


def all_sylow_subgroups(G: FiniteGroup, p: int) -> List[SubgroupSet]:
    """Every Sylow p-subgroup, as the conjugacy orbit of one of them.

    The count n_p is checked against both classical constraints:
    n_p == 1 (mod p) and n_p divides |G| / p^s.
    """
    P = sylow_subgroup(G, p)
    if P.size == 1:
        return [P]
    orbit = conjugacy_orbit(G, P)
    n_p = len(orbit)
    index = G.order // P.size
    if n_p % p != 1:
        raise InvariantViolation(f"n_{p}={n_p} is not 1 mod {p}")
    if index % n_p != 0:
        raise InvariantViolation(f"n_{p}={n_p} does not divide the index {index}")
    if n_p != G.order // normalizer(G, P).size:
        raise InvariantViolation(f"n_{p}={n_p} != [G : N(P)]")
    return orbit


class PIntersectionLattice:
    """Closure of the Sylow p-subgroups under intersection, with chain depths.

    Nodes are sorted by (size, mask).  ``edges`` lists covering pairs
    (child_index, parent_index): child is a maximal proper lattice element
    below parent.  The trivial subgroup appears only when it actually arises
    as an intersection of Sylow subgroups.
    """

    def __init__(self, G: FiniteGroup, p: int, config: RunConfig = DEFAULT_CONFIG):
        self.group = G
        self.p = p
        self.config = config
        self.sylows = all_sylow_subgroups(G, p)
        if self.sylows[0].size == 1:  # p does not divide |G|
            self.sylows = []
            self.nodes: List[SubgroupSet] = []
            self.depths: Dict[int, int] = {}
            self.edges: List[Tuple[int, int]] = []
            self.d_p = 0
            return

        masks = {P.mask for P in self.sylows}
        frontier = set(masks)
        while frontier:
            fresh = set()
            for m in frontier:
                for base in list(masks):
                    inter = m & base
                    if inter not in masks and inter not in fresh:
                        fresh.add(inter)
            masks |= fresh
            frontier = fresh
        order = G.order
        from .groups import subgroup_set_from_mask
        self.nodes = sorted((subgroup_set_from_mask(m, order) for m in masks),
                            key=subgroup_sort_key)

        sylow_size = self.sylows[0].size
        by_desc = sorted(self.nodes, key=lambda s: -s.size)
        depths: Dict[int, int] = {}
        for H in by_desc:
            if H.size == sylow_size:
                depths[H.mask] = 1
            else:
                depths[H.mask] = 1 + max(depths[K.mask] for K in by_desc
                                         if H.size < K.size and H.issubset(K))
        self.depths = depths
        self.d_p = max(depths.values())
        self.edges = self._covering_edges()
        self._check_invariants()

    def _covering_edges(self) -> List[Tuple[int, int]]:
        edges = []
        for i, H in enumerate(self.nodes):
            for j, K in enumerate(self.nodes):
                if not (H.size < K.size and H.issubset(K)):
                    continue
                covered = any(H.size < M.size < K.size and H.issubset(M)
                              and M.issubset(K) for M in self.nodes)
                if not covered:
                    edges.append((i, j))
        return edges

    def _check_invariants(self) -> None:
        p = self.p
        s = 0
        size = self.sylows[0].size
        while size % p == 0:
            size //= p
            s += 1
        n_p = len(self.sylows)
        # the depth never exceeds the Sylow count; with the trivial subgroup
        # admitted as an intersection the other natural bound is s+1, attained
        # e.g. when two Sylows of order p meet trivially
        bound = min(n_p, s + 1)
        if self.d_p > bound:
            raise InvariantViolation(
                f"d_{p}={self.d_p} exceeds min(n_p, s+1)={bound}")
        if (self.d_p == 1) != (n_p == 1):
            raise InvariantViolation(
                f"d_{p}={self.d_p} inconsistent with n_p={n_p}")
        # depth is strictly antitone along containments
        for H in self.nodes:
            for K in self.nodes:
                if H.size < K.size and H.issubset(K):
                    if self.depths[H.mask] <= self.depths[K.mask]:
                        raise InvariantViolation(
                            "depth not strictly antitone along containment")
        # covering edges drop the order by a factor of at least p, and a
        # node of depth d+1 has order at most p^(s-d)
        for i, j in self.edges:
            if self.nodes[j].size % self.nodes[i].size != 0 or \
                    self.nodes[j].size // self.nodes[i].size < p:
                raise InvariantViolation(
                    "covering edge drops order by less than p")
        top = self.sylows[0].size
        for H in self.nodes:
            d = self.depths[H.mask]
            if H.size * p ** (d - 1) > top:
                raise InvariantViolation(
                    f"depth-{d} node of order {H.size} violates |H| <= p^(s-d+1)")

    def depth(self, H: SubgroupSet) -> int:
        if H.mask not in self.depths:
            raise InputError("subgroup is not a lattice node")
        return self.depths[H.mask]

    def subgroup_depth(self, K: SubgroupSet) -> int:
        """Depth of an arbitrary nontrivial p-subgroup K.

        Defined as the maximal depth of a lattice node containing K.  When K
        is itself a node this agrees with its node depth (the containing
        nodes of K include K, and depth is strictly antitone).
        """
        _require_p_subgroup(self.group, self.p, K)
        best = 0
        for N in self.nodes:
            if K.issubset(N):
                best = max(best, self.depths[N.mask])
        if best == 0:
            raise InvariantViolation(
                "p-subgroup lies in no lattice node (no Sylow contains it)")
        return best

    def unique_containing(self, K: SubgroupSet, d: int) -> SubgroupSet:
        """The unique depth-d node containing K, for K of depth exactly d.

        Uniqueness is a theorem; zero or several candidates signal a defect
        and raise.
        """
        if d != self.subgroup_depth(K):
            raise InputError(f"subgroup does not have depth {d}")
        candidates = [N for N in self.nodes
                      if K.issubset(N) and self.depths[N.mask] == d]
        if len(candidates) != 1:
            raise InvariantViolation(
                f"{len(candidates)} depth-{d} nodes contain the subgroup; "
                f"expected exactly one")
        return candidates[0]

    def node_index(self, H: SubgroupSet) -> int:
        for i, K in enumerate(self.nodes):
            if K.mask == H.mask:
                return i
        raise InputError("subgroup is not a lattice node")

    def nodes_at_depth(self, d: int) -> List[SubgroupSet]:
        return [H for H in self.nodes if self.depths[H.mask] == d]

    def report(self) -> dict:
        G = self.group
        return {
            "group": G.name,
            "order": G.order,
            "p": self.p,
            "sylow_order": self.sylows[0].size if self.sylows else 1,
            "sylow_count": len(self.sylows),
            "d_p": self.d_p,
            "nodes": [
                {
                    "index": i,
                    "order": H.size,
                    "elements": sorted(H.elements()),
                    "labels": G.label_set(H),
                    "depth": self.depths[H.mask],
                    "is_sylow": bool(self.sylows) and H.size == self.sylows[0].size,
                }
                for i, H in enumerate(self.nodes)
            ],
            "edges": [list(e) for e in self.edges],
        }


def p_intersection_lattice(G: FiniteGroup, p: int,
                           config: RunConfig = DEFAULT_CONFIG) -> PIntersectionLattice:
    return PIntersectionLattice(G, p, config)


def depth_of_p_subgroup(lattice: PIntersectionLattice, K: SubgroupSet) -> int:
    """Depth of a nontrivial p-subgroup (max depth over containing nodes)."""
    return lattice.subgroup_depth(K)


def unique_containing_intersection(lattice: PIntersectionLattice,
                                   K: SubgroupSet, d: int) -> SubgroupSet:
    """The unique depth-d p-intersection containing K (depth(K) = d required)."""
    return lattice.unique_containing(K, d)


def minimal_containing_intersection(lattice: PIntersectionLattice,
                                    K: SubgroupSet) -> SubgroupSet:
    """Intersection of all Sylow subgroups containing K: the smallest node over K.

    By antitonicity of depth this is also the deepest node containing K, so
    it coincides with ``unique_containing_intersection`` at K's own depth —
    a fact the verification suite checks rather than assumes.
    """
    _require_p_subgroup(lattice.group, lattice.p, K)
    containing = [P for P in lattice.sylows if K.issubset(P)]
    if not containing:
        raise InvariantViolation("p-subgroup lies in no Sylow p-subgroup")
    mask = containing[0].mask
    for P in containing[1:]:
        mask &= P.mask
    from .groups import subgroup_set_from_mask
    U = subgroup_set_from_mask(mask, lattice.group.order)
    if U.mask not in lattice.depths:
        raise InvariantViolation("containing intersection is not a lattice node")
    return U


def _require_p_subgroup(G: FiniteGroup, p: int, H: SubgroupSet) -> None:
    if H.size <= 1:
        raise InputError("depth is defined for nontrivial p-subgroups only")
    if not G.is_subgroup(H):
        raise InputError("not a subgroup")
    size = H.size
    while size % p == 0:
        size //= p
    if size != 1:
        raise InputError(f"subgroup order {H.size} is not a power of {p}")
