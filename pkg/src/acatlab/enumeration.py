"""Brute-force subgroup enumeration.

Used as an independent oracle by the verification suites and, for p-subgroup
conjugacy classes, by the equivariant construction checks.  The worklist is
the classic one: grow every known subgroup by one outside element and close.
Exponential in principle, fine in practice for the orders it is gated to.
"""

from __future__ import annotations

from .config import DEFAULT_CONFIG, CapExceeded, RunConfig
from .groups import (
    FiniteGroup,
    SubgroupSet,
    p_part,
    subgroup_closure,
    subgroup_set_from_mask,
    subgroup_sort_key,
)


def all_subgroups(G: FiniteGroup, config: RunConfig = DEFAULT_CONFIG,
                  limit: int | None = None) -> list[SubgroupSet]:
    """Every subgroup of G, sorted by (size, mask).

    Gated by ``subgroup_enum_cap`` unless an explicit ``limit`` is passed.
    """
    cap = limit if limit is not None else config.subgroup_enum_cap
    if G.order > cap:
        raise CapExceeded("subgroup_enum_cap", cap, G.order,
                          "brute-force subgroup enumeration")
    trivial = G.trivial_set()
    known = {trivial.mask: trivial}
    frontier = [trivial]
    while frontier:
        nxt = []
        for H in frontier:
            for g in range(1, G.order):
                if g in H:
                    continue
                K = subgroup_closure(G, list(H.elements()) + [g])
                if K.mask not in known:
                    known[K.mask] = K
                    nxt.append(K)
        frontier = nxt
    return sorted(known.values(), key=subgroup_sort_key)


def subgroups_within(G: FiniteGroup, ambient: SubgroupSet) -> list[SubgroupSet]:
    """All subgroups of G contained in the subgroup ``ambient``.

    Same worklist, but extensions are restricted to elements of ``ambient``,
    so the cost is governed by |ambient| rather than |G|.
    """
    trivial = G.trivial_set()
    known = {trivial.mask: trivial}
    frontier = [trivial]
    members = list(ambient.elements())
    while frontier:
        nxt = []
        for H in frontier:
            for g in members:
                if g in H:
                    continue
                K = subgroup_closure(G, list(H.elements()) + [g])
                if K.mask not in known:
                    known[K.mask] = K
                    nxt.append(K)
        frontier = nxt
    return sorted(known.values(), key=subgroup_sort_key)


def p_subgroup_class_reps(G: FiniteGroup, p: int, sylow: SubgroupSet,
                          include_trivial: bool = False) -> list[SubgroupSet]:
    """Conjugacy-class representatives of the p-subgroups of G.

    Every p-subgroup is conjugate into the given Sylow p-subgroup, so it
    suffices to enumerate subgroups of the Sylow and deduplicate under
    G-conjugacy.  Representatives are the minimal subgroup of each class.
    """
    if p_part(G.order, p) != sylow.size:
        raise ValueError("sylow argument does not have full p-part order")
    reps: list[SubgroupSet] = []
    seen: set[int] = set()
    for H in subgroups_within(G, sylow):
        if H.size == 1 and not include_trivial:
            continue
        if H.mask in seen:
            continue
        orbit_masks = _conjugate_masks(G, H)
        seen.update(orbit_masks)
        reps.append(subgroup_set_from_mask(min(orbit_masks), G.order))
    return sorted(reps, key=subgroup_sort_key)


def _conjugate_masks(G: FiniteGroup, H: SubgroupSet) -> set[int]:
    masks = {H.mask}
    frontier = [H]
    while frontier:
        nxt = []
        for K in frontier:
            for g in range(G.order):
                C = G.conjugate_subgroup(K, g)
                if C.mask not in masks:
                    masks.add(C.mask)
                    nxt.append(C)
        frontier = nxt
    return masks
