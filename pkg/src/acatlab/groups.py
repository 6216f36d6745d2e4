"""Finite groups as multiplication tables, subgroups as bit-indexed sets.

Elements of a group of order n are the integers 0..n-1 with the identity at
index 0.  A ``SubgroupSet`` is a bitmask over those indices.  Everything here
is deterministic: constructors order elements canonically, and all iteration
is over sorted indices.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from functools import reduce
from math import gcd
from typing import Iterable, Iterator, Optional, Sequence, Tuple

import numpy as np

from .config import DEFAULT_CONFIG, CapExceeded, InputError, InvariantViolation, RunConfig


# ---------------------------------------------------------------------------
# element sets


@dataclass(frozen=True)
class SubgroupSet:
    """A subset of group elements, stored as a bitmask over 0..order-1.

    ``<=`` and ``<`` mean containment.  For a stable size-then-mask sort use
    :func:`subgroup_sort_key` explicitly.
    """

    size: int
    mask: int
    order: int  # ambient group order

    def __contains__(self, g: int) -> bool:
        return 0 <= g < self.order and (self.mask >> g) & 1 == 1

    def elements(self) -> Iterator[int]:
        m = self.mask
        while m:
            low = m & -m
            yield low.bit_length() - 1
            m ^= low

    def min_element(self) -> int:
        return (self.mask & -self.mask).bit_length() - 1

    def issubset(self, other: "SubgroupSet") -> bool:
        return self.mask & ~other.mask == 0

    def __le__(self, other: "SubgroupSet") -> bool:  # containment, not size
        return self.issubset(other)

    def __lt__(self, other: "SubgroupSet") -> bool:
        return self.mask != other.mask and self.issubset(other)

    def intersect(self, other: "SubgroupSet") -> "SubgroupSet":
        return subgroup_set_from_mask(self.mask & other.mask, self.order)

    def __repr__(self) -> str:
        return f"SubgroupSet({sorted(self.elements())})"


def subgroup_sort_key(s: SubgroupSet) -> Tuple[int, int]:
    return (s.size, s.mask)


def subgroup_set_from_mask(mask: int, order: int) -> SubgroupSet:
    return SubgroupSet(size=mask.bit_count(), mask=mask, order=order)


def subgroup_set(elements: Iterable[int], order: int) -> SubgroupSet:
    mask = 0
    for g in elements:
        if not 0 <= g < order:
            raise InputError(f"element index {g} out of range for order {order}")
        mask |= 1 << g
    return subgroup_set_from_mask(mask, order)


# ---------------------------------------------------------------------------
# groups


class FiniteGroup:
    """A finite group given by its full multiplication table.

    table[a][b] is the product a*b; index 0 is the identity.  ``labels`` are
    human-readable element names used in reports.
    """

    def __init__(self, table: np.ndarray, labels: Optional[Sequence[str]] = None,
                 name: str = "G", validated: bool = False,
                 config: RunConfig = DEFAULT_CONFIG):
        table = np.asarray(table, dtype=np.int32)
        self.table = table
        self.order = int(table.shape[0])
        self.name = name
        if labels is None:
            labels = [f"g{i}" for i in range(self.order)]
        self.labels = list(labels)
        if not validated:
            _validate_table(table, config)
        self.inverse_table = _inverse_table(table)

    # elementary operations -------------------------------------------------

    def mul(self, a: int, b: int) -> int:
        return int(self.table[a, b])

    def inv(self, a: int) -> int:
        return int(self.inverse_table[a])

    def conj(self, g: int, h: int) -> int:
        """g h g^-1."""
        return int(self.table[self.table[g, h], self.inverse_table[g]])

    def element_order(self, g: int) -> int:
        n, x = 1, g
        while x != 0:
            x = self.mul(x, g)
            n += 1
        return n

    def elements(self) -> range:
        return range(self.order)

    def label_set(self, s: SubgroupSet) -> list[str]:
        return [self.labels[g] for g in s.elements()]

    def full_set(self) -> SubgroupSet:
        return subgroup_set_from_mask((1 << self.order) - 1, self.order)

    def trivial_set(self) -> SubgroupSet:
        return subgroup_set_from_mask(1, self.order)

    def conjugate_subgroup(self, H: SubgroupSet, g: int) -> SubgroupSet:
        gi = self.inv(g)
        mask = 0
        for h in H.elements():
            mask |= 1 << int(self.table[self.table[g, h], gi])
        return subgroup_set_from_mask(mask, self.order)

    def is_subgroup(self, s: SubgroupSet) -> bool:
        if 0 not in s:
            return False
        els = list(s.elements())
        for a in els:
            if self.inv(a) not in s:
                return False
            row = self.table[a]
            for b in els:
                if int(row[b]) not in s:
                    return False
        return True

    def __repr__(self) -> str:
        return f"FiniteGroup({self.name}, order={self.order})"


def _validate_table(table: np.ndarray, config: RunConfig) -> None:
    if table.ndim != 2 or table.shape[0] != table.shape[1]:
        raise InputError("multiplication table must be square")
    n = table.shape[0]
    if n == 0:
        raise InputError("group must be nonempty")
    if n > config.order_cap:
        raise CapExceeded("order_cap", config.order_cap, n)
    if table.min() < 0 or table.max() >= n:
        raise InputError("table entries must be element indices in 0..n-1")
    # identity at index 0
    if not (np.array_equal(table[0], np.arange(n)) and np.array_equal(table[:, 0], np.arange(n))):
        raise InputError("index 0 is not a two-sided identity")
    # each element has a two-sided inverse (table rows/cols are permutations)
    for a in range(n):
        if len(set(table[a].tolist())) != n:
            raise InputError(f"row of element {a} is not a permutation (no right inverses)")
        if len(set(table[:, a].tolist())) != n:
            raise InputError(f"column of element {a} is not a permutation (no left inverses)")
    _check_associativity(table, config)


def _check_associativity(table: np.ndarray, config: RunConfig) -> None:
    n = table.shape[0]
    if n <= config.assoc_exhaustive_cap:
        # fully vectorised (a*b)*c == a*(b*c) over all triples
        left = table[table, :]            # left[a,b,c] = (a*b)*c
        right = table[:, table]           # right[a,b,c] = a*(b*c)
        if not np.array_equal(left, right):
            bad = np.argwhere(left != right)[0]
            a, b, c = (int(x) for x in bad)
            raise InputError(f"associativity fails on triple ({a}, {b}, {c})")
    else:
        rng = np.random.default_rng(config.seed)
        for _ in range(config.assoc_samples):
            a, b, c = (int(x) for x in rng.integers(0, n, size=3))
            if table[table[a, b], c] != table[a, table[b, c]]:
                raise InputError(f"associativity fails on sampled triple ({a}, {b}, {c})")


def _inverse_table(table: np.ndarray) -> np.ndarray:
    n = table.shape[0]
    inv = np.empty(n, dtype=np.int32)
    for a in range(n):
        inv[a] = int(np.nonzero(table[a] == 0)[0][0])
    return inv


# ---------------------------------------------------------------------------
# constructors


def from_cayley_table(table: Sequence[Sequence[int]], name: str = "G",
                      labels: Optional[Sequence[str]] = None,
                      config: RunConfig = DEFAULT_CONFIG) -> FiniteGroup:
    """Build a group from a raw table, relocating the identity to index 0."""
    arr = np.asarray(table, dtype=np.int64)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise InputError("Cayley table must be a square matrix")
    n = arr.shape[0]
    if n == 0:
        raise InputError("Cayley table must be nonempty")
    if arr.min() < 0 or arr.max() >= n:
        raise InputError("Cayley table entries must be indices in 0..n-1")
    # find a two-sided identity
    ident = None
    for e in range(n):
        if np.array_equal(arr[e], np.arange(n)) and np.array_equal(arr[:, e], np.arange(n)):
            ident = e
            break
    if ident is None:
        raise InputError("Cayley table has no two-sided identity")
    if ident != 0:
        # conjugate the table by the transposition (0 ident)
        perm = np.arange(n)
        perm[0], perm[ident] = ident, 0
        inv_perm = perm  # a transposition is its own inverse
        arr = perm[arr[np.ix_(inv_perm, inv_perm)]]
        if labels is not None:
            labels = list(labels)
            labels[0], labels[ident] = labels[ident], labels[0]
    return FiniteGroup(arr, labels=labels, name=name, config=config)


def _compose(p: tuple[int, ...], q: tuple[int, ...]) -> tuple[int, ...]:
    """(p*q)(x) = p(q(x)) — apply q first."""
    return tuple(p[q[x]] for x in range(len(p)))


def perm_closure(gens: Sequence[tuple[int, ...]]) -> list[tuple[int, ...]]:
    """Worklist closure of a set of permutations under composition."""
    if not gens:
        raise InputError("need at least one generator")
    degree = len(gens[0])
    ident = tuple(range(degree))
    els = {ident}
    frontier = [ident]
    while frontier:
        nxt = []
        for a in frontier:
            for g in gens:
                b = _compose(a, g)
                if b not in els:
                    els.add(b)
                    nxt.append(b)
        frontier = nxt
    return sorted(els)


def cycle_notation(p: tuple[int, ...]) -> str:
    """1-based cycle notation, 'e' for the identity."""
    seen = [False] * len(p)
    parts = []
    for start in range(len(p)):
        if seen[start] or p[start] == start:
            seen[start] = True
            continue
        cyc = [start]
        seen[start] = True
        x = p[start]
        while x != start:
            cyc.append(x)
            seen[x] = True
            x = p[x]
        parts.append("(" + " ".join(str(i + 1) for i in cyc) + ")")
    return "".join(parts) if parts else "e"


def from_permutations(generators: Sequence[Sequence[int]], name: str = "G",
                      one_based: bool = False,
                      config: RunConfig = DEFAULT_CONFIG) -> FiniteGroup:
    """Closure of permutation generators, given as one-line image arrays.

    Elements are ordered lexicographically by image tuple, which puts the
    identity at index 0; labels are cycle notation.
    """
    gens = []
    for g in generators:
        img = [int(x) - 1 for x in g] if one_based else [int(x) for x in g]
        if sorted(img) != list(range(len(img))):
            raise InputError(f"not a permutation: {list(g)}")
        gens.append(tuple(img))
    if len({len(g) for g in gens}) != 1:
        raise InputError("generators must act on the same number of points")
    els = perm_closure(gens)
    if len(els) > config.order_cap:
        raise CapExceeded("order_cap", config.order_cap, len(els))
    index = {p: i for i, p in enumerate(els)}
    n = len(els)
    table = np.empty((n, n), dtype=np.int32)
    for i, p in enumerate(els):
        for j, q in enumerate(els):
            table[i, j] = index[_compose(p, q)]
    labels = [cycle_notation(p) for p in els]
    return FiniteGroup(table, labels=labels, name=name, validated=True, config=config)


# ---------------------------------------------------------------------------
# subgroup operations


def subgroup_closure(G: FiniteGroup, seed: Iterable[int]) -> SubgroupSet:
    """Smallest subgroup containing the seed elements (worklist closure)."""
    mask = 1  # identity
    frontier = [0]
    for g in sorted(set(seed)):
        if not 0 <= g < G.order:
            raise InputError(f"element index {g} out of range")
        if not (mask >> g) & 1:
            mask |= 1 << g
            frontier.append(g)
    els = [x for x in range(G.order) if (mask >> x) & 1]
    while frontier:
        nxt = []
        for a in frontier:
            for b in els:
                for c in (G.mul(a, b), G.mul(b, a), G.inv(a)):
                    if not (mask >> c) & 1:
                        mask |= 1 << c
                        nxt.append(c)
        els = [x for x in range(G.order) if (mask >> x) & 1]
        frontier = nxt
    H = subgroup_set_from_mask(mask, G.order)
    if G.order % H.size != 0:
        raise InvariantViolation(f"Lagrange violated: |H|={H.size} does not divide {G.order}")
    return H


def normalizer(G: FiniteGroup, H: SubgroupSet) -> SubgroupSet:
    """N_G(H) = all g with g H g^-1 = H."""
    mask = 0
    for g in range(G.order):
        if G.conjugate_subgroup(H, g).mask == H.mask:
            mask |= 1 << g
    return subgroup_set_from_mask(mask, G.order)


def conjugacy_orbit(G: FiniteGroup, H: SubgroupSet) -> list[SubgroupSet]:
    """All distinct conjugates of H, sorted."""
    seen = {H.mask}
    frontier = [H]
    while frontier:
        nxt = []
        for K in frontier:
            for g in range(G.order):
                C = G.conjugate_subgroup(K, g)
                if C.mask not in seen:
                    seen.add(C.mask)
                    nxt.append(C)
        frontier = nxt
    masks = sorted(seen)
    return [subgroup_set_from_mask(m, G.order) for m in masks]


def left_coset_reps(G: FiniteGroup, H: SubgroupSet) -> list[int]:
    """Minimal representative of each left coset gH, sorted (identity first)."""
    reps, covered = [], 0
    for g in range(G.order):
        if not (covered >> g) & 1:
            reps.append(g)
            for h in H.elements():
                covered |= 1 << G.mul(g, h)
    return reps


def right_coset_of(G: FiniteGroup, H: SubgroupSet, g: int) -> SubgroupSet:
    mask = 0
    for h in H.elements():
        mask |= 1 << G.mul(g, h)
    return subgroup_set_from_mask(mask, G.order)


def right_cosets(G: FiniteGroup, H: SubgroupSet) -> list[SubgroupSet]:
    """All right cosets gH, ordered by minimal element (identity coset first)."""
    cosets, covered = [], 0
    for g in range(G.order):
        if not (covered >> g) & 1:
            c = right_coset_of(G, H, g)
            covered |= c.mask
            cosets.append(c)
    return cosets


def is_normal(G: FiniteGroup, H: SubgroupSet) -> bool:
    return normalizer(G, H).size == G.order


def quotient_group(G: FiniteGroup, N: SubgroupSet) -> tuple[FiniteGroup, list[int]]:
    """Quotient G/N with its projection map (element index -> coset index).

    N must be normal.  Cosets are ordered by minimal element, so the identity
    coset is index 0.
    """
    if not G.is_subgroup(N):
        raise InputError("N is not a subgroup")
    if not is_normal(G, N):
        raise InputError("subgroup is not normal; quotient undefined")
    cosets = right_cosets(G, N)
    coset_index = {}
    proj = [0] * G.order
    for i, c in enumerate(cosets):
        coset_index[c.mask] = i
        for g in c.elements():
            proj[g] = i
    k = len(cosets)
    table = np.empty((k, k), dtype=np.int32)
    reps = [c.min_element() for c in cosets]
    for i, a in enumerate(reps):
        for j, b in enumerate(reps):
            table[i, j] = proj[G.mul(a, b)]
    labels = ["[" + G.labels[r] + "]" for r in reps]
    Q = FiniteGroup(table, labels=labels, name=f"{G.name}/N", validated=True)
    return Q, proj


# ---------------------------------------------------------------------------
# catalog groups


def cyclic_group(n: int, config: RunConfig = DEFAULT_CONFIG) -> FiniteGroup:
    if n < 1:
        raise InputError("cyclic group order must be >= 1")
    if n > config.order_cap:
        raise CapExceeded("order_cap", config.order_cap, n)
    idx = np.arange(n)
    table = (idx[:, None] + idx[None, :]) % n
    labels = ["e"] + [f"g^{i}" if i > 1 else "g" for i in range(1, n)]
    return FiniteGroup(table, labels=labels, name=f"C{n}", validated=True, config=config)


def dihedral_group(n: int, config: RunConfig = DEFAULT_CONFIG) -> FiniteGroup:
    """Dihedral group of order 2n (symmetries of the n-gon), n >= 1.

    Element f*n + i stands for s^f r^i; multiplication uses r^i s = s r^-i.
    """
    if n < 1:
        raise InputError("dihedral parameter must be >= 1")
    order = 2 * n
    if order > config.order_cap:
        raise CapExceeded("order_cap", config.order_cap, order)
    table = np.empty((order, order), dtype=np.int32)
    for f1 in (0, 1):
        for i in range(n):
            a = f1 * n + i
            for f2 in (0, 1):
                for j in range(n):
                    b = f2 * n + j
                    f = f1 ^ f2
                    i2 = (-i if f2 else i) + j
                    table[a, b] = f * n + (i2 % n)
    labels = ["e"] + [f"r^{i}" if i > 1 else "r" for i in range(1, n)]
    labels += ["s"] + [f"s·r^{i}" if i > 1 else "s·r" for i in range(1, n)]
    return FiniteGroup(table, labels=labels, name=f"D{n}", validated=True, config=config)


def symmetric_group(n: int, config: RunConfig = DEFAULT_CONFIG) -> FiniteGroup:
    if n < 1:
        raise InputError("symmetric group degree must be >= 1")
    if n == 1:
        return from_permutations([[0]], name="S1", config=config)
    gens = [
        [1, 0] + list(range(2, n)),      # transposition (1 2)
        list(range(1, n)) + [0],         # n-cycle (1 2 ... n)
    ]
    return from_permutations(gens, name=f"S{n}", config=config)


def alternating_group(n: int, config: RunConfig = DEFAULT_CONFIG) -> FiniteGroup:
    if n < 3:
        raise InputError("alternating group needs degree >= 3")
    gens = [[1, 2, 0] + list(range(3, n))]  # 3-cycle (1 2 3)
    if n >= 4:
        if n % 2 == 1:
            gens.append(list(range(1, n)) + [0])       # n-cycle, even for odd n
        else:
            gens.append([0] + list(range(2, n)) + [1])  # (n-1)-cycle (2 3 ... n)
    G = from_permutations(gens, name=f"A{n}", config=config)
    expected = 1
    for k in range(3, n + 1):
        expected *= k  # n!/2
    if G.order != expected:
        raise InvariantViolation(f"alternating group closure has wrong order {G.order}")
    return G


_Q8_TABLE = [
    # order: 1, -1, i, -i, j, -j, k, -k
    [0, 1, 2, 3, 4, 5, 6, 7],
    [1, 0, 3, 2, 5, 4, 7, 6],
    [2, 3, 1, 0, 6, 7, 5, 4],
    [3, 2, 0, 1, 7, 6, 4, 5],
    [4, 5, 7, 6, 1, 0, 2, 3],
    [5, 4, 6, 7, 0, 1, 3, 2],
    [6, 7, 4, 5, 3, 2, 1, 0],
    [7, 6, 5, 4, 2, 3, 0, 1],
]


def quaternion_group(config: RunConfig = DEFAULT_CONFIG) -> FiniteGroup:
    labels = ["1", "-1", "i", "-i", "j", "-j", "k", "-k"]
    return FiniteGroup(np.array(_Q8_TABLE), labels=labels, name="Q8", config=config)


def direct_product(A: FiniteGroup, B: FiniteGroup,
                   config: RunConfig = DEFAULT_CONFIG) -> FiniteGroup:
    n = A.order * B.order
    if n > config.order_cap:
        raise CapExceeded("order_cap", config.order_cap, n)
    table = np.empty((n, n), dtype=np.int32)
    for a1 in range(A.order):
        for b1 in range(B.order):
            x = a1 * B.order + b1
            table[x] = (A.table[a1][:, None] * B.order + B.table[b1][None, :]).reshape(-1)
    labels = [f"({la},{lb})" for la in A.labels for lb in B.labels]
    return FiniteGroup(table, labels=labels, name=f"{A.name}x{B.name}",
                       validated=True, config=config)


_CATALOG_RE = re.compile(r"^([CDSAQ])(\d+)$")


def catalog(name: str, config: RunConfig = DEFAULT_CONFIG) -> FiniteGroup:
    """Look up a named group: Cn, Dn (order 2n), Sn, An, Q8, and x-products."""
    name = name.strip()
    if "x" in name:
        parts = name.split("x")
        groups = [catalog(p, config=config) for p in parts]
        return reduce(lambda a, b: direct_product(a, b, config=config), groups)
    m = _CATALOG_RE.match(name.upper())
    if not m:
        raise InputError(f"unknown catalog group {name!r}")
    kind, n = m.group(1), int(m.group(2))
    if kind == "C":
        return cyclic_group(n, config)
    if kind == "D":
        return dihedral_group(n, config)
    if kind == "S":
        return symmetric_group(n, config)
    if kind == "A":
        return alternating_group(n, config)
    if kind == "Q":
        if n != 8:
            raise InputError("only Q8 is in the catalog")
        return quaternion_group(config)
    raise InputError(f"unknown catalog group {name!r}")


def catalog_names(max_order: int) -> list[str]:
    """Catalog groups of order <= max_order, deduplicated across families.

    D1, D2, D3 are skipped (isomorphic to C2, C2xC2, S3); S2 and A3 likewise.
    Deterministic order: by group order, then name.
    """
    entries: list[tuple[int, str]] = []
    for n in range(2, max_order + 1):
        entries.append((n, f"C{n}"))
    for n in range(4, max_order // 2 + 1):
        entries.append((2 * n, f"D{n}"))
    fact = 2
    for n in range(3, 13):
        fact *= n
        if fact > max_order:
            break
        entries.append((fact, f"S{n}"))
    half = 3
    for n in range(4, 13):
        half *= n
        if half > max_order:
            break
        entries.append((half, f"A{n}"))
    if max_order >= 8:
        entries.append((8, "Q8"))
    entries.sort(key=lambda t: (t[0], t[1]))
    return [name for _, name in entries]


# ---------------------------------------------------------------------------
# JSON wire format for group specs


def group_from_spec(spec: dict | str, config: RunConfig = DEFAULT_CONFIG) -> FiniteGroup:
    """Build a group from the wire format.

    Accepted shapes::

        {"type": "catalog", "name": "S4"}
        {"type": "cyclic", "n": 30}
        {"type": "permutation", "generators": [[2,1,3],[2,3,1]]}   # 1-based images
        {"type": "cayley", "table": [[0,1],[1,0]]}

    A bare string is treated as a catalog name, or parsed as JSON if it looks
    like an object.
    """
    if isinstance(spec, str):
        text = spec.strip()
        if text.startswith("{"):
            try:
                spec = json.loads(text)
            except json.JSONDecodeError as exc:
                raise InputError(f"group spec is not valid JSON: {exc}") from exc
        else:
            return catalog(text, config=config)
    if not isinstance(spec, dict):
        raise InputError("group spec must be a JSON object or catalog name")
    kind = spec.get("type")
    if kind == "catalog":
        if "name" not in spec:
            raise InputError("catalog spec needs a 'name'")
        return catalog(str(spec["name"]), config=config)
    if kind == "cyclic":
        if "n" not in spec:
            raise InputError("cyclic spec needs 'n'")
        return cyclic_group(int(spec["n"]), config=config)
    if kind == "permutation":
        gens = spec.get("generators")
        if not isinstance(gens, list) or not gens:
            raise InputError("permutation spec needs a nonempty 'generators' list")
        return from_permutations(gens, one_based=True, name="perm-group", config=config)
    if kind == "cayley":
        table = spec.get("table")
        if not isinstance(table, list) or not table:
            raise InputError("cayley spec needs a nonempty 'table'")
        return from_cayley_table(table, config=config)
    raise InputError(f"unknown group spec type {kind!r}")


def prime_factors(n: int) -> dict[int, int]:
    """Prime factorization as {p: exponent}."""
    out: dict[int, int] = {}
    d = 2
    while d * d <= n:
        while n % d == 0:
            out[d] = out.get(d, 0) + 1
            n //= d
        d += 1
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def p_part(n: int, p: int) -> int:
    q = 1
    while n % p == 0:
        q *= p
        n //= p
    return q


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    d = 2
    while d * d <= n:
        if n % d == 0:
            return False
        d += 1
    return True
