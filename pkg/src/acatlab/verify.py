"""Catalog-wide verification sweeps behind the ``verify`` command.

Four suites, each an exhaustive property check over a fixed corpus of
catalog groups:

* ``fixed-point-formula`` — the coset-skeleton model of the fixed points
  matches the raw invariant-face poset, with equivariance, for every
  subgroup of every catalog group of order <= 24 and every skeleton level.
* ``connectivity`` — the homological connectivity of that model equals
  floor((n+1)/|H|) - 2 on proper skeletons (and the model is a full simplex
  otherwise), for every catalog group of order <= 12.
* ``lattice`` — the depth lemma, the containment and uniqueness corollaries,
  and the Sylow counting congruence, under exhaustive p-subgroup
  enumeration for every catalog group of order <= 24.
* ``construction`` — the staged one-prime builders and the integral
  assembly on a fixed six-group corpus, including the Smith acyclicity scan.

A failed case never raises out of a suite: it becomes a JSON-serializable
failure record, so a batch run always produces a complete report.  Cases
whose face budget would exceed the per-sweep cap are counted as skipped.
Suites can fan out over worker processes (one group per task); results are
reassembled in catalog order, so output is identical at any parallelism.
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Callable, Dict, List, Sequence, Tuple

from .complexes import (
    connectivity_label,
    expected_fixed_connectivity,
    full_skeleton,
    verify_fixed_model,
)
from .config import (
    DEFAULT_CONFIG,
    CapExceeded,
    InputError,
    InvariantViolation,
    RunConfig,
    VerificationFailure,
)
from .enumeration import all_subgroups
from .equivariant import build_X, build_X_p, smith_acyclicity_check
from .groups import catalog, catalog_names, prime_factors
from .sylow import PIntersectionLattice

# Corpus bounds.  The two order caps match the subgroup-enumeration oracle
# gate; the construction corpus is the fixed six-group set the staged
# builder is specified against.
FIXED_POINT_MAX_ORDER = 24
CONNECTIVITY_MAX_ORDER = 12
LATTICE_MAX_ORDER = 24
CONSTRUCTION_GROUPS = ("S3", "C6", "D5", "A4", "D6", "C30")

SUITE_NAMES = ("fixed-points", "construction", "lattice", "all")


@dataclass
class SuiteResult:
    """Outcome of one verification sweep."""

    suite: str
    cases: int = 0
    skipped: int = 0
    failures: List[dict] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.failures

    def to_json(self) -> dict:
        return {
            "schema": 1,
            "suite": self.suite,
            "passed": self.passed,
            "cases": self.cases,
            "skipped": self.skipped,
            "failures": self.failures,
        }


def _sweep_config(config: RunConfig) -> RunConfig:
    """Per-case face budget for bulk sweeps (they visit thousands of cases)."""
    return replace(config, face_cap=min(config.face_cap, config.verify_face_cap))


GroupOutcome = Tuple[int, int, List[dict]]


def _gather(suite: str, names: Sequence[str],
            worker: Callable[[str, RunConfig], GroupOutcome],
            config: RunConfig) -> SuiteResult:
    """Run ``worker`` per group, serially or on a pool, in catalog order."""
    if config.parallel > 1 and len(names) > 1:
        with ProcessPoolExecutor(max_workers=config.parallel) as pool:
            outcomes = list(pool.map(worker, names, [config] * len(names)))
    else:
        outcomes = [worker(name, config) for name in names]
    result = SuiteResult(suite=suite)
    for cases, skipped, failures in outcomes:
        result.cases += cases
        result.skipped += skipped
        result.failures.extend(failures)
    return result


# ---------------------------------------------------------------------------
# fixed-point formula


def _fixed_point_group(name: str, config: RunConfig) -> GroupOutcome:
    G = catalog(name, config)
    cfg = _sweep_config(config)
    cases = skipped = 0
    failures: List[dict] = []
    for H in all_subgroups(G, config, limit=G.order):
        for n in range(G.order):
            cases += 1
            try:
                verify_fixed_model(G, H, n, cfg, with_connectivity=False)
            except CapExceeded:
                skipped += 1
            except VerificationFailure as exc:
                failures.append({
                    "group": name,
                    "subgroup": sorted(H.elements()),
                    "n": n,
                    "error": str(exc),
                })
    return cases, skipped, failures


def fixed_point_suite(config: RunConfig = DEFAULT_CONFIG,
                      max_order: int = FIXED_POINT_MAX_ORDER) -> SuiteResult:
    """Poset isomorphism + equivariance for all (G, H, n), |G| <= max_order."""
    return _gather("fixed-point-formula", catalog_names(max_order),
                   _fixed_point_group, config)


# ---------------------------------------------------------------------------
# connectivity law

# The model for (G, H, n) is the (q-1)-skeleton of a full simplex on
# [G:H] vertices with q = floor((n+1)/|H|), so its connectivity depends
# only on ([G:H], q).  Memoizing on that pair collapses the sweep to a few
# dozen distinct homology computations per worker process.
_SKELETON_CONNECTIVITY: Dict[Tuple[int, int], object] = {}


def _skeleton_connectivity(r: int, q: int, config: RunConfig):
    key = (r, q)
    if key not in _SKELETON_CONNECTIVITY:
        _SKELETON_CONNECTIVITY[key] = \
            full_skeleton(r, q - 1, config).connectivity(config)
    return _SKELETON_CONNECTIVITY[key]


def _connectivity_group(name: str, config: RunConfig) -> GroupOutcome:
    G = catalog(name, config)
    cfg = _sweep_config(config)
    cases = skipped = 0
    failures: List[dict] = []
    for H in all_subgroups(G, config, limit=G.order):
        r = G.order // H.size
        for n in range(G.order):
            q = (n + 1) // H.size
            cases += 1
            expected = expected_fixed_connectivity(G, H, n)
            try:
                got = _skeleton_connectivity(r, q, cfg)
            except CapExceeded:
                skipped += 1
                continue
            if got != expected:
                failures.append({
                    "group": name,
                    "subgroup": sorted(H.elements()),
                    "n": n,
                    "connectivity": connectivity_label(got),
                    "expected": connectivity_label(expected),
                })
    return cases, skipped, failures


def connectivity_suite(config: RunConfig = DEFAULT_CONFIG,
                       max_order: int = CONNECTIVITY_MAX_ORDER) -> SuiteResult:
    """Exact connectivity of every fixed-point model, |G| <= max_order.

    The model stands in for the raw invariant-face complex through the
    poset isomorphism the fixed-point suite verifies directly.
    """
    return _gather("connectivity", catalog_names(max_order),
                   _connectivity_group, config)


# ---------------------------------------------------------------------------
# intersection-lattice lemmas


def _is_power_of(n: int, p: int) -> bool:
    while n % p == 0:
        n //= p
    return n == 1


def _lattice_group(name: str, config: RunConfig) -> GroupOutcome:
    G = catalog(name, config)
    cases = skipped = 0
    failures: List[dict] = []
    subgroups = all_subgroups(G, config, limit=G.order)
    for p in sorted(prime_factors(G.order)):
        try:
            lattice = PIntersectionLattice(G, p, config)
        except InvariantViolation as exc:
            cases += 1
            failures.append({"group": name, "p": p,
                             "check": "lattice-construction",
                             "error": str(exc)})
            continue

        def fail(check: str, **extra) -> None:
            failures.append({"group": name, "p": p, "check": check, **extra})

        # Sylow counting: == 1 mod p and divides |G|.
        cases += 1
        n_p = len(lattice.sylows)
        if n_p % p != 1 or G.order % n_p != 0:
            fail("sylow-count", count=n_p)

        # Depth is strictly antitone along node containment.
        nodes = lattice.nodes
        for H in nodes:
            for K in nodes:
                if H.size < K.size and H.issubset(K):
                    cases += 1
                    if lattice.depths[H.mask] <= lattice.depths[K.mask]:
                        fail("depth-antitone",
                             lower=sorted(H.elements()),
                             upper=sorted(K.elements()))

        # Covering edges drop the order by at least p; a depth-d node has
        # order at most p^(s-d+1).
        top = lattice.sylows[0].size
        for i, j in lattice.edges:
            cases += 1
            ratio = lattice.nodes[j].size // lattice.nodes[i].size
            if lattice.nodes[j].size % lattice.nodes[i].size or ratio < p:
                fail("covering-order-drop", edge=[i, j], ratio=ratio)
        for H in nodes:
            cases += 1
            d = lattice.depths[H.mask]
            if H.size * p ** (d - 1) > top:
                fail("depth-order-bound", order=H.size, depth=d)

        # Exhaustive p-subgroup sweep: depth lemma and uniqueness.
        for K in subgroups:
            if K.size == 1 or not _is_power_of(K.size, p):
                continue
            cases += 1
            try:
                d = lattice.subgroup_depth(K)
            except InvariantViolation as exc:
                fail("subgroup-depth", subgroup=sorted(K.elements()),
                     error=str(exc))
                continue
            for H in nodes:
                if not H.issubset(K):
                    continue
                cases += 1
                if H.mask == K.mask:
                    ok = d == lattice.depths[H.mask]
                else:
                    ok = d < lattice.depths[H.mask]
                if not ok:
                    fail("depth-lemma", node=sorted(H.elements()),
                         subgroup=sorted(K.elements()),
                         node_depth=lattice.depths[H.mask],
                         subgroup_depth=d)
            cases += 1
            try:
                lattice.unique_containing(K, d)
            except InvariantViolation as exc:
                fail("unique-containment", subgroup=sorted(K.elements()),
                     depth=d, error=str(exc))
    return cases, skipped, failures


def lattice_suite(config: RunConfig = DEFAULT_CONFIG,
                  max_order: int = LATTICE_MAX_ORDER) -> SuiteResult:
    """Depth lemma, corollaries and Sylow counts, |G| <= max_order."""
    return _gather("lattice", catalog_names(max_order),
                   _lattice_group, config)


# ---------------------------------------------------------------------------
# equivariant construction


def _construction_group(name: str, config: RunConfig) -> GroupOutcome:
    G = catalog(name, config)
    cases = skipped = 0
    failures: List[dict] = []
    for p in sorted(prime_factors(G.order)):
        cases += 1
        try:
            build_X_p(G, p, config)
        except InvariantViolation as exc:
            failures.append({"group": name, "p": p,
                             "check": "one-prime-build", "error": str(exc)})
        except CapExceeded as exc:
            skipped += 1
            failures.append({"group": name, "p": p,
                             "check": "one-prime-build", "error": str(exc)})
    cases += 1
    try:
        built = build_X(G, config)
    except InvariantViolation as exc:
        failures.append({"group": name, "check": "assembly",
                         "error": str(exc)})
        return cases, skipped, failures
    except CapExceeded as exc:
        skipped += 1
        failures.append({"group": name, "check": "assembly",
                         "error": str(exc)})
        return cases, skipped, failures
    cases += 1
    report = smith_acyclicity_check(built.complex, config)
    if not report.ok:
        failures.append({"group": name, "check": "smith-scan",
                         "witnesses": report.witnesses})
    cases += 1
    if built.residual:
        failures.append({"group": name, "check": "integral-acyclicity",
                         "residual": built.residual})
    return cases, skipped, failures


def construction_suite(config: RunConfig = DEFAULT_CONFIG,
                       groups: Sequence[str] = CONSTRUCTION_GROUPS
                       ) -> SuiteResult:
    """Per-prime builds, integral assembly and Smith scan on the corpus."""
    return _gather("construction", list(groups), _construction_group, config)


# ---------------------------------------------------------------------------
# dispatch


def run_suites(name: str, config: RunConfig = DEFAULT_CONFIG
               ) -> List[SuiteResult]:
    """All SuiteResults for one command-line suite name."""
    if name == "fixed-points":
        return [fixed_point_suite(config), connectivity_suite(config)]
    if name == "construction":
        return [construction_suite(config)]
    if name == "lattice":
        return [lattice_suite(config)]
    if name == "all":
        return [
            fixed_point_suite(config),
            connectivity_suite(config),
            lattice_suite(config),
            construction_suite(config),
        ]
    raise InputError(f"unknown suite {name!r}")
