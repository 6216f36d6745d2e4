"""Lower/upper bounds on the analog category of a finite group.

All bounds are driven by Sylow data.  Writing p^s for the p-part of |G|:

* every p-subgroup Q forces a lower bound |Q|-1, improved to 2|Q|-1 when Q
  is not self-normalizing; scanning the Sylow subgroup and its index-p
  subgroups realizes the maximum over all p-subgroups (a proper subgroup of
  a p-group is never self-normalizing, so the best non-Sylow contribution
  comes from index p);
* with q the largest prime-power divisor: 3q-1 is an upper bound whenever
  |G| is not a prime power, and |G|-1 applies in the 1-/2-special cases
  (|G| = a*q with a in {1,2}).

The sharpness verdict reports whether the universal bound acat = |G|-1 is
attained (1-/2-special), unknown (3-special), or strictly beaten (all other
groups, where 3q-1 < |G|-1).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional

from .config import DEFAULT_CONFIG, InputError, InvariantViolation, RunConfig
from .groups import FiniteGroup, normalizer, p_part, prime_factors
from .sylow import PIntersectionLattice, all_sylow_subgroups, sylow_subgroup


@dataclass(frozen=True)
class PrimeData:
    """Per-prime Sylow summary used throughout the bounds."""

    p: int
    exponent: int          # s, with p^s the p-part
    sylow_order: int       # p^s
    num_sylows: int
    self_normalizing: bool
    d_p: int

    def to_json(self) -> dict:
        return {
            "p": self.p,
            "sylow_order": self.sylow_order,
            "num_sylows": self.num_sylows,
            "self_normalizing": self.self_normalizing,
            "d_p": self.d_p,
        }


@dataclass
class AcatReport:
    """Everything the bounds pipeline knows about one group."""

    group_id: str
    order: int
    per_prime: List[PrimeData]
    q: int
    lower: int
    upper: int
    exact: Optional[int]
    a_special: Optional[int]
    sharpness: str  # "Sharp" | "NotSharp" | "Unknown"
    range_consistent: Optional[bool] = None       # None for prime powers
    proof_inequalities: Optional[bool] = None     # None for prime powers
    certificate_n: Optional[int] = None
    certificate_note: Optional[str] = None

    def to_json(self) -> dict:
        return {
            "schema": 1,
            "group": self.group_id,
            "order": self.order,
            "per_prime": [d.to_json() for d in self.per_prime],
            "q": self.q,
            "lower": self.lower,
            "upper": self.upper,
            "exact": self.exact,
            "a_special": self.a_special,
            "sharpness": self.sharpness,
            "range_consistent": self.range_consistent,
            "proof_inequalities": self.proof_inequalities,
            "certificate_n": self.certificate_n,
            "certificate_note": self.certificate_note,
        }


def prime_data(G: FiniteGroup, config: RunConfig = DEFAULT_CONFIG
               ) -> List[PrimeData]:
    out = []
    for p, s in sorted(prime_factors(G.order).items()):
        P = sylow_subgroup(G, p)
        N = normalizer(G, P)
        lat = PIntersectionLattice(G, p, config)
        out.append(PrimeData(
            p=p, exponent=s, sylow_order=P.size,
            num_sylows=len(lat.sylows),
            self_normalizing=N.mask == P.mask,
            d_p=lat.d_p,
        ))
    return out


def largest_prime_power_divisor(order: int) -> int:
    """q = max over p of the p-part of the order (1 for the trivial group)."""
    parts = [p ** s for p, s in prime_factors(order).items()]
    return max(parts, default=1)


def a_special(G: FiniteGroup) -> Optional[int]:
    """r = |G|/q when the largest prime-power divisor q exceeds r, else None.

    Only the maximal prime-power divisor can witness this (any witness p^s
    satisfies p^s > |G|/p^s, i.e. p^s > sqrt(|G|), and two coprime divisors
    cannot both exceed the square root) — cross-checked below.
    """
    if G.order == 1:
        return 1
    q = largest_prime_power_divisor(G.order)
    witnesses = [p ** s for p, s in prime_factors(G.order).items()
                 if p ** s > G.order // p ** s]
    if len(witnesses) > 1:
        raise InvariantViolation("two prime-power divisors both dominate")
    if witnesses and witnesses[0] != q:
        raise InvariantViolation("dominant prime power is not the largest")
    r = G.order // q
    return r if q > r else None


def lower_bound(G: FiniteGroup, data: Optional[List[PrimeData]] = None) -> int:
    """Best Sylow-driven lower bound (0 for the trivial group)."""
    if G.order == 1:
        return 0
    best = 0
    for d in data if data is not None else prime_data(G):
        sylow_part = (d.sylow_order - 1 if d.self_normalizing
                      else 2 * d.sylow_order - 1)
        index_p_part = 2 * d.sylow_order // d.p - 1
        best = max(best, sylow_part, index_p_part)
    return best


def upper_bound(G: FiniteGroup) -> int:
    """min of 3q-1 (non-prime-power orders) and |G|-1 (1-/2-special)."""
    if G.order == 1:
        return 0
    q = largest_prime_power_divisor(G.order)
    candidates = []
    if q != G.order:  # not a prime power
        candidates.append(3 * q - 1)
    if a_special(G) in (1, 2):
        candidates.append(G.order - 1)
    return min(candidates)


def sharpness(G: FiniteGroup) -> str:
    a = a_special(G)
    if a in (1, 2):
        return "Sharp"
    if a == 3:
        return "Unknown"
    q = largest_prime_power_divisor(G.order)
    if not (upper_bound(G) <= 3 * q - 1 < G.order - 1):
        raise InvariantViolation(
            f"non-special group must satisfy upper <= 3q-1 < |G|-1 "
            f"(q={q}, |G|={G.order})")
    return "NotSharp"


def range_consistency(G: FiniteGroup,
                      data: Optional[List[PrimeData]] = None) -> bool:
    """The implemented bounds land inside the proved bracket.

    For P a Sylow subgroup of maximal order q: the bracket is
    min(2, [N(P):P]) * q <= acat+1 <= 3q, so [lower+1, upper+1] must be a
    subinterval.  Only defined for non-prime-power orders.
    """
    if largest_prime_power_divisor(G.order) == G.order:
        raise InputError("bracket requires non-prime-power order")
    dat = data if data is not None else prime_data(G)
    q = largest_prime_power_divisor(G.order)
    d = next(x for x in dat if x.sylow_order == q)
    coef = 1 if d.self_normalizing else 2
    lo, hi = lower_bound(G, dat) + 1, upper_bound(G) + 1
    return coef * q <= lo and hi <= 3 * q


def proof_inequality_check(G: FiniteGroup,
                           config: RunConfig = DEFAULT_CONFIG) -> bool:
    """Exact rational inequalities underlying the 3q-1 upper bound.

    For every prime p | |G| and every 0 <= d < d_p: 1 + d/3 <= q / p^(s-d).
    Refinement at lattice level: every node H of depth d+1 satisfies
    floor(3q / |H|) - 2 >= d+1.
    """
    if largest_prime_power_divisor(G.order) == G.order:
        raise InputError("inequalities require non-prime-power order")
    q = largest_prime_power_divisor(G.order)
    for p, s in sorted(prime_factors(G.order).items()):
        lat = PIntersectionLattice(G, p, config)
        for d in range(lat.d_p):
            if Fraction(1) + Fraction(d, 3) > Fraction(q, p ** (s - d)):
                return False
        for H in lat.nodes:
            depth = lat.depths[H.mask]
            if (3 * q) // H.size - 2 < depth:
                return False
    return True


def acat_report(G: FiniteGroup, config: RunConfig = DEFAULT_CONFIG,
                certify: bool = False) -> AcatReport:
    """Assemble the full bounds report (optionally with a map certificate)."""
    if G.order == 1:
        return AcatReport(group_id=G.name, order=1, per_prime=[], q=1,
                          lower=0, upper=0, exact=0, a_special=1,
                          sharpness="Sharp")
    data = prime_data(G, config)
    lower = lower_bound(G, data)
    upper = upper_bound(G)
    if lower > upper:
        raise InvariantViolation(
            f"lower bound {lower} exceeds upper bound {upper} for {G.name}")
    exact = None
    if lower == upper:
        if lower != G.order - 1:
            raise InvariantViolation(
                f"bounds agree at {lower} != |G|-1; unexpected exact value")
        exact = lower
    prime_power = largest_prime_power_divisor(G.order) == G.order
    report = AcatReport(
        group_id=G.name,
        order=G.order,
        per_prime=data,
        q=largest_prime_power_divisor(G.order),
        lower=lower,
        upper=upper,
        exact=exact,
        a_special=a_special(G),
        sharpness=sharpness(G),
        range_consistent=None if prime_power else range_consistency(G, data),
        proof_inequalities=None if prime_power else
        proof_inequality_check(G, config),
    )
    if certify:
        from .equivariant import certified_upper_bound
        n, note = certified_upper_bound(G, config)
        report.certificate_n = n
        report.certificate_note = note
        if n is not None and not (report.lower <= n <= 3 * report.q - 1):
            raise InvariantViolation(
                f"certificate {n} outside [lower, 3q-1] for {G.name}")
    return report


def survey(max_order: int, config: RunConfig = DEFAULT_CONFIG
           ) -> List[AcatReport]:
    """Bounds report for every catalog group of order <= max_order."""
    from .groups import catalog, catalog_names
    return [acat_report(catalog(name), config)
            for name in catalog_names(max_order)]


SURVEY_COLUMNS = ["group", "order", "q", "a_special", "lower", "upper",
                  "sharpness", "depths"]


def survey_row(report: AcatReport) -> List[str]:
    depths = ";".join(f"{d.p}:{d.d_p}" for d in report.per_prime)
    return [
        report.group_id,
        str(report.order),
        str(report.q),
        "-" if report.a_special is None else str(report.a_special),
        str(report.lower),
        str(report.upper),
        report.sharpness,
        depths,
    ]
