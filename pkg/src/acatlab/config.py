"""Run configuration: resource caps, determinism knobs, and error types.

Caps exist so that desk-scale runs fail fast with a clear message instead of
grinding on an enumeration that was never going to finish.  Every cap can be
overridden per call, via the ``ACATLAB_CAPS`` environment variable (a JSON
object), or disabled wholesale with the CLI flag ``--unsafe-caps``.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field, fields, replace

CAPS_ENV_VAR = "ACATLAB_CAPS"

OUTPUT_FORMATS = ("text", "json", "tsv")

# A value large enough that no desk-scale enumeration reaches it, used when
# caps are disabled.  Not infinity, so arithmetic on caps stays integral.
UNCAPPED = 2**62


class AcatlabError(Exception):
    """Base class for all errors raised by this package."""


class InputError(AcatlabError):
    """Malformed input: bad group spec, non-group table, invalid argument."""


class CapExceeded(AcatlabError):
    """A resource cap would be exceeded; carries the cap name and demand."""

    def __init__(self, cap_name: str, limit: int, demanded: int, detail: str = ""):
        self.cap_name = cap_name
        self.limit = limit
        self.demanded = demanded
        msg = f"cap {cap_name!r} exceeded: need {demanded}, limit {limit}"
        if detail:
            msg += f" ({detail})"
        super().__init__(msg)


class InvariantViolation(AcatlabError):
    """A structural invariant that should hold mathematically failed."""


class VerificationFailure(AcatlabError):
    """A verification suite found a counterexample."""


@dataclass(frozen=True)
class RunConfig:
    """Caps and determinism settings shared by library, CLI and service."""

    # Largest group order accepted by constructors.
    order_cap: int = 512
    # Orders up to this bound get an exhaustive associativity check; larger
    # tables are checked on seeded random triples instead.
    assoc_exhaustive_cap: int = 128
    assoc_samples: int = 10_000
    # Largest number of faces a single simplicial complex may have.
    face_cap: int = 2_000_000
    # Largest chain-group rank accepted by the homology kernel.
    homology_rank_cap: int = 20_000
    # Face budget per complex inside bulk verification sweeps.  Smaller than
    # face_cap on purpose: sweeps visit thousands of complexes.
    verify_face_cap: int = 20_000
    # Order bound for the brute-force subgroup enumeration oracle.
    subgroup_enum_cap: int = 24
    # RNG seed for sampled checks.
    seed: int = 0
    # Worker count for embarrassingly parallel verification loops.
    parallel: int = 1
    # Rendering format for reports ("text", "json" or "tsv").
    output_format: str = "text"

    def __post_init__(self):
        if self.output_format not in OUTPUT_FORMATS:
            raise InputError(f"unknown output format {self.output_format!r}")

    def with_overrides(self, **kwargs) -> "RunConfig":
        return replace(self, **kwargs)

    def uncapped(self) -> "RunConfig":
        caps = {
            f.name: UNCAPPED
            for f in fields(self)
            if f.name.endswith("_cap") or f.name.endswith("cap")
        }
        return replace(self, **caps)

    @staticmethod
    def from_environment(base: "RunConfig" | None = None) -> "RunConfig":
        """Apply ``ACATLAB_CAPS`` (a JSON object of field overrides) if set."""
        cfg = base or RunConfig()
        raw = os.environ.get(CAPS_ENV_VAR)
        if not raw:
            return cfg
        try:
            data = json.loads(raw)
        except json.JSONDecodeError as exc:
            raise InputError(f"{CAPS_ENV_VAR} is not valid JSON: {exc}") from exc
        if not isinstance(data, dict):
            raise InputError(f"{CAPS_ENV_VAR} must be a JSON object")
        known = {f.name for f in fields(RunConfig)}
        unknown = sorted(set(data) - known)
        if unknown:
            raise InputError(f"unknown cap name(s) in {CAPS_ENV_VAR}: {unknown}")
        for name, value in data.items():
            if not isinstance(value, int) or value < 0:
                raise InputError(f"cap {name!r} must be a non-negative integer")
        return replace(cfg, **data)


DEFAULT_CONFIG = RunConfig()
