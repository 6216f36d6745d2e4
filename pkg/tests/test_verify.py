"""Verification sweeps: corpus sizes, failure reporting, determinism."""

from __future__ import annotations

import json

import pytest

import acatlab.verify as verify
from acatlab.config import DEFAULT_CONFIG, InputError, VerificationFailure
from acatlab.enumeration import all_subgroups
from acatlab.groups import catalog, catalog_names
from acatlab.verify import (
    CONSTRUCTION_GROUPS,
    SuiteResult,
    connectivity_suite,
    construction_suite,
    fixed_point_suite,
    lattice_suite,
    run_suites,
)


def case_count(max_order: int) -> int:
    """Oracle for the sweep shape: one case per (group, subgroup, n)."""
    total = 0
    for name in catalog_names(max_order):
        G = catalog(name)
        total += len(all_subgroups(G, limit=G.order)) * G.order
    return total


def test_fixed_point_suite_small_corpus():
    r = fixed_point_suite(max_order=8)
    assert r.suite == "fixed-point-formula"
    assert r.passed
    assert r.cases == case_count(8) == 266
    assert r.skipped == 0 and r.failures == []


def test_connectivity_suite_small_corpus():
    r = connectivity_suite(max_order=8)
    assert r.suite == "connectivity"
    assert r.passed
    assert r.cases == 266 and r.skipped == 0


def test_lattice_suite_full_corpus():
    r = lattice_suite()
    assert r.suite == "lattice"
    assert r.passed
    assert r.cases == 848 and r.skipped == 0


def test_suite_json_shape():
    r = SuiteResult(suite="demo", cases=3, skipped=1,
                    failures=[{"group": "C2"}])
    assert not r.passed
    assert r.to_json() == {
        "schema": 1,
        "suite": "demo",
        "passed": False,
        "cases": 3,
        "skipped": 1,
        "failures": [{"group": "C2"}],
    }


def test_fixed_point_suite_reports_counterexamples(monkeypatch):
    def broken(G, H, n, config, with_connectivity=True):
        raise VerificationFailure("injected defect")

    monkeypatch.setattr(verify, "verify_fixed_model", broken)
    r = fixed_point_suite(max_order=2)
    assert not r.passed
    assert len(r.failures) == r.cases == 4
    entry = r.failures[0]
    assert entry["group"] == "C2" and entry["error"] == "injected defect"
    assert entry["subgroup"] == [0] and entry["n"] == 0


def test_connectivity_suite_reports_counterexamples(monkeypatch):
    monkeypatch.setattr(verify, "expected_fixed_connectivity",
                        lambda G, H, n: 99)
    r = connectivity_suite(max_order=2)
    assert len(r.failures) == r.cases == 4
    assert r.failures[0]["expected"] == 99
    assert r.failures[0]["connectivity"] in (-2, -1, 0,
                                             "contractible-by-fullness")


def test_cap_gated_cases_are_skipped_not_failed():
    tight = DEFAULT_CONFIG.with_overrides(verify_face_cap=5)
    r = fixed_point_suite(tight, max_order=4)
    assert r.passed
    assert r.skipped > 0
    assert r.cases == case_count(4)


def test_parallel_run_is_deterministic():
    serial = fixed_point_suite(max_order=6).to_json()
    pooled = fixed_point_suite(
        DEFAULT_CONFIG.with_overrides(parallel=2), max_order=6).to_json()
    assert json.dumps(serial, sort_keys=True) == \
        json.dumps(pooled, sort_keys=True)


def test_construction_suite_records_obstructions():
    r = construction_suite(groups=("S3",))
    assert r.suite == "construction"
    # the 2-primary build succeeds; the 3-primary build cannot reach
    # p-acyclicity (each new orbit moves the fixed-set Euler characteristic
    # of the order-3 subgroup by a multiple of 2), and assembly inherits it
    assert r.cases == 3 and not r.passed
    assert [f["check"] for f in r.failures] == ["one-prime-build", "assembly"]
    assert r.failures[0]["p"] == 3
    assert "order 3" in r.failures[0]["error"]


def test_construction_corpus_is_pinned():
    assert CONSTRUCTION_GROUPS == ("S3", "C6", "D5", "A4", "D6", "C30")


def test_dispatch():
    results = run_suites("lattice")
    assert [r.suite for r in results] == ["lattice"]
    with pytest.raises(InputError, match="unknown suite"):
        run_suites("bogus")
