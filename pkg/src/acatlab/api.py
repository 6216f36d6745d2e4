"""Request handlers shared by the HTTP service and the in-process CLI.

Each handler takes plain arguments plus a RunConfig and returns the
JSON-serializable payload that both front ends render.  Keeping them here
(with no web-framework imports) lets the command-line tool default to
in-process execution and switch to a remote server without changing shape.
"""

from __future__ import annotations

from .bounds import SURVEY_COLUMNS, acat_report, survey, survey_row
from .config import DEFAULT_CONFIG, CapExceeded, RunConfig
from .groups import group_from_spec
from .verify import run_suites


def analyze_payload(spec: str | dict, certify: bool = False,
                    config: RunConfig = DEFAULT_CONFIG) -> dict:
    """Full bounds report for one group, as the schema-1 JSON object."""
    G = group_from_spec(spec, config)
    return acat_report(G, config, certify=certify).to_json()


def survey_payload(max_order: int,
                   config: RunConfig = DEFAULT_CONFIG) -> dict:
    """One table row per catalog group of order <= max_order."""
    if max_order > config.order_cap:
        raise CapExceeded("order_cap", config.order_cap, max_order,
                          "survey bound")
    reports = survey(max_order, config)
    return {
        "schema": 1,
        "columns": list(SURVEY_COLUMNS),
        "rows": [survey_row(r) for r in reports],
    }


def verify_payload(suite: str,
                   config: RunConfig = DEFAULT_CONFIG) -> dict:
    """Run the named verification suite(s) and summarize the outcomes."""
    results = run_suites(suite, config)
    return {
        "schema": 1,
        "suite": suite,
        "passed": all(r.passed for r in results),
        "results": [r.to_json() for r in results],
    }
