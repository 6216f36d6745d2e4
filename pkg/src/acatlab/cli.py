"""Command-line front end: analysis reports, batch surveys, verification.

``acatlab analyze <spec|@file>`` prints the bounds report for one group,
``acatlab survey --max-order N`` a TSV table over the whole catalog, and
``acatlab verify <suite>`` runs a verification sweep (exit code 1 on any
counterexample).  ``acatlab serve`` starts the HTTP facade.  All commands
execute in-process by default; ``--server URL`` sends the same request to a
running service instance and renders its response, so the terminal tool is
a thin client of the HTTP interface.

Exit codes: 0 success, 1 verification failure, 2 input error, 3 cap
exceeded.  Output is a pure function of arguments, environment and config:
identical invocations produce byte-identical output at any ``--parallel``.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys
from pathlib import Path
from typing import Optional, Sequence

from .api import analyze_payload, survey_payload, verify_payload
from .config import (
    OUTPUT_FORMATS,
    AcatlabError,
    CapExceeded,
    InputError,
    InvariantViolation,
    RunConfig,
    VerificationFailure,
)


class _RemoteFailure(AcatlabError):
    """A domain error reported by a remote server, tagged with its kind."""

    def __init__(self, kind: str, message: str):
        self.kind = kind
        super().__init__(message)


# ---------------------------------------------------------------------------
# argument parsing


def _add_common(parser: argparse.ArgumentParser) -> None:
    """Shared flags, accepted both before and after the subcommand."""
    parser.add_argument("--format", choices=OUTPUT_FORMATS,
                        default=argparse.SUPPRESS,
                        help="output format (default: text)")
    parser.add_argument("--certify", action="store_true",
                        default=argparse.SUPPRESS,
                        help="run the construction-backed certificate "
                             "(analyze only)")
    parser.add_argument("--parallel", type=int, metavar="K",
                        default=argparse.SUPPRESS,
                        help="worker processes for verification sweeps")
    parser.add_argument("--seed", type=int, metavar="S",
                        default=argparse.SUPPRESS,
                        help="seed for sampled checks")
    parser.add_argument("--unsafe-caps", action="store_true",
                        default=argparse.SUPPRESS,
                        help="disable all resource caps")
    parser.add_argument("--server", metavar="URL",
                        default=argparse.SUPPRESS,
                        help="send the request to a running service instead "
                             "of computing in-process")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="acatlab",
        description="Bounds on the analog category of a finite group.")
    _add_common(parser)
    parser.set_defaults(format="text", certify=False, parallel=1, seed=0,
                        unsafe_caps=False, server=None)
    sub = parser.add_subparsers(dest="command", required=True)

    analyze = sub.add_parser(
        "analyze", help="bounds report for one group",
        description="Group spec: a catalog name (S3, C30, C2xC4), an inline "
                    "JSON object, or @file containing either.")
    analyze.add_argument("group", metavar="spec")
    _add_common(analyze)

    survey = sub.add_parser("survey",
                            help="bounds table over the group catalog")
    survey.add_argument("--max-order", type=int, required=True, metavar="N")
    _add_common(survey)

    verify = sub.add_parser("verify", help="run a verification suite")
    verify.add_argument("suite",
                        help="fixed-points | construction | lattice | all")
    _add_common(verify)

    serve = sub.add_parser("serve", help="start the HTTP service")
    serve.add_argument("--host", default="127.0.0.1")
    serve.add_argument("--port", type=int, default=8000)
    return parser


def _resolve_config(args: argparse.Namespace) -> RunConfig:
    config = RunConfig.from_environment()
    config = config.with_overrides(parallel=args.parallel, seed=args.seed,
                                   output_format=args.format)
    if args.unsafe_caps:
        config = config.uncapped()
    return config


# ---------------------------------------------------------------------------
# dispatch (in-process or remote)


def _group_spec(raw: str) -> str:
    if raw.startswith("@"):
        try:
            return Path(raw[1:]).read_text()
        except OSError as exc:
            raise InputError(f"cannot read group spec file: {exc}") from exc
    return raw


def _config_diff(config: RunConfig) -> dict:
    """The fields a remote server needs: everything changed from defaults."""
    base = RunConfig()
    return {
        f.name: getattr(config, f.name)
        for f in dataclasses.fields(RunConfig)
        if f.name != "output_format"
        and getattr(config, f.name) != getattr(base, f.name)
    }


def _open_client(url: str):
    import httpx
    return httpx.Client(base_url=url, timeout=3600.0)


def _remote(args: argparse.Namespace, config: RunConfig) -> dict:
    if args.command == "analyze":
        path = "/analyze"
        body: dict = {"group": _group_spec(args.group),
                      "certify": args.certify}
    elif args.command == "survey":
        path, body = "/survey", {"max_order": args.max_order}
    else:
        path, body = "/verify", {"suite": args.suite}
    patch = _config_diff(config)
    if patch:
        body["config"] = patch
    import httpx
    with _open_client(args.server) as client:
        try:
            response = client.post(path, json=body)
        except httpx.HTTPError as exc:
            raise _RemoteFailure("transport", f"server request failed: {exc}") from exc
        try:
            data = response.json()
        except ValueError as exc:
            raise _RemoteFailure("transport", f"server returned invalid JSON: {exc}") from exc
    if response.status_code >= 400:
        kind = data.get("kind") if isinstance(data, dict) else None
        if kind is None:
            kind = "input" if response.status_code in (400, 422) else "verify"
        message = data.get("error") if isinstance(data, dict) else None
        raise _RemoteFailure(kind, message or json.dumps(data))
    return data


def _dispatch(args: argparse.Namespace, config: RunConfig) -> dict:
    if args.server:
        return _remote(args, config)
    if args.command == "analyze":
        return analyze_payload(_group_spec(args.group), args.certify, config)
    if args.command == "survey":
        return survey_payload(args.max_order, config)
    return verify_payload(args.suite, config)


# ---------------------------------------------------------------------------
# rendering


def _cell(value) -> str:
    if value is None:
        return "-"
    if value is True:
        return "yes"
    if value is False:
        return "no"
    return str(value)


def _render_table(columns: Sequence[str], rows: Sequence[Sequence]) -> str:
    lines = ["\t".join(columns)]
    lines.extend("\t".join(str(c) for c in row) for row in rows)
    return "\n".join(lines)


def _depths(payload: dict) -> str:
    return ";".join(f"{d['p']}:{d['d_p']}" for d in payload["per_prime"])


_ANALYZE_KEYS = ("group", "order", "q", "a_special", "lower", "upper",
                 "exact", "sharpness", "range_consistent",
                 "proof_inequalities")


def _render_analyze_text(payload: dict) -> str:
    lines = [f"{key:<20}{_cell(payload[key])}" for key in _ANALYZE_KEYS]
    for d in payload["per_prime"]:
        lines.append(
            f"{'prime ' + str(d['p']):<20}"
            f"sylow_order {d['sylow_order']}  num_sylows {d['num_sylows']}  "
            f"self_normalizing {_cell(d['self_normalizing'])}  "
            f"d_p {d['d_p']}")
    if payload["certificate_note"] is not None:
        lines.append(f"{'certificate_n':<20}{_cell(payload['certificate_n'])}")
        lines.append(f"{'certificate_note':<20}{payload['certificate_note']}")
    return "\n".join(lines)


def _render_analyze_tsv(payload: dict) -> str:
    row = [payload["group"], payload["order"], payload["q"],
           _cell(payload["a_special"]), payload["lower"], payload["upper"],
           payload["sharpness"], _depths(payload)]
    columns = ["group", "order", "q", "a_special", "lower", "upper",
               "sharpness", "depths"]
    return _render_table(columns, [row])


def _render_verify_text(payload: dict) -> str:
    lines = []
    for res in payload["results"]:
        status = "PASS" if res["passed"] else "FAIL"
        lines.append(f"{res['suite']:<22}{status}  cases {res['cases']}  "
                     f"skipped {res['skipped']}  "
                     f"failures {len(res['failures'])}")
        for failure in res["failures"]:
            lines.append("  - " + json.dumps(failure, sort_keys=True))
    lines.append("result: " + ("PASS" if payload["passed"] else "FAIL"))
    return "\n".join(lines)


def _render_verify_tsv(payload: dict) -> str:
    columns = ["suite", "passed", "cases", "skipped", "failures"]
    rows = [[res["suite"], _cell(res["passed"]), res["cases"],
             res["skipped"], len(res["failures"])]
            for res in payload["results"]]
    return _render_table(columns, rows)


def _render(command: str, payload: dict, fmt: str) -> str:
    if fmt == "json":
        return json.dumps(payload, indent=2, sort_keys=True)
    if command == "analyze":
        return (_render_analyze_tsv(payload) if fmt == "tsv"
                else _render_analyze_text(payload))
    if command == "survey":
        # the table *is* the text rendering
        return _render_table(payload["columns"], payload["rows"])
    return (_render_verify_tsv(payload) if fmt == "tsv"
            else _render_verify_text(payload))


# ---------------------------------------------------------------------------
# entry point


def _serve(args: argparse.Namespace) -> int:
    import uvicorn
    uvicorn.run("acatlab.service:app", host=args.host, port=args.port)
    return 0


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "serve":
            return _serve(args)
        config = _resolve_config(args)
        payload = _dispatch(args, config)
    except _RemoteFailure as exc:
        print(f"error: {exc}", file=sys.stderr)
        return {"input": 2, "cap": 3}.get(exc.kind, 1)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except CapExceeded as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except (VerificationFailure, InvariantViolation) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    print(_render(args.command, payload, args.format))
    if args.command == "verify" and not payload["passed"]:
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
