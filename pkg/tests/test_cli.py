"""Command-line contract: examples, exit codes, formats, determinism."""

from __future__ import annotations

import json

import pytest

import acatlab.api as api
import acatlab.cli as cli
from acatlab.verify import SuiteResult


def run(capsys, *argv):
    code = cli.main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_analyze_catalog_name(capsys):
    code, out, err = run(capsys, "analyze", "S3")
    assert code == 0 and err == ""
    lines = dict()
    for line in out.strip().splitlines():
        key, _, value = line.partition(" ")
        lines[key] = value.strip()
    assert lines["lower"] == "5" and lines["upper"] == "5"
    assert lines["exact"] == "5"
    assert lines["a_special"] == "2"
    assert lines["sharpness"] == "Sharp"
    assert "prime" in lines  # per-prime rows are rendered


def test_analyze_non_sharp_tsv(capsys):
    code, out, _ = run(capsys, "analyze", "C45", "--format", "tsv")
    assert code == 0
    header, row = out.strip().splitlines()
    cells = dict(zip(header.split("\t"), row.split("\t")))
    assert cells["upper"] == "26"
    assert cells["sharpness"] == "NotSharp"
    assert cells["depths"] == "3:1;5:1"


def test_analyze_prime_power_json(capsys):
    code, out, _ = run(capsys, "--format", "json", "analyze", "C4")
    payload = json.loads(out)
    assert code == 0
    assert payload["schema"] == 1
    assert payload["exact"] == 3
    assert payload["a_special"] == 1
    assert payload["sharpness"] == "Sharp"


def test_analyze_certify_reports_absent_certificate(capsys):
    code, out, _ = run(capsys, "--format", "json", "analyze", "C6",
                       "--certify")
    payload = json.loads(out)
    assert code == 0
    assert payload["certificate_n"] is None
    assert payload["certificate_note"].startswith("construction failed")
    # the text rendering shows the certificate lines only when requested
    code, out, _ = run(capsys, "analyze", "C6", "--certify")
    assert "certificate_note" in out
    code, out, _ = run(capsys, "analyze", "C6")
    assert "certificate_note" not in out


def test_analyze_inline_json_spec(capsys):
    code, out, _ = run(capsys, "--format", "json", "analyze",
                       '{"type": "cyclic", "n": 45}')
    assert code == 0
    assert json.loads(out)["upper"] == 26


def test_analyze_spec_from_file(capsys, tmp_path):
    path = tmp_path / "group.json"
    path.write_text('{"type": "catalog", "name": "D5"}')
    code, out, _ = run(capsys, "--format", "json", "analyze", f"@{path}")
    assert code == 0
    assert json.loads(out)["exact"] == 9


def test_analyze_missing_spec_file(capsys, tmp_path):
    code, out, err = run(capsys, "analyze", f"@{tmp_path}/nope.json")
    assert code == 2
    assert "cannot read group spec file" in err


def test_analyze_unknown_group_is_input_error(capsys):
    code, _, err = run(capsys, "analyze", "NOPE")
    assert code == 2
    assert "unknown catalog group" in err


def test_cap_exceeded_and_unsafe_caps(capsys):
    code, _, err = run(capsys, "analyze", '{"type": "cyclic", "n": 600}')
    assert code == 3 and "order_cap" in err
    code, out, _ = run(capsys, "analyze", '{"type": "cyclic", "n": 600}',
                       "--unsafe-caps")
    assert code == 0
    assert out.startswith("group")


def test_caps_environment_variable(capsys, monkeypatch):
    monkeypatch.setenv("ACATLAB_CAPS", '{"order_cap": 4}')
    code, _, err = run(capsys, "analyze", "C6")
    assert code == 3 and "order_cap" in err
    monkeypatch.setenv("ACATLAB_CAPS", "not json")
    code, _, err = run(capsys, "analyze", "C6")
    assert code == 2 and "not valid JSON" in err


def test_survey_table(capsys):
    code, out, _ = run(capsys, "survey", "--max-order", "12")
    assert code == 0
    lines = out.strip().splitlines()
    assert lines[0].split("\t") == ["group", "order", "q", "a_special",
                                    "lower", "upper", "sharpness", "depths"]
    names = [line.split("\t")[0] for line in lines[1:]]
    for expected in ["C2", "C12", "S3", "D4", "D5", "D6", "Q8", "A4"]:
        assert expected in names
    assert len(names) == 17


def test_survey_empty_table_keeps_header(capsys):
    code, out, _ = run(capsys, "survey", "--max-order", "1")
    assert code == 0
    assert out.strip().splitlines() == [
        "group\torder\tq\ta_special\tlower\tupper\tsharpness\tdepths"]


def test_survey_above_order_cap(capsys):
    code, _, err = run(capsys, "survey", "--max-order", "600")
    assert code == 3 and "order_cap" in err


def test_survey_c30_row(capsys):
    code, out, _ = run(capsys, "survey", "--max-order", "30")
    row = [l for l in out.splitlines() if l.startswith("C30\t")]
    assert len(row) == 1
    cells = row[0].split("\t")
    assert cells[4] == "9" and cells[5] == "14"  # lower, upper


def test_verify_unknown_suite(capsys):
    code, _, err = run(capsys, "verify", "bogus")
    assert code == 2
    assert "unknown suite" in err


def test_verify_lattice_passes(capsys):
    code, out, _ = run(capsys, "verify", "lattice")
    assert code == 0
    assert out.splitlines()[-1] == "result: PASS"
    assert "lattice" in out and "PASS" in out


def test_verify_failure_exit_code(capsys, monkeypatch):
    failing = SuiteResult(suite="demo", cases=2,
                          failures=[{"group": "C2", "error": "boom"}])
    monkeypatch.setattr(api, "run_suites", lambda name, config: [failing])
    code, out, _ = run(capsys, "verify", "lattice")
    assert code == 1
    assert out.splitlines()[-1] == "result: FAIL"
    assert '"error": "boom"' in out
    code, out, _ = run(capsys, "verify", "lattice", "--format", "tsv")
    assert code == 1
    assert out.strip().splitlines()[1] == "demo\tno\t2\t0\t1"


def test_output_is_deterministic(capsys):
    first = run(capsys, "--format", "json", "analyze", "C45")
    second = run(capsys, "--format", "json", "analyze", "C45")
    assert first == second
    first = run(capsys, "survey", "--max-order", "16")
    second = run(capsys, "survey", "--max-order", "16")
    assert first == second


def test_parallelism_does_not_change_output(capsys):
    serial = run(capsys, "verify", "lattice")
    pooled = run(capsys, "verify", "lattice", "--parallel", "2")
    assert serial == pooled


def test_flags_accepted_after_subcommand(capsys):
    before = run(capsys, "--format", "json", "analyze", "C6")
    after = run(capsys, "analyze", "C6", "--format", "json")
    assert before == after


def test_remote_mode_matches_in_process(capsys, monkeypatch):
    from fastapi.testclient import TestClient

    import acatlab.service as service

    monkeypatch.setattr(cli, "_open_client",
                        lambda url: TestClient(service.app))
    local = run(capsys, "--format", "json", "analyze", "C45")
    remote = run(capsys, "--format", "json", "analyze", "C45",
                 "--server", "http://testserver")
    assert local == remote
    code, _, err = run(capsys, "analyze", "NOPE", "--server", "http://t")
    assert code == 2 and "unknown catalog group" in err
    code, _, err = run(capsys, "analyze", '{"type": "cyclic", "n": 600}',
                       "--server", "http://t")
    assert code == 3 and "order_cap" in err


def test_remote_mode_unreachable_server(capsys):
    code, out, err = run(capsys, "analyze", "S3",
                         "--server", "http://127.0.0.1:1")
    assert code == 1
    assert out == ""
    assert err.startswith("error: server request failed:")
