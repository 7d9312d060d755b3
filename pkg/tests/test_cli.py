import json

import pytest

from csmkit.cases import CaseError, load_casefile
from csmkit.cli import main

LINES = {"n": 2, "hyperplanes": [[1, 0, 0]]}
OTHER = {"n": 2, "hyperplanes": [[0, 1, 0]]}


def write(tmp_path, cases, name="cases.json"):
    path = tmp_path / name
    path.write_text(json.dumps({"cases": cases}))
    return path


def report(path):
    return [json.loads(line) for line in path.read_text().splitlines()]


def lines_case(kind="intersection-formula", **extra):
    return {"id": f"lines-{kind}", "kind": kind, "inputs": {"A": LINES, "B": OTHER}, **extra}


def test_golden_lines_exit_zero(tmp_path, capsys):
    path = write(tmp_path, [
        lines_case(expect={"lhs": [1, 0, 0], "rhs": [1, 0, 0], "equal": True}),
        lines_case("index-formula", expect={"lhs": 1, "rhs": 1}),
        lines_case("splayed-check", expect={"splayed": True}),
    ])
    assert main(["run", str(path)]) == 0
    entries = report(tmp_path / "cases.report.jsonl")
    assert [e["status"] for e in entries] == ["ok"] * 3
    assert entries[0]["tag"] == "intersection-formula-ambient"
    assert entries[0]["result"]["hypothesis_status"] == "hypothesis certified"
    out = capsys.readouterr().out
    assert "identity holds" in out and "3 cases, 3 ok, 0 failing" in out


def test_empty_casefile(tmp_path):
    path = write(tmp_path, [])
    assert main(["run", str(path), "--json", str(tmp_path / "r.jsonl")]) == 0
    assert (tmp_path / "r.jsonl").read_text() == ""


def test_same_line_index_is_refused(tmp_path):
    case = {"id": "same", "kind": "index-formula", "inputs": {"A": LINES, "B": LINES}}
    path = write(tmp_path, [case])
    assert main(["run", str(path)]) == 1
    [e] = report(tmp_path / "cases.report.jsonl")
    assert e["status"] == "refused" and e["witness"]["covector"] == ["1", "0", "0"]


def test_same_line_intersection_is_reported_not_failed(tmp_path, capsys):
    case = {"id": "same", "kind": "intersection-formula", "inputs": {"A": LINES, "B": LINES}}
    assert main(["run", str(write(tmp_path, [case]))]) == 0
    [e] = report(tmp_path / "cases.report.jsonl")
    assert e["result"]["hypothesis_status"] == "hypothesis not certified"
    assert e["result"]["status"] == "identity fails"
    assert "hypothesis not certified" in capsys.readouterr().out


def test_mismatch_exits_one(tmp_path):
    path = write(tmp_path, [lines_case(expect={"lhs": [2, 0, 0]})])
    assert main(["run", str(path)]) == 1
    [e] = report(tmp_path / "cases.report.jsonl")
    assert e["status"] == "mismatch" and e["mismatches"]


@pytest.mark.parametrize("doc", [
    "not json",
    json.dumps({"cases": [{"id": "x", "kind": "nope", "inputs": {}}]}),
    json.dumps({"cases": [{"id": "x", "kind": "vrr", "inputs": {"A": LINES}}]}),
    json.dumps({"cases": [{"id": "x", "kind": "vrr", "inputs": {"A": LINES, "map": {"kind": "twist"}}}]}),
    json.dumps({"cases": [{"id": "x", "kind": "intersection-formula", "inputs": {"A": {"n": 2, "hyperplanes": [[0, 0, 0]]}, "B": LINES}}]}),
    json.dumps({"cases": [lines_case(), lines_case()]}),
    json.dumps({"cases": [{"id": "x", "kind": "csm-compute", "inputs": {"P": "missing.json"}}]}),
    json.dumps({"cases": [{"id": "x", "kind": "vrr", "inputs": {"A": LINES, "map": {"kind": "embedding", "matrix": [[1, 0, 0], [2, 0, 0]]}}}]}),
])
def test_parse_errors_exit_two(tmp_path, doc, capsys):
    path = tmp_path / "bad.json"
    path.write_text(doc)
    assert main(["run", str(path)]) == 2
    assert "error:" in capsys.readouterr().err
    assert not (tmp_path / "bad.report.jsonl").exists()


def test_bad_jobs(tmp_path):
    assert main(["run", str(write(tmp_path, [])), "--jobs", "0"]) == 2


def test_input_paths_are_relative_to_casefile(tmp_path):
    (tmp_path / "sub").mkdir()
    (tmp_path / "sub" / "a.json").write_text(json.dumps(LINES))
    path = write(tmp_path, [{"id": "c", "kind": "csm-compute", "inputs": {"P": "sub/a.json"}}])
    [case] = load_casefile(path)
    assert case.inputs["P"] == LINES
    assert main(["run", str(path)]) == 0
    [e] = report(tmp_path / "cases.report.jsonl")
    assert e["result"]["csm"]["coeffs"] == [2, 1, 0]
    assert e["result"]["euler_integral"] == 2
    assert e["result"]["char_poly"] == [0, -1, 1]


def test_vrr_and_noncharacteristic_cases(tmp_path):
    point = {"n": 2, "hyperplanes": [[1, 0, 0], [0, 1, 0]]}
    through = {"kind": "embedding", "matrix": [[0, 0, 1], [1, 1, 1]]}
    cases = [
        {"id": "proj", "kind": "vrr", "inputs": {"A": point, "map": {"kind": "projection", "fiber_dim": 1}},
         "expect": {"equal": True}},
        {"id": "comp", "kind": "vrr", "inputs": {"A": point, "map": {"kind": "composite", "maps": [
            {"kind": "projection", "fiber_dim": 2},
            {"kind": "embedding", "matrix": [[1, 2, 3], [1, -1, 2]]}]}}, "expect": {"equal": True}},
        {"id": "nc", "kind": "noncharacteristic-check",
         "inputs": {"A": point, "alpha": {"terms": [{"flat": [0, 1], "coeff": 1}]}, "map": through},
         "expect": {"noncharacteristic": False}},
        {"id": "diag", "kind": "noncharacteristic-check", "inputs": {"A": LINES, "B": OTHER},
         "expect": {"noncharacteristic": True}},
    ]
    assert main(["run", str(write(tmp_path, cases))]) == 0


def test_errors_in_evaluation_are_reported(tmp_path):
    # a poset with neither flats nor Mather data: csm is not computable
    poset = {"ambient_n": 1, "strata": [{"id": "P", "dim": 1, "chi_c": 2, "class": [0, 1], "below": []}]}
    case = {"id": "nomather", "kind": "csm-compute", "inputs": {"P": poset, "alpha": {"values": {"P": 1}}}}
    assert main(["run", str(write(tmp_path, [case]))]) == 1
    [e] = report(tmp_path / "cases.report.jsonl")
    assert e["status"] == "error" and e["error"].startswith("MissingDataError")


@pytest.mark.parametrize("family", ["generic-arrangement-pair", "splayed-coordinate-pair", "flag-of-flats"])
def test_generate_then_run_is_deterministic(tmp_path, family, capsys):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    assert main(["generate", family, "--n", "2", "--seed", "7", "-o", str(a)]) == 0
    assert main(["generate", family, "--n", "2", "--seed", "7", "-o", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()
    assert main(["run", str(a)]) == 0
    assert main(["run", str(a), "--json", str(tmp_path / "again.jsonl")]) == 0
    assert main(["run", str(a), "--jobs", "3", "--json", str(tmp_path / "par.jsonl")]) == 0
    first = (tmp_path / "a.report.jsonl").read_bytes()
    assert first == (tmp_path / "again.jsonl").read_bytes() == (tmp_path / "par.jsonl").read_bytes()


def test_generate_to_stdout_and_errors(capsys):
    assert main(["generate", "flag-of-flats", "--n", "1", "--seed", "0", "--count", "1"]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["family"] == "flag-of-flats" and len(doc["cases"]) == 1
    assert main(["generate", "flag-of-flats", "--n", "0", "--seed", "0"]) == 2
    with pytest.raises(SystemExit):
        main(["generate", "bogus", "--n", "1", "--seed", "0"])
