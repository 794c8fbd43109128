import json
import math

import pytest

from littlewood.cli import EXIT_FAIL, EXIT_OK, EXIT_USAGE, main
from littlewood.fixtures import FIRST_SOLUTION
from littlewood.polysys import PolynomialSystem, build_generic_distance_polynomial, build_littlewood_system


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_generate_text_and_json_round_trip(tmp_path, capsys):
    text, js = tmp_path / "sys.txt", tmp_path / "sys.json"
    assert run(capsys, "generate", "--output", str(text))[0] == EXIT_OK
    assert run(capsys, "generate", "--format", "json", "--output", str(js))[0] == EXIT_OK
    a = PolynomialSystem.loads(text.read_text())
    b = PolynomialSystem.loads(js.read_text())
    assert a == b == build_littlewood_system()
    assert len(a) == 20 and a.nvars == 20


def test_generate_generic(capsys):
    code, out, _ = run(capsys, "generate", "--generic", "--format", "json")
    doc = json.loads(out)
    assert code == EXIT_OK and len(doc["terms"]) == 84 and doc["degree"] == 6
    assert len(build_generic_distance_polynomial()) == 84


def test_manifest_written_and_deterministic(tmp_path, capsys):
    outputs = []
    for k in range(2):
        out = tmp_path / f"run{k}.json"
        run(capsys, "angles", "--fixture", "first", "--format", "json", "--output", str(out))
        doc = json.loads((tmp_path / f"run{k}.json.manifest.json").read_text())
        doc.pop("timestamps")
        doc["outputs"] = []
        doc["options"].pop("output")
        outputs.append(json.dumps(doc, sort_keys=True))
        assert json.loads(out.read_text())["angles"]
    assert outputs[0] == outputs[1]


def test_verify_first_all_checks(capsys):
    code, out, _ = run(capsys, "verify", "--fixture", "first", "--checks", "all")
    assert code == EXIT_OK
    assert out.count("PASS") == 5 and "FAIL" not in out


def test_verify_second_angles(capsys):
    code, out, _ = run(capsys, "verify", "--fixture", "second", "--checks", "angles", "--format", "json")
    doc = json.loads(out)
    assert code == EXIT_OK and doc["passed"]
    code, out, _ = run(capsys, "angles", "--fixture", "second", "--format", "json")
    angles = json.loads(out)["angles"]
    assert len(angles) == 21 and any(abs(a - math.pi / 2) < 1e-12 for a in angles)


def test_verify_corrupted_solution(tmp_path, capsys):
    values = list(FIRST_SOLUTION)
    values[5] = "0"
    path = tmp_path / "bad.json"
    path.write_text(json.dumps({"values": values, "precision_digits": 12}))
    code, out, _ = run(capsys, "verify", "--input", str(path), "--format", "json")
    doc = json.loads(out)
    assert code == EXIT_FAIL
    results = {r["check"]: r["passed"] for r in doc["checks"]}
    assert set(results) == {"residual", "distance", "alpha", "krawczyk", "angles"}
    assert results["residual"] is False


def test_verify_usage_errors(tmp_path, capsys):
    assert run(capsys, "verify", "--checks", "bogus")[0] == EXIT_USAGE
    assert run(capsys, "verify", "--input", str(tmp_path / "missing.json"))[0] == EXIT_USAGE
    with pytest.raises(SystemExit) as exc:
        main(["verify", "--fixture", "third"])
    assert exc.value.code == EXIT_USAGE


def test_solve_toy(capsys):
    code, out, _ = run(capsys, "solve", "toy", "--format", "json")
    doc = json.loads(out)
    assert code == EXIT_OK
    assert doc["summary"]["bkk"] == 4 and doc["summary"]["real"] == 4
    assert len(doc["endpoints"]) == 4
    for rec in doc["endpoints"]:
        assert rec["status"] == "converged" and rec["t"] == 0.0
        assert all(len(z) == 2 for z in rec["coordinates"])


def test_solve_from_file(tmp_path, capsys):
    path = tmp_path / "q.txt"
    path.write_text("# variables: x\n+1 * x^2 -2\n")
    code, out, _ = run(capsys, "solve", str(path), "--format", "json")
    assert code == EXIT_OK and json.loads(out)["summary"]["real"] == 2


def test_solve_count_only(capsys):
    code, out, _ = run(capsys, "solve", "toy", "--max-paths", "0", "--format", "json")
    doc = json.loads(out)
    assert code == EXIT_OK and doc["summary"]["bkk"] == 4 and not doc["summary"]["tracked"]
    assert doc["endpoints"] == []


def test_solve_refuses_littlewood(capsys):
    code, out, err = run(capsys, "solve", "littlewood")
    assert code == EXIT_USAGE and out == ""
    assert "refusing" in err and "180,734" in err and "121,098,993,664" in err


def test_refine_writes_solution_file(tmp_path, capsys):
    out = tmp_path / "r.json"
    code, _, _ = run(capsys, "refine", "--fixture", "first", "--truncate", "2", "--output", str(out))
    doc = json.loads(out.read_text())
    assert code == EXIT_OK and doc["report"]["converged"]
    assert len(doc["values"]) == 20 and doc["variables"][0] == "x3"
    code, _, _ = run(capsys, "verify", "--input", str(out), "--checks", "residual,distance")
    assert code == EXIT_OK


def test_refine_extended_precision(tmp_path, capsys):
    out = tmp_path / "r50.json"
    run(capsys, "refine", "--fixture", "second", "--precision-digits", "50", "--output", str(out))
    doc = json.loads(out.read_text())
    assert doc["precision_digits"] == 50
    assert len(doc["values"][0].replace("-", "").replace(".", "")) >= 50


def test_certify_alpha_paper_fixtures(capsys):
    code, out, _ = run(capsys, "certify-alpha", "--paper-fixtures", "--format", "json")
    rows = json.loads(out)["certificates"]
    assert code == EXIT_OK and len(rows) == 2
    for row in rows:
        assert row["threshold_check"] and row["real"] and row["isolated"]
        assert all(0.01 <= r <= 100 for r in row["ratio"].values())


def test_certify_alpha_too_few_digits_fails(capsys):
    code, out, _ = run(capsys, "certify-alpha", "--fixture", "first", "--truncate", "11")
    assert code == EXIT_FAIL and "False" in out


def test_certify_krawczyk(capsys):
    code, out, _ = run(capsys, "certify-krawczyk", "--fixture", "first", "--format", "json")
    doc = json.loads(out)
    assert code == EXIT_OK and doc["contained"] and doc["radius"] == 1e-8
    assert len(doc["per_component"]) == 20


def test_angles_compare(capsys):
    code, out, _ = run(capsys, "angles", "--compare", "--format", "json")
    shared = json.loads(out)["shared_first_second"]
    assert code == EXIT_OK and len(shared) == 1 and abs(shared[0] - math.pi / 2) < 1e-12


@pytest.mark.parametrize("name", ["first", "second"])
def test_export_geometry(capsys, name):
    code, out, _ = run(capsys, "export-geometry", "--fixture", name)
    doc = json.loads(out)
    assert code == EXIT_OK and doc["radius"] == 1.0
    assert len(doc["axes"]) == 7 and len(doc["contacts"]) == 21
    for c in doc["contacts"]:
        assert all(abs(d - 1.0) <= 1e-8 for d in c["distance_to_axes"])
    assert doc["contacts"][0]["pair"] == [1, 2] and doc["contacts"][0]["point"] == [0.0, 0.0, 0.0]
