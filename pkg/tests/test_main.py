import json

import pytest

from app import config
from app.main import EXIT_INVALID_INPUT, EXIT_NOT_CONVERGED, EXIT_OK, main
from tests.conftest import PURE, STATES


def _run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_analyze_entangled_state(capsys):
    code, out, _ = _run(capsys, "analyze", "--input", str(STATES / "rho_ku.json"))
    assert code == EXIT_OK
    doc = json.loads(out)
    assert doc["verdict"] == "Entangled"
    assert doc["ppt"]["is_ppt"] is False
    assert doc["ppt"]["min_eigenvalue"] < 0
    assert "negative_eigenvector" in doc["ppt"]
    assert doc["absolute_separability"]["holds"] is False
    assert doc["label"] == "rho_KU"


def test_analyze_separable_state(capsys):
    code, out, _ = _run(capsys, "analyze", "--input", str(STATES / "rho_u.json"))
    assert code == EXIT_OK
    doc = json.loads(out)
    assert doc["verdict"] == "Separable"
    assert doc["trace"] == pytest.approx(1.0)

    code, out, _ = _run(capsys, "analyze", "--input", str(STATES / "rho_v.json"))
    assert code == EXIT_OK
    doc = json.loads(out)
    assert doc["verdict"] == "Separable"
    assert doc["kz"]["member"] is True
    assert doc["spectrum"] == pytest.approx([3 / 8, 3 / 8, 1 / 8, 1 / 8], abs=1e-12)


def test_analyze_rejects_bad_files(capsys, tmp_path):
    broken = tmp_path / "broken.json"
    broken.write_text('{"dims": [2, 1]}', encoding="utf-8")
    code, _, err = _run(capsys, "analyze", "--input", str(broken))
    assert code == EXIT_INVALID_INPUT
    assert err.startswith("[error]")

    negative = tmp_path / "negative.json"
    negative.write_text(
        json.dumps({"dims": [2, 1], "matrix": [[[1.5, 0], [0, 0]], [[0, 0], [-0.5, 0]]]}),
        encoding="utf-8",
    )
    code, _, err = _run(capsys, "analyze", "--input", str(negative))
    assert code == EXIT_INVALID_INPUT
    assert "positive semidefinite" in err

    code, _, _ = _run(capsys, "analyze", "--input", str(tmp_path / "missing.json"))
    assert code == EXIT_INVALID_INPUT


def test_analyze_pdf_to_file(capsys, tmp_path):
    target = tmp_path / "report.pdf"
    code, out, _ = _run(
        capsys, "analyze", "--input", str(STATES / "rho_kv.json"), "--format", "pdf", "--output", str(target)
    )
    assert code == EXIT_OK
    assert out == ""
    assert target.read_bytes().startswith(b"%PDF")


def test_tailor(capsys):
    code, out, _ = _run(
        capsys, "tailor", "--input", str(PURE / "zero_2x2.json"), "--k", "2", "--l", "2", "--lambdas", "0.8,0.6"
    )
    assert code == EXIT_OK
    checks = json.loads(out)["checks"]
    assert checks["schmidt_match"] is True
    assert checks["span_dim"] == 16
    assert checks["independent"] is True

    code, out, _ = _run(
        capsys,
        "tailor",
        "--input", str(PURE / "zero_2x2.json"),
        "--k", "2", "--l", "2",
        "--lambdas", "0.8,0.6",
        "--unitary", "closed-form",
    )
    assert code == EXIT_OK
    assert json.loads(out)["checks"]["schmidt_match"] is True


def test_tailor_errors(capsys):
    code, _, err = _run(
        capsys, "tailor", "--input", str(PURE / "zero_2x2.json"), "--k", "2", "--l", "2", "--lambdas", "0.8,0.8"
    )
    assert code == EXIT_INVALID_INPUT
    assert "[error]" in err
    code, _, _ = _run(
        capsys, "tailor", "--input", str(PURE / "zero_2x3.json"), "--k", "2", "--l", "3",
        "--lambdas", "0.8,0.6", "--unitary", "closed-form",
    )
    assert code == EXIT_INVALID_INPUT


def test_witness_of_a_separable_state(capsys):
    code, out, err = _run(capsys, "witness", "--input", str(STATES / "tracial_2x2.json"))
    assert code == EXIT_OK
    doc = json.loads(out)
    assert doc["message"] == "no witness: state separable (distance 0)"
    assert "[run] seed=" in err


def test_witness_of_phi_plus(capsys, monkeypatch):
    monkeypatch.setattr(config, "WITNESS_MAX_ITER", 100)
    code, out, _ = _run(capsys, "witness", "--input", str(STATES / "phi_plus.json"), "--seed", "5")
    assert code in (EXIT_OK, EXIT_NOT_CONVERGED)
    doc = json.loads(out)
    assert doc["verdict"] == "Entangled"
    assert doc["expectation_input"] == pytest.approx(-doc["distance"], abs=1e-9)
    assert doc["expectation_nearest"] == pytest.approx(0.0, abs=1e-9)
    assert doc["distance"] == pytest.approx(3 ** -0.5, abs=2e-2)


def test_witness_is_reproducible_for_a_seed(capsys, monkeypatch):
    monkeypatch.setattr(config, "WITNESS_MAX_ITER", 20)
    args = ("witness", "--input", str(STATES / "rho_ku.json"), "--seed", "11")
    _, first, _ = _run(capsys, *args)
    _, second, _ = _run(capsys, *args)
    assert first == second


def test_teleport_all_outcomes(capsys):
    code, out, err = _run(capsys, "teleport", "--input-state", "plus", "--outcome", "all")
    assert code == EXIT_OK
    doc = json.loads(out)
    assert doc["resource"] == "psi-"
    assert [t["bits"] for t in doc["traces"]] == ["00", "01", "10", "11"]
    assert all(t["fidelity"] == pytest.approx(1.0, abs=1e-9) for t in doc["traces"])
    assert "[run]" not in err


def test_teleport_with_resource_file(capsys):
    code, out, _ = _run(
        capsys, "teleport", "--resource-file", str(PURE / "phi_plus.json"), "--input-state", "0.6,0.8", "--outcome", "2"
    )
    assert code == EXIT_OK
    doc = json.loads(out)
    assert len(doc["traces"]) == 1
    assert doc["traces"][0]["fidelity"] == pytest.approx(1.0, abs=1e-9)

    code, _, err = _run(capsys, "teleport", "--resource-file", str(PURE / "zero_2x2.json"))
    assert code == EXIT_INVALID_INPUT
    assert "not maximally entangled" in err


def test_teleport_qutrit_random(capsys):
    code, out, err = _run(capsys, "teleport", "--resource", "omega", "--d", "3", "--outcome", "random", "--seed", "4")
    assert code == EXIT_OK
    assert "[run] seed=4" in err
    assert json.loads(out)["traces"][0]["fidelity"] == pytest.approx(1.0, abs=1e-9)


def test_geometry_grid_csv(capsys):
    code, out, err = _run(capsys, "geometry", "--resolution", "5")
    assert code == EXIT_OK
    rows = out.strip().split("\n")
    assert rows[0] == "cx,cy,cz,label"
    assert len(rows) == 126
    assert rows[1] == "-1.0,-1.0,-1.0,EntangledTetra"
    assert err.strip().startswith("[geometry] counts Unphysical=")

    _, again, _ = _run(capsys, "geometry", "--resolution", "5")
    assert again == out


def test_geometry_json_lines_and_point(capsys):
    code, out, _ = _run(capsys, "geometry", "--resolution", "3", "--format", "json")
    assert code == EXIT_OK
    lines = [json.loads(line) for line in out.strip().split("\n")]
    assert len(lines) == 27
    assert lines[13] == {"cx": 0.0, "cy": 0.0, "cz": 0.0, "label": "KzBall"}

    code, out, _ = _run(capsys, "geometry", "--point", "1,-1,1")
    assert code == EXIT_OK
    doc = json.loads(out)
    assert doc["label"] == "EntangledTetra"
    assert doc["eigenvalues"] == pytest.approx([1.0, 0.0, 0.0, 0.0], abs=1e-12)


def test_geometry_random_is_seeded(capsys):
    args = ("geometry", "--resolution", "4", "--random", "--seed", "8")
    _, first, _ = _run(capsys, *args)
    _, second, _ = _run(capsys, *args)
    assert first == second
    assert len(first.strip().split("\n")) == 65


def test_paper_examples_text_and_json(capsys):
    code, out, _ = _run(capsys, "paper-examples")
    assert code == EXIT_OK
    lines = out.strip().split("\n")
    assert all(line.startswith("PASS ") for line in lines[:-1])
    assert lines[-1].endswith("failed=0")

    code, out, _ = _run(capsys, "paper-examples", "--format", "json")
    assert code == EXIT_OK
    doc = json.loads(out)
    assert doc["failed"] == 0
    assert doc["passed"] == len(doc["checks"])


def test_paper_examples_pdf(capsys, tmp_path):
    target = tmp_path / "examples.pdf"
    code, _, _ = _run(capsys, "paper-examples", "--format", "pdf", "--output", str(target))
    assert code == EXIT_OK
    assert target.read_bytes().startswith(b"%PDF")


def test_unsupported_format_and_bad_override(capsys):
    code, _, err = _run(capsys, "teleport", "--format", "csv")
    assert code == EXIT_INVALID_INPUT
    assert "supports --format json" in err

    code, _, err = _run(capsys, "analyze", "--input", str(STATES / "rho_u.json"), "--tol-override", "bogus=1")
    assert code == EXIT_INVALID_INPUT
    assert "Unknown tolerance" in err


def test_tolerance_override_is_scoped_to_the_run(capsys):
    before = config.current_tolerances()
    code, _, _ = _run(
        capsys, "analyze", "--input", str(STATES / "rho_u.json"), "--tol-override", "ppt=1e-6"
    )
    assert code == EXIT_OK
    assert config.current_tolerances() is before


def test_debug_logs_go_to_stderr(capsys):
    code, out, err = _run(
        capsys, "tailor", "--input", str(PURE / "zero_2x2.json"), "--k", "2", "--l", "2",
        "--lambdas", "0.8,0.6", "--debug",
    )
    assert code == EXIT_OK
    assert "[tailor] d=4 k=2 l=2 span=16" in err
    assert "[tailor]" not in out
