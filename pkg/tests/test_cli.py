import json
import subprocess
import sys

import numpy as np
import pytest

from leftdecomp.cli import main, make_flags, run_subcommand
from leftdecomp.problem import ProblemError, decode_complex, dump_problem, encode_matrix, parse_problem


def cm(rows):
    """Encode a real or complex matrix the way problem files do."""
    return encode_matrix(np.array(rows, dtype=complex))


def decode(m):
    return np.array([[complex(*z) for z in row] for row in m])


REFERENCE = {
    "schema": 1,
    "dimension": 2,
    "form_t": cm([[-1, 0], [0, 1]]),
    "form_w": cm([[1, 0], [0, 0]]),
    "pair": {"preset": "identity"},
}


def write(tmp_path, doc, name="problem.json"):
    path = tmp_path / name
    path.write_text(json.dumps(doc) if not isinstance(doc, str) else doc)
    return path


def run(tmp_path, command, doc, *extra):
    path = write(tmp_path, doc)
    out = tmp_path / "report.json"
    code = main([command, "--input", str(path), "--output", str(out), *extra])
    return code, json.loads(out.read_text()) if out.exists() else None


class TestParseProblem:
    def test_minimal_problem(self):
        p = parse_problem(json.dumps(REFERENCE).encode())
        assert p.dimension == 2
        assert np.array_equal(p.form_t, np.diag([-1, 1]))
        assert p.pair.preset == "identity"

    def test_too_many_rows(self):
        doc = dict(REFERENCE, form_t=cm([[1, 0], [0, 1], [0, 0]]))
        with pytest.raises(ProblemError, match=r"form_t.*expected 2 rows"):
            parse_problem(json.dumps(doc))

    def test_scalar_entry(self):
        doc = dict(REFERENCE, form_w=[[1, 0], [0, 0]])
        with pytest.raises(ProblemError, match=r"form_w\[0\]\[0\].*\[re, im\]"):
            parse_problem(json.dumps(doc))

    def test_malformed_json_has_location(self):
        with pytest.raises(ProblemError, match=r"line 2, column"):
            parse_problem(b'{"dimension": 2,\n "form_t": [}')

    def test_bad_schema(self):
        with pytest.raises(ProblemError, match="schema"):
            parse_problem(json.dumps(dict(REFERENCE, schema=2)))

    def test_bad_preset(self):
        with pytest.raises(ProblemError, match="preset"):
            parse_problem(json.dumps(dict(REFERENCE, pair={"preset": "best"})))

    def test_boolean_is_not_a_number(self):
        with pytest.raises(ProblemError):
            decode_complex([True, 0], "x")

    def test_round_trip(self):
        doc = dict(
            REFERENCE,
            form_s=cm([[2, 1j], [-1j, 2]]),
            vector=[[0.1, 0.2], [1e-300, -3.5]],
            pair={"s1": cm([[2, 1], [1, 2]]), "s2": cm([[1, 0], [0, 1]])},
            tolerance={"rank_rel": 1e-10, "cert_abs": 1e-8},
            measure={"atoms": ["a", "b"], "mu": [[1, 1], [2, 0]], "nu": [[1, 0], [0, 0]]},
        )
        once = dump_problem(parse_problem(json.dumps(doc)))
        assert once == json.loads(json.dumps(doc))
        assert dump_problem(parse_problem(json.dumps(once))) == once

    def test_measure_only(self):
        p = parse_problem(json.dumps({"measure": {"atoms": ["a"], "mu": [[1, 0]], "nu": [[0, 0]]}}))
        assert p.dimension is None and p.measure.atoms == ["a"]


class TestSubcommands:
    def test_decompose_worked_example(self, tmp_path):
        code, report = run(tmp_path, "decompose", REFERENCE)
        assert code == 0 and report["ok"]
        assert report["schema"] == 1 and "t(e_i, e_j)" in report["convention"]
        r = report["result"]
        assert np.allclose(decode(r["t_lr"]), [[-1, 0], [0, 0]], atol=1e-12)
        assert np.allclose(decode(r["t_ls"]), [[0, 0], [0, 1]], atol=1e-12)

    def test_classify_worked_example(self, tmp_path):
        code, report = run(tmp_path, "classify", REFERENCE)
        assert code == 0
        assert report["result"]["left_regular"] is False
        assert report["result"]["left_strongly_singular"] is False

    def test_measure(self, tmp_path):
        doc = {"measure": {"atoms": ["p", "q", "r"], "mu": [[1, 1], [2, 0], [0, 0]], "nu": [[1, 0], [0, 0], [3, 0]]}}
        code, report = run(tmp_path, "measure", doc)
        r = report["result"]
        assert code == 0
        assert r["mu_a"] == [[1, 1], [0, 0], [0, 0]]
        assert r["mu_s"] == [[0, 0], [2, 0], [0, 0]]
        assert r["radon_nikodym"] == {"p": [1, 1], "r": [0, 0]}
        assert r["induced_left_regular"] is False and r["abs_continuous"] is False

    def test_psd_decompose(self, tmp_path):
        doc = dict(REFERENCE, form_s=cm([[2, 1], [1, 2]]))
        code, report = run(tmp_path, "psd-decompose", doc)
        assert code == 0
        assert np.allclose(decode(report["result"]["s_a"]), [[1.5, 0], [0, 0]], atol=1e-12)
        assert report["result"]["s_s_singular"] is True

    def test_check_pair_explicit(self, tmp_path):
        doc = dict(REFERENCE, pair={"s1": cm([[2, 1], [1, 2]]), "s2": cm([[2, 1], [1, 2]])})
        code, report = run(tmp_path, "check-pair", doc)
        assert code == 0 and report["result"]["ok"]
        bad = dict(REFERENCE, pair={"s1": cm([[1, 0], [0, 0]]), "s2": cm([[1, 0], [0, 1]])})
        code, report = run(tmp_path, "check-pair", bad)
        assert code == 3 and not report["result"]["ok"]

    def test_witness(self, tmp_path):
        doc = dict(REFERENCE, form_t=cm([[0, 0], [1, 0]]), vector=[[1, 0], [1, 0]])
        code, report = run(tmp_path, "witness", doc)
        assert code == 0
        assert np.allclose([complex(*z) for z in report["result"]["u"]], [0, 1])

    def test_witness_precondition(self, tmp_path):
        code, report = run(tmp_path, "witness", dict(REFERENCE, vector=[[1, 0], [1, 0]]))
        assert code == 2 and report["error"]["kind"] == "validation"

    def test_verify(self, tmp_path):
        code, report = run(tmp_path, "verify", REFERENCE, "--pair", "polar", "--samples", "200", "--seed", "4")
        assert code == 0
        v = report["result"]["verification"]
        assert v["ok"] and v["seed"] == 4 and v["samples"] == 200

    def test_explicit_flag_override(self, tmp_path):
        doc = dict(REFERENCE, pair={"s1": cm([[2, 1], [1, 2]]), "s2": cm([[2, 1], [1, 2]])})
        _, report = run(tmp_path, "decompose", doc)
        assert np.allclose(decode(report["result"]["t_lr"]), [[-1, -0.5], [0, 0]], atol=1e-10)
        _, report = run(tmp_path, "decompose", doc, "--pair", "identity")
        assert np.allclose(decode(report["result"]["t_lr"]), [[-1, 0], [0, 0]], atol=1e-12)


class TestExitCodes:
    def test_malformed_json(self, tmp_path, capsys):
        path = write(tmp_path, "{not json")
        assert main(["classify", "--input", str(path)]) == 1
        assert "line 1" in capsys.readouterr().err

    def test_structural_error(self, tmp_path):
        code, _ = run(tmp_path, "classify", dict(REFERENCE, dimension=3))
        assert code == 1

    def test_missing_field(self, tmp_path):
        doc = {k: v for k, v in REFERENCE.items() if k != "form_w"}
        code, report = run(tmp_path, "decompose", doc)
        assert code == 1 and report["error"]["kind"] == "invalid_input"

    def test_w_not_psd(self, tmp_path):
        code, report = run(tmp_path, "decompose", dict(REFERENCE, form_w=cm([[1, 0], [0, -1]])))
        assert code == 2 and "semidefinite" in report["error"]["message"]

    def test_explicit_without_matrices(self, tmp_path):
        code, _ = run(tmp_path, "decompose", REFERENCE, "--pair", "explicit")
        assert code == 1

    def test_verification_failure(self, tmp_path):
        # a non-dominating explicit pair is rejected before decomposing
        doc = dict(REFERENCE, pair={"s1": cm([[0.5, 0], [0, 0.5]]), "s2": cm([[1, 0], [0, 1]])})
        code, _ = run(tmp_path, "verify", doc)
        assert code == 2

    def test_tolerance_flags(self, tmp_path):
        _, report = run(tmp_path, "classify", dict(REFERENCE, tolerance={"cert_abs": 1e-7}), "--tol-rank", "1e-10")
        assert report["tolerance"] == {"rank_rel": 1e-10, "cert_abs": 1e-7}


def test_run_subcommand_directly():
    problem = parse_problem(json.dumps(REFERENCE))
    report, code, summary = run_subcommand("classify", problem, make_flags())
    assert code == 0 and "left_regular: False" in summary


def test_module_entry_point(tmp_path):
    path = write(tmp_path, REFERENCE)
    proc = subprocess.run([sys.executable, "-m", "leftdecomp", "decompose", "--input", str(path), "--json"],
                          capture_output=True, text=True)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["result"]["t_ls"][1][1] == [1.0, 0.0]


def test_help_documents_convention(capsys):
    with pytest.raises(SystemExit):
        main(["--help"])
    assert "t(e_i, e_j)" in capsys.readouterr().out
