import json
import os

import numpy as np
import pytest

from conftest import bd, jordan
from sidecomp._linalg import conditioned_invertible
from sidecomp.cli import main
from sidecomp.io import canonical_json, load_tuple, tuple_to_obj
from sidecomp.tuples import conjugate, operator_tuple


def write_tuple(path, T):
    path.write_text(canonical_json(tuple_to_obj(T)))
    return str(path)


def run(capsys, argv):
    rc = main(argv)
    out = capsys.readouterr().out
    return rc, out


class TestDecompose:
    def test_distinct_diagonal(self, tmp_path, capsys):
        p = write_tuple(tmp_path / "t.json", operator_tuple([np.diag([1.0, 2.0])]))
        rc, out = run(capsys, ["decompose", "--input", p])
        rep = json.loads(out)
        assert rc == 0 and rep["count"] == 2 and all(rep["si_flags"])

    def test_identity(self, tmp_path, capsys):
        p = write_tuple(tmp_path / "t.json", operator_tuple([np.eye(2)]))
        rc, out = run(capsys, ["decompose", "--input", p])
        assert rc == 0 and json.loads(out)["count"] == 2

    def test_malformed_json_exits_2(self, tmp_path, capsys):
        p = tmp_path / "bad.json"
        p.write_text("{nope")
        rc, _ = run(capsys, ["decompose", "--input", str(p)])
        assert rc == 2

    def test_noncommuting_input_exits_2(self, tmp_path, capsys):
        p = write_tuple(tmp_path / "t.json",
                        operator_tuple([jordan(2), np.diag([1.0, 2.0])]))
        rc, _ = run(capsys, ["decompose", "--input", str(p)])
        assert rc == 2

    def test_missing_file_exits_2(self, capsys):
        rc, _ = run(capsys, ["decompose", "--input", "/nonexistent.json"])
        assert rc == 2


class TestInvariant:
    @pytest.mark.parametrize("mats,k,mult", [
        ([np.eye(3)], 1, [3]),
        ([bd(jordan(2), jordan(2, 1.0))], 2, [1, 1]),
    ])
    def test_examples(self, tmp_path, capsys, mats, k, mult):
        p = write_tuple(tmp_path / "t.json", operator_tuple(mats))
        rc, out = run(capsys, ["invariant", "--input", p])
        rep = json.loads(out)
        assert rc == 0 and rep["k"] == k and rep["multiplicities"] == mult
        assert rep["k0"]["rank"] == k

    def test_inflation(self, tmp_path, capsys):
        from sidecomp.tuples import inflate
        p = write_tuple(tmp_path / "t.json", inflate(operator_tuple([jordan(2)]), 2))
        rc, out = run(capsys, ["invariant", "--input", p])
        rep = json.loads(out)
        assert rep["k"] == 1 and rep["multiplicities"] == [2]

    def test_table_format(self, tmp_path, capsys):
        p = write_tuple(tmp_path / "t.json", operator_tuple([np.eye(2)]))
        rc, out = run(capsys, ["invariant", "--input", p, "--format", "table"])
        assert rc == 0 and "multiplicities" in out


class TestSimilar:
    def test_planted_pair_with_witness(self, tmp_path, capsys, rng):
        T = operator_tuple([jordan(3, 0.5), jordan(3, 0.5) @ jordan(3, 0.5)])
        S = conjugate(T, conditioned_invertible(3, 40.0, rng))
        p1 = write_tuple(tmp_path / "a.json", T)
        p2 = write_tuple(tmp_path / "b.json", S)
        rc, out = run(capsys, ["similar", "--input", p1, "--input2", p2, "--witness"])
        rep = json.loads(out)
        assert rc == 0 and rep["similar"] and rep["residual"] <= 1e-6
        assert rep["witness"] is not None

    def test_disjoint_spectra(self, tmp_path, capsys):
        p1 = write_tuple(tmp_path / "a.json", operator_tuple([jordan(2)]))
        p2 = write_tuple(tmp_path / "b.json", operator_tuple([jordan(2, 1.0)]))
        rc, out = run(capsys, ["similar", "--input", p1, "--input2", p2])
        rep = json.loads(out)
        assert rc == 0 and not rep["similar"]

    def test_dimension_mismatch(self, tmp_path, capsys):
        p1 = write_tuple(tmp_path / "a.json", operator_tuple([jordan(2)]))
        p2 = write_tuple(tmp_path / "b.json", operator_tuple([jordan(3)]))
        rc, out = run(capsys, ["similar", "--input", p1, "--input2", p2])
        rep = json.loads(out)
        assert rc == 0 and not rep["similar"] and rep["reason"] == "dimension"


class TestRkhs:
    def test_ball_kernel_checks_pass(self, tmp_path, capsys):
        spec = tmp_path / "k.json"
        spec.write_text(json.dumps({"m": 2, "preset": "drury_arveson", "dmax": 6}))
        out_path = tmp_path / "tuple.json"
        rc, out = run(capsys, ["rkhs", "--input", str(spec),
                               "--output", str(out_path)])
        rep = json.loads(out)
        assert rc == 0 and all(c["passed"] for c in rep["checks"])
        ids = {c["id"] for c in rep["checks"]}
        assert "defect-rank-one" in ids and "model-hypotheses" in ids
        T = load_tuple(str(out_path))
        assert T.m == 2 and T.d == 28

    def test_bergman_basis_norms(self, tmp_path, capsys):
        spec = tmp_path / "k.json"
        spec.write_text(json.dumps({"m": 1, "preset": "bergman", "k": 2, "dmax": 8}))
        rc, out = run(capsys, ["rkhs", "--input", str(spec)])
        rep = json.loads(out)
        table = [c for c in rep["checks"] if c["id"] == "basis-norm-table"]
        assert rc == 0 and table and table[0]["passed"]

    def test_spherical_shift_interior_isometry(self, tmp_path, capsys):
        spec = tmp_path / "k.json"
        spec.write_text(json.dumps({"m": 2, "preset": "spherical_shift", "dmax": 5}))
        rc, out = run(capsys, ["rkhs", "--input", str(spec)])
        rep = json.loads(out)
        iso = [c for c in rep["checks"] if c["id"] == "interior-isometry"]
        assert rc == 0 and iso and iso[0]["passed"]

    def test_nonpositive_coefficient_exits_2(self, tmp_path, capsys):
        spec = tmp_path / "k.json"
        spec.write_text(json.dumps({
            "m": 1, "preset": "custom", "dmax": 1,
            "custom_fhat": [[[0], 1.0], [[1], -1.0], [[2], 1.0]],
        }))
        rc, _ = run(capsys, ["rkhs", "--input", str(spec)])
        assert rc == 2


class TestSelftest:
    def test_small_run_passes(self, capsys):
        rc, out = run(capsys, ["selftest", "--count", "4", "--seed", "11"])
        rep = json.loads(out)
        assert rc == 0
        assert rep["recovered"] == rep["instances"] == 4
        assert rep["oracle_agreements"] == rep["oracle_cases"]

    def test_byte_identical_reports(self, capsys):
        _, out1 = run(capsys, ["selftest", "--count", "3", "--seed", "5"])
        _, out2 = run(capsys, ["selftest", "--count", "3", "--seed", "5"])
        assert out1.encode() == out2.encode()

    def test_env_seed_fallback(self, capsys, monkeypatch):
        monkeypatch.setenv("SIDECOMP_SEED", "99")
        _, out = run(capsys, ["selftest", "--count", "2"])
        assert json.loads(out)["seed"] == 99


class TestExitCodes:
    def test_numerical_degeneracy_exits_3(self, tmp_path, capsys, monkeypatch):
        from sidecomp.policy import NumericalDegeneracyError
        import sidecomp.cli as cli

        def boom(*a, **k):
            raise NumericalDegeneracyError("synthetic degeneracy")

        monkeypatch.setattr(cli, "unit_si_decomposition", boom)
        p = write_tuple(tmp_path / "t.json", operator_tuple([np.eye(2)]))
        rc = cli.main(["decompose", "--input", p])
        capsys.readouterr()
        assert rc == 3

    def test_failed_identity_check_exits_4(self, tmp_path, capsys):
        # a decreasing coefficient rule makes the lowering tuple expansive:
        # the positive-operator chain is not monotone and the check fails
        spec = tmp_path / "k.json"
        table = [[[0], 1.0], [[1], 0.01], [[2], 1e-4], [[3], 1e-6]]
        spec.write_text(json.dumps({
            "m": 1, "preset": "custom", "dmax": 2, "custom_fhat": table,
        }))
        rc, out = run(capsys, ["rkhs", "--input", str(spec)])
        rep = json.loads(out)
        assert rc == 4
        assert not all(c["passed"] for c in rep["checks"])


class TestDeterminism:
    def test_invariant_reports_byte_identical(self, tmp_path, capsys):
        p = write_tuple(tmp_path / "t.json",
                        operator_tuple([bd(jordan(2), jordan(2, 1.0))]))
        _, out1 = run(capsys, ["invariant", "--input", p, "--seed", "42"])
        _, out2 = run(capsys, ["invariant", "--input", p, "--seed", "42"])
        assert out1.encode() == out2.encode()
