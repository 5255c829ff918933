import math
import os
import subprocess
import sys

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from biadmm.admm import AdmmConfig
from biadmm.cli import main
from biadmm.io import (
    CsvParseError,
    RunManifest,
    config_from_dict,
    config_to_dict,
    read_labels,
    read_matrix,
    read_summary,
    write_labels,
    write_matrix,
    write_summary,
)
from biadmm.simulate import CompositionalSpec, gen_compositional


def write_text(path, text):
    path.write_text(text, encoding="utf-8")
    return str(path)


class TestCsv:
    def test_plain(self, tmp_path):
        m = read_matrix(write_text(tmp_path / "a.csv", "1,2\n3,4.5\n"))
        np.testing.assert_array_equal(m.values, [[1, 2], [3, 4.5]])
        assert m.row_names is None and m.col_names is None

    def test_header_and_row_names(self, tmp_path):
        m = read_matrix(write_text(tmp_path / "a.csv", ",x,y\nr1,1,2\nr2,3,4\n"))
        assert m.col_names == ["x", "y"] and m.row_names == ["r1", "r2"]
        np.testing.assert_array_equal(m.values, [[1, 2], [3, 4]])

    def test_header_only_columns(self, tmp_path):
        m = read_matrix(write_text(tmp_path / "a.csv", "x,y\n1,2\n3,4\n"))
        assert m.col_names == ["x", "y"] and m.row_names is None

    @pytest.mark.parametrize(
        "text,line,col",
        [("1,2\n3,abc\n", 2, 2), ("1,2\n3\n", 2, 2), ("1,2\n3,nan\n", 2, 2), ("x,y\n1,2\n4,inf\n", 3, 2),
         ("1,2\n3,\n", 2, 2)],
    )
    def test_errors_name_position(self, tmp_path, text, line, col):
        with pytest.raises(CsvParseError) as info:
            read_matrix(write_text(tmp_path / "bad.csv", text))
        assert (info.value.line, info.value.column) == (line, col)
        assert f"line {line}, column {col}" in str(info.value)

    def test_empty(self, tmp_path):
        with pytest.raises(CsvParseError):
            read_matrix(write_text(tmp_path / "e.csv", "\n"))

    @given(X=arrays(np.float64, st.tuples(st.integers(1, 5), st.integers(1, 5)),
                    elements=st.floats(allow_nan=False, allow_infinity=False)))
    def test_round_trip_exact(self, tmp_path_factory, X):
        path = str(tmp_path_factory.mktemp("rt") / "m.csv")
        write_matrix(path, X)
        np.testing.assert_array_equal(read_matrix(path).values, X)

    def test_round_trip_with_names(self, tmp_path):
        X = np.array([[math.pi, -1e-300], [2.5, 1e300]])
        path = str(tmp_path / "m.csv")
        write_matrix(path, X, ["a", "b"], ["u", "v"])
        m = read_matrix(path)
        np.testing.assert_array_equal(m.values, X)
        assert m.row_names == ["a", "b"] and m.col_names == ["u", "v"]


class TestLabelsSummary:
    def test_labels_round_trip(self, tmp_path):
        path = str(tmp_path / "l.csv")
        write_labels(path, [0, 2, 1, 1])
        assert open(path).read() == "0\n2\n1\n1\n"
        np.testing.assert_array_equal(read_labels(path), [0, 2, 1, 1])

    def test_bad_label(self, tmp_path):
        with pytest.raises(CsvParseError):
            read_labels(write_text(tmp_path / "l.csv", "0\nx\n"))

    def test_summary_round_trip(self, tmp_path):
        path = str(tmp_path / "s.txt")
        items = {"a": 1, "b": [1.5, "x"], "c": {"k": None}, "d": True}
        write_summary(path, items)
        assert open(path).readline().startswith("format_version = ")
        assert read_summary(path) == items

    def test_summary_version_checked(self, tmp_path):
        with pytest.raises(ValueError):
            read_summary(write_text(tmp_path / "s.txt", 'format_version = "other"\n'))

    @pytest.mark.parametrize("q", [1, 2, np.inf])
    def test_config_round_trip(self, q):
        c = AdmmConfig(gamma1=0.3, gamma2=1.5, q=q, compositional=True, max_iters=77)
        d = config_to_dict(c)
        back = config_from_dict(d)
        assert config_to_dict(back) == d

    def test_manifest_round_trip(self, tmp_path):
        m = RunManifest("path", {"input": "x.csv"}, [{"index": 0, "gamma1": 0.1}],
                        config_to_dict(AdmmConfig(q=np.inf)), {"gamma1_values": [0.1], "single": True}, 4)
        path = str(tmp_path / "m.txt")
        m.write(path)
        assert RunManifest.read(path) == m


@pytest.fixture
def checker_csv(tmp_path):
    assert main(["simulate", "--n", "12", "--p", "8", "--K", "2", "--R", "2", "--seed", "3",
                 "--out-dir", str(tmp_path / "sim")]) == 0
    return tmp_path / "sim"


class TestCli:
    def test_simulate_shape_and_determinism(self, tmp_path):
        for d in ("a", "b"):
            assert main(["simulate", "--seed", "5", "--out-dir", str(tmp_path / d)]) == 0
        X = read_matrix(str(tmp_path / "a" / "data.csv")).values
        assert X.shape == (50, 40)
        for f in ("data.csv", "truth_rows.csv", "truth_cols.csv"):
            assert (tmp_path / "a" / f).read_bytes() == (tmp_path / "b" / f).read_bytes()

    def test_simulate_compositional(self, tmp_path):
        assert main(["simulate", "--kind", "compositional", "--n-control", "5", "--n-treatment", "5",
                     "--out-dir", str(tmp_path)]) == 0
        X = read_matrix(str(tmp_path / "data.csv")).values
        assert np.abs(X.sum(axis=1) - 1).max() <= 1e-10

    def test_fit_gamma_zero(self, checker_csv, tmp_path):
        out = tmp_path / "fit"
        assert main(["fit", str(checker_csv / "data.csv"), "--gamma1", "0", "--gamma2", "0",
                     "--out-dir", str(out)]) == 0
        X = read_matrix(str(checker_csv / "data.csv")).values
        A = read_matrix(str(out / "A_hat.csv")).values
        np.testing.assert_allclose(A, X, atol=1e-6)
        s = read_summary(str(out / "summary.txt"))
        assert s["converged"] is True and s["config.gamma1"] == 0.0
        assert s["flags.knn_m1"] == 5

    def test_fit_byte_identical(self, checker_csv, tmp_path):
        args = ["fit", str(checker_csv / "data.csv"), "--gamma", "3", "--normalize-weights"]
        for d in ("a", "b"):
            assert main(args + ["--out-dir", str(tmp_path / d)]) == 0
        for f in ("A_hat.csv", "row_labels.csv", "col_labels.csv", "summary.txt"):
            assert (tmp_path / "a" / f).read_bytes() == (tmp_path / "b" / f).read_bytes()

    def test_fit_compositional(self, tmp_path):
        X, _ = gen_compositional(CompositionalSpec(n_control=8, n_treatment=8, seed=2))
        write_matrix(str(tmp_path / "c.csv"), X)
        assert main(["fit", str(tmp_path / "c.csv"), "--compositional", "--gamma1", "0.5",
                     "--gamma2", "0.05", "--out-dir", str(tmp_path / "o")]) == 0
        A = read_matrix(str(tmp_path / "o" / "A_hat.csv")).values
        assert np.abs(A.sum(axis=1) - 1).max() <= 1e-6

    def test_fit_compositional_rejects_non_simplex(self, tmp_path, capsys):
        write_text(tmp_path / "c.csv", "0.5,0.5\n0.2,0.3\n0.1,0.9\n")
        assert main(["fit", str(tmp_path / "c.csv"), "--compositional", "--out-dir", str(tmp_path)]) == 2
        assert "row 1" in capsys.readouterr().err

    def test_fit_parse_error_exit(self, tmp_path, capsys):
        write_text(tmp_path / "bad.csv", "1,2\n3,oops\n")
        assert main(["fit", str(tmp_path / "bad.csv")]) == 2
        assert "line 2, column 2" in capsys.readouterr().err

    def test_fit_nonconvergence_exit(self, checker_csv, tmp_path):
        assert main(["fit", str(checker_csv / "data.csv"), "--gamma1", "5", "--gamma2", "5",
                     "--max-iters", "3", "--full-graph", "--out-dir", str(tmp_path)]) == 3

    @pytest.mark.parametrize("extra", [["--gamma", "1", "--gamma1", "1"], ["--nu1", "0"], ["--gamma1", "-1"],
                                       ["--knn-m1", "0"]])
    def test_fit_config_errors(self, checker_csv, tmp_path, extra):
        assert main(["fit", str(checker_csv / "data.csv"), "--out-dir", str(tmp_path)] + extra) == 4

    def test_argparse_error_exit(self):
        with pytest.raises(SystemExit) as info:
            main(["fit"])
        assert info.value.code == 2

    def test_path_manifest_and_endpoints(self, checker_csv, tmp_path):
        out = tmp_path / "path"
        assert main(["path", str(checker_csv / "data.csv"), "--full-graph", "--grid-gamma", "0.01,100",
                     "--out-dir", str(out)]) == 0
        m = RunManifest.read(str(out / "manifest.txt"))
        assert len(m.outputs) == 2
        lo, hi = m.outputs
        assert lo["n_row_clusters"] >= hi["n_row_clusters"]
        assert os.path.exists(out / hi["dir"] / "A_hat.csv")

    def test_path_single_point_equals_fit(self, checker_csv, tmp_path):
        data = str(checker_csv / "data.csv")
        assert main(["path", data, "--grid-gamma1", "0.5", "--grid-gamma2", "0.7",
                     "--out-dir", str(tmp_path / "p")]) == 0
        assert main(["fit", data, "--gamma1", "0.5", "--gamma2", "0.7", "--out-dir", str(tmp_path / "f")]) == 0
        a = (tmp_path / "p" / "point_0000" / "A_hat.csv").read_bytes()
        assert a == (tmp_path / "f" / "A_hat.csv").read_bytes()

    def test_path_grid_errors(self, checker_csv, tmp_path):
        data = str(checker_csv / "data.csv")
        assert main(["path", data, "--out-dir", str(tmp_path)]) == 4
        assert main(["path", data, "--grid-gamma", "2,1", "--out-dir", str(tmp_path)]) == 4
        assert main(["path", data, "--grid-gamma1", "1", "--out-dir", str(tmp_path)]) == 4

    @pytest.mark.parametrize("method", ["holdout", "stability"])
    def test_tune_one_point(self, checker_csv, tmp_path, method):
        out = tmp_path / method
        assert main(["tune", str(checker_csv / "data.csv"), "--method", method, "--grid-gamma", "2",
                     "--repetitions", "2", "--out-dir", str(out)]) == 0
        s = read_summary(str(out / "tuning.txt"))
        assert (s["selected_gamma1"], s["selected_gamma2"]) == (2.0, 2.0)

    def test_tune_ari_deterministic(self, tmp_path):
        sim = tmp_path / "sim"
        assert main(["simulate", "--n", "16", "--p", "10", "--K", "2", "--R", "2", "--pair",
                     "--out-dir", str(sim)]) == 0
        args = ["tune", str(sim / "data.csv"), "--method", "ari", "--valid", str(sim / "valid.csv"),
                "--truth-rows", str(sim / "truth_rows.csv"), "--truth-cols", str(sim / "truth_cols.csv"),
                "--grid-log", "1", "100", "3", "--grid-single", "--normalize-weights"]
        for d in ("a", "b"):
            assert main(args + ["--out-dir", str(tmp_path / d)]) == 0
        assert (tmp_path / "a" / "tuning.txt").read_bytes() == (tmp_path / "b" / "tuning.txt").read_bytes()
        s = read_summary(str(tmp_path / "a" / "tuning.txt"))
        members = set(s["grid"]["gamma1_values"])
        assert s["selected_gamma1"] in members

    def test_tune_ari_needs_truth(self, checker_csv, tmp_path):
        assert main(["tune", str(checker_csv / "data.csv"), "--method", "ari", "--grid-gamma", "1",
                     "--out-dir", str(tmp_path)]) == 4

    def test_ari_command(self, tmp_path, capsys):
        a = write_text(tmp_path / "a.txt", "0\n0\n1\n1\n")
        b = write_text(tmp_path / "b.txt", "0\n1\n2\n3\n")
        c = write_text(tmp_path / "c.txt", "0\n0\n0\n0\n")
        d = write_text(tmp_path / "d.txt", "0\n1\n")
        assert main(["ari", a, a]) == 0
        assert float(capsys.readouterr().out) == 1.0
        assert main(["ari", b, c]) == 0
        assert float(capsys.readouterr().out) == 0.0
        assert main(["ari", a, d]) == 2
        assert "differ in length" in capsys.readouterr().err

    def test_module_entry_point(self, tmp_path):
        a = write_text(tmp_path / "a.txt", "0\n1\n1\n")
        r = subprocess.run([sys.executable, "-m", "biadmm", "ari", a, a], capture_output=True, text=True)
        assert r.returncode == 0 and r.stdout.strip() == "1"
