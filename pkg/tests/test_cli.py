import json
import subprocess
import sys

import numpy as np
import pytest

from stiefel_mcmc import cli, csvio
from stiefel_mcmc import eigenmodel as em
from stiefel_mcmc.errors import ParseError
from stiefel_mcmc.frames import random_uniform_frame


def run_cli(*args) -> int:
    return cli.main([str(a) for a in args])


def write_net_csv(path, codes):
    rows = []
    for row in codes:
        rows.append(",".join("NA" if v < 0 else str(int(v)) for v in row))
    path.write_text("\n".join(rows) + "\n")


@pytest.fixture()
def net_file(tmp_path):
    rng = np.random.default_rng(0)
    u = random_uniform_frame(12, 2, rng)
    net = em.generate_network(-0.2, np.array([6.0, 3.0]), u, rng)
    path = tmp_path / "net.csv"
    write_net_csv(path, net.codes)
    return path


class TestParsers:
    def test_adjacency_example(self, tmp_path):
        p = tmp_path / "a.csv"
        p.write_text("NA,1,0\n1,NA,1\n0,1,NA\n")
        net = csvio.parse_adjacency(p)
        assert net.n == 3
        assert net.codes[0, 1] == 1 and net.codes[1, 2] == 1
        assert net.codes[0, 2] == 0

    def test_adjacency_bad_entry_names_cell(self, tmp_path):
        p = tmp_path / "a.csv"
        p.write_text("NA,1\n2,NA\n")
        with pytest.raises(ParseError, match=r"a\.csv:2.*field 1"):
            csvio.parse_adjacency(p)

    def test_header_row_skipped(self, tmp_path):
        p = tmp_path / "a.csv"
        p.write_text("a,b,c\nNA,1,0\n1,NA,1\n0,1,NA\n")
        assert csvio.parse_adjacency(p).n == 3

    def test_ragged_row_line_number(self, tmp_path):
        p = tmp_path / "m.csv"
        p.write_text("1,2,3\n4,5\n")
        with pytest.raises(ParseError, match=r"m\.csv:2"):
            csvio.read_matrix(p)

    def test_empty_field_is_missing(self, tmp_path):
        p = tmp_path / "m.csv"
        p.write_text("1,,3\n4,5,6\n")
        mat = csvio.read_matrix(p)
        assert np.isnan(mat[0, 1])

    def test_covariate_row_count_checked(self, tmp_path):
        p = tmp_path / "x.csv"
        p.write_text("drug,smoke\n1,0\n0,1\n")
        cov = csvio.parse_covariates(p, 2)
        assert cov.names == ("drug", "smoke")
        with pytest.raises(ParseError):
            csvio.parse_covariates(p, 3)

    def test_roundtrip_precision(self, tmp_path):
        vals = np.array([[np.pi, 1e-17, -3.0, 1.0 / 3.0]])
        p = tmp_path / "v.csv"
        csvio.write_matrix(p, vals)
        back = csvio.read_matrix(p)
        np.testing.assert_array_equal(back, vals)

    def test_diagonal_ignored_regardless_of_content(self, tmp_path):
        p = tmp_path / "a.csv"
        p.write_text("7,1,0\n1,x,1\n0,1,NA\n")
        net = csvio.parse_adjacency(p)
        assert np.all(np.diag(net.codes) == -1)
        assert net.codes[0, 1] == 1


class TestSvdSim:
    def test_dimensions_and_files(self, tmp_path):
        assert run_cli("svd-sim", "--out-dir", tmp_path, "--seed", 3) == 0
        y = csvio.read_matrix(tmp_path / "Y.csv")
        assert y.shape == (60, 40)
        d0 = csvio.read_matrix(tmp_path / "d0.csv")
        assert d0.shape == (1, 4)
        assert (tmp_path / "manifest.json").exists()

    def test_byte_identical_reruns(self, tmp_path):
        a, b = tmp_path / "a", tmp_path / "b"
        for out in (a, b):
            assert run_cli("svd-sim", "--out-dir", out, "--seed", 11) == 0
        for name in ("Y.csv", "M0.csv", "d0.csv"):
            assert (a / name).read_bytes() == (b / name).read_bytes()

    def test_zero_rank_rejected(self, tmp_path):
        assert run_cli("svd-sim", "--rank-true", 0, "--out-dir", tmp_path) == 2


class TestSvdFit:
    def test_small_run_outputs(self, tmp_path):
        assert run_cli("svd-sim", "--m", 15, "--n", 10, "--rank-true", 2,
                       "--out-dir", tmp_path, "--seed", 5) == 0
        assert run_cli("svd-fit", "--input", tmp_path / "Y.csv",
                       "--truth", tmp_path / "M0.csv", "--rank", 3,
                       "--iters", 20, "--thin", 5,
                       "--out-dir", tmp_path / "fit", "--seed", 5) == 0
        trace = (tmp_path / "fit" / "d_trace.csv").read_text().splitlines()
        assert trace[0] == "iter,d_1,d_2,d_3"
        assert len(trace) == 5  # header + 4 saved rows
        summary = (tmp_path / "fit" / "summary.csv").read_text()
        assert "mse_mle" in summary and "mse_posterior_mean" in summary
        m_post = csvio.read_matrix(tmp_path / "fit" / "M_post_mean.csv")
        assert m_post.shape == (15, 10)

    def test_single_row_trace(self, tmp_path):
        run_cli("svd-sim", "--m", 12, "--n", 8, "--rank-true", 2,
                "--out-dir", tmp_path, "--seed", 1)
        assert run_cli("svd-fit", "--input", tmp_path / "Y.csv", "--rank", 2,
                       "--iters", 5, "--thin", 5,
                       "--out-dir", tmp_path / "fit", "--seed", 1) == 0
        trace = (tmp_path / "fit" / "d_trace.csv").read_text().splitlines()
        assert len(trace) == 2

    def test_no_truth_no_summary(self, tmp_path):
        run_cli("svd-sim", "--m", 12, "--n", 8, "--rank-true", 2,
                "--out-dir", tmp_path, "--seed", 1)
        assert run_cli("svd-fit", "--input", tmp_path / "Y.csv", "--rank", 2,
                       "--iters", 5, "--thin", 5,
                       "--out-dir", tmp_path / "fit", "--seed", 1) == 0
        assert not (tmp_path / "fit" / "summary.csv").exists()

    def test_missing_input_is_io_error(self, tmp_path):
        assert run_cli("svd-fit", "--input", tmp_path / "nope.csv",
                       "--out-dir", tmp_path) == 3

    def test_unwritable_out_dir_is_io_error(self, tmp_path):
        blocker = tmp_path / "blocker"
        blocker.write_text("not a directory\n")
        assert run_cli("svd-sim", "--out-dir", blocker / "sub") == 3

    def test_missing_values_in_y_rejected(self, tmp_path):
        p = tmp_path / "Y.csv"
        p.write_text("1,NA\n2,3\n")
        assert run_cli("svd-fit", "--input", p, "--rank", 1, "--iters", 5,
                       "--thin", 5, "--out-dir", tmp_path / "fit") == 2

    def test_determinism(self, tmp_path):
        run_cli("svd-sim", "--m", 12, "--n", 8, "--rank-true", 2,
                "--out-dir", tmp_path, "--seed", 2)
        for sub in ("f1", "f2"):
            assert run_cli("svd-fit", "--input", tmp_path / "Y.csv",
                           "--rank", 2, "--iters", 30, "--thin", 3,
                           "--out-dir", tmp_path / sub, "--seed", 42) == 0
        assert ((tmp_path / "f1" / "d_trace.csv").read_bytes()
                == (tmp_path / "f2" / "d_trace.csv").read_bytes())
        assert ((tmp_path / "f1" / "M_post_mean.csv").read_bytes()
                == (tmp_path / "f2" / "M_post_mean.csv").read_bytes())


class TestEigenFit:
    def test_outputs(self, tmp_path, net_file):
        cov = tmp_path / "x.csv"
        cov.write_text("drug,smoke\n" + "\n".join("1,0" for _ in range(12)) + "\n")
        assert run_cli("eigen-fit", "--input", net_file, "--covariates", cov,
                       "--iters", 60, "--burn", 10, "--thin", 5,
                       "--out-dir", tmp_path / "out", "--seed", 9) == 0
        pos = (tmp_path / "out" / "positions.csv").read_text().splitlines()
        assert pos[0] == "node,u_1,u_2,u_1_scaled,u_2_scaled,drug,smoke"
        assert len(pos) == 13
        trace = (tmp_path / "out" / "lambda_theta_trace.csv").read_text().splitlines()
        assert trace[0] == "iter,lambda_1,lambda_2,theta"
        rows = np.array([[float(v) for v in line.split(",")]
                         for line in trace[1:]])
        assert np.all(rows[:, 1] <= rows[:, 2])  # sorted lambdas
        manifest = json.loads((tmp_path / "out" / "manifest.json").read_text())
        assert manifest["t2_lambda"] == 12.0  # defaults to n
        assert manifest["backend"] in ("compiled", "pure")

    def test_asymmetric_adjacency_names_pair(self, tmp_path, capsys):
        p = tmp_path / "bad.csv"
        p.write_text("NA,1,0\n0,NA,1\n0,1,NA\n")
        assert run_cli("eigen-fit", "--input", p, "--out-dir", tmp_path) == 2
        assert "(1,2)" in capsys.readouterr().err

    def test_covariate_mismatch_rejected(self, tmp_path, net_file):
        cov = tmp_path / "x.csv"
        cov.write_text("1,0\n0,1\n")
        assert run_cli("eigen-fit", "--input", net_file, "--covariates", cov,
                       "--iters", 20, "--burn", 5, "--thin", 5,
                       "--out-dir", tmp_path / "out") == 2

    def test_determinism(self, tmp_path, net_file):
        for sub in ("e1", "e2"):
            assert run_cli("eigen-fit", "--input", net_file, "--iters", 40,
                           "--burn", 5, "--thin", 5, "--seed", 4,
                           "--out-dir", tmp_path / sub) == 0
        for name in ("lambda_theta_trace.csv", "M_bar.csv", "positions.csv"):
            assert ((tmp_path / "e1" / name).read_bytes()
                    == (tmp_path / "e2" / name).read_bytes())


class TestChains:
    def test_parallel_chains_write_subdirs(self, tmp_path, net_file):
        assert run_cli("eigen-fit", "--input", net_file, "--iters", 30,
                       "--burn", 5, "--thin", 5, "--chains", 2, "--seed", 8,
                       "--out-dir", tmp_path / "multi") == 0
        for k in (0, 1):
            sub = tmp_path / "multi" / f"chain_{k:02d}"
            assert (sub / "lambda_theta_trace.csv").exists()
            assert (sub / "manifest.json").exists()
        t0 = (tmp_path / "multi" / "chain_00" / "lambda_theta_trace.csv").read_bytes()
        t1 = (tmp_path / "multi" / "chain_01" / "lambda_theta_trace.csv").read_bytes()
        assert t0 != t1  # independent streams

    def test_chain_zero_matches_single_run(self, tmp_path, net_file):
        run_cli("eigen-fit", "--input", net_file, "--iters", 30, "--burn", 5,
                "--thin", 5, "--chains", 2, "--seed", 8,
                "--out-dir", tmp_path / "multi")
        run_cli("eigen-fit", "--input", net_file, "--iters", 30, "--burn", 5,
                "--thin", 5, "--seed", 8, "--out-dir", tmp_path / "single")
        assert ((tmp_path / "multi" / "chain_00" / "lambda_theta_trace.csv").read_bytes()
                == (tmp_path / "single" / "lambda_theta_trace.csv").read_bytes())


def test_console_entry_point(tmp_path):
    proc = subprocess.run(
        [sys.executable, "-m", "stiefel_mcmc.cli", "svd-sim", "--m", "6",
         "--n", "5", "--rank-true", "2", "--out-dir", str(tmp_path)],
        capture_output=True, text=True)
    assert proc.returncode == 0
    assert (tmp_path / "Y.csv").exists()


def test_log_env_var_controls_verbosity(tmp_path):
    import os

    env = dict(os.environ, STIEFEL_MCMC_LOG="INFO")
    proc = subprocess.run(
        [sys.executable, "-m", "stiefel_mcmc.cli", "svd-sim", "--m", "6",
         "--n", "5", "--rank-true", "2", "--out-dir", str(tmp_path)],
        capture_output=True, text=True, env=env)
    assert proc.returncode == 0
    assert "wrote" in proc.stderr
