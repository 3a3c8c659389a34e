"""Backend kernels: quantile accuracy, dual solver, and numba/numpy parity."""

import os
import subprocess
import sys

import numpy as np
import pytest
from scipy import stats

from povindex import _kernels


class TestNormalQuantile:
    def test_accuracy_against_scipy(self):
        ps = np.concatenate([
            np.array([1e-12, 1e-8, 1e-4, 0.02425, 0.5, 0.975, 1 - 1e-8]),
            np.linspace(0.001, 0.999, 199),
        ])
        ours = np.array([_kernels.normal_quantile(p) for p in ps])
        ref = stats.norm.ppf(ps)
        assert np.max(np.abs(ours - ref)) < 1e-9

    def test_edge_cases(self):
        assert _kernels.normal_quantile(0.0) == -np.inf
        assert _kernels.normal_quantile(1.0) == np.inf
        assert np.isnan(_kernels.normal_quantile(-0.1))
        assert _kernels.normal_quantile(0.5) == pytest.approx(0.0, abs=1e-15)

    def test_known_value(self):
        assert _kernels.normal_quantile(0.975) == pytest.approx(1.959963984540054, abs=1e-9)

    def test_array_version_matches_scalar(self):
        ps = np.linspace(0.01, 0.99, 57)
        arr = _kernels.ndtri_array(ps)
        scl = np.array([_kernels.normal_quantile(p) for p in ps])
        assert np.allclose(arr, scl, atol=1e-12, rtol=0)


class TestChi2Quantile:
    def test_against_scipy(self):
        for p in (0.5, 0.8, 0.9, 0.95, 0.99):
            assert _kernels.chi2_quantile_1df(p) == pytest.approx(
                stats.chi2.ppf(p, df=1), abs=1e-8
            )

    def test_known_95(self):
        assert _kernels.chi2_quantile_1df(0.95) == pytest.approx(3.841458821, abs=1e-7)


class TestElSolve:
    def test_balanced_two_point(self):
        lam, lr, _, status = _kernels.el_solve(np.array([-1.0, 1.0]))
        assert status == 0
        assert lam == pytest.approx(0.0, abs=1e-9)
        assert lr == pytest.approx(0.0, abs=1e-12)

    def test_closed_form_two_point(self):
        # -1/(1-lam) + 3/(1+3 lam) = 0  =>  lam = 1/3
        lam, lr, _, status = _kernels.el_solve(np.array([-1.0, 3.0]))
        assert status == 0
        assert lam == pytest.approx(1 / 3, abs=1e-9)
        assert lr == pytest.approx(2 * (np.log(2 / 3) + np.log(2.0)), abs=1e-10)

    def test_dual_residual_small_at_solution(self):
        rng = np.random.default_rng(5)
        for _ in range(100):
            g = rng.normal(size=50)
            g -= g.mean() * 0.5  # keep 0 inside the hull most of the time
            if not (g.min() < 0 < g.max()):
                continue
            lam, lr, iters, status = _kernels.el_solve(g)
            assert status == 0
            scale = np.max(np.abs(g))
            dual = np.mean((g / scale) / (1.0 + lam * g))
            assert abs(dual) <= 1e-10
            assert lr >= -1e-12

    def test_scale_invariant_log_ratio(self):
        g = np.array([-0.3, 0.1, 0.4, -0.2, 0.05])
        _, lr1, _, _ = _kernels.el_solve(g)
        _, lr2, _, _ = _kernels.el_solve(g * 1e6)
        assert lr1 == pytest.approx(lr2, rel=1e-9)


@pytest.mark.skipif(
    "numba" not in _kernels.IMPLEMENTATIONS, reason="numba backend not active"
)
class TestBackendParity:
    def test_pair_stats_agree(self):
        rng = np.random.default_rng(7)
        for _ in range(20):
            x = rng.exponential(0.5, size=int(rng.integers(3, 60)))
            z = 1.41
            u_nb = _kernels.IMPLEMENTATIONS["numba"]["sen_pair_stats"](x, z)
            u_np = _kernels.IMPLEMENTATIONS["numpy"]["sen_pair_stats"](x, z)
            assert u_nb[0] == pytest.approx(u_np[0], abs=1e-13)
            assert u_nb[1] == pytest.approx(u_np[1], abs=1e-13)
            m_nb = _kernels.IMPLEMENTATIONS["numba"]["sst_pair_mean"](x, z)
            m_np = _kernels.IMPLEMENTATIONS["numpy"]["sst_pair_mean"](x, z)
            assert m_nb == pytest.approx(m_np, abs=1e-13)

    def test_row_sums_agree(self):
        rng = np.random.default_rng(8)
        x = rng.exponential(0.5, size=40)
        z = 1.41
        r1_nb, r2_nb = _kernels.IMPLEMENTATIONS["numba"]["sen_row_sums_pairs"](x, z)
        r1_np, r2_np = _kernels.IMPLEMENTATIONS["numpy"]["sen_row_sums_pairs"](x, z)
        assert np.allclose(r1_nb, r1_np, atol=1e-12)
        assert np.allclose(r2_nb, r2_np, atol=1e-12)
        r3_nb = _kernels.IMPLEMENTATIONS["numba"]["sst_row_sums_pairs"](x, z)
        r3_np = _kernels.IMPLEMENTATIONS["numpy"]["sst_row_sums_pairs"](x, z)
        assert np.allclose(r3_nb, r3_np, atol=1e-12)

    def test_el_solve_agrees(self):
        rng = np.random.default_rng(9)
        for _ in range(30):
            g = rng.normal(size=80)
            if not (g.min() < 0 < g.max()):
                continue
            lam_nb, lr_nb, _, s_nb = _kernels.IMPLEMENTATIONS["numba"]["el_solve"](g)
            lam_np, lr_np, _, s_np = _kernels.IMPLEMENTATIONS["numpy"]["el_solve"](g)
            assert s_nb == 0 and s_np == 0
            assert lam_nb == pytest.approx(lam_np, rel=1e-7, abs=1e-10)
            assert lr_nb == pytest.approx(lr_np, rel=1e-7, abs=1e-10)


@pytest.mark.skipif(
    "numba" not in _kernels.IMPLEMENTATIONS, reason="numba backend not active"
)
def test_benchmark_script_runs():
    root = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
    proc = subprocess.run(
        [sys.executable, os.path.join(root, "benchmarks", "bench_backends.py"),
         "--sizes", "50", "--repeat", "2"],
        capture_output=True, text=True,
    )
    assert proc.returncode == 0, proc.stderr
    assert "el_solve" in proc.stdout


def test_backend_env_flag_selects_numpy():
    code = (
        "import povindex; "
        "assert povindex.ACTIVE_BACKEND == 'numpy', povindex.ACTIVE_BACKEND; "
        "import povindex._kernels as k; "
        "assert 'numba' not in k.IMPLEMENTATIONS"
    )
    env = dict(os.environ, POVINDEX_BACKEND="numpy")
    subprocess.run([sys.executable, "-c", code], check=True, env=env)


def test_backend_env_flag_rejects_unknown():
    env = dict(os.environ, POVINDEX_BACKEND="cuda")
    proc = subprocess.run(
        [sys.executable, "-c", "import povindex"], env=env, capture_output=True
    )
    assert proc.returncode != 0
