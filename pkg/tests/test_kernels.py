import os
import subprocess
import sys

import numpy as np
import pytest
from scipy.stats import norm

from stiefel_mcmc.kernels import _pure

BACKENDS = [_pure]
try:
    from stiefel_mcmc.kernels import _speedups
    BACKENDS.append(_speedups)
except ImportError:
    pass

IDS = [mod.BACKEND_NAME for mod in BACKENDS]


@pytest.mark.parametrize("mod", BACKENDS, ids=IDS)
class TestTruncnorm:
    def test_strict_inequality_deep_tail(self, mod):
        rng = np.random.default_rng(0)
        draws = np.array([mod.truncnorm_left(10.0, rng) for _ in range(5000)])
        assert np.all(draws > 10.0)
        assert np.all(np.isfinite(draws))

    @pytest.mark.parametrize("a", [-6.0, -1.0, 0.0, 2.0, 4.9, 5.5, 8.0])
    def test_mean_matches_closed_form(self, mod, a):
        rng = np.random.default_rng(1)
        n = 40_000
        draws = np.array([mod.truncnorm_left(a, rng) for _ in range(n)])
        expected = norm.pdf(a) / norm.sf(a)
        var = 1.0 + a * expected - expected**2
        assert abs(draws.mean() - expected) < 4 * np.sqrt(var / n)


@pytest.mark.parametrize("mod", BACKENDS, ids=IDS)
class TestZFill:
    def test_codes_respected_and_symmetric(self, mod):
        rng = np.random.default_rng(2)
        n = 10
        codes = rng.integers(-1, 2, size=(n, n)).astype(np.int8)
        codes = np.triu(codes, 1) + np.triu(codes, 1).T
        np.fill_diagonal(codes, -1)
        mean = rng.standard_normal((n, n))
        mean = 0.5 * (mean + mean.T)
        for _ in range(200):
            z = mod.zfill_probit(np.ascontiguousarray(mean), codes, rng)
            np.testing.assert_array_equal(z, z.T)
            assert np.all(z[codes == 1] > 0)
            assert np.all(z[codes == 0] < 0)

    def test_diagonal_variance_two(self, mod):
        rng = np.random.default_rng(3)
        n = 8
        codes = np.full((n, n), -1, dtype=np.int8)
        mean = np.zeros((n, n))
        diags = np.concatenate([np.diag(mod.zfill_probit(mean, codes, rng))
                                for _ in range(6000)])
        assert diags.var() == pytest.approx(2.0, abs=0.06)


@pytest.mark.parametrize("mod", BACKENDS, ids=IDS)
class TestVectorKernels:
    def test_mf_unit_norm_all_dims(self, mod):
        rng = np.random.default_rng(4)
        for m in (1, 2, 3, 10, 40):
            c = np.ascontiguousarray(rng.standard_normal(m) * 4)
            u = mod.mf_vector(c, rng)
            assert abs(u @ u - 1.0) <= 1e-12

    def test_bingham_unit_norm_and_sign_case(self, mod):
        rng = np.random.default_rng(5)
        y = mod.bingham_spectral(np.array([2.5]), rng)
        assert y[0] in (-1.0, 1.0)
        for q in (2, 5, 30):
            lam = np.sort(rng.uniform(-50, 50, q))
            y = mod.bingham_spectral(np.ascontiguousarray(lam), rng)
            assert abs(y @ y - 1.0) <= 1e-12

    def test_sphere_uniform(self, mod):
        rng = np.random.default_rng(6)
        draws = np.array([mod.sample_sphere(3, rng) for _ in range(30_000)])
        np.testing.assert_allclose((draws**2).mean(axis=0), 1 / 3, atol=0.02)
        assert np.all(np.abs(draws.mean(axis=0)) < 0.02)


@pytest.mark.skipif(len(BACKENDS) < 2, reason="compiled backend not built")
class TestBackendAgreement:
    def test_mf_vector_same_law(self):
        c = np.array([0.0, 0.0, 2.0])
        means = []
        for mod in BACKENDS:
            rng = np.random.default_rng(7)
            means.append(np.mean([mod.mf_vector(c, rng)[2]
                                  for _ in range(40_000)]))
        assert abs(means[0] - means[1]) < 0.01

    def test_bingham_same_law(self):
        lam = np.array([3.0, 0.0])
        means = []
        for mod in BACKENDS:
            rng = np.random.default_rng(8)
            means.append(np.mean([mod.bingham_spectral(lam, rng)[0] ** 2
                                  for _ in range(40_000)]))
        assert abs(means[0] - means[1]) < 0.01

    def test_truncnorm_same_law(self):
        means = []
        for mod in BACKENDS:
            rng = np.random.default_rng(9)
            means.append(np.mean([mod.truncnorm_left(1.5, rng)
                                  for _ in range(40_000)]))
        assert abs(means[0] - means[1]) < 0.01


def test_backend_env_override():
    code = ("import stiefel_mcmc.kernels as k; print(k.BACKEND)")
    env = dict(os.environ, STIEFEL_MCMC_BACKEND="pure")
    out = subprocess.run([sys.executable, "-c", code], env=env,
                         capture_output=True, text=True)
    assert out.stdout.strip() == "pure"


def test_backend_reports_name():
    from stiefel_mcmc.kernels import BACKEND
    assert BACKEND in ("compiled", "pure")
