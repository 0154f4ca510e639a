import math

import numpy as np
import pytest
import scipy.integrate

from cglab import ensembles, kernel
from cglab.errors import DomainError, InvalidSpecError


class TestPsi:
    def test_alpha0_ground_state(self):
        # psi_0(x) = e^{-x/2} for alpha = 0
        for x in (0.1, 1.0, 3.7, 20.0):
            assert kernel.psi(0, x, 0) == pytest.approx(math.exp(-x / 2.0), rel=1e-14)

    def test_ground_state_normalized(self):
        for alpha in (0, 1, 5):
            val, err = scipy.integrate.quad(
                lambda x: kernel.psi(0, x, alpha) ** 2, 0, 300, limit=200
            )
            assert val == pytest.approx(1.0, abs=1e-9)

    @pytest.mark.parametrize("alpha", [0, 1, 5])
    def test_orthogonality_low_degrees(self, alpha):
        val, _ = scipy.integrate.quad(
            lambda x: kernel.psi(0, x, alpha) * kernel.psi(1, x, alpha), 0, 200, limit=200
        )
        assert abs(val) <= 1e-8

    def test_orthonormality_matrix(self):
        basis = kernel.LaguerreBasis(alpha=3, max_degree=8)
        xs, ws = np.polynomial.legendre.leggauss(400)
        # map [-1,1] -> [0, 200]
        xs = 100.0 * (xs + 1.0)
        ws = 100.0 * ws
        rows = np.array([basis.psi_row(float(x)) for x in xs])
        gram = (rows * ws[:, None]).T @ rows
        assert np.max(np.abs(gram - np.eye(9))) <= 1e-8

    def test_sign_changes(self):
        xs = np.linspace(1e-3, 80.0, 20_000)
        for alpha in (0, 3):
            basis = kernel.LaguerreBasis(alpha=alpha, max_degree=10)
            rows = np.array([basis.psi_row(float(x)) for x in xs])
            for j in (1, 2, 5, 10):
                signs = np.sign(rows[:, j])
                changes = int(np.sum(np.abs(np.diff(signs)) > 1))
                assert changes == j, (alpha, j, changes)

    def test_recurrence_consistency(self):
        rng = np.random.default_rng(2)
        basis = kernel.LaguerreBasis(alpha=4, max_degree=40)
        a = 4.0
        for x in rng.uniform(0.5, 150.0, size=12):
            row = basis.psi_row(float(x))
            scale = np.max(np.abs(row))
            for j in range(1, 39):
                lhs = math.sqrt((j + 1) * (j + 1 + a)) * row[j + 1]
                rhs = (2 * j + a + 1 - x) * row[j] - math.sqrt(j * (j + a)) * row[j - 1]
                assert abs(lhs - rhs) <= 1e-10 * scale * max(abs(2 * j + a + 1 - x), 1.0)

    def test_large_x_rescaled_sweep_matches_mpmath(self):
        # beyond the float range of psi_0, the log-scale sweep must still
        # recover O(1) values at degrees ~ x/4
        import mpmath

        x, alpha, j = 2000.0, 20, 520
        got = kernel.psi(j, x, alpha)
        with mpmath.workdps(80):
            lag = mpmath.laguerre(j, alpha, x)
            lg = mpmath.exp(
                0.5 * (mpmath.loggamma(j + 1) - mpmath.loggamma(j + alpha + 1))
                - mpmath.mpf(x) / 2
            ) * mpmath.power(x, alpha / 2.0)
            expect = float(lg * lag)
        assert got == pytest.approx(expect, rel=1e-9)

    def test_domain(self):
        with pytest.raises(DomainError):
            kernel.psi(3, 0.0, 0)
        with pytest.raises(InvalidSpecError):
            kernel.LaguerreBasis(alpha=-1, max_degree=3)


class TestKernelForms:
    @pytest.mark.parametrize("n,alpha", [(5, 0), (20, 3), (50, 10)])
    def test_cd_diagonal_matches_direct_sum(self, n, alpha):
        ke = kernel.KernelEval(N=n, alpha=alpha)
        xs = np.geomspace(0.05, 4.0 * n + 2.0 * alpha + 2.0, 40)
        sums = np.array([kernel.kernel_sum_diag(ke, float(x)) for x in xs])
        cds = np.array([kernel.kernel_diag(ke, float(x)) for x in xs])
        assert np.max(np.abs(sums - cds)) <= 1e-8 * np.max(np.abs(sums))

    @pytest.mark.parametrize("n,alpha", [(8, 0), (30, 5)])
    def test_cd_offdiagonal_matches_direct_sum(self, n, alpha):
        ke = kernel.KernelEval(N=n, alpha=alpha)
        rng = np.random.default_rng(7)
        pts = rng.uniform(0.1, 3.0 * n, size=(30, 2))
        sums = np.array([kernel.kernel_sum(ke, x, y) for x, y in pts])
        cds = np.array([kernel.kernel_cd(ke, x, y) for x, y in pts])
        assert np.max(np.abs(sums - cds)) <= 1e-8 * np.max(np.abs(sums))

    def test_positivity_on_log_grid(self):
        ke = kernel.KernelEval(N=25, alpha=4)
        for x in np.geomspace(1e-6, 1e3, 60):
            assert kernel.kernel_diag(ke, float(x)) >= -1e-12

    @pytest.mark.parametrize("n,alpha", [(10, 0), (12, 3)])
    def test_trace_identity(self, n, alpha):
        ke = kernel.KernelEval(N=n, alpha=alpha)
        assert kernel.trace_integral(ke) == pytest.approx(n, rel=1e-6)

    def test_scaled_trace_identity(self):
        ke = kernel.KernelEval(N=10, alpha=2, mode=kernel.SCALED)
        assert kernel.trace_integral(ke) == pytest.approx(10.0, rel=1e-6)

    def test_scaled_is_change_of_variables(self):
        keu = kernel.KernelEval(N=12, alpha=4)
        kes = kernel.KernelEval(N=12, alpha=4, mode=kernel.SCALED)
        nu = keu.nu_value
        for x in (0.05, 0.3, 0.9, 1.02):
            assert kernel.kernel_diag(kes, x) == pytest.approx(
                nu * kernel.kernel_diag(keu, nu * x), rel=1e-12
            )


class TestTailBound:
    def test_small_integral_expansion(self):
        # far beyond the soft edge, bound ~ I * e
        ke = kernel.KernelEval(N=20, alpha=4)
        b = kernel.tail_bound_from_kernel(ke, 1.6, kernel.LAMBDA_MAX)
        assert b <= 1e-7

    def test_monotone_in_t(self):
        ke = kernel.KernelEval(N=15, alpha=2)
        ts = [0.9, 1.0, 1.05, 1.1, 1.3]
        vals = [kernel.tail_bound_from_kernel(ke, t, kernel.LAMBDA_MAX) for t in ts]
        assert all(b <= a * (1 + 1e-12) for a, b in zip(vals, vals[1:]))

    def test_lambda_min_branch_monotone(self):
        ke = kernel.KernelEval(N=15, alpha=6)
        ts = [1e-4, 1e-3, 5e-3, 2e-2]
        vals = [kernel.tail_bound_from_kernel(ke, t, kernel.LAMBDA_MIN) for t in ts]
        assert all(b >= a for a, b in zip(vals, vals[1:]))

    def test_empirical_domination_lambda_max(self):
        # 500 Wishart samples at N=30, alpha=6: observed frequency of
        # lambda_max/nu > 1.1 must stay below the trace bound + 3 s.e.
        n, alpha, samples, t = 30, 6, 500, 1.1
        ke = kernel.KernelEval(N=n, alpha=alpha)
        bound = kernel.tail_bound_from_kernel(ke, t, kernel.LAMBDA_MAX)
        nu = ke.nu_value
        hits = 0
        for i in range(samples):
            gen = ensembles.SeededRng(4242, i).generator()
            x = ensembles.standard_complex_normal(gen, (n, n + alpha))
            w = x @ x.conj().T
            hits += float(np.linalg.eigvalsh(w)[-1]) / nu > t
        freq = hits / samples
        se = math.sqrt(max(freq * (1 - freq), 1.0 / samples) / samples)
        assert freq <= bound + 3.0 * se

    def test_unknown_branch(self):
        ke = kernel.KernelEval(N=5, alpha=0)
        with pytest.raises(InvalidSpecError):
            kernel.tail_bound_from_kernel(ke, 1.0, "both")
