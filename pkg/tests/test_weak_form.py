import numpy as np
import pytest

from peakonlab.errors import TestFunctionSupportError
from peakonlab.peakons import integrate_peakons
from peakonlab.state import IntegratorOptions, ModelParams, PeakonState, PeakonTrajectory, TestFunction
from peakonlab.weak_form import kernel_convolve_at, random_test_function, weak_residual, weak_residual_report


TIGHT = IntegratorOptions(atol=1e-12, rtol=1e-12, samples=61)
MIXED = ModelParams(k1=1.0, k2=0.5, k3=0.5)


@pytest.fixture(scope="module")
def mch_peakon():
    params = ModelParams(k1=1.0)
    return params, integrate_peakons(PeakonState(p=[1.0], q=[0.0]), params, 3.0, TIGHT)


class TestWeakResidual:
    def test_exact_peakon_is_weak_solution(self, mch_peakon):
        params, traj = mch_peakon
        phi = TestFunction(t_center=1.5, t_half_width=1.0, x_center=1.2, x_half_width=1.5)
        report = weak_residual_report(traj, params, phi)
        assert report.within_bound
        assert abs(report.value) < 1e-6

    def test_random_test_functions(self, mch_peakon):
        params, traj = mch_peakon
        rng = np.random.default_rng(11)
        for _ in range(5):
            report = weak_residual_report(traj, params, random_test_function(rng, traj))
            assert report.within_bound, report

    def test_frozen_peakon_is_not_a_solution(self):
        """A peakon held in place leaves a residual far above the bound"""
        params = ModelParams(k1=1.0)
        traj = PeakonTrajectory.frozen(PeakonState(p=[1.0], q=[0.0]), params, 3.0)
        phi = TestFunction(t_center=1.5, t_half_width=1.0, x_center=0.5, x_half_width=1.5)
        report = weak_residual_report(traj, params, phi)
        assert not report.within_bound
        assert abs(report.value) > 1e-3

    def test_two_peakon_general_model(self):
        params = ModelParams(k1=0.5, k2=0.5, k3=1.0)
        traj = integrate_peakons(PeakonState(p=[1.0, 0.6], q=[-2.0, 1.0]), params, 2.0, TIGHT)
        phi = TestFunction(t_center=1.0, t_half_width=0.8, x_center=0.0, x_half_width=3.0)
        assert weak_residual_report(traj, params, phi).within_bound

    def test_periodic_peakon(self):
        params = ModelParams(k1=1.0, k2=1.0, k3=1.0)
        traj = integrate_peakons(PeakonState(domain="circle", p=[0.5], q=[0.25]), params, 1.0, TIGHT)
        phi = TestFunction(t_center=0.5, t_half_width=0.4, x_center=0.6, x_half_width=0.3)
        assert weak_residual_report(traj, params, phi).within_bound

    def test_initial_slice_term(self, mch_peakon):
        """Support reaching below t0 brings in the u(t0) phi(t0) term"""
        params, traj = mch_peakon
        phi = TestFunction(t_center=0.3, t_half_width=0.6, x_center=0.4, x_half_width=1.0)
        assert weak_residual_report(traj, params, phi).within_bound

    def test_support_outside_window(self, mch_peakon):
        params, traj = mch_peakon
        phi = TestFunction(t_center=2.8, t_half_width=1.0, x_center=0.0, x_half_width=1.0)
        with pytest.raises(TestFunctionSupportError):
            weak_residual(traj, params, phi)


def random_train(rng: np.random.Generator, n_peaks: int) -> PeakonState:
    """Positive momenta with peaks at least two units apart"""
    gaps = rng.uniform(2.0, 3.0, n_peaks - 1)
    q = np.concatenate([[0.0], np.cumsum(gaps)]) - 1.5
    return PeakonState(p=rng.uniform(0.3, 1.0, n_peaks).tolist(), q=q.tolist())


class TestMultiPeakonResidual:
    @pytest.mark.parametrize("n_peaks", [2, 3])
    @pytest.mark.parametrize("seed", range(10))
    def test_random_trains_are_weak_solutions(self, n_peaks, seed):
        """Integrated peakon trains satisfy the weak form against 20 random bumps"""
        rng = np.random.default_rng(100 * n_peaks + seed)
        traj = integrate_peakons(random_train(rng, n_peaks), MIXED, 1.0, TIGHT)
        for _ in range(20):
            report = weak_residual_report(traj, MIXED, random_test_function(rng, traj))
            assert report.within_bound, report

    @pytest.mark.parametrize("x_center", [-0.5, 0.0, 0.7])
    def test_frozen_pair_fails_by_a_wide_margin(self, x_center):
        traj = PeakonTrajectory.frozen(PeakonState(p=[1.0, 0.6], q=[-1.0, 1.0]), MIXED, 3.0)
        phi = TestFunction(t_center=1.5, t_half_width=1.0, x_center=x_center, x_half_width=1.5)
        report = weak_residual_report(traj, MIXED, phi)
        assert abs(report.value) >= 100.0 * report.bound


class TestKernelConvolution:
    def test_line_convolution_matches_direct_quadrature(self):
        """Exponential sweeps agree with brute-force quadrature of p * f"""
        from scipy.integrate import quad
        from peakonlab.peakons import field_arrays

        params = ModelParams(k1=1.0, k2=0.5)
        p, q = np.array([1.0, 0.5]), np.array([-0.5, 1.0])
        target = np.array([0.3])
        conv1, _ = kernel_convolve_at(p, q, target, "line", params, order=12)

        def integrand(y):
            _, ux, _ = field_arrays(p, q, [y], "line")
            return 0.5 * np.exp(-abs(target[0] - y)) * (1.0 / 3.0 + 0.25) * ux[0] ** 3

        pieces = [-30.0, -0.5, 0.3, 1.0, 30.0]
        direct = sum(quad(integrand, a, b, epsabs=1e-13, epsrel=1e-13)[0] for a, b in zip(pieces[:-1], pieces[1:]))
        assert conv1[0] == pytest.approx(direct, abs=1e-10)
