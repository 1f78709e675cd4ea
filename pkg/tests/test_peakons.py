import numpy as np
import pytest
from pydantic import ValidationError

from peakonlab.errors import CollisionError
from peakonlab.peakons import (
    amplitudes_for_speed, integrate_peakons, integrate_two_peakon_transformed,
    line_vector_field, peakon_field_eval, reduction_table, rhs_line, rhs_periodic,
    single_peakon_speed, speed_coefficients, two_peakon_transformed_rhs,
)
from peakonlab.state import IntegratorOptions, ModelParams, PeakonState


SH = np.sinh(0.5)
CH = np.cosh(0.5)
TRIPLES = [
    (0.0, 0.0, 1.0), (1.0, 0.0, 0.0), (0.0, 1.0, 0.0), (1.0, 1.0, 0.0),
    (1.0, 0.0, 1.0), (0.0, 1.0, 1.0), (1.0, 1.0, 1.0), (2.0, 0.0, 0.0),
    (0.0, 0.0, 2.0), (0.5, -0.3, 0.2), (-1.0, 0.5, 1.0), (0.3, 0.7, -0.4),
]


def literal_periodic_rhs(p, q, k1, k2, k3):
    """Term-by-term periodic N-peakon system for ordered 0 < q_1 < ... < q_N < 1"""
    n = len(p)
    pdot = np.zeros(n)
    qdot = np.zeros(n)
    cosh, sinh, sgn = np.cosh, np.sinh, np.sign
    for m in range(n):
        xi = [q[j] - q[m] for j in range(n)]
        ax = [abs(v) for v in xi]
        others = [j for j in range(n) if j != m]
        left = [j for j in range(n) if j < m]
        right = [j for j in range(n) if j > m]
        straddle = [(j, k) for j in left for k in right]
        both_right = [(j, k) for j in right for k in right if j < k]
        both_left = [(j, k) for j in left for k in left if j < k]

        brace = 0.0
        for j in others:
            brace += 0.5 * p[j] * sgn(xi[j]) * (
                p[m] * (cosh(0.5 + ax[j]) - cosh(1.5 - ax[j]))
                + p[j] * (cosh(0.5 - 2 * ax[j]) - cosh(1.5 - 2 * ax[j]))
            )
        for j, k in straddle:
            brace += 2 * SH * p[j] * p[k] * sinh(xi[j] + xi[k])
        for j, k in both_right:
            brace += p[j] * p[k] * (cosh(0.5 - ax[j] - ax[k]) - cosh(1.5 - ax[j] - ax[k]))
        for j, k in both_left:
            brace -= p[j] * p[k] * (cosh(0.5 - ax[j] - ax[k]) - cosh(1.5 - ax[j] - ax[k]))
        linear = sum(p[j] * sgn(xi[j]) * (cosh(ax[j]) - cosh(1 - ax[j])) for j in range(n))
        pdot[m] = k2 * p[m] / (2 * SH) * brace + k3 * p[m] / (2 * SH) * linear

        v = ((2 * k1 / 3 + k2) * SH ** 2 + k2 / 2) * p[m] ** 2
        v += (k1 + k2) * p[m] / (2 * SH) * sum(p[j] * (sinh(0.5 + ax[j]) + sinh(1.5 - ax[j])) for j in others)
        group = sum(p[j] * p[k] * (sinh(1.5 + xi[j] - xi[k]) - sinh(0.5 + xi[j] - xi[k])) for j, k in straddle)
        group += SH * (sum(pi ** 2 for pi in p) + 2 * sum(
            p[j] * p[k] * cosh(xi[j] - xi[k]) for j, k in both_right + both_left))
        v += (2 * k1 + k2) / (2 * SH) * group
        group = sum(p[j] ** 2 / 2 * (sinh(1.5 - 2 * ax[j]) - sinh(0.5 - 2 * ax[j])) for j in others)
        group += 2 * SH * sum(p[j] * p[k] * cosh(xi[j] + xi[k]) for j, k in straddle)
        group += sum(p[j] * p[k] * (sinh(1.5 - ax[k] - ax[j]) - sinh(0.5 - ax[k] - ax[j]))
                     for j, k in both_right + both_left)
        v += k2 / (2 * SH) * group
        v += k3 / (2 * SH) * sum(p[j] * (sinh(ax[j]) + sinh(1 - ax[j])) for j in range(n))
        qdot[m] = v
    return pdot, qdot


class TestSpeedRelation:
    def test_line_coefficients(self):
        params = ModelParams(k1=1.5, k2=0.5, k3=2.0)
        assert speed_coefficients(params) == pytest.approx((1.5, 2.0))

    def test_mch_unit_peakon(self):
        """mCH peakon of amplitude 1 travels at 2/3"""
        assert single_peakon_speed(1.0, ModelParams(k1=1.0)) == pytest.approx(2.0 / 3.0)

    def test_circle_mch(self):
        """Periodic mCH: c = (2 + cosh 1) a^2 / 3"""
        c = single_peakon_speed(0.7, ModelParams(k1=1.0), "circle")
        assert c == pytest.approx((2 + np.cosh(1.0)) * 0.49 / 3.0, rel=1e-14)

    def test_quadratic_branch(self):
        report = amplitudes_for_speed(2.0 / 3.0, ModelParams(k1=1.0))
        assert report.branch == "quadratic"
        assert report.real_roots == pytest.approx([1.0, -1.0])

    def test_complex_branch(self):
        """c below -B^2/(4A) has no real amplitude"""
        report = amplitudes_for_speed(-1.0, ModelParams(k1=1.0, k3=1.0))
        assert report.branch == "complex"
        assert report.real_roots == []
        assert report.complex_roots[0][0] == pytest.approx(-0.75)

    def test_degenerate_branches(self):
        ch = amplitudes_for_speed(1.5, ModelParams(k3=1.0))
        assert ch.branch == "degenerate" and ch.real_roots == pytest.approx([1.5])
        assert amplitudes_for_speed(0.0, ModelParams()).branch == "every"
        assert amplitudes_for_speed(1.0, ModelParams()).branch == "none"

    def test_reduction_table_exact(self):
        """Every published closed form matches on both domains"""
        rows = reduction_table()
        assert len(rows) == 16
        bad = [(r.name, r.domain, r.max_error) for r in rows if not r.exact]
        assert bad == []


class TestPeakonField:
    def test_line_slopes_at_peak(self):
        state = PeakonState(p=[1.3], q=[0.2])
        u, left, right = peakon_field_eval(state, [0.2])
        assert u[0] == pytest.approx(1.3)
        assert left[0] == pytest.approx(1.3)
        assert right[0] == pytest.approx(-1.3)

    def test_circle_slopes_at_peak(self):
        state = PeakonState(domain="circle", p=[2.0], q=[0.25])
        u, left, right = peakon_field_eval(state, [0.25])
        assert u[0] == pytest.approx(2.0 * CH)
        assert left[0] == pytest.approx(2.0 * SH)
        assert right[0] == pytest.approx(-2.0 * SH)

    def test_state_validation(self):
        with pytest.raises(ValidationError):
            PeakonState(p=[1.0, 1.0], q=[1.0, 0.0])
        with pytest.raises(ValidationError):
            PeakonState(domain="circle", p=[1.0], q=[1.5])


class TestVectorFields:
    def test_single_line_peakon(self):
        params = ModelParams(k1=1.0, k2=0.5, k3=0.25)
        pdot, qdot = rhs_line(PeakonState(p=[0.8], q=[0.0]), params)
        assert pdot[0] == 0.0
        assert qdot[0] == pytest.approx(single_peakon_speed(0.8, params))

    def test_single_circle_peakon(self):
        params = ModelParams(k1=1.0, k2=0.5, k3=0.25)
        pdot, qdot = rhs_periodic(PeakonState(domain="circle", p=[0.8], q=[0.3]), params)
        assert pdot[0] == 0.0
        assert qdot[0] == pytest.approx(single_peakon_speed(0.8, params, "circle"), rel=1e-13)

    def test_periodic_matches_literal_sums(self):
        """Pair-sum evaluation agrees with the term-by-term system for N=3"""
        rng = np.random.default_rng(3)
        for _ in range(5):
            p = rng.uniform(-1.5, 1.5, 3)
            q = np.sort(rng.uniform(0.02, 0.98, 3))
            k1, k2, k3 = rng.uniform(-1.0, 2.0, 3)
            state = PeakonState(domain="circle", p=p.tolist(), q=q.tolist())
            pdot, qdot = rhs_periodic(state, ModelParams(k1=k1, k2=k2, k3=k3))
            ref_p, ref_q = literal_periodic_rhs(p, q, k1, k2, k3)
            assert np.max(np.abs(pdot - ref_p)) < 1e-12
            assert np.max(np.abs(qdot - ref_q)) < 1e-12

    def test_two_peakon_transformed_is_push_forward(self):
        """(P+-, Q+-)' equals the sum and difference of the direct system"""
        params = ModelParams(k1=0.7, k2=1.1, k3=0.4)
        state = PeakonState(p=[1.2, -0.4], q=[-0.6, 0.9])
        pdot, qdot = line_vector_field(state.p_array, state.q_array, params)
        expected = [pdot[0] + pdot[1], qdot[0] + qdot[1], pdot[0] - pdot[1], qdot[0] - qdot[1]]
        assert np.allclose(two_peakon_transformed_rhs(state, params), expected, atol=1e-13)

    def test_transformed_identity_on_random_states(self):
        rng = np.random.default_rng(21)
        for _ in range(100):
            q = np.sort(rng.uniform(-3.0, 3.0, 2))
            if q[1] - q[0] < 1e-3:
                q[1] += 1e-3
            state = PeakonState(p=rng.uniform(-2.0, 2.0, 2).tolist(), q=q.tolist())
            params = ModelParams(**dict(zip(("k1", "k2", "k3"), rng.uniform(-1.0, 2.0, 3))))
            pdot, qdot = line_vector_field(state.p_array, state.q_array, params)
            expected = [pdot[0] + pdot[1], qdot[0] + qdot[1], pdot[0] - pdot[1], qdot[0] - qdot[1]]
            assert np.max(np.abs(two_peakon_transformed_rhs(state, params) - np.asarray(expected))) < 1e-12

    def test_transformed_needs_two_line_peakons(self):
        with pytest.raises(ValueError):
            two_peakon_transformed_rhs(PeakonState(p=[1.0], q=[0.0]), ModelParams(k1=1.0))

    def test_collision_raises(self):
        state = PeakonState(p=[1.0, 1.0], q=[0.0, 1e-9])
        with pytest.raises(CollisionError):
            rhs_line(state, ModelParams(k3=1.0))


class TestIntegration:
    def test_single_peakon_travels(self):
        """q(t) = q0 + c t and p constant"""
        params = ModelParams(k1=1.0)
        opts = IntegratorOptions(atol=1e-12, rtol=1e-12, samples=31)
        traj = integrate_peakons(PeakonState(p=[1.0], q=[0.0]), params, 3.0, opts)
        assert traj.status == "complete"
        assert traj.q_lift[-1, 0] == pytest.approx(2.0, abs=1e-9)
        assert np.max(np.abs(traj.p[:, 0] - 1.0)) < 1e-12

    @pytest.mark.parametrize("domain", ["line", "circle"])
    @pytest.mark.parametrize("k", TRIPLES)
    def test_single_peakon_exact_over_long_window(self, k, domain):
        params = ModelParams(k1=k[0], k2=k[1], k3=k[2])
        q0 = 0.0 if domain == "line" else 0.25
        opts = IntegratorOptions(atol=1e-13, rtol=1e-12, samples=21)
        traj = integrate_peakons(PeakonState(domain=domain, p=[0.8], q=[q0]), params, 10.0, opts)
        assert traj.status == "complete"
        c = single_peakon_speed(0.8, params, domain)
        assert np.max(np.abs(traj.q_lift[:, 0] - q0 - c * traj.t)) < 1e-8
        assert np.max(np.abs(traj.p[:, 0] - 0.8)) < 1e-10

    def test_circle_positions_renormalized(self):
        params = ModelParams(k1=1.0, k2=1.0, k3=1.0)
        traj = integrate_peakons(PeakonState(domain="circle", p=[0.5], q=[0.25]), params, 10.0)
        assert np.all((traj.q >= 0.0) & (traj.q < 1.0))
        c = single_peakon_speed(0.5, params, "circle")
        assert traj.q_lift[-1, 0] == pytest.approx(0.25 + 10.0 * c, abs=1e-7)

    def test_transformed_integration_agrees(self):
        params = ModelParams(k3=1.0)
        state = PeakonState(p=[2.0, 1.0], q=[-5.0, 0.0])
        opts = IntegratorOptions(atol=1e-12, rtol=1e-12, samples=41)
        traj = integrate_peakons(state, params, 10.0, opts)
        t, p, q = integrate_two_peakon_transformed(state, params, 10.0, opts)
        assert np.allclose(t, traj.t)
        assert np.max(np.abs(p - traj.p)) < 1e-7
        assert np.max(np.abs(q - traj.q)) < 1e-7

    def test_ch_fast_peakon_catches_up(self):
        """CH peakons exchange amplitudes without colliding"""
        params = ModelParams(k3=1.0)
        traj = integrate_peakons(PeakonState(p=[2.0, 1.0], q=[-5.0, 0.0]), params, 40.0)
        assert traj.status == "complete"
        assert traj.p[-1, 1] > traj.p[-1, 0]

    def test_peakon_antipeakon_collision(self):
        """A CH peakon-antipeakon pair stops with a collision event"""
        opts = IntegratorOptions(collide_eps=1e-3)
        traj = integrate_peakons(PeakonState(p=[1.0, -1.0], q=[-1.0, 1.0]), ModelParams(k3=1.0), 20.0, opts)
        assert traj.status == "collision"
        assert traj.events[0].kind == "collision"
        assert traj.events[0].t < 20.0

    def test_dense_state(self):
        params = ModelParams(k1=1.0)
        traj = integrate_peakons(PeakonState(p=[1.0], q=[0.0]), params, 1.0)
        p, q = traj.state_at(0.5)
        assert q[0] == pytest.approx(1.0 / 3.0, abs=1e-8)
