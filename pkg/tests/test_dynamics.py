"""Continuous-time integration: RHS, accuracy, energy decay, certificates."""

import math

import numpy as np
import pytest

from inertiq import (
    OdeState,
    PerturbationSpec,
    builtin_problem,
    integrate,
    make_quadratic,
    rate_certificate,
    rhs,
)
from inertiq.dynamics import TrajectoryRecord
from inertiq.errors import Divergence, EmptyTrajectory, NonFiniteState
from inertiq.problems import Problem


@pytest.fixture(scope="module")
def sine_well():
    return builtin_problem("example51")


def damped_oscillator_solution(t, x0=1.0, v0=0.0):
    """Closed form of x'' + x' + x = 0 (f = x^2/2, alpha = 1, beta = 0)."""
    om = math.sqrt(3.0) / 2.0
    a = x0
    b = (v0 + 0.5 * x0) / om
    return math.exp(-0.5 * t) * (a * math.cos(om * t) + b * math.sin(om * t))


class TestRhs:
    def test_equilibrium(self, sine_well):
        dx, dv = rhs(sine_well, 1.0, 0.2, PerturbationSpec.none(),
                     OdeState(0.0, np.array([0.0]), np.array([0.0])))
        np.testing.assert_array_equal(dx, [0.0])
        np.testing.assert_array_equal(dv, [0.0])

    def test_gradient_term(self, sine_well):
        dx, dv = rhs(sine_well, 1.0, 0.2, PerturbationSpec.none(),
                     OdeState(0.0, np.array([3.0]), np.array([0.0])))
        np.testing.assert_array_equal(dx, [0.0])
        assert dv[0] == pytest.approx(-(6.0 + 2.0 * math.sin(6.0)), rel=1e-15)
        assert dv[0] == pytest.approx(-5.441169, abs=1e-6)

    def test_beta_zero_is_heavy_ball_flow(self, sine_well):
        # with beta = 0 the acceleration is -alpha v - grad f(x)
        x, v = np.array([2.0]), np.array([-1.5])
        _, dv = rhs(sine_well, 0.7, 0.0, PerturbationSpec.none(), OdeState(0.0, x, v))
        expected = -0.7 * v - sine_well.grad(x)
        np.testing.assert_allclose(dv, expected, rtol=1e-15)

    def test_nonfinite_state(self, sine_well):
        with pytest.raises(NonFiniteState):
            rhs(sine_well, 1.0, 0.0, PerturbationSpec.none(),
                OdeState(0.0, np.array([np.nan]), np.array([0.0])))


class TestIntegrate:
    def test_constant_at_minimizer(self, sine_well):
        recs = integrate(sine_well, 1.0, 0.1, PerturbationSpec.none(),
                         [0.0], [0.0], t_end=1.0, dt=1e-2)
        for rec in recs:
            assert rec.energy == 0.0
            assert rec.value_error == 0.0
            assert rec.speed == 0.0

    def test_accuracy_against_closed_form(self):
        p = make_quadratic([1.0])
        recs = integrate(p, 1.0, 0.0, PerturbationSpec.none(),
                         [1.0], [0.0], t_end=5.0, dt=1e-3, record_every=100)
        for rec in recs:
            assert rec.x[0] == pytest.approx(damped_oscillator_solution(rec.t), abs=1e-11)

    def test_record_spacing_and_final(self, sine_well):
        recs = integrate(sine_well, 1.0, 0.1, PerturbationSpec.none(),
                         [3.0], [0.0], t_end=1.0, dt=1e-3, record_every=250)
        ts = [rec.t for rec in recs]
        assert ts[0] == 0.0
        assert ts[-1] == pytest.approx(1.0, abs=1e-12)
        assert ts[1] == pytest.approx(0.25, abs=1e-12)

    def test_energy_nonincreasing_in_t31_box(self, sine_well):
        recs = integrate(sine_well, 1.0, 0.1, PerturbationSpec.none(),
                         [3.0], [0.0], t_end=10.0, dt=1e-3)
        e0 = recs[0].energy
        energies = np.array([rec.energy for rec in recs])
        assert np.all(np.diff(energies) <= 1e-6 * e0)

    def test_divergence_guard(self):
        # concave objective: the flow escapes to infinity and hits the guard
        unstable = Problem(
            dimension=1,
            func=lambda x: float(-0.5 * x[0] ** 2),
            grad=lambda x: -x,
            gamma=1.0,
            lipschitz=1.0,
        )
        with pytest.raises(Divergence) as exc:
            integrate(unstable, 0.1, 0.0, PerturbationSpec.none(),
                      [1.0], [0.0], t_end=100.0, dt=1e-2)
        assert exc.value.when is not None and exc.value.when > 0

    def test_zero_amplitude_noise_bitwise_equal(self, sine_well):
        """Perturbed system with zero amplitude == unperturbed, bit for bit."""
        kw = dict(x0=[3.0], v0=[0.0], t_end=2.0, dt=1e-3, record_every=50)
        plain = integrate(sine_well, 1.0, 0.1, PerturbationSpec.none(), **kw)
        gauss0 = integrate(sine_well, 1.0, 0.1,
                           PerturbationSpec.gaussian(0.0, 0.01, seed=5), **kw)
        power0 = integrate(sine_well, 1.0, 0.1,
                           PerturbationSpec.power(0.0, 1.0, seed=5), **kw)
        for a, b in ((plain, gauss0), (plain, power0)):
            assert len(a) == len(b)
            for ra, rb in zip(a, b):
                assert ra.x.tobytes() == rb.x.tobytes()
                assert ra.v.tobytes() == rb.v.tobytes()

    def test_gaussian_noise_reproducible(self, sine_well):
        spec = PerturbationSpec.gaussian(0.01, 0.1, seed=11)
        kw = dict(x0=[3.0], v0=[0.0], t_end=1.0, dt=1e-2)
        a = integrate(sine_well, 1.0, 0.1, spec, **kw)
        b = integrate(sine_well, 1.0, 0.1, spec, **kw)
        for ra, rb in zip(a, b):
            assert ra.x.tobytes() == rb.x.tobytes()

    def test_perturbed_power_decay_trajectory_rate(self, sine_well):
        # |x(t) - x*| follows the forcing's 1/t^p law (coarse in-module check;
        # the acceptance suite runs the long-horizon version)
        recs = integrate(sine_well, 1.0, 0.1, PerturbationSpec.power(0.1, 1.0),
                         [3.0], [0.0], t0=1.0, t_end=80.0, dt=1e-2, record_every=10)
        ts = np.array([r.t for r in recs])
        ds = np.array([r.traj_error for r in recs])
        m = (ts >= 40.0) & (ds > 1e-15)
        slope = np.polyfit(np.log(ts[m]), np.log(ds[m]), 1)[0]
        assert slope <= -0.5

    def test_validation(self, sine_well):
        with pytest.raises(ValueError):
            integrate(sine_well, 1.0, 0.1, PerturbationSpec.none(), [1.0], [0.0],
                      t_end=1.0, dt=-1e-3)
        with pytest.raises(ValueError):
            integrate(sine_well, 1.0, 0.1, PerturbationSpec.none(), [1.0], [0.0],
                      t0=2.0, t_end=1.0)


class TestRateCertificate:
    def test_constant_at_minimizer(self, sine_well):
        recs = integrate(sine_well, 1.0, 0.1, PerturbationSpec.none(),
                         [0.0], [0.0], t_end=1.0, dt=1e-2)
        passed, worst = rate_certificate(recs, 24.0 / 49.0, sine_well.kappa)
        assert passed
        assert worst == 0.0

    def test_t31_run_passes(self, sine_well):
        recs = integrate(sine_well, 1.0, 0.1, PerturbationSpec.none(),
                         [3.0], [0.0], t_end=10.0, dt=1e-3, record_every=10)
        passed, worst = rate_certificate(recs, 24.0 / 49.0, sine_well.kappa)
        assert passed
        assert worst >= -1e-6 * recs[0].energy

    def test_inflated_energy_fails(self, sine_well):
        recs = integrate(sine_well, 1.0, 0.1, PerturbationSpec.none(),
                         [3.0], [0.0], t_end=5.0, dt=1e-2)
        doctored = list(recs[:-1])
        last = recs[-1]
        doctored.append(TrajectoryRecord(
            t=last.t, x=last.x, v=last.v, value_error=last.value_error,
            traj_error=last.traj_error, speed=last.speed,
            energy=recs[0].energy * 2.0,
        ))
        passed, worst = rate_certificate(doctored, 24.0 / 49.0, sine_well.kappa)
        assert not passed
        assert worst < 0

    def test_empty(self):
        with pytest.raises(EmptyTrajectory):
            rate_certificate([], 0.5, 0.1)
