import math

import numpy as np
import pytest

from projsym.errors import DomainError, LeftDomain, StepFailure
from projsym.integrate import integrate, quintic_hermite, stencil_derivatives


def test_exponential_growth():
    traj = integrate(lambda t, y: y, 0.0, [1.0], 1.0, 1e-10)
    assert traj.ts[-1] == pytest.approx(1.0)
    assert traj.ys[-1, 0] == pytest.approx(math.e, rel=1e-8)
    assert not traj.truncated


def test_backwards_integration():
    traj = integrate(lambda t, y: y, 1.0, [math.e], 0.0, 1e-10)
    assert traj.ts[-1] == pytest.approx(0.0)
    assert traj.ys[-1, 0] == pytest.approx(1.0, rel=1e-8)


def test_oscillator_dense_output():
    """Test that the cubic Hermite dense output tracks the solution between steps"""
    traj = integrate(lambda t, y: np.array([y[1], -y[0]]), 0.0, [0.0, 1.0], 3.0, 1e-11)
    for t in (0.37, 1.21, 2.93):
        assert traj.at(t)[0] == pytest.approx(math.sin(t), abs=1e-6)
    assert traj.ys[-1, 0] == pytest.approx(math.sin(3.0), abs=1e-9)


def test_zero_span_returns_initial_state():
    traj = integrate(lambda t, y: y, 0.5, [2.0], 0.5, 1e-10)
    assert len(traj) == 1
    assert traj.at(0.5)[0] == 2.0


def test_leaving_the_domain_truncates():
    traj = integrate(lambda t, y: np.array([1.0]), 0.0, [0.0], 5.0, 1e-10, inside=lambda t, y: y[0] < 2.0)
    assert traj.truncated
    assert traj.ys[-1, 0] < 2.0
    assert traj.ts[-1] < 5.0


def test_leaving_the_domain_can_raise():
    with pytest.raises(LeftDomain):
        integrate(lambda t, y: np.array([1.0]), 0.0, [0.0], 5.0, 1e-10,
                  inside=lambda t, y: y[0] < 2.0, raise_on_exit=True)


def test_step_failure_at_a_wall():
    def rhs(t, y):
        if t > 0.5:
            raise DomainError("wall")
        return y

    with pytest.raises(StepFailure):
        integrate(rhs, 0.0, [1.0], 1.0, 1e-10)


def test_quintic_hermite_reproduces_quintics():
    def p(t):
        return t ** 5 - 2 * t ** 3 + t, 5 * t ** 4 - 6 * t ** 2 + 1, 20 * t ** 3 - 12 * t

    t0, t1 = 0.2, 0.9
    h = t1 - t0
    (y0, d0, dd0), (y1, d1, dd1) = p(t0), p(t1)
    value, deriv, accel = quintic_hermite(h, 0.3, *map(np.atleast_1d, (y0, y1, d0, d1, dd0, dd1)))
    exact = p(t0 + 0.3 * h)
    assert value[0] == pytest.approx(exact[0], abs=1e-12)
    assert deriv[0] == pytest.approx(exact[1], abs=1e-11)
    assert accel[0] == pytest.approx(exact[2], abs=1e-10)


def test_stencil_is_exact_on_quartics():
    t = np.linspace(0.0, 1.0, 9)
    first, second = stencil_derivatives(t ** 4 - t, t[1] - t[0])
    inner = t[2:-2]
    assert np.allclose(first, 4 * inner ** 3 - 1, atol=1e-12)
    assert np.allclose(second, 12 * inner ** 2, atol=1e-10)


def test_stencil_needs_five_samples():
    with pytest.raises(DomainError):
        stencil_derivatives(np.arange(4.0), 1.0)
