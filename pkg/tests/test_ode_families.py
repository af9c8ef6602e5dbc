import math

import numpy as np
import pytest

from projsym.errors import (
    DegeneratePartner,
    DomainError,
    InvalidConstants,
    PreconditionError,
    SingularDenominator,
    SingularZeta,
)
from projsym.models import ActionMatrix
from projsym.ode_families import (
    GLUING_KINDS,
    alpha_zeta_residuals,
    branch_points,
    branch_residual,
    closed_form_branch,
    descent_constant,
    gluing_pair,
    gluing_residuals,
    implied_b,
    inverf,
    inverf_zeta_residual,
    ode111_residual,
    partner_from_f,
    psi_closed_form,
    psi_closed_form_error,
    psi_inverf_error,
    psi_zeta_residual,
    riccati111_params,
    solodovnikov21_residuals,
    solve_psi,
    univariate_jet,
    zeta_k_residual,
    zeta_ode_residual,
)


# [1-1-1] block systems

@pytest.mark.parametrize("branch,constants", [
    ("riccati:1a", {"alpha1": 1.0, "alpha0": -2.0, "c": 1.0}),
    ("riccati:1b", {"alpha1": 2.0, "alpha0": 1.0, "c": 1.0}),
    ("riccati:1c", {"alpha1": 1.0, "alpha0": 1.0, "c": 1.0}),
    ("riccati:2a", {"alpha1": 0.0, "alpha0": 1.0, "c": 1.0}),
    ("riccati:2b", {"alpha1": 0.0, "alpha0": 0.0, "c": 2.0}),
    ("riccati:2c-tanh", {"alpha1": 0.0, "alpha0": -1.0, "c": 1.0}),
    ("riccati:2c-const", {"alpha1": 0.0, "alpha0": -4.0, "sign": -1.0}),
    ("homothetic:1a", {"a": 1.0, "d": 2.0, "c": 1.0, "k": 1.0}),
    ("homothetic:1b", {"a": 1.0, "d": 1.0, "c": 1.0, "k": 0.5}),
    ("homothetic:2a-zero", {"a": 1.0, "d": -1.0, "c": 1.0}),
    ("homothetic:2a", {"a": 1.0, "d": -1.0, "c": 1.0, "k": 1.0, "h": 1.0}),
    ("homothetic:2b-zero", {"h": 3.0}),
    ("homothetic:2b", {"k": 2.0, "h": 3.0}),
    ("homothetic:2c", {"c": 1.0, "k": 2.0}),
])
def test_closed_form_branches_solve_their_system(branch, constants):
    solution = closed_form_branch(branch, constants)
    for t in branch_points(solution):
        first, second = branch_residual(solution, t)
        assert first < 1e-10
        assert second < 1e-10


@pytest.mark.parametrize("branch,constants", [
    ("riccati:1a", {"alpha1": 0.0, "alpha0": -2.0}),
    ("riccati:1a", {"alpha1": 1.0, "alpha0": 1.0}),
    ("riccati:1b", {"alpha1": 2.0, "alpha0": 2.0}),
    ("riccati:2a", {"alpha1": 1.0, "alpha0": 1.0}),
    ("riccati:2c-const", {"alpha0": -1.0, "sign": 2.0}),
    ("riccati:9z", {}),
    ("homothetic:1a", {"a": 1.0, "d": 1.0}),
    ("homothetic:2c", {"c": 0.0}),
    ("other:1a", {}),
])
def test_invalid_branch_constants(branch, constants):
    with pytest.raises(InvalidConstants):
        closed_form_branch(branch, constants)


def test_riccati_parameters():
    params = riccati111_params(ActionMatrix(a=1.0, b=2.0, c=3.0, d=4.0))
    assert params.defined
    assert params.alpha1 == pytest.approx(-2.5)
    assert params.alpha0 == pytest.approx(-0.5)
    undefined = riccati111_params(ActionMatrix(a=1.0, b=0.0, c=3.0, d=4.0))
    assert not undefined.defined
    assert undefined.alpha1 is None


def test_killing_blocks():
    A = ActionMatrix(a=0.0, b=0.0, c=1.0, d=0.0)
    for riccati, trace in ode111_residual(["x", "y", "z"], ["1", "1", "1"], A, [0.3, 0.4, 0.5]):
        assert riccati == 0.0
        assert trace == 0.0


def test_partner_from_f():
    diag = np.diag(partner_from_f(["x", "y", "z"], 1.0, 1.0, [1.0, 2.0, 3.0]))
    np.testing.assert_allclose(diag, [2 / 48, -1 / 72, 2 / 96])


def test_partner_from_f_degenerates():
    with pytest.raises(DegeneratePartner):
        partner_from_f(["x", "y", "z"], -1.0, 1.0, [1.0, 2.0, 3.0])


# [2-1] α/ζ system

@pytest.mark.parametrize("kind", GLUING_KINDS)
def test_gluing_pairs(kind):
    pair = gluing_pair(kind, {"beta": 1.5, "k": 0.7})
    lo, hi = pair.domain
    for t in np.linspace(lo + 0.05, hi - 0.05, 7):
        first, second = alpha_zeta_residuals(pair.alpha, pair.zeta, pair.b, pair.B, pair.C, t)
        assert first < 1e-10 and second < 1e-10
        glue = gluing_residuals(pair.alpha, pair.zeta, pair.C, t)
        assert max(glue) < 1e-9
        assert implied_b(pair.alpha, pair.zeta, pair.C, t) == pytest.approx(pair.b, abs=1e-10)


def test_unknown_gluing_family():
    with pytest.raises(InvalidConstants):
        gluing_pair("cosh")
    with pytest.raises(InvalidConstants):
        gluing_pair("inverse-square", {"beta": 0.0})


def test_zero_zeta_is_singular():
    with pytest.raises(SingularZeta):
        alpha_zeta_residuals("1", "z", 0.0, 0.0, 0.0, 0.0)


def test_zeta_ode_for_exponential():
    pair = gluing_pair("exp", {"beta": 2.0, "k": 1.5})
    for t in (-0.5, 0.0, 0.5):
        assert zeta_ode_residual(pair.zeta, pair.b, pair.B, pair.C, t) < 1e-10


def test_zeta_ode_denominator():
    pair = gluing_pair("exp", {"beta": 2.0, "k": 0.0})
    with pytest.raises(SingularDenominator):
        zeta_ode_residual(pair.zeta, pair.b, pair.B, pair.C, 0.3)


def test_descent_constant():
    assert descent_constant(ActionMatrix(a=1.0, b=2.0, c=3.0, d=4.0), 1.0) == pytest.approx(11.0)


def test_constant_eigenvalue_relation():
    A = ActionMatrix(a=0.0, b=1.0, c=0.0, d=1.0)
    assert solodovnikov21_residuals(A, 1.0, "z", "1", 0.4) == (0.0, 0.0)
    assert solodovnikov21_residuals(A, 2.0, "z", "1", 0.4)[0] == pytest.approx(2.0)


# ψ family

def test_closed_forms_solve_the_psi_equation():
    """Test that (ψ − z)ψ'' = 2ψ'(ψ' − k) holds for the k = ±1 closed forms"""
    for k, k0, k1, points in ((1.0, 0.0, 1.0, (0.5, 1.0, 1.5)), (-1.0, 0.5, 2.0, (0.1, 0.5, 0.9))):
        source = psi_closed_form(k, k0, k1)
        for z in points:
            psi, dpsi, ddpsi = univariate_jet(source, z, "z")
            assert (psi - z) * ddpsi == pytest.approx(2 * dpsi * (dpsi - k), abs=1e-12)


def test_no_closed_form_for_other_k():
    with pytest.raises(InvalidConstants):
        psi_closed_form(0.5)
    with pytest.raises(InvalidConstants):
        psi_closed_form(1.0, 0.0, 0.0)


def test_integrated_psi_matches_closed_form():
    assert psi_closed_form_error() < 1e-8


def test_solve_psi_grid():
    solution = solve_psi(0.0, (0.5, 1.5), (0.0, 1.0), n_points=11)
    assert len(solution.z) == len(solution.psi) == len(solution.residual) == 11
    assert solution.z[0] == 0.5 and solution.z[-1] == 1.5
    assert max(solution.residual) < 1e-6


def test_solve_psi_preconditions():
    with pytest.raises(PreconditionError):
        solve_psi(-1.0, (0.5, 1.5), (0.0, 1.0))
    with pytest.raises(PreconditionError):
        solve_psi(1.0, (0.5, 1.5), (0.5, 1.0))


def test_zeta_equation_for_k_one():
    for t in (0.4, 0.8, 1.6):
        assert zeta_k_residual("-tanh(z)^2", 1.0, t) < 1e-10


def test_inverse_error_function():
    for t in (-1.2, -0.3, 0.0, 0.05, 0.9, 2.0):
        assert inverf(math.erf(t)) == pytest.approx(t, abs=1e-12)
    for y in (-1.0, 1.0, 1.5):
        with pytest.raises(DomainError):
            inverf(y)


def test_inverf_zeta_solves_the_k_zero_equation():
    for t in (-0.7, 0.2, 0.6):
        assert inverf_zeta_residual(t) < 1e-8
    with pytest.raises(SingularZeta):
        inverf_zeta_residual(0.0)


@pytest.mark.parametrize("k", [0.0, 1.0, 2.0, -2.0])
def test_sampled_psi_prime_solves_the_zeta_equation(k):
    solution = solve_psi(k, (0.5, 1.0), (-1.5, -1.0), n_points=101)
    assert psi_zeta_residual(solution) < 1e-6


def test_zeta_residual_sees_the_samples():
    """Test that a perturbed ψ' grid fails the ζ check even though every sample pair looks plausible"""
    solution = solve_psi(0.0, (0.5, 1.0), (-1.5, -1.0), n_points=51)
    bumped = [d + 1e-3 * math.sin(20 * z) for z, d in zip(solution.z, solution.psi_prime)]
    assert psi_zeta_residual(solution.model_copy(update={"psi_prime": bumped})) > 1e-3


def test_zeta_residual_needs_a_stencil():
    with pytest.raises(PreconditionError):
        psi_zeta_residual(solve_psi(0.0, (0.5, 1.0), (-1.5, -1.0), n_points=4))


def test_k_zero_trajectory_is_an_inverf_profile():
    assert psi_inverf_error() < 1e-9
    assert psi_inverf_error((0.5, 1.2), (-2.0, -0.5), n_points=15) < 1e-9


def test_inverf_profile_needs_positive_zeta():
    with pytest.raises(PreconditionError):
        psi_inverf_error(init=(-1.5, 1.0))
