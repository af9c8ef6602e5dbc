import numpy as np
import pytest

from projsym.errors import DimensionError, IllConditionedInterpolation
from projsym.models import JetPoint, MetricSpec, VectorFieldSpec
from projsym.projective import (
    block_structure_defect,
    bracket_residual,
    build_connection,
    collinearity_defect,
    dense_output_defect,
    evaluate_connection,
    fit_symmetry_polynomial,
    geodesic_rhs,
    geodesic_transport_defect,
    integrate_geodesic,
    lie_bracket,
    normalised_symmetry_residual,
    sample_jets,
    symmetry_coefficients,
    symmetry_residual,
    trajectory_positions,
)

SPHERE_ROTATION = VectorFieldSpec(components=["sin(y)", "cos(y)/tan(x)", "0"])
# Euclidean projective (not affine) field
PROJECTIVE_QUADRATIC = VectorFieldSpec(components=["x^2", "x*y", "x*z"])


# Connection coefficients

def test_flat_connection_vanishes(euclidean):
    c = build_connection(euclidean, [1.0, 1.0, 1.0])
    assert c.dim == 3
    assert not np.any(c.f_11) and not np.any(c.f_1i) and not np.any(c.f_ij) and not np.any(c.f0_ij)


def test_connection_polynomial_matches_geodesic_rhs(sphere_line):
    p = [0.9, 0.1, 1.0]
    slopes = [0.4, -1.3]
    expected = geodesic_rhs(sphere_line, JetPoint(base=p, slopes=slopes))
    np.testing.assert_allclose(evaluate_connection(build_connection(sphere_line, p), slopes), expected, atol=1e-12)


def test_two_dimensional_coefficients(round_sphere):
    c = build_connection(round_sphere, [1.0, 0.0])
    coeffs = c.coefficients_2d()
    assert len(coeffs) == 4
    # y'' = -2 cot(x) y' - sin(x) cos(x) y'^3
    assert coeffs[1] == pytest.approx(-2.0 / np.tan(1.0))
    assert coeffs[3] == pytest.approx(-np.sin(1.0) * np.cos(1.0))


# Symmetry residual

def test_affine_and_projective_fields_of_flat_space(euclidean, euclidean_jets, dilation):
    for field in (dilation, PROJECTIVE_QUADRATIC, VectorFieldSpec(components=["1", "0", "0"])):
        assert max(normalised_symmetry_residual(euclidean, field, j) for j in euclidean_jets) < 1e-12


def test_non_projective_field_is_detected(euclidean, euclidean_jets, non_projective):
    assert max(normalised_symmetry_residual(euclidean, non_projective, j) for j in euclidean_jets) > 1e-3


def test_sphere_rotation_is_projective(sphere_line):
    for j in sample_jets(sphere_line, 20, seed_value=2):
        assert normalised_symmetry_residual(sphere_line, SPHERE_ROTATION, j) < 1e-10


def test_jet_dimension_is_checked(euclidean, dilation):
    with pytest.raises(DimensionError):
        symmetry_residual(euclidean, dilation, JetPoint(base=[1.0, 1.0], slopes=[0.0]))


def test_sample_jets_shape(sphere_line):
    jets = sample_jets(sphere_line, 12, seed_value=5, slope_range=1.0)
    assert len(jets) == 12
    assert all(len(j.base) == 3 and len(j.slopes) == 2 for j in jets)
    assert all(abs(s) <= 1.0 for j in jets for s in j.slopes)


# Polynomial fit in the slopes

def test_fit_vanishes_for_symmetry(sphere_line):
    coeffs, structural = fit_symmetry_polynomial(sphere_line, SPHERE_ROTATION, [0.9, 0.1, 1.0])
    assert coeffs.shape == (18,)
    assert np.max(np.abs(coeffs)) < 1e-10
    assert structural < 1e-10


def test_fit_detects_non_symmetry(euclidean, non_projective):
    coeffs = symmetry_coefficients(euclidean, non_projective, [1.0, 1.0, 1.0])
    assert np.max(np.abs(coeffs)) > 1e-3


def test_fit_in_two_dimensions(round_sphere):
    rotation = VectorFieldSpec(components=["sin(y)", "cos(y)/tan(x)"])
    coeffs, _ = fit_symmetry_polynomial(round_sphere, rotation, [1.0, 0.2])
    assert coeffs.shape == (4,)
    assert np.max(np.abs(coeffs)) < 1e-10


def test_ill_conditioned_grid_is_refused(euclidean, dilation):
    with pytest.raises(IllConditionedInterpolation) as excinfo:
        fit_symmetry_polynomial(euclidean, dilation, [1.0, 1.0, 1.0], condition_limit=1.0)
    assert excinfo.value.condition > 1.0


# Brackets and block structure

def test_bracket_of_translation_and_shear(euclidean):
    u = VectorFieldSpec(components=["1", "0", "0"])
    v = VectorFieldSpec(components=["0", "x", "0"])
    value, first, second = lie_bracket(u, v, euclidean, [1.0, 1.0, 1.0])
    np.testing.assert_allclose(value, [0.0, 1.0, 0.0], atol=1e-12)
    np.testing.assert_allclose(first, np.zeros((3, 3)), atol=1e-8)
    np.testing.assert_allclose(second, np.zeros((3, 3, 3)), atol=1e-6)


def test_bracket_of_projective_fields_is_projective(euclidean, euclidean_jets, dilation):
    assert bracket_residual(euclidean, dilation, PROJECTIVE_QUADRATIC, euclidean_jets[:5]) < 1e-6


def test_block_structure():
    m = MetricSpec(dim=3, coords=["x", "y", "z"], g=[["1", "0", "0"], ["1", "0"], ["1"]],
                   domain=[(0, 1), (0, 1), (0.5, 1)])
    p = [0.5, 0.5, 0.7]
    assert block_structure_defect("111", VectorFieldSpec(components=["x", "y^2", "1"]), m, p) == 0.0
    assert block_structure_defect("111", VectorFieldSpec(components=["y", "0", "0"]), m, p) == 1.0
    assert block_structure_defect("21", VectorFieldSpec(components=["y", "x", "1/z"]), m, p) == 0.0
    assert block_structure_defect("21", VectorFieldSpec(components=["z", "0", "0"]), m, p) == 1.0
    with pytest.raises(ValueError):
        block_structure_defect("3", VectorFieldSpec(components=["1", "0", "0"]), m, p)


def test_block_21_needs_three_dimensions(round_sphere):
    with pytest.raises(DimensionError):
        block_structure_defect("21", VectorFieldSpec(components=["1", "0"]), round_sphere, [1.0, 0.0])


# Geodesics and transport

def test_flat_geodesic_is_a_line(euclidean):
    j0 = JetPoint(base=[1.0, 0.9, 1.1], slopes=[0.2, -0.3])
    traj = integrate_geodesic(euclidean, j0, (0.7, 1.3))
    assert not traj.truncated
    for x, y, z in trajectory_positions(traj, [0.75, 1.0, 1.25]):
        assert y == pytest.approx(0.9 + 0.2 * (x - 1.0), abs=1e-10)
        assert z == pytest.approx(1.1 - 0.3 * (x - 1.0), abs=1e-10)


def test_geodesic_truncates_at_the_box(euclidean):
    j0 = JetPoint(base=[1.0, 1.0, 1.0], slopes=[2.0, 0.0])
    traj = integrate_geodesic(euclidean, j0, (0.5, 1.5))
    assert traj.truncated
    assert np.max(traj.ys[:, 0]) <= 1.5


def test_sphere_geodesic_dense_output(sphere_line):
    j0 = JetPoint(base=[1.0, 0.0, 1.0], slopes=[0.3, 0.2])
    traj = integrate_geodesic(sphere_line, j0, (0.8, 1.2), tol=1e-11)
    assert dense_output_defect(sphere_line, traj) < 1e-6


def test_transport_of_projective_and_non_projective_fields(euclidean, dilation, non_projective):
    j0 = JetPoint(base=[1.0, 1.0, 1.0], slopes=[0.3, -0.2])
    assert geodesic_transport_defect(euclidean, dilation, j0, 0.1, length=0.3) < 1e-5
    assert geodesic_transport_defect(euclidean, non_projective, j0, 0.1, length=0.3) > 1e-3


def test_collinearity_defect_is_the_sine_of_the_angle():
    """Test that a small acceleration orthogonal to the velocity still counts fully"""
    assert collinearity_defect(np.array([0.0, 1e-3, 0.0]), np.array([1.0, 0.0, 0.0])) == pytest.approx(1.0, rel=1e-8)
    assert collinearity_defect(np.array([2.0, 0.0, 0.0]), np.array([1.0, 0.0, 0.0])) == 0.0
    tilted = collinearity_defect(np.array([1.0, 1.0, 0.0]), np.array([1.0, 0.0, 0.0]))
    assert tilted == pytest.approx(np.sqrt(0.5))


def test_collinearity_regulariser():
    accel, velocity = np.array([0.0, 1e-3, 0.0]), np.array([1.0, 0.0, 0.0])
    assert collinearity_defect(accel, velocity, eps=1.0) == pytest.approx(1e-3 / (1e-3 + 1.0))
    assert collinearity_defect(np.zeros(3), velocity) == 0.0
