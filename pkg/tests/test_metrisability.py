import numpy as np
import pytest

from projsym.catalog import get_entry
from projsym.errors import DegeneratePencil, DegenerateSigma, DependentBasis, DimensionError
from projsym.geometry import metric_values, sample_points
from projsym.metrisability import (
    affine_transform_action,
    benenti,
    benenti_from_matrices,
    check_eigenvalue_identity,
    check_LvL,
    cluster_eigenvalues,
    g_of_sigma,
    lie_action_matrix,
    metrisability_defect,
    normalise_action,
    pencil_metric,
    self_adjoint_defect,
    sigma_from_matrix,
    sigma_of_g,
    solodovnikov_poly,
)
from projsym.models import ActionMatrix, MetricSpec, SigmaFieldSpec


@pytest.fixture
def linear_entry():
    """[1-1-1] entry with eigenvalues k_i x^i + 0.5"""
    return get_entry("111-linear")


@pytest.fixture
def linear_samples(linear_entry):
    return sample_points(linear_entry.metric, 20, seed_value=1)


def _center(m):
    return [0.5 * (lo + hi) for lo, hi in m.domain]


# Weighted tensors

@pytest.mark.parametrize("g", [
    np.diag([1.0, 2.0, 3.0]),
    np.array([[2.0, 0.3, 0.0], [0.3, 1.0, 0.1], [0.0, 0.1, 0.5]]),
    np.diag([-1.0, 1.0, 4.0]),
    np.array([[0.0, 1.5], [1.5, 0.0]]),
])
def test_metric_is_recovered_from_sigma(g):
    np.testing.assert_allclose(g_of_sigma(sigma_from_matrix(g)), g, atol=1e-12)


def test_sigma_of_g_reports_rank(euclidean):
    s = sigma_of_g(euclidean, [1.0, 1.0, 1.0])
    assert s.full_rank
    assert s.rank == 3


def test_degenerate_sigma():
    with pytest.raises(DegenerateSigma) as excinfo:
        g_of_sigma(np.diag([1.0, 1.0, 0.0]))
    assert excinfo.value.details["rank"] == 2


# Metrisability system

def test_metric_solves_its_own_system(sphere_line):
    assert metrisability_defect(sphere_line, sphere_line, [0.9, 0.1, 1.0]) < 1e-12


def test_partner_solves_the_system(linear_entry):
    m = linear_entry.metric
    assert metrisability_defect(m, linear_entry.partner, _center(m)) < 1e-10


def test_linear_combination_of_solutions(linear_entry):
    m = linear_entry.metric
    assert metrisability_defect(m, [(1.0, m), (-2.5, linear_entry.partner)], _center(m)) < 1e-10


def test_non_solution_is_detected(euclidean):
    sigma = SigmaFieldSpec(dim=3, sigma=[["1", "0", "0"], ["x", "0"], ["1"]])
    assert metrisability_defect(euclidean, sigma, [1.0, 1.0, 1.0]) > 1e-3
    constant = SigmaFieldSpec(dim=3, sigma=[["1", "0.2", "0"], ["2", "0"], ["1"]])
    assert metrisability_defect(euclidean, constant, [1.0, 1.0, 1.0]) < 1e-14


def test_sigma_field_dimension_is_checked(euclidean):
    sigma = SigmaFieldSpec(dim=2, sigma=[["1", "0"], ["1"]])
    with pytest.raises(DimensionError):
        metrisability_defect(euclidean, sigma, [1.0, 1.0, 1.0])


def test_pencil_metric(linear_entry):
    g, gbar = linear_entry.metric, linear_entry.partner
    p = _center(g)
    np.testing.assert_allclose(pencil_metric(g, gbar, 1.0, 0.0, p), metric_values(g, p))
    np.testing.assert_allclose(pencil_metric(g, gbar, 0.0, 1.0, p), metric_values(gbar, p))
    combined = sigma_from_matrix(metric_values(g, p)) + 2.0 * sigma_from_matrix(metric_values(gbar, p))
    np.testing.assert_allclose(sigma_from_matrix(pencil_metric(g, gbar, 1.0, 2.0, p)), combined, rtol=1e-10)


def test_pencil_can_degenerate(euclidean):
    with pytest.raises(DegeneratePencil):
        pencil_metric(euclidean, euclidean, 1.0, -1.0, [1.0, 1.0, 1.0])


# Benenti tensors

def test_cluster_eigenvalues():
    clusters = cluster_eigenvalues([3.0, 1.0, 1.0 + 1e-10, 2.0])
    assert [(c.real, m) for c, m in clusters] == [(pytest.approx(1.0), 2), (2.0, 1), (3.0, 1)]


def test_benenti_eigenvalues_are_the_shifted_coordinates(linear_entry):
    g, gbar = linear_entry.metric, linear_entry.partner
    x, y, z = _center(g)
    L = benenti(g, gbar, [x, y, z])
    assert L.diagonalizable
    assert L.multiplicities == [1, 1, 1]
    expected = sorted([x + 0.5, 2 * y + 0.5, 3 * z + 0.5])
    np.testing.assert_allclose(sorted(L.eigenvalues_real), expected, rtol=1e-10)
    assert self_adjoint_defect(metric_values(g, [x, y, z]), np.array(L.L)) < 1e-12
    assert self_adjoint_defect(metric_values(g, [x, y, z]), np.array(L.L), power=2) < 1e-12


def test_repeated_eigenvalue_is_diagonalisable():
    L = benenti_from_matrices(np.eye(3), np.diag([1.0, 1.0, 0.25]))
    assert L.diagonalizable
    assert sorted(L.multiplicities) == [1, 2]


def test_lorentzian_jordan_block():
    entry = get_entry("lorentz2d-nondiag")
    x, y = 1.0, 1.2
    L = benenti(entry.metric, entry.partner, [x, y])
    np.testing.assert_allclose(L.L, [[-y, -(y * y + x)], [0.0, -y]], atol=1e-12)
    assert not L.diagonalizable
    assert L.multiplicities == [2]
    assert L.eigvec_basis is None


# Action on the metrisation space

def test_affine_transform_preserves_the_polynomial():
    """Test that S_A'(κt + s) = κ S_A(t) after σ̄ ↦ κσ̄ + sσ"""
    A = ActionMatrix(a=1.0, b=2.0, c=3.0, d=4.0)
    kappa, shift = 2.0, 0.7
    moved = affine_transform_action(A, kappa, shift)
    for t in (-1.0, 0.3, 2.5):
        assert solodovnikov_poly(moved, kappa * t + shift) == pytest.approx(kappa * solodovnikov_poly(A, t))


def test_affine_transform_needs_nonzero_scale():
    with pytest.raises(DegeneratePencil):
        affine_transform_action(ActionMatrix(a=1.0, b=2.0, c=3.0, d=4.0), 0.0, 1.0)


@pytest.mark.parametrize("values,kind,expected", [
    ((0.0, 0.0, 1.0, 2.0), "killing", (0.0, 0.0, 1.0, 2.0)),
    ((2.0, 0.0, 1.0, 4.0), "homothetic", (1.0, 0.0, 0.5, 2.0)),
    ((1.0, 2.0, 3.0, 4.0), "essential", (0.0, 1.0, 0.5, 2.5)),
])
def test_normal_forms(values, kind, expected):
    a, b, c, d = values
    found, normal = normalise_action(ActionMatrix(a=a, b=b, c=c, d=d))
    assert found == kind
    np.testing.assert_allclose(normal.as_list(), expected, atol=1e-12)


def test_action_of_killing_and_homothetic_fields(linear_entry, linear_samples):
    g, gbar = linear_entry.metric, linear_entry.partner
    killing, dilation = (gen.field for gen in linear_entry.generators)

    A = lie_action_matrix(killing, g, gbar, linear_samples)
    np.testing.assert_allclose(A.as_list(), [0.0, 0.0, 1.0, 0.0], atol=1e-8)
    assert A.fit_residual < 1e-10
    assert normalise_action(A)[0] == "killing"

    B = lie_action_matrix(dilation, g, gbar, linear_samples)
    np.testing.assert_allclose(B.as_list(), [-1.0, 0.0, -0.5, 0.0], atol=1e-8)
    assert normalise_action(B)[0] == "homothetic"


def test_action_identities_at_a_point(linear_entry, linear_samples):
    g, gbar = linear_entry.metric, linear_entry.partner
    dilation = linear_entry.generators[1].field
    A = lie_action_matrix(dilation, g, gbar, linear_samples)
    p = _center(g)
    assert max(check_eigenvalue_identity(A, dilation, g, linear_entry.eigenvalue_fields, p)) < 1e-8
    lvl_defect, sym_defect = check_LvL(dilation, g, gbar, A, p)
    assert lvl_defect < 1e-8
    assert sym_defect < 1e-10


def test_proportional_solutions_are_rejected(euclidean, euclidean_points, dilation):
    doubled = MetricSpec(dim=3, coords=["x", "y", "z"], g=[["2", "0", "0"], ["2", "0"], ["2"]],
                         domain=euclidean.domain)
    with pytest.raises(DependentBasis):
        lie_action_matrix(dilation, euclidean, doubled, euclidean_points)
