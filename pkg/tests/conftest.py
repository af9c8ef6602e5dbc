import pytest

from projsym.models import MetricSpec, Tolerances, VectorFieldSpec
from projsym.projective import sample_jets
from projsym.geometry import sample_points


@pytest.fixture
def euclidean():
    """Flat metric on a box away from the origin"""
    return MetricSpec(
        name="euclidean",
        dim=3,
        coords=["x", "y", "z"],
        g=[["1", "0", "0"], ["1", "0"], ["1"]],
        domain=[(0.5, 1.5), (0.5, 1.5), (0.5, 1.5)],
    )


@pytest.fixture
def sphere_line():
    """Round sphere times a line: dx^2 + sin^2 x dy^2 + dz^2"""
    return MetricSpec(
        name="sphere-line",
        dim=3,
        coords=["x", "y", "z"],
        g=[["1", "0", "0"], ["sin(x)^2", "0"], ["1"]],
        domain=[(0.6, 1.4), (-0.5, 0.5), (0.5, 1.5)],
        guards=["sin(x)"],
    )


@pytest.fixture
def round_sphere():
    """Unit sphere in polar coordinates"""
    return MetricSpec(
        name="sphere",
        dim=2,
        coords=["x", "y"],
        g=[["1", "0"], ["sin(x)^2"]],
        domain=[(0.6, 1.4), (-0.5, 0.5)],
        guards=["sin(x)"],
    )


@pytest.fixture
def dilation():
    return VectorFieldSpec(components=["x", "y", "z"])


@pytest.fixture
def non_projective():
    return VectorFieldSpec(components=["0", "x^2", "0"])


@pytest.fixture
def tolerances():
    return Tolerances()


@pytest.fixture
def euclidean_points(euclidean):
    return sample_points(euclidean, 20, seed_value=3)


@pytest.fixture
def euclidean_jets(euclidean):
    return sample_jets(euclidean, 20, seed_value=3)
