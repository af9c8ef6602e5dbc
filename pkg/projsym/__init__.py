from ._version import __version__
from .runner import SuiteRunner, AsyncSuiteRunner, create_suite_runner, create_async_suite_runner, verify_all
from .verify import EntryVerifier, verify_entry
from .catalog import CatalogEntry, Generator, get_entry, list_entries
from .expr import ScalarExpr, parse, evaluate
from .autodiff import Dual2, partials
from .geometry import christoffel, classify_homothety, sample_points, warped_product
from .projective import (
    build_connection,
    symmetry_residual,
    normalised_symmetry_residual,
    symmetry_coefficients,
    integrate_geodesic,
    geodesic_transport_defect
)
from .metrisability import benenti, lie_action_matrix, metrisability_residual, normalise_action
from .ode_families import closed_form_branch, solve_psi, gluing_pair
from .models import (
    Tolerances,
    MetricSpec,
    VectorFieldSpec,
    SigmaFieldSpec,
    JetPoint,
    ActionMatrix,
    BenentiTensor,
    CheckResult,
    EntryReport,
    SuiteReport
)
from .errors import ProjsymError

__all__ = [
    "__version__",
    "SuiteRunner",
    "AsyncSuiteRunner",
    "create_suite_runner",
    "create_async_suite_runner",
    "verify_all",
    "EntryVerifier",
    "verify_entry",
    "CatalogEntry",
    "Generator",
    "get_entry",
    "list_entries",
    "ScalarExpr",
    "parse",
    "evaluate",
    "Dual2",
    "partials",
    "christoffel",
    "classify_homothety",
    "sample_points",
    "warped_product",
    "build_connection",
    "symmetry_residual",
    "normalised_symmetry_residual",
    "symmetry_coefficients",
    "integrate_geodesic",
    "geodesic_transport_defect",
    "benenti",
    "lie_action_matrix",
    "metrisability_residual",
    "normalise_action",
    "closed_form_branch",
    "solve_psi",
    "gluing_pair",
    "Tolerances",
    "MetricSpec",
    "VectorFieldSpec",
    "SigmaFieldSpec",
    "JetPoint",
    "ActionMatrix",
    "BenentiTensor",
    "CheckResult",
    "EntryReport",
    "SuiteReport",
    "ProjsymError"
]
