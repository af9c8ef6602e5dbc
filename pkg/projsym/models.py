from typing import Any, Dict, List, Literal, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, model_validator

from .errors import DimensionError
from .expr import ScalarExpr, parse


class Tolerances:
    def __init__(
        self,
        identity: float = 1e-9,
        symmetry: float = 1e-8,
        integrator: float = 1e-5,
        guard: float = 1e-3,
        clustering: float = 1e-7,
        condition_limit: float = 1e8,
        negative_control: float = 1e-3,
    ):
        self.identity = identity
        self.symmetry = symmetry
        self.integrator = integrator
        self.guard = guard
        self.clustering = clustering
        self.condition_limit = condition_limit
        self.negative_control = negative_control

    def scaled(self, tol: float) -> "Tolerances":
        # --tol sets the symmetry tolerance; the AD-exact identities keep their ratio to it
        ratio = tol / 1e-8
        return Tolerances(
            identity=self.identity * ratio,
            symmetry=tol,
            integrator=self.integrator,
            guard=self.guard,
            clustering=self.clustering,
            condition_limit=self.condition_limit,
            negative_control=self.negative_control,
        )


def _mirror(rows: List[List[Any]], dim: int, what: str) -> List[List[str]]:
    """Accept a full matrix or the upper triangle (row i holding dim - i entries)."""
    if len(rows) != dim:
        raise DimensionError(f"{what} needs {dim} rows, got {len(rows)}")
    full: List[List[Optional[str]]] = [[None] * dim for _ in range(dim)]
    for i, row in enumerate(rows):
        if len(row) == dim:
            entries = row[i:]
        elif len(row) == dim - i:
            entries = row
        else:
            raise DimensionError(f"{what} row {i} has {len(row)} entries")
        for offset, value in enumerate(entries):
            j = i + offset
            text = str(value)
            full[i][j] = text
            full[j][i] = text
    return [[str(v) for v in row] for row in full]


class MetricSpec(BaseModel):
    model_config = ConfigDict(populate_by_name=True)

    name: Optional[str] = None
    dim: int
    coords: List[str]
    g: List[List[str]]
    params: Dict[str, float] = Field(default_factory=dict)
    domain: List[Tuple[float, float]]
    guards: List[str] = Field(default_factory=list)

    @model_validator(mode="before")
    @classmethod
    def _normalise_components(cls, data: Any) -> Any:
        if isinstance(data, dict) and "g" in data and "dim" in data:
            data = dict(data)
            data["g"] = _mirror(list(data["g"]), int(data["dim"]), "metric")
        return data

    @model_validator(mode="after")
    def _check_symbols(self) -> "MetricSpec":
        if self.dim not in (2, 3):
            raise DimensionError(f"Metric dimension must be 2 or 3, got {self.dim}")
        if len(self.coords) != self.dim or len(self.domain) != self.dim:
            raise DimensionError("coords and domain must have one entry per dimension")
        known = list(self.coords) + list(self.params)
        for row in self.g:
            for source in row:
                parse(source, known)
        for source in self.guards:
            parse(source, known)
        return self

    def component(self, i: int, j: int) -> ScalarExpr:
        return parse(self.g[i][j])

    def guard_exprs(self) -> List[ScalarExpr]:
        return [parse(source) for source in self.guards]

    def with_params(self, **params: float) -> "MetricSpec":
        merged = dict(self.params)
        merged.update(params)
        return self.model_copy(update={"params": merged})


class VectorFieldSpec(BaseModel):
    components: List[str]

    def exprs(self) -> List[ScalarExpr]:
        return [parse(source) for source in self.components]

    def validate_for(self, m: MetricSpec) -> None:
        if len(self.components) != m.dim:
            raise DimensionError(f"Vector field has {len(self.components)} components for a {m.dim}-dimensional metric")
        known = list(m.coords) + list(m.params)
        for source in self.components:
            parse(source, known)

    def __str__(self) -> str:
        return "(" + ", ".join(self.components) + ")"


class SigmaFieldSpec(BaseModel):
    dim: int
    sigma: List[List[str]]

    @model_validator(mode="before")
    @classmethod
    def _normalise_components(cls, data: Any) -> Any:
        if isinstance(data, dict) and "sigma" in data and "dim" in data:
            data = dict(data)
            data["sigma"] = _mirror(list(data["sigma"]), int(data["dim"]), "sigma")
        return data


class PointSample(BaseModel):
    coords: List[float]
    admissible: bool = True


class JetPoint(BaseModel):
    base: List[float]
    slopes: List[float]


class ProjConnCoeffs(BaseModel):
    """Coefficients of y''^k = f^k_11 + f^k_1i s^i + f^k_ij s^i s^j + s^k f_ij s^i s^j.

    For dim 2 the four entries are the coefficients of 1, y', y'^2, y'^3.
    """

    dim: int
    f_11: List[float]
    f_1i: List[List[float]]
    f_ij: List[List[List[float]]]
    f0_ij: List[List[float]]

    def coefficients_2d(self) -> List[float]:
        return [self.f_11[0], self.f_1i[0][0], self.f_ij[0][0][0], self.f0_ij[0][0]]


class WeightedTensor(BaseModel):
    sigma: List[List[float]]
    rank: int
    full_rank: bool


class BenentiTensor(BaseModel):
    L: List[List[float]]
    eigenvalues_real: List[float]
    eigenvalues_imag: List[float]
    multiplicities: List[int]
    eigvec_basis: Optional[List[List[float]]] = None
    diagonalizable: bool


class ActionMatrix(BaseModel):
    """Action of a projective field on the metrisation space: L_v σ = aσ + bσ̄, L_v σ̄ = cσ + dσ̄."""

    a: float
    b: float
    c: float
    d: float
    fit_residual: float = 0.0

    def as_list(self) -> List[float]:
        return [self.a, self.b, self.c, self.d]


class HomothetyClass(BaseModel):
    kind: Literal["killing", "homothetic", "not_homothetic"]
    lam: Optional[float] = None
    max_residual: float


class Riccati111Params(BaseModel):
    a: float
    b: float
    c: float
    d: float
    alpha1: Optional[float] = None
    alpha0: Optional[float] = None
    defined: bool


class ClosedFormBranch(BaseModel):
    branch: str
    system: Literal["riccati", "homothetic"]
    constants: Dict[str, float]
    first: str = Field(..., description="w (riccati) or v (homothetic) as an expression in x")
    second: str = Field(..., description="f (riccati) or X (homothetic) as an expression in x")
    domain: Tuple[float, float]
    implied: Dict[str, float] = Field(default_factory=dict)


class GluingPair(BaseModel):
    """A (ζ, α) pair with the constants (b, B, C) of the α/ζ system it solves."""

    kind: str
    zeta: str
    alpha: str
    b: float
    B: float
    C: float
    domain: Tuple[float, float]


class PsiSolution(BaseModel):
    k: float
    z: List[float]
    psi: List[float]
    psi_prime: List[float]
    residual: List[float]
    order: int = 5


class CheckResult(BaseModel):
    name: str
    max_residual: float
    tol: float
    passed: bool = Field(..., alias="pass")
    integrator_backed: bool = False
    error: Optional[str] = None

    model_config = ConfigDict(populate_by_name=True)


class GeneratorReport(BaseModel):
    expr: str
    claimed: Literal["killing", "homothetic", "essential"]
    class_: Optional[str] = Field(None, alias="class")
    fitted_A: Optional[List[float]] = None
    lam: Optional[float] = None
    max_symmetry_residual: Optional[float] = None
    max_coefficient: Optional[float] = None

    model_config = ConfigDict(populate_by_name=True)


class EntryReport(BaseModel):
    id: str
    params: Dict[str, float]
    checks: List[CheckResult]
    generators: List[GeneratorReport]
    anchor: str = Field("", alias="paper_anchor")

    model_config = ConfigDict(populate_by_name=True)

    @property
    def failed(self) -> List[CheckResult]:
        return [c for c in self.checks if not c.passed]


class SuiteReport(BaseModel):
    version: str
    config: Dict[str, Any]
    entries: List[EntryReport]
    failed_checks: int
    total_checks: int


class RunConfig(BaseModel):
    command: str
    entry: Optional[str] = None
    metric: Optional[str] = None
    vf: Optional[str] = None
    samples: int = Field(200, ge=1)
    seed: int = Field(0, ge=0, lt=2**64)
    tol: float = Field(1e-8, gt=0)
    report: Optional[str] = None
    out: Optional[str] = None
    parallel: bool = False
    grid: int = Field(21, ge=2)
    k: Optional[float] = None
    range: Optional[Tuple[float, float]] = None
    init: Optional[Tuple[float, float]] = None
