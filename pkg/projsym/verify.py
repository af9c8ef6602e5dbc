"""Run every applicable check of a catalog entry and collect an EntryReport."""
import logging
import math
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from .catalog import CatalogEntry, Generator, get_entry
from .errors import ProjsymError, SingularDenominator
from .expr import ScalarExpr, evaluate, parse, substitute
from .geometry import (
    bianchi_defect,
    check_Rg_decomposition,
    classify_homothety,
    lie_derivative_metric,
    metric_values,
    riemann_scalar_sectional,
    sample_points,
)
from .metrisability import (
    benenti,
    benenti_from_matrices,
    benenti_jet,
    check_eigenvalue_identity,
    check_LvL,
    lie_action_matrix,
    lie_derivative_from_action,
    metrisability_defect,
    normalise_action,
    pencil_metric,
    self_adjoint_defect,
)
from .models import (
    ActionMatrix,
    CheckResult,
    EntryReport,
    GeneratorReport,
    JetPoint,
    PointSample,
    Tolerances,
    VectorFieldSpec,
)
from .ode_families import (
    alpha_zeta_residuals,
    descent_constant,
    gluing_residuals,
    ode111_residual,
    psi_closed_form_error,
    psi_inverf_error,
    psi_zeta_residual,
    solodovnikov21_residuals,
    solve_psi,
    univariate_jet,
    zeta_k_residual,
    zeta_ode_residual,
)
from .projective import (
    bracket_residual,
    block_structure_defect,
    fit_symmetry_polynomial,
    geodesic_transport_defect,
    normalised_symmetry_residual,
    sample_jets,
)

logger = logging.getLogger(__name__)

COEFFICIENT_POINTS = 20
IDENTITY_POINTS = 50
BRACKET_POINTS = 10
BRACKET_TOL = 1e-7
DESCENT_TOL = 1e-7
PSI_TOL = 1e-8
PSI_LENGTH = 0.5
PSI_POINTS = 101
PSI_INIT = (-2.0, -1.0)  # (ψ − z, ψ') at the start of the z range
Z_GRID = 10
PENCILS = ((1.0, 1.0), (2.0, -1.0))
TRANSPORT_TIME = 0.1
TRANSPORT_LENGTH = 0.3
TRANSPORT_RK_TOL = 1e-10
TRANSPORT_SLOPES = (0.3, -0.2)

CLAIM_TO_CLASS = {"killing": "killing", "homothetic": "homothetic", "essential": "not_homothetic"}


def _num(value: float) -> str:
    return f"({float(value)!r})"


def bind(source: str, params: Dict[str, float]) -> ScalarExpr:
    """Substitute parameter values so that one-variable helpers can evaluate ``source``."""
    expr = parse(source)
    used = {name: _num(value) for name, value in params.items() if name in expr.names()}
    return substitute(expr, used) if used else expr


class EntryVerifier:
    def __init__(
        self,
        entry: CatalogEntry,
        samples: int = 200,
        seed: int = 0,
        tolerances: Optional[Tolerances] = None,
    ):
        self.entry = entry
        self.samples = samples
        self.seed = seed
        self.tol = tolerances if tolerances is not None else Tolerances()
        self.checks: List[CheckResult] = []
        self.generators: List[GeneratorReport] = []
        self.actions: Dict[int, ActionMatrix] = {}
        self.points: List[PointSample] = []
        self.jets: List[JetPoint] = []

    def record(self, name: str, value: float, tol: float, passed: Optional[bool] = None,
               integrator_backed: bool = False, error: Optional[str] = None) -> CheckResult:
        ok = value <= tol if passed is None else passed
        result = CheckResult(name=name, max_residual=float(value), tol=tol, passed=bool(ok) and error is None,
                             integrator_backed=integrator_backed, error=error)
        if not result.passed:
            logger.debug("%s: %s failed (%.3e > %.3e) %s", self.entry.id, name, value, tol, error or "")
        self.checks.append(result)
        return result

    def attempt(self, name: str, tol: float, compute: Callable[[], float], integrator_backed: bool = False) -> None:
        try:
            value = compute()
        except (ProjsymError, np.linalg.LinAlgError, ValueError, OverflowError) as e:
            self.record(name, math.inf, tol, passed=False, integrator_backed=integrator_backed,
                        error=f"{type(e).__name__}: {e}")
            return
        self.record(name, value, tol, integrator_backed=integrator_backed)

    @property
    def metric(self):
        return self.entry.metric

    def identity_points(self) -> List[List[float]]:
        return [s.coords for s in self.points[:IDENTITY_POINTS]]

    def run(self) -> EntryReport:
        logger.debug("verifying %s with %d samples (seed %d)", self.entry.id, self.samples, self.seed)
        try:
            self.points = sample_points(self.metric, min(self.samples, IDENTITY_POINTS), self.seed, self.tol.guard)
            self.jets = sample_jets(self.metric, self.samples, self.seed, threshold=self.tol.guard)
        except ProjsymError as e:
            self.record("sampling", math.inf, 0.0, passed=False, error=f"{type(e).__name__}: {e}")
            return self.report()
        for index, generator in enumerate(self.entry.generators):
            self.check_generator(index, generator)
        self.check_brackets()
        self.check_negative_controls()
        if self.entry.partner is not None:
            self.check_benenti()
            self.check_metrisability()
            for index, generator in enumerate(self.entry.generators):
                if index in self.actions:
                    self.check_action_identities(index, generator.field)
        if self.entry.kind == "111":
            for index, generator in enumerate(self.entry.generators):
                self.check_block_111(index, generator.field)
        if self.entry.kind == "21" and self.entry.partner is not None:
            for index, generator in enumerate(self.entry.generators):
                self.check_block_21(index, generator.field)
        self.check_curvature()
        if self.entry.psi_prime is not None:
            self.check_psi()
        for index in self.entry.transport:
            self.check_transport(index)
        return self.report()

    def report(self) -> EntryReport:
        return EntryReport(id=self.entry.id, params=dict(self.entry.params), checks=self.checks,
                           generators=self.generators, anchor=self.entry.anchor)

    # generators

    def check_generator(self, index: int, generator: Generator) -> None:
        m, v = self.metric, generator.field
        report = GeneratorReport(expr=str(v), claimed=generator.claimed)
        self.generators.append(report)
        try:
            v.validate_for(m)
        except ProjsymError as e:
            self.record(f"symmetry[{index}]", math.inf, self.tol.symmetry, passed=False, error=str(e))
            return

        def symmetry() -> float:
            worst = max(normalised_symmetry_residual(m, v, j, self.tol.guard) for j in self.jets)
            report.max_symmetry_residual = worst
            return worst

        def coefficients() -> float:
            worst = 0.0
            for s in self.points[:COEFFICIENT_POINTS]:
                coeffs, structural = fit_symmetry_polynomial(m, v, s.coords, self.tol.condition_limit, self.tol.guard)
                worst = max(worst, float(np.max(np.abs(coeffs))), structural)
            report.max_coefficient = worst
            return worst

        self.attempt(f"symmetry[{index}]", self.tol.symmetry, symmetry)
        self.attempt(f"coefficients[{index}]", self.tol.symmetry, coefficients)
        self.check_classification(index, generator, report)
        if self.entry.partner is not None:
            self.check_action(index, generator, report)

    def check_classification(self, index: int, generator: Generator, report: GeneratorReport) -> None:
        name = f"classification[{index}]"
        try:
            found = classify_homothety(self.metric, generator.field, self.points, self.tol.identity)
        except ProjsymError as e:
            self.record(name, math.inf, self.tol.identity, passed=False, error=f"{type(e).__name__}: {e}")
            return
        label = "essential" if found.kind == "not_homothetic" else found.kind
        report.class_ = label
        report.lam = found.lam
        expected = CLAIM_TO_CLASS[generator.claimed]
        error = None if found.kind == expected else f"claimed {generator.claimed}, found {label}"
        # for essential claims the reported residual is the failed homothety fit
        self.record(name, found.max_residual, self.tol.identity, passed=found.kind == expected, error=error)

    def check_action(self, index: int, generator: Generator, report: GeneratorReport) -> None:
        partner = self.entry.partner
        assert partner is not None
        try:
            A = lie_action_matrix(generator.field, self.metric, partner, self.points)
        except ProjsymError as e:
            self.record(f"action_fit[{index}]", math.inf, self.tol.symmetry, passed=False,
                        error=f"{type(e).__name__}: {e}")
            return
        self.actions[index] = A
        report.fitted_A = A.as_list()
        logger.debug("%s generator %d: A = %s", self.entry.id, index, A.as_list())
        self.record(f"action_fit[{index}]", A.fit_residual, self.tol.symmetry)
        kind, _ = normalise_action(A)
        error = None if kind == generator.claimed else f"claimed {generator.claimed}, action gives {kind}"
        self.record(f"action_class[{index}]", 0.0 if error is None else 1.0, 0.5, error=error)

    def check_brackets(self) -> None:
        gens = self.entry.generators
        jets = self.jets[:BRACKET_POINTS]
        for i in range(len(gens)):
            for j in range(i + 1, len(gens)):
                u, v = gens[i].field, gens[j].field
                self.attempt(f"bracket[{i},{j}]", BRACKET_TOL,
                             lambda u=u, v=v: bracket_residual(self.metric, u, v, jets, self.tol.guard))

    def check_negative_controls(self) -> None:
        for index, control in enumerate(self.entry.negative_controls):
            name = f"negative_control[{index}]"
            try:
                value = max(normalised_symmetry_residual(self.metric, control, j, self.tol.guard) for j in self.jets)
            except ProjsymError as e:
                self.record(name, math.inf, self.tol.negative_control, passed=False, error=str(e))
                continue
            # a control passes when it is NOT a projective symmetry
            self.record(name, value, self.tol.negative_control, passed=value > self.tol.negative_control)

    # Benenti tensor and metrisability

    def eigenvalue_values(self, p: Sequence[float]) -> List[float]:
        m = self.metric
        return sorted(float(evaluate(f, p, m.params, m.coords)) for f in self.entry.eigenvalue_fields)

    def check_benenti(self) -> None:
        g, gbar = self.metric, self.entry.partner
        assert gbar is not None
        points = self.identity_points()
        tensors = []

        def compute_all() -> None:
            for p in points:
                tensors.append((p, benenti(g, gbar, p, self.tol.guard)))

        try:
            compute_all()
        except (ProjsymError, np.linalg.LinAlgError) as e:
            self.record("benenti_eigenvalues", math.inf, self.tol.symmetry, passed=False, error=str(e))
            return

        if self.entry.eigenvalue_fields:
            def eigenvalues() -> float:
                worst = 0.0
                for p, bt in tensors:
                    expected = self.eigenvalue_values(p)
                    found = sorted(bt.eigenvalues_real)
                    scale = 1.0 + max(abs(x) for x in expected)
                    worst = max(worst, max(abs(a - b) for a, b in zip(found, expected)) / scale,
                                max(abs(x) for x in bt.eigenvalues_imag))
                return worst

            self.attempt("benenti_eigenvalues", self.tol.symmetry, eigenvalues)
        if self.entry.multiplicities:
            wrong = sum(1 for _, bt in tensors if sorted(bt.multiplicities) != sorted(self.entry.multiplicities))
            self.record("multiplicities", float(wrong), 0.0,
                        error=None if not wrong else f"{wrong} points with multiplicities other than "
                                                     f"{self.entry.multiplicities}")
        if not self.entry.diagonalizable:
            diagonal = sum(1 for _, bt in tensors if bt.diagonalizable)
            self.record("non_diagonalizable", float(diagonal), 0.0)

        def adjoint() -> float:
            worst = 0.0
            for p, bt in tensors:
                G, L = metric_values(g, p), np.asarray(bt.L)
                worst = max(worst, self_adjoint_defect(G, L, 1), self_adjoint_defect(G, L, 2))
            return worst

        self.attempt("self_adjoint", self.tol.identity, adjoint)
        self.check_pencils(tensors)

    def check_pencils(self, tensors) -> None:
        g, gbar = self.metric, self.entry.partner
        assert gbar is not None
        wrong, used = 0, 0
        for p, bt in tensors:
            for t1, t2 in PENCILS:
                try:
                    gt = pencil_metric(g, gbar, t1, t2, p)
                    from_pencil = benenti_from_matrices(metric_values(g, p), gt).multiplicities
                except (ProjsymError, np.linalg.LinAlgError):
                    continue
                used += 1
                if sorted(from_pencil) != sorted(bt.multiplicities):
                    wrong += 1
        if used == 0:
            self.record("pencil", math.inf, 0.0, passed=False, error="every pencil metric was degenerate")
            return
        self.record("pencil", float(wrong), 0.0)

    def check_metrisability(self) -> None:
        g, gbar = self.metric, self.entry.partner
        assert gbar is not None
        points = self.identity_points()
        self.attempt("metrisability", self.tol.identity, lambda: max(
            max(metrisability_defect(g, g, p, self.tol.guard), metrisability_defect(g, gbar, p, self.tol.guard))
            for p in points
        ))

    def check_action_identities(self, index: int, v: VectorFieldSpec) -> None:
        g, gbar, A = self.metric, self.entry.partner, self.actions[index]
        assert gbar is not None
        points = self.identity_points()[:COEFFICIENT_POINTS]
        scale = 1.0 + max(abs(x) for x in A.as_list())

        if self.entry.eigenvalue_fields:
            def solodovnikov() -> float:
                worst = 0.0
                for p in points:
                    lam = max(abs(x) for x in self.eigenvalue_values(p))
                    defects = check_eigenvalue_identity(A, v, g, self.entry.eigenvalue_fields, p)
                    worst = max(worst, max(defects) / (scale * (1.0 + lam * lam)))
                return worst

            self.attempt(f"solodovnikov[{index}]", self.tol.symmetry, solodovnikov)

        def lvl() -> float:
            worst = 0.0
            for p in points:
                lvl_defect, sym_defect = check_LvL(v, g, gbar, A, p)
                worst = max(worst, lvl_defect, sym_defect)
            return worst

        def from_action() -> float:
            worst = 0.0
            for p in points:
                L, _ = benenti_jet(g, gbar, p)
                for metric, partner in ((g, False), (gbar, True)):
                    direct = lie_derivative_metric(metric, v, p)
                    predicted = lie_derivative_from_action(A, metric_values(metric, p), L, partner)
                    size = 1.0 + float(np.max(np.abs(direct))) + float(np.max(np.abs(predicted)))
                    worst = max(worst, float(np.max(np.abs(direct - predicted))) / size)
            return worst

        self.attempt(f"lvl[{index}]", self.tol.symmetry, lvl)
        self.attempt(f"lie_from_action[{index}]", self.tol.symmetry, from_action)

    # Levi-Civita blocks

    def check_block_111(self, index: int, v: VectorFieldSpec) -> None:
        m = self.metric
        points = self.identity_points()[:COEFFICIENT_POINTS]
        self.attempt(f"block111[{index}]", self.tol.identity,
                     lambda: max(block_structure_defect("111", v, m, p) for p in points))
        A = self.actions.get(index)
        if A is None or not self.entry.lc_coordinates:
            return
        rows = []

        def collect() -> None:
            for p in points:
                rows.extend(ode111_residual(self.entry.eigenvalue_fields, v.components, A, p, m.coords, m.params))

        try:
            collect()
        except ProjsymError as e:
            self.record(f"ode111[{index}]", math.inf, self.tol.symmetry, passed=False, error=str(e))
            return
        scale = 1.0 + max(abs(x) for x in A.as_list())
        self.record(f"ode111[{index}]", max(r for r, _ in rows) / scale, self.tol.symmetry)
        self.record(f"descent111[{index}]", max(t for _, t in rows) / scale, self.tol.symmetry)

    def z_grid(self) -> List[float]:
        lo, hi = self.metric.domain[2]
        return [float(z) for z in np.linspace(lo, hi, Z_GRID + 2)[1:-1]]

    def check_block_21(self, index: int, v: VectorFieldSpec) -> None:
        m, entry = self.metric, self.entry
        points = self.identity_points()[:COEFFICIENT_POINTS]
        self.attempt(f"block21[{index}]", self.tol.identity,
                     lambda: max(block_structure_defect("21", v, m, p) for p in points))
        A = self.actions.get(index)
        if A is None or entry.h is None or entry.zeta is None:
            return
        C = descent_constant(A, entry.rho)
        b, B = A.b, A.a + A.d
        scale = 1.0 + max(abs(x) for x in A.as_list())
        self.attempt(f"descent21[{index}]", DESCENT_TOL, lambda: self.descent_defect(v, C))
        zeta = bind(entry.zeta, entry.params)
        alpha = bind(v.components[2], entry.params)
        Z = bind(f"({entry.zeta})+{entry.rho!r}", entry.params)
        grid = self.z_grid()

        def relative(residuals: Callable[[float], Tuple[float, float]]) -> float:
            worst = 0.0
            for t in grid:
                z0 = univariate_jet(zeta, t, "z")[0]
                worst = max(worst, max(residuals(t)) / (scale * (1.0 + z0 * z0)))
            return worst

        self.attempt(f"alpha_zeta[{index}]", self.tol.symmetry,
                     lambda: relative(lambda t: alpha_zeta_residuals(alpha, zeta, b, B, C, t)))
        self.attempt(f"gluing[{index}]", self.tol.symmetry,
                     lambda: relative(lambda t: gluing_residuals(alpha, zeta, C, t)))
        self.attempt(f"solodovnikov21[{index}]", self.tol.symmetry,
                     lambda: relative(lambda t: solodovnikov21_residuals(A, entry.rho, alpha, Z, t)))
        defects = []
        for t in grid:
            try:
                z0, z1, z2 = univariate_jet(zeta, t, "z")
                defects.append(zeta_ode_residual(zeta, b, B, C, t) / (scale * (1.0 + abs(z2) + z0 * z0)))
            except SingularDenominator:
                continue
        if defects:
            self.record(f"zeta_ode[{index}]", max(defects), self.tol.symmetry)

    def descent_defect(self, v: VectorFieldSpec, C: float) -> float:
        """|λ_h + C| where the horizontal part of v satisfies L_u h = λ_h h."""
        h = self.entry.h
        assert h is not None
        u = VectorFieldSpec(components=list(v.components[:2]))
        h_points = sample_points(h, max(10, COEFFICIENT_POINTS), self.seed, self.tol.guard)
        found = classify_homothety(h, u, h_points, self.tol.identity)
        if found.kind == "not_homothetic":
            raise ProjsymError("horizontal part is not homothetic for h", {"residual": found.max_residual})
        lam = found.lam or 0.0
        return abs(lam + C) / (1.0 + abs(C))

    # curvature, ψ family and transport

    def check_curvature(self) -> None:
        m = self.metric
        points = self.identity_points()

        def bianchi() -> float:
            worst = 0.0
            for p in points[:10]:
                riemann = riemann_scalar_sectional(m, p, self.tol.guard)[0]
                worst = max(worst, bianchi_defect(m, p) / (1.0 + float(np.max(np.abs(riemann)))))
            return worst

        if m.dim == 3:
            self.attempt("bianchi", self.tol.identity, bianchi)
        if self.entry.constant_curvature:
            def spread() -> float:
                values = []
                for p in points:
                    values.extend(riemann_scalar_sectional(m, p, self.tol.guard)[2].values())
                reference = values[0]
                return max(abs(k - reference) for k in values) / (1.0 + abs(reference))

            self.attempt("curvature_constant", self.tol.symmetry, spread)
        if self.entry.h is not None and self.entry.zeta is not None:
            h, zeta = self.entry.h, self.entry.zeta

            def decomposition() -> float:
                worst = 0.0
                for p in points[:10]:
                    r = riemann_scalar_sectional(m, p, self.tol.guard)[1]
                    worst = max(worst, check_Rg_decomposition(h, zeta, p) / (1.0 + abs(r)))
                return worst

            self.attempt("warped_scalar_curvature", self.tol.identity, decomposition)

    def check_psi(self) -> None:
        lo = self.metric.domain[2][0]
        assert self.entry.psi_prime is not None
        k = self.entry.params.get("k", 1.0)
        z_range = (lo, lo + PSI_LENGTH)
        init = (lo + PSI_INIT[0], PSI_INIT[1])
        self.attempt(
            "psi_zeta", self.tol.integrator,
            lambda: psi_zeta_residual(solve_psi(k, z_range, init, n_points=PSI_POINTS)),
            integrator_backed=True,
        )
        if k == 0.0:
            self.attempt("psi_inverf", PSI_TOL, lambda: psi_inverf_error(z_range, init), integrator_backed=True)

        # the metric itself always carries the k = 1 solution
        zeta = bind(f"-({self.entry.psi_prime})", self.entry.params)

        def tanh_zeta() -> float:
            worst = 0.0
            for t in self.z_grid():
                z2 = univariate_jet(zeta, t, "z")[2]
                worst = max(worst, zeta_k_residual(zeta, 1.0, t) / (1.0 + abs(z2)))
            return worst

        self.attempt("psi_tanh", self.tol.symmetry, tanh_zeta)
        hi = self.metric.domain[2][1]
        self.attempt("psi_closed_form", PSI_TOL, lambda: psi_closed_form_error(0.0, 1.0, (lo, hi)),
                     integrator_backed=True)

    def check_transport(self, index: int) -> None:
        m = self.metric
        v = self.entry.generators[index].field
        center = [0.5 * (lo + hi) for lo, hi in m.domain]
        j0 = JetPoint(base=center, slopes=list(TRANSPORT_SLOPES[: m.dim - 1]))
        self.attempt(
            f"transport[{index}]", self.tol.integrator,
            lambda: geodesic_transport_defect(m, v, j0, TRANSPORT_TIME, TRANSPORT_LENGTH,
                                              tol=TRANSPORT_RK_TOL, threshold=self.tol.guard),
            integrator_backed=True,
        )


def verify_catalog_entry(
    entry: CatalogEntry, samples: int = 200, seed: int = 0, tolerances: Optional[Tolerances] = None
) -> EntryReport:
    return EntryVerifier(entry, samples, seed, tolerances).run()


def verify_entry(
    entry_id: str,
    params: Optional[Dict[str, float]] = None,
    samples: int = 200,
    seed: int = 0,
    tolerances: Optional[Tolerances] = None,
) -> EntryReport:
    """Verify one registered entry; raises UnknownEntry or ParamOutOfRange before any check runs."""
    entry = get_entry(entry_id, params)
    return verify_catalog_entry(entry, samples, seed, tolerances)
