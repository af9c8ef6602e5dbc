"""Weighted tensors, the metrisability system, Benenti tensors and the action of a
projective field on the span of two solutions.

Conventions: σ = |det g|^{1/(n+1)} g⁻¹, L(g, ḡ) = σ̄σ⁻¹, and the action matrix
satisfies L_vσ = aσ + bσ̄, L_vσ̄ = cσ + dσ̄.
"""
import logging
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np

from .errors import DegeneratePencil, DegenerateSigma, DependentBasis, DimensionError, SingularMetric
from .geometry import (
    DEFAULT_GUARD_THRESHOLD,
    christoffel,
    inverse_metric,
    lie_derivative_from_jets,
    metric_jet,
    metric_values,
    point_env,
    scalar_jet,
    vector_jet,
)
from .autodiff import lift, seed
from .expr import ScalarExpr, evaluate_env, parse
from .models import (
    ActionMatrix,
    BenentiTensor,
    MetricSpec,
    PointSample,
    SigmaFieldSpec,
    VectorFieldSpec,
    WeightedTensor,
)

logger = logging.getLogger(__name__)

RANK_THRESHOLD = 1e-10
DIAGONALIZABLE_TOL = 1e-8
CLUSTER_TOL = 1e-7
INDEPENDENCE_THRESHOLD = 1e-6

SigmaSource = Union[SigmaFieldSpec, MetricSpec, Sequence[Tuple[float, MetricSpec]]]


def _weight(n: int) -> float:
    return 1.0 / (n + 1)


def sigma_from_matrix(g: np.ndarray) -> np.ndarray:
    n = g.shape[0]
    det = float(np.linalg.det(g))
    if det == 0.0:
        raise SingularMetric("Metric is degenerate")
    return abs(det) ** _weight(n) * np.linalg.inv(g)


def _rank(sigma: np.ndarray) -> int:
    singular = np.linalg.svd(sigma, compute_uv=False)
    norm = float(np.max(singular)) if singular.size else 0.0
    return int(np.sum(singular > RANK_THRESHOLD * norm)) if norm > 0 else 0


def weighted(sigma: np.ndarray) -> WeightedTensor:
    rank = _rank(sigma)
    return WeightedTensor(sigma=sigma.tolist(), rank=rank, full_rank=rank == sigma.shape[0])


def sigma_of_g(m: MetricSpec, p: Sequence[float], threshold: float = DEFAULT_GUARD_THRESHOLD) -> WeightedTensor:
    g = metric_values(m, p)
    inverse_metric(g, threshold)
    return weighted(sigma_from_matrix(g))


def g_of_sigma(s: Union[WeightedTensor, np.ndarray]) -> np.ndarray:
    sigma = np.asarray(s.sigma if isinstance(s, WeightedTensor) else s, dtype=float)
    rank = _rank(sigma)
    if rank < sigma.shape[0]:
        raise DegenerateSigma(f"σ has rank {rank} < {sigma.shape[0]}: a lower-rank solution", {"rank": rank})
    return np.linalg.inv(abs(float(np.linalg.det(sigma))) * sigma)


def _sigma_jet_of_metric(m: MetricSpec, p: Sequence[float]) -> Tuple[np.ndarray, np.ndarray]:
    """σ and ∂_aσ^{bc} (index [a,b,c]) from the metric jet."""
    g, dg, _ = metric_jet(m, p)
    n = m.dim
    ginv = np.linalg.inv(g)
    factor = abs(float(np.linalg.det(g))) ** _weight(n)
    sigma = factor * ginv
    dsigma = np.empty((n, n, n))
    for a in range(n):
        dginv = -ginv @ dg[a] @ ginv
        trace = float(np.trace(ginv @ dg[a]))
        dsigma[a] = factor * (_weight(n) * trace * ginv + dginv)
    return sigma, dsigma


def _sigma_jet_of_field(s: SigmaFieldSpec, m: MetricSpec, p: Sequence[float]) -> Tuple[np.ndarray, np.ndarray]:
    n = m.dim
    if s.dim != n:
        raise DimensionError(f"σ field of dimension {s.dim} against a {n}-dimensional metric")
    env = point_env(m, seed(p))
    sigma = np.empty((n, n))
    dsigma = np.empty((n, n, n))
    for b in range(n):
        for c in range(b, n):
            value = lift(evaluate_env(parse(s.sigma[b][c]), env), n)
            sigma[b, c] = sigma[c, b] = value.value
            dsigma[:, b, c] = dsigma[:, c, b] = value.grad
    return sigma, dsigma


def sigma_jet(source: SigmaSource, m: MetricSpec, p: Sequence[float]) -> Tuple[np.ndarray, np.ndarray]:
    """σ with its first derivatives from a σ field, a partner metric or a linear combination of metrics."""
    if isinstance(source, SigmaFieldSpec):
        return _sigma_jet_of_field(source, m, p)
    if isinstance(source, MetricSpec):
        return _sigma_jet_of_metric(source, p)
    n = m.dim
    sigma = np.zeros((n, n))
    dsigma = np.zeros((n, n, n))
    for coeff, metric in source:
        s, ds = _sigma_jet_of_metric(metric, p)
        sigma += coeff * s
        dsigma += coeff * ds
    return sigma, dsigma


def metrisability_residual(
    m: MetricSpec, sfield: SigmaSource, p: Sequence[float], threshold: float = DEFAULT_GUARD_THRESHOLD
) -> np.ndarray:
    """R[a,b,c] = ∇_aσ^{bc} − (δ^c_a ∇_iσ^{ib} + δ^b_a ∇_iσ^{ic})/(n+1)."""
    n = m.dim
    gamma = christoffel(m, p, threshold)
    sigma, dsigma = sigma_jet(sfield, m, p)
    w = _weight(n)
    trace_gamma = np.einsum("dda->a", gamma)
    nabla = (
        dsigma
        + np.einsum("bad,dc->abc", gamma, sigma)
        + np.einsum("cad,db->abc", gamma, sigma)
        - 2.0 * w * np.einsum("a,bc->abc", trace_gamma, sigma)
    )
    divergence = np.einsum("iib->b", nabla)
    eye = np.eye(n)
    return nabla - w * (np.einsum("ca,b->abc", eye, divergence) + np.einsum("ba,c->abc", eye, divergence))


def metrisability_defect(
    m: MetricSpec, sfield: SigmaSource, p: Sequence[float], threshold: float = DEFAULT_GUARD_THRESHOLD
) -> float:
    """Max-norm of the residual relative to 1 + max|σ| + max|∂σ|."""
    residual = metrisability_residual(m, sfield, p, threshold)
    sigma, dsigma = sigma_jet(sfield, m, p)
    scale = 1.0 + float(np.max(np.abs(sigma))) + float(np.max(np.abs(dsigma)))
    return float(np.max(np.abs(residual))) / scale


def pencil_metric(
    g: MetricSpec, gbar: MetricSpec, t1: float, t2: float, p: Sequence[float]
) -> np.ndarray:
    if t2 == 0.0 and t1 == 1.0:
        return metric_values(g, p)
    if t1 == 0.0 and t2 == 1.0:
        return metric_values(gbar, p)
    combined = t1 * sigma_from_matrix(metric_values(g, p)) + t2 * sigma_from_matrix(metric_values(gbar, p))
    try:
        return g_of_sigma(combined)
    except DegenerateSigma as e:
        raise DegeneratePencil(f"Pencil ({t1}, {t2}) is degenerate at {list(p)}", e.details) from e


def cluster_eigenvalues(values: Sequence[complex], tol: float = CLUSTER_TOL) -> List[Tuple[complex, int]]:
    """Group eigenvalues closer than tol·(1 + max|λ|); each cluster is reported by its mean."""
    ordered = sorted(values, key=lambda z: (z.real, z.imag))
    scale = tol * (1.0 + max((abs(z) for z in ordered), default=0.0))
    clusters: List[List[complex]] = []
    for z in ordered:
        for cluster in clusters:
            if abs(cluster[0] - z) <= scale:
                cluster.append(z)
                break
        else:
            clusters.append([z])
    return [(complex(np.mean(c)), len(c)) for c in clusters]


def _eigenvalues(g: np.ndarray, L: np.ndarray) -> Tuple[np.ndarray, Optional[np.ndarray]]:
    # gL is symmetric: reduce to a symmetric problem when g is positive definite
    try:
        chol = np.linalg.cholesky(g)
    except np.linalg.LinAlgError:
        values, vectors = np.linalg.eig(L)
        return values.astype(complex), vectors
    gl = g @ L
    inv = np.linalg.inv(chol)
    values, vectors = np.linalg.eigh(inv @ (0.5 * (gl + gl.T)) @ inv.T)
    return values.astype(complex), inv.T @ vectors


def benenti_from_matrices(g: np.ndarray, gbar: np.ndarray, tol: float = DIAGONALIZABLE_TOL) -> BenentiTensor:
    n = g.shape[0]
    ratio = float(np.linalg.det(gbar)) / float(np.linalg.det(g))
    L = abs(ratio) ** _weight(n) * np.linalg.solve(gbar, g)
    values, vectors = _eigenvalues(g, L)
    clusters = cluster_eigenvalues(list(values))
    eigenvalues: List[complex] = []
    multiplicities: List[int] = []
    diagonalizable = True
    rank_tol = tol * (1.0 + float(np.max(np.abs(L))))
    for value, mult in clusters:
        eigenvalues.extend([value] * mult)
        multiplicities.append(mult)
        if abs(value.imag) > rank_tol:
            continue
        shifted = L - value.real * np.eye(n)
        singular = np.linalg.svd(shifted, compute_uv=False)
        geometric = int(np.sum(singular <= rank_tol))
        if geometric < mult:
            diagonalizable = False
    if any(abs(z.imag) > rank_tol for z in eigenvalues):
        diagonalizable = False
    basis = None
    if diagonalizable and vectors is not None:
        basis = np.real(vectors).tolist()
    return BenentiTensor(
        L=L.tolist(),
        eigenvalues_real=[z.real for z in eigenvalues],
        eigenvalues_imag=[z.imag for z in eigenvalues],
        multiplicities=multiplicities,
        eigvec_basis=basis,
        diagonalizable=diagonalizable,
    )


def benenti(
    g: MetricSpec, gbar: MetricSpec, p: Sequence[float], threshold: float = DEFAULT_GUARD_THRESHOLD
) -> BenentiTensor:
    gv = metric_values(g, p)
    gbv = metric_values(gbar, p)
    inverse_metric(gv, threshold)
    inverse_metric(gbv, 0.0)
    return benenti_from_matrices(gv, gbv)


def benenti_jet(g: MetricSpec, gbar: MetricSpec, p: Sequence[float]) -> Tuple[np.ndarray, np.ndarray]:
    """L and ∂_kL (index [k,i,j])."""
    G, dG, _ = metric_jet(g, p)
    H, dH, _ = metric_jet(gbar, p)
    n = g.dim
    w = _weight(n)
    Hinv = np.linalg.inv(H)
    Ginv = np.linalg.inv(G)
    f = abs(float(np.linalg.det(H)) / float(np.linalg.det(G))) ** w
    L = f * Hinv @ G
    dL = np.empty((n, n, n))
    for k in range(n):
        df = f * w * (float(np.trace(Hinv @ dH[k])) - float(np.trace(Ginv @ dG[k])))
        dL[k] = df * Hinv @ G - f * Hinv @ dH[k] @ Hinv @ G + f * Hinv @ dG[k]
    return L, dL


def self_adjoint_defect(g: np.ndarray, L: np.ndarray, power: int = 1) -> float:
    product = g @ np.linalg.matrix_power(L, power)
    return float(np.max(np.abs(product - product.T))) / (1.0 + float(np.max(np.abs(product))))


def lie_derivative_sigma(v: VectorFieldSpec, m: MetricSpec, p: Sequence[float]) -> np.ndarray:
    """L_vσ^{ij} = |det g|^{1/(n+1)}(tr(g⁻¹L_vg) g^{ij}/(n+1) + (L_v g⁻¹)^{ij})."""
    g, dg, _ = metric_jet(m, p)
    vals, dv, _ = vector_jet(v, m, p)
    lie = lie_derivative_from_jets(g, dg, vals, dv)
    n = m.dim
    ginv = np.linalg.inv(g)
    factor = abs(float(np.linalg.det(g))) ** _weight(n)
    result = factor * (_weight(n) * float(np.trace(ginv @ lie)) * ginv - ginv @ lie @ ginv)
    return 0.5 * (result + result.T)


def _upper(a: np.ndarray) -> np.ndarray:
    return a[np.triu_indices(a.shape[0])]


def lie_action_matrix(
    v: VectorFieldSpec,
    g: MetricSpec,
    gbar: MetricSpec,
    samples: Sequence[PointSample],
    independence: float = INDEPENDENCE_THRESHOLD,
) -> ActionMatrix:
    """Least-squares fit of L_vσ = aσ + bσ̄ and L_vσ̄ = cσ + dσ̄ over the samples, in sample order."""
    rows: List[np.ndarray] = []
    rhs_sigma: List[np.ndarray] = []
    rhs_bar: List[np.ndarray] = []
    discarded = 0
    for sample in samples:
        if not sample.admissible:
            continue
        p = sample.coords
        sigma = sigma_from_matrix(metric_values(g, p))
        sigma_bar = sigma_from_matrix(metric_values(gbar, p))
        basis = np.column_stack((_upper(sigma), _upper(sigma_bar)))
        norms = np.linalg.norm(basis, axis=0)
        if float(np.min(np.linalg.svd(basis / norms, compute_uv=False))) < independence:
            discarded += 1
            continue
        scale = 1.0 / float(np.max(norms))
        rows.append(basis * scale)
        rhs_sigma.append(_upper(lie_derivative_sigma(v, g, p)) * scale)
        rhs_bar.append(_upper(lie_derivative_sigma(v, gbar, p)) * scale)
    if discarded:
        logger.warning("discarded %d samples where σ and σ̄ are nearly dependent", discarded)
    if not rows:
        raise DependentBasis("σ and σ̄ are proportional at every sample")
    M = np.vstack(rows)
    Y = np.column_stack((np.concatenate(rhs_sigma), np.concatenate(rhs_bar)))
    coeffs = np.linalg.lstsq(M, Y, rcond=None)[0]
    fit = float(np.max(np.abs(M @ coeffs - Y))) / (1.0 + float(np.max(np.abs(Y))))
    (a, c), (b, d) = coeffs
    return ActionMatrix(a=float(a), b=float(b), c=float(c), d=float(d), fit_residual=fit)


def solodovnikov_poly(A: ActionMatrix, t: float) -> float:
    return -A.b * t * t + (A.d - A.a) * t + A.c


def check_eigenvalue_identity(
    A: ActionMatrix,
    v: VectorFieldSpec,
    m: MetricSpec,
    eigenvalue_fields: Sequence[Union[ScalarExpr, str]],
    p: Sequence[float],
) -> List[float]:
    """|S_A(λ) − v(λ)| for each eigenvalue field λ."""
    vals = vector_jet(v, m, p)[0]
    out = []
    for field in eigenvalue_fields:
        lam, grad, _ = scalar_jet(field, m, p)
        out.append(abs(solodovnikov_poly(A, lam) - float(vals @ grad)))
    return out


def lie_derivative_tensor11(L: np.ndarray, dL: np.ndarray, v: np.ndarray, dv: np.ndarray) -> np.ndarray:
    """(L_vL)^i_j = v^k∂_kL^i_j − ∂_kv^i L^k_j + L^i_k ∂_jv^k."""
    return np.einsum("k,kij->ij", v, dL) - dv @ L + L @ dv


def check_LvL(
    v: VectorFieldSpec, g: MetricSpec, gbar: MetricSpec, A: ActionMatrix, p: Sequence[float]
) -> Tuple[float, float]:
    """Relative defects of L_vL = −bL² + (d−a)L + c·Id and of the symmetry of (L_vg)L."""
    L, dL = benenti_jet(g, gbar, p)
    G, dG, _ = metric_jet(g, p)
    vals, dv, _ = vector_jet(v, g, p)
    lvl = lie_derivative_tensor11(L, dL, vals, dv)
    n = g.dim
    terms = [-A.b * L @ L, (A.d - A.a) * L, A.c * np.eye(n)]
    predicted = sum(terms)
    scale = 1.0 + max(float(np.max(np.abs(t))) for t in [lvl] + terms)
    lvl_defect = float(np.max(np.abs(lvl - predicted))) / scale
    product = lie_derivative_from_jets(G, dG, vals, dv) @ L
    sym_defect = float(np.max(np.abs(product - product.T))) / (1.0 + float(np.max(np.abs(product))))
    return lvl_defect, sym_defect


def lie_derivative_from_action(
    A: ActionMatrix, g: np.ndarray, L: np.ndarray, partner: bool = False
) -> np.ndarray:
    """Predicted L_vg (or L_vḡ with ``partner``, where g is ḡ and L the Benenti tensor of the original pair)."""
    n = g.shape[0]
    if not partner:
        return -(n + 1) * A.a * g - A.b * (float(np.trace(L)) * g + g @ L)
    Linv = np.linalg.inv(L)
    return -(n + 1) * A.d * g - A.c * (float(np.trace(Linv)) * g + g @ Linv)


def affine_transform_action(A: ActionMatrix, kappa: float, t: float) -> ActionMatrix:
    """Action matrix after σ̄ ↦ κσ̄ + tσ, under which L ↦ κL + t·Id."""
    if kappa == 0.0:
        raise DegeneratePencil("κ must be nonzero")
    a = A.a - A.b * t / kappa
    b = A.b / kappa
    d_new = (kappa * A.d + t * A.b) / kappa
    c = kappa * A.c + t * A.a - t * d_new
    return ActionMatrix(a=a, b=b, c=c, d=d_new, fit_residual=A.fit_residual)


def normalise_action(A: ActionMatrix, tol: float = 1e-7) -> Tuple[str, ActionMatrix]:
    """Bring A to one of the normal forms of the action on the metrisation space.

    killing: a = b = 0. homothetic: b = 0 and v rescaled so that a = 1.
    essential: v rescaled so that b = 1, then σ̄ shifted by a multiple of σ so
    that a = 0.
    """
    scale = 1.0 + max(abs(x) for x in A.as_list())
    if abs(A.b) <= tol * scale:
        if abs(A.a) <= tol * scale:
            return "killing", A
        k = 1.0 / A.a
        return "homothetic", ActionMatrix(a=1.0, b=0.0, c=A.c * k, d=A.d * k, fit_residual=A.fit_residual)
    k = 1.0 / A.b
    scaled = ActionMatrix(a=A.a * k, b=1.0, c=A.c * k, d=A.d * k, fit_residual=A.fit_residual)
    return "essential", affine_transform_action(scaled, 1.0, scaled.a)


def multiplicities_match(first: BenentiTensor, second: BenentiTensor) -> bool:
    return sorted(first.multiplicities) == sorted(second.multiplicities)
