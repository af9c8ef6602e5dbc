import logging
import math
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from .autodiff import lift, seed
from .errors import DomainError, InsufficientSamples, SingularMetric
from .expr import ScalarExpr, evaluate_env, parse, substitute
from .models import HomothetyClass, MetricSpec, PointSample, VectorFieldSpec

logger = logging.getLogger(__name__)

DEFAULT_GUARD_THRESHOLD = 1e-3
_HALTON_PRIMES = (2, 3, 5)


def point_env(m: MetricSpec, values: Sequence) -> Dict[str, object]:
    env: Dict[str, object] = dict(m.params)
    env.update(zip(m.coords, values))
    return env


def metric_values(m: MetricSpec, p: Sequence[float]) -> np.ndarray:
    env = point_env(m, [float(c) for c in p])
    g = np.empty((m.dim, m.dim))
    for i in range(m.dim):
        for j in range(i, m.dim):
            g[i, j] = g[j, i] = float(evaluate_env(m.component(i, j), env))
    return g


def metric_jet(m: MetricSpec, p: Sequence[float]) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Return g[i,j], dg[k,i,j] = ∂_k g_ij and ddg[k,l,i,j] = ∂_k∂_l g_ij at p."""
    n = m.dim
    env = point_env(m, seed(p))
    g = np.empty((n, n))
    dg = np.empty((n, n, n))
    ddg = np.empty((n, n, n, n))
    for i in range(n):
        for j in range(i, n):
            value = lift(evaluate_env(m.component(i, j), env), n)
            g[i, j] = g[j, i] = value.value
            dg[:, i, j] = dg[:, j, i] = value.grad
            ddg[:, :, i, j] = ddg[:, :, j, i] = value.hess
    return g, dg, ddg


def scalar_jet(e: Union[ScalarExpr, str], m: MetricSpec, p: Sequence[float]) -> Tuple[float, np.ndarray, np.ndarray]:
    expr = parse(e) if isinstance(e, str) else e
    value = lift(evaluate_env(expr, point_env(m, seed(p))), m.dim)
    return value.value, value.grad, value.hess


def vector_jet(v: VectorFieldSpec, m: MetricSpec, p: Sequence[float]) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Return v[i], dv[i,k] = ∂_k v^i and ddv[i,k,l] = ∂_k∂_l v^i at p."""
    n = m.dim
    env = point_env(m, seed(p))
    vals = np.empty(n)
    dv = np.empty((n, n))
    ddv = np.empty((n, n, n))
    for i, expr in enumerate(v.exprs()):
        value = lift(evaluate_env(expr, env), n)
        vals[i] = value.value
        dv[i] = value.grad
        ddv[i] = value.hess
    return vals, dv, ddv


def inverse_metric(g: np.ndarray, threshold: float = 0.0) -> np.ndarray:
    det = float(np.linalg.det(g))
    if not math.isfinite(det) or abs(det) <= threshold or det == 0.0:
        raise SingularMetric(f"Metric determinant {det:.3e} is below the guard threshold", {"det": det})
    return np.linalg.inv(g)


def _connection_from_jet(g: np.ndarray, dg: np.ndarray, ddg: Optional[np.ndarray], threshold: float):
    ginv = inverse_metric(g, threshold)
    # first kind: C[h,i,j] = ½(∂_i g_hj + ∂_j g_hi − ∂_h g_ij)
    first = 0.5 * (np.einsum("ihj->hij", dg) + np.einsum("jhi->hij", dg) - dg)
    gamma = np.einsum("kh,hij->kij", ginv, first)
    gamma = 0.5 * (gamma + gamma.transpose(0, 2, 1))
    if ddg is None:
        return ginv, gamma, None
    dfirst = 0.5 * (np.einsum("lihj->lhij", ddg) + np.einsum("ljhi->lhij", ddg) - ddg)
    dginv = -np.einsum("ka,lab,bh->lkh", ginv, dg, ginv)
    dgamma = np.einsum("lkh,hij->lkij", dginv, first) + np.einsum("kh,lhij->lkij", ginv, dfirst)
    dgamma = 0.5 * (dgamma + dgamma.transpose(0, 1, 3, 2))
    return ginv, gamma, dgamma


def christoffel(m: MetricSpec, p: Sequence[float], threshold: float = DEFAULT_GUARD_THRESHOLD) -> np.ndarray:
    g, dg, _ = metric_jet(m, p)
    return _connection_from_jet(g, dg, None, threshold)[1]


def christoffel_derivative(
    m: MetricSpec, p: Sequence[float], threshold: float = DEFAULT_GUARD_THRESHOLD
) -> Tuple[np.ndarray, np.ndarray]:
    """Return Γ[k,i,j] and dΓ[l,k,i,j] = ∂_l Γ^k_ij."""
    g, dg, ddg = metric_jet(m, p)
    _, gamma, dgamma = _connection_from_jet(g, dg, ddg, threshold)
    return gamma, dgamma


def riemann_from_connection(gamma: np.ndarray, dgamma: np.ndarray) -> np.ndarray:
    """R[a,b,c,d] = R^a_bcd with R(∂_c, ∂_d)∂_b = R^a_bcd ∂_a."""
    return (
        np.einsum("cadb->abcd", dgamma)
        - np.einsum("dacb->abcd", dgamma)
        + np.einsum("ace,edb->abcd", gamma, gamma)
        - np.einsum("ade,ecb->abcd", gamma, gamma)
    )


def riemann_scalar_sectional(
    m: MetricSpec, p: Sequence[float], threshold: float = DEFAULT_GUARD_THRESHOLD
) -> Tuple[np.ndarray, float, Dict[Tuple[int, int], float]]:
    g, dg, ddg = metric_jet(m, p)
    ginv, gamma, dgamma = _connection_from_jet(g, dg, ddg, threshold)
    riemann = riemann_from_connection(gamma, dgamma)
    ricci = np.einsum("abad->bd", riemann)
    scalar = float(np.einsum("bd,bd->", ginv, ricci))
    lowered = np.einsum("ae,ebcd->abcd", g, riemann)
    sectional: Dict[Tuple[int, int], float] = {}
    for i in range(m.dim):
        for j in range(i + 1, m.dim):
            area = g[i, i] * g[j, j] - g[i, j] ** 2
            sectional[(i, j)] = float(lowered[i, j, i, j] / area)
    return riemann, scalar, sectional


def scalar_curvature(m: MetricSpec, p: Sequence[float]) -> float:
    return riemann_scalar_sectional(m, p)[1]


def bianchi_defect(m: MetricSpec, p: Sequence[float]) -> float:
    riemann = riemann_scalar_sectional(m, p)[0]
    cyclic = riemann + np.einsum("acdb->abcd", riemann) + np.einsum("adbc->abcd", riemann)
    return float(np.max(np.abs(cyclic)))


def lie_derivative_from_jets(g: np.ndarray, dg: np.ndarray, v: np.ndarray, dv: np.ndarray) -> np.ndarray:
    lie = np.einsum("k,kij->ij", v, dg) + dv.T @ g + g @ dv
    return 0.5 * (lie + lie.T)


def lie_derivative_metric(m: MetricSpec, v: VectorFieldSpec, p: Sequence[float]) -> np.ndarray:
    g, dg, _ = metric_jet(m, p)
    vals, dv, _ = vector_jet(v, m, p)
    return lie_derivative_from_jets(g, dg, vals, dv)


def residual_scale(g: np.ndarray) -> float:
    return 1.0 + float(np.max(np.abs(g)))


def classify_homothety(
    m: MetricSpec,
    v: VectorFieldSpec,
    samples: Sequence[PointSample],
    tol: float,
    min_samples: int = 10,
) -> HomothetyClass:
    points = [s.coords for s in samples if s.admissible]
    if len(points) < min_samples:
        raise InsufficientSamples(f"Need at least {min_samples} admissible samples, got {len(points)}")
    metrics = []
    lies = []
    for p in points:
        g, dg, _ = metric_jet(m, p)
        vals, dv, _ = vector_jet(v, m, p)
        metrics.append(g)
        lies.append(lie_derivative_from_jets(g, dg, vals, dv))
    killing = max(float(np.max(np.abs(lie))) / residual_scale(g) for g, lie in zip(metrics, lies))
    if killing <= tol:
        return HomothetyClass(kind="killing", lam=0.0, max_residual=killing)
    lam = sum(float(np.sum(lie * g)) for g, lie in zip(metrics, lies)) / sum(float(np.sum(g * g)) for g in metrics)
    defect = max(float(np.max(np.abs(lie - lam * g))) / residual_scale(g) for g, lie in zip(metrics, lies))
    logger.debug("homothety fit lambda=%.6g defect=%.3e", lam, defect)
    if defect <= tol:
        return HomothetyClass(kind="homothetic", lam=lam, max_residual=defect)
    return HomothetyClass(kind="not_homothetic", lam=None, max_residual=defect)


def warped_product(h: MetricSpec, zeta: str, z_name: str = "z", z_domain: Tuple[float, float] = (0.5, 2.0),
                   extra_guards: Sequence[str] = ()) -> MetricSpec:
    """Build g = ζ(z)(h + dz²) from a 2-dimensional h."""
    wrapped = f"({zeta})"
    g = [
        [f"{wrapped}*({h.g[0][0]})", f"{wrapped}*({h.g[0][1]})", "0"],
        [f"{wrapped}*({h.g[1][1]})", "0"],
        [wrapped],
    ]
    return MetricSpec(
        name=f"warped({h.name or 'h'})",
        dim=3,
        coords=list(h.coords) + [z_name],
        g=g,
        params=dict(h.params),
        domain=list(h.domain) + [z_domain],
        guards=list(h.guards) + [zeta] + list(extra_guards),
    )


def check_Rg_decomposition(h: MetricSpec, zeta: str, p: Sequence[float], z_name: str = "z") -> float:
    g = warped_product(h, zeta, z_name)
    r_g = scalar_curvature(g, p)
    r_h = scalar_curvature(h, p[:2])
    env = dict(h.params)
    env[z_name] = seed([p[2]])[0]
    value = lift(evaluate_env(parse(zeta), env), 1)
    z0, z1, z2 = value.value, float(value.grad[0]), float(value.hess[0, 0])
    if z0 == 0.0:
        raise SingularMetric("ζ vanishes at the sample point")
    predicted = r_h / z0 + (3 * z1 * z1 - 4 * z0 * z2) / (2 * z0 ** 3)
    return abs(r_g - predicted)


def normalise_curvature(zeta: str, kappa: float, z_name: str = "z") -> str:
    """ζ̃(z̃) = ζ(z̃/√|κ|)/|κ|, bringing a curvature-κ factor h to curvature ±1."""
    if kappa == 0:
        raise DomainError("Curvature normalisation needs κ ≠ 0")
    root = math.sqrt(abs(kappa))
    scaled = substitute(parse(zeta), {z_name: f"{z_name}/{root!r}"})
    return f"({scaled.source})/{abs(kappa)!r}"


def signature(m: MetricSpec, p: Sequence[float]) -> Tuple[int, int]:
    eig = np.linalg.eigvalsh(metric_values(m, p))
    return int(np.sum(eig > 0)), int(np.sum(eig < 0))


def _radical_inverse(index: int, base: int) -> float:
    result, f = 0.0, 1.0 / base
    while index > 0:
        result += f * (index % base)
        index //= base
        f /= base
    return result


def is_admissible(m: MetricSpec, p: Sequence[float], threshold: float = DEFAULT_GUARD_THRESHOLD) -> bool:
    env = point_env(m, [float(c) for c in p])
    try:
        for guard in m.guard_exprs():
            if abs(float(evaluate_env(guard, env))) <= threshold:
                return False
        g = metric_values(m, p)
    except DomainError:
        return False
    det = float(np.linalg.det(g))
    return math.isfinite(det) and abs(det) > threshold


def sample_points(
    m: MetricSpec,
    n: int,
    seed_value: int = 0,
    threshold: float = DEFAULT_GUARD_THRESHOLD,
    max_tries: Optional[int] = None,
) -> List[PointSample]:
    """Shifted Halton points in the domain box, rejected against guards and det g."""
    rng = np.random.default_rng(seed_value)
    shift = rng.random(m.dim)
    lo = np.array([b[0] for b in m.domain], dtype=float)
    hi = np.array([b[1] for b in m.domain], dtype=float)
    budget = max_tries if max_tries is not None else 50 * n + 100
    samples: List[PointSample] = []
    rejected = 0
    index = 1
    while len(samples) < n and index <= budget:
        u = np.array([(_radical_inverse(index, _HALTON_PRIMES[k]) + shift[k]) % 1.0 for k in range(m.dim)])
        index += 1
        p = lo + u * (hi - lo)
        if is_admissible(m, p, threshold):
            samples.append(PointSample(coords=[float(c) for c in p], admissible=True))
        else:
            rejected += 1
    if rejected > n // 2:
        logger.warning("%s: rejected %d candidate points against guards", m.name or "metric", rejected)
    if len(samples) < n:
        raise InsufficientSamples(f"Only {len(samples)} of {n} admissible samples found for {m.name or 'metric'}")
    return samples
