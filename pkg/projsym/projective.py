"""Projective connection of a metric and the point-symmetry test on its jet space.

Along a curve written as a graph over the first coordinate, the geodesic
equation becomes y''^k = F^k(x, y, y') with F^k = -Q^k + y'^k Q^0, where
Q^a = Γ^a_bc u^b u^c and u = (1, y'). A vector field is projective exactly
when its second prolongation annihilates y''^k - F^k on that equation.
"""
import logging
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .errors import DimensionError, IllConditionedInterpolation, LeftDomain
from .expr import evaluate_env
from .geometry import (
    DEFAULT_GUARD_THRESHOLD,
    christoffel,
    christoffel_derivative,
    is_admissible,
    sample_points,
    vector_jet,
)
from .integrate import Trajectory, integrate, quintic_hermite, stencil_derivatives
from .models import JetPoint, MetricSpec, ProjConnCoeffs, VectorFieldSpec

logger = logging.getLogger(__name__)

SLOPE_GRID = (-1.9, -1.1, -0.4, 0.4, 1.1, 1.9)
FIT_DEGREE = 5
CONDITION_LIMIT = 1e8
THIRD_DERIVATIVE_STEP = 1e-3

VectorJet = Tuple[np.ndarray, np.ndarray, np.ndarray]


def _unit_slopes(slopes: Sequence[float]) -> np.ndarray:
    return np.concatenate(([1.0], np.asarray(slopes, dtype=float)))


def build_connection(m: MetricSpec, p: Sequence[float], threshold: float = DEFAULT_GUARD_THRESHOLD) -> ProjConnCoeffs:
    gamma = christoffel(m, p, threshold)
    r = m.dim - 1
    eye = np.eye(r)
    f_11 = [-gamma[1 + k, 0, 0] for k in range(r)]
    f_1i = [[-(2 * gamma[1 + k, 0, 1 + i] - eye[k, i] * gamma[0, 0, 0]) for i in range(r)] for k in range(r)]
    f_ij = [
        [
            [
                -(gamma[1 + k, 1 + i, 1 + j] - eye[k, i] * gamma[0, 0, 1 + j] - eye[k, j] * gamma[0, 0, 1 + i])
                for j in range(r)
            ]
            for i in range(r)
        ]
        for k in range(r)
    ]
    f0_ij = [[gamma[0, 1 + i, 1 + j] for j in range(r)] for i in range(r)]
    return ProjConnCoeffs(dim=m.dim, f_11=f_11, f_1i=f_1i, f_ij=f_ij, f0_ij=f0_ij)


def evaluate_connection(c: ProjConnCoeffs, slopes: Sequence[float]) -> np.ndarray:
    s = np.asarray(slopes, dtype=float)
    f_11 = np.asarray(c.f_11)
    f_1i = np.asarray(c.f_1i)
    f_ij = np.asarray(c.f_ij)
    f0 = np.asarray(c.f0_ij)
    cubic = float(s @ f0 @ s)
    return f_11 + f_1i @ s + np.einsum("kij,i,j->k", f_ij, s, s) + s * cubic


def _acceleration(gamma: np.ndarray, u: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    q = np.einsum("abc,b,c->a", gamma, u, u)
    return -q[1:] + u[1:] * q[0], q


def _connection_jet(gamma: np.ndarray, dgamma: np.ndarray, slopes: np.ndarray):
    """F, ∂F/∂y' [k,j] and ∂F/∂x [k,l] at one jet."""
    u = _unit_slopes(slopes)
    s = u[1:]
    F, q = _acceleration(gamma, u)
    dq = 2.0 * np.einsum("abc,c->ab", gamma, u)[:, 1:]
    dF_ds = -dq[1:, :] + np.eye(len(s)) * q[0] + np.outer(s, dq[0, :])
    dqx = np.einsum("labc,b,c->la", dgamma, u, u)
    dF_dx = -dqx[:, 1:].T + np.outer(s, dqx[:, 0])
    return F, dF_ds, dF_dx


def _check_jet(m: MetricSpec, j: JetPoint) -> None:
    if len(j.base) != m.dim or len(j.slopes) != m.dim - 1:
        raise DimensionError(f"Jet over a {m.dim}-dimensional metric needs {m.dim} coordinates and {m.dim - 1} slopes")


def geodesic_rhs(m: MetricSpec, j: JetPoint, threshold: float = DEFAULT_GUARD_THRESHOLD) -> np.ndarray:
    _check_jet(m, j)
    gamma = christoffel(m, j.base, threshold)
    return _acceleration(gamma, _unit_slopes(j.slopes))[0]


def _residual_from_jets(
    gamma: np.ndarray, dgamma: np.ndarray, slopes: np.ndarray, vjet: VectorJet
) -> Tuple[np.ndarray, float]:
    vals, dv, ddv = vjet
    u = _unit_slopes(slopes)
    s = u[1:]
    F, dF_ds, dF_dx = _connection_jet(gamma, dgamma, s)
    Dv = dv @ u
    D2v = np.einsum("akl,k,l->a", ddv, u, u) + dv[:, 1:] @ F
    eta = Dv[1:] - s * Dv[0]
    pieces = [D2v[1:], s * D2v[0], 2.0 * F * Dv[0], dF_dx @ vals, dF_ds @ eta]
    residual = pieces[0] - pieces[1] - pieces[2] - pieces[3] - pieces[4]
    scale = 1.0 + max(float(np.max(np.abs(piece))) for piece in pieces)
    return residual, scale


def symmetry_residual(
    m: MetricSpec, v: VectorFieldSpec, j: JetPoint, threshold: float = DEFAULT_GUARD_THRESHOLD
) -> np.ndarray:
    _check_jet(m, j)
    gamma, dgamma = christoffel_derivative(m, j.base, threshold)
    return _residual_from_jets(gamma, dgamma, np.asarray(j.slopes, dtype=float), vector_jet(v, m, j.base))[0]


def normalised_symmetry_residual(
    m: MetricSpec, v: VectorFieldSpec, j: JetPoint, threshold: float = DEFAULT_GUARD_THRESHOLD
) -> float:
    _check_jet(m, j)
    gamma, dgamma = christoffel_derivative(m, j.base, threshold)
    residual, scale = _residual_from_jets(gamma, dgamma, np.asarray(j.slopes, dtype=float), vector_jet(v, m, j.base))
    return float(np.max(np.abs(residual))) / scale


def max_residual_for_jet_field(
    m: MetricSpec, jets: Sequence[JetPoint], vjet_at, threshold: float = DEFAULT_GUARD_THRESHOLD
) -> float:
    """Max normalised residual over jets for a field given by its jet function ``vjet_at(p)``."""
    worst = 0.0
    for j in jets:
        gamma, dgamma = christoffel_derivative(m, j.base, threshold)
        residual, scale = _residual_from_jets(gamma, dgamma, np.asarray(j.slopes, dtype=float), vjet_at(j.base))
        worst = max(worst, float(np.max(np.abs(residual))) / scale)
    return worst


def sample_jets(
    m: MetricSpec, n: int, seed_value: int = 0, slope_range: float = 2.0, threshold: float = DEFAULT_GUARD_THRESHOLD
) -> List[JetPoint]:
    points = sample_points(m, n, seed_value, threshold)
    rng = np.random.default_rng(seed_value + 1)
    slopes = rng.uniform(-slope_range, slope_range, size=(n, m.dim - 1))
    return [JetPoint(base=s.coords, slopes=[float(t) for t in row]) for s, row in zip(points, slopes)]


def _monomials(r: int, degree: int) -> List[Tuple[int, ...]]:
    if r == 1:
        return [(d,) for d in range(degree + 1)]
    return [(d - i, i) for d in range(degree + 1) for i in range(d + 1)]


def _reported(r: int) -> List[Tuple[int, Tuple[int, ...]]]:
    """(component, exponent) pairs of the coefficients that can be nonzero."""
    if r == 1:
        return [(0, (d,)) for d in range(4)]
    out = []
    for k in range(2):
        for mono in _monomials(2, 3):
            # y'^k times a quadratic form: no pure cubic in the other slope
            if sum(mono) == 3 and mono[k] == 0:
                continue
            out.append((k, mono))
    return out


def slope_grid(r: int) -> np.ndarray:
    if r == 1:
        return np.array([[s] for s in SLOPE_GRID])
    return np.array([[a, b] for a in SLOPE_GRID for b in SLOPE_GRID])


def vandermonde(grid: np.ndarray, monomials: Sequence[Tuple[int, ...]]) -> np.ndarray:
    return np.array([[float(np.prod(point ** np.asarray(mono))) for mono in monomials] for point in grid])


def fit_symmetry_polynomial(
    m: MetricSpec,
    v: VectorFieldSpec,
    p: Sequence[float],
    condition_limit: float = CONDITION_LIMIT,
    threshold: float = DEFAULT_GUARD_THRESHOLD,
    vjet: Optional[VectorJet] = None,
) -> Tuple[np.ndarray, float]:
    """Fit the slope polynomials of the residual at base p.

    Returns the normalised reported coefficients (18 in dimension 3, 4 in
    dimension 2) and the largest normalised coefficient of the monomials
    that vanish structurally.
    """
    r = m.dim - 1
    grid = slope_grid(r)
    monomials = _monomials(r, FIT_DEGREE)
    V = vandermonde(grid, monomials)
    condition = float(np.linalg.cond(V))
    if condition > condition_limit:
        raise IllConditionedInterpolation(condition)
    gamma, dgamma = christoffel_derivative(m, p, threshold)
    jet = vjet if vjet is not None else vector_jet(v, m, p)
    values = np.empty((len(grid), r))
    scale = 1.0
    for row, slopes in enumerate(grid):
        residual, piece_scale = _residual_from_jets(gamma, dgamma, slopes, jet)
        values[row] = residual
        scale = max(scale, piece_scale)
    coeffs = np.linalg.lstsq(V, values, rcond=None)[0] / scale
    index = {mono: i for i, mono in enumerate(monomials)}
    reported = [coeffs[index[mono], k] for k, mono in _reported(r)]
    kept = {(k, mono) for k, mono in _reported(r)}
    structural = [abs(coeffs[i, k]) for k in range(r) for i, mono in enumerate(monomials) if (k, mono) not in kept]
    return np.array(reported), max(structural) if structural else 0.0


def symmetry_coefficients(
    m: MetricSpec,
    v: VectorFieldSpec,
    p: Sequence[float],
    condition_limit: float = CONDITION_LIMIT,
    threshold: float = DEFAULT_GUARD_THRESHOLD,
) -> np.ndarray:
    coeffs, structural = fit_symmetry_polynomial(m, v, p, condition_limit, threshold)
    if structural > 1e-9:
        logger.debug("structurally vanishing coefficients reach %.3e at %s", structural, list(p))
    return coeffs


def _vector_hessian_derivative(v: VectorFieldSpec, m: MetricSpec, p: Sequence[float], h: float) -> np.ndarray:
    """T[i,k,l,q] = ∂_q ∂_k ∂_l v^i by a fourth-order central stencil over AD Hessians."""
    n = m.dim
    point = np.asarray(p, dtype=float)
    third = np.empty((n, n, n, n))
    for q in range(n):
        e = np.zeros(n)
        e[q] = h
        hess = [vector_jet(v, m, point + c * e)[2] for c in (2, 1, -1, -2)]
        third[:, :, :, q] = (-hess[0] + 8 * hess[1] - 8 * hess[2] + hess[3]) / (12 * h)
    return 0.5 * (third + third.transpose(0, 1, 3, 2))


def lie_bracket(
    u: VectorFieldSpec, v: VectorFieldSpec, m: MetricSpec, p: Sequence[float], h: float = THIRD_DERIVATIVE_STEP
) -> VectorJet:
    """[u, v] at p with its first and second derivatives."""
    uv, du, ddu = vector_jet(u, m, p)
    vv, dv, ddv = vector_jet(v, m, p)
    dddu = _vector_hessian_derivative(u, m, p, h)
    dddv = _vector_hessian_derivative(v, m, p, h)
    value = dv @ uv - du @ vv
    first = (
        np.einsum("ikl,k->il", ddv, uv)
        + dv @ du
        - np.einsum("ikl,k->il", ddu, vv)
        - du @ dv
    )
    second = (
        np.einsum("kab,ik->iab", ddu, dv)
        + np.einsum("ka,ikb->iab", du, ddv)
        + np.einsum("kb,ika->iab", du, ddv)
        + np.einsum("k,ikab->iab", uv, dddv)
        - np.einsum("kab,ik->iab", ddv, du)
        - np.einsum("ka,ikb->iab", dv, ddu)
        - np.einsum("kb,ika->iab", dv, ddu)
        - np.einsum("k,ikab->iab", vv, dddu)
    )
    return value, first, 0.5 * (second + second.transpose(0, 2, 1))


def bracket_residual(
    m: MetricSpec, u: VectorFieldSpec, v: VectorFieldSpec, jets: Sequence[JetPoint],
    threshold: float = DEFAULT_GUARD_THRESHOLD,
) -> float:
    return max_residual_for_jet_field(m, jets, lambda p: lie_bracket(u, v, m, p), threshold)


def block_structure_defect(kind: str, v: VectorFieldSpec, m: MetricSpec, p: Sequence[float]) -> float:
    """Largest derivative that the Levi-Civita block form forces to vanish.

    ``kind`` is "111" (v^i depends on x^i only) or "21" (v^1, v^2 free of z
    and v^3 a function of z alone).
    """
    _, dv, _ = vector_jet(v, m, p)
    n = m.dim
    if kind == "111":
        mask = ~np.eye(n, dtype=bool)
    elif kind == "21":
        if n != 3:
            raise DimensionError("[2-1] block structure needs a 3-dimensional metric")
        mask = np.zeros((3, 3), dtype=bool)
        mask[0, 2] = mask[1, 2] = mask[2, 0] = mask[2, 1] = True
    else:
        raise ValueError(f"Unknown block kind '{kind}'")
    return float(np.max(np.abs(dv[mask])))


def _inside_box(m: MetricSpec, threshold: float):
    lo = np.array([b[0] for b in m.domain], dtype=float)
    hi = np.array([b[1] for b in m.domain], dtype=float)

    def inside(point: np.ndarray) -> bool:
        return bool(np.all(point >= lo) and np.all(point <= hi)) and is_admissible(m, point, threshold)

    return inside


def integrate_geodesic(
    m: MetricSpec,
    j0: JetPoint,
    xspan: Tuple[float, float],
    tol: float = 1e-10,
    threshold: float = DEFAULT_GUARD_THRESHOLD,
) -> Trajectory:
    """Integrate the connection as a graph over the first coordinate.

    The state is (y, y'), the time variable is x. Integration runs from the
    base point to both ends of ``xspan`` and the two halves are merged in
    increasing x. ``truncated`` is set when the curve leaves the domain box.
    """
    _check_jet(m, j0)
    r = m.dim - 1
    x0 = float(j0.base[0])
    inside_box = _inside_box(m, threshold)

    def rhs(x: float, state: np.ndarray) -> np.ndarray:
        point = np.concatenate(([x], state[:r]))
        F = _acceleration(christoffel(m, point, threshold), _unit_slopes(state[r:]))[0]
        return np.concatenate((state[r:], F))

    def inside(x: float, state: np.ndarray) -> bool:
        return inside_box(np.concatenate(([x], state[:r])))

    state0 = np.concatenate((np.asarray(j0.base[1:], dtype=float), np.asarray(j0.slopes, dtype=float)))
    lo, hi = sorted((float(xspan[0]), float(xspan[1])))
    forward = integrate(rhs, x0, state0, max(hi, x0), tol, inside=inside)
    backward = integrate(rhs, x0, state0, min(lo, x0), tol, inside=inside)
    ts = list(backward.ts[::-1]) + list(forward.ts[1:])
    ys = list(backward.ys[::-1]) + list(forward.ys[1:])
    fs = list(backward.fs[::-1]) + list(forward.fs[1:])
    truncated = forward.truncated or backward.truncated
    if truncated:
        logger.debug("geodesic from %s left the domain", list(j0.base))
    return Trajectory(ts, ys, fs, truncated=truncated)


def trajectory_positions(traj: Trajectory, xs: Sequence[float]) -> np.ndarray:
    """Positions (x, y) along a graph-over-x trajectory, quintic in each step."""
    r = traj.ys.shape[1] // 2
    out = []
    for x in xs:
        i = traj.segment(x)
        h = traj.ts[i + 1] - traj.ts[i]
        s = (x - traj.ts[i]) / h
        y, _, _ = quintic_hermite(
            h, s,
            traj.ys[i, :r], traj.ys[i + 1, :r],
            traj.ys[i, r:], traj.ys[i + 1, r:],
            traj.fs[i, r:], traj.fs[i + 1, r:],
        )
        out.append(np.concatenate(([x], y)))
    return np.array(out)


def dense_output_defect(
    m: MetricSpec, traj: Trajectory, threshold: float = DEFAULT_GUARD_THRESHOLD
) -> float:
    """max |y'' - F| at step midpoints, y'' taken from the quintic interpolant."""
    r = traj.ys.shape[1] // 2
    worst = 0.0
    for i in range(len(traj) - 1):
        h = traj.ts[i + 1] - traj.ts[i]
        y, dy, ddy = quintic_hermite(
            h, 0.5,
            traj.ys[i, :r], traj.ys[i + 1, :r],
            traj.ys[i, r:], traj.ys[i + 1, r:],
            traj.fs[i, r:], traj.fs[i + 1, r:],
        )
        point = np.concatenate(([traj.ts[i] + 0.5 * h], y))
        F = _acceleration(christoffel(m, point, threshold), _unit_slopes(dy))[0]
        worst = max(worst, float(np.max(np.abs(ddy - F))))
    return worst


def flow(
    m: MetricSpec, v: VectorFieldSpec, p: Sequence[float], t: float, tol: float = 1e-10,
    threshold: float = DEFAULT_GUARD_THRESHOLD,
) -> np.ndarray:
    exprs = v.exprs()
    inside_box = _inside_box(m, threshold)

    def rhs(_: float, point: np.ndarray) -> np.ndarray:
        env = dict(m.params)
        env.update(zip(m.coords, (float(c) for c in point)))
        return np.array([float(evaluate_env(e, env)) for e in exprs])

    traj = integrate(rhs, 0.0, np.asarray(p, dtype=float), t, tol, inside=lambda _, y: inside_box(y), raise_on_exit=True)
    return traj.ys[-1]


def collinearity_defect(accel: np.ndarray, velocity: np.ndarray, eps: float = 1e-12) -> float:
    """|a ∧ b| / (|a||b| + eps), the sine of the angle between a and b once |a||b| >> eps."""
    na = float(np.linalg.norm(accel))
    nb = float(np.linalg.norm(velocity))
    wedge = max(na * na * nb * nb - float(np.dot(accel, velocity)) ** 2, 0.0) ** 0.5
    return wedge / (na * nb + eps)


def geodesic_transport_defect(
    m: MetricSpec,
    v: VectorFieldSpec,
    j0: JetPoint,
    t: float,
    length: float = 0.4,
    n_points: int = 21,
    tol: float = 1e-10,
    threshold: float = DEFAULT_GUARD_THRESHOLD,
    accel_floor: float = 1.0,
) -> float:
    """Flow a geodesic segment along v for time t and test the image for geodesicity.

    The image is differentiated along the parameter it inherits from the
    original uniform x grid; the acceleration is corrected by Γ at each image
    point and compared with the velocity for collinearity. The regulariser is
    eps = accel_floor·|γ̇|³, so covariant accelerations far below
    accel_floor·|γ̇|² (stencil noise on an affinely parametrised image) do not
    count as turning.
    """
    x0 = float(j0.base[0])
    xs = np.linspace(x0 - 0.5 * length, x0 + 0.5 * length, n_points)
    traj = integrate_geodesic(m, j0, (xs[0], xs[-1]), tol, threshold)
    if traj.truncated:
        raise LeftDomain("Geodesic segment leaves the domain before the transport window ends")
    curve = trajectory_positions(traj, xs)
    image = np.array([flow(m, v, point, t, tol, threshold) for point in curve])
    step = xs[1] - xs[0]
    velocity, accel = stencil_derivatives(image, step)
    worst = 0.0
    for point, vel, acc in zip(image[2:-2], velocity, accel):
        gamma = christoffel(m, point, threshold)
        covariant = acc + np.einsum("abc,b,c->a", gamma, vel, vel)
        eps = accel_floor * float(np.linalg.norm(vel)) ** 3
        worst = max(worst, collinearity_defect(covariant, vel, eps))
    logger.debug("transport defect %.3e for %s", worst, v)
    return worst
