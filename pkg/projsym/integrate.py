import logging
from typing import Callable, List, Optional, Tuple

import numpy as np

from .errors import DomainError, LeftDomain, SingularMetric, StepFailure

logger = logging.getLogger(__name__)

Rhs = Callable[[float, np.ndarray], np.ndarray]

# Dormand-Prince 5(4)
C = np.array([0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0])
A = [
    [],
    [1 / 5],
    [3 / 40, 9 / 40],
    [44 / 45, -56 / 15, 32 / 9],
    [19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729],
    [9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656],
    [35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84],
]
B = np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0.0])
# b5 - b4, local truncation error weights
E = np.array([71 / 57600, 0.0, -71 / 16695, 71 / 1920, -17253 / 339200, 22 / 525, -1 / 40])

SAFETY = 0.9
MIN_FACTOR = 0.1
MAX_FACTOR = 4.0


class Trajectory:
    def __init__(self, ts: List[float], ys: List[np.ndarray], fs: List[np.ndarray], truncated: bool = False):
        self.ts = np.asarray(ts, dtype=float)
        self.ys = np.asarray(ys, dtype=float)
        self.fs = np.asarray(fs, dtype=float)
        self.truncated = truncated

    def __len__(self) -> int:
        return len(self.ts)

    def segment(self, t: float) -> int:
        ts = self.ts
        if ts[-1] >= ts[0]:
            idx = int(np.searchsorted(ts, t, side="right")) - 1
        else:
            idx = int(np.searchsorted(-ts, -t, side="right")) - 1
        return min(max(idx, 0), len(ts) - 2)

    def at(self, t: float) -> np.ndarray:
        """Cubic Hermite interpolation between accepted steps."""
        if len(self.ts) == 1:
            return self.ys[0].copy()
        i = self.segment(t)
        t0, t1 = self.ts[i], self.ts[i + 1]
        h = t1 - t0
        s = (t - t0) / h
        h00 = 2 * s ** 3 - 3 * s ** 2 + 1
        h10 = s ** 3 - 2 * s ** 2 + s
        h01 = -2 * s ** 3 + 3 * s ** 2
        h11 = s ** 3 - s ** 2
        return h00 * self.ys[i] + h10 * h * self.fs[i] + h01 * self.ys[i + 1] + h11 * h * self.fs[i + 1]


def _error_norm(err: np.ndarray, y_old: np.ndarray, y_new: np.ndarray, tol: float) -> float:
    scale = tol + tol * np.maximum(np.abs(y_old), np.abs(y_new))
    return float(np.max(np.abs(err) / scale))


def dopri_step(rhs: Rhs, t: float, y: np.ndarray, f0: np.ndarray, h: float) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    k = [f0]
    for stage in range(1, 7):
        yi = y + h * sum(a * ki for a, ki in zip(A[stage], k))
        k.append(np.asarray(rhs(t + C[stage] * h, yi), dtype=float))
    y_new = y + h * sum(b * ki for b, ki in zip(B, k))
    err = h * sum(e * ki for e, ki in zip(E, k))
    return y_new, err, k[6]


def integrate(
    rhs: Rhs,
    t0: float,
    y0,
    t1: float,
    tol: float,
    h0: Optional[float] = None,
    h_min: float = 1e-12,
    max_steps: int = 200000,
    inside: Optional[Callable[[float, np.ndarray], bool]] = None,
    raise_on_exit: bool = False,
) -> Trajectory:
    """Adaptive Dormand-Prince 5(4) from t0 to t1 (either direction)."""
    y = np.asarray(y0, dtype=float).copy()
    t = float(t0)
    direction = 1.0 if t1 >= t0 else -1.0
    span = abs(t1 - t0)
    ts, ys = [t], [y.copy()]
    if span == 0.0:
        return Trajectory(ts, ys, [np.asarray(rhs(t, y), dtype=float)])
    f = np.asarray(rhs(t, y), dtype=float)
    fs = [f]
    h = abs(h0) if h0 else min(span, 0.01 * span + 1e-3)
    rejected = 0
    for _ in range(max_steps):
        remaining = abs(t1 - t)
        if remaining <= 1e-14 * max(1.0, abs(t1)):
            return Trajectory(ts, ys, fs)
        h = min(h, remaining)
        try:
            y_new, err, f_new = dopri_step(rhs, t, y, f, direction * h)
            norm = _error_norm(err, y, y_new, tol)
        except (DomainError, SingularMetric):
            norm = float("inf")
        if not np.isfinite(norm):
            norm = float("inf")
        if norm <= 1.0:
            t_new = t + direction * h
            if inside is not None and not inside(t_new, y_new):
                if raise_on_exit:
                    raise LeftDomain(f"Solution left the domain near t={t_new:.6g}", {"t": t_new})
                logger.debug("integration truncated at t=%.6g", t)
                return Trajectory(ts, ys, fs, truncated=True)
            t, y, f = t_new, y_new, f_new
            ts.append(t)
            ys.append(y.copy())
            fs.append(f.copy())
            factor = MAX_FACTOR if norm == 0.0 else min(MAX_FACTOR, SAFETY * norm ** -0.2)
            h = h * max(1.0, factor)
        else:
            rejected += 1
            factor = MIN_FACTOR if not np.isfinite(norm) else max(MIN_FACTOR, SAFETY * norm ** -0.2)
            h = h * factor
            if h < h_min:
                logger.warning("step size underflow at t=%.6g after %d rejections", t, rejected)
                raise StepFailure(f"Step size fell below {h_min:g} at t={t:.6g}", {"t": t, "rejected": rejected})
    raise StepFailure(f"Exceeded {max_steps} steps before reaching t={t1}", {"t": t})


def quintic_hermite(
    h: float,
    s: float,
    y0: np.ndarray,
    y1: np.ndarray,
    d0: np.ndarray,
    d1: np.ndarray,
    dd0: np.ndarray,
    dd1: np.ndarray,
) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Value, first and second derivative of the quintic matching y, y', y'' at both ends.

    ``s`` is the fraction of the step ``h`` already travelled.
    """
    s2, s3, s4, s5 = s * s, s ** 3, s ** 4, s ** 5
    basis = (
        1 - 10 * s3 + 15 * s4 - 6 * s5,
        s - 6 * s3 + 8 * s4 - 3 * s5,
        0.5 * s2 - 1.5 * s3 + 1.5 * s4 - 0.5 * s5,
        0.5 * s3 - s4 + 0.5 * s5,
        -4 * s3 + 7 * s4 - 3 * s5,
        10 * s3 - 15 * s4 + 6 * s5,
    )
    first = (
        -30 * s2 + 60 * s3 - 30 * s4,
        1 - 18 * s2 + 32 * s3 - 15 * s4,
        s - 4.5 * s2 + 6 * s3 - 2.5 * s4,
        1.5 * s2 - 4 * s3 + 2.5 * s4,
        -12 * s2 + 28 * s3 - 15 * s4,
        30 * s2 - 60 * s3 + 30 * s4,
    )
    second = (
        -60 * s + 180 * s2 - 120 * s3,
        -36 * s + 96 * s2 - 60 * s3,
        1 - 9 * s + 18 * s2 - 10 * s3,
        3 * s - 12 * s2 + 10 * s3,
        -24 * s + 84 * s2 - 60 * s3,
        60 * s - 180 * s2 + 120 * s3,
    )
    terms = (y0, h * d0, h * h * dd0, h * h * dd1, h * d1, y1)
    value = sum(b * t for b, t in zip(basis, terms))
    deriv = sum(b * t for b, t in zip(first, terms)) / h
    accel = sum(b * t for b, t in zip(second, terms)) / (h * h)
    return value, deriv, accel


def stencil_derivatives(points: np.ndarray, h: float) -> Tuple[np.ndarray, np.ndarray]:
    """Five-point central first and second derivatives at interior samples of a uniform grid."""
    p = np.asarray(points, dtype=float)
    if p.shape[0] < 5:
        raise DomainError(f"A five-point stencil needs at least 5 samples, got {p.shape[0]}")
    first = (-p[4:] + 8 * p[3:-1] - 8 * p[1:-3] + p[:-4]) / (12 * h)
    second = (-p[4:] + 16 * p[3:-1] - 30 * p[2:-2] + 16 * p[1:-3] - p[:-4]) / (12 * h * h)
    return first, second
