import math
from typing import Any, List, Mapping, Optional, Sequence, Tuple, Union

import numpy as np

from .errors import DimensionError, DomainError
from .expr import ScalarExpr, evaluate, parse

MAX_SEED_DIM = 3


class Dual2:
    """Second-order forward-mode scalar: value, gradient and Hessian.

    Every operation builds the Hessian from symmetric pieces (scaled Hessians
    and ``outer(g, g)`` or ``outer(a, b) + outer(b, a)``), so ``hess`` stays
    exactly symmetric without explicit symmetrisation.
    """

    __slots__ = ("value", "grad", "hess")

    def __init__(self, value: float, grad: np.ndarray, hess: np.ndarray):
        self.value = float(value)
        self.grad = grad
        self.hess = hess

    @classmethod
    def constant(cls, value: float, dim: int) -> "Dual2":
        return cls(value, np.zeros(dim), np.zeros((dim, dim)))

    @property
    def dim(self) -> int:
        return self.grad.shape[0]

    def _lift(self, other: Any) -> "Dual2":
        if isinstance(other, Dual2):
            return other
        return Dual2.constant(float(other), self.dim)

    def _chain(self, f0: float, f1: float, f2: float) -> "Dual2":
        return Dual2(f0, f1 * self.grad, f1 * self.hess + f2 * np.outer(self.grad, self.grad))

    def __repr__(self) -> str:
        return f"Dual2(value={self.value!r}, grad={self.grad.tolist()!r}, hess={self.hess.tolist()!r})"

    def __neg__(self) -> "Dual2":
        return Dual2(-self.value, -self.grad, -self.hess)

    def __pos__(self) -> "Dual2":
        return self

    def __add__(self, other: Any) -> "Dual2":
        if isinstance(other, Dual2):
            return Dual2(self.value + other.value, self.grad + other.grad, self.hess + other.hess)
        return Dual2(self.value + float(other), self.grad, self.hess)

    __radd__ = __add__

    def __sub__(self, other: Any) -> "Dual2":
        if isinstance(other, Dual2):
            return Dual2(self.value - other.value, self.grad - other.grad, self.hess - other.hess)
        return Dual2(self.value - float(other), self.grad, self.hess)

    def __rsub__(self, other: Any) -> "Dual2":
        return Dual2(float(other) - self.value, -self.grad, -self.hess)

    def __mul__(self, other: Any) -> "Dual2":
        if isinstance(other, Dual2):
            cross = np.outer(self.grad, other.grad)
            return Dual2(
                self.value * other.value,
                self.value * other.grad + other.value * self.grad,
                self.value * other.hess + other.value * self.hess + (cross + cross.T),
            )
        c = float(other)
        return Dual2(self.value * c, c * self.grad, c * self.hess)

    __rmul__ = __mul__

    def reciprocal(self) -> "Dual2":
        if self.value == 0.0:
            raise DomainError("Division by zero")
        inv = 1.0 / self.value
        return self._chain(inv, -inv * inv, 2.0 * inv * inv * inv)

    def __truediv__(self, other: Any) -> "Dual2":
        if isinstance(other, Dual2):
            return self * other.reciprocal()
        c = float(other)
        if c == 0.0:
            raise DomainError("Division by zero")
        return Dual2(self.value / c, self.grad / c, self.hess / c)

    def __rtruediv__(self, other: Any) -> "Dual2":
        return self.reciprocal() * float(other)

    def __pow__(self, other: Any) -> "Dual2":
        if isinstance(other, Dual2):
            return (other * self.ln()).exp()
        return self.pow(float(other))

    def __rpow__(self, other: Any) -> "Dual2":
        base = float(other)
        if base <= 0.0:
            raise DomainError(f"Non-positive base {base} with a varying exponent")
        return (self * math.log(base)).exp()

    def pow(self, p: float) -> "Dual2":
        v = self.value
        if p == 0.0:
            return Dual2.constant(1.0, self.dim)
        if p == 1.0:
            return self
        if v == 0.0 and p < 2.0:
            raise DomainError(f"Derivative of x^{p} undefined at 0")
        if v < 0.0 and not p.is_integer():
            raise DomainError(f"Negative base {v} with non-integer exponent {p}")
        try:
            f0 = math.pow(v, p)
            f1 = p * math.pow(v, p - 1.0)
            f2 = p * (p - 1.0) * math.pow(v, p - 2.0) if p != 2.0 else 2.0
        except OverflowError as e:
            raise DomainError(f"Overflow in {v}^{p}") from e
        return self._chain(f0, f1, f2)

    def sin(self) -> "Dual2":
        s, c = math.sin(self.value), math.cos(self.value)
        return self._chain(s, c, -s)

    def cos(self) -> "Dual2":
        s, c = math.sin(self.value), math.cos(self.value)
        return self._chain(c, -s, -c)

    def tan(self) -> "Dual2":
        t = math.tan(self.value)
        sec2 = 1.0 + t * t
        return self._chain(t, sec2, 2.0 * t * sec2)

    def sinh(self) -> "Dual2":
        try:
            s, c = math.sinh(self.value), math.cosh(self.value)
        except OverflowError as e:
            raise DomainError(f"sinh overflow at {self.value}") from e
        return self._chain(s, c, s)

    def cosh(self) -> "Dual2":
        try:
            s, c = math.sinh(self.value), math.cosh(self.value)
        except OverflowError as e:
            raise DomainError(f"cosh overflow at {self.value}") from e
        return self._chain(c, s, c)

    def tanh(self) -> "Dual2":
        t = math.tanh(self.value)
        sech2 = 1.0 - t * t
        return self._chain(t, sech2, -2.0 * t * sech2)

    def exp(self) -> "Dual2":
        try:
            e = math.exp(self.value)
        except OverflowError as exc:
            raise DomainError(f"exp overflow at {self.value}") from exc
        return self._chain(e, e, e)

    def ln(self) -> "Dual2":
        if self.value <= 0.0:
            raise DomainError(f"ln of non-positive value {self.value}")
        inv = 1.0 / self.value
        return self._chain(math.log(self.value), inv, -inv * inv)

    def abs(self) -> "Dual2":
        if self.value == 0.0:
            raise DomainError("abs is not differentiable at 0")
        return self if self.value > 0.0 else -self

    __abs__ = abs

    def sqrt(self) -> "Dual2":
        if self.value <= 0.0:
            raise DomainError(f"sqrt derivative undefined at {self.value}")
        r = math.sqrt(self.value)
        return self._chain(r, 0.5 / r, -0.25 / (r * self.value))


def seed(coords: Sequence[float]) -> List[Dual2]:
    d = len(coords)
    if not 1 <= d <= MAX_SEED_DIM:
        raise DimensionError(f"Seed dimension must be between 1 and {MAX_SEED_DIM}, got {d}")
    eye = np.eye(d)
    return [Dual2(float(c), eye[i].copy(), np.zeros((d, d))) for i, c in enumerate(coords)]


def lift(value: Any, dim: int) -> Dual2:
    if isinstance(value, Dual2):
        return value
    return Dual2.constant(float(value), dim)


def partials(
    e: Union[ScalarExpr, str],
    p: Sequence[float],
    params: Optional[Mapping[str, float]] = None,
    names: Optional[Sequence[str]] = None,
) -> Tuple[float, np.ndarray, np.ndarray]:
    expr = parse(e) if isinstance(e, str) else e
    result = lift(evaluate(expr, seed(p), params, names), len(p))
    return result.value, result.grad, result.hess


def finite_difference_partials(
    e: Union[ScalarExpr, str],
    p: Sequence[float],
    params: Optional[Mapping[str, float]] = None,
    names: Optional[Sequence[str]] = None,
    step: float = 1e-5,
    hess_step: float = 1e-4,
) -> Tuple[np.ndarray, np.ndarray]:
    """Central-difference gradient and Hessian of the plain-float evaluation."""
    expr = parse(e) if isinstance(e, str) else e
    point = np.asarray(p, dtype=float)
    d = point.shape[0]

    def f(q: np.ndarray) -> float:
        return float(evaluate(expr, list(q), params, names))

    grad = np.zeros(d)
    hess = np.zeros((d, d))
    eye = np.eye(d)
    for i in range(d):
        grad[i] = (f(point + step * eye[i]) - f(point - step * eye[i])) / (2 * step)
    f0 = f(point)
    h = hess_step
    for i in range(d):
        hess[i, i] = (f(point + h * eye[i]) - 2 * f0 + f(point - h * eye[i])) / (h * h)
        for j in range(i + 1, d):
            hess[i, j] = hess[j, i] = (
                f(point + h * eye[i] + h * eye[j])
                - f(point + h * eye[i] - h * eye[j])
                - f(point - h * eye[i] + h * eye[j])
                + f(point - h * eye[i] - h * eye[j])
            ) / (4 * h * h)
    return grad, hess
