"""Closed forms and integrators for the ODE families behind the classification.

[1-1-1]: each block carries a Riccati pair v^i X_i' = -bX_i² + (d-a)X_i + c,
v^i' = -(a+d). [2-1]: the α/ζ system of a field u + α∂z on ζ(h + dz²),
its second-order gluing form, and the ψ ODE of the conformally flat family.
"""
import logging
import math
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from .autodiff import partials
from .errors import (
    DegeneratePartner,
    DomainError,
    InvalidConstants,
    PreconditionError,
    SingularDenominator,
    SingularZeta,
)
from .expr import ScalarExpr, parse
from .integrate import integrate, quintic_hermite, stencil_derivatives
from .models import ActionMatrix, ClosedFormBranch, GluingPair, PsiSolution, Riccati111Params

logger = logging.getLogger(__name__)

Exprish = Union[ScalarExpr, str]

RICCATI_BRANCHES = ("1a", "1b", "1c", "2a", "2b", "2c-tanh", "2c-const")
HOMOTHETIC_BRANCHES = ("1a", "1b", "2a-zero", "2a", "2b-zero", "2b", "2c")
GLUING_KINDS = ("exp", "inverse-square", "tan", "tanh", "power", "exp-homothetic")

_ZERO = 1e-12


def _num(value: float) -> str:
    return f"({float(value)!r})"


def univariate_jet(e: Exprish, t: float, var: str = "x", params: Optional[Dict[str, float]] = None) -> Tuple[float, float, float]:
    """Value, first and second derivative of a one-variable expression."""
    value, grad, hess = partials(e, [t], params, [var])
    return value, float(grad[0]), float(hess[0, 0])


# [1-1-1] systems


def ode111_residual(
    X: Sequence[Exprish],
    v: Sequence[Exprish],
    A: ActionMatrix,
    p: Sequence[float],
    coords: Sequence[str] = ("x", "y", "z"),
    params: Optional[Dict[str, float]] = None,
) -> List[Tuple[float, float]]:
    """Per block: (|v^i X_i' − S_A(X_i)|, |v^i' + (a+d)|), derivatives taken along x^i."""
    out = []
    for i, (Xi, vi) in enumerate(zip(X, v)):
        x_val, x_grad, _ = partials(Xi, p, params, list(coords))
        v_val, v_grad, _ = partials(vi, p, params, list(coords))
        riccati = v_val * float(x_grad[i]) - (-A.b * x_val * x_val + (A.d - A.a) * x_val + A.c)
        trace = float(v_grad[i]) + A.a + A.d
        out.append((abs(riccati), abs(trace)))
    return out


def riccati111_params(A: ActionMatrix, tol: float = _ZERO) -> Riccati111Params:
    if abs(A.b) <= tol:
        return Riccati111Params(a=A.a, b=A.b, c=A.c, d=A.d, defined=False)
    return Riccati111Params(
        a=A.a,
        b=A.b,
        c=A.c,
        d=A.d,
        alpha1=-(A.a + A.d) / A.b,
        alpha0=(A.a * A.d - A.c * A.b) / (A.b * A.b),
        defined=True,
    )


def riccati111_residual(w: Exprish, f: Exprish, alpha1: float, alpha0: float, t: float, var: str = "x") -> Tuple[float, float]:
    """|w f' − (f² + α₁f + α₀)| and |w' + α₁|."""
    w0, w1, _ = univariate_jet(w, t, var)
    f0, f1, _ = univariate_jet(f, t, var)
    return abs(w0 * f1 - (f0 * f0 + alpha1 * f0 + alpha0)), abs(w1 + alpha1)


def _require(condition: bool, message: str, constants: Dict[str, float]) -> None:
    if not condition:
        raise InvalidConstants(message, {"constants": constants})


def _riccati_branch(branch: str, k: Dict[str, float]) -> ClosedFormBranch:
    a1 = float(k.get("alpha1", 0.0))
    a0 = float(k.get("alpha0", 0.0))
    c = float(k.get("c", 1.0))
    disc = a1 * a1 - 4 * a0
    implied = {"alpha1": a1, "alpha0": a0, "a": 0.0, "b": 1.0, "c": -a0, "d": -a1}

    def make(first: str, second: str, domain: Tuple[float, float]) -> ClosedFormBranch:
        return ClosedFormBranch(
            branch=branch, system="riccati", constants=dict(k), first=first, second=second,
            domain=domain, implied=implied,
        )

    if branch in ("1a", "1b", "1c"):
        _require(abs(a1) > _ZERO, "branch needs alpha1 != 0", k)
        _require(c > 0, "branch needs c > 0", k)
        w = f"-{_num(a1)}*x"
        if branch == "1a":
            _require(disc > _ZERO, "branch needs alpha1^2 - 4 alpha0 > 0", k)
            root = math.sqrt(disc)
            f = f"0.5*tanh(ln({_num(c)}*x)*{_num(root / (2 * a1))})*{_num(root)} - {_num(a1 / 2)}"
            return make(w, f, (0.5 / c, 3.0 / c))
        if branch == "1b":
            _require(abs(disc) <= 1e-12 * (1 + a1 * a1), "branch needs alpha1^2 = 4 alpha0", k)
            return make(w, f"{_num(a1)}*(1/ln({_num(c)}*x) - 0.5)", (1.5 / c, 4.0 / c))
        _require(disc < -_ZERO, "branch needs alpha1^2 - 4 alpha0 < 0", k)
        root = math.sqrt(-disc)
        q = root / (2 * a1)
        reach = min(1.2 / abs(q), 1.0)
        f = f"-0.5*tan(ln({_num(c)}*x)*{_num(q)})*{_num(root)} - {_num(a1 / 2)}"
        return make(w, f, (math.exp(-reach) / c, math.exp(reach) / c))

    _require(abs(a1) <= _ZERO, "branch needs alpha1 = 0", k)
    if branch == "2c-const":
        _require(a0 < -_ZERO, "branch needs alpha0 < 0", k)
        sign = float(k.get("sign", 1.0))
        _require(sign in (1.0, -1.0), "sign must be +1 or -1", k)
        return make("0", _num(sign * math.sqrt(-a0)), (-2.0, 2.0))
    _require(abs(c) > _ZERO, "branch needs c != 0", k)
    w = _num(c)
    if branch == "2a":
        _require(a0 > _ZERO, "branch needs alpha0 > 0", k)
        root = math.sqrt(a0)
        half = min(1.2 * abs(c) / root, 2.0)
        return make(w, f"{_num(root)}*tan({_num(root / c)}*x)", (-half, half))
    if branch == "2b":
        _require(abs(a0) <= _ZERO, "branch needs alpha0 = 0", k)
        return make(w, f"-{_num(c)}/x", (0.5, 3.0))
    if branch == "2c-tanh":
        _require(a0 < -_ZERO, "branch needs alpha0 < 0", k)
        root = math.sqrt(-a0)
        return make(w, f"-{_num(root)}*tanh({_num(root / c)}*x)", (-2.0, 2.0))
    raise InvalidConstants(f"Unknown riccati branch '{branch}'", {"branch": branch})


def _homothetic_branch(branch: str, k: Dict[str, float]) -> ClosedFormBranch:
    a = float(k.get("a", 0.0))
    d = float(k.get("d", 0.0))
    c = float(k.get("c", 0.0))
    kk = float(k.get("k", 1.0))
    h = float(k.get("h", 1.0))
    implied = {"a": a, "b": 0.0, "c": c, "d": d}

    def make(first: str, second: str, domain: Tuple[float, float] = (0.5, 3.0)) -> ClosedFormBranch:
        return ClosedFormBranch(
            branch=branch, system="homothetic", constants=dict(k), first=first, second=second,
            domain=domain, implied=implied,
        )

    if branch == "1a":
        _require(abs(a + d) > _ZERO and abs(a - d) > _ZERO, "branch needs a + d != 0 and a != d", k)
        exponent = (a - d) / (a + d)
        return make(f"-{_num(a + d)}*x", f"{_num(c / (a - d))} + {_num(kk)}*abs(x)^{_num(exponent)}")
    if branch == "1b":
        _require(abs(a - d) <= _ZERO and abs(a) > _ZERO, "branch needs a = d != 0", k)
        return make(f"-{_num(2 * a)}*x", f"-{_num(c)}*ln(abs(x))/{_num(2 * a)} + {_num(kk)}")
    if branch in ("2a-zero", "2a"):
        _require(abs(a + d) <= _ZERO and abs(a) > _ZERO, "branch needs a + d = 0 with a != 0", k)
        if branch == "2a-zero":
            return make("0", _num(c / (2 * a)))
        _require(abs(kk) > _ZERO, "branch needs k != 0", k)
        return make(_num(kk), f"{_num(c / (2 * a))} + {_num(h)}*exp(-{_num(2 * a / kk)}*x)", (-1.0, 1.0))
    if branch in ("2b-zero", "2b"):
        _require(max(abs(a), abs(d), abs(c)) <= _ZERO, "branch needs a = d = c = 0", k)
        return make("0" if branch == "2b-zero" else _num(kk), _num(h))
    if branch == "2c":
        _require(max(abs(a), abs(d)) <= _ZERO and abs(c) > _ZERO, "branch needs a = d = 0 and c != 0", k)
        _require(abs(kk) > _ZERO, "branch needs k != 0", k)
        return make(_num(kk), f"{_num(c / kk)}*x")
    raise InvalidConstants(f"Unknown homothetic branch '{branch}'", {"branch": branch})


def closed_form_branch(branch: str, constants: Dict[str, float]) -> ClosedFormBranch:
    """Explicit solution of one block system.

    ``branch`` is "riccati:<case>" (essential normalisation, constants alpha1,
    alpha0, c, sign) or "homothetic:<case>" (b = 0, constants a, d, c, k, h).
    Solutions hold up to a translation of x.
    """
    system, _, case = branch.partition(":")
    if system == "riccati":
        return _riccati_branch(case, constants)
    if system == "homothetic":
        return _homothetic_branch(case, constants)
    raise InvalidConstants(f"Unknown branch '{branch}'", {"branch": branch})


def branch_residual(branch: ClosedFormBranch, t: float) -> Tuple[float, float]:
    """Defining-system residual of a closed-form branch at x = t."""
    if branch.system == "riccati":
        return riccati111_residual(
            branch.first, branch.second, branch.constants.get("alpha1", 0.0), branch.constants.get("alpha0", 0.0), t
        )
    A = ActionMatrix(**{name: branch.implied[name] for name in ("a", "b", "c", "d")})
    return ode111_residual([branch.second], [branch.first], A, [t], coords=("x",))[0]


def branch_points(branch: ClosedFormBranch, n: int = 20) -> List[float]:
    lo, hi = branch.domain
    margin = 0.02 * (hi - lo)
    return [float(t) for t in np.linspace(lo + margin, hi - margin, n)]


def partner_from_f(
    f: Sequence[Exprish],
    ell: float,
    mu: float,
    p: Sequence[float],
    signs: Sequence[float] = (1.0, 1.0, 1.0),
    coords: Sequence[str] = ("x", "y", "z"),
    params: Optional[Dict[str, float]] = None,
) -> np.ndarray:
    """ḡ_ii = μ ε_i Π_{j≠i}(f_i − f_j) / ((f_i + ℓ) Π_k(f_k + ℓ))."""
    values = [partials(fi, p, params, list(coords))[0] for fi in f]
    shifted = [value + ell for value in values]
    for i, s in enumerate(shifted):
        if abs(s) <= _ZERO:
            raise DegeneratePartner(f"f_{i + 1} + ℓ vanishes at {list(p)}", {"index": i})
    total = float(np.prod(shifted))
    diag = []
    for i in range(len(values)):
        gap = float(np.prod([values[i] - values[j] for j in range(len(values)) if j != i]))
        diag.append(mu * signs[i] * gap / (shifted[i] * total))
    return np.diag(diag)


# [2-1] systems


def _zeta_alpha_jets(alpha: Exprish, zeta: Exprish, t: float, var: str):
    z0, z1, z2 = univariate_jet(zeta, t, var)
    if abs(z0) <= _ZERO:
        raise SingularZeta(f"ζ vanishes at {var}={t}", {var: t})
    return univariate_jet(alpha, t, var), (z0, z1, z2)


def alpha_zeta_residuals(
    alpha: Exprish, zeta: Exprish, b: float, B: float, C: float, t: float, var: str = "z"
) -> Tuple[float, float]:
    """|2α' + C + bζ| and |αζ' + bζ² − (2B − C)ζ|."""
    (a0, a1, _), (z0, z1, _) = _zeta_alpha_jets(alpha, zeta, t, var)
    return abs(2 * a1 + C + b * z0), abs(a0 * z1 + b * z0 * z0 - (2 * B - C) * z0)


def gluing_residuals(alpha: Exprish, zeta: Exprish, C: float, t: float, var: str = "z") -> Tuple[float, float]:
    """The two second-order relations left after eliminating b and B."""
    (a0, a1, a2), (z0, z1, z2) = _zeta_alpha_jets(alpha, zeta, t, var)
    first = z0 * (a0 * z2 - a1 * z1 - C * z1) - a0 * z1 * z1
    second = z0 * (-2 * a2 * z0 + a0 * z2 + a1 * z1) - a0 * z1 * z1
    return abs(first), abs(second)


def implied_b(alpha: Exprish, zeta: Exprish, C: float, t: float, var: str = "z") -> float:
    """b = −(2α' + C)/ζ."""
    (_, a1, _), (z0, _, _) = _zeta_alpha_jets(alpha, zeta, t, var)
    return -(2 * a1 + C) / z0


def zeta_ode_residual(zeta: Exprish, b: float, B: float, C: float, t: float, var: str = "z") -> float:
    """|ζ'' − (3bζ + C − 4B)ζ'²/(2ζ(bζ + C − 2B))|."""
    z0, z1, z2 = univariate_jet(zeta, t, var)
    denom = 2 * z0 * (b * z0 + C - 2 * B)
    if abs(z1) <= _ZERO or abs(denom) <= _ZERO:
        raise SingularDenominator(f"ζ ODE is singular at {var}={t}", {var: t, "denominator": denom, "dzeta": z1})
    return abs(z2 - (3 * b * z0 + C - 4 * B) * z1 * z1 / denom)


def solodovnikov21_residuals(A: ActionMatrix, rho: float, alpha: Exprish, Z: Exprish, t: float, var: str = "z") -> Tuple[float, float]:
    """|bρ² − (d−a)ρ − c| and |αZ' + bZ² − (d−a)Z − c|."""
    a0 = univariate_jet(alpha, t, var)[0]
    Z0, Z1, _ = univariate_jet(Z, t, var)
    constant = A.b * rho * rho - (A.d - A.a) * rho - A.c
    moving = a0 * Z1 + A.b * Z0 * Z0 - (A.d - A.a) * Z0 - A.c
    return abs(constant), abs(moving)


def descent_constant(A: ActionMatrix, rho: float) -> float:
    """C = 2bρ + 3a + d; the horizontal part u satisfies L_u h = −C h."""
    return 2 * A.b * rho + 3 * A.a + A.d


def gluing_pair(kind: str, params: Optional[Dict[str, float]] = None) -> GluingPair:
    """(ζ, α) with the constants (b, B, C) of the α/ζ system they solve.

    Kinds: exp (εe^{βz}, α = k), inverse-square (β/z², k/z), tan
    (β(1+tan²ξz), k tan ξz), tanh (β(1−tanh²ξz), k tanh ξz), power
    (C₁z^{2(4/C−1)}, −Cz/2) and exp-homothetic (C₁e^{−4z/C₀}, C₀).
    """
    q = dict(params or {})
    beta = float(q.get("beta", 1.0))
    k = float(q.get("k", 1.0))
    xi = float(q.get("xi", 1.0))
    if kind == "exp":
        eps = float(q.get("eps", 1.0))
        return GluingPair(kind=kind, zeta=f"{_num(eps)}*exp({_num(beta)}*z)", alpha=_num(k),
                          b=0.0, B=k * beta / 2, C=0.0, domain=(-1.0, 1.0))
    if kind == "inverse-square":
        _require(abs(beta) > _ZERO, "beta must be nonzero", q)
        return GluingPair(kind=kind, zeta=f"{_num(beta)}/z^2", alpha=f"{_num(k)}/z",
                          b=2 * k / beta, B=0.0, C=0.0, domain=(0.5, 2.0))
    if kind in ("tan", "tanh"):
        _require(abs(beta) > _ZERO and abs(xi) > _ZERO, "beta and xi must be nonzero", q)
        sign = "+" if kind == "tan" else "-"
        zeta = f"{_num(beta)}*(1 {sign} {kind}({_num(xi)}*z)^2)"
        return GluingPair(kind=kind, zeta=zeta, alpha=f"{_num(k)}*{kind}({_num(xi)}*z)",
                          b=-2 * k * xi / beta, B=-k * xi, C=0.0, domain=(0.1, 1.0))
    if kind == "power":
        C = float(q.get("C", 1.0))
        c1 = float(q.get("c1", 1.0))
        _require(abs(C) > _ZERO, "C must be nonzero", q)
        return GluingPair(kind=kind, zeta=f"{_num(c1)}*z^{_num(2 * (4 / C - 1))}", alpha=f"-{_num(C / 2)}*z",
                          b=0.0, B=C - 2, C=C, domain=(0.5, 2.0))
    if kind == "exp-homothetic":
        c0 = float(q.get("c0", 1.0))
        c1 = float(q.get("c1", 1.0))
        _require(abs(c0) > _ZERO, "c0 must be nonzero", q)
        return GluingPair(kind=kind, zeta=f"{_num(c1)}*exp(-{_num(4 / c0)}*z)", alpha=_num(c0),
                          b=0.0, B=-2.0, C=0.0, domain=(-1.0, 1.0))
    raise InvalidConstants(f"Unknown gluing family '{kind}'", {"kind": kind})


def zeta_branch(kind: str, params: Optional[Dict[str, float]] = None) -> str:
    return gluing_pair(kind, params).zeta


def alpha_branch(kind: str, params: Optional[Dict[str, float]] = None) -> str:
    return gluing_pair(kind, params).alpha


# ψ family: (ψ − z)ψ'' = 2ψ'(ψ' − k), with ζ proportional to ψ'


def _psi_second(k: float, z: float, psi: float, dpsi: float) -> float:
    gap = psi - z
    if abs(gap) <= _ZERO:
        raise DomainError(f"ψ meets z at z={z}", {"z": z})
    return 2 * dpsi * (dpsi - k) / gap


def solve_psi(
    k: float,
    z_range: Tuple[float, float],
    init: Tuple[float, float],
    tol: float = 1e-12,
    n_points: int = 21,
) -> PsiSolution:
    """Integrate the ψ ODE from z_range[0] with (ψ, ψ') = init onto a uniform grid.

    The residual at each grid point is the largest dense-output defect
    |(ψ−z)ψ'' − 2ψ'(ψ'−k)| at the step midpoints of the interval ending there.
    """
    if abs(k + 1) <= _ZERO:
        raise PreconditionError("k = -1 is excluded from the ψ family", {"k": k})
    z0, z1 = float(z_range[0]), float(z_range[1])
    if abs(init[0] - z0) <= _ZERO:
        raise PreconditionError("initial ψ coincides with z", {"psi0": init[0], "z0": z0})

    def rhs(z: float, y: np.ndarray) -> np.ndarray:
        return np.array([y[1], _psi_second(k, z, y[0], y[1])])

    grid = np.linspace(z0, z1, n_points)
    state = np.asarray(init, dtype=float)
    psi, dpsi, residual = [float(state[0])], [float(state[1])], [0.0]
    for start, end in zip(grid[:-1], grid[1:]):
        traj = integrate(rhs, float(start), state, float(end), tol)
        worst = 0.0
        for i in range(len(traj) - 1):
            h = traj.ts[i + 1] - traj.ts[i]
            mid = traj.ts[i] + 0.5 * h
            value, deriv, accel = quintic_hermite(
                h, 0.5,
                traj.ys[i, :1], traj.ys[i + 1, :1],
                traj.ys[i, 1:], traj.ys[i + 1, 1:],
                traj.fs[i, 1:], traj.fs[i + 1, 1:],
            )
            y, dy, ddy = float(value[0]), float(deriv[0]), float(accel[0])
            worst = max(worst, abs((y - mid) * ddy - 2 * dy * (dy - k)))
        state = traj.ys[-1]
        psi.append(float(state[0]))
        dpsi.append(float(state[1]))
        residual.append(worst)
    if min(dpsi) < 0 < max(dpsi):
        logger.warning("ψ' changes sign on [%g, %g]; the conformal factor vanishes", z0, z1)
    return PsiSolution(k=k, z=[float(z) for z in grid], psi=psi, psi_prime=dpsi, residual=residual)


def psi_closed_form(k: float, k0: float = 0.0, k1: float = 1.0) -> str:
    """ψ for k = 1 (z − tanh(k0 + k1 z)/k1) and k = −1 (−(k0 + k1 z)/(k1 + z))."""
    if k == 1:
        if k1 == 0:
            raise InvalidConstants("k1 must be nonzero", {"k1": k1})
        return f"z - tanh({_num(k0)} + {_num(k1)}*z)/{_num(k1)}"
    if k == -1:
        return f"-({_num(k0)} + {_num(k1)}*z)/({_num(k1)} + z)"
    raise InvalidConstants(f"No closed form registered for k={k}", {"k": k})


def zeta_k_defect(z0: float, z1: float, z2: float, k: float) -> float:
    denom = 2 * z0 * (z0 + k)
    if abs(denom) <= _ZERO:
        raise SingularDenominator("ζ(ζ + k) vanishes", {"zeta": z0, "k": k})
    return abs(z2 - (3 * z0 + 2 * k - 1) * z1 * z1 / denom)


def zeta_k_residual(zeta: Exprish, k: float, t: float, var: str = "z") -> float:
    """|ζ'' − (3ζ + 2k − 1)ζ'²/(2ζ(ζ + k))| for ζ = −ψ' up to the scaling of ψ."""
    return zeta_k_defect(*univariate_jet(zeta, t, var), k)


def psi_zeta_residual(solution: PsiSolution) -> float:
    """Largest ζ-ODE defect of ζ = −ψ' along a computed ψ trajectory, relative to 1 + |ζ''|.

    ζ' and ζ'' are five-point differences of the sampled ψ' on the uniform
    grid, so only interior points are checked and the grid needs 5 points.
    """
    if len(solution.z) < 5:
        raise PreconditionError("the ζ check needs at least 5 grid points", {"n_points": len(solution.z)})
    zeta = -np.asarray(solution.psi_prime, dtype=float)
    first, second = stencil_derivatives(zeta, solution.z[1] - solution.z[0])
    worst = 0.0
    for z0, z1, z2 in zip(zeta[2:-2], first, second):
        defect = zeta_k_defect(float(z0), float(z1), float(z2), solution.k)
        worst = max(worst, defect / (1.0 + abs(float(z2))))
    return worst


def psi_closed_form_error(
    k0: float = 0.0, k1: float = 1.0, z_range: Tuple[float, float] = (0.5, 2.0), tol: float = 1e-12, n_points: int = 21
) -> float:
    """Largest |ψ − ψ_exact| and |ψ' − ψ'_exact| of solve_psi against the k = 1 closed form."""
    exact = parse(psi_closed_form(1.0, k0, k1))
    psi0, dpsi0, _ = univariate_jet(exact, z_range[0], "z")
    solution = solve_psi(1.0, z_range, (psi0, dpsi0), tol, n_points)
    worst = 0.0
    for z, psi, dpsi in zip(solution.z, solution.psi, solution.psi_prime):
        value, deriv, _ = univariate_jet(exact, z, "z")
        worst = max(worst, abs(psi - value), abs(dpsi - deriv))
    return worst


def erf(t: float) -> float:
    return math.erf(t)


def inverf(y: float, iterations: int = 6) -> float:
    """Inverse error function by Newton refinement of a closed-form first guess."""
    if not -1.0 < y < 1.0:
        raise DomainError(f"inverf is defined on (-1, 1), got {y}", {"y": y})
    if y == 0.0:
        return 0.0
    a = 0.147
    log_term = math.log(1.0 - y * y)
    t = 2.0 / (math.pi * a) + 0.5 * log_term
    w = math.copysign(math.sqrt(math.sqrt(t * t - log_term / a) - t), y)
    for _ in range(iterations):
        step = (math.erf(w) - y) / (2.0 / math.sqrt(math.pi) * math.exp(-w * w))
        w -= step
        if abs(step) <= 1e-16 * max(1.0, abs(w)):
            break
    return w


def inverf_zeta(t: float) -> Tuple[float, float, float]:
    """ζ = 1/(2 inverf(z)²) with its first two derivatives."""
    e = inverf(t)
    if e == 0.0:
        raise SingularZeta("inverf vanishes at z = 0", {"z": t})
    w = math.sqrt(2.0) * e
    dw = math.sqrt(2.0) * 0.5 * math.sqrt(math.pi) * math.exp(e * e)
    ddw = w * dw * dw
    zeta = w ** -2
    dzeta = -2 * dw / w ** 3
    ddzeta = -2 * ddw / w ** 3 + 6 * dw * dw / w ** 4
    return zeta, dzeta, ddzeta


def inverf_zeta_residual(t: float) -> float:
    """k = 0 ζ-ODE defect of 1/(2 inverf(z)²), relative to 1 + |ζ''|."""
    z0, z1, z2 = inverf_zeta(t)
    return zeta_k_defect(z0, z1, z2, 0.0) / (1.0 + abs(z2))


def psi_inverf_error(
    z_range: Tuple[float, float] = (0.5, 1.0),
    init: Tuple[float, float] = (-1.5, -1.0),
    tol: float = 1e-12,
    n_points: int = 21,
) -> float:
    """Largest |ζ − ζ_fit| / (1 + |ζ_fit|) of ζ = −ψ' from solve_psi at k = 0 against 1/(2 inverf(κz + c)²).

    κ and c come from the initial data alone: e0 = 1/sqrt(2ζ(z0)) > 0 fixes
    u0 = erf(e0), and κ matches ζ'(z0) against dζ/du = −(√π/2) exp(e0²)/e0³.
    """
    solution = solve_psi(0.0, z_range, init, tol, n_points)
    z0 = float(z_range[0])
    zeta0 = -float(init[1])
    if zeta0 <= _ZERO:
        raise PreconditionError("the inverf form needs ψ' < 0 at the start", {"psi_prime": float(init[1])})
    dzeta0 = -_psi_second(0.0, z0, float(init[0]), float(init[1]))
    e0 = 1.0 / math.sqrt(2.0 * zeta0)
    u0 = erf(e0)
    kappa = dzeta0 / (-0.5 * math.sqrt(math.pi) * math.exp(e0 * e0) / e0 ** 3)
    logger.debug("inverf fit kappa=%.6g c=%.6g", kappa, u0 - kappa * z0)
    worst = 0.0
    for z, dpsi in zip(solution.z, solution.psi_prime):
        fitted = inverf_zeta(kappa * (z - z0) + u0)[0]
        worst = max(worst, abs(-dpsi - fitted) / (1.0 + abs(fitted)))
    return worst
