"""Registry of the classified metric families with their projective generators.

Every entry is produced by a builder from a parameter dictionary, so the
same family can be verified at its defaults or at user-supplied values
within the declared ranges.
"""
import logging
from typing import Any, Callable, Dict, List, Literal, Optional, Sequence, Tuple

from pydantic import BaseModel, Field

from .errors import ParamOutOfRange, UnknownEntry
from .expr import evaluate
from .geometry import warped_product
from .models import MetricSpec, VectorFieldSpec

logger = logging.getLogger(__name__)

Claim = Literal["killing", "homothetic", "essential"]
EntryKind = Literal["111", "21", "constant_curvature", "2d", "homothetic_normal_form", "product"]
Builder = Callable[[Dict[str, float]], Dict[str, Any]]

CONTROLS_3D = (("0", "x^2", "0"), ("y*z", "0", "0"))
CONTROLS_2D = (("0", "x^2"),)


class Generator(BaseModel):
    field: VectorFieldSpec
    claimed: Claim


class CatalogEntry(BaseModel):
    id: str
    kind: EntryKind
    anchor: str
    params: Dict[str, float] = Field(default_factory=dict)
    metric: MetricSpec
    partner: Optional[MetricSpec] = None
    generators: List[Generator]
    eigenvalue_fields: List[str] = Field(default_factory=list)
    multiplicities: List[int] = Field(default_factory=list)
    negative_controls: List[VectorFieldSpec] = Field(default_factory=list)
    lc_coordinates: bool = False
    h: Optional[MetricSpec] = None
    zeta: Optional[str] = None
    rho: float = 1.0
    constant_curvature: bool = False
    diagonalizable: bool = True
    psi_prime: Optional[str] = None
    transport: List[int] = Field(default_factory=list, description="generator indices used by the transport check")


class Registration:
    def __init__(
        self,
        entry_id: str,
        anchor: str,
        builder: Builder,
        defaults: Optional[Dict[str, float]] = None,
        ranges: Optional[Dict[str, Tuple[float, float]]] = None,
    ):
        self.entry_id = entry_id
        self.anchor = anchor
        self.builder = builder
        self.defaults = dict(defaults or {})
        self.ranges = dict(ranges or {})


_REGISTRY: Dict[str, Registration] = {}


def register(
    entry_id: str,
    anchor: str,
    defaults: Optional[Dict[str, float]] = None,
    ranges: Optional[Dict[str, Tuple[float, float]]] = None,
) -> Callable[[Builder], Builder]:
    def decorator(builder: Builder) -> Builder:
        if entry_id in _REGISTRY:
            raise ValueError(f"Duplicate catalog id '{entry_id}'")
        _REGISTRY[entry_id] = Registration(entry_id, anchor, builder, defaults, ranges)
        return builder

    return decorator


def entry_ids() -> List[str]:
    return sorted(_REGISTRY)


def list_entries() -> List[Tuple[str, str]]:
    """(id, anchor) for every registered entry, sorted by id."""
    return [(entry_id, _REGISTRY[entry_id].anchor) for entry_id in entry_ids()]


def _resolve_params(reg: Registration, params: Optional[Dict[str, float]]) -> Dict[str, float]:
    merged = dict(reg.defaults)
    for name, value in (params or {}).items():
        if name not in reg.defaults:
            raise ParamOutOfRange(
                f"Entry '{reg.entry_id}' has no parameter '{name}'", {"param": name, "known": sorted(reg.defaults)}
            )
        merged[name] = float(value)
    for name, (lo, hi) in reg.ranges.items():
        if not lo <= merged[name] <= hi:
            raise ParamOutOfRange(
                f"Parameter {name}={merged[name]} outside [{lo}, {hi}] for '{reg.entry_id}'",
                {"param": name, "value": merged[name], "range": (lo, hi)},
            )
    return merged


def get_entry(entry_id: str, params: Optional[Dict[str, float]] = None) -> CatalogEntry:
    reg = _REGISTRY.get(entry_id)
    if reg is None:
        raise UnknownEntry(entry_id)
    resolved = _resolve_params(reg, params)
    logger.debug("building %s with %s", entry_id, resolved)
    return CatalogEntry(id=entry_id, anchor=reg.anchor, params=resolved, **reg.builder(resolved))


def _gen(components: Sequence[str], claimed: Claim) -> Generator:
    return Generator(field=VectorFieldSpec(components=list(components)), claimed=claimed)


def _controls(*extra: Sequence[str]) -> List[VectorFieldSpec]:
    return [VectorFieldSpec(components=list(c)) for c in list(CONTROLS_3D) + list(extra)]


def _exclude(p: Dict[str, float], name: str, values: Sequence[float], reason: str) -> None:
    for value in values:
        if abs(p[name] - value) < 1e-9:
            raise ParamOutOfRange(f"{name}={p[name]} is excluded: {reason}", {"param": name, "value": p[name]})


# [1-1-1] Levi-Civita metrics


def _levi_civita_111(
    X: Sequence[str],
    domain: Sequence[Tuple[float, float]],
    p: Dict[str, float],
    shift: float,
    coefficients: Optional[Sequence[str]] = None,
    factors: Sequence[str] = ("1", "1", "1"),
) -> Tuple[MetricSpec, MetricSpec, List[str]]:
    """g_ii = k_i f_i Π_{j≠i}(X_i − X_j) and the partner with Benenti tensor diag(X + shift).

    Without explicit coefficients each k_i is the sign that makes g positive
    definite at the centre of the box.
    """
    center = [0.5 * (lo + hi) for lo, hi in domain]
    diag, guards = [], []
    for i in range(3):
        gaps = [f"(({X[i]})-({X[j]}))" for j in range(3) if j != i]
        guards.extend(f"({X[i]})-({X[j]})" for j in range(i + 1, 3))
        body = f"({factors[i]})*{gaps[0]}*{gaps[1]}"
        if coefficients is None:
            value = float(evaluate(body, center, p))
            coefficient = "1" if value > 0 else "(-1)"
        else:
            coefficient = coefficients[i]
        diag.append(f"{coefficient}*{body}")
    Y = [f"({x})+{shift!r}" for x in X]
    product = "*".join(f"({y})" for y in Y)
    g = MetricSpec(
        dim=3, coords=["x", "y", "z"], params=dict(p), domain=list(domain), guards=guards,
        g=[[diag[0], "0", "0"], [diag[1], "0"], [diag[2]]],
    )
    partner_diag = [f"({diag[i]})/(({Y[i]})*{product})" for i in range(3)]
    partner = MetricSpec(
        dim=3, coords=["x", "y", "z"], params=dict(p), domain=list(domain), guards=guards + Y,
        g=[[partner_diag[0], "0", "0"], [partner_diag[1], "0"], [partner_diag[2]]],
    )
    return g, partner, Y


def _entry_111(
    X: Sequence[str],
    domain: Sequence[Tuple[float, float]],
    p: Dict[str, float],
    shift: float,
    generators: List[Generator],
    coefficients: Optional[Sequence[str]] = None,
    factors: Sequence[str] = ("1", "1", "1"),
    lc_coordinates: bool = True,
    transport: Sequence[int] = (),
) -> Dict[str, Any]:
    g, partner, Y = _levi_civita_111(X, domain, p, shift, coefficients, factors)
    return dict(
        kind="111", metric=g, partner=partner, generators=generators, eigenvalue_fields=Y,
        multiplicities=[1, 1, 1], negative_controls=_controls(), lc_coordinates=lc_coordinates,
        transport=list(transport),
    )


MAIN_DOMAINS = {
    "tanh": [(-1.2, -0.6), (-0.2, 0.4), (0.8, 1.4)],
    "tan": [(-1.2, -0.6), (-0.2, 0.4), (0.8, 1.3)],
    "inv": [(1.5, 2.5), (0.9, 1.2), (0.5, 0.7)],
}
MAIN_DEFAULTS = {"k1": 1.0, "k2": -2.0, "k3": 3.0}
MAIN_RANGES = {"k1": (0.1, 10.0), "k2": (-10.0, -0.1), "k3": (0.1, 10.0)}
DIAGONAL_FIELD = ("1", "1", "1")


def _main_111(func: str, domain_key: str, shift: float, exponential: Optional[str]) -> Builder:
    def build(p: Dict[str, float]) -> Dict[str, Any]:
        if exponential is not None and "beta" in p:
            _exclude(p, "beta", (0.0,), "the exponential factor needs beta != 0")
        X = [f"{func}(x)", f"{func}(y)", f"{func}(z)"] if func != "inv" else ["1/x", "1/y", "1/z"]
        factors = ("1", "1", "1") if exponential is None else tuple(exponential.format(c=c) for c in "xyz")
        return _entry_111(
            X, MAIN_DOMAINS[domain_key], p, shift, [_gen(DIAGONAL_FIELD, "essential")],
            coefficients=("k1", "k2", "k3"), factors=factors, lc_coordinates=exponential is None,
            transport=(0,) if exponential is None else (),
        )

    return build


register(
    "main-111-tanh-exp",
    "[1-1-1] metric with tanh eigenvalues and factors e^{2x/beta}; d/dx + d/dy + d/dz is essential",
    {**MAIN_DEFAULTS, "beta": 2.0}, {**MAIN_RANGES, "beta": (-10.0, 10.0)},
)(_main_111("tanh", "tanh", 2.0, "exp(2*{c}/beta)"))
register(
    "main-111-inv-exp",
    "[1-1-1] metric with eigenvalues 1/x^i and factors e^{2x^i}; d/dx + d/dy + d/dz is essential",
    MAIN_DEFAULTS, MAIN_RANGES,
)(_main_111("inv", "inv", 0.5, "exp(2*{c})"))
register(
    "main-111-tan-exp",
    "[1-1-1] metric with tan eigenvalues and factors e^{2x/beta}; d/dx + d/dy + d/dz is essential",
    {**MAIN_DEFAULTS, "beta": 2.0}, {**MAIN_RANGES, "beta": (-10.0, 10.0)},
)(_main_111("tan", "tan", 3.0, "exp(2*{c}/beta)"))
register(
    "main-111-tan",
    "[1-1-1] metric with tan eigenvalues in Levi-Civita coordinates; d/dx + d/dy + d/dz is essential",
    MAIN_DEFAULTS, MAIN_RANGES,
)(_main_111("tan", "tan", 3.0, None))
register(
    "main-111-tanh",
    "[1-1-1] metric with tanh eigenvalues in Levi-Civita coordinates; d/dx + d/dy + d/dz is essential",
    MAIN_DEFAULTS, MAIN_RANGES,
)(_main_111("tanh", "tanh", 2.0, None))


@register(
    "111-two-constant",
    "[1-1-1] metric with two constant eigenvalues; the projective algebra is the Killing algebra <d/dx, d/dy>",
)
def _two_constant(p: Dict[str, float]) -> Dict[str, Any]:
    gens = [_gen(("1", "0", "0"), "killing"), _gen(("0", "1", "0"), "killing")]
    return _entry_111(["0", "1", "2+z^2"], [(-0.5, 0.5), (-0.5, 0.5), (0.5, 1.0)], p, 1.0, gens)


DILATION = ("x", "y", "z")


@register(
    "111-one-constant-power",
    "[1-1-1] metric with one constant eigenvalue and X = k y^h, k z^h; d/dx Killing, dilation homothetic",
    {"h": 2.0, "k2": 1.0, "k3": 2.0}, {"h": (1.5, 3.0), "k2": (0.8, 1.2), "k3": (1.8, 2.4)},
)
def _one_constant_power(p: Dict[str, float]) -> Dict[str, Any]:
    gens = [_gen(("1", "0", "0"), "killing"), _gen(DILATION, "homothetic")]
    X = ["0", "k2*y^h", "k3*z^h"]
    return _entry_111(X, [(-0.5, 0.5), (0.5, 0.9), (1.0, 1.4)], p, 1.0, gens)


@register(
    "111-one-constant-inverse",
    "[1-1-1] metric with one constant eigenvalue and X = k/y, k/z; three-dimensional projective algebra",
    {"k2": 1.0, "k3": 2.0}, {"k2": (0.8, 1.2), "k3": (1.8, 2.4)},
)
def _one_constant_inverse(p: Dict[str, float]) -> Dict[str, Any]:
    gens = [
        _gen(("1", "0", "0"), "killing"),
        _gen(("0", "k2", "k3"), "essential"),
        _gen(DILATION, "killing"),
    ]
    X = ["0", "k2/y", "k3/z"]
    return _entry_111(X, [(-0.5, 0.5), (1.5, 2.5), (0.8, 1.4)], p, 1.0, gens)


@register(
    "111-one-constant-exp",
    "[1-1-1] metric with one constant eigenvalue and exponential X; k2 d/dy + k3 d/dz homothetic",
    {"k2": 1.0, "k3": 2.0}, {"k2": (0.8, 1.2), "k3": (1.8, 2.4)},
)
def _one_constant_exp(p: Dict[str, float]) -> Dict[str, Any]:
    gens = [_gen(("1", "0", "0"), "killing"), _gen(("0", "k2", "k3"), "homothetic")]
    X = ["0", "exp(y/k2)", "exp(z/k3)"]
    return _entry_111(X, [(-0.5, 0.5), (-0.5, 0.1), (0.8, 1.6)], p, 1.0, gens)


@register(
    "111-one-constant-tanh",
    "[1-1-1] metric with constant eigenvalue epsilon and tanh X; k2 d/dy + k3 d/dz essential",
    {"k2": 1.0, "k3": 2.0}, {"k2": (0.8, 1.2), "k3": (1.8, 2.4)},
)
def _one_constant_tanh(p: Dict[str, float]) -> Dict[str, Any]:
    gens = [_gen(("1", "0", "0"), "killing"), _gen(("0", "k2", "k3"), "essential")]
    X = ["1", "tanh(y/k2)", "tanh(z/k3)"]
    return _entry_111(X, [(-0.5, 0.5), (-1.0, -0.4), (0.0, 1.0)], p, 2.0, gens)


K_DEFAULTS = {"k1": 1.0, "k2": 2.0, "k3": 3.0}
K_RANGES = {"k1": (0.9, 1.1), "k2": (1.9, 2.1), "k3": (2.9, 3.1)}
SUM_K_FIELD = ("k1", "k2", "k3")


def _no_constant(
    X: Sequence[str],
    domain: Sequence[Tuple[float, float]],
    shift: float,
    gens: Sequence[Tuple[Sequence[str], Claim]],
    extra_exclusions: Optional[Callable[[Dict[str, float]], None]] = None,
) -> Builder:
    def build(p: Dict[str, float]) -> Dict[str, Any]:
        if extra_exclusions is not None:
            extra_exclusions(p)
        return _entry_111(X, domain, p, shift, [_gen(c, claim) for c, claim in gens])

    return build


def _power_exclusions(p: Dict[str, float]) -> None:
    _exclude(p, "h", (-1.0, 0.0, 1.0), "h must avoid -1, 0 and 1")


_NO_CONSTANT = [
    (
        "111-power", "no constant eigenvalue, X = k|x|^h; the dilation spans the projective algebra",
        ["k1*abs(x)^h", "k2*abs(y)^h", "k3*abs(z)^h"], [(0.5, 0.8), (0.7, 0.9), (0.8, 1.0)], 0.5,
        [(DILATION, "homothetic")], {"h": 2.0}, {"h": (1.5, 2.5)}, _power_exclusions,
    ),
    (
        "111-linear", "no constant eigenvalue, X = k x; sum of (1/k) d/dx Killing, dilation homothetic",
        ["k1*x", "k2*y", "k3*z"], [(0.5, 1.0), (0.6, 0.9), (0.7, 1.0)], 0.5,
        [(("1/k1", "1/k2", "1/k3"), "killing"), (DILATION, "homothetic")], {}, {}, None,
    ),
    (
        "111-inverse", "no constant eigenvalue, X = k/x; sum of k d/dx essential, dilation Killing",
        ["k1/x", "k2/y", "k3/z"], [(1.5, 2.5), (1.5, 2.0), (1.2, 1.4)], 0.5,
        [(SUM_K_FIELD, "essential"), (DILATION, "killing")], {}, {}, None,
    ),
    (
        "111-log", "no constant eigenvalue, X = ln(k|x|); the dilation spans the projective algebra",
        ["ln(k1*abs(x))", "ln(k2*abs(y))", "ln(k3*abs(z))"], [(0.5, 1.0), (0.6, 0.9), (0.7, 1.0)], 1.0,
        [(DILATION, "homothetic")], {}, {}, None,
    ),
    (
        "111-exp", "no constant eigenvalue, X = e^{x/k}; sum of k d/dx homothetic",
        ["exp(x/k1)", "exp(y/k2)", "exp(z/k3)"], [(-1.0, -0.5), (0.0, 0.5), (1.5, 2.5)], 0.5,
        [(SUM_K_FIELD, "homothetic")], {}, {}, None,
    ),
    (
        "111-tanh-log", "no constant eigenvalue, X = tanh(ln(k|x|^beta)); the dilation is essential",
        ["tanh(ln(k1*abs(x)^beta))", "tanh(ln(k2*abs(y)^beta))", "tanh(ln(k3*abs(z)^beta))"],
        [(0.5, 0.8), (0.5, 0.7), (0.6, 0.8)], 1.0, [(DILATION, "essential")], {"beta": 1.0}, {"beta": (0.9, 1.1)}, None,
    ),
    (
        "111-inverse-log", "no constant eigenvalue, X = 1/ln(k|x|); the dilation is essential",
        ["1/ln(k1*abs(x))", "1/ln(k2*abs(y))", "1/ln(k3*abs(z))"], [(1.5, 2.0), (1.5, 2.0), (2.0, 3.0)], 0.0,
        [(DILATION, "essential")], {}, {}, None,
    ),
    (
        "111-tan-log", "no constant eigenvalue, X = tan(ln(k|x|^beta)); the dilation is essential",
        ["tan(ln(k1*abs(x)^beta))", "tan(ln(k2*abs(y)^beta))", "tan(ln(k3*abs(z)^beta))"],
        [(0.5, 0.8), (0.5, 0.7), (0.6, 0.8)], 1.0, [(DILATION, "essential")], {"beta": 1.0}, {"beta": (0.9, 1.1)}, None,
    ),
    (
        "111-tan", "no constant eigenvalue, X = tan(x/k); sum of k d/dx essential",
        ["tan(x/k1)", "tan(y/k2)", "tan(z/k3)"], [(-0.8, -0.3), (0.0, 0.6), (1.5, 2.7)], 2.0,
        [(SUM_K_FIELD, "essential")], {}, {}, None,
    ),
    (
        "111-tanh", "no constant eigenvalue, X = tanh(x/k); sum of k d/dx essential",
        ["tanh(x/k1)", "tanh(y/k2)", "tanh(z/k3)"], [(-1.0, -0.4), (-0.2, 0.4), (1.5, 3.0)], 1.0,
        [(SUM_K_FIELD, "essential")], {}, {}, None,
    ),
]

for _id, _anchor, _X, _domain, _shift, _gens, _extra_defaults, _extra_ranges, _check in _NO_CONSTANT:
    register(
        _id, f"[1-1-1] metric with {_anchor}", {**K_DEFAULTS, **_extra_defaults}, {**K_RANGES, **_extra_ranges},
    )(_no_constant(_X, _domain, _shift, _gens, _check))


# [2-1] Levi-Civita metrics g = ζ(z)(h + dz²)


EXP_H_DEFAULTS = {"beta": 1.0, "eps1": 1.0, "eps2": 1.0}


def _h(name: str, g11: str, g12: str, g22: str, domain: Sequence[Tuple[float, float]], guards: Sequence[str] = (),
       params: Optional[Dict[str, float]] = None) -> MetricSpec:
    return MetricSpec(name=name, dim=2, coords=["x", "y"], g=[[g11, g12], [g22]], domain=list(domain),
                      guards=list(guards), params=dict(params or {}))


def h_generic() -> MetricSpec:
    return _h("generic", "2+sin(x*y)", "0.2*x", "1+x^2+y^2", [(0.2, 1.0), (0.3, 1.1)])


def h_generic_alt() -> MetricSpec:
    return _h("generic-alt", "1+x^2*y^2", "0", "2+cos(x)+y^2", [(0.2, 1.0), (0.3, 1.1)])


def h_killing() -> MetricSpec:
    return _h("killing", "1+y^2", "0", "1", [(-0.5, 0.5), (0.3, 1.1)])


def h_homothetic() -> MetricSpec:
    return _h("homothetic", "exp(x)*(1+y^2)", "0", "exp(x)", [(-0.5, 0.5), (0.3, 1.1)])


def h_exp() -> MetricSpec:
    return _h("exp", "eps1*exp((beta+2)*x)", "0", "eps2*exp(beta*x)", [(-0.5, 0.5), (-1.0, 1.0)],
              params=EXP_H_DEFAULTS)


def h_flat() -> MetricSpec:
    return _h("flat", "1", "0", "1", [(0.2, 1.2), (0.2, 1.2)])


def h_sphere() -> MetricSpec:
    return _h("sphere", "1", "0", "sin(x)^2", [(0.6, 1.4), (-0.5, 0.5)], ["sin(x)"])


def h_hyperbolic() -> MetricSpec:
    return _h("hyperbolic", "1", "0", "sinh(x)^2", [(0.6, 1.4), (-0.5, 0.5)], ["sinh(x)"])


def _partner_21(h: MetricSpec, zeta: str, rho: float, metric: MetricSpec) -> MetricSpec:
    """ḡ = ζ/(Zρ²)(h/ρ + dz²/Z) with Z = ζ + ρ; its Benenti tensor is diag(ρ, ρ, Z)."""
    Z = f"(({zeta})+{rho!r})"
    w = f"({zeta})/({Z}*{rho * rho!r})"
    return metric.model_copy(update={
        "name": f"partner({metric.name})",
        "g": [
            [f"{w}*({h.g[0][0]})/{rho!r}", f"{w}*({h.g[0][1]})/{rho!r}", "0"],
            [f"{w}*({h.g[1][0]})/{rho!r}", f"{w}*({h.g[1][1]})/{rho!r}", "0"],
            ["0", "0", f"{w}/{Z}"],
        ],
        "guards": list(metric.guards) + [Z],
    })


def _entry_21(
    h: MetricSpec,
    zeta: str,
    z_domain: Tuple[float, float],
    p: Dict[str, float],
    generators: List[Generator],
    kind: EntryKind = "21",
    partner: bool = True,
    controls: Sequence[Sequence[str]] = (),
    rho: float = 1.0,
    transport: Sequence[int] = (),
    constant_curvature: bool = False,
    psi_prime: Optional[str] = None,
) -> Dict[str, Any]:
    base = h.with_params(**p)
    metric = warped_product(base, zeta, "z", z_domain)
    fields = {
        "kind": kind, "metric": metric, "generators": generators, "h": base, "zeta": zeta, "rho": rho,
        "negative_controls": _controls(*controls), "transport": list(transport),
        "constant_curvature": constant_curvature, "psi_prime": psi_prime,
    }
    if partner:
        fields["partner"] = _partner_21(base, zeta, rho, metric)
        fields["eigenvalue_fields"] = [repr(rho), repr(rho), f"({zeta})+{rho!r}"]
        fields["multiplicities"] = [2, 1]
    return fields


D_Z = ("0", "0", "1")
INV_Z = ("0", "0", "1/z")
TAN_Z = ("0", "0", "tan(z)")
TANH_Z = ("0", "0", "tanh(z)")
Z_D_Z = ("0", "0", "z")
BETA_RANGE = {"beta": (0.1, 10.0)}


@register(
    "21-essential-invz2",
    "[2-1] metric beta/z^2 (h + dz^2) with h free of homotheties; (1/z) d/dz is essential",
    {"beta": 1.0}, BETA_RANGE,
)
def _essential_invz2(p: Dict[str, float]) -> Dict[str, Any]:
    return _entry_21(h_generic(), "beta/z^2", (0.5, 1.5), p, [_gen(INV_Z, "essential")],
                     controls=[D_Z, Z_D_Z], transport=(0,))


@register(
    "21-essential-tan",
    "[2-1] metric beta (1 + tan^2 z)(h + dz^2) with h free of Killing fields; tan(z) d/dz is essential",
    {"beta": 1.0}, BETA_RANGE,
)
def _essential_tan(p: Dict[str, float]) -> Dict[str, Any]:
    return _entry_21(h_generic(), "beta*(1+tan(z)^2)", (0.2, 1.0), p, [_gen(TAN_Z, "essential")], controls=[D_Z])


@register(
    "21-essential-tanh",
    "[2-1] metric beta (1 - tanh^2 z)(h + dz^2) with h free of Killing fields; tanh(z) d/dz is essential",
    {"beta": 1.0}, BETA_RANGE,
)
def _essential_tanh(p: Dict[str, float]) -> Dict[str, Any]:
    return _entry_21(h_generic(), "beta*(1-tanh(z)^2)", (0.2, 1.5), p, [_gen(TANH_Z, "essential")], controls=[D_Z])


# h with a one-dimensional homothety algebra


@register(
    "21-killing-exp",
    "[2-1] metric eps e^{beta z}(h + dz^2), d/dx Killing for h; d/dx Killing and d/dz homothetic",
    {"eps": 1.0, "beta": 1.0}, {"eps": (1.0, 1.0), "beta": (0.1, 3.0)},
)
def _killing_exp(p: Dict[str, float]) -> Dict[str, Any]:
    gens = [_gen(("1", "0", "0"), "killing"), _gen(D_Z, "homothetic")]
    return _entry_21(h_killing(), "eps*exp(beta*z)", (-0.5, 0.5), p, gens, controls=[INV_Z])


@register(
    "21-homothetic-invz2",
    "[2-1] metric eta/z^2 (h + dz^2), L_{d/dx} h = h; d/dx + (z/2) d/dz Killing, (1/z) d/dz essential",
    {"eta": 1.0}, {"eta": (0.1, 10.0)},
)
def _homothetic_invz2(p: Dict[str, float]) -> Dict[str, Any]:
    gens = [_gen(("1", "0", "z/2"), "killing"), _gen(INV_Z, "essential")]
    return _entry_21(h_homothetic(), "eta/z^2", (0.5, 1.5), p, gens, controls=[D_Z])


@register(
    "21-killing-tan",
    "[2-1] metric eta (1 + tan^2 z)(h + dz^2), d/dx Killing for h; tan(z) d/dz essential",
    {"eta": 1.0}, {"eta": (0.1, 10.0)},
)
def _killing_tan(p: Dict[str, float]) -> Dict[str, Any]:
    gens = [_gen(("1", "0", "0"), "killing"), _gen(TAN_Z, "essential")]
    return _entry_21(h_killing(), "eta*(1+tan(z)^2)", (0.2, 1.0), p, gens, controls=[D_Z])


@register(
    "21-killing-tanh",
    "[2-1] metric eta (1 - tanh^2 z)(h + dz^2), d/dx Killing for h; tanh(z) d/dz essential",
    {"eta": 1.0}, {"eta": (0.1, 10.0)},
)
def _killing_tanh(p: Dict[str, float]) -> Dict[str, Any]:
    gens = [_gen(("1", "0", "0"), "killing"), _gen(TANH_Z, "essential")]
    return _entry_21(h_killing(), "eta*(1-tanh(z)^2)", (0.2, 1.5), p, gens, controls=[D_Z])


# h = eps1 e^{(beta+2)x} dx^2 + eps2 e^{beta x} dy^2 with a two-dimensional homothety algebra

def _power_k_exclusions(p: Dict[str, float]) -> None:
    _exclude(p, "k", (-2.0, 0.0), "k = -2 makes the field Killing and k = 0 a product")


def _psi_k_exclusions(p: Dict[str, float]) -> None:
    _exclude(p, "k", (-1.0,), "k = -1 is outside the psi family")


EXP_H_RANGES = {"beta": (-5.0, 5.0), "eps1": (1.0, 1.0), "eps2": (1.0, 1.0)}
D_Y = ("0", "1", "0")


def _exp_h(zeta: str, z_domain: Tuple[float, float], vertical: Optional[str], extra: List[Tuple[Sequence[str], Claim]],
           claim: Claim = "killing", controls: Sequence[Sequence[str]] = (), transport: Sequence[int] = (),
           psi_prime: Optional[str] = None, check: Optional[Callable[[Dict[str, float]], None]] = None) -> Builder:
    """``vertical`` is the ∂z part of 2∂x + 2y∂y + (...)∂z, or None when that field is absent."""

    def build(p: Dict[str, float]) -> Dict[str, Any]:
        _exclude(p, "beta", (-2.0, 0.0), "h needs beta outside {-2, 0}")
        if check is not None:
            check(p)
        gens = [_gen(D_Y, "killing")]
        if vertical is not None:
            gens.append(_gen(("2", "2*y", vertical), claim))
        gens.extend(_gen(c, kind) for c, kind in extra)
        return _entry_21(h_exp(), zeta, z_domain, p, gens, controls=controls, transport=transport, psi_prime=psi_prime)

    return build


register(
    "21-exp-h-invz2",
    "[2-1] metric eta/z^2 (h + dz^2) over the exponential h; d/dy and 2d/dx + 2y d/dy + (beta+2) z d/dz Killing, "
    "(1/z) d/dz essential",
    {**EXP_H_DEFAULTS, "eta": 1.0}, {**EXP_H_RANGES, "eta": (0.1, 10.0)},
)(_exp_h("eta/z^2", (0.5, 1.8), "(beta+2)*z", [(INV_Z, "essential")], controls=[D_Z], transport=(0, 1, 2)))
register(
    "21-exp-h-exp",
    "[2-1] metric eta e^z (h + dz^2) over the exponential h; d/dy Killing, d/dz homothetic",
    {**EXP_H_DEFAULTS, "eta": 1.0}, {**EXP_H_RANGES, "eta": (0.1, 10.0)},
)(_exp_h("eta*exp(z)", (-0.5, 0.5), None, [(D_Z, "homothetic")], controls=[INV_Z]))
register(
    "21-exp-h-power",
    "[2-1] metric eps |z|^k (h + dz^2) over the exponential h; 2d/dx + 2y d/dy + (beta+2) z d/dz homothetic",
    {**EXP_H_DEFAULTS, "k": 1.0}, {**EXP_H_RANGES, "k": (-5.0, 5.0)},
)(_exp_h("abs(z)^k", (0.5, 1.5), "(beta+2)*z", [], claim="homothetic", controls=[D_Z], check=_power_k_exclusions))
register(
    "21-exp-h-tan",
    "[2-1] metric eta (1 + tan^2 z)(h + dz^2) over the exponential h; d/dy Killing, tan(z) d/dz essential",
    {**EXP_H_DEFAULTS, "eta": 1.0}, {**EXP_H_RANGES, "eta": (0.1, 10.0)},
)(_exp_h("eta*(1+tan(z)^2)", (0.2, 1.0), None, [(TAN_Z, "essential")], controls=[D_Z]))
register(
    "21-exp-h-tanh",
    "[2-1] metric eta (1 - tanh^2 z)(h + dz^2) over the exponential h; d/dy Killing, tanh(z) d/dz essential",
    {**EXP_H_DEFAULTS, "eta": 1.0}, {**EXP_H_RANGES, "eta": (0.1, 10.0)},
)(_exp_h("eta*(1-tanh(z)^2)", (0.2, 1.5), None, [(TANH_Z, "essential")], controls=[D_Z]))
register(
    "21-exp-h-psi",
    "[2-1] metric eta psi'(z)(h + dz^2), (psi - z) psi'' = 2 psi'(psi' - k); "
    "2d/dx + 2y d/dy + (beta+2)(z - psi) d/dz essential. Geometry runs on the k = 1 solution psi' = tanh^2 z, "
    "the psi checks integrate the ODE at the given k",
    {**EXP_H_DEFAULTS, "eta": 1.0, "k": 1.0}, {**EXP_H_RANGES, "eta": (0.1, 10.0), "k": (-2.0, 2.0)},
)(_exp_h("eta*tanh(z)^2", (0.5, 1.5), "(beta+2)*tanh(z)", [], claim="essential", controls=[D_Z],
         psi_prime="tanh(z)^2", check=_psi_k_exclusions))


# exactly one-dimensional projective algebras


@register(
    "21-single-killing",
    "[2-1] metric (1 + z^2)(h + dz^2) with h of one-dimensional Killing algebra; only d/dx",
)
def _single_killing(p: Dict[str, float]) -> Dict[str, Any]:
    return _entry_21(h_killing(), "1+z^2", (0.5, 1.5), p, [_gen(("1", "0", "0"), "killing")],
                     controls=[D_Z, Z_D_Z, INV_Z, TAN_Z])


@register(
    "21-single-exp",
    "[2-1] metric eps e^{beta z}(h + dz^2) with h free of Killing fields; only d/dz, homothetic",
    {"beta": 1.0, "eps": 1.0}, {"beta": (0.1, 3.0), "eps": (1.0, 1.0)},
)
def _single_exp(p: Dict[str, float]) -> Dict[str, Any]:
    return _entry_21(h_generic_alt(), "eps*exp(beta*z)", (-0.5, 0.5), p, [_gen(D_Z, "homothetic")],
                     controls=[INV_Z, TAN_Z])


@register(
    "21-single-invz2",
    "[2-1] metric eta/z^2 (h + dz^2) with h free of homotheties; only (1/z) d/dz, essential",
    {"eta": 1.0}, {"eta": (0.1, 10.0)},
)
def _single_invz2(p: Dict[str, float]) -> Dict[str, Any]:
    return _entry_21(h_generic_alt(), "eta/z^2", (0.5, 1.5), p, [_gen(INV_Z, "essential")], controls=[D_Z, Z_D_Z])


@register(
    "21-single-tan",
    "[2-1] metric eta (1 + tan^2 z)(h + dz^2) with h free of Killing fields; only tan(z) d/dz, essential",
    {"eta": 1.0}, {"eta": (0.1, 10.0)},
)
def _single_tan(p: Dict[str, float]) -> Dict[str, Any]:
    return _entry_21(h_generic_alt(), "eta*(1+tan(z)^2)", (0.2, 1.0), p, [_gen(TAN_Z, "essential")],
                     controls=[D_Z, INV_Z])


@register(
    "21-single-tanh",
    "[2-1] metric eta (1 - tanh^2 z)(h + dz^2) with h free of Killing fields; only tanh(z) d/dz, essential",
    {"eta": 1.0}, {"eta": (0.1, 10.0)},
)
def _single_tanh(p: Dict[str, float]) -> Dict[str, Any]:
    return _entry_21(h_generic_alt(), "eta*(1-tanh(z)^2)", (0.2, 1.5), p, [_gen(TANH_Z, "essential")],
                     controls=[D_Z, INV_Z])


# constant curvature [2-1] normal forms

SPHERE_U1 = ("cos(y)", "-sin(y)/tan(x)", "0")
SPHERE_U2 = ("sin(y)", "cos(y)/tan(x)", "0")
HYPERBOLIC_U1 = ("cos(y)", "-sin(y)/tanh(x)", "0")
HYPERBOLIC_U2 = ("sin(y)", "cos(y)/tanh(x)", "0")
ROTATION = ("y", "-x", "0")
D_X = ("1", "0", "0")


def _round_fields(trig: str) -> List[Generator]:
    u1, u2 = (SPHERE_U1, SPHERE_U2) if trig == "sin" else (HYPERBOLIC_U1, HYPERBOLIC_U2)
    return [_gen(D_Y, "killing"), _gen(u1, "killing"), _gen(u2, "killing")]


def _cc_entry(zeta: str, sign: int, trig: str) -> Builder:
    """ζ(z)(sign dx² + trig²(x) dy² + dz²) of constant curvature."""

    def build(p: Dict[str, float]) -> Dict[str, Any]:
        h = _h(f"{trig}-{sign}", f"{sign}", "0", f"{trig}(x)^2", [(0.6, 1.4), (-0.5, 0.5)], [f"{trig}(x)"])
        gens = _round_fields(trig) if sign > 0 else [_gen(D_Y, "killing")]
        return _entry_21(h, zeta, (-0.5, 0.5), p, gens, kind="constant_curvature", partner=False,
                         constant_curvature=True)

    return build


@register("21-cc-flat-1a", "constant curvature [2-1] form: flat, eps0 (dx^2 + dy^2 + dz^2)", {"k": 1.0}, {"k": (0.1, 10.0)})
def _cc_flat_1a(p: Dict[str, float]) -> Dict[str, Any]:
    gens = [_gen(D_X, "killing"), _gen(D_Y, "killing"), _gen(DILATION, "homothetic")]
    return _entry_21(h_flat(), "k", (0.5, 1.5), p, gens, kind="constant_curvature", partner=False,
                     constant_curvature=True)


@register("21-cc-flat-1b", "constant curvature [2-1] form: zero curvature k/z^2 (dx^2 + dy^2 + dz^2)",
          {"k": 1.0}, {"k": (0.1, 10.0)})
def _cc_flat_1b(p: Dict[str, float]) -> Dict[str, Any]:
    gens = [_gen(D_X, "killing"), _gen(D_Y, "killing"), _gen(DILATION, "killing")]
    return _entry_21(h_flat(), "k/z^2", (0.5, 1.5), p, gens, kind="constant_curvature", partner=False,
                     constant_curvature=True)


_CC_FORMS = [
    ("21-cc-sphere-2a", "positive curvature k/cosh^2 z (dx^2 + sin^2 x dy^2 + dz^2)", "k/cosh(z)^2", 1, "sin"),
    ("21-cc-sphere-2b", "positive curvature -k/cos^2 z (-dx^2 + sin^2 x dy^2 + dz^2)", "-k/cos(z)^2", -1, "sin"),
    ("21-cc-sphere-2c", "positive curvature k/cosh^2 z (-dx^2 + sinh^2 x dy^2 + dz^2)", "k/cosh(z)^2", -1, "sinh"),
    ("21-cc-sphere-2d", "positive curvature -k/cos^2 z (dx^2 + sinh^2 x dy^2 + dz^2)", "-k/cos(z)^2", 1, "sinh"),
    ("21-cc-hyperbolic-3a", "negative curvature -k/cosh^2 z (dx^2 + sin^2 x dy^2 + dz^2)", "-k/cosh(z)^2", 1, "sin"),
    ("21-cc-hyperbolic-3b", "negative curvature k/cos^2 z (-dx^2 + sin^2 x dy^2 + dz^2)", "k/cos(z)^2", -1, "sin"),
    ("21-cc-hyperbolic-3c", "negative curvature -k/cosh^2 z (-dx^2 + sinh^2 x dy^2 + dz^2)", "-k/cosh(z)^2", -1, "sinh"),
    ("21-cc-hyperbolic-3d", "negative curvature k/cos^2 z (dx^2 + sinh^2 x dy^2 + dz^2)", "k/cos(z)^2", 1, "sinh"),
]

for _id, _anchor, _zeta, _sign, _trig in _CC_FORMS:
    register(_id, f"constant curvature [2-1] form: {_anchor}", {"k": 1.0}, {"k": (0.1, 10.0)})(
        _cc_entry(_zeta, _sign, _trig)
    )


@register(
    "21-cc-flat-general",
    "zeta (dx^2 + dy^2 + dz^2) has constant curvature for zeta = eps/(c1 z + c2)^2",
    {"c1": 1.0, "c2": 0.5}, {"c1": (0.5, 2.0), "c2": (0.0, 1.0)},
)
def _cc_flat_general(p: Dict[str, float]) -> Dict[str, Any]:
    gens = [_gen(D_X, "killing"), _gen(D_Y, "killing"), _gen(ROTATION, "killing")]
    return _entry_21(h_flat(), "1/(c1*z+c2)^2", (0.5, 1.5), p, gens, kind="constant_curvature", partner=False,
                     constant_curvature=True)


@register(
    "21-cc-sphere-general",
    "zeta (dx^2 + sin^2 x dy^2 + dz^2) has constant curvature for zeta = e^{-2z}/(c0 + c1 e^{-2z})^2",
    {"c0": 1.0, "c1": 1.0}, {"c0": (0.5, 2.0), "c1": (0.5, 2.0)},
)
def _cc_sphere_general(p: Dict[str, float]) -> Dict[str, Any]:
    return _entry_21(h_sphere(), "exp(-2*z)/(c0+c1*exp(-2*z))^2", (-0.5, 0.5), p, _round_fields("sin"),
                     kind="constant_curvature", partner=False, constant_curvature=True)


@register(
    "21-cc-hyperbolic-general",
    "zeta (dx^2 + sinh^2 x dy^2 + dz^2) has constant curvature for zeta = 1/(c1 sin z + c2 cos z)^2",
    {"c1": 1.0, "c2": 1.0}, {"c1": (0.5, 1.5), "c2": (0.8, 1.5)},
)
def _cc_hyperbolic_general(p: Dict[str, float]) -> Dict[str, Any]:
    return _entry_21(h_hyperbolic(), "1/(c1*sin(z)+c2*cos(z))^2", (-0.5, 0.5), p, _round_fields("sinh"),
                     kind="constant_curvature", partner=False, constant_curvature=True)


# products with a line

EXP_H_U = ("1", "y", "0")


@register(
    "product-constant-factor",
    "k (h + dz^2) is projectively invariant under u + (k1 z + k0) d/dz for every homothety u of h",
    {"k": 2.0, "beta": 1.0, "eps1": 1.0, "eps2": 1.0},
    {"k": (0.1, 10.0), "beta": (-5.0, 5.0), "eps1": (1.0, 1.0), "eps2": (1.0, 1.0)},
)
def _product_constant(p: Dict[str, float]) -> Dict[str, Any]:
    _exclude(p, "beta", (-2.0, 0.0), "h needs beta outside {-2, 0}")
    gens = [_gen(D_Z, "killing"), _gen(Z_D_Z, "essential"), _gen(EXP_H_U, "essential"), _gen(D_Y, "killing")]
    return _entry_21(h_exp(), "k", (0.5, 1.5), p, gens, kind="product", partner=False, controls=[INV_Z])


@register(
    "submaximal-sphere-line",
    "dx^2 + sin^2 x dy^2 + dz^2 has the five-dimensional projective algebra of the sphere times a line",
)
def _submaximal_sphere(p: Dict[str, float]) -> Dict[str, Any]:
    gens = _round_fields("sin") + [_gen(Z_D_Z, "essential"), _gen(D_Z, "killing")]
    return _entry_21(h_sphere(), "1", (0.5, 1.5), p, gens, kind="product", partner=False,
                     controls=[INV_Z], transport=(1, 3, 4))


@register(
    "submaximal-hyperbolic-line",
    "dx^2 + sinh^2 x dy^2 + dz^2 also realises the five-dimensional projective algebra",
)
def _submaximal_hyperbolic(p: Dict[str, float]) -> Dict[str, Any]:
    gens = _round_fields("sinh") + [_gen(Z_D_Z, "essential"), _gen(D_Z, "killing")]
    return _entry_21(h_hyperbolic(), "1", (0.5, 1.5), p, gens, kind="product", partner=False, controls=[INV_Z])


@register(
    "product-exp-line",
    "h + dz^2 over the exponential h: d/dx + y d/dy, d/dy, z d/dz and d/dz",
    {"beta": 1.0, "eps1": 1.0, "eps2": 1.0}, {"beta": (-5.0, 5.0), "eps1": (1.0, 1.0), "eps2": (1.0, 1.0)},
)
def _product_exp(p: Dict[str, float]) -> Dict[str, Any]:
    _exclude(p, "beta", (-2.0, 0.0), "h needs beta outside {-2, 0}")
    gens = [_gen(EXP_H_U, "essential"), _gen(D_Y, "killing"), _gen(Z_D_Z, "essential"), _gen(D_Z, "killing")]
    return _entry_21(h_exp(), "1", (0.5, 1.5), p, gens, kind="product", partner=False, controls=[INV_Z])


# [2-1] over constant curvature h with extra projective fields

FLAT_KILLING = [_gen(D_X, "killing"), _gen(D_Y, "killing"), _gen(ROTATION, "killing")]


def _flat_power_exclusions(p: Dict[str, float]) -> None:
    _exclude(p, "k", (0.0, 2.0, -4.0), "these exponents give constant curvature or a constant factor")


def _cc_h_entry(h_factory: Callable[[], MetricSpec], base: List[Generator], zeta: str, z_domain: Tuple[float, float],
                extra: Sequence[Tuple[Sequence[str], Claim]], controls: Sequence[Sequence[str]],
                check: Optional[Callable[[Dict[str, float]], None]] = None,
                psi_prime: Optional[str] = None) -> Builder:
    def build(p: Dict[str, float]) -> Dict[str, Any]:
        if check is not None:
            check(p)
        gens = list(base) + [_gen(c, kind) for c, kind in extra]
        return _entry_21(h_factory(), zeta, z_domain, p, gens, partner=False, controls=controls, psi_prime=psi_prime)

    return build


register(
    "flat-power",
    "eps |z|^{-k}(dx^2 + dy^2 + dz^2): Euclidean Killing fields of h and a homothetic dilation",
    {"k": 1.0}, {"k": (-5.0, 5.0)},
)(_cc_h_entry(h_flat, FLAT_KILLING, "abs(z)^(-k)", (0.5, 1.5), [(DILATION, "homothetic")], [TAN_Z],
              _flat_power_exclusions))
register(
    "flat-exp",
    "eps e^z (dx^2 + dy^2 + dz^2): Euclidean Killing fields of h and d/dz homothetic",
    {"eps": 1.0}, {"eps": (1.0, 1.0)},
)(_cc_h_entry(h_flat, FLAT_KILLING, "eps*exp(z)", (-0.5, 0.5), [(D_Z, "homothetic")], [INV_Z]))
register(
    "flat-tan",
    "eta (1 + tan^2 z)(dx^2 + dy^2 + dz^2): Euclidean Killing fields of h and tan(z) d/dz essential",
    {"eta": 1.0}, {"eta": (0.1, 10.0)},
)(_cc_h_entry(h_flat, FLAT_KILLING, "eta*(1+tan(z)^2)", (0.2, 1.0), [(TAN_Z, "essential")], [D_Z]))
register(
    "flat-tanh",
    "eta (1 - tanh^2 z)(dx^2 + dy^2 + dz^2): Euclidean Killing fields of h and tanh(z) d/dz essential",
    {"eta": 1.0}, {"eta": (0.1, 10.0)},
)(_cc_h_entry(h_flat, FLAT_KILLING, "eta*(1-tanh(z)^2)", (0.2, 1.5), [(TANH_Z, "essential")], [D_Z]))
register(
    "flat-psi",
    "eta psi'(z)(dx^2 + dy^2 + dz^2) with psi' = tanh^2 z: x d/dx + y d/dy + (z - psi) d/dz essential",
    {"eta": 1.0}, {"eta": (0.1, 10.0)},
)(_cc_h_entry(h_flat, FLAT_KILLING, "eta*tanh(z)^2", (0.5, 1.5), [(("x", "y", "tanh(z)"), "essential")], [D_Z],
              psi_prime="tanh(z)^2"))

_ROUND_FAMILIES = [
    ("invz2", "eta/z^2", (0.5, 1.5), INV_Z, "essential", D_Z, {"eta": 1.0}),
    ("exp", "eps*exp(z)", (-0.5, 0.5), D_Z, "homothetic", INV_Z, {"eps": 1.0}),
    ("tan", "eta*(1+tan(z)^2)", (0.2, 1.0), TAN_Z, "essential", D_Z, {"eta": 1.0}),
    ("tanh", "eta*(1-tanh(z)^2)", (0.2, 1.5), TANH_Z, "essential", D_Z, {"eta": 1.0}),
]

for _family, _h_factory, _trig in (("sphere", h_sphere, "sin"), ("hyperbolic", h_hyperbolic, "sinh")):
    for _suffix, _zeta, _zdom, _field, _claim, _control, _defaults in _ROUND_FAMILIES:
        _name = next(iter(_defaults))
        register(
            f"{_family}-{_suffix}",
            f"{_zeta} (dx^2 + {_trig}^2 x dy^2 + dz^2): Killing fields of the {_family} and {_claim} {_field[2]} d/dz",
            _defaults, {_name: (1.0, 1.0) if _name == "eps" else (0.1, 10.0)},
        )(_cc_h_entry(_h_factory, _round_fields(_trig), _zeta, _zdom, [(_field, _claim)], [_control]))


# other dimensions and the homothetic normal form


@register(
    "homothetic-normal-form",
    "a homothetic field is d/dx in coordinates where g = e^{lambda x} h(y, z)",
    {"lam": 0.5}, {"lam": (-3.0, 3.0)},
)
def _homothetic_normal_form(p: Dict[str, float]) -> Dict[str, Any]:
    _exclude(p, "lam", (0.0,), "lambda = 0 makes d/dx Killing")
    e = "exp(lam*x)"
    h = [["2+sin(y*z)", "0.1*z", "0"], ["1+y^2", "0.2*y"], ["1.5+cos(z)"]]
    g = [[f"{e}*({c})" for c in row] for row in h]
    metric = MetricSpec(
        name="homothetic-normal-form", dim=3, coords=["x", "y", "z"], g=g, params=dict(p),
        domain=[(-0.5, 0.5), (0.0, 1.0), (0.0, 1.0)],
    )
    return dict(kind="homothetic_normal_form", metric=metric, generators=[_gen(D_X, "homothetic")],
                negative_controls=_controls())


@register(
    "lorentz2d-nondiag",
    "2(y^2 + x) dx dy and its partner have a non-diagonalisable Benenti tensor with eigenvalue -y",
)
def _lorentz_2d(p: Dict[str, float]) -> Dict[str, Any]:
    domain = [(0.5, 1.5), (0.5, 1.5)]
    metric = MetricSpec(name="lorentz2d", dim=2, coords=["x", "y"], g=[["0", "y^2+x"], ["0"]],
                        domain=domain, guards=["y^2+x"])
    partner = MetricSpec(name="lorentz2d-partner", dim=2, coords=["x", "y"],
                         g=[["0", "-(y^2+x)/y^3"], ["(y^2+x)^2/y^4"]], domain=domain, guards=["y^2+x", "y"])
    return dict(
        kind="2d", metric=metric, partner=partner, generators=[_gen(("2*x", "y"), "homothetic")],
        eigenvalue_fields=["-y", "-y"], multiplicities=[2], diagonalizable=False,
        negative_controls=[VectorFieldSpec(components=list(c)) for c in CONTROLS_2D],
    )
