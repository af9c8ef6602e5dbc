"""Command-line front end.

Exit codes: 0 when every check passes, 1 when a check fails, 2 on usage,
configuration or input errors.
"""
import argparse
import asyncio
import csv
import datetime
import io
import json
import logging
import os
import sys
from pathlib import Path
from typing import Any, Dict, Iterable, List, Optional, Sequence

import numpy as np
from pydantic import ValidationError

from ._version import __version__
from .catalog import get_entry, list_entries
from .errors import ConfigError, ProjsymError
from .geometry import classify_homothety, sample_points
from .metrisability import benenti
from .models import JetPoint, MetricSpec, RunConfig, Tolerances, VectorFieldSpec
from .ode_families import solve_psi
from .projective import (
    geodesic_transport_defect,
    integrate_geodesic,
    normalised_symmetry_residual,
    sample_jets,
    trajectory_positions,
)
from .runner import create_async_suite_runner, create_suite_runner

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_CONFIG = 2


def _default_seed() -> int:
    raw = os.getenv("PROJSYM_SEED")
    if raw is None or raw == "":
        return 0
    try:
        return int(raw)
    except ValueError as e:
        raise ConfigError(f"PROJSYM_SEED must be an integer, got '{raw}'") from e


def _setup_logging(verbose: bool) -> None:
    level = logging.DEBUG if verbose else os.getenv("PROJSYM_LOG_LEVEL", "WARNING").upper()
    if not isinstance(logging.getLevelName(level), int) and not verbose:
        level = "WARNING"
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)


def _parse_params(items: Optional[Sequence[str]]) -> Dict[str, float]:
    params: Dict[str, float] = {}
    for item in items or ():
        name, sep, value = item.partition("=")
        if not sep or not name:
            raise ConfigError(f"Parameters are given as name=value, got '{item}'")
        try:
            params[name.strip()] = float(value)
        except ValueError as e:
            raise ConfigError(f"Parameter {name} needs a number, got '{value}'") from e
    return params


def _load_json(source: str) -> Any:
    """Inline JSON when the argument starts with '{' or '[', otherwise a file path."""
    text = source
    if not source.lstrip().startswith(("{", "[")):
        try:
            text = Path(source).read_text(encoding="utf-8")
        except OSError as e:
            raise ConfigError(f"Cannot read {source}: {e}") from e
    try:
        return json.loads(text)
    except json.JSONDecodeError as e:
        raise ConfigError(f"Invalid JSON in {source}: {e}") from e


def load_metric(source: str) -> MetricSpec:
    return MetricSpec.model_validate(_load_json(source))


def load_vector_field(source: str) -> VectorFieldSpec:
    data = _load_json(source)
    if isinstance(data, list):
        data = {"components": data}
    return VectorFieldSpec.model_validate(data)


def format_number(value: float) -> str:
    return f"{float(value):.17g}"


def write_csv(path: Optional[str], header: Sequence[str], rows: Iterable[Sequence[Any]]) -> None:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([format_number(x) if isinstance(x, (float, np.floating)) else x for x in row])
    if path:
        Path(path).write_text(buffer.getvalue(), encoding="utf-8")
    else:
        sys.stdout.write(buffer.getvalue())


def dump_json(payload: Dict[str, Any], path: Optional[str], timestamp: bool) -> None:
    header: Dict[str, Any] = {"tool": "projsym", "version": __version__}
    if timestamp:
        header["generated_at"] = datetime.datetime.now(datetime.timezone.utc).isoformat()
    text = json.dumps({"header": header, **payload}, sort_keys=True, indent=2) + "\n"
    if path:
        Path(path).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _tolerances(config: RunConfig) -> Tolerances:
    return Tolerances().scaled(config.tol)


def cmd_list(args: argparse.Namespace) -> int:
    for entry_id, anchor in list_entries():
        print(f"{entry_id}\t{anchor}")
    return EXIT_OK


def cmd_verify(args: argparse.Namespace) -> int:
    config = RunConfig(command="verify", entry=args.entry, samples=args.samples, seed=args.seed, tol=args.tol,
                       report=args.report, parallel=args.parallel)
    params = _parse_params(args.param)
    ids = [config.entry] if config.entry else None
    if params and not ids:
        raise ConfigError("--param needs --entry")
    if ids:
        get_entry(ids[0], params)
    tolerances = _tolerances(config)
    if config.parallel:
        async def run_parallel():
            async with create_async_suite_runner(config.samples, config.seed, tolerances, ids, params) as runner:
                return await runner.run_async()

        report = asyncio.run(run_parallel())
    else:
        report = create_suite_runner(config.samples, config.seed, tolerances, ids, params).run()
    dump_json({"report": report.model_dump(mode="json", by_alias=True)}, config.report, not args.no_timestamp)
    for entry in report.entries:
        for check in entry.failed:
            logger.warning("%s: %s failed (%s)", entry.id, check.name, check.error or check.max_residual)
    return EXIT_OK if report.failed_checks == 0 else EXIT_CHECK_FAILED


def cmd_check(args: argparse.Namespace) -> int:
    config = RunConfig(command="check", metric=args.metric, vf=args.vf, samples=args.samples, seed=args.seed,
                       tol=args.tol, report=args.report)
    assert config.metric is not None and config.vf is not None
    m = load_metric(config.metric)
    v = load_vector_field(config.vf)
    v.validate_for(m)
    tolerances = _tolerances(config)
    jets = sample_jets(m, config.samples, config.seed, threshold=tolerances.guard)
    residual = max(normalised_symmetry_residual(m, v, j, tolerances.guard) for j in jets)
    projective = residual <= tolerances.symmetry
    result: Dict[str, Any] = {"projective": projective, "max_residual": residual, "tol": tolerances.symmetry,
                              "class": None, "lam": None}
    if projective:
        points = sample_points(m, max(10, min(config.samples, 50)), config.seed, tolerances.guard)
        found = classify_homothety(m, v, points, tolerances.identity)
        result["class"] = "essential" if found.kind == "not_homothetic" else found.kind
        result["lam"] = found.lam
    dump_json({"check": result}, config.report, not args.no_timestamp)
    return EXIT_OK if projective else EXIT_CHECK_FAILED


def _grid_points(m: MetricSpec, n: int) -> List[List[float]]:
    """n points on the diagonal of the domain box, ends excluded."""
    lo = np.array([b[0] for b in m.domain], dtype=float)
    hi = np.array([b[1] for b in m.domain], dtype=float)
    return [list(lo + s * (hi - lo)) for s in np.linspace(0.0, 1.0, n + 2)[1:-1]]


def cmd_benenti(args: argparse.Namespace) -> int:
    config = RunConfig(command="benenti", entry=args.entry, grid=args.grid, out=args.out)
    assert config.entry is not None
    entry = get_entry(config.entry, _parse_params(args.param))
    if entry.partner is None:
        raise ConfigError(f"Entry '{entry.id}' has no partner metric")
    m = entry.metric
    header = list(m.coords) + [f"lambda{i + 1}" for i in range(m.dim)] + ["max_imag", "diagonalizable"]
    rows = []
    for p in _grid_points(m, config.grid):
        bt = benenti(m, entry.partner, p)
        values = sorted(bt.eigenvalues_real)
        rows.append(list(p) + values + [max(abs(x) for x in bt.eigenvalues_imag), int(bt.diagonalizable)])
    write_csv(config.out, header, rows)
    return EXIT_OK


def _metric_from_args(args: argparse.Namespace) -> MetricSpec:
    if args.metric:
        return load_metric(args.metric)
    if args.entry:
        return get_entry(args.entry, _parse_params(args.param)).metric
    raise ConfigError("Give --metric or --entry")


def _jet_from_args(m: MetricSpec, point: Optional[Sequence[float]], slopes: Optional[Sequence[float]]) -> JetPoint:
    base = list(point) if point else [0.5 * (lo + hi) for lo, hi in m.domain]
    slope_values = list(slopes) if slopes else [0.0] * (m.dim - 1)
    if len(base) != m.dim or len(slope_values) != m.dim - 1:
        raise ConfigError(f"A {m.dim}-dimensional metric needs {m.dim} coordinates and {m.dim - 1} slopes")
    return JetPoint(base=base, slopes=slope_values)


def cmd_geodesic(args: argparse.Namespace) -> int:
    config = RunConfig(command="geodesic", entry=args.entry, metric=args.metric, grid=args.grid, out=args.out,
                       range=tuple(args.range) if args.range else None)
    m = _metric_from_args(args)
    j0 = _jet_from_args(m, args.point, args.slopes)
    span = config.range if config.range is not None else tuple(m.domain[0])
    traj = integrate_geodesic(m, j0, span, tol=args.rk_tol)
    lo, hi = float(np.min(traj.ts)), float(np.max(traj.ts))
    xs = np.linspace(lo, hi, config.grid)
    positions = trajectory_positions(traj, xs)
    r = m.dim - 1
    header = list(m.coords) + [f"{c}_{m.coords[0]}" for c in m.coords[1:]]
    rows = [list(pos) + list(traj.at(float(x))[r:]) for x, pos in zip(xs, positions)]
    write_csv(config.out, header, rows)
    if traj.truncated:
        logger.warning("geodesic left the domain; emitted x in [%g, %g]", lo, hi)
    return EXIT_OK


def cmd_transport(args: argparse.Namespace) -> int:
    config = RunConfig(command="transport", entry=args.entry, out=args.out, tol=args.tol)
    assert config.entry is not None
    entry = get_entry(config.entry, _parse_params(args.param))
    indices = args.generator if args.generator else list(range(len(entry.generators)))
    tolerances = _tolerances(config)
    m = entry.metric
    j0 = _jet_from_args(m, args.point, args.slopes or [0.3, -0.2][: m.dim - 1])
    rows = []
    failed = False
    for index in indices:
        if not 0 <= index < len(entry.generators):
            raise ConfigError(f"Entry '{entry.id}' has no generator {index}")
        v = entry.generators[index].field
        try:
            defect = geodesic_transport_defect(m, v, j0, args.time, args.length, tol=args.rk_tol)
        except ProjsymError as e:
            logger.warning("generator %d: %s", index, e)
            defect = float("inf")
        failed = failed or defect > tolerances.integrator
        rows.append([index, str(v), args.time, defect])
    write_csv(config.out, ["generator", "field", "t", "defect"], rows)
    return EXIT_CHECK_FAILED if failed else EXIT_OK


def cmd_solve_psi(args: argparse.Namespace) -> int:
    config = RunConfig(command="solve-psi", k=args.k, range=tuple(args.range), init=tuple(args.init),
                       grid=args.grid, out=args.out)
    assert config.k is not None and config.range is not None and config.init is not None
    solution = solve_psi(config.k, config.range, config.init, n_points=config.grid)
    rows = zip(solution.z, solution.psi, solution.psi_prime, solution.residual)
    write_csv(config.out, ["z", "psi", "psi_prime", "residual"], rows)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="projsym", description="Verify projective vector fields of 3D metrics.")
    parser.add_argument("--version", action="version", version=f"projsym {__version__}")
    parser.add_argument("--verbose", "-v", action="store_true", help="log at DEBUG level")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p: argparse.ArgumentParser, samples: bool = True) -> None:
        if samples:
            p.add_argument("--samples", type=int, default=200)
            p.add_argument("--seed", type=int, default=None, help="defaults to $PROJSYM_SEED or 0")
        p.add_argument("--tol", type=float, default=1e-8)

    def entry_args(p: argparse.ArgumentParser, required: bool) -> None:
        p.add_argument("--entry", required=required)
        p.add_argument("--param", action="append", metavar="NAME=VALUE")

    sub.add_parser("list", help="list catalog entries").set_defaults(handler=cmd_list)

    p = sub.add_parser("verify", help="verify catalog entries")
    entry_args(p, False)
    common(p)
    p.add_argument("--report")
    p.add_argument("--parallel", action="store_true")
    p.add_argument("--no-timestamp", action="store_true")
    p.set_defaults(handler=cmd_verify)

    p = sub.add_parser("check", help="test one vector field on one metric")
    p.add_argument("--metric", required=True)
    p.add_argument("--vf", required=True)
    common(p)
    p.add_argument("--report")
    p.add_argument("--no-timestamp", action="store_true")
    p.set_defaults(handler=cmd_check)

    p = sub.add_parser("benenti", help="Benenti eigenvalues along the domain diagonal")
    entry_args(p, True)
    p.add_argument("--grid", type=int, default=21)
    p.add_argument("--out")
    p.set_defaults(handler=cmd_benenti)

    p = sub.add_parser("geodesic", help="integrate one geodesic")
    entry_args(p, False)
    p.add_argument("--metric")
    p.add_argument("--point", type=float, nargs="+")
    p.add_argument("--slopes", type=float, nargs="+")
    p.add_argument("--range", type=float, nargs=2)
    p.add_argument("--grid", type=int, default=21)
    p.add_argument("--rk-tol", type=float, default=1e-10)
    p.add_argument("--out")
    p.set_defaults(handler=cmd_geodesic)

    p = sub.add_parser("transport", help="geodesic transport defect of catalog generators")
    entry_args(p, True)
    common(p, samples=False)
    p.add_argument("--generator", type=int, action="append")
    p.add_argument("--point", type=float, nargs="+")
    p.add_argument("--slopes", type=float, nargs="+")
    p.add_argument("--time", type=float, default=0.1)
    p.add_argument("--length", type=float, default=0.3)
    p.add_argument("--rk-tol", type=float, default=1e-10)
    p.add_argument("--out")
    p.set_defaults(handler=cmd_transport)

    p = sub.add_parser("solve-psi", help="integrate (psi - z) psi'' = 2 psi'(psi' - k)")
    p.add_argument("--k", type=float, required=True)
    p.add_argument("--range", type=float, nargs=2, required=True)
    p.add_argument("--init", type=float, nargs=2, required=True, metavar=("PSI", "DPSI"))
    p.add_argument("--grid", type=int, default=21)
    p.add_argument("--out")
    p.set_defaults(handler=cmd_solve_psi)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code) if isinstance(e.code, int) else EXIT_CONFIG
    _setup_logging(args.verbose)
    try:
        if getattr(args, "seed", "absent") is None:
            args.seed = _default_seed()
        return args.handler(args)
    except (ProjsymError, ValidationError) as e:
        print(f"projsym: error: {e}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
