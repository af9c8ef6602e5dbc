#!/usr/bin/env python3
"""
Example usage of projsym

This example demonstrates:
1. Verifying a single catalog entry
2. Testing a hand-written vector field on a hand-written metric
3. Verifying a few entries concurrently

Optional environment variables:
- PROJSYM_SEED: seed for the sample sets (defaults to 0)

Usage:
    python example.py
"""

import asyncio
import os

from projsym import (
    MetricSpec,
    VectorFieldSpec,
    classify_homothety,
    create_async_suite_runner,
    normalised_symmetry_residual,
    sample_points,
    verify_entry,
)
from projsym.errors import ProjsymError
from projsym.projective import sample_jets


def get_seed():
    """Read the sample seed from the environment."""
    value = os.getenv("PROJSYM_SEED", "0")
    try:
        return int(value)
    except ValueError:
        raise ValueError(f"PROJSYM_SEED must be an integer, got {value!r}")


def single_entry_example(seed):
    """Verify one registered entry and print its generator classes."""
    print("=== Single entry ===")
    try:
        report = verify_entry("111-linear", samples=50, seed=seed)
    except ProjsymError as e:
        print(f"Could not verify entry: {e.message}")
        return

    print(f"{report.id}: {len(report.checks)} checks, {len(report.failed)} failed")
    for i, generator in enumerate(report.generators):
        print(f"   generator {i}: claimed {generator.claimed}, found {generator.class_}")
        if generator.fitted_A:
            print(f"   action (a, b, c, d) = {[round(x, 6) for x in generator.fitted_A]}")
    for check in report.failed:
        print(f"   FAILED {check.name}: {check.max_residual:.3e} > {check.tol:.1e} {check.error or ''}")


def custom_field_example(seed):
    """Check a rotation and a dilation of the round 2-sphere times a line."""
    print("\n=== Custom metric ===")
    metric = MetricSpec(
        dim=3,
        coords=["x", "y", "z"],
        g=[["1", "0", "0"], ["sin(x)^2", "0"], ["1"]],
        domain=[(0.3, 2.8), (0.0, 6.0), (-1.0, 1.0)],
    )
    fields = {
        "rotation": VectorFieldSpec(components=["sin(y)", "cos(y)/tan(x)", "0"]),
        "translation": VectorFieldSpec(components=["0", "0", "1"]),
        "dilation": VectorFieldSpec(components=["0", "0", "z"]),
    }
    jets = sample_jets(metric, 50, seed_value=seed)
    points = sample_points(metric, 50, seed_value=seed)

    for name, field in fields.items():
        try:
            residual = max(normalised_symmetry_residual(metric, field, j) for j in jets)
            kind = classify_homothety(metric, field, points, tol=1e-8).kind
        except ProjsymError as e:
            print(f"   {name}: {e.message}")
            continue
        verdict = "projective" if residual < 1e-8 else "not projective"
        print(f"   {name}: residual {residual:.2e} ({verdict}), {kind}")


async def concurrent_example(seed):
    """Verify several entries in worker threads."""
    print("\n=== Concurrent run ===")
    ids = ["111-linear", "21-killing-exp", "homothetic-normal-form", "21-cc-flat-1b"]
    async with create_async_suite_runner(samples=50, seed=seed, ids=ids, max_concurrency=2) as runner:
        report = await runner.run_async()

    for entry in report.entries:
        status = "ok" if not entry.failed else f"{len(entry.failed)} failed"
        print(f"   {entry.id}: {status}")
    print(f"   {report.failed_checks} of {report.total_checks} checks failed")


def main():
    """Run all three examples."""
    print("projsym example")
    print("=" * 40)

    try:
        seed = get_seed()
    except ValueError as e:
        print(f"Configuration error: {e}")
        return

    single_entry_example(seed)
    custom_field_example(seed)
    asyncio.run(concurrent_example(seed))


if __name__ == "__main__":
    main()
