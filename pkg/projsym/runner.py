import asyncio
import logging
import math
from typing import Any, Dict, List, Optional, Sequence

from ._version import __version__ as PROJSYM_VERSION
from .catalog import entry_ids, get_entry
from .errors import ProjsymError, UnknownEntry
from .models import CheckResult, EntryReport, SuiteReport, Tolerances
from .verify import verify_catalog_entry

logger = logging.getLogger(__name__)


def _build_failure(entry_id: str, error: ProjsymError) -> EntryReport:
    check = CheckResult(name="build", max_residual=math.inf, tol=0.0, passed=False,
                        error=f"{type(error).__name__}: {error}")
    return EntryReport(id=entry_id, params={}, checks=[check], generators=[], anchor="")


def _verify_one(entry_id: str, samples: int, seed: int, tolerances: Tolerances,
                params: Optional[Dict[str, float]] = None) -> EntryReport:
    try:
        entry = get_entry(entry_id, params)
    except UnknownEntry:
        raise
    except ProjsymError as e:
        logger.warning("could not build %s: %s", entry_id, e)
        return _build_failure(entry_id, e)
    return verify_catalog_entry(entry, samples, seed, tolerances)


class SuiteRunner:
    def __init__(
        self,
        samples: int = 200,
        seed: int = 0,
        tolerances: Optional[Tolerances] = None,
        ids: Optional[Sequence[str]] = None,
        params: Optional[Dict[str, float]] = None,
    ):
        known = set(entry_ids())
        for entry_id in ids or ():
            if entry_id not in known:
                raise UnknownEntry(entry_id)
        self.samples = samples
        self.seed = seed
        self.tolerances = tolerances if tolerances is not None else Tolerances()
        self.ids = sorted(ids) if ids else entry_ids()
        self.params = params

    def config(self) -> Dict[str, Any]:
        tol = self.tolerances
        return {
            "samples": self.samples,
            "seed": self.seed,
            "entries": list(self.ids),
            "params": dict(self.params or {}),
            "tolerances": {
                "identity": tol.identity,
                "symmetry": tol.symmetry,
                "integrator": tol.integrator,
                "guard": tol.guard,
                "clustering": tol.clustering,
                "negative_control": tol.negative_control,
            },
        }

    def verify(self, entry_id: str) -> EntryReport:
        logger.debug("entry %s", entry_id)
        return _verify_one(entry_id, self.samples, self.seed, self.tolerances, self.params)

    def assemble(self, reports: List[EntryReport]) -> SuiteReport:
        ordered = sorted(reports, key=lambda r: r.id)
        total = sum(len(r.checks) for r in ordered)
        failed = sum(len(r.failed) for r in ordered)
        logger.info("verified %d entries: %d of %d checks failed", len(ordered), failed, total)
        return SuiteReport(version=PROJSYM_VERSION, config=self.config(), entries=ordered,
                           failed_checks=failed, total_checks=total)

    def run(self) -> SuiteReport:
        logger.info("verifying %d entries serially", len(self.ids))
        return self.assemble([self.verify(entry_id) for entry_id in self.ids])


class AsyncSuiteRunner(SuiteRunner):
    """Verifies entries concurrently in worker threads; the report is merged in id order."""

    def __init__(
        self,
        samples: int = 200,
        seed: int = 0,
        tolerances: Optional[Tolerances] = None,
        ids: Optional[Sequence[str]] = None,
        params: Optional[Dict[str, float]] = None,
        max_concurrency: int = 4,
    ):
        super().__init__(samples, seed, tolerances, ids, params)
        if max_concurrency < 1:
            raise ValueError("max_concurrency must be at least 1")
        self.max_concurrency = max_concurrency
        self._semaphore: Optional[asyncio.Semaphore] = None

    async def __aenter__(self):
        self._semaphore = asyncio.Semaphore(self.max_concurrency)
        return self

    async def __aexit__(self, exc_type, exc_val, exc_tb):
        self._semaphore = None

    @property
    def semaphore(self) -> asyncio.Semaphore:
        if self._semaphore is None:
            self._semaphore = asyncio.Semaphore(self.max_concurrency)
        return self._semaphore

    async def verify_async(self, entry_id: str) -> EntryReport:
        async with self.semaphore:
            return await asyncio.to_thread(self.verify, entry_id)

    async def run_async(self) -> SuiteReport:
        logger.info("verifying %d entries with up to %d workers", len(self.ids), self.max_concurrency)
        reports = await asyncio.gather(*(self.verify_async(entry_id) for entry_id in self.ids))
        return self.assemble(list(reports))


def create_suite_runner(
    samples: int = 200,
    seed: int = 0,
    tolerances: Optional[Tolerances] = None,
    ids: Optional[Sequence[str]] = None,
    params: Optional[Dict[str, float]] = None,
) -> SuiteRunner:
    """Create a SuiteRunner.

    Args:
        samples: Jet points per symmetry check
        seed: Seed for every sample set
        tolerances: Optional thresholds, defaults to Tolerances()
        ids: Optional subset of catalog ids, defaults to the whole registry
        params: Optional parameter overrides applied to every selected entry

    Returns:
        A new SuiteRunner instance
    """
    return SuiteRunner(samples=samples, seed=seed, tolerances=tolerances, ids=ids, params=params)


def create_async_suite_runner(
    samples: int = 200,
    seed: int = 0,
    tolerances: Optional[Tolerances] = None,
    ids: Optional[Sequence[str]] = None,
    params: Optional[Dict[str, float]] = None,
    max_concurrency: int = 4,
) -> AsyncSuiteRunner:
    """Create an AsyncSuiteRunner; use it with ``async with``.

    Args:
        samples: Jet points per symmetry check
        seed: Seed for every sample set
        tolerances: Optional thresholds, defaults to Tolerances()
        ids: Optional subset of catalog ids, defaults to the whole registry
        params: Optional parameter overrides applied to every selected entry
        max_concurrency: Number of entries verified at the same time

    Returns:
        A new AsyncSuiteRunner instance
    """
    return AsyncSuiteRunner(samples=samples, seed=seed, tolerances=tolerances, ids=ids, params=params,
                            max_concurrency=max_concurrency)


def verify_all(samples: int = 200, seed: int = 0, tol: float = 1e-8, parallel: bool = False) -> SuiteReport:
    """Verify the whole registry; failures are recorded in the report, never raised.

    Args:
        samples: Jet points per symmetry check
        seed: Seed for every sample set
        tol: Symmetry tolerance, see Tolerances.scaled
        parallel: Verify entries in worker threads

    Returns:
        The merged SuiteReport
    """
    tolerances = Tolerances().scaled(tol)
    if not parallel:
        return create_suite_runner(samples, seed, tolerances).run()

    async def run_parallel() -> SuiteReport:
        async with create_async_suite_runner(samples, seed, tolerances) as runner:
            return await runner.run_async()

    return asyncio.run(run_parallel())
