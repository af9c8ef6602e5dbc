import pytest

from projsym.catalog import entry_ids
from projsym.errors import UnknownEntry
from projsym.models import CheckResult, EntryReport
from projsym.runner import (
    AsyncSuiteRunner,
    SuiteRunner,
    create_async_suite_runner,
    create_suite_runner,
    verify_all,
)


def _report(entry, samples=0, seed=0, tolerances=None):
    passed = entry.id != "111-linear"
    check = CheckResult(name="symmetry[0]", max_residual=0.0 if passed else 1.0, tol=1e-8, passed=passed)
    return EntryReport(id=entry.id, params=entry.params, checks=[check, check], generators=[], anchor=entry.anchor)


@pytest.fixture
def mocked_verify(mocker):
    """Replaces entry verification with a cheap stand-in"""
    return mocker.patch("projsym.runner.verify_catalog_entry", side_effect=_report)


# Serial runner

def test_unknown_id_is_rejected_up_front():
    with pytest.raises(UnknownEntry):
        SuiteRunner(ids=["111-linear", "no-such-entry"])


def test_config_echoes_the_run():
    runner = create_suite_runner(samples=12, seed=5, ids=["21-cc-flat-1b", "111-linear"])
    config = runner.config()
    assert set(config) == {"samples", "seed", "entries", "params", "tolerances"}
    assert config["entries"] == ["111-linear", "21-cc-flat-1b"]
    assert config["samples"] == 12
    assert config["tolerances"]["symmetry"] == 1e-8


def test_run_orders_and_counts(mocked_verify):
    report = create_suite_runner(ids=["homothetic-normal-form", "111-linear"]).run()
    assert [e.id for e in report.entries] == ["111-linear", "homothetic-normal-form"]
    assert report.total_checks == 4
    assert report.failed_checks == 2
    assert mocked_verify.call_count == 2


def test_default_selection_is_the_whole_registry(mocked_verify):
    report = SuiteRunner().run()
    assert [e.id for e in report.entries] == entry_ids()


def test_build_failure_becomes_a_check(mocked_verify):
    runner = SuiteRunner(ids=["homothetic-normal-form"], params={"lam": 0.0})
    report = runner.run()
    check = report.entries[0].checks[0]
    assert check.name == "build"
    assert not check.passed
    assert check.error.startswith("ParamOutOfRange")
    mocked_verify.assert_not_called()


def test_real_entry_runs_end_to_end():
    report = SuiteRunner(samples=10, seed=2, ids=["21-cc-flat-1b"]).run()
    assert report.failed_checks == 0
    assert report.total_checks > 0
    assert report.version


# Async runner

def test_max_concurrency_must_be_positive():
    with pytest.raises(ValueError):
        AsyncSuiteRunner(max_concurrency=0)


@pytest.mark.asyncio
async def test_async_run_matches_serial_order(mocked_verify):
    ids = ["21-cc-flat-1b", "homothetic-normal-form", "111-linear"]
    async with create_async_suite_runner(ids=ids, max_concurrency=2) as runner:
        report = await runner.run_async()
    assert [e.id for e in report.entries] == sorted(ids)
    assert report.failed_checks == 2
    assert report.total_checks == 6


@pytest.mark.asyncio
async def test_async_runner_without_context_manager(mocked_verify):
    runner = AsyncSuiteRunner(ids=["111-linear"], max_concurrency=1)
    entry = await runner.verify_async("111-linear")
    assert entry.id == "111-linear"


# verify_all

@pytest.mark.parametrize("parallel", [False, True])
def test_verify_all_covers_the_registry(mocked_verify, parallel):
    report = verify_all(samples=5, seed=3, tol=1e-6, parallel=parallel)
    assert [e.id for e in report.entries] == entry_ids()
    assert report.failed_checks == 2
    assert report.config["tolerances"]["symmetry"] == 1e-6
    assert report.config["seed"] == 3
