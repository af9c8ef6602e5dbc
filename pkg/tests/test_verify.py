import math

import pytest

from projsym.catalog import CatalogEntry, Generator, entry_ids, get_entry
from projsym.errors import ParamOutOfRange, UnknownEntry
from projsym.expr import evaluate
from projsym.models import MetricSpec, Tolerances, VectorFieldSpec
from projsym.verify import bind, verify_catalog_entry, verify_entry


def _names(report):
    return {check.name.split("[")[0] for check in report.checks}


def _failed(report):
    return {check.name: check.error for check in report.failed}


# Catalog entries

@pytest.mark.parametrize("entry_id", ["111-linear", "21-killing-exp", "homothetic-normal-form", "21-cc-flat-1b"])
def test_entries_pass(entry_id):
    report = verify_entry(entry_id, samples=20, seed=1)
    assert report.id == entry_id
    assert _failed(report) == {}


def test_report_structure():
    report = verify_entry("111-linear", samples=20, seed=1)
    assert {"symmetry", "coefficients", "classification", "action_fit", "action_class", "bracket",
            "negative_control", "benenti_eigenvalues", "multiplicities", "metrisability", "block111",
            "ode111", "solodovnikov"} <= _names(report)
    killing, dilation = report.generators
    assert killing.class_ == "killing"
    assert dilation.class_ == "homothetic"
    assert dilation.lam == pytest.approx(4.0)
    assert len(dilation.fitted_A) == 4
    dumped = report.model_dump(by_alias=True)
    assert "pass" in dumped["checks"][0]
    assert "class" in dumped["generators"][0]
    assert dumped["paper_anchor"] == report.anchor != ""
    assert "anchor" not in dumped


def test_bracket_closure_gate():
    report = verify_entry("111-linear", samples=20, seed=1)
    brackets = [c for c in report.checks if c.name.startswith("bracket")]
    assert brackets
    assert all(c.tol == 1e-7 and c.passed for c in brackets)


@pytest.mark.parametrize("k,extra", [(0.0, {"psi_inverf"}), (1.0, set()), (2.0, set())])
def test_psi_checks_follow_k(k, extra):
    report = verify_entry("21-exp-h-psi", {"k": k}, samples=10, seed=1)
    psi = [c for c in report.checks if c.name.startswith("psi_")]
    assert {c.name for c in psi} == {"psi_zeta", "psi_tanh", "psi_closed_form"} | extra
    assert all(c.passed for c in psi), [(c.name, c.max_residual, c.error) for c in psi if not c.passed]


def test_verification_is_reproducible():
    first = verify_entry("21-cc-flat-1b", samples=10, seed=4)
    again = verify_entry("21-cc-flat-1b", samples=10, seed=4)
    assert [c.max_residual for c in first.checks] == [c.max_residual for c in again.checks]


def test_lookup_errors_are_raised_before_checks():
    with pytest.raises(UnknownEntry):
        verify_entry("no-such-entry")
    with pytest.raises(ParamOutOfRange):
        verify_entry("homothetic-normal-form", {"lam": 0.0})


# Failures are recorded, not raised

def test_wrong_claim_is_reported():
    entry = get_entry("111-linear")
    wrong = [entry.generators[0], Generator(field=entry.generators[1].field, claimed="essential")]
    report = verify_catalog_entry(entry.model_copy(update={"generators": wrong}), samples=20, seed=1)
    failed = _failed(report)
    assert failed["classification[1]"] == "claimed essential, found homothetic"
    assert "action_class[1]" in failed
    assert "classification[0]" not in failed


def test_non_symmetry_is_reported():
    entry = get_entry("21-cc-flat-1b")
    gens = [Generator(field=VectorFieldSpec(components=["0", "x^2", "0"]), claimed="killing")]
    report = verify_catalog_entry(entry.model_copy(update={"generators": gens}), samples=20, seed=1)
    assert "symmetry[0]" in _failed(report)
    assert report.generators[0].max_symmetry_residual > 1e-3


def test_malformed_generator_is_reported():
    entry = get_entry("21-cc-flat-1b")
    gens = [Generator(field=VectorFieldSpec(components=["1", "0"]), claimed="killing")]
    report = verify_catalog_entry(entry.model_copy(update={"generators": gens}), samples=10, seed=1)
    check = next(c for c in report.checks if c.name == "symmetry[0]")
    assert not check.passed
    assert check.max_residual == math.inf


def test_unsampleable_metric_records_one_failure():
    metric = MetricSpec(dim=2, coords=["x", "y"], g=[["1", "1"], ["1"]], domain=[(0, 1), (0, 1)])
    entry = CatalogEntry(id="degenerate", kind="2d", anchor="rank one", metric=metric,
                         generators=[Generator(field=VectorFieldSpec(components=["1", "0"]), claimed="killing")])
    report = verify_catalog_entry(entry, samples=5)
    assert [c.name for c in report.checks] == ["sampling"]
    assert not report.checks[0].passed


def test_tolerances_scale_identities():
    tol = Tolerances().scaled(1e-6)
    assert tol.symmetry == 1e-6
    assert tol.identity == pytest.approx(1e-7)
    assert tol.negative_control == 1e-3


def test_bind_substitutes_parameters():
    expr = bind("beta/z^2 + k", {"beta": 2.0, "eta": 5.0})
    assert expr.names() == frozenset({"z", "k"})
    assert evaluate(expr, {"z": 1.0, "k": 0.5}) == pytest.approx(2.5)


@pytest.mark.slow
@pytest.mark.parametrize("entry_id", entry_ids())
def test_catalog_sweep(entry_id):
    report = verify_entry(entry_id, samples=40, seed=0)
    assert _failed(report) == {}
