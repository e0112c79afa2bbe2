import pytest

from plasmavac.suites import SUITES, UnknownSuiteError, run_suite, run_suites


@pytest.mark.parametrize("name", sorted(SUITES))
def test_suite_passes_on_small_samples(name):
    rep = run_suite(name, samples=30, seed=1)
    assert rep["ok"], [c for c in rep["checks"] if not c["passed"]]


def test_inject_single_check():
    rep = run_suite("determinants", samples=10, inject="determinants.det_J")
    failing = [c["name"] for c in rep["checks"] if not c["passed"]]
    assert failing == ["determinants.det_J"]


def test_inject_across_suites():
    rep = run_suites(["b0", "spectra"], samples=10, inject="spectra.incoming_counts")
    assert not rep["ok"]
    assert rep["failing"] == ["spectra.incoming_counts"]


def test_unknown_suite():
    with pytest.raises(UnknownSuiteError):
        run_suite("nope")
