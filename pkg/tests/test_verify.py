"""Tests for the self-check registry."""

import pytest

from waveprop import verify


def test_registry_lists_twenty_named_checks():
    checks = verify.list_checks()
    assert len(checks) == 20
    names = [name for name, _ in checks]
    assert len(set(names)) == 20
    for name, description in checks:
        assert name == name.lower()
        assert description


def test_run_checks_subset_structure():
    report = verify.run_checks(names=["scalar-ascent", "rule-symmetry"], seed=0)
    assert report["passed"] is True
    assert report["failures"] == []
    # results come back in registry order regardless of request order
    assert [c["name"] for c in report["checks"]] == ["rule-symmetry", "scalar-ascent"]
    for check in report["checks"]:
        assert check["passed"] is True
        assert set(check["gaps"]) == set(check["tolerances"])
        for key, gap in check["gaps"].items():
            assert gap <= check["tolerances"][key]


def test_run_checks_unknown_name():
    with pytest.raises(KeyError):
        verify.run_checks(names=["nonsense"])


def test_check_results_expose_formula_slug():
    report = verify.run_checks(names=["scalar-ascent"], seed=0)
    assert report["checks"][0]["formula"]
