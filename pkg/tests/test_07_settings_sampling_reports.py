"""
Settings loading, seeded sampling and report rendering.
"""

import json
from fractions import Fraction as F

import pytest

from lib import settings as settings_module
from lib.errors import InvalidRange, ParseError
from lib.reports import CommandReport, format_cell, render, render_csv, render_json, to_jsonable
from lib.sampling import TrialKey, random_rational, random_spectrum, spectrum_for_trial, trial_keys
from lib.settings import Tolerances, get_scan_defaults, get_tolerances, load_settings, reset_settings


# =============================================================================
# SETTINGS
# =============================================================================

def test_repository_settings_match_defaults():
    tol = get_tolerances()
    assert tol == Tolerances()
    assert tol.distinctness == 1e-9
    assert tol.bisection_max_iter == 200
    assert tol.clifford == 1e-12
    scan = get_scan_defaults()
    assert scan.n_range == (3, 6)
    assert scan.rational_bound == 50


def test_partial_settings_file_is_merged(tmp_path, monkeypatch):
    path = tmp_path / "settings.json"
    path.write_text(json.dumps({"tolerances": {"remark": 1e-7}, "scan": {"trials": 5}}))
    monkeypatch.setenv("RIGIDITYKIT_SETTINGS", str(path))
    reset_settings()
    assert get_tolerances().remark == 1e-7
    assert get_tolerances().residual == 1e-6
    assert get_scan_defaults().trials == 5
    assert load_settings()["logging"]["console_level"] == "INFO"


def test_missing_settings_file_uses_defaults(tmp_path, monkeypatch):
    monkeypatch.setenv("RIGIDITYKIT_SETTINGS", str(tmp_path / "absent.json"))
    reset_settings()
    assert load_settings() == settings_module.DEFAULT_SETTINGS


def test_tolerances_must_be_positive():
    with pytest.raises(ParseError):
        Tolerances(residual=0.0)
    with pytest.raises(ParseError):
        Tolerances.from_dict({"distinctness": -1e-9})


def test_tolerance_override_wins():
    override = Tolerances(remark=1e-3)
    assert get_tolerances(override) is override


# =============================================================================
# SAMPLING
# =============================================================================

def test_trial_rng_is_reproducible():
    key = TrialKey(seed=42, n=5, trial=3)
    assert spectrum_for_trial(key, 50) == spectrum_for_trial(key, 50)
    assert spectrum_for_trial(key, 50) != spectrum_for_trial(TrialKey(42, 5, 4), 50)


def test_random_rational_range():
    rng = TrialKey(1, 3, 0).rng()
    for _ in range(500):
        v = random_rational(rng, 7)
        assert v != 0
        assert abs(v.numerator) <= 7
        assert 1 <= v.denominator <= 7


def test_random_spectrum_is_distinct():
    rng = TrialKey(0, 8, 0).rng()
    s = random_spectrum(rng, 8, 4)
    assert s.n == 8
    assert len(set(s.values)) == 8


def test_random_spectrum_bound_too_small():
    with pytest.raises(InvalidRange):
        random_spectrum(TrialKey(0, 5, 0).rng(), 5, 2)
    with pytest.raises(InvalidRange):
        random_spectrum(TrialKey(0, 3, 0).rng(), 3, 0)


def test_trial_keys_order():
    keys = list(trial_keys(9, [3, 4], 2))
    assert [(k.n, k.trial) for k in keys] == [(3, 0), (3, 1), (4, 0), (4, 1)]
    assert all(k.seed == 9 for k in keys)


# =============================================================================
# REPORTS
# =============================================================================

def test_to_jsonable():
    assert to_jsonable({"a": F(-1, 2), "b": [F(3), 0.1], "c": float("inf")}) == {
        "a": "-1/2", "b": ["3", 0.1], "c": "inf",
    }


def test_format_cell():
    assert format_cell(F(5, 3)) == "5/3"
    assert format_cell(0.1) == "0.10000000000000001"
    assert format_cell(True) == "true"
    assert format_cell(None) == ""


def test_render_json_is_versioned():
    report = CommandReport("demo", {"x": F(1, 3)})
    assert json.loads(render_json(report)) == {"schema_version": 1, "command": "demo", "x": "1/3"}
    assert render_json(report).endswith("\n")


def test_render_csv_without_columns_lists_fields():
    report = CommandReport("demo", {"x": F(1, 3), "nested": {"skip": 1}, "flag": False})
    assert render_csv(report) == "field,value\nx,1/3\nflag,false\n"


def test_unknown_format():
    with pytest.raises(ValueError):
        render(CommandReport("demo", {}), "xml")
