import pytest

from app import config


def test_defaults():
    tol = config.Tolerances()
    assert tol.hermitian_input == 1e-10
    assert tol.eig_offdiag == 1e-12
    assert tol.eig_max_sweeps == 100
    assert tol.ppt == 1e-9
    assert tol.kz_slack == 1e-12


def test_overrides_are_case_insensitive_and_typed():
    tol = config.with_overrides(config.Tolerances(), {"PPT": "1e-6", "eig_max_sweeps": "7"})
    assert tol.ppt == 1e-6
    assert tol.eig_max_sweeps == 7
    assert isinstance(tol.eig_max_sweeps, int)


def test_override_errors():
    with pytest.raises(ValueError, match="Unknown tolerance"):
        config.with_overrides(config.Tolerances(), {"nope": "1"})
    with pytest.raises(ValueError, match="numeric"):
        config.with_overrides(config.Tolerances(), {"ppt": "small"})


def test_parse_override():
    assert config.parse_override("ppt = 1e-8") == ("ppt", "1e-8")
    with pytest.raises(ValueError, match="NAME=VALUE"):
        config.parse_override("ppt")


def test_environment_overrides(monkeypatch):
    monkeypatch.setenv("ENTANGLE_TOL_DENSITY", "1e-7")
    assert config.load_tolerances().density == 1e-7


def test_set_tolerances_is_process_wide():
    custom = config.Tolerances(ppt=1e-3)
    config.set_tolerances(custom)
    assert config.current_tolerances() is custom
