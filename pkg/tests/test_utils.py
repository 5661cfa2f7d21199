"""
Tests de utilidades: validadores, configuración, errores y logging.
"""

import json
import logging

import pytest

from utils.config_loader import Config, _merge
from utils.errors import (
    ApproximationDomain,
    EHNetError,
    NoConvergence,
    OutOfRange,
    PreconditionViolated,
    UsageError,
    ValidationError,
    VerificationFailed,
    ZeroAnalyticValue,
)
from utils.logger import setup_logging
from utils.validators import (
    parse_int_range,
    require_open_probability,
    require_positive_int,
    require_positive_real,
    validate_integer,
    validate_probability,
)


###############################################################################
# Validators
###############################################################################
@pytest.mark.parametrize("value, expected", [
    ("7", 7), (3.0, 3), (2.5, None), (True, None), ("x", None), (None, None),
])
def test_validate_integer(value, expected):
    assert validate_integer(value) == expected


def test_validate_integer_bounds():
    assert validate_integer(5, min_val=1, max_val=5) == 5
    assert validate_integer(6, min_val=1, max_val=5) is None


def test_validate_probability():
    assert validate_probability(0.0) and validate_probability("1")
    assert not validate_probability(1.01)
    assert not validate_probability(float("nan"))


def test_require_positive_int_names_field():
    assert require_positive_int("gamma1", 4, max_val=10) == 4
    with pytest.raises(OutOfRange) as exc:
        require_positive_int("gamma1", 11, max_val=10)
    assert exc.value.field == "gamma1"
    assert exc.value.exit_code == 3


def test_require_positive_real():
    assert require_positive_real("delta_prime", "0.04") == pytest.approx(0.04)
    with pytest.raises(ValidationError):
        require_positive_real("delta_prime", 0)
    with pytest.raises(ValidationError):
        require_positive_real("delta_prime", "abc")


def test_require_open_probability():
    assert require_open_probability("p", 1.0, allow_one=True) == 1.0
    with pytest.raises(OutOfRange):
        require_open_probability("p", 1.0)
    with pytest.raises(OutOfRange):
        require_open_probability("p", 0.0, allow_one=True)


@pytest.mark.parametrize("text, expected", [("1:10", (1, 10)), ("4", (4, 4)), ("3:3", (3, 3))])
def test_parse_int_range(text, expected):
    assert parse_int_range(text) == expected


@pytest.mark.parametrize("text", ["0:4", "5:2", "a:b", "1:2:3"])
def test_parse_int_range_rejects(text):
    with pytest.raises(ValidationError):
        parse_int_range(text)


###############################################################################
# Config
###############################################################################
def test_config_defaults_when_file_missing(tmp_path):
    config = Config(tmp_path / "missing.json")
    assert config.get("network.caps") == [10, 10]
    assert config.get("simulation.batches") == 20
    assert config.get("does.not.exist", "x") == "x"


def test_config_merges_partial_file(tmp_path):
    path = tmp_path / "config.json"
    path.write_text(json.dumps({"network": {"delta_prime": 0.04}}), encoding="utf-8")
    config = Config(path)
    assert config.network["delta_prime"] == 0.04
    assert config.network["caps"] == [10, 10]


def test_config_invalid_json_falls_back(tmp_path):
    path = tmp_path / "config.json"
    path.write_text("{not json", encoding="utf-8")
    assert Config(path).get("optimize.tie_tolerance") == 1e-12


def test_config_required_missing_raises(tmp_path):
    with pytest.raises(ValidationError) as exc:
        Config(tmp_path / "missing.json", required=True)
    assert exc.value.field == "config"


@pytest.mark.parametrize("text", ["{not json", "[1, 2]"])
def test_config_required_invalid_raises(tmp_path, text):
    path = tmp_path / "config.json"
    path.write_text(text, encoding="utf-8")
    with pytest.raises(ValidationError) as exc:
        Config(path, required=True)
    assert exc.value.field == "config"


def test_config_non_object_falls_back(tmp_path):
    path = tmp_path / "config.json"
    path.write_text("[1, 2]", encoding="utf-8")
    assert Config(path).get("network.caps") == [10, 10]


def test_config_set_save_reload(tmp_path):
    path = tmp_path / "config.json"
    config = Config(path)
    config.set("sweep.delta_primes", [0.04, 30.0])
    config.set("extra.nested.value", 1)
    config.save()
    reloaded = Config(path)
    assert reloaded.sweep["delta_primes"] == [0.04, 30.0]
    assert reloaded.get("extra.nested.value") == 1
    config.set("sweep.delta_primes", [])
    config.reload()
    assert config.get("sweep.delta_primes") == [0.04, 30.0]


def test_merge_does_not_mutate_base():
    base = {"a": {"b": 1, "c": 2}}
    merged = _merge(base, {"a": {"b": 5}})
    assert merged == {"a": {"b": 5, "c": 2}}
    assert base["a"]["b"] == 1


###############################################################################
# Errors and logging
###############################################################################
@pytest.mark.parametrize("error, code", [
    (EHNetError("x"), 1),
    (NoConvergence("x", residual=1e-3, iterations=10), 1),
    (UsageError("x"), 2),
    (ValidationError("x"), 3),
    (ApproximationDomain("x"), 3),
    (VerificationFailed("x", failures=["a"]), 4),
])
def test_exit_codes(error, code):
    assert error.exit_code == code


def test_error_hierarchy():
    assert issubclass(ApproximationDomain, PreconditionViolated)
    assert issubclass(ZeroAnalyticValue, ZeroDivisionError)
    err = NoConvergence("x", residual=1e-3, iterations=10)
    assert (err.residual, err.iterations) == (1e-3, 10)
    assert VerificationFailed("x", failures=["a"]).failures == ["a"]


def test_setup_logging_file_handlers(tmp_path):
    setup_logging(level="DEBUG", log_dir=str(tmp_path), file=True)
    logging.getLogger("ehnet.test").error("fallo de prueba")
    for handler in logging.getLogger().handlers:
        handler.flush()
    assert (tmp_path / "ehnet.log").exists()
    assert "fallo de prueba" in (tmp_path / "errors.log").read_text(encoding="utf-8")
    assert (tmp_path / "debug.log").exists()
    setup_logging(level="WARNING")
    assert logging.getLogger().level == logging.WARNING
