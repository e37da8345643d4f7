"""Experiment configuration: a single YAML key-value tree, strictly validated.

Unknown keys are errors, not warnings — silent misconfiguration would
invalidate the statistical claims.  All numeric parameters are checked
against the module preconditions before any simulation starts.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import yaml


class ConfigError(ValueError):
    """Invalid configuration; carries a field-path (or line) diagnostic."""


@dataclass(frozen=True)
class ExperimentConfig:
    id: str
    model: str
    kind: str
    params: dict
    replicas: int = 0
    master_seed: int = 0
    workers: int | None = None
    output: str = "results.csv"


_TOP_KEYS = {"id", "model", "kind", "params", "replicas", "master_seed", "workers", "output"}
MODELS = {"tasep", "lpp", "polymer", "glew", "closedform"}


def _need(cond: bool, path: str, msg: str) -> None:
    if not cond:
        raise ConfigError(f"{path}: {msg}")


def _as_int(value, path: str) -> int:
    _need(isinstance(value, int) and not isinstance(value, bool), path, f"expected an integer, got {value!r}")
    return value


def _as_num(value, path: str) -> float:
    _need(isinstance(value, (int, float)) and not isinstance(value, bool), path, f"expected a number, got {value!r}")
    return float(value)


def _as_str(value, path: str) -> str:
    _need(isinstance(value, str), path, f"expected a string, got {value!r}")
    return value


def _as_numlist(value, path: str) -> list[float]:
    _need(isinstance(value, list) and value, path, "expected a non-empty list")
    return [_as_num(v, f"{path}[{i}]") for i, v in enumerate(value)]


def _as_intlist(value, path: str) -> list[int]:
    _need(isinstance(value, list) and value, path, "expected a non-empty list")
    return [_as_int(v, f"{path}[{i}]") for i, v in enumerate(value)]


def load_config(path: str) -> ExperimentConfig:
    try:
        with open(path, encoding="utf-8") as fh:
            doc = yaml.safe_load(fh)
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {path}") from None
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        where = f" (line {mark.line + 1}, column {mark.column + 1})" if mark else ""
        raise ConfigError(f"YAML parse error{where}: {exc}") from None
    return parse_config(doc)


def parse_config(doc) -> ExperimentConfig:
    _need(isinstance(doc, dict) and set(doc) == {"experiment"}, "top level",
          "config must contain exactly one 'experiment' mapping")
    exp = doc["experiment"]
    _need(isinstance(exp, dict), "experiment", "must be a mapping")
    unknown = set(exp) - _TOP_KEYS
    _need(not unknown, "experiment", f"unknown keys {sorted(unknown)}")
    for key in ("id", "model", "kind"):
        _need(key in exp, f"experiment.{key}", "is required")
    model = _as_str(exp["model"], "experiment.model")
    _need(model in MODELS, "experiment.model", f"must be one of {sorted(MODELS)}")
    kind = _as_str(exp["kind"], "experiment.kind")
    params = exp.get("params", {})
    _need(isinstance(params, dict), "experiment.params", "must be a mapping")

    replicas = _as_int(exp.get("replicas", 0), "experiment.replicas")
    seed = _as_int(exp.get("master_seed", 0), "experiment.master_seed")
    workers = exp.get("workers")
    if workers is not None:
        workers = _as_int(workers, "experiment.workers")
        _need(workers >= 1, "experiment.workers", "must be >= 1")
    output = _as_str(exp.get("output", "results.csv"), "experiment.output")

    cfg = ExperimentConfig(
        id=_as_str(exp["id"], "experiment.id"),
        model=model,
        kind=kind,
        params=dict(params),
        replicas=replicas,
        master_seed=seed,
        workers=workers,
        output=output,
    )
    from . import experiments  # deferred: experiments imports the model modules

    experiments.validate(cfg)
    return cfg
