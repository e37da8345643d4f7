"""Comparison of result CSVs against reference values and tolerances.

A tolerance spec is a YAML file with a list of rules; a row passes when
|estimate - reference| <= max(abs_tol, z * stderr).  Rows may carry their
reference in the CSV; a rule may instead name a reference generator
(closed-form function) evaluated on one of the row's params.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import yaml

from .. import closedform
from .config import ConfigError
from .csvio import read_rows

_REFERENCE_FNS = {
    "rho_kpz": closedform.rho_kpz,
    "rho_ew": closedform.rho_ew,
}

_RULE_KEYS = {"experiment", "match", "abs_tol", "z", "reference_fn", "reference_param"}


@dataclass(frozen=True)
class Rule:
    experiment: str
    match: str = ""
    abs_tol: float = 0.0
    z: float = 0.0
    reference_fn: str | None = None
    reference_param: str | None = None


@dataclass(frozen=True)
class RowVerdict:
    experiment: str
    params: str
    estimate: float
    reference: float
    allowed: float
    passed: bool

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return (f"{status} {self.experiment} [{self.params}] estimate={self.estimate:.6g} "
                f"reference={self.reference:.6g} |diff|={abs(self.estimate - self.reference):.3g} "
                f"allowed={self.allowed:.3g}")


def load_tolerance_spec(path: str) -> list[Rule]:
    try:
        with open(path, encoding="utf-8") as fh:
            doc = yaml.safe_load(fh)
    except FileNotFoundError:
        raise ConfigError(f"tolerance spec not found: {path}") from None
    except yaml.YAMLError as exc:
        raise ConfigError(f"tolerance spec parse error: {exc}") from None
    if not isinstance(doc, dict) or set(doc) != {"rules"} or not isinstance(doc["rules"], list):
        raise ConfigError("tolerance spec must be a mapping with a single 'rules' list")
    rules = []
    for i, raw in enumerate(doc["rules"]):
        if not isinstance(raw, dict):
            raise ConfigError(f"rules[{i}]: must be a mapping")
        unknown = set(raw) - _RULE_KEYS
        if unknown:
            raise ConfigError(f"rules[{i}]: unknown keys {sorted(unknown)}")
        if "experiment" not in raw:
            raise ConfigError(f"rules[{i}].experiment: is required")
        if float(raw.get("abs_tol", 0.0)) < 0 or float(raw.get("z", 0.0)) < 0:
            raise ConfigError(f"rules[{i}]: tolerances must be nonnegative")
        rules.append(Rule(
            experiment=str(raw["experiment"]),
            match=str(raw.get("match", "")),
            abs_tol=float(raw.get("abs_tol", 0.0)),
            z=float(raw.get("z", 0.0)),
            reference_fn=raw.get("reference_fn"),
            reference_param=raw.get("reference_param"),
        ))
    return rules


def _param_value(params: str, key: str) -> float:
    for piece in params.split(";"):
        k, _, v = piece.partition("=")
        if k == key:
            return float(v)
    raise ConfigError(f"row params {params!r} carry no key {key!r} for the reference generator")


def _resolve_reference(row: dict, rule: Rule) -> float:
    if row["reference"] != "":
        return float(row["reference"])
    if rule.reference_fn is None:
        raise ConfigError(
            f"row {row['experiment']} [{row['params']}] has no reference value and the "
            f"matching rule names no reference generator"
        )
    fn = _REFERENCE_FNS.get(rule.reference_fn)
    if fn is None:
        raise ConfigError(f"unknown reference generator {rule.reference_fn!r} "
                          f"(available: {sorted(_REFERENCE_FNS)})")
    if rule.reference_param is None:
        raise ConfigError(f"rule for {rule.experiment!r} names a reference generator "
                          f"but no reference_param")
    return fn(_param_value(row["params"], rule.reference_param))


def compare(results_csv: str, tolspec_path: str) -> tuple[list[RowVerdict], bool]:
    """Per-row verdicts and the aggregate pass flag."""
    rules = load_tolerance_spec(tolspec_path)
    rows = read_rows(results_csv)
    verdicts = []
    for row in rows:
        matching = [r for r in rules
                    if r.experiment == row["experiment"] and r.match in row["params"]]
        if not matching:
            continue
        rule = matching[0]
        reference = _resolve_reference(row, rule)
        estimate = float(row["estimate"])
        stderr = float(row["stderr"]) if row["stderr"] != "" else 0.0
        allowed = max(rule.abs_tol, rule.z * stderr)
        passed = abs(estimate - reference) <= allowed
        verdicts.append(RowVerdict(row["experiment"], row["params"], estimate,
                                   reference, allowed, passed))
    if not verdicts:
        raise ConfigError("no result rows matched any rule")
    return verdicts, all(v.passed for v in verdicts)
