"""Experiment runner: config in, CSV out, deterministically."""

from __future__ import annotations

import time

from .config import ExperimentConfig, load_config
from .csvio import ResultRow, format_params, write_rows
from .experiments import run_experiment


def run_to_rows(cfg: ExperimentConfig) -> list[ResultRow]:
    t0 = time.perf_counter()
    raw = run_experiment(cfg)
    wall = time.perf_counter() - t0
    return [
        ResultRow(
            experiment=cfg.id,
            params=format_params(params),
            estimate=estimate,
            stderr=stderr,
            reference=reference,
            n=n,
            wall_s=wall,
        )
        for params, estimate, stderr, reference, n in raw
    ]


def run(config_path: str, output_override: str | None = None, workers_override: int | None = None) -> str:
    """Run the experiment described by a config file; returns the CSV path."""
    cfg = load_config(config_path)
    if workers_override is not None:
        cfg = ExperimentConfig(**{**vars(cfg), "workers": workers_override})
    if output_override is not None:
        cfg = ExperimentConfig(**{**vars(cfg), "output": output_override})
    rows = run_to_rows(cfg)
    write_rows(cfg.output, rows)
    return cfg.output
