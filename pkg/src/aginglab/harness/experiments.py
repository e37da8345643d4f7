"""Experiment registry: validated parameter schemas and runners per (model, kind).

Each runner returns a list of (params_dict, estimate, stderr, reference, n)
tuples; the caller stamps the experiment id and wall time.  Reference values
are filled whenever a closed form exists.
"""

from __future__ import annotations

import math
from functools import partial

import numpy as np
from scipy import special as _sp

from .. import closedform, glew, lpp, polymer, tasep
from ..rng import analysis_stream, replica_stream
from ..statcore import bootstrap_ci, corr_direct, ks_statistic
from .config import ConfigError, ExperimentConfig

_TABLE_FUNCTIONS = {
    "rho_kpz": closedform.rho_kpz,
    "rho_ew": closedform.rho_ew,
    "ew_variance": None,  # needs two arguments; handled separately below
}


def _check_params(cfg: ExperimentConfig, allowed: dict) -> dict:
    path = f"experiment.params ({cfg.model}/{cfg.kind})"
    unknown = set(cfg.params) - set(allowed)
    if unknown:
        raise ConfigError(f"{path}: unknown keys {sorted(unknown)}")
    out = {}
    for key, (required, check) in allowed.items():
        if key not in cfg.params:
            if required:
                raise ConfigError(f"{path}.{key}: is required")
            continue
        try:
            out[key] = check(cfg.params[key], f"{path}.{key}")
        except ConfigError:
            raise
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"{path}.{key}: {exc}") from None
    return out


def _num(lo=None, hi=None):
    def check(v, path):
        if isinstance(v, bool) or not isinstance(v, (int, float)):
            raise ConfigError(f"{path}: expected a number, got {v!r}")
        v = float(v)
        if lo is not None and v < lo:
            raise ConfigError(f"{path}: must be >= {lo}")
        if hi is not None and v > hi:
            raise ConfigError(f"{path}: must be <= {hi}")
        return v

    return check


def _int(lo=None, hi=None):
    def check(v, path):
        if isinstance(v, bool) or not isinstance(v, int):
            raise ConfigError(f"{path}: expected an integer, got {v!r}")
        if lo is not None and v < lo:
            raise ConfigError(f"{path}: must be >= {lo}")
        if hi is not None and v > hi:
            raise ConfigError(f"{path}: must be <= {hi}")
        return v

    return check


def _numlist(lo=None):
    item = _num(lo)

    def check(v, path):
        if not isinstance(v, list) or not v:
            raise ConfigError(f"{path}: expected a non-empty list")
        return [item(x, f"{path}[{i}]") for i, x in enumerate(v)]

    return check


def _intlist(lo=None):
    item = _int(lo)

    def check(v, path):
        if not isinstance(v, list) or not v:
            raise ConfigError(f"{path}: expected a non-empty list")
        return [item(x, f"{path}[{i}]") for i, x in enumerate(v)]

    return check


def _choice(*options):
    def check(v, path):
        if v not in options:
            raise ConfigError(f"{path}: must be one of {sorted(options)}")
        return v

    return check


def _needs_replicas(cfg: ExperimentConfig, minimum: int) -> None:
    if cfg.replicas < minimum:
        raise ConfigError(f"experiment.replicas: {cfg.model}/{cfg.kind} needs >= {minimum}")


# ----------------------------------------------------------------- closedform

def _run_closedform_table(cfg, p):
    fn = _TABLE_FUNCTIONS[p["function"]]
    rows = []
    for a in p["grid"]:
        rows.append(({"a": float(a)}, fn(float(a)), None, None, None))
    return rows


# ------------------------------------------------------------------------ lpp

def _run_lpp_aging(cfg, p):
    n = p["n"]
    ratios = sorted(p["ratios"])
    marks = sorted({n} | {int(math.floor(a * n)) for a in ratios})
    ens = lpp.diagonal_ensemble(marks, cfg.replicas, cfg.master_seed, cfg.workers,
                                experiment=f"{cfg.id}.aging")
    col = {m: i for i, m in enumerate(marks)}
    rows = []
    for a in ratios:
        big = int(math.floor(a * n))
        if big == n:
            rows.append(({"n": n, "a": a}, 1.0, 0.0, closedform.rho_kpz(a), cfg.replicas))
            continue
        est = corr_direct(ens[:, col[n]], ens[:, col[big]])
        rows.append(({"n": n, "a": a}, est.value, est.stderr, closedform.rho_kpz(a), cfg.replicas))
    return rows


def _run_lpp_variance_scaling(cfg, p):
    n = p["n"]
    ens = lpp.diagonal_ensemble([n, 2 * n], cfg.replicas, cfg.master_seed, cfg.workers,
                                experiment=f"{cfg.id}.varscale")
    small, big = ens[:, 0], ens[:, 1]
    ratio = float(np.var(big, ddof=1) / np.var(small, ddof=1))
    rng = analysis_stream(cfg.master_seed, cfg.id)
    reps = np.empty(400)
    for b in range(reps.size):
        idx = rng.integers(0, cfg.replicas, cfg.replicas)
        reps[b] = np.var(big[idx], ddof=1) / np.var(small[idx], ddof=1)
    return [({"n": n}, ratio, float(reps.std(ddof=1)), 2.0 ** (2.0 / 3.0), cfg.replicas)]


def _run_lpp_burke(cfg, p):
    rows = []
    for i, n1 in enumerate(p["n1"]):
        emp = lpp.burke_increments(n1, p["count"], cfg.master_seed, replica=i)
        stat = ks_statistic(emp, lambda x: -np.expm1(-0.5 * x))
        rows.append(({"n1": n1, "count": p["count"]}, stat, None, 0.0, p["count"]))
    return rows


def _run_lpp_identity(cfg, p):
    rows = []
    for r in lpp.lpp_tasep_identity_check(p["n"], p["t_grid"], cfg.replicas,
                                          cfg.master_seed, cfg.workers):
        rows.append(({"n": p["n"], "t": r.t, "side": "lpp"}, r.p_lpp, r.se_lpp, None, cfg.replicas))
        rows.append(({"n": p["n"], "t": r.t, "side": "tasep"}, r.p_tasep, r.se_tasep, None, cfg.replicas))
    return rows


# ---------------------------------------------------------------------- tasep

def _run_tasep_two_time(cfg, p):
    res = tasep.two_time_height_corr(p["L"], p["s"], p["a"], p.get("j", 0), p.get("k", 0),
                                     cfg.replicas, cfg.master_seed, cfg.workers)
    ref = closedform.rho_kpz(p["a"]) if p.get("j", 0) == p.get("k", 0) else None
    base = {"L": p["L"], "s": p["s"], "a": p["a"], "j": p.get("j", 0), "k": p.get("k", 0)}
    return [
        ({**base, "method": "direct"}, res.direct.value, res.direct.stderr, ref, res.direct.n),
        ({**base, "method": "cvtv"}, res.cvtv.value, res.cvtv.stderr, ref, res.cvtv.n),
    ]


def _invariance_chunk(lo, hi, seed, L, times, experiment):
    out = np.empty((hi - lo, len(times)))
    for i in range(lo, hi):
        rng = replica_stream(seed, experiment, i)
        state = tasep.init_stationary(L, rng)
        for j, t in enumerate(times):
            tasep.evolve_until(state, t)
            out[i - lo, j] = state.occ.mean()
    return out


def _run_tasep_invariance(cfg, p):
    from ..parallel import map_replicas

    times = sorted(p["times"])
    fn = partial(_invariance_chunk, seed=cfg.master_seed, L=p["L"], times=tuple(times),
                 experiment=f"{cfg.id}.invariance")
    obs = map_replicas(fn, cfg.replicas, cfg.workers)
    rows = []
    for j, t in enumerate(times):
        frac = float(obs[:, j].mean())
        se = 0.5 / math.sqrt(p["L"] * cfg.replicas)
        rows.append(({"L": p["L"], "t": t}, frac, se, 0.5, cfg.replicas))
    return rows


# -------------------------------------------------------------------- polymer

def _polymer_params(p):
    return polymer.PolymerParams(
        n=p["n"], dt=p["dt"], levels=p["levels"],
        theta=p.get("theta"), beta=p.get("beta", 1.0),
    )


def _run_polymer_burke(cfg, p):
    params = _polymer_params(p)
    pool = polymer.pooled_burke_residuals(params, p["t"], cfg.replicas, cfg.master_seed,
                                          cfg.workers, experiment=f"{cfg.id}.burke")
    stat = ks_statistic(np.sort(pool), lambda x: _sp.gammainc(params.theta, x))
    return [({"n": p["n"], "levels": p["levels"], "dt": p["dt"], "t": p["t"]},
             stat, None, 0.0, pool.size)]


def _run_polymer_two_time(cfg, p):
    params = _polymer_params(p)
    res = polymer.polymer_two_time_corr(params, p["s"], p["t"], p.get("x", 0.0), p.get("y", 0.0),
                                        cfg.replicas, cfg.master_seed, cfg.workers)
    base = {"n": p["n"], "s": p["s"], "t": p["t"], "x": p.get("x", 0.0), "y": p.get("y", 0.0)}
    if res.aborted:
        base["aborted"] = res.aborted
    if not res.valid:
        base["invalid"] = 1
    return [
        ({**base, "method": "direct"}, res.direct.value, res.direct.stderr, None, res.direct.n),
        ({**base, "method": "cvtv"}, res.cvtv.value, res.cvtv.stderr, None, res.cvtv.n),
    ]


# ----------------------------------------------------------------------- glew

def _gl_spec(p):
    if p.get("potential", "quadratic") == "quadratic":
        return glew.quadratic_potential()
    return glew.logcosh_potential(p.get("eps", 0.2))


def _run_glew_two_time(cfg, p):
    spec = _gl_spec(p)
    res = glew.gl_two_time_corr(spec, p["s"], p["a"], p.get("x", 0.0), p.get("y", 0.0),
                                p["L"], p["dt"], cfg.replicas, cfg.master_seed, cfg.workers)
    ref = closedform.ew_correlation(closedform.EwQuery(1.0, p["a"], p.get("x", 0.0), p.get("y", 0.0)))
    base = {"L": p["L"], "s": p["s"], "a": p["a"], "x": p.get("x", 0.0), "y": p.get("y", 0.0),
            "potential": p.get("potential", "quadratic")}
    return [
        ({**base, "method": "direct"}, res.direct.value, res.direct.stderr, ref, res.direct.n),
        ({**base, "method": "cvtv"}, res.cvtv.value, res.cvtv.stderr, ref, res.cvtv.n),
    ]


def _run_glew_variance_profile(cfg, p):
    spec = _gl_spec(p)
    quadratic = p.get("potential", "quadratic") == "quadratic"
    rows = []
    for k, var, se in glew.gl_variance_profile(spec, p["L"], p["t"], p["dt"], cfg.replicas,
                                               cfg.master_seed, p["sites"], cfg.workers):
        ref = closedform.rw_abs_expectation(p["t"], k) if quadratic else None
        rows.append(({"L": p["L"], "t": p["t"], "k": k, "potential": p.get("potential", "quadratic")},
                     var, se, ref, cfg.replicas))
    return rows


# ------------------------------------------------------------------- registry

REGISTRY = {
    ("closedform", "table"): (
        {"function": (True, _choice("rho_kpz", "rho_ew")), "grid": (True, _numlist(1.0))},
        _run_closedform_table, 0,
    ),
    ("lpp", "aging"): (
        {"n": (True, _int(1)), "ratios": (True, _numlist(1.0))},
        _run_lpp_aging, 100,
    ),
    ("lpp", "variance_scaling"): (
        {"n": (True, _int(1))},
        _run_lpp_variance_scaling, 100,
    ),
    ("lpp", "burke"): (
        {"n1": (True, _intlist(1)), "count": (True, _int(1))},
        _run_lpp_burke, 0,
    ),
    ("lpp", "identity"): (
        {"n": (True, _int(1, 10)), "t_grid": (True, _numlist(0.0))},
        _run_lpp_identity, 100,
    ),
    ("tasep", "two_time"): (
        {"L": (True, _int(2)), "s": (True, _num(0.0)), "a": (True, _num(1.0)),
         "j": (False, _int()), "k": (False, _int())},
        _run_tasep_two_time, 100,
    ),
    ("tasep", "invariance"): (
        {"L": (True, _int(2)), "times": (True, _numlist(0.0))},
        _run_tasep_invariance, 1,
    ),
    ("polymer", "burke"): (
        {"n": (True, _int(1)), "levels": (True, _int(1)), "dt": (True, _num(0.0)),
         "t": (True, _num(0.0)), "theta": (False, _num(0.0)), "beta": (False, _num(0.0))},
        _run_polymer_burke, 1,
    ),
    ("polymer", "two_time"): (
        {"n": (True, _int(1)), "levels": (True, _int(1)), "dt": (True, _num(0.0)),
         "s": (True, _num(0.0)), "t": (True, _num(0.0)),
         "x": (False, _num()), "y": (False, _num()),
         "theta": (False, _num(0.0)), "beta": (False, _num(0.0))},
        _run_polymer_two_time, 100,
    ),
    ("glew", "two_time"): (
        {"potential": (False, _choice("quadratic", "logcosh")), "eps": (False, _num(0.0)),
         "L": (True, _int(8)), "dt": (True, _num(0.0)), "s": (True, _num(0.0)),
         "a": (True, _num(1.0)), "x": (False, _num()), "y": (False, _num())},
        _run_glew_two_time, 100,
    ),
    ("glew", "variance_profile"): (
        {"potential": (False, _choice("quadratic", "logcosh")), "eps": (False, _num(0.0)),
         "L": (True, _int(8)), "t": (True, _num(0.0)), "dt": (True, _num(0.0)),
         "sites": (True, _intlist())},
        _run_glew_variance_profile, 100,
    ),
}


def validate(cfg: ExperimentConfig) -> dict:
    """Validate the whole config against the registry; returns checked params."""
    key = (cfg.model, cfg.kind)
    if key not in REGISTRY:
        kinds = sorted(k for m, k in REGISTRY if m == cfg.model)
        raise ConfigError(f"experiment.kind: unknown kind {cfg.kind!r} for model "
                          f"{cfg.model!r} (available: {kinds})")
    allowed, _fn, min_replicas = REGISTRY[key]
    params = _check_params(cfg, allowed)
    if min_replicas:
        _needs_replicas(cfg, min_replicas)
    # constructor-level precondition checks that span several fields
    if key == ("polymer", "burke") or key == ("polymer", "two_time"):
        _polymer_params(params)
    if key == ("glew", "two_time") or key == ("glew", "variance_profile"):
        spec = _gl_spec(params)
        if params["dt"] > 0.1 / spec.c2:
            raise ConfigError(f"experiment.params.dt: must be <= 0.1/c2 = {0.1 / spec.c2:g}")
    if key == ("tasep", "two_time"):
        if params["L"] < 8.0 * params["a"] * params["s"]:
            raise ConfigError("experiment.params.L: need L >= 8*a*s (no-wraparound margin)")
    return params


def run_experiment(cfg: ExperimentConfig) -> list[tuple]:
    """Run the configured experiment; returns (params, estimate, stderr, reference, n) rows."""
    allowed, fn, _min = REGISTRY[(cfg.model, cfg.kind)]
    params = validate(cfg)
    return fn(cfg, params)
