"""Scenario presets and the experiment runner behind the ``projsplit`` command."""

import math
from dataclasses import dataclass

import numpy as np

from . import bounds
from .contractions import (
    PerturbedMap,
    SpuriousMap,
    geometric_singular_values,
    make_random_linear_contraction,
    staircase_singular_values,
)
from .errors import NoCertificateError
from .iteration import RunConfig, initial_point, run
from .linalg import LowRankFactor
from .report import emit_csv, emit_plot, write_certificate

SCENARIOS = ("typical", "staircase", "counterexample", "counterexample-perturbed", "verify-bounds")

EXIT_OK, EXIT_NOT_CONVERGED, EXIT_CONFIG, EXIT_IO = 0, 1, 2, 3


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class ExperimentConfig:
    scenario: str
    n: int = 40
    m: int = 40
    r: int = 7
    delta: float = 0.8
    sv_spec: tuple | None = None
    sv_preset: str = "geometric"
    eta: float = 0.05
    seed: int = 7
    max_iters: int = 500
    tol: float = 1e-12
    noise_divisor: float | None = None
    noise_convention: str = "std"
    phi_r: float = 90.0
    phi_l: float = 90.0
    sigma0: float = 1.0
    csv: str | None = None
    svg: str | None = None
    cert: str | None = None


PRESETS = {
    "typical": dict(n=40, m=40, r=7, delta=0.8, sv_preset="geometric", eta=0.05, max_iters=500),
    "staircase": dict(n=40, m=40, r=7, delta=0.8, sv_preset="staircase", eta=0.05, max_iters=500),
    "counterexample": dict(n=2, m=2, r=1, delta=0.5, max_iters=500),
    "counterexample-perturbed": dict(n=2, m=2, r=1, delta=0.5, max_iters=5000),
    "verify-bounds": dict(),
}


def preset_config(scenario, **overrides):
    """Preset for ``scenario`` with ``None``-valued overrides ignored."""
    if scenario not in SCENARIOS:
        raise ConfigError(f"unknown scenario {scenario!r}")
    values = dict(PRESETS[scenario])
    values.update({k: v for k, v in overrides.items() if v is not None})
    cfg = ExperimentConfig(scenario=scenario, **values)
    validate(cfg)
    return cfg


def validate(cfg):
    if cfg.scenario not in SCENARIOS:
        raise ConfigError(f"unknown scenario {cfg.scenario!r}")
    if cfg.scenario.startswith("counterexample") and (cfg.n, cfg.m, cfg.r) != (2, 2, 1):
        raise ConfigError("the counter-example is defined for n = m = 2, r = 1")
    if not 1 <= cfg.r <= min(cfg.n, cfg.m):
        raise ConfigError(f"rank {cfg.r} outside [1, min(n, m)]")
    if not 0.0 < cfg.delta < 1.0:
        raise ConfigError("delta must lie in (0, 1)")
    if cfg.eta < 0 or cfg.tol <= 0 or cfg.max_iters < 0 or cfg.sigma0 <= 0:
        raise ConfigError("eta, tol, max_iters and sigma0 must be non-negative / positive")
    if cfg.noise_divisor is not None and cfg.noise_divisor <= 0:
        raise ConfigError("noise divisor must be positive")
    if cfg.noise_convention not in ("std", "variance"):
        raise ConfigError("noise convention must be 'std' or 'variance'")
    if cfg.sv_spec is not None:
        sv = np.asarray(cfg.sv_spec, dtype=float)
        if sv.size != cfg.r or np.any(sv <= 0) or np.any(np.diff(sv) > 0):
            raise ConfigError("sv spec needs r positive non-increasing values")
    elif cfg.sv_preset not in ("geometric", "staircase"):
        raise ConfigError(f"unknown singular value preset {cfg.sv_preset!r}")


def singular_values(cfg):
    if cfg.sv_spec is not None:
        return np.asarray(cfg.sv_spec, dtype=float)
    if cfg.sv_preset == "staircase":
        return staircase_singular_values(cfg.r)
    return geometric_singular_values(cfg.r)


def _unit(angle_deg):
    # exact zeros at multiples of 90 degrees keep the iterate on invariant lines
    c, s = math.cos(math.radians(angle_deg)), math.sin(math.radians(angle_deg))
    c = 0.0 if abs(c) < 1e-15 else c
    s = 0.0 if abs(s) < 1e-15 else s
    return np.array([[c], [s]])


def counterexample_initial_point(phi_r=90.0, phi_l=90.0, sigma0=1.0):
    """Rank-1 ``sigma0 * u v^T`` with ``u``, ``v`` at angles ``phi_l``, ``phi_r`` from e_1.

    The default ``phi_r = 90`` puts the right factor exactly on ``e_2``; that
    line is invariant under the iteration, which then cannot leave it.
    """
    return LowRankFactor(_unit(phi_l), np.array([[float(sigma0)]]), _unit(phi_r))


def build(cfg):
    """Return ``(map, Y0)`` for a trajectory scenario."""
    if cfg.scenario in ("typical", "staircase"):
        cmap = make_random_linear_contraction(
            cfg.n, cfg.m, cfg.r, cfg.delta, singular_values(cfg), cfg.seed
        )
        Y0 = initial_point(cmap.fixed_point(), cfg.r, cfg.eta, cfg.seed)
        return cmap, Y0
    if cfg.scenario.startswith("counterexample"):
        cmap = SpuriousMap(cfg.delta)
        if cfg.scenario == "counterexample-perturbed":
            divisor = cfg.noise_divisor or 100.0 * cfg.n * cfg.m
            cmap = PerturbedMap(cmap, divisor, cfg.seed, cfg.noise_convention)
        return cmap, counterexample_initial_point(cfg.phi_r, cfg.phi_l, cfg.sigma0)
    raise ConfigError(f"scenario {cfg.scenario!r} has no trajectory")


def certificate(trace):
    """Sufficient-condition data evaluated at the first record of ``trace``."""
    rec = trace.records[0]
    s = trace.delta ** 2
    values = {"condition_value": None, "c_star": None, "corollary_c": None, "holds": False}
    try:
        cert = bounds.certify(s, rec.p, rec.q, k_max=len(trace.records) - 1)
    except ValueError:
        return values, None
    values["condition_value"] = cert.condition_value
    values["holds"] = cert.holds
    if cert.holds:
        values["c_star"] = cert.c_star
        try:
            values["corollary_c"] = bounds.corollary_constant(
                trace.delta, rec.err_total, trace.s_r, rec.q * trace.s_r ** 2
            )
        except NoCertificateError:
            pass
    return values, cert


@dataclass(frozen=True)
class ExperimentResult:
    config: ExperimentConfig
    trace: object
    certificate: dict
    bound_p: tuple | None
    exit_code: int


def run_scenario(cfg):
    """Run a trajectory scenario in memory (no files)."""
    validate(cfg)
    cmap, Y0 = build(cfg)
    trace = run(cmap, Y0, RunConfig(rank=cfg.r, max_iters=cfg.max_iters, tol=cfg.tol))
    values, cert = certificate(trace)
    bound_p = cert.predicted if cert is not None and cert.holds else None
    code = EXIT_OK if trace.stop_reason == "converged" else EXIT_NOT_CONVERGED
    return ExperimentResult(cfg, trace, values, bound_p, code)


def run_experiment(cfg, log=print):
    """Run ``cfg`` and write the requested CSV / certificate / SVG outputs.

    Returns the process exit code: 0 converged, 1 diverged or stuck at a wrong
    point, 2 invalid configuration, 3 I/O failure.
    """
    try:
        validate(cfg)
    except ConfigError as exc:
        log(f"config error: {exc}")
        return EXIT_CONFIG

    if cfg.scenario == "verify-bounds":
        from .verify import run_all

        results = run_all(seed=cfg.seed)
        for res in results:
            log(f"{'PASS' if res.passed else 'FAIL'} {res.name}: {res.detail}")
        return EXIT_OK if all(r.passed for r in results) else EXIT_NOT_CONVERGED

    result = run_scenario(cfg)
    trace = result.trace
    last = trace.records[-1]
    log(
        f"{cfg.scenario}: {trace.stop_reason} after {last.k} steps, "
        f"err_total={last.err_total:.6e}, err_normal={last.err_normal:.6e}"
    )
    try:
        if cfg.csv:
            emit_csv(trace, cfg.csv, result.bound_p)
        if cfg.cert:
            write_certificate(cfg.cert, result.certificate)
        if cfg.svg:
            guides = trace.target_singular_values if cfg.scenario == "staircase" else ()
            emit_plot(trace, cfg.svg, guides=guides, title=f"{cfg.scenario} (seed {cfg.seed})")
    except OSError as exc:
        log(f"I/O error: {exc}")
        return EXIT_IO
    return result.exit_code

