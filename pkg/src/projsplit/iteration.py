"""Projected fixed-point iteration ``Y_{k+1} = I(Y_k, Phi(Y_k) - Y_k)`` with diagnostics.

Record k describes ``Y_k``. Its error ``E_k = Y_k - X*`` is split inside the
tangent space that contains ``Y_k``: the intermediate space (U1, V0) of the
retraction that produced it, or the tangent space at ``Y_0`` itself for
k = 0. In either case ``err_total**2 = err_tangent**2 + err_normal**2``.
"""

from dataclasses import dataclass

import numpy as np

from .contractions import rng_stream
from .linalg import LowRankFactor, frobenius_norm, spectral_norm, truncated_svd
from .retraction import normal_part, retract, tangent_project

STOP_REASONS = ("converged", "max_iters", "diverged", "stagnated")


@dataclass(frozen=True)
class Target:
    """The fixed point X* with its SVD, as needed by the diagnostics."""

    Xstar: np.ndarray
    factor: LowRankFactor
    singular_values: np.ndarray

    @property
    def s_r(self):
        return float(self.singular_values[-1])

    @property
    def norm(self):
        return frobenius_norm(self.Xstar)


def make_target(Xstar):
    s = np.linalg.svd(Xstar, compute_uv=False)
    cutoff = max(Xstar.shape) * np.finfo(float).eps * s[0]
    q = max(1, int(np.count_nonzero(s > cutoff)))
    F = truncated_svd(Xstar, q)
    return Target(np.asarray(Xstar, dtype=float), F, np.diag(F.S).copy())


@dataclass(frozen=True)
class StepRecord:
    k: int
    err_total: float
    err_tangent: float
    err_normal: float
    err_normal_spectral: float
    p: float
    q: float
    sin2_R: tuple
    sin2_L: tuple
    smallest_kept_sv: float
    rank_deficient: bool = False


@dataclass(frozen=True)
class IterationTrace:
    records: tuple
    stop_reason: str
    final_point: LowRankFactor
    delta: float
    target_singular_values: tuple

    def column(self, name):
        return np.array([getattr(rec, name) for rec in self.records], dtype=float)

    @property
    def s_r(self):
        return self.target_singular_values[-1]

    def __len__(self):
        return len(self.records)


@dataclass(frozen=True)
class RunConfig:
    rank: int
    max_iters: int = 500
    tol: float = 1e-12
    divergence_ceiling: float = 1e8
    stagnation_window: int = 20
    stagnation_rtol: float = 1e-14

    def __post_init__(self):
        if self.rank < 1 or self.max_iters < 0 or self.stagnation_window < 1:
            raise ValueError("rank, window must be positive and max_iters non-negative")
        if not (self.tol > 0 and self.divergence_ceiling > 0 and self.stagnation_rtol >= 0):
            raise ValueError("tolerances must be positive")


def _split(U, V, Y, Xstar):
    """Tangent and normal parts of ``Y - X*`` at the tangent space (U, V) containing Y."""
    E = Y - Xstar
    Pn = normal_part(U, V, Xstar)
    eps_tangent = frobenius_norm(tangent_project(U, V, E))
    return frobenius_norm(E), eps_tangent, frobenius_norm(Pn), spectral_norm(Pn)


def decompose_error(result, Xstar):
    """``(eps_tangent, eps_normal)`` of ``Y_{k+1} - X*`` at the intermediate point.

    ``eps_normal = ||(I - U1 U1^T) X* (I - V0 V0^T)||_F`` and ``eps_tangent``
    is the Frobenius norm of the tangent projection of ``Y_{k+1} - X*``.
    """
    _, tangent, normal, _ = _split(
        result.intermediate_U1, result.input_V0, result.point.assemble(), Xstar
    )
    return tangent, normal


def component_angles(Y, xstar_factor):
    """Squared sines of the left and right angles of ``Y`` per singular direction of X*.

    ``sin2_L[j] = ||(I - U U^T) U*_j||^2`` and ``sin2_R[j] = ||(I - V V^T) V*_j||^2``.
    """
    Us, Vs = xstar_factor.U, xstar_factor.V
    RL = Us - Y.U @ (Y.U.T @ Us)
    RR = Vs - Y.V @ (Y.V.T @ Vs)
    return np.sum(RL * RL, axis=0), np.sum(RR * RR, axis=0)


def _record(k, U, V, Y, target, rank_deficient=False):
    A = Y.assemble()
    err, tangent, normal, normal_2 = _split(U, V, A, target.Xstar)
    sin2_L, sin2_R = component_angles(Y, target.factor)
    s2 = target.singular_values ** 2
    sr2 = target.s_r ** 2
    return StepRecord(
        k=k,
        err_total=err,
        err_tangent=tangent,
        err_normal=normal,
        err_normal_spectral=normal_2,
        p=err * err / sr2,
        q=float(np.dot(s2, sin2_R) / sr2),
        sin2_R=tuple(float(x) for x in sin2_R),
        sin2_L=tuple(float(x) for x in sin2_L),
        smallest_kept_sv=float(Y.singular_values()[-1]),
        rank_deficient=rank_deficient,
    )


def initial_record(Y0, target):
    return _record(0, Y0.U, Y0.V, Y0, target)


def step(cmap, Yk, k=0, target=None):
    """One projected step from ``Yk`` (record index k) -> (RetractionResult, record k+1)."""
    if target is None:
        target = make_target(cmap.fixed_point())
    A = Yk.assemble()
    result = retract(Yk, cmap.apply(A, k) - A)
    rec = _record(
        k + 1, result.intermediate_U1, result.input_V0, result.point, target,
        result.rank_deficient,
    )
    return result, rec


def initial_point(Xstar, r, eta, seed):
    """``truncated_svd(X* + eta * E, r)`` with E seeded and of unit Frobenius norm."""
    rng = rng_stream(seed, "initial")
    E = rng.standard_normal(Xstar.shape)
    E /= frobenius_norm(E)
    return truncated_svd(Xstar + eta * E, r)


def run(cmap, Y0, cfg):
    """Iterate until converged, stagnated, diverged or ``cfg.max_iters`` steps."""
    target = make_target(cmap.fixed_point())
    records = [initial_record(Y0, target)]
    Y = Y0
    ceiling = cfg.divergence_ceiling * max(records[0].err_total, target.norm, 1.0)
    reason = "converged" if records[0].err_total <= cfg.tol else None
    w = cfg.stagnation_window
    k = 0
    while reason is None and k < cfg.max_iters:
        result, rec = step(cmap, Y, k, target)
        records.append(rec)
        Y = result.point
        k += 1
        e = rec.err_total
        if not np.isfinite(e) or e > ceiling:
            reason = "diverged"
        elif e <= cfg.tol:
            reason = "converged"
        elif len(records) > w and abs(e - records[-1 - w].err_total) <= cfg.stagnation_rtol * e:
            reason = "stagnated"
    if reason is None:
        reason = "max_iters"
    return IterationTrace(
        records=tuple(records),
        stop_reason=reason,
        final_point=Y,
        delta=float(cmap.delta),
        target_singular_values=tuple(float(s) for s in target.singular_values),
    )
