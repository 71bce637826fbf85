"""Randomised property checks run by ``projsplit verify-bounds``.

Each suite returns a :class:`CheckResult`; the command succeeds only when all
of them pass. Sizes are kept small enough for an interactive run.
"""

from dataclasses import dataclass

import numpy as np

from . import bounds
from .constants import TOL, numerical_floor
from .contractions import SpuriousMap, make_random_linear_contraction, random_orthonormal, rng_stream
from .iteration import RunConfig, initial_point, run, step
from .linalg import LowRankFactor, frobenius_norm, thin_qr
from .retraction import normal_residual, retract, tangent_project


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str


def random_factor(rng, n, m, r, scale=1.0):
    U = random_orthonormal(rng, n, r)
    V = random_orthonormal(rng, m, r)
    return LowRankFactor(U, np.diag(np.sort(rng.uniform(0.1, 1.0, r))[::-1] * scale), V)


def check_retraction_identity(cases=50, n=40, m=40, r=7, seed=0):
    """The retraction equals the tangent projection of ``A0 + D`` at (U1, V0)."""
    rng = rng_stream(seed, "verify", 1)
    worst = 0.0
    for _ in range(cases):
        A0 = random_factor(rng, n, m, r)
        D = rng.standard_normal((n, m))
        res = retract(A0, D)
        Z = A0.assemble() + D
        P = tangent_project(res.intermediate_U1, res.input_V0, Z)
        worst = max(worst, frobenius_norm(res.point.assemble() - P) / frobenius_norm(Z))
    return CheckResult("retraction-identity", worst <= TOL.angle_identity,
                       f"max relative discrepancy {worst:.3e} over {cases} cases")


def _subspace_near(rng, Vs, r, mode):
    """Orthonormal m x r basis V0 at a controlled angle from span(Vs).

    ``mode`` is ``"generic"``, ``"near"`` (the first direction of Vs almost
    orthogonal to span(V0)) or ``"orthogonal"`` (exactly orthogonal, so the
    largest angle is 90 degrees).
    """
    m, q = Vs.shape
    G = Vs @ rng.standard_normal((q, r)) + rng.uniform(0.1, 1.0) * rng.standard_normal((m, r))
    if mode != "generic" and m > r:
        v = Vs[:, :1]
        for _ in range(2):
            G -= v @ (v.T @ G)
        if mode == "near":
            G[:, :1] += 1e-7 * np.linalg.norm(G[:, 0]) * v
    V0, _ = thin_qr(G)
    return V0


def check_normal_bound(cases=100, max_dim=60, seed=0):
    """Spectral norm of the normal component never exceeds ``||H|| ||tan angle(V0, V*)||``."""
    rng = rng_stream(seed, "verify", 2)
    worst_gap = -np.inf
    degenerate = 0
    modes = ("generic", "generic", "near", "orthogonal")
    for i in range(cases):
        n, m = (int(x) for x in rng.integers(4, max_dim + 1, size=2))
        r = int(rng.integers(1, min(n, m, 10) + 1))
        q = int(rng.integers(1, r + 1))
        Xs = random_factor(rng, n, m, q, scale=rng.uniform(0.5, 5.0))
        V0 = _subspace_near(rng, Xs.V, r, modes[i % len(modes)])
        H = rng.uniform(1e-3, 1.0) * rng.standard_normal((n, m))
        X = Xs.assemble()
        U1, _ = thin_qr((X + H) @ V0)
        _, norm2, _ = normal_residual(U1, V0, X)
        bound = bounds.normal_component_bound(H, V0, Xs.V)
        degenerate += int(not bound < 1e12 * max(norm2, 1e-300))
        worst_gap = max(worst_gap, norm2 - bound)
    return CheckResult("normal-component-bound", worst_gap <= 1e-10,
                       f"max(||P_perp|| - bound) = {worst_gap:.3e} over {cases} cases "
                       f"({degenerate} with bound / residual > 1e12)")


def check_pq_domination(runs=10, n=10, m=10, r=3, delta=0.8, eta=1e-3, seed=0):
    """Recorded p_k stays below ``p0 / c* s**k`` on certified linear runs."""
    certified = 0
    worst = 0.0
    for i in range(runs):
        sv = np.geomspace(2.0, 1.0, r)
        cmap = make_random_linear_contraction(n, m, r, delta, sv, seed * 1000 + i)
        Y0 = initial_point(cmap.fixed_point(), r, eta, seed * 1000 + i)
        trace = run(cmap, Y0, RunConfig(rank=r, max_iters=300, tol=1e-13))
        rec0 = trace.records[0]
        cert = bounds.certify(delta ** 2, rec0.p, rec0.q, k_max=len(trace) - 1)
        if not cert.holds:
            continue
        certified += 1
        p = trace.column("p")
        ratio = np.max(p / np.asarray(cert.predicted))
        worst = max(worst, ratio)
    ok = certified > 0 and worst <= 1.0 + TOL.recursion_slack
    return CheckResult("pq-domination", ok,
                       f"{certified}/{runs} certified runs, max p_k / bound_k = {worst:.3e}")


def check_f_pi_commutation(points=200, delta=0.9, seed=0):
    """``pi(step(Y)) == f(pi(Y))`` for rank-1 points with ``pi(Y)`` in Omega."""
    rng = rng_stream(seed, "verify", 4)
    params = bounds.OmegaParams(delta, q_max=1.0, s_ratio=1.0)
    cmap = SpuriousMap(delta)
    worst = 0.0
    for _ in range(points):
        p = rng.uniform(1e-3, 5.0)
        q = rng.uniform(0.0, min(params.q_max, params.s_ratio * p))
        Y = bounds.rank1_from_pq(p, q, delta, phi_l=rng.uniform(0.05, 1.5))
        res, _ = step(cmap, Y)
        got = bounds.pi_map(res.point, delta)
        want = bounds.f_map((p, q), params)
        worst = max(worst, float(np.max(np.abs(np.subtract(got, want)))))
    return CheckResult("f-pi-commutation", worst <= 1e-10,
                       f"max |pi(step(Y)) - f(pi(Y))| = {worst:.3e} over {points} points")


def check_step_inequality(trace):
    """Audit the one-step estimate on every above-floor step where its hypothesis holds.

    Returns ``(audited_steps, worst_relative_excess)``.
    """
    s = trace.delta ** 2
    floor = numerical_floor(np.sqrt(np.sum(np.square(trace.target_singular_values))))
    audited, worst = 0, -np.inf
    recs = trace.records
    for a, b in zip(recs[:-1], recs[1:]):
        if min(a.err_total, b.err_total) <= floor or not bounds.step_condition(s, a.p, a.q):
            continue
        rhs = bounds.step_bound(s, a.p, a.q, b.q)
        if rhs is None:
            continue
        audited += 1
        worst = max(worst, (b.p - rhs) / rhs)
    return audited, worst


def run_all(seed=0):
    return [
        check_retraction_identity(seed=seed),
        check_normal_bound(seed=seed),
        check_pq_domination(seed=seed),
        check_f_pi_commutation(seed=seed),
    ]
