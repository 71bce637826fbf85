"""Convergence bounds for projected fixed-point iteration and the 2 x 2 counter-example.

Quantities use the normalisation of the iteration diagnostics::

    s = delta**2,  p = ||Y - X*||_F**2 / s_r**2,  q = sum_j s_j**2 sin2_R[j] / s_r**2
"""

import math
from dataclasses import dataclass

import numpy as np

from .contractions import SPURIOUS_XPERP, SPURIOUS_XSTAR
from .errors import DomainError, NoCertificateError
from .linalg import LowRankFactor, frobenius_norm, principal_angles, spectral_norm


@dataclass(frozen=True)
class PQState:
    s: float
    p: float
    q: float

    def __post_init__(self):
        if not 0.0 < self.s < 1.0:
            raise ValueError(f"s must lie in (0, 1), got {self.s}")
        if self.p < 0 or self.q < 0:
            raise ValueError("p and q must be non-negative")


@dataclass(frozen=True)
class BoundCertificate:
    holds: bool
    condition_value: float
    c_star: float | None
    s: float
    p0: float
    q0: float
    predicted: tuple = ()


# ----------------------------------------------------------------------------
# normal component of the error

def normal_component_bound(H, V0, Vstar):
    """``||H||_2 * max tan angle(V0, V*)``; ``inf`` when some angle is 90 degrees."""
    h = spectral_norm(H)
    if h == 0.0:
        return 0.0
    return h * principal_angles(V0, Vstar).max_tangent


# ----------------------------------------------------------------------------
# p/q recursion and the c* certificate

def _check_spq(s, p0, q0):
    if not 0.0 < s < 1.0:
        raise ValueError(f"s must lie in (0, 1), got {s}")
    if not 0.0 <= q0 < 1.0:
        raise ValueError(f"q0 must lie in [0, 1), got {q0}")
    if p0 < 0:
        raise ValueError(f"p0 must be non-negative, got {p0}")


def check_sufficient_condition(s, p0, q0):
    """Return ``(holds, value)`` with ``value = 4 p0 s / ((1 - q0)**2 (1 - s))``."""
    _check_spq(s, p0, q0)
    value = 4.0 * p0 / (1.0 - q0) ** 2 * s / (1.0 - s)
    return value < 1.0, value


def c_star(s, p0, q0):
    """Closed-form c* for the bound ``p_k <= p0 / c* * s**k``.

    This is the smaller root of ``c**2 - (1 - q0) c + p0 s / (1 - s) = 0``;
    the larger root solves the same fixed-point equation
    ``c = 1 - q0 - p0 s / ((1 - s) c)``.
    """
    holds, value = check_sufficient_condition(s, p0, q0)
    if not holds:
        raise NoCertificateError(f"4 p0 s / ((1-q0)^2 (1-s)) = {value:.6g} >= 1")
    if p0 <= 0:
        raise NoCertificateError("p0 must be positive")
    return p0 / (1.0 - q0) * s / (1.0 - s) * (2.0 / (1.0 + math.sqrt(1.0 - value)))


def bound_sequence(cert, k_max):
    """``p0 / c* * s**k`` for k = 0..k_max."""
    if not cert.holds:
        raise NoCertificateError("certificate does not hold")
    k = np.arange(int(k_max) + 1)
    return (cert.p0 / cert.c_star) * cert.s ** k


def certify(s, p0, q0, k_max=0):
    """Evaluate the sufficient condition and, if it holds, c* and the bound sequence."""
    holds, value = check_sufficient_condition(s, p0, q0)
    if not holds or p0 <= 0:
        return BoundCertificate(False, value, None, s, p0, q0)
    cert = BoundCertificate(True, value, c_star(s, p0, q0), s, p0, q0)
    predicted = tuple(float(x) for x in bound_sequence(cert, k_max))
    return BoundCertificate(True, value, cert.c_star, s, p0, q0, predicted)


def corollary_constant(delta, Y0_err, s_r, weighted_sin2):
    """Constant c with ``||Y_k - X*||_F <= c ||Y_0 - X*||_F delta**k``.

    ``weighted_sin2 = sum_j s_j**2 sin2_R[j]`` at Y_0 (not normalised). The
    hypothesis is the same as for :func:`c_star` and ``c = 1 / sqrt(c*)``.
    """
    s = delta * delta
    p0 = (Y0_err / s_r) ** 2
    q0 = weighted_sin2 / s_r ** 2
    if not 0.0 <= q0 < 1.0:
        raise NoCertificateError(f"q0 = {q0:.6g} outside [0, 1)")
    return 1.0 / math.sqrt(c_star(s, p0, q0))


def step_condition(s, p, q):
    """One-step hypothesis ``s p + q <= 1``."""
    return s * p + q <= 1.0


def step_bound(s, p, q, q_next):
    """Right-hand side ``s p + (s p - q') q / (1 - q - q')`` of the one-step estimate.

    Returns ``None`` when ``1 - q - q' <= 0``.
    """
    denom = 1.0 - q - q_next
    if denom <= 0.0:
        return None
    return s * p + (s * p - q_next) * q / denom


# ----------------------------------------------------------------------------
# 2 x 2 counter-example

@dataclass(frozen=True)
class OmegaParams:
    delta: float
    q_max: float
    s_ratio: float

    def __post_init__(self):
        d = self.delta
        if not 0.0 < d < 1.0:
            raise ValueError(f"delta must lie in (0, 1), got {d}")
        dd = self.d_star ** 2
        if not d ** 2 + d ** 6 > 1.0:
            raise ValueError("need delta**2 + delta**6 > 1")
        if self.q_max <= 0 or self.s_ratio <= 0:
            raise ValueError("q_max and s_ratio must be positive")
        lhs = (1.0 + self.q_max / (d ** 2 * dd)) / (d ** 4 * dd)
        rhs = d ** 2 - self.s_ratio / (d ** 2 * dd)
        if lhs > rhs:
            raise ValueError(f"parameters violate the Omega condition ({lhs:.6g} > {rhs:.6g})")

    @property
    def d_star(self):
        return 1.0 / math.sqrt(1.0 - self.delta ** 2)


def omega_membership(state, params):
    """``{p, q}`` in Omega: ``p >= 0``, ``0 <= q <= q_max``, ``q / p <= s_ratio`` (p = 0 needs q = 0)."""
    p, q = state
    if p < 0 or q < 0 or q > params.q_max:
        return False
    if p == 0:
        return q == 0
    return q / p <= params.s_ratio


def f_map(state, params, variant="exact"):
    """Image of ``{p, q}`` under one projected step of the counter-example.

    ``p1 = (1 + delta**2 p) / (1 + q / (delta**2 d*^2 (1 + p))) - 1``. With
    ``d0**2 = d*^2 (1 + p)`` the right factor turns by
    ``tan phi_R1 = delta**2 d0**2 tan phi_R0``, so the ``"exact"`` variant uses
    ``q1 = q / (delta**4 d0**4)``. ``"printed"`` evaluates the alternative expression
    ``q1 = q / (delta**4 d*^2 (1 + p))``, which does not commute with
    :func:`pi_map`.
    """
    if not omega_membership(state, params):
        raise DomainError(f"{state} is not in Omega")
    p, q = state
    d2 = params.delta ** 2
    ds2 = params.d_star ** 2
    p1 = (1.0 + d2 * p) / (1.0 + q / (d2 * ds2 * (1.0 + p))) - 1.0
    if variant == "exact":
        q1 = q / (d2 * ds2 * (1.0 + p)) ** 2
    elif variant == "printed":
        q1 = q / (d2 * d2 * ds2 * (1.0 + p))
    else:
        raise ValueError(f"unknown variant {variant!r}")
    return p1, q1


def cot2_angles(Y):
    """Squared cotangents of the left and right angles of a rank-1 2 x 2 factor."""
    u = Y.U[:, 0]
    v = Y.V[:, 0]
    if u[1] == 0.0 or v[1] == 0.0:
        raise DomainError("an angle is zero: cotangent undefined")
    return (u[0] / u[1]) ** 2, (v[0] / v[1]) ** 2


def pi_map(Y, delta):
    """``{||Y - X*||_F**2 / d*^2 - 1, cot^2 phi_R(Y)}`` for a rank-1 2 x 2 factor."""
    if not isinstance(Y, LowRankFactor) or Y.shape != (2, 2) or Y.rank != 1:
        raise DomainError("pi_map needs a rank-1 2 x 2 LowRankFactor")
    v = Y.V[:, 0]
    if v[1] == 0.0:
        raise DomainError("sin phi_R = 0")
    d_star2 = 1.0 / (1.0 - delta ** 2)
    p = frobenius_norm(Y.assemble() - SPURIOUS_XSTAR) ** 2 / d_star2 - 1.0
    return p, (v[0] / v[1]) ** 2


def spurious_attractor(delta):
    """Fixed point ``sigma X_perp`` of projected iteration with ``sigma = delta d*``.

    Returns ``(point, distance)`` with ``distance = ||point - X*||_F = d*``.
    """
    if not 0.0 < delta < 1.0:
        raise ValueError(f"delta must lie in (0, 1), got {delta}")
    sigma = delta / math.sqrt(1.0 - delta ** 2)
    point = sigma * SPURIOUS_XPERP
    return point, frobenius_norm(point - SPURIOUS_XSTAR)


def rank1_from_pq(p, q, delta, phi_l=0.7):
    """A rank-1 2 x 2 factor Y with ``pi_map(Y, delta) == (p, q)``.

    The right vector is ``(cos phi_R, sin phi_R)`` with ``cot^2 phi_R = q``;
    the left vector has angle ``phi_l``; the singular value is chosen so that
    ``||Y - X*||_F**2 = d*^2 (1 + p)``.
    """
    d0_sq = (1.0 + p) / (1.0 - delta ** 2)
    if d0_sq < 1.0:
        raise DomainError("distance below 1 is not reachable with this left angle")
    sin_r = 1.0 / math.sqrt(1.0 + q)
    cos_r = math.sqrt(q) * sin_r
    u = np.array([[math.cos(phi_l)], [math.sin(phi_l)]])
    v = np.array([[cos_r], [sin_r]])
    b = u[0, 0] * v[0, 0]
    sigma = b + math.sqrt(b * b + d0_sq - 1.0)
    return LowRankFactor(u, np.array([[sigma]]), v)
