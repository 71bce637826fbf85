"""Contraction mappings Phi with a known fixed point X*.

Random objects are drawn from Philox (counter-based, 64-bit) generators.
Every consumer gets its own stream derived from ``(seed, stream id, ...)``
so experiments are reproducible and independent of call order.
"""

import abc
from dataclasses import dataclass, field

import numpy as np

from .errors import ShapeError
from .linalg import as_matrix, frobenius_norm, thin_qr

STREAMS = {"xstar": 0, "operator": 1, "initial": 2, "noise": 3, "verify": 4}


def rng_stream(seed, stream, *keys):
    """Independent Philox generator for ``(seed, stream, *keys)``."""
    key = (STREAMS[stream],) + tuple(int(k) for k in keys)
    ss = np.random.SeedSequence(int(seed) & 0xFFFFFFFFFFFFFFFF, spawn_key=key)
    return np.random.Generator(np.random.Philox(ss))


def random_orthonormal(rng, n, r):
    Q, _ = thin_qr(rng.standard_normal((n, r)))
    return Q


class FixedPointMap(abc.ABC):
    """Contract: ``apply(fixed_point()) == fixed_point()`` and
    ``||apply(A) - apply(B)||_F <= delta * ||A - B||_F``."""

    is_linear = False

    @abc.abstractmethod
    def apply(self, Y, step_index=0):
        """Evaluate the map. ``step_index`` only matters for stochastic maps."""

    @abc.abstractmethod
    def fixed_point(self):
        ...

    @property
    @abc.abstractmethod
    def delta(self):
        ...

    @property
    def shape(self):
        return self.fixed_point().shape

    def _check(self, Y):
        Y = as_matrix(Y, "Y")
        if Y.shape != self.shape:
            raise ShapeError(f"map acts on {self.shape} matrices, got {Y.shape}")
        return Y


@dataclass(frozen=True, eq=False)
class LinearContraction(FixedPointMap):
    """``Phi(X) = X* + unvec(Q vec(X - X*))`` with a dense (nm) x (nm) operator Q.

    ``vec`` is row-major flattening. ``contraction`` is the spectral norm of Q.
    """

    Xstar: np.ndarray
    Q_operator: np.ndarray
    contraction: float
    singular_values: tuple = field(default=())

    is_linear = True

    def __post_init__(self):
        X = as_matrix(self.Xstar, "Xstar")
        N = X.size
        if self.Q_operator.shape != (N, N):
            raise ShapeError(f"operator must be {N} x {N}, got {self.Q_operator.shape}")
        X.setflags(write=False)
        self.Q_operator.setflags(write=False)
        object.__setattr__(self, "Xstar", X)

    def apply(self, Y, step_index=0):
        return linear_apply(self, Y)

    def fixed_point(self):
        return self.Xstar

    @property
    def delta(self):
        return self.contraction


def linear_apply(cmap, Y):
    Y = cmap._check(Y)
    E = (Y - cmap.Xstar).ravel()
    return cmap.Xstar + (cmap.Q_operator @ E).reshape(cmap.Xstar.shape)


def _validate_sv_spec(sv_spec, r):
    sv = np.asarray(sv_spec, dtype=np.float64).ravel()
    if sv.size != r:
        raise ValueError(f"need {r} singular values, got {sv.size}")
    if not np.all(np.isfinite(sv)) or np.any(sv <= 0):
        raise ValueError("singular values must be positive and finite")
    if np.any(np.diff(sv) > 0):
        raise ValueError("singular values must be non-increasing")
    return sv


def geometric_singular_values(r, top=10.0, bottom=1.0):
    """``r`` values spaced geometrically from ``top`` down to ``bottom``."""
    return np.geomspace(top, bottom, r)


def staircase_singular_values(r):
    """``sigma_k = 10**(4 - 2k)``, k = 1..r."""
    return 10.0 ** (4 - 2 * np.arange(1, r + 1))


def make_random_linear_contraction(n, m, r, delta, sv_spec, seed, operator="symmetric"):
    """Seeded :class:`LinearContraction` with ``X* = U* diag(sv_spec) V*^T``.

    ``operator="symmetric"`` builds ``Q = W diag(lam) W^T`` with W Haar
    orthogonal, ``N - floor(t/2)`` eigenvalues equal to ``delta`` (t is the
    dimension of the rank-r tangent space) and the remaining ones uniform on
    ``(-delta, delta)``. By Cauchy interlacing the compression of Q to any
    tangent space then keeps the eigenvalue ``delta``, so the projected
    iteration contracts asymptotically at exactly ``delta``.

    ``operator="gaussian"`` fills Q with i.i.d. normals and rescales it to
    spectral norm ``delta``; its spectral radius is about ``delta / 2``.
    """
    n, m, r = int(n), int(m), int(r)
    if not 1 <= r <= min(n, m):
        raise ValueError(f"rank must lie in [1, {min(n, m)}], got {r}")
    if not 0.0 < delta < 1.0:
        raise ValueError(f"delta must lie in (0, 1), got {delta}")
    sv = _validate_sv_spec(sv_spec, r)

    rng = rng_stream(seed, "xstar")
    Ustar = random_orthonormal(rng, n, r)
    Vstar = random_orthonormal(rng, m, r)
    Xstar = (Ustar * sv) @ Vstar.T

    N = n * m
    rng = rng_stream(seed, "operator")
    if operator == "symmetric":
        W = random_orthonormal(rng, N, N)
        tangent_dim = r * (n + m - r)
        pinned = N - tangent_dim // 2
        lam = np.empty(N)
        lam[:pinned] = delta
        lam[pinned:] = rng.uniform(-delta, delta, N - pinned)
        Q = (W * lam) @ W.T
        Q = 0.5 * (Q + Q.T)
    elif operator == "gaussian":
        G = rng.standard_normal((N, N))
        Q = G * (delta / np.linalg.norm(G, 2))
    else:
        raise ValueError(f"unknown operator kind {operator!r}")
    return LinearContraction(Xstar, Q, float(delta), tuple(float(x) for x in sv))


SPURIOUS_XSTAR = np.array([[1.0, 0.0], [0.0, 0.0]])
SPURIOUS_XPERP = np.array([[0.0, 0.0], [0.0, 1.0]])
SPURIOUS_XSTAR.setflags(write=False)
SPURIOUS_XPERP.setflags(write=False)


@dataclass(frozen=True, eq=False)
class SpuriousMap(FixedPointMap):
    """``Phi(Y) = X* + delta ||Y - X*||_F X_perp`` on 2 x 2 matrices."""

    contraction: float

    def __post_init__(self):
        if not 0.0 < self.contraction < 1.0:
            raise ValueError(f"delta must lie in (0, 1), got {self.contraction}")

    def apply(self, Y, step_index=0):
        return spurious_apply(self, Y)

    def fixed_point(self):
        return SPURIOUS_XSTAR

    @property
    def delta(self):
        return self.contraction

    @property
    def Xperp(self):
        return SPURIOUS_XPERP


def spurious_apply(cmap, Y):
    Y = cmap._check(Y)
    return SPURIOUS_XSTAR + cmap.contraction * frobenius_norm(Y - SPURIOUS_XSTAR) * SPURIOUS_XPERP


@dataclass(frozen=True, eq=False)
class PerturbedMap(FixedPointMap):
    """``inner`` plus Gaussian noise scaled by the length of the step it produces.

    At step k the noise R_k has i.i.d. entries with standard deviation
    ``||inner(Y) - Y||_F / noise_scale_divisor``; with
    ``noise_convention="variance"`` that quantity is read as the variance.
    R_k comes from the stream ``(rng_seed, "noise", k)``.
    """

    inner: FixedPointMap
    noise_scale_divisor: float
    rng_seed: int
    noise_convention: str = "std"

    def __post_init__(self):
        if not self.noise_scale_divisor > 0:
            raise ValueError("noise divisor must be positive")
        if self.noise_convention not in ("std", "variance"):
            raise ValueError(f"unknown noise convention {self.noise_convention!r}")

    @property
    def is_linear(self):
        return self.inner.is_linear

    def apply(self, Y, step_index=0):
        return perturbed_apply(self, Y, step_index)

    def fixed_point(self):
        return self.inner.fixed_point()

    @property
    def delta(self):
        return self.inner.delta

    def noise_std(self, Y):
        step = frobenius_norm(self.inner.apply(Y) - Y)
        scale = step / self.noise_scale_divisor
        return float(np.sqrt(scale)) if self.noise_convention == "variance" else scale


def perturbed_apply(cmap, Y, step_index):
    Y = cmap._check(Y)
    base = cmap.inner.apply(Y, step_index)
    scale = frobenius_norm(base - Y) / cmap.noise_scale_divisor
    std = np.sqrt(scale) if cmap.noise_convention == "variance" else scale
    if std == 0.0 or not np.isfinite(std):
        return base
    rng = rng_stream(cmap.rng_seed, "noise", step_index)
    return base + std * rng.standard_normal(base.shape)


def sampled_contraction_factor(cmap, n_pairs=100, seed=0, scale=1.0):
    """Largest observed ``||Phi(A) - Phi(B)|| / ||A - B||`` over random pairs."""
    rng = rng_stream(seed, "verify")
    shape = cmap.shape
    worst = 0.0
    for _ in range(n_pairs):
        A = cmap.fixed_point() + scale * rng.standard_normal(shape)
        B = cmap.fixed_point() + scale * rng.standard_normal(shape)
        ratio = frobenius_norm(cmap.apply(A) - cmap.apply(B)) / frobenius_norm(A - B)
        worst = max(worst, ratio)
    return worst
