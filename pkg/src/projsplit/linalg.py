"""Dense linear-algebra primitives and subspace geometry.

Matrices are plain ``numpy.ndarray`` objects of dtype float64. The factored
rank-r point ``U @ S @ V.T`` is carried by :class:`LowRankFactor`.
"""

from dataclasses import dataclass

import numpy as np

from .constants import TOL
from .errors import PreconditionError, RankError, ShapeError


def as_matrix(M, name="matrix"):
    """Return ``M`` as a read-only-safe float64 2-D array, rejecting NaN/Inf."""
    A = np.asarray(M, dtype=np.float64)
    if A.ndim == 1:
        A = A.reshape(-1, 1)
    if A.ndim != 2 or A.shape[0] < 1 or A.shape[1] < 1:
        raise ShapeError(f"{name} must be a non-empty 2-D array, got shape {A.shape}")
    if not np.all(np.isfinite(A)):
        raise ValueError(f"{name} has non-finite entries")
    return A


def _frozen(A):
    A = np.array(A, dtype=np.float64, copy=True)
    A.setflags(write=False)
    return A


def orthonormality_defect(Q):
    """``||Q^T Q - I||_F``."""
    return float(np.linalg.norm(Q.T @ Q - np.eye(Q.shape[1])))


def _require_orthonormal(Q, name):
    defect = orthonormality_defect(Q)
    if defect > TOL.orthonormality:
        raise PreconditionError(
            f"{name} columns are not orthonormal (||Q^T Q - I||_F = {defect:.3e})"
        )


@dataclass(frozen=True)
class LowRankFactor:
    """A rank-r matrix ``U @ S @ V.T`` with orthonormal ``U`` (n x r) and ``V`` (m x r).

    ``S`` is a general r x r core; it is diagonal only when the factor comes
    from :func:`truncated_svd`.
    """

    U: np.ndarray
    S: np.ndarray
    V: np.ndarray

    def __post_init__(self):
        U = as_matrix(self.U, "U")
        V = as_matrix(self.V, "V")
        S = as_matrix(self.S, "S")
        r = U.shape[1]
        if V.shape[1] != r or S.shape != (r, r):
            raise ShapeError(
                f"inconsistent factor shapes U{U.shape}, S{S.shape}, V{V.shape}"
            )
        if r > min(U.shape[0], V.shape[0]):
            raise RankError(f"rank {r} exceeds min(n, m) = {min(U.shape[0], V.shape[0])}")
        _require_orthonormal(U, "U")
        _require_orthonormal(V, "V")
        object.__setattr__(self, "U", _frozen(U))
        object.__setattr__(self, "S", _frozen(S))
        object.__setattr__(self, "V", _frozen(V))

    @property
    def rank(self):
        return self.U.shape[1]

    @property
    def shape(self):
        return (self.U.shape[0], self.V.shape[0])

    def assemble(self):
        return assemble(self)

    def singular_values(self):
        return np.linalg.svd(self.S, compute_uv=False)


def assemble(F):
    """Dense ``U @ S @ V.T``."""
    return F.U @ F.S @ F.V.T


def thin_qr(M, positive_diagonal=True):
    """Thin Householder QR of an n x r matrix, n >= r.

    Q always has orthonormal columns, also for rank-deficient input: the
    Householder reflectors complete the basis deterministically (a zero column
    yields the matching canonical vector). With ``positive_diagonal`` the
    signs are fixed so that ``diag(R) >= 0``; otherwise ``diag(R) <= 0``.
    Both conventions give the same projector ``Q @ Q.T``.
    """
    M = as_matrix(M, "M")
    n, r = M.shape
    if n < r:
        raise ShapeError(f"thin QR needs rows >= cols, got {M.shape}")
    Q, R = np.linalg.qr(M, mode="reduced")
    d = np.sign(np.diag(R))
    d[d == 0] = 1.0
    if not positive_diagonal:
        d = -d
    return Q * d, R * d[:, None]


def is_rank_deficient(R):
    """True when the triangular factor has a pivot negligible against ``||R||_2``."""
    scale = np.abs(R).max()
    if scale == 0.0:
        return True
    return bool(np.abs(np.diag(R)).min() <= TOL.rank_deficiency * scale)


def _fix_svd_signs(U, V):
    # first entry of each left singular vector that is not negligible gets a + sign
    for j in range(U.shape[1]):
        col = U[:, j]
        big = np.flatnonzero(np.abs(col) > 1e-14 * np.abs(col).max())
        if big.size and col[big[0]] < 0:
            U[:, j] = -col
            V[:, j] = -V[:, j]
    return U, V


def truncated_svd(M, r):
    """Best rank-r approximation factors, singular values descending, S diagonal."""
    M = as_matrix(M, "M")
    r = int(r)
    if not 1 <= r <= min(M.shape):
        raise RankError(f"rank must lie in [1, {min(M.shape)}], got {r}")
    U, s, Vt = np.linalg.svd(M, full_matrices=False)
    U = U[:, :r].copy()
    V = Vt[:r].T.copy()
    U, V = _fix_svd_signs(U, V)
    return LowRankFactor(U, np.diag(s[:r]), V)


@dataclass(frozen=True)
class AngleSet:
    """Principal angles between two subspaces, largest cosine first."""

    cosines: np.ndarray
    sines: np.ndarray
    tangents: np.ndarray

    @property
    def max_tangent(self):
        return float(self.tangents.max()) if self.tangents.size else 0.0


def principal_angles(V0, Vstar):
    """Principal angles between span(V0) (m x r) and span(Vstar) (m x q), q <= r.

    Cosines are the singular values of ``Vstar.T @ V0``. Sines are measured
    directly as the norms of the components of the principal vectors of
    ``Vstar`` orthogonal to ``V0``, which keeps small angles accurate.
    """
    V0 = as_matrix(V0, "V0")
    Vstar = as_matrix(Vstar, "Vstar")
    if V0.shape[0] != Vstar.shape[0]:
        raise ShapeError(f"ambient dimensions differ: {V0.shape} vs {Vstar.shape}")
    if Vstar.shape[1] > V0.shape[1]:
        raise ShapeError("second subspace must not have larger dimension than the first")
    _require_orthonormal(V0, "V0")
    _require_orthonormal(Vstar, "Vstar")

    W = V0.T @ Vstar
    _, c, Zt = np.linalg.svd(W, full_matrices=False)
    Z = Zt.T
    residual = Vstar @ Z - V0 @ (W @ Z)
    s = np.linalg.norm(residual, axis=0)
    c = np.clip(c, 0.0, 1.0)
    s = np.clip(s, 0.0, 1.0)
    t = np.full_like(c, np.inf)
    nz = c > 0
    t[nz] = s[nz] / c[nz]
    return AngleSet(_frozen(c), _frozen(s), _frozen(t))


def spectral_norm(M):
    M = np.asarray(M, dtype=np.float64)
    return float(np.linalg.norm(M, 2))


def frobenius_norm(M):
    M = np.asarray(M, dtype=np.float64)
    return float(np.linalg.norm(M))
