"""Projector-splitting retraction onto the manifold of rank-r matrices."""

from dataclasses import dataclass

import numpy as np

from .errors import ShapeError
from .linalg import (
    LowRankFactor,
    as_matrix,
    frobenius_norm,
    is_rank_deficient,
    spectral_norm,
    thin_qr,
)


@dataclass(frozen=True)
class RetractionResult:
    """Outcome of one retraction ``A1 = I(A0, D)``.

    ``intermediate_U1`` and ``input_V0`` fix the tangent space in which both
    ``A0`` and ``A1`` lie; ``rank_deficient`` is set when the first QR met a
    (numerically) singular triangular factor.
    """

    point: LowRankFactor
    intermediate_U1: np.ndarray
    input_V0: np.ndarray
    rank_deficient: bool = False


def _check_step(A0, D):
    D = as_matrix(D, "D")
    if D.shape != A0.shape:
        raise ShapeError(f"step has shape {D.shape}, point has shape {A0.shape}")
    return D


def retract(A0, D, qr=thin_qr):
    """Retract ``A0 + D`` onto the rank-r manifold by projector splitting.

    K-step, S-step and L-step::

        U1, S'   = qr(U0 S0 + D V0)
        S''      = S' - U1^T D V0
        V1, S1^T = qr(V0 S''^T + D^T U1)

    The assembled result does not depend on the sign convention of ``qr``.
    """
    D = _check_step(A0, D)
    U0, S0, V0 = A0.U, A0.S, A0.V
    DV0 = D @ V0
    U1, S_k = qr(U0 @ S0 + DV0)
    S_s = S_k - U1.T @ DV0
    V1, S1t = qr(V0 @ S_s.T + D.T @ U1)
    return RetractionResult(
        point=LowRankFactor(U1, S1t.T, V1),
        intermediate_U1=U1,
        input_V0=np.array(V0),
        rank_deficient=is_rank_deficient(S_k),
    )


def retract_two_qr(A0, D, qr=thin_qr):
    """Same retraction written as two QR factorizations of ``A0 + D``.

    ``U1 = qr((A0 + D) V0)``, ``V1, S1^T = qr((A0 + D)^T U1)``. Kept as an
    independent code path for differential testing of :func:`retract`.
    """
    D = _check_step(A0, D)
    Z = A0.assemble() + D
    U1, S_k = qr(Z @ A0.V)
    V1, S1t = qr(Z.T @ U1)
    return RetractionResult(
        point=LowRankFactor(U1, S1t.T, V1),
        intermediate_U1=U1,
        input_V0=np.array(A0.V),
        rank_deficient=is_rank_deficient(S_k),
    )


def tangent_project(U, V, Z):
    """Project ``Z`` onto the tangent space at a point with column space U, row space V.

    Returns ``U U^T Z + Z V V^T - U U^T Z V V^T``.
    """
    Z = as_matrix(Z, "Z")
    if U.shape[0] != Z.shape[0] or V.shape[0] != Z.shape[1]:
        raise ShapeError(f"projector ({U.shape}, {V.shape}) does not act on {Z.shape}")
    UtZ = U.T @ Z
    ZV = Z @ V
    return U @ UtZ + ZV @ V.T - U @ (UtZ @ V) @ V.T


def normal_part(U, V, Z):
    """``(I - U U^T) Z (I - V V^T)``, the component of Z normal to the tangent space."""
    Z = as_matrix(Z, "Z")
    if U.shape[0] != Z.shape[0] or V.shape[0] != Z.shape[1]:
        raise ShapeError(f"projector ({U.shape}, {V.shape}) does not act on {Z.shape}")
    R = Z - U @ (U.T @ Z)
    return R - (R @ V) @ V.T


def normal_residual(U1, V0, Xstar):
    """Normal component of ``Xstar`` at the intermediate point (U1, V0).

    Returns ``(matrix, spectral_norm, frobenius_norm)``.
    """
    P = normal_part(U1, V0, Xstar)
    return P, spectral_norm(P), frobenius_norm(P)
