"""Numerical tolerances shared by the library, its checks and the tests."""

from dataclasses import dataclass

import numpy as np

EPS = float(np.finfo(np.float64).eps)


@dataclass(frozen=True)
class Tolerances:
    orthonormality: float = 1e-10
    reconstruction: float = 1e-12
    angle_identity: float = 1e-12
    # relative slack for the one-step inequalities of the p/q recursion
    recursion_slack: float = 1e-9
    # err below floor_factor * eps * ||X*||_F is treated as rounding noise
    floor_factor: float = 1e3
    # a pivot below this fraction of ||R||_2 marks a QR as rank deficient
    rank_deficiency: float = 1e-13


TOL = Tolerances()


def numerical_floor(xstar_norm):
    """Error level below which iteration diagnostics are dominated by rounding."""
    return TOL.floor_factor * EPS * max(float(xstar_norm), 1.0)
