"""Projected fixed-point iteration on fixed-rank matrices with the projector-splitting retraction."""

from .bounds import (
    OmegaParams,
    c_star,
    certify,
    check_sufficient_condition,
    corollary_constant,
    f_map,
    normal_component_bound,
    pi_map,
    spurious_attractor,
)
from .contractions import LinearContraction, PerturbedMap, SpuriousMap, make_random_linear_contraction
from .errors import ProjSplitError
from .iteration import IterationTrace, RunConfig, run, step
from .linalg import LowRankFactor, principal_angles, thin_qr, truncated_svd
from .retraction import retract, tangent_project

__all__ = [
    "IterationTrace",
    "LinearContraction",
    "LowRankFactor",
    "OmegaParams",
    "PerturbedMap",
    "ProjSplitError",
    "RunConfig",
    "SpuriousMap",
    "c_star",
    "certify",
    "check_sufficient_condition",
    "corollary_constant",
    "f_map",
    "make_random_linear_contraction",
    "normal_component_bound",
    "pi_map",
    "principal_angles",
    "retract",
    "run",
    "spurious_attractor",
    "step",
    "tangent_project",
    "thin_qr",
    "truncated_svd",
]
