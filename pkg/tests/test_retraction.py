import math

import numpy as np
import pytest
from hypothesis import given, seed, settings
from hypothesis import strategies as st

from projsplit.errors import ShapeError
from projsplit.linalg import LowRankFactor, frobenius_norm, orthonormality_defect, truncated_svd
from projsplit.retraction import (
    normal_part,
    normal_residual,
    retract,
    retract_two_qr,
    tangent_project,
)

E1 = np.array([[1.0], [0.0]])


def explicit_projector(U, V):
    """Dense matrix of the tangent projector acting on row-major vec(Z)."""
    n, m = U.shape[0], V.shape[0]
    PU, PV = U @ U.T, V @ V.T
    In, Im = np.eye(n), np.eye(m)
    return np.kron(PU, Im) + np.kron(In, PV) - np.kron(PU, PV)


def random_point(rng, n, m, r):
    return truncated_svd(rng.standard_normal((n, r)) @ rng.standard_normal((r, m)), r)


cases = st.tuples(st.integers(2, 9), st.integers(2, 9), st.integers(0, 2**32 - 1))


def test_zero_step_is_identity():
    A0 = random_point(np.random.default_rng(0), 6, 5, 2)
    res = retract(A0, np.zeros((6, 5)))
    np.testing.assert_allclose(res.point.assemble(), A0.assemble(), atol=1e-12)


def test_hand_executed_two_by_two():
    A0 = LowRankFactor(E1, np.array([[1.0]]), E1)
    D = np.array([[0.0, 1.0], [0.0, 0.0]])
    res = retract(A0, D)
    np.testing.assert_allclose(res.intermediate_U1, E1, atol=1e-15)
    np.testing.assert_allclose(np.abs(res.point.V), [[1 / math.sqrt(2)], [1 / math.sqrt(2)]], atol=1e-15)
    np.testing.assert_allclose(np.abs(res.point.S), [[math.sqrt(2.0)]], atol=1e-15)
    np.testing.assert_allclose(res.point.assemble(), [[1.0, 1.0], [0.0, 0.0]], atol=1e-15)


def test_matches_tangent_projection_at_intermediate_point():
    rng = np.random.default_rng(1)
    A0 = random_point(rng, 40, 40, 7)
    D = rng.standard_normal((40, 40))
    res = retract(A0, D)
    Z = A0.assemble() + D
    P = tangent_project(res.intermediate_U1, res.input_V0, Z)
    assert frobenius_norm(res.point.assemble() - P) <= 1e-12 * frobenius_norm(Z)


@seed(3)
@settings(max_examples=50, deadline=None)
@given(cases)
def test_agrees_with_two_qr_form(case):
    n, m, s = case
    rng = np.random.default_rng(s)
    r = int(rng.integers(1, min(n, m) + 1))
    A0 = random_point(rng, n, m, r)
    D = rng.standard_normal((n, m))
    a = retract(A0, D)
    b = retract_two_qr(A0, D)
    scale = frobenius_norm(A0.assemble() + D)
    assert frobenius_norm(a.point.assemble() - b.point.assemble()) <= 1e-12 * scale
    assert orthonormality_defect(a.point.U) < 1e-12
    assert orthonormality_defect(a.point.V) < 1e-12
    assert a.point.rank == r


def test_result_lies_in_its_own_tangent_space():
    rng = np.random.default_rng(2)
    A0 = random_point(rng, 8, 6, 3)
    res = retract(A0, rng.standard_normal((8, 6)))
    Y = res.point.assemble()
    np.testing.assert_allclose(tangent_project(res.point.U, res.point.V, Y), Y, atol=1e-13)
    # A0 and A1 both lie in the tangent space at (U1, V0)
    for M in (Y, A0.assemble()):
        np.testing.assert_allclose(
            tangent_project(res.intermediate_U1, res.input_V0, M), M, atol=1e-13
        )


def test_sign_convention_does_not_change_result():
    from projsplit.linalg import thin_qr

    rng = np.random.default_rng(4)
    A0 = random_point(rng, 7, 7, 3)
    D = rng.standard_normal((7, 7))
    pos = retract(A0, D).point.assemble()
    neg = retract(A0, D, qr=lambda M: thin_qr(M, positive_diagonal=False)).point.assemble()
    np.testing.assert_allclose(pos, neg, atol=1e-13)


def test_rank_deficient_step_flagged():
    A0 = LowRankFactor(E1, np.array([[1.0]]), E1)
    D = -A0.assemble()
    res = retract(A0, D)
    assert res.rank_deficient
    assert orthonormality_defect(res.point.U) < 1e-14


def test_shape_mismatch():
    A0 = LowRankFactor(E1, np.array([[1.0]]), E1)
    with pytest.raises(ShapeError):
        retract(A0, np.zeros((3, 2)))


class TestTangentProject:
    def test_tangent_matrix_fixed(self):
        rng = np.random.default_rng(0)
        U = np.linalg.qr(rng.standard_normal((6, 2)))[0]
        V = np.linalg.qr(rng.standard_normal((5, 2)))[0]
        X = U @ rng.standard_normal((2, 2)) @ V.T
        np.testing.assert_allclose(tangent_project(U, V, X), X, atol=1e-14)

    def test_pure_normal_direction(self):
        E22 = np.array([[0.0, 0.0], [0.0, 1.0]])
        np.testing.assert_array_equal(tangent_project(E1, E1, E22), np.zeros((2, 2)))

    @seed(8)
    @settings(max_examples=40, deadline=None)
    @given(cases)
    def test_idempotent_and_matches_dense_operator(self, case):
        n, m, s = case
        rng = np.random.default_rng(s)
        r = int(rng.integers(1, min(n, m) + 1))
        U = np.linalg.qr(rng.standard_normal((n, r)))[0]
        V = np.linalg.qr(rng.standard_normal((m, r)))[0]
        Z = rng.standard_normal((n, m))
        P = tangent_project(U, V, Z)
        np.testing.assert_allclose(tangent_project(U, V, P), P, atol=1e-12)
        dense = (explicit_projector(U, V) @ Z.ravel()).reshape(n, m)
        np.testing.assert_allclose(P, dense, atol=1e-12)
        np.testing.assert_allclose(P + normal_part(U, V, Z), Z, atol=1e-12)


class TestNormalResidual:
    def test_tangent_target_has_zero_residual(self):
        rng = np.random.default_rng(3)
        U1 = np.linalg.qr(rng.standard_normal((5, 2)))[0]
        V0 = np.linalg.qr(rng.standard_normal((4, 2)))[0]
        X = U1 @ rng.standard_normal((2, 2)) @ V0.T
        _, two, fro = normal_residual(U1, V0, X)
        assert two < 1e-14 and fro < 1e-14

    def test_hand_projection(self):
        P, two, fro = normal_residual(E1, E1, np.eye(2))
        np.testing.assert_array_equal(P, [[0.0, 0.0], [0.0, 1.0]])
        assert two == 1.0 and fro == 1.0
