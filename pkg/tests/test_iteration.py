import math

import numpy as np
import pytest
from hypothesis import given, seed, settings
from hypothesis import strategies as st

from projsplit.bounds import normal_component_bound
from projsplit.contractions import LinearContraction, SpuriousMap, make_random_linear_contraction
from projsplit.iteration import (
    RunConfig,
    component_angles,
    decompose_error,
    initial_point,
    make_target,
    run,
    step,
)
from projsplit.linalg import LowRankFactor, frobenius_norm, truncated_svd
from projsplit.retraction import RetractionResult

E1 = np.array([[1.0], [0.0]])
E2 = np.array([[0.0], [1.0]])


@pytest.fixture(scope="module")
def linear_map():
    return make_random_linear_contraction(8, 7, 3, 0.7, [4.0, 2.0, 1.0], seed=5)


def test_fixed_point_is_stationary(linear_map):
    X = linear_map.fixed_point()
    res, rec = step(linear_map, truncated_svd(X, 3))
    assert frobenius_norm(res.point.assemble() - X) <= 1e-12 * frobenius_norm(X)
    assert rec.k == 1


def test_zero_operator_converges_in_one_step():
    X = truncated_svd(np.random.default_rng(0).standard_normal((5, 4)), 2).assemble()
    cmap = LinearContraction(X, np.zeros((20, 20)), 0.0)
    Y0 = truncated_svd(np.random.default_rng(1).standard_normal((5, 4)), 2)
    trace = run(cmap, Y0, RunConfig(rank=2, tol=1e-12))
    assert trace.stop_reason == "converged"
    assert len(trace) == 2


def test_spurious_map_moves_toward_attractor():
    delta = 0.5
    d_star = 1 / math.sqrt(1 - delta ** 2)
    tilt = 1e-6
    u = np.array([[math.sin(tilt)], [math.cos(tilt)]])
    Y = LowRankFactor(u, np.array([[0.57735]]), E2)
    cmap = SpuriousMap(delta)
    errs = []
    for k in range(30):
        res, rec = step(cmap, Y, k)
        Y = res.point
        errs.append(rec.err_total)
    assert abs(errs[-1] - d_star) < abs(errs[0] - d_star)
    assert errs[-1] == pytest.approx(d_star, abs=1e-6)


@seed(4)
@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_tangent_error_contracts(s):
    cmap = make_random_linear_contraction(6, 6, 2, 0.8, [2.0, 1.0], seed=s, operator="gaussian")
    X = cmap.fixed_point()
    Y0 = initial_point(X, 2, 0.3, s)
    res, rec = step(cmap, Y0)
    err0 = frobenius_norm(Y0.assemble() - X)
    assert rec.err_tangent <= 0.8 * err0 + 1e-10
    # the error splits orthogonally at the intermediate point
    assert rec.err_total ** 2 == pytest.approx(rec.err_tangent ** 2 + rec.err_normal ** 2, rel=1e-9)
    # normal component against the angle bound (spectral norms)
    H = cmap.apply(Y0.assemble()) - X
    bound = normal_component_bound(H, res.input_V0, make_target(X).factor.V)
    assert rec.err_normal_spectral <= bound + 1e-10


def test_decompose_error_tangent_target():
    rng = np.random.default_rng(2)
    X = truncated_svd(rng.standard_normal((5, 5)), 2)
    res = RetractionResult(X, X.U, X.V)
    tangent, normal = decompose_error(res, X.assemble())
    assert normal == 0.0 or normal < 1e-14
    assert tangent < 1e-14


def test_decompose_error_hand_case():
    Y1 = LowRankFactor(E1, np.array([[1.0]]), E1)
    res = RetractionResult(Y1, E1, E1)
    tangent, normal = decompose_error(res, np.eye(2))
    assert normal == 1.0
    assert tangent == 0.0
    assert frobenius_norm(Y1.assemble() - np.eye(2)) == 1.0


class TestComponentAngles:
    def test_at_target(self):
        X = truncated_svd(np.diag([3.0, 2.0, 0.0]), 2)
        sl, sr = component_angles(X, X)
        np.testing.assert_allclose(sl, 0.0, atol=1e-15)
        np.testing.assert_allclose(sr, 0.0, atol=1e-15)

    def test_orthogonal(self):
        Y = LowRankFactor(E1, np.eye(1), E1)
        Xs = LowRankFactor(E1, np.eye(1), E2)
        _, sr = component_angles(Y, Xs)
        assert sr[0] == 1.0

    def test_forty_five_degrees(self):
        w = np.array([[1.0], [1.0]]) / math.sqrt(2.0)
        Y = LowRankFactor(E1, np.eye(1), w)
        _, sr = component_angles(Y, LowRankFactor(E1, np.eye(1), E1))
        assert sr[0] == pytest.approx(0.5, abs=1e-15)


def test_typical_preset_converges_within_200_steps():
    cmap = make_random_linear_contraction(40, 40, 7, 0.8, np.geomspace(10, 1, 7), seed=7)
    Y0 = initial_point(cmap.fixed_point(), 7, 0.05, 7)
    trace = run(cmap, Y0, RunConfig(rank=7, max_iters=200, tol=1e-12))
    assert trace.stop_reason == "converged"
    assert len(trace) <= 201


def test_spurious_run_stops_at_wrong_point():
    trace = run(SpuriousMap(0.5), LowRankFactor(E2, np.eye(1), E2), RunConfig(rank=1))
    assert trace.stop_reason == "stagnated"
    assert trace.records[-1].err_total == pytest.approx(2 / math.sqrt(3), abs=1e-8)


def test_divergence_detected():
    # an expanding "contraction" flags divergence instead of looping
    X = np.diag([1.0, 0.0])
    cmap = LinearContraction(X, 3.0 * np.eye(4), 3.0)
    Y0 = truncated_svd(np.diag([2.0, 0.0]), 1)
    trace = run(cmap, Y0, RunConfig(rank=1, max_iters=1000, divergence_ceiling=1e6))
    assert trace.stop_reason == "diverged"


def test_max_iters_reason(linear_map):
    Y0 = initial_point(linear_map.fixed_point(), 3, 0.5, 0)
    trace = run(linear_map, Y0, RunConfig(rank=3, max_iters=3))
    assert trace.stop_reason == "max_iters"
    assert [r.k for r in trace.records] == [0, 1, 2, 3]


def test_determinism(linear_map):
    Y0 = initial_point(linear_map.fixed_point(), 3, 0.1, 4)
    a = run(linear_map, Y0, RunConfig(rank=3, max_iters=40))
    b = run(linear_map, Y0, RunConfig(rank=3, max_iters=40))
    assert a.records == b.records


def test_initial_record_splits_in_own_tangent_space(linear_map):
    X = linear_map.fixed_point()
    Y0 = initial_point(X, 3, 0.2, 1)
    trace = run(linear_map, Y0, RunConfig(rank=3, max_iters=0))
    rec = trace.records[0]
    assert rec.k == 0
    assert rec.err_total == pytest.approx(frobenius_norm(Y0.assemble() - X))
    assert rec.err_total ** 2 == pytest.approx(rec.err_tangent ** 2 + rec.err_normal ** 2)
    assert rec.p == pytest.approx(rec.err_total ** 2 / trace.s_r ** 2)


def test_initial_point_has_requested_distance():
    X = np.diag([3.0, 2.0, 0.0, 0.0])
    Y0 = initial_point(X, 2, 1e-3, 0)
    assert frobenius_norm(Y0.assemble() - X) <= 1e-3 + 1e-15
    assert Y0.rank == 2


@pytest.mark.parametrize("kwargs", [dict(rank=0), dict(rank=1, max_iters=-1), dict(rank=1, tol=0.0)])
def test_run_config_validation(kwargs):
    with pytest.raises(ValueError):
        RunConfig(**kwargs)


def test_spectral_vs_frobenius_normal(linear_map):
    Y0 = initial_point(linear_map.fixed_point(), 3, 0.3, 2)
    _, rec = step(linear_map, Y0)
    assert rec.err_normal_spectral <= rec.err_normal + 1e-15
