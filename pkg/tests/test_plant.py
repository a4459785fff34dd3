"""Plant-side tests: weight trajectories, internal dynamics, coupled field."""
import numpy as np
import pytest

from edgesync.graph import complete_graph
from edgesync.plant import (
    EdgeWeight,
    InternalDynamics,
    WeightTrajectory,
    benchmark_weight_trajectory,
    plant_rhs,
    weight_eval,
)


def test_benchmark_length_and_t0_values():
    traj = benchmark_weight_trajectory()
    assert len(traj) == 30
    w0, _ = weight_eval(traj, 0.0)
    expected = np.concatenate(
        [
            [0.7, 0.9, 0.6, 0.25, 0.4, 0.47],
            np.zeros(15),
            [0.35, 0.6, 0.2],
            np.zeros(5),
            [0.5],
        ]
    )
    assert np.allclose(w0, expected, atol=1e-12)
    assert w0[0] == 0.7  # sin term vanishes exactly at t = 0


def test_benchmark_constant_entries():
    traj = benchmark_weight_trajectory()
    for t in (0.0, 17.3, 250.0, 999.0):
        w, dw = weight_eval(traj, t)
        assert w[3] == 0.25 and w[4] == 0.4 and w[-1] == 0.5
        assert np.all(w[6:21] == 0.0)
        assert np.all(dw[[3, 4, 29]] == 0.0)


def test_benchmark_derivative_entry_one():
    traj = benchmark_weight_trajectory()
    _, dw = weight_eval(traj, 0.0)
    assert abs(dw[0] - 4e-4) < 1e-12  # d/dt [0.02 sin(0.02 t)] at t=0


def test_benchmark_declared_bounds_are_tight_and_hold():
    traj = benchmark_weight_trajectory()
    assert traj.w_d == pytest.approx(0.9)
    assert traj.w_d_prime == pytest.approx(0.01 * np.pi)
    ts = np.linspace(0.0, 1000.0, 10_000)
    w, dw = weight_eval(traj, ts[:, None])
    assert np.all(np.abs(w) <= traj.w_d + 1e-12)
    assert np.all(np.abs(dw) <= traj.w_d_prime + 1e-12)


def test_weight_eval_derivative_matches_finite_difference():
    traj = benchmark_weight_trajectory()
    rng = np.random.default_rng(5)
    h = 1e-4
    for t in rng.uniform(0.0, 500.0, size=20):
        _, dw = weight_eval(traj, t)
        wp, _ = weight_eval(traj, t + h)
        wm, _ = weight_eval(traj, t - h)
        assert np.max(np.abs((wp - wm) / (2 * h) - dw)) < 1e-6


def test_weight_eval_broadcast_matches_scalar():
    traj = benchmark_weight_trajectory()
    ts = np.array([0.0, 1.5, 32.0])
    w_all, dw_all = weight_eval(traj, ts[:, None])
    for i, t in enumerate(ts):
        w, dw = weight_eval(traj, t)
        assert np.array_equal(w_all[i], w)
        assert np.array_equal(dw_all[i], dw)


def test_trajectory_rejects_violated_bounds():
    with pytest.raises(ValueError):
        WeightTrajectory(edges=(EdgeWeight("sin", 0.5, 0.6, 1.0),), w_d=1.0, w_d_prime=0.1)
    with pytest.raises(ValueError):
        WeightTrajectory(edges=(EdgeWeight("sin", 0.1, 0.1, 9.0),), w_d=1.0, w_d_prime=0.1)
    with pytest.raises(ValueError):
        EdgeWeight("const", 0.5, amplitude=0.1)
    with pytest.raises(ValueError):
        EdgeWeight("square", 0.5)


def test_constant_trajectory_builder():
    traj = WeightTrajectory.constant([0.2, 0.0, 0.7])
    w, dw = weight_eval(traj, 123.4)
    assert np.array_equal(w, [0.2, 0.0, 0.7])
    assert np.all(dw == 0.0)
    assert traj.w_d == 0.7 and traj.w_d_prime == 0.0


@pytest.mark.parametrize(
    "dyn",
    [
        InternalDynamics.linear(3, slope=1.0),
        InternalDynamics.linear(3, slope=-0.4),
        InternalDynamics.saturating(3, gain=2.0),
        InternalDynamics(kinds=("linear", "tanh", "linear"), gains=(0.5, 1.5, 2.0)),
    ],
)
def test_lipschitz_property(dyn):
    rng = np.random.default_rng(9)
    lip = np.array(dyn.lipschitz)
    for _ in range(1000):
        x = rng.uniform(-5.0, 5.0, size=3)
        y = rng.uniform(-5.0, 5.0, size=3)
        assert np.all(np.abs(dyn.f(x) - dyn.f(y)) <= lip * np.abs(x - y) + 1e-12)
    assert dyn.l_f == max(lip)


def test_plant_rhs_zero_everything():
    m = complete_graph(3)
    traj = WeightTrajectory.constant(np.zeros(6))
    dyn = InternalDynamics.linear(3, slope=0.0)
    out = plant_rhs(m, traj, dyn, np.array([1.0, 2.0, 3.0]), np.zeros(3), 0.0, c=1.0)
    assert np.all(out == 0.0)


def test_plant_rhs_two_agents_hand_value():
    # single active edge (1,2): node 2 receives x1 - x2 = 1 on top of f(x)=x
    m = complete_graph(2)
    traj = WeightTrajectory.constant([1.0, 0.0])
    dyn = InternalDynamics.linear(2, slope=1.0)
    out = plant_rhs(m, traj, dyn, np.array([1.0, 0.0]), np.zeros(2), 0.0, c=1.0)
    assert np.allclose(out, [1.0, 1.0], atol=1e-12)


def test_plant_rhs_consensus_annihilates_coupling():
    m = complete_graph(5)
    rng = np.random.default_rng(2)
    traj = WeightTrajectory.constant(rng.uniform(0.0, 1.0, size=m.m))
    dyn = InternalDynamics.linear(5, slope=0.0)
    x = 0.77 * np.ones(5)
    out = plant_rhs(m, traj, dyn, x, np.zeros(5), 3.0, c=2.0)
    assert np.allclose(out, 0.0, atol=1e-12)


def test_plant_rhs_dimension_errors():
    m = complete_graph(3)
    traj = WeightTrajectory.constant(np.zeros(6))
    dyn = InternalDynamics.linear(3)
    with pytest.raises(ValueError):
        plant_rhs(m, traj, dyn, np.zeros(4), np.zeros(3), 0.0)
    with pytest.raises(ValueError):
        plant_rhs(m, WeightTrajectory.constant(np.zeros(5)), dyn, np.zeros(3), np.zeros(3), 0.0)
