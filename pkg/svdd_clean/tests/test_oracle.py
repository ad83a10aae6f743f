import numpy as np
import pytest

from ..errors import ContractError
from ..models import min_enclosing_ball, soft_svdd
from ..nn import SeededRng


def test_singleton_ball():
    ball = min_enclosing_ball([[0.0, 0.0]])
    np.testing.assert_array_equal(ball.center, [0.0, 0.0])
    assert ball.radius == 0.0


def test_two_point_ball():
    ball = min_enclosing_ball([[-1.0, 0.0], [1.0, 0.0]])
    np.testing.assert_allclose(ball.center, [0.0, 0.0], atol=1e-12)
    assert ball.radius == pytest.approx(1.0)


def test_equilateral_triangle_circumradius():
    ball = min_enclosing_ball([[0.0, 0.0], [1.0, 0.0], [0.5, np.sqrt(3) / 2]])
    assert ball.radius == pytest.approx(1 / np.sqrt(3), abs=1e-6)


def test_empty_input_is_rejected():
    with pytest.raises(ContractError):
        min_enclosing_ball(np.zeros((0, 2)))


def test_ball_contains_points_and_spans_diameter():
    for seed in range(20):
        x = SeededRng(seed).normal(size=(30, 3))
        ball = min_enclosing_ball(x)
        distances = np.linalg.norm(x - ball.center, axis=1)
        assert distances.max() <= ball.radius + 1e-12
        diameter = max(np.linalg.norm(a - b) for a in x for b in x)
        assert ball.radius >= diameter / 2 - 1e-12


def test_soft_coincident_points():
    solution = soft_svdd([[1.0, 2.0], [1.0, 2.0]], nu=0.5)
    assert solution.ball.radius == 0.0
    assert not solution.slacks.any()
    assert solution.objective == 0.0


def test_soft_nu_one_midpoint_objective():
    solution = soft_svdd([[-1.0, 0.0], [1.0, 0.0]], nu=1.0, iterations=200)
    assert solution.objective == pytest.approx(1.0)
    np.testing.assert_allclose(solution.ball.center, [0.0, 0.0], atol=1e-9)


def test_soft_small_nu_matches_enclosing_ball():
    x = SeededRng(1).normal(size=(50, 2))
    solution = soft_svdd(x, nu=1e-3, rng=SeededRng(2))
    assert solution.ball.radius == pytest.approx(min_enclosing_ball(x).radius, abs=1e-3)


def test_soft_ball_excludes_far_outlier():
    x = np.vstack([SeededRng(3).normal(size=(50, 2)), [[30.0, 30.0]]])
    solution = soft_svdd(x, nu=0.1, rng=SeededRng(4))
    assert solution.ball.radius < min_enclosing_ball(x).radius
    assert int(np.argmax(solution.slacks)) == 50


def test_soft_trace_never_increases():
    x = SeededRng(5).normal(size=(40, 3))
    trace = soft_svdd(x, nu=0.2, iterations=300, rng=SeededRng(6)).trace
    assert all(b <= a for a, b in zip(trace, trace[1:]))


@pytest.mark.parametrize("nu", [0.0, -0.1, 1.5])
def test_soft_rejects_nu_out_of_range(nu):
    with pytest.raises(ContractError):
        soft_svdd([[0.0], [1.0]], nu=nu)
