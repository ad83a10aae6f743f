"""Input-space SVDD solvers used as ground truth for the deep model.

``min_enclosing_ball`` solves the hard-margin problem (every point inside) and
``soft_svdd`` the nu-parametrized soft-margin problem with a linear kernel.
"""

import logging
from dataclasses import dataclass
from typing import List, Optional, Tuple

import numpy as np

from ..errors import ContractError, ShapeError
from ..nn import SeededRng

logger = logging.getLogger(__name__)

DEFAULT_ITERATIONS = 5000
MEB_TOLERANCE = 1e-12
MEB_MAX_ITERATIONS = 200_000


@dataclass(eq=False)
class Ball:
    center: np.ndarray
    radius: float

    def __post_init__(self):
        self.center = np.asarray(self.center, dtype=np.float64)
        if self.radius < 0:
            raise ContractError(f"Ball radius must be non-negative, got {self.radius}")


@dataclass(eq=False)
class SoftSvddSolution:
    ball: Ball
    slacks: np.ndarray
    nu: float
    objective: float
    trace: List[float]


def _as_points(points) -> np.ndarray:
    x = np.asarray(points, dtype=np.float64)
    if x.ndim == 1 and x.size:
        x = x[:, None]
    if x.ndim != 2:
        raise ShapeError(f"Points must form a 2-D array, got shape {x.shape}")
    if x.shape[0] == 0:
        raise ContractError("Need at least one point")
    if not np.all(np.isfinite(x)):
        raise ContractError("Points must be finite")
    return x


def _squared_distances(x: np.ndarray, center: np.ndarray) -> np.ndarray:
    return np.sum((x - center) ** 2, axis=1)


def min_enclosing_ball(points) -> Ball:
    """Smallest ball containing every point.

    Frank-Wolfe with away steps on the dual simplex: the center is a convex
    combination of the points and only a few of them (the core set) carry weight.
    Stops when the farthest point lies within a relative gap of ``MEB_TOLERANCE`` of
    the dual radius. The reported radius is the distance to the farthest point, so
    the ball always contains the data.
    """
    x = _as_points(points)
    n = x.shape[0]

    # Start from the two mutually farthest points of a greedy sweep
    a = int(np.argmax(_squared_distances(x, x[0])))
    b = int(np.argmax(_squared_distances(x, x[a])))
    if a == b or np.array_equal(x[a], x[b]):
        return Ball(center=x[0].copy(), radius=0.0)

    u = np.zeros(n)
    u[a] = u[b] = 0.5
    for iteration in range(MEB_MAX_ITERATIONS):
        center = u @ x
        d = _squared_distances(x, center)
        gamma = float(u @ d)
        if gamma <= 0:
            break

        j = int(np.argmax(d))
        gap_up = d[j] / gamma - 1.0
        if gap_up <= MEB_TOLERANCE:
            break

        support = np.flatnonzero(u > 0)
        k = int(support[np.argmin(d[support])])
        gap_down = 1.0 - d[k] / gamma

        if gap_up > gap_down:
            step = gap_up / (2.0 * (1.0 + gap_up))
            u *= 1.0 - step
            u[j] += step
        else:
            step = min(gap_down / (2.0 * (1.0 - gap_down)), u[k] / (1.0 - u[k]))
            u *= 1.0 + step
            u[k] -= step
            u[k] = max(u[k], 0.0)
    else:
        logger.warning(f"Enclosing ball did not converge in {MEB_MAX_ITERATIONS} steps")

    center = u @ x
    return Ball(center=center, radius=float(np.sqrt(_squared_distances(x, center).max())))


def _optimal_radius2(d: np.ndarray, nu: float) -> float:
    # f(T) = T + 1/(nu n) sum max(0, d_i - T) has slope 1 - #{d_i > T}/(nu n), so
    # the minimizer is the (floor(nu n) + 1)-th largest distance.
    n = d.shape[0]
    m = int(np.floor(nu * n))
    if m >= n:
        return 0.0
    return float(np.sort(d)[::-1][m])


def _soft_objective(d: np.ndarray, radius2: float, nu: float) -> float:
    return radius2 + np.sum(np.maximum(0.0, d - radius2)) / (nu * d.shape[0])


def soft_svdd(
    points,
    nu: float,
    iterations: int = DEFAULT_ITERATIONS,
    rng: Optional[SeededRng] = None,
) -> SoftSvddSolution:
    """Minimize ``R^2 + 1/(nu n) sum xi_i`` subject to ``|x_i - c|^2 <= R^2 + xi_i``.

    Slacks and R^2 are eliminated in closed form for each candidate center; the
    center itself follows normalized subgradient steps of length ``scale/sqrt(t)``
    from a randomly jittered centroid. ``trace`` records the best objective so far.
    """
    if not 0 < nu <= 1:
        raise ContractError(f"nu must lie in (0, 1], got {nu}")
    x = _as_points(points)
    n = x.shape[0]
    if n < 2:
        raise ContractError("soft_svdd needs at least two points")
    if rng is None:
        rng = SeededRng(0)

    def evaluate(center: np.ndarray) -> Tuple[float, float, np.ndarray]:
        d = _squared_distances(x, center)
        radius2 = _optimal_radius2(d, nu)
        return _soft_objective(d, radius2, nu), radius2, d

    centroid = x.mean(axis=0)
    scale = float(np.sqrt(_squared_distances(x, centroid).mean()))
    c = centroid + rng.normal(0.0, 1e-3 * scale, x.shape[1]) if scale > 0 else centroid

    best_center, (best_obj, _, _) = centroid.copy(), evaluate(centroid)
    trace = []
    weight = 1.0 / (nu * n)
    for t in range(1, iterations + 1):
        obj, radius2, d = evaluate(c)
        if obj < best_obj:
            best_obj, best_center = obj, c.copy()
        trace.append(best_obj)

        outside = d > radius2
        grad = 2.0 * weight * np.sum(c - x[outside], axis=0)
        # The radius term follows the boundary point it sits on
        n_out = int(outside.sum())
        if radius2 > 0 and n_out < n:
            on_boundary = np.flatnonzero(~outside)
            k = on_boundary[np.argmax(d[on_boundary])]
            grad += (1.0 - weight * n_out) * 2.0 * (c - x[k])

        norm = np.linalg.norm(grad)
        if norm == 0 or scale == 0:
            break
        c = c - (scale / np.sqrt(t)) * grad / norm

    # With nu n < 1 a single outside point already costs more than growing the
    # ball, so the optimum is the hard-margin enclosing ball
    if nu * n < 1:
        ball = min_enclosing_ball(x)
        obj, _, _ = evaluate(ball.center)
        if obj <= best_obj:
            best_obj, best_center = obj, ball.center
            trace.append(best_obj)

    obj, radius2, d = evaluate(best_center)
    return SoftSvddSolution(
        ball=Ball(center=best_center, radius=float(np.sqrt(radius2))),
        slacks=np.maximum(0.0, d - radius2),
        nu=nu,
        objective=float(obj),
        trace=trace,
    )
