import logging
from dataclasses import dataclass
from typing import Callable, Tuple

import numpy as np

from core.projections import Projection

logger = logging.getLogger(__name__)

Objective = Callable[[np.ndarray], Tuple[float, np.ndarray]]

VERTEX_STEPS = 100


@dataclass
class AscentResult:
    values: np.ndarray
    objective: float
    iterations: int
    stationarity: float
    converged: bool
    stalled: bool
    vertex_steps: int = 0

    @property
    def degenerate(self) -> bool:
        """Stationary at the starting point: the objective is flat on the feasible set"""
        return self.iterations == 0 and self.vertex_steps == 0 and self.converged


class ProjectedGradientAscent:
    """Maximises a smooth objective over a convex set given by its projection.

    Sets with a linear oracle are first climbed vertex to vertex while the
    objective strictly increases. Projected-gradient steps then double after
    an accepted move and halve after a rejected one; stationarity is measured
    with a fixed reference step.
    """

    def __init__(self, projection: Projection, max_iter: int = 10000, tol: float = 1e-7):
        self.projection = projection
        self.max_iter = max_iter
        self.tol = tol

    def stationarity(self, g: np.ndarray, gradient: np.ndarray, reference: float) -> float:
        peak = float(np.max(np.abs(gradient)))
        if peak == 0.0:
            return 0.0
        moved = self.projection.project(g + reference * gradient / peak) - g
        return float(np.max(np.abs(moved))) / reference

    def climb_vertices(self, objective: Objective, g: np.ndarray, value: float,
                       gradient: np.ndarray) -> Tuple[np.ndarray, float, np.ndarray, int]:
        steps = 0
        while steps < VERTEX_STEPS:
            vertex = self.projection.extreme_point(gradient)
            if vertex is None:
                break
            vertex_value, vertex_gradient = objective(vertex)
            if not vertex_value > value:
                break
            g, value, gradient = vertex, vertex_value, vertex_gradient
            steps += 1
            logger.debug("vertex step %d objective %.12g", steps, value)
        return g, value, gradient, steps

    def run(self, objective: Objective, start: np.ndarray) -> AscentResult:
        g = self.projection.project(np.asarray(start, dtype=float))
        value, gradient = objective(g)
        reference = 1e-3 * float(np.mean(np.abs(g)))
        g, value, gradient, vertex_steps = self.climb_vertices(objective, g, value, gradient)

        peak = float(np.max(np.abs(gradient)))
        step = reference / peak if peak > 0 else reference
        floor_step = 1e-14 * step

        measure = self.stationarity(g, gradient, reference)
        stalled = False
        iterations = 0
        while iterations < self.max_iter and measure >= self.tol:
            candidate = self.projection.project(g + step * gradient)
            candidate_value, candidate_gradient = objective(candidate)
            if candidate_value >= value:
                g, value, gradient = candidate, candidate_value, candidate_gradient
                step *= 2.0
                iterations += 1
                measure = self.stationarity(g, gradient, reference)
                logger.debug("iteration %d objective %.12g stationarity %.3e", iterations, value, measure)
            else:
                step *= 0.5
                if step < floor_step:
                    stalled = True
                    break

        if stalled:
            logger.debug("Line search stalled at stationarity %.3e after %d iterations", measure, iterations)
        return AscentResult(
            values=g,
            objective=value,
            iterations=iterations,
            stationarity=measure,
            converged=measure < self.tol,
            stalled=stalled,
            vertex_steps=vertex_steps,
        )
