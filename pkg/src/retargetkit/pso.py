"""Box-bounded particle swarm maximization.

Randomness is consumed in a fixed order (particle index, then dimension), and
personal/global bests are applied after each iteration's evaluations in
particle-index order, so the result depends only on (fitness, bounds, config)
no matter how the fitness calls are scheduled.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np


@dataclass(frozen=True)
class PsoConfig:
    """Swarm hyperparameters; defaults are the standard constriction-style set."""

    swarm_size: int = 30
    max_iters: int = 100
    inertia: float = 0.72
    cognitive: float = 1.49
    social: float = 1.49
    stall_iters: int = 15
    stall_tol: float = 1e-4
    seed: int = 0

    def __post_init__(self):
        if self.swarm_size < 2:
            raise ValueError("swarm_size must be at least 2")
        if self.max_iters < 1:
            raise ValueError("max_iters must be at least 1")
        if not 0.0 <= self.inertia <= 1.0:
            raise ValueError("inertia must lie in [0, 1]")
        if self.cognitive < 0.0 or self.social < 0.0:
            raise ValueError("cognitive and social factors must be non-negative")
        if self.stall_iters < 1:
            raise ValueError("stall_iters must be at least 1")
        if self.stall_tol < 0.0:
            raise ValueError("stall_tol must be non-negative")


@dataclass(frozen=True)
class SearchBounds:
    """Per-dimension box constraints (lower[i] <= upper[i])."""

    lower: np.ndarray
    upper: np.ndarray

    def __post_init__(self):
        lower = np.atleast_1d(np.asarray(self.lower, dtype=np.float64)).copy()
        upper = np.atleast_1d(np.asarray(self.upper, dtype=np.float64)).copy()
        if lower.ndim != 1 or lower.shape != upper.shape:
            raise ValueError("lower and upper bounds must be 1-D and equal length")
        if lower.size < 1:
            raise ValueError("bounds must have at least one dimension")
        if not np.all(lower <= upper):
            raise ValueError("every lower bound must not exceed its upper bound")
        lower.setflags(write=False)
        upper.setflags(write=False)
        object.__setattr__(self, "lower", lower)
        object.__setattr__(self, "upper", upper)

    @property
    def dimensions(self) -> int:
        return self.lower.size


@dataclass(frozen=True)
class OptimizationTrace:
    """Global best fitness and position after initialization and each iteration."""

    best_fitness: np.ndarray
    best_positions: np.ndarray

    def __post_init__(self):
        fitness = np.asarray(self.best_fitness, dtype=np.float64).copy()
        positions = np.asarray(self.best_positions, dtype=np.float64).copy()
        if fitness.size > 1 and np.any(np.diff(fitness) < 0):
            raise ValueError("best fitness must be non-decreasing over iterations")
        fitness.setflags(write=False)
        positions.setflags(write=False)
        object.__setattr__(self, "best_fitness", fitness)
        object.__setattr__(self, "best_positions", positions)

    def __len__(self) -> int:
        return self.best_fitness.size


def pso_maximize(
    fitness: Callable[[np.ndarray], float],
    bounds: SearchBounds,
    config: PsoConfig | None = None,
) -> tuple[np.ndarray, float, OptimizationTrace]:
    """Maximize `fitness` over the box, returning (best position, best value, trace).

    Positions start uniform in the box with zero velocity. Each iteration
    draws r1, r2 per particle and dimension, applies

        v <- w*v + c1*r1*(pbest - x) + c2*r2*(gbest - x);  x <- x + v,

    clamps x into the box (zeroing the velocity of clamped components),
    then updates personal and global bests on strict improvement. The search
    stops once the global best has improved by less than stall_tol for
    stall_iters consecutive iterations, or at max_iters.
    """
    if config is None:
        config = PsoConfig()
    rng = np.random.default_rng(config.seed)
    lower, upper = bounds.lower, bounds.upper
    size = config.swarm_size
    dims = bounds.dimensions

    pos = lower + rng.uniform(size=(size, dims)) * (upper - lower)
    vel = np.zeros((size, dims))
    fit = np.array([float(fitness(p)) for p in pos])
    pbest = pos.copy()
    pbest_fit = fit.copy()
    best_idx = int(np.argmax(pbest_fit))
    gbest = pbest[best_idx].copy()
    gbest_fit = float(pbest_fit[best_idx])

    trace_fit = [gbest_fit]
    trace_pos = [gbest.copy()]
    stall = 0
    for _ in range(config.max_iters):
        draws = rng.uniform(size=(size, 2, dims))
        vel = (
            config.inertia * vel
            + config.cognitive * draws[:, 0, :] * (pbest - pos)
            + config.social * draws[:, 1, :] * (gbest - pos)
        )
        pos = pos + vel
        clamped = (pos < lower) | (pos > upper)
        pos = np.clip(pos, lower, upper)
        vel[clamped] = 0.0

        fit = np.array([float(fitness(p)) for p in pos])
        improved = fit > pbest_fit
        pbest[improved] = pos[improved]
        pbest_fit[improved] = fit[improved]

        previous = gbest_fit
        best_idx = int(np.argmax(pbest_fit))
        if pbest_fit[best_idx] > gbest_fit:
            gbest_fit = float(pbest_fit[best_idx])
            gbest = pbest[best_idx].copy()

        trace_fit.append(gbest_fit)
        trace_pos.append(gbest.copy())
        stall = stall + 1 if gbest_fit - previous < config.stall_tol else 0
        if stall >= config.stall_iters:
            break

    trace = OptimizationTrace(np.array(trace_fit), np.array(trace_pos))
    return gbest, gbest_fit, trace
