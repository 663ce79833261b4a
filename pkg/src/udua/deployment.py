"""UAV deployment over the grid: evaluation, exhaustive optimum, simulated
annealing and random placement."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from ._km import batch_node_split_km, greedy_at
from .association import Association, Infeasible, build_rate_matrix, default_penalty, solve_greedy, solve_km
from .channel import system_bounds

DEFAULT_BUDGET = 10**7


@dataclass(frozen=True)
class Deployment:
    """Grid positions ``((x_1, y_1), ..., (x_J, y_J))``, 1-based."""

    positions: tuple

    def __post_init__(self):
        object.__setattr__(self, "positions", tuple((int(x), int(y)) for x, y in self.positions))

    def __len__(self):
        return len(self.positions)

    def check(self, region):
        for x, y in self.positions:
            if not (1 <= x <= region.n_x and 1 <= y <= region.n_y):
                raise ValueError(f"UAV position {(x, y)} outside region")
        return self

    def tolist(self):
        return [list(p) for p in self.positions]


@dataclass(frozen=True)
class Solution:
    deployment: Deployment
    association: object
    f: float

    @property
    def feasible(self) -> bool:
        return self.association.feasible


SOLVERS = {"km": solve_km, "greedy": solve_greedy}


def _solver(solver):
    return SOLVERS[solver] if isinstance(solver, str) else solver


def associate(user_set, d: Deployment, table, params, solver=solve_km):
    rm = build_rate_matrix(user_set, d, table, params)
    return _solver(solver)(rm, params.phi)


def evaluate_deployment(user_set, d: Deployment, table, params, solver=solve_km) -> float:
    return associate(user_set, d, table, params, solver).f


def position_index(region, x: int, y: int) -> int:
    return (x - 1) * region.n_y + (y - 1)


def position_of(region, p: int) -> tuple[int, int]:
    return p // region.n_y + 1, p % region.n_y + 1


def _rate_by_position(user_set, table, region) -> np.ndarray:
    """``out[p, i]``: rate from a UAV over position p to user i."""
    P = region.n_x * region.n_y
    xs, ys = np.divmod(np.arange(P), region.n_y)
    xs, ys = xs + 1, ys + 1
    X, Y = user_set.users[:, 0], user_set.users[:, 1]
    return np.ascontiguousarray(table.rate_at(Y[None, :] - ys[:, None], X[None, :] - xs[:, None]))


class BudgetExceeded(RuntimeError):
    pass


def exhaustive_search(user_set, table, params, budget: int = DEFAULT_BUDGET) -> Solution:
    """Theoretical optimum: best KM throughput over every deployment.

    UAVs are interchangeable, so only non-decreasing position-index tuples are
    scored. Positions are indexed x-major, which makes the first maximum
    the lexicographically smallest optimal position tuple.
    """
    region = user_set.region
    P, J = region.n_grids, params.j_uavs
    required = P**J
    if required > budget:
        raise BudgetExceeded(f"exhaustive search needs {required} evaluations, budget is {budget}")
    combos = np.array(list(itertools.combinations_with_replacement(range(P), J)), dtype=np.int64).reshape(-1, J)
    qos = params.min_rate_c
    values = batch_node_split_km(_rate_by_position(user_set, table, region), combos, params.phi, qos, default_penalty(qos))
    best = combos[int(np.argmax(values))]
    d = Deployment([position_of(region, p) for p in best])
    assoc = associate(user_set, d, table, params, solve_km)
    return Solution(d, assoc, assoc.f)


def random_deployment(region, seed=None, j_uavs: int = 2) -> Deployment:
    flat = np.random.default_rng(seed).integers(region.n_grids, size=j_uavs)
    return Deployment(position_of(region, int(p)) for p in flat)


@dataclass(frozen=True)
class SAConfig:
    """Annealing schedule. ``initial_temperature=None`` means
    ``0.1 * eps_max * I``; ``min_temperature=None`` means
    ``min_temperature_ratio * initial_temperature``."""

    initial_temperature: float | None = None
    annealing_rate: float = 0.95
    iterations_per_temperature: int = 20
    min_temperature: float | None = None
    min_temperature_ratio: float = 1e-4
    seed: int | None = 0
    inner_solver: str = "km"

    def __post_init__(self):
        if not 0 < self.annealing_rate < 1:
            raise ValueError("annealing_rate must be in (0, 1)")
        for t in (self.initial_temperature, self.min_temperature):
            if t is not None and not t > 0:
                raise ValueError("temperatures must be positive")
        if not 0 < self.min_temperature_ratio < 1:
            raise ValueError("min_temperature_ratio must be in (0, 1)")
        if self.iterations_per_temperature < 1:
            raise ValueError("iterations_per_temperature must be >= 1")
        if self.inner_solver not in SOLVERS:
            raise ValueError(f"inner_solver must be one of {sorted(SOLVERS)}")


def simulated_annealing(user_set, table, params, cfg: SAConfig = SAConfig()) -> Solution:
    region = user_set.region
    solver = SOLVERS[cfg.inner_solver]
    rng = np.random.default_rng(cfg.seed)
    J = params.j_uavs

    def score(pos):
        a = associate(user_set, Deployment(pos), table, params, solver)
        return a.f, a

    state = [(int(rng.integers(1, region.n_x + 1)), int(rng.integers(1, region.n_y + 1))) for _ in range(J)]
    f, assoc = score(state)
    best = (list(state), f, assoc)

    t = cfg.initial_temperature or 0.1 * system_bounds(params).eps_max * len(user_set)
    t_min = cfg.min_temperature or cfg.min_temperature_ratio * t
    while t > t_min and len(user_set):
        for _ in range(cfg.iterations_per_temperature):
            cand = list(state)
            j = int(rng.integers(J))
            cand[j] = (int(rng.integers(1, region.n_x + 1)), int(rng.integers(1, region.n_y + 1)))
            f_new, a_new = score(cand)
            delta = f_new - f
            # uniform drawn every step so the RNG stream does not depend on delta
            u = rng.random()
            if delta >= 0 or u < math.exp(delta / t):
                state, f, assoc = cand, f_new, a_new
                if f > best[1]:
                    best = (list(state), f, assoc)
        t *= cfg.annealing_rate
    return Solution(Deployment(best[0]), best[2], best[1])


def random_solution(user_set, table, params, seed=None, solver="greedy") -> Solution:
    d = random_deployment(user_set.region, seed, params.j_uavs)
    if solver != "greedy":
        assoc = associate(user_set, d, table, params, solver)
        return Solution(d, assoc, assoc.f)
    if len(user_set) > params.j_uavs * params.phi:
        raise ValueError("more users than total UAV capacity")
    # fused gather + greedy; same result as associate(..., "greedy")
    pos = np.array(d.positions, dtype=np.int64)
    assign, left, f = greedy_at(user_set.users, pos, table.rate, table.n_y, table.n_x, params.phi, params.min_rate_c)
    if left:
        assoc = Infeasible(len(user_set), default_penalty(params.min_rate_c))
    else:
        assoc = Association(assign, f)
    return Solution(d, assoc, assoc.f)


__all__ = [
    "Deployment",
    "Solution",
    "SAConfig",
    "BudgetExceeded",
    "Infeasible",
    "evaluate_deployment",
    "exhaustive_search",
    "simulated_annealing",
    "random_deployment",
    "random_solution",
]
