"""User association for a fixed deployment: node-split Kuhn-Munkres, the
greedy baseline and a brute-force reference."""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from ._km import greedy_assign, node_split_km

PENALTY_FACTOR = 1e6
MAX_BRUTE_FORCE_USERS = 10


@dataclass(frozen=True)
class RateMatrix:
    """``rates[i, j]`` is the achievable rate (bps) of user i on UAV j."""

    rates: np.ndarray
    qos: float

    def __post_init__(self):
        rates = np.asarray(self.rates, dtype=float)
        if rates.ndim != 2:
            raise ValueError("rates must be an I x J matrix")
        if not np.all(np.isfinite(rates)) or np.any(rates < 0):
            raise ValueError("rates must be finite and non-negative")
        object.__setattr__(self, "rates", rates)

    @property
    def n_users(self) -> int:
        return self.rates.shape[0]

    @property
    def n_uavs(self) -> int:
        return self.rates.shape[1]


@dataclass(frozen=True)
class Association:
    assign: np.ndarray
    f: float
    feasible = True

    def loads(self, n_uavs: int) -> np.ndarray:
        return np.bincount(self.assign, minlength=n_uavs)


@dataclass(frozen=True)
class Infeasible:
    """No association satisfies capacity and QoS; scores ``-I * w_pen``."""

    n_users: int
    w_pen: float
    feasible = False

    @property
    def f(self) -> float:
        return -self.n_users * self.w_pen


def default_penalty(qos: float) -> float:
    return PENALTY_FACTOR * qos if qos > 0 else PENALTY_FACTOR


def build_rate_matrix(user_set, deployment, table, params) -> RateMatrix:
    users = user_set.users if hasattr(user_set, "users") else np.asarray(user_set)
    pos = np.asarray(getattr(deployment, "positions", deployment), dtype=np.int64).reshape(-1, 2)
    X, Y = users[:, 0:1], users[:, 1:2]
    dy = Y - pos[:, 1][None, :]
    dx = X - pos[:, 0][None, :]
    return RateMatrix(table.rate_at(dy, dx).reshape(len(users), len(pos)), params.min_rate_c)


def _check_capacity(rm: RateMatrix, phi: int):
    if phi < 1:
        raise ValueError("phi must be >= 1")
    if rm.n_users > rm.n_uavs * phi:
        raise ValueError(f"{rm.n_users} users exceed total capacity J*phi = {rm.n_uavs * phi}")


def solve_km(rm: RateMatrix, phi: int, w_pen: float | None = None):
    """Throughput-optimal association via maximum-weight matching on the
    node-split graph. Returns :class:`Association` or :class:`Infeasible`."""
    _check_capacity(rm, phi)
    w_pen = default_penalty(rm.qos) if w_pen is None else w_pen
    if w_pen < 1e3 * rm.qos:
        raise ValueError("penalty must exceed the QoS threshold by at least 1e3x")
    if rm.n_users == 0:
        return Association(np.zeros(0, dtype=np.int64), 0.0)
    f, assign, feasible = node_split_km(np.ascontiguousarray(rm.rates), int(phi), float(rm.qos), float(w_pen))
    if not feasible:
        return Infeasible(rm.n_users, w_pen)
    return Association(assign, float(rm.rates[np.arange(rm.n_users), assign].sum()))


def solve_greedy(rm: RateMatrix, phi: int, w_pen: float | None = None):
    """Best-channel-first association.

    Links are visited in descending rate order (ties: lower user, then lower
    UAV); a link is taken when its user is still free, its UAV has a spare
    sub-channel and the rate meets QoS.
    """
    _check_capacity(rm, phi)
    w_pen = default_penalty(rm.qos) if w_pen is None else w_pen
    n_users = rm.n_users
    assign, left = greedy_assign(np.ascontiguousarray(rm.rates), int(phi), float(rm.qos))
    if left:
        return Infeasible(n_users, w_pen)
    return Association(assign, float(rm.rates[np.arange(n_users), assign].sum()))


def brute_force_association(rm: RateMatrix, phi: int, w_pen: float | None = None):
    """Exact optimum by enumerating all J**I assignments. Test oracle."""
    if rm.n_users > MAX_BRUTE_FORCE_USERS:
        raise ValueError(f"brute force limited to {MAX_BRUTE_FORCE_USERS} users, got {rm.n_users}")
    _check_capacity(rm, phi)
    w_pen = default_penalty(rm.qos) if w_pen is None else w_pen
    n_users, n_uavs = rm.rates.shape
    best, best_f = None, -np.inf
    for combo in itertools.product(range(n_uavs), repeat=n_users):
        if any(combo.count(j) > phi for j in range(n_uavs)):
            continue
        if any(rm.rates[i, j] < rm.qos for i, j in enumerate(combo)):
            continue
        f = sum(rm.rates[i, j] for i, j in enumerate(combo))
        if f > best_f:
            best, best_f = combo, f
    if best is None:
        return Infeasible(n_users, w_pen)
    return Association(np.array(best, dtype=np.int64), float(best_f))
