"""Compiled association kernels: Kuhn-Munkres and greedy.

Rectangular form (rows <= columns) of the shortest-augmenting-path Hungarian
method with row/column potentials. Adding zero-weight dummy rows to square
the instance does not change the optimum over real rows, so the dummies are
left implicit.
"""

import numpy as np
from numba import njit


@njit(cache=True)
def hungarian_min(cost):
    """Min-cost assignment of every row to a distinct column.

    Rows are inserted in ascending order and columns scanned in ascending
    order with strict comparisons, so ties resolve deterministically.
    Returns the column index for each row.
    """
    n, m = cost.shape
    u = np.zeros(n + 1)
    v = np.zeros(m + 1)
    p = np.zeros(m + 1, dtype=np.int64)
    way = np.zeros(m + 1, dtype=np.int64)
    minv = np.empty(m + 1)
    used = np.zeros(m + 1, dtype=np.bool_)
    for i in range(1, n + 1):
        p[0] = i
        j0 = 0
        minv[:] = np.inf
        used[:] = False
        while True:
            used[j0] = True
            i0 = p[j0]
            delta = np.inf
            j1 = 0
            for j in range(1, m + 1):
                if not used[j]:
                    cur = cost[i0 - 1, j - 1] - u[i0] - v[j]
                    if cur < minv[j]:
                        minv[j] = cur
                        way[j] = j0
                    if minv[j] < delta:
                        delta = minv[j]
                        j1 = j
            for j in range(m + 1):
                if used[j]:
                    u[p[j]] += delta
                    v[j] -= delta
                else:
                    minv[j] -= delta
            j0 = j1
            if p[j0] == 0:
                break
        while True:
            j1 = way[j0]
            p[j0] = p[j1]
            j0 = j1
            if j0 == 0:
                break
    match = np.full(n, -1, dtype=np.int64)
    for j in range(1, m + 1):
        if p[j] != 0:
            match[p[j] - 1] = j - 1
    return match


@njit(cache=True)
def node_split_km(rates, phi, qos, w_pen):
    """Optimal capacity-``phi`` association for an ``I x J`` rate matrix.

    Each UAV column is split into ``phi`` copies; links below ``qos`` carry
    weight ``-w_pen``. Returns ``(f, uav_of_user, feasible)`` where ``f`` is
    the sum of assigned rates, or ``-I * w_pen`` when the optimal matching
    had to use a penalised link.
    """
    n_users, n_uav = rates.shape
    assign = np.full(n_users, -1, dtype=np.int64)
    if n_users == 0:
        return 0.0, assign, True
    cost = np.empty((n_users, n_uav * phi))
    for i in range(n_users):
        for j in range(n_uav):
            c = -rates[i, j] if rates[i, j] >= qos else w_pen
            for s in range(phi):
                cost[i, j * phi + s] = c
    match = hungarian_min(cost)
    f = 0.0
    feasible = True
    for i in range(n_users):
        j = match[i] // phi
        assign[i] = j
        if rates[i, j] < qos:
            feasible = False
        f += rates[i, j]
    if not feasible:
        f = -n_users * w_pen
    return f, assign, feasible


@njit(cache=True)
def batch_node_split_km(rate_by_pos, combos, phi, qos, w_pen):
    """f value of every deployment in ``combos``.

    ``rate_by_pos[p, i]`` is the rate from a UAV hovering over position ``p``
    to user ``i``; each row of ``combos`` lists the J position indices.
    """
    n_combo, n_uav = combos.shape
    n_users = rate_by_pos.shape[1]
    out = np.empty(n_combo)
    rates = np.empty((n_users, n_uav))
    for k in range(n_combo):
        for j in range(n_uav):
            rates[:, j] = rate_by_pos[combos[k, j]]
        out[k] = node_split_km(rates, phi, qos, w_pen)[0]
    return out


@njit(cache=True)
def greedy_assign(rates, phi, qos):
    """Best-channel-first pass. A stable sort of the negated, user-major
    flattened rates orders ties by lower user, then lower UAV. Returns
    (uav_of_user, number of users left unserved)."""
    n_users, n_uav = rates.shape
    flat = rates.ravel()
    order = np.argsort(-flat, kind="mergesort")
    assign = np.full(n_users, -1, dtype=np.int64)
    load = np.zeros(n_uav, dtype=np.int64)
    left = n_users
    for k in order:
        if left == 0 or flat[k] < qos:
            break
        i, j = k // n_uav, k % n_uav
        if assign[i] < 0 and load[j] < phi:
            assign[i] = j
            load[j] += 1
            left -= 1
    return assign, left


@njit(cache=True)
def greedy_at(users, positions, rate, n_y, n_x, phi, qos):
    """Greedy association for users (I, 2) of (x, y) and UAV positions
    (J, 2), reading rates straight from a displacement table.
    Returns (uav_of_user, users left unserved, sum of assigned rates)."""
    n_users, n_uav = users.shape[0], positions.shape[0]
    rates = np.empty((n_users, n_uav))
    for i in range(n_users):
        for j in range(n_uav):
            rates[i, j] = rate[users[i, 1] - positions[j, 1] + n_y - 1, users[i, 0] - positions[j, 0] + n_x - 1]
    assign, left = greedy_assign(rates, phi, qos)
    f = 0.0
    if left == 0:
        for i in range(n_users):
            f += rates[i, assign[i]]
    return assign, left, f
