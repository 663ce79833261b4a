"""Where to put the UAVs.

Exhaustive search scores every placement with the optimal association,
simulated annealing samples a few dozen, and the random baseline takes one.
"""

import time

from udua import (
    ChannelParams,
    GridRegion,
    SAConfig,
    ScenarioGenConfig,
    build_gain_table,
    exhaustive_search,
    random_solution,
    sample_user_set,
    simulated_annealing,
)
from udua.scenario import distribution_matrix

params = ChannelParams(phi=15)
region = GridRegion(5, 5, 10.0)
table = build_gain_table(params, region)

users = sample_user_set(region, ScenarioGenConfig(mu=-0.2, sigma=1.0, seed=3), params)
print(f"{len(users)} users; count per grid (rows are y):")
print(distribution_matrix(users))

# load compiled kernels before timing
exhaustive_search(users, table, params)
random_solution(users, table, params, seed=0)
for name, solve in [
    ("exhaustive", lambda: exhaustive_search(users, table, params)),
    ("annealing", lambda: simulated_annealing(users, table, params, SAConfig(seed=0, iterations_per_temperature=1, min_temperature_ratio=0.05))),
    ("random", lambda: random_solution(users, table, params, seed=0)),
]:
    t = time.perf_counter()
    sol = solve()
    ms = (time.perf_counter() - t) * 1e3
    print(f"{name:>10}: UAVs at {sol.deployment.tolist()}  {sol.f / 1e6:7.3f} Mbps  {ms:6.2f} ms")
