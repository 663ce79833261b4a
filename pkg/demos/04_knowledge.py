"""Reusing past solutions.

Solve a few hundred scenarios exhaustively offline, then answer a new one by
looking up the stored scenarios whose user layout differs least (the
difference degree counts added users once and moved users twice) and
re-scoring their deployments.
"""

import time

from udua import build_gain_table, difference_degree, exhaustive_search, solve_online
from udua.harness import ExperimentConfig, build_experiment_database, sample_scenarios
from udua.scenario import distribution_matrix

cfg = ExperimentConfig()
table = build_gain_table(cfg.params, cfg.region)

t = time.perf_counter()
db = build_experiment_database(cfg)
print(f"offline: {len(db)} scenarios solved in {time.perf_counter() - t:.1f} s")

query = sample_scenarios(cfg, 1, seed=2024, prefix="query")[0]
nearest = min(db.entries, key=lambda e: difference_degree(e.dist, distribution_matrix(query)).gamma)
print(f"closest stored layout: {difference_degree(nearest.dist, distribution_matrix(query))}")

best = exhaustive_search(query, table, cfg.params)
solve_online(db, query, 1, table, cfg.params)  # load the compiled kernel
for k in (1, 5, 10, 30):
    t = time.perf_counter()
    sol = solve_online(db, query, k, table, cfg.params)
    ms = (time.perf_counter() - t) * 1e3
    print(f"k={k:>2}: {sol.f / 1e6:.3f} Mbps ({100 * sol.f / best.f:.2f}% of optimum) in {ms:.2f} ms")
