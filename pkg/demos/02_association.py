"""Who talks to which UAV, once the UAVs are placed.

Each UAV has Phi sub-channels. Greedy hands out the strongest links first;
the node-split Kuhn-Munkres matching maximises total throughput instead.
The two instances below show the cases where greedy falls short.
"""

import numpy as np

from udua import RateMatrix, solve_greedy, solve_km

# User 0 likes UAV 0 best, but so does user 1, who is poorly served by UAV 1.
rates = np.array([[1.00e6, 0.90e6],
                  [0.95e6, 0.40e6]])
rm = RateMatrix(rates, qos=3e5)
g, km = solve_greedy(rm, phi=1), solve_km(rm, phi=1)
print("one sub-channel per UAV")
print(f"  greedy: users -> UAVs {g.assign.tolist()}  total {g.f / 1e6:.2f} Mbps")
print(f"  KM:     users -> UAVs {km.assign.tolist()}  total {km.f / 1e6:.2f} Mbps")

# Greedy can also strand a user: here it fails while a feasible matching exists.
rates = np.array([[1.0e6, 0.5e6],
                  [0.9e6, 0.1e6]])
rm = RateMatrix(rates, qos=3e5)
g, km = solve_greedy(rm, phi=1), solve_km(rm, phi=1)
print("\nuser 1 can only use UAV 0")
print(f"  greedy feasible: {g.feasible}")
print(f"  KM feasible:     {km.feasible}  users -> UAVs {km.assign.tolist()}")
