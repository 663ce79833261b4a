"""How link quality falls off across the grid.

A UAV hovers 20 m above one grid; users sit on grid centres 10 m apart.
The expected gain blends the LoS and NLoS branches by the LoS probability,
and Shannon's formula turns it into a per-user rate.
"""

from udua import ChannelParams, GridRegion, build_gain_table, los_probability, system_bounds

params = ChannelParams()
region = GridRegion(9, 9, 10.0)
table = build_gain_table(params, region)
bounds = system_bounds(params)

print(f"best achievable rate (user right below the UAV): {bounds.eps_max / 1e6:.3f} Mbps")
print(f"required rate per user:                          {bounds.eps_min / 1e6:.3f} Mbps")
print()
print("horizontal offset (grids)  distance (m)  P(LoS)   rate (Mbps)")
for d in range(0, 9):
    r = (params.h**2 + (10.0 * d) ** 2) ** 0.5
    print(f"{d:>10}                {r:8.1f}     {los_probability(params, r):.3f}    {table.rate_at(0, d) / 1e6:.3f}")

# Under these constants even the far corner clears the requirement.
print(f"\nworst link in a 9x9 region: {table.rate.min() / 1e6:.3f} Mbps")
