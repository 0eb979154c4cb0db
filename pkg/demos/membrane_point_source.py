"""A membrane loaded by a point mass.

For a source at ``q`` the membrane ``u_q`` solves ``Lap u = delta_q`` with
zero boundary values.  In 1D the exact answer is ``-G(x, q)`` with
``G(x, q) = min(x, q) (1 - max(x, q))`` and the energy is ``-q(1-q)/2``.
"""

import numpy as np

from ultrafun import Domain, build_level, energy_at, solve_point_source

s = build_level(Domain.unit(1), "spectral-sine", 500)
x = np.linspace(0, 1, 1001)
for q in (0.3, 0.5, 0.7):
    u = solve_point_source(s, q).u.as_function()
    green = np.minimum(x, q) * (1 - np.maximum(x, q))
    r = energy_at(s, q)
    print(
        f"q={q}: max |u + G| = {np.abs(u(x) + green).max():.2e}   "
        f"E = {r.total:.6f} (exact {-q * (1 - q) / 2:.6f})   elastic = {r.elastic:.6f}"
    )

# %% Finite elements in 1D are nodally exact when q is a node
f = build_level(Domain.unit(1), "fem-p1", 6)
q = f.dof_coords[20, 0]
c = solve_point_source(f, q).coeffs
nodes = f.dof_coords[:, 0]
print(f"fem nodal error at q={q}: {np.abs(c + np.minimum(nodes, q) * (1 - np.maximum(nodes, q))).max():.2e}")

# %% In 2D the point value keeps growing with the level
for m in (8, 16, 32, 64):
    lv = build_level(Domain.unit(2), "spectral-sine", m)
    print(f"square m={m:3d}: u_q(q) at the centre = {solve_point_source(lv, (0.5, 0.5)).point_value:.5f}")
