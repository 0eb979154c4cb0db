"""Point evaluation as an inner product.

On every space level the functional ``v -> v(q)`` is represented by an
element ``delta_q`` of the level itself.  This script builds it for the
sine and finite element families and checks the reproducing identity.
"""

import numpy as np

from ultrafun import Domain, Ultrafunction, build_level, delta_at, evaluate, inner, project

rng = np.random.default_rng(0)

# %% A sine level on the unit interval: delta_q has coefficients phi_i(q)
s = build_level(Domain.unit(1), "spectral-sine", 64)
d = delta_at(s, 0.3)
v = Ultrafunction(s, rng.standard_normal(s.n))
print(f"{s.label}: <delta, v> = {inner(d, v):+.15f}   v(0.3) = {evaluate(v, 0.3):+.15f}")

# The self-product <delta, delta> = delta(q) grows with the level
for m in (8, 32, 128, 512):
    lv = build_level(Domain.unit(1), "spectral-sine", m)
    dq = delta_at(lv, 0.3)
    print(f"  m={m:4d}  delta_q(q) = {evaluate(dq, 0.3):10.3f}")

# %% Finite elements: the Gram matrix is not the identity, so a solve is needed
f = build_level(Domain.unit(2), "fem-p1", 5)
q = (0.41, 0.63)
d = delta_at(f, q)
v = Ultrafunction(f, rng.standard_normal(f.n))
print(f"{f.label}: reproducing error {abs(inner(d, v) - evaluate(v, q)):.2e}")

# %% Points on the boundary are invisible to a Dirichlet level
print("boundary delta is zero:", not np.any(delta_at(f, (0.0, 0.5)).coeffs))

# %% Projection of f(x) = x against the closed form sqrt(2)(-1)^(k+1)/(k pi)
c = project(s, lambda x: x).coeffs
k = np.arange(1, 6)
print("projection of x:", np.round(c[:5], 6))
print("closed form    :", np.round(np.sqrt(2) * (-1.0) ** (k + 1) / (k * np.pi), 6))
