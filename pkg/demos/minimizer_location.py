"""Where does the point mass settle?

The reduced energy ``F(q) = E(u_q, q)`` is minimized over the closed domain
by a grid scan and local refinement.  In 1D the answer is the midpoint.
In 2D, with modes capped by ``max(j, k) <= m``, the even modes vanish at
the centre and for even ``m`` the minimizer set is four mirror-image points
slightly off the centre; odd ``m`` puts it back on the centre.
"""

from ultrafun import Domain, build_level, energy_at, minimize

r = minimize(build_level(Domain.unit(1), "spectral-sine", 1000))
print(f"interval: q_min = {r.q_min[0]:.8f}  F_min = {r.F_min:.6f}")

square = Domain.unit(2)
for m in (16, 17):
    s = build_level(square, "spectral-sine", m)
    r = minimize(s)
    centre = energy_at(s, (0.5, 0.5)).total
    print(f"square m={m}: q_min = ({r.q_min[0]:.4f}, {r.q_min[1]:.4f})  F_min = {r.F_min:.6f}  F(centre) = {centre:.6f}")

r = minimize(build_level(Domain((0, 0), (2, 1)), "spectral-sine", 16))
print(f"rectangle m=16: q_min = ({r.q_min[0]:.4f}, {r.q_min[1]:.4f})  ties on the scan grid: {len(r.ties)}")

rf = minimize(build_level(square, "fem-p1", 5))
print(f"square fem h=1/32: q_min = ({rf.q_min[0]:.4f}, {rf.q_min[1]:.4f})  method = {rf.method}")
