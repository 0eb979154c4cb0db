"""Growth classes of energies along the level chain.

A quantity sampled on increasing levels is fitted against ``ln N`` and
classified as finite, infinite or infinitesimal.  The minimal energy stays
bounded in 1D but decreases like ``-ln(N) / (4 pi)`` in 2D.
"""

import math

from ultrafun import Domain, fit_net, near_boundary_study, run_net, stable_fit

fit = stable_fit(run_net("spectral-sine", Domain.unit(1), "min-energy", [2**k for k in range(4, 13)]))
print(f"1D min energy : {fit.classification:13s} model={fit.model}  beta={fit.beta:.7f}")

fit = fit_net(run_net("spectral-sine", Domain.unit(2), "min-energy", [8, 16, 32, 64, 128]))
print(f"2D min energy : {fit.classification:13s} model={fit.model}  alpha={fit.alpha:.5f}  (-1/(4 pi) = {-1 / (4 * math.pi):.5f})")

# %% Electrostatic energy at points approaching the boundary like N^(-exponent)
for e in (0, 0.25, 0.5, 1, 2, math.inf):
    fit = near_boundary_study("spectral-sine", Domain.unit(2), e, [8, 16, 32, 64, 128])
    print(f"exponent {e:>4}: last value {fit.samples[-1].value:.4e}  class {fit.classification}")
