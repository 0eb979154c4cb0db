import math

import numpy as np
import pytest

from ultrafun import Domain, NetSample, ResourceLimitError, fit_net, near_boundary_study, run_net, stable_fit
from ultrafun.netlab import scaled_point


def synthetic(values, ns):
    return [NetSample(level=i, n=n, value=v) for i, (n, v) in enumerate(zip(ns, values))]


def test_fit_log_divergent_exact():
    ns = [2**k for k in range(3, 9)]
    fit = fit_net(synthetic([3 * math.log(n) - 1 for n in ns], ns))
    assert fit.model == "log-divergent"
    assert fit.alpha == pytest.approx(3.0, rel=1e-12)
    assert fit.beta == pytest.approx(-1.0, abs=1e-10)
    assert fit.rsq == pytest.approx(1.0)
    assert fit.classification == "infinite"


def test_fit_constant_plus_decay():
    ns = [2**k for k in range(4, 12)]
    fit = fit_net(synthetic([0.7 + 0.2 / n for n in ns], ns))
    assert fit.model == "constant"
    assert fit.beta == pytest.approx(0.7, abs=1e-6)
    assert fit.classification == "finite"


def test_fit_power_divergent():
    ns = [2**k for k in range(2, 8)]
    fit = fit_net(synthetic([0.5 * n**0.5 + 1 for n in ns], ns))
    assert fit.model == "power-divergent"
    assert fit.power == pytest.approx(0.5, rel=1e-6)
    assert fit.classification == "infinite"


def test_fit_vanishing_and_zero():
    ns = [2**k for k in range(4, 10)]
    fit = fit_net(synthetic([3.0 / n**3 for n in ns], ns))
    assert fit.classification == "infinitesimal"
    zero = fit_net(synthetic([0.0] * 6, ns))
    assert (zero.model, zero.classification, zero.beta) == ("vanishing", "infinitesimal", 0.0)


def test_fit_needs_four_samples():
    with pytest.raises(ValueError):
        fit_net(synthetic([1.0, 2.0, 3.0], [2, 4, 8]))


def test_fit_slow_drift_is_undetermined():
    # converging, but too slowly for the last three values to agree
    ns = [2**k for k in range(3, 8)]
    fit = fit_net(synthetic([1 + 1 / math.log(n) for n in ns], ns))
    assert fit.classification != "finite"


def test_stable_fit_flags_forbidden_flip():
    ns = [2**k for k in range(1, 11)]
    # grows like ln N early, then saturates hard
    vals = [min(math.log(n), math.log(32)) for n in ns]
    assert fit_net(synthetic(vals[:5], ns[:5])).classification == "infinite"
    assert fit_net(synthetic(vals, ns)).classification == "finite"
    assert stable_fit(synthetic(vals, ns)).classification == "undetermined"
    ok = stable_fit(synthetic([3 * math.log(n) for n in ns], ns))
    assert ok.classification == "infinite"


def test_run_net_validation():
    d = Domain.unit(1)
    with pytest.raises(ValueError):
        run_net("spectral-sine", d, "min-energy", [8, 8, 16])
    with pytest.raises(ValueError):
        run_net("spectral-sine", d, "bogus", [8, 16])
    with pytest.raises(ValueError):
        run_net("spectral-sine", d, "energy-at-fixed-q", [8, 16])
    with pytest.raises(ResourceLimitError):
        run_net("spectral-sine", Domain.unit(2), "min-energy", [8, 512], max_n=10_000)


def test_energy_at_fixed_q_finite_in_1d():
    samples = run_net("spectral-sine", Domain.unit(1), "energy-at-fixed-q", [2**k for k in range(4, 13)], q=(0.3,))
    fit = stable_fit(samples)
    assert fit.classification == "finite"
    assert fit.beta == pytest.approx(-0.105, abs=1e-3)


def test_energy_at_fixed_q_infinite_in_2d():
    samples = run_net("spectral-sine", Domain.unit(2), "energy-at-fixed-q", [8, 16, 32, 64, 128], q=(0.3, 0.6))
    fit = fit_net(samples)
    assert fit.model == "log-divergent"
    assert fit.classification == "infinite"
    assert fit.alpha < 0


def test_minimizer_coordinate_net_1d():
    samples = run_net("spectral-sine", Domain.unit(1), "minimizer-coordinate", [4, 8, 16, 32, 64])
    assert all(abs(s.value - 0.5) <= 1e-6 for s in samples)
    assert fit_net(samples).classification == "finite"


def test_delta_self_energy_diverges_1d():
    samples = run_net("spectral-sine", Domain.unit(1), "delta-self-energy", [8, 16, 32, 64, 128], q=(0.5,))
    fit = fit_net(samples)
    assert fit.classification == "infinite"
    assert fit.model == "power-divergent"


def test_boundary_pinned_electrostatic_is_zero():
    samples = run_net("spectral-sine", Domain.unit(2), "electrostatic-at-fixed-q", [4, 8, 16, 32], q=(0.0, 0.4))
    assert all(s.value == 0.0 for s in samples)
    assert fit_net(samples).classification == "infinitesimal"


def test_scaled_point():
    d = Domain((0.0, 0.0), (2.0, 1.0))
    assert scaled_point(d, 16, 0.0) == pytest.approx([1.0, 0.5])
    assert scaled_point(d, 16, 1.0) == pytest.approx([1.0 / 16, 0.5])
    assert scaled_point(d, 16, math.inf)[0] == 0.0


def test_exponent_sweep_ordering():
    levels = [4, 8, 16, 32]
    last = [near_boundary_study("spectral-sine", Domain.unit(2), e, levels).samples[-1].value for e in (0, 0.25, 0.5, 1, 2)]
    assert all(b < a for a, b in zip(last, last[1:]))
    assert near_boundary_study("spectral-sine", Domain.unit(2), math.inf, levels).classification == "infinitesimal"
