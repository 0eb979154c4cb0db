"""Scalar nets along a level chain, asymptotic fits and growth classification.

A net is a quantity evaluated on increasing levels of one basis family.  Its
growth is fitted against the per-axis resolution ``N = n ** (1/dim)`` with
the candidate models

* ``constant``         ``beta + c * N**(-p)``   (converges to ``beta``)
* ``log-divergent``    ``alpha * ln N + beta``
* ``power-divergent``  ``alpha * N**p + beta``
* ``vanishing``        ``c * N**(-p)``          (limit 0)

and classified as ``infinitesimal``, ``finite``, ``infinite`` or
``undetermined``.  ``(alpha, beta)`` is the divergent part and the finite
part of the limiting value.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .basis import DEFAULT_MAX_N, BasisFamily, ResourceLimitError, build_level
from .energy import energy_at, minimize
from .geometry import Domain
from .ultracore import delta_at, inner

QUANTITIES = (
    "energy-at-fixed-q",
    "min-energy",
    "minimizer-coordinate",
    "delta-self-energy",
    "electrostatic-at-fixed-q",
    "electrostatic-at-scaled-q",
)

# classification thresholds
FINITE_SPREAD = 1e-3
INFINITE_RSQ = 0.99
INFINITE_GROWTH = 0.10
INFINITESIMAL_ABS = 1e-6
MIN_POWER = 0.1


@dataclass(frozen=True)
class NetSample:
    level: int
    n: int
    value: float
    resolution: float | None = None

    @property
    def gauge(self) -> float:
        return float(self.resolution if self.resolution is not None else self.n)


@dataclass
class NetFit:
    samples: list[NetSample]
    model: str
    alpha: float
    beta: float
    rsq: float
    classification: str
    power: float = 0.0
    coef: float = 0.0
    candidates: dict = field(default_factory=dict)

    def as_dict(self) -> dict:
        return {
            "model": self.model,
            "alpha": self.alpha,
            "beta": self.beta,
            "rsq": self.rsq,
            "classification": self.classification,
            "power": self.power,
            "coef": self.coef,
            "candidates": self.candidates,
        }


def scaled_point(domain: Domain, resolution: float, exponent: float, scale: float | None = None) -> np.ndarray:
    """Point at distance ``scale * N**(-exponent)`` from the lower face of axis 0.

    The point sits on the face's midline; ``scale`` defaults to half the
    axis-0 side so that exponent 0 is the center.  ``exponent = inf`` pins
    the point on the face.
    """
    if exponent < 0:
        raise ValueError("exponent must be non-negative")
    if scale is None:
        scale = 0.5 * domain.lengths[0]
    dist = scale * float(resolution) ** (-exponent)
    q = domain.center.copy()
    q[0] = domain.lower[0] + dist
    return q


def _quantity(level, quantity, q, axis, exponent, scale, search):
    if quantity == "energy-at-fixed-q":
        return energy_at(level, q).total
    if quantity == "electrostatic-at-fixed-q":
        return energy_at(level, q).electrostatic
    if quantity == "electrostatic-at-scaled-q":
        return energy_at(level, scaled_point(level.domain, level.resolution, exponent, scale)).electrostatic
    if quantity == "delta-self-energy":
        d = delta_at(level, q)
        return inner(d, d)
    if quantity == "min-energy":
        return minimize(level, **search).F_min
    if quantity == "minimizer-coordinate":
        return minimize(level, **search).q_min[axis]
    raise ValueError(f"unknown quantity {quantity!r}; expected one of {QUANTITIES}")


def run_net(
    kind: str,
    domain: Domain,
    quantity: str,
    levels,
    *,
    q=None,
    axis: int = 0,
    exponent: float = 0.0,
    scale: float | None = None,
    search: dict | None = None,
    max_n: int = DEFAULT_MAX_N,
    threads: int = 1,
) -> list[NetSample]:
    """Evaluate ``quantity`` at every level of ``levels`` (strictly increasing)."""
    levels = [int(l) for l in levels]
    if not levels:
        raise ValueError("level schedule is empty")
    if any(b <= a for a, b in zip(levels, levels[1:])):
        raise ValueError(f"levels must be strictly increasing, got {levels}")
    if quantity not in QUANTITIES:
        raise ValueError(f"unknown quantity {quantity!r}; expected one of {QUANTITIES}")
    if quantity in ("energy-at-fixed-q", "electrostatic-at-fixed-q", "delta-self-energy"):
        if q is None:
            raise ValueError(f"quantity {quantity!r} needs a point q")
        q = domain.require_closure(q)
    for lv in levels:
        n = BasisFamily.at_level(kind, lv).dimension(domain.dim)
        if n > max_n:
            raise ResourceLimitError(f"level {lv} has n={n} > max_n={max_n}")
    search = dict(search or {})

    def sample(lv):
        s = build_level(domain, kind, lv, max_n=max_n)
        value = _quantity(s, quantity, q, axis, exponent, scale, search)
        return NetSample(level=lv, n=s.n, value=float(value), resolution=float(s.resolution))

    if threads > 1:
        with ThreadPoolExecutor(threads) as ex:
            return list(ex.map(sample, levels))
    return [sample(lv) for lv in levels]


def _rsq(y, yhat) -> float:
    sst = float(np.sum((y - y.mean()) ** 2))
    sse = float(np.sum((y - yhat) ** 2))
    if sst == 0.0:
        return 1.0 if sse == 0.0 else 0.0
    return max(0.0, 1.0 - sse / sst)


def _adjusted(rsq: float, m: int, k: int) -> float:
    if m - k <= 0:
        return rsq
    return 1.0 - (1.0 - rsq) * (m - 1) / (m - k)


def _linear(cols, y):
    A = np.column_stack(cols)
    coef, *_ = np.linalg.lstsq(A, y, rcond=None)
    return coef, A @ coef


def _difference_power(x, y):
    """Log-log slope of successive increments: ``p`` for ``y ~ N**p``."""
    dy = np.diff(y)
    if np.any(dy == 0) or np.any(np.sign(dy) != np.sign(dy[0])):
        return None
    mid = 0.5 * (x[1:] + x[:-1])
    slope, _ = np.polyfit(mid, np.log(np.abs(dy)), 1)
    return float(slope)


def _candidates(x, y):
    """Least-squares fits of every model; ``x = ln N``."""
    m = len(y)
    N = np.exp(x)
    out = {}
    (alpha, beta), yhat = _linear([x, np.ones(m)], y)
    r = _rsq(y, yhat)
    out["log-divergent"] = dict(alpha=float(alpha), beta=float(beta), rsq=r, adj=_adjusted(r, m, 2), power=0.0, coef=0.0)

    p = _difference_power(x, y)
    if p is not None and p >= MIN_POWER:
        (alpha, beta), yhat = _linear([N**p, np.ones(m)], y)
        r = _rsq(y, yhat)
        out["power-divergent"] = dict(alpha=float(alpha), beta=float(beta), rsq=r, adj=_adjusted(r, m, 3), power=p, coef=float(alpha))
    if p is not None and p <= -MIN_POWER:
        (c, beta), yhat = _linear([N**p, np.ones(m)], y)
        r = _rsq(y, yhat)
        out["constant"] = dict(alpha=0.0, beta=float(beta), rsq=r, adj=_adjusted(r, m, 3), power=p, coef=float(c))

    if np.all(y != 0) and np.all(np.sign(y) == np.sign(y[0])):
        slope, icpt = np.polyfit(x, np.log(np.abs(y)), 1)
        if slope <= -MIN_POWER:
            yhat = np.sign(y[0]) * np.exp(icpt) * N**slope
            r = _rsq(y, yhat)
            out["vanishing"] = dict(alpha=0.0, beta=0.0, rsq=r, adj=_adjusted(r, m, 2), power=float(slope), coef=float(np.sign(y[0]) * np.exp(icpt)))
    return out


def classify(values, model: str, rsq: float) -> str:
    v = np.asarray(values, dtype=float)
    a = np.abs(v)
    if np.all(v == 0):
        return "infinitesimal"
    if a[-1] <= INFINITESIMAL_ABS and np.all(np.diff(a) <= 0) and a[-1] < a[0]:
        return "infinitesimal"
    if model in ("log-divergent", "power-divergent") and rsq >= INFINITE_RSQ and a[-1] >= (1.0 + INFINITE_GROWTH) * a[0]:
        return "infinite"
    window = v[-3:]
    scale = abs(window.mean())
    spread = float(window.max() - window.min())
    if spread <= FINITE_SPREAD * scale or (scale == 0 and spread == 0):
        return "finite"
    return "undetermined"


def fit_net(samples) -> NetFit:
    """Fit the candidate models and classify the net.

    The model with the highest adjusted goodness of fit wins.  All-zero nets
    are ``vanishing``/``infinitesimal`` with ``beta = 0``; other constant nets
    are ``constant``/``finite``.
    """
    samples = list(samples)
    if len(samples) < 4:
        raise ValueError(f"fit_net needs at least 4 samples, got {len(samples)}")
    y = np.array([s.value for s in samples], dtype=float)
    x = np.log([s.gauge for s in samples])
    if np.all(y == y[0]):
        model = "vanishing" if y[0] == 0 else "constant"
        return NetFit(samples, model, 0.0, float(y[0]), 1.0, classify(y, model, 1.0))
    cands = _candidates(x, y)
    model = max(cands, key=lambda k: (cands[k]["adj"], k))
    best = cands[model]
    cls = classify(y, model, best["rsq"])
    summary = {k: {"rsq": c["rsq"], "adjusted_rsq": c["adj"]} for k, c in sorted(cands.items())}
    return NetFit(
        samples=samples,
        model=model,
        alpha=best["alpha"],
        beta=best["beta"],
        rsq=best["rsq"],
        classification=cls,
        power=best["power"],
        coef=best["coef"],
        candidates=summary,
    )


_FORBIDDEN = {("infinite", "finite"), ("finite", "infinitesimal")}


def stable_fit(samples) -> NetFit:
    """Fit the full net and its first half; forbidden class flips become undetermined."""
    samples = list(samples)
    full = fit_net(samples)
    half = max(4, math.ceil(len(samples) / 2))
    if half < len(samples):
        short = fit_net(samples[:half])
        if (short.classification, full.classification) in _FORBIDDEN:
            full.classification = "undetermined"
    return full


def near_boundary_study(
    kind: str,
    domain: Domain,
    exponent: float,
    levels,
    *,
    scale: float | None = None,
    max_n: int = DEFAULT_MAX_N,
    threads: int = 1,
) -> NetFit:
    """Electrostatic energy at points approaching the boundary as ``N**(-exponent)``."""
    samples = run_net(
        kind, domain, "electrostatic-at-scaled-q", levels, exponent=exponent, scale=scale, max_n=max_n, threads=threads
    )
    return fit_net(samples)
