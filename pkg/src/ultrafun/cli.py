"""Config-driven command line front end: ``solve``, ``minimize``, ``sweep``, ``check``.

Config files are INI-style with four flat sections::

    [domain]
    dim = 2
    axis0 = 0, 1
    axis1 = 0, 1

    [basis]
    family = spectral-sine
    level = 16

    [run]
    command = minimize
    grid = 33

    [output]
    dir = out

Command line flags override config values.  Payload files (CSV/JSON) are
byte-identical across runs; run metadata goes to a ``.meta.json`` sidecar.
"""

from __future__ import annotations

import argparse
import configparser
import datetime
import difflib
import json
import os
import re
import sys
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from . import __version__
from .basis import DEFAULT_MAX_N, KINDS, SPECTRAL, build_level
from .energy import minimize
from .geometry import Domain
from .io import write_csv, write_json
from .netlab import QUANTITIES, run_net, stable_fit
from .solver import solve_point_source, solve_poisson
from .ultracore import Ultrafunction, delta_at, evaluate, inner, project, sample_grid

COMMANDS = ("solve", "minimize", "sweep", "check")
RHS_CATALOG = ("zero", "one", "eigenmode")

SCHEMA = {
    "domain": {"dim", "axis0", "axis1"},
    "basis": {"family", "level", "levels", "quadrature"},
    "run": {
        "command", "solver", "q", "rhs", "mode", "quantity", "axis", "exponent", "scale",
        "grid", "tol", "tie_tol", "max_n", "samples", "seed", "trials", "threads",
    },
    "output": {"dir", "prefix", "scan_csv", "dump_matrices"},
}


class ConfigError(ValueError):
    def __init__(self, message: str, line: int | None = None, key: str | None = None):
        self.line = line
        self.key = key
        self.bare = message
        super().__init__(f"line {line}: {message}" if line is not None else message)


@dataclass
class ExperimentConfig:
    domain: Domain = field(default_factory=lambda: Domain.unit(1))
    family: str = SPECTRAL
    level: int | None = None
    levels: list[int] = field(default_factory=list)
    quadrature: int | None = None
    command: str | None = None
    solver: str = "cholesky"
    q: tuple[float, ...] | None = None
    rhs: str = "one"
    mode: int = 1
    quantity: str = "min-energy"
    axis: int = 0
    exponent: float = 0.0
    scale: float | None = None
    grid: int = 33
    tol: float = 1e-8
    tie_tol: float | None = None
    max_n: int = DEFAULT_MAX_N
    samples: int = 65
    seed: int = 0
    trials: int = 100
    threads: int = 1
    out_dir: Path = Path("out")
    prefix: str | None = None
    scan_csv: bool = True
    dump_matrices: bool = False

    def validate(self) -> "ExperimentConfig":
        if self.family not in KINDS:
            raise ConfigError(f"unknown family {self.family!r}; expected one of {KINDS}", key="family")
        if self.command is not None and self.command not in COMMANDS:
            raise ConfigError(f"unknown command {self.command!r}; expected one of {COMMANDS}", key="command")
        if self.solver != "cholesky":
            raise ConfigError(f"unknown solver {self.solver!r}; only 'cholesky' is available", key="solver")
        if self.level is not None and self.level < 1:
            raise ConfigError(f"level must be >= 1, got {self.level}", key="level")
        if self.levels:
            if any(l < 1 for l in self.levels):
                raise ConfigError("levels must be >= 1", key="levels")
            if any(b <= a for a, b in zip(self.levels, self.levels[1:])):
                raise ConfigError(f"levels must be strictly increasing, got {self.levels}", key="levels")
        if self.q is not None and len(self.q) != self.domain.dim:
            raise ConfigError(f"q has {len(self.q)} coordinate(s), domain has dim {self.domain.dim}", key="q")
        if self.rhs not in RHS_CATALOG:
            raise ConfigError(f"unknown rhs {self.rhs!r}; expected one of {RHS_CATALOG}", key="rhs")
        if self.quantity not in QUANTITIES:
            raise ConfigError(f"unknown quantity {self.quantity!r}; expected one of {QUANTITIES}", key="quantity")
        for name in ("grid", "max_n", "samples", "trials", "threads", "mode"):
            if getattr(self, name) < 1:
                raise ConfigError(f"{name} must be positive", key=name)
        if self.grid < 2:
            raise ConfigError("grid must be at least 2", key="grid")
        if self.tol <= 0:
            raise ConfigError("tol must be positive", key="tol")
        if self.tie_tol is not None and self.tie_tol < 0:
            raise ConfigError("tie_tol must be non-negative", key="tie_tol")
        if self.exponent < 0:
            raise ConfigError("exponent must be non-negative", key="exponent")
        if not 0 <= self.axis < self.domain.dim:
            raise ConfigError(f"axis must be in [0, {self.domain.dim})", key="axis")
        return self


def _key_lines(text: str) -> dict:
    """Map ``(section, key)`` and ``(section, None)`` to 1-based line numbers."""
    lines = {}
    section = None
    for no, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line[0] in "#;":
            continue
        m = re.match(r"\[([^\]]+)\]", line)
        if m:
            section = m.group(1).strip().lower()
            lines.setdefault((section, None), no)
            continue
        key = re.split(r"[=:]", line, maxsplit=1)[0].strip().lower()
        lines.setdefault((section, key), no)
    return lines


def _floats(text: str, what: str, line) -> list[float]:
    try:
        return [float(v) for v in re.split(r"[,\s]+", text.strip()) if v]
    except ValueError:
        raise ConfigError(f"{what}: expected comma-separated numbers, got {text!r}", line) from None


def parse_config(text: str) -> ExperimentConfig:
    """Parse and validate an experiment config; unknown sections or keys are errors."""
    lines = _key_lines(text)
    cp = configparser.ConfigParser(inline_comment_prefixes=("#", ";"), interpolation=None)
    try:
        cp.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(f"malformed config: {exc}", getattr(exc, "lineno", None)) from None
    for section in cp.sections():
        if section not in SCHEMA:
            hint = difflib.get_close_matches(section, SCHEMA, n=1)
            extra = f"; did you mean [{hint[0]}]?" if hint else ""
            raise ConfigError(f"unknown section [{section}]{extra}", lines.get((section.lower(), None)))
        for key in cp[section]:
            if key not in SCHEMA[section]:
                hint = difflib.get_close_matches(key, sorted(SCHEMA[section]), n=1)
                extra = f"; did you mean {hint[0]!r}?" if hint else ""
                raise ConfigError(f"unknown key {key!r} in [{section}]{extra}", lines.get((section, key)))

    def get(section, key):
        if cp.has_option(section, key):
            return cp.get(section, key).strip(), lines.get((section, key))
        return None, None

    def num(section, key, cast, default):
        val, line = get(section, key)
        if val is None or val == "":
            return default
        try:
            return cast(val)
        except ValueError:
            raise ConfigError(f"{key}: cannot parse {val!r} as {cast.__name__}", line) from None

    cfg = ExperimentConfig()
    dim = num("domain", "dim", int, 1)
    if dim not in (1, 2):
        raise ConfigError(f"dim must be 1 or 2, got {dim}", lines.get(("domain", "dim")))
    lower, upper = [], []
    for axis in range(dim):
        val, line = get("domain", f"axis{axis}")
        pair = [0.0, 1.0] if val is None else _floats(val, f"axis{axis}", line)
        if len(pair) != 2:
            raise ConfigError(f"axis{axis}: expected 'lower, upper', got {val!r}", line)
        if not pair[0] < pair[1]:
            raise ConfigError(f"axis{axis}: lower ({pair[0]:g}) must be < upper ({pair[1]:g})", line)
        lower.append(pair[0])
        upper.append(pair[1])
    if dim == 1 and cp.has_option("domain", "axis1"):
        raise ConfigError("axis1 given for a 1D domain", lines.get(("domain", "axis1")))
    cfg.domain = Domain(tuple(lower), tuple(upper))

    cfg.family = get("basis", "family")[0] or cfg.family
    cfg.level = num("basis", "level", int, None)
    val, line = get("basis", "levels")
    if val:
        try:
            cfg.levels = [int(v) for v in re.split(r"[,\s]+", val) if v]
        except ValueError:
            raise ConfigError(f"levels: expected integers, got {val!r}", line) from None
    cfg.quadrature = num("basis", "quadrature", int, None)

    cfg.command = get("run", "command")[0] or None
    cfg.solver = get("run", "solver")[0] or cfg.solver
    val, line = get("run", "q")
    if val:
        cfg.q = tuple(_floats(val, "q", line))
    cfg.rhs = get("run", "rhs")[0] or cfg.rhs
    cfg.quantity = get("run", "quantity")[0] or cfg.quantity
    for key, cast in (
        ("mode", int), ("axis", int), ("exponent", float), ("scale", float), ("grid", int), ("tol", float),
        ("tie_tol", float), ("max_n", int), ("samples", int), ("seed", int), ("trials", int), ("threads", int),
    ):
        setattr(cfg, key, num("run", key, cast, getattr(cfg, key)))

    val = get("output", "dir")[0]
    if val:
        cfg.out_dir = Path(val)
    cfg.prefix = get("output", "prefix")[0] or None
    for key in ("scan_csv", "dump_matrices"):
        if cp.has_option("output", key):
            try:
                setattr(cfg, key, cp.getboolean("output", key))
            except ValueError:
                raise ConfigError(f"{key}: expected a boolean", lines.get(("output", key))) from None

    sections = {k: sec for sec, keys in SCHEMA.items() for k in keys}
    try:
        return cfg.validate()
    except ConfigError as exc:
        line = lines.get((sections.get(exc.key), exc.key))
        raise ConfigError(exc.bare, line, exc.key) from None


# ---------------------------------------------------------------- commands


def _level(cfg: ExperimentConfig, level=None):
    lv = level if level is not None else cfg.level
    if lv is None:
        lv = cfg.levels[-1] if cfg.levels else None
    if lv is None:
        raise ConfigError("no level given")
    return build_level(cfg.domain, cfg.family, lv, quad_points=cfg.quadrature, max_n=cfg.max_n)


def _rhs(cfg: ExperimentConfig, s):
    if cfg.rhs == "zero":
        return lambda *x: 0.0
    if cfg.rhs == "one":
        return lambda *x: 1.0
    # eigenmode k along every axis: -Lap phi = mu phi
    k, L, lo = cfg.mode, s.domain.lengths, s.domain.lower
    mu = np.pi**2 * np.sum((k / L) ** 2)

    def f(*x):
        out = mu
        for i, xi in enumerate(x):
            out = out * np.sqrt(2.0 / L[i]) * np.sin(k * np.pi * (xi - lo[i]) / L[i])
        return out

    return f


def _prefix(cfg, name):
    return cfg.prefix or name


def _meta(cfg, path: Path):
    write_json(
        path.with_suffix(".meta.json"),
        {"version": __version__, "written": datetime.datetime.now(datetime.timezone.utc).isoformat()},
    )


def run_solve(cfg: ExperimentConfig) -> dict:
    s = _level(cfg)
    if cfg.q is not None:
        sol = solve_point_source(s, cfg.q)
        problem = "point-source"
    else:
        sol = solve_poisson(s, _rhs(cfg, s))
        problem = f"poisson:{cfg.rhs}" + (f":{cfg.mode}" if cfg.rhs == "eigenmode" else "")
    names = ["x", "y"][: s.dim] + ["u"]
    base = cfg.out_dir / _prefix(cfg, "solve")
    write_csv(base.with_suffix(".csv"), names, sample_grid(sol.u, cfg.samples))
    summary = {
        "level": s.label,
        "n": s.n,
        "problem": problem,
        "q": None if cfg.q is None else list(map(float, cfg.q)),
        "elastic": sol.elastic,
        "point_value": sol.point_value,
        "residual": sol.residual,
    }
    write_json(base.with_suffix(".json"), summary)
    if cfg.dump_matrices:
        s.dump_csv(cfg.out_dir / "matrices")
    _meta(cfg, base)
    return summary


def run_minimize(cfg: ExperimentConfig) -> dict:
    s = _level(cfg)
    res = minimize(s, grid=cfg.grid, tol=cfg.tol, tie_tol=cfg.tie_tol, threads=cfg.threads)
    base = cfg.out_dir / _prefix(cfg, "minimize")
    payload = res.as_dict()
    payload["n"] = s.n
    write_json(base.with_suffix(".json"), payload)
    if cfg.scan_csv:
        names = ["x", "y"][: s.dim] + ["F"]
        write_csv(base.with_name(base.name + "_scan.csv"), names, res.scan)
    _meta(cfg, base)
    return payload


def run_sweep(cfg: ExperimentConfig) -> dict:
    if not cfg.levels:
        raise ConfigError("sweep needs a level schedule (basis.levels)")
    samples = run_net(
        cfg.family,
        cfg.domain,
        cfg.quantity,
        cfg.levels,
        q=cfg.q,
        axis=cfg.axis,
        exponent=cfg.exponent,
        scale=cfg.scale,
        search=dict(grid=cfg.grid, tol=cfg.tol, tie_tol=cfg.tie_tol),
        max_n=cfg.max_n,
        threads=cfg.threads,
    )
    base = cfg.out_dir / _prefix(cfg, "sweep")
    write_csv(base.with_suffix(".csv"), ["level", "n", "value"], [(s.level, s.n, s.value) for s in samples])
    payload = {"quantity": cfg.quantity, "family": cfg.family, "levels": cfg.levels}
    if len(samples) >= 4:
        payload.update(stable_fit(samples).as_dict())
    write_json(base.with_suffix(".json"), payload)
    _meta(cfg, base)
    return payload


def invariant_checks(s, trials: int = 100, seed: int = 0) -> dict:
    """Reproducing-property and projection invariants on random inputs."""
    rng = np.random.default_rng(seed)
    d = s.domain
    lo, hi = np.asarray(d.lower), np.asarray(d.upper)
    counts = {}

    def record(name, ok):
        c = counts.setdefault(name, {"pass": 0, "fail": 0})
        c["pass" if ok else "fail"] += 1

    for _ in range(trials):
        q = lo + rng.random(d.dim) * (hi - lo)
        v = Ultrafunction(s, rng.standard_normal(s.n))
        err = abs(inner(delta_at(s, q), v) - evaluate(v, q))
        record("reproducing", err <= 1e-10 * (1.0 + v.norm()))

    def random_f():
        a = rng.standard_normal(3)
        w = rng.uniform(0.5, 3.0, d.dim)

        def f(*x):
            out = a[0]
            for i, xi in enumerate(x):
                out = out + a[1] * np.cos(w[i] * (xi - lo[i])) + a[2] * (xi - lo[i]) ** 2
            return out

        return f

    for _ in range(max(1, trials // 2)):
        f = random_f()
        fp = project(s, f)
        v = Ultrafunction(s, rng.standard_normal(s.n))
        vf = v.as_function()
        gap = s.integrate(lambda *x: f(*x) * vf(*x)) - inner(fp, v)
        record("projection-optimality", abs(gap) <= 1e-10 * (1.0 + v.norm()))
        again = project(s, v.as_function())
        record("projection-idempotence", np.max(np.abs(again.coeffs - v.coeffs)) <= 1e-12 * (1.0 + np.max(np.abs(v.coeffs))))
    return counts


def run_check(cfg: ExperimentConfig) -> dict:
    s = _level(cfg)
    counts = invariant_checks(s, cfg.trials, cfg.seed)
    failed = sum(c["fail"] for c in counts.values())
    payload = {"level": s.label, "n": s.n, "seed": cfg.seed, "checks": counts, "failed": failed}
    base = cfg.out_dir / _prefix(cfg, "check")
    write_json(base.with_suffix(".json"), payload)
    _meta(cfg, base)
    return payload


RUNNERS = {"solve": run_solve, "minimize": run_minimize, "sweep": run_sweep, "check": run_check}


def run(cfg: ExperimentConfig) -> int:
    """Execute ``cfg.command``; 0 on success, 1 when ``check`` finds failures, 2 on errors."""
    try:
        cfg.validate()
        if cfg.command not in COMMANDS:
            raise ConfigError(f"no command selected; expected one of {COMMANDS}")
        cfg.out_dir.mkdir(parents=True, exist_ok=True)
        if not os.access(cfg.out_dir, os.W_OK):
            raise ConfigError(f"output directory {cfg.out_dir} is not writable")
        payload = RUNNERS[cfg.command](cfg)
    except Exception as exc:  # surfaced as machine-readable JSON
        err = {"error": type(exc).__name__, "message": str(exc), "command": cfg.command}
        print(json.dumps(err, sort_keys=True), file=sys.stderr)
        return 2
    print(json.dumps(payload, sort_keys=True))
    if cfg.command == "check" and payload["failed"]:
        return 1
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="ultrafun", description=__doc__.splitlines()[0])
    p.add_argument("--config", type=Path, help="INI experiment config")
    p.add_argument("--out", type=Path, help="output directory")
    p.add_argument("--threads", type=int)
    p.add_argument("--seed", type=int, help="seed for randomized checks")
    sub = p.add_subparsers(dest="command")

    def common(sp):
        sp.add_argument("--family", choices=KINDS)
        sp.add_argument("--level", type=int)
        sp.add_argument("--lower", type=float, nargs="+", help="domain lower corner")
        sp.add_argument("--upper", type=float, nargs="+", help="domain upper corner")
        sp.add_argument("--max-n", type=int, dest="max_n")
        sp.add_argument("--prefix")

    sp = sub.add_parser("solve", help="Dirichlet solve with a point source or a catalog load")
    common(sp)
    sp.add_argument("--q", type=float, nargs="+")
    sp.add_argument("--rhs", choices=RHS_CATALOG)
    sp.add_argument("--mode", type=int)
    sp.add_argument("--samples", type=int)

    sp = sub.add_parser("minimize", help="minimize the reduced energy over the source point")
    common(sp)
    sp.add_argument("--grid", type=int)
    sp.add_argument("--tol", type=float)
    sp.add_argument("--tie-tol", type=float, dest="tie_tol")

    sp = sub.add_parser("sweep", help="sample a quantity along a level schedule and fit it")
    common(sp)
    sp.add_argument("--levels", type=int, nargs="+")
    sp.add_argument("--quantity", choices=QUANTITIES)
    sp.add_argument("--q", type=float, nargs="+")
    sp.add_argument("--exponent", type=float)
    sp.add_argument("--axis", type=int)
    sp.add_argument("--grid", type=int)
    sp.add_argument("--tol", type=float)

    sp = sub.add_parser("check", help="reproducing-property and projection invariants")
    common(sp)
    sp.add_argument("--trials", type=int)
    return p


def config_from_args(args) -> ExperimentConfig:
    cfg = parse_config(args.config.read_text()) if args.config else ExperimentConfig()
    updates = {}
    for key in (
        "family", "level", "levels", "rhs", "mode", "samples", "grid", "tol", "tie_tol", "quantity",
        "exponent", "axis", "trials", "max_n", "prefix", "threads", "seed",
    ):
        val = getattr(args, key, None)
        if val is not None:
            updates[key] = val
    if getattr(args, "q", None) is not None:
        updates["q"] = tuple(args.q)
    if args.command:
        updates["command"] = args.command
    if args.out is not None:
        updates["out_dir"] = args.out
    lower, upper = getattr(args, "lower", None), getattr(args, "upper", None)
    if lower is not None or upper is not None:
        d = cfg.domain
        lower = lower if lower is not None else (list(d.lower) if upper is None or len(upper) == d.dim else [0.0] * len(upper))
        upper = upper if upper is not None else [1.0] * len(lower)
        updates["domain"] = Domain(tuple(lower), tuple(upper))
    return replace(cfg, **updates)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = config_from_args(args)
    except (ConfigError, ValueError, OSError) as exc:
        print(json.dumps({"error": type(exc).__name__, "message": str(exc)}, sort_keys=True), file=sys.stderr)
        return 2
    return run(cfg)


if __name__ == "__main__":
    sys.exit(main())
