"""Command-line interface: ``kp5 {generate,linear,solve,norms,verify}``.

Options can also come from a flat ``key = value`` file given with
``--config``; flags on the command line win.  Every JSON output carries the
resolved configuration, the seed, the grid and the package version.  Exit
codes: 0 success, 1 failed assertion or solver failure, 2 usage error.
"""
from __future__ import annotations

import os

# thread caps must be in place before numpy loads its BLAS
if os.environ.get("KP5_THREADS"):
    for _var in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS", "MKL_NUM_THREADS"):
        os.environ.setdefault(_var, os.environ["KP5_THREADS"])

import argparse
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from . import io as kio
from .data import InitialData, extend_boundary, extend_initial, make_sobolev_sample
from .duhamel import SolverParams, picard_solve, pde_residual
from .grid import DomainError, Grid2D, GridError, forward_transform, inverse_transform
from .linear import compute_p, linear_solution
from .norms import a_max, boundary_norm_beta, sobolev_norm

COMMANDS = ("generate", "linear", "solve", "norms", "verify")
VERIFY_TARGETS = ("resonance", "lemmas", "kato", "bilinear", "weighted-bilinear", "smoothing")


class UsageError(Exception):
    """Invalid command line or configuration."""


@dataclass
class RunConfig:
    command: str
    options: dict = field(default_factory=dict)
    seed: int = 0
    out: str | None = None
    format: str = "json"

    def echo(self) -> dict:
        return {"command": self.command, "seed": self.seed, "format": self.format, "out": self.out, **self.options}


# ---------------------------------------------------------------- parsing

def _grid_arg(text: str) -> tuple:
    parts = text.replace("x", ",").split(",")
    if len(parts) != 4:
        raise argparse.ArgumentTypeError("grid must be nx,ny,Lx,Ly")
    return int(parts[0]), int(parts[1]), float(parts[2]), float(parts[3])


def _times_arg(text: str) -> list:
    return [float(t) for t in text.split(",") if t.strip()]


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="kp5", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=f"kp5 {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", help="flat key = value file; flags override it")
        p.add_argument("--seed", type=int, default=None)
        p.add_argument("--out", default=None, help="output file or directory")
        p.add_argument("--format", choices=("json", "csv"), default=None)

    p = sub.add_parser("generate", help="write a test field or boundary snapshot")
    common(p)
    p.add_argument("--kind", choices=("sobolev", "gaussian", "boundary"), default=None)
    p.add_argument("--s", type=float, default=None)
    p.add_argument("--grid", type=_grid_arg, default=None)
    p.add_argument("--amplitude", type=float, default=None)
    p.add_argument("--max-index", type=int, default=None)
    p.add_argument("--nt", type=int, default=None, help="boundary samples on [0, 1]")

    p = sub.add_parser("linear", help="solve the linear half-plane problem")
    common(p)
    p.add_argument("--g", required=False, help="field snapshot (values on the whole grid; y >= 0 is used)")
    p.add_argument("--h", required=False, help="boundary snapshot; omitted means the free-flow trace")
    p.add_argument("--s", type=float, default=None)
    p.add_argument("--times", type=_times_arg, default=None)

    p = sub.add_parser("solve", help="Picard iteration for the nonlinear problem")
    common(p)
    for name in ("s", "a", "b", "T", "tol"):
        p.add_argument(f"--{name}", type=float, default=None)
    p.add_argument("--max-iter", type=int, default=None)
    p.add_argument("--grid", type=_grid_arg, default=None)
    p.add_argument("--nt", type=int, default=None)
    p.add_argument("--amplitude", type=float, default=None)
    p.add_argument("--g", default=None)
    p.add_argument("--h", default=None)

    p = sub.add_parser("norms", help="norms of a snapshot")
    common(p)
    p.add_argument("--field", default=None, help="field snapshot")
    p.add_argument("--boundary", default=None, help="boundary snapshot")
    p.add_argument("--s", type=float, default=None)
    p.add_argument("--b", type=float, default=None)

    p = sub.add_parser("verify", help="numerical checks of the estimates")
    common(p)
    p.add_argument("target", choices=VERIFY_TARGETS)
    for name in ("s", "a", "b"):
        p.add_argument(f"--{name}", type=float, default=None)
    p.add_argument("--samples", type=int, default=None)
    p.add_argument("--trials", type=int, default=None)
    return ap


DEFAULTS = {
    "generate": {"kind": "sobolev", "s": 1.0, "grid": (64, 64, 64.0, 64.0), "amplitude": 1.0, "max_index": None,
                 "nt": 129},
    "linear": {"g": None, "h": None, "s": 1.0, "times": [0.0, 0.25, 0.5]},
    "solve": {"s": 1.0, "a": 0.25, "b": 0.45, "T": 0.5, "tol": 1e-8, "max_iter": 30,
              "grid": (64, 64, 64.0, 64.0), "nt": 512, "amplitude": 0.01, "g": None, "h": None},
    "norms": {"field": None, "boundary": None, "s": 0.0, "b": 0.45},
    "verify": {"target": None, "s": 1.0, "a": 0.3, "b": 0.45, "samples": None, "trials": None},
}
_COMMON = ("seed", "out", "format")


def read_config_file(path) -> dict:
    out = {}
    for n, line in enumerate(Path(path).read_text().splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{n}: expected 'key = value'")
        key, val = (t.strip() for t in line.split("=", 1))
        out[key.replace("-", "_")] = val
    return out


def _coerce(key: str, val: str, default):
    if key == "grid":
        return _grid_arg(val)
    if key == "times":
        return _times_arg(val)
    if key in ("seed", "max_iter", "max_index", "nt", "samples", "trials"):
        return int(val)
    if isinstance(default, float) or key in ("s", "a", "b", "T", "tol", "amplitude"):
        return float(val)
    return val


def validate(cmd: str, opts: dict):
    s = opts.get("s")
    if cmd == "solve" or (cmd == "verify" and opts.get("target") == "smoothing"):
        if not (0 < s < 2.5) or s == 0.5:
            raise UsageError(f"require 0 < s < 5/2 and s != 1/2, got s = {s}")
        if not 0 < opts["a"] < a_max(s):
            raise UsageError(f"require 0 < a < a_max(s) = min(1/3, 2s/3, 3/2 - 3s/5) = {a_max(s):.6g}, got a = {opts['a']}")
        if not 0 < opts["b"] < 0.5:
            raise UsageError(f"require 0 < b < 1/2, got b = {opts['b']}")
        if cmd == "solve" and not 0 < opts["T"] <= 1:
            raise UsageError(f"require 0 < T <= 1, got T = {opts['T']}")
    if cmd in ("generate", "linear", "norms") and s is not None and s < 0:
        raise UsageError(f"require s >= 0, got s = {s}")


def parse_config(argv=None) -> RunConfig:
    ap = build_parser()
    try:
        ns = ap.parse_args(argv)
    except SystemExit as e:
        if e.code in (0, None):
            raise
        raise UsageError("invalid command line") from None
    cmd = ns.command
    allowed = dict(DEFAULTS[cmd])
    merged = dict(allowed)
    common = {"seed": 0, "out": None, "format": "json"}
    if ns.config:
        for key, val in read_config_file(ns.config).items():
            if key in _COMMON:
                common[key] = _coerce(key, val, common[key])
            elif key in allowed:
                merged[key] = _coerce(key, val, allowed[key])
            else:
                raise UsageError(f"unknown configuration key {key!r} for '{cmd}'")
    for key, val in vars(ns).items():
        if val is None or key in ("command", "config"):
            continue
        if key in _COMMON:
            common[key] = val
        else:
            merged[key] = val
    try:
        validate(cmd, merged)
    except DomainError as e:
        raise UsageError(str(e)) from None
    return RunConfig(cmd, merged, common["seed"], common["out"], common["format"])


# ---------------------------------------------------------------- commands

def _meta(cfg: RunConfig, grid: Grid2D | None = None) -> dict:
    meta = {"version": __version__, "seed": cfg.seed, "config": cfg.echo(),
            "threads": os.environ.get("KP5_THREADS")}
    if grid is not None:
        meta["grid"] = {"nx": grid.nx, "ny": grid.ny, "Lx": grid.Lx, "Ly": grid.Ly}
    return meta


def _emit(cfg: RunConfig, report: dict, default_name: str, target: Path | None = None):
    """Print the report and, with ``--out``, also write it to ``target`` or a file under ``--out``."""
    text = kio.dumps(report)
    if target is None and cfg.out:
        out = Path(cfg.out)
        target = out / default_name if out.is_dir() or not out.suffix else out
    if target is not None:
        kio.write_json(target, report)
    print(text)


def _out_dir(cfg: RunConfig, name: str) -> Path:
    return Path(cfg.out) if cfg.out else Path(f"kp5-{name}")


def cmd_generate(cfg: RunConfig) -> int:
    o = cfg.options
    grid = Grid2D(*o["grid"])
    out = Path(cfg.out) if cfg.out else Path(f"{o['kind']}.csv")
    if o["kind"] == "boundary":
        times = np.linspace(0.0, 1.0, o["nt"])
        rng = np.random.default_rng(cfg.seed)
        c = rng.normal(size=4)
        x = grid.x / 4.0
        prof = o["amplitude"] * sum(a * x**n for n, a in enumerate(c)) * np.exp(-x**2 / 2)
        h = prof[None, :] * np.sin(np.pi * times)[:, None] ** 4
        kio.write_boundary(out, grid, times, h)
    else:
        if o["kind"] == "gaussian":
            x, y = grid.x[:, None], grid.y[None, :]
            vals = o["amplitude"] * np.exp(-(x**2 + y**2) / 2)
        else:
            f = make_sobolev_sample(o["s"], cfg.seed, grid, max_index=o["max_index"], amplitude=o["amplitude"])
            vals = inverse_transform(f)
        kio.write_field(out, grid, vals)
        if cfg.format == "csv":
            kio.write_spectrum(out.with_suffix(".spec.csv"), forward_transform(grid, vals))
    _emit(cfg, {"written": str(out), **_meta(cfg, grid)}, "generate.json", out.with_suffix(".json"))
    return 0


def _load_g(path, grid_default=None) -> InitialData:
    grid, vals = kio.read_field(path)
    return InitialData(grid, vals[:, grid.iy0:].copy())


def _load_h(path, grid: Grid2D, s: float):
    nx, Lx, times, h = kio.read_boundary(path)
    if nx != grid.nx or Lx != grid.Lx:
        raise UsageError(f"boundary snapshot grid ({nx}, {Lx}) does not match the field grid ({grid.nx}, {grid.Lx})")
    return extend_boundary(grid, times, h, s, require_zero_trace=False)


def cmd_linear(cfg: RunConfig) -> int:
    o = cfg.options
    if not o["g"]:
        raise UsageError("linear needs --g (a field snapshot)")
    g = _load_g(o["g"])
    g = InitialData(g.grid, g.g, o["s"])
    grid = g.grid
    h = _load_h(o["h"], grid, o["s"]) if o["h"] else None
    sol = linear_solution(g, h)
    times = np.asarray(o["times"], dtype=float)
    u = sol.sample(times)
    out = _out_dir(cfg, "linear")
    files = []
    for t, vals in zip(times, u.values):
        f = out / f"u_t{t:.4f}.csv"
        kio.write_field(f, grid, vals)
        files.append(str(f))
    diag = {}
    if h is not None:
        sel = (h.times > 0.1) & (h.times < 0.9)
        tr = sol.trace(h.times[sel])
        ref = h.h[sel]
        diag["trace_error"] = float(np.linalg.norm(tr - ref) / max(np.linalg.norm(ref), 1e-300))
    dense = sol.sample(np.linspace(0.0, 1.0, 65))
    diag["pde_residual"] = pde_residual(dense, (0.0, 1.0), nonlinear=False)
    diag["sobolev_norm_g"] = sobolev_norm(extend_initial(g), o["s"])
    _emit(cfg, {"files": files, "diagnostics": diag, **_meta(cfg, grid)}, "linear.json")
    return 0


def cmd_solve(cfg: RunConfig) -> int:
    o = cfg.options
    params = SolverParams(s=o["s"], a=o["a"], b=o["b"], T=o["T"], tol_fixed_point=o["tol"],
                          max_iter=o["max_iter"], nt=o["nt"])
    if o["g"]:
        g = _load_g(o["g"])
        g = InitialData(g.grid, g.g, o["s"])
    else:
        grid = Grid2D(*o["grid"])
        amp = o["amplitude"]
        g = InitialData.from_function(grid, lambda x, y: amp * x * np.exp(-(x**2 + y**2) / 4), o["s"])
    grid = g.grid
    if o["h"]:
        h = _load_h(o["h"], grid, o["s"])
    else:
        th = np.arange(129) / 128.0
        h = extend_boundary(grid, th, compute_p(extend_initial(g), th), o["s"], require_zero_trace=False)
    u, diag = picard_solve(g, h, params)
    out = _out_dir(cfg, "solve")
    files = []
    for t in np.linspace(0.0, params.T, 5):
        n = int(np.argmin(np.abs(u.times - t)))
        f = out / f"u_t{u.times[n]:.4f}.csv"
        kio.write_field(f, grid, u.values[n])
        files.append(str(f))
    n = int(np.argmin(np.abs(u.times - params.T / 2)))
    f = out / f"nonlinear_part_t{u.times[n]:.4f}.csv"
    kio.write_field(f, grid, u.values[n] - diag.linear_part.values[n])
    files.append(str(f))
    report = {
        "files": files,
        "diagnostics": {"iterations": diag.iterations, "converged": diag.converged, "norms": diag.norms,
                        "differences": diag.differences, "factors": diag.factors,
                        "contraction_factor": diag.contraction_factor,
                        "fixed_point_residual": diag.fixed_point_residual,
                        "pde_residual": pde_residual(u, (0.0, params.T))},
        **_meta(cfg, grid),
    }
    _emit(cfg, report, "solve.json")
    return 0


def cmd_norms(cfg: RunConfig) -> int:
    o = cfg.options
    results = []
    grid = None
    if o["field"]:
        grid, vals = kio.read_field(o["field"])
        results.append({"norm_name": "sobolev", "s": o["s"], "b": None,
                        "value": sobolev_norm(forward_transform(grid, vals), o["s"])})
    if o["boundary"]:
        nx, Lx, times, h = kio.read_boundary(o["boundary"])
        bgrid = Grid2D(nx, 8, Lx, 1.0)
        bd = extend_boundary(bgrid, times, h, 0.0)
        results.append({"norm_name": "boundary", "s": o["s"], "b": None,
                        "value": boundary_norm_beta(bd.spectrum(), o["s"])})
    if not results:
        raise UsageError("norms needs --field or --boundary")
    body = results[0] if len(results) == 1 else {"norms": results}
    _emit(cfg, {**body, **_meta(cfg, grid)}, "norms.json")
    return 0


def cmd_verify(cfg: RunConfig) -> int:
    from . import verify as v
    o = cfg.options
    t, s, a, b = o["target"], o["s"], o["a"], o["b"]
    if t == "resonance":
        rep = v.check_resonance_identity(o["samples"] or 100_000, cfg.seed).to_dict()
    elif t == "lemmas":
        lem = v.calculus_lemma_sweep()
        sch = v.schur_trials(o["trials"] or 20, cfg.seed)
        rep = {"calculus_lemma": lem.to_dict(), "schur": sch.to_dict(), "passed": bool(lem.passed and sch.passed)}
    elif t == "kato":
        rep = v.kato_ratio(s, o["samples"] or 50, cfg.seed).to_dict()
    elif t == "bilinear":
        rep = v.bilinear_ratio(s, a, b, trials=o["trials"] or 100, seed=cfg.seed).to_dict()
    elif t == "weighted-bilinear":
        rep = v.weighted_bilinear_ratio(s, a, b, trials=o["trials"] or 100, seed=cfg.seed).to_dict()
    else:
        params = SolverParams(s=s, a=a, b=b, nt=2048, q_tail_tol=1e-4)
        rep = v.smoothing_fit(cfg.seed, s, params).to_dict()
    _emit(cfg, {"report": rep, **_meta(cfg)}, f"verify-{t}.json")
    return 0 if rep.get("passed") else 1


HANDLERS = {"generate": cmd_generate, "linear": cmd_linear, "solve": cmd_solve, "norms": cmd_norms,
            "verify": cmd_verify}


def _error(kind: str, exc: BaseException):
    print(kio.dumps({"error": kind, "type": type(exc).__name__, "message": str(exc)}), file=sys.stderr)


def main(argv=None) -> int:
    try:
        cfg = parse_config(argv)
    except (UsageError, OSError) as e:
        _error("usage", e)
        return 2
    try:
        return HANDLERS[cfg.command](cfg)
    except UsageError as e:
        _error("usage", e)
        return 2
    except (GridError, DomainError, OSError) as e:
        _error("input", e)
        return 2
    except Exception as e:  # solver failures are reported, not raised
        _error("failure", e)
        return 1


if __name__ == "__main__":
    sys.exit(main())
