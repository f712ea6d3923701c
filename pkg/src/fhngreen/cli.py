"""Command-line entry point: ``python -m fhngreen --config run.json``.

Exit status: 0 success, 1 numerical failure (divergence, non-convergence,
unreachable tolerance), 2 invalid configuration or input, 3 a certificate
failed, 4 configuration file missing, 5 configuration file not valid JSON.

The environment variable ``FHNGREEN_THREADS`` sets the worker count of the
FFT-based transforms (default 1).
"""

import argparse
import json
import math
import os
import sys

import numpy as np
from scipy import fft as sfft

from .config import MODES, build_config, default_config_dict, param_sets, parse_config
from .errors import (ConfigError, ConvergenceError, DivergenceError, DomainError, FhnError,
                     RegimeError, ToleranceError, TruncationError)
from .estimates import run_certification_suite, suite_passed
from .fieldio import write_field_csv
from .kernels import k0, k0_x, k_i
from .linear import (DIRICHLET, BoundaryData, Grid, InitialData, mckean_linear_scenario,
                     mckean_params, sample_profile, solve_linear_dirichlet, solve_linear_neumann)
from .nonlinear import (JosephsonSource, Kinetics, cubic_kinetics, solve_fhn_dirichlet,
                        solve_fhn_neumann)
from .oracle import FdConfig, fd_solve
from .theta import theta

THREADS_ENV = "FHNGREEN_THREADS"
EXIT_OK, EXIT_NUMERICAL, EXIT_CONFIG, EXIT_CERTIFICATE = 0, 1, 2, 3


def _zero_kinetics():
    return Kinetics(lambda u: np.zeros_like(u), 0.0, "0", (-math.inf, math.inf))


def _kinetics(cfg):
    kind = cfg.scenario.kinetics
    if kind == "cubic":
        return cubic_kinetics(cfg.params.a)
    if kind == "none":
        return _zero_kinetics()
    raise ConfigError(
        f"scenario kinetics {kind!r} is not available in solve-fhn mode; "
        + ("use solve-linear (frozen step) or oracle" if kind == "mckean" else "use oracle mode"))


def _grid(cfg):
    return Grid(cfg.grid["nx"], cfg.grid["nt"])


def _init(cfg):
    return InitialData(cfg.scenario.u0, cfg.scenario.v0)


def _bdry(cfg):
    sc = cfg.scenario
    return BoundaryData(sc.bc, sc.left, sc.right)


def _outdir(cfg):
    path = cfg.output["dir"]
    if not os.path.isabs(path):
        path = os.path.join(os.getcwd(), path)
    os.makedirs(path, exist_ok=True)
    return path


def _write_json(path, obj):
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(obj, fh, indent=2, sort_keys=True, default=_plain)
        fh.write("\n")


def _plain(obj):
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    return repr(obj)


# ------------------------------------------------------------------ modes

def run_kernel(cfg, stdout):
    p, tol, which = cfg.params, cfg.tolerances["kernel_tol"], cfg.kernel["which"]
    for x, t in zip(cfg.kernel["x"], cfg.kernel["t"]):
        if which == "K0":
            val = k0(p, x, t, tol).value
        elif which == "K0_x":
            val = k0_x(p, x, t, tol).value
        elif which in ("K1", "K2"):
            val = k_i(p, int(which[1]), x, t, tol).value
        else:
            val = theta(p, int(which[-1]), x, t, tol=tol).value
        stdout.write(f"{x:.17g},{t:.17g},{val:.17g}\n")
    return EXIT_OK


def run_solve_linear(cfg, stdout):
    sc, grid = cfg.scenario, _grid(cfg)
    if sc.kinetics == "mckean":
        u = mckean_linear_scenario(cfg.params, _init(cfg), _bdry(cfg), sc.eta_bar, grid)
    else:
        solve = solve_linear_dirichlet if sc.bc == DIRICHLET else solve_linear_neumann
        u = solve(cfg.params, _init(cfg), _bdry(cfg), sc.f, grid)
    out = _outdir(cfg)
    write_field_csv(u, os.path.join(out, "u.csv"))
    _write_json(os.path.join(out, "summary.json"), {"mode": cfg.mode, "meta": u.meta,
                                                    "sup_u": u.sup()})
    stdout.write(f"u written to {os.path.join(out, 'u.csv')}\n")
    return EXIT_OK


def run_solve_fhn(cfg, stdout):
    kin = _kinetics(cfg)
    solve = solve_fhn_dirichlet if cfg.scenario.bc == DIRICHLET else solve_fhn_neumann
    out = _outdir(cfg)
    report_path = os.path.join(out, "picard.json")
    try:
        sol = solve(cfg.params, _init(cfg), _bdry(cfg), kin, _grid(cfg),
                    cfg.tolerances["picard_tol"], cfg.tolerances["max_iter"])
    except (ConvergenceError, DivergenceError) as exc:
        rep = exc.report.to_dict() if exc.report is not None else {}
        _write_json(report_path, dict(rep, error=str(exc), stage="picard"))
        raise
    write_field_csv(sol.u, os.path.join(out, "u.csv"))
    write_field_csv(sol.v, os.path.join(out, "v.csv"))
    _write_json(report_path, sol.report.to_dict())
    _write_json(os.path.join(out, "summary.json"), {"mode": cfg.mode, "meta": sol.u.meta,
                                                    "sup_u": sol.u.sup(), "sup_v": sol.v.sup()})
    stdout.write(f"Picard converged in {sol.report.iterations} iterations; "
                 f"fields written to {out}\n")
    return EXIT_OK


def run_oracle(cfg, stdout):
    sc, p = cfg.scenario, cfg.params
    fd = FdConfig(cfg.oracle["nx"], cfg.oracle["dt"], cfg.oracle["scheme"], sc.bc)
    init = _init(cfg)
    if sc.kinetics == "cubic":
        source = cubic_kinetics(p.a)
    elif sc.kinetics == "none":
        source = _zero_kinetics()
    elif sc.kinetics == "josephson":
        source = JosephsonSource(sc.gamma, sc.memory_eps)
    else:
        # frozen step: same linear problem as solve-linear
        p = mckean_params(p)
        v0, eta = sc.v0, float(sc.eta_bar)

        def source(x, t):
            return eta - sample_profile(v0, x, p.L) * math.exp(-p.beta * t)
        init = InitialData(sc.u0, 0.0)
    times = np.linspace(0.0, p.T, cfg.oracle["times"])
    sol = fd_solve(p, init, _bdry(cfg), source, fd, times)
    out = _outdir(cfg)
    write_field_csv(sol.u, os.path.join(out, "u.csv"))
    write_field_csv(sol.v, os.path.join(out, "v.csv"))
    _write_json(os.path.join(out, "summary.json"), {"mode": cfg.mode, "meta": sol.u.meta,
                                                    "sup_u": sol.u.sup()})
    stdout.write(f"reference solution written to {out}\n")
    return EXIT_OK


def run_certify(cfg, stdout):
    out = _outdir(cfg)
    path = os.path.join(out, "certificates.json")
    certs = run_certification_suite(
        param_sets(cfg), report_path=path, seed=cfg.seed, offgrid=cfg.certify["offgrid"],
        kernel_bounds=cfg.certify["kernel_bounds"], kernel_tol=cfg.tolerances["kernel_tol"])
    failed = [c for c in certs if not c.passed]
    stdout.write(f"{len(certs) - len(failed)}/{len(certs)} certificates passed; "
                 f"report at {path}\n")
    for c in failed:
        stdout.write(f"FAILED {c.bound_id} margin={c.margin:.3e} slack={c.slack:.3e}\n")
    return EXIT_OK if suite_passed(certs) else EXIT_CERTIFICATE


_DISPATCH = {"kernel": run_kernel, "solve-linear": run_solve_linear, "solve-fhn": run_solve_fhn,
             "oracle": run_oracle, "certify": run_certify}


def threads_from_env(environ=None):
    raw = (os.environ if environ is None else environ).get(THREADS_ENV, "1")
    try:
        n = int(raw)
    except ValueError:
        n = 0
    if n < 1:
        raise ConfigError(f"{THREADS_ENV} must be a positive integer, got {raw!r}")
    return n


def exit_code(exc):
    """Map an exception to the exit-status contract."""
    if isinstance(exc, ConfigError):
        return exc.exit_code
    if isinstance(exc, (RegimeError, DomainError, OSError)):
        return EXIT_CONFIG
    if isinstance(exc, (ConvergenceError, DivergenceError, ToleranceError, TruncationError)):
        return EXIT_NUMERICAL
    if isinstance(exc, FhnError):
        return EXIT_NUMERICAL
    raise exc


def run(cfg, stdout=None):
    """Execute a validated configuration; returns the exit status."""
    stdout = sys.stdout if stdout is None else stdout
    with sfft.set_workers(threads_from_env()):
        return _DISPATCH[cfg.mode](cfg, stdout)


def _parser():
    ap = argparse.ArgumentParser(prog="fhngreen", description=__doc__.split("\n")[0])
    ap.add_argument("--config", help="JSON configuration file (defaults apply when omitted)")
    ap.add_argument("--mode", choices=MODES, help="override the configured mode")
    ap.add_argument("--out", help="override output.dir")
    ap.add_argument("--tol", type=float, help="override the Picard and kernel tolerances")
    ap.add_argument("--seed", type=int, help="seed of the randomized check sets")
    ap.add_argument("--emit-defaults", action="store_true",
                    help="print the default configuration as JSON and exit")
    return ap


def _load(args):
    if args.config is not None:
        cfg = parse_config(args.config)
        raw, base = cfg.to_dict(), cfg.base_dir
    else:
        raw, base = default_config_dict(), os.getcwd()
    if args.mode is not None:
        raw["mode"] = args.mode
    if args.out is not None:
        raw["output"]["dir"] = args.out
    if args.tol is not None:
        raw["tolerances"]["picard_tol"] = raw["tolerances"]["kernel_tol"] = args.tol
    if args.seed is not None:
        raw["seed"] = args.seed
    return build_config(raw, base)


def main(argv=None, stdout=None, stderr=None):
    stdout = sys.stdout if stdout is None else stdout
    stderr = sys.stderr if stderr is None else stderr
    args = _parser().parse_args(argv)
    if args.emit_defaults:
        json.dump(default_config_dict(), stdout, indent=2, sort_keys=True)
        stdout.write("\n")
        return EXIT_OK
    stage = "config"
    try:
        cfg = _load(args)
        stage = cfg.mode
        return run(cfg, stdout)
    except (FhnError, OSError) as exc:
        stderr.write(f"fhngreen: [{stage}] {type(exc).__name__}: {exc}\n")
        return exit_code(exc)


__all__ = ["main", "run", "exit_code", "threads_from_env"]
