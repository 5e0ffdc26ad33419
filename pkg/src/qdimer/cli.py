"""Command-line entry point for all backends and analyses.

Exit codes: 0 success, 2 usage error, 3 parameter validation error,
4 runtime/numeric error, 5 I/O or parse error.
"""

import argparse
import json
import os
import sys
import time

import numpy as np

from . import flow as flow_mod
from . import fokker_planck as fp_mod
from . import io as io_mod
from .errors import (CflError, NumericalError, ParseError, QdimerError,
                     ValidationError)
from .exact import ensemble_averages, run_exact_ensemble
from .gutzwiller import run_gw_ensemble
from .observables import bin_angles, histogram_from_grid
from .params import SimParams
from .sse import run_sse_ensemble

EXIT_USAGE = 2
EXIT_VALIDATION = 3
EXIT_RUNTIME = 4
EXIT_IO = 5

OUTDIR_ENV = "QDIMER_OUTDIR"


def _add_common(p):
    p.add_argument("--config", help="JSON file with defaults for any flag "
                   "(flags given on the command line win)")
    p.add_argument("--out", required=False, help="output file path; relative "
                   f"paths resolve under ${OUTDIR_ENV} when set")
    p.add_argument("--threads", type=int, default=None,
                   help="worker threads (default: all cores); affects wall "
                   "time only, never results")


def _add_physics(p):
    p.add_argument("--omega-s", type=float, default=1.0,
                   help="qubit drive frequency (default 1; sets the time unit)")
    p.add_argument("--gamma1", type=float, default=None,
                   help="one-site click rate, units of omega_s")
    p.add_argument("--gamma2", type=float, default=None,
                   help="two-site click rate, units of omega_s")
    p.add_argument("--lambda1", type=float, default=None,
                   help="adimensional one-site strength gamma1/(4 omega_s); "
                   "mutually exclusive with --gamma1/--gamma2")
    p.add_argument("--lambda2", type=float, default=None,
                   help="adimensional two-site strength gamma2/(4 omega_s)")


def _add_sim(p):
    _add_physics(p)
    p.add_argument("--dt", type=float, default=1e-3,
                   help="step size, units of 1/omega_s (default 1e-3)")
    p.add_argument("--t-final", type=float, default=20.0,
                   help="total time, units of 1/omega_s (default 20)")
    p.add_argument("--n-traj", type=int, default=1000,
                   help="number of trajectories (default 1000)")
    p.add_argument("--seed", type=int, default=0,
                   help="master seed of the counter-based streams (default 0)")
    p.add_argument("--bins", type=int, default=72,
                   help="histogram bins per axis (default 72)")


def build_parser():
    """Returns (parser, {command: subparser})."""
    parser = argparse.ArgumentParser(
        prog="qdimer",
        description="Monitored two-qubit dimer: trajectory ensembles, "
                    "no-click flow analysis and grid master-equation solver.")
    sub = parser.add_subparsers(dest="command", required=True)

    p_sim = sub.add_parser("simulate", help="run a trajectory ensemble or the "
                           "grid solver and write a histogram")
    p_sim.add_argument("--backend", required=True,
                       choices=["exact", "gutzwiller", "sse", "fokker-planck"])
    _add_sim(p_sim)
    p_sim.add_argument("--summary-out", default=None,
                       help="also write an ensemble summary (exact/sse)")
    p_sim.add_argument("--fp-tol", type=float, default=1e-4,
                       help="fokker-planck stationarity tolerance "
                       "(max |dP|/dt, default 1e-4)")
    p_sim.add_argument("--fp-tmax", type=float, default=200.0,
                       help="fokker-planck relaxation time cap (default 200)")
    _add_common(p_sim)

    p_flow = sub.add_parser("flow", help="write the no-click velocity field")
    _add_physics(p_flow)
    p_flow.add_argument("--grid-n", type=int, default=24,
                        help="field sample points per axis (default 24)")
    _add_common(p_flow)

    p_fp = sub.add_parser("fixed-points", help="locate and classify the "
                          "no-click flow fixed points")
    _add_physics(p_fp)
    p_fp.add_argument("--scan-n", type=int, default=144,
                      help="Newton-seeding scan grid per axis (default 144)")
    _add_common(p_fp)

    p_pd = sub.add_parser("phase-diagram", help="classify the phase over a "
                          "lambda grid")
    p_pd.add_argument("--l1", default="0:2:101",
                      help="lambda1 range min:max:count (default 0:2:101)")
    p_pd.add_argument("--l2", default="0:2:101",
                      help="lambda2 range min:max:count (default 0:2:101)")
    p_pd.add_argument("--scan-n", type=int, default=144)
    _add_common(p_pd)
    subparsers = {"simulate": p_sim, "flow": p_flow,
                  "fixed-points": p_fp, "phase-diagram": p_pd}
    return parser, subparsers


def _apply_config(parser, subparsers, argv):
    """Load --config JSON (if any) as parser defaults, then re-parse."""
    args = parser.parse_args(argv)
    if getattr(args, "config", None):
        try:
            with open(args.config) as fh:
                cfg = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ParseError(f"cannot read config {args.config}: {exc}") from exc
        if not isinstance(cfg, dict):
            raise ParseError(f"config {args.config} must hold a JSON object")
        sub = subparsers[args.command]
        known = {a.dest for a in sub._actions}
        defaults = {}
        for key, value in cfg.items():
            dest = key.replace("-", "_")
            if dest not in known:
                raise ParseError(f"config key '{key}' is not a flag of "
                                 f"'{args.command}'")
            defaults[dest] = value
        sub.set_defaults(**defaults)
        args = parser.parse_args(argv)
    return args


def _resolve_out(path):
    if path is None:
        raise ValidationError("--out is required")
    outdir = os.environ.get(OUTDIR_ENV)
    if outdir and not os.path.isabs(path):
        return os.path.join(outdir, path)
    return path


def _params_from_args(args):
    lam = (args.lambda1, args.lambda2)
    gam = (args.gamma1, args.gamma2)
    if any(v is not None for v in lam) and any(v is not None for v in gam):
        raise ValidationError("--lambda1/--lambda2 and --gamma1/--gamma2 are "
                              "mutually exclusive")
    common = dict(dt=args.dt, t_final=args.t_final, n_traj=args.n_traj,
                  master_seed=args.seed)
    if any(v is not None for v in gam):
        return SimParams(omega_s=args.omega_s, gamma1=args.gamma1 or 0.0,
                         gamma2=args.gamma2 or 0.0, **common)
    return SimParams.from_lambdas(args.lambda1 or 0.0, args.lambda2 or 0.0,
                                  omega_s=args.omega_s, **common)


def _lambdas_from_args(args):
    if args.gamma1 is not None or args.gamma2 is not None:
        if args.omega_s <= 0:
            raise ValidationError("omega_s must be > 0 to derive lambdas")
        return ((args.gamma1 or 0.0) / (4 * args.omega_s),
                (args.gamma2 or 0.0) / (4 * args.omega_s))
    return (args.lambda1 or 0.0, args.lambda2 or 0.0)


def _set_threads(args):
    if getattr(args, "threads", None):
        import numba
        numba.set_num_threads(max(1, args.threads))


def _meta(params, backend):
    return {
        "backend": backend,
        "omega_s": params.omega_s,
        "gamma1": params.gamma1,
        "gamma2": params.gamma2,
        "dt": params.dt,
        "t_final": params.t_final,
        "n_traj": params.n_traj,
        "master_seed": params.master_seed,
    }


def _cmd_simulate(args):
    params = _params_from_args(args)
    out = _resolve_out(args.out)
    t0 = time.perf_counter()
    meta = _meta(params, args.backend)
    summary = None
    if args.backend == "gutzwiller":
        tl, tr, counts = run_gw_ensemble(params)
        hist = bin_angles(tl, tr, args.bins, meta)
    elif args.backend == "exact":
        res = run_exact_ensemble(params)
        hist = bin_angles(res["theta_l"], res["theta_r"], args.bins, meta)
        summary = ensemble_averages(res)
    elif args.backend == "sse":
        res = run_sse_ensemble(params)
        hist = bin_angles(res["theta_l"], res["theta_r"], args.bins, meta)
        summary = ensemble_averages(res)
    else:  # fokker-planck
        result = fp_mod.fp_stationary(params, args.bins, args.fp_tmax, args.fp_tol)
        meta["fp_converged"] = result.converged
        meta["fp_criterion"] = result.criterion
        hist = histogram_from_grid(result.grid, meta)
    io_mod.write_histogram(out, hist)
    if args.summary_out and summary is not None:
        io_mod.write_ensemble_summary(_resolve_out(args.summary_out), summary, meta)
    elapsed = time.perf_counter() - t0
    if args.backend == "fokker-planck":
        rate = f"{hist.n * hist.n / elapsed:.0f} cells/s"
    else:
        rate = f"{params.n_traj / elapsed:.0f} traj/s"
    print(f"{args.backend}: wrote {out} in {elapsed:.2f}s ({rate})")
    return 0


def _cmd_flow(args):
    l1, l2 = _lambdas_from_args(args)
    out = _resolve_out(args.out)
    t0 = time.perf_counter()
    centers, v_l, v_r = flow_mod.flow_field(args.grid_n, l1, l2, args.omega_s)
    io_mod.write_flow_field(out, centers, v_l, v_r, l1, l2, args.omega_s)
    elapsed = time.perf_counter() - t0
    print(f"flow: wrote {out} in {elapsed:.2f}s "
          f"({args.grid_n * args.grid_n / elapsed:.0f} cells/s)")
    return 0


def _cmd_fixed_points(args):
    l1, l2 = _lambdas_from_args(args)
    out = _resolve_out(args.out)
    t0 = time.perf_counter()
    fps = flow_mod.find_fixed_points(l1, l2, args.omega_s, args.scan_n)
    io_mod.write_fixed_points(out, fps, l1, l2, args.omega_s)
    elapsed = time.perf_counter() - t0
    print(f"fixed-points: {len(fps)} found, wrote {out} in {elapsed:.2f}s")
    return 0


def _parse_range(spec, flag):
    parts = spec.split(":")
    if len(parts) != 3:
        raise ValidationError(f"{flag} must be min:max:count, got {spec!r}")
    try:
        lo, hi, count = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError:
        raise ValidationError(f"{flag} must be min:max:count, got {spec!r}") from None
    if count < 1 or hi < lo or lo < 0:
        raise ValidationError(f"{flag}: need 0 <= min <= max and count >= 1")
    return lo, hi, count


def _cmd_phase_diagram(args):
    out = _resolve_out(args.out)
    l1_min, l1_max, n1 = _parse_range(args.l1, "--l1")
    l2_min, l2_max, n2 = _parse_range(args.l2, "--l2")
    if n1 != n2:
        raise ValidationError("--l1 and --l2 must share the same count")
    t0 = time.perf_counter()
    diagram = flow_mod.phase_diagram(l1_min, l1_max, l2_min, l2_max, n1,
                                     scan_n=args.scan_n)
    io_mod.write_phase_grid(out, diagram)
    elapsed = time.perf_counter() - t0
    print(f"phase-diagram: {n1}x{n2} grid, wrote {out} in {elapsed:.2f}s "
          f"({n1 * n2 / elapsed:.1f} cells/s)")
    return 0


_COMMANDS = {
    "simulate": _cmd_simulate,
    "flow": _cmd_flow,
    "fixed-points": _cmd_fixed_points,
    "phase-diagram": _cmd_phase_diagram,
}


def main(argv=None) -> int:
    parser, subparsers = build_parser()
    try:
        args = _apply_config(parser, subparsers, argv)
        _set_threads(args)
        return _COMMANDS[args.command](args)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except (NumericalError, CflError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    except (ParseError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except QdimerError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
