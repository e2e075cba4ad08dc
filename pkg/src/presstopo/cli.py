"""Command-line interface: run the pipeline, verify gradients, re-export."""

from __future__ import annotations

import argparse
import os
import sys


def _apply_thread_env():
    # PRESSTOPO_THREADS caps BLAS threading; must happen before numpy loads
    threads = os.environ.get("PRESSTOPO_THREADS")
    if threads:
        for var in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS", "MKL_NUM_THREADS"):
            os.environ.setdefault(var, threads)


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="presstopo",
        description="3D topology optimization under design-dependent pressure loads",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="run the full optimization pipeline")
    run_p.add_argument("--config", help="INI config file; flags override its values")
    run_p.add_argument("--preset", choices=("lid", "extpress", "dam", "hull"))
    for name in ("nelx", "nely", "nelz", "lst", "maxit"):
        run_p.add_argument(f"--{name}", type=int)
    for name in ("volfrac", "penal", "rmin", "etaf", "betaf", "pin",
                 "move_limit", "change_tol"):
        run_p.add_argument(f"--{name.replace('_', '-')}", type=float, dest=name)
    run_p.add_argument("--backend", choices=("cholmod", "splu"))
    run_p.add_argument("--history", help="CSV history output path")
    run_p.add_argument("--vtk", help="VTK density export path")
    run_p.add_argument("--checkpoint", help="checkpoint (.npz) output path")
    run_p.add_argument("--quiet", action="store_true", help="suppress progress lines")

    chk_p = sub.add_parser("check-gradient",
                           help="compare adjoint and finite-difference gradients")
    chk_p.add_argument("--nelx", type=int, default=3)
    chk_p.add_argument("--nely", type=int, default=2)
    chk_p.add_argument("--nelz", type=int, default=2)
    chk_p.add_argument("--preset", default="lid",
                       choices=("lid", "extpress", "dam", "hull"))
    chk_p.add_argument("--seed", type=int, default=0)
    chk_p.add_argument("--step", type=float, default=1e-6)
    chk_p.add_argument("--tol", type=float, default=1e-4)

    exp_p = sub.add_parser("export", help="re-export VTK from a saved checkpoint")
    exp_p.add_argument("--checkpoint", required=True)
    exp_p.add_argument("--vtk", required=True)
    exp_p.add_argument("--no-mirror", action="store_true",
                       help="export the raw half domain without mirroring")
    return parser


def _cmd_run(args) -> int:
    from . import fileio
    from .driver import run

    fields = fileio.read_config_file(args.config) if args.config else {}
    for name in ("preset", "nelx", "nely", "nelz", "volfrac", "penal", "rmin",
                 "etaf", "betaf", "lst", "maxit", "pin", "move_limit",
                 "change_tol", "backend"):
        value = getattr(args, name, None)
        if value is not None:
            fields[name] = value
    for name in ("history", "vtk", "checkpoint"):
        value = getattr(args, name, None)
        if value is not None:
            fields[name] = value

    config, _ = fileio.build_config(fields)
    log = None if args.quiet else print
    result = run(config, log=log)
    if config.vtk_path:
        fileio.export_vtk(
            config.vtk_path,
            (config.nelx, config.nely, config.nelz),
            result.xphys,
            pressure=result.pressure,
            displacement=result.displacement,
            mirror_axes=result.problem.mirror_axes,
            comment=f"{config.preset} density field",
        )
    if config.checkpoint_path:
        fileio.save_checkpoint(config.checkpoint_path, result)
    return 0


def _cmd_check_gradient(args) -> int:
    from .gradcheck import gradient_check

    result = gradient_check(
        nelx=args.nelx, nely=args.nely, nelz=args.nelz,
        preset_name=args.preset, seed=args.seed, step=args.step,
    )
    print(f"elements: {result.nel}  step: {result.step:g}")
    print(f"max rel error, load sensitivities on : {result.max_rel_error_lst1:.3e}")
    print(f"max rel error, load sensitivities off: {result.max_rel_error_lst0:.3e}")
    if result.passed(args.tol):
        print(f"OK (tolerance {args.tol:g})")
        return 0
    print(f"FAILED (tolerance {args.tol:g})", file=sys.stderr)
    return 1


def _cmd_export(args) -> int:
    from . import fileio

    state = fileio.load_checkpoint(args.checkpoint)
    mirror = () if args.no_mirror else state["mirror_axes"]
    fileio.export_vtk(
        args.vtk,
        state["dims"],
        state["xphys"],
        pressure=state["pressure"],
        displacement=state["displacement"],
        mirror_axes=mirror,
        comment=f"{state['config'].get('preset', 'density')} density field",
    )
    return 0


def main(argv=None) -> int:
    _apply_thread_env()
    args = _build_parser().parse_args(argv)
    try:
        if args.command == "run":
            return _cmd_run(args)
        if args.command == "check-gradient":
            return _cmd_check_gradient(args)
        return _cmd_export(args)
    except Exception as exc:  # surface a diagnostic, not a traceback
        print(f"presstopo: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
