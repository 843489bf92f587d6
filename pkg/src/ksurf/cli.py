"""Command-line interface.

Subcommands:

    solve      solve the Goursat problem, write a/b (optionally phi) as CSV
    surface    build a K-surface, write OBJ + .meta, print validation
    backlund   build a Backlund tower of surfaces, one OBJ per layer
    converge   run a convergence sweep, write an epsilon/error CSV report
    check      evaluate the 3D compatibility residual on random samples

Exit codes: 0 success, 1 invalid arguments or inputs, 2 numerical failure
(blow-up, incompatibility, residual above threshold); failures print the
offending site or residual to stderr.  Every subcommand is deterministic
given identical flags: all numerical paths are single-threaded and
--threads only caps worker counts for any future parallel code, so results
are bit-identical for any accepted value.

Numbers in output files carry 17 significant digits, enough to round-trip
float64 exactly.  Tabulated data files (--data APATH,BPATH) hold one
"x value" pair per line with strictly increasing x matching the lattice
sites of the requested grid exactly; values are used as given, never
interpolated.
"""

from __future__ import annotations

import argparse
import sys

import numpy as np

from .goursat import (
    BlowUpError,
    CompatibilityError,
    GoursatData2,
    LatticeDomain2,
    save_field_csv,
    solve_goursat_2d,
)
from .frames import ZeroCurvatureError
from .harness import SweepConfig, demo_data, emit_report, run_sweep, zero_data
from .sinegordon import (
    BacklundParam,
    SchemeKind,
    check_compatibility_3d,
    hirota_backlund_system,
    load_backlund_chain,
    naive_backlund_system,
    reconstruct_phi,
    system_for,
)
from .surfaces import (
    backlund_step_norms,
    backlund_surface,
    build_surface,
    export_obj,
    validate_k_surface,
)

CHECK_TOL = 1e-9


class _UsageError(Exception):
    def __init__(self, message: str, parser: argparse.ArgumentParser):
        super().__init__(message)
        self.parser = parser


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(message, self)


def _add_common(p: argparse.ArgumentParser, with_scheme: bool = True):
    p.add_argument("--r", type=float, default=1.0, help="domain size (default 1.0)")
    g = p.add_mutually_exclusive_group()
    g.add_argument("--k", type=int, default=None, help="lattice level: eps = r/2^k (default 6)")
    g.add_argument("--eps", type=float, default=None, help="lattice step (r/eps must be integer)")
    if with_scheme:
        p.add_argument(
            "--scheme", choices=["naive", "hirota"], default="hirota",
            help="discretization scheme (default hirota)",
        )
    p.add_argument(
        "--data", default="demo",
        help="'demo', 'zero', or 'APATH,BPATH' tabulated files (default demo)",
    )
    p.add_argument(
        "--threads", type=int, default=1,
        help="worker cap; results are bit-identical for any value (default 1)",
    )


def _build_parser() -> _Parser:
    top = _Parser(prog="ksurf", description=__doc__.split("\n\n")[0])
    sub = top.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="solve the Goursat problem and write fields")
    _add_common(p)
    p.add_argument("--out", default="solve", help="output prefix (default 'solve')")
    p.add_argument("--phi", action="store_true", help="also reconstruct and write phi")

    p = sub.add_parser("surface", help="build a K-surface and export OBJ")
    _add_common(p)
    p.add_argument("--lambda", dest="lam", type=float, default=1.0,
                   help="spectral parameter (default 1.0)")
    p.add_argument("--out", default="surface", help="output prefix (default 'surface')")

    p = sub.add_parser("backlund", help="build a tower of Backlund-transformed surfaces")
    _add_common(p)
    p.add_argument("--lambda", dest="lam", type=float, default=1.0,
                   help="spectral parameter (default 1.0)")
    p.add_argument("--alpha", type=float, action="append", default=None,
                   help="Backlund parameter, repeat per step")
    p.add_argument("--theta0", type=float, action="append", default=None,
                   help="origin angle, repeat per step")
    p.add_argument("--bt-file", default=None,
                   help="file with one 'alpha theta0' pair per line")
    p.add_argument("--out", default="backlund", help="output prefix (default 'backlund')")

    p = sub.add_parser("converge", help="run a convergence sweep")
    p.add_argument("--quantity", default="fields_ab",
                   help="fields_ab | phi | surface | surface_bt | quotients[_order_m]")
    p.add_argument("--r", type=float, default=1.0)
    p.add_argument("--kmin", type=int, default=5)
    p.add_argument("--kmax", type=int, default=10)
    p.add_argument("--kref", type=int, default=12)
    p.add_argument("--scheme", choices=["naive", "hirota"], default="hirota")
    p.add_argument("--lambda", dest="lam", type=float, default=1.0)
    p.add_argument("--quotient-order", type=int, default=2)
    p.add_argument("--alpha", type=float, action="append", default=None)
    p.add_argument("--theta0", type=float, action="append", default=None)
    p.add_argument("--bt-file", default=None)
    p.add_argument("--data", default="demo")
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--out", default=None,
                   help="report path (default converge_<quantity>.csv)")

    p = sub.add_parser("check", help="measure the 3D compatibility residual")
    p.add_argument("--scheme", choices=["naive", "hirota"], default="hirota")
    p.add_argument("--samples", type=int, default=10000,
                   help="random (a, b, theta) samples in [-3, 3]^3 (default 10000)")
    p.add_argument("--alpha", type=float, action="append", default=None,
                   help="Backlund parameters to test (default 0.5 1 2)")
    p.add_argument("--eps", type=float, action="append", default=None,
                   help="lattice steps to test (default 1/8 and 1/64)")
    p.add_argument("--seed", type=int, default=0, help="sample seed (default 0)")
    p.add_argument("--threads", type=int, default=1)
    return top


def _domain(args) -> LatticeDomain2:
    if args.k is not None and args.eps is not None:
        raise ValueError("pass --k or --eps, not both")
    if args.eps is not None:
        return LatticeDomain2(args.r, args.eps)
    return LatticeDomain2.from_k(args.r, args.k if args.k is not None else 6)


def _load_tabulated(path: str, dom: LatticeDomain2) -> np.ndarray:
    xs = []
    vals = []
    with open(path, "r", encoding="ascii") as fh:
        for ln, line in enumerate(fh, start=1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split()
            if len(parts) != 2:
                raise ValueError(f"{path}:{ln}: expected 'x value', got {line!r}")
            xs.append(float(parts[0]))
            vals.append(float(parts[1]))
    if len(xs) != dom.n:
        raise ValueError(
            f"{path}: {len(xs)} rows, but the grid needs {dom.n} data sites"
        )
    for i in range(1, len(xs)):
        if xs[i] <= xs[i - 1]:
            raise ValueError(f"{path}: x values must be strictly increasing")
    for i, x in enumerate(xs):
        want = i * dom.eps
        if abs(x - want) > 1e-12 * max(1.0, abs(x)):
            raise ValueError(
                f"{path}: x = {x!r} does not match lattice site {want!r} "
                f"(no interpolation is performed)"
            )
    return np.asarray(vals, dtype=float)


def _resolve_data(spec: str, dom: LatticeDomain2) -> GoursatData2:
    if spec == "demo":
        return demo_data()
    if spec == "zero":
        return zero_data()
    if "," in spec:
        apath, bpath = spec.split(",", 1)
        return GoursatData2(_load_tabulated(apath, dom), _load_tabulated(bpath, dom))
    raise ValueError(f"--data must be 'demo', 'zero', or 'APATH,BPATH', got {spec!r}")


def _scheme(name: str) -> SchemeKind:
    return SchemeKind.HIROTA if name == "hirota" else SchemeKind.NAIVE


def _chain(args, default=None) -> list:
    if args.bt_file is not None:
        if args.alpha is not None or args.theta0 is not None:
            raise ValueError("pass --bt-file or --alpha/--theta0 lists, not both")
        return load_backlund_chain(args.bt_file)
    if args.alpha is None and args.theta0 is None:
        if default is not None:
            return list(default)
        raise ValueError("a Backlund chain needs --alpha/--theta0 pairs or --bt-file")
    if args.alpha is None or args.theta0 is None or len(args.alpha) != len(args.theta0):
        raise ValueError("--alpha and --theta0 must appear the same number of times")
    return [BacklundParam(a, t) for a, t in zip(args.alpha, args.theta0)]


def _check_threads(args):
    if getattr(args, "threads", 1) < 1:
        raise ValueError("--threads must be >= 1")


def _cmd_solve(args) -> int:
    dom = _domain(args)
    data = _resolve_data(args.data, dom)
    scheme = _scheme(args.scheme)
    fields = solve_goursat_2d(system_for(scheme), data, dom)
    save_field_csv(f"{args.out}_a.csv", fields.a, dom)
    save_field_csv(f"{args.out}_b.csv", fields.b, dom)
    print(f"solved {args.scheme} on n = {dom.n} (eps = {dom.eps:.6g}, r = {dom.r:.6g})")
    print(f"wrote {args.out}_a.csv and {args.out}_b.csv")
    if args.phi:
        phi00 = float(np.asarray(data.sample(dom)[1]).ravel()[0])
        field = reconstruct_phi(fields, phi00, scheme)
        save_field_csv(f"{args.out}_phi.csv", field.phi, dom)
        print(f"wrote {args.out}_phi.csv")
    return 0


def _cmd_surface(args) -> int:
    dom = _domain(args)
    data = _resolve_data(args.data, dom)
    scheme = _scheme(args.scheme)
    mesh = build_surface(data, dom, args.lam, scheme)
    fields = solve_goursat_2d(system_for(scheme), data, dom)
    phi00 = float(np.asarray(data.sample(dom)[1]).ravel()[0])
    phi = reconstruct_phi(fields, phi00, scheme)
    report = validate_k_surface(mesh, phi)
    export_obj(mesh, f"{args.out}.obj")
    print(f"surface on n = {dom.n} (eps = {dom.eps:.6g}), lambda = {args.lam:.6g}")
    print(
        f"residuals: edge {report.edge:.3e}, planarity {report.planarity:.3e}, "
        f"angle {report.angle:.3e}, angle sum {report.angle_sum:.3e} "
        f"({report.interior_sites} interior sites)"
    )
    print(f"wrote {args.out}.obj and {args.out}.meta")
    return 0


def _cmd_backlund(args) -> int:
    dom = _domain(args)
    data = _resolve_data(args.data, dom)
    scheme = _scheme(args.scheme)
    chain = _chain(args)
    meshes = backlund_surface(data, dom, chain, args.lam, scheme)
    for z, mesh in enumerate(meshes):
        export_obj(mesh, f"{args.out}_layer{z}.obj")
    print(f"tower of {len(meshes)} surfaces on n = {dom.n} (eps = {dom.eps:.6g})")
    for z in range(1, len(meshes)):
        norms = backlund_step_norms(meshes[z - 1], meshes[z])
        p = chain[z - 1]
        expect = 2.0 * args.lam * p.alpha / (p.alpha**2 + args.lam**2)
        print(
            f"step {z}: |dF| mean {norms.mean():.6g} (expected {expect:.6g}, "
            f"spread {norms.max() - norms.min():.3e})"
        )
    print(f"wrote {args.out}_layer0.obj .. {args.out}_layer{len(meshes) - 1}.obj")
    return 0


def _cmd_converge(args) -> int:
    chain = ()
    if args.quantity.startswith("surface_bt"):
        chain = tuple(_chain(args, default=[BacklundParam(1.0, 0.5)]))
    cfg = SweepConfig(
        r=args.r,
        k_min=args.kmin,
        k_max=args.kmax,
        k_ref=args.kref,
        quantity=args.quantity,
        scheme=_scheme(args.scheme),
        lam=args.lam,
        bt_chain=chain,
        quotient_order=args.quotient_order,
    )
    if "," in args.data:
        raise ValueError(
            "converge solves on several grids, so --data must be a preset "
            "('demo' or 'zero'); tabulated files fix a single grid"
        )
    dom_fine = LatticeDomain2.from_k(cfg.r, cfg.k_ref)
    data = _resolve_data(args.data, dom_fine)
    report = run_sweep(cfg, data)
    out = args.out if args.out is not None else f"converge_{cfg.quantity}.csv"
    emit_report(report, out)
    for eps, err in report.rows:
        print(f"eps = {eps:.6g}   error = {err:.6e}")
    if report.degenerate:
        print("degenerate sweep: all errors at roundoff, no slope fitted")
    else:
        print(f"slope = {report.slope:.4f}, intercept = {report.intercept:.4f}")
    print(f"wrote {out}")
    return 0


def _cmd_check(args) -> int:
    alphas = args.alpha if args.alpha else [0.5, 1.0, 2.0]
    eps_list = args.eps if args.eps else [2.0**-3, 2.0**-6]
    if args.samples < 1:
        raise ValueError("--samples must be >= 1")
    rng = np.random.default_rng(args.seed)
    samples = rng.uniform(-3.0, 3.0, size=(args.samples, 3))
    make = (
        hirota_backlund_system
        if _scheme(args.scheme) is SchemeKind.HIROTA
        else naive_backlund_system
    )
    worst = 0.0
    for alpha in alphas:
        rhs6 = make(alpha)
        for eps in eps_list:
            res = check_compatibility_3d(rhs6, samples, eps)
            worst = max(worst, res)
            print(f"alpha = {alpha:<6g} eps = {eps:<12g} residual = {res:.3e}")
    print(f"max residual = {worst:.3e} over {args.samples} samples ({args.scheme})")
    if worst > CHECK_TOL:
        print(
            f"FAIL: residual {worst:.3e} exceeds {CHECK_TOL:.0e}; "
            f"the right-hand sides are not compatible",
            file=sys.stderr,
        )
        return 2
    return 0


_COMMANDS = {
    "solve": _cmd_solve,
    "surface": _cmd_surface,
    "backlund": _cmd_backlund,
    "converge": _cmd_converge,
    "check": _cmd_check,
}


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as exc:
        exc.parser.print_usage(sys.stderr)
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except SystemExit as exc:  # --help
        return int(exc.code or 0)
    try:
        _check_threads(args)
        return _COMMANDS[args.command](args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (BlowUpError, CompatibilityError, ZeroCurvatureError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
