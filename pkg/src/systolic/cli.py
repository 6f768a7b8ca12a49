"""Command-line interface.

Subcommands: ``verify`` (full defect report for one metric), ``corpus``
(random-metric CSV), ``curvature`` (write the curvature grid), ``systole``,
``sweep`` (random holomorphic-factor variance table), and ``average-check``
(rotational-averaging checks on a disk field).  Exit status is 0 exactly
when every checked inequality passes.

Metrics are described by a JSON config with keys ``lattice`` (either
``basis`` = [[b1x, b1y], [b2x, b2y]] or ``tau`` = [re, im], the latter
meaning the unit-coarea lattice of that modulus), ``grid`` (nu, nv), and
``factor`` (a family name with parameters, or ``grid_file`` pointing to a
field in the grid-file format).
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import averaging, defect, fields, lattice, liouville
from ._kernels import USING_COMPILED
from .systole import fubini_bound_check, systole


def load_config(path) -> dict:
    with open(path) as fh:
        return json.load(fh)


def metric_from_config(cfg: dict) -> fields.ConformalMetric:
    factor = cfg.get("factor", {"family": "constant", "c": 1.0})
    if "grid_file" in factor:
        fld = fields.read_grid(factor["grid_file"])
        return fields.ConformalMetric(fld)

    lat_cfg = cfg.get("lattice", {"basis": [[1.0, 0.0], [0.0, 1.0]]})
    if "tau" in lat_cfg:
        lat = lattice.from_tau(*lat_cfg["tau"])
    else:
        b1, b2 = lat_cfg["basis"]
        lat = lattice.normalize_coarea(lattice.Lattice2D(tuple(b1), tuple(b2)))
    grid = cfg.get("grid", {})
    nu = int(grid.get("nu", 128))
    nv = int(grid.get("nv", 128))
    params = {k: v for k, v in factor.items() if k != "family"}
    if "center" in params:
        params["center"] = tuple(params["center"])
    fld = fields.from_analytic(lat, nu, nv, factor.get("family", "constant"),
                               **params)
    return fields.ConformalMetric(fld)


def _print_report(rep: defect.DefectReport) -> None:
    print(f"tau            = {rep.tau.re:+.9f} + {rep.tau.im:.9f} i "
          f"(sigma^2 = {rep.tau.sigma_sq:.9f})")
    print(f"area           = {rep.area:.9f}")
    print(f"mean           = {rep.mean:.9f}")
    print(f"sys            = {rep.sys:.9f}   "
          f"class {rep.witness.witness_coeffs}, "
          f"{rep.witness.classes_examined} classes examined")
    print(f"var(f)         = {rep.variance:.9f}")
    print(f"curvature      = [{rep.kmin:.6g}, {rep.kmax:.6g}]")
    print(f"tolerance      = {rep.tol:.3g}")

    def line(name, lhs, ok):
        mark = "ok" if ok else "FAIL"
        print(f"{name:<14} = {lhs:+.9f}  >=  var - tol : {mark}")

    line("area-s3/2 sys2", rep.loewner_lhs, rep.loewner_ok)
    line("area-s^2 sys2", rep.sharp_lhs, rep.sharp_ok)
    if rep.rect_lhs is not None:
        line("area-sys2", rep.rect_lhs, rep.rect_ok)
    gap = rep.loewner_lhs - rep.sharp_lhs
    expect = (rep.tau.sigma_sq - defect.SQRT3_2) * rep.sys**2
    print(f"gap identity   = {gap:.3e} (expected {expect:.3e})")
    print(f"equality case  = {equality_str(rep)}")


def equality_str(rep: defect.DefectReport) -> str:
    near_hex = abs(rep.tau.as_complex() - defect.HEX_TAU) <= rep.tol
    flag = rep.loewner_lhs <= rep.tol and rep.variance <= rep.tol and near_hex
    return "yes" if flag else "no"


def cmd_verify(args) -> int:
    metric = metric_from_config(load_config(args.config))
    rep = defect.build_report(metric, tol=args.tol)
    _print_report(rep)
    return 0 if rep.all_ok() else 1


def cmd_corpus(args) -> int:
    metrics = defect.random_corpus(args.count, args.seed, nu=args.nu, nv=args.nv)
    rows = []
    all_ok = True
    for i, metric in enumerate(metrics):
        rep = defect.build_report(metric)
        rows.append(rep.csv_row(i))
        all_ok = all_ok and rep.all_ok()
        if args.verbose:
            print(f"[{i}] sys={rep.sys:.6f} area={rep.area:.6f} "
                  f"var={rep.variance:.6f} ok={rep.all_ok()}")
    text = defect.CSV_HEADER + "\n" + "\n".join(rows) + "\n"
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
        print(f"wrote {len(rows)} rows to {args.out}")
    else:
        sys.stdout.write(text)
    print(f"all inequalities pass: {all_ok}")
    return 0 if all_ok else 1


def cmd_curvature(args) -> int:
    metric = metric_from_config(load_config(args.config))
    K = fields.gaussian_curvature(metric)
    fields.write_grid(args.out, K)
    print(f"wrote curvature grid to {args.out} "
          f"(K in [{K.values.min():.6g}, {K.values.max():.6g}])")
    return 0


def cmd_systole(args) -> int:
    metric = metric_from_config(load_config(args.config))
    res = systole(metric)
    print(f"sys = {res.sys:.9f}")
    print(f"class = {res.witness_coeffs} "
          f"(vector {res.witness_class[0]:+.6f}, {res.witness_class[1]:+.6f})")
    print(f"classes examined = {res.classes_examined}")
    if args.emit_path:
        with open(args.emit_path, "w") as fh:
            for x, y in res.witness_path:
                fh.write("%.12g,%.12g\n" % (x, y))
        print(f"wrote witness polyline to {args.emit_path}")
    fub = fubini_bound_check(metric, result=res)
    print(f"pencil bound: E(f) = {fub.lhs:.9f} >= sigma*sys = {fub.rhs:.9f} "
          f": {'ok' if fub.ok else 'FAIL'}")
    return 0 if fub.ok else 1


def cmd_sweep(args) -> int:
    rows = liouville.variance_sweep_experiment(
        args.alpha, args.rho, args.samples, args.seed)
    lines = ["id,degree,l2norm,variance"]
    lines += [f"{r.id},{r.degree},{r.l2norm:.12g},{r.variance:.12g}"
              for r in rows]
    text = "\n".join(lines) + "\n"
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
        print(f"wrote {len(rows)} rows to {args.out}")
    else:
        sys.stdout.write(text)
    best = min(rows, key=lambda r: r.variance)
    print(f"smallest variance: {best.id} (degree {best.degree}, "
          f"var {best.variance:.6g}); riemann row var {rows[0].variance:.6g}")
    return 0


BUILTIN_DISK_FIELDS = {
    "riemann": lambda r, t: liouville.RiemannProfile(4.0)(r) + 0 * t,
    # harmonic perturbation 0.01*x of log f, so the curvature stays near 4
    "riemann-perturbed":
        lambda r, t: liouville.RiemannProfile(4.0)(r)
        * np.exp(0.01 * r * np.cos(t)),
    "exp-sin": lambda r, t: np.exp(np.sin(t)) + 0 * r,
    "radial-ramp": lambda r, t: 1.0 + r * r + 0 * t,
}


def cmd_average_check(args) -> int:
    if args.grid:
        fld_periodic = fields.read_grid(args.grid)
        metric = fields.ConformalMetric(fld_periodic)
        center = np.array(args.center, dtype=float)
        disk = averaging.disk_field_from_metric(
            metric, tuple(center), args.radius, args.nr, args.ntheta)
        name = args.grid
    else:
        fn = BUILTIN_DISK_FIELDS[args.field]
        disk = averaging.disk_field_from_function(
            fn, args.radius, args.nr, args.ntheta, polar=True)
        name = args.field

    print(f"field: {name}  (nr={disk.nr}, ntheta={disk.ntheta}, "
          f"radius={disk.radius})")
    ok = True

    var = averaging.variance_monotonicity_check(disk.map(np.log))
    print(f"mean preserved, var(h_av) = {var.var_hav:.6g} <= "
          f"var(h) = {var.var_h:.6g} : {'ok' if var.ok else 'FAIL'}")
    ok &= var.ok

    jensen = averaging.jensen_exp_check(disk)
    print(f"Jensen slack min = {jensen.min_slack:.3e} "
          f": {'ok' if jensen.ok else 'FAIL'}")
    ok &= jensen.ok

    hav = averaging.rotational_average(disk)
    twice = averaging.rotational_average(
        averaging.DiskField(disk.center, disk.radius,
                            np.repeat(hav.values[:, None], disk.ntheta, axis=1)))
    idem = bool(np.array_equal(hav.values, twice.values))
    print(f"double averaging idempotent : {'ok' if idem else 'FAIL'}")
    ok &= idem

    rep = averaging.averaged_inequality_check(disk, args.alpha)
    print(f"curvature hypothesis K >= {args.alpha}: "
          f"{'ok' if rep.hypothesis_ok else 'VIOLATED'} "
          f"(min K = {rep.curvature_min:.6g})")
    m = float(rep.margin_sq.min())
    tol = 10 * (disk.radius / disk.nr) ** 2 * max(1.0, abs(args.alpha))
    print(f"averaged inequality margin (e^2hav form) min = {m:.3e} "
          f": {'ok' if m >= -tol else 'FAIL'}")
    print(f"averaged inequality margin (e^hav form)  min = "
          f"{float(rep.margin_plain.min()):.3e} (reported, not judged)")
    ok &= m >= -tol
    if rep.hypothesis_ok is False:
        ok = False
    return 0 if ok else 1


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="systolic",
        description="Conformal torus metrics: curvature, systoles, defect checks")
    p.add_argument("--version", action="version",
                   version=f"%(prog)s (kernel: "
                           f"{'compiled' if USING_COMPILED else 'pure python'})")
    sub = p.add_subparsers(dest="command", required=True)

    v = sub.add_parser("verify", help="full defect report for one metric")
    v.add_argument("--config", required=True)
    v.add_argument("--tol", type=float, default=None)
    v.set_defaults(fn=cmd_verify)

    c = sub.add_parser("corpus", help="defect reports for a random corpus")
    c.add_argument("--count", type=int, default=100)
    c.add_argument("--seed", type=int, default=42)
    c.add_argument("--out", default=None)
    c.add_argument("--nu", type=int, default=64)
    c.add_argument("--nv", type=int, default=64)
    c.add_argument("--verbose", action="store_true")
    c.set_defaults(fn=cmd_corpus)

    k = sub.add_parser("curvature", help="write the Gaussian curvature grid")
    k.add_argument("--config", required=True)
    k.add_argument("--out", required=True)
    k.set_defaults(fn=cmd_curvature)

    s = sub.add_parser("systole", help="shortest noncontractible loop")
    s.add_argument("--config", required=True)
    s.add_argument("--emit-path", default=None)
    s.set_defaults(fn=cmd_systole)

    w = sub.add_parser("sweep", help="random holomorphic-factor variance table")
    w.add_argument("--alpha", type=float, default=4.0)
    w.add_argument("--rho", type=float, default=1.0)
    w.add_argument("--samples", type=int, default=100)
    w.add_argument("--seed", type=int, default=42)
    w.add_argument("--out", default=None)
    w.set_defaults(fn=cmd_sweep)

    a = sub.add_parser("average-check", help="rotational averaging checks")
    a.add_argument("--field", choices=sorted(BUILTIN_DISK_FIELDS),
                   default="riemann")
    a.add_argument("--grid", default=None,
                   help="grid file to resample instead of a builtin field")
    a.add_argument("--center", nargs=2, type=float, default=(0.5, 0.5),
                   help="disk center (with --grid)")
    a.add_argument("--radius", type=float, default=0.35)
    a.add_argument("--alpha", type=float, default=4.0)
    a.add_argument("--nr", type=int, default=128)
    a.add_argument("--ntheta", type=int, default=128)
    a.set_defaults(fn=cmd_average_check)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.fn(args)


if __name__ == "__main__":
    sys.exit(main())
