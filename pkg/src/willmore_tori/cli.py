"""Command-line interface: certify, bound, tau, sigma, moduli-map, generate, willmore, validate."""

from __future__ import annotations

import argparse
import csv
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import bounds, generators, geometry, immersions, validate
from .fields import read_field, write_field
from .moduli import ModuliPoint, classify_region

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_UNCERTIFIED = 2
THREADS_ENV = "WILLMORE_TORI_THREADS"


def _p_value(text: str) -> float:
    p = float(text)
    if not p > 1.0:
        raise argparse.ArgumentTypeError("p must exceed 1")
    return p


def _range(text: str) -> np.ndarray:
    """start:stop:count -> inclusive linspace."""
    try:
        a, b, n = text.split(":")
        return np.linspace(float(a), float(b), int(n))
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected start:stop:count, got {text!r}") from exc


def _threads() -> int:
    try:
        return max(1, int(os.environ.get(THREADS_ENV, "1")))
    except ValueError:
        return 1


def cmd_certify(args) -> int:
    metric = geometry.ConformalTorusMetric(read_field(args.field))
    rep = geometry.report(metric, args.p)
    cert = bounds.certify_report(rep)
    if not args.quiet:
        print(rep.table(), file=sys.stderr)
    print(json.dumps({"report": rep.to_dict(), "certificate": cert.to_dict()}, indent=2))
    return EXIT_OK if cert.certified else EXIT_UNCERTIFIED


def cmd_bound(args) -> int:
    out = {"K": args.K, "p": args.p, "V": args.V, "q": bounds.conjugate_exponent(args.p),
           "S": bounds.S_bound(args.K, args.p, args.V), "Q": bounds.Q_bound(args.K, args.p, args.V)}
    print(json.dumps(out, indent=2))
    return EXIT_OK


def cmd_tau(args) -> int:
    if args.y <= 1.0:
        print("unconstrained (region rule applies)")
    else:
        print(f"{bounds.tau(args.y, args.p):.10f}")
    return EXIT_OK


def cmd_sigma(args) -> int:
    if args.V <= 1.0:
        print("unconstrained (systole rule applies)")
    else:
        print(f"{bounds.sigma(args.V, args.p):.10f}")
    return EXIT_OK


def _map_row(x: float, y: float, p: float):
    region = classify_region(ModuliPoint(x, y)).value
    t = "unconstrained" if y <= 1.0 else f"{bounds.tau(y, p):.10g}"
    return (x, y, region, t)


def cmd_moduli_map(args) -> int:
    points = [(float(x), float(y)) for x in args.xs for y in args.ys
              if 0.0 <= x <= 0.5 and y > 0 and x * x + y * y >= 1.0]
    with ThreadPoolExecutor(max_workers=_threads()) as pool:
        rows = list(pool.map(lambda xy: _map_row(xy[0], xy[1], args.p), points))
    rows.sort(key=lambda r: (r[0], r[1]))
    fh = open(args.out, "w", newline="") if args.out else sys.stdout
    try:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["x", "y", "region", "tau"])
        for x, y, region, t in rows:
            w.writerow([f"{x:.10g}", f"{y:.10g}", region, t])
    finally:
        if args.out:
            fh.close()
    return EXIT_OK


def cmd_generate(args) -> int:
    lattice = ModuliPoint(args.x, args.y, args.scale)
    center = (args.cs, args.ct)
    if args.family == "random":
        metric = generators.random_trig_metric(lattice, args.modes, args.amplitude, args.seed, args.n)
    elif args.family == "cylinder":
        H = args.H if args.H is not None else args.ratio * args.R
        metric = generators.generate_cylinder(args.R, H, lattice, center, args.smoothing, args.n)
    else:
        if args.H is not None:
            spec = generators.ConeSpec(args.R, args.H, args.beta, lattice, center, args.smoothing)
        else:
            # ratio = R / rho
            rho = args.R / args.ratio
            sb = math.sin(args.beta)
            if sb == 0.0:
                raise ValueError("a cone given by R/rho needs beta > 0; use --H or --family cylinder")
            spec = generators.ConeSpec(args.R, (args.R - rho) / sb, args.beta, lattice, center, args.smoothing)
        metric = generators.generate_cone(spec, args.n)
    write_field(metric.u, args.out)
    if not args.quiet:
        print(geometry.report(metric, args.p).table())
    return EXIT_OK


def cmd_willmore(args) -> int:
    if args.builtin:
        t = immersions.BUILTINS[args.builtin](args.n)
    elif args.R is not None:
        t = immersions.ImmersedTorus.revolution(args.R, args.r)
    else:
        t = immersions.read_immersion(args.file)
    res = immersions.verify_lower_bounds(t, args.p, args.n)
    print(json.dumps(res.to_dict(), indent=2))
    return EXIT_OK if res.holds else EXIT_ERROR


def cmd_validate(args) -> int:
    def progress(r):
        print(r.line(), file=sys.stderr, flush=True)

    results = validate.run_suite(quick=args.quick, progress=progress)
    failed = [r.number for r in results if not r.passed]
    print(json.dumps({"passed": not failed, "failed": failed,
                      "criteria": [r.to_dict() for r in results]}, indent=2))
    return EXIT_OK if not failed else EXIT_ERROR


class _Parser(argparse.ArgumentParser):
    """Usage errors exit with 1; exit code 2 is reserved for an uncertified metric."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_ERROR, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="willmore-tori", description=__doc__)
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("certify", help="certify W >= 2 pi^2 for an immersion inducing the metric in a field file")
    s.add_argument("field", help="field file (JSON with lattice, grid, u)")
    s.add_argument("--p", type=_p_value, default=2.0, help="curvature exponent p > 1 (default 2)")
    s.add_argument("--quiet", action="store_true", help="do not print the report table on stderr")
    s.set_defaults(func=cmd_certify)

    s = sub.add_parser("bound", help="evaluate S(K, p, V) and Q(K, p, V)")
    s.add_argument("--K", type=float, required=True, help="curvature functional value, 0 <= K < 4 pi")
    s.add_argument("--p", type=_p_value, default=2.0)
    s.add_argument("--V", type=float, required=True, help="area / sys^2")
    s.set_defaults(func=cmd_bound)

    s = sub.add_parser("tau", help="threshold tau(y, p)")
    s.add_argument("--y", type=float, required=True)
    s.add_argument("--p", type=_p_value, default=2.0)
    s.set_defaults(func=cmd_tau)

    s = sub.add_parser("sigma", help="threshold sigma(V, p)")
    s.add_argument("--V", type=float, required=True)
    s.add_argument("--p", type=_p_value, default=2.0)
    s.set_defaults(func=cmd_sigma)

    s = sub.add_parser("moduli-map", help="CSV of region and tau over a grid of conformal classes")
    s.add_argument("--p", type=_p_value, default=2.0)
    s.add_argument("--xs", type=_range, default=_range("0:0.5:11"), help="x range start:stop:count")
    s.add_argument("--ys", type=_range, default=_range("0.8:3:23"), help="y range start:stop:count")
    s.add_argument("--out", help="output CSV path (default stdout)")
    s.set_defaults(func=cmd_moduli_map)

    s = sub.add_parser("generate", help="write a test metric to a field file")
    s.add_argument("--family", choices=["cone", "cylinder", "random"], required=True)
    s.add_argument("--out", required=True, help="output field file")
    s.add_argument("--x", type=float, default=0.0, help="lattice x")
    s.add_argument("--y", type=float, default=1.0, help="lattice y")
    s.add_argument("--scale", type=float, default=1.0, help="length of the first lattice generator")
    s.add_argument("--n", type=int, default=512, help="samples per direction")
    s.add_argument("--beta", type=float, default=0.0, help="cone opening angle in radians")
    s.add_argument("--R", type=float, default=0.15, help="outer radius")
    s.add_argument("--H", type=float, default=None, help="height (overrides --ratio)")
    s.add_argument("--ratio", type=float, default=2.0, help="R/rho for cones, H/R for cylinders")
    s.add_argument("--smoothing", type=float, default=generators.DEFAULT_SMOOTHING,
                   help="log-radius width of the cap and socket transitions")
    s.add_argument("--cs", type=float, default=0.5, help="centre, first lattice coordinate")
    s.add_argument("--ct", type=float, default=0.5, help="centre, second lattice coordinate")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--modes", type=int, default=3)
    s.add_argument("--amplitude", type=float, default=0.2)
    s.add_argument("--p", type=_p_value, default=2.0)
    s.add_argument("--quiet", action="store_true")
    s.set_defaults(func=cmd_generate)

    s = sub.add_parser("willmore", help="Willmore energy of an immersion against its lower bounds")
    src = s.add_mutually_exclusive_group(required=True)
    src.add_argument("--builtin", choices=sorted(immersions.BUILTINS))
    src.add_argument("--file", help="immersion file (JSON)")
    src.add_argument("--R", type=float, help="torus of revolution ring radius (with --r)")
    s.add_argument("--r", type=float, default=1.0, help="torus of revolution tube radius")
    s.add_argument("--n", type=int, default=128, help="grid size for built-ins and revolution tori")
    s.add_argument("--p", type=_p_value, default=2.0)
    s.set_defaults(func=cmd_willmore)

    s = sub.add_parser("validate", help="run the acceptance suite")
    scale = s.add_mutually_exclusive_group()
    scale.add_argument("--quick", action="store_true", help="small corpora")
    scale.add_argument("--full", action="store_true", help="full corpora (default)")
    s.set_defaults(func=cmd_validate)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, OSError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
