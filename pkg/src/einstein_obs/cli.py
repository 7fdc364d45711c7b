"""Command line: ``einstein-obs {catalog,verify,sweep,alpha,obstruct,blowup-scan}``.

Exit status: 0 verified / inequality holds, 2 violated / residual failure /
non-convergence, 1 usage error.
"""
from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction


from . import manifest as manifest_mod
from . import metrics as M
from .boundary import alpha_invariant, cs_sweep, volume_over_2pi2
from .eta import CircleOverSurface, UserEta
from .obstruction import (AndersonCC, ClosedHT, Cone, FiberedEnd, Kotschick, NakajimaALE,
                          ObstructionInput, ObstructionInputError, VIOLATED, check, flip_orientation,
                          fmt_number, min_obstructed_blowups)
from .quadrature import QuadratureError
from .verify import DEFAULT_TOL, VerificationError, dumps, verify

EXIT_OK, EXIT_USAGE, EXIT_FAIL = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def number(text: str):
    """Exact rational from ``p``, ``p/q`` or a decimal literal."""
    try:
        return Fraction(text.strip())
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None


def _emit(payload: dict, fmt: str, text_lines: list[str], out=None):
    out = out or sys.stdout
    if fmt == "json":
        out.write(dumps(payload))
    else:
        out.write("\n".join(text_lines) + "\n")


def _metric(args):
    man = manifest_mod.load(args.manifest)
    entry = man.get(args.name)
    return entry.build(args.orientation), man


def cmd_catalog(args) -> int:
    man = manifest_mod.load(args.manifest)
    rows = []
    for name in man.names():
        g = man.get(name).build()
        topo = g.topo
        rows.append({
            "name": name,
            "kind": man.get(name).kind,
            "orbit": g.orbit_model,
            "end": g.end.type,
            "euler": g.end.euler,
            "chi": None if topo is None else topo.chi,
            "tau": None if topo is None else topo.tau,
            "einstein": g.einstein_flag,
            "orientation": g.orientation,
        })
    text = [f"{r['name']:26s} {r['kind']:24s} end={r['end']:17s} chi={r['chi']} tau={r['tau']} "
            f"e={r['euler']} einstein={r['einstein']}" for r in rows]
    _emit({"metrics": [{k: (v if isinstance(v, (str, bool)) or v is None else str(v))
                        for k, v in r.items()} for r in rows]}, args.format, text)
    return EXIT_OK


def _schedule(args, man) -> tuple[float, ...]:
    if args.rmax is None:
        return tuple(man.quadrature_spec().rmax_schedule)
    R = float(args.rmax)
    if R <= 1:
        raise UsageError("--rmax must exceed 1")
    return (R / 100.0, R / 10.0, R)


def cmd_verify(args) -> int:
    g, man = _metric(args)
    spec = man.quadrature_spec()
    tol = args.tol if args.tol is not None else float(man.defaults.get("tol", DEFAULT_TOL))
    rep = verify(g, _schedule(args, man), spec, tol, {"eta_sign_requested": args.eta_sign})
    e, s = rep.euler, rep.signature
    text = [
        f"metric {rep.metric} (orientation {rep.orientation:+d})",
        f"  euler [{e.path}]: int Pf = {e.integral:.12g} +- {e.integral_error:.1e}, "
        f"cs limit = {e.cs_limit:.12g}, chi = {e.chi_declared}, residual = {e.residual:.2e} "
        f"({'ok' if e.passed else 'FAIL'})",
        f"  signature: int L = {s.integral:.12g} +- {s.integral_error:.1e}, "
        f"half eta = {fmt_number(s.half_eta)}, tau = {s.tau_declared}, "
        + ", ".join(f"{k}: {v:.2e}" for k, v in s.residuals.items())
        + f" -> pinned {','.join(s.pinned) or 'none'} ({'ok' if s.passed else 'FAIL'})",
        f"  curvature: einstein residual {rep.curvature.einstein_residual:.2e}, "
        f"surviving Weyl {rep.curvature.surviving_chirality}, sign S {rep.curvature.scalar_sign}",
    ]
    for n in e.notes + s.notes:
        text.append(f"  note: {n}")
    _emit(rep.to_dict(), args.format, text)
    if args.eta_sign not in s.pinned and s.pinned and "closed" not in s.pinned and "index" not in s.pinned:
        print(f"warning: requested eta sign '{args.eta_sign}' is not the one the data pins "
              f"({','.join(s.pinned)})", file=sys.stderr)
    return EXIT_OK if rep.passed else EXIT_FAIL


def cmd_sweep(args) -> int:
    g, _ = _metric(args)
    eps = args.eps or [10.0 ** -k for k in (1, 1.5, 2, 2.5, 3)]
    eps = sorted({float(x) for x in eps}, reverse=True)
    try:
        res = cs_sweep(g, eps)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    if args.output:
        with open(args.output, "w", newline="") as fh:
            res.to_csv(fh)
    else:
        res.to_csv(sys.stdout)
    summary = (f"slopes: euler {res.slope_euler}, signature {res.slope_signature} "
               f"(R^2 {res.r2_euler}, {res.r2_signature})")
    print(summary, file=sys.stderr)
    for n in res.notes:
        print(f"note: {n}", file=sys.stderr)
    return EXIT_OK


def cmd_alpha(args) -> int:
    if args.berger is not None:
        link = M.berger_sphere(args.radius, args.berger)
    else:
        link = M.round_link(args.radius, args.quotient)
    a = alpha_invariant(link)
    v2 = volume_over_2pi2(link)
    payload = {"link": a.link, "alpha": repr(a.alpha), "boundary_volume": repr(a.boundary_volume),
               "volume_over_2pi2": fmt_number(v2),
               "curvature_term": repr(a.curvature_term), "volume_term": repr(a.volume_term),
               "alpha_first_form": repr(a.alpha_first_form)}
    text = [f"link {a.link}: alpha = {a.alpha:.12g} (first form {a.alpha_first_form:.12g}), "
            f"vol = {a.boundary_volume:.12g}, vol/2pi^2 = {fmt_number(v2)}"]
    _emit(payload, args.format, text)
    return EXIT_OK


def _mode(args):
    need = {
        "closed": [], "kotschick": ["lam"], "fibered": [], "cone": ["eta", "alpha"],
        "nakajima": ["gamma_order", "eta_s"], "anderson": ["renormalized_volume", "eta"],
    }[args.mode]
    for k in need:
        if getattr(args, k) is None:
            raise UsageError(f"--mode {args.mode} needs --{k.replace('_', '-')}")
    if args.mode == "closed":
        return ClosedHT()
    if args.mode == "kotschick":
        return Kotschick(args.lam)
    if args.mode == "fibered":
        if (args.euler is None) == (args.half_eta is None):
            raise UsageError("--mode fibered needs exactly one of --euler or --half-eta")
        if args.euler is not None:
            if args.euler.denominator != 1:
                raise UsageError("--euler must be an integer")
            return FiberedEnd(CircleOverSurface(int(args.euler), args.genus))
        return FiberedEnd(UserEta(args.half_eta))
    if args.mode == "cone":
        if (args.volume is None) == (args.volume_over_2pi2 is None):
            raise UsageError("--mode cone needs exactly one of --volume or --volume-over-2pi2")
        return Cone(args.volume, args.eta, args.alpha, args.volume_over_2pi2)
    if args.mode == "nakajima":
        if args.gamma_order.denominator != 1:
            raise UsageError("--gamma-order must be an integer")
        return NakajimaALE(int(args.gamma_order), args.eta_s)
    return AndersonCC(args.renormalized_volume, args.eta)


def cmd_obstruct(args) -> int:
    for k in ("chi", "tau"):
        if getattr(args, k).denominator != 1:
            raise UsageError(f"--{k} must be an integer")
    inp = ObstructionInput(M.TopologicalData(int(args.chi), int(args.tau)), _mode(args))
    if args.orientation == "flipped":
        inp = flip_orientation(inp)
    v = check(inp, args.eta_sign)
    text = [f"{v.status}: {fmt_number(v.lhs)} vs {fmt_number(v.rhs)} ({v.mode}"
            + (f", {v.convention} convention" if v.convention else "") + ")"]
    if v.rigidity_note:
        text.append(f"  rigidity: {v.rigidity_note}")
    if v.alternate is not None:
        text.append(f"  alternate ({v.alternate.convention}): {v.alternate.status}: "
                    f"{fmt_number(v.alternate.lhs)} vs {fmt_number(v.alternate.rhs)}")
    for n in v.notes:
        text.append(f"  note: {n}")
    _emit(v.to_dict(), args.format, text)
    return EXIT_FAIL if v.status == VIOLATED else EXIT_OK


def cmd_blowup_scan(args) -> int:
    g, _ = _metric(args)
    if g.topo is None:
        raise UsageError(f"{g.name} has no declared topology")
    if g.end.type not in ("fibered_boundary", "fibered_cusp") or g.end.euler is None:
        raise UsageError(f"{g.name}: blow-up scans need a circle-bundle end")
    k = min_obstructed_blowups(g.topo, CircleOverSurface(g.end.euler), args.eta_sign)
    payload = {"metric": g.name, "chi": str(g.topo.chi), "tau": str(g.topo.tau),
               "euler": str(g.end.euler), "convention": args.eta_sign, "min_k": str(k)}
    _emit(payload, args.format, [f"{g.name}: first obstructed blow-up k = {k} ({args.eta_sign} convention)"])
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--manifest", default=None, help="manifest file (default: packaged catalog)")
    common.add_argument("--format", choices=("json", "text"), default="json")
    common.add_argument("--orientation", choices=("default", "flipped"), default="default")
    common.add_argument("--eta-sign", choices=("corollary", "theorem"), default="corollary")

    p = _Parser(prog="einstein-obs", description="Hitchin-Thorpe-type checks for noncompact Einstein 4-manifolds")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("catalog", parents=[common], help="list the manifest")
    s.set_defaults(func=cmd_catalog)

    s = sub.add_parser("verify", parents=[common], help="index verification of one metric")
    s.add_argument("name")
    s.add_argument("--rmax", type=float, default=None, help="largest truncation radius")
    s.add_argument("--tol", type=float, default=None)
    s.set_defaults(func=cmd_verify)

    s = sub.add_parser("sweep", parents=[common], help="Chern-Simons eps-sweep as CSV")
    s.add_argument("name")
    s.add_argument("--eps", type=float, nargs="+", default=None)
    s.add_argument("--output", default=None)
    s.set_defaults(func=cmd_sweep)

    s = sub.add_parser("alpha", parents=[common], help="alpha invariant of a round or Berger link")
    s.add_argument("--radius", type=float, default=1.0)
    s.add_argument("--quotient", type=int, default=1)
    s.add_argument("--berger", type=float, default=None, metavar="FIBER_SCALE")
    s.set_defaults(func=cmd_alpha)

    s = sub.add_parser("obstruct", parents=[common], help="evaluate one inequality")
    s.add_argument("--mode", required=True,
                   choices=("closed", "kotschick", "fibered", "cone", "nakajima", "anderson"))
    s.add_argument("--chi", type=number, required=True)
    s.add_argument("--tau", type=number, required=True)
    s.add_argument("--euler", type=number)
    s.add_argument("--genus", type=int, default=0)
    s.add_argument("--half-eta", type=number)
    s.add_argument("--lambda", dest="lam", type=number)
    s.add_argument("--volume", type=number)
    s.add_argument("--volume-over-2pi2", type=number)
    s.add_argument("--eta", type=number)
    s.add_argument("--alpha", type=number)
    s.add_argument("--gamma-order", type=number)
    s.add_argument("--eta-s", type=number)
    s.add_argument("--renormalized-volume", type=number)
    s.set_defaults(func=cmd_obstruct)

    s = sub.add_parser("blowup-scan", parents=[common], help="smallest obstructed k for M # k CP2-bar")
    s.add_argument("name")
    s.set_defaults(func=cmd_blowup_scan)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (UsageError, manifest_mod.ManifestError, ObstructionInputError, M.MetricError) as exc:
        print(f"einstein-obs: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (VerificationError, QuadratureError) as exc:
        print(f"einstein-obs: failed: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
