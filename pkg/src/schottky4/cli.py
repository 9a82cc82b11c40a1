"""Command-line interface.

    schottky4 lattice coeffs --genus 2 --max-diag 4 --format csv
    schottky4 lattice witness
    schottky4 theta eval --point tau.json --char 000:000
    schottky4 schottky eval --point tau.json
    schottky4 schottky relation --points 20 --seed 7
    schottky4 schottky proportionality --points 10 --seed 1
    schottky4 jacobian test --curve curve.json
    schottky4 picard --space voronoi

Exit codes: 0 success, 1 usage error, 2 validation error, 3 resource or
convergence error.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from dataclasses import dataclass

import numpy as np

from . import hyperell, lattice, picard, schottky, theta
from .errors import CutoffInfeasibleError, ResourceError, ValidationError

#: Diagonal of Im(tau) for sampled genus-4 points (the lattice side needs
#: min eig Im(tau) around 2.5 or more for a trace-12 truncation).
GENUS4_IM_SCALE = 3.0
GENUS3_IM_SCALE = 1.5


@dataclass(frozen=True)
class RunConfig:
    tol: float = 1e-8
    max_diag: int | None = None
    quad_order: int | None = None
    seed: int = 0
    output_format: str = "json"

    def __post_init__(self):
        if not 1e-14 <= self.tol <= 1e-2:
            raise ValidationError(f"tol must lie in [1e-14, 1e-2], got {self.tol:g}")
        if self.max_diag is not None and (self.max_diag < 0 or self.max_diag % 2):
            raise ValidationError("--max-diag must be a nonnegative even integer")
        if self.quad_order is not None and self.quad_order < hyperell.MIN_QUAD_ORDER:
            raise ValidationError(f"--quad-order must be at least {hyperell.MIN_QUAD_ORDER}")


class _PartialResult(Exception):
    """A report to print before exiting with a nonzero code."""

    def __init__(self, result, code):
        super().__init__(result.get("indicator_error", ""))
        self.result = result
        self.code = code


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"{self.prog}: error: {message}\n")
        raise SystemExit(1)


def _common():
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--tol", type=float, default=1e-8)
    p.add_argument("--max-diag", type=int, default=None)
    p.add_argument("--quad-order", type=int, default=None)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--format", choices=("json", "csv", "text"), default="json")
    p.add_argument("--out", default=None, help="write output to FILE instead of stdout")
    return p


def build_parser() -> argparse.ArgumentParser:
    top = _Parser(prog="schottky4", description="Genus-4 Schottky form experiments")
    sub = top.add_subparsers(dest="group", required=True, parser_class=_Parser)

    lat = sub.add_parser("lattice", help="representation numbers of E8+E8 and D16+")
    lsub = lat.add_subparsers(dest="cmd", required=True, parser_class=_Parser)
    p = lsub.add_parser("coeffs", parents=[_common()], help="N(E8+E8,T), N(D16+,T) and their difference")
    p.add_argument("--genus", type=int, default=2)
    p = lsub.add_parser("witness", parents=[_common()], help="minimal-trace rank-4 T separating the lattices")

    th = sub.add_parser("theta", help="theta constants")
    tsub = th.add_subparsers(dest="cmd", required=True, parser_class=_Parser)
    p = tsub.add_parser("eval", parents=[_common()], help="theta constants at a point")
    p.add_argument("--point", help="SiegelPoint JSON file (default: sampled)")
    p.add_argument("--genus", type=int, default=3, help="genus of the sampled point")
    p.add_argument("--char", action="append", help="characteristic EPS:EPSPRIME, e.g. 010:110")

    sc = sub.add_parser("schottky", help="the Schottky form")
    ssub = sc.add_subparsers(dest="cmd", required=True, parser_class=_Parser)
    p = ssub.add_parser("eval", parents=[_common()], help="F_lattice, F_theta and the indicator")
    p.add_argument("--point", help="SiegelPoint JSON file (default: sampled)")
    p.add_argument("--im-scale", type=float, default=GENUS4_IM_SCALE)
    p = ssub.add_parser("relation", parents=[_common()], help="genus-3 relation residuals")
    p.add_argument("--points", type=int, default=20)
    p.add_argument("--im-scale", type=float, default=GENUS3_IM_SCALE)
    p = ssub.add_parser("proportionality", parents=[_common()], help="fit F_theta = k F_lattice")
    p.add_argument("--points", type=int, default=10)
    p.add_argument("--im-scale", type=float, default=GENUS4_IM_SCALE)

    jac = sub.add_parser("jacobian", help="hyperelliptic Jacobian points")
    jsub = jac.add_subparsers(dest="cmd", required=True, parser_class=_Parser)
    p = jsub.add_parser("test", parents=[_common()], help="period matrix and Schottky indicator")
    p.add_argument("--curve", help="curve JSON file {branch: [...]}")
    p.add_argument("--branch", help="comma-separated branch points")

    p = sub.add_parser("picard", parents=[_common()], help="divisor classes")
    p.add_argument("--space", choices=picard.SPACES, default=picard.IGUSA)
    p.set_defaults(format="text")
    return top


# ---------------------------------------------------------------------------
# output

def _cplx(z):
    z = complex(z)
    return [z.real, z.imag]


def _emit(result, fmt: str) -> str:
    if isinstance(result, str):
        return result if result.endswith("\n") else result + "\n"
    if fmt == "json":
        return json.dumps(result, sort_keys=True) + "\n"
    flat = {k: (json.dumps(v, sort_keys=True) if isinstance(v, (list, dict)) else v)
            for k, v in sorted(result.items())}
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(list(flat))
        w.writerow(list(flat.values()))
        return buf.getvalue()
    return "".join(f"{k}: {v}\n" for k, v in flat.items())


def _point_or_sample(args, g, scale):
    if args.point:
        tau = theta.load_point(args.point)
        if tau.g != g:
            raise ValidationError(f"expected a genus-{g} point, got genus {tau.g}")
        return tau
    return theta.random_point(g, np.random.default_rng(args.seed), scale=scale)


def _parse_char(text, g):
    try:
        e, ep = text.split(":")
        c = theta.Characteristic(tuple(int(x) for x in e), tuple(int(x) for x in ep))
    except ValueError:
        raise ValidationError(f"bad characteristic {text!r}; expected e.g. 010:110") from None
    if c.h != g:
        raise ValidationError(f"characteristic {text} does not match genus {g}")
    return c


# ---------------------------------------------------------------------------
# commands

LATTICES = {"E8+E8": lattice.gram_e8_e8, "D16+": lattice.gram_d16_plus}


def cmd_lattice_coeffs(args, cfg):
    g = args.genus
    if not 1 <= g <= 4:
        raise ValidationError("--genus must be in 1..4")
    md = cfg.max_diag if cfg.max_diag is not None else lattice.DEFAULT_MAX_DIAG[g]
    table = lattice.count_table({k: f() for k, f in LATTICES.items()}, g, max_diag=md)
    a, b = LATTICES
    if cfg.output_format == "csv":
        return table.to_csv(a, b)
    if cfg.output_format == "text":
        return table.to_text(a, b)
    rows = [{"T": flat, f"N_{a}": na, f"N_{b}": nb, "difference": d}
            for flat, na, nb, d in table.rows(a, b)]
    return {"genus": g, "max_diag": md, "rows": rows,
            "all_differences_zero": all(r["difference"] == 0 for r in rows)}


def cmd_lattice_witness(args, cfg):
    md = cfg.max_diag if cfg.max_diag is not None else 4
    found = lattice.separation_witness(lattice.gram_e8_e8(), lattice.gram_d16_plus(), max_diag=md)
    if found is None:
        return {"max_diag": md, "witness": None}
    T, n1, n2, checked = found
    return {"max_diag": md, "witness": np.asarray(T).tolist(), "trace": int(np.trace(T)),
            "N_E8+E8": n1, "N_D16+": n2, "difference": n1 - n2,
            "classes_checked": len(checked)}


def cmd_theta_eval(args, cfg):
    tau = _point_or_sample(args, args.genus if not args.point else theta.load_point(args.point).g,
                           GENUS3_IM_SCALE)
    chars = ([_parse_char(c, tau.g) for c in args.char] if args.char
             else theta.even_characteristics(tau.g))
    vals = theta.theta_constants(tau, chars, cfg.tol)
    return {"tau": tau.to_json(), "tol": cfg.tol,
            "values": {str(c): _cplx(v) for c, v in zip(chars, vals)}}


def _schottky_report(tau, tol):
    ev = schottky.evaluate_lattice(tau, tol)
    ft = schottky.F_theta(tau, tol)
    return {"tau": tau.to_json(), "F_lattice": _cplx(ev.value), "F_theta": _cplx(ft),
            "indicator": abs(ev.value) / ev.scale, "cutoff": ev.cutoff, "tol": tol}


def cmd_schottky_eval(args, cfg):
    return _schottky_report(_point_or_sample(args, 4, args.im_scale), cfg.tol)


def cmd_schottky_relation(args, cfg):
    if args.points < 1:
        raise ValidationError("--points must be positive")
    rng = np.random.default_rng(cfg.seed)
    res = []
    for _ in range(args.points):
        tau = theta.random_point(3, rng, scale=args.im_scale)
        res.append(schottky.relation_terms(tau, min(cfg.tol, 1e-12)).residual)
    return {"points": args.points, "seed": cfg.seed, "max_residual": max(res),
            "residuals": res}


def cmd_schottky_proportionality(args, cfg):
    if args.points < 1:
        raise ValidationError("--points must be positive")
    rng = np.random.default_rng(cfg.seed)
    pts = [theta.random_point(4, rng, scale=args.im_scale) for _ in range(args.points)]
    r = schottky.proportionality(pts, cfg.tol)
    return {"points": args.points, "seed": cfg.seed, "used": r.used,
            "constant": _cplx(r.constant), "max_rel_deviation": r.max_rel_deviation}


def cmd_jacobian_test(args, cfg):
    if args.curve:
        curve = hyperell.load_curve(args.curve)
    elif args.branch:
        try:
            pts = [float(x) for x in args.branch.split(",")]
        except ValueError:
            raise ValidationError("--branch must be comma-separated numbers") from None
        curve = hyperell.validate_curve(pts)
    else:
        raise ValidationError("give --curve FILE or --branch b1,b2,...")
    data = (hyperell.periods(curve, cfg.quad_order) if cfg.quad_order
            else hyperell.converged_periods(curve))
    sym, lam = hyperell.riemann_check(data.tau)
    tau = hyperell.point_from_periods(data)
    out = {"genus": curve.g, "branch": curve.branch.tolist(), "tau": tau.to_json(),
           "quad_order": data.quad_order, "quadrature_drift": data.drift,
           "symmetry_residual": sym, "min_eig_im": lam}
    if curve.g == 4:
        try:
            ev = schottky.evaluate_lattice(tau, cfg.tol)
        except CutoffInfeasibleError as exc:
            # the period data is still worth reporting; the exit code says the test did not run
            out.update(indicator=None, indicator_error=str(exc), tol=cfg.tol)
            raise _PartialResult(out, 3) from exc
        out.update(indicator=abs(ev.value) / ev.scale, cutoff=ev.cutoff, tol=cfg.tol)
    return out


def cmd_picard(args, cfg):
    space = args.space
    J = picard.class_of_schottky(space)
    F = picard.divisor_of_F(space)
    if cfg.output_format != "text":
        return {"space": space, "J": str(J), "div_F": str(F),
                "div_F_equals_8L": F == 8 * picard.L(space)}
    return f"J = {J}\ndiv F = {F}\n"


COMMANDS = {
    ("lattice", "coeffs"): cmd_lattice_coeffs,
    ("lattice", "witness"): cmd_lattice_witness,
    ("theta", "eval"): cmd_theta_eval,
    ("schottky", "eval"): cmd_schottky_eval,
    ("schottky", "relation"): cmd_schottky_relation,
    ("schottky", "proportionality"): cmd_schottky_proportionality,
    ("jacobian", "test"): cmd_jacobian_test,
    ("picard", None): cmd_picard,
}


def run(argv=None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        cfg = RunConfig(args.tol, args.max_diag, args.quad_order, args.seed, args.format)
        fn = COMMANDS[(args.group, getattr(args, "cmd", None))]
        code = 0
        try:
            result = fn(args, cfg)
        except _PartialResult as part:
            result, code = part.result, part.code
            stderr.write(f"resource error: {part}\n")
        text = _emit(result, cfg.output_format)
    except ValidationError as exc:
        stderr.write(f"validation error: {exc}\n")
        return 2
    except ResourceError as exc:
        stderr.write(f"resource error: {exc}\n")
        return 3
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        stdout.write(text)
    return code


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
