"""Command-line experiments for relative metrics.

Each subcommand writes one artifact (csv, json or svg) to ``--out`` or
stdout. Exit status is 0 on success, 1 on invalid input and 2 when a
triangle campaign finds a violation. Column and field names are listed in
the packaged ``schema.json``.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from typing import Optional, Sequence

import numpy as np

from . import balls, hyperbolic, quasiconvexity, quasihyperbolic, relative
from .fuzz import DEFAULT_RTOL
from .weights import ExpressionError, WeightFunction

EXIT_OK, EXIT_INVALID, EXIT_VIOLATION = 0, 1, 2


class InvalidInput(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INVALID, f"{self.prog}: error: {message}\n")


def _jsonable(v):
    if isinstance(v, dict):
        return {str(k): _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    if isinstance(v, np.ndarray):
        return _jsonable(v.tolist())
    if isinstance(v, (np.bool_, bool)):
        return bool(v)
    if isinstance(v, (np.integer, int)):
        return int(v)
    if isinstance(v, (np.floating, float)):
        v = float(v)
        return v if math.isfinite(v) else ("nan" if math.isnan(v) else ("inf" if v > 0 else "-inf"))
    return v


def dumps_json(obj) -> str:
    return json.dumps(_jsonable(obj), sort_keys=True, indent=2) + "\n"


def dumps_csv(header: Sequence[str], rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([repr(float(v)) if isinstance(v, (float, np.floating)) else v for v in row])
    return buf.getvalue()


def dumps_svg(polylines, title: str, width: int = 480, height: int = 480) -> str:
    """Polylines of (x, y) arrays scaled into a square plot with labelled axes."""
    finite = [p[np.all(np.isfinite(p), axis=1)] for p in polylines]
    allp = np.vstack([p for p in finite if p.size] or [np.zeros((1, 2))])
    lo, hi = allp.min(axis=0), allp.max(axis=0)
    span = float(max(hi - lo)) or 1.0
    pad = 40

    def tx(p):
        u = pad + (p[:, 0] - lo[0]) / span * (width - 2 * pad)
        v = height - pad - (p[:, 1] - lo[1]) / span * (height - 2 * pad)
        return " ".join(f"{a:.3f},{b:.3f}" for a, b in zip(u, v))

    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}">',
           f'<text x="{pad}" y="20">{title}</text>',
           f'<line x1="{pad}" y1="{height - pad}" x2="{width - pad}" y2="{height - pad}" stroke="black"/>',
           f'<line x1="{pad}" y1="{pad}" x2="{pad}" y2="{height - pad}" stroke="black"/>',
           f'<text x="{pad}" y="{height - 10}">x: {lo[0]:.4g} .. {lo[0] + span:.4g}</text>',
           f'<text x="{width - 200}" y="{height - 10}">y: {lo[1]:.4g} .. {lo[1] + span:.4g}</text>']
    for p in finite:
        if p.shape[0] >= 2:
            out.append(f'<polyline fill="none" stroke="black" points="{tx(p)}"/>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def _floats(text: Optional[str], name: str) -> np.ndarray:
    if text is None:
        raise InvalidInput(f"--{name} is required")
    try:
        return np.array([float(v) for v in text.split(",")])
    except ValueError:
        raise InvalidInput(f"--{name} must be a comma-separated list of numbers") from None


def _weight(args) -> tuple[WeightFunction, str]:
    if args.weight:
        return WeightFunction.from_expression(args.weight), args.weight
    if args.p is None or args.q is None:
        raise InvalidInput("give --weight or both --p and --q")
    p, q = float(args.p), float(args.q)
    if not (p > 0 and q >= 0):
        raise InvalidInput("need p > 0 and q >= 0")
    return WeightFunction.pq(p, q), f"pq({p:g},{q:g})"


def _require_format(args, allowed):
    if args.format not in allowed:
        raise InvalidInput(f"{args.command} supports --format {'/'.join(allowed)}")


# ---------------------------------------------------------------------------
# subcommands


def cmd_metric_check(args) -> tuple[str, int]:
    _require_format(args, ("json", "csv"))
    M, label = _weight(args)
    n = args.samples or 100_000
    space = relative.metric_fuzz(M, args.dim, n, args.seed)
    line = relative.metric_on_line_fuzz(M, n, args.seed)
    metric = None
    if args.p is not None and args.q is not None and not args.weight:
        metric = relative.pq_is_metric(float(args.p), float(args.q))
    violated = space.violated() or line.violated()
    res = {"weight": label, "metric": metric, "dim": args.dim,
           "fuzz": space.to_dict(), "line_fuzz": line.to_dict(), "violation_found": violated}
    if args.format == "csv":
        body = dumps_csv(["weight", "metric", "dim", "samples", "seed", "worst_relative", "line_worst_relative"],
                         [[label, metric, args.dim, n, args.seed, space.worst_relative, line.worst_relative]])
    else:
        body = dumps_json(res)
    return body, EXIT_VIOLATION if violated else EXIT_OK


def cmd_quasiconvexity(args) -> tuple[str, int]:
    _require_format(args, ("json", "csv"))
    rows = []
    if args.weight:
        if args.alpha is None:
            raise InvalidInput("--weight needs --alpha (the quasimean exponent)")
        M = WeightFunction.from_expression(args.weight)
        e = quasiconvexity.c_M_estimate(M, float(args.alpha))
        rows.append({"weight": args.weight, "p": None, "q": float(args.alpha), "lower": e.lower_bound,
                     "estimate": e.c_estimate, "upper": e.upper_bound, "converged": e.converged})
    else:
        ps, qs = _floats(args.p, "p"), _floats(args.q, "q")
        for p in ps:
            for q in qs:
                if not relative.pq_is_metric(p, q) or q == 0:
                    raise InvalidInput(f"(p, q) = ({p:g}, {q:g}) must give a metric with q > 0")
                e = quasiconvexity.c_M_homogeneous(quasiconvexity.normalized_pq_weight(p, q), q)
                lo, hi = quasiconvexity.c_pq_bounds(p, q) if q < 1 else (math.inf, math.inf)
                rows.append({"weight": f"pq({p:g},{q:g})", "p": p, "q": q, "lower": lo,
                             "estimate": e.c_estimate, "upper": hi, "converged": e.converged})
    if args.format == "csv":
        cols = ["weight", "p", "q", "lower", "estimate", "upper", "converged"]
        return dumps_csv(cols, [[r[c] for c in cols] for r in rows]), EXIT_OK
    return dumps_json({"rows": rows}), EXIT_OK


def cmd_geodesic(args) -> tuple[str, int]:
    if args.alpha is None:
        raise InvalidInput("--alpha is required")
    alpha = float(args.alpha)
    x, y = _floats(args.x, "x"), _floats(args.y, "y")
    if x.size != y.size or x.size < 2:
        raise InvalidInput("--x and --y must be points of the same dimension >= 2")
    g = quasihyperbolic.geodesic(alpha, x, y)
    n = args.samples or 257
    theta, radius, pts = g.sample(max(n, 2))
    closed = float(quasihyperbolic.k_alpha(alpha, x, y))
    integrated = quasihyperbolic.path_length(alpha, g.sample(4097)[2])
    if args.format == "csv":
        header = ["theta", "radius"] + [f"x{i + 1}" for i in range(x.size)]
        return dumps_csv(header, [[t, r, *p] for t, r, p in zip(theta, radius, pts)]), EXIT_OK
    if args.format == "svg":
        plane = np.column_stack([pts @ g.frame[0], pts @ g.frame[1]])
        return dumps_svg([plane], f"k_alpha geodesic, alpha={alpha:g}"), EXIT_OK
    res = {"alpha": alpha, "x": x, "y": y, "k_alpha": closed, "integrated_length": integrated,
           "abs_difference": abs(closed - integrated), "c1": g.c1, "c2": g.c2, "radial": g.radial}
    return dumps_json(res), EXIT_OK


def cmd_ball(args) -> tuple[str, int]:
    M, label = _weight(args)
    z = _floats(args.z or "1,0", "z")
    if args.r is None:
        r = balls.small_radius(M, z)
    else:
        r = float(args.r)
    tr = balls.trace_sphere(M, z, r, args.angles)
    corners = balls.find_corners(tr)
    bounded = bool(np.all(np.isfinite(tr.s_values)))
    convex = balls.convexity_check(tr).convex if bounded else None
    if args.format == "csv":
        return dumps_csv(["theta", "s", "x", "y"], tr.rows()), EXIT_OK
    if args.format == "svg":
        return dumps_svg([tr.plane_coords()], f"{label} sphere, r={r:g}"), EXIT_OK
    res = {"weight": label, "z": z, "r": r, "angles": args.angles, "bounded": bounded, "convex": convex,
           "residual": tr.residual,
           "corners": [{"theta": c.theta, "slope_left": c.slope_left, "slope_right": c.slope_right}
                       for c in corners]}
    return dumps_json(res), EXIT_OK


def cmd_hyperbolic(args) -> tuple[str, int]:
    _require_format(args, ("json",))
    n = args.samples or 10
    res = {"samples": n, "seed": args.seed}
    if args.domain:
        try:
            G = hyperbolic.DomainSpec.from_json(args.domain)
        except (OSError, KeyError, TypeError, json.JSONDecodeError) as exc:
            raise InvalidInput(f"cannot read domain: {exc}") from None
        x, y = _floats(args.x, "x"), _floats(args.y, "y")
        res["domain"] = G.kind
        res["rho_G"] = hyperbolic.rho_G(G, x, y)
        res["seittenranta_min"] = hyperbolic.seittenranta(-np.inf, G, x, y)
    else:
        res["properties"] = hyperbolic.rho_G_properties_test(n, args.seed)
        mob = hyperbolic.mobius_invariance_test(lambda t: np.sqrt(1 - t * t), n, args.seed)
        res["sqrt_one_minus_x2_invariant"] = mob.ok
        euc = hyperbolic.mobius_invariance_test(lambda t: np.ones_like(t), n, args.seed)
        res["constant_one_invariant"] = euc.ok
        res["constant_one_witness"] = euc.witness
    return dumps_json(res), EXIT_OK


def cmd_fuzz(args) -> tuple[str, int]:
    _require_format(args, ("json", "csv"))
    M, label = _weight(args)
    n = args.samples or 100_000
    rep = relative.metric_fuzz(M, args.dim, n, args.seed)
    code = EXIT_VIOLATION if rep.violated(DEFAULT_RTOL) else EXIT_OK
    if args.format == "csv":
        w = rep.to_dict()["witness"]
        return dumps_csv(["weight", "dim", "samples", "seed", "worst_violation", "worst_relative", "witness"],
                         [[label, args.dim, n, args.seed, rep.worst_violation, rep.worst_relative,
                           json.dumps(w)]]), code
    return dumps_json({"weight": label, "dim": args.dim, **rep.to_dict()}), code


COMMANDS = {
    "metric-check": cmd_metric_check,
    "quasiconvexity": cmd_quasiconvexity,
    "geodesic": cmd_geodesic,
    "ball": cmd_ball,
    "hyperbolic": cmd_hyperbolic,
    "fuzz": cmd_fuzz,
}


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="relmetric", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for name in COMMANDS:
        sp = sub.add_parser(name)
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--samples", type=int, default=None)
        sp.add_argument("--out", default=None, help="output path (default stdout)")
        sp.add_argument("--format", choices=("csv", "json", "svg"), default="json")
        sp.add_argument("--p", default=None, help="power-mean exponent (comma list for quasiconvexity)")
        sp.add_argument("--q", default=None)
        sp.add_argument("--alpha", default=None)
        sp.add_argument("--weight", default=None, help='weight expression, e.g. "max(x, y)^0.5"')
        sp.add_argument("--domain", default=None, help="JSON domain description")
        sp.add_argument("--x", default=None, help='point, e.g. "2,0"')
        sp.add_argument("--y", default=None)
        sp.add_argument("--z", default=None, help="ball center")
        sp.add_argument("--r", default=None, help="ball radius")
        sp.add_argument("--angles", type=int, default=1024)
        sp.add_argument("--dim", type=int, default=3)
    return ap


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    if args.samples is not None and args.samples < 1:
        print("relmetric: --samples must be positive", file=sys.stderr)
        return EXIT_INVALID
    try:
        body, code = COMMANDS[args.command](args)
    except (InvalidInput, ExpressionError, ValueError) as exc:
        print(f"relmetric: {exc}", file=sys.stderr)
        return EXIT_INVALID
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(body)
    else:
        sys.stdout.write(body)
    return code


if __name__ == "__main__":
    sys.exit(main())
