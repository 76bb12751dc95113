"""Command-line front end.  Every run writes one JSON record (schema 1).

Exit status: 0 success, 1 usage error, 2 precondition violation, 3 numerical failure.
"""
from __future__ import annotations

import argparse
import ast
import json
import math
import os
import re
import sys
import time
from dataclasses import asdict, dataclass, field, replace
from fractions import Fraction

import numpy as np

from . import __version__
from .errors import NumericalFailure, PreconditionError

SCHEMA = 1
CONFIG_ENV = "JWITNESS_CONFIG"

DEFAULT_TOLERANCES = {
    "boundary": 1e-12,   # Shilov membership
    "invert": 1e-9,      # relative residual of j-inversion
    "residual": 1e-8,    # witness residual threshold
    "quadratic": 1e-6,   # |a t^2 + b t + c| in is_quadratic
    "hodge": 1e-12,      # rational reconstruction gap
}


@dataclass
class RunConfig:
    M: int = 60
    tolerances: dict = field(default_factory=lambda: dict(DEFAULT_TOLERANCES))
    orbit_depth: int = 12
    height: int = 10
    coef_bound: int = 100
    output_path: str | None = None
    seed: int = 0
    ball_radius: float = 0.05
    denom_bound: int = 10**6

    def __post_init__(self):
        self.tolerances = {**DEFAULT_TOLERANCES, **self.tolerances}
        bad = [k for k, v in self.tolerances.items() if not float(v) > 0]
        if bad:
            raise PreconditionError(f"tolerances must be positive: {bad}")
        if self.M < 10:
            raise PreconditionError("truncation M must be >= 10")
        for name in ("orbit_depth", "height", "coef_bound"):
            if getattr(self, name) < 1:
                raise PreconditionError(f"{name} must be >= 1")

    @classmethod
    def load(cls, path: str | None) -> "RunConfig":
        if not path:
            return cls()
        try:
            with open(path, encoding="utf-8") as fh:
                data = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise PreconditionError(f"cannot read config {path}: {exc}") from exc
        unknown = set(data) - set(cls.__dataclass_fields__)
        if unknown:
            raise PreconditionError(f"unknown config keys {sorted(unknown)}")
        return cls(**data)


# --- input parsing ----------------------------------------------------------------

_BINOPS = {ast.Add: lambda a, b: a + b, ast.Sub: lambda a, b: a - b,
           ast.Mult: lambda a, b: a * b, ast.Div: lambda a, b: a / b}


def parse_number(text: str):
    """Exact-intent number: ``p/q`` -> Fraction, ``sqrt(k)`` for k <= 10^6, decimals,
    and complex literals written ``a+bi``.  Integers and ratios stay exact."""
    src = re.sub(r"(\d|\))\s*i\b", r"\1*1j", str(text).strip())
    src = re.sub(r"(?<![\w.])i\b", "1j", src)
    try:
        tree = ast.parse(src, mode="eval")
    except SyntaxError as exc:
        raise PreconditionError(f"cannot parse number {text!r}") from exc

    def ev(node):
        if isinstance(node, ast.Expression):
            return ev(node.body)
        if isinstance(node, ast.Constant) and isinstance(node.value, (int, float, complex)) and not isinstance(node.value, bool):
            return Fraction(node.value) if isinstance(node.value, int) else node.value
        if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
            v = ev(node.operand)
            return -v if isinstance(node.op, ast.USub) else v
        if isinstance(node, ast.BinOp) and type(node.op) in _BINOPS:
            a, b = ev(node.left), ev(node.right)
            if isinstance(node.op, ast.Div) and b == 0:
                raise PreconditionError(f"division by zero in {text!r}")
            if isinstance(a, Fraction) != isinstance(b, Fraction):
                a, b = (float(a) if isinstance(a, Fraction) else a), (float(b) if isinstance(b, Fraction) else b)
            return _BINOPS[type(node.op)](a, b)
        if isinstance(node, ast.Call) and isinstance(node.func, ast.Name) and node.func.id == "sqrt" and len(node.args) == 1:
            k = ev(node.args[0])
            if not (isinstance(k, Fraction) and k.denominator == 1 and 0 <= k <= 10**6):
                raise PreconditionError("sqrt(k) needs an integer 0 <= k <= 10^6")
            r = math.isqrt(int(k))
            return Fraction(r) if r * r == k else math.sqrt(int(k))
        raise PreconditionError(f"unsupported syntax in number {text!r}")

    return ev(tree)


def parse_complex(text: str) -> complex:
    return complex(parse_number(text))


def parse_real(text: str):
    v = parse_number(text)
    if isinstance(v, complex):
        if v.imag != 0:
            raise PreconditionError(f"{text!r} is not real")
        v = v.real
    return v


def parse_bivariate(text: str):
    """``P(z, w)`` from text such as ``"w - 1728"`` or ``"z*w - 1"`` (``i`` is sqrt(-1))."""
    import sympy
    from sympy.parsing.sympy_parser import convert_xor, standard_transformations

    from .witness import BivariatePolynomial

    z, w = sympy.symbols("z w")
    src = re.sub(r"(\d)\s*i\b", r"\1*I", text)
    src = re.sub(r"(?<![\w.])i\b", "I", src)
    try:
        expr = sympy.parse_expr(src, local_dict={"z": z, "w": w, "I": sympy.I, "sqrt": sympy.sqrt},
                                global_dict={"Integer": sympy.Integer, "Float": sympy.Float,
                                             "Rational": sympy.Rational, "Symbol": sympy.Symbol},
                                transformations=standard_transformations + (convert_xor,))
        poly = sympy.Poly(sympy.expand(expr), z, w)
    except Exception as exc:  # sympy raises a zoo of types on bad input
        raise PreconditionError(f"cannot parse polynomial {text!r}: {exc}") from exc
    return BivariatePolynomial({k: complex(v) for k, v in poly.terms()})


def parse_matrix(entries):
    from .modgroup import RealMatrix, UnimodularMatrix

    vals = [parse_real(e) for e in entries]
    if all(isinstance(v, Fraction) and v.denominator == 1 for v in vals):
        return UnimodularMatrix(*(int(v) for v in vals))
    return RealMatrix(*(float(v) for v in vals))


# --- output --------------------------------------------------------------------------

def _encode(x):
    """Plain-JSON view: complex -> {re, im}, Fraction -> "p/q", floats kept for formatting."""
    if isinstance(x, dict):
        return {str(k): _encode(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_encode(v) for v in x]
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, Fraction):
        return str(x)
    if isinstance(x, (complex, np.complexfloating)):
        return {"re": _encode(float(x.real)), "im": _encode(float(x.imag))}
    if isinstance(x, (float, np.floating)):
        x = float(x)
        return _Float(x) if math.isfinite(x) else str(x)
    if x is None or isinstance(x, str):
        return x
    return str(x)


class _Float(float):
    pass


def dumps(record: dict) -> str:
    """JSON text with every finite real printed to 17 significant digits."""
    floats = []

    def sub(x):
        if isinstance(x, _Float):
            floats.append(format(float(x), ".17g"))
            return f"@@F{len(floats) - 1}@@"
        if isinstance(x, dict):
            return {k: sub(v) for k, v in x.items()}
        if isinstance(x, list):
            return [sub(v) for v in x]
        return x

    text = json.dumps(sub(_encode(record)), ensure_ascii=True)
    return re.sub(r'"@@F(\d+)@@"', lambda m: floats[int(m.group(1))], text) + "\n"


# --- commands -------------------------------------------------------------------------

def cmd_metric(args, cfg):
    from .geometry import as_disk_point, bergman_distance, caratheodory_extremal, disk_distance

    z = as_disk_point([parse_complex(v) for v in args.z])
    w = as_disk_point([parse_complex(v) for v in args.w])
    if z.n != w.n:
        raise PreconditionError("z and w must have the same dimension")
    inputs = {"z": list(z.coords), "w": list(w.coords)}
    out = {
        "bergman_distance": bergman_distance(z, w),
        "coordinate_distances": [disk_distance(a, b) for a, b in zip(z.coords, w.coords)],
    }
    cert = {}
    if z != w:
        f = caratheodory_extremal(z, w)
        fz, fw = f(z), f(w)
        out["caratheodory"] = {"direction": list(f.direction), "radius": f.radius,
                               "f_z": fz, "f_w": fw, "disk_distance_f": disk_distance(fz, fw)}
        cert["contraction_holds"] = disk_distance(fz, fw) <= out["bergman_distance"] * (1 + 1e-12)
    return inputs, out, cert, {}


def cmd_shilov_check(args, cfg):
    from .geometry import max_modulus_spotcheck, monomials, shilov_membership

    tol = cfg.tolerances["boundary"]
    inputs, out, cert = {}, {}, {}
    if args.point:
        p = [parse_complex(v) for v in args.point]
        inputs["point"] = p
        out["on_shilov_boundary"] = shilov_membership(p, tol)
    if args.n:
        rng = np.random.default_rng(cfg.seed)
        exps = monomials(args.n, args.degree)
        coeffs = {e: complex(*rng.normal(size=2)) for e in exps}
        closure_max, shilov_max = max_modulus_spotcheck(coeffs, args.samples, cfg.seed)
        inputs.update(n=args.n, degree=args.degree, samples=args.samples)
        out["closure_max"] = closure_max
        out["shilov_max"] = shilov_max
        cert["maximum_on_shilov"] = closure_max <= shilov_max * (1 + 1e-12)
    if not inputs:
        raise PreconditionError("give --point and/or --n")
    return inputs, out, cert, {"boundary": tol}


def cmd_orbit(args, cfg):
    from .geometry import INF
    from .modgroup import orbit_toward

    target = INF if args.target.strip().lower() in ("inf", "oo", "infinity") else parse_real(args.target)
    base = parse_complex(args.base)
    depth = args.depth or cfg.orbit_depth
    seq = orbit_toward(target, base, depth)
    errs = seq.errors()
    out = {"kind": seq.kind, "truncated": seq.truncated, "warning": seq.warning,
           "steps": [{"k": k, "matrix": list(m.entries), "point": z, "error": e}
                     for k, (m, z, e) in enumerate(zip(seq.matrices, seq.points, errs), start=1)]}
    return {"target": args.target, "base": base, "depth": depth}, out, {}, {}


def _evaluator(cfg, dps=None):
    from .modular import ModularEvaluator

    return ModularEvaluator(cfg.M, dps=dps)


def cmd_jeval(args, cfg):
    from .modgroup import reduce_to_fundamental_domain

    z = parse_complex(args.z)
    ev = _evaluator(cfg, args.dps)
    jz, dj = ev.j_and_derivative(z)
    zr, gamma = reduce_to_fundamental_domain(z)
    out = {"j": complex(jz), "j_derivative": complex(dj), "reduced": complex(zr), "gamma": list(gamma.entries)}
    return {"z": z, "M": cfg.M, "dps": args.dps}, out, {}, {"truncation_bound": ev.truncation_bound()}


def cmd_jinv(args, cfg):
    c = parse_complex(args.c)
    ev = _evaluator(cfg)
    tol = cfg.tolerances["invert"]
    z = ev.invert(c, tol)
    res = abs(ev.j(z) - c)
    return {"c": c}, {"z": z}, {"residual": res, "relative_residual": res / max(1.0, abs(c))}, {"invert": tol}


def _witness_record(w):
    c = w.certificate
    return {"target": w.target, "orbit_index": w.orbit_index, "z": w.z, "jz": w.jz, "residual": w.residual,
            "multiplicity": w.multiplicity,
            "certificate": {"center": c.center, "radius": c.radius, "zero_count": c.zero_count,
                            "base_center": c.base_center, "base_radius": c.base_radius, "matrix": list(c.matrix)}}


def _info_record(info):
    return {k: v for k, v in info.items()}


def cmd_witness(args, cfg):
    from .witness import EXP, WitnessProblem, find_witnesses, rouche_localize

    targets = [parse_real(t) for t in args.targets]
    depth = args.depth or cfg.orbit_depth
    ev = _evaluator(cfg)
    tol = cfg.tolerances["residual"]
    if args.rhs == "exp":
        if args.poly:
            raise PreconditionError("give either --poly or --rhs, not both")
        ws, diags, info = [], [], {}
        for x0 in targets:
            res = rouche_localize(WitnessProblem(EXP, x0, args.count, cfg.ball_radius, depth), ev, tol)
            ws.extend(res)
            diags.extend(f"target {x0}: {d}" for d in res.diagnostics)
            info[str(x0)] = res.info
        equation = "j(z) = exp(z)"
    else:
        if not args.poly:
            raise PreconditionError("give --poly or --rhs exp")
        P = parse_bivariate(args.poly)
        res = find_witnesses(P, targets, args.count, cfg.ball_radius, depth, args.branch, ev)
        ws, diags, info = list(res), res.diagnostics, res.info
        equation = f"P(z, j(z)) = 0 with P = {args.poly}"
    inputs = {"equation": equation, "targets": targets, "count": args.count, "orbit_depth": depth,
              "ball_radius": cfg.ball_radius, "branch": args.branch}
    out = {"witnesses": [_witness_record(w) for w in ws], "found": len(ws)}
    cert = {"diagnostics": list(diags), "localization": {k: _info_record(v) for k, v in info.items()}}
    return inputs, out, cert, {"residual": tol}


def cmd_product_density(args, cfg):
    from .modgroup import UnimodularMatrix
    from .product import density_search, planted_target

    g = parse_matrix(args.g)
    ev = _evaluator(cfg)
    c1 = parse_complex(args.c1)
    height = args.height or cfg.height
    inputs = {"g": list(g.entries), "c1": c1, "height": height}
    if args.plant:
        gamma = UnimodularMatrix(*(int(parse_real(v)) for v in args.plant))
        c2 = planted_target(g, gamma, c1, ev)
        inputs["plant"] = list(gamma.entries)
    elif args.c2 is not None:
        c2 = parse_complex(args.c2)
    else:
        raise PreconditionError("give --c2 or --plant")
    inputs["c2"] = c2
    r = density_search(g, c1, c2, height, ev, cfg.denom_bound, cfg.tolerances["hodge"])
    out = {"tau": r.tau, "tau0": r.tau0, "gamma": list(r.gamma.entries), "err1": r.err1, "err2": r.err2,
           "candidates": r.candidates}
    cert = {"hodge_generic": r.hodge.generic, "hodge_diagnostics": list(r.hodge.diagnostics)}
    return inputs, out, cert, {"hodge": cfg.tolerances["hodge"], "denom_bound": cfg.denom_bound}


def _profile(spec: str, n: int):
    from .product import SplitProfile

    if spec == "full":
        return SplitProfile.full(n)
    if spec == "point":
        return SplitProfile.point(n)
    if spec == "generic-hyperplane":
        return SplitProfile.generic_hyperplane(n)
    m = re.fullmatch(r"hyperplane:(\d+)", spec)
    if m:
        return SplitProfile.coordinate_hyperplane(n, int(m.group(1)))
    raise PreconditionError(f"unknown profile {spec!r} (full, point, generic-hyperplane, hyperplane:i)")


def cmd_broad_check(args, cfg):
    from .product import MoebiusVariety, is_broad, is_hodge_generic

    rels = [(int(r[0]), int(r[1]), parse_matrix(r[2:])) for r in (args.relation or [])]
    consts = [(int(c[0]), parse_complex(c[1])) for c in (args.constant or [])]
    L = MoebiusVariety(args.n, rels, consts)
    prof = _profile(args.profile, args.n)
    br = is_broad(L, prof)
    hg = is_hodge_generic(L, cfg.denom_bound, cfg.tolerances["hodge"])
    inputs = {"n": args.n, "relations": [[i, j, list(g.entries)] for i, j, g in rels],
              "constants": [[i, c] for i, c in consts], "profile": args.profile}
    out = {"broad": br.broad, "failing_subset": list(br.failing_subset) if br.failing_subset else None,
           "dimension": L.dimension, "hodge_generic": hg.generic}
    return inputs, out, {"hodge_diagnostics": list(hg.diagnostics)}, {"hodge": cfg.tolerances["hodge"]}


def cmd_special(args, cfg):
    from .special import is_quadratic

    tol = cfg.tolerances["quadratic"]
    B = args.coef_bound or cfg.coef_bound
    flags = [is_quadratic(parse_complex(t), B, tol) for t in args.tau]
    out = {"flags": [{"point": f.point, "form": [f.form.a, f.form.b, f.form.c] if f.form else None,
                      "discriminant": f.form.discriminant if f.form else None,
                      "certified": f.certified, "residual": f.residual} for f in flags],
           "flagged": sum(f.special for f in flags)}
    return {"tau": args.tau, "coef_bound": B}, out, {}, {"quadratic": tol}


def cmd_classpoly(args, cfg):
    from .special import class_polynomial

    H = class_polynomial(args.D, M=args.M_series, dps=args.dps)
    out = {"coefficients": list(H.coefficients), "degree": H.degree, "polynomial": str(H),
           "forms": [[f.a, f.b, f.c] for f in H.forms], "class_number": len(H.forms)}
    return {"D": args.D}, out, {"rounding_gap": H.rounding_gap}, {"dps": H.dps, "M": H.M}


def cmd_selftest(args, cfg):
    from .geometry import disk_automorphism, disk_distance
    from .modular import RHO
    from .special import class_polynomial
    from .witness import zero_count

    ev = _evaluator(cfg)
    rng = np.random.default_rng(cfg.seed)
    checks = {}
    checks["j(i)=1728"] = abs(ev.j(1j) - 1728) < 1e-9
    checks["j(rho)=0"] = abs(ev.j(RHO)) < 1e-9
    checks["j(2i)~287496"] = abs(ev.j(2j) - 287496) / 287496 < 1e-6
    checks["classpoly(-4)"] = class_polynomial(-4).coefficients == (-1728, 1)
    checks["zero_count(z)"] = zero_count(lambda z: z, 0, 1, lambda z: 1) == 1
    worst = 0.0
    for _ in range(50):
        z, w, a = (complex(*rng.uniform(-0.6, 0.6, 2)) for _ in range(3))
        phi = disk_automorphism(a, float(rng.uniform(0, 2 * math.pi)))
        worst = max(worst, abs(disk_distance(phi(z), phi(w)) - disk_distance(z, w)))
    checks["bergman_invariance"] = worst < 1e-10
    failed = [k for k, v in checks.items() if not v]
    if failed:
        raise NumericalFailure(f"selftest failed: {failed}")
    return {}, {"checks": checks}, {"all_passed": True}, {}


COMMANDS = {
    "metric": cmd_metric, "shilov-check": cmd_shilov_check, "orbit": cmd_orbit, "jeval": cmd_jeval,
    "jinv": cmd_jinv, "witness": cmd_witness, "product-density": cmd_product_density,
    "broad-check": cmd_broad_check, "special": cmd_special, "classpoly": cmd_classpoly, "selftest": cmd_selftest,
}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help=f"JSON config file (default: ${CONFIG_ENV})")
    common.add_argument("-o", "--output", help="result file (default: stdout)")
    common.add_argument("--seed", type=int)
    common.add_argument("--M", type=int, help="q-series truncation")
    common.add_argument("--tol", action="append", metavar="NAME=VALUE", help="override a named tolerance")

    ap = _Parser(prog="jwitness", description="Certified witnesses for equations involving the j-function.")
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("metric", parents=[common], help="Bergman distance and Carathéodory functional on the polydisk")
    p.add_argument("--z", nargs="+", required=True)
    p.add_argument("--w", nargs="+", required=True)

    p = sub.add_parser("shilov-check", parents=[common], help="Shilov-boundary membership and max-modulus spot check")
    p.add_argument("--point", nargs="+")
    p.add_argument("--n", type=int)
    p.add_argument("--degree", type=int, default=3)
    p.add_argument("--samples", type=int, default=2000)

    p = sub.add_parser("orbit", parents=[common], help="SL2(Z) orbit accumulating at a boundary point")
    p.add_argument("--target", required=True, help="p/q, decimal, sqrt(k) expression, or inf")
    p.add_argument("--base", default="2i")
    p.add_argument("--depth", type=int)

    p = sub.add_parser("jeval", parents=[common], help="evaluate j and j'")
    p.add_argument("--z", required=True)
    p.add_argument("--dps", type=int, help="mpmath precision (default: double)")

    p = sub.add_parser("jinv", parents=[common], help="solve j(z) = c in the fundamental domain")
    p.add_argument("--c", required=True)

    p = sub.add_parser("witness", parents=[common], help="certified solutions near boundary targets")
    p.add_argument("--poly", help='P(z, w), e.g. "w - z"')
    p.add_argument("--rhs", choices=["exp"], help="transcendental right-hand side j(z) = p(z)")
    p.add_argument("--targets", nargs="+", required=True)
    p.add_argument("--count", type=int, default=3)
    p.add_argument("--branch", type=int)
    p.add_argument("--depth", type=int)

    p = sub.add_parser("product-density", parents=[common], help="search tau with (j(tau), j(g tau)) near (c1, c2)")
    p.add_argument("--g", nargs=4, required=True, metavar=("A", "B", "C", "D"))
    p.add_argument("--c1", required=True)
    p.add_argument("--c2")
    p.add_argument("--plant", nargs=4, metavar=("A", "B", "C", "D"), help="plant c2 = j(g gamma tau0)")
    p.add_argument("--height", type=int)

    p = sub.add_parser("broad-check", parents=[common], help="broadness and Hodge-genericity of a Möbius variety")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--relation", nargs=6, action="append", metavar=("I", "J", "A", "B", "C", "D"),
                   help="x_I = g x_J (0-based)")
    p.add_argument("--constant", nargs=2, action="append", metavar=("I", "Z"))
    p.add_argument("--profile", default="full")

    p = sub.add_parser("special", parents=[common], help="quadratic-point detection")
    p.add_argument("--tau", nargs="+", required=True)
    p.add_argument("--coef-bound", type=int)

    p = sub.add_parser("classpoly", parents=[common], help="Hilbert class polynomial H_D")
    p.add_argument("--D", type=int, required=True)
    p.add_argument("--dps", type=int)
    p.add_argument("--M-series", type=int, help="override the q-truncation used for H_D")

    sub.add_parser("selftest", parents=[common], help="quick numerical self checks")
    return ap


def make_config(args) -> RunConfig:
    cfg = RunConfig.load(args.config or os.environ.get(CONFIG_ENV))
    changes = {}
    if args.seed is not None:
        changes["seed"] = args.seed
    if args.M is not None:
        changes["M"] = args.M
    if args.output:
        changes["output_path"] = args.output
    tols = dict(cfg.tolerances)
    for item in args.tol or []:
        name, _, value = item.partition("=")
        if name not in tols:
            raise PreconditionError(f"unknown tolerance {name!r}")
        tols[name] = float(value)
    changes["tolerances"] = tols
    return replace(cfg, **changes)


def run(command: str, args, cfg: RunConfig | None = None) -> tuple:
    """Execute a command; returns ``(exit_status, record)``."""
    t0 = time.perf_counter()
    record = {"schema": SCHEMA, "command": command, "version": __version__}
    try:
        cfg = cfg or make_config(args)
        # where the record goes is not part of the computation
        record["config"] = {k: v for k, v in asdict(cfg).items() if k != "output_path"}
        inputs, outputs, certs, tol_ctx = COMMANDS[command](args, cfg)
        record.update(status="ok", inputs=inputs, outputs=outputs, certificates=certs, tolerances=tol_ctx)
        code = 0
    except PreconditionError as exc:
        record.update(status="precondition_error", error=str(exc))
        code = 2
    except NumericalFailure as exc:
        record.update(status="numerical_failure", error=f"{type(exc).__name__}: {exc}")
        code = 3
    record["timings_ms"] = {"total": (time.perf_counter() - t0) * 1e3}
    return code, record


def _configured_output(args):
    try:
        return make_config(args).output_path
    except PreconditionError:
        return None


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    code, record = run(args.command, args)
    text = dumps(record)
    path = args.output or _configured_output(args)
    if path:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    if code:
        print(f"jwitness {args.command}: {record.get('error')}", file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
