"""Command-line front end.

    wishart-moments moment --flavor real --p 6 --expr "w[1,2] w[3,4] w[5,6]" --symbolic
    wishart-moments count f --l 1 --m 1 --n 1
    wishart-moments poly phi --m 1 --n 1
    wishart-moments closed kibble --b 2 --c 1
    wishart-moments validate --expr "w[1,1]^2" --params p.json --samples 100000 --seed 7 --fd

Results go to stdout, diagnostics to stderr.  Exit status is 0 on success,
1 when a validation report fails, 2 on usage or input errors.
"""

from __future__ import annotations

import argparse
import json
import os
import re
import sys
from pathlib import Path

import numpy as np

from . import closed_forms as cf
from . import combinatorics as cb
from .engine import COMPLEX, FLAVORS, MomentSpec, WishartParams, evaluate, expand_moment
from .errors import (
    ExpressionSyntaxError,
    IndexOutOfRange,
    SchemaError,
    WishartMomentsError,
)
from .polynomial import MultiPoly
from .validation import SimulationConfig, cross_check

THREADS_ENV = "WISHART_MOMENTS_THREADS"

_TOKEN = re.compile(
    r"\s*(?:(?P<factor>w\s*\[\s*(?P<a>\d+)\s*,\s*(?P<b>\d+)\s*\])(?:\s*\^\s*(?P<k>\d+))?|(?P<star>\*))"
)


def parse_moment_expression(text: str, p: int, flavor: str) -> MomentSpec:
    """Parse ``w[a,b]`` factors joined by ``*`` or whitespace, each with an
    optional ``^k`` power, into a flattened ``MomentSpec``."""
    if flavor not in FLAVORS:
        raise ValueError(f"unknown flavor {flavor!r}")
    factors = []
    pos = 0
    expect_factor = True
    while True:
        rest = text[pos:]
        if not rest.strip():
            break
        m = _TOKEN.match(text, pos)
        if m is None:
            bad = pos + len(rest) - len(rest.lstrip())
            raise ExpressionSyntaxError(f"unexpected input {text[bad:bad + 8]!r}", bad)
        if m.group("star"):
            if expect_factor:
                raise ExpressionSyntaxError("'*' must follow a factor", m.start("star"))
            expect_factor = True
        else:
            a, b = int(m.group("a")), int(m.group("b"))
            for idx, grp in ((a, "a"), (b, "b")):
                if not 1 <= idx <= p:
                    raise IndexOutOfRange(f"index {idx} at position {m.start(grp)} outside 1..{p}")
            k = int(m.group("k")) if m.group("k") is not None else 1
            factors.extend([(a, b)] * k)
            expect_factor = False
        pos = m.end()
    if expect_factor and factors:
        raise ExpressionSyntaxError("expression ends with '*'", len(text))
    if not factors:
        raise ExpressionSyntaxError("empty expression", 0)
    return MomentSpec(flavor, p, tuple(factors))


def _entry(x, is_complex, where):
    if isinstance(x, bool):
        raise SchemaError(f"{where}: expected a number")
    if isinstance(x, (int, float)):
        return complex(x) if is_complex else float(x)
    if is_complex and isinstance(x, list) and len(x) == 2 and all(
        isinstance(v, (int, float)) and not isinstance(v, bool) for v in x
    ):
        return complex(x[0], x[1])
    raise SchemaError(f"{where}: expected {'a number or [re, im]' if is_complex else 'a number'}")


def _matrix(obj, is_complex, name, p=None):
    if not isinstance(obj, list) or not obj or not all(isinstance(r, list) for r in obj):
        raise SchemaError(f"{name} must be a non-empty list of rows")
    size = len(obj)
    if any(len(r) != size for r in obj):
        raise SchemaError(f"{name} must be square")
    if p is not None and size != p:
        raise SchemaError(f"{name} must be {p}x{p}")
    return np.array(
        [[_entry(x, is_complex, f"{name}[{i}][{j}]") for j, x in enumerate(r)] for i, r in enumerate(obj)],
        dtype=complex if is_complex else float,
    )


def read_params_document(path) -> tuple[WishartParams, list | None]:
    """Parse a parameter file into ``WishartParams`` plus optional mean vectors."""
    try:
        doc = json.loads(Path(path).read_text())
    except OSError as exc:
        raise OSError(f"cannot read {path}: {exc.strerror or exc}") from exc
    except json.JSONDecodeError as exc:
        raise SchemaError(f"{path}: invalid JSON ({exc})") from exc
    if not isinstance(doc, dict):
        raise SchemaError("parameter file must hold a JSON object")
    flavor = doc.get("flavor")
    if flavor not in FLAVORS:
        raise SchemaError(f"'flavor' must be one of {FLAVORS}")
    nu = doc.get("nu")
    if isinstance(nu, bool) or not isinstance(nu, (int, float)):
        raise SchemaError("'nu' must be a number")
    if "sigma" not in doc:
        raise SchemaError("'sigma' is required")
    is_complex = flavor == COMPLEX
    sigma = _matrix(doc["sigma"], is_complex, "sigma")
    p = sigma.shape[0]
    delta = _matrix(doc["delta"], is_complex, "delta", p) if "delta" in doc else np.zeros_like(sigma)
    means = None
    if "mean_vectors" in doc:
        mv = doc["mean_vectors"]
        if not isinstance(mv, list) or not all(isinstance(r, list) and len(r) == p for r in mv):
            raise SchemaError("'mean_vectors' must be a list of length-p vectors")
        means = [[_entry(x, is_complex, "mean_vectors") for x in r] for r in mv]
    return WishartParams(flavor, nu, sigma, delta), means


def load_params(path) -> WishartParams:
    return read_params_document(path)[0]


# -- output helpers ------------------------------------------------------------


def _multipoly_json(poly: MultiPoly) -> dict:
    return {
        "variables": list(poly.variables),
        "terms": [{"exponents": list(e), "coeff": str(c)} for e, c in poly.items()],
    }


def _multipoly_text(poly: MultiPoly) -> str:
    if poly.is_zero():
        return "0"
    out = []
    for exps, c in sorted(poly.items(), key=lambda kv: tuple(-e for e in kv[0])):
        mono = "*".join(v if e == 1 else f"{v}^{e}" for v, e in zip(poly.variables, exps) if e)
        out.append(mono if c == 1 and mono else (f"{c}*{mono}" if mono else str(c)))
    return " + ".join(out)


def _scalar_json(value) -> dict:
    if isinstance(value, complex):
        return {"value": value.real, "imag": value.imag}
    return {"value": float(value)}


def _threads(args) -> int:
    if getattr(args, "threads", None):
        return max(1, args.threads)
    env = os.environ.get(THREADS_ENV)
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            raise SchemaError(f"{THREADS_ENV} must be an integer") from None
    return 1


# -- subcommands -----------------------------------------------------------------


def _spec_from_args(args, params: WishartParams | None) -> MomentSpec:
    flavor = args.flavor or (params.flavor if params else None)
    p = args.p or (params.p if params else None)
    if flavor is None or p is None:
        raise SchemaError("--flavor and --p are required without --params")
    if params is not None and (flavor != params.flavor or p != params.p):
        raise SchemaError("--flavor/--p disagree with the parameter file")
    return parse_moment_expression(args.expr, p, flavor)


def cmd_moment(args) -> tuple[str, int]:
    params = load_params(args.params) if args.params else None
    spec = _spec_from_args(args, params)
    poly = expand_moment(spec, max_n=args.max_n, workers=_threads(args))
    if args.symbolic:
        if args.format == "text":
            return str(poly), 0
        return poly.to_json(), 0
    if params is None:
        raise SchemaError("--params is required unless --symbolic is given")
    value = evaluate(poly, params)
    if args.format == "text":
        return repr(value), 0
    return json.dumps(_scalar_json(value)), 0


def cmd_count(args) -> tuple[str, int]:
    if args.kind == "f":
        value = cb.coeff_f(args.l, args.m, args.n)
    elif args.kind == "g":
        value = cb.coeff_g(args.l, args.m, args.n)
    else:
        value = cb.noncentral_stirling(args.n, args.m, args.l)
    return str(value), 0


def cmd_poly(args) -> tuple[str, int]:
    poly = (cb.phi if args.kind == "phi" else cb.psi)(args.m, args.n)
    if args.format == "text":
        return str(poly), 0
    return json.dumps(poly.to_json()), 0


def cmd_closed(args) -> tuple[str, int]:
    kind = args.kind
    text = args.format == "text"
    if kind in ("chisq", "kibble"):
        poly = cf.noncentral_chisq_moment(args.n) if kind == "chisq" else cf.kibble_moment(args.b, args.c)
        return (_multipoly_text(poly) if text else json.dumps(_multipoly_json(poly))), 0
    if kind == "laguerre":
        lag = cf.laguerre_coeffs(args.n)
        if text:
            return "\n".join(f"x^{k}: {c}" for k, c in enumerate(lag.coefficients)), 0
        return json.dumps({"coefficients": [c.to_json()["coefficients"] for c in lag.coefficients]}), 0
    if kind == "hermite":
        coeffs = cf.hermite_coeffs(args.n)
        if text:
            return " ".join(map(str, coeffs)), 0
        return json.dumps({"coefficients": [str(c) for c in coeffs]}), 0
    func = cf.real_2x2_moment if kind == "real2x2" else cf.complex_2x2_moment
    poly = func(args.a, args.b, args.c)
    return (str(poly) if text else json.dumps(poly.to_json())), 0


def cmd_validate(args) -> tuple[str, int]:
    params, means = read_params_document(args.params)
    spec = _spec_from_args(args, params)
    if spec.n > (cb.DEFAULT_MAX_N if args.max_n is None else args.max_n):
        raise SchemaError("expression degree exceeds --max-n")
    config = SimulationConfig(
        params, samples=args.samples, seed=args.seed, streams=_threads(args), mean_vectors=means
    )
    report = cross_check(spec, params, config, use_fd=args.fd, h=args.h)
    if args.fd and spec.n > 3:
        print("note: finite differences skipped for order > 3", file=sys.stderr)
    obj = report.to_json_obj()
    if args.format == "text":
        lines = [f"symbolic: {obj['symbolic']}"]
        mc = obj["mc"]
        lines.append(f"mc: {mc['estimate']} +- {mc['se']} (n={mc['n']}, z={mc['z']:.3f})")
        if obj["fd"] is not None:
            lines.append(f"fd: {obj['fd']['value']} (rel_err={obj['fd']['rel_err']:.3g})")
        lines.append("PASS" if report.passed else "FAIL")
        out = "\n".join(lines)
    else:
        out = json.dumps(obj)
    return out, 0 if report.passed else 1


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("json", "text"), default="json")
    common.add_argument("--threads", type=int, default=None,
                        help=f"worker count (default from ${THREADS_ENV}, else 1)")
    common.add_argument("--max-n", type=int, default=None, help="enumeration cap on moment degree")

    parser = argparse.ArgumentParser(prog="wishart-moments", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    mom = sub.add_parser("moment", parents=[common], help="expand or evaluate a moment")
    mom.add_argument("--flavor", choices=FLAVORS)
    mom.add_argument("--p", type=int)
    mom.add_argument("--expr", required=True)
    mom.add_argument("--params")
    mom.add_argument("--symbolic", action="store_true")
    mom.set_defaults(func=cmd_moment)

    cnt = sub.add_parser("count", parents=[common], help="graph counts f, g and noncentral Stirling numbers")
    cnt.add_argument("kind", choices=("f", "g", "stirling"))
    for flag in ("--l", "--m", "--n"):
        cnt.add_argument(flag, type=int, required=True)
    cnt.set_defaults(func=cmd_count)

    pol = sub.add_parser("poly", parents=[common], help="generating polynomials phi, psi")
    pol.add_argument("kind", choices=("phi", "psi"))
    pol.add_argument("--m", type=int, required=True)
    pol.add_argument("--n", type=int, required=True)
    pol.set_defaults(func=cmd_poly)

    clo = sub.add_parser("closed", parents=[common], help="closed-form moment formulas")
    clo.add_argument("kind", choices=("chisq", "laguerre", "hermite", "kibble", "real2x2", "complex2x2"))
    for flag in ("--n", "--a", "--b", "--c"):
        clo.add_argument(flag, type=int)
    clo.set_defaults(func=cmd_closed)

    val = sub.add_parser("validate", parents=[common], help="cross-check a moment numerically")
    val.add_argument("--flavor", choices=FLAVORS)
    val.add_argument("--p", type=int)
    val.add_argument("--expr", required=True)
    val.add_argument("--params", required=True)
    val.add_argument("--samples", type=int, default=1_000_000)
    val.add_argument("--seed", type=int, default=0)
    val.add_argument("--fd", action="store_true")
    val.add_argument("--h", type=float, default=None, help="finite-difference step")
    val.set_defaults(func=cmd_validate)
    return parser


_CLOSED_ARGS = {
    "chisq": ("n",), "laguerre": ("n",), "hermite": ("n",),
    "kibble": ("b", "c"), "real2x2": ("a", "b", "c"), "complex2x2": ("a", "b", "c"),
}


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if args.command == "closed":
        missing = [f"--{k}" for k in _CLOSED_ARGS[args.kind] if getattr(args, k) is None]
        if missing:
            print(f"error: closed {args.kind} needs {' '.join(missing)}", file=sys.stderr)
            return 2
    try:
        out, status = args.func(args)
    except (WishartMomentsError, ValueError, OSError, ArithmeticError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    print(out)
    return status


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
