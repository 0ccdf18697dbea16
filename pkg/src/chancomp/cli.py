"""Command-line front end.

Usage::

    chancomp complement --family dep --d 2 --p 0.5 --rho rho.json --spectrum
    chancomp minimalize --family td --d 3 --t 0
    chancomp purity --family wh --d 3 --pnorm 2
    chancomp product-purity --family wh --d 3 --pnorm 5
    chancomp me-spectrum --d 3
    chancomp violation-scan --d 3 --grid 4:6:21 --format csv

Complex numbers are written as ``[re, im]`` pairs and matrices as row-major
nested lists. Exit codes: 0 ok, 1 usage or parse error, 2 validation
failure, 3 optimizer failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys

import numpy as np

from . import __version__
from .channels import (
    KrausSet,
    choi_rank,
    dual_rep_operator,
    minimalize,
    validate,
)
from .exceptions import ChannelError, OptimizationError
from .linalg import cluster_eigenvalues, eigvalsh_desc, polar_decompose, random_unitary
from .product import (
    SchmidtVector,
    find_crossing,
    me_ratio,
    omega_from_schmidt,
    omega_me_closed_table,
    omega_me_spectrum,
)
from .purity import PuritySearchConfig, multiplicativity_report, nu_p, nu_p_product, wh_nu_closed
from .zoo import COMPLEMENT_FORMS, ChannelSpec, covariance_residual

EXIT_OK, EXIT_USAGE, EXIT_VALIDATION, EXIT_OPTIMIZER = 0, 1, 2, 3
VALIDATION_TOL = 1e-10
SEED_ENV = "CHANCOMP_SEED"


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


# --- serialization --------------------------------------------------------


def encode_matrix(m) -> list:
    arr = np.asarray(m, dtype=np.complex128)
    if arr.ndim == 1:
        return [[float(z.real), float(z.imag)] for z in arr]
    return [[[float(z.real), float(z.imag)] for z in row] for row in arr]


def decode_matrix(data) -> np.ndarray:
    arr = np.asarray(data, dtype=float)
    if arr.shape[-1:] != (2,):
        raise UsageError("matrices must be nested arrays of [re, im] pairs")
    return arr[..., 0] + 1j * arr[..., 1]


def _load_json(path: str):
    try:
        with open(path) as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read {path}: {exc}") from exc


def load_density(path: str) -> np.ndarray:
    m = decode_matrix(_load_json(path))
    if m.ndim != 2:
        raise UsageError("density matrix must be a 2-D nested array")
    return m


def load_kraus(path: str) -> KrausSet:
    ops = decode_matrix(_load_json(path))
    if ops.ndim != 3:
        raise UsageError("Kraus file must hold a list of matrices")
    return KrausSet(ops)


def _clean(x: float) -> float:
    # normalise -0.0 so repeated runs and platforms print identically
    return 0.0 if x == 0 else float(x)


def emit(report, args) -> None:
    text = report if isinstance(report, str) else json.dumps(report, indent=2) + "\n"
    if args.out:
        with open(args.out, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


# --- argument handling ----------------------------------------------------


def parse_grid(text: str) -> tuple[float, float, int]:
    try:
        a, b, n = text.split(":")
        lo, hi, steps = float(a), float(b), int(n)
    except ValueError as exc:
        raise UsageError(f"grid must look like a:b:n, got {text!r}") from exc
    if not (1.0 <= lo < hi) or steps < 2:
        raise UsageError(f"grid needs 1 <= a < b and n >= 2, got {text!r}")
    return lo, hi, steps


def resolve_seed(args) -> int:
    if args.seed is not None:
        return args.seed
    env = os.environ.get(SEED_ENV)
    if env is None:
        return 0
    try:
        return int(env)
    except ValueError as exc:
        raise UsageError(f"{SEED_ENV} must be an integer, got {env!r}") from exc


def build_spec(args) -> ChannelSpec:
    if args.family == "kraus":
        if not args.kraus:
            raise UsageError("--family kraus needs --kraus PATH")
        return ChannelSpec("kraus", operators=load_kraus(args.kraus))
    if args.d is None:
        raise UsageError("--d is required")
    return ChannelSpec(args.family, args.d, p=args.p, t=args.t)


def header(args, seed: int) -> dict:
    return {"version": __version__, "command": args.argv, "seed": seed}


def search_config(args, seed: int) -> PuritySearchConfig:
    return PuritySearchConfig(
        p=args.pnorm, restarts=args.restarts, max_iters=args.max_iters, step=args.step, tol=args.tol, seed=seed
    )


def _check_tp(kraus: KrausSet) -> float:
    resid = validate(kraus, "tp")
    if resid > VALIDATION_TOL:
        raise ChannelError(f"Kraus set is not trace preserving: residual {resid:.3e} > {VALIDATION_TOL:g}")
    return resid


def _covariance(spec: ChannelSpec, seed: int) -> dict:
    if spec.family not in ("dep", "td", "wh"):
        return {}
    rng = np.random.default_rng(seed)
    u = random_unitary(spec.d, rng)
    g = rng.standard_normal((spec.d, spec.d)) + 1j * rng.standard_normal((spec.d, spec.d))
    rho = g @ g.conj().T
    rho /= np.trace(rho).real
    tags = ("dep", "dep_complement") if spec.family == "dep" else ("td", "td_complement")
    return {tag: covariance_residual(tag, spec.params, u, rho) for tag in tags}


# --- commands -------------------------------------------------------------


def cmd_complement(args, seed: int) -> int:
    form = args.form or COMPLEMENT_FORMS.get(args.family, ("kraus", "kraus"))[1]
    if args.family == "dep" and form == "matrix" and args.p is not None and args.p > 1:
        raise ChannelError(f"matrix form needs sqrt(1-p) and is restricted to p <= 1, got p={args.p}")
    spec = build_spec(args)
    if spec.family in COMPLEMENT_FORMS and form not in COMPLEMENT_FORMS[spec.family]:
        raise UsageError(f"--form must be one of {COMPLEMENT_FORMS[spec.family]} for family {spec.family}")
    if spec.family not in COMPLEMENT_FORMS:
        form = "kraus"
    if spec.family == "dep" and not spec.params.kraus_constructible:
        kraus = spec.minimal_kraus()
    else:
        kraus = spec.kraus()
    tp = _check_tp(kraus)
    report = header(args, seed)
    report["channel"] = spec.describe()
    report["form"] = form
    report["choi_rank"] = choi_rank(kraus)
    report["n_kraus"] = kraus.d_C
    residuals = {"tp": tp, "unital": validate(kraus, "unital"), "covariance": _covariance(spec, seed)}
    if args.rho:
        rho = load_density(args.rho)
        out = spec.complement_apply(rho, form)
        if args.spectrum:
            rep = cluster_eigenvalues(eigvalsh_desc(out))
            report["spectrum"] = [[_clean(v), m] for v, m in rep.clusters]
        else:
            report["complement"] = encode_matrix(out)
        report["dim"] = out.shape[0]
        residuals["trace"] = abs(float(np.trace(out).real) - float(np.trace(rho).real))
    report["residuals"] = residuals
    emit(report, args)
    return EXIT_OK


def cmd_minimalize(args, seed: int) -> int:
    spec = build_spec(args)
    d = spec.d
    report = header(args, seed)
    report["channel"] = spec.describe()
    residuals = {}
    if spec.family in ("dep", "td", "wh") and not (spec.family == "dep" and not spec.params.kraus_constructible):
        t = spec.t_matrix()
        s = minimalize(t, (d, d))
        residuals["closed_form"] = float(np.max(np.abs(s - spec.s_matrix())))
    elif spec.family == "dep":
        # T is not real for p > 1; the closed form S is the only representation
        t = None
        s = spec.s_matrix()
    else:
        kraus = spec.kraus()
        _check_tp(kraus)
        rep = dual_rep_operator(kraus)
        t = rep.s
        s = minimalize(t, (rep.d_A, rep.d_B))
    if t is not None:
        u, s_polar = polar_decompose(t)
        residuals["polar"] = float(np.max(np.abs(u @ s_polar - t)))
        report["nonminimal_dim"] = t.shape[0]
    report["minimal_dim"] = s.shape[0]
    report["s_spectrum"] = [[_clean(v), m] for v, m in cluster_eigenvalues(eigvalsh_desc(s)).clusters]
    if not args.spectrum:
        report["s"] = encode_matrix(s)
    report["choi_rank"] = choi_rank(spec.minimal_kraus())
    report["residuals"] = residuals
    emit(report, args)
    return EXIT_OK


def _purity_block(result) -> dict:
    return {
        "nu_p": result.value,
        "renyi": result.renyi,
        "argmax_state": encode_matrix(result.argmax_state),
        "best_restart": result.best_restart,
        "converged_restarts": result.n_converged,
        "restarts": [r.as_dict() for r in result.restarts],
    }


def cmd_purity(args, seed: int) -> int:
    spec = build_spec(args)
    cfg = search_config(args, seed)
    kraus = spec.complement_kraus() if args.complement else spec.minimal_kraus()
    tp = _check_tp(kraus)
    result = nu_p(kraus, cfg)
    if result.n_converged == 0:
        raise OptimizationError("no restart converged")
    report = header(args, seed)
    report["channel"] = spec.describe()
    report["complement"] = bool(args.complement)
    report["pnorm"] = cfg.p
    report.update(_purity_block(result))
    if spec.family == "wh":
        report["closed_form"] = wh_nu_closed(spec.d, cfg.p)
    report["residuals"] = {"tp": tp}
    emit(report, args)
    return EXIT_OK


def cmd_product_purity(args, seed: int) -> int:
    spec = build_spec(args)
    cfg = search_config(args, seed)
    k1 = spec.minimal_kraus()
    k2 = spec.complement_kraus() if args.partner == "complement" else k1
    residuals = {"tp_first": _check_tp(k1), "tp_second": _check_tp(k2)}
    report = header(args, seed)
    report["channel"] = spec.describe()
    report["partner"] = args.partner
    report["pnorm"] = cfg.p
    if args.restrict == "schmidt":
        result = nu_p_product(k1, k2, cfg, restrict="schmidt")
        report.update(_purity_block(result))
    else:
        rep = multiplicativity_report(k1, k2, cfg.p, cfg)
        result = rep.product_result
        report["multiplicativity"] = rep.as_dict()
        report.update(_purity_block(result))
    if result.n_converged == 0:
        raise OptimizationError("no restart converged")
    if spec.family == "wh" and args.partner == "complement" and spec.d >= 3:
        report["me_lower_bound"] = me_ratio(spec.d, cfg.p) * wh_nu_closed(spec.d, cfg.p) ** 2
    report["residuals"] = residuals
    emit(report, args)
    return EXIT_OK


def cmd_me_spectrum(args, seed: int) -> int:
    if args.d is None or args.d < 2:
        raise UsageError("--d >= 2 is required")
    d = args.d
    computed = omega_me_spectrum(d)
    table = omega_me_closed_table(d)
    omega = omega_from_schmidt(d, SchmidtVector.uniform(d))
    expected = np.concatenate([np.full(m, v) for v, m in table.clusters])
    gap = float(np.max(np.abs(np.sort(eigvalsh_desc(omega)) - np.sort(expected))))
    report = header(args, seed)
    report["d"] = d
    report["clusters"] = [[_clean(v), m] for v, m in computed.clusters]
    report["closed_form"] = [[v, m] for v, m in table.clusters]
    report["residuals"] = {"eigenvalues": gap, "trace": abs(float(np.trace(omega).real) - 1.0)}
    emit(report, args)
    return EXIT_OK


def cmd_violation_scan(args, seed: int) -> int:
    if args.d is None or args.d < 2:
        raise UsageError("--d >= 2 is required")
    lo, hi, steps = parse_grid(args.grid)
    grid = np.linspace(lo, hi, steps)
    ratios = [me_ratio(args.d, p) for p in grid]
    crossing = find_crossing(args.d, lo, hi)
    if args.format == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["p", "ratio_lower_bound", "log_ratio"])
        for p, r in zip(grid, ratios):
            w.writerow([repr(float(p)), repr(r), repr(_clean(float(np.log(r))))])
        if crossing is not None:
            w.writerow(["crossing", repr(crossing), ""])
        emit(buf.getvalue(), args)
        return EXIT_OK
    report = header(args, seed)
    report["d"] = args.d
    report["rows"] = [
        {"p": float(p), "ratio_lower_bound": r, "log_ratio": _clean(float(np.log(r)))} for p, r in zip(grid, ratios)
    ]
    report["crossing"] = crossing
    report["residuals"] = {"max_ratio_minus_one": max(ratios) - 1.0}
    emit(report, args)
    return EXIT_OK


COMMANDS = {
    "complement": cmd_complement,
    "minimalize": cmd_minimalize,
    "purity": cmd_purity,
    "product-purity": cmd_product_purity,
    "me-spectrum": cmd_me_spectrum,
    "violation-scan": cmd_violation_scan,
}


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--seed", type=int, default=None, help=f"RNG seed (default: ${SEED_ENV} or 0)")
    common.add_argument("--out", metavar="PATH", help="write the report here instead of stdout")
    common.add_argument("--format", choices=("json", "csv"), default="json")

    chan = _Parser(add_help=False)
    chan.add_argument("--family", choices=("dep", "td", "wh", "id", "kraus"), default="wh")
    chan.add_argument("--d", type=int)
    chan.add_argument("--p", type=float, help="depolarizing parameter")
    chan.add_argument("--t", type=float, help="transpose-depolarizing parameter")
    chan.add_argument("--kraus", metavar="PATH", help="JSON list of Kraus matrices for --family kraus")

    opt = _Parser(add_help=False)
    opt.add_argument("--pnorm", type=float, default=2.0)
    opt.add_argument("--restarts", type=int, default=64)
    opt.add_argument("--max-iters", type=int, default=500)
    opt.add_argument("--step", type=float, default=0.1)
    opt.add_argument("--tol", type=float, default=1e-10)

    parser = _Parser(prog="chancomp", description="Complementary channels and output purity.")
    parser.add_argument("--version", action="version", version=f"chancomp {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("complement", parents=[common, chan], help="complementary channel output")
    p.add_argument("--form", choices=("minimal", "matrix", "blockT"))
    p.add_argument("--rho", metavar="PATH", help="input density matrix (JSON of [re, im] pairs)")
    p.add_argument("--spectrum", action="store_true", help="report the output spectrum only")

    p = sub.add_parser("minimalize", parents=[common, chan], help="minimal dual representation sqrt(T^H T)")
    p.add_argument("--spectrum", action="store_true", help="omit the S matrix")

    p = sub.add_parser("purity", parents=[common, chan, opt], help="maximal output p-norm")
    p.add_argument("--complement", action="store_true", help="optimize the complementary channel")

    p = sub.add_parser("product-purity", parents=[common, chan, opt], help="p-norm of channel (x) partner")
    p.add_argument("--partner", choices=("complement", "self"), default="complement")
    p.add_argument("--restrict", choices=("none", "schmidt"), default="none")

    sub.add_parser("me-spectrum", parents=[common, chan], help="spectrum of the maximally entangled output")

    p = sub.add_parser("violation-scan", parents=[common, chan], help="ME-witnessed multiplicativity ratio")
    p.add_argument("--grid", default="1:10:19", metavar="a:b:n")
    return parser


def _without_out(argv: list[str]) -> list[str]:
    # the output path is not part of the computation; leave it out of the echo
    out, skip = [], False
    for tok in argv:
        if skip:
            skip = False
        elif tok == "--out":
            skip = True
        elif not tok.startswith("--out="):
            out.append(tok)
    return out


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    args.argv = ["chancomp", *_without_out(argv)]
    try:
        seed = resolve_seed(args)
        if args.format == "csv" and args.command != "violation-scan":
            raise UsageError("--format csv is only available for violation-scan")
        return COMMANDS[args.command](args, seed)
    except UsageError as exc:
        print(f"chancomp: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ChannelError as exc:
        print(f"chancomp: validation failed: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except OptimizationError as exc:
        print(f"chancomp: optimizer failed: {exc}", file=sys.stderr)
        return EXIT_OPTIMIZER


if __name__ == "__main__":
    sys.exit(main())
