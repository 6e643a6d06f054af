"""Command line interface.

Subcommands
-----------
* ``periph spectrum CHANNEL``: peripheral eigenvalues, multiplicities, and
  semisimplicity verdicts.
* ``periph verify CHANNEL --suite {cstar,automorphism,stability,module,dilation,all}``:
  run a verification suite and emit its checks.
* ``periph product CHANNEL X Y --method {spectral,cesaro,dilation,limit}``:
  boundary product of two matrices in the peripheral span, plus the
  agreement table across all computable methods.
* ``periph example {unitary,weyl,group-walk,toeplitz-demo} ...``: generate
  channels with known peripheral structure (JSON), or the Toeplitz finite
  section scaling study (CSV).

All reports are deterministic for fixed inputs and seeds, except for the
``timings`` block.  Exit codes: 0 all checks passed, 1 a check failed,
2 malformed input, 3 dimension cap exceeded, 4 tolerance conflict,
5 input not in the peripheral span.
"""

import argparse
import json
import sys
import time

import numpy as np

from . import boundary as bd
from . import channel as ch
from . import dilation as dl
from . import families as fam
from . import matrixcore as mc
from . import serialize as ser
from . import spectral as sp
from .errors import (AlmostPeriodError, CapExceededError, ChannelFormatError,
                     DefectiveEigenvalueError, EigensolverError, PeriphError,
                     PeripheralSpanError, ToleranceConflictError,
                     ValidationError)
from .reporting import Check, VerificationReport

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_BAD_INPUT = 2
EXIT_CAP_EXCEEDED = 3
EXIT_TOLERANCE_CONFLICT = 4
EXIT_NOT_IN_SPAN = 5


def _parse_complex(text: str) -> complex:
    s = text.strip().replace(" ", "").replace("i", "j")
    try:
        return complex(s)
    except ValueError as exc:
        raise ValueError(f"cannot parse complex number from {text!r}") from exc


def _parse_complex_list(text: str) -> list:
    return [_parse_complex(tok) for tok in text.split(",") if tok.strip()]


def _parse_symbol(text: str) -> fam.SymbolSpec:
    coeffs = {}
    for item in text.split(","):
        item = item.strip()
        if not item:
            continue
        if ":" not in item:
            raise ValueError(
                f"symbol term {item!r} must look like mode:coefficient")
        k, v = item.split(":", 1)
        coeffs[int(k)] = coeffs.get(int(k), 0) + _parse_complex(v)
    if not coeffs:
        raise ValueError("symbol has no terms")
    return fam.SymbolSpec(coeffs)


def _parse_group(text: str) -> fam.GroupSpec:
    parts = [p.strip() for p in text.replace("X", "x").split("x") if p.strip()]
    if not parts:
        raise ValueError(f"cannot parse group name {text!r}")
    groups = []
    for p in parts:
        if not (p.startswith("Z") or p.startswith("z")) or not p[1:].isdigit():
            raise ValueError(
                f"unknown group factor {p!r}; expected Zn (e.g. Z4, Z2xZ2)")
        groups.append(fam.GroupSpec.cyclic(int(p[1:])))
    out = groups[0]
    for g in groups[1:]:
        out = fam.GroupSpec.direct_product(out, g)
    return out


def _parse_mu(text: str, order: int) -> np.ndarray:
    mu = np.zeros(order)
    if ":" in text:
        for item in text.split(","):
            item = item.strip()
            if not item:
                continue
            idx, val = item.split(":", 1)
            i = int(idx)
            if not 0 <= i < order:
                raise ValueError(f"mu index {i} out of range 0..{order - 1}")
            mu[i] += float(val)
    else:
        vals = [float(tok) for tok in text.split(",") if tok.strip()]
        if len(vals) != order:
            raise ValueError(
                f"mu needs {order} entries (or sparse idx:val items), "
                f"got {len(vals)}")
        mu = np.array(vals)
    return mu


def _fmt_eig(z: complex) -> str:
    return f"{z.real:+.6f}{z.imag:+.6f}j"


def _print_json(obj) -> None:
    print(json.dumps(obj, indent=2))


def _load_channel(path) -> ch.KrausChannel:
    # channel files must describe a genuinely unital map, not just parse
    c = ser.load_channel(path)
    v = ch.validate(c)
    if not v.passed:
        raise ChannelFormatError(
            f"channel in {path} is not unital: defect "
            f"{v.unitality_defect:.3e} exceeds {ch.UNITALITY_TOL:.0e}")
    return c


def _emit_report(report: VerificationReport, command: str, label: str,
                 seed: int | None, tolerances: dict, started: float,
                 data: dict | None = None) -> int:
    payload = ser.report_to_json(
        report, command, channel_label=label, seed=seed,
        tolerances=tolerances, data=data,
        timings={"seconds": time.monotonic() - started})
    _print_json(payload)
    return EXIT_OK if report.passed else EXIT_CHECK_FAILED


# -- spectrum -----------------------------------------------------------------


def cmd_spectrum(args) -> int:
    started = time.monotonic()
    c = _load_channel(args.channel)
    semis = sp.semisimplicity_report(c, tol_peripheral=args.tol_peripheral)
    report = VerificationReport("spectrum", meta={"dim": c.dim})
    eig_data = []
    span = 0
    for e in semis.entries:
        report.add(
            f"semisimple({_fmt_eig(e.value)})",
            "algebraic equals geometric multiplicity on the unit circle",
            float(e.algebraic_multiplicity - e.geometric_multiplicity), 0.0,
            passed=not e.defective)
        eig_data.append({
            "value": ser.complex_to_pair(e.value),
            "algebraic_multiplicity": e.algebraic_multiplicity,
            "geometric_multiplicity": e.geometric_multiplicity,
            "defective": e.defective,
        })
        span += e.geometric_multiplicity
    return _emit_report(
        report, "spectrum", c.label, None,
        {"tol_peripheral": args.tol_peripheral,
         "cluster_radius": sp.CLUSTER_RADIUS},
        started, data={"eigenvalues": eig_data, "span_dim": span})


# -- verify -------------------------------------------------------------------


def _prefixed(report: VerificationReport, prefix: str) -> VerificationReport:
    out = VerificationReport(report.title, meta=dict(report.meta))
    for c in report.checks:
        out.checks.append(Check(f"{prefix}.{c.name}", c.anchor, c.value,
                                c.threshold, c.passed, c.reason))
    return out


def cmd_verify(args) -> int:
    started = time.monotonic()
    c = _load_channel(args.channel)
    suites = ([args.suite] if args.suite != "all"
              else ["cstar", "automorphism", "stability", "module", "dilation"])
    combined = VerificationReport(
        "verify", meta={"dim": c.dim, "suites": suites})
    pb = None
    if any(s in suites for s in ("cstar", "automorphism", "stability", "module")):
        pb = bd.PeripheralBoundary.build(c)
        combined.meta["span_dim"] = pb.span_dim()
    for suite in suites:
        if suite == "cstar":
            combined.extend(_prefixed(
                bd.cstar_verify(pb, trials=args.trials, seed=args.seed),
                "cstar"))
        elif suite == "automorphism":
            combined.extend(_prefixed(
                bd.automorphism_check(pb, trials=args.trials, seed=args.seed),
                "automorphism"))
        elif suite == "stability":
            combined.extend(_prefixed(
                bd.stability_check(pb, args.k, n_samples=args.trials,
                                   seed=args.seed),
                f"stability[k={args.k}]"))
        elif suite == "module":
            for rep in pb.reps:
                if pb.spaces[rep].dim == 0:
                    continue
                combined.extend(_prefixed(
                    bd.module_structure_check(pb, rep, trials=args.trials,
                                              seed=args.seed),
                    f"module[{_fmt_eig(rep)}]"))
        elif suite == "dilation":
            combined.extend(_prefixed(
                dl.tower_verify(c, depth=args.depth, trials=max(1, args.trials // 4),
                                seed=args.seed),
                "dilation"))
    return _emit_report(
        combined, "verify", c.label, args.seed,
        {"tol_peripheral": sp.TOL_PERIPHERAL,
         "cluster_radius": sp.CLUSTER_RADIUS, "tol_null": sp.TOL_NULL},
        started)


# -- product ------------------------------------------------------------------


def _bilinear(pb, xe, ye, pairwise) -> np.ndarray:
    d = pb.channel.dim
    total = np.zeros((d, d), dtype=complex)
    for lam, xc in xe.components.items():
        if mc.op_norm(xc) == 0.0:
            continue
        for mu, yc in ye.components.items():
            if mc.op_norm(yc) == 0.0:
                continue
            total = total + pairwise(xc, lam, yc, mu)
    return total


def cmd_product(args) -> int:
    started = time.monotonic()
    c = _load_channel(args.channel)
    x = ser.load_matrix(args.x)
    y = ser.load_matrix(args.y)
    pb = bd.PeripheralBoundary.build(c)
    xe = pb.decompose(x)
    ye = pb.decompose(y)
    scale = max(mc.op_norm(x) * mc.op_norm(y), 1e-300)

    methods: dict = {}
    methods["spectral"] = pb.product_general(xe, ye).matrix
    methods["cesaro"] = _bilinear(
        pb, xe, ye,
        lambda xc, lam, yc, mu: pb.cesaro_product(xc, lam, yc, mu,
                                                  n_terms=args.cesaro_terms))

    def limit_term(xc, lam, yc, mu):
        if pb.find_rep(lam * mu) is None:
            return np.zeros((c.dim, c.dim), dtype=complex)
        z = lam * mu
        return ch.power_apply(c, xc @ yc, args.limit_n) / z ** args.limit_n

    methods["limit"] = _bilinear(pb, xe, ye, limit_term)

    report = VerificationReport(
        "product", meta={"dim": c.dim, "span_dim": pb.span_dim(),
                         "method": args.method,
                         "norm_x": mc.op_norm(x), "norm_y": mc.op_norm(y)})
    tower_error = None
    try:
        tower = dl.build_tower(c, args.depth)
        methods["dilation"] = _bilinear(
            pb, xe, ye,
            lambda xc, lam, yc, mu: dl.compressed_product(tower, xc, lam,
                                                          yc, mu))
    except CapExceededError as exc:
        if args.method == "dilation":
            raise
        tower_error = str(exc)

    report.add("cesaro_agreement",
               "spectral projector and Cesaro products agree",
               mc.op_norm(methods["spectral"] - methods["cesaro"]),
               1e-2 * scale)
    if "dilation" in methods:
        report.add("dilation_agreement",
                   "spectral projector and compressed dilation products agree",
                   mc.op_norm(methods["spectral"] - methods["dilation"]),
                   1e-6 * scale)
    else:
        report.add_skipped("dilation_agreement",
                           "spectral projector and compressed dilation "
                           "products agree", tower_error)

    agreement = {}
    names = sorted(methods)
    for i, a in enumerate(names):
        for b in names[i + 1:]:
            agreement[f"{a}_vs_{b}"] = float(
                mc.op_norm(methods[a] - methods[b]))

    payload = ser.report_to_json(
        report, "product", channel_label=c.label, seed=None,
        tolerances={"cesaro_terms": args.cesaro_terms, "depth": args.depth,
                    "limit_n": args.limit_n},
        data={"product": ser.matrix_to_pairs(methods[args.method]),
              "agreement": agreement},
        timings={"seconds": time.monotonic() - started})
    _print_json(payload)
    return EXIT_OK if report.passed else EXIT_CHECK_FAILED


# -- example ------------------------------------------------------------------


def cmd_example_unitary(args) -> int:
    diag = _parse_complex_list(args.diag)
    ex = fam.unitary_channel(np.diag(diag), label=args.label or "")
    meta = {
        "family": "unitary",
        "fixed_dim": ex.fixed_dim,
        "span_dim": ex.span_dim,
        "peripheral_dims": [
            {"value": ser.complex_to_pair(lam), "dim": dim}
            for lam, dim in sorted(ex.peripheral_dims.items(),
                                   key=lambda kv: (np.angle(kv[0]) % (2 * np.pi)))],
    }
    _print_json(ser.channel_to_json(ex.channel, metadata=meta))
    return EXIT_OK


def cmd_example_weyl(args) -> int:
    probs = ([1.0 / args.n] * args.n if args.probs is None
             else [float(t) for t in args.probs.split(",") if t.strip()])
    ex = fam.weyl_channel(args.d, args.n, probs)
    meta = {
        "family": "weyl",
        "eigenvalue": ser.complex_to_pair(ex.eigenvalue),
        "relation_defect": ex.relation_defect,
    }
    _print_json(ser.channel_to_json(ex.channel, metadata=meta))
    return EXIT_OK


def cmd_example_group_walk(args) -> int:
    group = _parse_group(args.group)
    mu = _parse_mu(args.mu, group.order)
    ex = fam.group_walk_channel(group, mu)
    meta = {
        "family": "group-walk",
        "group": group.name,
        "support": list(ex.support),
        "predicted_eigenvalues": [
            ser.complex_to_pair(z) for z in ex.predicted_eigenvalues()],
    }
    _print_json(ser.channel_to_json(ex.channel, metadata=meta))
    return EXIT_OK


def cmd_example_toeplitz(args) -> int:
    sizes = [int(t) for t in args.sizes.split(",") if t.strip()]
    if args.term:
        terms = []
        for text in args.term:
            parts = text.split("|")
            if len(parts) != 3:
                raise ValueError(
                    f"term {text!r} must look like coeff|lam|symbol")
            terms.append(fam.ToeplitzTerm(
                _parse_complex(parts[0]), _parse_complex(parts[1]),
                _parse_symbol(parts[2])))
    else:
        terms = [fam.ToeplitzTerm(_parse_complex(args.coeff),
                                  _parse_complex(args.lam),
                                  _parse_symbol(args.symbol))]
    demo = fam.toeplitz_demo(sizes, terms)
    print("M,r,defect")
    for row in demo.rows:
        print(f"{row.size},{row.compression_ratio:.17g},"
              f"{row.interior_defect:.17g}")
    return EXIT_OK


# -- wiring -------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="periph",
        description="Peripheral spectrum and boundary products of unital "
                    "quantum channels.")
    sub = parser.add_subparsers(dest="command", required=True)

    p_spec = sub.add_parser("spectrum", help="peripheral eigenvalue report")
    p_spec.add_argument("channel")
    p_spec.add_argument("--tol-peripheral", type=float, default=sp.TOL_PERIPHERAL)
    p_spec.set_defaults(func=cmd_spectrum)

    p_ver = sub.add_parser("verify", help="run a verification suite")
    p_ver.add_argument("channel")
    p_ver.add_argument("--suite", default="all",
                       choices=["cstar", "automorphism", "stability",
                                "module", "dilation", "all"])
    p_ver.add_argument("--seed", type=int, default=0)
    p_ver.add_argument("--trials", type=int, default=20)
    p_ver.add_argument("--depth", type=int, default=4)
    p_ver.add_argument("--k", type=int, default=2)
    p_ver.set_defaults(func=cmd_verify)

    p_prod = sub.add_parser("product", help="boundary product of two matrices")
    p_prod.add_argument("channel")
    p_prod.add_argument("x")
    p_prod.add_argument("y")
    p_prod.add_argument("--method", default="spectral",
                        choices=["spectral", "cesaro", "dilation", "limit"])
    p_prod.add_argument("--cesaro-terms", type=int, default=10 ** 4)
    p_prod.add_argument("--depth", type=int, default=4)
    p_prod.add_argument("--limit-n", type=int, default=64)
    p_prod.set_defaults(func=cmd_product)

    p_ex = sub.add_parser("example", help="generate example channels")
    ex_sub = p_ex.add_subparsers(dest="example", required=True)

    p_uni = ex_sub.add_parser("unitary", help="conjugation by a diagonal unitary")
    p_uni.add_argument("--diag", required=True,
                       help="comma separated diagonal, e.g. 1,i,-1")
    p_uni.add_argument("--label", default="")
    p_uni.set_defaults(func=cmd_example_unitary)

    p_weyl = ex_sub.add_parser("weyl", help="shift mixture on (C^d)^n")
    p_weyl.add_argument("--d", type=int, required=True)
    p_weyl.add_argument("--n", type=int, required=True)
    p_weyl.add_argument("--probs", default=None,
                        help="comma separated mixture weights (default uniform)")
    p_weyl.set_defaults(func=cmd_example_weyl)

    p_walk = ex_sub.add_parser("group-walk", help="random walk channel on a group")
    p_walk.add_argument("--group", required=True,
                        help="Zn or products like Z2xZ2")
    p_walk.add_argument("--mu", required=True,
                        help="full CSV over elements, or sparse idx:prob items")
    p_walk.set_defaults(func=cmd_example_group_walk)

    p_toe = ex_sub.add_parser("toeplitz-demo",
                              help="twisted Toeplitz finite section study (CSV)")
    p_toe.add_argument("--M", "--sizes", dest="sizes",
                       default="8,16,32,64,128,256")
    p_toe.add_argument("--symbol", default="1:1,-1:1",
                       help="mode:coeff items, e.g. 1:1,-1:1")
    p_toe.add_argument("--lam", default="1")
    p_toe.add_argument("--coeff", default="1")
    p_toe.add_argument("--term", action="append", default=None,
                       help="repeatable coeff|lam|symbol term, overrides "
                            "--symbol/--lam/--coeff")
    p_toe.set_defaults(func=cmd_example_toeplitz)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except CapExceededError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CAP_EXCEEDED
    except ToleranceConflictError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_TOLERANCE_CONFLICT
    except PeripheralSpanError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NOT_IN_SPAN
    except (ChannelFormatError, ValidationError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BAD_INPUT
    except (AlmostPeriodError, DefectiveEigenvalueError, EigensolverError,
            PeriphError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CHECK_FAILED


if __name__ == "__main__":
    sys.exit(main())
