"""
Command-line front end for the Big -1 Jacobi toolkit

    python cli.py eval --family uni --n 1 --a 0 --b 0 --c 0 --coeffs
    python cli.py verify --suite biv-gram --n-max 4 --delta 1/5
    python cli.py domain --delta 1/5 --format json
"""

import argparse
import logging
import sys
from typing import Dict, List, Optional, Sequence

import config
from bigm1 import UniParams, UniRegime, bigm1_coeffs, gram_matrix
from bigq import limit_rows
from bivariate import (
    PEARSON_EQUATIONS,
    STEPWISE_EQUATIONS,
    BivIndex,
    BivParams,
    BivRegime,
    biv_coeffs,
    biv_gram_matrix,
    domain_biv,
    pearson_grid,
    pearson_residuals,
    pearson_stepwise_residuals,
)
from errors import MinusOneJacobiError
from reports import (
    GRAM_FIELDS,
    load_deviations,
    merge_deviations,
    save_deviations,
    summarize,
    write_reports,
    write_rows,
)
from suites import SUITES, SuiteContext, run_suites

logger = logging.getLogger(__name__)

USAGE_ERROR = 2

BIV_DEFAULTS = {"alpha": "1/2", "beta": "1/2", "gamma": "1/2", "delta": "1/5"}
UNI_DEFAULTS = {"a": "0", "b": "0", "c": "0"}


class Console:
    """Banners and ✓/✗ lines on stdout, silenced by --quiet"""

    def __init__(self, quiet: bool = False):
        self.quiet = quiet

    def banner(self, title: str) -> None:
        if not self.quiet:
            print("=" * 70)
            print(title)
            print("=" * 70)

    def line(self, text: str = "") -> None:
        if not self.quiet:
            print(text)


def _scalar(text: str):
    try:
        return config.parse_scalar(text)
    except ValueError as e:
        raise argparse.ArgumentTypeError(str(e)) from None


def _uni_params(args) -> UniParams:
    values = {name: getattr(args, name) for name in UNI_DEFAULTS}
    return UniParams(**{k: v if v is not None else config.parse_scalar(UNI_DEFAULTS[k]) for k, v in values.items()})


def _biv_params(args) -> BivParams:
    values = {name: getattr(args, name) for name in BIV_DEFAULTS}
    return BivParams(**{k: v if v is not None else config.parse_scalar(BIV_DEFAULTS[k]) for k, v in values.items()})


def _given(args, names) -> bool:
    return any(getattr(args, name, None) is not None for name in names)


def _emit(rows: Sequence[Dict], columns: Sequence[str], args, console: Console) -> None:
    write_rows(rows, columns, args.format, args.out)
    if args.out:
        console.line(f"✓ Wrote {len(rows)} rows to {args.out}")


# Subcommands

def cmd_eval(args, console: Console) -> int:
    if args.family == "uni":
        p = _uni_params(args)
        poly = bigm1_coeffs(args.n, p)
        label = f"J_{args.n}{p}"
    else:
        p = _biv_params(args)
        idx = BivIndex(args.n, args.k if args.k is not None else 0)
        poly = biv_coeffs(idx, p)
        label = f"J_{idx}{p}"

    if args.x is not None:
        point = (args.x,) if args.family == "uni" else (args.x, args.y if args.y is not None else 0.0)
        value = poly.evaluate(*(float(v) for v in point))
        rows = [{"point": ",".join(repr(float(v)) for v in point), "value": float(value)}]
        _emit(rows, ("point", "value"), args, console)
        return 0

    if args.coeffs and args.family == "uni":
        print(", ".join(str(c) for c in poly.coefficients()))
        return 0

    rows = [
        {"power_x": exps[0], "power_y": exps[1] if len(exps) > 1 else 0, "coefficient": str(value)}
        for exps, value in sorted(poly.items())
    ]
    console.banner(label)
    _emit(rows, ("power_x", "power_y", "coefficient"), args, console)
    return 0


def _suite_context(args) -> SuiteContext:
    ctx = SuiteContext.from_parameter_file(
        args.params, n_max=args.n_max, grid=args.grid, use_paper_formulas=args.use_paper_formulas
    )
    if _given(args, UNI_DEFAULTS):
        ctx.uni_sets = [_uni_params(args)]
    if _given(args, BIV_DEFAULTS):
        ctx.biv_sets = [_biv_params(args)]
    if not (ctx.uni_sets or ctx.biv_sets):
        ctx.uni_sets = [_uni_params(args)]
        ctx.biv_sets = [_biv_params(args)]
    return ctx


def cmd_verify(args, console: Console) -> int:
    names = list(SUITES) if not args.suite or "all" in args.suite else args.suite
    ctx = _suite_context(args)
    console.banner(f"VERIFY: {len(names)} suite(s), {config.JOBS} worker thread(s)")
    reports = run_suites(names, ctx)

    for r in reports:
        mark = "✓" if r.passed else "✗"
        console.line(f"{mark} {r.check_name:32s} {r.max_residual:.3e}  {r.witness}")
        for note in r.notes:
            console.line(f"    {note}")

    if ctx.deviations:
        merged = merge_deviations(load_deviations(config.DEVIATIONS_FILE), ctx.deviations)
        save_deviations(merged, config.DEVIATIONS_FILE)
        console.line(f"⚠️  {len(ctx.deviations)} coefficient deviations written to {config.DEVIATIONS_FILE}")

    if args.out or args.quiet:
        write_reports(reports, args.format, args.out)
    stats = summarize(reports)
    console.line(f"\n{stats['passed']}/{stats['total']} checks passed")
    return 0 if stats["failed"] == 0 else 1


def cmd_gram(args, console: Console) -> int:
    regime = args.regime
    if args.family == "uni":
        p = _uni_params(args)
        n_max = args.n_max if args.n_max is not None else config.DEFAULT_N_MAX["uni"]
        gram, expected, _ = gram_matrix(n_max, p, UniRegime(regime) if regime else None)
        indices = [(n, 0) for n in range(n_max + 1)]
    else:
        p = _biv_params(args)
        n_max = args.n_max if args.n_max is not None else config.DEFAULT_N_MAX["biv_gram"]
        gram, expected, biv_indices, _ = biv_gram_matrix(n_max, p, BivRegime(regime) if regime else None)
        indices = [(i.n, i.k) for i in biv_indices]

    console.banner(f"GRAM MATRIX ({args.family}) n_max={n_max} {p}")
    rows = []
    for i, (n1, k1) in enumerate(indices):
        for j, (n2, k2) in enumerate(indices):
            target = float(expected[i]) if i == j else 0.0
            value = float(gram[i, j])
            rows.append(
                {"n1": n1, "k1": k1, "n2": n2, "k2": k2, "value": value, "expected": target,
                 "abs_err": abs(value - target)}
            )
    _emit(rows, GRAM_FIELDS, args, console)
    return 0


def cmd_limit(args, console: Console) -> int:
    n_max = args.n_max if args.n_max is not None else config.DEFAULT_N_MAX["limit"]
    if args.family == "uni":
        p = _uni_params(args)
        indices = [args.n] if args.n is not None else list(range(n_max + 1))
    else:
        p = _biv_params(args)
        if args.n is not None:
            ks = [args.k] if args.k is not None else range(args.n + 1)
            indices = [BivIndex(args.n, k) for k in ks]
        else:
            indices = [BivIndex(n, k) for n in range(n_max + 1) for k in range(n + 1)]

    console.banner(f"q -> -1 LIMIT ({args.family}) {p}")
    rows = limit_rows(args.family, indices, p, config.LIMIT_EPSILONS)
    _emit(rows, ("n", "k", "eps", "deviation", "order"), args, console)
    return 0


def cmd_pearson(args, console: Console) -> int:
    p = _biv_params(args)
    console.banner(f"PEARSON SYSTEM {args.grid}x{args.grid} grid {p}")
    rows = []
    for x, y in pearson_grid(p, args.grid):
        row = {"x": x, "y": y}
        row.update(zip(PEARSON_EQUATIONS, pearson_residuals(p, x, y)))
        row.update(zip(STEPWISE_EQUATIONS, pearson_stepwise_residuals(p, x, y)))
        rows.append(row)
    for name in PEARSON_EQUATIONS + STEPWISE_EQUATIONS:
        worst = max(row[name] for row in rows)
        mark = "✓" if worst <= config.TOLERANCES["pearson"] else "✗"
        console.line(f"{mark} equation {name:13s} max residual {worst:.3e}")
    _emit(rows, ("x", "y") + PEARSON_EQUATIONS + STEPWISE_EQUATIONS, args, console)
    return 0


def cmd_domain(args, console: Console) -> int:
    p = _biv_params(args)
    domain = domain_biv(p, BivRegime(args.regime) if args.regime else None)
    console.banner(f"ORTHOGONALITY REGION {p}")
    console.line(f"✓ {len(domain.triangles)} triangles, area {domain.area:.12g}")
    rows = []
    for t, triangle in enumerate(domain.triangles):
        for v, (x, y) in enumerate(triangle):
            rows.append({"triangle": t, "vertex": v, "x": float(x), "y": float(y), "exact": f"({x}, {y})"})
    _emit(rows, ("triangle", "vertex", "x", "y", "exact"), args, console)
    return 0


COMMANDS = {
    "eval": cmd_eval,
    "verify": cmd_verify,
    "gram": cmd_gram,
    "limit": cmd_limit,
    "pearson": cmd_pearson,
    "domain": cmd_domain,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        description="Big -1 Jacobi polynomials: exact construction, quadrature and identity checks",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Examples:
  python cli.py eval --family uni --n 1 --a 0 --b 0 --c 0 --coeffs
  python cli.py eval --family biv --n 2 --k 1 --delta 1/5
  python cli.py verify --suite uni-recurrence --n-max 8
  python cli.py verify --suite biv-gram --n-max 4 --delta 1/5
  python cli.py verify --suite pearson --grid 10 --format json --out output/pearson.json
  python cli.py gram --family biv --n-max 2 --out output/gram.csv
  python cli.py limit --family biv --n 2 --k 1
  python cli.py domain --delta 3 --format json

Rationals are given as "p/q" strings and use exact arithmetic;
decimal parameters run numeric checks only.
        """,
    )
    parser.add_argument("--verbose", action="store_true", help="Debug logging")
    parser.add_argument("--quiet", action="store_true", help="No banners; machine output only")
    parser.add_argument("--check-config", action="store_true", help="Validate configuration and exit")

    params = argparse.ArgumentParser(add_help=False)
    for name, default in UNI_DEFAULTS.items():
        params.add_argument(f"--{name}", type=_scalar, help=f"univariate {name} (default {default})")
    for name, default in BIV_DEFAULTS.items():
        params.add_argument(f"--{name}", type=_scalar, help=f"bivariate {name} (default {default})")

    output = argparse.ArgumentParser(add_help=False)
    output.add_argument("--format", choices=("csv", "json"), default="csv", help="Output format (default: csv)")
    output.add_argument("--out", metavar="PATH", help="Write output to PATH instead of stdout")

    family = argparse.ArgumentParser(add_help=False)
    family.add_argument("--family", choices=("uni", "biv"), default="biv", help="Polynomial family (default: biv)")

    sub = parser.add_subparsers(dest="command", metavar="COMMAND")

    p_eval = sub.add_parser("eval", parents=[params, output, family], help="Coefficients or values of one polynomial")
    p_eval.add_argument("--n", type=int, required=True, help="Degree n")
    p_eval.add_argument("--k", type=int, help="Second index k (bivariate, default 0)")
    p_eval.add_argument("--x", type=_scalar, help="Evaluate at x")
    p_eval.add_argument("--y", type=_scalar, help="Evaluate at y (bivariate)")
    p_eval.add_argument("--coeffs", action="store_true", help="Ascending coefficient list (univariate)")

    p_verify = sub.add_parser("verify", parents=[params, output], help="Run verification suites")
    p_verify.add_argument(
        "--suite", action="append", choices=sorted(SUITES) + ["all"], help="Suite to run (repeatable, default all)"
    )
    p_verify.add_argument("--n-max", type=int, help="Override every suite's n_max")
    p_verify.add_argument("--grid", type=int, default=config.DEFAULT_PEARSON_GRID, help="Pearson grid size")
    p_verify.add_argument("--params", help=f"Parameter file (default: {config.PARAMS_FILE})")
    p_verify.add_argument(
        "--use-paper-formulas", action="store_true",
        help="Use the closed-form recurrence coefficients as-is instead of the validated ones",
    )

    p_gram = sub.add_parser("gram", parents=[params, output, family], help="Gram matrix by quadrature")
    p_gram.add_argument("--n-max", type=int, help="Largest degree")
    p_gram.add_argument("--regime", choices=("inside", "outside"), help="Weight regime (default: from c or delta)")

    p_limit = sub.add_parser("limit", parents=[params, output, family], help="q -> -1 limit table")
    p_limit.add_argument("--n", type=int, help="Degree n (default: all up to --n-max)")
    p_limit.add_argument("--k", type=int, help="Second index k")
    p_limit.add_argument("--n-max", type=int, help="Largest degree when --n is absent")

    p_pearson = sub.add_parser("pearson", parents=[params, output], help="Pearson residuals over a grid")
    p_pearson.add_argument("--grid", type=int, default=config.DEFAULT_PEARSON_GRID, help="Grid size")

    p_domain = sub.add_parser("domain", parents=[params, output], help="Triangles of the orthogonality region")
    p_domain.add_argument("--regime", choices=("inside", "outside"), help="Regime (default: from delta)")

    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)

    level = logging.DEBUG if args.verbose else logging.WARNING if args.quiet else logging.INFO
    logging.basicConfig(level=level)

    if args.check_config:
        try:
            config.validate_config()
        except ValueError as e:
            print(f"✗ Configuration error: {e}", file=sys.stderr)
            return USAGE_ERROR
        return 0
    if args.command is None:
        parser.print_usage(sys.stderr)
        print("error: a command is required", file=sys.stderr)
        return USAGE_ERROR

    console = Console(quiet=args.quiet)
    try:
        return COMMANDS[args.command](args, console)
    except MinusOneJacobiError as e:
        print(f"error: {e}", file=sys.stderr)
        return USAGE_ERROR


if __name__ == "__main__":
    sys.exit(main())
