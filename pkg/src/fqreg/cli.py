"""Command-line interface: ``fqreg test``, ``fqreg simulate`` and ``fqreg tecator``.

Exit codes: 0 on success, 2 when the computation fails (unreadable input,
degenerate data), 64 on invalid usage.
"""

import argparse
import csv
import json
import os
import sys
from pathlib import Path

import numpy as np

from .exceptions import FqregError, ParseError
from .fpca import FunctionalDataset
from .grid import DEFAULT_GRID_SIZE, make_uniform_grid, spline_resample
from .quadtest import DEFAULT_VARIANCE_THRESHOLD, run_test, vech_index
from .simulate import DEFAULT_ITERATIONS, DEFAULT_SEED, SimScenario, power_row, simulate_statistics
from .tecator import load_spectra_csv, run_tecator_analysis

EXIT_OK = 0
EXIT_COMPUTATION = 2
EXIT_USAGE = 64


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: error: {message}")


def _positive_int(text):
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {value}")
    return value


def _int_list(text):
    return [_positive_int(t) for t in text.split(",") if t.strip()]


def _float_list(text):
    try:
        values = [float(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None
    if not values:
        raise argparse.ArgumentTypeError("empty list")
    return values


def _fraction(text):
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a number, got {text!r}") from None
    if not 0 < value <= 1:
        raise argparse.ArgumentTypeError(f"must lie in (0, 1], got {value}")
    return value


def _level(text):
    value = _fraction(text)
    if value == 1:
        raise argparse.ArgumentTypeError("alpha must be < 1")
    return value


def _design(text):
    name = text.replace("-", "_").lower()
    if name not in ("gaussian", "chebyshev_t5"):
        raise argparse.ArgumentTypeError("design must be gaussian or chebyshev-t5")
    return name


def _default_threads():
    try:
        return _positive_int(os.environ.get("FQREG_THREADS", "1"))
    except argparse.ArgumentTypeError:
        return 1


def build_parser():
    common = _Parser(add_help=False)
    common.add_argument("--seed", type=int, default=DEFAULT_SEED, help="base random seed for simulations")
    common.add_argument(
        "--grid-size", type=_positive_int, default=None, help="resample curves to this many points on [0, 1]"
    )
    common.add_argument("--output", choices=("text", "json"), default="text", help="report format")
    common.add_argument(
        "--threads", type=_positive_int, default=_default_threads(),
        help="worker processes for simulations (default: $FQREG_THREADS or 1)",
    )

    parser = _Parser(prog="fqreg", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p_test = sub.add_parser("test", parents=[common], help="test a curves/response CSV")
    p_test.add_argument(
        "--curves", required=True, type=Path, help="CSV with one curve per row, response in the last column"
    )
    which = p_test.add_mutually_exclusive_group()
    which.add_argument("--p", type=_positive_int, help="number of principal components")
    which.add_argument(
        "--var-threshold",
        type=_fraction,
        default=DEFAULT_VARIANCE_THRESHOLD,
        help="choose p as the smallest count explaining this variance fraction (default 0.85)",
    )

    p_sim = sub.add_parser("simulate", parents=[common], help="Monte Carlo size/power study")
    p_sim.add_argument("--design", type=_design, default="gaussian", help="gaussian or chebyshev-t5")
    p_sim.add_argument("--N", dest="n_curves", type=_int_list, default=[200], help="sample sizes, comma separated")
    p_sim.add_argument("--c", type=_float_list, default=[0.0], help="quadratic strengths, comma separated")
    p_sim.add_argument("--p", type=_int_list, default=[1], help="component counts, comma separated")
    p_sim.add_argument("--alpha", type=_level, default=0.05, help="nominal level")
    p_sim.add_argument(
        "--iters", type=_positive_int, default=DEFAULT_ITERATIONS, help="replications per cell (default 2000)"
    )

    p_tec = sub.add_parser("tecator", parents=[common], help="analyse the Tecator spectra")
    p_tec.add_argument("--file", required=True, type=Path, help="spectra CSV, e.g. data/tecator.csv")
    p_tec.add_argument("--p", type=_int_list, default=[1, 2, 3], help="component counts to try (default 1,2,3)")
    p_tec.add_argument(
        "--var-threshold",
        type=_fraction,
        default=DEFAULT_VARIANCE_THRESHOLD,
        help="variance fraction used to report the selected p (default 0.85)",
    )
    return parser


def dumps(obj):
    """Canonical single-line JSON used for every machine-readable record."""
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


def read_curves_csv(path):
    """Rows of ``m`` curve values followed by the response; optional header ending in ``y``."""
    path = Path(path)
    if not path.is_file():
        raise ParseError(f"no such file: {path}")
    with path.open(newline="", encoding="utf-8") as fh:
        rows = [r for r in csv.reader(fh)]
    start = 0
    if rows and rows[0] and rows[0][-1].strip().lower() == "y":
        start = 1
    values, width = [], None
    for lineno, row in enumerate(rows[start:], start=start + 1):
        if not row or all(not c.strip() for c in row):
            continue
        width = width or len(row)
        if len(row) != width:
            raise ParseError(f"expected {width} columns, found {len(row)}", line=lineno)
        try:
            values.append([float(c) for c in row])
        except ValueError:
            raise ParseError("non-numeric value", line=lineno) from None
    if not values:
        raise ParseError("no data rows")
    data = np.array(values)
    if data.shape[1] < 5:
        raise ParseError("need at least 4 curve columns plus the response")
    return data[:, :-1], data[:, -1]


def _test_report(res):
    fit = res.fit
    return {
        "u_stat": res.u_stat,
        "dof": res.dof,
        "p_value": res.p_value,
        "p_value_underflow": res.p_value_underflow,
        "p": res.p,
        "eigenvalues": res.basis.eigenvalues.tolist(),
        "variance_explained": res.variance_explained,
        "tau2_hat": fit.tau2_hat,
        "a_hat": fit.a_hat.tolist(),
        "b_hat": fit.b_hat.tolist(),
        "mu_hat": fit.mu_hat,
        "n_obs": fit.n_obs,
    }


def cmd_test(args, out):
    x, y = read_curves_csv(args.curves)
    m = x.shape[1]
    grid = make_uniform_grid(m)
    if args.grid_size is not None and args.grid_size != m:
        target = make_uniform_grid(args.grid_size)
        x = spline_resample(grid.points, x, target.points)
        grid = target
    res = run_test(FunctionalDataset(grid, x, y), p=args.p, var_threshold=args.var_threshold)
    rep = _test_report(res)
    if args.output == "json":
        print(dumps(rep), file=out)
        return
    a = res.fit.a_matrix
    lines = [
        f"N = {rep['n_obs']}, grid points = {len(grid)}, p = {res.p}",
        f"U_N      = {res.u_stat:.6g}",
        f"dof r    = {res.dof}",
        f"p-value  = {res.p_value:.6g} ({100 * res.p_value:.2f}%)"
        + (" [below double precision]" if res.p_value_underflow else ""),
        f"variance explained by {res.p} component(s) = {100 * res.variance_explained:.2f}%",
        "",
        " i   eigenvalue",
    ]
    lines += [f"{i + 1:2d}   {lam:.6g}" for i, lam in enumerate(res.basis.eigenvalues)]
    lines += ["", " i  j   a_ij"]
    lines += [f"{i + 1:2d} {j + 1:2d}   {a[i, j]: .6g}" for i, j in vech_index(res.p)]
    lines += ["", " i   b_i"]
    lines += [f"{i + 1:2d}   {b: .6g}" for i, b in enumerate(res.fit.b_hat)]
    lines += ["", f"mu = {res.fit.mu_hat:.6g}"]
    print("\n".join(lines), file=out)


def _power_table(rows, alpha):
    cs = sorted({r.scenario.c for r in rows})
    cols = sorted({(r.scenario.n_curves, r.scenario.p) for r in rows})
    cell = {(r.scenario.c, r.scenario.n_curves, r.scenario.p): r for r in rows}
    head = "   c  | " + " | ".join(f"N={n},p={p}".rjust(12) for n, p in cols)
    lines = [f"Empirical rejection rate (in %), alpha = {alpha:g}", head, "-" * len(head)]
    for c in cs:
        vals = [
            f"{100 * cell[(c, n, p)].rejection_rate:12.2f}" if (c, n, p) in cell else " " * 12
            for n, p in cols
        ]
        lines.append(f"{c:5.2f} | " + " | ".join(vals))
    return "\n".join(lines)


def cmd_simulate(args, out):
    rows = []
    for n in args.n_curves:
        for p in args.p:
            for c in args.c:
                scen = SimScenario(
                    n_curves=n, c=c, p=p, alpha=args.alpha, iterations=args.iters,
                    design=args.design, grid_size=args.grid_size or DEFAULT_GRID_SIZE,
                    seed=args.seed,
                )
                stats = simulate_statistics(scen, threads=args.threads)
                rows.append(power_row(scen, stats[:, 1]))
    if args.output == "json":
        for row in rows:
            print(dumps(row.to_dict()), file=out)
    else:
        print(f"design = {args.design}, iterations = {args.iters}, seed = {args.seed}", file=out)
        print(_power_table(rows, args.alpha), file=out)


def cmd_tecator(args, out):
    table = load_spectra_csv(args.file)
    m = args.grid_size or DEFAULT_GRID_SIZE
    analysis = run_tecator_analysis(table, args.p, m=m, var_threshold=args.var_threshold)
    if args.output == "json":
        rep = {
            "n_samples": table.n_samples,
            "grid_size": m,
            "selected_p": analysis.selected_p,
            "variance_threshold": analysis.variance_threshold,
            "results": [
                {
                    "p": r.p,
                    "u_stat": r.u_stat,
                    "dof": r.dof,
                    "p_value": r.p_value,
                    "p_value_underflow": r.p_value_underflow,
                    "variance_explained": r.variance_explained,
                }
                for r in analysis.results
            ],
        }
        print(dumps(rep), file=out)
        return
    res = analysis.results
    wl = table.wavelengths
    width = 9

    def row(label, cells):
        return f"{label:<16}|" + "|".join(c.rjust(width) for c in cells)

    lines = [
        f"{table.n_samples} samples, {wl.size} wavelengths ({wl[0]:g}-{wl[-1]:g} nm), "
        f"resampled to {m} grid points",
        "p-values (in %)",
        row("p", [str(r.p) for r in res]),
        row("p-value", [f"{100 * r.p_value:.2f}" for r in res]),
        row("U_N", [f"{r.u_stat:.3f}" for r in res]),
        row("dof", [str(r.dof) for r in res]),
        row("var. explained", [f"{100 * r.variance_explained:.2f}" for r in res]),
        f"{100 * analysis.variance_threshold:g}% variance rule selects p = {analysis.selected_p}",
    ]
    print("\n".join(lines), file=out)


COMMANDS = {"test": cmd_test, "simulate": cmd_simulate, "tecator": cmd_tecator}


def main(argv=None, out=None, err=None):
    out = out or sys.stdout
    err = err or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        print(parser.format_usage().rstrip(), file=err)
        print(exc, file=err)
        return EXIT_USAGE
    except SystemExit as exc:  # --help
        return exc.code or EXIT_OK
    try:
        COMMANDS[args.command](args, out)
    except FqregError as exc:
        print(f"fqreg {args.command}: {type(exc).__name__}: {exc}", file=err)
        return EXIT_COMPUTATION
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
