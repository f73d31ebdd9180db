"""Deterministic command-line front end.

Three subcommands: `reproduce` writes one of the reference figure tables,
`estimate` runs the kernel-trick estimator on a user sample file, and
`oracle` runs the invariant suites. Output tables are comma-delimited
text, one header line naming each curve, values at 17 significant digits;
identical config and seed produce byte-identical files.

Exit status: 0 success, 1 validation or usage error, 2 oracle failure.
"""

from __future__ import annotations

import argparse
import sys

import numpy as np

from .basis import basis_matrix, wavelet_approximation
from .config import ExperimentConfig, load_config
from .embedding import kernel_diag
from .learn import (
    DensityCurve,
    embedded_density_exact,
    embedded_density_map,
    normalized_ratio,
)
from .oracles import SUITES, run_suite
from .target import load_samples

FIGURES = ("fig2a", "fig2b", "fig3a", "fig3b")


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits with status 2 on usage errors; remap to 1 so status 2
    # stays reserved for oracle failures.
    def error(self, message):
        raise _UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="densop",
                     description="density-operator learning experiments")
    sub = parser.add_subparsers(dest="command", required=True)

    reproduce = sub.add_parser("reproduce",
                               help="write a reference figure data table")
    reproduce.add_argument("--figure", required=True, choices=FIGURES)
    _add_common(reproduce)

    estimate = sub.add_parser("estimate",
                              help="run the kernel estimator on a sample file")
    estimate.add_argument("samples", help="text file, one sample per line")
    _add_common(estimate)

    oracle = sub.add_parser("oracle", help="run the invariant suites")
    oracle.add_argument("--suite", default="all", choices=SUITES)
    return parser


def _add_common(sub: argparse.ArgumentParser):
    sub.add_argument("--config", default=None,
                     help="flat key = value config file")
    sub.add_argument("--seed", type=int, default=None,
                     help="override the config seed")
    sub.add_argument("--out", default=None,
                     help="output path (default <figure>.csv / estimate.csv)")


def _write_table(path: str, names, columns) -> None:
    stacked = np.column_stack([np.asarray(c, dtype=float) for c in columns])
    np.savetxt(path, stacked, fmt="%.17g", delimiter=",",
               header=",".join(names), comments="")


def _figure_table(figure: str, cfg: ExperimentConfig):
    spec = cfg.basis()
    operator = cfg.operator()
    grid = cfg.curve_grid()
    target = cfg.target()
    s = grid.points
    if figure == "fig2a":
        rows = basis_matrix(spec, s)
        names = ["s"] + [f"phi_{int(k)}" for k in spec.translates]
        names.append("kernel_diag")
        cols = [s, *rows, kernel_diag(operator, s)]
    elif figure == "fig2b":
        zeta = target.density(s)
        names = ["s", "zeta", "wavelet_approximation"]
        cols = [s, zeta, wavelet_approximation(zeta, spec, grid)]
    else:
        zeta_curve = DensityCurve(grid, target.density(s))
        samples = target.sample(cfg.n_samples, cfg.seed)
        exact = embedded_density_exact(operator, zeta_curve, grid)
        mapped = embedded_density_map(operator, samples, grid)
        if figure == "fig3a":
            names = ["s", "zeta", "embedded_exact", "embedded_map"]
            cols = [s, zeta_curve.values, exact.values, mapped.values]
        else:
            names = ["s", "zeta", "ratio_exact", "ratio_map"]
            cols = [s, zeta_curve.values,
                    normalized_ratio(exact, operator).values,
                    normalized_ratio(mapped, operator).values]
    return names, cols


def _estimate_table(samples_path: str, cfg: ExperimentConfig):
    samples = load_samples(samples_path)
    if samples.n == 0:
        raise ValueError(f"{samples_path}: sample file is empty")
    interval = cfg.interval()
    outside = (samples.points < interval.lo) | (samples.points > interval.hi)
    if np.any(outside):
        pos = int(np.argmax(outside))
        raise ValueError(
            f"{samples_path}: sample {samples.points[pos]:g} on line "
            f"{pos + 1} lies outside [{interval.lo:g}, {interval.hi:g}]"
        )
    operator = cfg.operator()
    grid = cfg.curve_grid()
    mapped = embedded_density_map(operator, samples, grid)
    ratio = normalized_ratio(mapped, operator)
    return (["s", "embedded_map", "ratio_map"],
            [grid.points, mapped.values, ratio.values])


def _run_oracle(suite: str) -> int:
    results = run_suite(suite)
    for result in results:
        print(result.line())
    failures = sum(not r.passed for r in results)
    print(f"{len(results) - failures} passed, {failures} failed")
    return 2 if failures else 0


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except SystemExit as exc:  # --help
        code = exc.code
        return 0 if code in (0, None) else 1

    try:
        if args.command == "oracle":
            return _run_oracle(args.suite)
        cfg = ExperimentConfig()
        if args.config is not None:
            cfg = load_config(args.config, base=cfg)
        if args.seed is not None:
            cfg = cfg.replace(seed=args.seed)
        if args.out is not None:
            cfg = cfg.replace(out=args.out)
        if args.command == "reproduce":
            names, cols = _figure_table(args.figure, cfg)
            out_path = cfg.out or f"{args.figure}.csv"
        else:
            names, cols = _estimate_table(args.samples, cfg)
            out_path = cfg.out or "estimate.csv"
        _write_table(out_path, names, cols)
        print(out_path)
        return 0
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
