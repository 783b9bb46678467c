"""Command-line front end.

Subcommands: entropy, seq-entropy, decompose, nullity, factor, examples,
perturb-study, random-study.  Delimited output goes to stdout or --output;
--plot additionally renders a matplotlib figure of the report to the given
path.  Exit codes: 0 ok, 2 input validation, 3 resource budget, 4 the
operator fails a hypothesis of the requested computation.
"""

from __future__ import annotations

import argparse
import sys

import numpy as np

from . import fileio, plots
from .entropy import (
    SequenceSpec,
    dynamic_entropy_estimate,
    entropy_supremum_search,
    entropy_trace,
    sequence_entropy_trace,
)
from .errors import BistochError, BudgetError, HypothesisError, ValidationError
from .gallery import gallery_list, gallery_run
from .nullity import hvn_factor, nullity_check, transition_support_check
from .operator import (
    convex_combination,
    coordinate_indicator,
    l1_operator_distance,
    mean_projection,
    sample_doubly_stochastic,
    shift_average_operator,
)
from .spectral import jdlg_decompose, nf_decompose

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_BUDGET = 3
EXIT_HYPOTHESIS = 4


def _add_common(parser):
    parser.add_argument("--n", type=int, default=16, help="horizon (default 16)")
    parser.add_argument("--tol", type=float, default=1e-2, help="tolerance")
    parser.add_argument("--seed", type=int, default=0, help="random seed")
    parser.add_argument("--base", choices=("e", "2"), default="e",
                        help="report entropies in nats (e) or bits (2)")
    parser.add_argument("--format", choices=("json", "csv"), default=None,
                        help="output format where a choice exists")
    parser.add_argument("--eps-spec", type=float, default=1e-8,
                        help="peripheral eigenvalue threshold")
    parser.add_argument("--cell-budget", type=int, default=10_000_000,
                        help="abort joins that would store more cells")
    parser.add_argument("--output", default=None, help="write output to this file")
    parser.add_argument("--plot", default=None,
                        help="also render a figure of the report to this path")


def _add_shift_flags(parser):
    parser.add_argument("--shift-grid", type=int, default=None,
                        help="use the shift backend with this grid size")
    parser.add_argument("--shift-koopman", action="store_true",
                        help="disable per-coordinate averaging (plain left shift)")
    parser.add_argument("--shift-coordinate", type=int, default=1,
                        help="coordinate of the built-in indicator collection")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="bistoch",
        description="entropy and spectral diagnostics of doubly stochastic operators",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("entropy", help="join-entropy trace of an operator")
    p.add_argument("operator", nargs="?", help="operator JSON file")
    p.add_argument("collection", nargs="?", help="collection JSON file")
    _add_common(p)
    _add_shift_flags(p)

    p = sub.add_parser("seq-entropy", help="entropy trace along an integer sequence")
    p.add_argument("operator", nargs="?", help="operator JSON file")
    p.add_argument("collection", nargs="?", help="collection JSON file")
    p.add_argument("--sequence", default="powers_of_two",
                   help="powers_of_two | primes | arithmetic:<step> | comma list")
    _add_common(p)
    _add_shift_flags(p)

    p = sub.add_parser("decompose", help="reversible/stable and unitary/cnu splits")
    p.add_argument("operator", help="operator JSON file")
    _add_common(p)

    p = sub.add_parser("nullity", help="null / not_null / inconclusive verdict")
    p.add_argument("operator", nargs="?", help="operator JSON file")
    _add_common(p)
    _add_shift_flags(p)

    p = sub.add_parser("factor", help="rotation factor of an ergodic operator")
    p.add_argument("operator", help="operator JSON file")
    _add_common(p)

    p = sub.add_parser("examples", help="run the operator gallery")
    p.add_argument("--entry", default=None, help="run a single entry by name")
    _add_common(p)

    p = sub.add_parser("perturb-study", help="mixing-toward-average decay study")
    p.add_argument("operator", help="operator JSON file")
    p.add_argument("collection", help="collection JSON file")
    p.add_argument("--alphas", default=None,
                   help="comma list of mixing weights (default 0 and 1/n, n<=10)")
    _add_common(p)

    p = sub.add_parser("random-study", help="entropy slopes and verdicts of sampled operators")
    p.add_argument("--count", type=int, default=100, help="number of samples")
    p.add_argument("--size", type=int, default=8, help="points per sampled space")
    p.add_argument("--budget", type=int, default=3, help="search budget per sample")
    _add_common(p)

    return parser


def _shift_operator_and_collection(args):
    op = shift_average_operator(
        args.shift_grid, averaging=not args.shift_koopman
    )
    coll = [coordinate_indicator(args.shift_grid, args.shift_coordinate,
                                 args.shift_grid - 1)]
    return op, coll


def _load_dense_inputs(args, need_collection=True):
    if args.operator is None:
        raise ValidationError("an operator file is required without --shift-grid")
    operator = fileio.load_operator(args.operator)
    if not need_collection:
        return operator, None
    if args.collection is None:
        raise ValidationError("a collection file is required without --shift-grid")
    _, collection = fileio.load_collection(args.collection, operator.space)
    return operator, collection


def cmd_entropy(args) -> int:
    if args.shift_grid is not None:
        operator, collection = _shift_operator_and_collection(args)
    else:
        operator, collection = _load_dense_inputs(args)
    trace = entropy_trace(operator, collection, args.n, cell_budget=args.cell_budget)
    fileio.emit(fileio.trace_csv(trace, args.base), args.output)
    if args.plot:
        plots.plot_entropy_trace(trace, args.plot, args.base)
    return EXIT_OK


def cmd_seq_entropy(args) -> int:
    sequence = SequenceSpec.parse(args.sequence)
    if args.shift_grid is not None:
        operator, collection = _shift_operator_and_collection(args)
    else:
        operator, collection = _load_dense_inputs(args)
    trace = sequence_entropy_trace(
        operator, collection, sequence, args.n, cell_budget=args.cell_budget
    )
    fileio.emit(fileio.trace_csv(trace, args.base), args.output)
    if args.plot:
        plots.plot_entropy_trace(trace, args.plot, args.base)
    return EXIT_OK


def cmd_decompose(args) -> int:
    operator, _ = _load_dense_inputs(args, need_collection=False)
    split = jdlg_decompose(operator, args.eps_spec)
    unitary = nf_decompose(operator)
    report = {
        "rev_dim": split.rev_dim,
        "aws_dim": split.aws_dim,
        "uni_dim": unitary.uni_dim,
        "cnu_dim": unitary.cnu_dim,
        "peripheral_eigenvalues": [
            [v.real, v.imag] for v in split.peripheral_eigenvalues
        ],
        "aws_spectral_radius": split.aws_spectral_radius,
        "residuals": {**split.residuals, **{
            f"nf_{k}": v for k, v in unitary.residuals.items()
        }},
    }
    fileio.emit(fileio.report_json(report), args.output)
    if args.plot:
        plots.plot_spectrum(
            split.peripheral_eigenvalues, args.plot, radius=split.aws_spectral_radius
        )
    return EXIT_OK


def cmd_nullity(args) -> int:
    if args.shift_grid is not None:
        operator, _ = _shift_operator_and_collection(args)
    else:
        operator, _ = _load_dense_inputs(args, need_collection=False)
    report = nullity_check(operator, horizon=max(args.n, 2), tol=args.tol)
    fileio.emit(fileio.report_json(report.as_dict()), args.output)
    if args.plot:
        curves = [
            (f"v{i}", curve)
            for i, curve in enumerate(report.evidence.get("decay_curves", []))
        ]
        plots.plot_decay_curves(curves, args.plot, tol=args.tol)
    return EXIT_OK


def cmd_factor(args) -> int:
    operator, _ = _load_dense_inputs(args, need_collection=False)
    factor = hvn_factor(operator)
    deviation = transition_support_check(operator, factor)
    report = {
        "atom_count": factor.atom_count,
        "atoms": [list(a) for a in factor.atoms],
        "rotation": list(factor.rotation),
        "projection": list(factor.projection),
        "residuals": {**factor.residuals, "support_deviation": deviation},
    }
    fileio.emit(fileio.report_json(report), args.output)
    if args.plot:
        plots.plot_factor(factor, args.plot)
    return EXIT_OK


def cmd_examples(args) -> int:
    names = [args.entry] if args.entry else [e.name for e in gallery_list()]
    reports = [gallery_run(name) for name in names]
    if args.format == "csv":
        rows = []
        for rep in reports:
            for prop in rep["properties"]:
                rows.append([rep["entry"], prop["tag"], prop["passed"],
                             prop["expected"], prop["observed"]])
        text = fileio.rows_csv(["entry", "tag", "passed", "expected", "observed"], rows)
    else:
        text = fileio.report_json({"entries": reports})
    fileio.emit(text, args.output)
    return EXIT_OK


def _parse_alphas(text):
    if text is None:
        return [0.0] + [1.0 / n for n in range(1, 11)]
    try:
        return [float(part) for part in text.split(",")]
    except ValueError as exc:
        raise ValidationError(f"cannot parse alphas {text!r}") from exc


def cmd_perturb_study(args) -> int:
    operator = fileio.load_operator(args.operator)
    _, collection = fileio.load_collection(args.collection, operator.space)
    averaging = mean_projection(operator.space)
    rows = []
    for alpha in _parse_alphas(args.alphas):
        mixed = convex_combination(alpha, operator, averaging)
        distance = l1_operator_distance(mixed, operator)
        estimate = dynamic_entropy_estimate(
            mixed, collection, max(args.n, 4), args.tol, cell_budget=args.cell_budget
        )
        rows.append([alpha, distance, 2.0 * alpha, estimate.estimate])
    fileio.emit(
        fileio.rows_csv(["alpha", "distance", "bound", "slope"], rows), args.output
    )
    if args.plot:
        plots.plot_perturbation_study(rows, args.plot)
    return EXIT_OK


def cmd_random_study(args) -> int:
    rng = np.random.default_rng(args.seed)
    rows = []
    slopes = []
    for i in range(args.count):
        operator = sample_doubly_stochastic(args.size, rng)
        search_seed = int(rng.integers(0, 2 ** 31))
        result = entropy_supremum_search(
            operator, args.budget, search_seed, horizon=max(args.n, 4),
            cell_budget=args.cell_budget,
        )
        split = jdlg_decompose(operator, args.eps_spec)
        verdict = nullity_check(operator).verdict
        rows.append([i, result.bound, verdict, split.aws_spectral_radius])
        slopes.append(result.bound)
    fileio.emit(
        fileio.rows_csv(["sample", "slope", "verdict", "aws_radius"], rows),
        args.output,
    )
    if args.plot:
        plots.plot_slope_histogram(slopes, args.plot)
    return EXIT_OK


_HANDLERS = {
    "entropy": cmd_entropy,
    "seq-entropy": cmd_seq_entropy,
    "decompose": cmd_decompose,
    "nullity": cmd_nullity,
    "factor": cmd_factor,
    "examples": cmd_examples,
    "perturb-study": cmd_perturb_study,
    "random-study": cmd_random_study,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    handler = _HANDLERS[args.command]
    try:
        return handler(args)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except BudgetError as exc:
        print(f"budget exceeded: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except HypothesisError as exc:
        print(f"hypothesis failure: {exc}", file=sys.stderr)
        return EXIT_HYPOTHESIS
    except BistochError as exc:  # pragma: no cover - defensive
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION


if __name__ == "__main__":
    sys.exit(main())
