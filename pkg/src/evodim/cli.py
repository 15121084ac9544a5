"""Command-line interface.

Exit codes: 0 on success, 2 for invalid input (the violated invariant and
its residual go to stderr), 3 when the data cannot support the requested
computation.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import serialize
from .classical import evolve_classical
from .dilation import quantum_realization, verify_cptp
from .errors import EvodimError, InvalidParameter, NumericalError, ValidationError
from .experiments import (
    FIG2_COLUMNS,
    HULL_COLUMNS,
    ExperimentConfig,
    emit_region_data,
    format_csv,
    run_fig2,
)
from .quantum import evolve_expectations
from .realization import (
    RankReport,
    dimension_bounds,
    effective_rank,
    enforce_contraction,
    linear_realization,
    noise_epsilon,
)
from .sequences import (
    MultiSequence,
    RealSequence,
    build_block_hankel,
    build_hankel,
    default_hankel_size,
    format_sequence_csv,
    read_sequence_csv,
)
from .spectral import DEFAULT_ORDER_MAX, spectral_report


def _read_single(path) -> RealSequence:
    seq = read_sequence_csv(path)
    if isinstance(seq, MultiSequence):
        if seq.observable_count != 1:
            raise InvalidParameter(f"{path}: expected a single observable")
        seq = seq.observable(0)
    return seq


def _write_text(text: str, path) -> None:
    if path in (None, "-"):
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)


def cmd_simulate(args) -> int:
    if args.kind == "quantum":
        if not (args.channel and args.rho and args.obs):
            raise InvalidParameter("simulate quantum needs --channel, --rho and --obs")
        seq = evolve_expectations(
            serialize.channel_from_json(serialize.load_json(args.channel)),
            serialize.state_from_json(serialize.load_json(args.rho)),
            serialize.observable_from_json(serialize.load_json(args.obs)),
            args.steps,
        )
    else:
        if not args.model:
            raise InvalidParameter("simulate classical needs --model")
        model = serialize.stochastic_from_json(serialize.load_json(args.model))
        seq = evolve_classical(model, args.steps)
    _write_text(format_sequence_csv(seq), args.out)
    return 0


def _rank_report(seq, n, epsilon) -> RankReport:
    if isinstance(seq, MultiSequence) and seq.observable_count > 1:
        return effective_rank(build_block_hankel(seq, n), epsilon)
    if isinstance(seq, MultiSequence):
        seq = seq.observable(0)
    return effective_rank(build_hankel(seq, n), epsilon)


def cmd_estimate(args) -> int:
    seq = read_sequence_csv(args.infile)
    n = args.hankel_n or default_hankel_size(len(seq))
    if args.epsilon is not None:
        epsilon = args.epsilon
    elif args.noise_sigma is not None:
        epsilon = noise_epsilon(args.noise_sigma, n)
    else:
        epsilon = 0.0
    report = _rank_report(seq, n, epsilon)
    bounds = dimension_bounds(report, args.known_d, args.known_ds)
    if args.json:
        out = {
            "n": report.n,
            "epsilon": report.epsilon,
            "singular_values": report.singular_values.tolist(),
            "dim_v_lower": report.dim_v_lower,
            "dim_v_exact_if_clean": report.dim_v_exact_if_clean,
            "dim_v": bounds.dim_v,
            "d_min": bounds.d_min,
            "dim_c_max_given_d": bounds.dim_c_max_given_d,
            "d_e_min_given_ds": bounds.d_e_min_given_ds,
        }
        print(json.dumps(out, indent=1))
        return 0
    shown = ", ".join(f"{x:.4g}" for x in report.singular_values[:15])
    print(f"Hankel size        : {report.n} x {report.n}")
    print(f"singular values    : {shown}{' ...' if report.n > 15 else ''}")
    if epsilon > 0:
        print(f"noise threshold    : {epsilon:.6g}")
        print(f"dim V (lower bound): {report.dim_v_lower}")
    else:
        print(f"dim V (clean rank) : {report.dim_v_exact_if_clean}")
    print(f"minimal dimension d: {bounds.d_min}")
    if bounds.dim_c_max_given_d is not None:
        print(f"max conserved quantities for d={args.known_d}: {bounds.dim_c_max_given_d}")
    if bounds.d_e_min_given_ds is not None:
        print(f"min memory dimension for d_S={args.known_ds}: {bounds.d_e_min_given_ds}")
    return 0


def cmd_realize(args) -> int:
    seq = _read_single(args.infile)
    real = linear_realization(seq, args.hankel_n)
    if not args.raw:
        real = enforce_contraction(real)
    serialize.dump_json(serialize.realization_to_json(real), args.out)
    return 0


def cmd_dilate(args) -> int:
    real = serialize.realization_from_json(serialize.load_json(args.infile))
    qr = quantum_realization(real)
    serialize.dump_json(serialize.quantum_realization_to_json(qr), args.out)
    if args.verify:
        check = verify_cptp(qr.channel)
        print(f"dimension {qr.dim}; trace residual {check.trace_preserving_residual:.3e}; "
              f"Choi min eigenvalue {check.choi_min_eigenvalue:.3e}; "
              f"{'PASS' if check.passed else 'FAIL'}")
        if not check.passed:
            return 3
    return 0


def cmd_spectrum(args) -> int:
    if str(args.infile).endswith(".json"):
        real = serialize.realization_from_json(serialize.load_json(args.infile))
    else:
        real = linear_realization(_read_single(args.infile), args.hankel_n)
    report = spectral_report(real, args.order_max, args.tol)
    serialize.dump_json(serialize.spectral_report_to_json(report), args.out)
    return 0


def cmd_experiment(args) -> int:
    if args.which == "fig2":
        config = ExperimentConfig(seed=args.seed, trials=args.trials)
        text = format_csv(FIG2_COLUMNS, run_fig2(config, jobs=args.jobs))
    else:
        text = format_csv(HULL_COLUMNS, emit_region_data(args.order_max))
    _write_text(text, args.out)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="evodim",
        description="Estimate dimensions from expectation-value sequences.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="generate a sequence from a model")
    p.add_argument("kind", choices=["quantum", "classical"])
    p.add_argument("--channel")
    p.add_argument("--rho")
    p.add_argument("--obs")
    p.add_argument("--model")
    p.add_argument("--steps", type=int, required=True)
    p.add_argument("--out")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("estimate", help="Hankel rank and dimension bounds")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--hankel-n", type=int)
    noise = p.add_mutually_exclusive_group()
    noise.add_argument("--epsilon", type=float)
    noise.add_argument("--noise-sigma", type=float)
    p.add_argument("--known-d", type=int)
    p.add_argument("--known-ds", type=int)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_estimate)

    p = sub.add_parser("realize", help="minimal contractive linear realization")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--hankel-n", type=int)
    p.add_argument("--raw", action="store_true", help="skip the contraction step")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_realize)

    p = sub.add_parser("dilate", help="quantum channel reproducing a realization")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--verify", action="store_true")
    p.set_defaults(func=cmd_dilate)

    p = sub.add_parser("spectrum", help="poles and classical dimension bound")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--hankel-n", type=int)
    p.add_argument("--order-max", type=int, default=DEFAULT_ORDER_MAX)
    p.add_argument("--tol", type=float, default=1e-9)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_spectrum)

    p = sub.add_parser("experiment", help="figure reproduction drivers")
    p.add_argument("which", choices=["fig2", "fig1"])
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--trials", type=int, default=20)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--order-max", type=int, default=4)
    p.add_argument("--out")
    p.set_defaults(func=cmd_experiment)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ValidationError as exc:
        detail = ""
        if exc.invariant is not None:
            detail = f" [invariant: {exc.invariant}"
            if exc.residual is not None:
                detail += f"; residual: {exc.residual}"
            detail += "]"
        print(f"error: {exc}{detail}", file=sys.stderr)
        return 2
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3
    except (OSError, EvodimError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
