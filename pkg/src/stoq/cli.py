"""Command-line entry point: ``stoq <subcommand> [options]``.

Options come from an optional JSON config file, then from flags; flags win.
Exit codes: 0 success, 2 configuration error, 3 numerical failure.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

import numpy as np

from .compiler import END, LAST, RANDOM, StoqConfig, compile
from .experiments import (
    ConfigError,
    ExperimentConfig,
    NumericalError,
    run_experiment,
    write_trace,
)
from .gates import format_sequence, hamiltonian_term_alphabet, universal_alphabet
from .hamiltonian import PRESETS, load_hamiltonian, preset
from .linalg import is_unitary
from .random_targets import load_matrix

EXIT_CONFIG = 2
EXIT_NUMERICAL = 3


def _add_common(p: argparse.ArgumentParser) -> None:
    # defaults are None so that unset flags do not override the config file
    p.add_argument("--config", help="JSON file with ExperimentConfig fields")
    p.add_argument("--preset", choices=sorted(PRESETS))
    p.add_argument("--hamiltonian", help="Hamiltonian text file")
    p.add_argument("--qubits", type=int)
    p.add_argument("--iterations", type=int)
    p.add_argument("--runs", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--delta-beta", type=float)
    p.add_argument("--p-append", type=float)
    p.add_argument("--insertion", choices=[END, RANDOM])
    p.add_argument("--removal", choices=[LAST, RANDOM])
    p.add_argument("--epsilon", type=float, help="term-gate time bound factor (default 0.2)")
    p.add_argument("--tau", type=float, help="evolution time (default 0.5)")
    p.add_argument("--trotter-steps", type=int, help="default 10")
    p.add_argument("--qdrift-reps", type=int, help="default 1000")
    p.add_argument("--grid-points", type=int, help="default 1001")
    p.add_argument("--jobs", type=int)
    p.add_argument("--allow-large", action="store_true", default=None,
                   help="permit slow runs on more than 7 qubits")
    p.add_argument("--out", help="output directory")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="stoq", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    for name, text in [
        ("cost-curves", "cost vs iteration for time-evolution targets"),
        ("path-compare", "path distances for STOQ, randomized Trotter and QDRIFT"),
        ("random-unitary", "compile Haar-random targets"),
    ]:
        _add_common(sub.add_parser(name, help=text))

    p = sub.add_parser("depth-sweep", help="compile random circuits of increasing depth")
    _add_common(p)
    p.add_argument("--depths", type=float, nargs="+")
    p.add_argument("--circuit-alphabet", choices=["universal", "single-qubit"],
                   help="gates the random target circuits are drawn from (default universal)")
    p.add_argument("--plateau", type=float, help="fixed plateau; measured when omitted")
    p.add_argument("--plateau-runs", type=int)

    p = sub.add_parser("param-sweep", help="grid over delta-beta and p-append")
    _add_common(p)
    p.add_argument("--sweep-delta-betas", type=float, nargs="+")
    p.add_argument("--sweep-p-appends", type=float, nargs="+")

    p = sub.add_parser("compile", help="single compilation from files")
    p.add_argument("--target", help="matrix file; defaults to exp(i H tau)")
    p.add_argument("--preset", choices=sorted(PRESETS))
    p.add_argument("--hamiltonian", help="Hamiltonian text file")
    p.add_argument("--alphabet", choices=["terms", "universal"], default=None,
                   help="terms of the Hamiltonian, or R/XX gates (default)")
    p.add_argument("--iterations", type=int, default=10_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--delta-beta", type=float, default=0.3)
    p.add_argument("--p-append", type=float, default=0.5)
    p.add_argument("--insertion", choices=[END, RANDOM], default=END)
    p.add_argument("--removal", choices=[LAST, RANDOM], default=LAST)
    p.add_argument("--epsilon", type=float, default=0.2)
    p.add_argument("--tau", type=float, default=0.5)
    p.add_argument("--out", default="compiled")
    return parser


def load_config(args: argparse.Namespace) -> ExperimentConfig:
    data = {}
    if args.config:
        try:
            data = json.loads(Path(args.config).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {args.config}: {exc}") from None
        if not isinstance(data, dict):
            raise ConfigError("config file must hold a JSON object")
    data["experiment"] = args.command
    for key, value in vars(args).items():
        if key in ("command", "config", "verbose") or value is None:
            continue
        data[key] = value
    if args.preset is not None:
        data.pop("hamiltonian", None)
    elif args.hamiltonian is not None:
        data.pop("preset", None)
    try:
        return ExperimentConfig.from_dict(data)
    except TypeError as exc:
        raise ConfigError(str(exc)) from None


def run_compile(args: argparse.Namespace) -> dict:
    ham = None
    if args.preset and args.hamiltonian:
        raise ConfigError("give at most one of --preset and --hamiltonian")
    if args.preset:
        ham = preset(args.preset)
    elif args.hamiltonian:
        ham = load_hamiltonian(args.hamiltonian)

    if args.target:
        target = load_matrix(args.target)
    elif ham is not None:
        target = ham.time_evolution(args.tau)
    else:
        raise ConfigError("need --target or a Hamiltonian")
    if not is_unitary(target):
        raise ConfigError("target matrix is not unitary")
    n = int(round(np.log2(target.shape[0])))
    if 2**n != target.shape[0]:
        raise ConfigError("target dimension is not a power of two")

    kind = args.alphabet or ("terms" if ham is not None and not args.target else "universal")
    if kind == "terms":
        if ham is None:
            raise ConfigError("the terms alphabet needs a Hamiltonian")
        alphabet = hamiltonian_term_alphabet(ham, args.epsilon, args.tau)
    else:
        alphabet = universal_alphabet(n)
    if alphabet.n != n:
        raise ConfigError("alphabet and target act on different qubit counts")

    try:
        cfg = StoqConfig(args.iterations, args.delta_beta, args.p_append, None, args.seed,
                         args.insertion, args.removal)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    seq, trace = compile(target, alphabet, cfg)
    if not np.isfinite(trace.final_cost):
        raise NumericalError("non-finite cost")

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    (out / "sequence.txt").write_text(format_sequence(seq))
    write_trace(out / "trace.csv", trace)
    summary = {
        "final_cost": trace.final_cost,
        "gates": len(seq),
        "alphabet": kind,
        "seed": args.seed,
        "iterations": args.iterations,
    }
    if all(d is not None for d in seq.durations()):
        summary["total_time"] = seq.total_time()
    (out / "summary.json").write_text(json.dumps(summary, indent=2, sort_keys=True) + "\n")
    return summary


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        if args.command == "compile":
            summary = run_compile(args)
            print(f"final cost {summary['final_cost']:.6f} with {summary['gates']} gates -> {args.out}")
        else:
            cfg = load_config(args)
            summary = run_experiment(cfg)
            print(f"{cfg.experiment}: wrote {len(summary['manifest']['files'])} files to {cfg.out}")
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (NumericalError, np.linalg.LinAlgError, FloatingPointError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except ValueError as exc:
        # malformed input files surface as ValueError from the parsers
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    return 0


if __name__ == "__main__":
    sys.exit(main())
