"""Command line entry point: ``dephase-lab sample|experiment|verify|list``."""

from __future__ import annotations

import argparse
import dataclasses
import json
import os
import sys

from .experiments import REGISTRY, RunConfig, default_workers, registry, run_experiment, write_outputs
from .interaction import parse_interaction
from .sampling import InfeasibleEnsembleError, parse_ensemble

SEED_ENV = "DEPHASE_LAB_SEED"


def _int_list(text: str) -> list[int]:
    try:
        values = [int(v) for v in text.replace(",", " ").split()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected integers, got {text!r}") from None
    if not values or any(v < 1 for v in values):
        raise argparse.ArgumentTypeError(f"expected positive integers, got {text!r}")
    return values


def _positive_int(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
    if v < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return v


def _positive_float(text: str) -> float:
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a number, got {text!r}") from None
    if not v > 0:
        raise argparse.ArgumentTypeError("must be > 0")
    return v


def _seed_default() -> int | None:
    raw = os.environ.get(SEED_ENV)
    if raw is None or raw == "":
        return None
    try:
        return int(raw)
    except ValueError:
        return None


def _run_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--qubits", type=_int_list, help="qubit count(s), e.g. 3 or 2,4,6")
    p.add_argument("--samples", type=_positive_int, default=10_000,
                   help="samples per series (accepted samples for rejection ensembles)")
    p.add_argument("--seed", type=int, help=f"run seed (default: ${SEED_ENV}, else 0)")
    p.add_argument("--workers", type=_positive_int, help="worker processes (default: available cores)")
    p.add_argument("--ensemble", help="haar | separable | clusters=2+2+2 | energy=E[:delta] | dicke=N")
    p.add_argument("--interaction", help="per-qubit tokens, e.g. z,2z or 0:0:0:1,i")
    p.add_argument("--interacting", type=_int_list, help="couple only qubits 1..k")
    p.add_argument("--bins", type=_positive_float, default=0.05, help="bin width in Q for binned means")
    p.add_argument("--min-count", type=_positive_int, default=200, help="minimum samples per reported bin")
    p.add_argument("--delta", type=_positive_float, help="energy window half-width")
    p.add_argument("--out", help="CSV path (default: stdout)")
    p.add_argument("--summary", help="JSON summary path")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dephase-lab",
        description="Sample qubit ensembles, dephase them, and relate final entropy to initial entanglement.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("sample", help="ad-hoc ensemble under one interaction")
    _run_flags(p)

    p = sub.add_parser("experiment", help="run a named experiment from the catalog")
    p.add_argument("name", help="experiment name (see `list`)")
    _run_flags(p)

    p = sub.add_parser("verify", help="run the acceptance checks and report pass/fail")
    p.add_argument("--seed", type=int, help=f"seed (default: ${SEED_ENV}, else 7)")
    p.add_argument("--tol-scale", type=float, default=1.0, help="multiply every tolerance by this factor")
    p.add_argument("--properties-only", action="store_true", help="skip the sampled statistics")
    p.add_argument("--sample-scale", type=_positive_float, default=1.0, help="scale all sample counts")
    p.add_argument("--out", help="also write the report as JSON here")

    sub.add_parser("list", help="list the named experiments")
    return parser


def _config(args, parser) -> RunConfig:
    seed = args.seed if args.seed is not None else _seed_default()
    name = "sample" if args.command == "sample" else args.name
    if name != "sample" and name not in REGISTRY:
        parser.error(f"unknown experiment {name!r}; try `dephase-lab list`")
    if args.command == "sample":
        if not args.qubits or len(args.qubits) != 1:
            parser.error("sample needs exactly one --qubits value")
        n = args.qubits[0]
        try:
            parse_ensemble(args.ensemble or "haar", n, args.samples, seed or 0)
            if args.interaction:
                spec = parse_interaction(args.interaction)
                if spec.n_qubits != n:
                    parser.error(f"--interaction has {spec.n_qubits} qubits but --qubits is {n}")
        except ValueError as exc:
            parser.error(str(exc))
    return RunConfig(
        experiment=name,
        qubits=args.qubits,
        samples=args.samples,
        seed=0 if seed is None else seed,
        workers=args.workers or default_workers(),
        ensemble=args.ensemble,
        interaction=args.interaction,
        interacting=args.interacting,
        bin_width=args.bins,
        min_count=args.min_count,
        delta=args.delta,
        out=args.out,
        summary=args.summary,
    )


def _verify(args) -> int:
    from .verify import DEFAULT_SEED, run_all

    seed = args.seed if args.seed is not None else _seed_default()
    seed = DEFAULT_SEED if seed is None else seed
    checks = run_all(seed, args.tol_scale, args.properties_only, args.sample_scale,
                     log=lambda line: print(line, flush=True))
    failed = [c for c in checks if not c.passed]
    print(f"{len(checks) - len(failed)}/{len(checks)} checks passed")
    if failed:
        print(f"first failure: C{failed[0].criterion} {failed[0].name}")
    if args.out:
        with open(args.out, "w") as fh:
            json.dump({"seed": seed, "checks": [dataclasses.asdict(c) for c in checks]}, fh, indent=2)
            fh.write("\n")
    return 1 if failed else 0


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "list":
        for name, desc in registry().items():
            print(f"{name:12s} {desc}")
        return 0
    try:
        if args.command == "verify":
            return _verify(args)
        cfg = _config(args, parser)
        csv_text, summary = run_experiment(cfg)
        write_outputs(cfg, csv_text, summary)
    except InfeasibleEnsembleError as exc:
        print(f"dephase-lab: {exc} (acceptance rate {exc.acceptance_rate:.3g})", file=sys.stderr)
        return 1
    except (ValueError, OSError, MemoryError) as exc:
        print(f"dephase-lab: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
