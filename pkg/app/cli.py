"""
Command line entry point: `python -m app.cli <command> ...`

Exit status: 0 on success, 1 when a verification check fails or a
replication aborts, 2 on invalid input or configuration.
"""
import argparse
import json
import logging
import os
import sys
from typing import List, Optional

import numpy as np
from pydantic import BaseModel, ValidationError

from app.config import configure_logging, settings
from app.exceptions import BilateralTradeError
from app.models import GridKind
from app.models.lower_bound import TwoBitLBParams
from app.schemas.adversary import AdversarySpec
from app.schemas.benchmark import SequenceIn
from app.schemas.experiment import ExperimentConfig, SimulationRequest
from app.schemas.verification import VerifyScale
from app.services.adversary_service import AdversaryService
from app.services.benchmark_service import BenchmarkService
from app.services.experiment_service import ExperimentService
from app.services.grid_service import GridService
from app.services.lower_bound_service import LowerBoundService
from app.services.storage_service import StorageService
from app.services.verification_service import SUITES, VerificationService

logger = logging.getLogger("app.cli")

EXIT_OK, EXIT_FAILED, EXIT_USAGE = 0, 1, 2
FAMILIES = ("iid", "full-lb", "twobit-lb", "gap", "alpha-lb")


def _horizons(values: List[str]) -> List[int]:
    out = []
    for v in values:
        out.extend(int(x) for x in v.split(",") if x.strip())
    return out


def _emit(payload, as_json: bool, out: Optional[str] = None) -> None:
    if isinstance(payload, BaseModel):
        text = payload.model_dump_json(indent=2)
    else:
        text = json.dumps(payload, indent=2, sort_keys=True)
    if out:
        StorageService._write_text(out, text + "\n")
    if as_json or not out:
        print(text)


def _common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--seed", type=int, default=None, help="master seed (default: DEFAULT_MASTER_SEED)")
    parser.add_argument("--out", default=None, help="output file or directory")
    parser.add_argument("--json", action="store_true", help="print JSON to stdout")


def _adversary_args(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--N", type=int, default=None, help="two-bit instance family size")
    parser.add_argument("--k", type=int, default=None, help="two-bit instance index")
    parser.add_argument("--eps", type=float, default=None, help="perturbation / gap epsilon")
    parser.add_argument("--w5-literal", action="store_true", help="place W5 at (0, (1-l)/2)")
    parser.add_argument("--variant", choices=("S1", "S2"), default=None, help="alpha-lb sequence")


def _spec_from_args(args, base: Optional[AdversarySpec] = None) -> AdversarySpec:
    data = base.model_dump() if base else {}
    family = getattr(args, "family", None) or getattr(args, "adversary", None)
    if family:
        data["family"] = family
    for key, attr in (("N", "N"), ("k", "k"), ("eps", "eps"), ("alpha_variant", "variant")):
        value = getattr(args, attr, None)
        if value is not None:
            data[key] = value
    if getattr(args, "w5_literal", False):
        data["w5_upper"] = False
    return AdversarySpec(**data)


# -- commands ---------------------------------------------------------------------------

def cmd_simulate(args) -> int:
    if args.sequence:
        seq = StorageService.load_sequence(args.sequence)
        request = SimulationRequest(
            algo=args.algo or "full",
            sequence=SequenceIn(s=seq.s.tolist(), b=seq.b.tolist()),
            seed=args.seed if args.seed is not None else settings.DEFAULT_MASTER_SEED,
            include_benchmarks=True,
        )
        trace, response = ExperimentService.simulate_once(request)
        if args.out:
            StorageService.save_trace(trace, os.path.join(args.out, "trace.csv"))
            StorageService.save_json(response, os.path.join(args.out, "summary.json"))
        _emit(response, args.json or not args.out)
        return EXIT_OK

    base = None
    if args.config:
        with open(args.config, encoding="utf-8") as f:
            base = ExperimentConfig.model_validate_json(f.read())
    data = base.model_dump() if base else {}
    if args.algo:
        data["algo"] = args.algo
    if args.T:
        data["horizons"] = _horizons(args.T)
    if args.reps is not None:
        data["replications"] = args.reps
    if args.seed is not None:
        data["master_seed"] = args.seed
    if args.out:
        data["out_dir"] = args.out
    if args.workers is not None:
        data["workers"] = args.workers
    if args.save_traces:
        data["save_traces"] = True
    data["adversary"] = _spec_from_args(args, base.adversary if base else None).model_dump()
    config = ExperimentConfig(**data)

    result = ExperimentService.run(config)
    if args.json:
        _emit(result, True)
    else:
        for row in result.horizons:
            print(f"T={row.T} mean_regret={StorageService.fmt(row.mean_regret)} "
                  f"std={StorageService.fmt(row.std_regret)} mean_budget={StorageService.fmt(row.mean_budget)} "
                  f"no_phase_two={row.no_phase_two_fraction:.3f} bound_vacuous={row.bound_vacuous}")
        if result.slope:
            print(f"slope={result.slope.slope:.4f} CI95=[{result.slope.ci_low:.4f}, {result.slope.ci_high:.4f}]")
        for name, path in result.artifacts.items():
            print(f"{name}: {path}")
    return EXIT_OK if result.ok else EXIT_FAILED


def cmd_benchmark(args) -> int:
    seq = StorageService.load_sequence(args.sequence)
    report = BenchmarkService.hindsight_report(seq, args.which)
    _emit(report, args.json, args.out)
    return EXIT_OK


def cmd_adversary_emit(args) -> int:
    spec = _spec_from_args(args)
    seed = args.seed if args.seed is not None else settings.DEFAULT_MASTER_SEED
    seq = ExperimentService.make_sequence(spec, args.T, np.random.default_rng(seed))
    if args.out:
        StorageService.save_sequence(seq, args.out)
        logger.info("Wrote %d rounds of %s to %s", len(seq), spec.family, args.out)
    else:
        sys.stdout.write(StorageService.sequence_to_csv(seq))
    return EXIT_OK


def cmd_adversary_report(args) -> int:
    seed = args.seed if args.seed is not None else settings.DEFAULT_MASTER_SEED
    rng = np.random.default_rng(seed)
    family = args.family
    if family == "twobit-lb":
        params = TwoBitLBParams.build(args.N or 64, args.k or 0, args.eps, w5_upper=not args.w5_literal)
        report = LowerBoundService.twobit_lb_structure_report(params)
        _emit(report, args.json, args.out)
        return EXIT_OK if report.passed else EXIT_FAILED
    if family == "gap":
        report = AdversaryService.gap_mixture(args.eps or 0.05, args.T)
        _emit(report, args.json, args.out)
        return EXIT_OK if report.holds else EXIT_FAILED
    if family == "full-lb":
        payload = {
            "case_table": AdversaryService.full_lb_case_table().model_dump(),
            "best_price": AdversaryService.full_lb_best_price_estimate(args.T, args.reps, rng).model_dump(),
        }
        _emit(payload, args.json, args.out)
        return EXIT_OK if payload["best_price"]["passed"] else EXIT_FAILED
    if family == "alpha-lb":
        report = AdversaryService.alpha_lb_report(args.T, rng, args.algo)
        _emit(report, args.json, args.out)
        return EXIT_OK if report.reference.holds else EXIT_FAILED
    raise ValueError(f"No report for family {family}")


def cmd_grid_dump(args) -> int:
    grid = GridService.build(GridKind(args.kind), args.K, args.T)
    rows = [{"p": StorageService.fmt(p), "q": StorageService.fmt(q)} for p, q in zip(grid.p.tolist(), grid.q.tolist())]
    if args.json or not args.out:
        _emit({"kind": grid.kind.value, "K": grid.K, "T": grid.T, "size": len(grid), "pairs": rows}, True)
    if args.out:
        text = "p,q\n" + "".join(f"{r['p']},{r['q']}\n" for r in rows)
        StorageService._write_text(args.out, text)
    return EXIT_OK


def cmd_verify(args) -> int:
    seed = args.seed if args.seed is not None else settings.DEFAULT_MASTER_SEED
    scale = VerifyScale.quick() if args.quick else VerifyScale()
    report = VerificationService.verify(args.suite, seed, scale, args.workers, args.N)
    if args.json or args.out:
        _emit(report, args.json, args.out)
    if not args.json:
        for suite in report.suites:
            for c in suite.checks:
                status = "PASS" if c.passed else ("INFO" if c.informational else "FAIL")
                print(f"[{status}] {suite.suite}/{c.name}: lhs={c.lhs!r} rhs={c.rhs!r} {c.detail}")
        summary = report.summary()
        print(f"{summary['checks']} checks, {summary['failed']} failed")
    return report.exit_code


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="app.cli", description="Repeated bilateral trade under global budget balance")
    parser.add_argument("--log-level", default=None, help="override LOG_LEVEL")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="run GFT-Max replications over one or more horizons")
    _common(p)
    p.add_argument("--algo", choices=("full", "onebit", "one-bit"), default=None)
    p.add_argument("--adversary", choices=FAMILIES, default=None)
    p.add_argument("--T", nargs="+", default=None, help="horizons, e.g. --T 256 1024 or --T 256,1024")
    p.add_argument("--reps", type=int, default=None)
    p.add_argument("--workers", type=int, default=None)
    p.add_argument("--save-traces", action="store_true")
    p.add_argument("--config", default=None, help="ExperimentConfig JSON file; flags override its values")
    p.add_argument("--seq", "--sequence", dest="sequence", default=None,
                   help="single run against an s,b CSV instead of a generated adversary")
    _adversary_args(p)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("benchmark", help="hindsight benchmarks of an s,b CSV")
    _common(p)
    p.add_argument("--seq", "--sequence", dest="sequence", required=True, help="s,b CSV file")
    p.add_argument("--which", choices=("fixed", "distribution", "both"), default="both")
    p.set_defaults(func=cmd_benchmark)

    adversary = sub.add_parser("adversary", help="valuation sequence generators").add_subparsers(dest="action", required=True)
    p = adversary.add_parser("emit", help="write a generated sequence as s,b CSV")
    _common(p)
    p.add_argument("--family", choices=FAMILIES, default="iid")
    p.add_argument("--T", type=int, required=True)
    _adversary_args(p)
    p.set_defaults(func=cmd_adversary_emit)

    p = adversary.add_parser("report", help="exact report of a lower-bound or separation instance")
    _common(p)
    p.add_argument("--family", choices=("twobit-lb", "gap", "full-lb", "alpha-lb"), required=True)
    p.add_argument("--T", type=int, default=400)
    p.add_argument("--reps", type=int, default=10_000)
    p.add_argument("--algo", choices=("full", "one-bit"), default="full")
    _adversary_args(p)
    p.set_defaults(func=cmd_adversary_report)

    grid = sub.add_parser("grid", help="price grids").add_subparsers(dest="action", required=True)
    p = grid.add_parser("dump", help="list the pairs of a grid")
    _common(p)
    p.add_argument("--kind", choices=[k.value for k in GridKind], required=True)
    p.add_argument("--K", type=int, required=True)
    p.add_argument("--T", type=int, default=None, help="horizon (revenue grid only)")
    p.set_defaults(func=cmd_grid_dump)

    p = sub.add_parser("verify", help="run property-check suites")
    _common(p)
    p.add_argument("suite", choices=SUITES + ("all",))
    p.add_argument("--N", type=int, default=None, help="restrict lb-structure to one family size")
    p.add_argument("--quick", action="store_true", help="reduced workloads")
    p.add_argument("--workers", type=int, default=None)
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    configure_logging(args.log_level)
    try:
        return args.func(args)
    except (ValidationError, ValueError, OSError) as e:
        # ConfigurationError, ConstructionError and SequenceFormatError are ValueErrors
        logger.error("%s", e)
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except BilateralTradeError as e:
        logger.error("Run aborted: %s", e)
        return EXIT_FAILED


if __name__ == "__main__":
    sys.exit(main())
