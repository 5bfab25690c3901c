"""Command-line entry point: ``binloc simulate | estimate | summarize``.

Exit codes: 0 success, 1 usage or validation error, 2 degenerate posterior.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from binloc.errors import BinlocError, DegeneratePosteriorError
from binloc.inference import importance_sample, resample, summarize
from binloc.rng import ESTIMATE, RESAMPLE, random_stream
from binloc.scenario import load_scenario, read_ensemble, read_readings, write_ensemble, write_readings
from binloc.simulate import simulate_readings

log = logging.getLogger("binloc")

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DEGENERATE = 2


class UsageError(BinlocError):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def cmd_simulate(args) -> int:
    scenario = load_scenario(args.scenario).with_overrides(seed=args.seed)
    if scenario.ground_truth is None:
        raise UsageError("scenario has no ground_truth section to simulate from")
    sim = simulate_readings(scenario.ground_truth, scenario.environment, scenario.origin)
    write_readings(args.out, sim.readings, sim.counts if args.debug_counts else None)
    log.info("wrote %d readings (%d positive) to %s", len(sim.readings), sim.readings.n_positive, args.out)
    return EXIT_OK


def cmd_estimate(args) -> int:
    scenario = load_scenario(args.scenario).with_overrides(seed=args.seed, samples=args.samples)
    readings = read_readings(args.readings)
    if len(readings) == 0:
        raise UsageError(f"{args.readings} contains no readings")
    spec = scenario.prior_spec(readings)
    ensemble = importance_sample(
        readings, spec, scenario.environment, scenario.samples, random_stream(scenario.seed, ESTIMATE), scenario.origin
    )
    resampled = resample(ensemble, random_stream(scenario.seed, RESAMPLE))
    summary = summarize(ensemble)

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    write_ensemble(out / "ensemble_weighted.csv", ensemble)
    write_ensemble(out / "ensemble_resampled.csv", resampled)
    doc = summary.to_dict()
    doc["samples"] = len(ensemble)
    doc["weight_sum"] = float(ensemble.weights.sum())
    doc["prior_support_area_m2"] = spec.region.support_area()
    if spec.region.disc is not None:
        d = spec.region.disc
        doc["prior_disc"] = {"center_m": [d.center.x, d.center.y], "radius_m": d.radius}
    (out / "summary.json").write_text(json.dumps(doc, indent=2) + "\n")
    log.info("ESS %.1f of %d samples; summary in %s", summary.ess, len(ensemble), out / "summary.json")
    return EXIT_OK


def cmd_summarize(args) -> int:
    ensemble = read_ensemble(args.ensemble)
    doc = summarize(ensemble).to_dict()
    doc["samples"] = len(ensemble)
    text = json.dumps(doc, indent=2) + "\n"
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="binloc", description="Localise a continuous release from binary sensor readings.")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("simulate", help="generate synthetic readings from the scenario ground truth")
    p.add_argument("--scenario", required=True)
    p.add_argument("--out", required=True, help="readings CSV to write")
    p.add_argument("--seed", type=int)
    p.add_argument("--debug-counts", action="store_true", help="add the raw encounter counts as column z")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("estimate", help="importance-sample the posterior for a readings file")
    p.add_argument("--scenario", required=True)
    p.add_argument("--readings", required=True)
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--seed", type=int)
    p.add_argument("--samples", type=int)
    p.set_defaults(func=cmd_estimate)

    p = sub.add_parser("summarize", help="summary statistics of an ensemble CSV")
    p.add_argument("--ensemble", required=True)
    p.add_argument("--out")
    p.set_defaults(func=cmd_summarize)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        return args.func(args)
    except DegeneratePosteriorError as exc:
        print(f"binloc: degenerate posterior: {exc}", file=sys.stderr)
        return EXIT_DEGENERATE
    except BinlocError as exc:
        print(f"binloc: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
