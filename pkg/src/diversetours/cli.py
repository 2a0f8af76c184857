"""Command line entry point: ``diversetours {run,plan,render,oracle,corr}``.

Exit codes: 0 success, 1 usage error, 2 input error.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import replace
from pathlib import Path

from . import harness
from .decomposition import optimal_population
from .diversity import Population, optimal_gtype
from .ea import COPIES_OF_OPTIMAL, RANDOM_TOURS, EaConfig, run
from .instance import Tour, TSPLIBParseError
from .mutation import MutationKind
from .render import render_edge_counts, render_population

log = logging.getLogger("diversetours")

USAGE_ERROR = 1
INPUT_ERROR = 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(USAGE_ERROR, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="diversetours", description="Evolve diverse sets of TSP tours.")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    r = sub.add_parser("run", help="one EA run")
    src = r.add_mutually_exclusive_group(required=True)
    src.add_argument("--instance", metavar="PATH", help=".tsp file or bundled name (eil51, ...)")
    src.add_argument("--unit", type=int, metavar="N", help="unit-weight complete graph on N vertices")
    r.add_argument("--opt-tour", metavar="PATH")
    r.add_argument("--mu", type=int, default=3)
    r.add_argument("--alpha", type=float, default=0.0)
    r.add_argument("--measure", choices=("ed", "pd"), default="ed")
    r.add_argument("--mutation", choices=("2opt", "3opt", "4opt"), default="2opt")
    r.add_argument("--mutation-style", choices=("inversions", "reconnect"), default="inversions")
    r.add_argument("--max-iters", type=int)
    r.add_argument("--ties", choices=("random", "last"), default="random",
                   help="survival tie rule (default: random)")
    r.add_argument("--seed", type=int, default=0)
    r.add_argument("--out", metavar="DIR")
    r.add_argument("--format", choices=("csv", "jsonl"), default="csv")

    pl = sub.add_parser("plan", help="run an experiment preset")
    pl.add_argument("--preset", choices=sorted(harness.PRESETS), required=True)
    pl.add_argument("--replicates", type=int)
    pl.add_argument("--seed-base", type=int, default=0)
    pl.add_argument("--jobs", type=int, default=1)
    pl.add_argument("--max-iters", type=int)
    pl.add_argument("--ties", choices=("random", "last"))
    pl.add_argument("--out", metavar="DIR")
    pl.add_argument("--format", choices=("csv", "jsonl"), default="csv")
    pl.add_argument("--keep-populations", action="store_true")

    rd = sub.add_parser("render", help="draw a stored run as SVG")
    rd.add_argument("--record", metavar="PATH", required=True,
                    help="run.json from `run`, or populations.jsonl from `plan`")
    rd.add_argument("--index", type=int, default=0, help="line of a populations.jsonl file")
    rd.add_argument("--style", choices=("edge-counts", "population"), default="edge-counts")
    rd.add_argument("--out", metavar="FILE", help="default: stdout")

    o = sub.add_parser("oracle", help="optimal gtype and an optimal population")
    o.add_argument("--n", type=int, required=True)
    o.add_argument("--mu", type=int, required=True)

    c = sub.add_parser("corr", help="Pearson correlation of sigma and div")
    c.add_argument("--records", metavar="PATH", required=True)
    c.add_argument("--scatter", metavar="PATH", help="write (sigma, div) pairs as CSV")
    return p


def _cmd_run(args) -> int:
    if args.mu < 1:
        raise UsageError("--mu must be >= 1")
    if args.unit is not None:
        if args.unit < 3:
            raise UsageError("--unit needs N >= 3")
        spec = harness.InstanceSpec("unit", n=args.unit)
    else:
        spec = harness.InstanceSpec.parse(args.instance)
        if args.opt_tour:
            spec = replace(spec, opt_path=args.opt_tour)
    instance, opt_tour = spec.load()
    config = EaConfig(
        mu=args.mu,
        measure=args.measure.upper(),
        mutation=MutationKind.parse(args.mutation, args.mutation_style),
        alpha=args.alpha,
        max_iters=args.max_iters,
        init_mode=RANDOM_TOURS if spec.kind == "unit" else COPIES_OF_OPTIMAL,
        seed=args.seed,
        ties=args.ties,
    )
    record = harness._relabel(run(config, instance, opt_tour), spec.label)
    print(harness.format_records([record], "csv"), end="")
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        harness.emit_records([record], out / f"records.{args.format}", args.format)
        (out / "run.json").write_text(json.dumps(harness.run_document(record, spec), indent=1))
        log.info("wrote %s", out)
    return 0


def _cmd_plan(args) -> int:
    if args.jobs < 1:
        raise UsageError("--jobs must be >= 1")
    plan = harness.preset(args.preset, replicates=args.replicates,
                          seed_base=args.seed_base, max_iters=args.max_iters,
                          ties=args.ties)
    records, rows = harness.run_plan(plan, jobs=args.jobs, output_dir=args.out,
                                     fmt=args.format, keep_populations=args.keep_populations)
    print(harness.format_summary(rows))
    return 0


def _load_document(path: str, index: int) -> dict:
    text = Path(path).read_text()
    if path.endswith(".jsonl"):
        lines = [ln for ln in text.splitlines() if ln.strip()]
        if not 0 <= index < len(lines):
            raise UsageError(f"--index {index} out of range for {len(lines)} runs")
        return json.loads(lines[index])
    return json.loads(text)


def _cmd_render(args) -> int:
    doc = _load_document(args.record, args.index)
    spec = harness.InstanceSpec.from_dict(doc["instance_spec"])
    instance, opt_tour = spec.load()
    pop = Population([Tour(tuple(t)) for t in doc["population"]], instance.n)
    if args.style == "edge-counts":
        svg = render_edge_counts(pop, instance, opt_tour)
    else:
        svg = render_population(pop, instance)
    if args.out:
        Path(args.out).write_text(svg)
    else:
        sys.stdout.write(svg)
    return 0


def _cmd_oracle(args) -> int:
    if args.n < 3 or args.mu < 1:
        raise UsageError("need --n >= 3 and --mu >= 1")
    tours = optimal_population(args.n, args.mu)
    lines = [
        f"NAME : optimal_n{args.n}_mu{args.mu}",
        "TYPE : POPULATION",
        f"DIMENSION : {args.n}",
        f"SIZE : {args.mu}",
        f"OPTIMAL_GTYPE : {optimal_gtype(args.n, args.mu)}",
        "TOUR_SECTION",
    ]
    lines += [" ".join(str(v + 1) for v in t.perm) + " -1" for t in tours]
    lines.append("EOF")
    print("\n".join(lines))
    return 0


def _cmd_corr(args) -> int:
    records = harness.read_records(args.records)
    report = harness.correlation_report(records)
    print(f"runs={report.runs} pearson_r={report.r:.4f} p={report.p_value:.3g}")
    if args.scatter:
        Path(args.scatter).write_text(report.scatter_csv())
    return 0


COMMANDS = {
    "run": _cmd_run,
    "plan": _cmd_plan,
    "render": _cmd_render,
    "oracle": _cmd_oracle,
    "corr": _cmd_corr,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        return COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"diversetours: error: {exc}", file=sys.stderr)
        return USAGE_ERROR
    except (OSError, TSPLIBParseError, KeyError, ValueError, json.JSONDecodeError) as exc:
        print(f"diversetours: input error: {exc}", file=sys.stderr)
        return INPUT_ERROR


if __name__ == "__main__":
    sys.exit(main())
