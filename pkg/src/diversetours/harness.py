"""Experiment plans, per-run record files and summaries."""
from __future__ import annotations

import csv
import io
import itertools
import json
import math
import os
from collections import defaultdict
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .diversity import MEASURES, TIE_RANDOM, tie_code
from .ea import COPIES_OF_OPTIMAL, RANDOM_TOURS, EaConfig, RunRecord, run
from .instance import BUNDLED, Instance, Tour, bundled, load_opt_tour, load_tsplib
from .mutation import MutationKind

CSV_COLUMNS = (
    "instance", "n", "mu", "alpha", "measure", "mutation", "seed",
    "iterations", "terminated", "gtype", "gtype_percent", "div", "sigma",
)
_INT_COLUMNS = {"n", "mu", "seed", "iterations", "gtype"}
_FLOAT_COLUMNS = {"alpha", "gtype_percent", "div", "sigma"}

ALPHAS = (0.05, 0.2, 0.5, 1.0)
MUTATIONS = ("2opt", "3opt", "4opt")


@dataclass(frozen=True)
class InstanceSpec:
    """Where an instance comes from: ``unit`` (size only), ``bundled`` or ``tsplib`` (paths)."""

    kind: str
    n: int | None = None
    name: str | None = None
    path: str | None = None
    opt_path: str | None = None

    @classmethod
    def parse(cls, text: str) -> "InstanceSpec":
        """``"unit:50"``, ``"eil51"`` or a path to a ``.tsp`` file."""
        if text.startswith("unit:"):
            return cls("unit", n=int(text[5:]))
        if text in BUNDLED:
            return cls("bundled", name=text)
        opt = text[: -len(".tsp")] + ".opt.tour" if text.endswith(".tsp") else None
        return cls("tsplib", path=text, opt_path=opt if opt and os.path.exists(opt) else None)

    @property
    def label(self) -> str:
        if self.kind == "unit":
            return f"unit{self.n}"
        if self.kind == "bundled":
            return self.name
        return Path(self.path).name.removesuffix(".tsp")

    def load(self) -> tuple[Instance, Tour | None]:
        if self.kind == "unit":
            return Instance.unit(self.n), None
        if self.kind == "bundled":
            instance, tour = bundled(self.name)
            if self.opt_path:
                tour = load_opt_tour(self.opt_path, instance)
            return instance, tour
        instance = load_tsplib(self.path)
        tour = load_opt_tour(self.opt_path, instance) if self.opt_path else None
        return instance, tour

    def to_dict(self) -> dict:
        return {k: v for k, v in asdict(self).items() if v is not None}

    @classmethod
    def from_dict(cls, d: dict) -> "InstanceSpec":
        return cls(**d)


@dataclass(frozen=True)
class ExperimentPlan:
    instances: tuple[InstanceSpec, ...]
    mus: tuple[int, ...]
    alphas: tuple[float, ...] = (0.0,)
    measures: tuple[str, ...] = MEASURES
    mutations: tuple[str, ...] = MUTATIONS
    replicates: int = 30
    seed_base: int = 0
    max_iters: int | None = None
    ties: str = TIE_RANDOM

    def __post_init__(self):
        if self.replicates < 1:
            raise ValueError("replicates must be >= 1")
        for name in ("instances", "mus", "alphas", "measures", "mutations"):
            if not getattr(self, name):
                raise ValueError(f"empty grid: no {name}")
        if any(m < 1 for m in self.mus):
            raise ValueError(f"invalid mu values {self.mus}")
        if any(not a >= 0 for a in self.alphas):
            raise ValueError(f"invalid alpha values {self.alphas}")
        for m in self.measures:
            if m.upper() not in MEASURES:
                raise ValueError(f"invalid measure {m!r}")
        for m in self.mutations:
            MutationKind.parse(m)
        tie_code(self.ties)

    def expand(self) -> list[tuple[InstanceSpec, EaConfig]]:
        """Jobs ordered by (instance, mu, alpha, measure, mutation, replicate)."""
        jobs = []
        for spec in self.instances:
            init = RANDOM_TOURS if spec.kind == "unit" else COPIES_OF_OPTIMAL
            alphas = (0.0,) if spec.kind == "unit" else self.alphas
            grid = itertools.product(
                self.mus, alphas, self.measures, self.mutations, range(self.replicates)
            )
            for mu, alpha, measure, mutation, rep in grid:
                cfg = EaConfig(
                    mu=mu,
                    measure=measure,
                    mutation=MutationKind.parse(mutation),
                    alpha=alpha,
                    max_iters=self.max_iters,
                    init_mode=init,
                    seed=self.seed_base + rep,
                    ties=self.ties,
                )
                jobs.append((spec, cfg))
        return jobs


PRESETS = {
    "unconstrained-desk": dict(
        instances=("unit:20", "unit:50"), mus=(3, 5), replicates=10
    ),
    "tsplib-desk": dict(
        instances=("eil51", "eil76"), mus=(3, 10, 20), alphas=ALPHAS, replicates=5
    ),
    "unconstrained-full": dict(
        instances=("unit:50", "unit:100", "unit:200", "unit:500"),
        mus=(3, 10, 20, 50), replicates=30,
    ),
    "tsplib-full": dict(
        instances=BUNDLED, mus=(3, 10, 20, 50), alphas=ALPHAS, replicates=30
    ),
}


def preset(name: str, **overrides) -> ExperimentPlan:
    if name not in PRESETS:
        raise KeyError(f"unknown preset {name!r}; have {', '.join(PRESETS)}")
    kw = dict(PRESETS[name])
    kw.update({k: v for k, v in overrides.items() if v is not None})
    kw["instances"] = tuple(InstanceSpec.parse(s) if isinstance(s, str) else s
                            for s in kw["instances"])
    return ExperimentPlan(**kw)


_LOADED: dict[InstanceSpec, tuple[Instance, Tour | None]] = {}


def _run_job(job) -> RunRecord:
    spec, cfg = job
    if spec not in _LOADED:
        _LOADED[spec] = spec.load()
    instance, opt_tour = _LOADED[spec]
    record = run(cfg, instance, opt_tour)
    # keep the plan's label (e.g. unit20) rather than the parsed NAME field
    return _relabel(record, spec.label)


def _relabel(record: RunRecord, label: str) -> RunRecord:
    if record.instance == label:
        return record
    return replace(record, instance=label)


def run_plan(plan: ExperimentPlan, jobs: int = 1, output_dir=None, fmt: str = "csv",
             keep_populations: bool = False):
    """Run every job of the plan; returns ``(records, summary_rows)``.

    Records come back in plan order regardless of ``jobs``.
    """
    work = plan.expand()
    for spec in plan.instances:
        _LOADED[spec] = spec.load()  # fail early on unreadable instances
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            records = list(pool.map(_run_job, work, chunksize=4))
    else:
        records = [_run_job(job) for job in work]
    rows = summarize(records)
    if output_dir is not None:
        out = Path(output_dir)
        out.mkdir(parents=True, exist_ok=True)
        emit_records(records, out / f"records.{_ext(fmt)}", fmt)
        write_summary(rows, out / "summary.csv")
        if keep_populations:
            with open(out / "populations.jsonl", "w") as fh:
                for (spec, _), rec in zip(work, records):
                    fh.write(json.dumps(run_document(rec, spec)) + "\n")
    return records, rows


# --------------------------------------------------------------------------
# record files


def _ext(fmt: str) -> str:
    if fmt not in ("csv", "jsonl"):
        raise ValueError(f"format must be csv or jsonl, got {fmt!r}")
    return fmt


def _row(record: RunRecord) -> dict:
    return {c: getattr(record, c) for c in CSV_COLUMNS}


def _cell(value) -> str:
    return repr(value) if isinstance(value, float) else str(value)


def format_records(records: Sequence[RunRecord], fmt: str = "csv") -> str:
    if not records:
        raise ValueError("no records to emit")
    buf = io.StringIO()
    if _ext(fmt) == "csv":
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(CSV_COLUMNS)
        for rec in records:
            writer.writerow([_cell(v) for v in _row(rec).values()])
    else:
        for rec in records:
            buf.write(json.dumps(_row(rec)) + "\n")
    return buf.getvalue()


def emit_records(records: Sequence[RunRecord], path, fmt: str | None = None) -> Path:
    path = Path(path)
    fmt = fmt or ("jsonl" if path.suffix == ".jsonl" else "csv")
    text = format_records(records, fmt)
    try:
        path.write_text(text)
    except OSError as exc:
        raise OSError(f"cannot write records to {path}: {exc.strerror}") from exc
    return path


def _coerce(row: dict) -> RunRecord:
    kw = {}
    for c in CSV_COLUMNS:
        v = row[c]
        if c in _INT_COLUMNS:
            v = int(v)
        elif c in _FLOAT_COLUMNS:
            v = float(v)
        kw[c] = v
    return RunRecord(**kw)


def parse_records(text: str, fmt: str = "csv") -> list[RunRecord]:
    if _ext(fmt) == "csv":
        reader = csv.DictReader(io.StringIO(text))
        if tuple(reader.fieldnames or ()) != CSV_COLUMNS:
            raise ValueError(f"unexpected CSV header {reader.fieldnames}")
        return [_coerce(row) for row in reader]
    return [_coerce(json.loads(line)) for line in text.splitlines() if line.strip()]


def read_records(path) -> list[RunRecord]:
    path = Path(path)
    return parse_records(path.read_text(), "jsonl" if path.suffix == ".jsonl" else "csv")


def run_document(record: RunRecord, spec: InstanceSpec) -> dict:
    """Full JSON form of one run, population included, for rendering later."""
    return {
        "instance_spec": spec.to_dict(),
        "record": _row(record),
        "population": [list(t) for t in record.population or ()],
    }


# --------------------------------------------------------------------------
# summaries


SUMMARY_KEYS = ("instance", "n", "mu", "alpha", "measure", "mutation")


def _mean(xs) -> float:
    return math.fsum(xs) / len(xs)


def _std(xs) -> float:
    if len(xs) < 2:
        return 0.0
    m = _mean(xs)
    return math.sqrt(math.fsum((x - m) ** 2 for x in xs) / (len(xs) - 1))


def summarize(records: Iterable[RunRecord]) -> list[dict]:
    """Mean and sample std of gtype%, iterations and sigma per grid cell."""
    groups: dict[tuple, list[RunRecord]] = defaultdict(list)
    for rec in records:
        groups[tuple(getattr(rec, k) for k in SUMMARY_KEYS)].append(rec)
    rows = []
    for key, recs in groups.items():
        row = dict(zip(SUMMARY_KEYS, key))
        row["runs"] = len(recs)
        for col in ("gtype_percent", "iterations", "sigma", "div"):
            xs = [float(getattr(r, col)) for r in recs]
            row[f"{col}_mean"] = _mean(xs)
            row[f"{col}_std"] = _std(xs)
        row["optimum_reached"] = sum(r.terminated == "optimum-reached" for r in recs)
        rows.append(row)
    return rows


def write_summary(rows: Sequence[dict], path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=list(rows[0]), lineterminator="\n")
        writer.writeheader()
        for row in rows:
            writer.writerow({k: _cell(v) for k, v in row.items()})


def format_summary(rows: Sequence[dict]) -> str:
    lines = [
        f"{'instance':>10} {'mu':>4} {'alpha':>5} {'meas':>4} {'mut':>5} "
        f"{'gtype%':>8} {'std':>6} {'#iter':>10} {'std':>9} {'sigma%':>7}"
    ]
    for r in rows:
        lines.append(
            f"{r['instance']:>10} {r['mu']:>4} {r['alpha']:>5} {r['measure']:>4} "
            f"{r['mutation']:>5} {r['gtype_percent_mean']:>8.2f} {r['gtype_percent_std']:>6.2f} "
            f"{r['iterations_mean']:>10.2f} {r['iterations_std']:>9.2f} "
            f"{100 * r['sigma_mean']:>7.2f}"
        )
    return "\n".join(lines)


# --------------------------------------------------------------------------
# correlation


@dataclass(frozen=True)
class CorrelationReport:
    r: float
    p_value: float
    runs: int
    sigma: tuple[float, ...] = field(repr=False)
    div: tuple[float, ...] = field(repr=False)

    def scatter_csv(self) -> str:
        return "sigma,div\n" + "".join(f"{s!r},{d!r}\n" for s, d in zip(self.sigma, self.div))


def correlation_report(records: Sequence[RunRecord]) -> CorrelationReport:
    """Pearson correlation between sigma and div over runs with ``mu >= 2``."""
    from scipy.stats import pearsonr

    pts = [(r.sigma, r.div) for r in records if r.mu >= 2]
    if len(pts) < 3:
        raise ValueError(f"need at least 3 runs with mu >= 2, got {len(pts)}")
    sigma = np.array([p[0] for p in pts])
    div = np.array([p[1] for p in pts])
    if np.ptp(sigma) == 0 or np.ptp(div) == 0:
        raise ValueError("correlation undefined: sigma or div has zero variance")
    res = pearsonr(sigma, div)
    return CorrelationReport(float(res.statistic), float(res.pvalue), len(pts),
                             tuple(sigma.tolist()), tuple(div.tolist()))
