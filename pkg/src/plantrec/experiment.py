"""Experiment grid runner: per-trial pipeline, seed derivation, serialization.

A grid is the product of (n, k) x p x q cells with a fixed number of trials
per cell.  Trial seeds come from a 64-bit mix of (seed0, cell index, trial
index), so any trial can be reproduced in isolation and no two trials in a
grid share a seed.  Each trial shuffles the canonical partition with a
seed-derived permutation before sampling, so nothing downstream can exploit
the contiguous layout.

Outputs are deterministic byte-for-byte for a fixed config: trials.jsonl (raw
per-trial rows, wall times excluded), bounds.csv (every bound report), and
aggregate.csv (per-cell success and satisfaction rates).
"""

from __future__ import annotations

import json
import time
from concurrent.futures import FIRST_COMPLETED, ProcessPoolExecutor, wait
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import bounds
from .baseline import baseline_common_neighbors
from .errors import PlantrecError
from .io import write_reports_csv
from .model import (
    ModelParams,
    expectation_matrix,
    make_partition,
    permute_partition,
    sample_graph,
    true_cluster_matrix,
)
from .recovery import recover_with_trace, same_partition
from .spectral import top_projector

__all__ = [
    "Cell",
    "ExperimentConfig",
    "TrialReport",
    "CellSummary",
    "trial_seed",
    "run_trial",
    "run_grid",
    "KNOWN_CHECKS",
]

KNOWN_CHECKS = ("norm", "proj", "conc", "fk", "goodcol")
DEFAULT_CHECKS = ("norm", "proj", "conc")

_GOLDEN = 0x9E3779B97F4A7C15
_MASK64 = (1 << 64) - 1


def _mix64(z: int) -> int:
    # splitmix64 finalizer; bijective on 64-bit words
    z &= _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return z ^ (z >> 31)


def trial_seed(seed0: int, cell_index: int, trial_index: int, trials_per_cell: int) -> int:
    """Injective over (cell, trial) for a fixed seed0 and grid shape."""
    u = cell_index * trials_per_cell + trial_index
    return _mix64((seed0 + (u + 1) * _GOLDEN) & _MASK64)


@dataclass(frozen=True)
class Cell:
    index: int
    n: int
    k: int
    s: int
    p: float
    q: float


@dataclass(frozen=True)
class ExperimentConfig:
    """Validated grid description; build from a dict with `from_dict`."""

    ns: tuple
    ks: tuple | None
    ss: tuple | None
    ps: tuple
    qs: tuple
    trials: int
    seed0: int
    checks: tuple
    epsilon: float | None = None  # None: measure the projector deviation per trial
    baseline: bool = False
    shuffle: bool = True
    out: str | None = None

    @classmethod
    def from_dict(cls, raw: dict) -> "ExperimentConfig":
        known = {"n", "k", "s", "p", "q", "trials", "seed0", "checks", "epsilon", "baseline", "shuffle", "out"}
        unknown = set(raw) - known
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        if "n" not in raw or "p" not in raw or "q" not in raw:
            raise ValueError("config needs n, p, and q lists")
        if ("k" in raw) == ("s" in raw):
            raise ValueError("config needs exactly one of k or s")

        def as_tuple(key, kind):
            value = raw[key]
            if not isinstance(value, (list, tuple)):
                value = [value]
            return tuple(kind(v) for v in value)

        cfg = cls(
            ns=as_tuple("n", int),
            ks=as_tuple("k", int) if "k" in raw else None,
            ss=as_tuple("s", int) if "s" in raw else None,
            ps=as_tuple("p", float),
            qs=as_tuple("q", float),
            trials=int(raw.get("trials", 1)),
            seed0=int(raw.get("seed0", 0)),
            checks=tuple(raw.get("checks", list(DEFAULT_CHECKS))),
            epsilon=None if raw.get("epsilon") in (None, "auto") else float(raw["epsilon"]),
            baseline=bool(raw.get("baseline", False)),
            shuffle=bool(raw.get("shuffle", True)),
            out=raw.get("out"),
        )
        cfg.cells()  # validates every cell
        return cfg

    def cells(self) -> list[Cell]:
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        unknown = set(self.checks) - set(KNOWN_CHECKS)
        if unknown:
            raise ValueError(f"unknown checks: {sorted(unknown)}; known: {KNOWN_CHECKS}")
        if self.epsilon is not None and self.epsilon <= 0:
            raise ValueError("epsilon must be positive or 'auto'")
        out = []
        index = 0
        for n in self.ns:
            divisors = self.ks if self.ks is not None else self.ss
            for d in divisors:
                if d < 1 or n % d != 0:
                    raise ValueError(f"{d} does not divide n={n}")
                k, s = (d, n // d) if self.ks is not None else (n // d, d)
                for p in self.ps:
                    for q in self.qs:
                        if not (0.0 <= q < p <= 1.0):
                            raise ValueError(f"need 0 <= q < p <= 1, got p={p}, q={q}")
                        out.append(Cell(index=index, n=n, k=k, s=s, p=p, q=q))
                        index += 1
        return out


@dataclass(frozen=True)
class TrialReport:
    cell: Cell
    trial_index: int
    seed: int
    recovered_exactly: bool
    pivot_masses: list
    baseline_exactly: bool | None
    reports: list
    wall_time: float

    def json_row(self) -> dict:
        # wall_time is deliberately excluded so reruns are byte-identical
        return {
            "cell": self.cell.index,
            "n": self.cell.n,
            "k": self.cell.k,
            "s": self.cell.s,
            "p": self.cell.p,
            "q": self.cell.q,
            "trial": self.trial_index,
            "seed": self.seed,
            "exact": self.recovered_exactly,
            "pivot_masses": self.pivot_masses,
            "baseline_exact": self.baseline_exactly,
            "reports": [
                {"name": r.name, "lhs": r.lhs, "rhs": r.rhs, "satisfied": r.satisfied}
                for r in self.reports
            ],
        }


def run_trial(
    cell: Cell,
    seed: int,
    trial_index: int = 0,
    checks: tuple = DEFAULT_CHECKS,
    epsilon: float | None = None,
    baseline: bool = False,
    shuffle: bool = True,
) -> TrialReport:
    """Generate, recover, compare, and run the requested bound checks."""
    start = time.perf_counter()
    part = make_partition(cell.n, cell.s)
    if shuffle:
        rng = np.random.Generator(np.random.Philox(key=np.array([seed, 1], dtype=np.uint64)))
        part = permute_partition(part, rng.permutation(cell.n))
    params = ModelParams(p=cell.p, q=cell.q, seed=seed)
    g = sample_graph(part, params)

    result, traces = recover_with_trace(g, cell.s)
    exact = same_partition(result, part)
    baseline_exact = (
        same_partition(baseline_common_neighbors(g, cell.s), part) if baseline else None
    )

    ctx = {
        "n": cell.n,
        "k": cell.k,
        "s": cell.s,
        "p": cell.p,
        "q": cell.q,
        "seed": seed,
        "mask": (1 << cell.k) - 1,
    }
    reports = []
    needs_expected = bool({"norm", "proj", "fk"} & set(checks)) or (
        epsilon is None and bool({"conc", "goodcol"} & set(checks))
    )
    expected = expectation_matrix(part, params) if needs_expected else None
    sampled = g.dense() if needs_expected or "goodcol" in checks else None

    # measured epsilon gets a tiny floor (it is exactly 0 for noiseless
    # instances); an explicit epsilon is passed through so bad values raise
    eps_val = epsilon
    try:
        if "norm" in checks:
            reports.append(bounds.check_norm_deviation(sampled, expected, **ctx))
        if "proj" in checks:
            spec_rep, frob_rep = bounds.check_projector_deviation(sampled, expected, cell.k, **ctx)
            reports.extend((spec_rep, frob_rep))
            if eps_val is None:
                eps_val = max(spec_rep.lhs, 1e-12)  # the measured projector deviation
        if eps_val is None and {"conc", "goodcol"} & set(checks):
            eps_val = max(bounds.empirical_epsilon(sampled, expected, cell.k), 1e-12)
        if "conc" in checks:
            conc_ctx = {key: v for key, v in ctx.items() if key not in ("p", "q")}
            reports.extend(
                bounds.check_concentration(g, part, cell.p, cell.q, eps_val, **conc_ctx)
            )
        if "fk" in checks:
            unions = bounds.cluster_unions(part, seed=seed)
            labels = [mask for mask, _ in unions]
            sigma = bounds.Constants.from_params(cell.p, cell.q, c=1.0).sigma
            noise = bounds.centered_adjacency(g, part, params)
            fk_ctx = {key: ctx[key] for key in ("n", "k", "s", "p", "q", "seed")}
            reports.extend(
                bounds.check_fk_submatrices(
                    noise, [v for _, v in unions], sigma, labels=labels, **fk_ctx
                )
            )
        if "goodcol" in checks:
            # the mass threshold is only meaningful for epsilon <= 0.1; clamp
            # and record the measured value so the report stays interpretable
            eps_gc = min(eps_val, 0.1)
            gc_ctx = {key: v for key, v in ctx.items() if key != "s"}
            reports.append(
                bounds.check_good_column(
                    top_projector(sampled, cell.k),
                    true_cluster_matrix(part),
                    cell.s,
                    eps_gc,
                    epsilon_measured=eps_val,
                    epsilon_clamped=eps_gc != eps_val,
                    **gc_ctx,
                )
            )
    except PlantrecError as exc:
        raise type(exc)(
            f"{exc} [cell {cell.index}: n={cell.n} k={cell.k} p={cell.p} q={cell.q} seed={seed}]"
        ) from exc

    return TrialReport(
        cell=cell,
        trial_index=trial_index,
        seed=seed,
        recovered_exactly=exact,
        pivot_masses=[t.mass for t in traces],
        baseline_exactly=baseline_exact,
        reports=reports,
        wall_time=time.perf_counter() - start,
    )


@dataclass(frozen=True)
class CellSummary:
    cell: Cell
    trials: int
    success_rate: float
    baseline_success_rate: float | None
    mean_projector_deviation: float | None
    check_rates: dict


def _summarize(cell: Cell, rows: list) -> CellSummary:
    success = sum(1 for r in rows if r.recovered_exactly) / len(rows)
    baseline_rate = None
    if rows[0].baseline_exactly is not None:
        baseline_rate = sum(1 for r in rows if r.baseline_exactly) / len(rows)
    devs = [rep.lhs for r in rows for rep in r.reports if rep.name == "projector_deviation"]
    mean_dev = sum(devs) / len(devs) if devs else None
    rates = {}
    for check, names in (
        ("norm", ("norm_deviation",)),
        ("proj", ("projector_deviation", "projector_frobenius_rank")),
        ("conc", ("concentration",)),
        ("fk", ("fk_submatrix",)),
        ("goodcol", ("good_column",)),
    ):
        relevant = [rep for r in rows for rep in r.reports if rep.name in names]
        if relevant:
            rates[check] = sum(1 for rep in relevant if rep.satisfied) / len(relevant)
    return CellSummary(
        cell=cell,
        trials=len(rows),
        success_rate=success,
        baseline_success_rate=baseline_rate,
        mean_projector_deviation=mean_dev,
        check_rates=rates,
    )


def _run_task(args) -> TrialReport:
    cell, trial_index, seed, checks, epsilon, baseline, shuffle = args
    return run_trial(
        cell,
        seed,
        trial_index=trial_index,
        checks=checks,
        epsilon=epsilon,
        baseline=baseline,
        shuffle=shuffle,
    )


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    return str(value)


def run_grid(
    config: ExperimentConfig,
    out_dir,
    jobs: int = 1,
    emit_plot_data: bool = False,
) -> list[CellSummary]:
    """Run every cell x trial, writing outputs in deterministic order."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    cells = config.cells()
    tasks = [
        (
            cell,
            t,
            trial_seed(config.seed0, cell.index, t, config.trials),
            config.checks,
            config.epsilon,
            config.baseline,
            config.shuffle,
        )
        for cell in cells
        for t in range(config.trials)
    ]

    results: dict[tuple[int, int], TrialReport] = {}
    order = [(cell.index, t) for cell in cells for t in range(config.trials)]
    next_pos = 0
    with open(out / "trials.jsonl", "w", newline="\n") as jsonl:

        def flush_ready() -> None:
            nonlocal next_pos
            while next_pos < len(order) and order[next_pos] in results:
                row = results[order[next_pos]].json_row()
                jsonl.write(json.dumps(row) + "\n")
                jsonl.flush()
                next_pos += 1

        if jobs <= 1:
            for task in tasks:
                report = _run_task(task)
                results[(report.cell.index, report.trial_index)] = report
                flush_ready()
        else:
            with ProcessPoolExecutor(max_workers=jobs) as pool:
                pending = {pool.submit(_run_task, task) for task in tasks}
                while pending:
                    done, pending = wait(pending, return_when=FIRST_COMPLETED)
                    for fut in done:
                        report = fut.result()
                        results[(report.cell.index, report.trial_index)] = report
                    flush_ready()

    ordered = [results[key] for key in order]
    all_reports = []
    for r in ordered:
        for rep in r.reports:
            all_reports.append(rep)
    write_reports_csv(out / "bounds.csv", all_reports)

    summaries = []
    per_cell: dict[int, list[TrialReport]] = {}
    for r in ordered:
        per_cell.setdefault(r.cell.index, []).append(r)
    for cell in cells:
        summaries.append(_summarize(cell, per_cell[cell.index]))

    rate_cols = [c for c in KNOWN_CHECKS if c in config.checks]
    with open(out / "aggregate.csv", "w", newline="\n") as f:
        header = ["cell", "n", "k", "s", "p", "q", "trials", "success_rate", "baseline_success_rate", "mean_projector_deviation"]
        header += [f"rate_{c}" for c in rate_cols]
        f.write(",".join(header) + "\n")
        for s in summaries:
            row = [
                str(s.cell.index),
                str(s.cell.n),
                str(s.cell.k),
                str(s.cell.s),
                repr(s.cell.p),
                repr(s.cell.q),
                str(s.trials),
                repr(s.success_rate),
                _fmt(s.baseline_success_rate),
                _fmt(s.mean_projector_deviation),
            ]
            row += [_fmt(s.check_rates.get(c)) for c in rate_cols]
            f.write(",".join(row) + "\n")

    if emit_plot_data:
        with open(out / "plotdata.csv", "w", newline="\n") as f:
            f.write("n,k,s,p,q,seed,metric,value\n")
            for r in ordered:
                base = f"{r.cell.n},{r.cell.k},{r.cell.s},{repr(r.cell.p)},{repr(r.cell.q)},{r.seed}"
                f.write(f"{base},exact,{int(r.recovered_exactly)}\n")
                if r.baseline_exactly is not None:
                    f.write(f"{base},baseline_exact,{int(r.baseline_exactly)}\n")
                if r.pivot_masses:
                    f.write(f"{base},min_pivot_mass,{repr(min(r.pivot_masses))}\n")
                for rep in r.reports:
                    if rep.name == "projector_deviation":
                        f.write(f"{base},projector_deviation,{repr(rep.lhs)}\n")
    return summaries
