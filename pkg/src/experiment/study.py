# src/experiment/study.py

"""
Simulation study: p = N(mu_p, var_p), q = N(mu_q, var_q), kernel 1 + Gaussian,
k-times iterated Lavrentiev with quasi-optimal lambda, MSD over X_p.

Every (replication, mu_q) cell draws its own X_p and X_q from seeds derived
from (config.seed, replication, mu_q); all k share that cell's data.
"""

from dataclasses import dataclass, field
from pathlib import Path
from typing import List, Tuple

import numpy as np

from src.config import (
    K_LIST,
    M_SAMPLES,
    MU_P,
    MU_Q_LIST,
    N_SAMPLES,
    POINTWISE_GRID,
    REPLICATIONS,
    SEED,
    VAR_P,
    VAR_Q,
)
from src.experiment.metrics import box_stats, msd, pointwise_errors, probe_grid
from src.experiment.parallel import run_tasks
from src.experiment.sampling import STREAM_P, STREAM_Q, derive_seed, sample_normal
from src.experiment.truth import true_beta
from src.io.exporter import export_csv, export_json
from src.kernels.functions import KernelSpec
from src.kernels.gram import assemble_gram
from src.selection.grid import LambdaGrid
from src.selection.quasi_optimality import quasi_optimality
from src.utils.errors import InputError, RatioError
from src.utils.logger import get_logger

logger = get_logger()

RECORD_FIELDS = ["mu_q", "k", "replication", "chosen_lambda", "msd", "sup_error"]
BOX_FIELDS = ["mu_q", "k", "count", "min", "q1", "median", "q3", "max"]
POINTWISE_FIELDS = ["mu_q", "k", "replication", "x", "beta", "beta_hat"]


@dataclass(frozen=True)
class SimConfig:
    n: int = N_SAMPLES
    m: int = M_SAMPLES
    mu_p: float = MU_P
    var_p: float = VAR_P
    mu_q_list: Tuple[float, ...] = tuple(MU_Q_LIST)
    var_q: float = VAR_Q
    k_list: Tuple[int, ...] = tuple(K_LIST)
    replications: int = REPLICATIONS
    grid: LambdaGrid = field(default_factory=LambdaGrid)
    kernel: KernelSpec = field(default_factory=KernelSpec)
    seed: int = SEED
    pointwise_grid: Tuple[float, float, int] = tuple(POINTWISE_GRID)
    keep_pointwise: bool = False

    def __post_init__(self):
        object.__setattr__(self, "mu_q_list", tuple(float(v) for v in self.mu_q_list))
        object.__setattr__(self, "k_list", tuple(int(v) for v in self.k_list))
        object.__setattr__(self, "pointwise_grid", tuple(self.pointwise_grid))

        if self.n < 2 or self.m < 2:
            raise InputError(f"n, m must be >= 2, got n={self.n}, m={self.m}", flag="n")
        if not (self.var_p > 0 and self.var_q > 0):
            raise InputError("variances must be > 0", flag="var-p")
        if self.replications < 1:
            raise InputError(f"replications must be >= 1, got {self.replications}", flag="replications")
        if not self.mu_q_list or not self.k_list:
            raise InputError("mu_q_list and k_list must be non-empty", flag="mu-q")
        if any(k < 1 for k in self.k_list):
            raise InputError(f"k values must be >= 1, got {self.k_list}", flag="k")
        if self.seed < 0:
            raise InputError(f"seed must be >= 0, got {self.seed}", flag="seed")

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "m": self.m,
            "mu_p": self.mu_p,
            "var_p": self.var_p,
            "mu_q_list": list(self.mu_q_list),
            "var_q": self.var_q,
            "k_list": list(self.k_list),
            "replications": self.replications,
            "grid": self.grid.to_dict(),
            "kernel": self.kernel.to_dict(),
            "seed": self.seed,
            "pointwise_grid": list(self.pointwise_grid),
            "keep_pointwise": self.keep_pointwise,
        }


@dataclass
class ExperimentReport:
    config: SimConfig
    records: List[dict]
    failures: List[dict]

    def cell_records(self, mu_q, k) -> List[dict]:
        return [r for r in self.records if r["mu_q"] == float(mu_q) and r["k"] == int(k)]

    def msd_values(self, mu_q, k) -> List[float]:
        return [r["msd"] for r in self.cell_records(mu_q, k)]

    def chosen_lambdas(self, mu_q, k) -> List[float]:
        return [r["chosen_lambda"] for r in self.cell_records(mu_q, k)]

    def box(self, mu_q, k) -> dict:
        return box_stats(self.msd_values(mu_q, k))

    def complete(self, mu_q, k) -> bool:
        return len(self.cell_records(mu_q, k)) == self.config.replications

    def cells(self) -> List[dict]:
        out = []
        for mu_q in self.config.mu_q_list:
            for k in self.config.k_list:
                records = self.cell_records(mu_q, k)
                out.append({
                    "mu_q": mu_q,
                    "k": k,
                    "msd": [r["msd"] for r in records],
                    "chosen_lambda": [r["chosen_lambda"] for r in records],
                    "sup_error": [r["sup_error"] for r in records],
                    "box": box_stats([r["msd"] for r in records]),
                    "complete": len(records) == self.config.replications,
                })
        return out

    def box_rows(self) -> List[dict]:
        rows = []
        for cell in self.cells():
            row = {"mu_q": cell["mu_q"], "k": cell["k"], "count": len(cell["msd"])}
            row.update(cell["box"])
            rows.append(row)
        return rows

    def pointwise_rows(self) -> List[dict]:
        """True and fitted beta at each X_p point, per record; needs keep_pointwise."""
        rows = []
        for r in self.records:
            for x, beta, beta_hat in zip(r.get("x", ()), r.get("beta", ()), r.get("beta_hat", ())):
                rows.append({
                    "mu_q": r["mu_q"], "k": r["k"], "replication": r["replication"],
                    "x": x, "beta": beta, "beta_hat": beta_hat,
                })
        return rows

    def to_dict(self) -> dict:
        return {
            "config": self.config.to_dict(),
            "cells": self.cells(),
            "records": self.records,
            "failures": self.failures,
        }


# ============================================================
# One (replication, mu_q) cell
# ============================================================
def _failure(mu_q, k, replication, error) -> dict:
    return {
        "mu_q": float(mu_q),
        "k": int(k),
        "replication": int(replication),
        "error": f"{type(error).__name__}: {error}",
    }


def _run_cell(config: SimConfig, replication: int, mu_q: float):
    try:
        xp = sample_normal(
            config.mu_p, config.var_p, config.n,
            seed=derive_seed(config.seed, replication, mu_q, STREAM_P), measure_tag="p",
        )
        xq = sample_normal(
            mu_q, config.var_q, config.m,
            seed=derive_seed(config.seed, replication, mu_q, STREAM_Q), measure_tag="q",
        )
        gram = assemble_gram(config.kernel, xp, xq)
    except (RatioError, ArithmeticError) as e:
        # no data for this cell, so every k fails
        logger.warning(f"[STUDY] mu_q={mu_q} | r={replication} sampling failed: {e}")
        return [], [_failure(mu_q, k, replication, e) for k in config.k_list]

    grid = probe_grid(config.pointwise_grid)
    beta_at_xp = true_beta(xp.points[:, 0], mu_q, config.mu_p, config.var_p, config.var_q)

    records, failures = [], []
    for k in config.k_list:
        try:
            trace = quasi_optimality(gram, xp, xq, config.kernel, k, config.grid)
            model = trace.chosen_model
            errors = pointwise_errors(model, mu_q, grid, config.mu_p, config.var_p, config.var_q)

            record = {
                "mu_q": float(mu_q),
                "k": int(k),
                "replication": int(replication),
                "chosen_lambda": trace.chosen_lambda,
                "msd": msd(model, mu_q, config.mu_p, config.var_p, config.var_q),
                "sup_error": float(errors.max()),
            }
            if not np.isfinite(record["msd"]):
                raise ArithmeticError(f"non-finite MSD at lambda={trace.chosen_lambda}")
            if config.keep_pointwise:
                record["pointwise_error"] = errors.tolist()
                record["x"] = xp.points[:, 0].tolist()
                record["beta"] = beta_at_xp.tolist()
                record["beta_hat"] = np.asarray(model.values_at_xp, dtype=float).tolist()
            records.append(record)

        except (RatioError, ArithmeticError) as e:
            logger.warning(f"[STUDY] mu_q={mu_q} | k={k} | r={replication} failed: {e}")
            failures.append(_failure(mu_q, k, replication, e))

    return records, failures


def run_study(config: SimConfig = None, threads: int = 1) -> ExperimentReport:
    config = config or SimConfig()

    logger.info(
        f"[STUDY] STARTED | n={config.n} | m={config.m} | mu_q={list(config.mu_q_list)} | "
        f"k={list(config.k_list)} | replications={config.replications} | threads={threads}"
    )

    tasks = [
        (config, r, mu_q)
        for mu_q in config.mu_q_list
        for r in range(config.replications)
    ]
    results = run_tasks(_run_cell, tasks, threads=threads, desc="STUDY | cells")

    records, failures = [], []
    for cell_records, cell_failures in results:
        records.extend(cell_records)
        failures.extend(cell_failures)

    order = {mu: i for i, mu in enumerate(config.mu_q_list)}
    k_order = {k: i for i, k in enumerate(config.k_list)}
    key = lambda r: (order[r["mu_q"]], k_order[r["k"]], r["replication"])
    records.sort(key=key)
    failures.sort(key=key)

    logger.info(f"[STUDY] COMPLETED | records={len(records)} | failures={len(failures)}")

    return ExperimentReport(config=config, records=records, failures=failures)


# ============================================================
# Summaries and export
# ============================================================
def compare_to_baseline(report: ExperimentReport, baseline_k: int = 1) -> List[dict]:
    """Median MSD of every k next to the k = baseline_k median, per mu_q."""

    rows = []
    if baseline_k not in report.config.k_list:
        return rows

    for mu_q in report.config.mu_q_list:
        base = report.box(mu_q, baseline_k)["median"]
        for k in report.config.k_list:
            med = report.box(mu_q, k)["median"]
            rows.append({
                "mu_q": mu_q,
                "k": k,
                "median_msd": med,
                "baseline_median": base,
                "not_worse": None if med is None or base is None else bool(med <= base),
            })
    return rows


def format_comparison(rows: List[dict]) -> str:
    lines = [f"{'mu_q':>6} {'k':>4} {'median MSD':>14} {'k=1 median':>14} {'<= k=1':>7}"]
    for row in rows:
        med = "n/a" if row["median_msd"] is None else f"{row['median_msd']:.6g}"
        base = "n/a" if row["baseline_median"] is None else f"{row['baseline_median']:.6g}"
        flag = "n/a" if row["not_worse"] is None else ("yes" if row["not_worse"] else "no")
        lines.append(f"{row['mu_q']:>6g} {row['k']:>4d} {med:>14} {base:>14} {flag:>7}")
    return "\n".join(lines)


def _csv_value(v):
    if v is None:
        return ""
    if isinstance(v, float):
        return repr(v)
    return v


def export_report(report: ExperimentReport, out_dir, prefix: str = "study") -> dict:
    """
    Writes <prefix>_report.json, <prefix>_records.csv, <prefix>_box.csv, and
    <prefix>_pointwise.csv (long form, one row per X_p point) with keep_pointwise.
    """

    out_dir = Path(out_dir)
    paths = {
        "report": out_dir / f"{prefix}_report.json",
        "records": out_dir / f"{prefix}_records.csv",
        "box": out_dir / f"{prefix}_box.csv",
    }

    export_json(report.to_dict(), paths["report"])
    export_csv(
        [{f: _csv_value(r[f]) for f in RECORD_FIELDS} for r in report.records],
        paths["records"],
        fieldnames=RECORD_FIELDS,
    )
    export_csv(
        [{f: _csv_value(r[f]) for f in BOX_FIELDS} for r in report.box_rows()],
        paths["box"],
        fieldnames=BOX_FIELDS,
    )
    if report.config.keep_pointwise:
        paths["pointwise"] = out_dir / f"{prefix}_pointwise.csv"
        export_csv(
            [{f: _csv_value(r[f]) for f in POINTWISE_FIELDS} for r in report.pointwise_rows()],
            paths["pointwise"],
            fieldnames=POINTWISE_FIELDS,
        )

    logger.info(f"[STUDY] Exported report to {out_dir}")
    return paths
