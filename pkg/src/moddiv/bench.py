"""Benchmark harness: run both pipelines on the stock datasets and compare
the modularity they reach against published reference scores.

The dataset manifest is static so comparisons never need network access.
Datasets missing from the data directory are tolerated with a warning;
rows come out ordered by dataset name, then algorithm.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from pathlib import Path

from .engine import EngineConfig, run_ccr, run_ccr_ebr
from .graph import GraphLoadError, load_gml

CCR = "ccr"
CCR_EBR = "ccr-ebr"
ALGORITHMS = (CCR, CCR_EBR)


@dataclass(frozen=True)
class DatasetSpec:
    name: str
    filename: str
    n: int
    m: int
    published: dict  # algorithm -> reference modularity from the literature
    floors: dict  # algorithm -> minimum acceptable modularity


# Reference scores are the published results for these standard benchmark
# networks; floors sit a couple of percent below them because tie handling
# differs between implementations.
DATASETS = (
    DatasetSpec(
        "adjnoun", "adjnoun.gml", 112, 425,
        {CCR: 0.309, CCR_EBR: 0.309}, {CCR_EBR: 0.29},
    ),
    DatasetSpec(
        "email", "email.gml", 1133, 5451,
        {CCR: 0.4531, CCR_EBR: 0.5703}, {CCR_EBR: 0.54},
    ),
    DatasetSpec(
        "football", "football.gml", 115, 613,
        {CCR: 0.6001, CCR_EBR: 0.6044}, {CCR_EBR: 0.59},
    ),
    DatasetSpec(
        "jazz", "jazz.gml", 198, 2742,
        {CCR: 0.445, CCR_EBR: 0.445}, {CCR_EBR: 0.43},
    ),
    DatasetSpec(
        "karate", "karate.gml", 34, 78,
        {CCR: 0.4197, CCR_EBR: 0.4197}, {CCR: 0.40, CCR_EBR: 0.40},
    ),
    DatasetSpec(
        "lesmis", "lesmis.gml", 77, 254,
        {CCR: 0.5428, CCR_EBR: 0.5600}, {CCR: 0.52, CCR_EBR: 0.55},
    ),
    DatasetSpec(
        "polbooks", "polbooks.gml", 105, 441,
        {CCR: 0.5269, CCR_EBR: 0.5269}, {CCR_EBR: 0.51},
    ),
)

DATASETS_BY_NAME = {spec.name: spec for spec in DATASETS}


@dataclass
class BenchRow:
    dataset: str
    n: int
    m: int
    algorithm: str
    q_obtained: float
    q_paper: float | None
    wall_time_ms: float
    threshold: float | None
    passed: bool | None  # None when the dataset/algorithm has no floor

    def to_obj(self) -> dict:
        return {
            "dataset": self.dataset,
            "n": self.n,
            "m": self.m,
            "algorithm": self.algorithm,
            "q_obtained": self.q_obtained,
            "q_paper": self.q_paper,
            "wall_time_ms": self.wall_time_ms,
            "threshold": self.threshold,
            "passed": self.passed,
        }


_RUNNERS = {CCR: run_ccr, CCR_EBR: run_ccr_ebr}


def run_bench(
    data_dir,
    algorithms=ALGORITHMS,
    datasets=None,
    cfg: EngineConfig | None = None,
):
    """Run the requested algorithms over the dataset directory.

    Returns (rows, warnings).  Rows are ordered by dataset name then
    algorithm; datasets whose file is absent or unreadable produce a
    warning instead of a row.
    """
    cfg = cfg or EngineConfig()
    data_dir = Path(data_dir)
    if not data_dir.is_dir():
        raise FileNotFoundError(f"dataset directory not found: {data_dir}")
    wanted = list(DATASETS) if datasets is None else [
        DATASETS_BY_NAME[name] for name in sorted(set(datasets))
    ]
    for algo in algorithms:
        if algo not in _RUNNERS:
            raise ValueError(f"unknown algorithm {algo!r}")

    rows: list[BenchRow] = []
    warnings: list[str] = []
    for spec in sorted(wanted, key=lambda s: s.name):
        path = data_dir / spec.filename
        if not path.is_file():
            warnings.append(f"{spec.name}: missing file {path}, skipped")
            continue
        try:
            g = load_gml(path)
        except GraphLoadError as exc:
            warnings.append(f"{spec.name}: failed to load ({exc}), skipped")
            continue
        if (g.n, g.m) != (spec.n, spec.m):
            warnings.append(
                f"{spec.name}: expected {spec.n} vertices / {spec.m} edges,"
                f" loaded {g.n} / {g.m}"
            )
        for algo in algorithms:
            start = time.perf_counter()
            result = _RUNNERS[algo](g, cfg)
            elapsed_ms = (time.perf_counter() - start) * 1000.0
            floor = spec.floors.get(algo)
            rows.append(
                BenchRow(
                    dataset=spec.name,
                    n=g.n,
                    m=g.m,
                    algorithm=algo,
                    q_obtained=result.best_q,
                    q_paper=spec.published.get(algo),
                    wall_time_ms=elapsed_ms,
                    threshold=floor,
                    passed=None if floor is None else result.best_q >= floor - 1e-9,
                )
            )
    return rows, warnings


def rows_to_tsv(rows) -> str:
    lines = [
        "# dataset\tn\tm\talgorithm\tq_obtained\tq_paper\tthreshold\tstatus\twall_time_ms"
    ]
    for r in rows:
        if r.passed is None:
            status = "-"
        else:
            status = "ok" if r.passed else "LOW"
        q_paper = "-" if r.q_paper is None else f"{r.q_paper:.4f}"
        threshold = "-" if r.threshold is None else f"{r.threshold:.4f}"
        lines.append(
            f"{r.dataset}\t{r.n}\t{r.m}\t{r.algorithm}\t{r.q_obtained:.4f}"
            f"\t{q_paper}\t{threshold}\t{status}\t{r.wall_time_ms:.1f}"
        )
    return "\n".join(lines) + "\n"


def rows_to_json_obj(rows, warnings) -> dict:
    return {
        "rows": [r.to_obj() for r in rows],
        "warnings": list(warnings),
        "all_passed": all(r.passed for r in rows if r.passed is not None),
    }
