"""Command-line interface.

Subcommands:

* ``detect``   run a detection pipeline and write partition/dendrogram/trace
               artifacts, with a one-line summary on standard output;
* ``measures`` dump per-edge scores as TSV;
* ``verify``   run the self-verification suite and emit its JSON report;
* ``bench``    run the stock datasets and compare against published scores.

Exit codes: 0 success, 2 input error, 3 configuration error, 4 benchmark
threshold failure (bench with --strict), 1 verification failure.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path

from .bench import ALGORITHMS, rows_to_json_obj, rows_to_tsv, run_bench
from .engine import (
    ConfigError,
    EngineConfig,
    history_to_jsonl,
    run_ccr,
    run_ccr_ebr,
)
from .graph import GraphLoadError, WorkingGraph, load_edge_list, load_gml
from .measures import BETWEENNESS, CLUSTERING_G3, CLUSTERING_G4, compute_scores
from .modularity import partition_to_json_obj, partition_to_tsv
from .oracles import DEFAULT_SEED, run_verification_suite

EXIT_OK = 0
EXIT_VERIFY_FAILED = 1
EXIT_INPUT = 2
EXIT_CONFIG = 3
EXIT_ACCEPTANCE = 4

MEASURE_FLAGS = {
    "g3": CLUSTERING_G3,
    "g4": CLUSTERING_G4,
    "betweenness": BETWEENNESS,
}
_RUNNERS = {"ccr": run_ccr, "ccr-ebr": run_ccr_ebr}


@dataclass
class RunManifest:
    """Everything one detect run depends on, resolved from flags."""

    input: str
    format: str | None
    algorithm: str
    config: EngineConfig
    out_dir: str
    no_timestamps: bool = False
    seed: int | None = None  # reserved; the engine is deterministic

    def validate(self) -> None:
        if self.algorithm not in _RUNNERS:
            raise ConfigError(f"unknown algorithm {self.algorithm!r}")
        if self.config.measure == BETWEENNESS:
            raise ConfigError(
                "betweenness cannot drive the first divisive phase;"
                " pick a clustering measure (g3 or g4)"
            )
        self.config.validate()


def _load_graph(path_str: str, fmt: str | None):
    path = Path(path_str)
    if not path.is_file():
        raise GraphLoadError(f"input file not found: {path}")
    if fmt is None:
        fmt = "gml" if path.suffix.lower() == ".gml" else "edgelist"
    if fmt == "gml":
        return load_gml(path)
    return load_edge_list(path)


def _timestamp() -> str:
    return datetime.now(timezone.utc).isoformat(timespec="seconds")


def _write_json(path: Path, obj: dict, stamped: bool) -> None:
    if stamped:
        obj = {"generated_at": _timestamp(), **obj}
    path.write_text(json.dumps(obj, indent=2) + "\n", encoding="utf-8")


def cmd_detect(args) -> int:
    manifest = RunManifest(
        input=args.input,
        format=args.format,
        algorithm=args.algo,
        config=EngineConfig(
            measure=MEASURE_FLAGS[args.measure],
            refine_max_passes=args.refine_max_passes,
        ),
        out_dir=args.out_dir,
        no_timestamps=args.no_timestamps,
    )
    manifest.validate()
    g = _load_graph(manifest.input, manifest.format)
    if g.warnings.any():
        print(
            f"warning: input cleanup: {g.warnings.duplicates} duplicate edges,"
            f" {g.warnings.self_loops} self-loops dropped",
            file=sys.stderr,
        )
    result = _RUNNERS[manifest.algorithm](g, manifest.config)

    out_dir = Path(manifest.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    stamped = not manifest.no_timestamps

    tsv = partition_to_tsv(result.best_partition)
    if stamped:
        head, _, rest = tsv.partition("\n")
        tsv = f"{head}\n# generated_at\t{_timestamp()}\n{rest}"
    (out_dir / "partition.tsv").write_text(tsv, encoding="utf-8")
    _write_json(
        out_dir / "partition.json",
        partition_to_json_obj(result.best_partition),
        stamped,
    )
    _write_json(out_dir / "dendrogram.json", result.dendrogram.to_json_obj(), stamped)
    (out_dir / "dendrogram.newick").write_text(
        result.dendrogram.to_newick(), encoding="utf-8"
    )
    (out_dir / "trace.jsonl").write_text(
        history_to_jsonl(result.history), encoding="utf-8"
    )

    print(f"Q={result.best_q:.4f} communities={result.best_partition.n_communities}")
    return EXIT_OK


def cmd_measures(args) -> int:
    g = _load_graph(args.input, args.format)
    table = compute_scores(MEASURE_FLAGS[args.measure], WorkingGraph(g), range(g.n))
    sys.stdout.write(table.to_tsv(g))
    return EXIT_OK


def cmd_verify(args) -> int:
    reports = run_verification_suite(args.seed)
    obj = {
        "seed": args.seed,
        "passed": all(r.passed for r in reports),
        "checks": [r.to_obj() for r in reports],
    }
    print(json.dumps(obj, indent=2))
    return EXIT_OK if obj["passed"] else EXIT_VERIFY_FAILED


def cmd_bench(args) -> int:
    data_dir = args.data_dir or os.environ.get("MODDIV_DATA_DIR") or "data"
    algorithms = ALGORITHMS if args.algo is None else (args.algo,)
    cfg = EngineConfig(
        measure=MEASURE_FLAGS[args.measure],
        refine_max_passes=args.refine_max_passes,
    )
    if cfg.measure == BETWEENNESS:
        raise ConfigError("bench drives the divisive phase; pick g3 or g4")
    rows, warnings = run_bench(data_dir, algorithms, cfg=cfg)
    for line in warnings:
        print(f"warning: {line}", file=sys.stderr)
    sys.stdout.write(rows_to_tsv(rows))
    if args.out_dir:
        out_dir = Path(args.out_dir)
        out_dir.mkdir(parents=True, exist_ok=True)
        (out_dir / "bench.tsv").write_text(rows_to_tsv(rows), encoding="utf-8")
        _write_json(
            out_dir / "bench.json",
            rows_to_json_obj(rows, warnings),
            not args.no_timestamps,
        )
    if args.strict:
        if not rows:
            print("error: no datasets were benchmarked", file=sys.stderr)
            return EXIT_ACCEPTANCE
        if any(r.passed is False for r in rows):
            return EXIT_ACCEPTANCE
    return EXIT_OK


def _add_input_flags(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--input", required=True, help="path to the graph file")
    sub.add_argument(
        "--format",
        choices=("gml", "edgelist"),
        help="input format (default: by file extension)",
    )


def _add_engine_flags(sub: argparse.ArgumentParser) -> None:
    sub.add_argument(
        "--measure",
        choices=sorted(MEASURE_FLAGS),
        default="g3",
        help="edge measure for the divisive phase (default g3)",
    )
    sub.add_argument(
        "--refine-max-passes",
        type=int,
        default=100,
        metavar="N",
        help="cap on refinement sweeps per split (default 100)",
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="moddiv",
        description="Divisive community detection with modularity scoring.",
    )
    subs = parser.add_subparsers(dest="command", required=True)

    p_detect = subs.add_parser("detect", help="detect communities and write artifacts")
    _add_input_flags(p_detect)
    p_detect.add_argument(
        "--algo", choices=sorted(_RUNNERS), default="ccr", help="pipeline to run"
    )
    _add_engine_flags(p_detect)
    p_detect.add_argument("--out-dir", default=".", help="artifact directory")
    p_detect.add_argument(
        "--no-timestamps",
        action="store_true",
        help="omit timestamps so artifacts are byte-reproducible",
    )
    p_detect.set_defaults(func=cmd_detect)

    p_measures = subs.add_parser("measures", help="dump per-edge scores as TSV")
    _add_input_flags(p_measures)
    p_measures.add_argument(
        "--measure", choices=sorted(MEASURE_FLAGS), default="g3", help="score kind"
    )
    p_measures.set_defaults(func=cmd_measures)

    p_verify = subs.add_parser("verify", help="run the self-verification suite")
    p_verify.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p_verify.set_defaults(func=cmd_verify)

    p_bench = subs.add_parser("bench", help="benchmark the stock datasets")
    p_bench.add_argument(
        "--data-dir",
        help="dataset directory (default: $MODDIV_DATA_DIR, then ./data)",
    )
    p_bench.add_argument(
        "--algo", choices=sorted(_RUNNERS), help="run only this pipeline"
    )
    _add_engine_flags(p_bench)
    p_bench.add_argument("--out-dir", help="also write bench.tsv / bench.json here")
    p_bench.add_argument(
        "--strict",
        action="store_true",
        help="exit 4 if any benchmarked score misses its threshold",
    )
    p_bench.add_argument("--no-timestamps", action="store_true")
    p_bench.set_defaults(func=cmd_bench)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except GraphLoadError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
