"""Single entrypoint: ingest | extract | context | assemble | eval | analyze
| bench | pipeline.

Every run writes a machine-readable manifest (config hash, seed, input and
output digests) next to its primary artifact, sufficient to reproduce the
output byte for byte. Flags win over the config file.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import json
import sys
from pathlib import Path

from . import __version__
from .assemble import assemble_record
from .bench import (
    CommandRunner,
    build_problems,
    evaluate_problems,
    read_problems,
    write_problems,
)
from .config import ConfigError, PipelineConfig
from .context import ContextSnippet, RepoContext, gather_context
from .curriculum import (
    CorpusStats,
    FimExample,
    build_corpus_stats,
    derive_seed,
    generate_examples,
)
from .diffs import parse_unified_diff
from .ingest import apply_quality_filters, scan_repository
from .metrics import MetricsReport, PredictionRecord, evaluate_run
from .resolver import PROTO_VERSION, ResolverPool
from .telemetry import analyze_events, read_events

import random

EXIT_OK = 0
EXIT_PARTIAL = 1
EXIT_CONFIG = 2


def _sha256_file(path: str) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for block in iter(lambda: fh.read(1 << 20), b""):
            h.update(block)
    return h.hexdigest()


def _write_manifest(out_path: str, subcommand: str, config: PipelineConfig,
                    inputs: list[str], outputs: list[str], counts: dict) -> None:
    manifest = {
        "tool_version": __version__,
        "proto_version": PROTO_VERSION,
        "subcommand": subcommand,
        "config_hash": config.config_hash(),
        "seed": config.seed,
        "inputs": {p: _sha256_file(p) for p in inputs if Path(p).is_file()},
        "outputs": {p: _sha256_file(p) for p in outputs if Path(p).is_file()},
        "counts": counts,
    }
    path = Path(out_path)
    manifest_path = path.with_name(path.name + ".manifest.json")
    manifest_path.write_text(json.dumps(manifest, sort_keys=True, indent=2) + "\n",
                             encoding="utf-8")


def _read_jsonl(path: str) -> list[dict]:
    out = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            if line.strip():
                out.append(json.loads(line))
    return out


def _write_jsonl(path: str, rows: list[dict]) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for row in rows:
            fh.write(json.dumps(row, sort_keys=True) + "\n")


# -- subcommands ---------------------------------------------------------


def cmd_ingest(args, config: PipelineConfig) -> int:
    result = scan_repository(args.root, config.languages, repo_id=args.repo_id)
    rows = []
    accepted = 0
    for file in result.files:
        verdict = apply_quality_filters(file, config.filter_policy)
        if verdict.accepted:
            accepted += 1
        row = {
            "repo_id": file.repo_id,
            "path": file.path,
            "language": file.language,
            "size_bytes": file.size_bytes,
            "accepted": verdict.accepted,
            "reasons": verdict.reasons,
        }
        if verdict.accepted:
            row["content"] = file.content
        rows.append(row)
    _write_jsonl(args.out, rows)
    counts = {"scanned": len(result.files), "accepted": accepted,
              "warnings": len(result.warnings)}
    for warning in result.warnings:
        print(f"warning: {warning.path}: {warning.reason}", file=sys.stderr)
    _write_manifest(args.out, "ingest", config, [], [args.out], counts)
    print(f"ingest: {accepted}/{len(result.files)} files accepted -> {args.out}")
    return EXIT_OK


def _files_from_jsonl(path: str):
    from .ingest import SourceFile
    files = []
    for row in _read_jsonl(path):
        if not row.get("accepted") or "content" not in row:
            continue
        files.append(SourceFile(
            repo_id=row["repo_id"], path=row["path"], language=row["language"],
            content=row["content"], size_bytes=row["size_bytes"]))
    return files


def cmd_extract(args, config: PipelineConfig) -> int:
    files = _files_from_jsonl(args.files)
    if not files:
        print("error: no accepted files in input", file=sys.stderr)
        return EXIT_PARTIAL
    if args.dist:
        from .curriculum import CurriculumDistribution
        dist = CurriculumDistribution(json.loads(Path(args.dist).read_text()))
    else:
        dist = config.distribution
    if args.stats and Path(args.stats).is_file():
        stats = CorpusStats.from_json(Path(args.stats).read_text())
    else:
        stats = build_corpus_stats(files, config.sample_cap, config.taxonomy,
                                   seed=config.seed)
        if args.stats:
            Path(args.stats).write_text(stats.to_json())
    seed = config.seed if args.seed is None else args.seed
    examples = generate_examples(files, stats, dist, config.taxonomy,
                                 seed=seed, examples_per_file=config.examples_per_file)
    _write_jsonl(args.out, [e.to_dict() for e in examples])
    inputs = [args.files] + ([args.dist] if args.dist else [])
    outputs = [args.out] + ([args.stats] if args.stats else [])
    _write_manifest(args.out, "extract", config, inputs, outputs,
                    {"files": len(files), "examples": len(examples)})
    print(f"extract: {len(examples)} examples from {len(files)} files -> {args.out}")
    return EXIT_OK


def _build_repo_context(args, config: PipelineConfig, files) -> RepoContext:
    resolver = None
    if config.resolver_command:
        resolver = ResolverPool(command=list(config.resolver_command),
                                project_root=str(Path(args.repo).resolve()),
                                size=config.resolver_pool_size)
    return RepoContext.build(
        root=args.repo, files=files, chunk_max_tokens=config.chunk_max_tokens,
        params=config.bm25, resolver=resolver)


def cmd_context(args, config: PipelineConfig) -> int:
    examples = [FimExample.from_dict(d) for d in _read_jsonl(args.examples)]
    scan = scan_repository(args.repo, config.languages)
    accepted = [f for f in scan.files
                if apply_quality_filters(f, config.filter_policy).accepted]
    repo = _build_repo_context(args, config, accepted)
    budget = args.budget if args.budget is not None else config.context_budget
    rows = []
    warned = 0
    try:
        for example in examples:
            snippets, warnings = gather_context(
                example, repo, budget, k=config.retrieval_k)
            warned += len(warnings)
            rows.append({
                "example_id": example.id,
                "snippets": [s.to_dict() for s in snippets],
                "warnings": warnings,
            })
    finally:
        if repo.resolver is not None:
            repo.resolver.close()
    _write_jsonl(args.out, rows)
    _write_manifest(args.out, "context", config, [args.examples], [args.out],
                    {"examples": len(examples), "warnings": warned})
    print(f"context: {len(rows)} records -> {args.out}")
    return EXIT_OK


def cmd_assemble(args, config: PipelineConfig) -> int:
    examples = [FimExample.from_dict(d) for d in _read_jsonl(args.examples)]
    contexts = {}
    if args.contexts:
        for row in _read_jsonl(args.contexts):
            contexts[row["example_id"]] = [
                ContextSnippet.from_dict(s) for s in row["snippets"]]
    seed = config.seed if args.seed is None else args.seed
    rows = []
    skipped = 0
    for example in examples:
        rng = random.Random(derive_seed(seed, "assemble", example.id))
        record, reason = assemble_record(
            example, contexts.get(example.id, []), config.assembly,
            config.sentinels, rng)
        if record is None:
            skipped += 1
            continue
        rows.append(record.to_dict())
    _write_jsonl(args.out, rows)
    inputs = [args.examples] + ([args.contexts] if args.contexts else [])
    _write_manifest(args.out, "assemble", config, inputs, [args.out],
                    {"records": len(rows), "skipped": skipped})
    print(f"assemble: {len(rows)} records ({skipped} skipped) -> {args.out}")
    return EXIT_OK


def cmd_eval(args, config: PipelineConfig) -> int:
    dataset = _read_jsonl(args.dataset)
    predictions = [PredictionRecord.from_dict(d) for d in _read_jsonl(args.preds)]
    metrics = tuple(m.strip() for m in args.metrics.split(",") if m.strip())
    known = {"em", "pm", "es", "pass1"}
    if not set(metrics) <= known:
        print(f"error: unknown metrics {set(metrics) - known}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        report = evaluate_run(dataset, predictions, metrics=metrics,
                              single_line=args.single_line)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARTIAL
    Path(args.report).write_text(report.to_json() + "\n", encoding="utf-8")
    _write_manifest(args.report, "eval", config, [args.dataset, args.preds],
                    [args.report], report.counts)
    print(report.to_json())
    missing = report.counts["missing_predictions"]
    return EXIT_PARTIAL if missing else EXIT_OK


def cmd_analyze(args, config: PipelineConfig) -> int:
    events = read_events(args.events)
    report = analyze_events(events, config.analyzer, config.taxonomy)
    Path(args.report).write_text(json.dumps(report, sort_keys=True, indent=2) + "\n",
                                 encoding="utf-8")
    outputs = [args.report]
    if args.plot_data:
        with open(args.plot_data, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(["language", "node_type", "relative_car_pct"])
            for language, table in sorted(report["relative_car_by_node"].items()):
                for node_type, pct in sorted(table.items()):
                    writer.writerow([language, node_type, pct])
        outputs.append(args.plot_data)
    _write_manifest(args.report, "analyze", config, [args.events], outputs,
                    {"events": report["events"]})
    print(json.dumps(report["cpr"], sort_keys=True))
    print(f"analyze: car={report['car']} over {report['qualifying']} qualifying events")
    return EXIT_OK


def cmd_bench(args, config: PipelineConfig) -> int:
    runner = CommandRunner(timeout=args.timeout)
    if args.bench_command == "build":
        patchset = parse_unified_diff(Path(args.patches).read_text(),
                                      source_pr_id=args.patches)
        problems, audit = build_problems(args.snapshot, patchset, runner,
                                         args.runner)
        write_problems(problems, args.out)
        _write_jsonl(args.out + ".audit.jsonl", audit)
        _write_manifest(args.out, "bench-build", config,
                        [args.patches], [args.out],
                        {"candidates": len(audit), "problems": len(problems)})
        print(f"bench build: {len(problems)} problems from {len(audit)} candidates")
        return EXIT_OK
    problems = read_problems(args.problems)
    generations = {}
    for row in _read_jsonl(args.gens):
        rid = row.get("problem_id") or row.get("id") or row.get("example_id")
        generations[rid] = row.get("generated", row.get("generation", ""))
    if args.runner:
        runner = CommandRunner(timeout=args.timeout)
    report = evaluate_problems(problems, generations, runner,
                               snapshot=args.snapshot)
    Path(args.report).write_text(json.dumps(report, sort_keys=True, indent=2) + "\n",
                                 encoding="utf-8")
    _write_manifest(args.report, "bench-eval", config,
                    [args.problems, args.gens], [args.report],
                    {"problems": report["total"], "passed": report["passed"]})
    print(f"bench eval: pass@1={report['pass_at_1']} ({report['passed']}/{report['total']})")
    return EXIT_PARTIAL if report["missing"] else EXIT_OK


def cmd_pipeline(args, config: PipelineConfig) -> int:
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    ns = argparse.Namespace(root=args.root, repo_id=None,
                            out=str(out_dir / "files.jsonl"))
    status = cmd_ingest(ns, config)
    if status != EXIT_OK:
        return status
    ns = argparse.Namespace(files=str(out_dir / "files.jsonl"),
                            stats=str(out_dir / "stats.json"), dist=None,
                            seed=args.seed, out=str(out_dir / "examples.jsonl"))
    status = cmd_extract(ns, config)
    if status != EXIT_OK:
        return status
    ns = argparse.Namespace(examples=str(out_dir / "examples.jsonl"),
                            repo=args.root, budget=None,
                            out=str(out_dir / "contexts.jsonl"))
    status = cmd_context(ns, config)
    if status != EXIT_OK:
        return status
    ns = argparse.Namespace(examples=str(out_dir / "examples.jsonl"),
                            contexts=str(out_dir / "contexts.jsonl"),
                            seed=args.seed, out=str(out_dir / "training.jsonl"))
    status = cmd_assemble(ns, config)
    print(f"pipeline: artifacts in {out_dir}")
    return status


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fimpipe",
        description="FIM curriculum/context dataset pipeline and eval toolkit")
    parser.add_argument("--version", action="version",
                        version=f"fimpipe {__version__} (resolver proto v{PROTO_VERSION})")
    parser.add_argument("--config", default=None, help="pipeline config JSON")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="scan a repository and apply quality filters")
    p.add_argument("--root", required=True)
    p.add_argument("--repo-id", default=None)
    p.add_argument("--out", required=True)

    p = sub.add_parser("extract", help="extract curriculum FIM examples")
    p.add_argument("--files", required=True, help="files.jsonl from ingest")
    p.add_argument("--stats", default=None,
                   help="corpus stats JSON (loaded if present, else written)")
    p.add_argument("--dist", default=None, help="category distribution JSON")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--out", required=True)

    p = sub.add_parser("context", help="gather cross-file context per example")
    p.add_argument("--examples", required=True)
    p.add_argument("--repo", required=True)
    p.add_argument("--budget", type=int, default=None)
    p.add_argument("--out", required=True)

    p = sub.add_parser("assemble", help="render model-ready training records")
    p.add_argument("--examples", required=True)
    p.add_argument("--contexts", default=None)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--out", required=True)

    p = sub.add_parser("eval", help="offline metrics over a prediction file")
    p.add_argument("--dataset", required=True)
    p.add_argument("--preds", required=True)
    p.add_argument("--metrics", default="em,pm,es")
    p.add_argument("--single-line", action="store_true")
    p.add_argument("--report", required=True)

    p = sub.add_parser("analyze", help="CAR/CPR telemetry analysis")
    p.add_argument("--events", required=True)
    p.add_argument("--report", required=True)
    p.add_argument("--plot-data", default=None,
                   help="also emit (node_type, relative CAR %%) CSV")

    p = sub.add_parser("bench", help="multi-line infilling benchmark")
    bench_sub = p.add_subparsers(dest="bench_command", required=True)
    b = bench_sub.add_parser("build")
    b.add_argument("--snapshot", required=True)
    b.add_argument("--patches", required=True)
    b.add_argument("--runner", required=True, help="test command to execute")
    b.add_argument("--timeout", type=float, default=300.0)
    b.add_argument("--out", required=True)
    b = bench_sub.add_parser("eval")
    b.add_argument("--problems", required=True)
    b.add_argument("--gens", required=True)
    b.add_argument("--runner", default=None)
    b.add_argument("--snapshot", default=None,
                   help="override the snapshot path recorded in problems")
    b.add_argument("--timeout", type=float, default=300.0)
    b.add_argument("--report", required=True)

    p = sub.add_parser("pipeline", help="ingest -> extract -> context -> assemble")
    p.add_argument("--root", required=True)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--out-dir", required=True)

    return parser


_HANDLERS = {
    "ingest": cmd_ingest,
    "extract": cmd_extract,
    "context": cmd_context,
    "assemble": cmd_assemble,
    "eval": cmd_eval,
    "analyze": cmd_analyze,
    "bench": cmd_bench,
    "pipeline": cmd_pipeline,
}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        config = PipelineConfig.load(args.config)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        return _HANDLERS[args.command](args, config)
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARTIAL


if __name__ == "__main__":
    sys.exit(main())
