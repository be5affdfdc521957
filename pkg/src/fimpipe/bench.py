"""Multi-line infilling benchmark construction and evaluation.

From a repository snapshot plus a patch set: find hunks that add at least two
consecutive lines, keep only those whose absence makes the designated test
fail (dependency verification), and freeze each survivor as a problem whose
middle is the added run. Evaluation splices a generation into the hole,
materializes the snapshot, and runs the test command.
"""

from __future__ import annotations

import hashlib
import json
import shutil
import subprocess
import tempfile
from dataclasses import dataclass
from pathlib import Path

from .diffs import Hunk, PatchError, PatchSet, apply_hunks

VERDICT_PASS = "pass"
VERDICT_FAIL = "fail"
VERDICT_ERROR = "error"


class CommandRunner:
    """Runs the test command in a working directory with a wall-clock timeout."""

    def __init__(self, timeout: float = 300.0):
        self.timeout = timeout

    def run(self, snapshot: str, command: str) -> str:
        try:
            proc = subprocess.run(
                command, shell=True, cwd=snapshot,
                stdout=subprocess.DEVNULL, stderr=subprocess.DEVNULL,
                timeout=self.timeout,
            )
        except subprocess.TimeoutExpired:
            return VERDICT_ERROR
        except OSError:
            return VERDICT_ERROR
        return VERDICT_PASS if proc.returncode == 0 else VERDICT_FAIL


class StubRunner:
    """Deterministic runner for fixtures: verdict computed from file contents."""

    def __init__(self, judge):
        self.judge = judge  # callable: dict[path, content] -> pass|fail|error

    def run(self, snapshot: str, command: str) -> str:
        files = {}
        root = Path(snapshot)
        for path in sorted(root.rglob("*")):
            if path.is_file():
                try:
                    files[str(path.relative_to(root))] = path.read_text()
                except (OSError, UnicodeDecodeError):
                    continue
        return self.judge(files)


@dataclass
class InfillingProblem:
    problem_id: str
    repo_ref: str
    file: str
    prefix: str
    suffix: str
    ground_truth_middle: str
    test_command: str
    applied_patches: list[str]
    patched_files: dict[str, str]  # non-candidate state of files the patches touch

    def __post_init__(self) -> None:
        if len(self.ground_truth_middle.split("\n")) < 2:
            raise ValueError("ground truth middle must span at least 2 lines")

    def to_dict(self) -> dict:
        return {
            "problem_id": self.problem_id,
            "repo_ref": self.repo_ref,
            "file": self.file,
            "prefix": self.prefix,
            "suffix": self.suffix,
            "ground_truth_middle": self.ground_truth_middle,
            "test_command": self.test_command,
            "applied_patches": self.applied_patches,
            "patched_files": self.patched_files,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "InfillingProblem":
        return cls(**{k: d[k] for k in (
            "problem_id", "repo_ref", "file", "prefix", "suffix",
            "ground_truth_middle", "test_command", "applied_patches",
            "patched_files")})


def find_candidate_hunks(patchset: PatchSet) -> list[Hunk]:
    """Hunks adding >= 2 consecutive lines (minimal hunks are single-region,
    so their added lines are contiguous by construction)."""
    return [hunk for hunk in patchset.hunks if len(hunk.new_lines) >= 2]


def read_snapshot(snapshot: str, paths: list[str]) -> dict[str, str]:
    root = Path(snapshot)
    files = {}
    for rel in paths:
        p = root / rel
        files[rel] = p.read_text() if p.exists() else ""
    return files


def materialize(snapshot: str, overrides: dict[str, str], workdir: str) -> None:
    """Copy the snapshot into workdir and write the patched files on top."""
    src = Path(snapshot)
    dst = Path(workdir)
    if dst.exists():
        shutil.rmtree(dst)
    shutil.copytree(src, dst)
    for rel, content in overrides.items():
        target = dst / rel
        target.parent.mkdir(parents=True, exist_ok=True)
        target.write_text(content)


def _apply_without(snapshot: str, patchset: PatchSet,
                   candidate: Hunk | None) -> tuple[dict[str, str], list]:
    hunks = [h for h in patchset.hunks
             if candidate is None or h.hunk_id != candidate.hunk_id]
    base = read_snapshot(snapshot, patchset.files())
    return apply_hunks(base, hunks)


def verify_dependency(snapshot: str, patchset: PatchSet, candidate: Hunk,
                      runner, test_command: str) -> tuple[bool, str]:
    """True iff the test fails when every patch except the candidate is
    applied (the test genuinely depends on the candidate's lines).
    """
    try:
        patched, _ = _apply_without(snapshot, patchset, candidate)
    except PatchError as exc:
        return False, f"patch_error: {exc}"
    with tempfile.TemporaryDirectory(prefix="bench-verify-") as tmp:
        workdir = str(Path(tmp) / "snapshot")
        materialize(snapshot, patched, workdir)
        verdict = runner.run(workdir, test_command)
    if verdict == VERDICT_FAIL:
        return True, "test_fails_without_candidate"
    if verdict == VERDICT_PASS:
        return False, "test_passes_without_candidate"
    return False, f"runner_{verdict}"


def build_problem(snapshot: str, patchset: PatchSet, candidate: Hunk,
                  test_command: str, repo_ref: str | None = None) -> InfillingProblem:
    """Freeze one verified candidate as an infilling problem."""
    others, _ = _apply_without(snapshot, patchset, candidate)
    full, placements = apply_hunks(
        read_snapshot(snapshot, patchset.files()), patchset.hunks)
    placement = next(p for p in placements if p.hunk_id == candidate.hunk_id)
    content = full[candidate.file]
    lines = content.split("\n")
    run = candidate.new_lines
    run_start = placement.new_line_start - 1  # 0-based line index
    prefix = "\n".join(lines[:run_start])
    if run_start > 0:
        prefix += "\n"
    middle = "\n".join(run)
    rest = lines[run_start + len(run):]
    suffix = "\n".join(rest)
    if rest:
        suffix = "\n" + suffix
    assert prefix + middle + suffix == content, "reconstruction failed"
    ref = repo_ref if repo_ref is not None else str(Path(snapshot).resolve())
    digest = hashlib.sha256("\x1f".join(
        [ref, candidate.file, str(run_start), middle]).encode()).hexdigest()[:16]
    non_candidate_state = {path: text for path, text in others.items()
                           if path != candidate.file}
    return InfillingProblem(
        problem_id=digest,
        repo_ref=ref,
        file=candidate.file,
        prefix=prefix,
        suffix=suffix,
        ground_truth_middle=middle,
        test_command=test_command,
        applied_patches=[h.hunk_id for h in patchset.hunks
                         if h.hunk_id != candidate.hunk_id],
        patched_files=non_candidate_state,
    )


def build_problems(snapshot: str, patchset: PatchSet, runner,
                   test_command: str, repo_ref: str | None = None
                   ) -> tuple[list[InfillingProblem], list[dict]]:
    """Steps 1-3 end to end; returns problems plus per-candidate audit rows."""
    problems = []
    audit = []
    for candidate in find_candidate_hunks(patchset):
        depends, reason = verify_dependency(snapshot, patchset, candidate,
                                            runner, test_command)
        audit.append({"hunk_id": candidate.hunk_id, "kept": depends,
                      "reason": reason})
        if depends:
            problems.append(build_problem(snapshot, patchset, candidate,
                                          test_command, repo_ref=repo_ref))
    return problems, audit


def evaluate_problem(problem: InfillingProblem, generation: str, runner,
                     snapshot: str | None = None) -> str:
    """Splice a generation into the hole and run the problem's test."""
    snapshot_dir = snapshot or problem.repo_ref
    if not Path(snapshot_dir).is_dir():
        raise FileNotFoundError(f"snapshot not found: {snapshot_dir}")
    overrides = dict(problem.patched_files)
    overrides[problem.file] = problem.prefix + generation + problem.suffix
    with tempfile.TemporaryDirectory(prefix="bench-eval-") as tmp:
        workdir = str(Path(tmp) / "snapshot")
        materialize(snapshot_dir, overrides, workdir)
        verdict = runner.run(workdir, problem.test_command)
    return VERDICT_PASS if verdict == VERDICT_PASS else VERDICT_FAIL


def evaluate_problems(problems: list[InfillingProblem],
                      generations: dict[str, str], runner,
                      snapshot: str | None = None) -> dict:
    """Pass@1 report over one generation per problem; missing ones fail."""
    results = {}
    passed = 0
    for problem in problems:
        generation = generations.get(problem.problem_id)
        if generation is None:
            results[problem.problem_id] = "missing"
            continue
        verdict = evaluate_problem(problem, generation, runner, snapshot=snapshot)
        results[problem.problem_id] = verdict
        if verdict == VERDICT_PASS:
            passed += 1
    total = len(problems)
    return {
        "pass_at_1": round(passed / total, 6) if total else None,
        "passed": passed,
        "total": total,
        "missing": sum(1 for v in results.values() if v == "missing"),
        "results": results,
    }


def write_problems(problems: list[InfillingProblem], path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for problem in problems:
            fh.write(json.dumps(problem.to_dict(), sort_keys=True) + "\n")


def read_problems(path: str) -> list[InfillingProblem]:
    out = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            if line.strip():
                out.append(InfillingProblem.from_dict(json.loads(line)))
    return out
