"""Diff parsing/application and benchmark construction with a stub runner."""

from __future__ import annotations

import pytest

from fimpipe.bench import (
    StubRunner,
    build_problem,
    build_problems,
    evaluate_problem,
    evaluate_problems,
    find_candidate_hunks,
    verify_dependency,
)
from fimpipe.diffs import PatchError, apply_hunks, parse_unified_diff

BASE_CALC = """def add(a, b):
    return a + b


def config():
    return {}
"""

# one multi-line candidate (scale feature) + one single-line tweak
DIFF = """--- a/calc.py
+++ b/calc.py
@@ -1,6 +1,11 @@
 def add(a, b):
     return a + b


+def scale(values, factor):
+    out = [v * factor for v in values]
+    return out
+
+
 def config():
-    return {}
+    return {"version": 2}
"""


def write_snapshot(tmp_path):
    (tmp_path / "calc.py").write_text(BASE_CALC)
    (tmp_path / "test_calc.py").write_text("# placeholder test file\n")
    return str(tmp_path)


def judge(files):
    """Stub verdict: passes only when scale() exists and version is bumped."""
    calc = files.get("calc.py", "")
    if "def scale" in calc and "out = [v * factor for v in values]" in calc \
            and '"version": 2' in calc:
        return "pass"
    return "fail"


def test_parse_unified_diff_structure():
    patchset = parse_unified_diff(DIFF, source_pr_id="pr-1")
    assert patchset.source_pr_id == "pr-1"
    # one @@ block decomposes into two minimal hunks: the added function and
    # the one-line version bump
    assert len(patchset.hunks) == 2
    first, second = patchset.hunks
    assert first.file == second.file == "calc.py"
    assert first.kind == "add"
    assert len(first.new_lines) == 5
    assert second.kind == "modify"
    assert second.new_lines == ['    return {"version": 2}']


def test_parse_truncated_hunk_rejected():
    broken = "--- a/x.py\n+++ b/x.py\n@@ -1,3 +1,3 @@\n context\n"
    with pytest.raises(PatchError):
        parse_unified_diff(broken)


def test_apply_hunks_roundtrip():
    patchset = parse_unified_diff(DIFF)
    patched, placements = apply_hunks({"calc.py": BASE_CALC}, patchset.hunks)
    assert "def scale" in patched["calc.py"]
    assert '"version": 2' in patched["calc.py"]
    assert placements[0].file == "calc.py"


def test_apply_context_mismatch_raises():
    patchset = parse_unified_diff(DIFF)
    with pytest.raises(PatchError):
        apply_hunks({"calc.py": "totally different\n"}, patchset.hunks)


MULTI_DIFF = """--- a/one.py
+++ b/one.py
@@ -1,2 +1,4 @@
 x = 1
+y = 2
+z = 3
 w = 4
--- a/two.py
+++ b/two.py
@@ -1,1 +1,2 @@
 a = 1
+b = 2
--- a/three.py
+++ b/three.py
@@ -1,3 +1,3 @@
 p = 1
-q = 2
+q = 20
 r = 3
"""


def test_find_candidates_requires_consecutive_lines():
    patchset = parse_unified_diff(MULTI_DIFF)
    candidates = find_candidate_hunks(patchset)
    assert [c.file for c in candidates] == ["one.py"]


def test_interleaved_additions_not_candidate():
    diff = """--- a/x.py
+++ b/x.py
@@ -1,3 +1,5 @@
 a = 1
+b = 2
 c = 3
+d = 4
 e = 5
"""
    patchset = parse_unified_diff(diff)
    assert find_candidate_hunks(patchset) == []


@pytest.fixture()
def snapshot(tmp_path):
    return write_snapshot(tmp_path)


@pytest.fixture()
def patchset():
    return parse_unified_diff(DIFF, source_pr_id="pr-1")


def test_verify_dependency_true_for_needed_hunk(snapshot, patchset):
    candidate = find_candidate_hunks(patchset)[0]
    runner = StubRunner(judge)
    depends, reason = verify_dependency(snapshot, patchset, candidate, runner,
                                        "pytest -q")
    assert depends
    assert reason == "test_fails_without_candidate"


def test_verify_dependency_false_when_test_passes_anyway(snapshot, patchset):
    candidate = find_candidate_hunks(patchset)[0]
    runner = StubRunner(lambda files: "pass")
    depends, reason = verify_dependency(snapshot, patchset, candidate, runner, "t")
    assert not depends
    assert reason == "test_passes_without_candidate"


def test_verify_dependency_discards_on_runner_error(snapshot, patchset):
    candidate = find_candidate_hunks(patchset)[0]
    runner = StubRunner(lambda files: "error")
    depends, reason = verify_dependency(snapshot, patchset, candidate, runner, "t")
    assert not depends
    assert reason == "runner_error"


def test_build_problem_reconstruction(snapshot, patchset):
    candidate = find_candidate_hunks(patchset)[0]
    problem = build_problem(snapshot, patchset, candidate, "pytest -q")
    full, _ = apply_hunks({"calc.py": BASE_CALC}, patchset.hunks)
    assert problem.prefix + problem.ground_truth_middle + problem.suffix == \
        full["calc.py"]
    assert len(problem.ground_truth_middle.split("\n")) >= 2
    assert problem.test_command == "pytest -q"


def test_problem_at_file_start_and_end(tmp_path):
    (tmp_path / "f.py").write_text("old = 1\n")
    diff_start = """--- a/f.py
+++ b/f.py
@@ -1,1 +1,3 @@
+first = 0
+second = 0
 old = 1
"""
    patchset = parse_unified_diff(diff_start)
    candidate = find_candidate_hunks(patchset)[0]
    problem = build_problem(str(tmp_path), patchset, candidate, "t")
    assert problem.prefix == ""
    diff_end = """--- a/f.py
+++ b/f.py
@@ -1,1 +1,3 @@
 old = 1
+tail_a = 2
+tail_b = 3
"""
    patchset = parse_unified_diff(diff_end)
    candidate = find_candidate_hunks(patchset)[0]
    problem = build_problem(str(tmp_path), patchset, candidate, "t")
    full, _ = apply_hunks({"f.py": "old = 1\n"}, patchset.hunks)
    assert problem.prefix + problem.ground_truth_middle + problem.suffix == \
        full["f.py"]
    assert problem.suffix in ("", "\n")


def test_ground_truth_splice_passes_and_removal_fails(snapshot, patchset):
    runner = StubRunner(judge)
    problems, audit = build_problems(snapshot, patchset, runner, "pytest -q")
    assert len(problems) == 1
    problem = problems[0]
    assert evaluate_problem(problem, problem.ground_truth_middle, runner) == "pass"
    assert evaluate_problem(problem, "", runner) == "fail"


def test_evaluate_problem_runner_error_is_fail(snapshot, patchset):
    runner = StubRunner(judge)
    problems, _ = build_problems(snapshot, patchset, runner, "pytest -q")
    erroring = StubRunner(lambda files: "error")
    assert evaluate_problem(problems[0], "x", erroring) == "fail"


def test_pass_at_1_fraction(snapshot, patchset):
    runner = StubRunner(judge)
    problems, _ = build_problems(snapshot, patchset, runner, "pytest -q")
    generations = {problems[0].problem_id: problems[0].ground_truth_middle}
    report = evaluate_problems(problems, generations, runner)
    assert report["pass_at_1"] == 1.0
    report2 = evaluate_problems(problems, {}, runner)
    assert report2["pass_at_1"] == 0.0
    assert report2["missing"] == 1


def test_builder_determinism(snapshot, patchset):
    runner = StubRunner(judge)
    first, _ = build_problems(snapshot, patchset, runner, "pytest -q")
    second, _ = build_problems(snapshot, patchset, runner, "pytest -q")
    assert [p.to_dict() for p in first] == [p.to_dict() for p in second]
