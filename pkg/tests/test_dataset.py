"""Corpus and suite formats: validation, referential integrity, round trips."""

import json

import pytest

from conftest import TOY_ROOT, manual_suite
from vfkit.dataset import (
    CorpusFormatError,
    Corpus,
    DanglingReferenceError,
    DuplicateIdError,
    Problem,
    Solution,
    SubmissionPair,
    SuiteFormatError,
    TestCase,
    TestSuite,
    load_corpus,
    load_suite,
    save_corpus,
    save_suite,
    validate_corpus,
)


def small_problem(pid="q1", **kw):
    defaults = dict(
        id=pid,
        platform="local",
        statement="add a and b",
        constraints_text="-10 <= a, b <= 10",
        ground_truth=f"{pid}-gt",
    )
    defaults.update(kw)
    return Problem(**defaults)


def small_solution(sid="q1-gt", pid="q1", kind="ground_truth", **kw):
    defaults = dict(
        id=sid,
        problem_id=pid,
        kind=kind,
        language="python",
        source="a, b = map(int, input().split())\nprint(a + b)\n",
    )
    defaults.update(kw)
    return Solution(**defaults)


class TestModelValidation:
    def test_problem_defaults(self):
        p = small_problem()
        assert p.difficulty == "medium"
        assert p.time_limit_ms == 2000
        assert p.memory_limit_mb == 256
        assert p.checker == "token"

    def test_problem_rejects_bad_fields(self):
        with pytest.raises(ValueError):
            small_problem(platform="topcoder")
        with pytest.raises(ValueError):
            small_problem(difficulty="impossible")
        with pytest.raises(ValueError):
            small_problem(time_limit_ms=0)
        with pytest.raises(ValueError):
            small_problem(checker="float")  # needs a tolerance

    def test_checker_forms(self):
        assert small_problem(checker="float:1e-6").checker == "float:1e-6"
        assert small_problem(checker="custom:chk.py").checker == "custom:chk.py"
        with pytest.raises(ValueError):
            small_problem(checker="float:-1")
        with pytest.raises(ValueError):
            small_problem(checker="custom:")

    def test_solution_kinds(self):
        with pytest.raises(ValueError):
            small_solution(kind="almost_right")
        # a known-wrong submission must say how it failed upstream
        with pytest.raises(ValueError):
            small_solution(kind="wrong_human")
        s = small_solution(kind="wrong_human", recorded_verdict="WA")
        assert s.recorded_verdict == "WA"
        with pytest.raises(ValueError):
            small_solution(kind="wrong_human", recorded_verdict="AC")

    def test_solution_languages(self):
        assert small_solution(language="cpp").language == "cpp"
        assert small_solution(language="other:rust").language == "other:rust"
        with pytest.raises(ValueError):
            small_solution(language="fortran")
        with pytest.raises(ValueError):
            small_solution(language="other:")

    def test_pair_requires_roles(self):
        wrong = small_solution("q1-w", kind="wrong_human", recorded_verdict="WA")
        fixed = small_solution("q1-c", kind="correct_human")
        pair = SubmissionPair(problem_id="q1", wrong=wrong, corrected=fixed)
        assert pair.same_author
        with pytest.raises(ValueError):
            SubmissionPair(problem_id="q1", wrong=fixed, corrected=fixed)
        with pytest.raises(ValueError):
            SubmissionPair(problem_id="q1", wrong=wrong, corrected=wrong)
        with pytest.raises(ValueError):
            SubmissionPair(problem_id="q9", wrong=wrong, corrected=fixed)

    def test_testcase_provenance(self):
        with pytest.raises(ValueError):
            TestCase(index=0, input=b"1\n", output=b"1\n", provenance="dreamed")
        with pytest.raises(ValueError):
            TestCase(index=-1, input=b"1\n", output=b"1\n", provenance="manual")

    def test_suite_indices_contiguous(self):
        good = manual_suite("q1", [("1 1\n", "2\n"), ("2 2\n", "4\n")])
        assert [c.index for c in good.cases] == [0, 1]
        assert len(good) == 2
        with pytest.raises(SuiteFormatError):
            TestSuite(problem_id="q1", cases=[
                TestCase(index=1, input=b"x", output=b"y", provenance="manual"),
            ])


class TestCorpusIO:
    def test_toy_corpus_loads(self):
        corpus = load_corpus(TOY_ROOT)
        assert set(corpus.problems) == {"p1", "p2", "p3"}
        assert len(corpus.solutions_for("p1", "wrong_human")) == 5
        gt = corpus.ground_truth_of(corpus.problems["p2"])
        assert gt.kind == "ground_truth"
        pairs = corpus.pairs_for("p3")
        assert len(pairs) == 1
        assert pairs[0].wrong.kind == "wrong_human"
        assert pairs[0].corrected.kind == "correct_human"

    def test_round_trip(self, tmp_path):
        corpus = load_corpus(TOY_ROOT)
        save_corpus(corpus, tmp_path / "copy")
        again = load_corpus(tmp_path / "copy")
        assert again.problems == corpus.problems
        assert again.solutions == corpus.solutions
        assert again.pairs == corpus.pairs

    def test_save_is_canonical(self, tmp_path):
        corpus = load_corpus(TOY_ROOT)
        save_corpus(corpus, tmp_path / "a")
        save_corpus(corpus, tmp_path / "b")
        for name in ("problems.jsonl", "solutions.jsonl", "pairs.jsonl"):
            assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()

    def test_missing_files_mean_empty_sections(self, tmp_path):
        root = tmp_path / "bare"
        root.mkdir()
        (root / "problems.jsonl").write_text(
            json.dumps({"id": "q1", "platform": "local", "statement": "s",
                        "constraints_text": "1 <= a, b <= 2", "ground_truth": "q1-gt"}) + "\n")
        (root / "solutions.jsonl").write_text(
            json.dumps({"id": "q1-gt", "problem_id": "q1", "kind": "ground_truth",
                        "language": "python", "source": "print(1)\n"}) + "\n")
        corpus = load_corpus(root)  # no pairs.jsonl
        assert corpus.pairs == []
        assert load_corpus(tmp_path / "does-not-exist").problems == {}

    def test_duplicate_id_rejected(self, tmp_path):
        root = tmp_path / "dup"
        root.mkdir()
        row = json.dumps({"id": "q1", "platform": "local", "statement": "s",
                          "constraints_text": "1 <= a, b <= 2", "ground_truth": "q1-gt"})
        (root / "problems.jsonl").write_text(row + "\n" + row + "\n")
        with pytest.raises(DuplicateIdError, match="q1"):
            load_corpus(root)

    def test_dangling_solution_reference(self, tmp_path):
        root = tmp_path / "dangle"
        root.mkdir()
        (root / "problems.jsonl").write_text(
            json.dumps({"id": "q1", "platform": "local", "statement": "s",
                        "constraints_text": "1 <= a, b <= 2", "ground_truth": "q1-gt"}) + "\n")
        (root / "solutions.jsonl").write_text("\n".join([
            json.dumps({"id": "q1-gt", "problem_id": "q1", "kind": "ground_truth",
                        "language": "python", "source": "print(1)\n"}),
            json.dumps({"id": "s1", "problem_id": "ghost", "kind": "correct_human",
                        "language": "python", "source": "print(1)\n"}),
        ]) + "\n")
        with pytest.raises(DanglingReferenceError, match="ghost"):
            load_corpus(root)

    def test_missing_ground_truth_reference(self, tmp_path):
        root = tmp_path / "nogt"
        root.mkdir()
        (root / "problems.jsonl").write_text(
            json.dumps({"id": "q1", "platform": "local", "statement": "s",
                        "constraints_text": "1 <= a, b <= 2", "ground_truth": "q1-gt"}) + "\n")
        with pytest.raises(DanglingReferenceError, match="q1-gt"):
            load_corpus(root)

    def test_malformed_line_names_location(self, tmp_path):
        root = tmp_path / "bad"
        root.mkdir()
        (root / "problems.jsonl").write_text("{not json\n")
        with pytest.raises(CorpusFormatError) as exc:
            load_corpus(root)
        assert exc.value.line_no == 1
        assert "problems.jsonl" in exc.value.path

    def test_field_error_becomes_format_error(self, tmp_path):
        root = tmp_path / "badfield"
        root.mkdir()
        (root / "problems.jsonl").write_text(
            json.dumps({"id": "q1", "platform": "geocities", "statement": "s",
                        "constraints_text": "1 <= a, b <= 2", "ground_truth": "q1-gt"}) + "\n")
        with pytest.raises(CorpusFormatError, match="geocities"):
            load_corpus(root)


class TestSuiteIO:
    def test_round_trip_preserves_bytes(self, tmp_path):
        cases = [
            TestCase(index=0, input=b"1 2\n", output=b"3\n", provenance="manual"),
            TestCase(index=1, input=b"no trailing newline", output=b"", provenance="direct"),
            TestCase(index=2, input=b"\x00\xffbinary\n\n", output=b"ok\r\n",
                     provenance="saga_multidim", generator_record_id="r-7"),
        ]
        suite = TestSuite(problem_id="q1", cases=cases, created_with_seed=99)
        path = tmp_path / "q1.suite.jsonl"
        save_suite(suite, path)
        again = load_suite(path)
        assert again.problem_id == "q1"
        assert again.created_with_seed == 99
        assert [(c.input, c.output, c.provenance, c.generator_record_id) for c in again.cases] \
            == [(c.input, c.output, c.provenance, c.generator_record_id) for c in cases]

    def test_save_is_deterministic(self, tmp_path):
        suite = manual_suite("q1", [("1 1\n", "2\n")])
        save_suite(suite, tmp_path / "a.jsonl")
        save_suite(suite, tmp_path / "b.jsonl")
        assert (tmp_path / "a.jsonl").read_bytes() == (tmp_path / "b.jsonl").read_bytes()

    def test_empty_file_rejected(self, tmp_path):
        path = tmp_path / "empty.jsonl"
        path.write_text("")
        with pytest.raises(SuiteFormatError):
            load_suite(path)

    def test_bad_header_rejected(self, tmp_path):
        path = tmp_path / "junk.jsonl"
        path.write_text('{"cases": 1}\n')
        with pytest.raises(CorpusFormatError, match="problem_id"):
            load_suite(path)

    def test_missing_case_field_rejected(self, tmp_path):
        path = tmp_path / "junk2.jsonl"
        path.write_text(
            '{"problem_id": "q1"}\n'
            '{"index": 0, "output_b64": "", "provenance": "manual"}\n'
        )
        with pytest.raises(CorpusFormatError, match="input_b64"):
            load_suite(path)

    def test_non_contiguous_indices_rejected(self, tmp_path):
        path = tmp_path / "gap.jsonl"
        path.write_text(
            '{"problem_id": "q1"}\n'
            '{"index": 1, "input_b64": "", "output_b64": "", "provenance": "manual"}\n'
        )
        with pytest.raises(SuiteFormatError):
            load_suite(path)


class TestCorpusValidation:
    def test_toy_corpus_fully_eligible(self):
        report = validate_corpus(load_corpus(TOY_ROOT))
        assert len(report.entries) == 3
        for entry in report.entries:
            assert entry.notes == []
            assert entry.has_ground_truth
            assert all(entry.eligible_paradigms.values())
        assert report.to_dict()["entries"][0]["problem_id"] == "p1"

    def test_missing_ground_truth_flagged(self):
        p = small_problem()
        sol = small_solution("q1-c1", kind="correct_human")
        corpus = Corpus(problems={"q1": p}, solutions={sol.id: sol}, pairs=[])
        entry = validate_corpus(corpus).entries[0]
        assert not entry.has_ground_truth
        assert any("ground truth" in note for note in entry.notes)
        assert not any(entry.eligible_paradigms.values())

    def test_no_wrong_solutions_noted(self):
        p = small_problem()
        gt = small_solution()
        corpus = Corpus(problems={"q1": p}, solutions={gt.id: gt}, pairs=[])
        entry = validate_corpus(corpus).entries[0]
        assert any("no wrong solutions" in note for note in entry.notes)
        # generation can still run; evaluation just has nothing to detect
        assert entry.eligible_paradigms["direct"]
        assert entry.eligible_paradigms["interpreter_random"]
        assert not entry.eligible_paradigms["saga_multidim"]
        assert not entry.eligible_paradigms["saga_differential"]
        assert not entry.eligible_paradigms["saga_full"]
