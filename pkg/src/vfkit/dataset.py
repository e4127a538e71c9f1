"""Corpus and test-suite persistence.

A corpus lives in a directory of three line-delimited JSON files, one record
per line: ``problems.jsonl``, ``solutions.jsonl``, ``pairs.jsonl``.  Missing
files are treated as empty.  Test suites are single ``*.suite.jsonl`` files
with a header line followed by one line per case.  Test-case payloads are
base64-encoded so arbitrary bytes survive the round trip.  Field names are
documented in docs/format.md.
"""

from __future__ import annotations

import base64
import json
from dataclasses import dataclass, field
from pathlib import Path

PLATFORMS = {"atcoder", "codeforces", "nowcoder", "local"}
DIFFICULTIES = {"easy", "medium", "hard"}
SOLUTION_KINDS = {"ground_truth", "correct_human", "wrong_human", "model_candidate"}
RECORDED_VERDICTS = {"WA", "TLE", "RE"}
PROVENANCES = {"direct", "random_interpreter", "saga_multidim", "saga_differential", "manual"}
PARADIGMS = {"direct", "interpreter_random", "saga_multidim", "saga_differential", "saga_full"}

DEFAULT_TIME_LIMIT_MS = 2000
DEFAULT_MEMORY_LIMIT_MB = 256


class DatasetError(Exception):
    """Base error for corpus/suite loading and validation."""


class CorpusFormatError(DatasetError):
    def __init__(self, message: str, path: str | Path | None = None, line_no: int | None = None):
        loc = ""
        if path is not None:
            loc = f" [{path}" + (f":{line_no}" if line_no is not None else "") + "]"
        super().__init__(f"{message}{loc}")
        self.path = str(path) if path is not None else None
        self.line_no = line_no


class DuplicateIdError(DatasetError):
    pass


class DanglingReferenceError(DatasetError):
    pass


class SuiteFormatError(DatasetError):
    pass


def _require_language(lang: str) -> str:
    if lang in ("cpp", "python") or (lang.startswith("other:") and len(lang) > 6):
        return lang
    raise ValueError(f"unknown language {lang!r} (expected 'cpp', 'python', or 'other:<tag>')")


def _require_checker(checker: str) -> str:
    if checker == "token":
        return checker
    if checker.startswith("float:"):
        eps = float(checker.split(":", 1)[1])  # raises on garbage
        if eps < 0:
            raise ValueError(f"negative checker epsilon in {checker!r}")
        return checker
    if checker.startswith("custom:") and len(checker) > 7:
        return checker
    raise ValueError(f"unknown checker {checker!r} (expected 'token', 'float:<eps>', or 'custom:<path>')")


@dataclass
class Problem:
    id: str
    platform: str
    statement: str
    constraints_text: str
    ground_truth: str  # solution id
    difficulty: str = "medium"
    time_limit_ms: int = DEFAULT_TIME_LIMIT_MS
    memory_limit_mb: int = DEFAULT_MEMORY_LIMIT_MB
    checker: str = "token"

    def __post_init__(self):
        if not self.id:
            raise ValueError("problem id must be non-empty")
        if self.platform not in PLATFORMS:
            raise ValueError(f"unknown platform {self.platform!r} for problem {self.id}")
        if self.difficulty not in DIFFICULTIES:
            raise ValueError(f"unknown difficulty {self.difficulty!r} for problem {self.id}")
        if self.time_limit_ms <= 0 or self.memory_limit_mb <= 0:
            raise ValueError(f"limits must be positive for problem {self.id}")
        _require_checker(self.checker)


@dataclass
class Solution:
    id: str
    problem_id: str
    kind: str
    language: str
    source: str
    recorded_verdict: str | None = None

    def __post_init__(self):
        if not self.id:
            raise ValueError("solution id must be non-empty")
        if self.kind not in SOLUTION_KINDS:
            raise ValueError(f"unknown solution kind {self.kind!r} for solution {self.id}")
        _require_language(self.language)
        if self.recorded_verdict is not None and self.recorded_verdict not in RECORDED_VERDICTS:
            raise ValueError(f"unknown recorded verdict {self.recorded_verdict!r} for solution {self.id}")
        # a wrong submission without its failure mode is unusable for targeted generation
        if self.kind == "wrong_human" and self.recorded_verdict is None:
            raise ValueError(f"wrong_human solution {self.id} must carry a recorded_verdict")


@dataclass
class SubmissionPair:
    problem_id: str
    wrong: Solution
    corrected: Solution
    same_author: bool = True

    def __post_init__(self):
        if self.wrong.problem_id != self.problem_id or self.corrected.problem_id != self.problem_id:
            raise ValueError(f"pair members must belong to problem {self.problem_id}")
        if self.wrong.kind != "wrong_human":
            raise ValueError(f"pair wrong member {self.wrong.id} must have kind wrong_human")
        if self.corrected.kind != "correct_human":
            raise ValueError(f"pair corrected member {self.corrected.id} must have kind correct_human")


@dataclass
class TestCase:
    index: int
    input: bytes
    output: bytes
    provenance: str
    generator_record_id: str | None = None

    def __post_init__(self):
        if self.index < 0:
            raise ValueError("test case index must be >= 0")
        if self.provenance not in PROVENANCES:
            raise ValueError(f"unknown provenance {self.provenance!r}")


@dataclass
class TestSuite:
    problem_id: str
    cases: list[TestCase] = field(default_factory=list)
    created_with_seed: int | None = None

    def __post_init__(self):
        self.validate()

    def validate(self):
        for pos, case in enumerate(self.cases):
            if case.index != pos:
                raise SuiteFormatError(
                    f"suite for {self.problem_id}: case at position {pos} has index {case.index} "
                    "(indices must be contiguous from 0)"
                )

    def __len__(self) -> int:
        return len(self.cases)


@dataclass
class Corpus:
    problems: dict[str, Problem] = field(default_factory=dict)
    solutions: dict[str, Solution] = field(default_factory=dict)
    pairs: list[SubmissionPair] = field(default_factory=list)

    def solutions_for(self, problem_id: str, kind: str | None = None) -> list[Solution]:
        out = [s for s in self.solutions.values() if s.problem_id == problem_id]
        if kind is not None:
            out = [s for s in out if s.kind == kind]
        return out

    def pairs_for(self, problem_id: str) -> list[SubmissionPair]:
        return [p for p in self.pairs if p.problem_id == problem_id]

    def ground_truth_of(self, problem: Problem) -> Solution:
        return self.solutions[problem.ground_truth]


def _read_jsonl(path: Path) -> list[tuple[int, dict]]:
    records = []
    with open(path, "r", encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise CorpusFormatError(f"invalid JSON: {exc}", path, line_no) from exc
            if not isinstance(obj, dict):
                raise CorpusFormatError("record must be a JSON object", path, line_no)
            records.append((line_no, obj))
    return records


def _build(cls, obj: dict, path: Path, line_no: int):
    try:
        return cls(**obj)
    except TypeError as exc:
        raise CorpusFormatError(f"bad {cls.__name__} record: {exc}", path, line_no) from exc
    except ValueError as exc:
        raise CorpusFormatError(str(exc), path, line_no) from exc


def load_corpus(root: str | Path) -> Corpus:
    """Load a corpus directory.  Missing files mean empty sections.

    Raises CorpusFormatError (with file and line), DuplicateIdError, or
    DanglingReferenceError.  Referential integrity is enforced here;
    behavioural checks (does the ground truth actually run) belong to
    validate_corpus and the execution layer.
    """
    root = Path(root)
    corpus = Corpus()

    ppath = root / "problems.jsonl"
    if ppath.exists():
        for line_no, obj in _read_jsonl(ppath):
            problem = _build(Problem, obj, ppath, line_no)
            if problem.id in corpus.problems:
                raise DuplicateIdError(f"duplicate problem id {problem.id!r} [{ppath}:{line_no}]")
            corpus.problems[problem.id] = problem

    spath = root / "solutions.jsonl"
    if spath.exists():
        for line_no, obj in _read_jsonl(spath):
            sol = _build(Solution, obj, spath, line_no)
            if sol.id in corpus.solutions:
                raise DuplicateIdError(f"duplicate solution id {sol.id!r} [{spath}:{line_no}]")
            corpus.solutions[sol.id] = sol

    for sol in corpus.solutions.values():
        if sol.problem_id not in corpus.problems:
            raise DanglingReferenceError(f"solution {sol.id} references unknown problem {sol.problem_id}")

    for problem in corpus.problems.values():
        gt = corpus.solutions.get(problem.ground_truth)
        if gt is None:
            raise DanglingReferenceError(
                f"problem {problem.id} references unknown ground-truth solution {problem.ground_truth}"
            )
        if gt.kind != "ground_truth":
            raise DanglingReferenceError(
                f"problem {problem.id} ground truth {gt.id} has kind {gt.kind!r}, expected ground_truth"
            )
        if gt.problem_id != problem.id:
            raise DanglingReferenceError(
                f"problem {problem.id} ground truth {gt.id} belongs to problem {gt.problem_id}"
            )

    qpath = root / "pairs.jsonl"
    if qpath.exists():
        for line_no, obj in _read_jsonl(qpath):
            for key in ("problem_id", "wrong", "corrected"):
                if key not in obj:
                    raise CorpusFormatError(f"pair record missing {key!r}", qpath, line_no)
            wrong = corpus.solutions.get(obj["wrong"])
            corrected = corpus.solutions.get(obj["corrected"])
            if wrong is None:
                raise DanglingReferenceError(f"pair references unknown solution {obj['wrong']!r} [{qpath}:{line_no}]")
            if corrected is None:
                raise DanglingReferenceError(
                    f"pair references unknown solution {obj['corrected']!r} [{qpath}:{line_no}]"
                )
            try:
                pair = SubmissionPair(
                    problem_id=obj["problem_id"],
                    wrong=wrong,
                    corrected=corrected,
                    same_author=bool(obj.get("same_author", True)),
                )
            except ValueError as exc:
                raise CorpusFormatError(str(exc), qpath, line_no) from exc
            if pair.problem_id not in corpus.problems:
                raise DanglingReferenceError(
                    f"pair references unknown problem {pair.problem_id!r} [{qpath}:{line_no}]"
                )
            corpus.pairs.append(pair)

    return corpus


def _dumps(obj: dict) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), ensure_ascii=False)


def save_corpus(corpus: Corpus, root: str | Path) -> None:
    """Write a corpus directory.  load_corpus(save_corpus(c)) == c."""
    root = Path(root)
    root.mkdir(parents=True, exist_ok=True)
    with open(root / "problems.jsonl", "w", encoding="utf-8") as fh:
        for pid in sorted(corpus.problems):
            p = corpus.problems[pid]
            fh.write(_dumps({
                "id": p.id, "platform": p.platform, "statement": p.statement,
                "constraints_text": p.constraints_text, "ground_truth": p.ground_truth,
                "difficulty": p.difficulty, "time_limit_ms": p.time_limit_ms,
                "memory_limit_mb": p.memory_limit_mb, "checker": p.checker,
            }) + "\n")
    with open(root / "solutions.jsonl", "w", encoding="utf-8") as fh:
        for sid in sorted(corpus.solutions):
            s = corpus.solutions[sid]
            rec = {
                "id": s.id, "problem_id": s.problem_id, "kind": s.kind,
                "language": s.language, "source": s.source,
            }
            if s.recorded_verdict is not None:
                rec["recorded_verdict"] = s.recorded_verdict
            fh.write(_dumps(rec) + "\n")
    with open(root / "pairs.jsonl", "w", encoding="utf-8") as fh:
        for pr in corpus.pairs:
            fh.write(_dumps({
                "problem_id": pr.problem_id, "wrong": pr.wrong.id,
                "corrected": pr.corrected.id, "same_author": pr.same_author,
            }) + "\n")


def save_suite(suite: TestSuite, path: str | Path) -> None:
    suite.validate()
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as fh:
        header = {"problem_id": suite.problem_id, "created_with_seed": suite.created_with_seed}
        fh.write(_dumps(header) + "\n")
        for case in suite.cases:
            rec = {
                "index": case.index,
                "input_b64": base64.b64encode(case.input).decode("ascii"),
                "output_b64": base64.b64encode(case.output).decode("ascii"),
                "provenance": case.provenance,
            }
            if case.generator_record_id is not None:
                rec["generator_record_id"] = case.generator_record_id
            fh.write(_dumps(rec) + "\n")


def load_suite(path: str | Path) -> TestSuite:
    path = Path(path)
    records = _read_jsonl(path)
    if not records:
        raise SuiteFormatError(f"suite file {path} is empty (missing header line)")
    line_no, header = records[0]
    if "problem_id" not in header:
        raise CorpusFormatError("suite header missing 'problem_id'", path, line_no)
    cases = []
    for line_no, obj in records[1:]:
        try:
            case = TestCase(
                index=obj["index"],
                input=base64.b64decode(obj["input_b64"]),
                output=base64.b64decode(obj["output_b64"]),
                provenance=obj["provenance"],
                generator_record_id=obj.get("generator_record_id"),
            )
        except KeyError as exc:
            raise CorpusFormatError(f"suite case missing field {exc}", path, line_no) from exc
        except ValueError as exc:
            raise CorpusFormatError(str(exc), path, line_no) from exc
        cases.append(case)
    try:
        return TestSuite(
            problem_id=header["problem_id"],
            cases=cases,
            created_with_seed=header.get("created_with_seed"),
        )
    except SuiteFormatError as exc:
        raise SuiteFormatError(f"{exc} [{path}]") from exc


@dataclass
class ProblemValidation:
    problem_id: str
    has_ground_truth: bool
    n_correct: int
    n_wrong: int
    n_pairs: int
    eligible_paradigms: dict[str, bool]
    notes: list[str] = field(default_factory=list)


@dataclass
class ValidationReport:
    entries: list[ProblemValidation]

    def to_dict(self) -> dict:
        return {
            "entries": [
                {
                    "problem_id": e.problem_id,
                    "has_ground_truth": e.has_ground_truth,
                    "n_correct": e.n_correct,
                    "n_wrong": e.n_wrong,
                    "n_pairs": e.n_pairs,
                    "eligible_paradigms": e.eligible_paradigms,
                    "notes": e.notes,
                }
                for e in self.entries
            ]
        }


def validate_corpus(corpus: Corpus) -> ValidationReport:
    """Report per-problem usability.  Never raises on content gaps: a problem
    with no wrong solutions (detection metrics vacuous) or no ground truth
    (cannot label generated inputs) is flagged, not rejected.
    """
    entries = []
    for pid in sorted(corpus.problems):
        problem = corpus.problems[pid]
        gt = corpus.solutions.get(problem.ground_truth)
        has_gt = gt is not None and gt.kind == "ground_truth"
        n_correct = len(corpus.solutions_for(pid, "correct_human"))
        n_wrong = len(corpus.solutions_for(pid, "wrong_human"))
        n_pairs = len(corpus.pairs_for(pid))
        notes = []
        if not has_gt:
            notes.append("missing ground truth: generated inputs cannot be labeled")
        if n_wrong == 0:
            notes.append("no wrong solutions: detection metrics are vacuous")
        eligible = {
            "direct": has_gt,
            "interpreter_random": has_gt,
            "saga_multidim": has_gt and n_correct >= 1,
            "saga_differential": has_gt and n_pairs >= 1,
            "saga_full": has_gt and (n_correct >= 1 or n_pairs >= 1),
        }
        entries.append(ProblemValidation(
            problem_id=pid,
            has_ground_truth=has_gt,
            n_correct=n_correct,
            n_wrong=n_wrong,
            n_pairs=n_pairs,
            eligible_paradigms=eligible,
            notes=notes,
        ))
    return ValidationReport(entries=entries)
