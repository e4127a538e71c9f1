"""Kill matrices: which test detects which wrong solution.

Row i is test case i of a suite, column j a wrong solution; a True cell
means the solution failed that test (any non-AC verdict).  Solutions that
fail to compile get an all-True column and a CE flag so downstream metrics
can exclude them.  Persistence is a one-line JSON header plus base64-packed
bits, with a CSV export for eyeballing.
"""

from __future__ import annotations

import base64
import hashlib
import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .dataset import Problem, Solution, TestSuite
from .execution import CompileFailure, Runner


@dataclass
class KillMatrix:
    problem_id: str
    detects: np.ndarray          # bool, shape (n_tests, m_solutions)
    solution_ids: list[str]
    test_indices: list[int]
    ce_flags: np.ndarray         # bool, shape (m_solutions,)

    def __post_init__(self):
        self.detects = np.asarray(self.detects, dtype=bool)
        self.ce_flags = np.asarray(self.ce_flags, dtype=bool)
        n, m = self.detects.shape
        if len(self.solution_ids) != m:
            raise ValueError(f"{len(self.solution_ids)} solution ids for {m} columns")
        if len(self.test_indices) != n:
            raise ValueError(f"{len(self.test_indices)} test indices for {n} rows")
        if self.ce_flags.shape != (m,):
            raise ValueError("ce_flags length must match column count")
        if len(set(self.solution_ids)) != m:
            raise ValueError("duplicate solution ids in kill matrix")
        # a CE column is all-True by construction
        for j in range(m):
            if self.ce_flags[j] and not self.detects[:, j].all() and n > 0:
                raise ValueError(f"CE column {self.solution_ids[j]} must be all-True")

    @property
    def n_tests(self) -> int:
        return self.detects.shape[0]

    @property
    def m_solutions(self) -> int:
        return self.detects.shape[1]

    def effective_detects(self, include_ce: bool = False) -> np.ndarray:
        """Matrix restricted to the columns metrics should see.  CE columns
        are artifacts of compilation, not detection, so they are excluded
        unless explicitly requested."""
        if include_ce:
            return self.detects
        return self.detects[:, ~self.ce_flags]

    def __eq__(self, other) -> bool:
        if not isinstance(other, KillMatrix):
            return NotImplemented
        return (
            self.problem_id == other.problem_id
            and self.solution_ids == other.solution_ids
            and self.test_indices == other.test_indices
            and np.array_equal(self.detects, other.detects)
            and np.array_equal(self.ce_flags, other.ce_flags)
        )


def _suite_hash(suite: TestSuite) -> str:
    h = hashlib.sha256()
    for case in suite.cases:
        h.update(str(case.index).encode())
        h.update(b"\x00")
        h.update(case.input)
        h.update(b"\x00")
        h.update(case.output)
        h.update(b"\x00")
    return h.hexdigest()


def _solution_hash(solution: Solution) -> str:
    h = hashlib.sha256()
    h.update(solution.language.encode())
    h.update(b"\x00")
    h.update(solution.source.encode("utf-8"))
    return h.hexdigest()


def build_kill_matrix(problem: Problem, suite: TestSuite, wrong_solutions: list[Solution],
                      runner: Runner, column_cache: dict | None = None) -> KillMatrix:
    """Judge every solution against every case and record detections.

    Any non-AC verdict counts as detection.  An optional column_cache maps
    (suite_hash, solution_hash) -> (column, ce) so re-evaluating the same
    solution on the same suite skips the runs entirely.
    """
    for sol in wrong_solutions:
        if sol.problem_id != problem.id:
            raise ValueError(f"solution {sol.id} belongs to {sol.problem_id}, not {problem.id}")
    if len({s.id for s in wrong_solutions}) != len(wrong_solutions):
        raise ValueError("duplicate solution ids passed to build_kill_matrix")

    n = len(suite.cases)
    m = len(wrong_solutions)
    detects = np.zeros((n, m), dtype=bool)
    ce_flags = np.zeros(m, dtype=bool)
    shash = _suite_hash(suite) if column_cache is not None else None

    pending: list[int] = []
    for j, sol in enumerate(wrong_solutions):
        if column_cache is not None:
            hit = column_cache.get((shash, _solution_hash(sol)))
            if hit is not None:
                col, ce = hit
                detects[:, j] = col
                ce_flags[j] = ce
                continue
        pending.append(j)

    # compile pass (serial: the cache makes repeats free and CE is common)
    programs: dict[int, object] = {}
    for j in pending:
        prog = runner.compile(wrong_solutions[j])
        if isinstance(prog, CompileFailure):
            detects[:, j] = True
            ce_flags[j] = True
        else:
            programs[j] = prog

    # one job per (case, solution) cell so the pool can interleave freely
    jobs = []
    cells = []
    for j, prog in programs.items():
        spec = runner.spec_for_problem(problem, wrong_solutions[j].language)
        for i, case in enumerate(suite.cases):
            jobs.append((prog, case.input, spec))
            cells.append((i, j))
    results = runner.run_many(jobs)
    checker = runner.checker_for(problem) if jobs else None
    from .execution import check_output  # local import to avoid cycle at module load
    for (i, j), res in zip(cells, results):
        case = suite.cases[i]
        if res.verdict != "AC":
            detects[i, j] = True
        else:
            detects[i, j] = not check_output(res.stdout, case.output, checker, input_bytes=case.input)

    if column_cache is not None:
        for j, sol in enumerate(wrong_solutions):
            column_cache[(shash, _solution_hash(sol))] = (detects[:, j].copy(), bool(ce_flags[j]))

    return KillMatrix(
        problem_id=problem.id,
        detects=detects,
        solution_ids=[s.id for s in wrong_solutions],
        test_indices=list(range(n)),
        ce_flags=ce_flags,
    )


def error_pattern(matrix: KillMatrix, test_index: int) -> np.ndarray:
    """The detection vector of one test across all solutions (a row copy)."""
    n = matrix.n_tests
    if not 0 <= test_index < n:
        raise IndexError(f"test index {test_index} out of range for {n} tests")
    return matrix.detects[test_index].copy()


def union_matrices(a: KillMatrix, b: KillMatrix) -> KillMatrix:
    """Row-concatenate two matrices built from different suites over the
    same solutions, in the same order.  Models merging test suites."""
    if a.problem_id != b.problem_id:
        raise ValueError(f"cannot union matrices for {a.problem_id} and {b.problem_id}")
    if a.solution_ids != b.solution_ids:
        raise ValueError("matrices must share identical solution columns (same ids, same order)")
    if not np.array_equal(a.ce_flags, b.ce_flags):
        raise ValueError("matrices disagree on CE flags for shared solutions")
    detects = np.concatenate([a.detects, b.detects], axis=0)
    return KillMatrix(
        problem_id=a.problem_id,
        detects=detects,
        solution_ids=list(a.solution_ids),
        test_indices=list(range(detects.shape[0])),
        ce_flags=a.ce_flags.copy(),
    )


def save_matrix(matrix: KillMatrix, path: str | Path) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    header = {
        "problem_id": matrix.problem_id,
        "n_tests": matrix.n_tests,
        "m_solutions": matrix.m_solutions,
        "solution_ids": matrix.solution_ids,
        "test_indices": matrix.test_indices,
        "ce_flags": [bool(x) for x in matrix.ce_flags],
    }
    packed = np.packbits(matrix.detects.reshape(-1).astype(np.uint8))
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(json.dumps(header, sort_keys=True, separators=(",", ":")) + "\n")
        fh.write(base64.b64encode(packed.tobytes()).decode("ascii") + "\n")


def load_matrix(path: str | Path) -> KillMatrix:
    path = Path(path)
    with open(path, "r", encoding="utf-8") as fh:
        header = json.loads(fh.readline())
        blob = base64.b64decode(fh.readline().strip())
    n, m = header["n_tests"], header["m_solutions"]
    bits = np.unpackbits(np.frombuffer(blob, dtype=np.uint8))[: n * m]
    detects = bits.astype(bool).reshape(n, m)
    return KillMatrix(
        problem_id=header["problem_id"],
        detects=detects,
        solution_ids=header["solution_ids"],
        test_indices=header["test_indices"],
        ce_flags=np.array(header["ce_flags"], dtype=bool),
    )


def matrix_to_csv(matrix: KillMatrix, path: str | Path) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("test_index," + ",".join(matrix.solution_ids) + "\n")
        for i, idx in enumerate(matrix.test_indices):
            row = ",".join("1" if x else "0" for x in matrix.detects[i])
            fh.write(f"{idx},{row}\n")
