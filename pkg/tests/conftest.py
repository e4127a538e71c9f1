import os
from pathlib import Path

import pytest

from vfkit.dataset import TestCase, TestSuite, load_corpus
from vfkit.execution import CompileCache, Runner

ROOT = Path(__file__).resolve().parent.parent
TOY_ROOT = ROOT / "data" / "toy_corpus"
REPLAY_ROOT = ROOT / "data" / "replay"


@pytest.fixture(scope="session")
def toy_corpus():
    return load_corpus(TOY_ROOT)


@pytest.fixture(scope="session")
def session_workdir(tmp_path_factory):
    return tmp_path_factory.mktemp("vfwork")


@pytest.fixture(scope="session")
def runner(session_workdir):
    # shared compile cache: every toy solution compiles at most once per run
    return Runner(
        parallelism=2,
        cache=CompileCache(session_workdir / "cache"),
        workdir=session_workdir,
        corpus_root=TOY_ROOT,
    )


def manual_suite(problem_id: str, rows: list[tuple[str, str]]) -> TestSuite:
    cases = [
        TestCase(index=i, input=inp.encode(), output=out.encode(), provenance="manual")
        for i, (inp, out) in enumerate(rows)
    ]
    return TestSuite(problem_id=problem_id, cases=cases)


# labeled inputs with hand-checked per-solution detection columns; the
# expected kill matrices live in the tests that consume these suites
P1_ROWS = [
    ("1000 1000\n", "2000\n"),
    ("-1000 -1000\n", "-2000\n"),
    ("0 0\n", "0\n"),
    ("7 -3\n", "4\n"),
    ("5 -5\n", "0\n"),
]
P2_ROWS = [
    ("1\n-5\n", "-5\n"),
    ("3\n-1 -2 -3\n", "-1\n"),
    ("5\n2 -1 2 -1 2\n", "4\n"),
    ("4\n-2 7 -3 4\n", "8\n"),
    ("2\n-3 -4\n", "-3\n"),
    ("3\n1 2 3\n", "6\n"),
]
P3_ROWS = [
    ("a b a\n", "2\n"),
    ("x\n", "1\n"),
    ("cat dog cat dog\n", "2\n"),
    ("a  b\n", "2\n"),
    ("p q r s\n", "4\n"),
    ("hello world\n", "2\n"),
    (" a b \n", "2\n"),
]


@pytest.fixture(scope="session")
def p1_suite():
    return manual_suite("p1", P1_ROWS)


@pytest.fixture(scope="session")
def p2_suite():
    return manual_suite("p2", P2_ROWS)


@pytest.fixture(scope="session")
def p3_suite():
    return manual_suite("p3", P3_ROWS)
