"""Sandbox, toolchain, compile cache, and output checkers."""

import json
import signal
import sys

import pytest

from conftest import manual_suite
from vfkit.execution import (
    CheckerFailure,
    CompileCache,
    CompiledProgram,
    CompileFailure,
    ExecSpec,
    Runner,
    ToolchainError,
    check_output,
    compile_program,
    default_toolchain,
    load_toolchain,
    make_checker,
    run_one,
)


def compile_py(source, runner):
    prog = compile_program(source, runner.toolchain, runner.cache, language="python")
    assert isinstance(prog, CompiledProgram), getattr(prog, "diagnostics", prog)
    return prog


def spec(time_ms=2000, wall_ms=None, mem=256):
    return ExecSpec(
        run_command=[sys.executable, "{src}"],
        time_limit_ms=time_ms,
        wall_limit_ms=wall_ms if wall_ms is not None else 2 * time_ms,
        memory_limit_mb=mem,
    )


class TestExecSpec:
    def test_wall_must_cover_cpu(self):
        with pytest.raises(ValueError):
            ExecSpec(run_command=["x"], time_limit_ms=1000, wall_limit_ms=500)

    def test_limits_positive(self):
        with pytest.raises(ValueError):
            ExecSpec(run_command=["x"], time_limit_ms=0)
        with pytest.raises(ValueError):
            ExecSpec(run_command=["x"], memory_limit_mb=-1)


class TestRunOne:
    def test_clean_run(self, runner):
        prog = compile_py("print(input())\n", runner)
        res = run_one(prog, b"hello\n", spec(), runner.workdir)
        assert res.verdict == "AC"
        assert res.exit_code == 0
        assert res.term_signal is None
        assert res.stdout == b"hello\n"
        assert res.kill_reason is None

    def test_runtime_error_nonzero_exit(self, runner):
        prog = compile_py("x = 1 // 0\n", runner)
        res = run_one(prog, b"", spec(), runner.workdir)
        assert res.verdict == "RE"
        assert res.exit_code == 1
        assert "ZeroDivisionError" in res.stderr_excerpt

    def test_runtime_error_signal(self, runner):
        prog = compile_py(
            "import os, signal\nos.kill(os.getpid(), signal.SIGSEGV)\n", runner)
        res = run_one(prog, b"", spec(), runner.workdir)
        assert res.verdict == "RE"
        assert res.term_signal == signal.SIGSEGV

    def test_cpu_spin_gets_tle(self, runner):
        prog = compile_py("while True:\n    pass\n", runner)
        res = run_one(prog, b"", spec(time_ms=200, wall_ms=5000), runner.workdir)
        assert res.verdict == "TLE"
        # killed for CPU, not wall: the loop burns CPU continuously
        assert res.kill_reason == "cpu" or res.cpu_time_ms > 200

    def test_idle_sleep_gets_wall_tle(self, runner):
        prog = compile_py("import time\ntime.sleep(30)\n", runner)
        res = run_one(prog, b"", spec(time_ms=200, wall_ms=500), runner.workdir)
        assert res.verdict == "TLE"
        assert res.kill_reason == "wall"
        assert res.cpu_time_ms < 200

    def test_memory_hog_fails(self, runner):
        prog = compile_py("x = bytearray(300 * 1024 * 1024)\nprint(len(x))\n", runner)
        res = run_one(prog, b"", spec(mem=64), runner.workdir)
        assert res.verdict == "RE"

    def test_partial_stdout_survives_failure(self, runner):
        prog = compile_py(
            "import sys\nprint('before')\nsys.stdout.flush()\nraise SystemExit(3)\n", runner)
        res = run_one(prog, b"", spec(), runner.workdir)
        assert res.verdict == "RE"
        assert res.exit_code == 3
        assert res.stdout == b"before\n"

    def test_missing_interpreter_is_toolchain_error(self, runner):
        prog = CompiledProgram(language="python", run_argv=["/no/such/interp", "{src}"],
                               src_path="/dev/null", bin_path=None, cache_key="x")
        with pytest.raises(ToolchainError):
            run_one(prog, b"", spec(), runner.workdir)


class TestCompileAndCache:
    def test_python_compile_round_trip(self, tmp_path):
        cache = CompileCache(tmp_path / "cache")
        prog = compile_program("print(1)\n", cache=cache, language="python")
        assert isinstance(prog, CompiledProgram)
        assert cache.misses == 1 and cache.hits == 0
        again = compile_program("print(1)\n", cache=cache, language="python")
        assert again.cache_key == prog.cache_key
        assert cache.misses == 1 and cache.hits == 1

    def test_syntax_error_is_compile_failure_and_cached(self, tmp_path):
        cache = CompileCache(tmp_path / "cache")
        bad = "def f(:\n"
        first = compile_program(bad, cache=cache, language="python")
        assert isinstance(first, CompileFailure)
        assert "SyntaxError" in first.diagnostics
        assert first.returncode != 0
        second = compile_program(bad, cache=cache, language="python")
        assert isinstance(second, CompileFailure)
        assert cache.misses == 1 and cache.hits == 1

    def test_different_sources_different_slots(self, tmp_path):
        cache = CompileCache(tmp_path / "cache")
        a = compile_program("print(1)\n", cache=cache, language="python")
        b = compile_program("print(2)\n", cache=cache, language="python")
        assert a.cache_key != b.cache_key
        assert cache.misses == 2

    def test_raw_source_requires_language(self):
        with pytest.raises(ValueError):
            compile_program("print(1)\n")

    def test_unknown_language_rejected(self, tmp_path):
        with pytest.raises(ToolchainError):
            compile_program("x", cache=CompileCache(tmp_path), language="other:rust")

    def test_cpp_end_to_end(self, runner):
        src = (
            "#include <bits/stdc++.h>\n"
            "int main(){long a,b;std::cin>>a>>b;std::cout<<a+b<<\"\\n\";}\n"
        )
        prog = compile_program(src, runner.toolchain, runner.cache, language="cpp")
        assert isinstance(prog, CompiledProgram)
        assert prog.bin_path is not None
        res = run_one(prog, b"3 4\n", spec(), runner.workdir)
        assert res.verdict == "AC"
        assert res.stdout == b"7\n"

    def test_cpp_compile_error(self, runner):
        fail = compile_program("int main(){ return 0 }\n",
                               runner.toolchain, runner.cache, language="cpp")
        assert isinstance(fail, CompileFailure)
        assert fail.diagnostics.strip() != ""


class TestToolchainConfig:
    def test_defaults_cover_both_languages(self):
        tc = default_toolchain()
        assert set(tc) >= {"python", "cpp"}
        assert tc["python"]["compile"] is not None  # syntax errors must be CE

    def test_load_merges_over_defaults(self, tmp_path):
        path = tmp_path / "tc.json"
        path.write_text(json.dumps({"python": {"run": ["python3", "{src}"]}}))
        tc = load_toolchain(path)
        assert tc["python"]["run"] == ["python3", "{src}"]
        assert tc["python"]["compile"] is None
        assert "cpp" in tc

    def test_load_rejects_bad_entries(self, tmp_path):
        path = tmp_path / "tc.json"
        path.write_text(json.dumps({"python": {"compile": ["x"]}}))
        with pytest.raises(ToolchainError):
            load_toolchain(path)
        path.write_text(json.dumps(["nope"]))
        with pytest.raises(ToolchainError):
            load_toolchain(path)


class TestCheckers:
    def test_token_checker_ignores_whitespace_shape(self):
        c = make_checker("token")
        assert check_output(b"1 2\n3\n", b"1\n2 3", c)
        assert check_output(b"  x  \n", b"x", c)
        assert not check_output(b"1 2", b"1 3", c)
        assert not check_output(b"1", b"1 1", c)

    def test_float_checker_tolerance(self):
        c = make_checker("float:1e-6")
        assert check_output(b"1.0000004", b"1.0", c)
        assert not check_output(b"1.1", b"1.0", c)
        # relative above 1, absolute below
        assert check_output(b"1000000.5", b"1000000.0", c)

    def test_float_checker_rejects_nan(self):
        c = make_checker("float:1e-6")
        assert not check_output(b"nan", b"nan", c)

    def test_float_checker_non_numeric_falls_back_to_bytes(self):
        c = make_checker("float:1e-6")
        assert check_output(b"YES 1.0", b"YES 1.0000001", c)
        assert not check_output(b"YES", b"yes", c)

    def test_unknown_checker_rejected(self):
        with pytest.raises(ValueError):
            make_checker("diff")

    def test_custom_checker_protocol(self, tmp_path, runner):
        # accept iff actual == expected after strip AND the judge passed
        # the original input through
        (tmp_path / "chk.py").write_text(
            "import sys\n"
            "inp, act, exp = (open(p, 'rb').read() for p in sys.argv[1:4])\n"
            "if inp == b'boom':\n"
            "    sys.exit(7)\n"
            "sys.exit(0 if act.strip() == exp.strip() else 1)\n"
        )
        c = make_checker("custom:chk.py", corpus_root=tmp_path,
                         toolchain=runner.toolchain, cache=runner.cache)
        assert check_output(b"42\n", b"42", c, input_bytes=b"1 2\n")
        assert not check_output(b"41\n", b"42", c, input_bytes=b"1 2\n")
        with pytest.raises(CheckerFailure):
            check_output(b"x", b"x", c, input_bytes=b"boom")

    def test_custom_checker_requires_root_and_file(self, tmp_path):
        with pytest.raises(ValueError):
            make_checker("custom:chk.py")
        with pytest.raises(ToolchainError):
            make_checker("custom:missing.py", corpus_root=tmp_path)


class TestRunner:
    def test_run_many_preserves_job_order(self, runner):
        progs = [compile_py(f"print({i})\n", runner) for i in range(4)]
        jobs = [(p, b"", spec()) for p in progs]
        results = Runner(toolchain=runner.toolchain, parallelism=4,
                         cache=runner.cache, workdir=runner.workdir).run_many(jobs)
        assert [r.stdout for r in results] == [b"0\n", b"1\n", b"2\n", b"3\n"]

    def test_run_suite_ground_truth_all_ac(self, runner, toy_corpus, p1_suite):
        problem = toy_corpus.problems["p1"]
        gt = toy_corpus.ground_truth_of(problem)
        assert runner.run_suite(gt, p1_suite, problem) == ["AC"] * 5

    def test_run_suite_ce_everywhere(self, runner, toy_corpus, p1_suite):
        problem = toy_corpus.problems["p1"]
        broken = toy_corpus.solutions["p1-w5"]
        assert runner.run_suite(broken, p1_suite, problem) == ["CE"] * 5

    def test_run_suite_detects_known_failures(self, runner, toy_corpus, p1_suite):
        problem = toy_corpus.problems["p1"]
        verdicts = runner.run_suite(toy_corpus.solutions["p1-w4"], p1_suite, problem)
        assert [v != "AC" for v in verdicts] == [False, False, True, False, False]
        assert verdicts[2] == "RE"

    def test_run_suite_id_mismatch(self, runner, toy_corpus, p1_suite):
        problem = toy_corpus.problems["p2"]
        gt = toy_corpus.ground_truth_of(problem)
        with pytest.raises(ValueError):
            runner.run_suite(gt, p1_suite, problem)
