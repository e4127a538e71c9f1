"""Sandboxed compilation and execution of untrusted candidate programs.

Programs run in their own process group with hard resource limits.  CPU time
is enforced two ways: a polling watchdog (psutil) that kills the group as
soon as consumed CPU exceeds the limit, and an RLIMIT_CPU backstop one
second above it in case the watchdog thread stalls.  Wall-clock overruns are
killed by the same watchdog; both kill reasons map to TLE.  Address space is
capped with RLIMIT_AS.  Stdio goes through temp files, never pipes, so a
program that floods stdout cannot deadlock the parent.  Resource usage comes
from os.wait4 (rusage).

Scratch space defaults to the system temp dir; set VF_WORKDIR to relocate it.
"""

from __future__ import annotations

import hashlib
import json
import math
import os
import resource
import shutil
import signal
import subprocess
import sys
import tempfile
import threading
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import psutil

from .dataset import Problem, Solution, TestSuite

DEFAULT_TIME_LIMIT_MS = 2000
DEFAULT_WALL_LIMIT_MS = 4000
DEFAULT_MEMORY_LIMIT_MB = 256
_COMPILE_WALL_S = 60
_STDOUT_CAP = 32 * 1024 * 1024
_STDERR_EXCERPT = 2048
_POLL_INTERVAL_S = 0.01

VERDICTS = ("AC", "WA", "TLE", "RE", "CE")


class SandboxError(Exception):
    """Infrastructure failure while running a program (not a program verdict)."""


class ToolchainError(Exception):
    """Missing or misconfigured compiler/interpreter."""


class CheckerFailure(Exception):
    """A custom checker crashed or returned an out-of-protocol exit code."""


@dataclass
class ExecSpec:
    """How to build and run one program, with its resource budget."""
    run_command: list[str]
    compile_command: list[str] | None = None
    time_limit_ms: int = DEFAULT_TIME_LIMIT_MS
    wall_limit_ms: int = DEFAULT_WALL_LIMIT_MS
    memory_limit_mb: int = DEFAULT_MEMORY_LIMIT_MB

    def __post_init__(self):
        if self.time_limit_ms <= 0 or self.wall_limit_ms <= 0 or self.memory_limit_mb <= 0:
            raise ValueError("resource limits must be positive")
        if self.wall_limit_ms < self.time_limit_ms:
            raise ValueError("wall_limit_ms must be >= time_limit_ms")


@dataclass
class RunResult:
    verdict: str  # AC here means "ran to completion"; output checking happens elsewhere
    exit_code: int | None
    term_signal: int | None
    cpu_time_ms: int
    wall_time_ms: int
    peak_memory_mb: int
    stdout: bytes
    stderr_excerpt: str
    kill_reason: str | None = None  # "cpu" | "wall" | None


@dataclass
class CompiledProgram:
    language: str
    run_argv: list[str]  # fully resolved except {dir}, substituted per run
    src_path: str
    bin_path: str | None
    cache_key: str


@dataclass
class CompileFailure:
    diagnostics: str
    returncode: int
    cache_key: str


_EXTENSIONS = {"python": ".py", "cpp": ".cpp"}


def default_toolchain() -> dict:
    """Toolchain templates keyed by language.  Placeholders: {src} source
    file, {bin} output binary, {dir} per-run scratch dir."""
    return {
        "python": {
            # byte-compile up front so syntax errors surface as CE, not RE
            "compile": [sys.executable, "-m", "py_compile", "{src}"],
            "run": [sys.executable, "{src}"],
            "ext": ".py",
        },
        "cpp": {
            "compile": ["g++", "-O2", "-std=c++17", "-o", "{bin}", "{src}"],
            "run": ["{bin}"],
            "ext": ".cpp",
        },
    }


def load_toolchain(path: str | Path) -> dict:
    with open(path, "r", encoding="utf-8") as fh:
        data = json.load(fh)
    if not isinstance(data, dict):
        raise ToolchainError(f"toolchain file {path} must hold a JSON object")
    merged = default_toolchain()
    for lang, entry in data.items():
        if not isinstance(entry, dict) or "run" not in entry:
            raise ToolchainError(f"toolchain entry for {lang!r} must define 'run'")
        merged[lang] = {
            "compile": entry.get("compile"),
            "run": entry["run"],
            "ext": entry.get("ext", ".txt"),
        }
    return merged


def workdir_root() -> Path:
    root = os.environ.get("VF_WORKDIR")
    if root:
        path = Path(root)
        path.mkdir(parents=True, exist_ok=True)
        return path
    return Path(tempfile.gettempdir())


def _spec_for(toolchain: dict, language: str, time_ms: int, wall_ms: int | None, mem_mb: int) -> ExecSpec:
    entry = toolchain.get(language)
    if entry is None:
        raise ToolchainError(f"no toolchain entry for language {language!r}")
    return ExecSpec(
        run_command=list(entry["run"]),
        compile_command=list(entry["compile"]) if entry["compile"] else None,
        time_limit_ms=time_ms,
        wall_limit_ms=wall_ms if wall_ms is not None else 2 * time_ms,
        memory_limit_mb=mem_mb,
    )


def _make_preexec(cpu_backstop_s: int, mem_bytes: int):
    def preexec():
        os.setsid()
        resource.setrlimit(resource.RLIMIT_CPU, (cpu_backstop_s, cpu_backstop_s))
        resource.setrlimit(resource.RLIMIT_AS, (mem_bytes, mem_bytes))
        resource.setrlimit(resource.RLIMIT_CORE, (0, 0))
        resource.setrlimit(resource.RLIMIT_FSIZE, (_STDOUT_CAP * 2, _STDOUT_CAP * 2))
    return preexec


def run_one(program: CompiledProgram, input_bytes: bytes, spec: ExecSpec,
            workdir: str | Path | None = None) -> RunResult:
    """Run a compiled program once on the given stdin bytes."""
    base = Path(workdir) if workdir is not None else workdir_root()
    jobdir = Path(tempfile.mkdtemp(prefix="vfrun-", dir=base))
    try:
        in_path = jobdir / "input.bin"
        in_path.write_bytes(input_bytes)
        out_path = jobdir / "stdout.bin"
        err_path = jobdir / "stderr.bin"

        argv = [a.format(src=program.src_path, bin=program.bin_path or "", dir=str(jobdir))
                for a in program.run_argv]
        cpu_backstop_s = math.ceil(spec.time_limit_ms / 1000) + 1
        mem_bytes = spec.memory_limit_mb * 1024 * 1024

        start = time.monotonic()
        with open(in_path, "rb") as fin, open(out_path, "wb") as fout, open(err_path, "wb") as ferr:
            try:
                proc = subprocess.Popen(
                    argv, stdin=fin, stdout=fout, stderr=ferr, cwd=str(jobdir),
                    preexec_fn=_make_preexec(cpu_backstop_s, mem_bytes),
                )
            except FileNotFoundError as exc:
                raise ToolchainError(f"interpreter/binary not found: {argv[0]}") from exc
            except OSError as exc:
                raise SandboxError(f"failed to spawn {argv!r}: {exc}") from exc

            kill_reason: list[str | None] = [None]
            done = threading.Event()

            def watchdog():
                deadline = start + spec.wall_limit_ms / 1000.0
                try:
                    ps = psutil.Process(proc.pid)
                except psutil.NoSuchProcess:
                    return
                while not done.wait(_POLL_INTERVAL_S):
                    now = time.monotonic()
                    cpu_s = None
                    try:
                        t = ps.cpu_times()
                        cpu_s = t.user + t.system
                    except psutil.Error:
                        return  # already gone; waiter will reap
                    if cpu_s * 1000 > spec.time_limit_ms:
                        kill_reason[0] = "cpu"
                    elif now > deadline:
                        kill_reason[0] = "wall"
                    else:
                        continue
                    try:
                        os.killpg(proc.pid, signal.SIGKILL)
                    except (ProcessLookupError, PermissionError):
                        pass
                    return

            watcher = threading.Thread(target=watchdog, daemon=True)
            watcher.start()
            try:
                _, status, rusage = os.wait4(proc.pid, 0)
            except ChildProcessError as exc:
                raise SandboxError(f"lost child process {proc.pid}") from exc
            finally:
                done.set()
            wall_ms = round((time.monotonic() - start) * 1000)
            watcher.join()
            proc.returncode = status  # reaped externally; keep Popen from waiting again
            # sweep stragglers the group may have spawned
            try:
                os.killpg(proc.pid, signal.SIGKILL)
            except (ProcessLookupError, PermissionError):
                pass

        cpu_ms = round((rusage.ru_utime + rusage.ru_stime) * 1000)
        peak_mb = int(rusage.ru_maxrss // 1024)  # ru_maxrss is KiB on Linux

        exit_code: int | None = None
        term_signal: int | None = None
        if os.WIFSIGNALED(status):
            term_signal = os.WTERMSIG(status)
        elif os.WIFEXITED(status):
            exit_code = os.WEXITSTATUS(status)

        if kill_reason[0] is not None or cpu_ms > spec.time_limit_ms or wall_ms > spec.wall_limit_ms:
            verdict = "TLE"
        elif term_signal == signal.SIGXCPU:
            verdict = "TLE"
        elif term_signal is not None or (exit_code is not None and exit_code != 0):
            verdict = "RE"
        else:
            verdict = "AC"

        stdout = out_path.read_bytes()[:_STDOUT_CAP]
        stderr_excerpt = err_path.read_bytes()[:_STDERR_EXCERPT].decode("utf-8", errors="replace")
        return RunResult(
            verdict=verdict, exit_code=exit_code, term_signal=term_signal,
            cpu_time_ms=cpu_ms, wall_time_ms=wall_ms, peak_memory_mb=peak_mb,
            stdout=stdout, stderr_excerpt=stderr_excerpt, kill_reason=kill_reason[0],
        )
    finally:
        shutil.rmtree(jobdir, ignore_errors=True)


class CompileCache:
    """Content-addressed cache of compiled programs (and compile failures).

    Key = sha256(language, commands, source).  Thread-safe; counts hits and
    misses so tests can assert the compiler ran exactly once.
    """

    def __init__(self, root: str | Path | None = None):
        self.root = Path(root) if root is not None else workdir_root() / "vfkit-compile-cache"
        self.root.mkdir(parents=True, exist_ok=True)
        self.hits = 0
        self.misses = 0
        self._lock = threading.Lock()


def _cache_key(language: str, entry: dict, source: str) -> str:
    h = hashlib.sha256()
    h.update(language.encode())
    h.update(repr(entry.get("compile")).encode())
    h.update(repr(entry["run"]).encode())
    h.update(source.encode("utf-8"))
    return h.hexdigest()


def compile_program(solution_or_source, toolchain: dict | None = None,
                    cache: CompileCache | None = None,
                    language: str | None = None) -> CompiledProgram | CompileFailure:
    """Compile a Solution (or raw source string with explicit language).

    Compiler diagnostics (nonzero exit) come back as CompileFailure (a CE
    verdict).  A missing compiler binary raises ToolchainError instead:
    that is an environment problem, not a property of the program.
    """
    if isinstance(solution_or_source, Solution):
        source, language = solution_or_source.source, solution_or_source.language
    else:
        source = solution_or_source
        if language is None:
            raise ValueError("language required when compiling raw source")
    toolchain = toolchain if toolchain is not None else default_toolchain()
    entry = toolchain.get(language)
    if entry is None:
        raise ToolchainError(f"no toolchain entry for language {language!r}")
    cache = cache if cache is not None else CompileCache()
    key = _cache_key(language, entry, source)
    slot = cache.root / key
    ext = entry.get("ext", _EXTENSIONS.get(language, ".txt"))
    src_path = slot / f"program{ext}"
    bin_path = slot / "program.bin"
    ok_marker = slot / "ok"
    ce_marker = slot / "ce.json"

    with cache._lock:
        if ok_marker.exists():
            cache.hits += 1
            return CompiledProgram(
                language=language, run_argv=list(entry["run"]), src_path=str(src_path),
                bin_path=str(bin_path) if bin_path.exists() else None, cache_key=key,
            )
        if ce_marker.exists():
            cache.hits += 1
            rec = json.loads(ce_marker.read_text(encoding="utf-8"))
            return CompileFailure(diagnostics=rec["diagnostics"], returncode=rec["returncode"], cache_key=key)
        cache.misses += 1
        slot.mkdir(parents=True, exist_ok=True)
        src_path.write_text(source, encoding="utf-8")

        if entry.get("compile"):
            argv = [a.format(src=str(src_path), bin=str(bin_path), dir=str(slot)) for a in entry["compile"]]
            try:
                proc = subprocess.run(
                    argv, cwd=str(slot), capture_output=True, timeout=_COMPILE_WALL_S,
                )
            except FileNotFoundError as exc:
                raise ToolchainError(f"compiler not found: {argv[0]}") from exc
            except subprocess.TimeoutExpired as exc:
                raise ToolchainError(f"compiler timed out after {_COMPILE_WALL_S}s: {argv[0]}") from exc
            if proc.returncode != 0:
                diag = (proc.stderr + proc.stdout).decode("utf-8", errors="replace")[:8192]
                ce_marker.write_text(
                    json.dumps({"diagnostics": diag, "returncode": proc.returncode}),
                    encoding="utf-8",
                )
                return CompileFailure(diagnostics=diag, returncode=proc.returncode, cache_key=key)
        ok_marker.write_text("", encoding="utf-8")
        return CompiledProgram(
            language=language, run_argv=list(entry["run"]), src_path=str(src_path),
            bin_path=str(bin_path) if bin_path.exists() else None, cache_key=key,
        )


# ---------------------------------------------------------------------------
# output checking

class _TokenChecker:
    def compare(self, actual: bytes, expected: bytes) -> bool:
        return actual.split() == expected.split()


class _FloatChecker:
    def __init__(self, eps: float):
        self.eps = eps

    def _close(self, a: bytes, b: bytes) -> bool:
        try:
            x = float(a.decode("ascii"))
            y = float(b.decode("ascii"))
        except (ValueError, UnicodeDecodeError):
            return a == b
        if math.isnan(x) or math.isnan(y):
            return False
        return abs(x - y) <= self.eps * max(1.0, abs(y))

    def compare(self, actual: bytes, expected: bytes) -> bool:
        at, bt = actual.split(), expected.split()
        return len(at) == len(bt) and all(self._close(a, b) for a, b in zip(at, bt))


class _CustomChecker:
    """External checker program: argv = (input_file, actual_file, expected_file);
    exit 0 accepts, 1 rejects, anything else is a checker failure."""

    def __init__(self, program: CompiledProgram, workdir: Path | None = None):
        self.program = program
        self.workdir = workdir

    def compare(self, actual: bytes, expected: bytes, input_bytes: bytes = b"") -> bool:
        base = self.workdir if self.workdir is not None else workdir_root()
        jobdir = Path(tempfile.mkdtemp(prefix="vfchk-", dir=base))
        try:
            paths = []
            for name, blob in (("input", input_bytes), ("actual", actual), ("expected", expected)):
                p = jobdir / f"{name}.bin"
                p.write_bytes(blob)
                paths.append(str(p))
            argv = [a.format(src=self.program.src_path, bin=self.program.bin_path or "", dir=str(jobdir))
                    for a in self.program.run_argv] + paths
            try:
                proc = subprocess.run(argv, cwd=str(jobdir), capture_output=True, timeout=30)
            except FileNotFoundError as exc:
                raise ToolchainError(f"checker interpreter not found: {argv[0]}") from exc
            except subprocess.TimeoutExpired as exc:
                raise CheckerFailure("custom checker timed out") from exc
            if proc.returncode == 0:
                return True
            if proc.returncode == 1:
                return False
            raise CheckerFailure(
                f"custom checker exited with {proc.returncode}: "
                f"{proc.stderr.decode('utf-8', errors='replace')[:500]}"
            )
        finally:
            shutil.rmtree(jobdir, ignore_errors=True)


def make_checker(checker: str, *, corpus_root: str | Path | None = None,
                 toolchain: dict | None = None, cache: CompileCache | None = None):
    """Build a checker object from its string form: 'token', 'float:<eps>',
    or 'custom:<path relative to the corpus root>'."""
    if checker == "token":
        return _TokenChecker()
    if checker.startswith("float:"):
        return _FloatChecker(float(checker.split(":", 1)[1]))
    if checker.startswith("custom:"):
        rel = checker.split(":", 1)[1]
        if corpus_root is None:
            raise ValueError("custom checker requires corpus_root")
        path = Path(corpus_root) / rel
        if not path.exists():
            raise ToolchainError(f"custom checker source not found: {path}")
        language = "python" if path.suffix == ".py" else "cpp" if path.suffix in (".cpp", ".cc") else None
        if language is None:
            raise ToolchainError(f"cannot infer checker language from {path.name}")
        program = compile_program(path.read_text(encoding="utf-8"), toolchain, cache, language=language)
        if isinstance(program, CompileFailure):
            raise ToolchainError(f"custom checker failed to compile: {program.diagnostics[:500]}")
        return _CustomChecker(program)
    raise ValueError(f"unknown checker {checker!r}")


def check_output(actual: bytes, expected: bytes, checker, *, input_bytes: bytes = b"") -> bool:
    if isinstance(checker, _CustomChecker):
        return checker.compare(actual, expected, input_bytes=input_bytes)
    return checker.compare(actual, expected)


# ---------------------------------------------------------------------------
# runner: pooled execution over suites

@dataclass
class Runner:
    """Shared compile cache plus a bounded worker pool.

    Results are collected by job index, so verdicts are independent of the
    parallelism level and of completion order.
    """
    toolchain: dict = field(default_factory=default_toolchain)
    parallelism: int = max(1, os.cpu_count() or 1)
    cache: CompileCache = field(default_factory=CompileCache)
    workdir: str | Path | None = None
    corpus_root: str | Path | None = None

    def spec_for_problem(self, problem: Problem, language: str) -> ExecSpec:
        return _spec_for(self.toolchain, language, problem.time_limit_ms, None, problem.memory_limit_mb)

    def compile(self, solution: Solution) -> CompiledProgram | CompileFailure:
        return compile_program(solution, self.toolchain, self.cache)

    def run_many(self, jobs: list[tuple[CompiledProgram, bytes, ExecSpec]]) -> list[RunResult]:
        """Run jobs with bounded parallelism; results in job order."""
        if not jobs:
            return []
        workers = max(1, min(self.parallelism, len(jobs)))
        if workers == 1:
            return [run_one(p, i, s, self.workdir) for p, i, s in jobs]
        with ThreadPoolExecutor(max_workers=workers) as pool:
            futures = [pool.submit(run_one, p, i, s, self.workdir) for p, i, s in jobs]
            return [f.result() for f in futures]

    def checker_for(self, problem: Problem):
        return make_checker(problem.checker, corpus_root=self.corpus_root,
                            toolchain=self.toolchain, cache=self.cache)

    def run_suite(self, solution: Solution, suite: TestSuite, problem: Problem) -> list[str]:
        """Judge one solution on a suite.  Returns one verdict per case,
        in case order.  CE yields CE for every case."""
        if solution.problem_id != problem.id or suite.problem_id != problem.id:
            raise ValueError("solution/suite/problem ids do not match")
        program = self.compile(solution)
        if isinstance(program, CompileFailure):
            return ["CE"] * len(suite.cases)
        spec = self.spec_for_problem(problem, solution.language)
        checker = self.checker_for(problem)
        results = self.run_many([(program, case.input, spec) for case in suite.cases])
        verdicts = []
        for case, res in zip(suite.cases, results):
            if res.verdict != "AC":
                verdicts.append(res.verdict)
            elif check_output(res.stdout, case.output, checker, input_bytes=case.input):
                verdicts.append("AC")
            else:
                verdicts.append("WA")
        return verdicts
