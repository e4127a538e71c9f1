"""Test-suite generation paradigms.

Three families, all funneling into the same labeling step (run the ground
truth on every surviving input; its output is the expected output):

- direct: the model states input/output pairs; claimed outputs are checked
  against the ground truth and wrong claims cost retention.
- random interpreter: random valid inputs from the built-in constraint
  sampler or a model-written generator script, then labeling.
- collaborative (saga): scripted generation in two components, one prompt
  analysing several accepted solutions together and one prompt per
  wrong/corrected submission pair; each proposed script self-validates its
  inputs, candidates are deduplicated byte-exactly, labeled, and packed
  into a suite capped at a target size.

Every component returns a GenerationRecord whose counters obey
labeled <= validated <= produced; retention is labeled/produced.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, asdict
from typing import Callable

from ..dataset import Problem, Corpus, TestCase, TestSuite
from ..execution import CompileFailure, ExecSpec, Runner, check_output, compile_program, run_one
from ..metrics import derive_seed
from . import templates
from .llm import LlmRequest, llm_call
from .parsing import CaseScript, parse_direct_response, parse_generation_response, split_case_output
from . import sampler as builtin_sampler


class GroundTruthError(Exception):
    """The reference solution itself failed to compile or run."""


@dataclass
class TcgConfig:
    model_tag: str = "test-model"
    temperature: float = 0.0
    max_tokens: int = 4096
    seed: int = 0
    direct_n_target: int = 10
    sampler_n_target: int = 10
    random_generator: str = "builtin"  # "builtin" | "llm"
    multidim_enabled: bool = True
    differential_enabled: bool = True
    max_correct_solutions: int = 10
    max_pairs: int = 5
    target_suite_size: int = 50
    target_count_per_script: int = 10
    strict_parsing: bool = True
    script_time_limit_ms: int = 10_000
    script_memory_limit_mb: int = 512
    llm_concurrency: int = 4
    manual_topup: Callable | None = None  # (problem, n_needed) -> list[bytes]

    def __post_init__(self):
        if self.random_generator not in ("builtin", "llm"):
            raise ValueError(f"unknown random generator {self.random_generator!r}")
        if self.target_suite_size < 1 or self.target_count_per_script < 1:
            raise ValueError("targets must be >= 1")


@dataclass
class GenerationRecord:
    id: str
    paradigm: str
    problem_id: str
    prompts: list[str] = field(default_factory=list)
    responses: list[str] = field(default_factory=list)
    scripts: list[CaseScript] = field(default_factory=list)
    produced_inputs: int = 0
    validated_inputs: int = 0
    labeled_cases: int = 0
    notes: list[str] = field(default_factory=list)

    @property
    def retention_rate(self) -> float:
        if self.produced_inputs == 0:
            return 0.0
        return self.labeled_cases / self.produced_inputs

    def validate(self) -> None:
        if not 0 <= self.labeled_cases <= self.validated_inputs <= self.produced_inputs:
            raise ValueError(
                f"record {self.id}: retention chain violated "
                f"({self.labeled_cases} labeled, {self.validated_inputs} validated, "
                f"{self.produced_inputs} produced)"
            )

    def to_dict(self) -> dict:
        d = asdict(self)
        d["retention_rate"] = self.retention_rate
        return d


def _request(config: TcgConfig, prompt: str) -> LlmRequest:
    return LlmRequest(model_tag=config.model_tag, prompt=prompt,
                      temperature=config.temperature, max_tokens=config.max_tokens)


def _program_spec(program, config: TcgConfig) -> ExecSpec:
    return ExecSpec(
        run_command=list(program.run_argv),
        time_limit_ms=config.script_time_limit_ms,
        wall_limit_ms=2 * config.script_time_limit_ms,
        memory_limit_mb=config.script_memory_limit_mb,
    )


def run_case_script(script: CaseScript, runner: Runner, config: TcgConfig) -> tuple[list[bytes], list[str]]:
    """Execute a generator script and split its stdout into inputs, capped
    at the script's target count.  Script failures produce zero inputs and
    a note, never an exception: bad scripts cost retention only."""
    notes: list[str] = []
    program = compile_program(script.script_source, runner.toolchain, runner.cache, language="python")
    if isinstance(program, CompileFailure):
        notes.append("case script failed to compile")
        return [], notes
    result = run_one(program, b"", _program_spec(program, config), runner.workdir)
    if result.verdict != "AC":
        notes.append(f"case script run ended with {result.verdict}")
        return [], notes
    inputs = split_case_output(result.stdout)
    if len(inputs) > script.target_count:
        notes.append(f"case script produced {len(inputs)} inputs, truncated to {script.target_count}")
        inputs = inputs[: script.target_count]
    return inputs, notes


def self_validate(script: CaseScript, inputs: list[bytes], runner: Runner,
                  config: TcgConfig) -> tuple[list[bytes], int, int]:
    """Filter inputs through the script's own validator.

    Returns (kept, n_invalid, n_crashed).  Exit 0 keeps, exit 1 counts as
    invalid, anything else (including a validator that does not compile)
    counts as crashed; crashed inputs are dropped too, but tracked apart
    from honest rejections.
    """
    if script.self_validation_source is None:
        return list(inputs), 0, 0
    program = compile_program(script.self_validation_source, runner.toolchain, runner.cache,
                              language="python")
    if isinstance(program, CompileFailure):
        return [], 0, len(inputs)
    spec = _program_spec(program, config)
    results = runner.run_many([(program, inp, spec) for inp in inputs])
    kept, invalid, crashed = [], 0, 0
    for inp, res in zip(inputs, results):
        if res.verdict == "AC":
            kept.append(inp)
        elif res.verdict == "RE" and res.exit_code == 1:
            invalid += 1
        else:
            crashed += 1
    return kept, invalid, crashed


def _reference_outputs(problem: Problem, corpus: Corpus, inputs: list[bytes],
                       runner: Runner) -> list[bytes | None]:
    """Ground-truth output per input, or None where the ground truth did
    not finish cleanly.  A ground truth that cannot compile raises."""
    gt = corpus.ground_truth_of(problem)
    program = runner.compile(gt)
    if isinstance(program, CompileFailure):
        raise GroundTruthError(
            f"ground truth {gt.id} for problem {problem.id} does not compile: "
            f"{program.diagnostics[:500]}"
        )
    spec = runner.spec_for_problem(problem, gt.language)
    results = runner.run_many([(program, inp, spec) for inp in inputs])
    return [res.stdout if res.verdict == "AC" else None for res in results]


def label_outputs(problem: Problem, corpus: Corpus, inputs: list[bytes], runner: Runner,
                  provenance: str, generator_record_id: str | None = None,
                  start_index: int = 0) -> tuple[list[TestCase], int]:
    """Run the ground truth on each input; survivors become test cases with
    the reference output.  Returns (cases, n_dropped)."""
    outputs = _reference_outputs(problem, corpus, inputs, runner)
    cases, dropped = [], 0
    for inp, out in zip(inputs, outputs):
        if out is None:
            dropped += 1
            continue
        cases.append(TestCase(
            index=start_index + len(cases), input=inp, output=out,
            provenance=provenance, generator_record_id=generator_record_id,
        ))
    return cases, dropped


def gen_direct(problem: Problem, corpus: Corpus, client, runner: Runner,
               config: TcgConfig) -> tuple[TestSuite, GenerationRecord]:
    """Model-stated input/output pairs, verified against the ground truth.

    An input counts as validated when the ground truth runs cleanly on it;
    it becomes a labeled case only if the model's claimed output also
    matches the reference output under the problem's checker.  Kept cases
    carry the reference output, not the claim."""
    prompt = templates.build_direct_prompt(problem, config.direct_n_target)
    response = llm_call(_request(config, prompt), client)
    pairs, diags = parse_direct_response(response.text)
    record = GenerationRecord(
        id=f"{problem.id}-direct",
        paradigm="direct",
        problem_id=problem.id,
        prompts=[prompt],
        responses=[response.text],
        notes=list(diags),
    )
    record.produced_inputs = len(pairs)

    outputs = _reference_outputs(problem, corpus, [inp for inp, _ in pairs], runner)
    checker = runner.checker_for(problem)
    cases = []
    mismatches = 0
    for (inp, claimed), ref in zip(pairs, outputs):
        if ref is None:
            continue
        record.validated_inputs += 1
        if check_output(claimed, ref, checker, input_bytes=inp):
            cases.append(TestCase(
                index=len(cases), input=inp, output=ref,
                provenance="direct", generator_record_id=record.id,
            ))
        else:
            mismatches += 1
    if mismatches:
        record.notes.append(f"{mismatches} claimed outputs disagreed with the ground truth")
    record.labeled_cases = len(cases)
    record.validate()
    suite = TestSuite(problem_id=problem.id, cases=cases, created_with_seed=config.seed)
    return suite, record


def gen_random_inputs(problem: Problem, corpus: Corpus, runner: Runner, config: TcgConfig,
                      client=None) -> tuple[TestSuite, GenerationRecord]:
    """Random valid inputs, then ground-truth labeling.

    generator="builtin" samples integer tuples straight from the constraint
    text; generator="llm" asks the model for a seeded generator script and
    runs it like any other case script."""
    gen_seed = derive_seed(config.seed, "random_interpreter", problem.id) % (2 ** 31)
    record = GenerationRecord(
        id=f"{problem.id}-random",
        paradigm="interpreter_random",
        problem_id=problem.id,
    )
    if config.random_generator == "builtin":
        inputs = builtin_sampler.sample_inputs(problem.constraints_text, config.sampler_n_target, gen_seed)
        record.produced_inputs = len(inputs)
        kept = [i for i in inputs if builtin_sampler.validates(problem.constraints_text, i)]
        record.validated_inputs = len(kept)
    else:
        if client is None:
            raise ValueError("llm generator requires a client")
        prompt = templates.build_sampler_prompt(problem, config.sampler_n_target, gen_seed)
        response = llm_call(_request(config, prompt), client)
        scripts, diags = parse_generation_response(
            response.text, strict=config.strict_parsing,
            target_count=config.sampler_n_target,
        )
        record.prompts.append(prompt)
        record.responses.append(response.text)
        record.notes.extend(diags)
        record.scripts = scripts
        kept = []
        if not scripts:
            record.notes.append("no usable generator script in response")
        else:
            script = scripts[0]
            if len(scripts) > 1:
                record.notes.append(f"{len(scripts) - 1} extra generator scripts ignored")
            inputs, notes = run_case_script(script, runner, config)
            record.notes.extend(notes)
            record.produced_inputs = len(inputs)
            kept, invalid, crashed = self_validate(script, inputs, runner, config)
            record.validated_inputs = len(kept)
            if invalid or crashed:
                record.notes.append(f"validator rejected {invalid}, crashed on {crashed}")
    cases, dropped = label_outputs(problem, corpus, kept, runner,
                                   provenance="random_interpreter",
                                   generator_record_id=record.id)
    if dropped:
        record.notes.append(f"ground truth failed on {dropped} inputs")
    record.labeled_cases = len(cases)
    record.validate()
    suite = TestSuite(problem_id=problem.id, cases=cases, created_with_seed=config.seed)
    return suite, record


def _run_component_scripts(record: GenerationRecord, runner: Runner, config: TcgConfig
                           ) -> list[bytes]:
    """Run and self-validate every script in a record, updating its
    counters.  Returns the surviving inputs in generation order."""
    survivors: list[bytes] = []
    total_invalid = total_crashed = 0
    for script in record.scripts:
        inputs, notes = run_case_script(script, runner, config)
        record.notes.extend(notes)
        record.produced_inputs += len(inputs)
        kept, invalid, crashed = self_validate(script, inputs, runner, config)
        record.validated_inputs += len(kept)
        total_invalid += invalid
        total_crashed += crashed
        survivors.extend(kept)
    if total_invalid or total_crashed:
        record.notes.append(f"validators rejected {total_invalid}, crashed on {total_crashed}")
    return survivors


def saga_generate(problem: Problem, corpus: Corpus, client, runner: Runner,
                  config: TcgConfig) -> tuple[TestSuite, list[GenerationRecord]]:
    """Two-component collaborative generation.

    Component 1 prompts over up to max_correct_solutions accepted solutions
    at once; component 2 prompts once per wrong/corrected pair, up to
    max_pairs, taken in corpus order.  Candidates from both components are
    deduplicated byte-exactly (first occurrence wins), labeled in one pass,
    and truncated to target_suite_size.  A summary record aggregates the
    component counters; dedup losses and truncation show up there as notes.
    """
    records: list[GenerationRecord] = []
    candidates: list[tuple[bytes, str, str]] = []  # (input, provenance, record id)

    if config.multidim_enabled:
        correct = corpus.solutions_for(problem.id, "correct_human")[: config.max_correct_solutions]
        if correct:
            record = GenerationRecord(
                id=f"{problem.id}-saga-multidim",
                paradigm="saga_multidim",
                problem_id=problem.id,
            )
            if len(correct) < config.max_correct_solutions:
                record.notes.append(
                    f"only {len(correct)} correct solutions available "
                    f"(requested {config.max_correct_solutions})"
                )
            prompt = templates.build_multidim_prompt(problem, correct)
            response = llm_call(_request(config, prompt), client)
            scripts, diags = parse_generation_response(
                response.text, strict=config.strict_parsing,
                target_count=config.target_count_per_script,
            )
            record.prompts.append(prompt)
            record.responses.append(response.text)
            record.notes.extend(diags)
            record.scripts = scripts
            for inp in _run_component_scripts(record, runner, config):
                candidates.append((inp, "saga_multidim", record.id))
            records.append(record)

    if config.differential_enabled:
        pairs = corpus.pairs_for(problem.id)[: config.max_pairs]
        if pairs:
            record = GenerationRecord(
                id=f"{problem.id}-saga-differential",
                paradigm="saga_differential",
                problem_id=problem.id,
            )
            prompts = [templates.build_differential_prompt(problem, pair) for pair in pairs]
            workers = max(1, min(config.llm_concurrency, len(prompts)))
            if workers == 1:
                responses = [llm_call(_request(config, p), client) for p in prompts]
            else:
                with ThreadPoolExecutor(max_workers=workers) as pool:
                    futures = [pool.submit(llm_call, _request(config, p), client) for p in prompts]
                    responses = [f.result() for f in futures]
            for prompt, response in zip(prompts, responses):
                scripts, diags = parse_generation_response(
                    response.text, strict=config.strict_parsing,
                    target_count=config.target_count_per_script,
                )
                record.prompts.append(prompt)
                record.responses.append(response.text)
                record.notes.extend(diags)
                record.scripts.extend(scripts)
            for inp in _run_component_scripts(record, runner, config):
                candidates.append((inp, "saga_differential", record.id))
            records.append(record)

    seen: set[bytes] = set()
    unique: list[tuple[bytes, str, str]] = []
    for inp, prov, rid in candidates:
        if inp in seen:
            continue
        seen.add(inp)
        unique.append((inp, prov, rid))
    dedup_removed = len(candidates) - len(unique)

    labeled: list[TestCase] = []
    labeled_by_record: dict[str, int] = {r.id: 0 for r in records}
    gt_dropped = 0
    if unique:
        outputs = _reference_outputs(problem, corpus, [inp for inp, _, _ in unique], runner)
        for (inp, prov, rid), out in zip(unique, outputs):
            if out is None:
                gt_dropped += 1
                continue
            labeled.append(TestCase(
                index=len(labeled), input=inp, output=out,
                provenance=prov, generator_record_id=rid,
            ))
            labeled_by_record[rid] += 1

    for record in records:
        record.labeled_cases = labeled_by_record.get(record.id, 0)

    truncated = 0
    if len(labeled) > config.target_suite_size:
        truncated = len(labeled) - config.target_suite_size
        labeled = labeled[: config.target_suite_size]

    if len(labeled) < config.target_suite_size and config.manual_topup is not None:
        extra = config.manual_topup(problem, config.target_suite_size - len(labeled))
        manual_cases, _ = label_outputs(problem, corpus, extra, runner,
                                        provenance="manual", start_index=len(labeled))
        labeled.extend(manual_cases)

    summary = GenerationRecord(
        id=f"{problem.id}-saga-full",
        paradigm="saga_full",
        problem_id=problem.id,
        produced_inputs=sum(r.produced_inputs for r in records),
        validated_inputs=sum(r.validated_inputs for r in records),
        labeled_cases=sum(r.labeled_cases for r in records),
    )
    if dedup_removed:
        summary.notes.append(f"{dedup_removed} duplicate inputs removed across components")
    if gt_dropped:
        summary.notes.append(f"ground truth failed on {gt_dropped} inputs")
    if truncated:
        summary.notes.append(f"suite truncated by {truncated} cases to {config.target_suite_size}")
    records.append(summary)

    for record in records:
        record.validate()
    suite = TestSuite(problem_id=problem.id, cases=labeled, created_with_seed=config.seed)
    return suite, records
