"""Prompt templates for test-input generation.

Templates are versioned artifacts: the version string is embedded in every
prompt, and golden tests pin the exact rendered text, so any wording change
is a deliberate, visible diff that invalidates recorded LLM transcripts.

All generation prompts ask for the same three tagged fenced blocks per
proposed test idea:

    ```case-script      (a Python program printing inputs, one per
                         ###CASE###-delimited chunk)
    ```math-explanation (why these inputs stress the stated constraints)
    ```self-validation  (a Python program reading one input from stdin,
                         exit 0 if it satisfies the constraints, 1 if not)
"""

from __future__ import annotations

from ..dataset import Problem, Solution, SubmissionPair

TEMPLATE_VERSION = "v1"

CASE_DELIMITER = "###CASE###"

_BLOCK_SPEC = f"""For each distinct test idea, emit exactly three fenced blocks in this order:

```case-script
# Python 3 program. Print every generated input to stdout, separated by a
# line containing exactly {CASE_DELIMITER}
# Deterministic: no randomness without a fixed literal seed.
```

```math-explanation
Brief formal justification: which constraint boundaries, structural
properties, or behavioural differences these inputs exercise.
```

```self-validation
# Python 3 program. Read ONE candidate input from stdin, check it against
# the stated constraints, exit 0 if valid, exit 1 if invalid.
```

Do not put any other fenced blocks in the response."""


def _solution_block(sol: Solution, label: str) -> str:
    header = f"--- {label} ({sol.language})"
    if sol.recorded_verdict:
        header += f", recorded verdict: {sol.recorded_verdict}"
    header += " ---"
    return f"{header}\n{sol.source.rstrip()}\n"


def build_direct_prompt(problem: Problem, n_target: int) -> str:
    """Ask for explicit input/output pairs (no scripts).  Outputs are
    verified against the reference solution downstream, so wrong claimed
    outputs only cost retention."""
    return f"""[tcg-direct {TEMPLATE_VERSION}]
You are generating test cases for a competitive programming problem.

Problem statement:
{problem.statement.rstrip()}

Input constraints:
{problem.constraints_text.rstrip()}

Produce {n_target} test cases. For each case emit two fenced blocks, input
then output:

```input
<the test input, exactly as fed to a program on stdin>
```

```output
<the correct output for that input>
```

Cover boundary values and typical values. Do not put any other fenced
blocks in the response."""


def build_sampler_prompt(problem: Problem, n_target: int, seed: int) -> str:
    """Ask for one generator script that samples random valid inputs."""
    return f"""[tcg-sampler {TEMPLATE_VERSION}]
You are writing a random input generator for a competitive programming
problem.

Problem statement:
{problem.statement.rstrip()}

Input constraints:
{problem.constraints_text.rstrip()}

Write one generator that prints {n_target} independent pseudo-random valid
inputs using the fixed literal seed {seed}, plus its validation program.

{_BLOCK_SPEC}"""


def build_multidim_prompt(problem: Problem, correct_solutions: list[Solution]) -> str:
    """Analyse several correct solutions side by side and derive targeted
    tests from how they differ: constraint handling, defensive patterns
    (boundary guards, overflow care, special-casing), and the input regions
    where those differences matter."""
    if not correct_solutions:
        raise ValueError("multidim prompt needs at least one correct solution")
    blocks = "\n".join(
        _solution_block(s, f"accepted solution {i + 1} of {len(correct_solutions)}")
        for i, s in enumerate(correct_solutions)
    )
    return f"""[tcg-multidim {TEMPLATE_VERSION}]
You are generating adversarial test cases for a competitive programming
problem by analysing several accepted solutions together.

Problem statement:
{problem.statement.rstrip()}

Input constraints:
{problem.constraints_text.rstrip()}

Accepted solutions:
{blocks}

Analyse the solutions along these dimensions:
1. Constraint handling differences: where do they treat boundary values,
   empty or extreme inputs, differently?
2. Defensive patterns: which guards (overflow, sign, duplicates, degenerate
   structure) does one solution have that another lacks?
3. From those differences, derive inputs most likely to separate a subtly
   wrong program from a correct one.

{_BLOCK_SPEC}"""


def build_differential_prompt(problem: Problem, pair: SubmissionPair) -> str:
    """Contrast one wrong submission with its corrected version and target
    the repaired defect class."""
    return f"""[tcg-differential {TEMPLATE_VERSION}]
You are generating adversarial test cases for a competitive programming
problem from a wrong submission and its corrected version.

Problem statement:
{problem.statement.rstrip()}

Input constraints:
{problem.constraints_text.rstrip()}

{_solution_block(pair.wrong, "wrong submission")}
{_solution_block(pair.corrected, "corrected submission")}

Work out the defect the correction repairs: the failure pattern, the
constraint-handling difference, and any missing defensive check. Then
generate inputs that make the wrong submission fail while the corrected one
passes, including boundary cases of the defect region.

{_BLOCK_SPEC}"""
