"""Regenerate the recorded LLM responses (data/replay) for the toy corpus.

Responses are deterministic scripted texts: generator scripts print fixed
literal inputs so downstream suites are exactly predictable.  Each corpus
problem gets one multidim response, one differential response (first pair),
and one direct response; p1 also gets a sampler-script response for the
llm-generator path.  Prompts are built with the real template builders so
the request hashes match what the pipeline will ask for.

Deliberate imperfections exercised here:
- one invalid input per multidim response (validator must drop it),
- one duplicate input between components (dedup must remove it),
- two wrong claimed outputs in every direct response (retention 0.6).
"""

from pathlib import Path

from vfkit.dataset import load_corpus
from vfkit.metrics import derive_seed
from vfkit.tcg import templates
from vfkit.tcg.llm import LlmRequest, LlmResponse, ReplayStore

ROOT = Path(__file__).resolve().parent.parent

MODEL_TAG = "test-model"  # TcgConfig default
SEED = 0                  # TcgConfig default used by the e2e run


def script_for(cases: list[str]) -> str:
    lines = ["cases = ["]
    for case in cases:
        lines.append(f"    {case!r},")
    lines.append("]")
    lines.append('print("\\n###CASE###\\n".join(cases))')
    return "\n".join(lines) + "\n"


VALIDATORS = {
    "p1": (
        "import sys\n"
        "parts = sys.stdin.read().split()\n"
        "if len(parts) != 2:\n"
        "    sys.exit(1)\n"
        "try:\n"
        "    a, b = int(parts[0]), int(parts[1])\n"
        "except ValueError:\n"
        "    sys.exit(1)\n"
        "sys.exit(0 if -1000 <= a <= 1000 and -1000 <= b <= 1000 else 1)\n"
    ),
    "p2": (
        "import sys\n"
        "data = sys.stdin.read().split()\n"
        "if not data:\n"
        "    sys.exit(1)\n"
        "try:\n"
        "    n = int(data[0])\n"
        "    vals = [int(x) for x in data[1:]]\n"
        "except ValueError:\n"
        "    sys.exit(1)\n"
        "if not 1 <= n <= 50 or len(vals) != n:\n"
        "    sys.exit(1)\n"
        "sys.exit(0 if all(-100 <= v <= 100 for v in vals) else 1)\n"
    ),
    "p3": (
        "import sys\n"
        "words = sys.stdin.read().split()\n"
        "if not 1 <= len(words) <= 20:\n"
        "    sys.exit(1)\n"
        "ok = all(w.isalpha() and w.islower() and len(w) <= 10 for w in words)\n"
        "sys.exit(0 if ok else 1)\n"
    ),
}


def triple(script: str, explanation: str, validator: str) -> str:
    return (
        "```case-script\n" + script + "```\n\n"
        "```math-explanation\n" + explanation.rstrip() + "\n```\n\n"
        "```self-validation\n" + validator + "```\n"
    )


def pair_block(inp: str, out: str) -> str:
    return "```input\n" + inp + "```\n\n```output\n" + out + "```\n"


# per problem: multidim scripts (list of case lists), differential cases
MULTIDIM_CASES = {
    "p1": [
        # boundary probes; "2000 0" violates the range on purpose
        ["1000 1000", "-1000 -1000", "0 0", "2000 0"],
        ["7 -3"],
    ],
    "p2": [
        # "0" is an invalid n, the validator must reject it
        ["1\n-5", "3\n-1 -2 -3", "0"],
        ["5\n2 -1 2 -1 2", "4\n-2 7 -3 4"],
    ],
    "p3": [
        # the 21-word line breaks the word-count bound
        ["a b a", "x", "cat dog cat dog", " ".join(["w"] * 21)],
        ["a  b", "p q r s"],
    ],
}

# "0 0" duplicates a multidim case for p1; "x" duplicates one for p3
DIFFERENTIAL_CASES = {
    "p1": ["5 -5", "0 0"],
    "p2": ["2\n-3 -4", "3\n1 2 3"],
    "p3": ["hello world", " a b ", "x"],
}

MULTIDIM_EXPLANATIONS = {
    "p1": [
        "Extremes of the declared range plus the all-zero point: solutions "
        "that clamp, special-case equality, or divide by an operand differ "
        "exactly there.",
        "A mixed-sign pair separates solutions that mishandle negative b.",
    ],
    "p2": [
        "Singleton and all-negative arrays: the empty-subarray convention "
        "and element-skipping loops break when every prefix is negative.",
        "Alternating and mixed-sign arrays where the best window must cross "
        "a negative element or include the last position.",
    ],
    "p3": [
        "Duplicate words, a single word, and paired repeats distinguish "
        "counting tokens from counting distinct tokens.",
        "Consecutive blanks and a four-distinct-word line separate naive "
        "space splitting and truncating counters.",
    ],
}

DIFFERENTIAL_EXPLANATIONS = {
    "p1": "The correction removed a sign branch on b; negative b and the "
          "zero point make the wrong branch visible.",
    "p2": "The correction dropped the nonnegative floor; all-negative "
          "arrays expose it while all-positive arrays pass both versions.",
    "p3": "The correction switched from single-space splitting to "
          "whitespace splitting; padded lines expose the old behaviour.",
}

DIRECT_PAIRS = {
    "p1": [
        ("1 2\n", "3\n"),
        ("10 5\n", "15\n"),
        ("2 2\n", "5\n"),      # wrong: 4
        ("-1 1\n", "0\n"),
        ("999 1\n", "999\n"),  # wrong: 1000
    ],
    "p2": [
        ("2\n1 2\n", "3\n"),
        ("3\n-1 5 -1\n", "5\n"),
        ("1\n-7\n", "0\n"),       # wrong: -7
        ("4\n1 -2 3 -1\n", "3\n"),
        ("2\n-1 -2\n", "-3\n"),   # wrong: -1
    ],
    "p3": [
        ("a b\n", "2\n"),
        ("x x x\n", "1\n"),
        ("r s t\n", "2\n"),    # wrong: 3
        ("m\n", "1\n"),
        ("u v u\n", "3\n"),    # wrong: 2
    ],
}

SAMPLER_CASES = {"p1": ["12 -7", "0 999", "-1000 1"]}


def main() -> None:
    corpus = load_corpus(ROOT / "data" / "toy_corpus")
    store = ReplayStore(ROOT / "data" / "replay")
    count = 0

    def record(prompt: str, text: str) -> None:
        nonlocal count
        request = LlmRequest(model_tag=MODEL_TAG, prompt=prompt)
        store.put(request, LlmResponse(text=text, usage={"scripted": 1}))
        count += 1

    for pid in sorted(corpus.problems):
        problem = corpus.problems[pid]
        correct = corpus.solutions_for(pid, "correct_human")[:10]
        validator = VALIDATORS[pid]

        parts = [
            triple(script_for(cases), explanation, validator)
            for cases, explanation in zip(MULTIDIM_CASES[pid], MULTIDIM_EXPLANATIONS[pid])
        ]
        record(templates.build_multidim_prompt(problem, correct),
               "Analysis of the accepted solutions follows.\n\n" + "\n".join(parts))

        pair = corpus.pairs_for(pid)[0]
        record(templates.build_differential_prompt(problem, pair),
               "Targeting the repaired defect.\n\n"
               + triple(script_for(DIFFERENTIAL_CASES[pid]),
                        DIFFERENTIAL_EXPLANATIONS[pid], validator))

        record(templates.build_direct_prompt(problem, 10),
               "Test cases:\n\n" + "\n".join(pair_block(i, o) for i, o in DIRECT_PAIRS[pid]))

    p1 = corpus.problems["p1"]
    gen_seed = derive_seed(SEED, "random_interpreter", "p1") % (2 ** 31)
    record(templates.build_sampler_prompt(p1, 10, gen_seed),
           "Generator and validator:\n\n"
           + triple(script_for(SAMPLER_CASES["p1"]),
                    "Uniform probes across the declared range including both "
                    "signs and one extreme.", VALIDATORS["p1"]))

    print(f"recorded {count} fixtures into {ROOT / 'data' / 'replay'}")


if __name__ == "__main__":
    main()
