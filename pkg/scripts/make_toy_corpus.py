"""Regenerate the bundled toy corpus (data/toy_corpus).

Three small problems, each with a ground truth, three accepted solutions,
and wrong solutions whose failure predicates are exactly known:

p1 (sum of two integers):
    w1 fails iff a == 1000 or b == 1000 (clamps at 999)
    w2 fails iff b < 0 (sign slip)
    w3 fails iff a == b (bogus fast path)
    w4 RE iff b == 0 (leftover division), correct otherwise
    w5 does not compile (unbalanced paren)
p2 (maximum subarray sum):
    w1 fails iff the true answer is negative (allows empty subarray)
    w2 fails iff dropping the last element changes the answer (n >= 2)
    w3 loops forever iff any a[i] < 0 for i >= 1, correct otherwise
    w4 fails iff n == 1 and a[0] < 0
p3 (count distinct words):
    w1 fails iff the line has duplicate words (counts all)
    w2 fails iff the line has consecutive/leading/trailing blanks
    w3 fails iff distinct(first 3 words) != distinct(all)
    w4 fails iff duplicate words are non-adjacent (groupby without sort)
    w5 fails iff two distinct words share their first 9 letters
"""

from pathlib import Path

from vfkit.dataset import Corpus, Problem, Solution, SubmissionPair, save_corpus

ROOT = Path(__file__).resolve().parent.parent


def sol(sid: str, pid: str, kind: str, source: str, verdict: str | None = None) -> Solution:
    return Solution(id=sid, problem_id=pid, kind=kind, language="python",
                    source=source, recorded_verdict=verdict)


P1 = {
    "gt": "a, b = map(int, input().split())\nprint(a + b)\n",
    "c1": "import sys\nparts = sys.stdin.read().split()\nprint(int(parts[0]) + int(parts[1]))\n",
    "c2": "nums = [int(t) for t in input().split()]\nprint(sum(nums))\n",
    "c3": "def add(x, y):\n    return x + y\n\na, b = map(int, input().split())\nprint(add(a, b))\n",
    "w1": (
        "a, b = map(int, input().split())\n"
        "# keep the operands in a \"safe\" range before adding\n"
        "a = min(a, 999)\n"
        "b = min(b, 999)\n"
        "print(a + b)\n"
    ),
    "w2": (
        "a, b = map(int, input().split())\n"
        "if b < 0:\n"
        "    print(a - b)\n"
        "else:\n"
        "    print(a + b)\n"
    ),
    "w3": (
        "a, b = map(int, input().split())\n"
        "if a == b:\n"
        "    print(2 * a + 1)\n"
        "else:\n"
        "    print(a + b)\n"
    ),
    "w4": (
        "a, b = map(int, input().split())\n"
        "check = a // b  # leftover from a divisibility experiment\n"
        "print(a + b)\n"
    ),
    "w5": "a, b = map(int, input().split()\nprint(a + b)\n",
}

_P2_PRE = (
    "import sys\n"
    "\n"
    "def main():\n"
    "    data = sys.stdin.read().split()\n"
    "    n = int(data[0])\n"
    "    a = [int(x) for x in data[1:1 + n]]\n"
)

P2 = {
    "gt": _P2_PRE + (
        "    best = a[0]\n"
        "    cur = a[0]\n"
        "    for x in a[1:]:\n"
        "        cur = max(x, cur + x)\n"
        "        best = max(best, cur)\n"
        "    print(best)\n"
        "\n"
        "main()\n"
    ),
    "c1": _P2_PRE + (
        "    best = None\n"
        "    prefix = 0\n"
        "    low = 0\n"
        "    for x in a:\n"
        "        prefix += x\n"
        "        cand = prefix - low\n"
        "        if best is None or cand > best:\n"
        "            best = cand\n"
        "        low = min(low, prefix)\n"
        "    print(best)\n"
        "\n"
        "main()\n"
    ),
    "c2": _P2_PRE + (
        "    best = a[0]\n"
        "    for i in range(n):\n"
        "        total = 0\n"
        "        for j in range(i, n):\n"
        "            total += a[j]\n"
        "            if total > best:\n"
        "                best = total\n"
        "    print(best)\n"
        "\n"
        "main()\n"
    ),
    "c3": _P2_PRE + (
        "    ending = a[0]\n"
        "    best = a[0]\n"
        "    for i in range(1, n):\n"
        "        ending = a[i] + max(ending, 0)\n"
        "        best = max(best, ending)\n"
        "    print(best)\n"
        "\n"
        "main()\n"
    ),
    "w1": _P2_PRE + (
        "    best = 0\n"
        "    cur = 0\n"
        "    for x in a:\n"
        "        cur = max(0, cur + x)\n"
        "        best = max(best, cur)\n"
        "    print(best)\n"
        "\n"
        "main()\n"
    ),
    "w2": _P2_PRE + (
        "    best = a[0]\n"
        "    cur = a[0]\n"
        "    for i in range(1, n - 1):\n"
        "        cur = max(a[i], cur + a[i])\n"
        "        best = max(best, cur)\n"
        "    print(best)\n"
        "\n"
        "main()\n"
    ),
    "w3": _P2_PRE + (
        "    best = a[0]\n"
        "    cur = a[0]\n"
        "    i = 1\n"
        "    while i < n:\n"
        "        cur = max(a[i], cur + a[i])\n"
        "        best = max(best, cur)\n"
        "        if a[i] >= 0:\n"
        "            i += 1\n"
        "    print(best)\n"
        "\n"
        "main()\n"
    ),
    "w4": _P2_PRE + (
        "    if n == 1:\n"
        "        print(max(a[0], 0))\n"
        "        return\n"
        "    best = a[0]\n"
        "    cur = a[0]\n"
        "    for x in a[1:]:\n"
        "        cur = max(x, cur + x)\n"
        "        best = max(best, cur)\n"
        "    print(best)\n"
        "\n"
        "main()\n"
    ),
}

P3 = {
    "gt": "print(len(set(input().split())))\n",
    "c1": (
        "import sys\n"
        "words = sys.stdin.read().split()\n"
        "seen = []\n"
        "for w in words:\n"
        "    if w not in seen:\n"
        "        seen.append(w)\n"
        "print(len(seen))\n"
    ),
    "c2": (
        "counts = {}\n"
        "for w in input().split():\n"
        "    counts[w] = counts.get(w, 0) + 1\n"
        "print(len(counts))\n"
    ),
    "c3": (
        "from itertools import groupby\n"
        "words = sorted(input().split())\n"
        "print(sum(1 for _ in groupby(words)))\n"
    ),
    "w1": "print(len(input().split()))\n",
    "w2": "print(len(set(input().split(\" \"))))\n",
    "w3": "print(len(set(input().split()[:3])))\n",
    "w4": (
        "from itertools import groupby\n"
        "words = input().split()\n"
        "print(sum(1 for _ in groupby(words)))\n"
    ),
    "w5": "print(len(set(w[:9] for w in input().split())))\n",
}


def build() -> Corpus:
    corpus = Corpus()
    corpus.problems["p1"] = Problem(
        id="p1", platform="local",
        statement="Read two integers a and b from one line of input and print their sum.",
        constraints_text="-1000 <= a, b <= 1000",
        ground_truth="p1-gt", difficulty="easy",
        time_limit_ms=1000, memory_limit_mb=256, checker="token",
    )
    corpus.problems["p2"] = Problem(
        id="p2", platform="local",
        statement=(
            "The first line holds an integer n, the second line n integers. "
            "Print the maximum sum over all nonempty contiguous subarrays."
        ),
        constraints_text="1 <= n <= 50\n-100 <= a_i <= 100",
        ground_truth="p2-gt", difficulty="hard",
        time_limit_ms=400, memory_limit_mb=256, checker="token",
    )
    corpus.problems["p3"] = Problem(
        id="p3", platform="local",
        statement=(
            "Read one line of lowercase words separated by spaces and print "
            "the number of distinct words."
        ),
        constraints_text="1 <= w <= 20 words per line; each word is 1..10 lowercase letters",
        ground_truth="p3-gt", difficulty="medium",
        time_limit_ms=1000, memory_limit_mb=256, checker="token",
    )

    verdicts = {
        "p1": {"w1": "WA", "w2": "WA", "w3": "WA", "w4": "RE", "w5": "WA"},
        "p2": {"w1": "WA", "w2": "WA", "w3": "TLE", "w4": "WA"},
        "p3": {"w1": "WA", "w2": "WA", "w3": "WA", "w4": "WA", "w5": "WA"},
    }
    for pid, sources in (("p1", P1), ("p2", P2), ("p3", P3)):
        for tag, source in sources.items():
            sid = f"{pid}-{tag}"
            if tag == "gt":
                kind, verdict = "ground_truth", None
            elif tag.startswith("c"):
                kind, verdict = "correct_human", None
            else:
                kind, verdict = "wrong_human", verdicts[pid][tag]
            corpus.solutions[sid] = sol(sid, pid, kind, source, verdict)

    corpus.pairs.append(SubmissionPair(
        problem_id="p1", wrong=corpus.solutions["p1-w2"], corrected=corpus.solutions["p1-c1"]))
    corpus.pairs.append(SubmissionPair(
        problem_id="p2", wrong=corpus.solutions["p2-w1"], corrected=corpus.solutions["p2-c1"]))
    corpus.pairs.append(SubmissionPair(
        problem_id="p3", wrong=corpus.solutions["p3-w2"], corrected=corpus.solutions["p3-c2"]))
    return corpus


def main() -> None:
    corpus = build()
    out = ROOT / "data" / "toy_corpus"
    save_corpus(corpus, out)
    print(f"wrote corpus with {len(corpus.problems)} problems to {out}")


if __name__ == "__main__":
    main()
