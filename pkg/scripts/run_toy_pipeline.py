"""Drive the full pipeline on the bundled toy corpus, end to end.

Every stage goes through the CLI entry point, so this is exactly what a
user typing the commands would get: ingest validation, suite generation
from the recorded model responses, evaluation against the frozen wrong
solutions, a two-source mixing grid, and the collated report.

All artifacts land under --out (default runs/toy), one subdirectory per
stage.  Reruns are byte-identical, so the directory is safe to diff.
"""

import argparse
import shutil
import sys
from pathlib import Path

from vfkit.cli import main

ROOT = Path(__file__).resolve().parent.parent


def stage(name: str, argv: list[str]) -> None:
    print(f"--- {name}: vfkit {' '.join(argv)}")
    code = main(argv)
    if code != 0:
        print(f"stage {name!r} exited {code}", file=sys.stderr)
        sys.exit(code)


def run(out: Path, fresh: bool) -> None:
    corpus = str(ROOT / "data" / "toy_corpus")
    replay = str(ROOT / "data" / "replay")
    if fresh and out.exists():
        shutil.rmtree(out)
    out.mkdir(parents=True, exist_ok=True)

    common = ["--seed", "0", "--parallelism", "2"]
    gen_common = ["--corpus", corpus, "--llm-mode", "replay",
                  "--replay-dir", replay, *common]

    stage("ingest", ["ingest", "--corpus", corpus,
                     "--out", str(out / "ingest"), *common])

    saga = out / "gen-saga"
    direct = out / "gen-direct"
    stage("gen saga", ["gen", "--paradigm", "saga_full",
                       "--out", str(saga), *gen_common])
    stage("gen direct", ["gen", "--paradigm", "direct",
                         "--out", str(direct), *gen_common])

    eval_saga = out / "eval-saga"
    eval_direct = out / "eval-direct"
    stage("eval saga", ["eval", "--corpus", corpus,
                        "--suites", str(saga / "suites"),
                        "--out", str(eval_saga), *common])
    stage("eval direct", ["eval", "--corpus", corpus,
                          "--suites", str(direct / "suites"),
                          "--out", str(eval_direct), *common])

    stage("mix", ["mix",
                  "--source", f"direct={direct / 'suites'}",
                  "--source", f"saga={saga / 'suites'}",
                  "--corpus", corpus,
                  "--out", str(out / "mix"), *common])

    stage("report", ["report", "--run", str(eval_saga),
                     "--out", str(out / "report")])

    print()
    print(f"toy pipeline done; artifacts under {out}")
    for name in ("eval-saga/summary.md", "mix/mix_grid.csv", "report/report.md"):
        print(f"  {out / name}")


if __name__ == "__main__":
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--out", type=Path, default=Path("runs/toy"))
    parser.add_argument("--fresh", action="store_true",
                        help="delete --out first instead of failing on leftovers")
    args = parser.parse_args()
    run(args.out, args.fresh)
