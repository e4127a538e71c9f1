"""Command-line interface.

Subcommands: ingest, gen, eval, simulate, fit, mix, report.  Options come
from (lowest to highest precedence) built-in defaults, a plain key=value
config file (--config), and explicit flags.  Every command writes an
effective-config snapshot (config.json, including the seed) into its output
directory, takes an exclusive lockfile there while running, and emits no
timestamps, so a rerun with the same inputs is byte-identical.

Exit codes: 0 success, 1 user error (bad inputs, bad config, missing
fixtures), 2 infrastructure failure (toolchain, sandbox, network).
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .dataset import (
    DatasetError,
    load_corpus,
    load_suite,
    save_suite,
    validate_corpus,
)
from .execution import CheckerFailure, Runner, SandboxError, ToolchainError, load_toolchain
from .killmatrix import build_kill_matrix, matrix_to_csv, save_matrix
from .metrics import MetricReport, Protocol, aggregate_reports, compute_report, mix_grid, save_reports
from .report import (
    svg_heatmap,
    svg_line_chart,
    write_curves_csv,
    write_grid_csv,
    write_sim_csv,
    write_summary_md,
)
from .saturation import (
    NoFitError,
    SaturationDomainError,
    SaturationParams,
    analytic_no_detection,
    asymptotic_limit,
    dr_upper_bound,
    fit_saturation,
    simulate_exchangeable,
)
from .tcg.llm import LiveClient, LlmError, ReplayClient, ReplayMissError, ReplayStore
from .tcg.pipeline import (
    GroundTruthError,
    TcgConfig,
    gen_direct,
    gen_random_inputs,
    saga_generate,
)

LOCK_NAME = ".vfkit.lock"


class ConfigError(ValueError):
    pass


def load_config_file(path: str | Path) -> dict[str, str]:
    """Plain key=value lines; '#' starts a comment; blanks ignored."""
    cfg: dict[str, str] = {}
    with open(path, "r", encoding="utf-8") as fh:
        for line_no, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigError(f"{path}:{line_no}: expected key=value, got {raw.strip()!r}")
            key, value = line.split("=", 1)
            cfg[key.strip()] = value.strip()
    return cfg


def _as_bool(v) -> bool:
    if isinstance(v, bool):
        return v
    if str(v).lower() in ("1", "true", "yes", "on"):
        return True
    if str(v).lower() in ("0", "false", "no", "off"):
        return False
    raise ConfigError(f"cannot read {v!r} as a boolean")


def _as_k_list(v) -> tuple[int, ...]:
    if isinstance(v, tuple):
        return v
    try:
        return tuple(int(x) for x in str(v).split(",") if x.strip())
    except ValueError as exc:
        raise ConfigError(f"cannot read {v!r} as a k list") from exc


class Lock:
    """Exclusive per-output-directory lockfile."""

    def __init__(self, out_dir: Path):
        self.path = out_dir / LOCK_NAME
        self._fd = None

    def __enter__(self):
        try:
            self._fd = os.open(self.path, os.O_CREAT | os.O_EXCL | os.O_WRONLY)
        except FileExistsError:
            raise ConfigError(
                f"output directory is locked by another run ({self.path}); "
                "remove the lockfile if no run is active"
            ) from None
        os.write(self._fd, str(os.getpid()).encode())
        return self

    def __exit__(self, *exc):
        if self._fd is not None:
            os.close(self._fd)
            self.path.unlink(missing_ok=True)
        return False


def _snapshot(out_dir: Path, command: str, options: dict) -> None:
    payload = {"command": command, "options": options, "version": __version__}
    (out_dir / "config.json").write_text(
        json.dumps(payload, sort_keys=True, indent=1) + "\n", encoding="utf-8"
    )


def _resolve(args, cfg: dict, key: str, default, cast=None):
    value = getattr(args, key, None)
    if value is None:
        value = cfg.get(key, default)
    if value is None:
        return None
    return cast(value) if cast is not None else value


def _runner(args, cfg) -> Runner:
    toolchain_path = _resolve(args, cfg, "toolchain", None)
    toolchain = load_toolchain(toolchain_path) if toolchain_path else None
    parallelism = int(_resolve(args, cfg, "parallelism", os.cpu_count() or 1))
    kwargs = {"parallelism": parallelism}
    if toolchain is not None:
        kwargs["toolchain"] = toolchain
    return Runner(**kwargs)


def _make_client(args, cfg, out_dir: Path):
    mode = _resolve(args, cfg, "llm_mode", "replay")
    replay_dir = _resolve(args, cfg, "replay_dir", None)
    if mode == "replay":
        if replay_dir is None:
            raise ConfigError("replay mode needs --replay-dir")
        return ReplayClient(ReplayStore(replay_dir))
    if mode == "live":
        endpoint = _resolve(args, cfg, "endpoint", None)
        if endpoint is None:
            raise ConfigError("live mode needs --endpoint")
        store = ReplayStore(replay_dir) if replay_dir else ReplayStore(out_dir / "replay")
        return LiveClient(endpoint, record_store=store)
    raise ConfigError(f"unknown llm mode {mode!r}")


# ---------------------------------------------------------------------------
# commands

def cmd_ingest(args, cfg) -> int:
    corpus_dir = _resolve(args, cfg, "corpus", None)
    if corpus_dir is None:
        raise ConfigError("ingest needs --corpus")
    out_dir = Path(_resolve(args, cfg, "out", "out"))
    out_dir.mkdir(parents=True, exist_ok=True)
    with Lock(out_dir):
        _snapshot(out_dir, "ingest", {"corpus": str(corpus_dir)})
        corpus = load_corpus(corpus_dir)
        report = validate_corpus(corpus)
        (out_dir / "validation.json").write_text(
            json.dumps(report.to_dict(), sort_keys=True, indent=1) + "\n", encoding="utf-8"
        )
        for entry in report.entries:
            eligible = ",".join(sorted(k for k, v in entry.eligible_paradigms.items() if v)) or "-"
            note = f" ({'; '.join(entry.notes)})" if entry.notes else ""
            print(
                f"{entry.problem_id}: gt={'yes' if entry.has_ground_truth else 'NO'} "
                f"correct={entry.n_correct} wrong={entry.n_wrong} pairs={entry.n_pairs} "
                f"eligible={eligible}{note}"
            )
        print(f"ingested {len(corpus.problems)} problems, {len(corpus.solutions)} solutions, "
              f"{len(corpus.pairs)} pairs -> {out_dir}")
    return 0


def _tcg_config(args, cfg, seed: int) -> TcgConfig:
    return TcgConfig(
        model_tag=str(_resolve(args, cfg, "model", "test-model")),
        seed=seed,
        direct_n_target=int(_resolve(args, cfg, "direct_n_target", 10)),
        sampler_n_target=int(_resolve(args, cfg, "sampler_n_target", 10)),
        random_generator=str(_resolve(args, cfg, "random_generator", "builtin")),
        max_correct_solutions=int(_resolve(args, cfg, "max_correct_solutions", 10)),
        max_pairs=int(_resolve(args, cfg, "max_pairs", 5)),
        target_suite_size=int(_resolve(args, cfg, "target_suite_size", 50)),
        target_count_per_script=int(_resolve(args, cfg, "target_count_per_script", 10)),
        strict_parsing=_as_bool(_resolve(args, cfg, "strict_parsing", True)),
        llm_concurrency=int(_resolve(args, cfg, "llm_concurrency", 4)),
    )


def cmd_gen(args, cfg) -> int:
    corpus_dir = _resolve(args, cfg, "corpus", None)
    if corpus_dir is None:
        raise ConfigError("gen needs --corpus")
    paradigm = _resolve(args, cfg, "paradigm", "saga_full")
    if paradigm not in ("direct", "interpreter_random", "saga_multidim", "saga_differential", "saga_full"):
        raise ConfigError(f"unknown paradigm {paradigm!r}")
    seed = int(_resolve(args, cfg, "seed", 0))
    out_dir = Path(_resolve(args, cfg, "out", "out"))
    out_dir.mkdir(parents=True, exist_ok=True)
    with Lock(out_dir):
        corpus = load_corpus(corpus_dir)
        only = getattr(args, "problem", None) or None
        problem_ids = sorted(corpus.problems) if not only else list(only)
        for pid in problem_ids:
            if pid not in corpus.problems:
                raise ConfigError(f"unknown problem id {pid!r}")
        _snapshot(out_dir, "gen", {
            "corpus": str(corpus_dir), "paradigm": paradigm, "seed": seed,
            "problems": problem_ids,
        })
        runner = _runner(args, cfg)
        tcg_cfg = _tcg_config(args, cfg, seed)
        if paradigm == "saga_multidim":
            tcg_cfg.differential_enabled = False
        elif paradigm == "saga_differential":
            tcg_cfg.multidim_enabled = False
        client = None
        if paradigm != "interpreter_random" or tcg_cfg.random_generator == "llm":
            client = _make_client(args, cfg, out_dir)

        records_dir = out_dir / "records"
        suites_dir = out_dir / "suites"
        for pid in problem_ids:
            problem = corpus.problems[pid]
            if paradigm == "direct":
                suite, record = gen_direct(problem, corpus, client, runner, tcg_cfg)
                records = [record]
            elif paradigm == "interpreter_random":
                suite, record = gen_random_inputs(problem, corpus, runner, tcg_cfg, client)
                records = [record]
            else:
                suite, records = saga_generate(problem, corpus, client, runner, tcg_cfg)
            save_suite(suite, suites_dir / f"{pid}.suite.jsonl")
            records_dir.mkdir(parents=True, exist_ok=True)
            for record in records:
                (records_dir / f"{record.id}.json").write_text(
                    json.dumps(record.to_dict(), sort_keys=True, indent=1) + "\n",
                    encoding="utf-8",
                )
            retention = records[-1].retention_rate if records else 0.0
            print(f"{pid}: {len(suite.cases)} cases (retention {retention:.3f}) -> "
                  f"{suites_dir / (pid + '.suite.jsonl')}")
    return 0


def _protocol(args, cfg, seed: int) -> Protocol:
    return Protocol(
        k_list=_as_k_list(_resolve(args, cfg, "k_list", (1, 2, 5, 10, 20, 30, 40, 50))),
        k_min=int(_resolve(args, cfg, "k_min", 1)),
        n_max=int(_resolve(args, cfg, "n_max", 50)),
        mc_trials=int(_resolve(args, cfg, "mc_trials", 2000)),
        seed=seed,
        include_ce=_as_bool(_resolve(args, cfg, "include_ce", False)),
    )


def _suite_paths(args, cfg) -> list[Path]:
    raw = getattr(args, "suites", None) or cfg.get("suites")
    if not raw:
        raise ConfigError("need --suites (directory or suite files)")
    if isinstance(raw, str):
        raw = [raw]
    paths: list[Path] = []
    for item in raw:
        p = Path(item)
        if p.is_dir():
            paths.extend(sorted(p.glob("*.suite.jsonl")))
        elif p.exists():
            paths.append(p)
        else:
            raise ConfigError(f"suite path {p} does not exist")
    if not paths:
        raise ConfigError("no suite files found")
    return paths


def cmd_eval(args, cfg) -> int:
    corpus_dir = _resolve(args, cfg, "corpus", None)
    if corpus_dir is None:
        raise ConfigError("eval needs --corpus")
    seed = int(_resolve(args, cfg, "seed", 0))
    out_dir = Path(_resolve(args, cfg, "out", "out"))
    out_dir.mkdir(parents=True, exist_ok=True)
    with Lock(out_dir):
        suite_paths = _suite_paths(args, cfg)
        _snapshot(out_dir, "eval", {
            "corpus": str(corpus_dir), "seed": seed,
            "suites": [str(p) for p in suite_paths],
        })
        corpus = load_corpus(corpus_dir)
        runner = _runner(args, cfg)
        runner.corpus_root = corpus_dir
        protocol = _protocol(args, cfg, seed)
        reports: list[MetricReport] = []
        for path in suite_paths:
            suite = load_suite(path)
            if suite.problem_id not in corpus.problems:
                raise DatasetError(f"suite {path} references unknown problem {suite.problem_id}")
            problem = corpus.problems[suite.problem_id]
            wrong = corpus.solutions_for(problem.id, "wrong_human")
            matrix = build_kill_matrix(problem, suite, wrong, runner)
            save_matrix(matrix, out_dir / "matrices" / f"{problem.id}.km")
            matrix_to_csv(matrix, out_dir / "matrices" / f"{problem.id}.csv")
            reports.append(compute_report(matrix, protocol))
        ordered = sorted(reports, key=lambda r: r.scope)
        all_reports = ordered + [aggregate_reports(ordered)]
        save_reports(all_reports, out_dir / "reports.jsonl")
        write_curves_csv(all_reports, out_dir / "curves.csv")
        write_summary_md(all_reports, out_dir / "summary.md")
        if _as_bool(_resolve(args, cfg, "svg", False)):
            agg = all_reports[-1]
            if agg.curve:
                svg_line_chart(
                    [
                        ("dr@k", [(p.k, p.dr) for p in agg.curve]),
                        ("vacc@k", [(p.k, p.vacc) for p in agg.curve]),
                    ],
                    out_dir / "curves.svg", title="aggregate detection curves",
                    xlabel="k", ylabel="rate",
                )
        for rep in all_reports:
            print(
                f"{rep.scope}: n={rep.n_tests} m={rep.m_solutions} dr={rep.dr_full} "
                f"vacc={rep.vacc_full} depc={rep.depc} auc={rep.auc_at_n}"
            )
    return 0


def cmd_mix(args, cfg) -> int:
    corpus_dir = _resolve(args, cfg, "corpus", None)
    if corpus_dir is None:
        raise ConfigError("mix needs --corpus")
    raw_sources = getattr(args, "source", None) or []
    if isinstance(cfg.get("sources"), str) and not raw_sources:
        raw_sources = [s.strip() for s in cfg["sources"].split(";") if s.strip()]
    if len(raw_sources) < 2:
        raise ConfigError("mix needs at least two --source name=path entries")
    sources: list[tuple[str, Path]] = []
    for item in raw_sources:
        if "=" not in item:
            raise ConfigError(f"--source must be name=path, got {item!r}")
        name, path = item.split("=", 1)
        sources.append((name.strip(), Path(path.strip())))
    seed = int(_resolve(args, cfg, "seed", 0))
    out_dir = Path(_resolve(args, cfg, "out", "out"))
    out_dir.mkdir(parents=True, exist_ok=True)
    with Lock(out_dir):
        _snapshot(out_dir, "mix", {
            "corpus": str(corpus_dir), "seed": seed,
            "sources": {name: str(path) for name, path in sources},
        })
        corpus = load_corpus(corpus_dir)
        runner = _runner(args, cfg)
        runner.corpus_root = corpus_dir
        protocol = _protocol(args, cfg, seed)

        suites_by_source: dict[str, dict[str, object]] = {}
        for name, root in sources:
            paths = sorted(root.glob("*.suite.jsonl")) if root.is_dir() else [root]
            loaded = {}
            for p in paths:
                suite = load_suite(p)
                loaded[suite.problem_id] = suite
            suites_by_source[name] = loaded
        common = set.intersection(*(set(v) for v in suites_by_source.values()))
        if not common:
            raise ConfigError("sources share no problems")

        names = [name for name, _ in sources]
        grids = []
        for pid in sorted(common):
            problem = corpus.problems[pid]
            wrong = corpus.solutions_for(pid, "wrong_human")
            named = []
            for name in names:
                matrix = build_kill_matrix(problem, suites_by_source[name][pid], wrong, runner)
                named.append((name, matrix))
            grid = mix_grid(named, protocol)
            grids.append(grid)
            write_grid_csv(grid, out_dir / "mix" / f"{pid}.csv")
        agg = grids[0]
        stacked = np.stack([g.auc for g in grids])
        mean_grid = type(agg)(names=names, auc=np.nanmean(stacked, axis=0))
        write_grid_csv(mean_grid, out_dir / "mix_grid.csv")
        if _as_bool(_resolve(args, cfg, "svg", False)):
            svg_heatmap(mean_grid, out_dir / "mix_grid.svg", title="suite mixing (mean AUC)")
        print("sources: " + ", ".join(names))
        for i, name in enumerate(names):
            row = " ".join(
                "nan" if np.isnan(mean_grid.auc[i, j]) else f"{mean_grid.auc[i, j]:.4f}"
                for j in range(len(names))
            )
            print(f"{name}: {row}")
    return 0


def cmd_simulate(args, cfg) -> int:
    p = float(_resolve(args, cfg, "p", 0.2))
    rho = float(_resolve(args, cfg, "rho", 0.3))
    n_max = int(_resolve(args, cfg, "n_max", 100))
    trials = int(_resolve(args, cfg, "trials", 100_000))
    seed = int(_resolve(args, cfg, "seed", 0))
    out_dir = Path(_resolve(args, cfg, "out", "out"))
    out_dir.mkdir(parents=True, exist_ok=True)
    with Lock(out_dir):
        _snapshot(out_dir, "simulate", {
            "p": p, "rho": rho, "n_max": n_max, "trials": trials, "seed": seed,
        })
        curve = simulate_exchangeable(n_max, p, rho, trials, seed)
        bound = None
        analytic = None
        if 0.0 < p < 1.0:
            bound = [dr_upper_bound(SaturationParams(p_bar=p, rho_eff=rho, n=n)) for n, _ in curve.points]
            analytic = [1.0 - analytic_no_detection(p, rho, n) for n, _ in curve.points]
        write_sim_csv(curve, bound, analytic, out_dir / "sim.csv")
        if _as_bool(_resolve(args, cfg, "svg", False)):
            series = [("simulated", [(float(n), float(v)) for n, v in curve.points])]
            if bound is not None:
                series.append(("model bound", [(float(n), b) for (n, _), b in zip(curve.points, bound)]))
            svg_line_chart(series, out_dir / "sim.svg",
                           title=f"detection saturation (p={p}, rho={rho})",
                           xlabel="suite size n", ylabel="detection rate")
        final_n, final_dr = curve.points[-1]
        print(f"simulated dr({final_n}) = {final_dr:.4f} over {trials} trials")
        if rho > 0.0 and 0.0 < p < 1.0:
            print(f"model asymptotic limit: {asymptotic_limit(p, rho):.4f}")
    return 0


def _read_curve_csv(path: Path) -> list[tuple[int, float]]:
    lines = path.read_text(encoding="utf-8").strip().splitlines()
    if not lines:
        raise ConfigError(f"empty curve file {path}")
    header = [h.strip() for h in lines[0].split(",")]
    try:
        n_col = header.index("n")
    except ValueError:
        raise ConfigError(f"curve file {path} needs an 'n' column") from None
    dr_col = None
    for name in ("dr", "dr_simulated"):
        if name in header:
            dr_col = header.index(name)
            break
    if dr_col is None:
        raise ConfigError(f"curve file {path} needs a 'dr' or 'dr_simulated' column")
    points = []
    for line in lines[1:]:
        cells = line.split(",")
        points.append((int(cells[n_col]), float(cells[dr_col])))
    return points


def cmd_fit(args, cfg) -> int:
    curve_path = _resolve(args, cfg, "curve", None)
    if curve_path is None:
        raise ConfigError("fit needs --curve <csv>")
    out_dir = Path(_resolve(args, cfg, "out", "out"))
    out_dir.mkdir(parents=True, exist_ok=True)
    with Lock(out_dir):
        _snapshot(out_dir, "fit", {"curve": str(curve_path)})
        points = _read_curve_csv(Path(curve_path))
        result = fit_saturation(points)
        payload = {"p_hat": result.p_hat, "rho_hat": result.rho_hat, "rmse": result.rmse}
        (out_dir / "fit.json").write_text(
            json.dumps(payload, sort_keys=True, indent=1) + "\n", encoding="utf-8"
        )
        print(f"p_hat={result.p_hat:.6f} rho_hat={result.rho_hat:.6f} rmse={result.rmse:.6g}")
    return 0


def cmd_report(args, cfg) -> int:
    run_dir = Path(_resolve(args, cfg, "run", "."))
    out_path = Path(_resolve(args, cfg, "out", run_dir / "report.md"))
    lines = ["# Run report", ""]
    config_path = run_dir / "config.json"
    if config_path.exists():
        lines += ["## Configuration", "", "```json", config_path.read_text(encoding="utf-8").rstrip(), "```", ""]
    summary = run_dir / "summary.md"
    if summary.exists():
        lines += [summary.read_text(encoding="utf-8").rstrip(), ""]
    grid = run_dir / "mix_grid.csv"
    if grid.exists():
        lines += ["## Suite mixing (mean AUC)", "", "```", grid.read_text(encoding="utf-8").rstrip(), "```", ""]
    fit_path = run_dir / "fit.json"
    if fit_path.exists():
        lines += ["## Saturation fit", "", "```json", fit_path.read_text(encoding="utf-8").rstrip(), "```", ""]
    sim = run_dir / "sim.csv"
    if sim.exists():
        rows = sim.read_text(encoding="utf-8").strip().splitlines()
        shown = rows[:1] + rows[1:][:5] + (["..."] if len(rows) > 6 else [])
        lines += ["## Simulation (head)", "", "```", *shown, "```", ""]
    if len(lines) <= 2:
        raise ConfigError(f"nothing to report in {run_dir}")
    out_path.parent.mkdir(parents=True, exist_ok=True)
    out_path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    print(f"wrote {out_path}")
    return 0


# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="vfkit", description=__doc__,
                                     formatter_class=argparse.RawDescriptionHelpFormatter)
    parser.add_argument("--version", action="version", version=f"vfkit {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--config", help="key=value config file")
        sp.add_argument("--out", help="output directory")
        sp.add_argument("--seed", type=int)
        sp.add_argument("--parallelism", type=int)
        sp.add_argument("--toolchain", help="JSON toolchain override file")

    p_ingest = sub.add_parser("ingest", help="load and validate a corpus")
    common(p_ingest)
    p_ingest.add_argument("--corpus")

    p_gen = sub.add_parser("gen", help="generate test suites")
    common(p_gen)
    p_gen.add_argument("--corpus")
    p_gen.add_argument("--paradigm", choices=[
        "direct", "interpreter_random", "saga_multidim", "saga_differential", "saga_full",
    ])
    p_gen.add_argument("--problem", action="append", help="restrict to this problem id (repeatable)")
    p_gen.add_argument("--llm-mode", dest="llm_mode", choices=["replay", "live"])
    p_gen.add_argument("--replay-dir", dest="replay_dir")
    p_gen.add_argument("--endpoint")
    p_gen.add_argument("--model")
    p_gen.add_argument("--random-generator", dest="random_generator", choices=["builtin", "llm"])
    p_gen.add_argument("--target-suite-size", dest="target_suite_size", type=int)
    p_gen.add_argument("--max-pairs", dest="max_pairs", type=int)
    p_gen.add_argument("--max-correct-solutions", dest="max_correct_solutions", type=int)
    p_gen.add_argument("--sampler-n-target", dest="sampler_n_target", type=int)
    p_gen.add_argument("--direct-n-target", dest="direct_n_target", type=int)
    p_gen.add_argument("--strict-parsing", dest="strict_parsing",
                       action=argparse.BooleanOptionalAction)

    p_eval = sub.add_parser("eval", help="judge suites and compute metrics")
    common(p_eval)
    p_eval.add_argument("--corpus")
    p_eval.add_argument("--suites", action="append", help="suite file or directory (repeatable)")
    p_eval.add_argument("--k-list", dest="k_list")
    p_eval.add_argument("--k-min", dest="k_min", type=int)
    p_eval.add_argument("--n-max", dest="n_max", type=int)
    p_eval.add_argument("--mc-trials", dest="mc_trials", type=int)
    p_eval.add_argument("--include-ce", dest="include_ce", action=argparse.BooleanOptionalAction)
    p_eval.add_argument("--svg", action=argparse.BooleanOptionalAction)

    p_mix = sub.add_parser("mix", help="pairwise suite mixing table")
    common(p_mix)
    p_mix.add_argument("--corpus")
    p_mix.add_argument("--source", action="append", help="name=path (repeatable)")
    p_mix.add_argument("--k-list", dest="k_list")
    p_mix.add_argument("--k-min", dest="k_min", type=int)
    p_mix.add_argument("--n-max", dest="n_max", type=int)
    p_mix.add_argument("--mc-trials", dest="mc_trials", type=int)
    p_mix.add_argument("--include-ce", dest="include_ce", action=argparse.BooleanOptionalAction)
    p_mix.add_argument("--svg", action=argparse.BooleanOptionalAction)

    p_sim = sub.add_parser("simulate", help="simulate detection saturation")
    common(p_sim)
    p_sim.add_argument("--p", type=float)
    p_sim.add_argument("--rho", type=float)
    p_sim.add_argument("--n-max", dest="n_max", type=int)
    p_sim.add_argument("--trials", type=int)
    p_sim.add_argument("--svg", action=argparse.BooleanOptionalAction)

    p_fit = sub.add_parser("fit", help="fit the saturation model to a curve")
    common(p_fit)
    p_fit.add_argument("--curve", help="CSV with n and dr columns")

    p_report = sub.add_parser("report", help="consolidate run artifacts into markdown")
    common(p_report)
    p_report.add_argument("--run", help="run directory to scan")

    return parser


_COMMANDS = {
    "ingest": cmd_ingest,
    "gen": cmd_gen,
    "eval": cmd_eval,
    "mix": cmd_mix,
    "simulate": cmd_simulate,
    "fit": cmd_fit,
    "report": cmd_report,
}

_USER_ERRORS = (
    DatasetError,
    ConfigError,
    GroundTruthError,
    ReplayMissError,
    NoFitError,
    SaturationDomainError,
    ValueError,
    FileNotFoundError,
)
_INFRA_ERRORS = (ToolchainError, SandboxError, CheckerFailure, LlmError, OSError)


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    cfg: dict[str, str] = {}
    if getattr(args, "config", None):
        cfg = load_config_file(args.config)
    try:
        return _COMMANDS[args.command](args, cfg)
    except _USER_ERRORS as exc:
        print(json.dumps({"error": type(exc).__name__, "message": str(exc)}), file=sys.stderr)
        return 1
    except _INFRA_ERRORS as exc:
        print(json.dumps({"error": type(exc).__name__, "message": str(exc)}), file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
