"""Detection metrics over kill matrices.

Conventions: a kill matrix has n test rows and m wrong-solution columns.
Detection rate is the fraction of solutions with at least one detecting
test; verification accuracy (vacc) is the all-or-nothing indicator that
every solution is detected.  The @k variants score a uniformly random
k-subset of tests: dr_at_k has a closed form per solution (hypergeometric
miss probability), vacc_at_k is estimated by Monte Carlo with an exact
enumeration variant for small n.  A matrix with zero effective solutions
has no defined detection metrics; asking for them raises rather than
returning a vacuous value.

All Monte Carlo draws are seeded through derive_seed, so results are
reproducible and independent of evaluation order.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, field, asdict
from fractions import Fraction
from pathlib import Path

import numpy as np

from .killmatrix import KillMatrix, union_matrices

_EXACT_COMB_MAX_N = 2000   # Fraction arithmetic below this, stable float products above
_EXACT_ENUM_MAX_N = 20     # 2^n subset enumeration guard
_MC_CHUNK_ELEMS = 8_000_000


class UndefinedMetricError(ValueError):
    """Raised when a metric has no defined value (e.g. no wrong solutions)."""


def derive_seed(base_seed: int, *parts) -> int:
    """Stable 63-bit stream seed for (base, scope...) so per-problem and
    per-k draws never depend on evaluation order."""
    h = hashlib.sha256()
    h.update(str(base_seed).encode())
    for part in parts:
        h.update(b"\x1f")
        h.update(str(part).encode())
    return int.from_bytes(h.digest()[:8], "big") >> 1


def _effective(matrix: KillMatrix, include_ce: bool) -> np.ndarray:
    return matrix.effective_detects(include_ce)


def _require_solutions(det: np.ndarray, what: str) -> None:
    if det.shape[1] == 0:
        raise UndefinedMetricError(f"{what} is undefined with zero effective wrong solutions")


def detection_rate(matrix: KillMatrix, include_ce: bool = False) -> float:
    """Mean over solutions of "some test detects it"."""
    det = _effective(matrix, include_ce)
    _require_solutions(det, "detection rate")
    return float(det.any(axis=0).mean())


def vacc(matrix: KillMatrix, include_ce: bool = False) -> int:
    """1 iff every solution is detected by at least one test, else 0."""
    det = _effective(matrix, include_ce)
    _require_solutions(det, "verification accuracy")
    return int(det.any(axis=0).all())


def _per_solution_counts(det: np.ndarray) -> np.ndarray:
    return det.sum(axis=0).astype(np.int64)


def dr_at_k(matrix: KillMatrix, k: int, include_ce: bool = False) -> float:
    """Expected detection rate of a uniformly random k-subset of tests.

    Per solution with d detecting tests out of n, the miss probability of a
    random k-subset is C(n-d, k)/C(n, k); exact in rational arithmetic for
    moderate n, stable product form beyond.
    """
    det = _effective(matrix, include_ce)
    _require_solutions(det, "dr@k")
    n = det.shape[0]
    if not 1 <= k <= n:
        raise ValueError(f"k={k} out of range 1..{n}")
    counts = _per_solution_counts(det)
    if n <= _EXACT_COMB_MAX_N:
        denom = math.comb(n, k)
        total = Fraction(0)
        for d in counts:
            total += 1 - Fraction(math.comb(n - int(d), k), denom)
        return float(total / len(counts))
    acc = 0.0
    for d in counts:
        d = int(d)
        miss = 1.0
        for i in range(k):
            miss *= (n - d - i) / (n - i)
            if miss == 0.0:
                break
        acc += 1.0 - miss
    return acc / len(counts)


def _cover_counts(det: np.ndarray) -> list[int]:
    """counts[s] = number of size-s test subsets that detect every solution.
    OR-mask dynamic program over all 2^n subsets."""
    n, m = det.shape
    full = (1 << m) - 1
    rowmask = [0] * n
    for i in range(n):
        mask = 0
        for j in range(m):
            if det[i, j]:
                mask |= 1 << j
        rowmask[i] = mask
    counts = [0] * (n + 1)
    ormask = [0] * (1 << n)
    if full == 0:  # m == 0 handled by callers; defensive
        return counts
    for s in range(1, 1 << n):
        lsb = s & -s
        ormask[s] = ormask[s ^ lsb] | rowmask[lsb.bit_length() - 1]
        if ormask[s] == full:
            counts[s.bit_count()] += 1
    return counts


def vacc_at_k_exact(matrix: KillMatrix, k: int, include_ce: bool = False) -> float:
    """P(random k-subset detects all solutions), by exact enumeration.
    Exponential in n; refuses n > 20."""
    det = _effective(matrix, include_ce)
    _require_solutions(det, "vacc@k")
    n = det.shape[0]
    if not 1 <= k <= n:
        raise ValueError(f"k={k} out of range 1..{n}")
    if n > _EXACT_ENUM_MAX_N:
        raise ValueError(f"exact enumeration limited to n <= {_EXACT_ENUM_MAX_N} tests (got {n})")
    counts = _cover_counts(det)
    return float(Fraction(counts[k], math.comb(n, k)))


def vacc_at_k(matrix: KillMatrix, k: int, trials: int = 2000, seed: int = 0,
              include_ce: bool = False) -> float:
    """Monte Carlo estimate of P(random k-subset detects all solutions).

    k = n needs no sampling (the only subset is the full suite).  Draws are
    vectorized: each trial picks k distinct tests via a partial sort of
    uniform keys, which is a uniform k-subset.
    """
    det = _effective(matrix, include_ce)
    _require_solutions(det, "vacc@k")
    n, m = det.shape
    if not 1 <= k <= n:
        raise ValueError(f"k={k} out of range 1..{n}")
    if trials < 1:
        raise ValueError("trials must be >= 1")
    if k == n:
        return float(int(det.any(axis=0).all()))
    rng = np.random.default_rng(seed)
    hits = 0
    chunk = max(1, _MC_CHUNK_ELEMS // max(1, n + k * m))
    remaining = trials
    while remaining > 0:
        c = min(chunk, remaining)
        keys = rng.random((c, n))
        idx = np.argpartition(keys, k - 1, axis=1)[:, :k]
        covered = det[idx].any(axis=1)          # (c, m)
        hits += int(covered.all(axis=1).sum())
        remaining -= c
    return hits / trials


def depc(matrix: KillMatrix, include_ce: bool = False) -> int:
    """Number of distinct nonzero detection patterns among the tests."""
    det = _effective(matrix, include_ce)
    if det.shape[0] == 0:
        return 0
    nonzero = det[det.any(axis=1)]
    if nonzero.shape[0] == 0:
        return 0
    return int(np.unique(nonzero, axis=0).shape[0])


def diversity_ratio(matrix: KillMatrix, include_ce: bool = False) -> float:
    """depc / n_tests; 0.0 for an empty suite."""
    n = matrix.n_tests
    if n == 0:
        return 0.0
    return depc(matrix, include_ce) / n


def pass_at_k(n_samples: int, n_correct: int, k: int) -> float:
    """P(at least one of k drawn samples is correct), sampling without
    replacement from n_samples of which n_correct are correct."""
    if n_samples < 1:
        raise ValueError("n_samples must be >= 1")
    if not 0 <= n_correct <= n_samples:
        raise ValueError("n_correct out of range")
    if not 1 <= k <= n_samples:
        raise ValueError(f"k={k} out of range 1..{n_samples}")
    return float(1 - Fraction(math.comb(n_samples - n_correct, k), math.comb(n_samples, k)))


def auc_at_n(points: list[tuple[int, float]], k_min: int, n_max: int) -> float:
    """Normalized trapezoid area under a metric-vs-k curve on [k_min, n_max].

    Points must be sorted with strictly increasing k and include both
    endpoints; the result divides by (n_max - k_min) so a constant curve c
    scores exactly c.
    """
    if n_max <= k_min:
        raise ValueError(f"n_max={n_max} must exceed k_min={k_min}")
    ks = [k for k, _ in points]
    if any(k2 <= k1 for k1, k2 in zip(ks, ks[1:])):
        raise ValueError("curve points must have strictly increasing k")
    window = [(k, v) for k, v in points if k_min <= k <= n_max]
    wks = [k for k, _ in window]
    if not wks or wks[0] != k_min or wks[-1] != n_max:
        raise ValueError(f"curve must include points at k_min={k_min} and n_max={n_max}")
    area = 0.0
    for (k1, v1), (k2, v2) in zip(window, window[1:]):
        area += (v1 + v2) / 2.0 * (k2 - k1)
    return area / (n_max - k_min)


@dataclass
class CurvePoint:
    k: int
    dr: float
    vacc: float


@dataclass
class Protocol:
    """Evaluation protocol: which k grid, AUC window, and MC budget."""
    k_list: tuple[int, ...] = (1, 2, 5, 10, 20, 30, 40, 50)
    k_min: int = 1
    n_max: int = 50
    mc_trials: int = 2000
    seed: int = 0
    include_ce: bool = False

    def __post_init__(self):
        self.k_list = tuple(sorted(set(int(k) for k in self.k_list)))
        if any(k < 1 for k in self.k_list):
            raise ValueError("k_list entries must be >= 1")
        if self.k_min < 1 or self.n_max <= self.k_min:
            raise ValueError("need 1 <= k_min < n_max")
        if self.mc_trials < 1:
            raise ValueError("mc_trials must be >= 1")


def compute_curves(matrix: KillMatrix, protocol: Protocol, scope: str | None = None) -> list[CurvePoint]:
    """DR@k (exact) and VAcc@k (MC, per-k derived seed) on the protocol grid
    clipped to the suite size, with window endpoints added."""
    n = matrix.n_tests
    scope = scope if scope is not None else matrix.problem_id
    if n == 0:
        return []
    n_eff_max = min(protocol.n_max, n)
    grid = {k for k in protocol.k_list if 1 <= k <= n}
    if protocol.k_min <= n:
        grid.add(protocol.k_min)
    grid.add(n_eff_max)
    points = []
    for k in sorted(grid):
        points.append(CurvePoint(
            k=k,
            dr=dr_at_k(matrix, k, protocol.include_ce),
            vacc=vacc_at_k(matrix, k, trials=protocol.mc_trials,
                           seed=derive_seed(protocol.seed, scope, k),
                           include_ce=protocol.include_ce),
        ))
    return points


@dataclass
class MetricReport:
    scope: str
    n_tests: int
    m_solutions: int
    m_ce: int
    dr_full: float | None
    vacc_full: float | None
    depc: int
    diversity_ratio: float
    curve: list[CurvePoint]
    auc_at_n: float | None
    protocol: dict
    n_problems: int = 1

    def to_dict(self) -> dict:
        d = asdict(self)
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "MetricReport":
        d = dict(d)
        d["curve"] = [CurvePoint(**p) for p in d.get("curve", [])]
        return cls(**d)


def compute_report(matrix: KillMatrix, protocol: Protocol | None = None,
                   scope: str | None = None) -> MetricReport:
    """Full per-problem scorecard: whole-suite metrics, curves, and AUC of
    the VAcc@k curve over [k_min, min(n_max, n)]."""
    protocol = protocol if protocol is not None else Protocol()
    scope = scope if scope is not None else matrix.problem_id
    det = _effective(matrix, protocol.include_ce)
    m_eff = det.shape[1]
    n = matrix.n_tests

    dr_full = detection_rate(matrix, protocol.include_ce) if m_eff else None
    vacc_full = float(vacc(matrix, protocol.include_ce)) if m_eff else None
    curve = compute_curves(matrix, protocol, scope) if m_eff else []
    auc = None
    if curve:
        n_eff_max = min(protocol.n_max, n)
        if n_eff_max > protocol.k_min:
            auc = auc_at_n([(p.k, p.vacc) for p in curve], protocol.k_min, n_eff_max)
    return MetricReport(
        scope=scope,
        n_tests=n,
        m_solutions=matrix.m_solutions,
        m_ce=int(matrix.ce_flags.sum()),
        dr_full=dr_full,
        vacc_full=vacc_full,
        depc=depc(matrix, protocol.include_ce),
        diversity_ratio=diversity_ratio(matrix, protocol.include_ce),
        curve=curve,
        auc_at_n=auc,
        protocol={
            "k_list": list(protocol.k_list), "k_min": protocol.k_min, "n_max": protocol.n_max,
            "mc_trials": protocol.mc_trials, "seed": protocol.seed, "include_ce": protocol.include_ce,
        },
    )


def aggregate_reports(reports: list[MetricReport]) -> MetricReport:
    """Corpus-level rollup: DR and VAcc are macro-averages over problems
    where they are defined, DEPC sums, the diversity ratio is recomputed
    from the summed counts, curves are averaged on the shared k grid, and
    AUC is the mean of the defined per-problem AUCs."""
    if not reports:
        raise ValueError("nothing to aggregate")
    drs = [r.dr_full for r in reports if r.dr_full is not None]
    vaccs = [r.vacc_full for r in reports if r.vacc_full is not None]
    total_n = sum(r.n_tests for r in reports)
    total_depc = sum(r.depc for r in reports)
    aucs = [r.auc_at_n for r in reports if r.auc_at_n is not None]

    curves_by_k: dict[int, list[CurvePoint]] = {}
    common_ks: set[int] | None = None
    for r in reports:
        if not r.curve:
            continue
        ks = {p.k for p in r.curve}
        common_ks = ks if common_ks is None else (common_ks & ks)
        for p in r.curve:
            curves_by_k.setdefault(p.k, []).append(p)
    curve = []
    if common_ks:
        n_curves = sum(1 for r in reports if r.curve)
        for k in sorted(common_ks):
            pts = curves_by_k[k]
            if len(pts) == n_curves:
                curve.append(CurvePoint(
                    k=k,
                    dr=sum(p.dr for p in pts) / len(pts),
                    vacc=sum(p.vacc for p in pts) / len(pts),
                ))

    return MetricReport(
        scope="aggregate",
        n_tests=total_n,
        m_solutions=sum(r.m_solutions for r in reports),
        m_ce=sum(r.m_ce for r in reports),
        dr_full=sum(drs) / len(drs) if drs else None,
        vacc_full=sum(vaccs) / len(vaccs) if vaccs else None,
        depc=total_depc,
        diversity_ratio=total_depc / total_n if total_n else 0.0,
        curve=curve,
        auc_at_n=sum(aucs) / len(aucs) if aucs else None,
        protocol=dict(reports[0].protocol),
        n_problems=sum(r.n_problems for r in reports),
    )


def mix_report(a: KillMatrix, b: KillMatrix, protocol: Protocol | None = None) -> MetricReport:
    """Scorecard of the merged suite (row union of two matrices)."""
    merged = union_matrices(a, b)
    return mix_report_scope(merged, protocol)


def mix_report_scope(matrix: KillMatrix, protocol: Protocol | None = None) -> MetricReport:
    return compute_report(matrix, protocol)


@dataclass
class MixGrid:
    names: list[str]
    auc: np.ndarray  # float, shape (len(names), len(names)); NaN where undefined

    def __eq__(self, other):
        if not isinstance(other, MixGrid):
            return NotImplemented
        return self.names == other.names and np.array_equal(self.auc, other.auc, equal_nan=True)


def mix_grid(named_matrices: list[tuple[str, KillMatrix]], protocol: Protocol | None = None) -> MixGrid:
    """Pairwise mixing table: cell (i, j) is the VAcc-curve AUC of suite i
    merged with suite j; the diagonal is each suite alone."""
    names = [name for name, _ in named_matrices]
    if len(set(names)) != len(names):
        raise ValueError("duplicate source names in mix grid")
    size = len(names)
    grid = np.full((size, size), np.nan)
    for i, (_, a) in enumerate(named_matrices):
        for j, (_, b) in enumerate(named_matrices):
            if i == j:
                rep = compute_report(a, protocol, scope=f"{names[i]}")
            else:
                merged = union_matrices(a, b)
                rep = compute_report(merged, protocol, scope=f"{names[i]}+{names[j]}")
            if rep.auc_at_n is not None:
                grid[i, j] = rep.auc_at_n
    return MixGrid(names=names, auc=grid)


def save_reports(reports: list[MetricReport], path: str | Path) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as fh:
        for rep in reports:
            fh.write(json.dumps(rep.to_dict(), sort_keys=True, separators=(",", ":")) + "\n")


def load_reports(path: str | Path) -> list[MetricReport]:
    reports = []
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            if line.strip():
                reports.append(MetricReport.from_dict(json.loads(line)))
    return reports
