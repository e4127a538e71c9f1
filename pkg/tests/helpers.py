"""Shared test utilities: matrix builders and brute-force subset oracles.

The oracles recount detection coverage by walking every one of the 2^n
test subsets directly, so library results are checked against a second,
independently coded route rather than against themselves.
"""

from fractions import Fraction
import math

import numpy as np

from vfkit.killmatrix import KillMatrix


def mk_matrix(rows, ce=None, problem_id="prob") -> KillMatrix:
    det = np.asarray(rows, dtype=bool)
    n, m = det.shape
    ce_flags = np.zeros(m, dtype=bool) if ce is None else np.asarray(ce, dtype=bool)
    return KillMatrix(
        problem_id=problem_id,
        detects=det,
        solution_ids=[f"s{j}" for j in range(m)],
        test_indices=list(range(n)),
        ce_flags=ce_flags,
    )


def subset_counts(det) -> tuple[list[list[int]], list[int]]:
    """Walk all 2^n subsets of tests once.

    Returns (detect_counts, cover_counts) where detect_counts[j][k] is the
    number of size-k subsets containing at least one test that detects
    solution j, and cover_counts[k] is the number of size-k subsets that
    detect every solution.
    """
    det = np.asarray(det, dtype=bool)
    n, m = det.shape
    colmasks = []
    for j in range(m):
        mask = 0
        for i in range(n):
            if det[i, j]:
                mask |= 1 << i
        colmasks.append(mask)
    detect_counts = [[0] * (n + 1) for _ in range(m)]
    cover_counts = [0] * (n + 1)
    for s in range(1 << n):
        k = bin(s).count("1")
        covered = m > 0
        for j, cm in enumerate(colmasks):
            if s & cm:
                detect_counts[j][k] += 1
            else:
                covered = False
        if covered:
            cover_counts[k] += 1
    return detect_counts, cover_counts


def oracle_dr_at_k(det, k: int) -> float:
    det = np.asarray(det, dtype=bool)
    n, m = det.shape
    detect_counts, _ = subset_counts(det)
    total = sum(Fraction(detect_counts[j][k], math.comb(n, k)) for j in range(m))
    return float(total / m)


def oracle_vacc_at_k(det, k: int) -> float:
    det = np.asarray(det, dtype=bool)
    n, _ = det.shape
    _, cover_counts = subset_counts(det)
    return float(Fraction(cover_counts[k], math.comb(n, k)))


def random_matrix(rng: np.random.Generator, n_max: int = 12, m_max: int = 8) -> KillMatrix:
    n = int(rng.integers(1, n_max + 1))
    m = int(rng.integers(1, m_max + 1))
    density = float(rng.uniform(0.05, 0.95))
    det = rng.random((n, m)) < density
    return mk_matrix(det)
