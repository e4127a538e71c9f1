"""Built-in random input sampler driven by the constraint text.

Understands flat integer range clauses of the form ``lo <= a, b <= hi``
(ASCII ``<=`` or the unicode relation sign), one clause per line of the
generated input, variables space-separated in clause order.  That covers
problems whose input is a fixed tuple of bounded integers; anything with
variable-length structure needs a script-based generator instead.
"""

from __future__ import annotations

import random
import re
from dataclasses import dataclass

_CLAUSE_RE = re.compile(
    r"(-?\d+)\s*(?:<=|≤)\s*"
    r"([A-Za-z_][A-Za-z0-9_]*(?:\s*,\s*[A-Za-z_][A-Za-z0-9_]*)*)"
    r"\s*(?:<=|≤)\s*(-?\d+)"
)


@dataclass(frozen=True)
class RangeClause:
    lo: int
    variables: tuple[str, ...]
    hi: int


class ConstraintParseError(ValueError):
    pass


def parse_constraints(constraints_text: str) -> list[RangeClause]:
    clauses = []
    for m in _CLAUSE_RE.finditer(constraints_text):
        lo, names, hi = int(m.group(1)), m.group(2), int(m.group(3))
        if lo > hi:
            raise ConstraintParseError(f"empty range {lo}..{hi} in constraints")
        variables = tuple(v.strip() for v in names.split(","))
        clauses.append(RangeClause(lo=lo, variables=variables, hi=hi))
    if not clauses:
        raise ConstraintParseError(
            "no integer range clauses found in constraint text; "
            "use a script-based generator for this problem"
        )
    return clauses


def sample_inputs(constraints_text: str, n: int, seed: int) -> list[bytes]:
    """n pseudo-random inputs, each one line per clause."""
    if n < 0:
        raise ValueError("n must be >= 0")
    clauses = parse_constraints(constraints_text)
    rng = random.Random(seed)
    out = []
    for _ in range(n):
        lines = []
        for clause in clauses:
            values = [rng.randint(clause.lo, clause.hi) for _ in clause.variables]
            lines.append(" ".join(str(v) for v in values))
        out.append(("\n".join(lines) + "\n").encode("ascii"))
    return out


def validates(constraints_text: str, candidate: bytes) -> bool:
    """Cheap structural re-check of a sampled input against the clauses."""
    try:
        clauses = parse_constraints(constraints_text)
        lines = candidate.decode("ascii").splitlines()
    except (ConstraintParseError, UnicodeDecodeError):
        return False
    if len(lines) != len(clauses):
        return False
    for clause, line in zip(clauses, lines):
        parts = line.split()
        if len(parts) != len(clause.variables):
            return False
        try:
            values = [int(p) for p in parts]
        except ValueError:
            return False
        if any(not clause.lo <= v <= clause.hi for v in values):
            return False
    return True
