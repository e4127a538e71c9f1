"""Constraint-text range parsing and the built-in input sampler."""

import pytest

from vfkit.tcg.sampler import (
    ConstraintParseError,
    RangeClause,
    parse_constraints,
    sample_inputs,
    validates,
)


class TestParsing:
    def test_single_clause_two_variables(self):
        clauses = parse_constraints("-1000 <= a, b <= 1000")
        assert clauses == [RangeClause(lo=-1000, variables=("a", "b"), hi=1000)]

    def test_multiline_clauses(self):
        clauses = parse_constraints("1 <= n <= 50\n-100 <= a_i <= 100")
        assert len(clauses) == 2
        assert clauses[0].variables == ("n",)
        assert clauses[1].variables == ("a_i",)

    def test_unicode_relation_sign(self):
        clauses = parse_constraints("0 ≤ x ≤ 9")
        assert clauses == [RangeClause(lo=0, variables=("x",), hi=9)]

    def test_clause_embedded_in_prose(self):
        clauses = parse_constraints("two integers with 1 <= k <= 5 per query")
        assert clauses[0].lo == 1 and clauses[0].hi == 5

    def test_empty_range_rejected(self):
        with pytest.raises(ConstraintParseError, match="empty range"):
            parse_constraints("5 <= x <= 3")

    def test_no_clause_rejected(self):
        with pytest.raises(ConstraintParseError, match="script-based"):
            parse_constraints("1 <= w <= 20 words per line of lowercase letters"
                              .replace("<=", "under"))  # no parsable relation


class TestSampling:
    def test_shape_and_ranges(self):
        inputs = sample_inputs("-5 <= a, b <= 5\n0 <= c <= 1", n=50, seed=1)
        assert len(inputs) == 50
        for blob in inputs:
            lines = blob.decode().splitlines()
            assert len(lines) == 2
            a, b = map(int, lines[0].split())
            (c,) = map(int, lines[1].split())
            assert -5 <= a <= 5 and -5 <= b <= 5
            assert 0 <= c <= 1

    def test_deterministic_per_seed(self):
        text = "-10 <= a, b <= 10"
        assert sample_inputs(text, 10, seed=4) == sample_inputs(text, 10, seed=4)
        assert sample_inputs(text, 10, seed=4) != sample_inputs(text, 10, seed=5)

    def test_zero_samples(self):
        assert sample_inputs("1 <= x <= 2", 0, seed=0) == []
        with pytest.raises(ValueError):
            sample_inputs("1 <= x <= 2", -1, seed=0)

    def test_own_samples_validate(self):
        text = "1 <= n <= 9\n-3 <= p, q <= 3"
        for blob in sample_inputs(text, 30, seed=7):
            assert validates(text, blob)


class TestValidation:
    TEXT = "-10 <= a, b <= 10"

    def test_accepts_in_range(self):
        assert validates(self.TEXT, b"3 -7\n")

    def test_rejects_out_of_range(self):
        assert not validates(self.TEXT, b"3 -700\n")

    def test_rejects_wrong_arity(self):
        assert not validates(self.TEXT, b"3\n")
        assert not validates(self.TEXT, b"3 4 5\n")
        assert not validates(self.TEXT, b"3 4\nextra\n")

    def test_rejects_non_integers(self):
        assert not validates(self.TEXT, b"a b\n")
        assert not validates(self.TEXT, b"\xff\xfe\n")
