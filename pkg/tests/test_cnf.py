import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from helpers import exhaustive_sat, random_formula
from proofbench.cnf import (
    Assignment,
    Clause,
    CnfFormula,
    Literal,
    VariablePartition,
    brute_force_sat,
    clause_to_inequality,
    eval_clause,
    parse_dimacs,
    search_violation,
    serialize_dimacs,
)
from proofbench.errors import (
    CapExceededError,
    DimacsError,
    NoViolationError,
    ScopeError,
)

COMPLETE_2CNF = "p cnf 2 4\n1 2 0\n1 -2 0\n-1 2 0\n-1 -2 0\n"


def complete_2cnf() -> CnfFormula:
    return parse_dimacs(COMPLETE_2CNF)


@st.composite
def formulas(draw, max_n=6, max_m=8, max_width=3):
    n = draw(st.integers(1, max_n))
    m = draw(st.integers(1, max_m))
    clauses = []
    for _ in range(m):
        variables = draw(
            st.sets(st.integers(1, n), min_size=1, max_size=min(n, max_width))
        )
        signs = draw(
            st.lists(
                st.booleans(), min_size=len(variables), max_size=len(variables)
            )
        )
        clauses.append(
            Clause(tuple(Literal(v, s) for v, s in zip(sorted(variables), signs)))
        )
    return CnfFormula(n, tuple(clauses))


class TestParsing:
    def test_basic(self):
        f = parse_dimacs("p cnf 2 2\n1 -2 0\n-1 2 0")
        assert f.n == 2 and f.m == 2
        assert f.clauses[0].signed() == (1, -2)
        assert f.clauses[1].signed() == (-1, 2)

    def test_repeated_variable_rejected(self):
        with pytest.raises(DimacsError, match="line 2"):
            parse_dimacs("p cnf 1 1\n1 -1 0")

    def test_literal_out_of_range(self):
        with pytest.raises(DimacsError, match="out of range"):
            parse_dimacs("p cnf 2 1\n3 0")

    def test_count_mismatch(self):
        with pytest.raises(DimacsError, match="declares 2"):
            parse_dimacs("p cnf 2 2\n1 0\n")

    def test_comments_and_whitespace(self):
        f = parse_dimacs("c hello\np cnf 1 1\nc mid\n1 0   \n")
        assert f.m == 1

    def test_missing_header(self):
        with pytest.raises(DimacsError):
            parse_dimacs("1 0\n")

    def test_unterminated_clause(self):
        with pytest.raises(DimacsError, match="unterminated"):
            parse_dimacs("p cnf 2 1\n1 2\n")

    @settings(max_examples=60)
    @given(formulas())
    def test_roundtrip_identity(self, f):
        again = parse_dimacs(serialize_dimacs(f))
        assert again.n == f.n
        assert again.clauses == f.clauses


class TestEvalAndEncoding:
    def test_eval_clause_examples(self):
        c = Clause.from_signed([1, -2])
        assert eval_clause(c, Assignment.from_map({1: 1, 2: 1})) is True
        assert eval_clause(c, Assignment.from_map({1: 0, 2: 1})) is False
        assert eval_clause(Clause.from_signed([-1]), Assignment.from_map({1: 0}))

    def test_eval_out_of_scope(self):
        with pytest.raises(ScopeError):
            eval_clause(Clause.from_signed([1, 2]), Assignment.from_map({1: 0}))

    def test_encoding_examples(self):
        ineq = clause_to_inequality(Clause.from_signed([1, -2]), 2)
        assert ineq.coeffs == (1, -1) and ineq.constant == 0
        ineq = clause_to_inequality(Clause.from_signed([1]), 1)
        assert ineq.coeffs == (1,) and ineq.constant == 1
        ineq = clause_to_inequality(Clause.from_signed([-1, -2]), 2)
        assert ineq.coeffs == (-1, -1) and ineq.constant == -1

    @settings(max_examples=80)
    @given(formulas(max_n=8, max_m=3, max_width=8))
    def test_clause_iff_inequality(self, f):
        # a clause and its encoding agree on every total assignment
        for clause in f.clauses:
            ineq = clause_to_inequality(clause, f.n)
            for idx in range(1 << f.n):
                a = Assignment.from_index(tuple(range(1, f.n + 1)), idx)
                assert eval_clause(clause, a) == ineq.holds(a.as_map())


class TestBruteForce:
    def test_contradiction(self):
        assert brute_force_sat(parse_dimacs("p cnf 1 2\n1 0\n-1 0\n")) is None

    def test_lexicographic_witness(self):
        w = brute_force_sat(parse_dimacs("p cnf 2 1\n1 2 0\n"))
        assert w == Assignment.from_map({1: 0, 2: 1})

    def test_complete_2cnf_unsat(self):
        assert brute_force_sat(complete_2cnf()) is None

    def test_cap(self):
        f = CnfFormula(30, (Clause.from_signed([1]),))
        with pytest.raises(CapExceededError):
            brute_force_sat(f)

    def test_against_enumeration_oracle(self):
        rng = random.Random(1234)
        for _ in range(60):
            n = rng.randint(1, 9)
            f = random_formula(rng, n, rng.randint(1, 4 * n))
            expected = exhaustive_sat(f)
            got = brute_force_sat(f)
            if expected is None:
                assert got is None
            else:
                # the solver promises the lexicographically least witness
                assert got == expected

    def test_oracle_agreement_at_larger_sizes(self):
        rng = random.Random(5150)
        for n in (12, 14):
            for _ in range(3):
                f = random_formula(rng, n, rng.randint(2 * n, 4 * n))
                expected = exhaustive_sat(f)
                got = brute_force_sat(f)
                assert (got is None) == (expected is None)
                if expected is not None:
                    assert got == expected

    def test_witness_satisfies(self):
        rng = random.Random(99)
        for _ in range(40):
            f = random_formula(rng, 6, 8)
            w = brute_force_sat(f)
            if w is not None:
                assert all(eval_clause(c, w) for c in f.clauses)


class TestSearchViolation:
    def test_examples(self):
        f = complete_2cnf()
        part = VariablePartition((1,), (2,))
        x0, y0 = Assignment.from_map({1: 0}), Assignment.from_map({2: 0})
        x1, y1 = Assignment.from_map({1: 1}), Assignment.from_map({2: 1})
        assert search_violation(f, part, x0, y0) == 1
        assert search_violation(f, part, x1, y1) == 4

    def test_no_violation(self):
        f = parse_dimacs("p cnf 2 1\n1 2 0\n")
        part = VariablePartition((1,), (2,))
        with pytest.raises(NoViolationError):
            search_violation(
                f, part, Assignment.from_map({1: 1}), Assignment.from_map({2: 0})
            )

    def test_returns_smallest_index(self):
        rng = random.Random(7)
        for _ in range(30):
            f = random_formula(rng, 6, 10)
            part = VariablePartition.alternating(6)
            x = part.x_assignment(rng.randrange(1 << part.n1))
            y = part.y_assignment(rng.randrange(1 << part.n2))
            joint = x.union(y)
            falsified = [
                i
                for i, c in enumerate(f.clauses, start=1)
                if not eval_clause(c, joint)
            ]
            if falsified:
                assert search_violation(f, part, x, y) == falsified[0]
            else:
                with pytest.raises(NoViolationError):
                    search_violation(f, part, x, y)


class TestStructures:
    def test_clause_invariants(self):
        with pytest.raises(ValueError):
            Clause(())
        with pytest.raises(ValueError):
            Clause.from_signed([1, -1])

    def test_partition_invariants(self):
        with pytest.raises(ValueError):
            VariablePartition((1, 2), (2, 3))
        with pytest.raises(ValueError):
            VariablePartition((1,), (3,))
        part = VariablePartition.alternating(5)
        assert part.xvars == (1, 3, 5) and part.yvars == (2, 4)

    def test_assignment_index_roundtrip(self):
        variables = (2, 5, 7)
        for idx in range(8):
            a = Assignment.from_index(variables, idx)
            assert a.to_index(variables) == idx

    def test_density_and_width(self):
        f = complete_2cnf()
        assert f.density == 2
        assert f.width == 2
