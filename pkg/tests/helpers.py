"""Independent oracles for the test suite.

Everything here deliberately avoids the library's own code paths: clause
checks are bitmask comparisons over enumerated assignments, satisfiability is
pure enumeration, rationals are handled as raw numerator/denominator pairs.
"""

from __future__ import annotations

import math
import random
from itertools import product

from proofbench.cnf import Assignment, CnfFormula


def clause_bitmasks(formula: CnfFormula) -> list[tuple[int, int]]:
    """(mask, falsifying pattern) per clause; assignment bit v-1 is var v."""
    out = []
    for clause in formula.clauses:
        mask = pattern = 0
        for lit in clause.literals:
            bit = 1 << (lit.var - 1)
            mask |= bit
            if lit.negated:
                pattern |= bit
        out.append((mask, pattern))
    return out


def satisfies_all(alpha: int, masks: list[tuple[int, int]]) -> bool:
    return all(alpha & mask != pattern for mask, pattern in masks)


def exhaustive_sat(formula: CnfFormula) -> Assignment | None:
    """Enumerate assignments in lexicographic order of (x1, x2, ...)."""
    masks = clause_bitmasks(formula)
    n = formula.n
    for lex in range(1 << n):
        # lex order over the tuple (bit of var 1, bit of var 2, ...)
        alpha = 0
        for v in range(n):
            if (lex >> (n - 1 - v)) & 1:
                alpha |= 1 << v
        if satisfies_all(alpha, masks):
            return Assignment.from_map(
                {v + 1: (alpha >> v) & 1 for v in range(n)}
            )
    return None


def count_satisfying(formula: CnfFormula) -> int:
    masks = clause_bitmasks(formula)
    return sum(
        1 for alpha in range(1 << formula.n) if satisfies_all(alpha, masks)
    )


def random_formula(
    rng: random.Random, n: int, m: int, max_width: int = 3
) -> CnfFormula:
    """Arbitrary-width random formula, independent of the library sampler."""
    from proofbench.cnf import Clause, Literal

    clauses = []
    for _ in range(m):
        width = rng.randint(1, min(n, max_width))
        variables = rng.sample(range(1, n + 1), width)
        lits = tuple(
            Literal(v, rng.random() < 0.5) for v in sorted(variables)
        )
        clauses.append(Clause(lits))
    return CnfFormula(n, tuple(clauses))


# --- raw rational arithmetic (numerator, denominator) -----------------------


def rat(num: int, den: int) -> tuple[int, int]:
    if den == 0:
        raise ZeroDivisionError
    if den < 0:
        num, den = -num, -den
    g = math.gcd(num, den) or 1
    return num // g, den // g


def rat_min(a: tuple[int, int], b: tuple[int, int]) -> tuple[int, int]:
    return a if a[0] * b[1] <= b[0] * a[1] else b


def rat_max(a: tuple[int, int], b: tuple[int, int]) -> tuple[int, int]:
    return a if a[0] * b[1] >= b[0] * a[1] else b


def separator_bound_oracle(
    u_size: int, v_size: int, a1_1: int, a1_r: int, a0_s: int, r: int, s: int
) -> tuple[int, int]:
    """Same bound as the library, computed over raw num/den pairs."""
    first = rat(u_size - 2 * s * a1_1, (2 * s) ** (r + 1) * a1_r)
    second = rat(v_size, (2 * r) ** (s + 1) * a0_s)
    return rat_max((0, 1), rat_min(first, second))


# --- protocol oracle ----------------------------------------------------------


def good_histories_oracle(tree, line, part) -> list[str]:
    """Group every input pair by its run history, then test 0-monochromaticity
    with a double loop; histories reached by nobody count as good.
    """
    from proofbench.protocol import run_protocol

    reached: dict[str, list[tuple[int, int]]] = {}
    for x_idx in range(1 << part.n1):
        for y_idx in range(1 << part.n2):
            h, _ = run_protocol(
                tree, part.x_assignment(x_idx), part.y_assignment(y_idx)
            )
            reached.setdefault(h, []).append((x_idx, y_idx))
    goods = []
    for bits in product("01", repeat=tree.depth):
        h = "".join(bits)
        pairs = reached.get(h, [])
        if all(line.value(x, y) == 0 for x, y in pairs):
            goods.append(h)
    return goods
