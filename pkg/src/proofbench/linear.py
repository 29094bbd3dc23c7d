"""Linear integral inequalities ``a^T z >= b`` over 0/1 variables."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping

from .errors import ScopeError


@dataclass(frozen=True)
class LinearInequality:
    """Integer coefficient vector plus an integer right-hand side."""

    coeffs: tuple[int, ...]
    constant: int

    @property
    def n(self) -> int:
        return len(self.coeffs)

    @property
    def weight(self) -> int:
        """Largest absolute value among coefficients and the constant."""
        best = abs(self.constant)
        for c in self.coeffs:
            if abs(c) > best:
                best = abs(c)
        return best

    def lhs_value(self, bits: Mapping[int, int]) -> int:
        """Evaluate ``a^T z`` given variable values (1-based indices)."""
        total = 0
        for i, c in enumerate(self.coeffs, start=1):
            if c == 0:
                continue
            try:
                total += c * bits[i]
            except KeyError:
                raise ScopeError(f"variable {i} has a nonzero coefficient but no value")
        return total

    def holds(self, bits: Mapping[int, int]) -> bool:
        return self.lhs_value(bits) >= self.constant

    def plus(self, other: "LinearInequality") -> "LinearInequality":
        """Coefficient-wise sum, the expected conclusion of an addition step."""
        if len(self.coeffs) != len(other.coeffs):
            raise ValueError("cannot add inequalities of different arity")
        coeffs = tuple(a + b for a, b in zip(self.coeffs, other.coeffs))
        return LinearInequality(coeffs, self.constant + other.constant)

    def divided_by(self, divisor: int) -> "LinearInequality":
        """Exact coefficient division with the constant rounded up.

        Requires ``divisor`` to divide every coefficient.
        """
        if divisor <= 0:
            raise ValueError("divisor must be a positive integer")
        for c in self.coeffs:
            if c % divisor != 0:
                raise ValueError(f"{divisor} does not divide coefficient {c}")
        coeffs = tuple(c // divisor for c in self.coeffs)
        constant = -((-self.constant) // divisor)
        return LinearInequality(coeffs, constant)

    def is_zero_lhs(self) -> bool:
        return all(c == 0 for c in self.coeffs)
