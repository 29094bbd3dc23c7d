"""Gate records and the immutable monotone circuit container."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union


@dataclass(frozen=True)
class InputGate:
    """Truth-table variable: entry ``alpha`` of constraint ``constraint`` (1-based)."""

    constraint: int
    alpha: tuple[int, ...]


@dataclass(frozen=True)
class ConstGate:
    bit: int


@dataclass(frozen=True)
class AndGate:
    left: int
    right: int


@dataclass(frozen=True)
class OrGate:
    left: int
    right: int


Gate = Union[InputGate, ConstGate, AndGate, OrGate]


@dataclass(frozen=True)
class MonotoneCircuit:
    """AND/OR DAG in topological order with a designated output gate."""

    gates: tuple[Gate, ...]
    output: int

    def __post_init__(self):
        if not 0 <= self.output < len(self.gates):
            raise ValueError("output gate index out of range")
        for idx, gate in enumerate(self.gates):
            if isinstance(gate, (AndGate, OrGate)):
                if not (0 <= gate.left < idx and 0 <= gate.right < idx):
                    raise ValueError(f"gate {idx} references a later gate")
            elif isinstance(gate, ConstGate) and gate.bit not in (0, 1):
                raise ValueError(f"gate {idx} has a non-boolean constant")

    @property
    def gate_count(self) -> int:
        return len(self.gates)
