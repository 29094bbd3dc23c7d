"""Line-oriented circuit files.

One gate per line, ``g<idx> = in <constraint> <alpha-bits> | and g<j> g<k> |
or g<j> g<k> | const0 | const1``, closed by ``output g<idx>``. An empty
alpha (a constraint reading no variables) is written as ``-``.
"""

from __future__ import annotations

from .errors import CircuitTextError
from .gates import AndGate, ConstGate, Gate, InputGate, MonotoneCircuit, OrGate


def serialize_circuit(circuit: MonotoneCircuit) -> str:
    lines = []
    for idx, gate in enumerate(circuit.gates):
        if isinstance(gate, InputGate):
            alpha = "".join(str(b) for b in gate.alpha) or "-"
            body = f"in {gate.constraint} {alpha}"
        elif isinstance(gate, ConstGate):
            body = f"const{gate.bit}"
        elif isinstance(gate, AndGate):
            body = f"and g{gate.left} g{gate.right}"
        else:
            body = f"or g{gate.left} g{gate.right}"
        lines.append(f"g{idx} = {body}")
    lines.append(f"output g{circuit.output}")
    return "\n".join(lines) + "\n"


def _gate_ref(token: str, line_no: int) -> int:
    if not token.startswith("g"):
        raise CircuitTextError(line_no, f"expected a gate reference, got {token!r}")
    try:
        return int(token[1:])
    except ValueError:
        raise CircuitTextError(line_no, f"bad gate reference {token!r}")


def parse_circuit(text: str) -> MonotoneCircuit:
    gates: list[Gate] = []
    output: int | None = None
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if line.startswith("output"):
            tokens = line.split()
            if len(tokens) != 2:
                raise CircuitTextError(line_no, "malformed output line")
            output = _gate_ref(tokens[1], line_no)
            continue
        head, _, body = line.partition("=")
        head = head.strip()
        if not head.startswith("g") or not body:
            raise CircuitTextError(line_no, f"malformed gate line {line!r}")
        idx = _gate_ref(head, line_no)
        if idx != len(gates):
            raise CircuitTextError(line_no, f"expected gate index {len(gates)}")
        tokens = body.split()
        kind = tokens[0]
        if kind == "in" and len(tokens) == 3:
            try:
                constraint = int(tokens[1])
            except ValueError:
                raise CircuitTextError(line_no, f"bad constraint {tokens[1]!r}")
            alpha_text = tokens[2]
            if alpha_text == "-":
                alpha: tuple[int, ...] = ()
            elif set(alpha_text) <= {"0", "1"}:
                alpha = tuple(int(ch) for ch in alpha_text)
            else:
                raise CircuitTextError(line_no, f"bad alpha bits {alpha_text!r}")
            gates.append(InputGate(constraint, alpha))
        elif kind == "and" and len(tokens) == 3:
            gates.append(
                AndGate(_gate_ref(tokens[1], line_no), _gate_ref(tokens[2], line_no))
            )
        elif kind == "or" and len(tokens) == 3:
            gates.append(
                OrGate(_gate_ref(tokens[1], line_no), _gate_ref(tokens[2], line_no))
            )
        elif kind == "const0" and len(tokens) == 1:
            gates.append(ConstGate(0))
        elif kind == "const1" and len(tokens) == 1:
            gates.append(ConstGate(1))
        else:
            raise CircuitTextError(line_no, f"unknown gate form {body.strip()!r}")
    if output is None:
        raise CircuitTextError(1, "missing output line")
    try:
        return MonotoneCircuit(tuple(gates), output)
    except ValueError as exc:
        raise CircuitTextError(1, str(exc))
