import math
import re
from typing import Optional

from kgalerkin.utils.errors import InputFormatError
from kgalerkin.utils.objects import StateVector

_KEY = re.compile(r"^\s*([AV])\s*=\s*(.*)$")


def format_number(value: float) -> str:
    """Round-trip representation used in every output file."""
    return format(float(value), ".17g")


def parse_float_list(text: str, name: str = "values") -> list[float]:
    items = [item.strip() for item in text.split(",")]
    if not items or any(item == "" for item in items):
        raise InputFormatError(f"{name}: expected a comma-separated list of numbers, got {text!r}")
    try:
        values = [float(item) for item in items]
    except ValueError:
        raise InputFormatError(f"{name}: could not parse {text!r} as numbers")
    if not all(math.isfinite(v) for v in values):
        raise InputFormatError(f"{name}: all values must be finite")
    return values


def parse_coefficient_spec(spec: str, N: Optional[int] = None) -> StateVector:
    """
    Parse an inline state such as ``"A=1,1,-1,1"`` or ``"A=1,0;V=0,0.5"``.

    Missing velocities are zero. With ``N`` given, both vectors are padded with
    zeros (or rejected when longer than N).
    """
    parts = [p for p in spec.split(";") if p.strip()]
    if not parts:
        raise InputFormatError("empty coefficient specification")
    fields: dict[str, list[float]] = {}
    for part in parts:
        match = _KEY.match(part)
        if match is None:
            raise InputFormatError(f"expected 'A=...' or 'V=...', got {part.strip()!r}")
        key, body = match.groups()
        if key in fields:
            raise InputFormatError(f"{key} given twice")
        fields[key] = parse_float_list(body, key)
    if "A" not in fields:
        raise InputFormatError("coefficient specification needs positions 'A=...'")

    A = fields["A"]
    V = fields.get("V", [0.0] * len(A))
    size = N if N is not None else max(len(A), len(V))
    for key, values in (("A", A), ("V", V)):
        if len(values) > size:
            raise InputFormatError(f"{key} has {len(values)} entries but N={size}")
    return StateVector(A=A + [0.0] * (size - len(A)), V=V + [0.0] * (size - len(V)))


def resize_state(state: StateVector, N: int) -> StateVector:
    """Zero-pad a state to N modes; dropping nonzero modes is an input error."""
    if N < state.N and any(abs(a) > 0 or abs(v) > 0 for a, v in zip(state.A[N:], state.V[N:])):
        raise InputFormatError(f"state has nonzero modes beyond N={N}")
    A = (state.A + [0.0] * N)[:N]
    V = (state.V + [0.0] * N)[:N]
    return StateVector(A=A, V=V, tau=state.tau)
