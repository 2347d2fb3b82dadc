import json
import logging
import os
from pathlib import Path
from typing import Any, Dict, Iterable, List, Optional, Sequence

import numpy as np
from dotenv import load_dotenv

from kgalerkin.utils.errors import InputFormatError
from kgalerkin.utils.objects import GridFunction, StateVector
from kgalerkin.utils.utils import format_number

load_dotenv()

logger = logging.getLogger(__name__)


def default_output_dir() -> Path:
    return Path(os.getenv("KG_OUTPUT_DIR", "."))


class ResultWriter:
    """Writes CSV tables and JSON summaries that share one metadata block."""

    def __init__(self, output_dir: Optional[str] = None, metadata: Optional[Dict[str, Any]] = None):
        self.output_dir = Path(output_dir) if output_dir else default_output_dir()
        self.metadata = metadata or {}
        self.output_dir.mkdir(parents=True, exist_ok=True)

    def _metadata_lines(self) -> List[str]:
        return [f"# {key}: {json.dumps(self.metadata[key], sort_keys=True)}" for key in sorted(self.metadata)]

    def write_csv(self, name: str, columns: Sequence[str], rows: Iterable[Sequence[float]]) -> Path:
        path = self.output_dir / name
        lines = self._metadata_lines()
        lines.append(",".join(columns))
        for row in rows:
            lines.append(",".join(self._cell(v) for v in row))
        path.write_text("\n".join(lines) + "\n", encoding="utf-8")
        logger.info(f"Wrote {path}")
        return path

    def write_json(self, name: str, payload: Dict[str, Any]) -> Path:
        path = self.output_dir / name
        document = {"metadata": self.metadata, **payload}
        path.write_text(json.dumps(document, indent=2, sort_keys=True) + "\n", encoding="utf-8")
        logger.info(f"Wrote {path}")
        return path

    @staticmethod
    def _cell(value: Any) -> str:
        if isinstance(value, (float, np.floating)):
            return format_number(value)
        return str(value)


def _read_table(path: Path) -> tuple[Optional[List[str]], np.ndarray]:
    if not path.exists():
        raise InputFormatError(f"file not found: {path}")
    lines = [line.strip() for line in path.read_text(encoding="utf-8").splitlines()]
    lines = [line for line in lines if line and not line.startswith("#")]
    if not lines:
        raise InputFormatError(f"{path} contains no data")
    header = None
    try:
        float(lines[0].split(",")[0])
    except ValueError:
        header = [name.strip() for name in lines[0].split(",")]
        lines = lines[1:]
    try:
        data = np.loadtxt(lines, delimiter=",", ndmin=2)
    except ValueError as e:
        raise InputFormatError(f"could not parse {path}: {e}")
    return header, data


def read_field(path: str) -> GridFunction:
    """Two-column (xi, value) CSV; the grid must be uniform on [0, pi]."""
    _, data = _read_table(Path(path))
    if data.shape[1] != 2:
        raise InputFormatError(f"{path}: expected two columns (xi, value), got {data.shape[1]}")
    xi, values = data[:, 0], data[:, 1]
    if not np.all(np.isfinite(data)):
        raise InputFormatError(f"{path}: non-finite samples")
    if len(xi) < 3 or abs(xi[0]) > 1e-9 or abs(xi[-1] - np.pi) > 1e-6:
        raise InputFormatError(f"{path}: the xi column must run from 0 to pi")
    if not np.allclose(np.diff(xi), (xi[-1] - xi[0]) / (len(xi) - 1), rtol=0.0, atol=1e-9):
        raise InputFormatError(f"{path}: the xi grid must be uniform")
    return GridFunction(xi=xi.tolist(), values=values.tolist())


def read_state(path: str) -> StateVector:
    """
    Load a state from a JSON summary written by ``evolve`` (final_A, final_V,
    final_tau) or from the last row of a trajectory CSV.
    """
    p = Path(path)
    if p.suffix == ".json":
        try:
            document = json.loads(p.read_text(encoding="utf-8"))
            return StateVector(A=document["final_A"], V=document["final_V"], tau=document.get("final_tau", 0.0))
        except (OSError, ValueError, KeyError, TypeError) as e:
            raise InputFormatError(f"could not read state from {path}: {e}")

    header, data = _read_table(p)
    if header is None:
        raise InputFormatError(f"{path}: trajectory CSV needs a header row")
    row = dict(zip(header, data[-1]))
    A = [row[c] for c in header if c.startswith("A_")]
    V = [row[c] for c in header if c.startswith("V_")]
    if not A or len(A) != len(V):
        raise InputFormatError(f"{path}: expected matching A_n and V_n columns")
    return StateVector(A=[float(a) for a in A], V=[float(v) for v in V], tau=float(row.get("tau", 0.0)))
