"""
Galerkin residual of a truncated state.

The cube of a field with modes up to N lives exactly in modes 1..3N. The local
residual is the magnitude of the part the truncation drops (modes N+1..3N);
the total residual is its mean over [0, pi]. Neither depends on lambda.
"""
from __future__ import annotations

import logging
import math
from typing import Optional

import numpy as np
from scipy.integrate import simpson

from kgalerkin.core.spectral import COUPLING, sine_matrix, uniform_grid
from kgalerkin.utils.errors import ResolutionError
from kgalerkin.utils.objects import GridFunction, ResidualReport, StateVector

logger = logging.getLogger(__name__)

INTERVALS_PER_MODE = 48
MIN_INTERVALS_PER_MODE = 24


def default_grid(N: int) -> int:
    """48 N intervals, so every multiple of pi/(3N) is a grid node."""
    return INTERVALS_PER_MODE * N + 1


def _tail(s: StateVector) -> np.ndarray:
    """Coefficients c_q, q = N+1..3N, of the cube of the synthesized field."""
    N = s.N
    return COUPLING.cubic(s.positions(), 3 * N)[N:]


def local_residual(s: StateVector, grid: Optional[int] = None, lam: Optional[float] = None) -> GridFunction:
    """|sum_{N<q<=3N} c_q sqrt(2) sin(q xi)| sampled on ``grid`` points; lambda is accepted but unused."""
    N = s.N
    points = grid or default_grid(N)
    if points - 1 < MIN_INTERVALS_PER_MODE * N:
        raise ResolutionError(
            f"residual grid of {points} points is too coarse for N={N} (needs >= {MIN_INTERVALS_PER_MODE * N + 1})"
        )
    xi = uniform_grid(points)
    values = np.abs(sine_matrix(xi, 3 * N)[:, N:] @ _tail(s))
    values[0] = 0.0
    values[-1] = 0.0
    return GridFunction(xi=xi.tolist(), values=values.tolist())


def total_residual(s: StateVector, grid: Optional[int] = None, lam: Optional[float] = None) -> float:
    xi, values = local_residual(s, grid, lam).as_arrays()
    return float(simpson(values, x=xi) / math.pi)


def residual_report(s: StateVector, grid: Optional[int] = None, lam: Optional[float] = None) -> ResidualReport:
    local = local_residual(s, grid, lam)
    xi, values = local.as_arrays()
    total = max(float(simpson(values, x=xi) / math.pi), 0.0)
    logger.info(f"Residual at tau={s.tau:.6g}, N={s.N}: total {total:.6e}")
    return ResidualReport(local=local, total=total, tau=s.tau, N=s.N)
