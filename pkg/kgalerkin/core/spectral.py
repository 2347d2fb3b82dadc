"""
Dirichlet sine basis on [0, pi] and the quartic coupling tensor.

In dimensionless form the modes are sqrt(2) sin(n xi) (that is sqrt(ell) phi_n)
and they are orthonormal for the inner product (1/pi) int_0^pi . dxi. The
coupling D_nmpq = ell int phi_n phi_m phi_p phi_q dx has the closed form

    D = c(|n-m|) (d[|n-m|,|p-q|] - d[|n-m|,p+q]) - c(n+m) (d[n+m,|p-q|] - d[n+m,p+q])

with c(0) = 1 and c(j) = 1/2 otherwise; c carries the 1/(ell N_j^2) factor of
the normalisation constants, including N_0 = 1/sqrt(ell).
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Optional, Sequence, Union

import numpy as np
from scipy.integrate import simpson

from kgalerkin.utils.errors import DomainError, ResolutionError
from kgalerkin.utils.objects import GridFunction, ModeCoefficients

logger = logging.getLogger(__name__)

SQRT2 = math.sqrt(2.0)
POINTS_PER_MODE = 8
_XI_TOL = 1e-12


def _check_index(*indices: int) -> None:
    for i in indices:
        if int(i) != i or i < 1:
            raise DomainError(f"mode indices start at 1, got {i!r}")


def mode_value(n: int, xi: Union[float, np.ndarray]) -> Union[float, np.ndarray]:
    _check_index(n)
    xi_arr = np.asarray(xi, dtype=float)
    if np.any(xi_arr < -_XI_TOL) or np.any(xi_arr > math.pi + _XI_TOL):
        raise DomainError("xi must lie in [0, pi]")
    values = SQRT2 * np.sin(n * xi_arr)
    if xi_arr.ndim == 0:
        return float(values)
    return values


def uniform_grid(points: int) -> np.ndarray:
    if points < 2:
        raise ResolutionError(f"a grid needs at least 2 points, got {points}")
    return np.linspace(0.0, math.pi, points)


def sine_matrix(xi: np.ndarray, N: int) -> np.ndarray:
    """S[j, n-1] = sqrt(2) sin(n xi_j)."""
    return SQRT2 * np.sin(np.outer(xi, np.arange(1, N + 1)))


def synthesize(A: Union[ModeCoefficients, Sequence[float], np.ndarray], grid: int) -> GridFunction:
    coeffs = A.as_array() if isinstance(A, ModeCoefficients) else np.asarray(A, dtype=float)
    xi = uniform_grid(grid)
    u = sine_matrix(xi, len(coeffs)) @ coeffs
    # Dirichlet: sin(n pi) is only zero up to rounding
    u[0] = 0.0
    u[-1] = 0.0
    return GridFunction(xi=xi.tolist(), values=u.tolist())


def project_samples(xi: np.ndarray, u: np.ndarray, N: int) -> np.ndarray:
    """Composite Simpson projection of samples on a uniform [0, pi] grid."""
    G = len(xi) - 1
    if G < POINTS_PER_MODE * N:
        raise ResolutionError(f"grid with {G} intervals cannot resolve {N} modes (need >= {POINTS_PER_MODE * N})")
    if abs(xi[0]) > _XI_TOL or abs(xi[-1] - math.pi) > 1e-9:
        raise DomainError("projection grid must span [0, pi]")
    integrand = sine_matrix(xi, N) * u[:, None]
    return simpson(integrand, x=xi, axis=0) / math.pi


def project(u: GridFunction, N: int) -> ModeCoefficients:
    xi, values = u.as_arrays()
    return ModeCoefficients(values=project_samples(xi, values, N).tolist())


def _c(j: np.ndarray) -> np.ndarray:
    return np.where(j == 0, 1.0, 0.5)


def _closed_form(n, m, p, q):
    d1, s1 = np.abs(n - m), n + m
    d2, s2 = np.abs(p - q), p + q
    first = _c(d1) * ((d1 == d2).astype(float) - (d1 == s2).astype(float))
    second = 0.5 * ((s1 == d2).astype(float) - (s1 == s2).astype(float))
    return first - second


@dataclass(frozen=True)
class SparseCoupling:
    """Nonzero entries of D with i, j, k < n_max and l < q_max (0-based)."""

    i: np.ndarray
    j: np.ndarray
    k: np.ndarray
    l: np.ndarray
    values: np.ndarray
    n_max: int
    q_max: int

    @property
    def nnz(self) -> int:
        return int(self.values.size)


@lru_cache(maxsize=16)
def _dense_table(n_max: int, q_max: int) -> np.ndarray:
    idx = np.arange(1, n_max + 1)
    qdx = np.arange(1, q_max + 1)
    table = _closed_form(
        idx[:, None, None, None], idx[None, :, None, None], idx[None, None, :, None], qdx[None, None, None, :]
    )
    table.setflags(write=False)
    return table


@lru_cache(maxsize=16)
def _sparse_table(n_max: int, q_max: int) -> SparseCoupling:
    idx = np.arange(1, n_max + 1)
    qdx = np.arange(1, q_max + 1)
    parts: list[tuple[np.ndarray, ...]] = []
    # selection rule: only slabs' nonzeros are kept, one first index at a time
    for n in idx:
        slab = _closed_form(n, idx[:, None, None], idx[None, :, None], qdx[None, None, :])
        j, k, l = np.nonzero(slab)
        parts.append((np.full(j.shape, n - 1), j, k, l, slab[j, k, l]))
    i, j, k, l, values = (np.concatenate(col) for col in zip(*parts))
    for arr in (i, j, k, l, values):
        arr.setflags(write=False)
    logger.debug(f"Sparse coupling table n_max={n_max} q_max={q_max}: {values.size} nonzeros")
    return SparseCoupling(i=i, j=j, k=k, l=l, values=values, n_max=n_max, q_max=q_max)


class CouplingTensor:
    """
    Evaluator of D_nmpq.

    The closed form is the source of truth; ``dense`` and ``sparse`` are cached,
    read-only tables derived from it for the force and residual loops.
    """

    def __call__(self, n: int, m: int, p: int, q: int) -> float:
        _check_index(n, m, p, q)
        return float(_closed_form(np.int64(n), np.int64(m), np.int64(p), np.int64(q)))

    def dense(self, n_max: int, q_max: Optional[int] = None) -> np.ndarray:
        return _dense_table(int(n_max), int(q_max or n_max))

    def sparse(self, n_max: int, q_max: Optional[int] = None) -> SparseCoupling:
        return _sparse_table(int(n_max), int(q_max or n_max))

    def cubic(self, A: np.ndarray, q_max: Optional[int] = None) -> np.ndarray:
        """c_q = sum_{nmp <= N} D_nmpq A_n A_m A_p for q = 1..q_max."""
        A = np.asarray(A, dtype=float)
        q_max = int(q_max or A.size)
        table = self.sparse(A.size, q_max)
        weights = table.values * A[table.i] * A[table.j] * A[table.k]
        return np.bincount(table.l, weights=weights, minlength=q_max)

    def quadratic(self, A: np.ndarray) -> np.ndarray:
        """M_nk = sum_{pq} D_nkpq A_p A_q."""
        A = np.asarray(A, dtype=float)
        N = A.size
        table = self.sparse(N)
        weights = table.values * A[table.i] * A[table.j]
        return np.bincount(table.k * N + table.l, weights=weights, minlength=N * N).reshape(N, N)

    def quartic(self, A: np.ndarray) -> float:
        """sum_{nmpq} D_nmpq A_n A_m A_p A_q."""
        A = np.asarray(A, dtype=float)
        return float(A @ self.cubic(A))


COUPLING = CouplingTensor()


def coupling(n: int, m: int, p: int, q: int) -> float:
    return COUPLING(n, m, p, q)
