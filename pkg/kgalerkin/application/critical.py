"""
Critical points of the truncated potential U^(N).

Stationary solutions of the N-particle system are the zeros of grad U. They
are found by Newton iteration from a deterministic seed set, merged up to an
overall sign and ordered by |U|.
"""
from __future__ import annotations

import logging
from typing import Optional, Sequence

import numpy as np

from kgalerkin.application.dynamics import force, linear_frequencies, potential_batch, potential_U
from kgalerkin.application.stationary import (
    branch_coefficients,
    branch_profile,
    build_branch,
    count_branches,
)
from kgalerkin.core.spectral import COUPLING, synthesize
from kgalerkin.utils.errors import DomainError, NoSuchBranchError
from kgalerkin.utils.objects import Classification, CriticalPoint, StationaryBranch

logger = logging.getLogger(__name__)

GRADIENT_TOL = 1e-10
EIGEN_TOL = 1e-8
MERGE_DISTANCE = 1e-6
CONDITION_LIMIT = 1e12
DEFAULT_DRAWS = 200
DEFAULT_SEED = 12345
SEED_RANGE = 3.0
MAX_NEWTON_STEPS = 80
_ESCAPE_NORM = 1e3
_ZERO = 1e-8


def hessian(A: Sequence[float], lam: float) -> np.ndarray:
    A = np.asarray(A, dtype=float)
    sgn = float(np.sign(lam))
    H = np.diag(linear_frequencies(A.size, lam)) - 3.0 * sgn * COUPLING.quadratic(A)
    return 0.5 * (H + H.T)


def gradient(A: Sequence[float], lam: float) -> np.ndarray:
    return -force(np.asarray(A, dtype=float), lam)


def single_mode_seed(n: int, lam: float, N: Optional[int] = None) -> np.ndarray:
    """
    One-mode stationary amplitude: (n^2 + lambda) A = sgn(lambda) (3/2) A^3.

    Returns a vector of length max(n, N) that is zero when the one-mode
    equation has no real nonzero root.
    """
    if n < 1:
        raise DomainError("mode indices start at 1")
    size = max(n, N or n)
    seed = np.zeros(size)
    sgn = float(np.sign(lam))
    if sgn == 0.0:
        return seed
    square = (2.0 / 3.0) * (n * n + lam) / sgn
    if square > 0:
        seed[n - 1] = np.sqrt(square)
    return seed


def normalize_sign(A: Sequence[float]) -> np.ndarray:
    """Flip A so that its first nonzero coordinate is positive."""
    A = np.asarray(A, dtype=float).copy()
    nonzero = np.flatnonzero(np.abs(A) > _ZERO)
    if nonzero.size and A[nonzero[0]] < 0:
        A = -A
    return A


def classify(eigenvalues: Sequence[float], tol: float = EIGEN_TOL) -> Classification:
    eig = np.asarray(eigenvalues, dtype=float)
    if np.any(np.abs(eig) <= tol):
        return Classification.DEGENERATE
    if np.all(eig > tol):
        return Classification.MIN
    if np.all(eig < -tol):
        return Classification.MAX
    return Classification.SADDLE


def newton_solve(A0: np.ndarray, lam: float, max_steps: int = MAX_NEWTON_STEPS) -> Optional[np.ndarray]:
    """Newton on grad U = 0 with backtracking on |grad U|^2; None when it does not converge."""
    A = np.asarray(A0, dtype=float).copy()
    g = gradient(A, lam)
    merit = float(g @ g)
    for _ in range(max_steps):
        if np.max(np.abs(g)) <= 0.1 * GRADIENT_TOL:
            break
        H = hessian(A, lam)
        if np.linalg.cond(H) > CONDITION_LIMIT:
            step = -g
        else:
            step = np.linalg.solve(H, -g)
        alpha = 1.0
        while True:
            trial = A + alpha * step
            g_trial = gradient(trial, lam)
            merit_trial = float(g_trial @ g_trial)
            if merit_trial <= (1.0 - 1e-4 * alpha) * merit or alpha < 1e-10:
                break
            alpha *= 0.5
        if alpha < 1e-10 and merit_trial >= merit:
            return None
        A, g, merit = trial, g_trial, merit_trial
        if not np.all(np.isfinite(A)) or np.linalg.norm(A) > _ESCAPE_NORM:
            return None
    if np.max(np.abs(g)) > GRADIENT_TOL:
        return None
    return A


def _point(A: np.ndarray, lam: float, label: int) -> CriticalPoint:
    eig = np.linalg.eigvalsh(hessian(A, lam))
    return CriticalPoint(
        A=A.tolist(),
        U_value=potential_U(A, lam),
        classification=classify(eig),
        hessian_eigenvalues=eig.tolist(),
        label_i=label,
    )


def trivial_critical_point(N: int, lam: float) -> CriticalPoint:
    return _point(np.zeros(N), lam, 0)


def _branch_seeds(N: int, lam: float) -> list[np.ndarray]:
    if lam == 0:
        return []
    if lam < 0:
        indices = range(1, int(count_branches(lam)) + 1)
    else:
        indices = range(1, N + 1)
    seeds = []
    for n in indices:
        try:
            branch = build_branch(lam, n)
        except (DomainError, NoSuchBranchError) as e:
            logger.warning(f"No exact-branch seed for n={n}: {e}")
            continue
        seeds.append(branch_coefficients(branch, N).as_array())
    return seeds


def seed_set(N: int, lam: float, seed: int = DEFAULT_SEED, draws: int = DEFAULT_DRAWS) -> list[np.ndarray]:
    seeds = [single_mode_seed(n, lam, N)[:N] for n in range(1, N + 1)]
    seeds = [s for s in seeds if np.any(s != 0)]
    seeds.extend(_branch_seeds(N, lam))
    rng = np.random.default_rng(seed)
    seeds.extend(rng.uniform(-SEED_RANGE, SEED_RANGE, size=(draws, N)))
    return seeds


def find_critical_points(
    N: int,
    lam: float,
    max_points: int,
    seed: int = DEFAULT_SEED,
    draws: int = DEFAULT_DRAWS,
) -> list[CriticalPoint]:
    if N < 1:
        raise DomainError("N must be at least 1")
    if max_points < 1:
        raise DomainError("max_points must be at least 1")

    starts = seed_set(N, lam, seed=seed, draws=draws)
    found: list[np.ndarray] = []
    failures = 0
    for start in starts:
        root = newton_solve(start, lam)
        if root is None:
            failures += 1
            continue
        root = normalize_sign(root)
        if np.linalg.norm(root) <= _ZERO:
            continue
        if any(np.linalg.norm(root - other) <= MERGE_DISTANCE for other in found):
            continue
        found.append(root)

    if failures > len(starts) // 2:
        logger.warning(f"{failures} of {len(starts)} Newton starts did not converge (N={N}, lambda={lam})")
    else:
        logger.debug(f"{failures} of {len(starts)} Newton starts did not converge")

    scored = sorted(((abs(potential_U(A, lam)), tuple(A), A) for A in found), key=lambda item: item[:2])
    points = [_point(A, lam, label) for label, (_, _, A) in enumerate(scored[:max_points], start=1)]
    logger.info(f"N={N} lambda={lam}: {len(found)} distinct nontrivial critical points, kept {len(points)}")
    return points


def landscape_axes(value_range: tuple[float, float], resolution: int) -> np.ndarray:
    if resolution < 2:
        raise DomainError("landscape resolution must be at least 2")
    return np.linspace(value_range[0], value_range[1], resolution)


def landscape_grid(
    lam: float,
    a1_range: tuple[float, float],
    a3_range: tuple[float, float],
    resolution: int,
) -> np.ndarray:
    """U^(3)(A1, 0, A3) with rows indexed by A1 and columns by A3."""
    a1 = landscape_axes(a1_range, resolution)
    a3 = landscape_axes(a3_range, resolution)
    g1, g3 = np.meshgrid(a1, a3, indexing="ij")
    rows = np.column_stack([g1.ravel(), np.zeros(g1.size), g3.ravel()])
    return potential_batch(rows, lam).reshape(resolution, resolution)


def approximation_error(point: CriticalPoint, branch: StationaryBranch, grid: int = 2049) -> float:
    """Sup-norm distance between the truncated field of a critical point and an exact branch."""
    exact, _ = branch_profile(branch, grid)
    truncated = synthesize(point.A, grid)
    return float(np.max(np.abs(np.asarray(truncated.values) - np.asarray(exact.values))))
