"""
Exact stationary solutions of the nonlinear Klein-Gordon equation.

In dimensionless variables a stationary field u(xi) solves
u'' - lambda u + sgn(lambda) u^3 = 0 with u(0) = u(pi) = 0. For lambda < 0 the
solutions are u = sqrt(2) a sn(w xi, k), for lambda > 0 they are
u = sqrt(2) a cn(w xi + K(k), k). Dirichlet conditions quantise the
wavenumber to 2 n K / pi, which fixes the modulus for each branch n.
"""
from __future__ import annotations

import logging
import math
from typing import Union

import numpy as np
from scipy.integrate import simpson
from scipy.optimize import brentq

from kgalerkin.core.elliptic import complete_K, jacobi_sncndn
from kgalerkin.core.spectral import project_samples, uniform_grid
from kgalerkin.utils.errors import DomainError, NoSuchBranchError
from kgalerkin.utils.objects import (
    GridFunction,
    ModeCoefficients,
    StationaryBranch,
    StationaryKind,
    StationarySolution,
)

logger = logging.getLogger(__name__)

UNBOUNDED = "unbounded"
BRACKET_EPS = 1e-10
PROFILE_POINTS = 4097
EXTRA_CN_CANDIDATES = 2


def count_branches(lam: float) -> Union[int, str]:
    """Number of nontrivial branches; ``UNBOUNDED`` for lambda > 0."""
    if lam > 0:
        return UNBOUNDED
    if lam == 0:
        return 0
    # branch n exists iff n < sqrt(|lambda|) strictly
    n = math.isqrt(int(math.floor(abs(lam))))
    while n * n >= abs(lam):
        n -= 1
    return max(n, 0)


def branch_exists(lam: float, branch_n: int) -> bool:
    if branch_n < 1 or lam == 0:
        return False
    if lam > 0:
        return True
    return branch_n * branch_n < abs(lam)


def matching_lhs_sn(k: float, lam: float) -> float:
    return math.sqrt(abs(lam) / (1.0 + k * k))


def matching_lhs_cn(q: float, lam: float) -> float:
    return math.sqrt(abs(lam) / (2.0 * q * q - 1.0))


def matching_rhs(k: float, branch_n: int) -> float:
    return 2.0 * branch_n * complete_K(k) / math.pi


def solve_modulus(lam: float, branch_n: int) -> float:
    if lam == 0:
        raise DomainError("the linear theory (lambda = 0) has no nontrivial stationary branches")
    if not branch_exists(lam, branch_n):
        raise NoSuchBranchError(f"branch n={branch_n} does not exist for lambda={lam} (needs n < sqrt(|lambda|))")

    if lam < 0:
        def mismatch(k: float) -> float:
            return matching_lhs_sn(k, lam) - matching_rhs(k, branch_n)

        lo, hi = BRACKET_EPS, 1.0 - BRACKET_EPS
    else:
        def mismatch(k: float) -> float:
            return matching_lhs_cn(k, lam) - matching_rhs(k, branch_n)

        lo, hi = 1.0 / math.sqrt(2.0) + BRACKET_EPS, 1.0 - BRACKET_EPS

    f_lo, f_hi = mismatch(lo), mismatch(hi)
    # left side decreases, right side increases: exactly one crossing when signs differ
    if f_lo > 0.0 and f_hi >= 0.0:
        raise DomainError(
            f"modulus of branch n={branch_n} at lambda={lam} lies beyond 1-{BRACKET_EPS:g}, "
            f"outside the supported range (f_hi={f_hi:.3e})"
        )
    if not (f_lo > 0.0 > f_hi):
        raise NoSuchBranchError(
            f"matching condition for lambda={lam}, n={branch_n} is not bracketed on [{lo}, {hi}] "
            f"(f_lo={f_lo:.3e}, f_hi={f_hi:.3e})"
        )
    root = brentq(mismatch, lo, hi, xtol=1e-15, rtol=4.0 * np.finfo(float).eps, maxiter=200)
    logger.debug(f"lambda={lam} n={branch_n}: modulus={root:.15f} residual={mismatch(root):.2e}")
    return float(root)


def _field(kind: StationaryKind, amplitude: float, wavenumber: float, phase: float, modulus: float, xi: np.ndarray):
    sn, cn, dn = jacobi_sncndn(wavenumber * xi + phase, modulus)
    if kind is StationaryKind.SN:
        u = math.sqrt(2.0) * amplitude * sn
        du = math.sqrt(2.0) * amplitude * wavenumber * cn * dn
    else:
        u = math.sqrt(2.0) * amplitude * cn
        du = -math.sqrt(2.0) * amplitude * wavenumber * sn * dn
    return np.asarray(u, dtype=float), np.asarray(du, dtype=float)


def build_branch(lam: float, branch_n: int) -> StationaryBranch:
    k = solve_modulus(lam, branch_n)
    if lam < 0:
        kind = StationaryKind.SN
        wavenumber = math.sqrt(abs(lam) / (1.0 + k * k))
        amplitude = math.sqrt(abs(lam) * k * k / (1.0 + k * k))
        phase = 0.0
    else:
        kind = StationaryKind.CN
        wavenumber = math.sqrt(abs(lam) / (2.0 * k * k - 1.0))
        amplitude = wavenumber * k
        phase = complete_K(k)

    # sign convention: the first nonzero Fourier coefficient (mode branch_n) is positive
    xi = uniform_grid(PROFILE_POINTS)
    u, _ = _field(kind, amplitude, wavenumber, phase, k, xi)
    leading = project_samples(xi, u, branch_n)[branch_n - 1]
    if leading < 0:
        amplitude = -amplitude

    return StationaryBranch(
        lam=lam,
        branch_n=branch_n,
        kind=kind,
        modulus=k,
        wavenumber=wavenumber,
        amplitude=amplitude,
        phase=phase,
    )


def branch_profile(b: StationaryBranch, grid: int = PROFILE_POINTS) -> tuple[GridFunction, GridFunction]:
    """Samples of the exact solution and of its xi-derivative."""
    xi = uniform_grid(grid)
    u, du = _field(b.kind, b.amplitude, b.wavenumber, b.phase, b.modulus, xi)
    return (
        GridFunction(xi=xi.tolist(), values=u.tolist()),
        GridFunction(xi=xi.tolist(), values=du.tolist()),
    )


def branch_coefficients(b: StationaryBranch, nmax: int, grid: int = PROFILE_POINTS) -> ModeCoefficients:
    if nmax < 1:
        raise DomainError("nmax must be at least 1")
    xi = uniform_grid(max(grid, 8 * nmax + 1))
    u, _ = _field(b.kind, b.amplitude, b.wavenumber, b.phase, b.modulus, xi)
    return ModeCoefficients(values=project_samples(xi, u, nmax).tolist())


def field_energy(xi: np.ndarray, u: np.ndarray, du: np.ndarray, lam: float) -> float:
    """ell^2 H / (pi^2 a^2) of a static field from its samples."""
    s = float(np.sign(lam))
    density = 0.5 * du**2 + 0.5 * lam * u**2 - 0.25 * s * u**4
    return float(simpson(density, x=xi) / math.pi - 0.25 * s * lam**2)


def branch_energy(b: StationaryBranch, grid: int = PROFILE_POINTS) -> float:
    xi = uniform_grid(grid)
    u, du = _field(b.kind, b.amplitude, b.wavenumber, b.phase, b.modulus, xi)
    return field_energy(xi, u, du, b.lam)


def trivial_energy(lam: float) -> float:
    return -0.25 * float(np.sign(lam)) * lam**2


def enumerate_solutions(lam: float, max_count: int, nmax: int) -> list[StationarySolution]:
    if max_count < 1:
        raise DomainError("max_count must be at least 1")
    if lam == 0:
        return []
    if lam < 0:
        candidates = list(range(1, int(count_branches(lam)) + 1))
    else:
        candidates = list(range(1, max_count + EXTRA_CN_CANDIDATES + 1))

    found = []
    for n in candidates:
        try:
            b = build_branch(lam, n)
        except (DomainError, NoSuchBranchError) as e:
            logger.warning(f"Skipping branch n={n}: {e}")
            continue
        found.append((b, branch_coefficients(b, nmax), branch_energy(b)))
    found.sort(key=lambda item: (abs(item[2]), item[0].branch_n))

    solutions = [
        StationarySolution(label=i, branch=b, coefficients=c, energy=e)
        for i, (b, c, e) in enumerate(found[:max_count], start=1)
    ]
    if solutions:
        logger.info(f"lambda={lam}: {len(solutions)} stationary branches, energies {[round(s.energy, 6) for s in solutions]}")
    else:
        logger.warning(f"lambda={lam}: no nontrivial stationary solutions")
    return solutions
