"""
The truncated N-particle system.

Positions A_n and velocities V_n = dA_n/dtau evolve under
A_n'' = -(n^2 + lambda) A_n + sgn(lambda) sum_{mpq<=N} D_nmpq A_m A_p A_q,
which is Hamiltonian with H = 1/2 sum V^2 + U.
"""
from __future__ import annotations

import logging
from typing import Union

import numpy as np

from kgalerkin.core.spectral import COUPLING, project, synthesize
from kgalerkin.utils.errors import DivergenceError, DomainError
from kgalerkin.utils.objects import GridFunction, StateVector, Trajectory

logger = logging.getLogger(__name__)

DIVERGENCE_BOUND = 1e8

Positions = Union[StateVector, np.ndarray, list]


def _positions(s: Positions) -> np.ndarray:
    if isinstance(s, StateVector):
        return s.positions()
    return np.asarray(s, dtype=float)


def linear_frequencies(N: int, lam: float) -> np.ndarray:
    """n^2 + lambda for n = 1..N."""
    return np.arange(1, N + 1, dtype=float) ** 2 + lam


def potential_U(s: Positions, lam: float) -> float:
    A = _positions(s)
    sgn = float(np.sign(lam))
    quadratic = 0.5 * float(np.dot(linear_frequencies(A.size, lam), A * A))
    return quadratic - 0.25 * sgn * COUPLING.quartic(A) - 0.25 * sgn * lam**2


def potential_batch(A_rows: np.ndarray, lam: float) -> np.ndarray:
    """U for every row of an (M, N) array of positions."""
    A_rows = np.atleast_2d(np.asarray(A_rows, dtype=float))
    N = A_rows.shape[1]
    sgn = float(np.sign(lam))
    table = COUPLING.dense(N)
    quartic = np.einsum("nmpq,in,im,ip,iq->i", table, A_rows, A_rows, A_rows, A_rows, optimize=True)
    quadratic = 0.5 * (A_rows**2) @ linear_frequencies(N, lam)
    return quadratic - 0.25 * sgn * quartic - 0.25 * sgn * lam**2


def force(s: Positions, lam: float) -> np.ndarray:
    A = _positions(s)
    sgn = float(np.sign(lam))
    return -linear_frequencies(A.size, lam) * A + sgn * COUPLING.cubic(A)


def hamiltonian(s: StateVector, lam: float) -> float:
    V = s.velocities()
    return 0.5 * float(np.dot(V, V)) + potential_U(s, lam)


def _check_finite(A: np.ndarray, V: np.ndarray, tau: float, step: int) -> None:
    if not (np.all(np.isfinite(A)) and np.all(np.isfinite(V))):
        raise DivergenceError(f"non-finite state at tau={tau:.6g} (step {step})", tau=tau, step=step)
    peak = float(np.max(np.abs(A)))
    if peak > DIVERGENCE_BOUND:
        raise DivergenceError(
            f"|A| reached {peak:.3e} > {DIVERGENCE_BOUND:.0e} at tau={tau:.6g} (step {step})", tau=tau, step=step
        )


def integrate(s0: StateVector, lam: float, tau_end: float, dt: float, sample_every: int = 1) -> Trajectory:
    """
    Fixed-step velocity Verlet from s0 to tau_end.

    Samples are taken at the start, every ``sample_every`` steps and at the
    last step. Times are tau0 + k dt, the number of steps being the nearest
    integer to (tau_end - tau0) / dt, so the final time is within dt of tau_end.
    """
    if not dt > 0:
        raise DomainError(f"dt must be positive, got {dt}")
    if not tau_end > s0.tau:
        raise DomainError(f"tau_end={tau_end} must exceed the initial time {s0.tau}")
    if sample_every < 1:
        raise DomainError("sample_every must be at least 1")

    n_steps = max(1, int(round((tau_end - s0.tau) / dt)))
    A = s0.positions().copy()
    V = s0.velocities().copy()
    _check_finite(A, V, s0.tau, 0)

    samples = [StateVector.from_arrays(A, V, s0.tau)]
    energies = [hamiltonian(samples[0], lam)]
    acc = force(A, lam)
    for step in range(1, n_steps + 1):
        V += 0.5 * dt * acc
        A += dt * V
        acc = force(A, lam)
        V += 0.5 * dt * acc
        tau = s0.tau + step * dt
        _check_finite(A, V, tau, step)
        if step % sample_every == 0 or step == n_steps:
            state = StateVector.from_arrays(A, V, tau)
            samples.append(state)
            energies.append(hamiltonian(state, lam))

    trajectory = Trajectory(samples=samples, dt=dt, hamiltonian_series=energies)
    logger.info(
        f"Integrated N={s0.N} lambda={lam} to tau={samples[-1].tau:.6g} in {n_steps} steps, "
        f"energy drift {trajectory.energy_drift():.3e}"
    )
    return trajectory


def cauchy_from_field(u0: GridFunction, v0: GridFunction, N: int) -> StateVector:
    if len(u0.xi) != len(v0.xi) or not np.allclose(u0.xi, v0.xi, rtol=0.0, atol=1e-12):
        raise DomainError("initial field and velocity must be sampled on the same grid")
    A = project(u0, N)
    V = project(v0, N)
    return StateVector(A=A.values, V=V.values, tau=0.0)


def field_snapshot(s: StateVector, grid: int) -> GridFunction:
    """The truncated field u^(N)(tau, xi) of a state."""
    return synthesize(s.positions(), grid)


def max_deviation(trajectory: Trajectory, reference: np.ndarray) -> float:
    return float(np.max(np.abs(trajectory.positions() - np.asarray(reference)[None, :])))
