"""
Nondimensionalization layer.

Everything downstream works with the single parameter
lambda = -beta * phi0^2 * ell^2 / pi^2, the coordinate xi = pi x / ell in
[0, pi], the time tau = pi t / ell and the field u = sum_n A_n sqrt(2) sin(n xi),
where B_n = a A_n and a = pi / sqrt(ell |beta|). Physical units only appear at
the I/O boundary through the ``to_physical_*`` helpers.
"""
from __future__ import annotations

import math

import numpy as np

from kgalerkin.utils.errors import DomainError
from kgalerkin.utils.objects import DimensionlessParams, PhysicalParams


def _check(p: PhysicalParams) -> None:
    if p.ell <= 0:
        raise DomainError(f"domain length must be positive, got ell={p.ell}")
    if p.beta == 0:
        raise DomainError("beta = 0 has no amplitude scale a = pi/sqrt(ell|beta|); pass lambda directly")


def nondimensionalize(p: PhysicalParams) -> DimensionlessParams:
    _check(p)
    lam = -p.beta * p.phi0**2 * p.ell**2 / math.pi**2
    return DimensionlessParams.from_lambda(lam)


def scale_amplitude(p: PhysicalParams) -> float:
    """a such that B_n = a A_n."""
    _check(p)
    return math.pi / math.sqrt(p.ell * abs(p.beta))


def physical_beta(lam: float, phi0: float, ell: float) -> float:
    """Inverse of :func:`nondimensionalize` for fixed (phi0, ell)."""
    if ell <= 0:
        raise DomainError(f"domain length must be positive, got ell={ell}")
    if phi0 == 0:
        raise DomainError("beta cannot be recovered from lambda when phi0 = 0")
    return -lam * math.pi**2 / (phi0**2 * ell**2)


def sign_lambda(lam: float) -> int:
    return int(np.sign(lam))


def to_physical_time(tau, ell: float):
    return np.asarray(tau) * ell / math.pi


def to_physical_coordinate(xi, ell: float):
    return np.asarray(xi) * ell / math.pi


def to_physical_field(u, p: PhysicalParams):
    # phi = a * sum A_n phi_n and sqrt(ell) phi_n = sqrt(2) sin(n xi)
    return np.asarray(u) * scale_amplitude(p) / math.sqrt(p.ell)


def to_physical_energy(energy: float, p: PhysicalParams) -> float:
    a = scale_amplitude(p)
    return energy * math.pi**2 * a**2 / p.ell**2
