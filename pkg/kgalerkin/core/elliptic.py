"""
Jacobi elliptic kernel for real arguments.

K(k) comes from the arithmetic-geometric mean, sn/cn/dn from the descending
Landen (AGM) recursion for the amplitude, see DLMF 22.20(ii). Both reach
machine precision without any series truncation. The modulus convention is
k (not the parameter m = k^2).
"""
from __future__ import annotations

import math
from typing import Union

import numpy as np

from kgalerkin.utils.errors import DomainError
from kgalerkin.utils.objects import EllipticModulus

ArrayLike = Union[float, np.ndarray]

K_MAX_MODULUS = 1.0 - 1e-12
_AGM_TOL = 1e-16
_AGM_MAX_ITER = 64


def _check_modulus(k: float) -> float:
    k = float(k)
    if not math.isfinite(k) or k < 0.0 or k >= K_MAX_MODULUS:
        raise DomainError(f"elliptic modulus must lie in [0, 1 - 1e-12), got k={k!r}")
    return k


def modulus(k: float) -> EllipticModulus:
    return EllipticModulus.from_k(_check_modulus(k))


def _agm_table(k: float) -> tuple[list[float], list[float]]:
    """Return the AGM sequences a_n and c_n started from (1, k', k)."""
    kp = math.sqrt((1.0 - k) * (1.0 + k))
    a, b, c = [1.0], kp, [k]
    while abs(c[-1]) > _AGM_TOL and len(a) <= _AGM_MAX_ITER:
        an, bn = a[-1], b
        a.append(0.5 * (an + bn))
        b = math.sqrt(an * bn)
        c.append(0.5 * (an - bn))
    return a, c


def complete_K(k: float) -> float:
    """Complete elliptic integral of the first kind, K(k) = pi / (2 agm(1, k'))."""
    k = _check_modulus(k)
    a, _ = _agm_table(k)
    return math.pi / (2.0 * a[-1])


def jacobi_sncndn(u: ArrayLike, k: float) -> tuple[ArrayLike, ArrayLike, ArrayLike]:
    k = _check_modulus(k)
    u_arr = np.asarray(u, dtype=float)
    a, c = _agm_table(k)
    n = len(a) - 1
    phi = (2.0**n) * a[n] * u_arr
    for j in range(n, 0, -1):
        phi = 0.5 * (phi + np.arcsin(c[j] / a[j] * np.sin(phi)))
    sn = np.sin(phi)
    cn = np.cos(phi)
    # dn >= k' > 0 on the real line
    dn = np.sqrt(1.0 - (k * sn) ** 2)
    if u_arr.ndim == 0:
        return float(sn), float(cn), float(dn)
    return sn, cn, dn


def jacobi_sn(u: ArrayLike, k: float) -> ArrayLike:
    return jacobi_sncndn(u, k)[0]


def jacobi_cn(u: ArrayLike, k: float) -> ArrayLike:
    return jacobi_sncndn(u, k)[1]


def jacobi_dn(u: ArrayLike, k: float) -> ArrayLike:
    return jacobi_sncndn(u, k)[2]
