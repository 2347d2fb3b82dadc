from __future__ import annotations

import math
from enum import Enum
from typing import Optional

import numpy as np
from pydantic import BaseModel, Field, field_validator, model_validator


class PhysicalParams(BaseModel):
    beta: float  # nonlinearity strength, any sign
    phi0: float = Field(ge=0.0)  # location of the potential minimum
    ell: float = Field(gt=0.0)  # domain length


class DimensionlessParams(BaseModel):
    lam: float
    sign_lambda: int

    @model_validator(mode="after")
    def _sign_matches(self) -> "DimensionlessParams":
        expected = int(np.sign(self.lam))
        if self.sign_lambda != expected:
            raise ValueError(f"sign_lambda={self.sign_lambda} but sign(lambda)={expected}")
        return self

    @classmethod
    def from_lambda(cls, lam: float) -> "DimensionlessParams":
        return cls(lam=lam, sign_lambda=int(np.sign(lam)))


class EllipticModulus(BaseModel):
    k: float = Field(ge=0.0, lt=1.0)
    k_prime: float

    @model_validator(mode="after")
    def _complementary(self) -> "EllipticModulus":
        if abs(self.k**2 + self.k_prime**2 - 1.0) > 1e-15 * 4:
            raise ValueError("k'^2 + k^2 must equal 1")
        return self

    @classmethod
    def from_k(cls, k: float) -> "EllipticModulus":
        return cls(k=k, k_prime=math.sqrt((1.0 - k) * (1.0 + k)))


class ModeCoefficients(BaseModel):
    """A_1..A_N; coefficients beyond N are implicitly zero."""

    values: list[float]

    @field_validator("values")
    @classmethod
    def _non_empty(cls, v: list[float]) -> list[float]:
        if len(v) < 1:
            raise ValueError("at least one mode coefficient is required")
        return v

    @property
    def N(self) -> int:
        return len(self.values)

    def as_array(self) -> np.ndarray:
        return np.asarray(self.values, dtype=float)


class GridFunction(BaseModel):
    """Samples of a dimensionless field on a uniform grid of [0, pi]."""

    xi: list[float]
    values: list[float]

    @model_validator(mode="after")
    def _aligned(self) -> "GridFunction":
        if len(self.xi) != len(self.values):
            raise ValueError("xi and values must have the same length")
        if len(self.xi) < 2:
            raise ValueError("a grid needs at least two points")
        return self

    @property
    def resolution(self) -> int:
        # number of intervals G; the grid has G + 1 samples
        return len(self.xi) - 1

    def as_arrays(self) -> tuple[np.ndarray, np.ndarray]:
        return np.asarray(self.xi, dtype=float), np.asarray(self.values, dtype=float)


class StationaryKind(str, Enum):
    SN = "SN"  # lambda < 0
    CN = "CN"  # lambda > 0


class StationaryBranch(BaseModel):
    lam: float
    branch_n: int = Field(ge=1)
    kind: StationaryKind
    modulus: float  # k
    wavenumber: float  # w
    amplitude: float  # a, signed so the first Fourier coefficient is positive
    phase: float  # 0 for sn, K(k) for cn

    @model_validator(mode="after")
    def _kind_matches_sign(self) -> "StationaryBranch":
        if self.lam == 0.0:
            raise ValueError("stationary branches need lambda != 0")
        if (self.lam < 0) != (self.kind is StationaryKind.SN):
            raise ValueError("SN branches belong to lambda < 0, CN branches to lambda > 0")
        return self


class StationarySolution(BaseModel):
    label: int = Field(ge=1)  # position in ascending |energy| order
    branch: StationaryBranch
    coefficients: ModeCoefficients
    energy: float


class StateVector(BaseModel):
    A: list[float]
    V: list[float]
    tau: float = 0.0

    @model_validator(mode="after")
    def _same_length(self) -> "StateVector":
        if len(self.A) != len(self.V):
            raise ValueError(f"len(A)={len(self.A)} differs from len(V)={len(self.V)}")
        if len(self.A) < 1:
            raise ValueError("a state needs at least one particle")
        return self

    @property
    def N(self) -> int:
        return len(self.A)

    @classmethod
    def from_arrays(cls, A: np.ndarray, V: np.ndarray, tau: float = 0.0) -> "StateVector":
        return cls(A=[float(a) for a in A], V=[float(v) for v in V], tau=float(tau))

    @classmethod
    def at_rest(cls, A: list[float], tau: float = 0.0) -> "StateVector":
        return cls(A=list(A), V=[0.0] * len(A), tau=tau)

    def positions(self) -> np.ndarray:
        return np.asarray(self.A, dtype=float)

    def velocities(self) -> np.ndarray:
        return np.asarray(self.V, dtype=float)


class Trajectory(BaseModel):
    samples: list[StateVector]
    dt: float = Field(gt=0.0)
    hamiltonian_series: list[float]

    @model_validator(mode="after")
    def _ordered(self) -> "Trajectory":
        if len(self.samples) != len(self.hamiltonian_series):
            raise ValueError("hamiltonian_series must be aligned with samples")
        taus = [s.tau for s in self.samples]
        if any(b <= a for a, b in zip(taus, taus[1:])):
            raise ValueError("sample times must be strictly increasing")
        return self

    @property
    def final(self) -> StateVector:
        return self.samples[-1]

    def taus(self) -> np.ndarray:
        return np.array([s.tau for s in self.samples])

    def positions(self) -> np.ndarray:
        return np.array([s.A for s in self.samples])

    def energy_drift(self) -> float:
        h = np.asarray(self.hamiltonian_series)
        return float(np.max(np.abs(h - h[0])))


class Classification(str, Enum):
    MIN = "MIN"
    MAX = "MAX"
    SADDLE = "SADDLE"
    DEGENERATE = "DEGENERATE"


class CriticalPoint(BaseModel):
    A: list[float]
    U_value: float
    classification: Classification
    hessian_eigenvalues: list[float]
    label_i: int = Field(ge=0)  # 0 is reserved for the trivial point

    @property
    def N(self) -> int:
        return len(self.A)


class ResidualReport(BaseModel):
    local: GridFunction
    total: float = Field(ge=0.0)
    tau: float
    N: int = Field(ge=1)


class OutputFormat(str, Enum):
    csv = "csv"
    json = "json"


class RunConfig(BaseModel):
    lam: Optional[float] = None
    beta: Optional[float] = None
    phi0: Optional[float] = None
    ell: Optional[float] = None
    N: int = Field(default=10, ge=1)
    dt: float = Field(default=1e-3, gt=0.0)
    tau_end: float = Field(default=10.0, gt=0.0)
    grid: Optional[int] = Field(default=None, ge=2)
    seed: int = 12345
    output_format: OutputFormat = OutputFormat.csv
    output_path: str = "."
    # residual and tensor dumps take no physical parameters
    parameter_free: bool = Field(default=False, exclude=True)

    @model_validator(mode="after")
    def _one_parameter_source(self) -> "RunConfig":
        physical = (self.beta, self.phi0, self.ell)
        has_physical = any(v is not None for v in physical)
        if self.lam is not None and has_physical:
            raise ValueError("give either --lambda or --beta/--phi0/--ell, not both")
        if self.lam is None and not self.parameter_free and not all(v is not None for v in physical):
            raise ValueError("give --lambda or the full physical triple --beta/--phi0/--ell")
        for name in ("lam", "beta", "phi0", "ell", "dt", "tau_end"):
            value = getattr(self, name)
            if value is not None and not math.isfinite(value):
                raise ValueError(f"{name} must be finite")
        return self

    @property
    def physical(self) -> Optional[PhysicalParams]:
        if self.lam is not None:
            return None
        return PhysicalParams(beta=self.beta, phi0=self.phi0, ell=self.ell)
