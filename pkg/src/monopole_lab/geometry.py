"""Constant-curvature 3-space models in conformally flat coordinates.

The spatial metric is written as ``dl^2 = (dr^2 + r^2 dOmega^2) / Sigma(r)^2``
with

* Euclid      Sigma = 1
* Riemann     Sigma = 1 + r^2 / (4 rho^2)   (sphere S3, whole chart r >= 0)
* Lobachevsky Sigma = 1 - r^2 / (4 rho^2)   (hyperbolic H3, ball r < 2 rho)

The geodesic (angular) coordinate chi is related to r by
``r = 2 rho tan(chi/2)`` on S3 and ``r = 2 rho tanh(chi/2)`` on H3, so that
``dr / Sigma = rho dchi``.  With ``rho = 1`` everything is dimensionless.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass


class DomainError(ValueError):
    """Raised when a point lies outside the chart of a model."""


class Kind(str, enum.Enum):
    EUCLID = "euclid"
    RIEMANN = "riemann"
    LOBACHEVSKY = "lobachevsky"


@dataclass(frozen=True)
class CurvatureModel:
    kind: Kind
    rho: float = 1.0

    def __post_init__(self) -> None:
        object.__setattr__(self, "kind", Kind(self.kind))
        if not (self.rho > 0 and math.isfinite(self.rho)):
            raise ValueError(f"curvature radius must be positive, got {self.rho!r}")

    @classmethod
    def euclid(cls) -> "CurvatureModel":
        return cls(Kind.EUCLID, 1.0)

    @classmethod
    def riemann(cls, rho: float = 1.0) -> "CurvatureModel":
        return cls(Kind.RIEMANN, rho)

    @classmethod
    def lobachevsky(cls, rho: float = 1.0) -> "CurvatureModel":
        return cls(Kind.LOBACHEVSKY, rho)

    @property
    def r_max(self) -> float:
        """Upper end of the conformal chart (exclusive)."""
        return 2.0 * self.rho if self.kind is Kind.LOBACHEVSKY else math.inf

    @property
    def curvature_sign(self) -> int:
        return {Kind.EUCLID: 0, Kind.RIEMANN: 1, Kind.LOBACHEVSKY: -1}[self.kind]


def _check_r(model: CurvatureModel, r: float) -> None:
    if not r >= 0:
        raise DomainError(f"radius must be non-negative, got {r!r}")
    if model.kind is Kind.LOBACHEVSKY and r >= 2.0 * model.rho:
        raise DomainError(f"r={r!r} is outside the Lobachevsky chart r < {2.0 * model.rho!r}")


def sigma(model: CurvatureModel, r: float) -> float:
    """Conformal factor Sigma(r)."""
    _check_r(model, r)
    s = model.curvature_sign
    return 1.0 + s * r * r / (4.0 * model.rho**2)


def sigma_prime(model: CurvatureModel, r: float) -> float:
    """dSigma/dr."""
    _check_r(model, r)
    return model.curvature_sign * r / (2.0 * model.rho**2)


def r_from_chi(model: CurvatureModel, chi: float) -> float:
    if model.kind is Kind.EUCLID:
        if chi < 0:
            raise DomainError(f"chi must be non-negative, got {chi!r}")
        return float(chi)
    if model.kind is Kind.RIEMANN:
        if not 0.0 <= chi < math.pi:
            raise DomainError(f"Riemann chart needs chi in [0, pi), got {chi!r}")
        return 2.0 * model.rho * math.tan(chi / 2.0)
    if not (chi >= 0 and math.isfinite(chi)):
        raise DomainError(f"Lobachevsky chart needs finite chi >= 0, got {chi!r}")
    return 2.0 * model.rho * math.tanh(chi / 2.0)


def chi_from_r(model: CurvatureModel, r: float) -> float:
    _check_r(model, r)
    if model.kind is Kind.EUCLID:
        return float(r)
    x = r / (2.0 * model.rho)
    if model.kind is Kind.RIEMANN:
        return 2.0 * math.atan(x)
    return 2.0 * math.atanh(x)
