"""Closed-form BPS monopole and dyon profiles on E3, S3 and H3.

Fields follow the static spherically symmetric ansatz

    Phi^a = Phi(r) r x^a,    W^a_i = K(r) eps_{iab} x^b,

so that the radial problem involves two functions ``K(r)`` and ``Phi(r)``.
Every solution is built from a *seed pair* ``(f1, f2)`` of the first-order
system ``f1' = -f1 f2``, ``f2' = -f1^2`` and, on curved spaces, from the
auxiliary profiles ``(a, b, c, R)`` of :func:`abcr_profiles`:

    K   = [c(r) f1(R(r)) - 1] / (e r^2)
    Phi = [a(r) f2(R(r)) + b(r)] / (e r^2)

Residuals of the second-order field equations are evaluated with 5-point
central differences carried out in 40-digit arithmetic, which pushes the
round-off floor of the second difference far below the test tolerances.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Any, Callable, NamedTuple, Union

import mpmath

from .geometry import CurvatureModel, DomainError, Kind

SINGULARITY_GUARD = 1e-3
R_MIN = 1e-6
_FD_DPS = 40


class SingularityError(DomainError):
    """Raised when a seed argument falls too close to a pole."""


class SeedKind(str, enum.Enum):
    RATIONAL = "rational"
    HYPERBOLIC = "hyperbolic"
    TRIGONOMETRIC = "trigonometric"


@dataclass(frozen=True)
class SeedFamily:
    kind: SeedKind
    A: float
    B: float = 0.0
    sign: int = 1

    def __post_init__(self) -> None:
        object.__setattr__(self, "kind", SeedKind(self.kind))
        if self.A == 0:
            raise ValueError("seed scale A must be non-zero")
        if self.sign not in (1, -1):
            raise ValueError(f"sign must be +1 or -1, got {self.sign!r}")

    def distance_to_pole(self, x: float) -> float:
        """Distance in x to the nearest singular point of the seed."""
        u = self.A * x + self.B
        if self.kind is SeedKind.TRIGONOMETRIC:
            u = u - math.pi * round(u / math.pi)
        return abs(u) / abs(self.A)


def _seed_values(seed: SeedFamily, x, lib) -> tuple:
    u = seed.A * x + seed.B
    if seed.kind is SeedKind.RATIONAL:
        f2 = seed.A / u
        f1 = seed.sign * f2
    elif seed.kind is SeedKind.HYPERBOLIC:
        f1 = seed.sign * seed.A / lib.sinh(u)
        f2 = seed.A * lib.cosh(u) / lib.sinh(u)
    else:
        f1 = seed.sign * seed.A / lib.sin(u)
        f2 = seed.A * lib.cos(u) / lib.sin(u)
    return f1, f2


def f_pair(seed: SeedFamily, x: float) -> tuple[float, float]:
    """Seed pair (f1, f2) at x; raises near a pole."""
    if seed.distance_to_pole(x) < SINGULARITY_GUARD:
        raise SingularityError(f"x={x!r} lies within {SINGULARITY_GUARD} of a {seed.kind.value} seed pole")
    return _seed_values(seed, x, math)


class Profiles(NamedTuple):
    a: Callable[[float], float]
    b: Callable[[float], float]
    c: Callable[[float], float]
    R: Callable[[float], float]


def _abcr(model: CurvatureModel, a1: float, C: float, r, lib) -> tuple:
    if model.kind is Kind.EUCLID:
        return a1 * r, -1.0 + 0 * r, a1 * r, a1 * r + C
    q = r * r / (4.0 * model.rho**2)
    x = r / (2.0 * model.rho)
    if model.kind is Kind.RIEMANN:
        sig = 1 + q
        return a1 * r, -(1 - q), a1 * r / sig, 2.0 * model.rho * a1 * lib.atan(x) + C
    sig = 1 - q
    return a1 * r, -(1 + q), a1 * r / sig, 2.0 * model.rho * a1 * lib.atanh(x) + C


def abcr_profiles(model: CurvatureModel, a1: float, C: float) -> Profiles:
    """Auxiliary profiles (a, b, c, R) that turn a seed pair into a solution."""

    def pick(i: int) -> Callable[[float], float]:
        def fn(r: float) -> float:
            if not 0 <= r < model.r_max:
                raise DomainError(f"r={r!r} outside the chart of {model.kind.value}")
            return float(_abcr(model, a1, C, r, math)[i])

        return fn

    return Profiles(pick(0), pick(1), pick(2), pick(3))


@dataclass(frozen=True)
class TypeI:
    a1: float
    C: float
    seed: SeedFamily


@dataclass(frozen=True)
class Trivial:
    b1: float = 0.0
    b2: float = 0.0


@dataclass(frozen=True)
class MonopoleSolution:
    model: CurvatureModel
    kind: Union[TypeI, Trivial]
    e: float = 1.0

    def __post_init__(self) -> None:
        if not self.e > 0:
            raise ValueError("coupling e must be positive")

    # -- evaluation ------------------------------------------------------
    def _check(self, r) -> None:
        if not r >= R_MIN:
            raise DomainError(f"r={float(r)!r} below the minimum radius {R_MIN}")
        if not r < self.model.r_max:
            raise DomainError(f"r={float(r)!r} outside the chart of {self.model.kind.value}")
        if isinstance(self.kind, TypeI):
            R = _abcr(self.model, self.kind.a1, self.kind.C, float(r), math)[3]
            if self.kind.seed.distance_to_pole(R) < SINGULARITY_GUARD:
                raise SingularityError(f"seed argument R({float(r)!r})={R!r} hits a pole")

    def _fields(self, r, lib) -> tuple:
        e = self.e
        if isinstance(self.kind, Trivial):
            q = r * r / (4.0 * self.model.rho**2)
            s = self.model.curvature_sign
            # b2 multiplies 1 - q on S3, 1 + q on H3, 1 on E3
            tail = 1 - s * q
            return -1 / (e * r * r), (self.kind.b1 * r + self.kind.b2 * tail) / (e * r * r)
        a, b, c, R = _abcr(self.model, self.kind.a1, self.kind.C, r, lib)
        f1, f2 = _seed_values(self.kind.seed, R, lib)
        return (c * f1 - 1) / (e * r * r), (a * f2 + b) / (e * r * r)

    def K(self, r: float) -> float:
        return eval_K_Phi(self, r)[0]

    def Phi(self, r: float) -> float:
        return eval_K_Phi(self, r)[1]

    # -- serialization ---------------------------------------------------
    def to_record(self) -> dict[str, Any]:
        rec: dict[str, Any] = {
            "model": self.model.kind.value,
            "rho": self.model.rho,
            "kind": "trivial" if isinstance(self.kind, Trivial) else "typeI",
            "family": None, "A": None, "B": None, "sign": None,
            "a1": None, "C": None, "b1": None, "b2": None,
            "e": self.e,
        }
        if isinstance(self.kind, Trivial):
            rec.update(b1=self.kind.b1, b2=self.kind.b2)
        else:
            s = self.kind.seed
            rec.update(family=s.kind.value, A=s.A, B=s.B, sign=s.sign, a1=self.kind.a1, C=self.kind.C)
        return rec

    @classmethod
    def from_record(cls, rec: dict[str, Any]) -> "MonopoleSolution":
        model = CurvatureModel(Kind(rec["model"]), float(rec["rho"]))
        if rec["kind"] == "trivial":
            kind: Union[TypeI, Trivial] = Trivial(float(rec["b1"]), float(rec["b2"]))
        elif rec["kind"] == "typeI":
            seed = SeedFamily(SeedKind(rec["family"]), float(rec["A"]), float(rec["B"]), int(rec["sign"]))
            kind = TypeI(float(rec["a1"]), float(rec["C"]), seed)
        else:
            raise ValueError(f"unknown solution kind {rec['kind']!r}")
        return cls(model, kind, float(rec["e"]))


def eval_K_Phi(sol: MonopoleSolution, r: float) -> tuple[float, float]:
    sol._check(r)
    K, Phi = sol._fields(r, math)
    return float(K), float(Phi)


# ---------------------------------------------------------------------------
# residuals
# ---------------------------------------------------------------------------

def _stencil(func: Callable, r: float, h: float) -> tuple:
    """Value, first and second derivative from a 5-point central stencil."""
    with mpmath.workdps(_FD_DPS):
        r_ = mpmath.mpf(r)
        h_ = mpmath.mpf(h)
        fm2, fm1, f0, fp1, fp2 = (func(r_ + k * h_) for k in (-2, -1, 0, 1, 2))
        d1 = (fm2 - 8 * fm1 + 8 * fp1 - fp2) / (12 * h_)
        d2 = (-fm2 + 16 * fm1 - 30 * f0 + 16 * fp1 - fp2) / (12 * h_ * h_)
        return f0, d1, d2


def fd_step(r: float) -> float:
    return 1e-6 * max(1.0, r)


def _check_stencil(sol: MonopoleSolution, r: float, h: float) -> None:
    for k in (-2, -1, 0, 1, 2):
        sol._check(r + k * h)


def residual_field_equations(sol: MonopoleSolution, r: float) -> tuple[float, float]:
    """Left-hand sides (resPhi, resK) of the curved purely monopole equations."""
    h = fd_step(r)
    _check_stencil(sol, r, h)
    e = sol.e
    with mpmath.workdps(_FD_DPS):
        K, dK, d2K = _stencil(lambda x: sol._fields(x, mpmath)[0], r, h)
        P, dP, d2P = _stencil(lambda x: sol._fields(x, mpmath)[1], r, h)
        x = mpmath.mpf(r)
        s = sol.model.curvature_sign
        sig = 1 + s * x * x / (4 * mpmath.mpf(sol.model.rho) ** 2)
        lg = (s * x / (2 * mpmath.mpf(sol.model.rho) ** 2)) / sig
        res_phi = d2P + 4 * dP / x - 2 * e * P * (2 + e * x * x * K) * K - lg * (dP + P / x)
        res_k = (d2K + 4 * dK / x - e * P * P * (1 + e * x * x * K) / sig**2
                 - e * K * K * (3 + e * x * x * K) + lg * (dK + 2 * K / x))
        return float(res_phi), float(res_k)


# ---------------------------------------------------------------------------
# dyons (flat space only)
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class DyonSolution:
    base: MonopoleSolution
    c: float

    @property
    def scale(self) -> float:
        return (1.0 - self.c**2) ** 0.25

    def _fields(self, r, lib) -> tuple:
        K, Phi = self.base._fields(self.scale * r, lib)
        amp = lib.sqrt(1 - self.c**2) if lib is mpmath else math.sqrt(1 - self.c**2)
        return amp * K, Phi, self.c * Phi

    def fields(self, r: float) -> tuple[float, float, float]:
        """(K, Phi, f) at radius r."""
        self.base._check(self.scale * r)
        return tuple(float(v) for v in self._fields(r, math))  # type: ignore[return-value]


def dyon_from_monopole(base: MonopoleSolution, c: float) -> DyonSolution:
    if base.model.kind is not Kind.EUCLID:
        raise ValueError("dyons are constructed in flat space only")
    if not abs(c) < 1:
        raise ValueError(f"|c| must be < 1, got {c!r}")
    return DyonSolution(base, float(c))


def dyon_residual(dyon: DyonSolution, r: float) -> tuple[float, float, float]:
    """Residuals (resPhi, resF, resK) of the flat dyon system."""
    h = fd_step(r)
    for k in (-2, -1, 0, 1, 2):
        dyon.base._check(dyon.scale * (r + k * h))
    e = dyon.base.e
    with mpmath.workdps(_FD_DPS):
        K, dK, d2K = _stencil(lambda x: dyon._fields(x, mpmath)[0], r, h)
        P, dP, d2P = _stencil(lambda x: dyon._fields(x, mpmath)[1], r, h)
        F, dF, d2F = _stencil(lambda x: dyon._fields(x, mpmath)[2], r, h)
        x = mpmath.mpf(r)
        res_phi = d2P + 4 * dP / x - 2 * e * P * (2 + e * x * x * K) * K
        res_f = d2F + 4 * dF / x - 2 * e * F * (2 + e * x * x * K) * K
        res_k = d2K + 4 * dK / x + e * (F * F - P * P) * (1 + e * x * x * K) - e * K * K * (3 + e * x * x * K)
        return float(res_phi), float(res_f), float(res_k)
