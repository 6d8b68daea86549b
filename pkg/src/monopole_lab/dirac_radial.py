"""Radial Dirac systems for an electron in monopole backgrounds.

Two families are provided.

* :class:`AbelianRadialSystem`: the electron in the field of a Dirac
  monopole with ``k = eg``.  After diagonalizing the generalized Dirac
  operator the radial problem is the real pair

      (d/dx + nu/s) f + (eps + delta m) g = 0,
      (d/dx - nu/s) g - (eps - delta m) f = 0,

  with ``s = r`` on E3, ``sin(chi)`` on S3, ``sinh(chi)`` on H3 and
  ``nu = sqrt((j + 1/2)^2 - k^2)``.  The complex pair ``f1 = (f + i g)/sqrt2``,
  ``f2 = (f - i g)/sqrt2`` is available as well.

* :class:`DoubletRadialSystem`: the isodoublet in the BPS background on S3
  (F = Phi = 0), with ``nu = sqrt(j(j+1))`` and the coupling
  ``W = (e r^2 K + 1)/2``.

All right-hand sides broadcast over a leading batch axis so that an energy
scan integrates many values of ``eps`` at once.
"""
from __future__ import annotations

import dataclasses
import enum
import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence, Union

import numpy as np

from .geometry import CurvatureModel, Kind
from .wigner import HalfInt

Profile = Callable[[np.ndarray], np.ndarray]
SQ2 = math.sqrt(2.0)


class SingularPointError(ValueError):
    """Raised when the radial coordinate reaches a singular end point."""


def radial_factor(model: CurvatureModel, x):
    """The function multiplying the angular term: r, sin(chi) or sinh(chi)."""
    x = np.asarray(x, dtype=float)
    if model.kind is Kind.EUCLID:
        return x
    if model.kind is Kind.RIEMANN:
        return np.sin(x)
    return np.sinh(x)


def domain(model: CurvatureModel) -> tuple[float, float]:
    return (0.0, math.pi) if model.kind is Kind.RIEMANN else (0.0, math.inf)


def _check_point(model: CurvatureModel, x) -> None:
    lo, hi = domain(model)
    xa = np.asarray(x, dtype=float)
    if np.any(xa <= lo) or np.any(xa >= hi):
        raise SingularPointError(f"x={x!r} is not interior to ({lo}, {hi})")


def _stack(*comps) -> np.ndarray:
    return np.stack(np.broadcast_arrays(*comps), axis=-1)


def _col(eps, like):
    """Broadcast eps against the component arrays y[..., i]."""
    e = np.asarray(eps)
    return e if e.ndim == 0 else e.reshape(e.shape + (1,) * (np.ndim(like) - e.ndim))


# ---------------------------------------------------------------------------
# Abelian monopole
# ---------------------------------------------------------------------------

def abelian_nu(j, k) -> float:
    jj, kk = float(HalfInt.of(j)), float(HalfInt.of(k))
    val = (jj + 0.5) ** 2 - kk * kk
    if val < 0:
        raise ValueError(f"j={jj} is below the lowest admissible value for k={kk}")
    return math.sqrt(val)


@dataclass(frozen=True)
class AbelianRadialSystem:
    """Reduced Abelian radial system.

    ``complex_form=False`` integrates the real pair (f, g); ``True`` integrates
    (f1, f2).  ``e_nu_half`` and ``e_mu_half`` are the metric factors
    ``exp(-nu/2)`` and ``exp(-mu/2)`` of a static spherical metric.
    """

    epsilon: Union[float, np.ndarray]
    m: float
    nu: float
    delta: int = 1
    model: CurvatureModel = field(default_factory=CurvatureModel.euclid)
    e_nu_half: Optional[Profile] = None
    e_mu_half: Optional[Profile] = None
    complex_form: bool = False

    def __post_init__(self) -> None:
        if self.nu < 0:
            raise ValueError("nu must be non-negative")
        if self.delta not in (1, -1):
            raise ValueError("delta must be +1 or -1")

    @classmethod
    def for_state(cls, j, k, epsilon, m, delta=1, model=None, **kw) -> "AbelianRadialSystem":
        return cls(epsilon, m, abelian_nu(j, k), delta, model or CurvatureModel.euclid(), **kw)

    dim = 2

    def _metric(self, x):
        a = 1.0 if self.e_nu_half is None else self.e_nu_half(x)
        b = 1.0 if self.e_mu_half is None else self.e_mu_half(x)
        return a, b

    def rhs(self, x: float, y: np.ndarray) -> np.ndarray:
        _check_point(self.model, x)
        y = np.asarray(y)
        if y.shape[-1] != 2:
            raise ValueError(f"state must have 2 components, got {y.shape[-1]}")
        s = radial_factor(self.model, x)
        en, em = self._metric(x)
        eps = _col(self.epsilon, y[..., 0])
        dm = self.delta * self.m
        if not self.complex_form:
            f, g = y[..., 0], y[..., 1]
            return _stack(-((self.nu / s) * f + (en * eps + dm) * g) / em,
                          ((self.nu / s) * g + (en * eps - dm) * f) / em)
        f1, f2 = y[..., 0], y[..., 1]
        e_ = en * eps
        return _stack(1j * (e_ * f1 + 1j * (self.nu / s) * f2 - dm * f2) / em,
                      -1j * (e_ * f2 - 1j * (self.nu / s) * f1 - dm * f1) / em)


def to_fg(f1, f2):
    """(f1, f2) -> (f, g)."""
    return (f1 + f2) / SQ2, (f1 - f2) / (1j * SQ2)


def from_fg(f, g):
    """(f, g) -> (f1, f2)."""
    return (f + 1j * g) / SQ2, (f - 1j * g) / SQ2


def abelian_full_residual(eps, m, nu, x, F, dF, model: CurvatureModel | None = None) -> np.ndarray:
    """Left-hand sides of the unreduced four-component Abelian equations."""
    s = radial_factor(model or CurvatureModel.euclid(), x)
    f1, f2, f3, f4 = F
    d1, d2, d3, d4 = dF
    return np.array([
        eps * f3 - 1j * d3 - 1j * nu / s * f4 - m * f1,
        eps * f4 + 1j * d4 + 1j * nu / s * f3 - m * f2,
        eps * f1 + 1j * d1 + 1j * nu / s * f2 - m * f3,
        eps * f2 - 1j * d2 - 1j * nu / s * f1 - m * f4,
    ])


def bound_state_jmin(epsilon: float, m: float, r) -> tuple[np.ndarray, np.ndarray]:
    """Decaying lowest-j profile f = exp(-kappa r) and its partner (eps + i d/dr) f / m."""
    if not (abs(epsilon) < m):
        raise ValueError(f"decaying branch needs |epsilon| < m, got epsilon={epsilon!r}, m={m!r}")
    kappa = math.sqrt(m * m - epsilon * epsilon)
    f = np.exp(-kappa * np.asarray(r, dtype=float))
    return f, (epsilon - 1j * kappa) * f / m


# ---------------------------------------------------------------------------
# non-Abelian doublet on S3
# ---------------------------------------------------------------------------

class DoubletVariant(str, enum.Enum):
    FULL8 = "full8"            # all eight components, no constraint
    MU_REDUCED = "mu_reduced"  # W = 0, j >= 1: (f1, f2)
    CONSTRAINED = "constrained"  # W != 0, j >= 1, N_A constraint with A = 0: (f1..f4)
    J0 = "j0"                  # j = 0: (f4, f2)


@dataclass(frozen=True)
class DoubletRadialSystem:
    epsilon: Union[float, np.ndarray]
    m: float
    j: HalfInt
    W: Optional[Profile] = None
    delta: int = 1
    mu: int = 1
    model: CurvatureModel = field(default_factory=CurvatureModel.riemann)
    variant: Optional[DoubletVariant] = None
    F: Optional[Profile] = None
    Phi: Optional[Profile] = None

    def __post_init__(self) -> None:
        jj = HalfInt.of(self.j)
        if not jj.is_integer or jj.doubled < 0:
            raise ValueError(f"doublet states need j in {{0, 1, 2, ...}}, got {jj}")
        object.__setattr__(self, "j", jj)
        if self.delta not in (1, -1) or self.mu not in (1, -1):
            raise ValueError("delta and mu must be +1 or -1")
        if self.variant is None:
            if jj.doubled == 0:
                v = DoubletVariant.J0
            elif self.W is None:
                v = DoubletVariant.MU_REDUCED
            else:
                v = DoubletVariant.CONSTRAINED
            object.__setattr__(self, "variant", v)
        object.__setattr__(self, "variant", DoubletVariant(self.variant))
        if self.variant is DoubletVariant.MU_REDUCED and self.W is not None:
            raise ValueError("the mu-reduced system requires W = 0")
        if self.variant in (DoubletVariant.MU_REDUCED, DoubletVariant.CONSTRAINED) and jj.doubled == 0:
            raise ValueError("j = 0 uses the j0 variant")

    @property
    def nu(self) -> float:
        J = float(self.j)
        return math.sqrt(J * (J + 1))

    @property
    def dim(self) -> int:
        return {DoubletVariant.FULL8: 8, DoubletVariant.MU_REDUCED: 2,
                DoubletVariant.CONSTRAINED: 4, DoubletVariant.J0: 2}[self.variant]

    def w_over_s(self, x):
        if self.W is None:
            return 0.0 * np.asarray(x, dtype=float)
        return self.W(x) / radial_factor(self.model, x)

    def rhs(self, x: float, y: np.ndarray) -> np.ndarray:
        _check_point(self.model, x)
        y = np.asarray(y, dtype=complex)
        if y.shape[-1] != self.dim:
            raise ValueError(f"{self.variant.value} state has {self.dim} components, got {y.shape[-1]}")
        eps = _col(self.epsilon, y[..., 0])
        s = radial_factor(self.model, x)
        ns, ws = self.nu / s, self.w_over_s(x)
        m = self.m
        if self.variant is DoubletVariant.MU_REDUCED:
            f1, f2 = y[..., 0], y[..., 1]
            mm = self.mu * m
            return _stack(1j * (eps * f1 + 1j * ns * f2 - mm * f2),
                          -1j * (eps * f2 - 1j * ns * f1 - mm * f1))
        if self.variant is DoubletVariant.J0:
            f4, f2 = y[..., 0], y[..., 1]
            dw = 1j * self.delta * ws
            return _stack(1j * (eps * f4 - (m - dw) * f2),
                          -1j * (eps * f2 - (m + dw) * f4))
        if self.variant is DoubletVariant.CONSTRAINED:
            f1, f2, f3, f4 = (y[..., i] for i in range(4))
            dw = 1j * self.delta * ws
            return _stack(1j * (eps * f1 + 1j * ns * f2 - m * f3),
                          -1j * (eps * f2 - 1j * ns * f1 - (dw + m) * f4),
                          -1j * (eps * f3 - 1j * ns * f4 - m * f1),
                          1j * (eps * f4 + 1j * ns * f3 + (dw - m) * f2))
        Ft = 0.0 if self.F is None else self.F(x)
        Pt = 0.0 if self.Phi is None else self.Phi(x)
        f1, f2, f3, f4, g1, g2, g3, g4 = (y[..., i] for i in range(8))
        ep, mp, eg, mg = eps + Ft, m + Pt, eps - Ft, m - Pt
        iws = 1j * ws
        return _stack(1j * (ep * f1 + 1j * ns * f2 - mp * f3),
                      -1j * (ep * f2 - 1j * ns * f1 - iws * g1 - mp * f4),
                      -1j * (ep * f3 - 1j * ns * f4 - mp * f1),
                      1j * (ep * f4 + 1j * ns * f3 + iws * g3 - mp * f2),
                      1j * (eg * g1 + 1j * ns * g2 + iws * f2 - mg * g3),
                      -1j * (eg * g2 - 1j * ns * g1 - mg * g4),
                      -1j * (eg * g3 - 1j * ns * g4 - iws * f4 - mg * g1),
                      1j * (eg * g4 + 1j * ns * g3 - mg * g2))


def doublet_residual8(eps, m, nu, W_over_s, F, dF, Ft=0.0, Pt=0.0, s=None, x=None) -> np.ndarray:
    """Left-hand sides of the eight doublet radial equations.

    ``F`` and ``dF`` are sequences (f1..f4, g1..g4) of values and derivatives
    at coordinate ``x``; ``s`` defaults to ``sin(x)``.
    """
    s = np.sin(x) if s is None else s
    f1, f2, f3, f4, g1, g2, g3, g4 = F
    d1, d2, d3, d4, h1, h2, h3, h4 = dF
    ep, eg, mp, mg = eps + Ft, eps - Ft, m + Pt, m - Pt
    ns, iw = nu / s, 1j * W_over_s
    return np.array([
        -1j * d3 + ep * f3 - 1j * ns * f4 - mp * f1,
        1j * d4 + ep * f4 + 1j * ns * f3 + iw * g3 - mp * f2,
        1j * d1 + ep * f1 + 1j * ns * f2 - mp * f3,
        -1j * d2 + ep * f2 - 1j * ns * f1 - iw * g1 - mp * f4,
        -1j * h3 + eg * g3 - 1j * ns * g4 - iw * f4 - mg * g1,
        1j * h4 + eg * g4 + 1j * ns * g3 - mg * g2,
        1j * h1 + eg * g1 + 1j * ns * g2 + iw * f2 - mg * g3,
        -1j * h2 + eg * g2 - 1j * ns * g1 - mg * g4,
    ])


def w_profile_typeI(alpha_w: float, beta_w: float, seed) -> Profile:
    """W(chi) on S3 for a Type I background: W / sin(chi) = alpha_w f1(alpha_w chi + beta_w) / 2."""
    from .bps import _seed_values

    def W(chi):
        chi = np.asarray(chi, dtype=float)
        f1, _ = _seed_values(seed, alpha_w * chi + beta_w, np)
        return 0.5 * alpha_w * np.sin(chi) * f1

    return W


def w_from_solution(sol) -> Profile:
    """W(chi) = (e r^2 K + 1)/2 with r = r(chi), taken from a bps solution."""
    from .geometry import r_from_chi

    def W(chi):
        chi_a = np.atleast_1d(np.asarray(chi, dtype=float))
        vals = np.array([(sol.e * r * r * sol.K(r) + 1.0) / 2.0 for r in (r_from_chi(sol.model, c) for c in chi_a)])
        return vals.reshape(np.shape(chi))

    return W


def rhs(system, x: float, state: np.ndarray) -> np.ndarray:
    """Derivative of ``state`` for any radial system in this module."""
    return system.rhs(x, state)


# ---------------------------------------------------------------------------
# integration
# ---------------------------------------------------------------------------

def integrate(system, grid: Sequence[float], init_state) -> np.ndarray:
    """Classical fourth-order Runge-Kutta on a strictly monotone grid.

    Returns the trajectory with shape ``(len(grid),) + init_state.shape``.
    Decreasing grids integrate backwards.
    """
    x = np.asarray(grid, dtype=float)
    if x.ndim != 1 or len(x) < 2:
        raise ValueError("grid needs at least two points")
    steps = np.diff(x)
    if not (np.all(steps > 0) or np.all(steps < 0)):
        raise ValueError("grid must be strictly monotone")
    _check_point(system.model, x)
    y = np.asarray(init_state)
    y = y.astype(complex) if np.iscomplexobj(y) or getattr(system, "complex_form", True) else y.astype(float)
    y = np.broadcast_to(y, system.rhs(x[0], y).shape).copy()
    out = np.empty((len(x),) + y.shape, dtype=y.dtype)
    out[0] = y
    f = system.rhs
    for i, h in enumerate(steps):
        xi = x[i]
        k1 = f(xi, y)
        k2 = f(xi + h / 2, y + h / 2 * k1)
        k3 = f(xi + h / 2, y + h / 2 * k2)
        k4 = f(xi + h, y + h * k3)
        y = y + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
        out[i + 1] = y
    if not np.all(np.isfinite(out)):
        raise FloatingPointError("integration produced non-finite values")
    return out


# ---------------------------------------------------------------------------
# S3 spectrum by shooting
# ---------------------------------------------------------------------------

CHI_EDGE = 1e-3
DEFAULT_GRID = 800
SCAN_STEP = 0.05
SCAN_CHUNK = 4.0
BISECT_TOL = 1e-13
SECTIONS = 15
J0_EDGE = 1e-12


@dataclass(frozen=True)
class SpectralProblem:
    """Regular-at-both-ends eigenproblem on S3.

    The ``epsilon`` carried by ``system`` is ignored; ``grid_n`` is the total
    number of integration intervals, split evenly between the two shooting legs.
    """

    system: Union[AbelianRadialSystem, DoubletRadialSystem]
    chi_domain: tuple[float, float] = (CHI_EDGE, math.pi - CHI_EDGE)
    grid_n: int = DEFAULT_GRID

    def __post_init__(self) -> None:
        if self.system.model.kind is not Kind.RIEMANN:
            raise ValueError("the discrete spectrum solver works on S3 only")
        lo, hi = self.chi_domain
        if not (0.0 < lo < math.pi / 2 < hi < math.pi):
            raise ValueError(f"chi_domain must satisfy 0 < chi_min < pi/2 < chi_max < pi, got {self.chi_domain}")
        if self.grid_n < 64 or self.grid_n % 2:
            raise ValueError(f"grid_n must be an even integer >= 64, got {self.grid_n}")
        if isinstance(self.system, AbelianRadialSystem) and (
                self.system.e_nu_half is not None or self.system.e_mu_half is not None):
            raise ValueError("spectrum solver supports the unit metric factors only")

    @property
    def real_dimension(self) -> int:
        s = self.system
        if isinstance(s, DoubletRadialSystem) and s.variant is DoubletVariant.CONSTRAINED:
            return 4
        if isinstance(s, DoubletRadialSystem) and s.variant is DoubletVariant.FULL8:
            raise ValueError("no real shooting formulation for the unconstrained eight-component system")
        return 2


@dataclass(frozen=True)
class SpectrumReport:
    eigenvalues: tuple[float, ...]
    coarse: tuple[float, ...]
    drift: tuple[float, ...]
    grid_n: int
    window: tuple[float, float]
    diagnostic: str = ""

    @property
    def max_drift(self) -> float:
        return max(self.drift, default=0.0)


def _u_grid(chi_a: float, chi_b: float, n: int) -> np.ndarray:
    """Grid uniform in u = log tan(chi/2), where d/du = sin(chi) d/dchi."""
    return np.linspace(math.log(math.tan(chi_a / 2)), math.log(math.tan(chi_b / 2)), n + 1)


def _rk4_chi(deriv, x: np.ndarray, y: np.ndarray) -> np.ndarray:
    for i in range(len(x) - 1):
        h = x[i + 1] - x[i]
        k1 = deriv(x[i], y)
        k2 = deriv(x[i] + h / 2, y + h / 2 * k1)
        k3 = deriv(x[i] + h / 2, y + h / 2 * k2)
        k4 = deriv(x[i + 1], y + h * k3)
        y = y + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
    return y


def _chi(u: float) -> float:
    return 2.0 * math.atan(math.exp(u))


def _rk4_u(deriv, u: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Final state after RK4 in u for dy/dchi = deriv(chi, y)."""
    def f(uu, yy):
        return deriv(_chi(uu), yy) / math.cosh(uu)

    for i in range(len(u) - 1):
        h = u[i + 1] - u[i]
        k1 = f(u[i], y)
        k2 = f(u[i] + h / 2, y + h / 2 * k1)
        k3 = f(u[i] + h / 2, y + h / 2 * k2)
        k4 = f(u[i + 1], y + h * k3)
        y = y + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
    return y


def _pair_form(system) -> tuple[float, float]:
    """(nu, effective signed mass) of a real (f, g) pair system."""
    if isinstance(system, AbelianRadialSystem):
        return system.nu, system.delta * system.m
    return system.nu, system.mu * system.m


def _real_pair_rhs(nu: float, mass: float, eps: np.ndarray):
    def deriv(chi, y):
        s = math.sin(chi)
        f, g = y[..., 0], y[..., 1]
        return np.stack([-(nu / s) * f - (eps + mass) * g, (nu / s) * g + (eps - mass) * f], axis=-1)
    return deriv


def _constrained_real_rhs(system: DoubletRadialSystem, eps: np.ndarray):
    """Real four-dimensional form on the invariant subspace f3 = conj(f1), f4 = conj(f2)."""
    nu, m, d = system.nu, system.m, system.delta

    def deriv(chi, y):
        s = math.sin(chi)
        ws = float(system.w_over_s(chi))
        a = y[..., 0] + 1j * y[..., 1]
        b = y[..., 2] + 1j * y[..., 3]
        da = 1j * eps * a - (nu / s) * b - 1j * m * np.conj(a)
        db = -1j * eps * b - (nu / s) * a - d * ws * np.conj(b) + 1j * m * np.conj(b)
        return np.stack([da.real, da.imag, db.real, db.imag], axis=-1)
    return deriv


def _j0_real_rhs(system: DoubletRadialSystem, eps: np.ndarray):
    """Real form of the j = 0 pair on the invariant subspace f2 = conj(f4)."""
    m, d = system.m, system.delta

    def deriv(chi, y):
        dw = 1j * d * float(system.w_over_s(chi))
        a = y[..., 0] + 1j * y[..., 1]
        da = 1j * (eps * a - (m - dw) * np.conj(a))
        return np.stack([da.real, da.imag], axis=-1)
    return deriv


def _shooting_setup(problem: SpectralProblem, eps: np.ndarray):
    """Real derivative and regular end data (left columns, right columns)."""
    lo, hi = problem.chi_domain
    yl = math.pi - hi
    sys_ = problem.system
    ones = np.ones_like(eps)
    if isinstance(sys_, DoubletRadialSystem) and sys_.variant is DoubletVariant.J0:
        # nu -> 0 limit of the regular data, (f4, f2) = (1, -1) at 0 and (1, 1) at pi,
        # carried to the shooting end points since the pair is regular there
        deriv = _j0_real_rhs(sys_, eps)
        left = _rk4_chi(deriv, np.linspace(J0_EDGE, lo, 9), np.stack([0 * ones, ones], axis=-1))
        right = _rk4_chi(deriv, np.linspace(math.pi - J0_EDGE, hi, 9), np.stack([ones, 0 * ones], axis=-1))
        return deriv, [left], [right]
    if problem.real_dimension == 2:
        nu, mass = _pair_form(sys_)
        c = 1.0 / (2 * nu + 1)
        left = np.stack([-(eps + mass) * lo ** (nu + 1) * c, lo ** nu * ones], axis=-1)
        right = np.stack([yl ** nu * ones, -(eps - mass) * yl ** (nu + 1) * c], axis=-1)
        return _real_pair_rhs(nu, mass, eps), [left], [right]
    nu = sys_.nu
    cols = {}
    for side, pw, sgn in (("l", lo ** nu, -1.0), ("r", yl ** nu, 1.0)):
        cols[side] = []
        for phase in (1.0, 1j):
            a, b = phase * pw, sgn * phase * pw
            cols[side].append(np.stack([a.real * ones, a.imag * ones, b.real * ones, b.imag * ones], axis=-1))
    return _constrained_real_rhs(sys_, eps), cols["l"], cols["r"]


def _mismatch(problem: SpectralProblem, eps: np.ndarray, n: int) -> np.ndarray:
    """Sign-carrying matching determinant at chi = pi/2 for each eps."""
    eps = np.asarray(eps, dtype=float)
    lo, hi = problem.chi_domain
    left_u, right_u = _u_grid(lo, math.pi / 2, n // 2), _u_grid(hi, math.pi / 2, n // 2)
    deriv, left, right = _shooting_setup(problem, eps)
    cols = [_rk4_u(deriv, left_u, y) for y in left] + [_rk4_u(deriv, right_u, y) for y in right]
    cols = [c / np.linalg.norm(c, axis=-1, keepdims=True) for c in cols]
    return np.linalg.det(np.stack(cols, axis=-1))


def _roots_in(problem: SpectralProblem, grid: np.ndarray, n: int) -> list[float]:
    """Roots of the matching determinant bracketed by sign changes on ``grid``.

    Brackets are refined together; each pass samples SECTIONS interior points
    per bracket and keeps the sub-interval holding the first sign change.
    """
    vals = _mismatch(problem, grid, n)
    idx = np.nonzero(np.signbit(vals[:-1]) != np.signbit(vals[1:]))[0]
    if len(idx) == 0:
        return []
    a = np.minimum(grid[idx], grid[idx + 1])
    b = np.maximum(grid[idx], grid[idx + 1])
    fa = np.where(grid[idx] <= grid[idx + 1], vals[idx], vals[idx + 1])
    t = np.linspace(0.0, 1.0, SECTIONS + 2)[1:-1]
    while np.max(b - a) > BISECT_TOL * max(1.0, float(np.max(np.abs(b)))):
        pts = a[:, None] + (b - a)[:, None] * t[None, :]
        fp = _mismatch(problem, pts.ravel(), n).reshape(pts.shape)
        ends = np.concatenate([fa[:, None], fp], axis=1)
        flips = np.signbit(ends[:, :-1]) != np.signbit(ends[:, 1:])
        first = np.where(flips.any(axis=1), flips.argmax(axis=1), SECTIONS)
        lo_pts = np.concatenate([a[:, None], pts], axis=1)
        hi_pts = np.concatenate([pts, b[:, None]], axis=1)
        rows = np.arange(len(a))
        a, b, fa = lo_pts[rows, first], hi_pts[rows, first], ends[rows, first]
    return [float(v) for v in 0.5 * (a + b)]


def _scan(problem: SpectralProblem, count: int, window: tuple[float, float], n: int) -> list[float]:
    lo, hi = window
    descending = hi < lo
    found: list[float] = []
    start = lo
    while len(found) < count and (start > hi if descending else start < hi):
        stop = max(start - SCAN_CHUNK, hi) if descending else min(start + SCAN_CHUNK, hi)
        pts = max(2, int(math.ceil(abs(stop - start) / SCAN_STEP)) + 1)
        grid = np.linspace(start, stop, pts)
        found.extend(_roots_in(problem, grid, n))
        start = stop
    found = sorted(found, reverse=descending)[:count]
    return sorted(found)


def spectrum_s3(problem: SpectralProblem, count: int,
                window: Optional[tuple[float, float]] = None) -> SpectrumReport:
    """Lowest ``count`` eigenvalues in ``window`` scanned from its first end.

    The default window runs upward from just above the mass.  A window given
    as (hi, lo) with hi > lo is scanned downward.  Values are computed at
    ``grid_n`` and ``2 grid_n`` intervals; the finer ones are reported.
    """
    if count < 1:
        raise ValueError("count must be at least 1")
    m = problem.system.m
    window = window or (m + 1e-6, m + 20.0)
    coarse = _scan(problem, count, window, problem.grid_n)
    fine = _scan(problem, count, window, 2 * problem.grid_n)
    diag = ""
    if not fine:
        diag = f"no sign change of the matching determinant in {window}"
    elif len(fine) < count:
        diag = f"found {len(fine)} of {count} requested eigenvalues in {window}"
    k = min(len(coarse), len(fine))
    drift = tuple(float(abs(c - f)) / max(abs(f), 1e-300) for c, f in zip(coarse[:k], fine[:k]))
    if len(coarse) != len(fine):
        diag = (diag + "; " if diag else "") + "eigenvalue count differs between resolutions"
    return SpectrumReport(tuple(fine), tuple(coarse), drift, problem.grid_n, tuple(window), diag)


@dataclass(frozen=True)
class ComplexRootDiagnostic:
    """Complex-energy root search for the j = 0 pair."""

    roots: tuple[complex, ...]
    residuals: tuple[float, ...]
    max_imag: float
    hermiticity_defect: float


def _complex_match(problem: SpectralProblem, eps: complex, n: int) -> complex:
    sys_ = problem.system
    lo, hi = problem.chi_domain
    m, d = sys_.m, sys_.delta

    def deriv(chi, y):
        dw = 1j * d * float(sys_.w_over_s(chi))
        f4, f2 = y[..., 0], y[..., 1]
        return np.stack([1j * (eps * f4 - (m - dw) * f2), -1j * (eps * f2 - (m + dw) * f4)], axis=-1)

    L = _rk4_chi(deriv, np.linspace(J0_EDGE, lo, 9), np.array([1.0, -1.0], dtype=complex))
    R = _rk4_chi(deriv, np.linspace(math.pi - J0_EDGE, hi, 9), np.array([1.0, 1.0], dtype=complex))
    L = _rk4_u(deriv, _u_grid(lo, math.pi / 2, n // 2), L)
    R = _rk4_u(deriv, _u_grid(hi, math.pi / 2, n // 2), R)
    L, R = L / np.linalg.norm(L), R / np.linalg.norm(R)
    return complex(L[0] * R[1] - L[1] * R[0])


def j0_complex_diagnostics(problem: SpectralProblem, count: int,
                           window: Optional[tuple[float, float]] = None,
                           imag_offset: float = 0.05) -> ComplexRootDiagnostic:
    """Search complex energies for the j = 0 pair without assuming real roots.

    Starting points come from the real scan; each is displaced by
    ``imag_offset`` into the complex plane and polished by secant steps on
    the complex matching determinant.  The hermiticity defect compares the
    two effective masses m - i delta W/s and conj(m + i delta W/s) on the grid.
    """
    sys_ = problem.system
    if not (isinstance(sys_, DoubletRadialSystem) and sys_.variant is DoubletVariant.J0):
        raise ValueError("complex diagnostics apply to the j = 0 doublet pair")
    seeds = spectrum_s3(problem, count, window).eigenvalues
    n = 2 * problem.grid_n
    roots, res = [], []
    for s in seeds:
        z0, z1 = complex(s, imag_offset), complex(s + 1e-3, imag_offset)
        f0, f1 = _complex_match(problem, z0, n), _complex_match(problem, z1, n)
        for _ in range(60):
            if f1 == f0:
                break
            z0, z1 = z1, z1 - f1 * (z1 - z0) / (f1 - f0)
            f0, f1 = f1, _complex_match(problem, z1, n)
            if abs(z1 - z0) < 1e-14 * max(1.0, abs(z1)):
                break
        roots.append(z1)
        res.append(abs(f1))
    chi = np.linspace(*problem.chi_domain, 257)
    dw = 1j * sys_.delta * np.array([float(sys_.w_over_s(c)) for c in chi])
    herm = float(np.max(np.abs((sys_.m - dw) - np.conj(sys_.m + dw))))
    return ComplexRootDiagnostic(tuple(roots), tuple(res), max((abs(z.imag) for z in roots), default=0.0), herm)


# ---------------------------------------------------------------------------
# Abelian factorization of doublet states
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class AbelianSample:
    """An Abelian solution at charge product eg = +-1/2 sampled on an S3 grid.

    For j >= 1 ``values`` holds (f1, f2), the remaining components being
    f3 = mu f2 and f4 = mu f1.  For j = 0 it holds the two nonzero
    components: (f4, f2) at eg = -1/2 and (f1, f3) at eg = +1/2.
    """

    eg: HalfInt
    j: HalfInt
    epsilon: float
    m: float
    mu: int
    chi: np.ndarray
    values: np.ndarray
    derivs: np.ndarray


def _pair_system(j: HalfInt, epsilon: float, m: float, mu: int) -> DoubletRadialSystem:
    variant = DoubletVariant.J0 if j.doubled == 0 else DoubletVariant.MU_REDUCED
    return DoubletRadialSystem(epsilon, m, j, mu=mu, variant=variant)


def abelian_sample(j, eg, epsilon: float, m: float, mu: int, chi_grid, init_state) -> AbelianSample:
    """Integrate the Abelian pair for (j, eg) from ``init_state`` at ``chi_grid[0]``."""
    jj, gg = HalfInt.of(j), HalfInt.of(eg)
    if gg.doubled not in (1, -1):
        raise ValueError(f"eg must be +1/2 or -1/2, got {gg}")
    system = _pair_system(jj, epsilon, m, mu)
    chi = np.asarray(chi_grid, dtype=float)
    values = integrate(system, chi, np.asarray(init_state, dtype=complex))
    derivs = np.array([system.rhs(x, v) for x, v in zip(chi, values)])
    return AbelianSample(gg, jj, float(epsilon), float(m), mu, chi, values, derivs)


@dataclass(frozen=True)
class DoubletAssembly:
    chi: np.ndarray
    state: np.ndarray    # (n, 8): f1..f4, g1..g4
    derivs: np.ndarray   # (n, 8)
    residual: float


def _blocks(sample: AbelianSample) -> tuple[np.ndarray, np.ndarray]:
    v, d = sample.values, sample.derivs
    z = np.zeros(len(v), dtype=complex)
    if sample.j.doubled == 0:
        a, b, da, db = v[:, 0], v[:, 1], d[:, 0], d[:, 1]
        if sample.eg.doubled < 0:   # (0, f2, 0, f4) with (f4, f2) stored
            return np.stack([z, b, z, a], 1), np.stack([z, db, z, da], 1)
        return np.stack([a, z, b, z], 1), np.stack([da, z, db, z], 1)
    mu = sample.mu
    f1, f2, d1, d2 = v[:, 0], v[:, 1], d[:, 0], d[:, 1]
    return np.stack([f1, f2, mu * f2, mu * f1], 1), np.stack([d1, d2, mu * d2, mu * d1], 1)


def factorize_doublet(abelian_minus: AbelianSample, abelian_plus: AbelianSample,
                      A: float, delta: int, mu: int) -> DoubletAssembly:
    """Assemble T_{+1/2} x Phi(eg=-1/2) + c T_{-1/2} x Phi(eg=+1/2) and test it.

    ``c = mu delta e^{iA}`` for j >= 1 and ``delta e^{iA}`` for j = 0.  The
    residual is the largest entry of the eight doublet equations with
    W = F = Phi = 0.
    """
    lo, hi = abelian_minus, abelian_plus
    if lo.eg.doubled != -1 or hi.eg.doubled != 1:
        raise ValueError("expected the eg = -1/2 solution first and the eg = +1/2 solution second")
    for name in ("j", "epsilon", "m", "mu"):
        if getattr(lo, name) != getattr(hi, name):
            raise ValueError(f"Abelian inputs disagree on {name}")
    if lo.mu != mu:
        raise ValueError("mu of the assembly differs from the Abelian inputs")
    if not np.array_equal(lo.chi, hi.chi):
        raise ValueError("Abelian inputs are sampled on different grids")
    if delta not in (1, -1):
        raise ValueError("delta must be +1 or -1")
    coeff = delta * np.exp(1j * A) * (1 if lo.j.doubled == 0 else mu)
    fb, dfb = _blocks(lo)
    gb, dgb = _blocks(hi)
    state = np.concatenate([fb, coeff * gb], axis=1)
    derivs = np.concatenate([dfb, coeff * dgb], axis=1)
    J = float(lo.j)
    nu = math.sqrt(J * (J + 1))
    res = doublet_residual8(lo.epsilon, lo.m, nu, 0.0, state.T, derivs.T, x=lo.chi)
    return DoubletAssembly(lo.chi, state, derivs, float(np.max(np.abs(res))))


def radial_flux(f1, f2):
    """|f1|^2 - |f2|^2, constant in chi for real energy."""
    return np.abs(f1) ** 2 - np.abs(f2) ** 2
