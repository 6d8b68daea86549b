"""Half-integer index arithmetic, Wigner d/D functions and monopole harmonics.

Conventions
-----------
``d^j_{m'm}(beta) = <j m'| exp(-i beta J_y) |j m>`` and
``D^j_{m'm}(phi, theta, 0) = exp(-i m' phi) d^j_{m'm}(theta)``.

Separated wave functions use ``D^j_{-m,sigma}(phi, theta, 0)``; in this module
that function is written ``D_sigma`` and the magnetic number ``m`` is the
eigenvalue of ``J_3``.
"""
from __future__ import annotations

import cmath
import functools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator, Optional, Union

import numpy as np

Number = Union[int, float, Fraction, "HalfInt"]


# ---------------------------------------------------------------------------
# exact half-integers
# ---------------------------------------------------------------------------

@functools.total_ordering
@dataclass(frozen=True)
class HalfInt:
    """Exact multiple of 1/2, stored as twice its value."""

    doubled: int

    def __post_init__(self) -> None:
        if not isinstance(self.doubled, (int, np.integer)) or isinstance(self.doubled, bool):
            raise TypeError(f"doubled must be an int, got {self.doubled!r}")
        object.__setattr__(self, "doubled", int(self.doubled))

    @classmethod
    def of(cls, value: Number | str) -> "HalfInt":
        """Exact conversion; raises ValueError for values off the half-integer lattice."""
        h = try_halfint(value)
        if h is None:
            raise ValueError(f"{value!r} is not a half-integer")
        return h

    @property
    def is_integer(self) -> bool:
        return self.doubled % 2 == 0

    @property
    def value(self) -> Fraction:
        return Fraction(self.doubled, 2)

    def __float__(self) -> float:
        return self.doubled / 2

    def __int__(self) -> int:
        if not self.is_integer:
            raise ValueError(f"{self} is not an integer")
        return self.doubled // 2

    def __add__(self, other: Number) -> "HalfInt":
        return HalfInt(self.doubled + HalfInt.of(other).doubled)

    __radd__ = __add__

    def __sub__(self, other: Number) -> "HalfInt":
        return HalfInt(self.doubled - HalfInt.of(other).doubled)

    def __rsub__(self, other: Number) -> "HalfInt":
        return HalfInt(HalfInt.of(other).doubled - self.doubled)

    def __neg__(self) -> "HalfInt":
        return HalfInt(-self.doubled)

    def __abs__(self) -> "HalfInt":
        return HalfInt(abs(self.doubled))

    def __eq__(self, other: object) -> bool:
        if isinstance(other, HalfInt):
            return self.doubled == other.doubled
        h = try_halfint(other) if isinstance(other, (int, float, Fraction)) else None
        return h is not None and h.doubled == self.doubled

    def __lt__(self, other: Number) -> bool:
        if isinstance(other, HalfInt):
            return self.doubled < other.doubled
        return Fraction(self.doubled, 2) < Fraction(other)

    def __hash__(self) -> int:
        return hash(("HalfInt", self.doubled))

    def __str__(self) -> str:
        return str(self.doubled // 2) if self.is_integer else f"{self.doubled}/2"

    def __repr__(self) -> str:
        return f"HalfInt({self})"


def try_halfint(value: Number | str) -> Optional[HalfInt]:
    """Exact half-integer or None."""
    if isinstance(value, HalfInt):
        return value
    if isinstance(value, bool):
        return None
    if isinstance(value, (int, np.integer)):
        return HalfInt(2 * int(value))
    try:
        frac = Fraction(value) if not isinstance(value, float) else Fraction(value)
    except (ValueError, TypeError, ZeroDivisionError, OverflowError):
        return None
    twice = 2 * frac
    if twice.denominator != 1:
        return None
    return HalfInt(int(twice))


def half(value: Number | str) -> HalfInt:
    return HalfInt.of(value)


@dataclass(frozen=True)
class WignerIndex:
    j: HalfInt
    m: HalfInt
    sigma: HalfInt

    def __post_init__(self) -> None:
        for name in ("j", "m", "sigma"):
            object.__setattr__(self, name, HalfInt.of(getattr(self, name)))
        if not index_valid(self.j, self.m, self.sigma):
            raise ValueError(f"invalid Wigner index (j, m, sigma) = ({self.j}, {self.m}, {self.sigma})")


def index_valid(j: Number, m: Number, sigma: Number) -> bool:
    j, m, s = HalfInt.of(j), HalfInt.of(m), HalfInt.of(sigma)
    return (
        j.doubled >= 0
        and abs(m.doubled) <= j.doubled
        and abs(s.doubled) <= j.doubled
        and (j - m).is_integer
        and (j - s).is_integer
    )


# ---------------------------------------------------------------------------
# d functions
# ---------------------------------------------------------------------------

def _wigner_sum(j2: int, mp2: int, m2: int, beta):
    """Explicit finite-sum formula for d^j_{m'm}; arguments doubled."""
    kp, km = (j2 + m2) // 2, (j2 - m2) // 2
    jp, jm = (j2 + mp2) // 2, (j2 - mp2) // 2
    dm = (mp2 - m2) // 2
    pref = math.sqrt(math.factorial(jp) * math.factorial(jm) * math.factorial(kp) * math.factorial(km))
    c, s = np.cos(beta / 2), np.sin(beta / 2)
    total = 0.0 * c
    for k in range(max(0, -dm), min(kp, jm) + 1):
        den = math.factorial(kp - k) * math.factorial(k) * math.factorial(dm + k) * math.factorial(jm - k)
        total = total + (-1) ** (dm + k) * (pref / den) * c ** (kp + jm - 2 * k) * s ** (dm + 2 * k)
    return total


def _edge(j2: int, m2: int, mp2: int, beta):
    """d^j_{m m'} at |m| = j (doubled arguments)."""
    c, s = np.cos(beta / 2), np.sin(beta / 2)
    if m2 == j2:
        a, b = (j2 + mp2) // 2, (j2 - mp2) // 2
        return (-1) ** b * math.sqrt(math.comb(j2, a)) * c**a * s**b
    a, b = (j2 - mp2) // 2, (j2 + mp2) // 2
    return math.sqrt(math.comb(j2, a)) * c**a * s**b


def _recurrence(j2: int, m2: int, mp2: int, beta):
    """Three-term recurrence in j at fixed (m, m'); needs |m| >= |m'|."""
    m, mp = m2 / 2, mp2 / 2
    prev = 0.0 * beta
    cur = _edge(abs(m2), m2, mp2, beta)
    cosb = np.cos(beta)
    for jj2 in range(abs(m2) + 2, j2 + 1, 2):
        J = jj2 / 2
        lead = J * (2 * J - 1) / math.sqrt((J * J - m * m) * (J * J - mp * mp))
        mix = m * mp / (J * (J - 1)) if J > 1 else 0.0
        back = 0.0
        if J > 1:
            back = math.sqrt(((J - 1) ** 2 - m * m) * ((J - 1) ** 2 - mp * mp)) / ((J - 1) * (2 * J - 1))
        prev, cur = cur, lead * ((cosb - mix) * cur - back * prev)
    return cur


SMALL_J2 = 5  # closed-form sum up to j = 5/2


def _d_doubled(j2: int, m2: int, s2: int, theta):
    if j2 <= SMALL_J2:
        return _wigner_sum(j2, m2, s2, theta)
    if abs(m2) >= abs(s2):
        return _recurrence(j2, m2, s2, theta)
    # d_{m s} = (-1)^{m - s} d_{s m}
    return (-1) ** ((m2 - s2) // 2) * _recurrence(j2, s2, m2, theta)


def d_small(j: Number, m: Number, sigma: Number, theta):
    """Wigner small-d function d^j_{m,sigma}(theta).

    ``theta`` may be a float, a numpy array, or complex (the evaluation is
    analytic, which is what :func:`d_small_deriv` relies on).
    """
    idx = WignerIndex(j, m, sigma)
    out = _d_doubled(idx.j.doubled, idx.m.doubled, idx.sigma.doubled, np.asarray(theta))
    return out[()] if np.ndim(out) == 0 else out


def d_small_deriv(j: Number, m: Number, sigma: Number, theta):
    """d/dtheta of d^j_{m,sigma} by complex-step differentiation."""
    h = 1e-30
    return np.imag(d_small(j, m, sigma, np.asarray(theta, dtype=complex) + 1j * h)) / h


def D_function(j: Number, m_row: Number, m_col: Number, phi, theta):
    """D^j_{m_row, m_col}(phi, theta, 0) = exp(-i m_row phi) d^j_{m_row, m_col}(theta)."""
    mr = float(HalfInt.of(m_row))
    return np.exp(-1j * mr * np.asarray(phi)) * d_small(j, m_row, m_col, theta)


def D_sep(j: Number, m: Number, sigma: Number, phi, theta):
    """D^j_{-m, sigma}(phi, theta, 0), the angular factor of separated states."""
    return D_function(j, -HalfInt.of(m), sigma, phi, theta)


def D_sep_dtheta(j: Number, m: Number, sigma: Number, phi, theta):
    mm = float(HalfInt.of(m))
    return np.exp(1j * mm * np.asarray(phi)) * d_small_deriv(j, -HalfInt.of(m), sigma, theta)


def parity_phase(j: Number) -> complex:
    """exp(i pi j), the factor in P D^j_{-m,s} = exp(i pi j) D^j_{-m,-s}."""
    jj = HalfInt.of(j)
    return [1, 1j, -1, -1j][jj.doubled % 4]


def rotation_matrix_oracle(j: Number, beta: float) -> np.ndarray:
    """exp(-i beta J_y) built from ladder operators; rows/cols ordered m = j..-j."""
    from scipy.linalg import expm

    jj = float(HalfInt.of(j))
    ms = np.arange(jj, -jj - 1, -1)
    n = len(ms)
    jp = np.zeros((n, n))
    for col in range(1, n):
        m = ms[col]
        jp[col - 1, col] = math.sqrt(jj * (jj + 1) - m * (m + 1))
    jy = (jp - jp.T) / 2j
    return expm(-1j * beta * jy).real


# ---------------------------------------------------------------------------
# Pauli admissibility
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Rejected:
    reason: str = "lambda is not a half-integer"

    def __contains__(self, j: object) -> bool:
        return False


@dataclass(frozen=True)
class AllowedJSet:
    """j in {min_j, min_j + 1, ...}."""

    min_j: HalfInt

    def __contains__(self, j: object) -> bool:
        h = try_halfint(j)  # type: ignore[arg-type]
        return h is not None and h >= self.min_j and (h - self.min_j).is_integer

    def upto(self, j_max: Number) -> list[HalfInt]:
        top = HalfInt.of(j_max)
        return [HalfInt(d) for d in range(self.min_j.doubled, top.doubled + 1, 2)]


PauliResult = Union[Rejected, AllowedJSet]


def pauli_allowed(lam: Number) -> PauliResult:
    h = try_halfint(lam)
    if h is None:
        return Rejected()
    return AllowedJSet(abs(h))


def _poly_mul(p: list[int], q: list[int]) -> list[int]:
    out = [0] * (len(p) + len(q) - 1)
    for i, a in enumerate(p):
        for k, b in enumerate(q):
            out[i + k] += a * b
    return out


def _poly_pow(p: list[int], n: int) -> list[int]:
    out = [1]
    for _ in range(n):
        out = _poly_mul(out, p)
    return out


def _poly_deriv(p: list[int]) -> list[int]:
    return [k * c for k, c in enumerate(p)][1:] or [0]


def pauli_derivative_check(j: Number, lam: Number) -> bool:
    """True iff (d/dx)^(2j+1) [(1+x)^(j+lam) (1-x)^(j-lam)] vanishes identically.

    With non-negative integer exponents the product is expanded with exact
    integer coefficients and differentiated term by term.  Any other exponent
    pair gives a function with a branch point or a pole at x = +-1, none of
    whose derivatives vanish identically.
    """
    jj, ll = HalfInt.of(j), HalfInt.of(lam)
    if jj.doubled < 0:
        return False
    p, q = jj + ll, jj - ll
    if not (p.is_integer and q.is_integer) or p.doubled < 0 or q.doubled < 0:
        return False
    poly = _poly_mul(_poly_pow([1, 1], int(p)), _poly_pow([1, -1], int(q)))
    for _ in range(jj.doubled + 1):
        poly = _poly_deriv(poly)
    return all(c == 0 for c in poly)


def abelian_admissible(k: Number) -> PauliResult:
    """Allowed total momenta for an electron in a monopole field with k = eg.

    The two spin projections carry Pauli parameters ``lambda = +-1/2 - k``;
    each must pass the Pauli test and the state exists for every j admitted by
    at least one of them.
    """
    kk = try_halfint(k)
    if kk is None:
        return Rejected("eg is not a half-integer")
    sets = [pauli_allowed(HalfInt(s) - kk) for s in (1, -1)]
    mins = [s.min_j for s in sets if isinstance(s, AllowedJSet)]
    if not mins:
        return Rejected()
    return AllowedJSet(min(mins))


# ---------------------------------------------------------------------------
# recursion identities
# ---------------------------------------------------------------------------

@dataclass
class RecursionReport:
    max_defect: float = 0.0
    checked: list[str] = field(default_factory=list)
    skipped: list[str] = field(default_factory=list)

    def add(self, name: str, lhs: float, rhs: float) -> None:
        self.checked.append(name)
        self.max_defect = max(self.max_defect, abs(lhs - rhs))


_POLE_EPS = 1e-12


def cot_weighted(j: Number, m: Number, sigma: Number, theta: float) -> float:
    """[-m - sigma cos(theta)] / sin(theta) * D_sigma at phi = 0, with pole limits."""
    mm, ss = float(HalfInt.of(m)), float(HalfInt.of(sigma))
    msep = -HalfInt.of(m)
    if abs(math.sin(theta)) > _POLE_EPS:
        return (-mm - ss * math.cos(theta)) / math.sin(theta) * d_small(j, msep, sigma, theta)
    # numerator vanishes at the pole; take the ratio of derivatives
    dd = d_small_deriv(j, msep, sigma, theta)
    if math.cos(theta) > 0:
        return (-mm - ss) * dd
    return (mm - ss) * dd


def _D(j: HalfInt, m: HalfInt, s: HalfInt, theta: float) -> float:
    return float(d_small(j, -m, s, theta)) if index_valid(j, m, s) else 0.0


def recursion_report(j: Number, m: Number, k: Number, theta: float) -> RecursionReport:
    """Check the ladder identities around D_{k-1/2}, D_{k+1/2} and the integer-sigma set."""
    jj, mm, kk = HalfInt.of(j), HalfInt.of(m), HalfInt.of(k)
    if not (jj.doubled >= 0 and abs(mm.doubled) <= jj.doubled and (jj - mm).is_integer):
        raise ValueError(f"invalid (j, m) = ({jj}, {mm})")
    rep = RecursionReport()
    J, K = float(jj), float(kk)
    one, hf = HalfInt(2), HalfInt(1)
    D = lambda s: _D(jj, mm, s, theta)  # noqa: E731
    dD = lambda s: float(d_small_deriv(jj, -mm, s, theta))  # noqa: E731
    cw = lambda s: cot_weighted(jj, mm, s, theta)  # noqa: E731
    lo, hi = kk - hf, kk + hf

    def ok(s: HalfInt) -> bool:
        return index_valid(jj, mm, s)

    if (jj - hi).is_integer:
        a = 0.5 * math.sqrt(max((J + 0.5) ** 2 - K * K, 0.0))
        b = 0.5 * math.sqrt(max((J - K - 0.5) * (J + K + 1.5), 0.0))
        c = 0.5 * math.sqrt(max((J + K - 0.5) * (J - K + 1.5), 0.0))
        if ok(hi):
            rep.add("dD[k+1/2]", dD(hi), a * D(lo) - b * D(hi + one))
            rep.add("cotD[k+1/2]", cw(hi), -a * D(lo) - b * D(hi + one))
        else:
            rep.skipped += ["dD[k+1/2]", "cotD[k+1/2]"]
        if ok(lo):
            rep.add("dD[k-1/2]", dD(lo), c * D(lo - one) - a * D(hi))
            rep.add("cotD[k-1/2]", cw(lo), -c * D(lo - one) - a * D(hi))
        else:
            rep.skipped += ["dD[k-1/2]", "cotD[k-1/2]"]
        # lowest admissible j: only one of the two columns survives
        if kk.doubled > 0 and jj == kk - hf:
            g = 0.5 * math.sqrt(2 * K - 1)
            rep.add("jmin dD", dD(lo), g * D(lo - one))
            rep.add("jmin cotD", cw(lo), -g * D(lo - one))
        elif kk.doubled < 0 and jj == -kk - hf:
            g = 0.5 * math.sqrt(-2 * K - 1)
            rep.add("jmin dD", dD(hi), -g * D(hi + one))
            rep.add("jmin cotD", cw(hi), -g * D(hi + one))
    else:
        rep.skipped.append("k-ladder (j - k - 1/2 not an integer)")

    if jj.is_integer and jj.doubled >= 2:
        nu = math.sqrt(J * (J + 1))
        om = math.sqrt((J - 1) * (J + 2))
        Mm = float(mm)
        s = math.sin(theta)
        m1, z, p1 = HalfInt(-2), HalfInt(0), HalfInt(2)
        rep.add("dD[-1]", dD(m1), 0.5 * (om * D(HalfInt(-4)) - nu * D(z)))
        rep.add("dD[0]", dD(z), 0.5 * nu * (D(m1) - D(p1)))
        rep.add("dD[+1]", dD(p1), 0.5 * (nu * D(z) - om * D(HalfInt(4))))
        if abs(s) > _POLE_EPS:
            rep.add("(m-cos)/sin D[-1]", (Mm - math.cos(theta)) / s * D(m1), 0.5 * (om * D(HalfInt(-4)) + nu * D(z)))
            rep.add("m/sin D[0]", Mm / s * D(z), 0.5 * nu * (D(m1) + D(p1)))
            rep.add("(m+cos)/sin D[+1]", (Mm + math.cos(theta)) / s * D(p1), 0.5 * (nu * D(z) + om * D(HalfInt(4))))
        else:
            rep.skipped += ["(m-cos)/sin D[-1]", "m/sin D[0]", "(m+cos)/sin D[+1]"]
    return rep


def recursion_check_abelian(j: Number, m: Number, k: Number, theta: float) -> float:
    """Largest absolute defect over the applicable ladder identities."""
    return recursion_report(j, m, k, theta).max_defect


# ---------------------------------------------------------------------------
# spinor harmonics
# ---------------------------------------------------------------------------

def helicity_spinors(theta, phi) -> tuple[np.ndarray, np.ndarray]:
    """(chi_{+1/2}, chi_{-1/2}), the columns of the local spin frame."""
    c, s = np.cos(np.asarray(theta) / 2), np.sin(np.asarray(theta) / 2)
    em, ep = np.exp(-0.5j * np.asarray(phi)), np.exp(0.5j * np.asarray(phi))
    return np.array([c * em, s * ep]), np.array([-s * em, c * ep])


def monopole_harmonics(j: Number, m: Number, k: Number, theta, phi) -> tuple[np.ndarray, np.ndarray]:
    """xi^(1,2) = chi_{-1/2} D_{k+1/2} +- chi_{+1/2} D_{k-1/2}."""
    jj, mm, kk = HalfInt.of(j), HalfInt.of(m), HalfInt.of(k)
    up, dn = kk + HalfInt(1), kk - HalfInt(1)
    if not (index_valid(jj, mm, up) and index_valid(jj, mm, dn)):
        raise ValueError(f"D_(k+-1/2) not defined for j={jj}, m={mm}, k={kk}")
    chi_p, chi_m = helicity_spinors(theta, phi)
    Dp, Dm = D_sep(jj, mm, up, phi, theta), D_sep(jj, mm, dn, phi, theta)
    return chi_m * Dp + chi_p * Dm, chi_m * Dp - chi_p * Dm


@dataclass(frozen=True)
class MonopoleHarmonic:
    """One of xi^(1), xi^(2) as a callable 2-spinor field on the sphere."""

    variant: int  # 1 or 2
    j: HalfInt
    m: HalfInt
    k: HalfInt

    def __post_init__(self) -> None:
        if self.variant not in (1, 2):
            raise ValueError(f"variant must be 1 or 2, got {self.variant}")
        for name in ("j", "m", "k"):
            object.__setattr__(self, name, HalfInt.of(getattr(self, name)))

    def __call__(self, theta, phi) -> np.ndarray:
        return monopole_harmonics(self.j, self.m, self.k, theta, phi)[self.variant - 1]


def spherical_spinor(j: Number, m: Number, upper: bool, theta, phi) -> np.ndarray:
    """Omega^{j +- 1/2}_{jm} written through D-functions (upper=True for l = j + 1/2)."""
    jj, mm = HalfInt.of(j), HalfInt.of(m)
    if jj.is_integer:
        raise ValueError("spherical spinors need half-integer j")
    sign = (-1) ** int(mm + HalfInt(1))
    norm = sign * math.sqrt((float(jj) * 2 + 1) / (8 * math.pi))
    xi1, xi2 = monopole_harmonics(jj, mm, 0, theta, phi)
    return norm * (xi1 if upper else xi2)
