"""Discrete operators, hidden symmetry and angular-momentum algebra.

A separated state is a finite sum of slots ``coeff * T_iso (x) e_comp * D_sigma``
with ``D_sigma = D^j_{-m,sigma}(phi, theta, 0)``.  Constant operators that
include the point map (theta, phi) -> (pi - theta, phi + pi) act on slots
exactly through ``P D^j_{-m,sigma} = e^{i pi j} D^j_{-m,-sigma}``.
Differential operators (the generalized Dirac operator and the total angular
momenta) are applied pointwise with analytic theta-derivatives.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Mapping, Optional, Sequence, Union

import numpy as np

from .dirac_radial import doublet_residual8
from .gauge import AbelianGaugeKind, rotation_from_gibbs, u1_frame_data
from .wigner import (
    D_sep,
    D_sep_dtheta,
    HalfInt,
    Rejected,
    abelian_admissible,
    index_valid,
    parity_phase,
    pauli_allowed,
)

Number = Union[int, float, str, HalfInt]

# --- matrices in the Weyl bispinor representation -----------------------

PAULI = (
    np.array([[0, 1], [1, 0]], dtype=complex),
    np.array([[0, -1j], [1j, 0]], dtype=complex),
    np.array([[1, 0], [0, -1]], dtype=complex),
)
_I2, _Z2 = np.eye(2, dtype=complex), np.zeros((2, 2), dtype=complex)
GAMMA0 = np.block([[_Z2, _I2], [_I2, _Z2]])
GAMMA = tuple(np.block([[_Z2, -s], [s, _Z2]]) for s in PAULI)
GAMMA5 = -1j * GAMMA0 @ GAMMA[0] @ GAMMA[1] @ GAMMA[2]
SIGMA12 = (GAMMA[0] @ GAMMA[1] - GAMMA[1] @ GAMMA[0]) / 4
I_SIGMA12 = 1j * SIGMA12
P_BISPINOR = -GAMMA5 @ GAMMA[0]
K_PREFACTOR = -1j * GAMMA0 @ GAMMA[2]
T3 = np.diag([0.5, -0.5]).astype(complex)
SPIN_DIAG = tuple(float(v) for v in np.real(np.diag(I_SIGMA12)))


def pi_A(A: float) -> np.ndarray:
    """Isotopic factor a sigma1 + b sigma2 with a + i b = e^{iA}."""
    return math.cos(A) * PAULI[0] + math.sin(A) * PAULI[1]


# --- separated states -----------------------------------------------------

class StateKind(str, enum.Enum):
    ELECTRON = "electron"
    ABELIAN = "abelian"
    DOUBLET = "doublet"


class FrameError(ValueError):
    """Raised when an operator is applied in an unsupported gauge frame."""


Slot = tuple[int, int, int]  # (doubled isospin or 0, bispinor component, doubled sigma)


@dataclass(frozen=True)
class SeparatedState:
    kind: StateKind
    j: HalfInt
    m: HalfInt
    terms: Mapping[Slot, complex]
    k: HalfInt = HalfInt(0)
    iso_frame: str = "schwinger"

    def __post_init__(self) -> None:
        object.__setattr__(self, "j", HalfInt.of(self.j))
        object.__setattr__(self, "m", HalfInt.of(self.m))
        object.__setattr__(self, "k", HalfInt.of(self.k))
        clean = {}
        for (iso, c, s2), v in self.terms.items():
            if not index_valid(self.j, self.m, HalfInt(s2)):
                if np.any(np.abs(v) > 0):
                    raise ValueError(f"slot sigma={HalfInt(s2)} is not available for j={self.j}")
                continue
            clean[(iso, c, s2)] = v
        object.__setattr__(self, "terms", clean)

    def k_eff(self, iso: int) -> float:
        """Charge entering (i sigma12 - k): k for Abelian states, -t3 for doublets."""
        if self.kind is StateKind.DOUBLET:
            return -iso / 2
        return float(self.k) if self.kind is StateKind.ABELIAN else 0.0

    @property
    def iso_dim(self) -> int:
        return 2 if self.kind is StateKind.DOUBLET else 1

    def replace_terms(self, terms: Mapping[Slot, complex]) -> "SeparatedState":
        return SeparatedState(self.kind, self.j, self.m, terms, self.k, self.iso_frame)

    def norm(self) -> float:
        return math.sqrt(sum(float(np.sum(np.abs(v) ** 2)) for v in self.terms.values()))

    def evaluate(self, theta, phi) -> np.ndarray:
        """Samples with trailing axis of length 4 (or 8 = iso x bispinor)."""
        theta, phi = np.broadcast_arrays(np.asarray(theta, float), np.asarray(phi, float))
        out = np.zeros(theta.shape + (4 * self.iso_dim,), dtype=complex)
        for (iso, c, s2), v in self.terms.items():
            out[..., _flat(iso, c)] += v * D_sep(self.j, self.m, HalfInt(s2), phi, theta)
        return out


def _flat(iso: int, comp: int) -> int:
    return comp if iso == 0 else (0 if iso > 0 else 4) + comp


def _sigmas(offset: HalfInt) -> list[int]:
    """Doubled sigma of each bispinor component for charge ``offset``: k - s_c."""
    return [offset.doubled - round(2 * s) for s in SPIN_DIAG]


def electron_state(j: Number, m: Number, f: Sequence[complex]) -> SeparatedState:
    return abelian_state(j, m, 0, f, kind=StateKind.ELECTRON)


def abelian_state(j: Number, m: Number, k: Number, f: Sequence[complex],
                  kind: StateKind = StateKind.ABELIAN) -> SeparatedState:
    kk = HalfInt.of(k)
    terms = {(0, c, s2): complex(f[c]) if np.ndim(f[c]) == 0 else f[c] for c, s2 in enumerate(_sigmas(kk))}
    return SeparatedState(kind, j, m, terms, kk)


def doublet_state(j: Number, m: Number, f: Sequence[complex], g: Sequence[complex],
                  iso_frame: str = "schwinger") -> SeparatedState:
    """T_{+1/2} x (f1 D_-1, f2 D_0, f3 D_-1, f4 D_0) + T_{-1/2} x (g1 D_0, g2 D_1, g3 D_0, g4 D_1)."""
    terms = {}
    for iso, vals in ((1, f), (-1, g)):
        for c, s2 in enumerate(_sigmas(HalfInt(-iso))):
            terms[(iso, c, s2)] = complex(vals[c]) if np.ndim(vals[c]) == 0 else vals[c]
    return SeparatedState(StateKind.DOUBLET, j, m, terms, HalfInt(0), iso_frame)


SeparatedDoubletState = SeparatedState  # StateKind.DOUBLET instances


def doublet_blocks(state: SeparatedState) -> tuple[list, list]:
    """(f1..f4, g1..g4) of a doublet state; absent slots read as zero."""
    f = [state.terms.get((1, c, s2), 0) for c, s2 in enumerate(_sigmas(HalfInt(-1)))]
    g = [state.terms.get((-1, c, s2), 0) for c, s2 in enumerate(_sigmas(HalfInt(1)))]
    return f, g


# --- constant discrete operators -------------------------------------------

class OperatorKind(str, enum.Enum):
    PARITY_BISPINOR = "parity_bispinor"
    N_A = "N_A"
    K_HAT = "K_hat"
    PI_SPHERICAL = "Pi_spherical"


@dataclass(frozen=True)
class DiscreteOperator:
    kind: OperatorKind
    A: float = 0.0

    @property
    def bispinor(self) -> np.ndarray:
        if self.kind is OperatorKind.K_HAT:
            raise ValueError("the generalized Dirac operator is differential, not a constant matrix")
        return P_BISPINOR

    @property
    def iso(self) -> Optional[np.ndarray]:
        return pi_A(self.A) if self.kind is OperatorKind.N_A else None

    def matrix(self) -> np.ndarray:
        """Constant matrix acting before the point map (iso x bispinor when isotopic)."""
        return self.bispinor if self.iso is None else np.kron(self.iso, self.bispinor)


def apply_discrete(op: DiscreteOperator, state: SeparatedState) -> SeparatedState:
    """Exact slot-level action of a constant matrix composed with the point map."""
    M, iso_m = op.bispinor, op.iso
    if iso_m is not None and state.kind is not StateKind.DOUBLET:
        raise ValueError("the isotopic factor needs a doublet state")
    ph = parity_phase(state.j)
    out: dict[Slot, complex] = {}
    for (iso, c, s2), v in state.terms.items():
        isos = [(iso, 1.0)] if iso_m is None else [(1 - 2 * r, iso_m[r, 0 if iso > 0 else 1]) for r in range(2)]
        for new_iso, a in isos:
            for r in range(4):
                w = a * M[r, c]
                if w != 0:
                    key = (new_iso, r, -s2)
                    out[key] = out.get(key, 0) + w * ph * v
    return state.replace_terms(out)


def _keys(*states: SeparatedState) -> list[Slot]:
    return sorted({key for s in states for key in s.terms})


def state_difference(a: SeparatedState, b: SeparatedState, scale: complex = 1.0) -> float:
    """Norm of a - scale * b over the union of slots."""
    tot = 0.0
    for key in _keys(a, b):
        tot += float(np.sum(np.abs(a.terms.get(key, 0) - scale * b.terms.get(key, 0)) ** 2))
    return math.sqrt(tot)


def eigen_fit(state: SeparatedState, image: SeparatedState) -> tuple[complex, float]:
    """Least-squares eigenvalue and relative defect of image = lambda * state."""
    keys = _keys(state, image)
    num = sum(np.sum(np.conj(state.terms.get(k, 0)) * image.terms.get(k, 0)) for k in keys)
    den = state.norm() ** 2
    if den == 0:
        raise ValueError("zero state")
    lam = complex(num / den)
    return lam, state_difference(image, state, lam) / math.sqrt(den)


@dataclass(frozen=True)
class EigenCheck:
    image: SeparatedState
    eigenvalue: complex
    delta: int
    defect: float


def apply_parity(state: SeparatedState) -> EigenCheck:
    """Spherical-tetrad reflection -gamma5 gamma1 x P on an electron or Abelian state.

    ``delta`` labels the candidate eigenvalues delta * e^{i pi (j+1)}; ``defect``
    is the relative distance to the closer one.
    """
    image = apply_discrete(DiscreteOperator(OperatorKind.PI_SPHERICAL), state)
    return _best_delta(state, image)


def _best_delta(state: SeparatedState, image: SeparatedState) -> EigenCheck:
    base = parity_phase(state.j + HalfInt(2))
    n = state.norm()
    best = min((state_difference(image, state, d * base) / n, d) for d in (1, -1))
    return EigenCheck(image, best[1] * base, best[1], best[0])


def apply_N_A(A: float, state: SeparatedState) -> EigenCheck:
    """N_A = pi_A x P_bisp x P on a doublet state in the Schwinger isotopic frame."""
    if state.kind is not StateKind.DOUBLET:
        raise ValueError("N_A acts on doublet states")
    if state.iso_frame != "schwinger":
        raise FrameError(f"N_A is defined in the Schwinger isotopic frame, got {state.iso_frame!r}")
    image = apply_discrete(DiscreteOperator(OperatorKind.N_A, A), state)
    return _best_delta(state, image)


def constrained_doublet(j: Number, m: Number, f: Sequence[complex], A: float, delta: int) -> SeparatedState:
    """Doublet state with g_i = delta e^{iA} f_{5-i}."""
    c = delta * np.exp(1j * A)
    return doublet_state(j, m, f, [c * f[3], c * f[2], c * f[1], c * f[0]])


def apply_parity_sampled(samples: np.ndarray, thetas: np.ndarray, phis: np.ndarray,
                         iso: Optional[np.ndarray] = None, tol: float = 1e-12, m: Number = 0) -> np.ndarray:
    """Reflection on samples of shape (n_theta, n_phi, 4 or 8) on a product grid.

    The theta grid must be symmetric about pi/2 and the phi grid uniform with
    an even number of points over one period, so that the point map permutes
    grid nodes.  ``m`` is the J3 label of the sampled multiplet; half-integer
    m makes the samples antiperiodic in phi.
    """
    thetas, phis = np.asarray(thetas, float), np.asarray(phis, float)
    if np.max(np.abs(thetas[::-1] - (math.pi - thetas))) > tol:
        raise ValueError("theta grid is not symmetric under theta -> pi - theta")
    n = len(phis)
    step = 2 * math.pi / n if n else 0.0
    if n % 2 or np.max(np.abs(np.diff(phis) - step)) > tol:
        raise ValueError("phi grid must be uniform over one period with an even number of points")
    M = P_BISPINOR if iso is None else np.kron(iso, P_BISPINOR)
    shifted = np.arange(n) + n // 2
    src = samples[::-1][:, shifted % n]
    # nodes that wrap past the period pick up e^{2 pi i m}
    if not HalfInt.of(m).is_integer:
        src = src * np.where(shifted >= n, -1.0, 1.0)[None, :, None]
    return np.einsum("ab,...b->...a", M, src)


apply_parity_bispinor = apply_parity_sampled


# --- generalized Dirac operator --------------------------------------------

def sigma_operator(state: SeparatedState, theta, phi) -> np.ndarray:
    """Angular operator i g1 d_theta + g2 (i d_phi + (i sigma12 - k) cos theta)/sin theta, pointwise."""
    theta, phi = np.broadcast_arrays(np.asarray(theta, float), np.asarray(phi, float))
    if np.any(np.sin(theta) < 1e-8):
        raise ValueError("pointwise evaluation needs theta away from the poles")
    out = np.zeros(theta.shape + (4 * state.iso_dim,), dtype=complex)
    m = float(state.m)
    for (iso, c, s2), v in state.terms.items():
        s = HalfInt(s2)
        D = D_sep(state.j, state.m, s, phi, theta)
        dD = D_sep_dtheta(state.j, state.m, s, phi, theta)
        ang = (-m + (SPIN_DIAG[c] - state.k_eff(iso)) * np.cos(theta)) / np.sin(theta)
        vec = 1j * GAMMA[0][:, c][None, :] * (v * dD)[..., None] + GAMMA[1][:, c][None, :] * (v * D * ang)[..., None]
        base = 0 if iso >= 0 else 4
        out[..., base:base + 4] += vec.reshape(theta.shape + (4,))
    return out


@dataclass(frozen=True)
class KHatResult:
    values: np.ndarray
    eigenvalue: float
    defect: float


def apply_K_hat(state: SeparatedState, theta, phi, W_nonzero: bool = False) -> KHatResult:
    """K = -i g0 g3 Sigma applied pointwise, with a least-squares eigenvalue.

    ``defect`` is max |K psi - lambda psi| / max |psi| over the sample points.
    """
    if state.kind is StateKind.DOUBLET and W_nonzero:
        raise ValueError("the generalized Dirac operator does not commute with a W != 0 doublet Hamiltonian")
    sig = sigma_operator(state, theta, phi)
    blocks = sig.shape[-1] // 4
    Kpsi = np.concatenate([np.einsum("ab,...b->...a", K_PREFACTOR, sig[..., 4 * b:4 * b + 4])
                           for b in range(blocks)], axis=-1)
    psi = state.evaluate(theta, phi)
    den = np.vdot(psi, psi)
    scale = float(np.max(np.abs(psi)))
    if scale == 0:
        raise ValueError("state vanishes on the sample points")
    lam = complex(np.vdot(psi, Kpsi) / den) if abs(den) > 0 else 0.0
    return KHatResult(Kpsi, lam.real, float(np.max(np.abs(Kpsi - lam * psi))) / scale)


def K_hat_expected(kind: StateKind, j: Number, sign: int, k: Number = 0) -> float:
    """Closed-form eigenvalue: -delta sqrt((j+1/2)^2 - k^2), or -mu sqrt(j(j+1)) for doublets."""
    J = float(HalfInt.of(j))
    if kind is StateKind.DOUBLET:
        return -sign * math.sqrt(J * (J + 1))
    kk = float(HalfInt.of(k))
    return -sign * math.sqrt(max((J + 0.5) ** 2 - kk * kk, 0.0))


def k_hat_state(kind: StateKind, j: Number, m: Number, sign: int, k: Number = 0,
                f1: complex = 1.0, f2: complex = 0.5) -> SeparatedState:
    """State with f4 = sign f1, f3 = sign f2 (and the same pattern in both doublet blocks)."""
    f = [f1, f2, sign * f2, sign * f1]
    if kind is StateKind.DOUBLET:
        return doublet_state(j, m, f, [0.3 * x for x in f])
    if kind is StateKind.ELECTRON:
        return electron_state(j, m, f)
    return abelian_state(j, m, k, f)


# --- angular momentum realizations -----------------------------------------

class RealizationKind(str, enum.Enum):
    PAULI_LAMBDA = "pauli_lambda"
    ABELIAN_K = "abelian_k"
    DOUBLET_SCHWINGER = "doublet_schwinger"
    DIRAC_GAUGE = "dirac_gauge"
    WU_YANG = "wu_yang"


@dataclass(frozen=True)
class Realization:
    kind: RealizationKind
    lam: HalfInt = HalfInt(0)
    k: HalfInt = HalfInt(0)
    chart: str = "north"

    @classmethod
    def pauli(cls, lam: Number) -> "Realization":
        return cls(RealizationKind.PAULI_LAMBDA, lam=HalfInt.of(lam))

    @classmethod
    def abelian(cls, k: Number) -> "Realization":
        return cls(RealizationKind.ABELIAN_K, k=HalfInt.of(k))

    @classmethod
    def doublet(cls) -> "Realization":
        return cls(RealizationKind.DOUBLET_SCHWINGER)

    @classmethod
    def dirac(cls, k: Number) -> "Realization":
        return cls(RealizationKind.DIRAC_GAUGE, k=HalfInt.of(k))

    @classmethod
    def wu_yang(cls, k: Number, chart: str) -> "Realization":
        if chart not in ("north", "south"):
            raise ValueError("chart must be 'north' or 'south'")
        return cls(RealizationKind.WU_YANG, k=HalfInt.of(k), chart=chart)


@dataclass(frozen=True)
class Channel:
    """One diagonal entry of J: J_1 = l_1 + (lam0 + cos_coef cos theta) cos phi / sin theta."""

    lam0: float
    cos_coef: float
    sigma: HalfInt
    phase: float = 0.0
    j3_shift: float = 0.0


def channels(rz: Realization) -> list[Channel]:
    if rz.kind is RealizationKind.PAULI_LAMBDA:
        return [Channel(float(rz.lam), 0.0, -rz.lam)]
    if rz.kind is RealizationKind.DOUBLET_SCHWINGER:
        return [Channel(s + t, 0.0, HalfInt.of(-(s + t))) for t in (0.5, -0.5) for s in SPIN_DIAG]
    k = float(rz.k)
    if rz.kind is RealizationKind.ABELIAN_K:
        return [Channel(s - k, 0.0, HalfInt.of(k - s)) for s in SPIN_DIAG]
    frame = AbelianGaugeKind.DIRAC if rz.kind is RealizationKind.DIRAC_GAUGE else (
        AbelianGaugeKind.WU_YANG_N if rz.chart == "north" else AbelianGaugeKind.WU_YANG_S)
    fd = u1_frame_data(frame)
    return [Channel(s - k, fd.cos_k * k, HalfInt.of(k - s), fd.phase_k * k, fd.j3_shift_k * k)
            for s in SPIN_DIAG]


def _admissible_js(sigma: HalfInt, j_max: float) -> list[HalfInt]:
    res = pauli_allowed(-sigma)
    if isinstance(res, Rejected):
        return []
    return res.upto(j_max)


def _sample_points(rz: Realization, n: int = 48) -> tuple[np.ndarray, np.ndarray]:
    lo, hi = 0.15, math.pi - 0.15
    if rz.kind is RealizationKind.WU_YANG:
        lo, hi = (0.15, math.pi / 2) if rz.chart == "north" else (math.pi / 2, math.pi - 0.15)
    golden = (math.sqrt(5) - 1) / 2
    i = np.arange(n)
    return lo + (hi - lo) * ((i + 0.5) / n), -math.pi + 2 * math.pi * ((i * golden) % 1.0)


def _j_matrices(ch: Channel, j: HalfInt, theta: np.ndarray, phi: np.ndarray) -> tuple[list[np.ndarray], float]:
    """Matrices of J_1, J_2, J_3 on the multiplet {e^{i p phi} D^j_{-m,sigma}} and the closure residual."""
    ms = [HalfInt(d) for d in range(-j.doubled, j.doubled + 1, 2)]
    ph = np.exp(1j * ch.phase * phi)
    B = np.stack([ph * D_sep(j, m, ch.sigma, phi, theta) for m in ms], axis=1)
    dth = np.stack([ph * D_sep_dtheta(j, m, ch.sigma, phi, theta) for m in ms], axis=1)
    dph = B * (1j * (np.array([float(m) for m in ms]) + ch.phase))[None, :]
    st, ct, sp, cp = np.sin(theta)[:, None], np.cos(theta)[:, None], np.sin(phi)[:, None], np.cos(phi)[:, None]
    lam = (ch.lam0 + ch.cos_coef * ct) / st
    J1 = 1j * (sp * dth + ct / st * cp * dph) + lam * cp * B
    J2 = 1j * (-cp * dth + ct / st * sp * dph) + lam * sp * B
    J3 = -1j * dph + ch.j3_shift * B
    mats, resid = [], 0.0
    scale = float(np.max(np.abs(B)))
    for Jb in (J1, J2, J3):
        X, *_ = np.linalg.lstsq(B, Jb, rcond=None)
        resid = max(resid, float(np.max(np.abs(B @ X - Jb))) / scale)
        mats.append(X)
    return mats, resid


@dataclass(frozen=True)
class AlgebraReport:
    max_defect: float
    closure: float
    casimir: float
    multiplets: int


def su2_algebra_report(rz: Realization, j_max: Number = 4) -> AlgebraReport:
    """Commutator, closure and Casimir defects over all multiplets with j <= j_max."""
    jm = float(HalfInt.of(j_max))
    if jm > 6:
        raise ValueError("basis truncation supports j_max <= 6")
    theta, phi = _sample_points(rz)
    worst = closure = casimir = 0.0
    count = 0
    for ch in channels(rz):
        for j in _admissible_js(ch.sigma, jm):
            (J1, J2, J3), res = _j_matrices(ch, j, theta, phi)
            closure = max(closure, res)
            for a, b, c in ((J1, J2, J3), (J2, J3, J1), (J3, J1, J2)):
                worst = max(worst, float(np.max(np.abs(a @ b - b @ a - 1j * c))))
            J = float(j)
            cas = J1 @ J1 + J2 @ J2 + J3 @ J3 - J * (J + 1) * np.eye(len(J1))
            casimir = max(casimir, float(np.max(np.abs(cas))))
            count += 1
    return AlgebraReport(max(worst, closure), closure, casimir, count)


def su2_algebra_defect(rz: Realization, j_max: Number = 4) -> float:
    return su2_algebra_report(rz, j_max).max_defect


def j3_spectrum(rz: Realization, j: Number) -> list[float]:
    """Sorted J_3 eigenvalues over every channel admitting ``j``."""
    jj = HalfInt.of(j)
    theta, phi = _sample_points(rz)
    vals: list[float] = []
    for ch in channels(rz):
        if jj in _admissible_js(ch.sigma, float(jj)):
            (_, _, J3), _ = _j_matrices(ch, jj, theta, phi)
            vals.extend(np.linalg.eigvals(J3).real.tolist())
    return sorted(vals)


# --- A-family of isotopic transformations ----------------------------------

def U_A_matrix(frame: str, A: float, theta: float = 0.0, phi: float = 0.0) -> np.ndarray:
    """Schwinger: diag(1, e^{iA}); Cartesian: e^{iA/2} exp(-i (A/2) sigma . n)."""
    if frame == "schwinger":
        return np.diag([1.0, np.exp(1j * A)])
    if frame == "cartesian":
        n = (math.sin(theta) * math.cos(phi), math.sin(theta) * math.sin(phi), math.cos(theta))
        sn = sum(c * s for c, s in zip(n, PAULI))
        return np.exp(0.5j * A) * (math.cos(A / 2) * _I2 - 1j * math.sin(A / 2) * sn)
    raise ValueError(f"unknown isotopic frame {frame!r}")


def spinor_from_gibbs(c: Sequence[float]) -> np.ndarray:
    """SU(2) element (1 - i sigma . c)/sqrt(1 + c^2) covering the Gibbs rotation."""
    c = np.asarray(c, float)
    return (_I2 - 1j * sum(ci * s for ci, s in zip(c, PAULI))) / math.sqrt(1 + c @ c)


def adjoint_of(U: np.ndarray) -> np.ndarray:
    """Rotation R with U sigma_a U^dagger = sigma_b R_ba."""
    R = np.empty((3, 3))
    for a in range(3):
        X = U @ PAULI[a] @ U.conj().T
        for b in range(3):
            R[b, a] = 0.5 * np.trace(X @ PAULI[b]).real
    return R


def up_to_phase(X: np.ndarray, Y: np.ndarray) -> float:
    """min over unit phases of max |X - e^{ia} Y|."""
    z = np.vdot(Y, X)
    ph = z / abs(z) if abs(z) > 0 else 1.0
    return float(np.max(np.abs(X - ph * Y)))


def transport_schwinger_to_cartesian(A: float, c: Sequence[float]) -> np.ndarray:
    """S^dagger U_S(A) S with S the SU(2) image of the Gibbs rotation c."""
    S = spinor_from_gibbs(c)
    return S.conj().T @ U_A_matrix("schwinger", A) @ S


# --- selection rules ---------------------------------------------------------

class SelectionOutcome(str, enum.Enum):
    FORCED_ZERO = "ForcedZero"
    UNCONSTRAINED = "Unconstrained"


def selection_factor(Omega: int, delta: int, delta_prime: int, J: Number, J_prime: Number) -> int:
    """1 + Omega delta delta' (-1)^{J + J'}; J + J' must be an integer."""
    for v in (Omega, delta, delta_prime):
        if v not in (1, -1):
            raise ValueError("Omega, delta and delta' must be +1 or -1")
    tot = HalfInt.of(J) + HalfInt.of(J_prime)
    if not tot.is_integer:
        raise ValueError("J + J' must be an integer")
    return 1 + Omega * delta * delta_prime * (1 if (tot.doubled // 2) % 2 == 0 else -1)


def selection_rule(Omega: int, delta: int, delta_prime: int, J: Number, J_prime: Number) -> SelectionOutcome:
    f = selection_factor(Omega, delta, delta_prime, J, J_prime)
    return SelectionOutcome.FORCED_ZERO if f == 0 else SelectionOutcome.UNCONSTRAINED


# --- consistency of the N_A-constrained radial system ----------------------

_EPS_SLOTS = (2, 3, 0, 1, 6, 7, 4, 5)  # component carrying eps in each of the eight equations


def _linear_forms(nu: float, W_over_s: float, Ft: float, Pt: float, m: float, s: float, eps: float = 0.0):
    """Coefficient matrices (Lf, Ld) of the eight equations in (F, F')."""
    Lf = np.zeros((8, 8), dtype=complex)
    Ld = np.zeros((8, 8), dtype=complex)
    z = np.zeros(8, dtype=complex)
    for i in range(8):
        e = z.copy()
        e[i] = 1.0
        Lf[:, i] = doublet_residual8(eps, m, nu, W_over_s, e, z, Ft, Pt, s=s)
        Ld[:, i] = doublet_residual8(eps, m, nu, W_over_s, z, e, Ft, Pt, s=s)
    return Lf, Ld


def _constraint_map(A: float, delta: int) -> np.ndarray:
    """(f1..f4) -> (f1..f4, g1..g4) with g_i = delta e^{iA} f_{5-i}."""
    C = np.zeros((8, 4), dtype=complex)
    C[:4, :4] = np.eye(4)
    C[4:, :4] = delta * np.exp(1j * A) * np.eye(4)[::-1]
    return C


def na_consistency_residual(A: float, W_over_s: float, Ft: float = 0.0, Pt: float = 0.0, *,
                            delta: int = 1, j: Number = 1, m: float = 1.0, eps: float = 1.3,
                            s: float = 0.7) -> float:
    """Distance of the four g-equations from the span of the four f-equations.

    The eight equations, restricted by g_i = delta e^{iA} f_{5-i}, are linear
    forms in (f, f').  The system is consistent when every g-equation is a
    combination of the f-equations; the residual is the largest normalized
    distance of a g-row from that row space.
    """
    J = float(HalfInt.of(j))
    nu = math.sqrt(J * (J + 1))
    Lf, Ld = _linear_forms(nu, W_over_s, Ft, Pt, m, s, eps)
    C = _constraint_map(A, delta)
    rows = np.concatenate([Lf @ C, Ld @ C], axis=1)  # 8 x 8 forms in (f, f')
    top, bottom = rows[:4], rows[4:]
    Q, _ = np.linalg.qr(top.conj().T)
    worst = 0.0
    for r in bottom:
        rr = r.conj()
        perp = rr - Q @ (Q.conj().T @ rr)
        worst = max(worst, float(np.linalg.norm(perp) / np.linalg.norm(rr)))
    return worst


# --- hidden symmetry on the radial space -----------------------------------

def radial_operator(op: DiscreteOperator, j: Number) -> np.ndarray:
    """8 x 8 matrix of a constant discrete operator on doublet radial amplitudes (f1..f4, g1..g4)."""
    jj = HalfInt.of(j)
    M = np.zeros((8, 8), dtype=complex)
    for i, (_, _, s2) in enumerate(_doublet_order(jj)):
        if not index_valid(jj, 0, HalfInt(s2)):
            continue  # slot absent at this j; the column stays zero
        e = np.zeros(8, dtype=complex)
        e[i] = 1.0
        image = apply_discrete(op, doublet_state(jj, 0, e[:4], e[4:]))
        f, g = doublet_blocks(image)
        M[:, i] = np.array(f + g, dtype=complex)
    return M


def radial_K_hat(j: Number, theta=None, phi=None) -> np.ndarray:
    """8 x 8 matrix of K on doublet radial amplitudes, read off from the pointwise action."""
    jj = HalfInt.of(j)
    if theta is None:
        n = 24
        theta = np.linspace(0.3, math.pi - 0.3, n)
        phi = np.linspace(-2.5, 2.9, n)
    M = np.zeros((8, 8), dtype=complex)
    slots = _doublet_order(jj)
    valid = [i for i, (_, _, s2) in enumerate(slots) if index_valid(jj, 0, HalfInt(s2))]
    empty = SeparatedState(StateKind.DOUBLET, jj, HalfInt(0), {})
    basis = [(slots[i], empty.replace_terms({slots[i]: 1.0}).evaluate(theta, phi)) for i in valid]
    Bmat = np.stack([b.reshape(-1) for _, b in basis], axis=1)
    order = {key: i for i, key in enumerate(slots)}
    for i in valid:
        Kpsi = apply_K_hat(empty.replace_terms({slots[i]: 1.0}), theta, phi).values
        coef, *_ = np.linalg.lstsq(Bmat, Kpsi.reshape(-1), rcond=None)
        for (key, _), v in zip(basis, coef):
            M[order[key], i] = v
    return M


def _doublet_order(j: HalfInt) -> list[Slot]:
    keys = []
    for iso in (1, -1):
        keys.extend((iso, c, s2) for c, s2 in enumerate(_sigmas(HalfInt(-iso))))
    return keys


@dataclass(frozen=True)
class HiddenSymmetryReport:
    H_t3: float
    H_N: float
    H_K: float
    t3_N: float


def hidden_symmetry_defects(j: Number = 1, A: float = 0.0, W_over_s: float = 0.0,
                            m: float = 1.0, chis: Sequence[float] = (0.4, 1.1, 2.3)) -> HiddenSymmetryReport:
    """Commutator norms with H = -P^{-1}(L_d d/dchi + L_f) on the eight radial amplitudes."""
    J = float(HalfInt.of(j))
    nu = math.sqrt(J * (J + 1))
    N = radial_operator(DiscreteOperator(OperatorKind.N_A, A), j)
    t3 = np.kron(T3, np.eye(4))
    K = radial_K_hat(j)
    Pinv = np.zeros((8, 8))
    for row, col in enumerate(_EPS_SLOTS):
        Pinv[col, row] = 1.0

    def comm(X):
        worst = 0.0
        for chi in chis:
            Lf, Ld = _linear_forms(nu, W_over_s, 0.0, 0.0, m, math.sin(chi))
            for L in (Pinv @ Ld, Pinv @ Lf):
                worst = max(worst, float(np.max(np.abs(L @ X - X @ L))))
        return worst

    return HiddenSymmetryReport(comm(t3), comm(N), comm(K), float(np.max(np.abs(t3 @ N - N @ t3))))


# --- two-sector reflection identity ------------------------------------------

def two_sector_defect(j: Number, m: Number, k: Number, f1: complex, f2: complex, delta: int) -> float:
    """|| Pi Psi^{-k} - delta e^{i pi (j+1)} Psi^{+k} || / || Psi^{+k} || for delta-constrained radial data."""
    f = [f1, f2, delta * f2, delta * f1]
    minus, plus = abelian_state(j, m, -HalfInt.of(k), f), abelian_state(j, m, k, f)
    image = apply_discrete(DiscreteOperator(OperatorKind.PI_SPHERICAL), minus)
    return state_difference(image, plus, delta * parity_phase(HalfInt.of(j) + HalfInt(2))) / plus.norm()
