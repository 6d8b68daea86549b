"""Gibbs-vector rotations, isotopic gauge transformations and U(1) gauges.

A Gibbs vector ``c`` parametrizes the rotation by ``2 arctan|c|`` about ``c``:

    O(c) = I + 2 (c^x + (c^x)^2) / (1 + c.c),     c^x v = c x v.

Isotriplet fields transform as

    Phi' = O Phi,    W'_a = O W_a + (1/e) Delta(c) d_a c,
    Delta(c) = -2 (I + c^x) / (1 + c.c),

which keeps ``D_a Phi = d_a Phi + e W_a x Phi`` covariant.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Mapping, Sequence

import numpy as np

from .geometry import DomainError

Vector = np.ndarray
GibbsVector = np.ndarray  # rotation by 2 arctan|c| about c/|c|
Point = tuple[float, float, float]  # (r, theta, phi)
COORDS = ("r", "theta", "phi")


class SingularConfigurationError(ValueError):
    """Raised for antiparallel vectors in :func:`gibbs_between`."""


def cross_matrix(c: Sequence[float]) -> np.ndarray:
    c1, c2, c3 = (float(x) for x in c)
    return np.array([[0.0, -c3, c2], [c3, 0.0, -c1], [-c2, c1, 0.0]])


def rotation_from_gibbs(c: Sequence[float]) -> np.ndarray:
    cx = cross_matrix(c)
    return np.eye(3) + 2.0 * (cx + cx @ cx) / (1.0 + float(np.dot(c, c)))


def delta_matrix(c: Sequence[float]) -> np.ndarray:
    return -2.0 * (np.eye(3) + cross_matrix(c)) / (1.0 + float(np.dot(c, c)))


def compose_gibbs(c2: Sequence[float], c1: Sequence[float]) -> np.ndarray:
    """Gibbs vector of O(c2) O(c1)."""
    c1, c2 = np.asarray(c1, float), np.asarray(c2, float)
    den = 1.0 - float(np.dot(c2, c1))
    if abs(den) < 1e-15:
        raise SingularConfigurationError("composition is a half-turn; no finite Gibbs vector")
    return (c1 + c2 + np.cross(c2, c1)) / den


def gibbs_between(B: Sequence[float], D: Sequence[float]) -> np.ndarray:
    """Gibbs vector of the shortest rotation taking the direction of B to that of D."""
    B, D = np.asarray(B, float), np.asarray(D, float)
    nb, nd = np.linalg.norm(B), np.linalg.norm(D)
    if nb == 0 or nd == 0:
        raise SingularConfigurationError("zero vector has no direction")
    b, d = B / nb, D / nd
    den = 1.0 + float(np.dot(b, d))
    if den < 1e-12:
        raise SingularConfigurationError("antiparallel vectors: rotation axis undefined")
    return np.cross(b, d) / den


# ---------------------------------------------------------------------------
# field samples and transformations
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class GaugeFieldSample:
    Phi: np.ndarray
    W: Mapping[str, np.ndarray]

    def max_defect(self, other: "GaugeFieldSample") -> tuple[float, float]:
        dphi = float(np.max(np.abs(self.Phi - other.Phi)))
        keys = set(self.W) | set(other.W)
        zero = np.zeros(3)
        dw = max((float(np.max(np.abs(self.W.get(k, zero) - other.W.get(k, zero)))) for k in keys), default=0.0)
        return dphi, dw


FieldFn = Callable[[Point], GaugeFieldSample]
GibbsField = Callable[[Point], np.ndarray]

FD_STEP = 1e-6


def _partial(fn: Callable[[Point], np.ndarray], point: Point, axis: int, h: float = FD_STEP) -> np.ndarray:
    p, m = list(point), list(point)
    p[axis] += h
    m[axis] -= h
    return (np.asarray(fn(tuple(p))) - np.asarray(fn(tuple(m)))) / (2 * h)


def gauge_transform(
    sample: GaugeFieldSample,
    c_field: GibbsField,
    point: Point,
    e: float = 1.0,
    dc: Mapping[str, np.ndarray] | None = None,
) -> GaugeFieldSample:
    """Apply the Gibbs-field gauge transformation at ``point``.

    ``dc`` may supply analytic derivatives of the Gibbs field; otherwise they
    come from central differences with step ``FD_STEP``.
    """
    c = np.asarray(c_field(point), float)
    O, Dl = rotation_from_gibbs(c), delta_matrix(c)
    W = {}
    for label, w in sample.W.items():
        if label == "t":
            grad = np.zeros(3)
        elif dc is not None:
            grad = np.asarray(dc[label], float)
        else:
            grad = _partial(c_field, point, COORDS.index(label))
        W[label] = O @ np.asarray(w, float) + Dl @ grad / e
    return GaugeFieldSample(O @ np.asarray(sample.Phi, float), W)


def transformed(fields: FieldFn, c_field: GibbsField, e: float = 1.0) -> FieldFn:
    return lambda pt: gauge_transform(fields(pt), c_field, pt, e)


def covariant_derivative(fields: FieldFn, point: Point, label: str, e: float = 1.0) -> np.ndarray:
    """D_a Phi = d_a Phi + e W_a x Phi."""
    s = fields(point)
    dphi = _partial(lambda p: fields(p).Phi, point, COORDS.index(label))
    return dphi + e * np.cross(s.W[label], s.Phi)


# ---------------------------------------------------------------------------
# hedgehog and its unitary gauges
# ---------------------------------------------------------------------------

def unit_radial(theta: float, phi: float) -> np.ndarray:
    return np.array([math.sin(theta) * math.cos(phi), math.sin(theta) * math.sin(phi), math.cos(theta)])


def hedgehog_fields(K: Callable[[float], float], Phi: Callable[[float], float]) -> FieldFn:
    """Hedgehog ansatz Phi^a = r Phi(r) n^a, W^a_i = K(r) eps_{iab} x^b in spherical coordinates."""

    def fields(pt: Point) -> GaugeFieldSample:
        r, th, ph = pt
        n = unit_radial(th, ph)
        x = r * n
        e_th = np.array([math.cos(th) * math.cos(ph), math.cos(th) * math.sin(ph), -math.sin(th)])
        e_ph = np.array([-math.sin(ph), math.cos(ph), 0.0])
        k = K(r)
        # W_alpha = K x cross (dx/dalpha)
        W = {
            "r": k * np.cross(x, n),
            "theta": k * np.cross(x, r * e_th),
            "phi": k * np.cross(x, r * math.sin(th) * e_ph),
        }
        return GaugeFieldSample(r * Phi(r) * n, W)

    return fields


def unitary_fields(K: Callable[[float], float], Phi: Callable[[float], float], e: float = 1.0) -> FieldFn:
    """Expected hedgehog fields after the rotation that aligns Phi with the third axis."""

    def fields(pt: Point) -> GaugeFieldSample:
        r, th, ph = pt
        q = r * r * K(r) + 1.0 / e
        W = {
            "r": np.zeros(3),
            "theta": q * np.array([-math.sin(ph), math.cos(ph), 0.0]),
            "phi": np.array([-q * math.sin(th) * math.cos(ph), -q * math.sin(th) * math.sin(ph), (math.cos(th) - 1.0) / e]),
        }
        return GaugeFieldSample(np.array([0.0, 0.0, r * Phi(r)]), W)

    return fields


def schwinger_fields(K: Callable[[float], float], Phi: Callable[[float], float], e: float = 1.0) -> FieldFn:
    """Expected hedgehog fields in the Schwinger unitary gauge."""

    def fields(pt: Point) -> GaugeFieldSample:
        r, th, ph = pt
        q = r * r * K(r) + 1.0 / e
        W = {
            "r": np.zeros(3),
            "theta": np.array([0.0, q, 0.0]),
            "phi": np.array([-q * math.sin(th), 0.0, math.cos(th) / e]),
        }
        return GaugeFieldSample(np.array([0.0, 0.0, r * Phi(r)]), W)

    return fields


class IsoGaugeFrame(str, enum.Enum):
    CARTESIAN = "cartesian"
    DIRAC = "dirac"
    SCHWINGER = "schwinger"


def _c_cart_to_dirac(pt: Point) -> np.ndarray:
    _, th, ph = pt
    return math.tan(th / 2) * np.array([math.sin(ph), -math.cos(ph), 0.0])


def _c_dirac_to_schwinger(pt: Point) -> np.ndarray:
    return np.array([0.0, 0.0, -math.tan(pt[2] / 2)])


def _c_cart_to_schwinger(pt: Point) -> np.ndarray:
    _, th, ph = pt
    return np.array([math.tan(th / 2) * math.tan(ph / 2), -math.tan(th / 2), -math.tan(ph / 2)])


def transition_gibbs(frame_from: IsoGaugeFrame, frame_to: IsoGaugeFrame) -> GibbsField:
    """Gibbs field of the isotopic rotation between two frames."""
    f, t = IsoGaugeFrame(frame_from), IsoGaugeFrame(frame_to)
    forward = {
        (IsoGaugeFrame.CARTESIAN, IsoGaugeFrame.DIRAC): _c_cart_to_dirac,
        (IsoGaugeFrame.DIRAC, IsoGaugeFrame.SCHWINGER): _c_dirac_to_schwinger,
        (IsoGaugeFrame.CARTESIAN, IsoGaugeFrame.SCHWINGER): _c_cart_to_schwinger,
    }
    if f is t:
        return lambda pt: np.zeros(3)
    if (f, t) in forward:
        return forward[(f, t)]
    back = forward[(t, f)]
    return lambda pt: -back(pt)


def analytic_dc(frame_from: IsoGaugeFrame, frame_to: IsoGaugeFrame, pt: Point) -> dict[str, np.ndarray]:
    """Closed-form coordinate derivatives of the forward transition fields."""
    _, th, ph = pt
    key = (IsoGaugeFrame(frame_from), IsoGaugeFrame(frame_to))
    if key == (IsoGaugeFrame.CARTESIAN, IsoGaugeFrame.DIRAC):
        t, s2 = math.tan(th / 2), 0.5 / math.cos(th / 2) ** 2
        return {
            "r": np.zeros(3),
            "theta": s2 * np.array([math.sin(ph), -math.cos(ph), 0.0]),
            "phi": t * np.array([math.cos(ph), math.sin(ph), 0.0]),
        }
    if key == (IsoGaugeFrame.DIRAC, IsoGaugeFrame.SCHWINGER):
        return {"r": np.zeros(3), "theta": np.zeros(3), "phi": np.array([0.0, 0.0, -0.5 / math.cos(ph / 2) ** 2])}
    if key == (IsoGaugeFrame.CARTESIAN, IsoGaugeFrame.SCHWINGER):
        tt, tp = math.tan(th / 2), math.tan(ph / 2)
        st, sp = 0.5 / math.cos(th / 2) ** 2, 0.5 / math.cos(ph / 2) ** 2
        return {
            "r": np.zeros(3),
            "theta": np.array([st * tp, -st, 0.0]),
            "phi": np.array([tt * sp, 0.0, -sp]),
        }
    raise ValueError(f"no analytic derivative for {key}")


def schwinger_rotation_printed(theta: float, phi: float) -> np.ndarray:
    """Cartesian-to-Schwinger isotopic rotation matrix in closed form."""
    ct, st, cp, sp = math.cos(theta), math.sin(theta), math.cos(phi), math.sin(phi)
    return np.array([[ct * cp, ct * sp, -st], [-sp, cp, 0.0], [st * cp, st * sp, ct]])


# ---------------------------------------------------------------------------
# Abelian U(1) gauges
# ---------------------------------------------------------------------------

class AbelianGaugeKind(str, enum.Enum):
    SCHWINGER = "schwinger"
    DIRAC = "dirac"
    WU_YANG_N = "wu_yang_n"
    WU_YANG_S = "wu_yang_s"


WU_YANG_OVERLAP = 0.25


@dataclass(frozen=True)
class AbelianGauge:
    kind: AbelianGaugeKind
    g: float = 1.0
    overlap: float = WU_YANG_OVERLAP

    def __post_init__(self) -> None:
        object.__setattr__(self, "kind", AbelianGaugeKind(self.kind))

    def in_chart(self, theta: float) -> bool:
        if not 0.0 <= theta <= math.pi:
            return False
        if self.kind is AbelianGaugeKind.WU_YANG_N:
            return theta < math.pi / 2 + self.overlap
        if self.kind is AbelianGaugeKind.WU_YANG_S:
            return theta > math.pi / 2 - self.overlap
        return True


def abelian_potential(gauge: AbelianGauge, theta: float) -> float:
    """A_phi of the monopole potential in the given gauge."""
    if not gauge.in_chart(theta):
        raise DomainError(f"theta={theta!r} outside the {gauge.kind.value} chart")
    c = math.cos(theta)
    return gauge.g * {
        AbelianGaugeKind.SCHWINGER: c,
        AbelianGaugeKind.DIRAC: c - 1.0,
        AbelianGaugeKind.WU_YANG_N: c - 1.0,
        AbelianGaugeKind.WU_YANG_S: c + 1.0,
    }[gauge.kind]


@dataclass(frozen=True)
class U1FrameData:
    """How a U(1) frame relates to the Schwinger one.

    ``Psi_frame = exp(i phase_k k phi) Psi_Schwinger``; ``J_3 = l_3 + j3_shift_k k``
    and the k-term of ``J_{1,2}`` reads ``-k (1 - cos_k cos(theta))`` times
    ``(cos phi, sin phi) / sin(theta)``.
    """

    frame: AbelianGaugeKind
    phase_k: int
    j3_shift_k: int
    cos_k: int

    @property
    def j3_form(self) -> str:
        if self.j3_shift_k == 0:
            return "l3"
        return "l3 - k" if self.j3_shift_k < 0 else "l3 + k"

    def phase(self, k: float, phi):
        return np.exp(1j * self.phase_k * k * np.asarray(phi))

    def k_term(self, k: float, theta):
        return -k * (1.0 - self.cos_k * np.cos(theta))


def u1_frame_data(frame: AbelianGaugeKind) -> U1FrameData:
    f = AbelianGaugeKind(frame)
    table = {
        AbelianGaugeKind.SCHWINGER: (0, 0, 0),
        AbelianGaugeKind.DIRAC: (1, -1, 1),
        AbelianGaugeKind.WU_YANG_N: (1, -1, 1),
        AbelianGaugeKind.WU_YANG_S: (-1, 1, -1),
    }
    return U1FrameData(f, *table[f])


def u1_transition_phase(frame_from: AbelianGaugeKind, frame_to: AbelianGaugeKind, k: float, phi):
    """Phase S(phi) with Psi_to = S Psi_from."""
    a, b = u1_frame_data(frame_from), u1_frame_data(frame_to)
    return np.exp(1j * (b.phase_k - a.phase_k) * k * np.asarray(phi))


@dataclass
class PipelineReport:
    frame_from: str
    frame_to: str
    max_defect_Phi: float
    max_defect_W: float


def gauge_pipeline(
    K: Callable[[float], float],
    Phi: Callable[[float], float],
    r: float,
    thetas: Sequence[float],
    phis: Sequence[float],
    e: float = 1.0,
    analytic: bool = True,
) -> list[PipelineReport]:
    """Carry the hedgehog through the unitary gauges and compare with closed forms.

    Returns one report per leg: Cartesian to Dirac, Dirac to Schwinger, and
    the direct Cartesian to Schwinger rotation.
    """
    C, D, S = IsoGaugeFrame.CARTESIAN, IsoGaugeFrame.DIRAC, IsoGaugeFrame.SCHWINGER
    hedge = hedgehog_fields(K, Phi)
    expect = {D: unitary_fields(K, Phi, e), S: schwinger_fields(K, Phi, e)}
    worst = {leg: [0.0, 0.0] for leg in ((C, D), (D, S), (C, S))}

    def step(sample: GaugeFieldSample, a: IsoGaugeFrame, b: IsoGaugeFrame, pt: Point) -> GaugeFieldSample:
        dc = analytic_dc(a, b, pt) if analytic else None
        return gauge_transform(sample, transition_gibbs(a, b), pt, e, dc)

    for th in thetas:
        for ph in phis:
            pt = (r, float(th), float(ph))
            h = hedge(pt)
            u = step(h, C, D, pt)
            outs = {(C, D): u, (D, S): step(u, D, S, pt), (C, S): step(h, C, S, pt)}
            for leg, got in outs.items():
                dphi, dw = got.max_defect(expect[leg[1]](pt))
                worst[leg][0] = max(worst[leg][0], dphi)
                worst[leg][1] = max(worst[leg][1], dw)
    return [PipelineReport(a.value, b.value, *worst[(a, b)]) for (a, b) in worst]
