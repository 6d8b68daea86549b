"""Hand-computed values and small closed-form cases across modules."""
import csv
import io
import math

import numpy as np
import pytest

from monopole_lab.bps import MonopoleSolution, SeedFamily, SeedKind, TypeI, abcr_profiles, dyon_from_monopole
from monopole_lab.cli import build_parser, config_from_args, run
from monopole_lab.dirac_radial import AbelianRadialSystem, DoubletRadialSystem, bound_state_jmin
from monopole_lab.gauge import (
    GaugeFieldSample,
    gauge_transform,
    gibbs_between,
    rotation_from_gibbs,
    unit_radial,
)
from monopole_lab.geometry import CurvatureModel
from monopole_lab.symmetry import K_hat_expected, SelectionOutcome, StateKind, selection_factor, selection_rule
from monopole_lab.wigner import D_sep, HalfInt, d_small, monopole_harmonics

TRIG = SeedFamily(SeedKind.TRIGONOMETRIC, 1.0, 0.0, 1)


# --- BPS profiles ------------------------------------------------------------

def test_flat_trig_profile_value():
    sol = MonopoleSolution(CurvatureModel.euclid(), TypeI(1.0, 0.0, TRIG))
    assert sol.K(1.0) == pytest.approx(1 / math.sin(1.0) - 1, rel=1e-15)
    assert sol.K(1.0) == pytest.approx(0.18839510, abs=1e-8)


@pytest.mark.parametrize("a1", [1.0, 0.7])
def test_flat_trig_profile_finite_at_origin(a1):
    # A r / sin(A r) = 1 + (A r)^2 / 6 + ..., so K -> A^2 a1^2 / (6 e); radii stay outside the pole guard
    sol = MonopoleSolution(CurvatureModel.euclid(), TypeI(a1, 0.0, TRIG))
    for r in (1e-2, 3e-3):
        assert sol.K(r) == pytest.approx(a1 * a1 / 6, rel=1e-4)


def test_riemann_auxiliary_profiles_at_origin_and_equator():
    a, b, c, R = abcr_profiles(CurvatureModel.riemann(1.0), 1.0, 0.0)
    assert (a(0.0), b(0.0), c(0.0), R(0.0)) == (0.0, -1.0, 0.0, 0.0)
    assert R(2.0) == pytest.approx(math.pi / 2, rel=1e-15)


@pytest.mark.parametrize("rho", [1.0, 2.5])
def test_riemann_profiles_solve_algebraic_relations(rho):
    # fit a = a1 r + a2 (1 - r^2/4rho^2), b likewise, then check the three relations with delta = +1
    a, b, _, _ = abcr_profiles(CurvatureModel.riemann(rho), 0.9, 0.0)
    rs = np.array([0.3, 1.1])
    basis = np.stack([rs, 1 - rs**2 / (4 * rho**2)], axis=1)
    a1, a2 = np.linalg.solve(basis, [a(r) for r in rs])
    b1, b2 = np.linalg.solve(basis, [b(r) for r in rs])
    delta = 1
    assert abs(a2) < 1e-15 and b2 == pytest.approx(-delta)
    assert abs(2 * a2 * b2 - delta * a2) < 1e-15
    assert abs(a1 * b2 + a2 * b1 + delta * a1) < 1e-15
    assert abs(a1 * b1 - 0.5 * b2 * a2 / rho**2 - delta * 1.25 * a2 / rho**2) < 1e-15


def test_dyon_rescale_factor():
    base = MonopoleSolution(CurvatureModel.euclid(), TypeI(0.8, 0.5, TRIG))
    assert dyon_from_monopole(base, 0.6).scale == pytest.approx(0.89442719, abs=5e-9)
    assert dyon_from_monopole(base, 0.6).scale == pytest.approx(math.sqrt(0.8), rel=1e-15)


# --- Wigner values -----------------------------------------------------------

@pytest.mark.parametrize("j2", range(0, 7))
def test_d_at_zero_angle_is_identity(j2):
    j = HalfInt(j2)
    ms = [HalfInt(d) for d in range(-j2, j2 + 1, 2)]
    for m in ms:
        for s in ms:
            assert float(d_small(j, m, s, 0.0)) == pytest.approx(1.0 if m == s else 0.0, abs=1e-15)


@pytest.mark.parametrize("th", [0.0, 0.5, 1.9, math.pi])
def test_spin_half_diagonal(th):
    assert float(d_small("1/2", "1/2", "1/2", th)) == pytest.approx(math.cos(th / 2), abs=1e-16)


@pytest.mark.parametrize("j, m, k", [("3/2", "1/2", "1"), ("2", "-1", "1/2"), ("5/2", "3/2", "0")])
def test_harmonic_parallelogram(j, m, k):
    th, ph = np.meshgrid(np.linspace(0.1, 3.0, 6), np.linspace(-3.0, 3.0, 7), indexing="ij")
    xi1, xi2 = monopole_harmonics(j, m, k, th, ph)
    kk = HalfInt.of(k)
    Dp, Dm = D_sep(j, m, kk + HalfInt(1), ph, th), D_sep(j, m, kk - HalfInt(1), ph, th)
    lhs = np.sum(np.abs(xi1) ** 2 + np.abs(xi2) ** 2, axis=0)
    assert np.max(np.abs(lhs - 2 * (np.abs(Dp) ** 2 + np.abs(Dm) ** 2))) < 1e-14


# --- Gibbs rotations ---------------------------------------------------------

@pytest.mark.parametrize("phi", [0.3, 1.4, -2.2])
def test_axial_gibbs_vector_rotates_about_z(phi):
    O = rotation_from_gibbs([0.0, 0.0, math.tan(phi / 2)])
    assert np.allclose(O @ [1.0, 0.0, 0.0], [math.cos(phi), math.sin(phi), 0.0], atol=1e-15)


def test_gibbs_between_equator_and_pole():
    assert np.allclose(gibbs_between(unit_radial(math.pi / 2, 0.0), [0.0, 0.0, 1.0]), [0.0, -1.0, 0.0], atol=1e-15)
    assert np.array_equal(gibbs_between([0.0, 0.6, 0.8], [0.0, 0.6, 0.8]), np.zeros(3))


def test_constant_gibbs_field_rotates_homogeneously():
    c = np.array([0.2, -0.5, 0.3])
    sample = GaugeFieldSample(np.array([1.0, 2.0, -0.5]),
                              {"r": np.array([0.1, 0.0, 0.4]), "theta": np.array([-1.0, 0.3, 0.2])})
    out = gauge_transform(sample, lambda pt: c, (1.0, 0.7, 0.2))
    O = rotation_from_gibbs(c)
    assert np.allclose(out.Phi, O @ sample.Phi, atol=1e-15)
    for label, w in sample.W.items():
        assert np.allclose(out.W[label], O @ w, atol=1e-15)


# --- radial systems ----------------------------------------------------------

@pytest.mark.parametrize("delta", [1, -1])
def test_massless_free_abelian_decouples(delta):
    eps = 1.3
    sysc = AbelianRadialSystem(eps, 0.0, 0.0, delta, complex_form=True)
    y = np.array([0.4 - 0.2j, 1.1 + 0.5j])
    assert np.allclose(sysc.rhs(0.8, y), [1j * eps * y[0], -1j * eps * y[1]], atol=1e-15)


def test_j0_background_has_complex_effective_mass():
    def W(chi):
        return 0.3 * np.sin(chi) ** 2

    eps, m, delta, chi = 1.7, 1.0, -1, 0.9
    sys0 = DoubletRadialSystem(eps, m, 0, W=W, delta=delta)
    y = np.array([0.5 + 0.1j, -0.2 + 0.7j])  # (f4, f2)
    w = W(chi) / math.sin(chi)
    m_minus, m_plus = m - 1j * delta * w, m + 1j * delta * w
    expect = [1j * (eps * y[0] - m_minus * y[1]), -1j * (eps * y[1] - m_plus * y[0])]
    assert np.allclose(sys0.rhs(chi, y), expect, atol=1e-15)


def test_lowest_momentum_bound_state():
    r = np.linspace(0.0, 4.0, 41)
    f, _ = bound_state_jmin(0.6, 1.0, r)
    assert np.allclose(f, np.exp(-0.8 * r), rtol=1e-15)
    h = 1e-3
    x = np.linspace(0.5, 3.0, 11)
    fm, f0, fp = (bound_state_jmin(0.6, 1.0, x + s)[0] for s in (-h, 0.0, h))
    d2 = (fm - 2 * f0 + fp) / h**2
    assert np.max(np.abs(d2 + (0.36 - 1.0) * f0)) < 1e-6


def test_bound_state_decay_vanishes_at_threshold():
    rates = [-math.log(bound_state_jmin(e, 1.0, 1.0)[0]) for e in (0.9, 0.99, 0.9999, 1 - 1e-10)]
    assert all(a > b for a, b in zip(rates, rates[1:]))
    assert rates[-1] < 1e-4


# --- K-hat and selection values ----------------------------------------------

def test_K_hat_arithmetic_values():
    assert K_hat_expected(StateKind.ABELIAN, "3/2", 1, "1/2") == pytest.approx(-math.sqrt(3.75), rel=1e-15)
    assert K_hat_expected(StateKind.ABELIAN, "3/2", 1, "1/2") == pytest.approx(-1.9364917, abs=5e-8)
    assert K_hat_expected(StateKind.DOUBLET, 2, -1) == pytest.approx(math.sqrt(6), rel=1e-15)


@pytest.mark.parametrize("Om, d, J, Jp", [(1, 1, 1, 1), (1, -1, 1, 2), (-1, 1, 0, 3), (1, 1, 2, 2)])
def test_flipping_delta_prime_toggles(Om, d, J, Jp):
    a, b = selection_rule(Om, d, 1, J, Jp), selection_rule(Om, d, -1, J, Jp)
    assert {a, b} == {SelectionOutcome.FORCED_ZERO, SelectionOutcome.UNCONSTRAINED}
    assert selection_factor(Om, d, 1, J, Jp) + selection_factor(Om, d, -1, J, Jp) == 2


def test_cli_truth_table_for_positive_omega():
    status, text = run(config_from_args(build_parser().parse_args(
        ["selection-rules", "--omega", "1", "--jrange", "0..3"])))
    assert status == 0
    rows = list(csv.DictReader(io.StringIO(text.split("\n", 1)[1])))
    assert len(rows) == 4 * 4 * 4
    for r in rows:
        d, dp, J, Jp = int(r["delta"]), int(r["delta_prime"]), int(r["J"]), int(r["J_prime"])
        forced = d * dp * (-1) ** (J + Jp) == -1
        assert (r["outcome"] == "ForcedZero") == forced
        assert int(r["factor"]) == (0 if forced else 2)
