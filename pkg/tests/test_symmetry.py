"""Discrete operators, the generalized Dirac operator, SU(2) realizations and selection rules."""
import cmath
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from monopole_lab.gauge import IsoGaugeFrame, transition_gibbs
from monopole_lab.symmetry import (
    GAMMA,
    GAMMA0,
    GAMMA5,
    I_SIGMA12,
    P_BISPINOR,
    SPIN_DIAG,
    DiscreteOperator,
    FrameError,
    OperatorKind,
    Realization,
    SelectionOutcome,
    SeparatedState,
    StateKind,
    U_A_matrix,
    abelian_state,
    adjoint_of,
    apply_discrete,
    apply_K_hat,
    apply_N_A,
    apply_parity,
    apply_parity_bispinor,
    apply_parity_sampled,
    constrained_doublet,
    doublet_state,
    electron_state,
    hidden_symmetry_defects,
    j3_spectrum,
    K_hat_expected,
    k_hat_state,
    na_consistency_residual,
    pi_A,
    radial_operator,
    selection_factor,
    selection_rule,
    spinor_from_gibbs,
    state_difference,
    su2_algebra_report,
    transport_schwinger_to_cartesian,
    two_sector_defect,
    up_to_phase,
)
from monopole_lab.gauge import rotation_from_gibbs
from monopole_lab.wigner import HalfInt, index_valid, parity_phase

ALGEBRA_TOL = 1e-12
EIGEN_TOL = 1e-12
CONSISTENT_TOL = 1e-10

THETA = np.array([0.4, 0.9, 1.3, 1.9, 2.4, 2.8])
PHI = np.array([-2.7, -1.1, 0.2, 0.9, 2.0, 3.0])
rng = np.random.default_rng(7)


def rand_c(n):
    return rng.normal(size=n) + 1j * rng.normal(size=n)


# --- constant matrices -------------------------------------------------------------------

def test_clifford_algebra():
    gs = (GAMMA0,) + GAMMA
    eta = np.diag([1.0, -1.0, -1.0, -1.0])
    for a in range(4):
        for b in range(4):
            assert np.allclose(gs[a] @ gs[b] + gs[b] @ gs[a], 2 * eta[a, b] * np.eye(4), atol=0)


def test_weyl_constants():
    assert np.array_equal(GAMMA5, np.diag([-1, -1, 1, 1]).astype(complex))
    assert np.array_equal(P_BISPINOR, -np.fliplr(np.eye(4)))
    assert np.allclose(I_SIGMA12, np.diag([0.5, -0.5, 0.5, -0.5]), atol=0)


@given(st.floats(-7.0, 7.0))
def test_pi_A_is_involution(A):
    assert np.allclose(pi_A(A) @ pi_A(A), np.eye(2), atol=1e-15)


def test_pi_A_at_zero():
    assert np.array_equal(pi_A(0.0), np.array([[0, 1], [1, 0]], dtype=complex))


# --- states -------------------------------------------------------------------------------

def test_invalid_slot_rejected():
    with pytest.raises(ValueError):
        SeparatedState(StateKind.ELECTRON, "1/2", "1/2", {(0, 0, 3): 1.0})


def test_invalid_zero_slot_dropped():
    st_ = SeparatedState(StateKind.ELECTRON, "1/2", "1/2", {(0, 0, 3): 0.0, (0, 0, -1): 1.0})
    assert list(st_.terms) == [(0, 0, -1)]


def test_doublet_sigma_layout():
    st_ = doublet_state(1, 0, [1, 1, 1, 1], [1, 1, 1, 1])
    plus = sorted(s for (iso, _, s) in st_.terms if iso == 1)
    minus = sorted(s for (iso, _, s) in st_.terms if iso == -1)
    assert plus == [-2, -2, 0, 0] and minus == [0, 0, 2, 2]


# --- parity --------------------------------------------------------------------------------

@pytest.mark.parametrize("j", ["1/2", "3/2", "5/2"])
@pytest.mark.parametrize("delta", [1, -1])
def test_electron_parity_eigenstates(j, delta):
    f1, f2 = rand_c(2)
    st_ = electron_state(j, "1/2", [f1, f2, -delta * f2, -delta * f1])
    chk = apply_parity(st_)
    assert chk.defect < EIGEN_TOL
    assert abs(abs(chk.eigenvalue) - 1.0) < 1e-15


def test_parity_on_generic_state_is_not_eigen():
    assert apply_parity(electron_state("3/2", "1/2", rand_c(4))).defect > 0.1


@pytest.mark.parametrize("state", [
    electron_state("3/2", "-1/2", [0.3, 1.0 + 1j, -0.5, 0.2j]),
    abelian_state("2", "1", "1/2", [0.7, -0.1j, 0.4, 1.0]),
    doublet_state("2", "-1", [1, 0.5j, -0.2, 0.3], [0.1, 0.2, 0.3j, -0.4]),
], ids=["electron", "abelian", "doublet"])
def test_sampled_reflection_matches_exact(state):
    thetas = np.linspace(0.1, math.pi - 0.1, 11)
    phis = np.linspace(-math.pi, math.pi, 16, endpoint=False)
    T, P = np.meshgrid(thetas, phis, indexing="ij")
    iso = pi_A(0.6) if state.kind is StateKind.DOUBLET else None
    sampled = apply_parity_sampled(state.evaluate(T, P), thetas, phis, iso, m=state.m)
    if iso is None:
        exact = apply_discrete(DiscreteOperator(OperatorKind.PI_SPHERICAL), state)
    else:
        exact = apply_discrete(DiscreteOperator(OperatorKind.N_A, 0.6), state)
    assert np.max(np.abs(sampled - exact.evaluate(T, P))) < 1e-12


def test_sampled_reflection_needs_wrap_phase():
    st_ = electron_state("3/2", "-1/2", [0.3, 1.0 + 1j, -0.5, 0.2j])
    thetas = np.linspace(0.1, math.pi - 0.1, 5)
    phis = np.linspace(-math.pi, math.pi, 8, endpoint=False)
    T, P = np.meshgrid(thetas, phis, indexing="ij")
    exact = apply_discrete(DiscreteOperator(OperatorKind.PI_SPHERICAL), st_).evaluate(T, P)
    periodic = apply_parity_sampled(st_.evaluate(T, P), thetas, phis)
    assert np.max(np.abs(periodic - exact)) > 0.1


@pytest.mark.parametrize("m", ["1/2", "-3/2"])
def test_sampled_reflection_is_involution(m):
    st_ = electron_state("5/2", m, rand_c(4))
    thetas = np.linspace(0.2, math.pi - 0.2, 7)
    phis = np.linspace(-math.pi, math.pi, 10, endpoint=False)
    T, P = np.meshgrid(thetas, phis, indexing="ij")
    once = apply_parity_bispinor(st_.evaluate(T, P), thetas, phis, m=m)
    twice = apply_parity_bispinor(once, thetas, phis, m=m)
    # P_bisp squares to 1, the point map to e^{2 pi i m}
    assert np.max(np.abs(twice - (-1) ** HalfInt.of(m).doubled * st_.evaluate(T, P))) < 1e-13


@pytest.mark.parametrize("j, m, k", [("2", "1", "1/2"), ("3/2", "1/2", "1"), ("5/2", "-1/2", "-1")])
def test_abelian_states_have_no_parity_eigenvector(j, m, k):
    for _ in range(5):
        assert apply_parity(abelian_state(j, m, k, rand_c(4))).defect > 0.1


def test_sampled_reflection_needs_symmetric_grid():
    thetas = np.linspace(0.1, 2.0, 5)
    phis = np.linspace(-math.pi, math.pi, 8, endpoint=False)
    with pytest.raises(ValueError):
        apply_parity_sampled(np.zeros((5, 8, 4)), thetas, phis)


@pytest.mark.parametrize("j, m, k", [("2", "1", "1/2"), ("3/2", "1/2", "1"), ("3", "-2", "3/2")])
@pytest.mark.parametrize("delta", [1, -1])
def test_two_sector_reflection(j, m, k, delta):
    f1, f2 = rand_c(2)
    assert two_sector_defect(j, m, k, f1, f2, delta) < EIGEN_TOL
    # the reflected opposite-charge state is not the same-charge state with the other sign
    f = [f1, f2, delta * f2, delta * f1]
    minus, plus = abelian_state(j, m, "-" + k, f), abelian_state(j, m, k, f)
    image = apply_discrete(DiscreteOperator(OperatorKind.PI_SPHERICAL), minus)
    wrong = -delta * parity_phase(HalfInt.of(j) + HalfInt(2))
    assert state_difference(image, plus, wrong) > 0.1


# --- N_A -------------------------------------------------------------------------------------

@settings(max_examples=30, deadline=None)
@given(A=st.floats(0.0, 2 * math.pi), delta=st.sampled_from([1, -1]), j=st.integers(0, 3))
def test_constrained_doublet_is_N_A_eigenstate(A, delta, j):
    f = rand_c(4)
    if j == 0:
        f[0] = f[2] = 0  # only sigma = 0 slots exist
    chk = apply_N_A(A, constrained_doublet(j, 0, f, A, delta))
    assert chk.defect < EIGEN_TOL
    assert chk.delta == delta


def test_generic_doublet_is_not_N_A_eigenstate():
    assert apply_N_A(0.4, doublet_state(1, 0, rand_c(4), rand_c(4))).defect > 0.1


def test_N_A_needs_schwinger_frame():
    st_ = doublet_state(1, 0, rand_c(4), rand_c(4), iso_frame="cartesian")
    with pytest.raises(FrameError):
        apply_N_A(0.3, st_)


@pytest.mark.parametrize("A", [0.0, 0.8, math.pi, 4.0])
def test_N_A_conjugation_by_U(A):
    N0 = radial_operator(DiscreteOperator(OperatorKind.N_A, 0.0), 2)
    NA = radial_operator(DiscreteOperator(OperatorKind.N_A, A), 2)
    U = np.kron(np.diag([1.0, np.exp(1j * A)]), np.eye(4))
    assert np.max(np.abs(U @ N0 @ np.linalg.inv(U) - NA)) < 1e-13


@pytest.mark.parametrize("j", [0, 1, 2])
def test_N_A_squares_to_phase(j):
    N = radial_operator(DiscreteOperator(OperatorKind.N_A, 1.1), j)
    sq = N @ N
    nz = np.nonzero(np.abs(np.diag(sq)) > 0)[0]
    ph = sq[nz[0], nz[0]]
    assert abs(abs(ph) - 1) < 1e-15
    assert np.max(np.abs(sq - ph * np.diag((np.abs(np.diag(sq)) > 0).astype(float)))) < 1e-15


def test_na_consistency_dense_sample():
    As = np.linspace(0.0, 2 * math.pi, 720, endpoint=False)
    res_w = np.array([na_consistency_residual(a, 0.8) for a in As])
    zeros = As[res_w < CONSISTENT_TOL]
    assert np.allclose(sorted(zeros), [0.0, math.pi], atol=1e-12)
    assert max(na_consistency_residual(a, 0.0) for a in As) < CONSISTENT_TOL


def test_na_consistency_needs_vanishing_charge_profiles():
    assert na_consistency_residual(0.0, 0.0, Ft=0.3) > 1e-3
    assert na_consistency_residual(0.0, 0.0, Pt=0.3) > 1e-3


# --- generalized Dirac operator -------------------------------------------------------------

CASES = [
    (StateKind.ELECTRON, j, 0) for j in ("1/2", "3/2", "5/2")
] + [
    (StateKind.ABELIAN, j, k) for j, k in (("2", "1/2"), ("3/2", "1"), ("3", "3/2"), ("5/2", "-1"))
] + [
    (StateKind.DOUBLET, j, 0) for j in ("1", "2", "3")
]


@pytest.mark.parametrize("kind, j, k", CASES, ids=[f"{c[0].value}-{c[1]}-{c[2]}" for c in CASES])
@pytest.mark.parametrize("sign", [1, -1])
def test_K_hat_eigenvalues(kind, j, k, sign):
    f1, f2 = rand_c(2)
    res = apply_K_hat(k_hat_state(kind, j, "1/2" if HalfInt.of(j).doubled % 2 else "0", sign, k, f1, f2), THETA, PHI)
    assert res.defect < EIGEN_TOL
    assert abs(res.eigenvalue - K_hat_expected(kind, j, sign, k)) < EIGEN_TOL


@pytest.mark.parametrize("k", ["1/2", "1", "3/2", "-2"])
def test_K_hat_lowest_momentum_is_zero(k):
    kk = HalfInt.of(k)
    j = abs(kk) - HalfInt(1)
    sig = [kk - HalfInt.of(s) for s in SPIN_DIAG]
    f = [v if index_valid(j, j, s) else 0.0 for v, s in zip(rand_c(4), sig)]
    st_ = abelian_state(j, j, kk, f)
    assert len(st_.terms) == 2
    res = apply_K_hat(st_, THETA, PHI)
    assert np.max(np.abs(res.values)) < EIGEN_TOL
    assert abs(res.eigenvalue) < EIGEN_TOL
    assert K_hat_expected(StateKind.ABELIAN, j, 1, kk) == 0.0


def test_K_hat_refuses_background_doublet():
    with pytest.raises(ValueError):
        apply_K_hat(doublet_state(1, 0, rand_c(4), rand_c(4)), THETA, PHI, W_nonzero=True)


def test_K_hat_needs_points_off_poles():
    with pytest.raises(ValueError):
        apply_K_hat(electron_state("1/2", "1/2", rand_c(4)), np.array([0.0]), np.array([0.0]))


# --- SU(2) realizations -----------------------------------------------------------------------

REALIZATIONS = {
    "pauli-1/2": Realization.pauli("1/2"),
    "pauli-0": Realization.pauli(0),
    "abelian-1/2": Realization.abelian("1/2"),
    "abelian-3/2": Realization.abelian("3/2"),
    "doublet": Realization.doublet(),
    "dirac-1": Realization.dirac(1),
    "wu-yang-north": Realization.wu_yang("1/2", "north"),
    "wu-yang-south": Realization.wu_yang("1/2", "south"),
}


@pytest.mark.parametrize("name", list(REALIZATIONS))
def test_su2_algebra(name):
    rep = su2_algebra_report(REALIZATIONS[name], 4)
    assert rep.multiplets > 0
    assert rep.max_defect < ALGEBRA_TOL
    assert rep.casimir < 1e-10


def test_su2_truncation_limit():
    with pytest.raises(ValueError):
        su2_algebra_report(Realization.pauli(0), 7)


@pytest.mark.parametrize("name, j", [("pauli-1/2", "3/2"), ("dirac-1", "5/2"), ("abelian-1/2", "2"),
                                     ("wu-yang-north", "2"), ("wu-yang-south", "2")])
def test_J3_spectra_agree_across_gauges(name, j):
    vals = np.array(j3_spectrum(REALIZATIONS[name], j))
    J = float(HalfInt.of(j))
    mults = np.arange(-J, J + 1)
    channels = len(vals) // len(mults)
    assert channels >= 1
    assert np.allclose(vals, np.repeat(mults, channels), atol=1e-10)


def test_wu_yang_chart_name_checked():
    with pytest.raises(ValueError):
        Realization.wu_yang("1/2", "east")


# --- U(A) -------------------------------------------------------------------------------

def printed_cartesian_U(A, th, ph):
    e = cmath.exp(1j * A)
    s2, c2 = math.sin(th / 2) ** 2, math.cos(th / 2) ** 2
    off = 0.5 * (1 - e) * math.sin(th)
    return np.array([[e * s2 + c2, off * cmath.exp(-1j * ph)], [off * cmath.exp(1j * ph), s2 + e * c2]])


@settings(max_examples=50)
@given(A=st.floats(-7.0, 7.0), th=st.floats(0.0, math.pi), ph=st.floats(-math.pi, math.pi))
def test_cartesian_U_matches_printed_entries(A, th, ph):
    assert np.max(np.abs(U_A_matrix("cartesian", A, th, ph) - printed_cartesian_U(A, th, ph))) < 1e-14


def test_U_identity_at_zero():
    assert np.allclose(U_A_matrix("schwinger", 0.0), np.eye(2), atol=0)
    assert np.allclose(U_A_matrix("cartesian", 0.0, 0.7, 0.3), np.eye(2), atol=1e-16)


def test_U_unknown_frame():
    with pytest.raises(ValueError):
        U_A_matrix("dirac", 0.3)


@settings(max_examples=50)
@given(A=st.floats(0.0, 2 * math.pi), th=st.floats(0.05, math.pi - 0.05), ph=st.floats(-3.0, 3.0))
def test_U_transport_between_frames(A, th, ph):
    c = transition_gibbs(IsoGaugeFrame.CARTESIAN, IsoGaugeFrame.SCHWINGER)((1.0, th, ph))
    got = transport_schwinger_to_cartesian(A, c)
    assert up_to_phase(U_A_matrix("cartesian", A, th, ph), got) < 1e-12


@given(st.lists(st.floats(-3.0, 3.0), min_size=3, max_size=3))
def test_spinor_covers_rotation(c):
    S = spinor_from_gibbs(c)
    assert np.allclose(S @ S.conj().T, np.eye(2), atol=1e-14)
    assert np.max(np.abs(adjoint_of(S) - rotation_from_gibbs(c))) < 1e-13


# --- hidden symmetry ----------------------------------------------------------------------

@pytest.mark.parametrize("j", [1, 2])
@pytest.mark.parametrize("A", [0.0, 0.9])
def test_hidden_symmetry_on_trivial_background(j, A):
    rep = hidden_symmetry_defects(j, A)
    assert rep.H_t3 < 1e-12 and rep.H_N < 1e-12 and rep.H_K < 1e-12
    assert rep.t3_N > 0.5


def test_background_breaks_hidden_symmetry():
    rep = hidden_symmetry_defects(1, 0.9, W_over_s=0.6)
    assert rep.H_t3 > 1e-3 and rep.H_N > 1e-3 and rep.H_K > 1e-3


# --- selection rules ----------------------------------------------------------------------

def closed_form(Omega, d, dp, J2, Jp2):
    sign = 1 if ((J2 + Jp2) // 2) % 2 == 0 else -1
    return Omega * d * dp * sign == -1


def test_selection_truth_table():
    for Om in (1, -1):
        for d in (1, -1):
            for dp in (1, -1):
                for J2 in range(0, 7, 2):
                    for Jp2 in range(0, 7, 2):
                        out = selection_rule(Om, d, dp, HalfInt(J2), HalfInt(Jp2))
                        assert (out is SelectionOutcome.FORCED_ZERO) == closed_form(Om, d, dp, J2, Jp2)


def test_selection_examples():
    assert selection_factor(1, 1, 1, 1, 1) == 2
    assert selection_rule(1, 1, 1, 1, 2) is SelectionOutcome.FORCED_ZERO
    assert selection_rule(1, 1, -1, 1, 2) is SelectionOutcome.UNCONSTRAINED


def test_selection_half_integer_momenta():
    assert selection_rule(1, 1, 1, "1/2", "1/2") is SelectionOutcome.FORCED_ZERO
    assert selection_rule(1, 1, 1, "1/2", "3/2") is SelectionOutcome.UNCONSTRAINED
    with pytest.raises(ValueError):
        selection_factor(1, 1, 1, "1/2", 1)
    with pytest.raises(ValueError):
        selection_factor(2, 1, 1, 1, 1)
