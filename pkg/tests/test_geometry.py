"""Conformal factors, chart limits and the r <-> chi map of the three 3-spaces."""
import math

import pytest
from hypothesis import given, strategies as st

from monopole_lab.geometry import (
    CurvatureModel,
    DomainError,
    chi_from_r,
    r_from_chi,
    sigma,
    sigma_prime,
)

MODELS = [CurvatureModel.euclid(), CurvatureModel.riemann(1.3), CurvatureModel.lobachevsky(0.7)]


@given(st.floats(0.0, 1e6))
def test_euclid_sigma_is_exactly_one(r):
    assert sigma(CurvatureModel.euclid(), r) == 1.0


@pytest.mark.parametrize("model, r, expected", [
    (CurvatureModel.riemann(1.0), 2.0, 2.0),
    (CurvatureModel.riemann(2.0), 2.0, 1.25),
    (CurvatureModel.lobachevsky(1.0), 1.0, 0.75),
    (CurvatureModel.lobachevsky(1.0), 0.0, 1.0),
])
def test_sigma_values(model, r, expected):
    assert sigma(model, r) == pytest.approx(expected, abs=1e-15)


@pytest.mark.parametrize("model", MODELS, ids=lambda m: m.kind.value)
@given(frac=st.floats(0.01, 0.95))
def test_chi_round_trip(model, frac):
    r = frac * min(model.r_max, 10.0)
    assert r_from_chi(model, chi_from_r(model, r)) == pytest.approx(r, rel=1e-12)


@pytest.mark.parametrize("model", MODELS, ids=lambda m: m.kind.value)
@pytest.mark.parametrize("r", [0.1, 0.6, 1.2])
def test_geodesic_element(model, r):
    # dr / Sigma = rho dchi; on E3 chi = r and rho plays no role
    h = 1e-6
    dchi = (chi_from_r(model, r + h) - chi_from_r(model, r - h)) / (2 * h)
    scale = 1.0 if model.curvature_sign == 0 else model.rho
    assert dchi == pytest.approx(1.0 / (scale * sigma(model, r)), rel=1e-8)


@pytest.mark.parametrize("model", MODELS, ids=lambda m: m.kind.value)
def test_sigma_prime_matches_difference(model):
    r, h = 0.8, 1e-6
    fd = (sigma(model, r + h) - sigma(model, r - h)) / (2 * h)
    assert sigma_prime(model, r) == pytest.approx(fd, abs=1e-9)


def test_lobachevsky_chart_edge():
    model = CurvatureModel.lobachevsky(1.0)
    with pytest.raises(DomainError):
        sigma(model, 2.0)
    with pytest.raises(DomainError):
        chi_from_r(model, 2.5)


def test_riemann_chi_range():
    with pytest.raises(DomainError):
        r_from_chi(CurvatureModel.riemann(), math.pi)


@pytest.mark.parametrize("rho", [0.0, -1.0, math.inf])
def test_bad_radius_rejected(rho):
    with pytest.raises(ValueError):
        CurvatureModel.riemann(rho)


def test_negative_radius_rejected():
    with pytest.raises(DomainError):
        sigma(CurvatureModel.euclid(), -0.1)
