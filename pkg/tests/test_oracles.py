import numpy as np
import pytest
import sympy as sp
from hypothesis import given, settings, strategies as st

from maxwell_elliptic import MediumField, assemble, residual
from maxwell_elliptic import closed_form as cf
from maxwell_elliptic.geometry import MINUS, PLUS, SIDES
from maxwell_elliptic.oracles import (ManufacturedCase, OracleError, general_mms,
                                      impedance_coefficients, layered_wave, plane_wave)

from conftest import orders, unit_grid

x, y, z = cf.X


def is_zero(expr):
    return all(sp.simplify(e) == 0 for e in sp.Matrix([expr]))


def test_plane_wave_fields():
    case = plane_wave(eps=2, mu=1, omega=1.0)
    k = sp.sqrt(2)
    assert is_zero(case.H[PLUS] - k * sp.Matrix([0, 1, 0]) * sp.exp(sp.I * k * z))
    for s in SIDES:
        assert is_zero(case.K(s)) and is_zero(case.J(s))
        assert case.alpha[s] == 0 and case.beta[s] == 0


def test_oblique_plane_wave_solves_maxwell():
    d = np.array([1.0, 2.0, 2.0]) / 3
    case = plane_wave(eps=3, mu=2, omega=0.5, direction=d, polarization=(2, -1, 0))
    assert is_zero(case.K(PLUS)) and is_zero(case.J(PLUS))
    assert is_zero(case.k(PLUS)) and is_zero(case.j(PLUS))


def test_zero_polarization(grid8):
    st_ = plane_wave(polarization=(0, 0, 0)).exact_state(grid8)
    assert st_.E.max_abs() == 0 and st_.H.max_abs() == 0


def test_polarization_must_be_transverse():
    with pytest.raises(OracleError):
        plane_wave(direction=(0, 0, 1), polarization=(0, 1, 1))


def test_plane_wave_pde_residual_second_order():
    case = plane_wave(eps=2, omega=1.0)
    res = []
    for n in (8, 16, 32):
        g = unit_grid(n)
        res.append(residual(assemble(g, case.medium, case.problem_data(g)), case.exact_state(g)).total_l2)
    assert np.all(orders(res) >= 1.8)


def test_impedance_equal_media():
    r, t = impedance_coefficients(2.5, 2.5, 1.0)
    assert r == 0 and t == 1


def test_impedance_contrast():
    r, t = impedance_coefficients(1, 4, 1)
    assert r == pytest.approx(-1 / 3, abs=1e-15)
    assert t == pytest.approx(2 / 3, abs=1e-15)


def test_reflection_identity_symbolic():
    zp, zm = sp.symbols("Z_p Z_m", positive=True)
    r = (zm - zp) / (zm + zp)
    t = 2 * zm / (zm + zp)
    assert sp.simplify(1 + r - t) == 0


@settings(max_examples=50, deadline=None)
@given(st.floats(0.1, 10), st.floats(0.1, 10), st.floats(0.1, 10))
def test_reflection_identity_numeric(ep, em, mu):
    r, t = impedance_coefficients(ep, em, mu)
    assert abs(1 + r - t) < 1e-14


@pytest.mark.parametrize("ep,em", [(1, 4), (2, 2), (1, sp.Rational(9, 4))])
def test_layered_wave_continuity(ep, em):
    case = layered_wave(ep, em, 1, omega=1.3, z0=0.75)
    for F in (case.E, case.H):
        jumpvec = (F[PLUS] - F[MINUS]).subs(z, sp.Rational(3, 4))
        tang = sp.Matrix([0, 0, 1]).cross(jumpvec)
        assert all(abs(complex(sp.N(c))) < 1e-14 for c in tang)
    for s in SIDES:
        assert is_zero(case.K(s)) and is_zero(case.J(s))


def test_layered_wave_rejects_oblique():
    with pytest.raises(OracleError):
        layered_wave(direction=(0, 1, 0))


def test_mms_polynomial_example():
    case = ManufacturedCase.from_fields("quad", 1.0, MediumField(), sp.Matrix([y ** 2, 0, 0]),
                                        sp.zeros(3, 1))
    assert is_zero(case.K(PLUS) - sp.Matrix([0, 0, -2 * y]))
    assert is_zero(case.J(PLUS) - sp.I * sp.Matrix([y ** 2, 0, 0]))
    assert sp.simplify(-cf.div(case.K(PLUS)) / sp.I) == 0
    assert sp.simplify(cf.div(case.J(PLUS)) / sp.I) == 0


def test_zero_mms_gives_zero_data(grid8):
    pd = general_mms(3, scale=0).problem_data(grid8)
    for name in pd.VOLUME_FIELDS:
        assert getattr(pd, name).max_abs() == 0
    for name in pd.SURFACE_FIELDS:
        assert getattr(pd, name).max_abs() == 0


def test_mms_is_discontinuous_and_exercises_every_relation(grid8):
    case = general_mms(0)
    pd = case.problem_data(grid8)
    for name in ("E_tau_gamma", "H_tau_gamma", "D_nu_gamma", "B_nu_gamma", "E_tau_0", "B_nu_0"):
        assert getattr(pd, name).max_abs() > 1e-3, name
    from maxwell_elliptic import source_traces
    assert source_traces(pd.K, pd.J, grid8)["K_nu_gamma"].max_abs() > 1e-3
    assert all(case.alpha[s] == 0 and case.beta[s] == 0 for s in SIDES)


def test_mms_is_reproducible():
    a, b = general_mms(11), general_mms(11)
    assert all(a.E[s] == b.E[s] and a.H[s] == b.H[s] for s in SIDES)
    assert general_mms(12).E[PLUS] != a.E[PLUS]


@settings(max_examples=5, deadline=None)
@given(st.integers(0, 10 ** 4))
def test_closed_form_map_reproduces_induced_data(seed):
    g = unit_grid(8)
    case = general_mms(seed)
    exact = case.problem_data(g)
    cmap = case.closed_form_map(g)
    for name, val in cmap.items():
        ref = getattr(exact, name)
        assert (val - ref).max_abs() <= 1e-11 * max(1.0, ref.max_abs())


def test_mms_residual_second_order():
    case = general_mms(5)
    res = []
    for n in (8, 16, 32):
        g = unit_grid(n)
        res.append(residual(assemble(g, case.medium, case.problem_data(g)), case.exact_state(g)).total_l2)
    assert np.all(orders(res) >= 1.8)
