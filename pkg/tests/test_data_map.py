import numpy as np
import pytest
import sympy as sp
from hypothesis import given, settings, strategies as st

from maxwell_elliptic import (GridField, MaxwellData, SurfaceField, check_compatibility,
                              maxwell_to_elliptic, source_traces, tangential_div)
from maxwell_elliptic import closed_form as cf
from maxwell_elliptic.data_map import RELATIONS, DataMapError, volume_norm
from maxwell_elliptic.geometry import MINUS, PLUS
from maxwell_elliptic.oracles import general_mms, plane_wave

from conftest import face_index, unit_grid

x, y, z = cf.X


def volume(grid, plus, minus=None):
    minus = plus if minus is None else minus
    return GridField.from_function(grid, lambda s, p: cf.sample(plus if s == PLUS else minus, p))


def test_divergence_source_gives_k(grid8):
    md = MaxwellData.zeros(grid8, 1.0)
    md.K = volume(grid8, sp.Matrix([x, 0, 0]))
    pd = maxwell_to_elliptic(md, grid8)
    for s in (PLUS, MINUS):
        assert np.allclose(pd.k[s], 1j, atol=1e-12)
        assert np.all(pd.j[s] == 0)


def test_zero_maxwell_data_maps_to_zero(grid8):
    pd = maxwell_to_elliptic(MaxwellData.zeros(grid8, 2.0), grid8)
    for name in pd.VOLUME_FIELDS:
        assert getattr(pd, name).max_abs() == 0
    for name in pd.SURFACE_FIELDS:
        assert getattr(pd, name).max_abs() == 0


def test_zero_frequency_rejected(grid8):
    with pytest.raises(DataMapError):
        maxwell_to_elliptic(MaxwellData.zeros(grid8, 0.0), grid8)


def test_plane_wave_bottom_face(grid8):
    case = plane_wave(1, 1, 1.0)
    md = case.maxwell_data(grid8)
    fi = face_index(grid8, "boundary", 2, -1)
    assert np.allclose(md.E_tau_0.values[fi], (0, -1, 0), atol=1e-15)
    pd = maxwell_to_elliptic(md, grid8)
    assert np.abs(pd.B_nu_0.values[fi]).max() < 1e-12
    assert np.abs(case.problem_data(grid8).B_nu_0.values[fi]).max() < 1e-15


def test_source_normal_jump(grid8):
    K = volume(grid8, sp.Matrix([0, 0, 1]), sp.Matrix([0, 0, 3]))
    tr = source_traces(K, GridField.zeros(grid8, 3), grid8)
    fi = face_index(grid8, "gamma", 2, 1)
    assert np.all(tr["K_nu_gamma"].values[fi] == -2)
    assert tr["J_nu_gamma"].max_abs() == 0


def test_source_boundary_trace(grid8):
    K = volume(grid8, sp.Matrix([0, 0, z]))
    tr = source_traces(K, K, grid8)
    fi = face_index(grid8, "boundary", 2, 1)
    assert np.all(tr["K_nu_0"].values[fi] == 1)


def test_continuous_source_has_no_jump(grid8):
    K = volume(grid8, sp.Matrix([sp.sin(x), y * z, sp.exp(z)]))
    assert source_traces(K, K, grid8)["K_nu_gamma"].max_abs() == 0


def random_surface(grid, surface, rng, ncomp=3):
    def fn(f, p):
        v = rng.standard_normal((len(p), ncomp)) + 1j * rng.standard_normal((len(p), ncomp))
        return np.cross(f.normal, v)
    return SurfaceField.from_function(grid, surface, fn)


def test_homogeneous_interface_relations(grid8):
    rng = np.random.default_rng(7)
    md = MaxwellData.zeros(grid8, 0.7)
    md.E_tau_gamma = random_surface(grid8, "gamma", rng)
    md.H_tau_gamma = random_surface(grid8, "gamma", rng)
    md.E_tau_0 = random_surface(grid8, "boundary", rng)
    pd = maxwell_to_elliptic(md, grid8)
    iw = 0.7j
    assert (pd.B_nu_gamma * iw + tangential_div(md.E_tau_gamma)).max_abs() < 1e-10
    assert (pd.D_nu_gamma * iw - tangential_div(md.H_tau_gamma)).max_abs() < 1e-10
    assert (pd.B_nu_0 * iw + tangential_div(md.E_tau_0)).max_abs() < 1e-10
    assert pd.beta_0.max_abs() == pd.alpha_gamma.max_abs() == pd.beta_gamma.max_abs() == 0
    assert check_compatibility(pd, grid8).passed


@pytest.fixture(scope="module")
def mms_pair(grid8):
    case = general_mms(4)
    md = case.maxwell_data(grid8)
    return case, md, maxwell_to_elliptic(md, grid8)


def test_round_trip_passes(mms_pair, grid8):
    rep = check_compatibility(mms_pair[2], grid8, tol=1e-12)
    assert rep.passed
    assert all(v >= 0 for v in rep.residuals.values())


def test_boundary_flux_perturbation(mms_pair, grid8):
    pd = mms_pair[2]
    base = check_compatibility(pd, grid8)
    rep = check_compatibility(pd.replace(B_nu_0=pd.B_nu_0 + 1e-3), grid8)
    assert rep.residuals["B_nu_0"] == pytest.approx(1e-3 * np.sqrt(6.0), rel=1e-12)
    assert rep.flagged() == ["B_nu_0"]
    for name in RELATIONS:
        if name != "B_nu_0":
            assert rep.residuals[name] == base.residuals[name]


def test_injected_beta0_flagged(mms_pair, grid8):
    pd = mms_pair[2]
    rep = check_compatibility(pd.replace(beta_0=pd.beta_0 + 1.0), grid8)
    assert "beta_0" in rep.flagged()
    assert rep.residuals["beta_0"] == pytest.approx(np.sqrt(6.0), rel=1e-12)
    assert not rep.passed


def test_closed_form_map_matches_exact_data(mms_pair, grid8):
    case = mms_pair[0]
    exact = case.problem_data(grid8)
    cmap = case.closed_form_map(grid8)
    for name in ("B_nu_gamma", "D_nu_gamma", "B_nu_0"):
        assert (cmap[name] - getattr(exact, name)).max_abs() < 1e-11, name
    for name in ("k", "j"):
        assert (cmap[name] - getattr(exact, name)).max_abs() < 1e-11, name


def test_discrete_map_approaches_closed_form():
    case = general_mms(4)
    errs = []
    for n in (8, 16):
        g = unit_grid(n)
        pd = maxwell_to_elliptic(case.maxwell_data(g), g)
        cmap = case.closed_form_map(g)
        errs.append((pd.D_nu_gamma - cmap["D_nu_gamma"]).norm() + volume_norm(pd.j - cmap["j"], g))
    assert errs[1] < errs[0] / 3


@settings(max_examples=8, deadline=None)
@given(st.integers(0, 1000), st.integers(0, 1000),
       st.complex_numbers(max_magnitude=3, allow_nan=False, allow_infinity=False))
def test_map_is_linear(s1, s2, a):
    g = unit_grid(8)
    m1 = general_mms(s1).maxwell_data(g)
    m2 = general_mms(s2).maxwell_data(g)
    lhs = maxwell_to_elliptic(m1 + m2.scaled(a), g)
    p1, p2 = maxwell_to_elliptic(m1, g), maxwell_to_elliptic(m2, g)
    rhs = p1 + p2.scaled(a)
    scale = 1 + abs(a)
    for name in ("k", "j"):
        ref = getattr(p1, name).max_abs() + getattr(p2, name).max_abs()
        assert (getattr(lhs, name) - getattr(rhs, name)).max_abs() <= 1e-12 * scale * ref
    for name in ("B_nu_gamma", "D_nu_gamma", "B_nu_0"):
        ref = getattr(p1, name).max_abs() + getattr(p2, name).max_abs()
        assert (getattr(lhs, name) - getattr(rhs, name)).max_abs() <= 1e-12 * scale * ref


@settings(max_examples=10, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_round_trip_any_seed(seed):
    g = unit_grid(8)
    pd = maxwell_to_elliptic(general_mms(seed).maxwell_data(g), g)
    assert check_compatibility(pd, g, tol=1e-12).passed
