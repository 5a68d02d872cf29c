import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.spatial.transform import Rotation

from maxwell_elliptic import SymbolProblem, lopatinsky_test, media_sweep, principal_symbol_det
from maxwell_elliptic.symbol_check import (BOUNDARY, E_BLOCK, H_BLOCK, INTERFACE, SymbolError,
                                           isotropic_media, normal_flux_jump, ode_matrix,
                                           random_media)


def test_det_unit_axis():
    assert abs(principal_symbol_det((1, 0, 0))) == pytest.approx(1.0, rel=1e-14)


def test_det_origin():
    assert principal_symbol_det((0, 0, 0)) == 0


def test_det_integer_vector():
    assert abs(principal_symbol_det((1, 2, 2))) == pytest.approx(81.0, rel=1e-13)


@settings(max_examples=200)
@given(st.floats(-3, 3), st.floats(-1, 1), st.floats(0, 2 * np.pi))
def test_det_modulus(logr, c, phi):
    r = 10.0 ** logr
    s = np.sqrt(1 - c * c)
    sigma = r * np.array([s * np.cos(phi), s * np.sin(phi), c])
    nrm2 = sigma @ sigma
    assert abs(abs(principal_symbol_det(sigma)) - nrm2 ** 2) <= 1e-12 * nrm2 ** 2


@settings(max_examples=100)
@given(st.floats(1e-3, 1e3), st.floats(0, 2 * np.pi))
def test_ode_spectrum(r, theta):
    G = ode_matrix((r * np.cos(theta), r * np.sin(theta)))
    lam = np.sort(np.linalg.eigvals(G).real)
    assert np.allclose(lam, [-r, -r, r, r], rtol=1e-8)


def iso_problem(sigma=(1.0, 0.0), surface=INTERFACE, rotation=None):
    kw = {} if rotation is None else {"rotation": rotation}
    return SymbolProblem(sigma, 1.0, 1.0, 1.0, 1.0, surface=surface, **kw)


def test_identity_media_trivial_kernel():
    for block in (E_BLOCK, H_BLOCK):
        rep = lopatinsky_test(iso_problem(), block)
        assert rep.stable_dims == {"plus": 2, "minus": 2}
        assert rep.min_singular_value > 1e-6
        assert rep.elliptic
        assert np.all(np.diff(rep.singular_values) <= 0)


def test_positivity_identity():
    assert normal_flux_jump(np.eye(3), np.eye(3), (1.0, 0.0)).real == pytest.approx(2.0, abs=1e-12)


@settings(max_examples=50)
@given(st.floats(0.1, 10), st.floats(0.1, 10), st.floats(0.1, 5), st.floats(0, 2 * np.pi),
       st.floats(-3, 3))
def test_positivity_identity_general(e_plus, e_minus, r, theta, C):
    sigma = (r * np.cos(theta), r * np.sin(theta))
    val = normal_flux_jump(e_plus, e_minus, sigma, C)
    assert val.real == pytest.approx(C * r * (e_plus + e_minus), abs=1e-12 * max(1, abs(C) * r * 20))


def test_zero_sigma_rejected():
    with pytest.raises(SymbolError):
        lopatinsky_test(iso_problem(sigma=(0.0, 0.0)))


def test_non_orthogonal_rotation_rejected():
    M = np.eye(3)
    M[0, 1] = 1e-9
    with pytest.raises(SymbolError):
        iso_problem(rotation=M)


@settings(max_examples=40, deadline=None)
@given(st.floats(0.01, 100), st.floats(0, 2 * np.pi))
def test_isotropic_kernel_candidate_matches_ansatz(r, theta):
    rep = lopatinsky_test(iso_problem(sigma=(r * np.cos(theta), r * np.sin(theta))), E_BLOCK)
    assert rep.ansatz_residual <= 1e-10
    assert abs(rep.ansatz_a) <= 1e-10 * np.linalg.norm([1, r])


def test_isotropic_sweep_is_angle_independent():
    rep = media_sweep(1, seed=3, media=[isotropic_media()])
    for surface in (INTERFACE, BOUNDARY):
        for block in (E_BLOCK, H_BLOCK):
            vals = [r.min_singular_value for r in rep.rows
                    if r.surface == surface and r.block == block]
            assert np.ptp(vals) <= 1e-12 * max(vals)
    assert rep.elliptic


def test_homogeneity_verdict_invariant():
    reports = [media_sweep(3, seed=5, n_sigma=8, sigma_scale=t) for t in (1.0, 10.0)]
    assert reports[0].verdict() == reports[1].verdict() == "elliptic"
    a = np.array([r.min_singular_value for r in reports[0].rows])
    b = np.array([r.min_singular_value for r in reports[1].rows])
    # orthonormal stable bases make the condition matrices depend on the direction only
    assert np.allclose(a, b, rtol=1e-8)


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 2 ** 31), st.floats(0, 2 * np.pi), st.floats(0, 2 * np.pi))
def test_tangent_plane_rotation_keeps_verdict(seed, theta, phi):
    rng = np.random.default_rng(seed)
    m = random_media(rng)
    M = Rotation.random(random_state=rng).as_matrix()
    R = Rotation.from_euler("z", phi).as_matrix()
    sigma = (np.cos(theta), np.sin(theta))
    for surface in (INTERFACE, BOUNDARY):
        for block in (E_BLOCK, H_BLOCK):
            a = lopatinsky_test(SymbolProblem(sigma, m["eps_plus"], m["eps_minus"], m["mu_plus"],
                                              m["mu_minus"], rotation=M, surface=surface), block)
            b = lopatinsky_test(SymbolProblem(sigma, m["eps_plus"], m["eps_minus"], m["mu_plus"],
                                              m["mu_minus"], rotation=M @ R, surface=surface), block)
            assert a.elliptic == b.elliptic


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2 ** 31))
def test_random_admissible_media_are_elliptic(seed):
    rep = media_sweep(1, seed=seed, n_sigma=8)
    assert rep.dims_ok
    assert rep.elliptic


def test_stable_dimension_failure_reported():
    # an indefinite coefficient in the divergence row breaks the 2/2 split
    p = SymbolProblem((1.0, 0.0), np.diag([1.0, 1.0, -1.0]), 1.0, 1.0, 1.0,
                      anisotropic_divergence=True)
    rep = lopatinsky_test(p, E_BLOCK)
    assert rep.structural_failure
    assert rep.stable_dims["plus"] != 2
    assert not rep.elliptic


def test_sweep_needs_samples():
    with pytest.raises(SymbolError):
        media_sweep(0)


def test_sweep_csv(tmp_path):
    rep = media_sweep(2, seed=1, n_sigma=4)
    rep.write_csv(tmp_path / "s.csv")
    lines = (tmp_path / "s.csv").read_text().splitlines()
    assert lines[0].startswith("sample,sigma_angle,surface,block,min_singular_value")
    assert len(lines) == 1 + 2 * 4 * 2 * 2
