import cmath
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from ptlaser import (
    DfbHalf,
    GainSlab,
    Mirror,
    Slab,
    StructureSpec,
    build_structure,
    dfb_half_matrix,
    fp_laser,
    gain_slab_matrix,
    mat_det,
    mirror_matrix,
    near_threshold,
    near_threshold_matrix,
    pt_dfb,
    slab_matrix,
)
from ptlaser.elements import gain_family, time_reversed
from ptlaser.oracle import expm_coupled_mode, integrate_helmholtz, layered_profile
from ptlaser.spectral import SearchRegion, find_zeros

from conftest import entries, rel_dev

G_THRESHOLD = -math.log(0.9)


def test_slab_zero_thickness_is_identity():
    m = slab_matrix(1.5 + 0.1j, 0.0)
    assert np.allclose(entries(m), [1, 0, 0, 1], atol=1e-15)


def test_slab_matched_index_is_propagation():
    phi = 0.83
    m = slab_matrix(1.0, phi, 1.0)
    assert np.allclose(entries(m), [cmath.exp(1j * phi), 0, 0, cmath.exp(-1j * phi)], atol=1e-15)


def test_slab_matches_helmholtz_oracle():
    n, kl = 1.5 + 0.01j, 2.0
    eps, breaks, span = layered_profile([(kl, n * n)])
    ref = integrate_helmholtz(eps, 1.0, span, 0.01, breakpoints=breaks)
    assert rel_dev(slab_matrix(n, kl), ref) <= 1e-8


def test_slab_rejects_zero_index():
    with pytest.raises(ValueError):
        slab_matrix(0, 1.0)


def test_mirror_values():
    m = mirror_matrix(0.9)
    s = math.sqrt(0.19)
    # m11 = (t^2 - r^2)/t = -1/(i s), m12 = r/(i s)
    assert np.allclose(entries(m), [1j / s, -0.9j / s, 0.9j / s, -1j / s], rtol=1e-14)
    assert np.allclose(entries(m), [2.2942j, -2.0648j, 2.0648j, -2.2942j], atol=1e-4)
    # fixed t_M = i: a fully transmitting mirror is a quarter-wave phase, not the identity
    assert np.allclose(entries(mirror_matrix(0.0)), [1j, 0, 0, -1j])
    s0 = __import__("ptlaser").s_coefficients(mirror_matrix(0.0))
    assert abs(s0.T - 1) < 1e-15 and s0.R_left == 0


@pytest.mark.parametrize("r", [1.0, -1.0, 1.5])
def test_mirror_rejects_unit_reflectivity(r):
    with pytest.raises(ValueError):
        mirror_matrix(r)
    with pytest.raises(ValueError):
        Mirror(r)


def test_gain_slab():
    assert np.allclose(entries(gain_slab_matrix(0, 0)), [1, 0, 0, 1])
    m = gain_slab_matrix(0.105360516, math.pi)
    assert np.allclose(entries(m), [-1 / 0.9, 0, 0, -0.9], atol=1e-6)


@given(st.floats(-3, 3), st.floats(-10, 10))
def test_gain_slab_det(gl, delta):
    assert abs(mat_det(gain_slab_matrix(gl, delta)) - 1) < 1e-12


def test_dfb_half_no_grating_is_envelope_propagation():
    phi = 0.7
    m = dfb_half_matrix(0.0, 0.0, phi)
    assert np.allclose(entries(m), [cmath.exp(-1j * phi), 0, 0, cmath.exp(1j * phi)], atol=1e-15)


def test_dfb_half_pure_grating_values():
    m = dfb_half_matrix(1.0, 0.0, 0.0)
    c, s = math.cosh(1.0), math.sinh(1.0)
    assert np.allclose(entries(m), [c, -1j * s, 1j * s, c], rtol=1e-14)
    assert np.allclose(entries(m), [1.543081, -1.175201j, 1.175201j, 1.543081], atol=1e-6)
    assert abs(mat_det(m) - 1) < 1e-14


@given(st.floats(0, 3), st.floats(-6, 6), st.floats(-6, 6))
def test_dfb_half_matches_matrix_exponential(q0l, gl, delta):
    m = dfb_half_matrix(q0l, gl, delta)
    ref = expm_coupled_mode(q0l, delta + 1j * gl)
    assert rel_dev(m, ref) <= 1e-10


@pytest.mark.parametrize("q0l", [0.5, 1.0, 2.0])
def test_dfb_half_continuous_at_branch_point(q0l):
    # |lambdaL| = 1e-9: rhoL just below q0L
    rho = math.sqrt(q0l * q0l - 1e-18)
    m = dfb_half_matrix(q0l, 0.0, rho)
    limit = [1 - 1j * rho, -1j * q0l, 1j * q0l, 1 + 1j * rho]
    assert np.abs(entries(m) - limit).max() <= 1e-8
    # complex detuning with lambda^2 ~ 1e-18 off the real axis
    m = dfb_half_matrix(q0l, 1e-10, q0l)
    assert np.abs(entries(m) - [1 - 1j * q0l, -1j * q0l, 1j * q0l, 1 + 1j * q0l]).max() <= 1e-8


def test_dfb_half_at_exact_branch_point():
    m = dfb_half_matrix(1.0, 0.0, 1.0)  # lambda = 0
    assert np.allclose(entries(m), [1 - 1j, -1j, 1j, 1 + 1j], atol=1e-15)


def test_near_threshold_values():
    m = near_threshold_matrix(3.0, 0.3, 0.02, 1.0, 0.0)
    assert np.allclose(entries(m), [-0.02j, 3j, (0.0004 - 1) / 3j, 0.02j], rtol=1e-14)
    assert abs(m.m21 - 0.3332j) < 1e-12
    assert mat_det(m) == pytest.approx(1, abs=1e-15)
    assert abs(near_threshold_matrix(3.0, 0.3, 0.02, 1.0, -0.02j).m22) < 1e-15


@given(st.floats(0.5, 5), st.floats(-1, 1), st.floats(1e-3, 0.5), st.floats(-1, 1), st.floats(-1, 1))
def test_near_threshold_det_one(alpha, beta, eps, kr, d):
    m = near_threshold_matrix(alpha, beta, eps, complex(1 + kr, kr), d)
    assert abs(mat_det(m) - 1) < 1e-12


def test_near_threshold_rejects_singular():
    with pytest.raises(ValueError):
        near_threshold_matrix(3.0, 0.3, 0.02, 1.0, -10.0)
    with pytest.raises(ValueError):
        near_threshold_matrix(3.0, 0.3, 0.0, 1.0, 0.0)
    with pytest.raises(ValueError):
        near_threshold_matrix(0.0, 0.3, 0.02, 1.0, 0.0)


def test_build_single_element():
    spec = StructureSpec((GainSlab(0.2, 0.1),))
    assert build_structure(spec, 0.3) == gain_slab_matrix(0.2, 0.4)


def test_build_empty_rejected():
    with pytest.raises(ValueError):
        build_structure(StructureSpec(()), 0.0)


def test_build_order_rightmost_factor_is_leftmost_element():
    a, b = Slab(1.5, 0.4), GainSlab(0.3, 0.2)
    m = build_structure(StructureSpec((a, b)), 0.0)
    ref = b.matrix(0.0) @ a.matrix(0.0)
    assert rel_dev(m, ref) < 1e-15


def test_fp_preset_at_threshold():
    assert abs(build_structure(fp_laser(0.9, G_THRESHOLD), math.pi).m22) < 1e-10


def test_pt_dfb_preset_structure():
    spec = pt_dfb(1.0, 4.43)
    gain, loss = spec.elements
    assert gain.q0l == loss.q0l and gain.gl == -loss.gl and gain.gl > 0


def test_pt_dfb_is_product_of_halves():
    # total-length parameters split evenly; coupled-mode detuning is -delta
    delta = 0.7 - 0.1j
    m = build_structure(pt_dfb(1.0, 4.43), delta)
    ref = dfb_half_matrix(0.5, -2.215, -delta / 2) @ dfb_half_matrix(0.5, 2.215, -delta / 2)
    assert rel_dev(m, ref) < 1e-14


def test_pt_dfb_real_frequency_structure(rng):
    delta = rng.uniform(-8, 8, 200)
    m = build_structure(pt_dfb(1.0, 4.43), delta)
    scale = np.abs(m.as_array()).max(axis=(-1, -2))
    assert np.all(np.abs(m.m11 - np.conj(m.m22)) <= 1e-12 * scale)
    assert np.all(np.abs(m.m12.real) <= 1e-12 * scale)
    assert np.all(np.abs(m.m21.real) <= 1e-12 * scale)


@pytest.mark.parametrize("spec", [fp_laser(0.9, 0.07), pt_dfb(1.0, 4.43), near_threshold(), pt_dfb(2.0, 1.0)])
def test_det_one_for_presets(spec, rng):
    w = rng.uniform(-8, 8, 300) + 1j * rng.uniform(-1, 1, 300)
    m = build_structure(spec, w)
    scale = np.abs(m.as_array()).max(axis=(-1, -2)) ** 2
    assert np.all(np.abs(mat_det(m) - 1) <= 1e-10 * np.maximum(scale, 1))


@pytest.mark.parametrize(
    "spec,region",
    [(pt_dfb(1.0, 4.43), SearchRegion(-8, 8, -2, 2)), (fp_laser(0.9, 0.05), SearchRegion(0.1, 6, -1, 1))],
)
def test_time_reversal_turns_lasing_poles_into_cpa_zeros(spec, region):
    rev = time_reversed(spec)
    z22 = find_zeros(spec, "M22", region).freqs
    z11_rev = find_zeros(rev, "M11", region).freqs
    assert z22 and len(z22) == len(z11_rev)
    key = lambda z: (round(z.real, 6), z.imag)
    for a, b in zip(sorted(z22, key=key), sorted(z11_rev, key=key)):
        assert abs(a.conjugate() - b) < 1e-8


def test_gain_family_keeps_signs():
    fam = gain_family(pt_dfb(1.0, 0.0))
    gain, loss = fam(2.0).elements
    assert gain.gl == 2.0 and loss.gl == -2.0
    assert fam(2.0).elements[0].q0l == 1.0


def test_dfb_half_rejects_negative_coupling():
    with pytest.raises(ValueError):
        DfbHalf(-1.0, 0.0)
