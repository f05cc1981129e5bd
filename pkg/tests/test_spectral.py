"""Spectral transforms, PD certification, and the Hodge decomposition."""

import math
import warnings

import numpy as np
import pytest

from trikernels import kernels as K
from trikernels import spectral as S
from conftest import random_rotation

QUICK_RHO = np.geomspace(1e-3, 6.0, 48)


def mixed_gaussian_kernel(c1, c2, d):
    return K.TriKernel(
        dim=d,
        k_par=lambda r: np.exp(-c1 * np.square(r)),
        k_perp=lambda r: np.exp(-c2 * np.square(r)),
        dk_par=lambda r: -2 * c1 * r * np.exp(-c1 * np.square(r)),
        dk_perp=lambda r: -2 * c2 * r * np.exp(-c2 * np.square(r)),
        k0=1.0,
        small_r_ktilde=c2 - c1,
        family_tag="mixed-gaussian",
        tail_scale=math.sqrt(52.0 / min(c1, c2)),
        decay="gaussian",
    )


# --- forward map -------------------------------------------------------------

def test_forward_map_scalar_gaussian():
    # k(r) = e^{-r^2/2} in the plane transforms to 2 pi e^{-2 pi^2 rho^2}
    k = K.gaussian_kernel(0.5, 2)
    grid = np.geomspace(0.01, 2.0, 40)
    s = S.forward_map(k, grid)
    want = 2 * math.pi * np.exp(-2 * math.pi ** 2 * grid ** 2)
    hp_half, _ = S.spectral_pair_at(k, 0.5)
    assert hp_half == pytest.approx(2 * math.pi * math.exp(-math.pi ** 2 / 2), rel=1e-8)
    mask = want >= 1e-8 * want.max()
    np.testing.assert_allclose(s.h_par_samples[mask], want[mask], rtol=1e-7)
    # scalar input collapses the pair
    np.testing.assert_allclose(s.h_par_samples, s.h_perp_samples, atol=1e-14)


def test_forward_map_cauchy():
    k = K.cauchy_kernel(1.0, 3)
    grid = np.geomspace(0.05, 2.0, 12)
    s = S.forward_map(k, grid)
    want = S.cauchy_spectrum(1.0, 3)
    np.testing.assert_allclose(s.h_par_samples, want.h_par(grid), rtol=1e-7)


def test_forward_map_example1_closed_form():
    a, b, c = 1.5, 1.0, 1.0
    k = K.family_example1(a, b, c, 2)
    grid = np.geomspace(1e-3, 4.0, 30)
    s = S.forward_map(k, grid)
    cf = S.example1_spectrum(a, b, c, 2)
    peak = max(np.abs(cf.h_par(grid)).max(), np.abs(cf.h_perp(grid)).max())
    assert np.max(np.abs(s.h_par_samples - cf.h_par(grid))) < 1e-6 * peak
    assert np.max(np.abs(s.h_perp_samples - cf.h_perp(grid))) < 1e-6 * peak


def test_forward_map_example2_closed_form():
    a, b, c = 1.5, 1.0, 1.0
    k = K.family_example2(a, b, c, 2)
    grid = np.geomspace(1e-3, 4.0, 30)
    s = S.forward_map(k, grid)
    cf = S.example2_spectrum(a, b, c, 2)
    peak = max(np.abs(cf.h_par(grid)).max(), np.abs(cf.h_perp(grid)).max())
    assert np.max(np.abs(s.h_par_samples - cf.h_par(grid))) < 1e-6 * peak
    assert np.max(np.abs(s.h_perp_samples - cf.h_perp(grid))) < 1e-6 * peak


@pytest.mark.parametrize("d,ell,sigma", [(2, 3.0, 1.0), (3, 3.0, 1.0), (2, 4.0, 0.8)])
def test_forward_map_sobolev_kernel_green_identity(d, ell, sigma):
    # the normalized Bessel-type kernel inverts the operator whose symbol
    # is (1 + 4 pi^2 sigma^2 rho^2)^ell, so its spectrum is the reciprocal
    k = K.bessel_kernel(sigma, ell, d)
    grid = np.geomspace(0.02, 2.0, 14)
    s = S.forward_map(k, grid)
    want = (1 + 4 * np.pi ** 2 * sigma ** 2 * grid ** 2) ** (-ell)
    np.testing.assert_allclose(s.h_par_samples, want, rtol=1e-8)
    np.testing.assert_allclose(s.h_perp_samples, want, rtol=1e-8)


def test_bessel_div_free_spectrum():
    # double-curl construction multiplies the generator spectrum by (2 pi rho)^2
    # and moves it entirely into the transverse coefficient
    prof = K.bessel_profile(1.5, 1.0, K.sobolev_green_constant(1.0, 3.0, 3))
    kdf = K.make_div_free(prof, 3)
    g = np.geomspace(0.05, 3.0, 12)
    s = S.forward_map(kdf, g)
    assert np.max(np.abs(s.h_par_samples)) <= 1e-8 * np.max(np.abs(s.h_perp_samples))
    want = (2 * np.pi * g) ** 2 * (1 + 4 * np.pi ** 2 * g ** 2) ** (-3.0)
    np.testing.assert_allclose(s.h_perp_samples, want, rtol=1e-8)


def test_forward_map_rejects_bad_grid():
    k = K.gaussian_kernel(1.0, 2)
    with pytest.raises(ValueError):
        S.forward_map(k, np.array([0.0, 1.0]))


# --- inverse map and the involution -------------------------------------------

def test_involution_on_example1():
    k = K.family_example1(1.5, 1.0, 1.0, 2)
    s = S.forward_map(k)
    r = np.geomspace(0.05, 5.0, 50)
    kp, kq = S.inverse_map(s, r)
    assert np.max(np.abs(kp - k.k_par(r))) <= 1e-5
    assert np.max(np.abs(kq - k.k_perp(r))) <= 1e-5


def test_inverse_of_gaussian_spectrum():
    s = S.gaussian_spectrum(0.5, 2)  # spectrum of e^{-r^2/2}
    r = np.geomspace(0.05, 4.0, 25)
    kp, kq = S.inverse_map(s, r)
    np.testing.assert_allclose(kp, np.exp(-0.5 * r ** 2), atol=1e-9)
    np.testing.assert_allclose(kq, np.exp(-0.5 * r ** 2), atol=1e-9)


def test_inverse_of_cauchy_spectrum():
    s = S.cauchy_spectrum(1.0, 3)
    r = np.geomspace(0.05, 5.0, 30)
    kp, kq = S.inverse_map(s, r)
    want = 1.0 / (1.0 + r ** 2)
    np.testing.assert_allclose(kp, want, rtol=1e-8)
    np.testing.assert_allclose(kq, want, rtol=1e-8)


def test_involution_on_example2():
    k = K.family_example2(1.5, 1.0, 1.0, 2)
    s = S.forward_map(k)
    r = np.geomspace(0.05, 5.0, 30)
    kp, kq = S.inverse_map(s, r)
    assert np.max(np.abs(kp - k.k_par(r))) <= 1e-5
    assert np.max(np.abs(kq - k.k_perp(r))) <= 1e-5


def test_inverse_scalar_spectrum_collapses():
    s = S.gaussian_spectrum(1.0, 3)
    r = np.geomspace(0.1, 3.0, 10)
    kp, kq = S.inverse_map(s, r)
    np.testing.assert_allclose(kp, kq, atol=1e-10)


def test_inverse_small_r_limit_matches_k0():
    s = S.gaussian_spectrum(1.0, 2)
    kp, kq = S.inverse_map(s, np.array([1e-4, 5e-4]))
    np.testing.assert_allclose(kp, 1.0, rtol=1e-9)
    np.testing.assert_allclose(kq, 1.0, rtol=1e-9)


# --- certification ------------------------------------------------------------

def test_certify_positive_families():
    for k in (K.family_example1(1.5, 1.0, 1.0, 2), K.family_example2(1.5, 1.0, 1.0, 2)):
        v = S.certify_pd(k, QUICK_RHO)
        assert v.positive and v.strictly


def test_certify_negative_example1():
    v = S.certify_pd(K.family_example1(3.0, 1.0, 1.0, 2), QUICK_RHO)
    assert not v.positive
    # the longitudinal coefficient starts at pi (b - a/2) < 0
    assert v.min_h_par == pytest.approx(math.pi * (1.0 - 1.5), rel=1e-3)


def test_certify_mixed_gaussian_non_example():
    k = mixed_gaussian_kernel(1.0, 2.0, 2)
    v = S.certify_pd(k, QUICK_RHO)
    assert not v.positive
    assert v.min_h_par < -1e-4  # fails in the longitudinal coefficient
    equal = mixed_gaussian_kernel(1.5, 1.5, 2)
    assert S.certify_pd(equal, QUICK_RHO).positive


def test_certify_zero_kernel_positive_but_not_strict():
    zero = K.family_example1(0.0, 0.0, 1.0, 2)
    v = S.certify_pd(zero, QUICK_RHO)
    assert v.positive and not v.strictly


def test_verdict_records_grid_and_tol():
    v = S.certify_pd(K.gaussian_kernel(1.0, 2), QUICK_RHO, tol=1e-7)
    assert v.tol == 1e-7
    assert v.n_grid == len(QUICK_RHO)
    assert v.rho_min == pytest.approx(QUICK_RHO[0])


def test_bochner_quadratic_form_nonnegative(rng):
    for k in (K.family_example1(1.5, 1.0, 1.0, 2), K.gaussian_kernel(1.0, 3)):
        for _ in range(5):
            x = rng.normal(size=(5, k.dim))
            al = rng.normal(size=(5, k.dim))
            total = 0.0
            for i in range(5):
                for j in range(5):
                    total += al[i] @ K.eval_matrix(k, x[i] - x[j]) @ al[j]
            assert total >= -1e-9


# --- mixed Gaussian closed form ----------------------------------------------

def test_mixed_gaussian_reduces_to_scalar_when_equal():
    c = 1.3
    s = S.mixed_gaussian_spectrum(c, c, 2)
    ref = S.gaussian_spectrum(c, 2)
    rho = np.geomspace(1e-3, 3.0, 50)
    np.testing.assert_allclose(s.h_par(rho), ref.h_par(rho), rtol=1e-10)
    np.testing.assert_allclose(s.h_perp(rho), ref.h_perp(rho), rtol=1e-10)


def test_mixed_gaussian_planar_symmetry():
    # in the plane the two coefficients swap under exchanging the rates
    s12 = S.mixed_gaussian_spectrum(1.0, 2.0, 2)
    s21 = S.mixed_gaussian_spectrum(2.0, 1.0, 2)
    rho = np.geomspace(0.01, 3.0, 40)
    np.testing.assert_allclose(s12.h_par(rho), s21.h_perp(rho), rtol=1e-12)


def test_mixed_gaussian_goes_negative():
    s = S.mixed_gaussian_spectrum(1.0, 2.0, 2)
    rho = np.linspace(0.8, 3.0, 50)
    assert np.min(s.h_par(rho)) < -1e-4


def test_mixed_gaussian_matches_quadrature():
    for d in (2, 3):
        k = mixed_gaussian_kernel(1.0, 2.0, d)
        grid = np.geomspace(0.05, 2.5, 16)
        s = S.forward_map(k, grid)
        cf = S.mixed_gaussian_spectrum(1.0, 2.0, d)
        peak = max(np.abs(cf.h_par(grid)).max(), np.abs(cf.h_perp(grid)).max())
        assert np.max(np.abs(s.h_par_samples - cf.h_par(grid))) < 1e-6 * peak
        assert np.max(np.abs(s.h_perp_samples - cf.h_perp(grid))) < 1e-6 * peak


# --- construction spectra: masked coefficients --------------------------------

def test_div_free_construction_kills_h_par():
    k = K.make_div_free(K.gaussian_profile(0.5, 1.0), 2)
    grid = np.geomspace(0.05, 4.0, 20)
    s = S.forward_map(k, grid)
    assert np.max(np.abs(s.h_par_samples)) <= 1e-6 * np.max(np.abs(s.h_perp_samples))


def test_curl_free_construction_kills_h_perp():
    k = K.make_curl_free(K.gaussian_profile(0.5, 1.0), 2)
    grid = np.geomspace(0.05, 4.0, 20)
    s = S.forward_map(k, grid)
    assert np.max(np.abs(s.h_perp_samples)) <= 1e-6 * np.max(np.abs(s.h_par_samples))


def test_masked_spectrum_inverts_to_condition_satisfying_kernel():
    # and conversely: a spectrum with h_par = 0 inverts to a div-free pair
    base = S.gaussian_spectrum(1.0, 2)
    masked = S.Spectrum(dim=2, h_par=lambda p: np.zeros_like(np.asarray(p, float)),
                        h_perp=base.h_perp, provenance="closed-form",
                        tail_scale=base.tail_scale)
    r = np.linspace(0.1, 4.0, 40)
    kp, kq = S.inverse_map(masked, r)
    # div-free condition via central differences of the sampled coefficients
    h = r[1] - r[0]
    dk = (kp[2:] - kp[:-2]) / (2 * h)
    resid = (2 - 1) * (kp[1:-1] - kq[1:-1]) / r[1:-1] + dk
    assert np.max(np.abs(resid)) < 5e-3 * np.max(np.abs(kq))


# --- spectral matrix eigenstructure -------------------------------------------

def test_spectrum_matrix_eigenvectors(rng):
    s = S.example1_spectrum(1.5, 1.0, 1.0, 2)
    for _ in range(10):
        xi = rng.normal(size=2)
        m = S.spectrum_matrix(s, xi)
        rho = np.linalg.norm(xi)
        v = m @ xi
        np.testing.assert_allclose(v, float(s.h_par(rho)) * xi, atol=1e-12)
        perp = np.array([-xi[1], xi[0]])
        np.testing.assert_allclose(m @ perp, float(s.h_perp(rho)) * perp, atol=1e-12)


def test_spectrum_matrix_rotation_equivariance(rng):
    s = S.gaussian_spectrum(1.0, 3)
    xi = rng.normal(size=3)
    rot = random_rotation(rng, 3)
    np.testing.assert_allclose(S.spectrum_matrix(s, rot @ xi),
                               rot @ S.spectrum_matrix(s, xi) @ rot.T, atol=1e-12)


# --- Hodge split ---------------------------------------------------------------

@pytest.fixture(scope="module")
def gaussian_split():
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", S.HeavyTailWarning)
        return S.hodge_split(K.gaussian_kernel(1.0, 2))


def test_hodge_split_transverse_closed_form(gaussian_split):
    k1, _ = gaussian_split
    r = np.geomspace(0.05, 5.0, 60)
    want = (1 - np.exp(-r ** 2)) / (2 * r ** 2)
    assert np.max(np.abs(k1.k_perp(r) - want)) < 1e-6


def test_hodge_split_components_sum(gaussian_split):
    k1, k2 = gaussian_split
    r = np.geomspace(0.05, 5.0, 60)
    gauss = np.exp(-r ** 2)
    assert np.max(np.abs(k1.k_par(r) + k2.k_par(r) - gauss)) < 1e-6
    assert np.max(np.abs(k1.k_perp(r) + k2.k_perp(r) - gauss)) < 1e-6


def test_hodge_split_matches_closed_pair(gaussian_split):
    k1, k2 = gaussian_split
    c1, c2 = K.gaussian_hodge_pair(1.0, 2)
    r = np.geomspace(0.05, 5.0, 60)
    assert np.max(np.abs(k1.k_par(r) - c1.k_par(r))) < 1e-6
    assert np.max(np.abs(k2.k_perp(r) - c2.k_perp(r))) < 1e-6


def test_hodge_split_warns_on_heavy_tails():
    with pytest.warns(S.HeavyTailWarning):
        S.hodge_split(K.gaussian_kernel(1.0, 2))


def test_hodge_split_of_div_free_input_is_trivial():
    kdf = K.make_div_free(K.gaussian_profile(0.5, 1.0), 2)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", S.HeavyTailWarning)
        part_cf, part_df = S.hodge_split(kdf)
    r = np.geomspace(0.05, 4.0, 30)
    scale = np.max(np.abs(kdf.k_par(r)))
    assert np.max(np.abs(part_cf.k_par(r))) < 1e-8 * scale
    assert np.max(np.abs(part_df.k_par(r) - kdf.k_par(r))) < 1e-6 * scale


def test_hodge_orthogonality_defect_scales_inversely_with_area(gaussian_split):
    k1, k2 = gaussian_split
    # components decay like 1/r^2, so the pairing defect over a ball of
    # radius R is ~ 1/R^2 relative; radius 8 sits near 1.6e-2
    ip8, n1, n2 = S.hodge_orthogonality(k1, k2, 8.0)
    assert abs(ip8) / (n1 * n2) == pytest.approx(1.0 / 64.0, rel=0.15)
    ip200, m1, m2 = S.hodge_orthogonality(k1, k2, 200.0)
    assert abs(ip200) / (m1 * m2) <= 1e-4
