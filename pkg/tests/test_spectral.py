import sys
from pathlib import Path

project_root = Path(__file__).parent.parent
sys.path.append(str(project_root))

app_dir = project_root / 'app'
sys.path.append(str(app_dir))

import numpy as np
import pytest
from scipy import integrate

from core.spectral import (covariance, covariances, factorize_inverse, inverse_fourier_coeffs,  # type: ignore
                           minimality_value)
from models.coefficients import FourierCoeffs  # type: ignore
from models.density import InversePolynomial, RationalAR, Tabulated  # type: ignore
from models.errors import (InvalidParameters, MaskViolation, NonPositiveDensity, NotPositive,  # type: ignore
                           TruncationTooShort)
from models.grid import frequency_grid  # type: ignore


def two_plus_cos(grid=4096):
    return Tabulated(2.0 + np.cos(frequency_grid(grid)))


def test_ar1_inverse_coefficients():
    """AR(1) with alpha = 0.5 has b(0) = 1.25, b(+-1) = -0.5 and nothing else"""
    b = inverse_fourier_coeffs(RationalAR((0.5,)), half_length=4, grid=64)

    assert b.half_length == 4
    assert b[0] == pytest.approx(1.25, abs=1e-14)
    assert b[1] == pytest.approx(-0.5, abs=1e-14)
    assert b[-1] == pytest.approx(-0.5, abs=1e-14)
    for m in (2, 3, 4, -2, -4):
        assert abs(b[m]) < 1e-15


def test_complex_ar1_inverse_coefficients():
    alpha = 0.3 + 0.1j
    b = inverse_fourier_coeffs(RationalAR((alpha,)), half_length=2, grid=64)

    assert b[0] == pytest.approx(1.1, abs=1e-14)
    assert b[1] == pytest.approx(-np.conj(alpha), abs=1e-14)
    assert b[-1] == pytest.approx(-alpha, abs=1e-14)


def test_constant_tabulated_density_uses_quadrature():
    b = inverse_fourier_coeffs(Tabulated(np.ones(64)), half_length=8, grid=64)

    assert b[0] == pytest.approx(1.0, abs=1e-14)
    assert np.max(np.abs(b.values[b.lags != 0])) < 1e-14


def test_inverse_polynomial_round_trip():
    coeffs = FourierCoeffs.from_mapping({0: 2.0, 1: 0.3 + 0.2j, 3: -0.1})
    b = inverse_fourier_coeffs(InversePolynomial(coeffs), half_length=5, grid=64)

    for m in range(-5, 6):
        assert b[m] == pytest.approx(coeffs[m], abs=1e-12)


def test_coefficients_are_hermitian():
    b = inverse_fourier_coeffs(RationalAR((0.4 - 0.2j, 0.1)), half_length=10, grid=256)
    for m in range(11):
        assert b[-m] == pytest.approx(np.conj(b[m]), abs=1e-15)
    assert b[0].imag == 0.0


def test_truncation_too_short():
    with pytest.raises(TruncationTooShort):
        inverse_fourier_coeffs(RationalAR((0.5, 0.2)), half_length=1, grid=64)

    # 1/(2 + cos) has coefficients decaying like (2 - sqrt 3)^m
    with pytest.raises(TruncationTooShort):
        inverse_fourier_coeffs(two_plus_cos(), half_length=10, grid=4096)

    b = inverse_fourier_coeffs(two_plus_cos(), half_length=40, grid=4096)
    assert b[0] == pytest.approx(1 / np.sqrt(3), rel=1e-12)


def test_grid_must_cover_four_half_lengths():
    with pytest.raises(InvalidParameters):
        inverse_fourier_coeffs(RationalAR((0.5,)), half_length=32, grid=64)


def test_non_positive_density_rejected():
    table = np.ones(64)
    table[10] = 0.0
    with pytest.raises(NonPositiveDensity):
        inverse_fourier_coeffs(Tabulated(table), half_length=4, grid=64)
    with pytest.raises(NonPositiveDensity):
        minimality_value(Tabulated(table), grid=64)


def test_minimality_values():
    assert minimality_value(Tabulated(np.ones(64)), grid=64) == pytest.approx(1.0, abs=1e-15)
    assert minimality_value(RationalAR((0.5,))) == pytest.approx(1.25, abs=1e-15)
    assert minimality_value(two_plus_cos()) == pytest.approx(1 / np.sqrt(3), rel=1e-12)


def test_minimality_matches_adaptive_quadrature():
    value, _ = integrate.quad(lambda x: 1.0 / (2.0 + np.cos(x)), -np.pi, np.pi, epsabs=1e-13)
    assert minimality_value(two_plus_cos()) == pytest.approx(value / (2 * np.pi), rel=1e-10)


def test_ar1_covariances():
    f = RationalAR((0.5,))
    r = covariances(f, 6)
    for n in range(7):
        assert r[n] == pytest.approx(0.5 ** n / 0.75, abs=1e-12)
    assert covariance(f, -3) == pytest.approx(np.conj(r[3]), abs=1e-15)


def test_ar1_covariance_matches_adaptive_quadrature():
    f = RationalAR((0.5,))

    def density(x):
        return 1.0 / abs(1 - 0.5 * np.exp(-1j * x)) ** 2

    for n in range(4):
        value, _ = integrate.quad(lambda x: np.cos(n * x) * density(x), -np.pi, np.pi, epsabs=1e-13)
        assert covariance(f, n).real == pytest.approx(value / (2 * np.pi), rel=1e-8)


def test_white_noise_and_cosine_covariances():
    white = Tabulated(np.ones(64))
    assert covariance(white, 0, grid=64) == pytest.approx(1.0, abs=1e-15)
    assert abs(covariance(white, 5, grid=64)) < 1e-15
    assert covariance(two_plus_cos(), 1) == pytest.approx(0.5, abs=1e-14)


def test_covariance_lag_limit():
    with pytest.raises(InvalidParameters):
        covariance(RationalAR((0.5,)), 20, grid=64)


def test_parseval_consistency():
    f = RationalAR((0.5, -0.2))
    assert np.mean(f.values() * f.inverse_values()) == pytest.approx(1.0, abs=1e-10)


def test_factorize_ar1_inverse():
    b = FourierCoeffs.from_mapping({0: 1.25, 1: -0.5})
    factor = factorize_inverse(b)

    assert factor.degree == 1
    assert abs(factor.gamma[0]) == pytest.approx(1.0, abs=1e-12)
    assert factor.gamma[1] / factor.gamma[0] == pytest.approx(-0.5, abs=1e-12)
    assert factor.reconstruction_error < 1e-8


def test_factorize_identity():
    factor = factorize_inverse(FourierCoeffs.from_mapping({0: 1.0}))
    assert factor.degree == 0
    assert factor.gamma[0] == pytest.approx(1.0)


def test_factorize_respects_zero_pattern():
    """1 + 0.9 cos 2 lambda factors with gamma_1 = 0"""
    b = FourierCoeffs.from_mapping({0: 1.0, 2: 0.45})
    factor = factorize_inverse(b, mask={1})

    assert factor.degree == 2
    assert abs(factor.gamma[1]) < 1e-8
    assert abs(factor.gamma[0]) > 0.1
    assert abs(factor.gamma[2]) > 0.1

    grid = 4096
    reconstructed = np.abs(factor.values(grid)) ** 2
    assert np.max(np.abs(reconstructed - b.trig_values(grid))) < 1e-8 * 1.9


def test_factorize_rejects_sign_change():
    with pytest.raises(NotPositive):
        factorize_inverse(FourierCoeffs.from_mapping({0: 1.0, 1: 1.0}))


def test_factorize_reports_mask_violation():
    b = FourierCoeffs.from_mapping({0: 1.25, 1: -0.5})
    with pytest.raises(MaskViolation) as info:
        factorize_inverse(b, mask={1})
    assert info.value.details["positions"] == [1]
