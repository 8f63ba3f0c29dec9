import math

import numpy as np
import pytest
from scipy import integrate

from core.errors import AccuracyError
from core.symbols import (
    CLOSED_FORM,
    FFT_SAMPLING,
    QUADRATURE,
    AggregateSymbol,
    CoeffVector,
    CutoffSymbol,
    PowerSymbol,
    eta_coeffs,
    eval_aggregate,
    fourier_coeff_eta,
    fourier_coeff_power,
    fourier_coeffs_aggregate,
    power_coeff_table,
    power_coeff_zero,
    power_coeffs,
    psi_coeff,
    psi_coeffs,
    sample_coeffs,
)


def cosine_oracle(f, k, upper=math.pi):
    """(1/pi) int_0^upper f(theta) cos(k theta) by QUADPACK's cosine-weighted rule."""
    value, _ = integrate.quad(f, 0.0, upper, weight="cos", wvar=k, epsabs=1e-14, epsrel=1e-13, limit=400)
    return value / math.pi


class TestEtaCoefficients:
    """theta^2 has closed-form coefficients."""

    def test_zero_index(self):
        assert fourier_coeff_eta(0) == pytest.approx(math.pi ** 2 / 3, rel=1e-15)

    def test_alternating_sign(self):
        assert fourier_coeff_eta(1) == pytest.approx(-2.0)
        assert fourier_coeff_eta(2) == pytest.approx(0.5)
        assert fourier_coeff_eta(3) == pytest.approx(-2.0 / 9)

    @pytest.mark.parametrize("k", [0, 1, 5, 17])
    def test_matches_quadrature_oracle(self, k):
        assert fourier_coeff_eta(k) == pytest.approx(cosine_oracle(lambda t: t * t, k), abs=1e-12)

    def test_negative_index_rejected(self):
        with pytest.raises(ValueError):
            fourier_coeff_eta(-1)

    def test_vector(self):
        vector = eta_coeffs(4)
        assert vector.engine == CLOSED_FORM
        assert vector.abs_tol == 0.0
        assert len(vector) == 4


class TestPowerCoefficients:
    @pytest.mark.parametrize("alpha", [0.0, 0.1, 0.35, 0.5, 0.75, 1.0])
    def test_zero_index_closed_form(self, alpha):
        table, _ = power_coeff_table(alpha, 8)
        assert table[0] == pytest.approx(power_coeff_zero(alpha), abs=1e-12)

    @pytest.mark.parametrize("alpha", [0.05, 0.3, 0.5, 0.8, 1.0])
    @pytest.mark.parametrize("k", [0, 1, 2, 3, 7, 12, 31, 64, 100, 255])
    def test_against_adaptive_oracle(self, alpha, k):
        """50-point (alpha, k) grid against an independent adaptive rule."""
        expected = cosine_oracle(lambda t: t ** (2.0 - alpha), k)
        assert fourier_coeff_power(alpha, k) == pytest.approx(expected, abs=1e-10)

    def test_linear_symbol(self):
        assert fourier_coeff_power(1.0, 0) == pytest.approx(math.pi / 2, abs=1e-12)

    @pytest.mark.parametrize("alpha", [0.2, 0.9])
    def test_coefficients_decay(self, alpha):
        table, _ = power_coeff_table(alpha, 256)
        assert np.all(np.abs(table[[32, 64, 128, 254]]) < abs(table[1]))

    def test_alpha_zero_is_eta(self):
        for k in range(6):
            assert fourier_coeff_power(0.0, k) == pytest.approx(fourier_coeff_eta(k), abs=1e-11)

    def test_estimate_meets_tolerance(self):
        table, estimate = power_coeff_table(0.4, 64, 1e-11)
        assert estimate <= 1e-11
        assert not table.flags.writeable

    def test_unreachable_tolerance(self):
        with pytest.raises(AccuracyError) as excinfo:
            power_coeff_table(0.5, 16, 1e-30)
        assert excinfo.value.tol == 1e-30
        assert excinfo.value.estimate > 1e-30

    def test_fft_engine_close_to_quadrature(self):
        for k in (0, 3, 9):
            quad = fourier_coeff_power(0.6, k)
            sampled = fourier_coeff_power(0.6, k, engine="fft", tol=1e-6, oversample=4096)
            assert sampled == pytest.approx(quad, abs=1e-6)

    def test_invalid_inputs(self):
        with pytest.raises(ValueError):
            fourier_coeff_power(1.5, 0)
        with pytest.raises(ValueError):
            fourier_coeff_power(0.5, -2)
        with pytest.raises(ValueError):
            fourier_coeff_power(0.5, 2, engine="simpson")
        with pytest.raises(ValueError):
            fourier_coeff_power(0.5, 2, tol=0.0)

    def test_power_coeffs_vector(self):
        vector = power_coeffs(0.5, 10)
        assert len(vector) == 10
        assert vector.engine == QUADRATURE
        assert vector.coeffs[0] == pytest.approx(power_coeff_zero(0.5), abs=1e-12)


class TestAggregateSymbol:
    def test_canonical_weights(self):
        sym = AggregateSymbol.canonical(4)
        assert sym.exponents == (0.0, 0.25, 0.5, 0.75)
        assert sym.weights[0] == 1.0
        assert sym.weights[2] == pytest.approx(0.25 ** 0.5)

    def test_order_one_is_eta(self):
        sym = AggregateSymbol.canonical(1)
        assert eval_aggregate(sym, 1.3) == pytest.approx(1.69)

    def test_weighted_and_general(self):
        c = [2.0, 1.0, 0.5]
        d = [1.0, 3.0, 2.0]
        base = AggregateSymbol.canonical(3).weights
        assert AggregateSymbol.weighted(c).weights == pytest.approx([ci * b for ci, b in zip(c, base)])
        assert AggregateSymbol.general(c, d).weights == pytest.approx(
            [ci * di * b for ci, di, b in zip(c, d, base)]
        )

    def test_validation(self):
        with pytest.raises(ValueError):
            AggregateSymbol(2, [1.0], [0.0, 0.5])
        with pytest.raises(ValueError):
            AggregateSymbol(2, [1.0, -1.0], [0.0, 0.5])
        with pytest.raises(ValueError):
            AggregateSymbol(2, [1.0, 1.0], [0.0, 1.5])
        with pytest.raises(ValueError):
            AggregateSymbol.general([1.0, 1.0], [1.0])
        with pytest.raises(ValueError):
            AggregateSymbol.canonical(0)

    def test_eval_is_even(self):
        sym = AggregateSymbol.canonical(8)
        theta = np.linspace(0.0, math.pi, 7)
        np.testing.assert_allclose(eval_aggregate(sym, theta), eval_aggregate(sym, -theta))

    def test_eval_out_of_range(self):
        with pytest.raises(ValueError):
            eval_aggregate(AggregateSymbol.canonical(4), 4.0)

    def test_zero_coefficient_is_weighted_sum(self):
        sym = AggregateSymbol.canonical(16)
        vector = fourier_coeffs_aggregate(sym)
        expected = math.fsum(w * power_coeff_zero(a) for w, a in zip(sym.weights, sym.exponents))
        assert vector.coeffs[0] == pytest.approx(expected, rel=1e-12)
        assert vector.engine == QUADRATURE

    @pytest.mark.parametrize("n", [8, 64, 256])
    def test_engines_agree_within_tolerances(self, n):
        sym = AggregateSymbol.canonical(n)
        quad = fourier_coeffs_aggregate(sym, "quadrature")
        sampled = fourier_coeffs_aggregate(sym, "fft")
        assert sampled.engine == FFT_SAMPLING
        gap = np.max(np.abs(quad.coeffs - sampled.coeffs))
        assert gap <= quad.abs_tol + sampled.abs_tol + 1e-13

    def test_unknown_engine(self):
        with pytest.raises(ValueError):
            fourier_coeffs_aggregate(AggregateSymbol.canonical(4), "chebyshev")


class TestSampling:
    def test_oversample_too_small(self):
        with pytest.raises(ValueError):
            sample_coeffs(PowerSymbol(0.5), 8, oversample=1)

    def test_estimate_shrinks_with_grid(self):
        coarse = sample_coeffs(PowerSymbol(0.5), 16, oversample=4)
        fine = sample_coeffs(PowerSymbol(0.5), 16, oversample=64)
        assert fine.abs_tol < coarse.abs_tol


class TestCutoffCoefficients:
    @pytest.mark.parametrize("n,alpha", [(8, 0.5), (64, 0.1), (32, 1.0)])
    def test_zero_index_closed_form(self, n, alpha):
        h = 1.0 / n
        expected = alpha * h ** 3 / (3 * math.pi * (3 - alpha))
        assert psi_coeff(n, alpha, 0) == pytest.approx(expected, rel=1e-10)

    @pytest.mark.parametrize("k", [1, 5, 7])
    def test_against_direct_integral(self, k):
        sym = CutoffSymbol(8, 0.7)
        expected = cosine_oracle(lambda t: float(sym(t)), k, upper=sym.h)
        assert psi_coeff(8, 0.7, k) == pytest.approx(expected, rel=1e-9, abs=1e-18)

    def test_order_four_linear(self):
        assert psi_coeff(4, 1.0, 0) == pytest.approx(1.0 / (384 * math.pi), rel=1e-10)

    def test_bounded_by_lemma_constant(self):
        assert abs(psi_coeff(8, 0.5, 3)) <= 0.5 / (3 * math.pi * 512 * 2.5)

    def test_alpha_zero_vanishes(self):
        assert np.all(psi_coeffs(16, 0.0).coeffs == 0.0)

    def test_support(self):
        sym = CutoffSymbol(10, 0.5)
        assert sym(0.2) == 0.0
        assert sym(0.05) > 0.0

    def test_coefficients_bounded_by_zero_index(self):
        coeffs = psi_coeffs(32, 0.5).coeffs
        assert np.all(np.abs(coeffs) <= coeffs[0] * (1 + 1e-12))


class TestCoeffVector:
    def test_read_only(self):
        vector = CoeffVector([1.0, 2.0], QUADRATURE, 1e-12)
        with pytest.raises(ValueError):
            vector.coeffs[0] = 3.0

    def test_json(self, tmp_path):
        vector = power_coeffs(0.25, 6)
        path = tmp_path / "coeffs.json"
        vector.to_json(path)
        restored = CoeffVector.from_json(path.read_text())
        np.testing.assert_array_equal(restored.coeffs, vector.coeffs)
        assert restored.engine == vector.engine

    def test_frame(self):
        frame = eta_coeffs(3).to_frame()
        assert list(frame.columns) == ["k", "coeff"]
        assert frame["k"].tolist() == [0, 1, 2]

    def test_rejects_matrix(self):
        with pytest.raises(ValueError):
            CoeffVector(np.ones((2, 2)), QUADRATURE, 0.0)
