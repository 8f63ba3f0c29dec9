import json
import math

import numpy as np
import pytest
import scipy.linalg

from core.errors import NotPositiveDefiniteError, SpectrumError
from core.symbols import AggregateSymbol, eta_coeffs, fourier_coeffs_aggregate
from core.spectra import (
    PLAIN_COLUMNS,
    PRECONDITIONED_COLUMNS,
    condition_report,
    extreme_eigs,
    full_spectrum,
    precond_spectrum,
    scaled_quantities,
)
from core.toeplitz import SymToeplitz, assemble, loewner_leq

REFERENCE_RTOL = 5e-3


def canonical(n):
    return assemble(fourier_coeffs_aggregate(AggregateSymbol.canonical(n)))


class TestExtremeEigs:
    def test_identity(self):
        assert extreme_eigs(SymToeplitz([1.0, 0.0, 0.0, 0.0])) == pytest.approx((1.0, 1.0))

    def test_eta_matches_dense_oracle(self, eta_8):
        eigs = np.linalg.eigvalsh(eta_8.dense())
        lo, hi = extreme_eigs(eta_8)
        assert lo == pytest.approx(eigs[0], abs=1e-10)
        assert hi == pytest.approx(eigs[-1], abs=1e-10)

    def test_iterative_small_order(self, eta_8):
        eigs = np.linalg.eigvalsh(eta_8.dense())
        lo, hi = extreme_eigs(eta_8, mode="iterative")
        assert lo == pytest.approx(eigs[0], rel=1e-8)
        assert hi == pytest.approx(eigs[-1], rel=1e-8)

    @pytest.mark.parametrize("n", [32, 128])
    def test_modes_agree(self, n):
        T = canonical(n)
        full = extreme_eigs(T, "full")
        iterative = extreme_eigs(T, "iterative")
        assert iterative == pytest.approx(full, rel=1e-8)

    def test_tiny_order_falls_back_to_dense(self):
        T = SymToeplitz([2.0, 1.0])
        assert extreme_eigs(T, "iterative") == pytest.approx((1.0, 3.0))

    def test_unknown_mode(self, eta_8):
        with pytest.raises(ValueError):
            extreme_eigs(eta_8, "power")

    def test_monotone_under_loewner_order(self, eta_8):
        A, B = eta_8, eta_8.scaled(1.5)
        assert loewner_leq(A, B)
        (a_min, a_max), (b_min, b_max) = extreme_eigs(A), extreme_eigs(B)
        assert a_min <= b_min
        assert a_max <= b_max


class TestFullSpectrum:
    def test_diagonal(self):
        np.testing.assert_allclose(full_spectrum(SymToeplitz([2.5, 0.0, 0.0])), [2.5, 2.5, 2.5])

    def test_sorted_and_trace(self, eta_8):
        eigs = full_spectrum(eta_8)
        assert np.all(np.diff(eigs) >= 0)
        assert math.fsum(eigs) == pytest.approx(8 * eta_8.first_col[0], rel=1e-10)
        np.testing.assert_allclose(eigs, np.linalg.eigvalsh(eta_8.dense()), atol=1e-10)

    def test_trace_tolerance_relative_to_trace(self, monkeypatch):
        T = SymToeplitz([1.0, 0.9, 0.9, 0.9])
        exact = np.linalg.eigvalsh(T.dense())
        # sum off by 1e-9, relative 2.5e-10 of the trace 4; 1e-10 * n * norm_1 would allow 1.48e-9
        monkeypatch.setattr(scipy.linalg, "eigvalsh", lambda a: exact + np.array([0.0, 0.0, 0.0, 1e-9]))
        with pytest.raises(SpectrumError):
            full_spectrum(T)


class TestPencil:
    def test_self_preconditioned(self, eta_8):
        np.testing.assert_allclose(precond_spectrum(eta_8, eta_8), np.ones(8), atol=1e-10)

    def test_matches_explicit_inverse(self, eta_8):
        A = canonical(8)
        explicit = np.sort(np.linalg.eigvals(np.linalg.solve(eta_8.dense(), A.dense())).real)
        np.testing.assert_allclose(precond_spectrum(A, eta_8), explicit, rtol=1e-8)

    def test_not_positive_definite(self):
        A = SymToeplitz([1.0, 0.0])
        M = SymToeplitz([0.0, 1.0])
        with pytest.raises(NotPositiveDefiniteError):
            precond_spectrum(A, M)

    def test_order_mismatch(self, eta_8):
        with pytest.raises(ValueError):
            precond_spectrum(eta_8, SymToeplitz([1.0]))


class TestConditionReport:
    def test_scalar_matrix(self):
        report = condition_report(SymToeplitz([3.0]))
        assert report.lambda_min == report.lambda_max == 3.0
        assert report.mu2 == 1.0

    def test_order_one_canonical(self):
        report = condition_report(canonical(1))
        assert report.lambda_min == pytest.approx(math.pi ** 2 / 3, rel=1e-12)
        assert report.mu2 == pytest.approx(1.0)

    def test_invariants(self, eta_8):
        report = condition_report(eta_8, with_spectrum=True)
        assert report.mu2 == pytest.approx(report.lambda_max / report.lambda_min, rel=1e-12)
        assert len(report.full_spectrum) == 8
        assert report.full_spectrum[0] >= report.lambda_min
        assert report.full_spectrum[-1] <= report.lambda_max

    def test_rejects_indefinite(self):
        with pytest.raises(NotPositiveDefiniteError):
            condition_report(SymToeplitz([0.0, 1.0]))

    def test_first_table_order_64(self, canonical_64):
        report = condition_report(canonical_64)
        assert report.lambda_min == pytest.approx(7.8737e-2, rel=REFERENCE_RTOL)
        assert report.lambda_max == pytest.approx(120.9373, rel=REFERENCE_RTOL)
        assert report.mu2 == pytest.approx(1535.9667, rel=REFERENCE_RTOL)
        assert report.scaled["lambda_min_star"] == pytest.approx(5.0392, rel=REFERENCE_RTOL)
        assert report.scaled["lambda_max_star"] == pytest.approx(1.015, rel=REFERENCE_RTOL)
        assert report.scaled["mu2_star"] == pytest.approx(0.2015, rel=REFERENCE_RTOL)

    def test_preconditioned_matches_generalized_eigh(self, canonical_64, eta_64):
        report = condition_report(canonical_64, preconditioner=eta_64)
        assert report.preconditioned
        eigs = scipy.linalg.eigh(canonical_64.dense(), eta_64.dense(), eigvals_only=True)
        assert report.lambda_min == pytest.approx(eigs[0], rel=1e-10)
        assert report.lambda_max == pytest.approx(eigs[-1], rel=1e-10)
        assert report.mu2 == pytest.approx(eigs[-1] / eigs[0], rel=1e-10)
        assert report.scaled["lambda_min_dagger"] == pytest.approx(math.log(64) / 64 * eigs[0], rel=1e-10)

    @pytest.mark.parametrize(
        "n,lambda_min,published",
        [(64, 12.536, 15.4546), (128, 21.814, 26.5447), (256, 38.737, 46.4058)],
    )
    def test_second_table_known_gap(self, n, lambda_min, published):
        report = condition_report(canonical(n), preconditioner=assemble(eta_coeffs(n)))
        assert report.lambda_min == pytest.approx(lambda_min, rel=1e-3)
        # the published column sits about 20% above the pencil smallest eigenvalue
        assert 0.15 < published / report.lambda_min - 1 < 0.25

    def test_second_table_order_64_extremes(self, canonical_64, eta_64):
        report = condition_report(canonical_64, preconditioner=eta_64)
        assert report.lambda_max == pytest.approx(34.129, rel=1e-3)
        assert report.mu2 == pytest.approx(2.722, rel=1e-3)

    @pytest.mark.parametrize(
        "n,lambda_min,lambda_max,mu2",
        [(128, 3.9480e-2, 212.8457, 5391.2724), (256, 1.9768e-2, 380.1275, 19229.1665)],
    )
    def test_first_table_desk_orders(self, n, lambda_min, lambda_max, mu2):
        report = condition_report(canonical(n))
        assert report.lambda_min == pytest.approx(lambda_min, rel=REFERENCE_RTOL)
        assert report.lambda_max == pytest.approx(lambda_max, rel=REFERENCE_RTOL)
        assert report.mu2 == pytest.approx(mu2, rel=REFERENCE_RTOL)

    @pytest.mark.slow
    def test_first_table_extended_order(self):
        report = condition_report(canonical(2048))
        assert report.scaled["lambda_min_star"] == pytest.approx(5.0673, rel=REFERENCE_RTOL)
        assert report.scaled["lambda_max_star"] == pytest.approx(1.001, rel=REFERENCE_RTOL)

    def test_row_layout(self, eta_8):
        assert list(condition_report(eta_8).to_row()) == PLAIN_COLUMNS
        assert list(condition_report(eta_8, preconditioner=eta_8).to_row()) == PRECONDITIONED_COLUMNS

    def test_json(self, eta_8):
        data = json.loads(condition_report(eta_8, with_spectrum=True).to_json(include_spectrum=True))
        assert data["n"] == 8
        assert len(data["full_spectrum"]) == 8


def test_scaled_quantities():
    plain = scaled_quantities(64, 7.8737e-2, 120.9373)
    assert plain["lambda_min_star"] == pytest.approx(5.0392, rel=1e-4)
    preconditioned = scaled_quantities(64, 15.4546, 1793.0355, preconditioned=True)
    assert preconditioned["lambda_max_dagger"] == pytest.approx(2.3217, rel=1e-4)
    assert preconditioned["mu2_dagger"] == pytest.approx(116.0198 / 64, rel=1e-4)
