import pytest

from core.symbols import AggregateSymbol, eta_coeffs, fourier_coeffs_aggregate
from core.toeplitz import assemble


@pytest.fixture(scope="session")
def canonical_64():
    """T_64(F_hat_64) from quadrature coefficients."""
    return assemble(fourier_coeffs_aggregate(AggregateSymbol.canonical(64)))


@pytest.fixture(scope="session")
def eta_64():
    return assemble(eta_coeffs(64))


@pytest.fixture(scope="session")
def eta_8():
    return assemble(eta_coeffs(8))
