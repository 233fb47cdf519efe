import math

import numpy as np
import pytest

from polysign import (CapabilityError, DomainSpec, build_domain,
                      discrete_derivative_norm, lp_norm, sobolev_exponent)
from polysign.errors import ValidationError


@pytest.fixture(scope="module")
def square():
    return build_domain(DomainSpec.rectangle(1.0, 1.0, 16))


def test_lp_norm_definition(square):
    f = square.sample(lambda x, y: x - 0.3 * y)
    h2 = square.h ** 2
    assert lp_norm(f, 2.0) == pytest.approx(
        math.sqrt(h2 * np.sum(f.values ** 2)), rel=1e-14)
    assert lp_norm(f, 1.0) == pytest.approx(
        h2 * np.abs(f.values).sum(), rel=1e-14)
    assert lp_norm(f, math.inf) == pytest.approx(np.abs(f.values).max())


def test_lp_norm_nesting(square):
    f = square.sample(lambda x, y: np.sin(3 * x) * y)
    measure = square.h ** 2 * square.interior_count
    assert lp_norm(f, 1.0) <= lp_norm(f, 2.0) * math.sqrt(measure) + 1e-14


def test_sobolev_exponent_values():
    assert sobolev_exponent(3, 1, 1.2) == pytest.approx(6.0, abs=1e-12)
    assert sobolev_exponent(4, 1, 4.0 / 3.0) == pytest.approx(4.0, abs=1e-12)
    with pytest.raises(CapabilityError):
        sobolev_exponent(3, 1, 1.5)  # p = n / 2m is not subcritical


def test_first_order_norm_of_linear_function(square):
    f = square.sample(lambda x, y: 2.0 * x - y)
    norm = discrete_derivative_norm(f, 1, math.inf)
    # |alpha| = 0 term is bounded by max |f|; gradient terms are exact
    assert norm >= 2.0 + 1.0
    assert norm <= np.abs(f.values).max() + 3.0 + 1e-12


def test_second_derivatives_exact_for_quadratic(square):
    f = square.sample(lambda x, y: x * x)
    full = discrete_derivative_norm(f, 2, math.inf)
    lower = discrete_derivative_norm(f, 1, math.inf)
    # the second-order multi-indices contribute exactly f_xx = 2; the
    # lower-order terms can only shrink on the smaller eligible region
    assert full >= 2.0
    assert lower <= full <= lower + 2.0 + 1e-9


def test_norm_monotone_in_order(square):
    f = square.sample(lambda x, y: np.sin(2 * x) * np.cos(y))
    norms = [discrete_derivative_norm(f, k, 2.0) for k in range(4)]
    assert all(a < b for a, b in zip(norms, norms[1:]))


def test_unsupported_order_rejected(square):
    f = square.constant(1.0)
    with pytest.raises((CapabilityError, ValidationError)):
        discrete_derivative_norm(f, 5, 2.0)
