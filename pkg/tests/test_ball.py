import math

import numpy as np
import pytest

from polysign import (BallKernelQuery, ValidationError,
                      ball_green_normalization, ball_solution, boggio_green)


def newtonian_ball_green(x, y):
    """Image-charge Green function of the unit ball, n=3, m=1."""
    x, y = np.asarray(x, dtype=float), np.asarray(y, dtype=float)
    d = np.linalg.norm(x - y)
    rho = math.sqrt(d * d + (1.0 - x @ x) * (1.0 - y @ y))
    return (1.0 / d - 1.0 / rho) / (4.0 * math.pi)


def test_normalization_small_cases():
    assert ball_green_normalization(2, 1) == pytest.approx(
        1.0 / (2.0 * math.pi), rel=1e-14)
    assert ball_green_normalization(3, 1) == pytest.approx(
        1.0 / (4.0 * math.pi), rel=1e-14)
    # n e_n = surface area factor; m=2 adds the 4 (m-1)!^2 denominator
    assert ball_green_normalization(2, 2) == pytest.approx(
        1.0 / (8.0 * math.pi), rel=1e-14)


def test_image_charge_reference_point():
    value = boggio_green(BallKernelQuery(3, 1, (0.0, 0.0, 0.0),
                                         (0.5, 0.0, 0.0)))
    assert value == pytest.approx(1.0 / (4.0 * math.pi), rel=1e-9)


def test_matches_image_charge_formula_at_random_points():
    rng = np.random.default_rng(42)
    for _ in range(8):
        x = rng.uniform(-0.55, 0.55, size=3)
        y = rng.uniform(-0.55, 0.55, size=3)
        if np.linalg.norm(x - y) < 0.05:
            continue
        got = boggio_green(BallKernelQuery(3, 1, tuple(x), tuple(y)))
        assert got == pytest.approx(newtonian_ball_green(x, y), rel=1e-8)


def test_disk_green_m1_log_formula():
    # for n = 2, m = 1 the integral reduces to (1/2 pi) log(theta)
    x, y = np.array([0.3, 0.1]), np.array([-0.2, 0.4])
    d = np.linalg.norm(x - y)
    theta = math.sqrt(d * d + (1 - x @ x) * (1 - y @ y)) / d
    got = boggio_green(BallKernelQuery(2, 1, tuple(x), tuple(y)))
    assert got == pytest.approx(math.log(theta) / (2.0 * math.pi), rel=1e-9)


def test_green_is_symmetric_and_positive():
    q = BallKernelQuery(2, 2, (0.4, 0.1), (-0.3, 0.2))
    qt = BallKernelQuery(2, 2, (-0.3, 0.2), (0.4, 0.1))
    assert boggio_green(q) > 0.0
    assert boggio_green(q) == pytest.approx(boggio_green(qt), rel=1e-10)


def test_clamped_disk_center_deflection():
    # (-Delta)^2 u = 1 on the unit disk gives u(0) = 1/64
    value = ball_solution(2, 2, lambda r: np.ones_like(r), (0.0, 0.0),
                          rtol=1e-5)
    assert value == pytest.approx(1.0 / 64.0, rel=1e-3)


def test_query_validation():
    with pytest.raises(ValidationError):
        BallKernelQuery(3, 1, (1.0, 0.0, 0.0), (0.0, 0.0, 0.0)).validate()
    with pytest.raises(ValidationError):
        BallKernelQuery(3, 1, (0.0, 0.0), (0.1, 0.0, 0.0)).validate()
    with pytest.raises(ValidationError):
        BallKernelQuery(1, 1, (0.5,), (0.0,)).validate()
