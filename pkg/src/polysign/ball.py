"""Analytic Green function of (-Delta)^m on the unit ball.

On the unit ball the clamped polyharmonic Green function is known in
closed form up to a 1D integral:

    G(x, y) = k  * |x - y|^(2m-n) * int_1^theta (v^2 - 1)^(m-1) v^(1-n) dv
    theta   = sqrt(|x - y|^2 + (1 - |x|^2)(1 - |y|^2)) / |x - y|

with k = 1 / (n * e_n * 4^(m-1) * ((m-1)!)^2) and e_n the volume of the
unit ball.  The normalization is cross-validated in the tests against two
independent classical solutions (the Newtonian image charge for n=3, m=1
and the clamped-disk solution (1-r^2)^2/64 for n=2, m=2), so the module
never relies on a single transcribed constant.

This module is an oracle for the discrete pipeline; nothing in the solver
path depends on it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate

from .errors import CapabilityError, NumericalError, SingularityError, \
    ValidationError

_QUAD_RTOL = 1e-11


@dataclass(frozen=True)
class BallKernelQuery:
    """Kernel evaluation request for the unit ball in dimension n."""

    n: int
    m: int
    x: tuple
    y: tuple

    def validate(self) -> None:
        if self.n < 2:
            raise ValidationError("dimension must be at least 2")
        if self.m < 1:
            raise ValidationError("operator order must be at least 1")
        x = np.asarray(self.x, dtype=float)
        y = np.asarray(self.y, dtype=float)
        if x.shape != (self.n,) or y.shape != (self.n,):
            raise ValidationError("points must have n coordinates")
        if np.linalg.norm(x) >= 1.0 or np.linalg.norm(y) >= 1.0:
            raise ValidationError("points must lie strictly inside the ball")


def ball_green_normalization(n: int, m: int) -> float:
    """k = 1 / (n e_n 4^(m-1) ((m-1)!)^2)."""
    e_n = math.pi ** (0.5 * n) / math.gamma(0.5 * n + 1.0)
    return 1.0 / (n * e_n * 4 ** (m - 1) * math.factorial(m - 1) ** 2)


def _boggio_integral(theta: float, n: int, m: int) -> float:
    """Adaptive quadrature of int_1^theta (v^2-1)^(m-1) v^(1-n) dv."""
    val, err = integrate.quad(
        lambda v: (v * v - 1.0) ** (m - 1) * v ** (1 - n),
        1.0, theta, epsrel=_QUAD_RTOL, epsabs=0.0, limit=200)
    if val > 0.0 and err / val > 1e-10:
        raise NumericalError("kernel quadrature did not converge")
    return val


def boggio_green(q: BallKernelQuery) -> float:
    """Positive Green-function value for the clamped problem on the ball."""
    q.validate()
    x = np.asarray(q.x, dtype=float)
    y = np.asarray(q.y, dtype=float)
    dist = float(np.linalg.norm(x - y))
    if dist == 0.0:
        raise SingularityError("ball Green function evaluated at x == y")
    theta = math.sqrt(dist * dist
                      + (1.0 - float(x @ x)) * (1.0 - float(y @ y))) / dist
    k = ball_green_normalization(q.n, q.m)
    return k * dist ** (2 * q.m - q.n) * _boggio_integral(theta, q.n, q.m)


def _exit_radius(x: np.ndarray, direction: np.ndarray) -> float:
    """Distance from x to the unit sphere along a unit direction."""
    b = float(x @ direction)
    c = float(x @ x) - 1.0
    return -b + math.sqrt(b * b - c)


def ball_solution(n: int, m: int, f, x, rtol: float = 1e-6) -> float:
    """Quadrature evaluation of int G(x, y) f(|y|) dy over the unit ball.

    ``f`` is a callable of the radius |y| (radial sources only).  Supported
    for n in {2, 3}; the integral is taken in polar/spherical coordinates
    centered at x so the kernel singularity is damped by the Jacobian.
    """
    if n not in (2, 3):
        raise CapabilityError("ball_solution supports n in {2, 3} only")
    x = np.asarray(x, dtype=float)
    if x.shape != (n,):
        raise ValidationError("evaluation point must have n coordinates")
    if np.linalg.norm(x) >= 1.0:
        raise ValidationError("evaluation point must lie inside the ball")

    def green_at(y: np.ndarray) -> float:
        return boggio_green(BallKernelQuery(n=n, m=m, x=tuple(x), y=tuple(y)))

    if n == 2:
        def integrand(r, phi):
            if r <= 0.0:
                return 0.0
            e = np.array([math.cos(phi), math.sin(phi)])
            y = x + r * e
            return green_at(y) * f(float(np.linalg.norm(y))) * r

        val, err = integrate.dblquad(
            integrand, 0.0, 2.0 * math.pi,
            lambda phi: 0.0,
            lambda phi: _exit_radius(x, np.array([math.cos(phi),
                                                  math.sin(phi)])),
            epsabs=1e-12, epsrel=rtol)
    else:
        def integrand(r, mu, phi):
            if r <= 0.0:
                return 0.0
            s = math.sqrt(max(1.0 - mu * mu, 0.0))
            e = np.array([s * math.cos(phi), s * math.sin(phi), mu])
            y = x + r * e
            return green_at(y) * f(float(np.linalg.norm(y))) * r * r

        val, err = integrate.tplquad(
            integrand, 0.0, 2.0 * math.pi,
            lambda phi: -1.0, lambda phi: 1.0,
            lambda phi, mu: 0.0,
            lambda phi, mu: _exit_radius(
                x, np.array([math.sqrt(max(1.0 - mu * mu, 0.0)) * math.cos(phi),
                             math.sqrt(max(1.0 - mu * mu, 0.0)) * math.sin(phi),
                             mu])),
            epsabs=1e-9, epsrel=math.sqrt(rtol))
    if abs(val) > 0.0 and err > 10.0 * rtol * abs(val) + 1e-9:
        raise NumericalError("ball quadrature budget exceeded "
                             f"(value {val:.3e}, error estimate {err:.3e})")
    return float(val)
