"""Discrete Lp norms, Sobolev exponents and finite-difference Sobolev norms."""

from __future__ import annotations

import math
from itertools import product

import numpy as np

from .domain import GridFunction
from .errors import CapabilityError, ValidationError

# central difference stencils per derivative order, scaled by h^-order later
_CENTRAL = {
    0: np.array([1.0]),
    1: np.array([-0.5, 0.0, 0.5]),
    2: np.array([1.0, -2.0, 1.0]),
    3: np.array([-0.5, 1.0, 0.0, -1.0, 0.5]),
    4: np.array([1.0, -4.0, 6.0, -4.0, 1.0]),
}


def lp_norm(f: GridFunction, p: float) -> float:
    """(h^n sum |f|^p)^(1/p); p = inf gives the max norm."""
    if p != math.inf and p < 1.0:
        raise ValidationError(f"Lp norm requires p >= 1, got {p}")
    v = np.abs(f.values)
    if p == math.inf:
        return float(v.max(initial=0.0))
    hn = f.domain.h ** f.domain.dimension
    return float((hn * np.sum(v ** p)) ** (1.0 / p))


def sobolev_exponent(n: int, m: int, p: float) -> float:
    """Embedding target exponent n p / (n - 2 m p)."""
    if p >= n / (2.0 * m):
        raise CapabilityError(
            f"p={p} is supercritical for n={n}, m={m}; the supremum "
            "estimate applies instead")
    return n * p / (n - 2.0 * m * p)


def _axis_diff(arr: np.ndarray, axis: int, order: int, h: float) -> np.ndarray:
    if order == 0:
        return arr
    sten = _CENTRAL[order]
    half = len(sten) // 2
    out = np.zeros_like(arr)
    for k, c in enumerate(sten):
        if c == 0.0:
            continue
        shift = k - half
        src = [slice(None)] * arr.ndim
        dst = [slice(None)] * arr.ndim
        if shift > 0:
            src[axis] = slice(shift, None)
            dst[axis] = slice(None, -shift)
        elif shift < 0:
            src[axis] = slice(None, shift)
            dst[axis] = slice(-shift, None)
        out[tuple(dst)] += c * arr[tuple(src)]
    return out / h ** order


def _eligible_mask(f: GridFunction, layer: int) -> np.ndarray:
    """Nodes whose full cube neighborhood of lattice radius `layer` is
    interior (the boundary layer excluded from Sobolev-type norms)."""
    domain = f.domain
    good = domain.mask.copy()
    for _ in range(layer):
        shrunk = good.copy()
        for ax in range(good.ndim):
            up = np.roll(good, 1, axis=ax)
            dn = np.roll(good, -1, axis=ax)
            sl = [slice(None)] * good.ndim
            sl[ax] = 0
            up[tuple(sl)] = False
            sl[ax] = -1
            dn[tuple(sl)] = False
            shrunk &= up & dn
        good = shrunk
    return good


def discrete_derivative_norm(f: GridFunction, order: int, p: float) -> float:
    """Sum of Lp norms of all central-difference derivatives up to `order`.

    Only nodes whose full stencil footprint stays interior contribute; a
    boundary layer of `order` lattice steps is excluded.
    """
    if order > 4:
        raise CapabilityError("discrete derivatives provided up to order 4")
    if order < 0:
        raise ValidationError("derivative order must be nonnegative")
    if p != math.inf and p < 1.0:
        raise ValidationError(f"Lp norm requires p >= 1, got {p}")

    domain = f.domain
    n = domain.dimension
    h = domain.h
    arr = domain.to_lattice(f.values)
    good = _eligible_mask(f, max(order, 1) if order else 0)

    total = 0.0
    hn = h ** n
    for alpha in product(range(order + 1), repeat=n):
        if sum(alpha) > order:
            continue
        d = arr
        for ax, a in enumerate(alpha):
            d = _axis_diff(d, ax, a, h)
        vals = np.abs(d[good])
        if p == math.inf:
            total += float(vals.max(initial=0.0))
        else:
            total += float((hn * np.sum(vals ** p)) ** (1.0 / p))
    return total
