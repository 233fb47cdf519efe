"""Discrete Green matrices, reference kernels and sandwich constants.

The Green matrix is the scaled inverse of the discrete operator,
G[i, j] = (A^-1)[i, j] / h^n, so that h^n * sum_j G[i, j] f[j] is the
discrete quadrature of the continuum kernel integral.

`estimate_sandwich_constants` computes the minimal rank-one correction
making all Green entries nonnegative and the two-sided comparison
constants of the corrected kernel against the reference kernel H.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .discretize import DiscreteOperator, WeightFunction
from .domain import DISK, GridDomain
from .errors import (CapabilityError, DomainMismatchError, NumericalError,
                     SingularityError, ValidationError)

#: default cap on dense Green-matrix size
DENSE_GREEN_CAP = 4096

_CHUNK = 512


@dataclass
class GreenMatrix:
    """Dense symmetric approximation of the continuum Green kernel."""

    domain: GridDomain
    m: int
    entries: np.ndarray
    asymmetry_defect: float


def green_matrix(op: DiscreteOperator, max_points: int = DENSE_GREEN_CAP
                 ) -> GreenMatrix:
    """Invert the discrete operator column by column and rescale."""
    domain = op.domain
    N = domain.interior_count
    if N > max_points:
        raise CapabilityError(
            f"dense Green matrix capped at {max_points} interior points, "
            f"domain has {N}")
    n = domain.dimension
    raw = op.solve_array(np.eye(N)) / op.domain.h ** n
    sym = 0.5 * (raw + raw.T)
    scale = np.abs(sym).max()
    defect = float(np.abs(raw - raw.T).max() / scale) if scale > 0 else 0.0
    if defect > 1e-8:
        raise NumericalError(
            f"Green-matrix asymmetry defect {defect:.3e} exceeds 1e-8")
    return GreenMatrix(domain=domain, m=op.m, entries=sym,
                       asymmetry_defect=defect)


def apply_green(G: GreenMatrix, values: np.ndarray) -> np.ndarray:
    """Discrete quadrature h^n * G @ f."""
    return (G.entries @ values) * G.domain.h ** G.domain.dimension


def _kernel_H(d_x, d_y, dist2, n: int, m: int):
    """Vectorized three-case reference kernel; dist2 = |x-y|^2."""
    d_x = np.asarray(d_x, dtype=float)
    d_y = np.asarray(d_y, dtype=float)
    dist2 = np.asarray(dist2, dtype=float)
    prod = d_x * d_y
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.where(dist2 > 0.0, prod / np.where(dist2 > 0.0, dist2, 1.0),
                         np.inf)
        if n > 2 * m:
            out = dist2 ** (0.5 * (2 * m - n)) * np.minimum(1.0, ratio) ** m
            out = np.where(dist2 == 0.0, np.inf, out)
        elif n == 2 * m:
            out = np.log1p(ratio ** m)
            out = np.where(dist2 == 0.0, np.inf, out)
        else:
            out = prod ** (m - 0.5 * n) * np.minimum(1.0, ratio) ** (0.5 * n)
            out = np.where(dist2 == 0.0, prod ** (m - 0.5 * n), out)
    return out


def reference_kernel_H(domain: GridDomain, m: int, x, y) -> float:
    """Two-point reference kernel built from boundary distances.

    Returns +inf on the diagonal when n >= 2m and d(x)^(2m-n) when n < 2m.
    """
    from .domain import distance_to_boundary

    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    d_x = distance_to_boundary(domain, x)
    d_y = distance_to_boundary(domain, y)
    dist2 = float(np.sum((x - y) ** 2))
    return float(_kernel_H(d_x, d_y, dist2, domain.dimension, m))


def riesz_constant(n: int, m: int) -> float:
    """Normalization of the whole-space kernel |x-y|^(2m-n)."""
    if n <= 2 * m:
        raise CapabilityError("the Riesz kernel requires n > 2m")
    return math.gamma(0.5 * n - m) / (math.pi ** (0.5 * n) * 4 ** m
                                      * math.gamma(m))


def riesz_kernel(n: int, m: int, x, y) -> float:
    """Whole-space solution kernel of (-Delta)^m for n > 2m."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    dist = float(np.linalg.norm(x - y))
    if dist == 0.0:
        raise SingularityError("Riesz kernel evaluated at x == y")
    return riesz_constant(n, m) * dist ** (2 * m - n)


@dataclass
class KernelEstimate:
    """Sandwich constants of the corrected Green kernel against H.

    c2_star is the minimal rank-one coefficient making all entries of
    G + c2 * w (x) w nonnegative; c2_used adds a 5% safety factor.
    c1_hat and c3_hat bound (G + c2_used w w) / H from below and above
    over point pairs at least exclusion_radius apart.
    """

    c2_star: float
    c2_used: float
    c1_hat: float
    c3_hat: float
    exclusion_radius: float
    c2_pair: tuple[np.ndarray, np.ndarray] | None
    c1_pair: tuple[np.ndarray, np.ndarray]
    c3_pair: tuple[np.ndarray, np.ndarray]


def estimate_sandwich_constants(G: GreenMatrix, w: WeightFunction,
                                exclusion_radius: float | None = None,
                                c2_floor: float = 0.0) -> KernelEstimate:
    """Scan all point pairs for the correction and comparison constants."""
    domain = G.domain
    if w.w.domain.interior_count != domain.interior_count:
        raise DomainMismatchError("weight and Green matrix domains differ")
    if exclusion_radius is None:
        exclusion_radius = 2.0 * domain.h
    pts = domain.points
    N = len(pts)
    dvals = domain.distances()
    wv = w.w.values
    n, m = domain.dimension, G.m
    excl2 = exclusion_radius ** 2 * (1.0 - 1e-12)

    c2_star = 0.0
    c2_pair = None
    # pass 1: minimal correction over all pairs
    for lo in range(0, N, _CHUNK):
        hi = min(lo + _CHUNK, N)
        block = G.entries[lo:hi]
        neg = -block / (wv[lo:hi, None] * wv[None, :])
        k = int(np.argmax(neg))
        val = neg.flat[k]
        if val > c2_star:
            c2_star = float(val)
            i, j = divmod(k, N)
            c2_pair = (pts[lo + i].copy(), pts[j].copy())

    c2_used = 1.05 * c2_star if c2_star > 0.0 else float(c2_floor)

    c1_hat = np.inf
    c3_hat = -np.inf
    c1_pair = c3_pair = None
    any_pairs = False
    for lo in range(0, N, _CHUNK):
        hi = min(lo + _CHUNK, N)
        diff = pts[lo:hi, None, :] - pts[None, :, :]
        dist2 = np.einsum("ijk,ijk->ij", diff, diff)
        sel = dist2 >= excl2
        if not np.any(sel):
            continue
        any_pairs = True
        H = _kernel_H(dvals[lo:hi, None], dvals[None, :], dist2, n, m)
        if np.any(H[sel] == 0.0):
            raise NumericalError("reference kernel vanished at an "
                                 "off-diagonal interior pair")
        corrected = G.entries[lo:hi] + c2_used * wv[lo:hi, None] * wv[None, :]
        ratio = np.where(sel, corrected / H, np.nan)
        k = int(np.nanargmin(ratio))
        if ratio.flat[k] < c1_hat:
            c1_hat = float(ratio.flat[k])
            i, j = divmod(k, N)
            c1_pair = (pts[lo + i].copy(), pts[j].copy())
        k = int(np.nanargmax(ratio))
        if ratio.flat[k] > c3_hat:
            c3_hat = float(ratio.flat[k])
            i, j = divmod(k, N)
            c3_pair = (pts[lo + i].copy(), pts[j].copy())

    if not any_pairs:
        raise ValidationError("no point pairs beyond the exclusion radius")

    return KernelEstimate(c2_star=c2_star, c2_used=c2_used,
                          c1_hat=c1_hat, c3_hat=c3_hat,
                          exclusion_radius=float(exclusion_radius),
                          c2_pair=c2_pair, c1_pair=c1_pair, c3_pair=c3_pair)


def corrected_min_offdiagonal(G: GreenMatrix, w: WeightFunction,
                              c2: float) -> float:
    """Minimum off-diagonal entry of G + c2 * w (x) w."""
    wv = w.w.values
    N = G.entries.shape[0]
    best = np.inf
    for lo in range(0, N, _CHUNK):
        hi = min(lo + _CHUNK, N)
        block = G.entries[lo:hi] + c2 * wv[lo:hi, None] * wv[None, :]
        block = block.copy()
        rows = np.arange(lo, hi)
        block[rows - lo, rows] = np.inf
        best = min(best, float(block.min()))
    return best


def _box_green_columns(op: DiscreteOperator):
    """Exact sine-eigenbasis Green columns for full rectangles/boxes, m=1.

    Yields (col_indices, columns) blocks of A^-1 without factorizing A:
    the 1D Dirichlet Laplacian diagonalizes in the discrete sine basis
    with eigenvalues (4/h^2) sin^2(a pi / (2 c)).
    """
    domain = op.domain
    h = domain.h
    counts = [s - 2 for s in domain.lattice_shape]  # interior nodes per axis
    qs, lams = [], []
    for c_int in counts:
        cfull = c_int + 1
        a = np.arange(1, cfull)
        i = np.arange(1, cfull)
        q = np.sqrt(2.0 / cfull) * np.sin(np.outer(i, a) * np.pi / cfull)
        lam = 4.0 / h ** 2 * np.sin(a * np.pi / (2 * cfull)) ** 2
        qs.append(q)
        lams.append(lam)
    if domain.dimension == 2:
        lam_full = lams[0][:, None] + lams[1][None, :]
    else:
        lam_full = (lams[0][:, None, None] + lams[1][None, :, None]
                    + lams[2][None, None, :])
    inv_lam = 1.0 / lam_full
    N = domain.interior_count
    shape = tuple(counts)

    for lo in range(0, N, _CHUNK):
        hi = min(lo + _CHUNK, N)
        k = hi - lo
        lat = domain.lattice_indices[lo:hi] - 1  # zero-based interior coords
        # spectral coefficients of the unit vectors: rows of the kron basis
        if domain.dimension == 2:
            coeff = (qs[0][lat[:, 0]][:, :, None]
                     * qs[1][lat[:, 1]][:, None, :])
        else:
            coeff = (qs[0][lat[:, 0]][:, :, None, None]
                     * qs[1][lat[:, 1]][:, None, :, None]
                     * qs[2][lat[:, 2]][:, None, None, :])
        coeff = coeff * inv_lam[None]
        # transform back along every axis
        out = coeff
        for ax, q in enumerate(qs):
            out = np.moveaxis(np.tensordot(q, out, axes=(1, ax + 1)), 0, ax + 1)
        yield np.arange(lo, hi), out.reshape(k, -1).T


def _generic_green_columns(op: DiscreteOperator):
    N = op.domain.interior_count
    for lo in range(0, N, _CHUNK):
        hi = min(lo + _CHUNK, N)
        rhs = np.zeros((N, hi - lo))
        rhs[np.arange(lo, hi), np.arange(hi - lo)] = 1.0
        yield np.arange(lo, hi), op.solve_array(rhs)


def max_riesz_ratio(op: DiscreteOperator, w: WeightFunction, c2_used: float,
                    exclusion_radius: float | None = None) -> float:
    """Maximum of (G + c2 w w) * |x-y|^(n-2m) over separated pairs.

    Streams Green columns in blocks so it works beyond the dense cap.
    """
    domain = op.domain
    n, m = domain.dimension, op.m
    if n <= 2 * m:
        raise CapabilityError("the Riesz comparison requires n > 2m")
    if exclusion_radius is None:
        exclusion_radius = 2.0 * domain.h
    excl2 = exclusion_radius ** 2 * (1.0 - 1e-12)
    pts = domain.points
    wv = w.w.values
    hscale = domain.h ** (-n)

    if domain.spec.shape != DISK and m == 1:
        blocks = _box_green_columns(op)
    else:
        blocks = _generic_green_columns(op)

    best = -np.inf
    for cols_idx, cols in blocks:
        g = cols * hscale + c2_used * wv[:, None] * wv[cols_idx][None, :]
        diff = pts[:, None, :] - pts[cols_idx][None, :, :]
        dist2 = np.einsum("ijk,ijk->ij", diff, diff)
        sel = dist2 >= excl2
        if not np.any(sel):
            continue
        ratio = g[sel] * dist2[sel] ** (0.5 * (n - 2 * m))
        best = max(best, float(ratio.max()))
    if not np.isfinite(best):
        raise ValidationError("no point pairs beyond the exclusion radius")
    return best


def ratio_histogram(G: GreenMatrix, w: WeightFunction, est: KernelEstimate,
                    bins: int = 60) -> tuple[np.ndarray, np.ndarray]:
    """Histogram of (G + c2_used w w) / H over separated pairs."""
    domain = G.domain
    pts = domain.points
    N = len(pts)
    dvals = domain.distances()
    wv = w.w.values
    n, m = domain.dimension, G.m
    excl2 = est.exclusion_radius ** 2 * (1.0 - 1e-12)
    edges = np.linspace(est.c1_hat, est.c3_hat, bins + 1)
    counts = np.zeros(bins, dtype=np.int64)
    for lo in range(0, N, _CHUNK):
        hi = min(lo + _CHUNK, N)
        diff = pts[lo:hi, None, :] - pts[None, :, :]
        dist2 = np.einsum("ijk,ijk->ij", diff, diff)
        sel = dist2 >= excl2
        if not np.any(sel):
            continue
        H = _kernel_H(dvals[lo:hi, None], dvals[None, :], dist2, n, m)
        corrected = (G.entries[lo:hi]
                     + est.c2_used * wv[lo:hi, None] * wv[None, :])
        counts += np.histogram(corrected[sel] / H[sel], bins=edges)[0]
    return edges, counts
