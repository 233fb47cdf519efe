"""Dirichlet discretizations of (-Delta)^m on masked grids, m in {1, 2}.

m = 1 is the 5-point (2D) / 7-point (3D) Laplacian.  On the disk, exterior
neighbors are replaced by a boundary-intercept diagonal correction: the
dropped coupling 1/h^2 becomes 1/(theta h^2) on the diagonal, where
theta*h is the distance from the node to the true circle along the grid
line.  This keeps the matrix symmetric and an M-matrix while restoring
second-order accuracy on the curved boundary.

m = 2 is the 13-point bilaplacian.  On rectangles the clamped conditions
u = du/dn = 0 are imposed by ghost elimination: the ghost node one layer
outside the boundary takes the value of the first interior node (mirror
reflection across the boundary node), which folds the second-neighbor
coupling back onto the diagonal.  On disks the stencil is plainly masked;
combined with the inward mask offset of `domain_for` the effective clamped
boundary sits on the true circle.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla
import scipy.sparse as sp
import scipy.sparse.linalg as spl

from .domain import BOX3D, DISK, RECTANGLE, GridDomain, GridFunction
from .errors import (AssemblyError, CapabilityError, DomainMismatchError,
                     PositivityError)

#: largest system factorized densely (Cholesky); larger ones use sparse LU
DENSE_FACTOR_LIMIT = 4096

_RESIDUAL_TOL = 1e-10


@dataclass
class DiscreteOperator:
    """Sparse SPD matrix for (-Delta)^m with Dirichlet conditions."""

    domain: GridDomain
    m: int
    matrix: sp.csr_matrix

    def __post_init__(self):
        self._factor = None

    def _factorize(self):
        if self._factor is not None:
            return self._factor
        n = self.matrix.shape[0]
        try:
            if n <= DENSE_FACTOR_LIMIT:
                c, low = sla.cho_factor(self.matrix.toarray())
                self._factor = ("dense", (c, low))
            else:
                lu = spl.splu(self.matrix.tocsc())
                self._factor = ("sparse", lu)
        except (sla.LinAlgError, RuntimeError) as exc:
            raise AssemblyError(
                f"factorization of the m={self.m} operator failed: {exc}"
            ) from exc
        return self._factor

    def solve_array(self, rhs: np.ndarray) -> np.ndarray:
        """Solve A x = rhs for a vector or a stack of columns."""
        kind, fac = self._factorize()
        if kind == "dense":
            return sla.cho_solve(fac, rhs)
        return fac.solve(rhs)


def _stencil_neighbors(domain: GridDomain, offsets):
    """Yield (coeff, rows, cols) pairs for in-mask neighbor couplings plus
    boolean arrays marking out-of-mask neighbors per offset."""
    lat = domain.lattice_indices
    shape = domain.lattice_shape
    idx = domain.index_map
    n = domain.dimension
    for off, coeff in offsets:
        nb = lat + np.asarray(off)
        ok = np.ones(len(lat), dtype=bool)
        for k in range(n):
            ok &= (nb[:, k] >= 0) & (nb[:, k] < shape[k])
        inside = np.zeros(len(lat), dtype=bool)
        inside[ok] = idx[tuple(nb[ok].T)] >= 0
        yield off, coeff, inside, nb


def _assemble_laplacian(domain: GridDomain) -> sp.csr_matrix:
    h = domain.h
    n = domain.dimension
    N = domain.interior_count
    idx = domain.index_map
    lat = domain.lattice_indices
    row_ids = idx[tuple(lat.T)]

    offsets = []
    for k in range(n):
        for s in (-1, 1):
            off = [0] * n
            off[k] = s
            offsets.append((tuple(off), -1.0))

    rows, cols, vals = [], [], []
    diag = np.zeros(N)
    disk = domain.spec.shape == DISK
    radius = domain.spec.radius

    for off, coeff, inside, nb in _stencil_neighbors(domain, offsets):
        rows.append(row_ids[inside])
        cols.append(idx[tuple(nb[inside].T)])
        vals.append(np.full(inside.sum(), coeff / h ** 2))
        diag[row_ids[inside]] += 1.0 / h ** 2

        out = ~inside
        if not np.any(out):
            continue
        if disk:
            # distance along the grid line from the node to the circle
            p = domain.points[out]
            e = np.asarray(off, dtype=float)
            b = p @ e
            c = np.einsum("ij,ij->i", p, p) - radius ** 2
            t = -b + np.sqrt(np.maximum(b * b - c, 0.0))
            theta = np.maximum(t / h, 1e-12)
            diag[row_ids[out]] += 1.0 / (theta * h ** 2)
        else:
            # boundary node carries u = 0: dropped coupling, standard diagonal
            diag[row_ids[out]] += 1.0 / h ** 2

    rows.append(row_ids)
    cols.append(row_ids)
    vals.append(diag)
    A = sp.csr_matrix((np.concatenate(vals),
                       (np.concatenate(rows), np.concatenate(cols))),
                      shape=(N, N))
    return A


_BILAP_STENCIL_2D = {
    (0, 0): 20.0,
    (1, 0): -8.0, (-1, 0): -8.0, (0, 1): -8.0, (0, -1): -8.0,
    (1, 1): 2.0, (1, -1): 2.0, (-1, 1): 2.0, (-1, -1): 2.0,
    (2, 0): 1.0, (-2, 0): 1.0, (0, 2): 1.0, (0, -2): 1.0,
}


def _assemble_bilaplacian(domain: GridDomain) -> sp.csr_matrix:
    h = domain.h
    N = domain.interior_count
    idx = domain.index_map
    lat = domain.lattice_indices
    shape = domain.lattice_shape
    row_ids = idx[tuple(lat.T)]
    rect = domain.spec.shape == RECTANGLE

    rows, cols, vals = [], [], []
    for off, coeff in _BILAP_STENCIL_2D.items():
        nb = lat + np.asarray(off)
        if rect:
            # mirror ghost nodes across the boundary node: i=-1 -> i=1 etc.
            for k in range(2):
                top = shape[k] - 1
                nb[:, k] = np.abs(nb[:, k])
                nb[:, k] = top - np.abs(top - nb[:, k])
            inside = idx[tuple(nb.T)] >= 0
        else:
            ok = np.ones(len(lat), dtype=bool)
            for k in range(2):
                ok &= (nb[:, k] >= 0) & (nb[:, k] < shape[k])
            inside = np.zeros(len(lat), dtype=bool)
            inside[ok] = idx[tuple(nb[ok].T)] >= 0
        rows.append(row_ids[inside])
        cols.append(idx[tuple(nb[inside].T)])
        vals.append(np.full(inside.sum(), coeff / h ** 4))

    A = sp.coo_matrix((np.concatenate(vals),
                       (np.concatenate(rows), np.concatenate(cols))),
                      shape=(N, N)).tocsr()
    A.sum_duplicates()
    return A


def assemble_operator(domain: GridDomain, m: int) -> DiscreteOperator:
    """Assemble the Dirichlet discretization of (-Delta)^m."""
    if m == 1:
        A = _assemble_laplacian(domain)
    elif m == 2:
        if domain.spec.shape == BOX3D:
            raise CapabilityError("m=2 is only discretized in 2D")
        A = _assemble_bilaplacian(domain)
    else:
        raise CapabilityError(f"m={m} is not discretized on grids; "
                              "use the ball oracle for m >= 3")

    defect = abs(A - A.T)
    if defect.nnz and defect.max() > 1e-12 * abs(A).max():
        raise AssemblyError("assembled matrix is not symmetric")
    return DiscreteOperator(domain=domain, m=m, matrix=A)


def solve(op: DiscreteOperator, f: GridFunction) -> GridFunction:
    """Solve the discrete problem; checks the relative residual."""
    if f.domain.interior_count != op.domain.interior_count:
        raise DomainMismatchError("right-hand side lives on a different grid")
    u = op.solve_array(f.values)
    fn = np.linalg.norm(f.values)
    if fn > 0.0:
        res = np.linalg.norm(op.matrix @ u - f.values) / fn
        if res > _RESIDUAL_TOL:
            raise AssemblyError(f"relative residual {res:.3e} exceeds "
                                f"{_RESIDUAL_TOL:.0e}")
    return GridFunction(op.domain, u)


@dataclass
class WeightFunction:
    """Torsion function e1 and the boundary weight w = e1^m.

    ``c1_empirical`` / ``c2_empirical`` are min and max of w / d^m over the
    interior nodes, the discrete counterpart of the two-sided comparison of
    w with the boundary-distance power.
    """

    e1: GridFunction
    w: GridFunction
    m: int
    c1_empirical: float
    c2_empirical: float


def torsion_function(domain: GridDomain, op: DiscreteOperator | None = None
                     ) -> GridFunction:
    """Solve -Delta e1 = 1 with zero boundary values."""
    if op is None or op.m != 1:
        op = assemble_operator(domain, 1)
    e1 = solve(op, domain.constant(1.0))
    if np.any(e1.values <= 0.0):
        bad = int(np.argmin(e1.values))
        raise PositivityError(
            f"torsion function is nonpositive ({e1.values[bad]:.3e}) at "
            f"{domain.points[bad]}; the discrete maximum principle rules "
            "this out for a correct assembly")
    return e1


def boundary_weight(domain: GridDomain, m: int,
                    e1: GridFunction | None = None) -> WeightFunction:
    """Compute w = e1^m and the empirical constants of w versus d^m."""
    if m < 1:
        raise CapabilityError("boundary weight requires m >= 1")
    if e1 is None:
        e1 = torsion_function(domain)
    w = GridFunction(domain, e1.values ** m)
    ratio = w.values / domain.distances() ** m
    return WeightFunction(e1=e1, w=w, m=m,
                          c1_empirical=float(ratio.min()),
                          c2_empirical=float(ratio.max()))
