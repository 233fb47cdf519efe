"""Masked uniform grids over rectangles, disks and boxes.

Grids are vertex-centered: lattice nodes sit at integer multiples of the
spacing h, boundary nodes are excluded, and only strictly interior nodes
carry unknowns.  Interior nodes are enumerated lexicographically by
lattice coordinate, so rebuilding the same spec reproduces the same
ordering.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DomainMismatchError, ValidationError

RECTANGLE = "rectangle"
DISK = "disk"
BOX3D = "box3d"

_SHAPES = (RECTANGLE, DISK, BOX3D)

#: Inward offset of the disk lattice mask, in units of h, used for clamped
#: (m = 2) runs.  The plain masked 13-point bilaplacian clamps at a staircase
#: roughly 0.7 h outside the lattice hull; pulling the mask in by the same
#: amount puts the effective clamped boundary on the true circle.
DISK_CLAMPED_OFFSET = 0.7


@dataclass(frozen=True)
class DomainSpec:
    """Geometry plus resolution of a grid domain.

    ``cells`` counts grid cells along the first axis; the spacing is
    ``h = length_x / cells`` and the remaining extents must be integer
    multiples of h.  ``mask_offset`` (disk only) pulls the lattice mask
    inward by ``mask_offset * h``.
    """

    shape: str
    cells: int
    lx: float = 0.0
    ly: float = 0.0
    lz: float = 0.0
    radius: float = 0.0
    mask_offset: float = 0.0

    @staticmethod
    def rectangle(lx: float, ly: float, cells: int) -> "DomainSpec":
        return DomainSpec(shape=RECTANGLE, cells=cells, lx=lx, ly=ly)

    @staticmethod
    def disk(radius: float, cells: int, mask_offset: float = 0.0) -> "DomainSpec":
        return DomainSpec(shape=DISK, cells=cells, radius=radius,
                          mask_offset=mask_offset)

    @staticmethod
    def box3d(lx: float, ly: float, lz: float, cells: int) -> "DomainSpec":
        return DomainSpec(shape=BOX3D, cells=cells, lx=lx, ly=ly, lz=lz)

    @property
    def dimension(self) -> int:
        return 3 if self.shape == BOX3D else 2

    @property
    def extents(self) -> tuple[float, ...]:
        if self.shape == RECTANGLE:
            return (self.lx, self.ly)
        if self.shape == DISK:
            return (2.0 * self.radius, 2.0 * self.radius)
        return (self.lx, self.ly, self.lz)

    def spacing(self) -> float:
        return self.extents[0] / self.cells

    def validate(self) -> None:
        if self.shape not in _SHAPES:
            raise ValidationError(f"unknown domain shape {self.shape!r}")
        if self.cells < 4:
            raise ValidationError(f"cells must be >= 4, got {self.cells}")
        for length in self.extents:
            if not length > 0.0:
                raise ValidationError("all domain extents must be positive")
        h = self.spacing()
        for length in self.extents[1:]:
            ratio = length / h
            if abs(ratio - round(ratio)) > 1e-9:
                raise ValidationError(
                    f"extent {length} is not an integer multiple of h={h}")
        if self.mask_offset and self.shape != DISK:
            raise ValidationError("mask_offset only applies to disks")
        if not 0.0 <= self.mask_offset < 1.0:
            raise ValidationError("mask_offset must lie in [0, 1)")

    def with_cells(self, cells: int) -> "DomainSpec":
        d = self.__dict__.copy()
        d["cells"] = cells
        return DomainSpec(**d)


@dataclass(frozen=True)
class GridDomain:
    """Discretized domain: interior lattice nodes of a uniform grid."""

    spec: DomainSpec
    h: float
    #: nodes per axis including boundary nodes (cells_i + 1 each)
    lattice_shape: tuple[int, ...]
    #: physical coordinate of lattice node (0, ..., 0)
    origin: tuple[float, ...]
    #: boolean interior mask over the full lattice
    mask: np.ndarray = field(repr=False)
    #: lattice -> interior index, -1 outside
    index_map: np.ndarray = field(repr=False)
    #: interior node coordinates, shape (N, n), lexicographic lattice order
    points: np.ndarray = field(repr=False)
    #: interior node lattice coordinates, shape (N, n)
    lattice_indices: np.ndarray = field(repr=False)

    @property
    def dimension(self) -> int:
        return self.spec.dimension

    @property
    def interior_count(self) -> int:
        return self.points.shape[0]

    def distances(self) -> np.ndarray:
        """Distance to the true boundary for every interior node."""
        return distance_to_boundary(self, self.points)

    def function(self, values) -> "GridFunction":
        return GridFunction(self, np.asarray(values, dtype=float))

    def constant(self, value: float) -> "GridFunction":
        return GridFunction(self, np.full(self.interior_count, float(value)))

    def sample(self, fn) -> "GridFunction":
        """Sample a callable of the coordinate arrays onto the grid."""
        cols = [self.points[:, k] for k in range(self.dimension)]
        return GridFunction(self, np.asarray(fn(*cols), dtype=float))

    def to_lattice(self, values: np.ndarray, fill: float = 0.0) -> np.ndarray:
        """Embed interior values into the full lattice (fill outside)."""
        arr = np.full(self.lattice_shape, fill, dtype=float)
        arr[self.mask] = values
        return arr

    def from_lattice(self, arr: np.ndarray) -> np.ndarray:
        return arr[self.mask]


@dataclass
class GridFunction:
    """Real values attached to the interior nodes of a grid domain."""

    domain: GridDomain
    values: np.ndarray

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if self.values.shape != (self.domain.interior_count,):
            raise DomainMismatchError(
                f"expected {self.domain.interior_count} values, "
                f"got shape {self.values.shape}")

    def same_domain(self, other: "GridFunction") -> None:
        if other.domain is not self.domain and not (
                other.domain.spec == self.domain.spec):
            raise DomainMismatchError("grid functions live on different domains")

    def __add__(self, other):
        self.same_domain(other)
        return GridFunction(self.domain, self.values + other.values)

    def __sub__(self, other):
        self.same_domain(other)
        return GridFunction(self.domain, self.values - other.values)

    def __mul__(self, scalar):
        return GridFunction(self.domain, self.values * float(scalar))

    __rmul__ = __mul__


def build_domain(spec: DomainSpec) -> GridDomain:
    """Construct the interior lattice for a validated spec."""
    spec.validate()
    h = spec.spacing()
    n = spec.dimension

    if spec.shape == DISK:
        r = spec.radius
        nodes = spec.cells + 1
        lattice_shape = (nodes, nodes)
        origin = (-r, -r)
    else:
        counts = tuple(int(round(length / h)) for length in spec.extents)
        lattice_shape = tuple(c + 1 for c in counts)
        origin = (0.0,) * n

    axes = [origin[k] + h * np.arange(lattice_shape[k]) for k in range(n)]
    grids = np.meshgrid(*axes, indexing="ij")

    if spec.shape == DISK:
        r_mask = spec.radius - spec.mask_offset * h
        mask = grids[0] ** 2 + grids[1] ** 2 < r_mask ** 2
    else:
        mask = np.ones(lattice_shape, dtype=bool)
        for k in range(n):
            sl = [slice(None)] * n
            sl[k] = 0
            mask[tuple(sl)] = False
            sl[k] = -1
            mask[tuple(sl)] = False

    count = int(mask.sum())
    if count <= 0:
        raise ValidationError("domain has no interior nodes")

    index_map = -np.ones(lattice_shape, dtype=np.int64)
    index_map[mask] = np.arange(count)
    lattice_indices = np.argwhere(mask)
    points = np.column_stack(
        [origin[k] + h * lattice_indices[:, k] for k in range(n)])

    return GridDomain(spec=spec, h=h, lattice_shape=lattice_shape,
                      origin=origin, mask=mask, index_map=index_map,
                      points=points, lattice_indices=lattice_indices)


def distance_to_boundary(domain: GridDomain, point) -> np.ndarray | float:
    """Exact analytic distance d(x) to the boundary of the continuum domain.

    Accepts a single coordinate or an (N, n) array.  Raises for points
    outside the closed domain.
    """
    pts = np.atleast_2d(np.asarray(point, dtype=float))
    spec = domain.spec
    tol = 1e-12 * max(spec.extents)
    if spec.shape == DISK:
        rr = np.linalg.norm(pts, axis=1)
        if np.any(rr > spec.radius + tol):
            raise DomainMismatchError("point outside the closed disk")
        d = spec.radius - np.minimum(rr, spec.radius)
    else:
        lengths = spec.extents
        faces = []
        for k, length in enumerate(lengths):
            if np.any(pts[:, k] < -tol) or np.any(pts[:, k] > length + tol):
                raise DomainMismatchError("point outside the closed domain")
            faces.append(np.clip(pts[:, k], 0.0, length))
            faces.append(length - np.clip(pts[:, k], 0.0, length))
        d = np.minimum.reduce(faces)
        d = np.maximum(d, 0.0)
    if np.asarray(point).ndim == 1:
        return float(d[0])
    return d


def domain_for(spec: DomainSpec, m: int) -> GridDomain:
    """Build the grid used by the order-m pipeline.

    Disks discretized for the clamped (m = 2) operator get the calibrated
    inward mask offset; everything else uses the spec as given.
    """
    if spec.shape == DISK and m >= 2 and spec.mask_offset == 0.0:
        spec = DomainSpec.disk(spec.radius, spec.cells,
                               mask_offset=DISK_CLAMPED_OFFSET)
    return build_domain(spec)
