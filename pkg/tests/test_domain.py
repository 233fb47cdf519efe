import numpy as np
import pytest

from polysign import (DomainMismatchError, DomainSpec, GridFunction,
                      ValidationError, build_domain, distance_to_boundary,
                      domain_for)


def test_unit_square_interior_count():
    domain = build_domain(DomainSpec.rectangle(1.0, 1.0, 4))
    assert domain.interior_count == 9


def test_unit_box_interior_count():
    domain = build_domain(DomainSpec.box3d(1.0, 1.0, 1.0, 4))
    assert domain.interior_count == 27


def test_rectangle_points_are_interior_lattice_nodes():
    domain = build_domain(DomainSpec.rectangle(2.0, 1.0, 8))
    h = domain.h
    assert h == pytest.approx(0.25)
    assert domain.interior_count == (8 - 1) * (4 - 1)
    assert domain.points.min() == pytest.approx(h)
    assert domain.points[:, 0].max() == pytest.approx(2.0 - h)
    # lexicographic enumeration: the second point advances the last axis
    assert np.allclose(domain.points[1] - domain.points[0], (0.0, h))


def test_disk_mask_is_symmetric_and_strictly_interior():
    domain = build_domain(DomainSpec.disk(1.0, 16))
    radii = np.linalg.norm(domain.points, axis=1)
    assert radii.max() < 1.0
    flipped = set(map(tuple, np.round(-domain.points, 12)))
    assert flipped == set(map(tuple, np.round(domain.points, 12)))


def test_clamped_disk_mask_is_pulled_inward():
    spec = DomainSpec.disk(1.0, 16)
    plain = build_domain(spec)
    clamped = domain_for(spec, 2)
    assert clamped.interior_count < plain.interior_count
    assert domain_for(spec, 1).interior_count == plain.interior_count


def test_distances_match_analytic_rectangle():
    domain = build_domain(DomainSpec.rectangle(2.0, 1.0, 8))
    expected = np.minimum.reduce([
        domain.points[:, 0], 2.0 - domain.points[:, 0],
        domain.points[:, 1], 1.0 - domain.points[:, 1]])
    assert np.allclose(domain.distances(), expected)


def test_distance_to_boundary_scalar_queries():
    domain = build_domain(DomainSpec.disk(1.0, 16))
    assert distance_to_boundary(domain, (0.0, 0.0)) == pytest.approx(1.0)
    assert distance_to_boundary(domain, (0.5, 0.0)) == pytest.approx(0.5)
    with pytest.raises(DomainMismatchError):
        distance_to_boundary(domain, (2.0, 0.0))


def test_lattice_round_trip():
    domain = build_domain(DomainSpec.rectangle(1.0, 1.0, 8))
    values = np.arange(domain.interior_count, dtype=float)
    assert np.array_equal(domain.from_lattice(domain.to_lattice(values)),
                          values)


def test_grid_function_arithmetic():
    domain = build_domain(DomainSpec.rectangle(1.0, 1.0, 4))
    f = domain.constant(2.0)
    g = domain.sample(lambda x, y: x)
    combo = f + g * 3.0 - g
    assert np.allclose(combo.values, 2.0 + 2.0 * domain.points[:, 0])


def test_validation_rejects_bad_specs():
    with pytest.raises(ValidationError):
        DomainSpec.rectangle(1.0, 1.0, 2).validate()
    with pytest.raises(ValidationError):
        DomainSpec.rectangle(-1.0, 1.0, 8).validate()
    with pytest.raises(ValidationError):
        # ly = 0.3 is not a lattice multiple of h = 1/8
        DomainSpec.rectangle(1.0, 0.3, 8).validate()
    with pytest.raises(ValidationError):
        DomainSpec.disk(0.0, 8).validate()


def test_with_cells_preserves_geometry():
    spec = DomainSpec.rectangle(5.0, 1.0, 40)
    fine = spec.with_cells(80)
    assert fine.lx == spec.lx and fine.ly == spec.ly
    assert fine.spacing() == pytest.approx(spec.spacing() / 2.0)


def test_grid_function_domain_mismatch():
    f = build_domain(DomainSpec.rectangle(1.0, 1.0, 4)).constant(1.0)
    g = build_domain(DomainSpec.rectangle(1.0, 1.0, 8)).constant(1.0)
    with pytest.raises(DomainMismatchError):
        f + g
