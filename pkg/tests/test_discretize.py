import math

import numpy as np
import pytest

from polysign import (CapabilityError, DomainSpec, assemble_operator,
                      boundary_weight, build_domain, domain_for, solve,
                      torsion_function)


def disk_torsion_error(cells):
    domain = build_domain(DomainSpec.disk(1.0, cells))
    e1 = torsion_function(domain)
    exact = 0.25 * (1.0 - np.sum(domain.points ** 2, axis=1))
    return float(np.abs(e1.values - exact).max())


def test_disk_torsion_second_order():
    coarse, fine = disk_torsion_error(32), disk_torsion_error(64)
    assert math.log2(coarse / fine) >= 1.8


def test_torsion_is_positive_and_below_square_bound():
    domain = build_domain(DomainSpec.rectangle(1.0, 1.0, 32))
    e1 = torsion_function(domain)
    assert e1.values.min() > 0.0
    # the unit-square torsion maximum is about 0.0737
    assert e1.values.max() < 0.075


def test_operator_is_symmetric():
    for m in (1, 2):
        domain = domain_for(DomainSpec.rectangle(2.0, 1.0, 16), m)
        op = assemble_operator(domain, m)
        gap = abs(op.matrix - op.matrix.T).max()
        assert gap <= 1e-9 * abs(op.matrix).max()


def test_laplacian_solve_matches_separable_solution():
    # -Delta u = 2 pi^2 sin(pi x) sin(pi y) has u = sin(pi x) sin(pi y)
    domain = build_domain(DomainSpec.rectangle(1.0, 1.0, 32))
    op = assemble_operator(domain, 1)
    f = domain.sample(lambda x, y: 2.0 * np.pi ** 2
                      * np.sin(np.pi * x) * np.sin(np.pi * y))
    u = solve(op, f)
    exact = domain.sample(lambda x, y: np.sin(np.pi * x) * np.sin(np.pi * y))
    assert np.abs(u.values - exact.values).max() < 3e-3


def test_clamped_disk_matches_boggio_profile():
    # (-Delta)^2 u = 1 on the unit disk: u = (1 - r^2)^2 / 64
    domain = domain_for(DomainSpec.disk(1.0, 32), 2)
    op = assemble_operator(domain, 2)
    u = solve(op, domain.constant(1.0))
    r2 = np.sum(domain.points ** 2, axis=1)
    exact = (1.0 - r2) ** 2 / 64.0
    assert np.abs(u.values - exact).max() < 0.05 * exact.max()


def test_residual_of_solve_is_tiny():
    domain = build_domain(DomainSpec.rectangle(2.0, 1.0, 16))
    op = assemble_operator(domain, 2)
    f = domain.sample(lambda x, y: np.sin(x) * y)
    u = solve(op, f)
    res = np.abs(op.matrix @ u.values - f.values).max()
    assert res <= 1e-10 * max(1.0, np.abs(f.values).max())


def test_boundary_weight_constants():
    domain = build_domain(DomainSpec.disk(1.0, 16))
    for m in (1, 2):
        wt = boundary_weight(domain, m)
        assert 0.0 < wt.c1_empirical <= wt.c2_empirical
        assert np.allclose(wt.w.values, wt.e1.values ** m)


def test_box_bilaplacian_not_supported():
    domain = build_domain(DomainSpec.box3d(1.0, 1.0, 1.0, 4))
    with pytest.raises(CapabilityError):
        assemble_operator(domain, 2)


def test_box_laplacian_separable_solution():
    domain = build_domain(DomainSpec.box3d(1.0, 1.0, 1.0, 8))
    op = assemble_operator(domain, 1)
    s = lambda t: np.sin(np.pi * t)
    f = domain.sample(lambda x, y, z: 3.0 * np.pi ** 2
                      * s(x) * s(y) * s(z))
    u = solve(op, f)
    exact = domain.sample(lambda x, y, z: s(x) * s(y) * s(z))
    assert np.abs(u.values - exact.values).max() < 2e-2
