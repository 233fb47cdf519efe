import math

import numpy as np
import pytest

from polysign import (CapabilityError, DomainSpec, apply_green,
                      build_pipeline, estimate_sandwich_constants,
                      max_riesz_ratio, reference_kernel_H, riesz_constant,
                      riesz_kernel, solve)
from polysign.kernels import corrected_min_offdiagonal, ratio_histogram


def test_riesz_constants_closed_forms():
    assert riesz_constant(3, 1) == pytest.approx(1.0 / (4.0 * math.pi),
                                                 abs=1e-15)
    assert riesz_constant(5, 2) == pytest.approx(
        1.0 / (16.0 * math.pi ** 2), abs=1e-15)


def test_riesz_kernel_is_newtonian_for_n3_m1():
    value = riesz_kernel(3, 1, (0.0, 0.0, 0.0), (0.5, 0.0, 0.0))
    assert value == pytest.approx(1.0 / (4.0 * math.pi) / 0.5, rel=1e-12)


def test_reference_kernel_symmetry_and_decay():
    domain = build_pipeline(DomainSpec.rectangle(2.0, 1.0, 16), 1,
                            need_green=False).domain
    near = ((0.5, 0.5), (0.75, 0.5))
    far = ((0.5, 0.5), (1.5, 0.5))
    for m in (1, 2):
        h_near = reference_kernel_H(domain, m, *near)
        h_far = reference_kernel_H(domain, m, *far)
        h_sym = reference_kernel_H(domain, m, *reversed(near))
        assert h_near == pytest.approx(h_sym, rel=1e-12)
        assert 0.0 < h_far < h_near


def test_reference_kernel_diagonal_convention():
    domain = build_pipeline(DomainSpec.rectangle(2.0, 1.0, 16), 1,
                            need_green=False).domain
    # n = 2m: +inf on the diagonal; n < 2m: the finite boundary product
    assert reference_kernel_H(domain, 1, (0.5, 0.5), (0.5, 0.5)) == math.inf
    d = 0.5
    assert reference_kernel_H(domain, 2, (0.5, 0.5), (0.5, 0.5)) \
        == pytest.approx(d * d, rel=1e-12)


def test_green_matrix_m1_nonnegative_and_consistent():
    pipe = build_pipeline(DomainSpec.disk(1.0, 16), 1, need_green=True)
    G = pipe.green
    assert G.asymmetry_defect <= 1e-10
    assert G.entries.min() >= -1e-12
    f = pipe.domain.sample(lambda x, y: np.cos(x) + y)
    via_matrix = apply_green(G, f.values)
    via_solve = solve(pipe.op, f).values
    assert np.abs(via_matrix - via_solve).max() \
        <= 1e-8 * np.abs(via_solve).max()


def test_disk_m1_needs_no_correction():
    pipe = build_pipeline(DomainSpec.disk(1.0, 16), 1, need_green=True)
    assert pipe.estimate.c2_star == 0.0
    assert pipe.estimate.c2_used == 0.0


def test_elongated_plate_sign_change_and_correction():
    pipe = build_pipeline(DomainSpec.rectangle(5.0, 1.0, 40), 2)
    est = pipe.estimate
    assert pipe.green.entries.min() < 0.0
    assert est.c2_star > 0.0
    assert est.c2_used == pytest.approx(1.05 * est.c2_star, rel=1e-12)
    assert corrected_min_offdiagonal(pipe.green, pipe.weight,
                                     est.c2_used) >= 0.0


def test_sandwich_constants_bracket_one_on_disk():
    pipe = build_pipeline(DomainSpec.disk(1.0, 16), 2)
    est = pipe.estimate
    assert 0.0 < est.c1_hat < est.c3_hat < math.inf
    assert est.exclusion_radius == pytest.approx(2.0 * pipe.domain.h)
    for pair in (est.c1_pair, est.c3_pair):
        x, y = pair
        assert np.linalg.norm(np.asarray(x) - np.asarray(y)) \
            >= est.exclusion_radius * (1.0 - 1e-9)


def test_sandwich_respects_exclusion_radius_argument():
    pipe = build_pipeline(DomainSpec.disk(1.0, 16), 2)
    wide = estimate_sandwich_constants(pipe.green, pipe.weight,
                                       exclusion_radius=0.5)
    assert wide.c1_hat >= pipe.estimate.c1_hat
    assert wide.c3_hat <= pipe.estimate.c3_hat


def test_ratio_histogram_counts_separated_pairs():
    pipe = build_pipeline(DomainSpec.disk(1.0, 16), 2)
    edges, counts = ratio_histogram(pipe.green, pipe.weight, pipe.estimate)
    assert edges[0] == pytest.approx(pipe.estimate.c1_hat)
    assert edges[-1] == pytest.approx(pipe.estimate.c3_hat)
    assert counts.sum() > 0


def test_max_riesz_ratio_finite_on_box():
    pipe = build_pipeline(DomainSpec.box3d(1.0, 1.0, 1.0, 8), 1)
    ratio = max_riesz_ratio(pipe.op, pipe.weight, pipe.estimate.c2_used)
    assert 0.0 < ratio < math.inf


def test_max_riesz_ratio_requires_supercritical_dimension():
    pipe = build_pipeline(DomainSpec.rectangle(1.0, 1.0, 8), 1,
                          need_green=False)
    with pytest.raises(CapabilityError):
        max_riesz_ratio(pipe.op, pipe.weight, 0.0)
