from dataclasses import replace

import numpy as np
import pytest

from polysign import (DecompositionError, DomainSpec, build_pipeline,
                      chain_slack, random_bump_source, signed_decompose,
                      split_source)


@pytest.fixture(scope="module")
def plate():
    return build_pipeline(DomainSpec.rectangle(5.0, 1.0, 40), 2)


def test_split_source_parts(plate):
    f = random_bump_source(plate.domain, np.random.default_rng(1))
    src = split_source(f)
    assert np.all(src.f_plus.values >= 0.0)
    assert np.all(src.f_minus.values >= 0.0)
    assert np.allclose(src.f_plus.values - src.f_minus.values, f.values)
    assert np.all(src.f_plus.values * src.f_minus.values == 0.0)


def test_decomposition_identity_and_signs(plate):
    for seed in range(5):
        f = random_bump_source(plate.domain, np.random.default_rng(seed))
        sol = signed_decompose(plate.op, plate.green, plate.estimate,
                               plate.weight, f)
        scale = np.abs(sol.u.values).max()
        assert sol.residual <= 1e-10 * scale
        assert sol.u_oplus.values.min() >= -1e-12 * scale
        assert sol.u_ominus.values.min() >= -1e-12 * scale
        assert chain_slack(sol) >= -1e-12 * scale


def test_nonnegative_source_on_disk_gives_zero_ominus():
    pipe = build_pipeline(DomainSpec.disk(1.0, 16), 2)
    assert pipe.estimate.c2_used == 0.0
    f = pipe.domain.sample(lambda x, y: np.exp(-4.0 * (x ** 2 + y ** 2)))
    sol = signed_decompose(pipe.op, pipe.green, pipe.estimate, pipe.weight,
                           f)
    assert np.all(sol.u_ominus.values == 0.0)
    assert np.all(sol.u.values >= 0.0)


def test_corrupted_correction_is_detected(plate):
    broken = replace(plate.estimate, c2_used=0.0)
    f = random_bump_source(plate.domain, np.random.default_rng(0))
    with pytest.raises(DecompositionError) as info:
        signed_decompose(plate.op, plate.green, broken, plate.weight, f)
    assert info.value.point is not None
    assert info.value.values


def test_decomposition_reports_worst_point_location(plate):
    f = random_bump_source(plate.domain, np.random.default_rng(3))
    sol = signed_decompose(plate.op, plate.green, plate.estimate,
                           plate.weight, f)
    # parts must dominate the one-sided parts of u itself
    u_pos = np.maximum(sol.u.values, 0.0)
    u_neg = np.maximum(-sol.u.values, 0.0)
    scale = np.abs(sol.u.values).max()
    assert np.all(sol.u_oplus.values - u_pos >= -1e-12 * scale)
    assert np.all(sol.u_ominus.values - u_neg >= -1e-12 * scale)
