import numpy as np
import pytest

from polysign import (CapabilityError, DomainSpec, ExperimentConfig,
                      ValidationError, build_pipeline, random_bump_source,
                      run_estimate_experiment)


def small_config(**overrides):
    base = dict(kind="hls_lemma", domain=DomainSpec.box3d(1.0, 1.0, 1.0, 8),
                m=1, p_plus=1.2, p_minus=1.2, trials=3, seed=99)
    base.update(overrides)
    return ExperimentConfig(**base)


def test_experiment_is_deterministic():
    a = run_estimate_experiment(small_config())
    b = run_estimate_experiment(small_config())
    assert a.empirical_constant == b.empirical_constant
    assert [r["ratio"] for r in a.trials] == [r["ratio"] for r in b.trials]


def test_seed_changes_trials():
    a = run_estimate_experiment(small_config())
    b = run_estimate_experiment(small_config(seed=100))
    assert [r["ratio"] for r in a.trials] != [r["ratio"] for r in b.trials]


def test_refinement_doubles_cells_and_reports_ratio():
    report = run_estimate_experiment(small_config(refine=True))
    cells = sorted({r["cells"] for r in report.trials})
    assert cells == [8, 16]
    assert report.refinement_ratio is not None
    assert report.coarse_constant is not None
    assert len(report.trials) == 6


def test_empirical_constant_is_max_ratio():
    report = run_estimate_experiment(small_config())
    assert report.empirical_constant == max(r["ratio"]
                                            for r in report.trials)


def test_bump_source_reproducible_and_mixed_sign():
    domain = build_pipeline(DomainSpec.rectangle(2.0, 1.0, 16), 1,
                            need_green=False).domain
    f1 = random_bump_source(domain, np.random.default_rng(5))
    f2 = random_bump_source(domain, np.random.default_rng(5))
    assert np.array_equal(f1.values, f2.values)
    assert np.isfinite(f1.values).all()


def test_config_validation():
    with pytest.raises(ValidationError):
        run_estimate_experiment(small_config(kind="nonsense"))
    with pytest.raises(ValidationError):
        run_estimate_experiment(small_config(trials=0))
    with pytest.raises(ValidationError):
        run_estimate_experiment(small_config(p_plus=1.0))


def test_supercritical_exponent_rejected():
    with pytest.raises(CapabilityError):
        run_estimate_experiment(small_config(p_plus=1.5))


def test_theorem_kind_on_clamped_plate():
    cfg = ExperimentConfig(kind="theorem1_plus",
                           domain=DomainSpec.rectangle(5.0, 1.0, 60), m=2,
                           p_plus=2.0, p_minus=2.0, trials=2, seed=7)
    report = run_estimate_experiment(cfg)
    assert np.isfinite(report.empirical_constant)
    assert report.empirical_constant > 0.0
    assert {"target", "bound", "ratio"} <= set(report.trials[0])
