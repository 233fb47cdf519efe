"""Verification suite: the quantitative acceptance checks.

Each check exercises one property of the pipeline at desk scale —
convergence orders, oracle agreement, kernel-estimate stability,
decomposition invariants, experiment refinement behavior — and returns
a :class:`CheckResult` with a deterministic detail string (no timings,
so two seeded runs serialize identically).

Known limitation, reported honestly rather than masked: on rectangles
the torsion function behaves like d(x)^2 near a right-angle corner
instead of d(x), so the weight w = e1^m degenerates like d^{2m} there
while the Green kernel only vanishes like d^m per argument.  As a
consequence the corner-dominated quantities (the lower endpoint of
w/d^m, the constant c2_star, and with it the sandwich constants and the
rank-one term in the decomposition experiments) drift under refinement
on corner domains.  The corresponding checks fail on their rectangle
legs by design of the checks themselves; see the repository notes.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

import numpy as np

from .ball import BallKernelQuery, boggio_green
from .decompose import chain_slack, signed_decompose
from .discretize import boundary_weight, torsion_function
from .domain import DomainSpec, domain_for
from .errors import DecompositionError
from .experiments import (ExperimentConfig, Pipeline, build_pipeline,
                          random_bump_source, run_estimate_experiment)
from .kernels import max_riesz_ratio, riesz_constant
from .norms import sobolev_exponent

DEFAULT_SEED = 20260826


@dataclass
class CheckResult:
    name: str
    passed: bool
    detail: str
    seconds: float = 0.0

    def line(self) -> str:
        status = "pass" if self.passed else "FAIL"
        return f"[{status}] {self.name}: {self.detail}"


def _fmt(x: float) -> str:
    return f"{x:.6g}"


@dataclass
class VerificationRun:
    """Caches pipelines so checks sharing a grid reuse the work."""

    seed: int = DEFAULT_SEED
    dense_cap: int = 6000
    _pipelines: dict = field(default_factory=dict)

    def pipeline(self, spec: DomainSpec, m: int,
                 need_green: bool | None = None) -> Pipeline:
        key = (spec, m, bool(need_green) or m >= 2)
        if key not in self._pipelines:
            self._pipelines[key] = build_pipeline(
                spec, m, dense_cap=self.dense_cap, need_green=need_green)
        return self._pipelines[key]


def _timed(fn):
    def wrapper(run: VerificationRun) -> CheckResult:
        start = time.perf_counter()
        result = fn(run)
        result.seconds = time.perf_counter() - start
        return result
    return wrapper


@_timed
def check_torsion_convergence(run: VerificationRun) -> CheckResult:
    """Disk torsion vs (1 - r^2)/4: observed order and fine-grid error."""
    errors = {}
    for cells in (32, 64):
        domain = domain_for(DomainSpec.disk(1.0, cells), 1)
        e1 = torsion_function(domain)
        exact = 0.25 * (1.0 - np.sum(domain.points ** 2, axis=1))
        errors[cells] = float(np.abs(e1.values - exact).max())
    order = math.log2(errors[32] / errors[64])
    passed = order >= 1.8 and errors[64] <= 5e-3
    return CheckResult(
        "torsion_convergence", passed,
        f"order {_fmt(order)} (need >= 1.8), error at cells=64 "
        f"{_fmt(errors[64])} (need <= 0.005)")


def square_torsion_oracle(modes: int = 99) -> float:
    """Fourier value of the unit-square torsion function at the center.

    e1(x, y) = sum over odd j, k of 16 sin(j pi x) sin(k pi y)
               / (pi^4 j k (j^2 + k^2)).
    """
    j = np.arange(1, modes + 1, 2, dtype=float)
    jj, kk = np.meshgrid(j, j, indexing="ij")
    signs = np.sin(0.5 * np.pi * jj) * np.sin(0.5 * np.pi * kk)
    terms = 16.0 * signs / (np.pi ** 4 * jj * kk * (jj ** 2 + kk ** 2))
    return float(terms.sum())


@_timed
def check_square_torsion_maximum(run: VerificationRun) -> CheckResult:
    domain = domain_for(DomainSpec.rectangle(1.0, 1.0, 64), 1)
    e1 = torsion_function(domain)
    oracle = square_torsion_oracle()
    rel = abs(float(e1.values.max()) - oracle) / oracle
    return CheckResult(
        "square_torsion_maximum", rel <= 0.01,
        f"max e1 {_fmt(float(e1.values.max()))} vs series value "
        f"{_fmt(oracle)}, relative gap {_fmt(rel)} (need <= 0.01)")


@_timed
def check_weight_distance_ratio(run: VerificationRun) -> CheckResult:
    """Stability of [min, max] of w/d^m under one refinement."""
    pieces = []
    passed = True
    for spec in (DomainSpec.disk(1.0, 32), DomainSpec.rectangle(2.0, 1.0, 32)):
        for m in (1, 2):
            ends = {}
            for cells in (spec.cells, 2 * spec.cells):
                domain = domain_for(spec.with_cells(cells), m)
                wt = boundary_weight(domain, m)
                ends[cells] = (wt.c1_empirical, wt.c2_empirical)
            coarse, fine = ends[spec.cells], ends[2 * spec.cells]
            changes = [abs(f - c) / c for c, f in zip(coarse, fine)]
            ok = max(changes) < 0.25 and min(coarse + fine) > 0.0
            passed &= ok
            pieces.append(f"{spec.shape} m={m} endpoint changes "
                          f"{_fmt(changes[0])}/{_fmt(changes[1])}")
    return CheckResult(
        "weight_distance_ratio", passed,
        "; ".join(pieces) + " (need < 0.25 each)")


@_timed
def check_green_symmetry_positivity(run: VerificationRun) -> CheckResult:
    pieces = []
    passed = True
    for spec in (DomainSpec.disk(1.0, 32), DomainSpec.rectangle(2.0, 1.0, 32)):
        pipe = run.pipeline(spec, 1, need_green=True)
        G = pipe.green
        min_entry = float(G.entries.min())
        ok = G.asymmetry_defect <= 1e-10 and min_entry >= -1e-12
        passed &= ok
        pieces.append(f"{spec.shape}: defect {_fmt(G.asymmetry_defect)}, "
                      f"min entry {_fmt(min_entry)}")
    return CheckResult(
        "green_symmetry_positivity", passed,
        "; ".join(pieces) + " (need defect <= 1e-10, min >= -1e-12)")


@_timed
def check_ball_positivity(run: VerificationRun) -> CheckResult:
    """Disk m=2: no sign change, and G matches the ball formula."""
    pipe = run.pipeline(DomainSpec.disk(1.0, 32), 2)
    est = pipe.estimate
    pts = pipe.domain.points
    radii = np.linalg.norm(pts, axis=1)
    rng = np.random.default_rng(7)
    candidates = np.flatnonzero(radii <= 0.6)
    pairs = []
    while len(pairs) < 10:
        i, j = rng.choice(candidates, size=2, replace=False)
        if np.linalg.norm(pts[i] - pts[j]) >= 0.5:
            pairs.append((int(i), int(j)))
    worst = 0.0
    for i, j in pairs:
        oracle = boggio_green(BallKernelQuery(2, 2, tuple(pts[i]),
                                              tuple(pts[j])))
        worst = max(worst, abs(pipe.green.entries[i, j] - oracle) / oracle)
    passed = est.c2_star == 0.0 and worst <= 0.10
    return CheckResult(
        "ball_positivity", passed,
        f"c2_star {_fmt(est.c2_star)} (need 0), worst oracle gap over "
        f"10 far pairs {_fmt(worst)} (need <= 0.1)")


@_timed
def check_sign_change_detection(run: VerificationRun) -> CheckResult:
    from .kernels import corrected_min_offdiagonal

    pipe = run.pipeline(DomainSpec.rectangle(5.0, 1.0, 80), 2)
    est = pipe.estimate
    min_off = corrected_min_offdiagonal(pipe.green, pipe.weight, est.c2_used)
    passed = est.c2_star > 0.0 and min_off >= 0.0
    return CheckResult(
        "sign_change_detection", passed,
        f"c2_star {_fmt(est.c2_star)} (need > 0), corrected min "
        f"off-diagonal {_fmt(min_off)} (need >= 0)")


@_timed
def check_sandwich_stability(run: VerificationRun) -> CheckResult:
    """c1_hat, c3_hat positive, finite, stable under refinement."""
    legs = ((DomainSpec.disk(1.0, 32), 1), (DomainSpec.disk(1.0, 32), 2),
            (DomainSpec.rectangle(5.0, 1.0, 80), 2))
    pieces = []
    passed = True
    for spec, m in legs:
        coarse = run.pipeline(spec, m, need_green=True).estimate
        fine = run.pipeline(spec.with_cells(2 * spec.cells), m,
                            need_green=True).estimate
        factors = (fine.c1_hat / coarse.c1_hat, fine.c3_hat / coarse.c3_hat)
        ok = (coarse.c1_hat > 0.0 and fine.c1_hat > 0.0
              and math.isfinite(fine.c3_hat)
              and all(2 / 3 <= f <= 1.5 for f in factors))
        passed &= ok
        pieces.append(f"{spec.shape} m={m} c1 factor {_fmt(factors[0])}, "
                      f"c3 factor {_fmt(factors[1])}")
    return CheckResult(
        "sandwich_stability", passed,
        "; ".join(pieces) + " (need within [0.667, 1.5])")


@_timed
def check_riesz_comparison(run: VerificationRun) -> CheckResult:
    const_gap = abs(riesz_constant(3, 1) - 1.0 / (4.0 * math.pi))
    start = time.perf_counter()
    ratios = {}
    for cells in (16, 24):
        pipe = run.pipeline(DomainSpec.box3d(1.0, 1.0, 1.0, cells), 1)
        ratios[cells] = max_riesz_ratio(pipe.op, pipe.weight,
                                        pipe.estimate.c2_used)
    elapsed = time.perf_counter() - start
    factor = ratios[24] / ratios[16]
    passed = (const_gap <= 1e-12 and math.isfinite(ratios[24])
              and 0.8 <= factor <= 1.25 and elapsed < 60.0)
    return CheckResult(
        "riesz_comparison", passed,
        f"constant gap {_fmt(const_gap)} (need <= 1e-12), kernel-ratio "
        f"refinement factor {_fmt(factor)} (need within [0.8, 1.25])")


@_timed
def check_decomposition_signs(run: VerificationRun) -> CheckResult:
    """50 seeded mixed-sign sources on two m=2 domains."""
    pieces = []
    passed = True
    for spec in (DomainSpec.rectangle(5.0, 1.0, 80), DomainSpec.disk(1.0, 32)):
        pipe = run.pipeline(spec, 2)
        seeds = np.random.SeedSequence(run.seed).spawn(50)
        worst_res, worst_slack, worst_min = 0.0, 0.0, 0.0
        try:
            for ss in seeds:
                f = random_bump_source(pipe.domain,
                                       np.random.default_rng(ss))
                sol = signed_decompose(pipe.op, pipe.green, pipe.estimate,
                                       pipe.weight, f)
                scale = float(np.abs(sol.u.values).max())
                worst_res = max(worst_res, sol.residual / scale)
                worst_slack = max(worst_slack, -chain_slack(sol) / scale)
                worst_min = max(
                    worst_min,
                    -min(sol.u_oplus.values.min(),
                         sol.u_ominus.values.min()) / scale)
        except DecompositionError as exc:
            passed = False
            pieces.append(f"{spec.shape}: {exc}")
            continue
        ok = (worst_res <= 1e-10 and worst_slack <= 1e-12
              and worst_min <= 1e-12)
        passed &= ok
        pieces.append(f"{spec.shape}: residual {_fmt(worst_res)}, "
                      f"negative slack {_fmt(worst_slack)}, "
                      f"negative part {_fmt(worst_min)}")
    return CheckResult(
        "decomposition_signs", passed,
        "; ".join(pieces) + " (relative; need <= 1e-10 / 1e-12 / 1e-12)")


def _experiment_check(name: str, cfg: ExperimentConfig) -> CheckResult:
    start = time.perf_counter()
    report = run_estimate_experiment(cfg)
    ok = (math.isfinite(report.empirical_constant)
          and 0.5 <= report.refinement_ratio <= 2.0)
    result = CheckResult(
        name, ok,
        f"{cfg.kind}: empirical constant {_fmt(report.empirical_constant)}, "
        f"refinement ratio {_fmt(report.refinement_ratio)} "
        "(need within [0.5, 2])")
    result.seconds = time.perf_counter() - start
    return result


def check_theorem_estimates(run: VerificationRun) -> list[CheckResult]:
    results = []
    for kind in ("theorem1_plus", "theorem1_minus"):
        cfg = ExperimentConfig(
            kind=kind, domain=DomainSpec.rectangle(5.0, 1.0, 60), m=2,
            p_plus=2.0, p_minus=2.0, trials=20, seed=run.seed, refine=True,
            dense_cap=run.dense_cap)
        results.append(_experiment_check(f"estimate_{kind}", cfg))
    merged = CheckResult(
        "theorem_estimates", all(r.passed for r in results),
        "; ".join(r.detail for r in results))
    merged.seconds = sum(r.seconds for r in results)
    return [merged]


def check_supremum_estimate(run: VerificationRun) -> CheckResult:
    cfg = ExperimentConfig(
        kind="corollary_supremum", domain=DomainSpec.disk(1.0, 32), m=2,
        p_plus=2.0, p_minus=2.0, trials=20, seed=run.seed, refine=True,
        dense_cap=run.dense_cap)
    return _experiment_check("supremum_estimate", cfg)


def check_hls_estimate(run: VerificationRun) -> CheckResult:
    q = sobolev_exponent(3, 1, 1.2)
    cfg = ExperimentConfig(
        kind="hls_lemma", domain=DomainSpec.box3d(1.0, 1.0, 1.0, 12), m=1,
        p_plus=1.2, p_minus=1.2, trials=20, seed=run.seed, refine=True,
        dense_cap=run.dense_cap)
    result = _experiment_check("hls_estimate", cfg)
    if abs(q - 6.0) > 1e-12:
        result.passed = False
        result.detail += f"; sobolev exponent {q!r} != 6"
    else:
        result.detail = f"q = sobolev_exponent(3,1,1.2) = 6; " + result.detail
    return result


def run_suite(seed: int = DEFAULT_SEED,
              progress=None) -> list[CheckResult]:
    """Run every check; returns one result per acceptance criterion."""
    start = time.perf_counter()
    run = VerificationRun(seed=seed)
    results: list[CheckResult] = []

    steps = [check_torsion_convergence, check_square_torsion_maximum,
             check_weight_distance_ratio, check_green_symmetry_positivity,
             check_ball_positivity, check_sign_change_detection,
             check_sandwich_stability, check_riesz_comparison,
             check_decomposition_signs]
    for step in steps:
        results.append(step(run))
        if progress:
            progress(results[-1])
    for group in (check_theorem_estimates(run),
                  [check_supremum_estimate(run)],
                  [check_hls_estimate(run)]):
        for result in group:
            results.append(result)
            if progress:
                progress(result)

    # Determinism: replay the seeded (randomized) checks and demand the
    # serialized details match byte for byte; the remaining checks have
    # no random inputs.  Also enforce the overall wall-clock budget.
    replay = VerificationRun(seed=seed, _pipelines=run._pipelines)
    replayed = (check_theorem_estimates(replay)
                + [check_supremum_estimate(replay)]
                + [check_hls_estimate(replay)])
    originals = results[-3:]
    identical = all(a.detail == b.detail and a.passed == b.passed
                    for a, b in zip(originals, replayed))
    elapsed = time.perf_counter() - start
    det = CheckResult(
        "suite_determinism", identical and elapsed < 300.0,
        "replayed seeded checks "
        + ("matched byte for byte" if identical else "DIFFERED")
        + "; wall-clock budget 300 s")
    det.seconds = time.perf_counter() - start - sum(r.seconds
                                                    for r in results)
    results.append(det)
    if progress:
        progress(det)
    return results
