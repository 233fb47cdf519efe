"""Empirical-constant experiments for the signed regularity estimates.

Each experiment draws seeded random sources (sums of Gaussian bumps),
runs the pipeline, and records the ratio of a target norm to a bound
expression.  The empirical constant is the maximum ratio over trials;
stability of that constant under grid refinement is the numerical
signature of a uniform continuum constant.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass, field

import numpy as np

from .decompose import apply_H, signed_decompose, split_source
from .discretize import (DiscreteOperator, WeightFunction, assemble_operator,
                         boundary_weight, solve)
from .domain import DISK, DomainSpec, GridDomain, GridFunction, domain_for
from .errors import CapabilityError, ValidationError
from .kernels import (DENSE_GREEN_CAP, GreenMatrix, KernelEstimate,
                      estimate_sandwich_constants, green_matrix)
from .norms import discrete_derivative_norm, lp_norm, sobolev_exponent

KINDS = ("theorem1_plus", "theorem1_minus", "corollary_supremum",
         "corollary_lq", "hls_lemma", "hreg_proposition")

_SUBCRITICAL = ("corollary_lq", "hls_lemma")


def worker_count() -> int:
    """Parallelism cap from POLYSIGN_THREADS (defaults to 1)."""
    try:
        return max(1, int(os.environ.get("POLYSIGN_THREADS", "1")))
    except ValueError:
        return 1


@dataclass
class Pipeline:
    """Everything needed to solve and decompose on one grid."""

    domain: GridDomain
    op: DiscreteOperator
    weight: WeightFunction
    green: GreenMatrix | None
    estimate: KernelEstimate


def build_pipeline(spec: DomainSpec, m: int,
                   dense_cap: int = DENSE_GREEN_CAP,
                   exclusion_multiplier: float = 2.0,
                   need_green: bool | None = None) -> Pipeline:
    """Assemble operator, weight and kernel estimate for one resolution.

    For m = 1 the Green matrix is elementwise nonnegative (M-matrix), so
    the rank-one correction is zero and the dense matrix is only built
    when requested.
    """
    domain = domain_for(spec, m)
    op = assemble_operator(domain, m)
    weight = boundary_weight(domain, m)
    if need_green is None:
        need_green = m >= 2
    G = None
    est = None
    if need_green or m >= 2:
        G = green_matrix(op, max_points=dense_cap)
        est = estimate_sandwich_constants(
            G, weight, exclusion_radius=exclusion_multiplier * domain.h)
    else:
        est = KernelEstimate(c2_star=0.0, c2_used=0.0, c1_hat=math.nan,
                             c3_hat=math.nan,
                             exclusion_radius=exclusion_multiplier * domain.h,
                             c2_pair=None, c1_pair=None, c3_pair=None)
    return Pipeline(domain=domain, op=op, weight=weight, green=G,
                    estimate=est)


def random_bump_source(domain: GridDomain, rng: np.random.Generator
                       ) -> GridFunction:
    """Sum of 3..8 signed Gaussian bumps with centers inside the domain."""
    spec = domain.spec
    n = domain.dimension
    diam = max(spec.extents)
    count = int(rng.integers(3, 9))
    values = np.zeros(domain.interior_count)
    pts = domain.points
    drawn = 0
    while drawn < count:
        if spec.shape == DISK:
            c = rng.uniform(-spec.radius, spec.radius, size=n)
            if np.linalg.norm(c) >= spec.radius:
                continue
        else:
            c = np.array([rng.uniform(0.0, L) for L in spec.extents])
        width = rng.uniform(0.05, 0.3) * diam
        amp = rng.uniform(-1.0, 1.0)
        r2 = np.sum((pts - c) ** 2, axis=1)
        values += amp * np.exp(-r2 / (2.0 * width ** 2))
        drawn += 1
    return GridFunction(domain, values)


@dataclass
class ExperimentConfig:
    kind: str
    domain: DomainSpec
    m: int
    p_plus: float = 2.0
    p_minus: float = 2.0
    trials: int = 20
    seed: int = 1234
    refine: bool = False
    q_cap: float = math.inf
    exclusion_multiplier: float = 2.0
    dense_cap: int = DENSE_GREEN_CAP

    def validate(self) -> None:
        if self.kind not in KINDS:
            raise ValidationError(f"unknown experiment kind {self.kind!r}")
        if self.trials < 1:
            raise ValidationError("at least one trial required")
        for p in (self.p_plus, self.p_minus):
            if not 1.0 < p < math.inf:
                raise ValidationError("exponents must lie in (1, inf)")


@dataclass
class EstimateReport:
    """Per-trial ratio records plus the empirical constant."""

    kind: str
    domain: DomainSpec
    m: int
    cells: int
    p_plus: float
    p_minus: float
    trials: list[dict] = field(default_factory=list)
    empirical_constant: float = math.nan
    refinement_ratio: float | None = None
    coarse_constant: float | None = None


def _trial_record(cfg: ExperimentConfig, pipe: Pipeline, f: GridFunction
                  ) -> dict:
    n = pipe.domain.dimension
    m = cfg.m
    src = split_source(f)
    rec = {
        "f_plus_norm": lp_norm(src.f_plus, cfg.p_plus),
        "f_minus_l1": lp_norm(src.f_minus, 1.0),
        "f_minus_norm": lp_norm(src.f_minus, cfg.p_minus),
    }

    if cfg.kind in ("theorem1_plus", "theorem1_minus", "corollary_supremum",
                    "corollary_lq"):
        sol = signed_decompose(pipe.op, pipe.green, pipe.estimate,
                               pipe.weight, f)
    if cfg.kind == "theorem1_plus":
        target = discrete_derivative_norm(sol.u_oplus, 2 * m, cfg.p_plus)
        bound = rec["f_plus_norm"] + rec["f_minus_l1"]
    elif cfg.kind == "theorem1_minus":
        target = discrete_derivative_norm(sol.u_ominus, 2 * m, cfg.p_minus)
        bound = lp_norm(src.f_minus, cfg.p_minus) + lp_norm(src.f_plus, 1.0)
    elif cfg.kind == "corollary_supremum":
        if cfg.p_plus <= n / (2.0 * m):
            raise CapabilityError("supremum estimate needs p_plus > n / 2m")
        target = float(sol.u.values.max(initial=0.0))
        bound = rec["f_plus_norm"] + rec["f_minus_l1"]
    elif cfg.kind == "corollary_lq":
        q = min(sobolev_exponent(n, m, cfg.p_plus), cfg.q_cap)
        u_pos = GridFunction(pipe.domain, np.maximum(sol.u.values, 0.0))
        target = lp_norm(u_pos, q)
        bound = rec["f_plus_norm"] + rec["f_minus_l1"]
        rec["q"] = q
    elif cfg.kind == "hls_lemma":
        q = min(sobolev_exponent(n, m, cfg.p_plus), cfg.q_cap)
        hf = apply_H(pipe.green, pipe.estimate, pipe.weight, f) \
            if pipe.green is not None else _apply_H_sparse(pipe, f)
        target = lp_norm(hf, q)
        bound = lp_norm(f, cfg.p_plus)
        rec["q"] = q
    elif cfg.kind == "hreg_proposition":
        hf = apply_H(pipe.green, pipe.estimate, pipe.weight, f) \
            if pipe.green is not None else _apply_H_sparse(pipe, f)
        target = discrete_derivative_norm(hf, 2 * m, cfg.p_plus)
        bound = lp_norm(f, cfg.p_plus)
    else:  # pragma: no cover
        raise ValidationError(cfg.kind)

    rec["target"] = float(target)
    rec["bound"] = float(bound)
    rec["ratio"] = float(target / bound) if bound > 0.0 else math.nan
    return rec


def _apply_H_sparse(pipe: Pipeline, f: GridFunction) -> GridFunction:
    """H f without the dense Green matrix: solve plus rank-one term."""
    from .decompose import apply_D

    return solve(pipe.op, f) + apply_D(pipe.estimate, pipe.weight, f)


def _run_single(cfg: ExperimentConfig, spec: DomainSpec) -> EstimateReport:
    need_green = cfg.m >= 2
    pipe = build_pipeline(spec, cfg.m, dense_cap=cfg.dense_cap,
                          exclusion_multiplier=cfg.exclusion_multiplier,
                          need_green=need_green)
    report = EstimateReport(kind=cfg.kind, domain=spec, m=cfg.m,
                            cells=spec.cells, p_plus=cfg.p_plus,
                            p_minus=cfg.p_minus)
    seeds = np.random.SeedSequence(cfg.seed).spawn(cfg.trials)
    for t, ss in enumerate(seeds):
        rng = np.random.default_rng(ss)
        f = random_bump_source(pipe.domain, rng)
        rec = _trial_record(cfg, pipe, f)
        rec["trial"] = t
        rec["cells"] = spec.cells
        report.trials.append(rec)
    ratios = [r["ratio"] for r in report.trials if math.isfinite(r["ratio"])]
    if not ratios:
        raise ValidationError("all trials produced degenerate bounds")
    report.empirical_constant = max(ratios)
    return report


def run_estimate_experiment(cfg: ExperimentConfig) -> EstimateReport:
    """Run one experiment kind; with refine=True also at doubled cells."""
    cfg.validate()
    n = cfg.domain.dimension
    if cfg.kind in _SUBCRITICAL and cfg.p_plus >= n / (2.0 * cfg.m):
        raise CapabilityError(
            f"p={cfg.p_plus} is supercritical for n={n}, m={cfg.m}")
    report = _run_single(cfg, cfg.domain)
    if cfg.refine:
        fine = _run_single(cfg, cfg.domain.with_cells(2 * cfg.domain.cells))
        report.coarse_constant = report.empirical_constant
        report.refinement_ratio = (fine.empirical_constant
                                   / report.empirical_constant)
        report.trials.extend(fine.trials)
        report.empirical_constant = max(report.empirical_constant,
                                        fine.empirical_constant)
    return report
