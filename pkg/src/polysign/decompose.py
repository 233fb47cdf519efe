"""Signed splitting of sources and the nonnegative solution decomposition.

The corrected kernel operator and the rank-one smoothing operator

    Hf = h^n (G + c2 w (x) w) f        Df = c2 w * (h^n sum w f)

both preserve sign, and G = H - D, so the solution for f = f+ - f-
splits as u = u_plus_part - u_minus_part with

    u_oplus  = H f+ + D f-        u_ominus = H f- + D f+

both nonnegative, reconstructing u = u_oplus - u_ominus.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .discretize import DiscreteOperator, WeightFunction, solve
from .domain import GridFunction
from .errors import DecompositionError, DomainMismatchError
from .kernels import GreenMatrix, KernelEstimate, apply_green

_SIGN_TOL = 1e-12
_RESIDUAL_TOL = 1e-10


@dataclass
class SignedSource:
    """Elementwise positive and negative parts of a source."""

    f_plus: GridFunction
    f_minus: GridFunction


@dataclass
class SignedSolution:
    """Solution u with its nonnegative decomposition u = u_oplus - u_ominus."""

    u: GridFunction
    u_oplus: GridFunction
    u_ominus: GridFunction
    kernel_estimate: KernelEstimate
    residual: float


def split_source(f: GridFunction) -> SignedSource:
    """f = f+ - f- with disjoint supports."""
    v = f.values
    return SignedSource(f_plus=GridFunction(f.domain, np.maximum(v, 0.0)),
                        f_minus=GridFunction(f.domain, np.maximum(-v, 0.0)))


def apply_H(G: GreenMatrix, est: KernelEstimate, w: WeightFunction,
            f: GridFunction) -> GridFunction:
    """Discrete quadrature of the corrected kernel integral."""
    if f.domain.interior_count != G.domain.interior_count:
        raise DomainMismatchError("source lives on a different grid")
    out = apply_green(G, f.values) + apply_D(est, w, f).values
    return GridFunction(G.domain, out)


def apply_D(est: KernelEstimate, w: WeightFunction, f: GridFunction
            ) -> GridFunction:
    """Rank-one smoothing: c2 * w * (h^n sum w f)."""
    domain = f.domain
    hn = domain.h ** domain.dimension
    coeff = est.c2_used * hn * float(w.w.values @ f.values)
    return GridFunction(domain, coeff * w.w.values)


def signed_decompose(op: DiscreteOperator, G: GreenMatrix,
                     est: KernelEstimate, w: WeightFunction,
                     f: GridFunction) -> SignedSolution:
    """Solve and decompose; raises if a sign or identity invariant fails."""
    src = split_source(f)
    u = solve(op, f)
    u_oplus = apply_H(G, est, w, src.f_plus) + apply_D(est, w, src.f_minus)
    u_ominus = apply_H(G, est, w, src.f_minus) + apply_D(est, w, src.f_plus)

    scale = float(np.abs(u.values).max())
    tol = _SIGN_TOL * scale
    pts = op.domain.points

    for name, part in (("u_oplus", u_oplus), ("u_ominus", u_ominus)):
        k = int(np.argmin(part.values))
        if part.values[k] < -tol:
            raise DecompositionError(
                f"{name} dips to {part.values[k]:.3e} (tolerance {-tol:.3e}); "
                "the rank-one coefficient is too small or the kernel "
                "scaling is off",
                point=pts[k], values={name: part.values[k]})

    residual = float(np.abs(u.values
                            - (u_oplus.values - u_ominus.values)).max())
    if residual > _RESIDUAL_TOL * scale and scale > 0.0:
        raise DecompositionError(
            f"reconstruction residual {residual:.3e} exceeds "
            f"{_RESIDUAL_TOL * scale:.3e}")

    # chain -u_ominus <= -u^- <= 0 <= u^+ <= u_oplus, u^+/- from the solver's u
    u_pos = np.maximum(u.values, 0.0)
    u_neg = np.maximum(-u.values, 0.0)
    slack = min(float((u_oplus.values - u_pos).min()),
                float((u_ominus.values - u_neg).min()))
    if slack < -tol:
        k = int(np.argmin(np.minimum(u_oplus.values - u_pos,
                                     u_ominus.values - u_neg)))
        raise DecompositionError(
            f"sign chain violated by {slack:.3e} (tolerance {-tol:.3e})",
            point=pts[k],
            values={"u": u.values[k], "u_oplus": u_oplus.values[k],
                    "u_ominus": u_ominus.values[k]})

    return SignedSolution(u=u, u_oplus=u_oplus, u_ominus=u_ominus,
                          kernel_estimate=est, residual=residual)


def chain_slack(sol: SignedSolution) -> float:
    """Worst slack of the pointwise chain; nonnegative when it holds."""
    u_pos = np.maximum(sol.u.values, 0.0)
    u_neg = np.maximum(-sol.u.values, 0.0)
    return min(float((sol.u_oplus.values - u_pos).min()),
               float((sol.u_ominus.values - u_neg).min()))
