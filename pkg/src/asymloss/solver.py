"""Finding the variance-minimizing offset and pricing what it saves.

The offset C that minimizes expected loss is the critical fractile of
the error distribution, F(C) = k2/(k1 + k2).  For symmetric errors with
a central peak, the same C also lowers the variance of the realized
loss, never raising it -- so the solver reports both the first- and
second-moment effects, plus the beta kernel that certificates the
variance claim.

Root finding is bracketed Brent iteration on the expected-loss
derivative, polished with a few safeguarded Newton steps (the
derivative's own slope is (k1 + k2) f(c)).  Densities that vanish on an
interval make the optimizer set-valued; the solver then reports the
smallest-magnitude optimum and flags it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from scipy import optimize

from .distributions import ErrorDistribution
from .errors import CrossCheckError, NumericError
from .inequalities import beta
from .loss_model import (
    LossParams,
    d_expected_loss,
    expected_loss,
    expected_loss_sq,
    variance_of_loss,
)

__all__ = ["OffsetSolution", "SavingsReport", "solve_offset", "savings_report"]

# |d/dc E[L]| allowed at the returned offset.
RESIDUAL_TOL = 1e-10
# Relative disagreement tolerated between independent evaluation routes.
CROSS_CHECK_TOL = 1e-8


@dataclass(frozen=True)
class OffsetSolution:
    """The optimal offset and the moments that justify it."""

    C: float
    residual: float          # d/dc E[L] at C
    flat_optimum: bool       # True when a whole interval of offsets ties
    expected_at_C: float
    variance_at_C: float
    expected_at_zero: float
    variance_at_zero: float
    beta_at_C: float

    def to_dict(self) -> dict:
        return {
            "C": self.C,
            "residual": self.residual,
            "flat_optimum": self.flat_optimum,
            "expected_at_C": self.expected_at_C,
            "variance_at_C": self.variance_at_C,
            "expected_at_zero": self.expected_at_zero,
            "variance_at_zero": self.variance_at_zero,
            "beta_at_C": self.beta_at_C,
        }


@dataclass(frozen=True)
class SavingsReport:
    """What moving from c = 0 to c = C buys, absolutely and in percent."""

    solution: OffsetSolution
    delta_expected: float
    delta_variance: float
    pct_expected: float
    pct_variance: float

    def to_dict(self) -> dict:
        return {
            "solution": self.solution.to_dict(),
            "delta_expected": self.delta_expected,
            "delta_variance": self.delta_variance,
            "pct_expected": self.pct_expected,
            "pct_variance": self.pct_variance,
        }


def _close(a: float, b: float, tol: float) -> bool:
    return abs(a - b) <= tol * max(1.0, abs(a), abs(b))


def solve_offset(
    dist: ErrorDistribution,
    params: LossParams,
    *,
    residual_tol: float = RESIDUAL_TOL,
    cross_check_tol: float = CROSS_CHECK_TOL,
) -> OffsetSolution:
    """Minimize c -> E[L(Z + c)] and report the moments at 0 and C.

    Raises
    ------
    NumericError
        If no bracket can be found or the residual tolerance cannot be met.
    CrossCheckError
        If independent expressions for the moments at C disagree beyond
        ``cross_check_tol`` (relative).
    """
    g = lambda c: d_expected_loss(dist, params, c)
    ks = params.k_sum
    # Scale below which the derivative is considered exactly critical;
    # on a flat stretch of the CDF it is constant up to rounding of ks.
    flat_tol = 1e-12 * ks

    if params.k1 == params.k2:
        # g(0) = 0 identically; symmetry pins the optimum at the median.
        c_opt, flat = 0.0, False
    else:
        side = 1.0 if params.k2 > params.k1 else -1.0
        g0 = g(0.0)
        hi = max(dist.scale, 1e-12)
        for _ in range(300):
            if g(side * hi) * g0 < 0.0:
                break
            hi *= 2.0
        else:
            raise NumericError("could not bracket the critical fractile")
        lo, up = (0.0, side * hi) if side > 0 else (side * hi, 0.0)
        root = optimize.brentq(
            g, lo, up, xtol=1e-14 * max(1.0, dist.scale), rtol=8.9e-16, maxiter=200
        )

        # Newton polish: the derivative of g is ks * f(c).
        for _ in range(4):
            fc = float(dist.pdf(root))
            gc = g(root)
            if fc <= 0.0 or gc == 0.0:
                break
            step = gc / (ks * fc)
            candidate = root - step
            if abs(g(candidate)) < abs(gc):
                root = candidate
            else:
                break

        # A vanished density at the root means a whole interval of ties;
        # walk back to the smallest-magnitude end of the flat stretch.
        probe = abs(root) + 1e-6 * max(dist.scale, abs(root))
        flat = abs(g(side * probe)) <= flat_tol
        if flat:
            lo_m, hi_m = 0.0, abs(root)
            for _ in range(200):
                mid = 0.5 * (lo_m + hi_m)
                if abs(g(side * mid)) <= flat_tol:
                    hi_m = mid
                else:
                    lo_m = mid
            root = side * hi_m
        c_opt = root

    residual = g(c_opt)
    if abs(residual) > residual_tol:
        raise NumericError(
            f"offset residual {residual:.3e} exceeds {residual_tol:.1e}",
            achieved=abs(residual),
        )

    # Moments at the optimum, each via two independent arrangements.
    table_c = dist.partial_moments(abs(c_opt))
    expected_c = expected_loss(dist, params, c_opt, table=table_c)
    expected_c_direct = ks * table_c.upper[1]  # the cancelled form, valid only at C
    if not _close(expected_c, expected_c_direct, cross_check_tol):
        raise CrossCheckError(
            f"expected loss at C disagrees between routes: "
            f"{expected_c!r} vs {expected_c_direct!r}"
        )

    variance_c = variance_of_loss(dist, params, c_opt, table=table_c)
    e2_c = expected_loss_sq(dist, params, c_opt, table=table_c)
    variance_c_direct = e2_c - expected_c_direct * expected_c_direct
    if not _close(variance_c, variance_c_direct, cross_check_tol):
        raise CrossCheckError(
            f"variance at C disagrees between routes: "
            f"{variance_c!r} vs {variance_c_direct!r}"
        )

    table_0 = dist.partial_moments(0.0)
    return OffsetSolution(
        C=c_opt,
        residual=residual,
        flat_optimum=flat,
        expected_at_C=expected_c,
        variance_at_C=variance_c,
        expected_at_zero=expected_loss(dist, params, 0.0, table=table_0),
        variance_at_zero=variance_of_loss(dist, params, 0.0, table=table_0),
        beta_at_C=beta(dist, abs(c_opt)),
    )


def savings_report(dist: ErrorDistribution, params: LossParams) -> SavingsReport:
    """Solve for C and express both savings absolutely and in percent."""
    sol = solve_offset(dist, params)
    d_exp = sol.expected_at_zero - sol.expected_at_C
    d_var = sol.variance_at_zero - sol.variance_at_C
    return SavingsReport(
        solution=sol,
        delta_expected=d_exp,
        delta_variance=d_var,
        pct_expected=100.0 * d_exp / sol.expected_at_zero,
        pct_variance=100.0 * d_var / sol.variance_at_zero,
    )
