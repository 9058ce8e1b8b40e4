"""Tunneling-gap scaling in the classicality parameter, and its oracles.

As N_e grows the quasi-degenerate doublet gaps close exponentially,
gap ∝ exp(-delta·N_e).  The decay exponent is fitted by ordinary least
squares on log(gap); the analytic estimate delta_app = 2|xi2| comes from
the overlap of two coherent states parked in opposite wells, which this
module also evaluates directly as a cross-check.

Convention for which gap to track: parity-symmetric systems (xi1 = 0) use
the first excited doublet, gap index 2, because the ground doublet is
exactly degenerate; parity-broken systems use the ground doublet, index 0.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, replace

import gmpy2
import numpy as np

from .eigen import PrecisionPlan, converge_gap
from .model import ModelParams, default_dim

__all__ = [
    "CoherentState",
    "GapPoint",
    "GapScalingFit",
    "coherent_state",
    "coherent_overlap",
    "delta_app",
    "choose_gap_index",
    "plan_for_point",
    "gap_scaling_sweep",
    "fit_exponential",
    "fit_report",
    "default_ne_grid",
]

LOG2_E = math.log2(math.e)
# mantissa headroom beyond the expected gap scale when seeding precision
BITS_MARGIN = 96


@dataclass(frozen=True)
class CoherentState:
    """Truncated Glauber coherent state: amplitudes exp(-|z|²/2) zⁿ/√(n!)."""

    zeta: complex
    dim: int
    amplitudes: np.ndarray

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))


def coherent_state(zeta: complex, dim: int) -> CoherentState:
    """Coherent state truncated to the first dim Fock amplitudes."""
    if dim < 1:
        raise ValueError(f"dim must be positive, got {dim}")
    amp = np.empty(dim, dtype=complex)
    amp[0] = math.exp(-abs(zeta) ** 2 / 2.0)
    for n in range(dim - 1):
        amp[n + 1] = amp[n] * zeta / math.sqrt(n + 1.0)
    a = np.asarray(amp)
    a.flags.writeable = False
    return CoherentState(complex(zeta), dim, a)


def coherent_overlap(xi2: float, n_e: float, dim: int | None = None) -> tuple[float, float]:
    """Overlap of the two well-centered coherent states, numeric and analytic.

    The states sit at zeta = ±√(|xi2| N_e); the closed form
    <z|z'> = exp(z̄z' - |z|²/2 - |z'|²/2) gives exp(-2|xi2| N_e).
    Warns when the truncation visibly bites the state norms.
    """
    if xi2 == 0.0:
        raise ValueError("coherent_overlap needs xi2 != 0 (two-well regime)")
    if n_e <= 0.0:
        raise ValueError(f"n_e must be positive, got {n_e}")
    if dim is None:
        dim = default_dim(0.0, xi2, n_e)
    r = math.sqrt(abs(xi2) * n_e)
    plus = coherent_state(r, dim)
    minus = coherent_state(-r, dim)
    norm_dev = abs(plus.norm() - 1.0)
    if norm_dev > 1e-8:
        warnings.warn(
            f"truncated coherent-state norm off by {norm_dev:.2e}; "
            f"dim={dim} is small for |xi2|*n_e={abs(xi2) * n_e:.3g}",
            stacklevel=2,
        )
    numeric = float(np.real(np.vdot(plus.amplitudes, minus.amplitudes)))
    analytic = math.exp(-2.0 * abs(xi2) * n_e)
    return numeric, analytic


def delta_app(xi2: float) -> float:
    """Coherent-overlap estimate of the decay exponent: 2|xi2|."""
    return 2.0 * abs(xi2)


def choose_gap_index(xi1: float) -> int:
    """Paper-convention gap: index 2 when parity holds, else 0."""
    return 2 if xi1 == 0.0 else 0


@dataclass(frozen=True)
class GapPoint:
    n_e: float
    gap: object  # float (double path) or mpfr (arbitrary-precision path)
    converged: bool
    precision_bits: int
    dim: int
    gap_index: int

    def log_gap(self) -> float:
        return float(gmpy2.log(self.gap))


def plan_for_point(plan: PrecisionPlan, xi2: float, n_e: float) -> PrecisionPlan:
    """Seed the escalation's starting mantissa width from the expected gap.

    The gap scale exp(-2|xi2| n_e) is known in advance (the coherent-overlap
    estimate), so deep points can skip escalation rounds that could not
    possibly resolve them.  The acceptance test is unchanged: consecutive
    escalation steps must still agree.
    """
    needed = int(2.0 * abs(xi2) * n_e * LOG2_E) + BITS_MARGIN
    bits = plan.initial_bits
    while bits < needed and bits < plan.max_bits:
        bits = int(round(bits * plan.bits_step))
    if bits == plan.initial_bits:
        return plan
    return replace(plan, initial_bits=min(bits, plan.max_bits))


def gap_scaling_sweep(
    xi1: float,
    xi2: float,
    ne_grid,
    gap_index: int | None = None,
    plan: PrecisionPlan | None = None,
) -> list[GapPoint]:
    """converge_gap across an ascending N_e grid, one GapPoint per value.

    Unconverged points are carried through flagged; the fit stage drops
    them.  Points are independent (the CLI parallelizes them).
    """
    ne_grid = [float(v) for v in ne_grid]
    if len(ne_grid) == 0:
        raise ValueError("ne_grid is empty")
    if any(b <= a for a, b in zip(ne_grid, ne_grid[1:])):
        raise ValueError("ne_grid must be strictly ascending")
    if plan is None:
        plan = PrecisionPlan()
    j = choose_gap_index(xi1) if gap_index is None else gap_index
    return [scaling_point(xi1, xi2, n_e, j, plan) for n_e in ne_grid]


def scaling_point(xi1: float, xi2: float, n_e: float, gap_index: int, plan: PrecisionPlan) -> GapPoint:
    """One N_e point of the scaling study."""
    params = ModelParams(xi1, xi2, n_e, default_dim(xi1, xi2, n_e))
    gap, spectrum = converge_gap(params, gap_index, plan_for_point(plan, xi2, n_e))
    return GapPoint(n_e, gap, spectrum.converged, spectrum.precision_bits, spectrum.dim, gap_index)


@dataclass(frozen=True)
class GapScalingFit:
    """Least-squares exponential decay fit: gap = exp(prefactor_log - delta·n_e)."""

    delta: float
    delta_stderr: float
    prefactor_log: float
    r_squared: float
    points: list

    def n_used(self) -> int:
        return sum(1 for p in self.points if not isinstance(p, GapPoint) or p.converged)


def _as_xy(points) -> tuple[np.ndarray, np.ndarray]:
    xs, ys = [], []
    for p in points:
        if isinstance(p, GapPoint):
            if not p.converged:
                continue
            n_e, gap = p.n_e, p.gap
        else:
            n_e, gap = p
        if not gap > 0:
            raise ValueError(f"gaps must be positive for a log fit; got {gap} at n_e={n_e}")
        xs.append(float(n_e))
        ys.append(float(gmpy2.log(gap)))
    return np.asarray(xs), np.asarray(ys)


def fit_exponential(points) -> GapScalingFit:
    """Ordinary least squares on log(gap) versus n_e.

    Accepts (n_e, gap) pairs or GapPoint records; unconverged records are
    excluded.  delta is minus the slope; the standard error comes from the
    residual variance (zero for a two-point fit).
    """
    x, y = _as_xy(points)
    n = len(x)
    if n < 2:
        raise ValueError(f"need at least two converged points to fit, got {n}")
    xbar, ybar = x.mean(), y.mean()
    sxx = float(np.sum((x - xbar) ** 2))
    if sxx == 0.0:
        raise ValueError("all n_e values coincide; cannot fit a slope")
    slope = float(np.sum((x - xbar) * (y - ybar)) / sxx)
    intercept = ybar - slope * xbar
    residuals = y - (slope * x + intercept)
    ss_res = float(np.sum(residuals**2))
    ss_tot = float(np.sum((y - ybar) ** 2))
    stderr = math.sqrt(ss_res / (n - 2) / sxx) if n > 2 else 0.0
    r2 = 1.0 - ss_res / ss_tot if ss_tot > 0.0 else 1.0
    return GapScalingFit(-slope, stderr, float(intercept), r2, list(points))


def fit_report(fit: GapScalingFit, xi2: float) -> dict:
    """JSON-ready report; gaps as decimal strings since they may underflow doubles."""
    pts = []
    for p in fit.points:
        if isinstance(p, GapPoint):
            pts.append(
                {
                    "n_e": p.n_e,
                    "gap": format_gap(p.gap),
                    "converged": p.converged,
                    "precision_bits": p.precision_bits,
                    "dim": p.dim,
                    "gap_index": p.gap_index,
                }
            )
        else:
            pts.append({"n_e": float(p[0]), "gap": format_gap(p[1]), "converged": True})
    return {
        "delta": fit.delta,
        "delta_stderr": fit.delta_stderr,
        "delta_app": delta_app(xi2),
        "prefactor_log": fit.prefactor_log,
        "r_squared": fit.r_squared,
        "points": pts,
    }


def format_gap(gap) -> str:
    """Decimal string for a gap of either precision."""
    if isinstance(gap, float):
        return format(gap, ".17g")
    return format(gap, ".25g")


def default_ne_grid(lo: float = 0.5, hi: float = 4.0, count: int = 8) -> np.ndarray:
    """Desk-scale default: geometric spacing over half a decade of N_e."""
    return np.geomspace(lo, hi, count)
