"""Expectation values, adjacent-level gaps, level density, parameter sweeps.

Eigenvectors of the real banded Hamiltonian are real, so <P> vanishes
identically for them (P is purely imaginary antisymmetric); nonzero momentum
expectations exist only for the epsilon-localized doublet states, which come
from the complex Hermitian perturbed matrix.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .eigen import Spectrum, diagonalize
from .model import (
    ModelParams,
    QuadratureMatrices,
    build_hamiltonian,
    build_perturbed,
    build_quadratures,
    default_dim,
    default_epsilon,
)

__all__ = [
    "ExpectationRecord",
    "GapRecord",
    "DensityResult",
    "SweepPoint",
    "SweepResult",
    "expectations",
    "localize_doublet",
    "adjacent_gaps",
    "pair_doublets",
    "gap_dip_energy",
    "level_density",
    "sweep",
]

SWEEP_AXES = ("xi1", "xi2", "n_e")


@dataclass(frozen=True)
class ExpectationRecord:
    state_index: int
    energy: float
    q_mean: float
    p_mean: float


@dataclass(frozen=True)
class GapRecord:
    j: int
    energy: float
    gap: float


def expectations(spectrum: Spectrum, quads: QuadratureMatrices, indices=None) -> list[ExpectationRecord]:
    """<Q> and <P> for the selected eigenstates.

    Strictly real eigenvectors get p_mean exactly 0 rather than a rounding
    residue of v·(iM)·v.
    """
    if spectrum.vectors is None:
        raise ValueError("spectrum carries no eigenvectors; diagonalize with want_vectors=True")
    if spectrum.vectors.shape[0] != quads.dim:
        raise ValueError(
            f"dimension mismatch: vectors are {spectrum.vectors.shape[0]}-dimensional, quadratures {quads.dim}"
        )
    if indices is None:
        indices = range(spectrum.vectors.shape[1])
    is_real = not np.iscomplexobj(spectrum.vectors)
    out = []
    for j in sorted(indices):
        v = spectrum.vectors[:, j]
        if is_real:
            q_mean = float(v @ (quads.q_matrix @ v))
            p_mean = 0.0
        else:
            q_mean = float(np.real(np.vdot(v, quads.q_matrix @ v)))
            p_mean = float(np.real(np.vdot(v, quads.p_matrix @ v)))
        out.append(ExpectationRecord(int(j), float(spectrum.energies[j]), q_mean, p_mean))
    return out


def localize_doublet(params: ModelParams) -> tuple[ExpectationRecord, ExpectationRecord]:
    """The two lowest states of H + eps(Q + P), localized one per well.

    Uses params.epsilon when set, otherwise the default (far below the well
    depth, far above the degenerate doublet's numerical noise).  Energies
    shift from the unperturbed ones only at O(eps * well width).
    """
    eps = params.epsilon if params.epsilon > 0.0 else default_epsilon(params.xi2, params.n_e)
    p = ModelParams(params.xi1, params.xi2, params.n_e, params.dim, eps)
    spectrum = diagonalize(build_perturbed(p), want_vectors=True)
    rec0, rec1 = expectations(spectrum, build_quadratures(p), indices=(0, 1))
    return rec0, rec1


def adjacent_gaps(spectrum: Spectrum | np.ndarray) -> list[GapRecord]:
    """Gaps E_{j+1} - E_j paired with E_j, for all consecutive levels."""
    energies = spectrum.energies if isinstance(spectrum, Spectrum) else np.asarray(spectrum)
    if len(energies) < 2:
        raise ValueError("need at least two eigenvalues to form gaps")
    return [
        GapRecord(j, float(energies[j]), float(energies[j + 1] - energies[j]))
        for j in range(len(energies) - 1)
    ]


def pair_doublets(gaps: list[GapRecord], ratio: float = 1e-3) -> list[tuple[int, int]]:
    """Indices (j, j+1) of quasi-degenerate doublets.

    States j, j+1 form a doublet when their gap is below ratio times the
    following gap; true doublet gaps sit many orders below their neighbors.
    """
    pairs = []
    for k in range(len(gaps) - 1):
        if gaps[k].gap < ratio * gaps[k + 1].gap:
            pairs.append((gaps[k].j, gaps[k].j + 1))
    return pairs


def gap_dip_energy(gaps: list[GapRecord], drop_ratio: float = 0.2) -> tuple[float, float]:
    """Location (energy, gap) of the non-doublet gap minimum.

    Gaps that are small against both neighbors belong to the closing doublet
    branch and are discarded; the minimum of what remains marks the
    level-clustering dip at the separatrix energy.
    """
    kept = []
    for k, rec in enumerate(gaps):
        neighbors = []
        if k > 0:
            neighbors.append(gaps[k - 1].gap)
        if k + 1 < len(gaps):
            neighbors.append(gaps[k + 1].gap)
        if not neighbors or rec.gap >= drop_ratio * min(neighbors):
            kept.append(rec)
    if not kept:
        raise ValueError("no gaps left after doublet filtering")
    best = min(kept, key=lambda r: r.gap)
    return best.energy, best.gap


@dataclass(frozen=True)
class DensityResult:
    grid: np.ndarray
    density: np.ndarray
    bandwidths: np.ndarray  # per-level kernel widths actually used

    def peak_energy(self) -> float:
        return float(self.grid[int(np.argmax(self.density))])

    def bandwidth_at(self, energy: float, levels: np.ndarray) -> float:
        return float(self.bandwidths[int(np.argmin(np.abs(levels - energy)))])


def level_density(spectrum: Spectrum | np.ndarray, window: float | None = None, samples: int = 1024) -> DensityResult:
    """Smoothed level density rho(E) from a Gaussian kernel per level.

    window is the kernel width; when omitted, each level gets an adaptive
    width of 3 times its local mean spacing (5 neighbors to each side),
    which sharpens the separatrix peak where levels cluster.
    """
    energies = spectrum.energies if isinstance(spectrum, Spectrum) else np.asarray(spectrum)
    energies = np.sort(np.asarray(energies, dtype=float))
    if len(energies) < 2:
        raise ValueError("need at least two levels for a density estimate")
    if window is not None:
        if not (window > 0.0):
            raise ValueError(f"smoothing window must be positive, got {window}")
        widths = np.full(len(energies), float(window))
    else:
        k = 5
        widths = np.empty(len(energies))
        for j in range(len(energies)):
            lo = max(0, j - k)
            hi = min(len(energies) - 1, j + k)
            widths[j] = 3.0 * (energies[hi] - energies[lo]) / max(1, hi - lo)
        tiny = 1e-12 * max(1.0, float(energies[-1] - energies[0]))
        widths = np.maximum(widths, tiny)
    grid = np.linspace(energies[0] - 3 * widths[0], energies[-1] + 3 * widths[-1], samples)
    density = np.zeros_like(grid)
    norm = 1.0 / math.sqrt(2.0 * math.pi)
    for e, w in zip(energies, widths):
        density += norm / w * np.exp(-0.5 * ((grid - e) / w) ** 2)
    return DensityResult(grid, density, widths)


# ---------------------------------------------------------------------------
# parameter sweeps


@dataclass(frozen=True)
class SweepPoint:
    axis_value: float
    ok: bool
    error: str | None = None
    energies: np.ndarray | None = None
    expect: list[ExpectationRecord] | None = None
    gaps: list[GapRecord] | None = None


@dataclass(frozen=True)
class SweepResult:
    axis: str
    dim: int
    outputs: tuple[str, ...]
    points: list[SweepPoint]


def _at(template: ModelParams, axis: str, value: float, dim: int) -> ModelParams:
    kw = {"xi1": template.xi1, "xi2": template.xi2, "n_e": template.n_e, "epsilon": template.epsilon}
    kw[axis] = value
    return ModelParams(kw["xi1"], kw["xi2"], kw["n_e"], dim, kw["epsilon"])


def sweep_dim(template: ModelParams, axis: str, grid) -> int:
    """Shared truncation for a sweep: fixed at the max over the grid endpoints
    so curves are comparable across the whole sweep (no truncation kinks)."""
    dims = [template.dim]
    for value in (grid[0], grid[-1]):
        try:
            p = _at(template, axis, float(value), template.dim)
        except ValueError:
            continue  # invalid endpoint: that point will be marked failed
        dims.append(default_dim(p.xi1, p.xi2, p.n_e))
    return max(dims)


def compute_point(
    template: ModelParams,
    axis: str,
    value: float,
    dim: int,
    outputs: tuple[str, ...],
    k_levels: int,
    states: tuple[int, ...],
    localize: bool,
) -> SweepPoint:
    """One sweep point; failures are captured in the point, not raised."""
    try:
        params = _at(template, axis, float(value), dim)
        want_vectors = "expectations" in outputs and not localize
        spectrum = diagonalize(build_hamiltonian(params), want_vectors=want_vectors)
        k = min(k_levels, len(spectrum.energies))
        energies = spectrum.energies[:k].copy() if "spectrum" in outputs else None
        expect = None
        if "expectations" in outputs:
            if localize:
                expect = list(localize_doublet(params))
            else:
                expect = expectations(spectrum, build_quadratures(params), indices=states)
        gaps = None
        if "gaps" in outputs:
            gaps = adjacent_gaps(spectrum.energies[:k])
        return SweepPoint(float(value), True, None, energies, expect, gaps)
    except Exception as exc:  # noqa: BLE001 - per-point failures must not kill the sweep
        return SweepPoint(float(value), False, f"{type(exc).__name__}: {exc}")


def sweep(
    template: ModelParams,
    axis: str,
    grid,
    outputs=("spectrum",),
    k_levels: int = 20,
    states: tuple[int, ...] = (0, 1),
    localize: bool = False,
) -> SweepResult:
    """Evaluate the requested quantities on every grid point of one axis.

    The truncation is chosen once for the whole sweep (grid extremum rule).
    Failed points are marked and carried through rather than aborting the
    sweep.  Points are independent; this reference implementation runs them
    sequentially, the CLI owns the worker pool.
    """
    if axis not in SWEEP_AXES:
        raise ValueError(f"axis must be one of {SWEEP_AXES}, got {axis!r}")
    grid = np.asarray(grid, dtype=float)
    if grid.size == 0:
        raise ValueError("sweep grid is empty")
    if grid.size > 1:
        steps = np.diff(grid)
        if not (np.all(steps > 0) or np.all(steps < 0)):
            raise ValueError("sweep grid must be monotone")
    bad = [o for o in outputs if o not in ("spectrum", "expectations", "gaps")]
    if bad:
        raise ValueError(f"unknown sweep outputs: {bad}")
    dim = sweep_dim(template, axis, grid)
    points = [
        compute_point(template, axis, v, dim, tuple(outputs), k_levels, tuple(states), localize)
        for v in grid
    ]
    return SweepResult(axis, dim, tuple(outputs), points)
