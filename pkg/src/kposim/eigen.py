"""Diagonalization in double and arbitrary precision, plus the combined
dimension/precision escalation loop used for tunneling-gap convergence.

Double precision goes through LAPACK (banded or dense Hermitian drivers).
Arbitrary precision runs the cyclic Jacobi iteration from ``_jacobi`` on the
dense-ified banded matrix.  ``converge_gap`` grows basis dimension and
mantissa width together until a tracked adjacent-level gap is stable,
starting from a cheap double-precision pass and escalating only when the
gap sits below the current precision's resolution floor.

All solvers are pure functions of their inputs; distinct diagonalizations
can run concurrently.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import gmpy2
import numpy as np
import scipy.linalg

from ._jacobi import NonConvergenceError, jacobi_eigenvalues
from .model import (
    FockMatrix,
    HermitianMatrix,
    ModelParams,
    build_dense_mp,
    build_hamiltonian,
    build_parity_blocks,
)

__all__ = [
    "Spectrum",
    "PrecisionPlan",
    "NonConvergenceError",
    "diagonalize",
    "diagonalize_mp",
    "converge_gap",
]

DOUBLE_BITS = 53
# a gap is treated as resolved only this far above the solver's error floor
RESOLUTION_GUARD = 1e4


@dataclass(frozen=True)
class Spectrum:
    """Eigensolution tagged with the basis size and precision that produced it.

    energies: ascending; float64 array for double-precision solves, object
              array of mpfr values for arbitrary-precision solves.
    vectors:  column j belongs to energies[j]; None when not computed.
    """

    energies: np.ndarray
    vectors: np.ndarray | None
    dim: int
    precision_bits: int
    converged: bool = True

    def energies_float(self) -> np.ndarray:
        if self.energies.dtype == object:
            return np.array([float(e) for e in self.energies])
        return self.energies


@dataclass(frozen=True)
class PrecisionPlan:
    """Escalation schedule for converge_gap.

    Dimension grows by dim_step and mantissa width by bits_step at each
    escalation; the loop accepts once the tracked gap moves by less than
    gap_rel_tol between consecutive steps.  Gaps only need a few significant
    digits for exponential fits, hence the loose default tolerance.
    """

    initial_bits: int = 128
    max_bits: int = 4096
    bits_step: float = 2.0
    dim_step: float = 1.5
    gap_rel_tol: float = 1e-3

    def __post_init__(self):
        if self.initial_bits < DOUBLE_BITS:
            raise ValueError(f"initial_bits must be >= {DOUBLE_BITS}, got {self.initial_bits}")
        if self.bits_step <= 1 or self.dim_step <= 1:
            raise ValueError("bits_step and dim_step must exceed 1")
        if self.max_bits < self.initial_bits:
            raise ValueError("max_bits must be >= initial_bits")
        if self.gap_rel_tol <= 0:
            raise ValueError("gap_rel_tol must be positive")


def diagonalize(matrix: FockMatrix | HermitianMatrix, want_vectors: bool = False) -> Spectrum:
    """Full double-precision spectrum via LAPACK.

    Banded real-symmetric input uses the banded driver; the complex
    Hermitian (epsilon-perturbed) case goes dense.
    """
    try:
        if isinstance(matrix, FockMatrix):
            if want_vectors:
                w, v = scipy.linalg.eig_banded(matrix.bands_lower(), lower=True)
            else:
                w = scipy.linalg.eig_banded(matrix.bands_lower(), lower=True, eigvals_only=True)
                v = None
        elif isinstance(matrix, HermitianMatrix):
            if want_vectors:
                w, v = scipy.linalg.eigh(matrix.entries)
            else:
                w = scipy.linalg.eigh(matrix.entries, eigvals_only=True)
                v = None
        else:
            raise TypeError(f"cannot diagonalize {type(matrix).__name__}")
    except scipy.linalg.LinAlgError as exc:
        raise NonConvergenceError(f"LAPACK failed to converge: {exc}", dim=matrix.dim) from exc
    return Spectrum(w, v, matrix.dim, DOUBLE_BITS)


def diagonalize_mp(matrix: FockMatrix, bits: int, k_lowest: int | None = None, sweep_cap: int = 60) -> Spectrum:
    """k_lowest smallest eigenvalues by cyclic Jacobi at the given mantissa width.

    The banded matrix is densified and every rotation runs in bits-wide
    floating point; iteration stops once the off-diagonal Frobenius norm is
    below 2^(-bits/2) times the matrix norm.  Eigenvectors are not computed.
    """
    if not isinstance(matrix, FockMatrix):
        raise TypeError("diagonalize_mp expects a real symmetric banded matrix")
    result = jacobi_eigenvalues(matrix.to_dense().tolist(), bits, sweep_cap=sweep_cap)
    eigs = result.eigenvalues
    if k_lowest is not None:
        eigs = eigs[: max(0, k_lowest)]
    return Spectrum(np.array(eigs, dtype=object), None, matrix.dim, bits)


def _fock_matrices(params: ModelParams) -> list[FockMatrix]:
    """The matrices whose merged spectra give the full spectrum.

    With xi1 = 0 parity is conserved and the two tridiagonal blocks are
    solved separately (same spectrum, an eighth of the Jacobi work).
    """
    if params.xi1 == 0.0:
        return list(build_parity_blocks(params))
    return [build_hamiltonian(params)]


def _merged_double(params: ModelParams) -> np.ndarray:
    parts = [diagonalize(m).energies for m in _fock_matrices(params)]
    return np.sort(np.concatenate(parts)) if len(parts) > 1 else parts[0]


def _merged_mp(params: ModelParams, bits: int) -> list:
    # the operator is reconstructed at working precision: double-built entries
    # would floor every doublet splitting at ~1e-16 of the local energy scale
    parts = []
    parities = (0, 1) if params.xi1 == 0.0 else (None,)
    for parity in parities:
        rows = build_dense_mp(params, bits, parity=parity)
        parts.extend(jacobi_eigenvalues(rows, bits).eigenvalues)
    return sorted(parts)


def _fro_norm(params: ModelParams) -> float:
    h = build_hamiltonian(params)
    return math.sqrt(
        float(np.sum(h.diagonal**2) + 2 * np.sum(h.band1**2) + 2 * np.sum(h.band2**2))
    )


def converge_gap(params: ModelParams, gap_index: int, plan: PrecisionPlan | None = None):
    """Adjacent gap E_{j+1} - E_j, converged in dimension and precision together.

    Protocol: solve in double precision at the requested dimension and again
    at dim_step times it; if the gap clears the double-precision error floor
    and the two values agree to gap_rel_tol, that is the answer.  Otherwise
    escalate, multiplying mantissa width by bits_step and dimension by
    dim_step each round, until two consecutive resolved values agree.  When
    max_bits is hit first, the last result is returned flagged unconverged
    rather than raised, so sweeps can carry partial results.

    Returns (gap, Spectrum); the gap is a float from the double path or an
    mpfr from the arbitrary-precision path.
    """
    if plan is None:
        plan = PrecisionPlan()
    if gap_index < 0:
        raise ValueError(f"gap_index must be non-negative, got {gap_index}")
    if gap_index + 2 > params.dim:
        raise ValueError(f"gap_index {gap_index} needs at least {gap_index + 2} basis states")
    tol = plan.gap_rel_tol

    # double-precision passes: dim, then dim * dim_step
    dims = [params.dim, max(params.dim + 1, int(math.ceil(params.dim * plan.dim_step)))]
    gaps, scales, energies = [], [], None
    for d in dims:
        w = _merged_double(params.with_dim(d))
        gaps.append(float(w[gap_index + 1] - w[gap_index]))
        scales.append(float(np.max(np.abs(w))))
        energies = w
    floor = RESOLUTION_GUARD * np.finfo(float).eps * max(scales)
    if gaps[1] > floor and abs(gaps[1] - gaps[0]) <= tol * abs(gaps[1]):
        return gaps[1], Spectrum(energies, None, dims[1], DOUBLE_BITS, True)

    # arbitrary-precision escalation; resolution floor follows the Jacobi
    # termination threshold 2^(-bits/2) ||H||_F
    bits = plan.initial_bits
    prev_gap = gaps[1]
    prev_resolved = gaps[1] > floor
    # precision was the blocker: re-solve the same dimension at higher bits;
    # dimension was the blocker: keep growing it
    dim = dims[1] if not prev_resolved else max(dims[1] + 1, int(math.ceil(dims[1] * plan.dim_step)))
    last = (gaps[1], Spectrum(energies, None, dims[1], DOUBLE_BITS, False))
    while True:
        p = params.with_dim(dim)
        w = _merged_mp(p, bits)
        with gmpy2.context(precision=bits):
            gap = w[gap_index + 1] - w[gap_index]
            resolved = abs(gap) > RESOLUTION_GUARD * gmpy2.mpfr(2) ** (-(bits // 2)) * _fro_norm(p)
            stable = resolved and prev_resolved and abs(gap - prev_gap) <= tol * abs(gap)
        spectrum = Spectrum(np.array(w, dtype=object), None, dim, bits, False)
        if stable:
            return gap, replace(spectrum, converged=True)
        last = (gap, spectrum)
        prev_gap, prev_resolved = gap, resolved
        next_bits = int(round(bits * plan.bits_step))
        if next_bits > plan.max_bits:
            return last
        bits = next_bits
        dim = max(dim + 1, int(math.ceil(dim * plan.dim_step)))
