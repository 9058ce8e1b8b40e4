"""Fock-basis operator construction for the squeeze-driven Kerr parametric
oscillator.

The Hamiltonian, in units of the Kerr energy scale,

    H = n(n-1)/N_e  -  xi2 (a†² + a²)  +  xi1 √N_e (a† + a) ,

is a real symmetric matrix with bandwidth 2 in the Fock basis |0>..|dim-1>.
N_e is the classicality parameter: energies scale linearly with it and the
effective Planck constant is 1/N_e.  All builders are pure functions and the
returned matrices are immutable (read-only arrays), so they can be shared
freely across workers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "ModelParams",
    "FockMatrix",
    "HermitianMatrix",
    "QuadratureMatrices",
    "ParityViolationError",
    "build_hamiltonian",
    "build_parity_blocks",
    "build_quadratures",
    "build_perturbed",
    "default_dim",
    "default_epsilon",
]

TRUNCATION_FACTOR = 8
MIN_DIM = 64


class ParityViolationError(ValueError):
    """Raised when a parity-conserving operation is requested with xi1 != 0."""


def default_dim(xi1: float, xi2: float, n_e: float) -> int:
    """Default Fock truncation for the given drives.

    The relevant states sit near occupation |xi2| N_e (the classical wells),
    shifted by the one-photon tilt; several coherent-state widths of headroom
    are kept on top.
    """
    occ = abs(xi2) * n_e + abs(xi1) * math.sqrt(n_e)
    return max(MIN_DIM, int(math.ceil(TRUNCATION_FACTOR * max(1.0, occ))))


def default_epsilon(xi2: float, n_e: float) -> float:
    """Default symmetry-breaking amplitude for doublet localization.

    Far below the well depth xi2² N_e but far above double-precision noise on
    the quasi-degenerate doublet, so it picks localized combinations without
    shifting energies measurably.
    """
    return 1e-8 * max(1.0, xi2 * xi2 * n_e)


def _readonly(a: np.ndarray) -> np.ndarray:
    a.flags.writeable = False
    return a


@dataclass(frozen=True)
class ModelParams:
    """Physical configuration of one simulation.

    xi1, xi2 : dimensionless one- and two-photon drive amplitudes
    n_e      : classicality parameter, positive real
    dim      : Fock-basis truncation (states |0>..|dim-1>)
    epsilon  : symmetry-breaking amplitude of the localization term
               epsilon*(Q + P); 0 when unused

    Eigenvalues produced from these parameters are in Kerr-energy units; the
    classical-limit normalization divides by a further N_e.
    """

    xi1: float
    xi2: float
    n_e: float
    dim: int
    epsilon: float = 0.0

    def __post_init__(self):
        for name in ("xi1", "xi2", "n_e", "epsilon"):
            v = getattr(self, name)
            if not math.isfinite(v):
                raise ValueError(f"{name} must be finite, got {v!r}")
        if self.n_e <= 0:
            raise ValueError(f"n_e must be positive, got {self.n_e}")
        if self.dim < 3:
            raise ValueError(f"dim must be at least 3, got {self.dim}")
        if self.epsilon < 0:
            raise ValueError(f"epsilon must be non-negative, got {self.epsilon}")

    def with_dim(self, dim: int) -> "ModelParams":
        return ModelParams(self.xi1, self.xi2, self.n_e, dim, self.epsilon)


@dataclass(frozen=True)
class FockMatrix:
    """Real symmetric matrix with bandwidth 2 in the Fock basis.

    diagonal[n] couples |n> to itself, band1[n] couples |n> and |n+1>,
    band2[n] couples |n> and |n+2>.  Everything beyond the second
    off-diagonal is exactly zero.
    """

    dim: int
    diagonal: np.ndarray
    band1: np.ndarray
    band2: np.ndarray

    def to_dense(self) -> np.ndarray:
        m = np.diag(self.diagonal).astype(float)
        if self.dim > 1:
            m += np.diag(self.band1, 1) + np.diag(self.band1, -1)
        if self.dim > 2:
            m += np.diag(self.band2, 2) + np.diag(self.band2, -2)
        return m

    def bands_lower(self) -> np.ndarray:
        """(3, dim) band storage, row k = k-th subdiagonal (LAPACK lower form)."""
        a = np.zeros((3, self.dim))
        a[0] = self.diagonal
        a[1, : self.dim - 1] = self.band1
        a[2, : self.dim - 2] = self.band2
        return a


@dataclass(frozen=True)
class HermitianMatrix:
    """Dense complex Hermitian matrix (used for the epsilon-perturbed case)."""

    dim: int
    entries: np.ndarray


@dataclass(frozen=True)
class QuadratureMatrices:
    """Coordinate and momentum operators Q = (a†+a)/√(2N_e), P = i(a†-a)/√(2N_e).

    q_matrix is real symmetric with entries only on the first off-diagonals;
    p_matrix is complex Hermitian and purely imaginary.  On the truncated
    basis, [Q, P] = (i/N_e)·Id except at the truncation edge.
    """

    dim: int
    n_e: float
    q_matrix: np.ndarray
    p_matrix: np.ndarray


def build_hamiltonian(params: ModelParams) -> FockMatrix:
    """Hamiltonian matrix in Kerr-energy units.

    diagonal[n] = n(n-1)/N_e
    band1[n]    = xi1 √N_e √(n+1)          (from a† + a)
    band2[n]    = -xi2 √((n+1)(n+2))       (from a†² + a²)
    """
    dim = params.dim
    n = np.arange(dim, dtype=float)
    diagonal = n * (n - 1.0) / params.n_e + 0.0  # + 0.0 normalizes -0.0 at n = 0
    band1 = params.xi1 * math.sqrt(params.n_e) * np.sqrt(n[: dim - 1] + 1.0)
    band2 = -params.xi2 * np.sqrt((n[: dim - 2] + 1.0) * (n[: dim - 2] + 2.0))
    return FockMatrix(dim, _readonly(diagonal), _readonly(band1), _readonly(band2))


def build_parity_blocks(params: ModelParams) -> tuple[FockMatrix, FockMatrix]:
    """Split the xi1 = 0 Hamiltonian into its even and odd parity blocks.

    The parity operator exp(iπ a†a) commutes with H only when the one-photon
    drive vanishes; the even block acts on |0>,|2>,..., the odd block on
    |1>,|3>,....  Each block is tridiagonal: the two-photon coupling becomes
    the block's first off-diagonal.  The union of the two block spectra is
    the full spectrum.
    """
    if params.xi1 != 0.0:
        raise ParityViolationError(
            f"parity blocks require xi1 = 0 (one-photon drive breaks parity); got xi1 = {params.xi1}"
        )
    blocks = []
    for start in (0, 1):
        idx = np.arange(start, params.dim, 2, dtype=float)
        diag = idx * (idx - 1.0) / params.n_e + 0.0
        off = -params.xi2 * np.sqrt((idx[:-1] + 1.0) * (idx[:-1] + 2.0))
        blocks.append(
            FockMatrix(
                len(idx),
                _readonly(diag),
                _readonly(off),
                _readonly(np.zeros(max(0, len(idx) - 2))),
            )
        )
    return blocks[0], blocks[1]


def build_quadratures(params: ModelParams) -> QuadratureMatrices:
    """Q and P matrices on the truncated basis.

    <n+1|Q|n> = √((n+1)/(2N_e)),  <n+1|P|n> = i √((n+1)/(2N_e)).
    """
    dim = params.dim
    s = np.sqrt((np.arange(dim - 1) + 1.0) / (2.0 * params.n_e))
    q = np.diag(s, 1) + np.diag(s, -1)
    p = 1j * (np.diag(s, -1) - np.diag(s, 1))
    return QuadratureMatrices(dim, params.n_e, _readonly(q), _readonly(p))


def build_dense_mp(params: ModelParams, bits: int, parity: int | None = None) -> list:
    """Dense Hamiltonian rows with entries computed in bits-wide MPFR.

    Entries built in double precision carry ~1e-16 relative rounding, which
    caps resolvable doublet splittings near eps times the local energy scale
    no matter how precise the eigensolver is.  High-precision runs must
    therefore reconstruct the operator itself at working precision.

    parity selects the even (0) or odd (1) tridiagonal block; None gives the
    full bandwidth-2 matrix.  Requires xi1 = 0 when a parity block is asked.
    """
    import gmpy2
    from gmpy2 import mpfr

    if parity is not None and params.xi1 != 0.0:
        raise ParityViolationError("parity blocks require xi1 = 0")
    with gmpy2.context(precision=bits):
        n_e = mpfr(params.n_e)
        xi1 = mpfr(params.xi1)
        xi2 = mpfr(params.xi2)
        if parity is None:
            idx = list(range(params.dim))
            step = 1
        else:
            idx = list(range(parity, params.dim, 2))
            step = 2
        m = len(idx)
        rows = [[mpfr(0) for _ in range(m)] for _ in range(m)]
        sqrt_ne = gmpy2.sqrt(n_e)
        for k, n in enumerate(idx):
            rows[k][k] = mpfr(n) * mpfr(n - 1) / n_e
            if step == 1 and k + 1 < m:
                b1 = xi1 * sqrt_ne * gmpy2.sqrt(mpfr(n + 1))
                rows[k][k + 1] = b1
                rows[k + 1][k] = b1
            two_step = k + (1 if step == 2 else 2)
            if two_step < m:
                b2 = -xi2 * gmpy2.sqrt(mpfr((n + 1) * (n + 2)))
                rows[k][two_step] = b2
                rows[two_step][k] = b2
        return rows


def build_perturbed(params: ModelParams) -> HermitianMatrix:
    """H + epsilon·(Q + P) as a dense complex Hermitian matrix.

    The perturbation must mix Q and P: either operator alone breaks parity
    only partially and leaves one doublet orientation degenerate.  P has
    imaginary matrix elements, so the result is genuinely complex.
    """
    if params.epsilon <= 0.0:
        raise ValueError(
            "build_perturbed requires epsilon > 0; use the real banded Hamiltonian when no localization term is wanted"
        )
    quads = build_quadratures(params)
    h = build_hamiltonian(params).to_dense().astype(complex)
    h += params.epsilon * (quads.q_matrix + quads.p_matrix)
    return HermitianMatrix(params.dim, _readonly(h))
