"""Cyclic Jacobi eigenvalue iteration in arbitrary-precision floating point.

The rotations are carried out entirely in MPFR arithmetic at a caller-chosen
mantissa width (gmpy2), which is what makes tunneling gaps far below the
double-precision floor computable.  Jacobi is used despite its O(dim³)
per-sweep cost because it is unconditionally stable, trivially correct in
high precision, and the basis dimensions stay modest (< ~1000).

Implementation notes: only the upper triangle is stored and updated
(Rutishauser's scheme, half the arithmetic of a full-matrix update), and the
first sweeps rotate only elements above a decaying threshold, which is the
classical trick to cut the total rotation count.  Eigenvalues only: no
caller needs arbitrary-precision eigenvectors, and skipping the rotation
accumulation halves the work again.
"""

from __future__ import annotations

import gmpy2
from gmpy2 import mpfr

__all__ = ["JacobiResult", "NonConvergenceError", "jacobi_eigenvalues"]

DEFAULT_SWEEP_CAP = 60
EARLY_SWEEPS = 4  # sweeps that use the decaying rotation threshold


class NonConvergenceError(RuntimeError):
    """Eigensolver failed to reach its convergence target.

    Carries iteration diagnostics in ``details``.
    """

    def __init__(self, message: str, **details):
        super().__init__(message)
        self.details = details


class JacobiResult:
    """Sorted eigenvalues plus iteration diagnostics."""

    __slots__ = ("eigenvalues", "sweeps", "off_norm", "threshold", "bits")

    def __init__(self, eigenvalues, sweeps, off_norm, threshold, bits):
        self.eigenvalues = eigenvalues
        self.sweeps = sweeps
        self.off_norm = off_norm
        self.threshold = threshold
        self.bits = bits


def jacobi_eigenvalues(rows, bits: int, sweep_cap: int = DEFAULT_SWEEP_CAP) -> JacobiResult:
    """Diagonalize a real symmetric matrix with cyclic Jacobi rotations.

    rows: square matrix as a sequence of row sequences (floats or mpfr).
    bits: MPFR mantissa width; every rotation runs at this precision.

    Iterates row-cyclic sweeps until the off-diagonal Frobenius norm drops
    below 2^(-bits/2) times the Frobenius norm of the input, then returns
    the diagonal, sorted ascending.  Raises NonConvergenceError past
    sweep_cap sweeps (with the final off-norm in the diagnostics).
    """
    if bits < 53:
        raise ValueError(f"bits must be at least 53, got {bits}")
    n = len(rows)
    with gmpy2.context(precision=bits):
        # upper triangle incl. diagonal; a[p] holds row p entries p..n-1
        a = []
        for p, row in enumerate(rows):
            if len(row) != n:
                raise ValueError("matrix must be square")
            a.append([mpfr(x) for x in row[p:]])

        def off2_now():
            tot = mpfr(0)
            for p in range(n - 1):
                ap = a[p]
                for k in range(1, n - p):
                    x = ap[k]
                    tot += x * x
            return tot

        off2 = off2_now()
        fro2 = off2 * 2
        for p in range(n):
            d = a[p][0]
            fro2 += d * d
        # target: off_F <= 2^(-bits/2) * ||A||_F, compared in squares
        thresh2 = fro2 * (mpfr(2) ** (-bits))
        # elements below this can never matter: even with every off-diagonal
        # entry at skip2, off² stays under the target
        skip2 = thresh2 / (n * n + 1)
        one = mpfr(1)
        sweeps = 0
        while 2 * off2 > thresh2:
            if sweeps >= sweep_cap:
                raise NonConvergenceError(
                    f"Jacobi sweep cap ({sweep_cap}) exceeded at {bits} bits",
                    sweeps=sweeps,
                    off_norm=float(gmpy2.sqrt(2 * off2)),
                    threshold=float(gmpy2.sqrt(thresh2)),
                    dim=n,
                    bits=bits,
                )
            # early sweeps only rotate the heavy hitters
            if sweeps < EARLY_SWEEPS:
                gate2 = off2 / (5 * n * n)
                if gate2 < skip2:
                    gate2 = skip2
            else:
                gate2 = skip2
            for p in range(n - 1):
                ap = a[p]
                for q in range(p + 1, n):
                    apq = ap[q - p]
                    if apq * apq <= gate2:
                        continue
                    aq = a[q]
                    theta = (aq[0] - ap[0]) / (2 * apq)
                    t = one / (abs(theta) + gmpy2.sqrt(one + theta * theta))
                    if theta < 0:
                        t = -t
                    c = one / gmpy2.sqrt(one + t * t)
                    s = t * c
                    tau = s / (one + c)
                    # diagonal and pivot
                    h = t * apq
                    ap[0] = ap[0] - h
                    aq[0] = aq[0] + h
                    ap[q - p] = mpfr(0)
                    # j < p: pairs (j,p), (j,q)
                    for j in range(p):
                        aj = a[j]
                        g = aj[p - j]
                        hh = aj[q - j]
                        aj[p - j] = g - s * (hh + g * tau)
                        aj[q - j] = hh + s * (g - hh * tau)
                    # p < j < q: pairs (p,j), (j,q)
                    for j in range(p + 1, q):
                        aj = a[j]
                        g = ap[j - p]
                        hh = aj[q - j]
                        ap[j - p] = g - s * (hh + g * tau)
                        aj[q - j] = hh + s * (g - hh * tau)
                    # j > q: pairs (p,j), (q,j)
                    for j in range(q + 1, n):
                        g = ap[j - p]
                        hh = aq[j - q]
                        ap[j - p] = g - s * (hh + g * tau)
                        aq[j - q] = hh + s * (g - hh * tau)
            sweeps += 1
            off2 = off2_now()
        eigenvalues = sorted(a[p][0] for p in range(n))
        return JacobiResult(
            eigenvalues,
            sweeps,
            gmpy2.sqrt(2 * off2),
            gmpy2.sqrt(thresh2),
            bits,
        )
