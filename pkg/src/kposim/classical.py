"""Classical-limit energy surface: stationary points, separatrix, contours.

The classical Hamiltonian (energies per unit of N_e times the Kerr scale) is

    h(q, p) = (q² + p²)²/4 - xi2 (q² - p²) + √2 xi1 q .

It is always invariant under p -> -p; the q -> -q reflection survives only
at xi1 = 0.  Stationarity in p gives either p = 0 or the circle
q² + p² = -2 xi2 (which exists only for xi2 < 0); on the p = 0 branch the
stationary q values are roots of the real cubic q³ - 2 xi2 q + √2 xi1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "PhasePoint",
    "ClassicalExtremum",
    "Contour",
    "ContourSet",
    "NoSaddleError",
    "h_class",
    "h_gradient",
    "h_hessian",
    "find_extrema",
    "separatrix_energy",
    "contours",
    "default_grid",
]

GRADIENT_TOL = 1e-10
DEFAULT_RESOLUTION = 512


class NoSaddleError(ValueError):
    """No saddle point exists for these drives (single-well regime)."""


@dataclass(frozen=True)
class PhasePoint:
    q: float
    p: float
    energy: float


@dataclass(frozen=True)
class ClassicalExtremum:
    """Stationary point with its Hessian classification.

    degenerate marks the quartic xi1 = xi2 = 0 case where the Hessian
    vanishes identically and the origin is a minimum of the pure quartic.
    """

    point: PhasePoint
    kind: str  # "minimum" | "maximum" | "saddle"
    hessian_eigenvalues: tuple[float, float]
    degenerate: bool = False


def h_class(q, p, xi1: float, xi2: float):
    """Energy surface value(s); accepts scalars or arrays."""
    q = np.asarray(q, dtype=float)
    p = np.asarray(p, dtype=float)
    q2, p2 = q * q, p * p
    out = 0.25 * (q2 + p2) ** 2 - xi2 * (q2 - p2) + math.sqrt(2.0) * xi1 * q
    return float(out) if out.ndim == 0 else out


def h_gradient(q, p, xi1: float, xi2: float):
    q = np.asarray(q, dtype=float)
    p = np.asarray(p, dtype=float)
    r2 = q * q + p * p
    dq = q * r2 - 2.0 * xi2 * q + math.sqrt(2.0) * xi1
    dp = p * r2 + 2.0 * xi2 * p
    if dq.ndim == 0:
        return float(dq), float(dp)
    return dq, dp


def h_hessian(q: float, p: float, xi1: float, xi2: float) -> np.ndarray:
    return np.array(
        [
            [3.0 * q * q + p * p - 2.0 * xi2, 2.0 * q * p],
            [2.0 * q * p, q * q + 3.0 * p * p + 2.0 * xi2],
        ]
    )


def _stationary_cubic_roots(xi1: float, xi2: float) -> list[float]:
    """Real roots of q³ + b q + c with b = -2 xi2, c = √2 xi1.

    Closed-form discriminant casework (no iterative seeds), then a couple of
    Newton polishing steps to push each root to full double accuracy.
    """
    b = -2.0 * xi2
    c = math.sqrt(2.0) * xi1
    if c == 0.0:
        roots = [0.0]
        if xi2 > 0.0:
            roots += [math.sqrt(2.0 * xi2), -math.sqrt(2.0 * xi2)]
        return roots
    if b == 0.0:
        roots = [math.copysign(abs(c) ** (1.0 / 3.0), -c)]
    else:
        disc = -4.0 * b**3 - 27.0 * c**2
        if disc > 0.0:
            # three distinct real roots (possible only for b < 0, i.e. xi2 > 0)
            m = 2.0 * math.sqrt(-b / 3.0)
            acos_arg = min(1.0, max(-1.0, 3.0 * c / (b * m)))
            phi = math.acos(acos_arg)
            roots = [m * math.cos((phi - 2.0 * math.pi * k) / 3.0) for k in range(3)]
        else:
            # one real root (Cardano, written to avoid cancellation)
            u = math.sqrt(-disc / 108.0)
            s = -c / 2.0 + math.copysign(u, -c)
            t = math.copysign(abs(s) ** (1.0 / 3.0), s)
            roots = [t + (-b / 3.0) / t if t != 0.0 else 0.0]
    polished = []
    for q in roots:
        for _ in range(3):
            f = q * q * q + b * q + c
            df = 3.0 * q * q + b
            if df != 0.0:
                q -= f / df
        polished.append(q)
    return polished


def _classify(q: float, p: float, xi1: float, xi2: float) -> ClassicalExtremum:
    hess = h_hessian(q, p, xi1, xi2)
    ev = np.linalg.eigvalsh(hess)
    scale = max(1.0, abs(ev[0]), abs(ev[1]))
    degenerate = bool(np.all(np.abs(ev) <= 1e-12 * scale))
    if degenerate:
        kind = "minimum"  # pure quartic at the origin
    elif ev[0] > 0.0:
        kind = "minimum"
    elif ev[1] < 0.0:
        kind = "maximum"
    else:
        kind = "saddle"
    return ClassicalExtremum(
        PhasePoint(q, p, h_class(q, p, xi1, xi2)),
        kind,
        (float(ev[0]), float(ev[1])),
        degenerate,
    )


def find_extrema(xi1: float, xi2: float) -> list[ClassicalExtremum]:
    """All real stationary points of the energy surface, classified.

    Branches that have no real solution are simply absent from the result.
    Ordered by energy, then q, then p, for deterministic output.
    """
    if xi1 == 0.0 and xi2 == 0.0:
        return [_classify(0.0, 0.0, xi1, xi2)]
    found: list[ClassicalExtremum] = []
    for q in _stationary_cubic_roots(xi1, xi2):
        found.append(_classify(q, 0.0, xi1, xi2))
    if xi2 < 0.0:
        qc = xi1 / (2.0 * math.sqrt(2.0) * xi2)
        pc2 = -2.0 * xi2 - qc * qc
        if pc2 > 0.0:
            pc = math.sqrt(pc2)
            found.append(_classify(qc, pc, xi1, xi2))
            found.append(_classify(qc, -pc, xi1, xi2))
    found.sort(key=lambda e: (e.point.energy, e.point.q, e.point.p))
    return found


def separatrix_energy(xi1: float, xi2: float) -> float:
    """Energy of the saddle point dividing the two classical wells.

    Zero whenever xi1 = 0 (the saddle sits at the origin).  Raises
    NoSaddleError in the single-well regime.
    """
    saddles = [e for e in find_extrema(xi1, xi2) if e.kind == "saddle"]
    if not saddles:
        raise NoSaddleError(f"no saddle point for xi1={xi1}, xi2={xi2} (single-well regime)")
    return saddles[0].point.energy


# ---------------------------------------------------------------------------
# iso-contour extraction (marching squares)


@dataclass(frozen=True)
class Contour:
    """One polyline of an iso-energy set.

    points:   (m, 2) array of (q, p) vertices.
    closed:   the polyline is a loop (first and last vertex coincide).
    encloses: indices into the find_extrema(xi1, xi2) list of the stationary
              points lying inside a closed curve; empty for open curves.
    """

    points: np.ndarray
    closed: bool
    encloses: tuple[int, ...]


@dataclass(frozen=True)
class ContourSet:
    energy: float
    curves: list[Contour]


def default_grid(xi2: float) -> tuple[tuple[float, float], tuple[float, float], int]:
    """Symmetric phase-space window covering all extrema with margin."""
    span = 1.5 * math.sqrt(2.0 * abs(xi2) + 2.0)
    return ((-span, span), (-span, span), DEFAULT_RESOLUTION)


# segment table: case index -> list of (edge, edge) pairs; edges are
# 'b'ottom, 'r'ight, 't'op, 'l'eft of the cell; saddle cases 5 and 10 are
# resolved at runtime with the cell-center value
_SEGMENTS = {
    0: [],
    1: [("l", "b")],
    2: [("b", "r")],
    3: [("l", "r")],
    4: [("r", "t")],
    6: [("b", "t")],
    7: [("l", "t")],
    8: [("l", "t")],
    9: [("b", "t")],
    11: [("r", "t")],
    12: [("l", "r")],
    13: [("b", "r")],
    14: [("l", "b")],
    15: [],
}


def _cell_edges(i: int, j: int):
    return {
        "b": ("q", i, j),
        "t": ("q", i, j + 1),
        "l": ("p", i, j),
        "r": ("p", i + 1, j),
    }


def _extract_level(qs, ps, f, level):
    """Marching squares on grid values f[i, j] = h(qs[i], ps[j])."""
    inside = f > level
    nq, np_ = f.shape
    case = (
        inside[:-1, :-1].astype(np.int8)
        + 2 * inside[1:, :-1]
        + 4 * inside[1:, 1:]
        + 8 * inside[:-1, 1:]
    )
    cells = np.argwhere((case != 0) & (case != 15))

    points: dict = {}

    def crossing(edge):
        if edge in points:
            return
        kind, i, j = edge
        if kind == "q":
            va, vb = f[i, j], f[i + 1, j]
            t = (level - va) / (vb - va)
            points[edge] = (qs[i] + t * (qs[i + 1] - qs[i]), ps[j])
        else:
            va, vb = f[i, j], f[i, j + 1]
            t = (level - va) / (vb - va)
            points[edge] = (qs[i], ps[j] + t * (ps[j + 1] - ps[j]))

    adjacency: dict = {}
    for i, j in cells:
        c = int(case[i, j])
        if c == 5 or c == 10:
            center = 0.25 * (f[i, j] + f[i + 1, j] + f[i + 1, j + 1] + f[i, j + 1])
            center_in = center > level
            if c == 5:
                segs = [("b", "r"), ("t", "l")] if center_in else [("l", "b"), ("r", "t")]
            else:
                segs = [("l", "b"), ("r", "t")] if center_in else [("b", "r"), ("t", "l")]
        else:
            segs = _SEGMENTS[c]
        edges = _cell_edges(i, j)
        for ea, eb in segs:
            ka, kb = edges[ea], edges[eb]
            crossing(ka)
            crossing(kb)
            adjacency.setdefault(ka, []).append(kb)
            adjacency.setdefault(kb, []).append(ka)

    # chain segments into polylines: open curves first (degree-1 ends), then loops
    visited = set()
    curves = []

    def walk(start):
        chain = [start]
        visited.add(start)
        current, prev = start, None
        while True:
            nxt = [e for e in adjacency[current] if e != prev and e not in visited]
            if not nxt:
                closed = start in adjacency[current] and len(chain) > 2
                return chain, closed
            prev, current = current, nxt[0]
            visited.add(current)
            chain.append(current)

    starts = [e for e, nbrs in adjacency.items() if len(nbrs) == 1]
    for e in starts:
        if e not in visited:
            chain, _ = walk(e)
            curves.append((chain, False))
    for e in adjacency:
        if e not in visited:
            chain, closed = walk(e)
            curves.append((chain, closed))

    out = []
    for chain, closed in curves:
        pts = np.array([points[e] for e in chain])
        if closed:
            pts = np.vstack([pts, pts[:1]])
        out.append((pts, closed))
    return out


def _point_in_polygon(q: float, p: float, poly: np.ndarray) -> bool:
    x, y = poly[:-1, 0], poly[:-1, 1]
    xn, yn = poly[1:, 0], poly[1:, 1]
    with np.errstate(divide="ignore", invalid="ignore"):
        crosses = ((y > p) != (yn > p)) & (q < x + (p - y) * (xn - x) / (yn - y))
    return bool(np.count_nonzero(crosses) % 2)


def contours(
    xi1: float,
    xi2: float,
    energies,
    grid: tuple[tuple[float, float], tuple[float, float], int] | None = None,
) -> list[ContourSet]:
    """Iso-energy polylines of the surface, one ContourSet per energy.

    Closed curves are tagged with the stationary points they enclose
    (indices into find_extrema(xi1, xi2)).  Energies below the global
    minimum yield empty curve lists.
    """
    if grid is None:
        grid = default_grid(xi2)
    (qlo, qhi), (plo, phi), resolution = grid
    if resolution < 16:
        raise ValueError(f"grid resolution must be at least 16, got {resolution}")
    if not (qhi > qlo and phi > plo):
        raise ValueError("grid ranges must be increasing")
    qs = np.linspace(qlo, qhi, resolution)
    ps = np.linspace(plo, phi, resolution)
    f = h_class(qs[:, None], ps[None, :], xi1, xi2)
    extrema = find_extrema(xi1, xi2)
    sets = []
    for e in energies:
        curves = []
        for pts, closed in _extract_level(qs, ps, f, float(e)):
            if closed:
                inside = tuple(
                    k for k, ext in enumerate(extrema) if _point_in_polygon(ext.point.q, ext.point.p, pts)
                )
            else:
                inside = ()
            curves.append(Contour(pts, closed, inside))
        sets.append(ContourSet(float(e), curves))
    return sets
