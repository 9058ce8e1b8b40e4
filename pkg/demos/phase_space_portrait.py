"""Classical phase-space portraits.

For four drive combinations this script finds the stationary points of the
classical energy surface, reports the separatrix energy where one exists,
and extracts iso-energy contours.  With xi2 < 0 the two wells sit on the
momentum axis and stay equivalent even when xi1 tilts the surface (only the
q -> -q symmetry is lost); with xi2 > 0 the tilt makes the wells inequivalent.

Contour polylines are serialized as JSON arrays of (q, p) pairs.
"""

import json
import math
import pathlib

from kposim import NoSaddleError, contours, find_extrema, separatrix_energy

OUT = pathlib.Path(__file__).parent / "out"

CASES = [
    ("I", -20.0, 0.0),
    ("II", 20.0, 0.0),
    ("III", -20.0, -30.0 / math.sqrt(2.0)),
    ("IV", 20.0, -30.0 / math.sqrt(2.0)),
]


def main():
    OUT.mkdir(exist_ok=True)
    doc = {}
    for tag, xi2, xi1 in CASES:
        extrema = find_extrema(xi1, xi2)
        print(f"case {tag}: xi2={xi2:+.0f}, xi1={xi1:+.3f}")
        for e in extrema:
            print(f"   {e.kind:8s} q={e.point.q:+8.4f} p={e.point.p:+8.4f} energy={e.point.energy:+10.4f}")
        try:
            e_sep = separatrix_energy(xi1, xi2)
            print(f"   separatrix at {e_sep:+.4f}")
        except NoSaddleError:
            e_sep = None
            print("   no saddle (single well)")

        e_min = min(e.point.energy for e in extrema)
        energies = sorted({round(v, 6) for v in (
            e_min * 0.95,
            e_min * 0.6,
            (e_sep if e_sep is not None else 0.0),
            abs(e_min) * 0.3,
        )})
        sets = contours(xi1, xi2, energies)
        doc[tag] = {
            "xi2": xi2,
            "xi1": xi1,
            "separatrix": e_sep,
            "extrema": [
                {"kind": e.kind, "q": e.point.q, "p": e.point.p, "energy": e.point.energy}
                for e in extrema
            ],
            "contours": [
                {
                    "energy": cs.energy,
                    "curves": [
                        {"closed": c.closed, "encloses": list(c.encloses), "points": c.points.tolist()}
                        for c in cs.curves
                    ],
                }
                for cs in sets
            ],
        }
        n_curves = sum(len(cs.curves) for cs in sets)
        print(f"   {n_curves} contour polylines at {len(energies)} energies")

    path = OUT / "phase_space_portrait.json"
    path.write_text(json.dumps(doc) + "\n")
    print(f"JSON -> {path}")

    try:
        import matplotlib

        matplotlib.use("Agg")
        import matplotlib.pyplot as plt
    except ImportError:
        return

    fig, axes = plt.subplots(2, 2, figsize=(9, 8))
    for ax, (tag, xi2, xi1) in zip(axes.ravel(), CASES):
        data = doc[tag]
        for cs in data["contours"]:
            for curve in cs["curves"]:
                pts = curve["points"]
                ax.plot([p[0] for p in pts], [p[1] for p in pts], "k-", lw=0.8)
        for e in data["extrema"]:
            marker = {"minimum": "bo", "saddle": "rx", "maximum": "g^"}[e["kind"]]
            ax.plot([e["q"]], [e["p"]], marker, ms=6)
        ax.set_title(f"{tag}: $\\xi_2$={xi2:+.0f}, $\\xi_1$={xi1:+.2f}")
        ax.set_xlabel("q")
        ax.set_ylabel("p")
        ax.set_aspect("equal")
    fig.tight_layout()
    fig.savefig(OUT / "phase_space_portrait.png", dpi=160)
    print(f"figure -> {OUT / 'phase_space_portrait.png'}")


if __name__ == "__main__":
    main()
