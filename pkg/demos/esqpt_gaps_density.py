"""Excited-state transition signatures: adjacent gaps and level density.

At the separatrix energy the classical period diverges and quantum levels
cluster, so the smoothed level density peaks there and the adjacent-gap
envelope dips.  For xi1 = 0 the critical energy is exactly zero; a one-photon
tilt moves it to the saddle energy of the classical surface.  Below the
critical energy the gaps alternate between near-zero doublet splittings and
finite inter-doublet spacings.
"""

import math
import pathlib

from kposim import (
    ModelParams,
    adjacent_gaps,
    build_hamiltonian,
    default_dim,
    diagonalize,
    gap_dip_energy,
    level_density,
    separatrix_energy,
)

OUT = pathlib.Path(__file__).parent / "out"

CASES = [
    (0.0, -20.0),
    (-30.0 / math.sqrt(2.0), -40.0),
    (-30.0 / math.sqrt(2.0), 40.0),
]


def main():
    OUT.mkdir(exist_ok=True)
    results = []
    for xi1, xi2 in CASES:
        params = ModelParams(xi1, xi2, 1.0, default_dim(xi1, xi2, 1.0))
        spectrum = diagonalize(build_hamiltonian(params))
        trusted = spectrum.energies[spectrum.energies < 0.6 * abs(spectrum.energies[0])]
        gaps = adjacent_gaps(trusted)
        density = level_density(trusted)
        e_dip, dip_gap = gap_dip_energy(gaps)
        e_c = separatrix_energy(xi1, xi2)
        print(
            f"xi1={xi1:+7.3f} xi2={xi2:+5.0f}: separatrix={e_c:+9.3f}  "
            f"density peak={density.peak_energy():+9.3f}  gap dip={e_dip:+9.3f} (gap {dip_gap:.2f})"
        )
        with open(OUT / f"gaps_xi2_{xi2:+.0f}_xi1_{xi1:+.2f}.csv", "w") as fh:
            fh.write("j,energy,gap\n")
            for g in gaps:
                fh.write(f"{g.j},{g.energy:.10e},{g.gap:.10e}\n")
        results.append((xi1, xi2, trusted, gaps, density, e_c))

    try:
        import matplotlib

        matplotlib.use("Agg")
        import matplotlib.pyplot as plt
    except ImportError:
        return

    fig, axes = plt.subplots(2, len(results), figsize=(4.2 * len(results), 7), sharex="col")
    for col, (xi1, xi2, trusted, gaps, density, e_c) in enumerate(results):
        top, bottom = axes[0][col], axes[1][col]
        top.semilogy([g.energy for g in gaps], [max(g.gap, 1e-16) for g in gaps], ".", ms=4)
        top.axvline(e_c, color="r", ls="--", lw=1)
        top.set_title(rf"$\xi_2$={xi2:+.0f}, $\xi_1$={xi1:+.2f}")
        top.set_ylabel(r"$\Delta_j$")
        bottom.plot(density.grid, density.density)
        bottom.axvline(e_c, color="r", ls="--", lw=1)
        bottom.set_xlabel("energy (Kerr units)")
        bottom.set_ylabel(r"$\rho(E)$")
    fig.tight_layout()
    fig.savefig(OUT / "esqpt_gaps_density.png", dpi=160)
    print(f"figure -> {OUT / 'esqpt_gaps_density.png'}")


if __name__ == "__main__":
    main()
