"""Coordinate and momentum expectation values of the lowest doublet.

Raw eigenvectors of a parity-symmetric Hamiltonian give <Q> = <P> = 0, so a
tiny eps*(Q + P) term is added to pick out well-localized combinations of the
degenerate pair; the term must mix Q and P or one doublet orientation would
stay unresolved.  Swept against xi2, the localized pair shows <Q> branches
at +-sqrt(2 xi2) on the positive side and <P> branches at +-sqrt(-2 xi2) on
the negative side, trading places exactly at xi2 = 0.  With a one-photon tilt
the <P> branches stay symmetric (the surviving time-reversal symmetry) while
<Q> collapses onto a single curve.
"""

import math
import pathlib

import numpy as np

from kposim import ModelParams, sweep

OUT = pathlib.Path(__file__).parent / "out"


def run(xi1, tag):
    template = ModelParams(xi1, 0.0, 1.0, 64)
    grid = np.concatenate([np.linspace(-40, -2, 39), np.linspace(2, 40, 39)])
    result = sweep(template, "xi2", grid, outputs=("expectations",), localize=True)
    path = OUT / f"localized_{tag}.csv"
    with open(path, "w") as fh:
        fh.write("xi2,state,energy,q_mean,p_mean\n")
        for point in result.points:
            for rec in point.expect:
                fh.write(
                    f"{point.axis_value:.6f},{rec.state_index},{rec.energy:.10e},"
                    f"{rec.q_mean:.10e},{rec.p_mean:.10e}\n"
                )
    print(f"{tag}: dim={result.dim} -> {path}")
    return result


def main():
    OUT.mkdir(exist_ok=True)
    sym = run(0.0, "parity_symmetric")
    tilted = run(-30.0 / math.sqrt(2.0), "parity_broken")

    for result, tag in ((sym, "xi1=0"), (tilted, "xi1=-30/sqrt2")):
        neg = next(p for p in result.points if p.axis_value == -40.0)
        pos = next(p for p in result.points if p.axis_value == 40.0)
        print(
            f"{tag}: at xi2=-40  <Q>={neg.expect[0].q_mean:+.3f}  <P>=+-{abs(neg.expect[0].p_mean):.3f}"
            f"   | at xi2=+40  <Q>=+-{abs(pos.expect[0].q_mean):.3f}  <P>={pos.expect[0].p_mean:+.3f}"
        )

    try:
        import matplotlib

        matplotlib.use("Agg")
        import matplotlib.pyplot as plt
    except ImportError:
        return

    fig, axes = plt.subplots(1, 2, figsize=(11, 4), sharex=True)
    for ax, result, title in (
        (axes[0], sym, r"$\xi_1 = 0$"),
        (axes[1], tilted, r"$\xi_1 = -30/\sqrt{2}$"),
    ):
        xs = [p.axis_value for p in result.points]
        for idx, style in ((0, "o"), (1, "s")):
            ax.plot(xs, [p.expect[idx].q_mean for p in result.points], style, ms=2.5, color="C0",
                    label=rf"$\langle Q\rangle_{idx}$")
            ax.plot(xs, [p.expect[idx].p_mean for p in result.points], style, ms=2.5, color="C1",
                    label=rf"$\langle P\rangle_{idx}$")
        ax.set_xlabel(r"$\xi_2$")
        ax.set_title(title)
        ax.legend(fontsize=8, ncol=2)
    axes[0].set_ylabel("expectation value")
    fig.tight_layout()
    fig.savefig(OUT / "localized_expectations.png", dpi=160)
    print(f"figure -> {OUT / 'localized_expectations.png'}")


if __name__ == "__main__":
    main()
