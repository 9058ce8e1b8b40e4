"""Desk-scale tunneling-gap decay against the classicality parameter.

For each drive strength the tracked doublet gap is converged in basis size
and mantissa width together, then fitted to gap = exp(pref - delta * N_e).
Double precision carries the shallow points; the deep ones engage the MPFR
path automatically once the gap falls under the double-precision floor.

The fitted delta approaches the coherent-state overlap estimate 2|xi2| from
below; at these small |xi2| values the window 0.5 <= N_e <= 4 still carries
visible prefactor curvature, so expect ratios delta/(2|xi2|) around 0.7-0.9
rather than the 0.96-0.98 seen at |xi2| ~ 30-50 (see README).

Runtime: a few minutes; the xi2 = -5 run is the expensive one.
"""

import pathlib
import time

from kposim import default_ne_grid, delta_app, fit_exponential, fit_report, gap_scaling_sweep

OUT = pathlib.Path(__file__).parent / "out"


def main():
    OUT.mkdir(exist_ok=True)
    grid = default_ne_grid()  # geometric, 0.5 .. 4.0
    print(f"N_e grid: {[round(v, 3) for v in grid]}")
    import json

    report = {}
    for xi2 in (-3.0, -4.0, -5.0):
        t0 = time.perf_counter()
        points = gap_scaling_sweep(0.0, xi2, grid)
        fit = fit_exponential(points)
        dt = time.perf_counter() - t0
        ratio = fit.delta / delta_app(xi2)
        print(
            f"xi2={xi2}: delta = {fit.delta:.3f} +- {fit.delta_stderr:.3f}  "
            f"(2|xi2| = {delta_app(xi2):.0f}, ratio {ratio:.3f}, r² = {fit.r_squared:.5f})  [{dt:.0f} s]"
        )
        for p in points:
            print(
                f"   N_e={p.n_e:5.3f}  ln gap = {p.log_gap():9.3f}  "
                f"bits={p.precision_bits:4d}  dim={p.dim}"
            )
        report[str(xi2)] = fit_report(fit, xi2)
    (OUT / "gap_scaling_desk.json").write_text(json.dumps(report, indent=1) + "\n")
    print(f"fit reports -> {OUT / 'gap_scaling_desk.json'}")


if __name__ == "__main__":
    main()
