"""How fast the zeroth-order variance approaches the exact one as alpha0 -> 0.

For each drift law, prints the relative gap at a ladder of alpha0 and the
fitted log-log slope. The zeroth-order law drops O(alpha0^2) terms, so
expect a slope of 2.

    python scripts/zeroth_order_gap.py
"""
import argparse

import numpy as np

from hidden_thermo import (
    JuttnerDist,
    PointMass,
    ThermalJuttner,
    excess_moments,
    kappa_stats,
    mass_moments,
    thermal_variance_exact,
    thermal_variance_zeroth,
)


def gap(alpha0, td):
    d = JuttnerDist(alpha0)
    m = mass_moments(d).mean_mass
    x1, _ = excess_moments(td)
    exact = thermal_variance_exact(d, td)
    zeroth = thermal_variance_zeroth(kappa_stats(td).kappa, m * x1, m)
    return abs(zeroth - exact) / exact


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--alphas", type=float, nargs="+", default=[1.0, 0.3, 0.1, 0.03, 0.01, 3e-3, 1e-3, 3e-4, 1e-4])
    args = p.parse_args()

    alphas = np.array(sorted(args.alphas, reverse=True))
    laws = {"juttner:0.01": ThermalJuttner(0.01), "juttner:1": ThermalJuttner(1.0), "delta:2": PointMass(2.0)}
    print(f"{'alpha0':>10} " + " ".join(f"{k:>14}" for k in laws))
    gaps = {k: np.array([gap(a, td) for a in alphas]) for k, td in laws.items()}
    for i, a in enumerate(alphas):
        print(f"{a:>10.3g} " + " ".join(f"{gaps[k][i]:>14.4e}" for k in laws))
    tail = alphas <= 0.01
    for k, g in gaps.items():
        slope = np.polyfit(np.log(alphas[tail]), np.log(g[tail]), 1)[0]
        print(f"{k}: log-log slope for alpha0 <= 0.01 is {slope:.3f}")


if __name__ == "__main__":
    main()
