"""Mean energy and heat capacity across temperature for a hidden/drift pair.

Prints a short summary to stderr and the curve as CSV (stdout or --out).
Compare the low-temperature freeze-out with the classical value 3/2.

    python scripts/heat_capacity_curve.py --alpha0 1e-3 --alpha-t 1e-3 --points 60
"""
import argparse
import contextlib
import csv
import sys
import warnings

import numpy as np

from hidden_thermo import JuttnerDist, ThermalJuttner, build_model, heat_capacity, mean_energy


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--alpha0", type=float, default=1e-3)
    p.add_argument("--alpha-t", type=float, default=1e-3)
    p.add_argument("--theta-min", type=float, default=0.01, help="in units of eps0")
    p.add_argument("--theta-max", type=float, default=100.0)
    p.add_argument("--points", type=int, default=60)
    p.add_argument("--out", default="-")
    args = p.parse_args()

    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        tm = build_model(JuttnerDist(args.alpha0), ThermalJuttner(args.alpha_t))
    theta = np.geomspace(args.theta_min, args.theta_max, args.points) * tm.epsilon0
    E = mean_energy(tm, theta)
    cv = heat_capacity(tm, theta)

    limit = 1.5 / tm.kappa_tilde
    print(f"eps0={tm.epsilon0:.6g} kappa={tm.kappa:.6f} kappa_tilde={tm.kappa_tilde:.6f}", file=sys.stderr)
    print(f"high-T c_V={limit:.6f} ({limit / 1.5:.1%} of classical 3/2)", file=sys.stderr)
    i = int(np.searchsorted(cv, 0.5 * limit))
    if 0 < i < theta.size:
        print(f"c_V reaches half its limit near theta/eps0={theta[i] / tm.epsilon0:.3g}", file=sys.stderr)

    with (contextlib.nullcontext(sys.stdout) if args.out == "-" else open(args.out, "w", newline="")) as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(["theta_over_eps0", "mean_Ek_over_eps0", "c_V"])
        for t, e, c in zip(theta / tm.epsilon0, E / tm.epsilon0, cv):
            w.writerow([f"{t:.8g}", f"{e:.8g}", f"{c:.8g}"])


if __name__ == "__main__":
    main()
