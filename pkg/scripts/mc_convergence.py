"""Monte Carlo energy variance against the exact thermal variance as n grows.

    python scripts/mc_convergence.py --alpha0 0.1 --alpha-t 0.01
"""
import argparse

from hidden_thermo import (
    JuttnerDist,
    RandomStream,
    ThermalJuttner,
    monte_carlo_moments,
    thermal_variance_exact,
)


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--alpha0", type=float, default=0.1)
    p.add_argument("--alpha-t", type=float, default=0.01)
    p.add_argument("--seed", type=lambda s: int(s, 0), default=0x5EED)
    p.add_argument("--max-exp", type=int, default=7, help="largest n is 10**max_exp")
    p.add_argument("--chunks", type=int, default=4)
    args = p.parse_args()

    hidden, td = JuttnerDist(args.alpha0), ThermalJuttner(args.alpha_t)
    exact = thermal_variance_exact(hidden, td)
    print(f"exact variance {exact:.8g}")
    print(f"{'n':>10} {'mc variance':>14} {'se':>10} {'z':>7}")
    for e in range(4, args.max_exp + 1):
        est = monte_carlo_moments(hidden, td, RandomStream(args.seed, e), 10 ** e, chunks=args.chunks)
        z = (est.variance - exact) / est.se_variance
        print(f"{10 ** e:>10} {est.variance:>14.8g} {est.se_variance:>10.3g} {z:>7.2f}")


if __name__ == "__main__":
    main()
