"""Total variation between simulated occupancy and the product Poisson law, by horizon."""

import argparse

from crnx.model import as_ctmc
from crnx.parser import parse_network
from crnx.simulate import SimConfig, empirical_occupancy, monte_carlo_jump_rate, ssa_run, tv_distance
from crnx.stationary import box_window, product_form_poisson

LINKED = "0 <-> A : 1, 1\nA <-> B : 1, 1\n"


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--seed", type=int, default=20240601)
    ap.add_argument("--horizons", type=float, nargs="*", default=[1e2, 1e3, 1e4, 1e5])
    ap.add_argument("--burn-in", type=float, default=0.1)
    ap.add_argument("--box", type=int, default=8)
    args = ap.parse_args()
    spec = as_ctmc(parse_network(LINKED))
    pi = product_form_poisson((1.0, 1.0))
    window = box_window([args.box, args.box])
    for T in args.horizons:
        tr = ssa_run(spec, (0, 0), SimConfig(seed=args.seed, time_horizon=T, record="occupancy",
                                             burn_in=args.burn_in))
        tv = tv_distance(empirical_occupancy(tr), pi, window)
        print(f"T={T:8.0f}  jumps {tr.jump_count:9d}  TV {tv:.4f}")
    est = monte_carlo_jump_rate(as_ctmc(parse_network("0 <-> A : 1, 1\n")), (0,), 1e3, 50,
                                seed=args.seed, burn_in=args.burn_in)
    print(f"jump rate of 0 <-> A: {est.mean:.4f} +- {est.stderr:.4f} (stationary value 2)")


if __name__ == "__main__":
    main()
