"""Blow-up times found by the integrator against closed forms."""

import argparse
import math

import numpy as np

from crnx.ode import OdeConfig, ode_integrate
from crnx.parser import parse_network

CUBIC = "A <-> 2A : 1, 2\n2A <-> 3A : 3, 1\n3A -> 4A : 1\n"

CASES = [
    # name, right-hand side, z0, exact blow-up time
    ("z' = z + z^2, z0 = 1", lambda t, z: z + z**2, [1.0], math.log(2)),
    ("z' = z^2, z0 = 1", lambda t, z: z**2, [1.0], 1.0),
    ("z' = z^3, z0 = 1", lambda t, z: z**3, [1.0], 0.5),
    ("z' = z^2, z0 = 0.1", lambda t, z: z**2, [0.1], 10.0),
]


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--rtol", type=float, default=1e-10)
    ap.add_argument("--threshold", type=float, default=1e8)
    args = ap.parse_args()
    cfg = OdeConfig(rtol=args.rtol, blow_up_threshold=args.threshold)
    for name, f, z0, exact in CASES:
        res = ode_integrate(f, z0, 2 * exact, cfg)
        print(f"{name:22s} {res.summary()}  error {abs(res.blow_up_time - exact):.2e}")
    res = ode_integrate(parse_network(CUBIC), [1.0], 5.0, cfg)
    print(f"{'network, z0 = 1':22s} {res.summary()}  error {abs(res.blow_up_time - math.log(2)):.2e}")
    bounded = ode_integrate(lambda t, z: -z + np.array([1.0]), [5.0], 50.0, cfg)
    label = "z' = 1 - z, z0 = 5"
    print(f"{label:22s} {bounded.summary()}")


if __name__ == "__main__":
    main()
