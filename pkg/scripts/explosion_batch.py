"""How often simulation guards fire on explosive and non-explosive networks."""

import argparse
import time
from collections import Counter

import numpy as np

from crnx.chains import pure_birth_network
from crnx.model import as_ctmc
from crnx.parser import parse_network
from crnx.simulate import SimConfig, ssa_batch

SWITCHING = "0 <-> A : 1, 1\nA <-> B : 1, 1\n2C -> 3C : 1\n3C + A -> 2C + A : 1\n"
LINKED = "0 <-> A : 1, 1\nA <-> B : 1, 1\n"

CASES = {
    "switching": (lambda: as_ctmc(parse_network(SWITCHING)), (0, 0, 2)),
    "pure-birth-x^2": (lambda: as_ctmc(pure_birth_network()), (1,)),
    "linked-queues": (lambda: as_ctmc(parse_network(LINKED)), (0, 0)),
}


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--runs", type=int, default=100)
    ap.add_argument("--seed", type=int, default=7)
    ap.add_argument("--T", type=float, default=1e3)
    ap.add_argument("--max-jumps", type=int, default=10**7)
    ap.add_argument("--cap", type=float, default=1e6)
    ap.add_argument("--cases", nargs="*", default=list(CASES))
    args = ap.parse_args()
    cfg = SimConfig(seed=args.seed, time_horizon=args.T, max_jumps=args.max_jumps,
                    state_norm_cap=args.cap, record="none")
    for name in args.cases:
        build, x0 = CASES[name]
        start = time.perf_counter()
        trajs = ssa_batch(build(), x0, cfg, args.runs)
        outcomes = Counter(tr.outcome.name for tr in trajs)
        hit = [tr.final_time for tr in trajs if tr.outcome.explosion_symptom]
        line = f"{name:16s} {dict(outcomes)}"
        if hit:
            line += f"  guard time median {np.median(hit):.4g}, max {max(hit):.4g}"
        print(line + f"  ({time.perf_counter() - start:.1f}s)")


if __name__ == "__main__":
    main()
