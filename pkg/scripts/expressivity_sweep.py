#!/usr/bin/env python3
"""Class-count profile of every refinement algorithm across generators.

Prints, per generator and algorithm, the mean stable class count over a
seeded batch — a quick view of how much each update rule distinguishes.

Usage: python scripts/expressivity_sweep.py [seed [per_generator]]
"""

import sys

import numpy as np

from sdpxlab.colors import Algo, run_to_stable
from sdpxlab.verify import sample_instances


def main(seed: int = 0, per_generator: int = 10) -> int:
    gens = ("maxcut", "maxclique", "mis", "vertexcover", "max2sat")
    algos = (Algo.VCWL, Algo.VC2WL, Algo.DELTA_VC2WL, Algo.VC2IGNWL,
             Algo.VC2FWL, Algo.VC2FWLP)
    for gen in gens:
        instances = sample_instances(seed, per_generator, generators=(gen,))
        counts = {a: [] for a in algos}
        rounds = {a: [] for a in algos}
        for inst in instances:
            for algo in algos:
                part, r = run_to_stable(algo, inst)
                counts[algo].append(part.n_var_classes / (inst.n * inst.n))
                rounds[algo].append(r)
        for algo in algos:
            print(f"generator={gen} algo={algo.value} "
                  f"mean_class_fraction={np.mean(counts[algo]):.3f} "
                  f"mean_rounds={np.mean(rounds[algo]):.1f}")
    return 0


if __name__ == "__main__":
    args = [int(a) for a in sys.argv[1:3]]
    sys.exit(main(*args))
