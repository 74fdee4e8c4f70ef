"""Time pruned-distance matrices over random dendrograms for several worker counts.

    python3 scripts/benchmark_matrix.py --trees 100 --max-leaves 20 --jobs 1 2 4
"""

import argparse
import os
import time

from dendrodist.editdist import beta_measure
from dendrodist.generators import random_dendrogram
from dendrodist.pipeline import distance_matrix
from dendrodist.rng import make_rng


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--trees", type=int, default=100)
    p.add_argument("--max-leaves", type=int, default=20)
    p.add_argument("--jobs", type=int, nargs="+", default=[1, 4])
    p.add_argument("--seed", type=int, default=0)
    args = p.parse_args()

    rng = make_rng(args.seed)
    trees = [random_dendrogram(rng, int(rng.integers(2, args.max_leaves + 1))) for _ in range(args.trees)]
    mu = beta_measure(2, 8)
    print(f"{args.trees} trees, up to {args.max_leaves} leaves, {os.cpu_count()} CPU(s)")
    base = None
    for jobs in args.jobs:
        start = time.perf_counter()
        distance_matrix(trees, "pruned", mu, jobs=jobs)
        secs = time.perf_counter() - start
        base = base or secs
        print(f"jobs={jobs}: {secs:.1f} s, speedup {base / secs:.2f}x", flush=True)


if __name__ == "__main__":
    main()
