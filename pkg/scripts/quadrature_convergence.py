"""Error of the fixed-grid quadrature against the exact pruned distance.

    python3 scripts/quadrature_convergence.py --pairs 20
"""

import argparse

import numpy as np

from dendrodist.editdist import beta_measure, pruned_distance, quadrature_distance, rescale
from dendrodist.generators import random_merge_tree
from dendrodist.rng import make_rng

CHECKPOINTS = (64, 256, 1024, 4096)


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--pairs", type=int, default=20)
    p.add_argument("--max-leaves", type=int, default=8)
    p.add_argument("--alpha", type=float, default=2.0)
    p.add_argument("--beta", type=float, default=8.0)
    p.add_argument("--seed", type=int, default=0)
    args = p.parse_args()

    mu = beta_measure(args.alpha, args.beta)
    errs = np.zeros((args.pairs, len(CHECKPOINTS)))
    print("pair exact " + " ".join(f"err@{n}" for n in CHECKPOINTS))
    for i in range(args.pairs):
        rng = make_rng(args.seed, i)
        a, b = rescale([random_merge_tree(rng, args.max_leaves), random_merge_tree(rng, args.max_leaves)])
        exact = pruned_distance(a, b, mu)
        errs[i] = [abs(quadrature_distance(a, b, mu, n) - exact) for n in CHECKPOINTS]
        print(f"{i} {exact:.6f} " + " ".join(f"{e:.2e}" for e in errs[i]), flush=True)
    rising = int(np.any(np.diff(errs, axis=1) > 0, axis=1).sum())
    print("mean " + " ".join(f"{e:.2e}" for e in errs.mean(axis=0)))
    print(f"pairs with a rising error between checkpoints: {rising}/{args.pairs}")


if __name__ == "__main__":
    main()
