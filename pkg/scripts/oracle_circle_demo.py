#!/usr/bin/env python3
"""Independent Monte Carlo oracle for the circle sampling demonstration.

Brute-force simulation of the two convex-combination schemes over evenly
spaced circle points, written against the stdlib only (no numpy, no shared
code with the package) so it can stand as an independent check. Flat
Dirichlet weights are drawn by normalizing Exponential(1) variates.

The means printed here are frozen into tests/test_acceptance.py as the
regression baseline; re-run this script to regenerate them.
"""
from __future__ import annotations

import argparse
import math
import random


def flat_dirichlet(rng: random.Random, n: int) -> list[float]:
    exps = [-math.log(max(rng.random(), 1e-300)) for _ in range(n)]
    total = sum(exps)
    return [e / total for e in exps]


def circle_points(n: int, radius: float) -> list[tuple[float, float]]:
    return [
        (radius * math.cos(2 * math.pi * i / n), radius * math.sin(2 * math.pi * i / n))
        for i in range(n)
    ]


def mean_radius_full_hull(points, draws: int, rng: random.Random) -> float:
    total = 0.0
    n = len(points)
    for _ in range(draws):
        w = flat_dirichlet(rng, n)
        x = sum(wi * p[0] for wi, p in zip(w, points))
        y = sum(wi * p[1] for wi, p in zip(w, points))
        total += math.hypot(x, y)
    return total / draws


def mean_radius_k_subset(points, k: int, draws: int, rng: random.Random) -> float:
    total = 0.0
    for _ in range(draws):
        chosen = rng.sample(points, k)
        w = flat_dirichlet(rng, k)
        x = sum(wi * p[0] for wi, p in zip(w, chosen))
        y = sum(wi * p[1] for wi, p in zip(w, chosen))
        total += math.hypot(x, y)
    return total / draws


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n", type=int, default=60, help="points on the circle")
    ap.add_argument("--radius", type=float, default=1.0)
    ap.add_argument("--k", type=int, default=3)
    ap.add_argument("--draws", type=int, default=200_000)
    ap.add_argument("--seed", type=int, default=20240531)
    args = ap.parse_args()

    points = circle_points(args.n, args.radius)
    rng = random.Random(args.seed)
    full = mean_radius_full_hull(points, args.draws, rng)
    ksub = mean_radius_k_subset(points, args.k, args.draws, rng)

    print(f"n={args.n} radius={args.radius} draws={args.draws} seed={args.seed}")
    print(f"full_hull mean distance to center : {full:.6f}")
    print(f"k_subset(k={args.k}) mean distance: {ksub:.6f}")
    print(f"gap (k_subset - full_hull)        : {ksub - full:.6f}")


if __name__ == "__main__":
    main()
