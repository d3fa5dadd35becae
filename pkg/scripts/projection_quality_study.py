#!/usr/bin/env python3
"""How trustworthy is the 2D projection as the input dimension grows?

Generates random point sets in 2..6 dimensions, projects their distance
matrices with classical MDS, and tabulates the layout/computed ratio
statistics. Planar inputs should reproduce exactly (mean 1, variance 0);
higher-dimensional inputs degrade, which is precisely what the quality
panel is there to reveal.

    python scripts/projection_quality_study.py [--sets 50] [--points 10]
"""
import argparse
import math
import random
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from traceview import DistanceMatrix, mds_project, quality


def point_set_matrix(rng, n_points, dim):
    pts = [tuple(rng.uniform(-10, 10) for _ in range(dim)) for _ in range(n_points)]
    values = [[0.0] * n_points for _ in range(n_points)]
    for i in range(n_points):
        for j in range(i + 1, n_points):
            d = math.dist(pts[i], pts[j])
            values[i][j] = values[j][i] = d
    labels = tuple(f"p{i}" for i in range(n_points))
    return DistanceMatrix(labels, tuple(tuple(row) for row in values))


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--sets", type=int, default=50, help="point sets per dimension")
    parser.add_argument("--points", type=int, default=10, help="points per set")
    parser.add_argument("--seed", type=int, default=1)
    args = parser.parse_args()

    rng = random.Random(args.seed)
    print(f"{args.sets} sets x {args.points} points per dimension\n")
    print(f"{'dim':>4} {'mean ratio':>12} {'variance':>12} {'worst pair':>12} {'flagged':>8}")
    for dim in range(2, 7):
        means, variances, worsts, flagged = [], [], [], 0
        for _ in range(args.sets):
            m = point_set_matrix(rng, args.points, dim)
            layout = mds_project(m)
            metrics = quality(m, layout)
            means.append(metrics.mean_ratio)
            variances.append(metrics.variance_ratio)
            worsts.append(min(p.ratio for p in metrics.per_pair if p.ratio is not None))
            flagged += layout.non_euclidean
        print(
            f"{dim:>4} {sum(means) / len(means):>12.6f} {sum(variances) / len(variances):>12.6f} "
            f"{min(worsts):>12.6f} {flagged:>7}x"
        )
    print("\nmean/variance are the numbers the quality panel reports per layout.")
    return 0


if __name__ == "__main__":
    sys.exit(main())
