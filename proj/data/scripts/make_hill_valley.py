#!/usr/bin/env python3
"""Generate a hill-valley style dataset (ARFF).

Each row is 100 points of a noisy terrain profile. Class 1 rows contain a
single hill (bump), class 0 rows a single valley (dip). The baseline level of
each row varies over four orders of magnitude, so per-column scaling does not
expose the shape; only relations between neighbouring columns do.
"""
from pathlib import Path

import numpy as np

N_ROWS = 1212
N_POINTS = 100
SEED = 20170101


def main():
    rng = np.random.default_rng(SEED)
    labels = np.array([i % 2 for i in range(N_ROWS)])
    rng.shuffle(labels)
    grid = np.arange(N_POINTS, dtype=float)
    out = Path(__file__).resolve().parent.parent / "hill-valley.arff"
    with open(out, "w") as f:
        f.write("% hill-valley: synthetic terrain profiles (scripts/make_hill_valley.py)\n")
        f.write("@relation hill-valley\n\n")
        for i in range(N_POINTS):
            f.write(f"@attribute x{i + 1} numeric\n")
        f.write("@attribute class {0,1}\n\n@data\n")
        for y in labels:
            base = 10.0 ** rng.uniform(0.0, 4.0)
            centre = rng.uniform(20.0, 80.0)
            width = rng.uniform(4.0, 12.0)
            height = base * rng.uniform(0.1, 0.5) * (1.0 if y == 1 else -1.0)
            profile = base + height * np.exp(-0.5 * ((grid - centre) / width) ** 2)
            profile += rng.normal(0.0, 0.04 * base, N_POINTS)
            f.write(",".join(f"{v:.4f}" for v in profile) + f",{y}\n")


if __name__ == "__main__":
    main()
