"""Deployments shared by the test modules."""

from __future__ import annotations

import itertools
import math
import random

from cechnet.cech import Cell
from cechnet.geometry import Disk, Tolerance
from cechnet.oracle import clearance
from cechnet.protocol import CellSpec

# ids, centers and radii of the seven-cell example with one hole
FIG2 = [
    (0, 0.0, 1.05, 0.8),
    (1, -0.1, 0.15, 0.6),
    (2, 0.6, 0.0, 0.6),
    (3, 1.4, 0.15, 0.45),
    (4, 2.2, 0.15, 0.5),
    (5, 2.15, 1.15, 0.65),
    (6, 0.9, 0.9, 0.8),
]

# equilateral triangle of side 2: pairwise overlapping, no common point
TRIPLE_105 = [(0, 0.0, 0.0, 1.05), (1, 2.0, 0.0, 1.05), (2, 1.0, math.sqrt(3), 1.05)]


def cells_of(rows) -> list[Cell]:
    return [Cell(i, Disk.at(x, y, r)) for i, x, y, r in rows]


def specs_of(rows, fenced=()) -> list[CellSpec]:
    return [CellSpec(i, x, y, r, i in fenced) for i, x, y, r in rows]


def tol_of(cells) -> Tolerance:
    return Tolerance.for_disks(c.disk for c in cells)


def random_rows(rng: random.Random, n: int, box: float, rlo: float, rhi: float):
    return [(i, rng.uniform(0, box), rng.uniform(0, box), rng.uniform(rlo, rhi)) for i in range(n)]


def min_feature(rows) -> float:
    """Smallest distance from a topological event among pairs and triples.

    Pairs: gap to tangency and to containment.  Triples of pairwise
    overlapping disks: absolute clearance of their common intersection.
    """
    disks = [Disk.at(x, y, r) for _, x, y, r in rows]
    feat = math.inf
    over = set()
    for i, j in itertools.combinations(range(len(disks)), 2):
        a, b = disks[i], disks[j]
        d = math.dist(a.center, b.center)
        feat = min(feat, abs(d - (a.radius + b.radius)), abs(d - abs(a.radius - b.radius)))
        if d < a.radius + b.radius:
            over.add((i, j))
    for i, j, k in itertools.combinations(range(len(disks)), 3):
        if (i, j) in over and (i, k) in over and (j, k) in over:
            feat = min(feat, abs(clearance([disks[i], disks[j], disks[k]])))
    return feat


def ring_rows(rng: random.Random, first_id: int, cx: float, cy: float):
    """Perturbed ring of overlapping disks around an uncovered middle."""
    m = rng.randint(6, 9)
    big = rng.uniform(1.2, 2.0)
    rows = []
    for k in range(m):
        a = 2 * math.pi * (k + rng.uniform(-0.15, 0.15)) / m
        rad = big * math.sin(math.pi / m) * rng.uniform(1.15, 1.45)
        rows.append((first_id + k, cx + big * math.cos(a), cy + big * math.sin(a), rad))
    if rng.random() < 0.3:
        # plug the middle
        rows.append((first_id + m, cx, cy, big * rng.uniform(0.8, 1.0)))
    return rows


def fat_hole_rows(rng: random.Random):
    """One or two rings plus loose disks, with every feature above 10x the grid step.

    Some rings get a disk in the middle, so hole counts vary.
    """
    while True:
        rows = []
        for _ in range(rng.randint(1, 2)):
            rows += ring_rows(rng, len(rows), rng.uniform(0, 6), rng.uniform(0, 6))
        for _ in range(rng.randint(0, 4)):
            rows.append((len(rows), rng.uniform(0, 6), rng.uniform(0, 6), rng.uniform(0.5, 1.3)))
        if min_feature(rows) > 10 * min(r for *_, r in rows) / 100:
            return rows


# one summary line per acceptance criterion, printed at the end of the run
ACCEPTANCE: list[str] = []
