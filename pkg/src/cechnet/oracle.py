"""Brute-force ground truth used to check the exact machinery.

Nothing here calls into :mod:`cechnet.cech` or the circle-crossing code in
:mod:`cechnet.geometry`; grids are sampled, cliques come from networkx.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import networkx as nx
import numpy as np
from scipy import ndimage, optimize

from .geometry import Disk
from .homology import SimplicialComplex


@dataclass(frozen=True)
class CoverageGrid:
    xmin: float
    ymin: float
    resolution: float
    covered: np.ndarray  # shape (ny, nx), True where some disk covers the sample

    @property
    def shape(self) -> tuple[int, int]:
        return self.covered.shape


def grid_common_intersection(disks: Sequence[Disk], resolution: float) -> bool:
    """Whether some lattice point ``(i*res, j*res)`` lies in every disk.

    Scans rows; on each row every disk covers an x-interval, so the row holds
    a common sample iff the intersected interval contains a lattice x.
    Slivers thinner than the resolution can be missed.
    """
    if resolution <= 0:
        raise ValueError("resolution must be positive")
    if not disks:
        raise ValueError("empty family")
    if len(disks) == 1:
        return True
    ylo = max(d.center.y - d.radius for d in disks)
    yhi = min(d.center.y + d.radius for d in disks)
    if ylo > yhi:
        return False
    cx = np.array([d.center.x for d in disks])
    cy = np.array([d.center.y for d in disks])
    r = np.array([d.radius for d in disks])
    ys = np.arange(math.ceil(ylo / resolution), math.floor(yhi / resolution) + 1) * resolution
    if ys.size == 0:
        return False
    half = np.sqrt(np.clip(r[None, :] ** 2 - (ys[:, None] - cy[None, :]) ** 2, 0, None))
    inside = (r[None, :] ** 2 - (ys[:, None] - cy[None, :]) ** 2) >= 0
    lo = np.where(inside, cx[None, :] - half, np.inf).max(axis=1)
    hi = np.where(inside, cx[None, :] + half, -np.inf).min(axis=1)
    return bool(np.any(np.ceil(lo / resolution) <= np.floor(hi / resolution)))


def coverage_grid(disks: Sequence[Disk], resolution: float) -> CoverageGrid:
    """Sample the union of disks on a box padded by the largest radius."""
    if resolution <= 0:
        raise ValueError("resolution must be positive")
    pad = max(d.radius for d in disks)
    xmin = min(d.center.x - d.radius for d in disks) - pad
    xmax = max(d.center.x + d.radius for d in disks) + pad
    ymin = min(d.center.y - d.radius for d in disks) - pad
    ymax = max(d.center.y + d.radius for d in disks) + pad
    xs = xmin + resolution * np.arange(int(math.ceil((xmax - xmin) / resolution)) + 1)
    ys = ymin + resolution * np.arange(int(math.ceil((ymax - ymin) / resolution)) + 1)
    covered = np.zeros((ys.size, xs.size), dtype=bool)
    for d in disks:
        # only touch the disk's bounding rows/cols
        i0 = max(int((d.center.y - d.radius - ymin) / resolution) - 1, 0)
        i1 = min(int((d.center.y + d.radius - ymin) / resolution) + 2, ys.size)
        j0 = max(int((d.center.x - d.radius - xmin) / resolution) - 1, 0)
        j1 = min(int((d.center.x + d.radius - xmin) / resolution) + 2, xs.size)
        dx = xs[j0:j1][None, :] - d.center.x
        dy = ys[i0:i1][:, None] - d.center.y
        covered[i0:i1, j0:j1] |= dx * dx + dy * dy <= d.radius * d.radius
    return CoverageGrid(xmin, ymin, resolution, covered)


def count_holes_grid(disks: Sequence[Disk], resolution: float | None = None, min_depth: float = 2.0) -> int:
    """Bounded uncovered components of the union, 4-connected.

    A component only counts when some sample in it lies more than
    ``min_depth`` steps from every covered sample.  Where two circles cross,
    the uncovered wedge narrows to a point and sampling can cut slivers about
    one step wide off it; those are not holes of the union.
    """
    disks = [d for d in disks if d.radius > 0]
    if not disks:
        return 0
    rmin = min(d.radius for d in disks)
    if resolution is None:
        resolution = rmin / 100
    if resolution > rmin / 20:
        raise ValueError("resolution must be at most min radius / 20")
    grid = coverage_grid(disks, resolution)
    free = ~grid.covered
    labels, n = ndimage.label(free)  # default structure is 4-connectivity
    if n == 0:
        return 0
    border = set(np.unique(np.concatenate([labels[0], labels[-1], labels[:, 0], labels[:, -1]])).tolist())
    depth = ndimage.maximum(ndimage.distance_transform_edt(free), labels, index=np.arange(1, n + 1))
    return sum(1 for lab, dep in zip(range(1, n + 1), depth) if lab not in border and dep > min_depth)


def write_pgm(grid: CoverageGrid, path: str | Path) -> None:
    """Plain PGM, covered samples white, top row = largest y."""
    img = np.flipud(grid.covered).astype(np.uint8) * 255
    h, w = img.shape
    with open(path, "w") as fh:
        fh.write(f"P2\n{w} {h}\n255\n")
        for row in img:
            fh.write(" ".join(map(str, row)) + "\n")


def overlap_nx_graph(cells) -> nx.Graph:
    """Overlap graph of (id, Disk) pairs, tangency excluded."""
    g = nx.Graph()
    cells = [(cid, d) for cid, d in cells if d.radius > 0]
    g.add_nodes_from(cid for cid, _ in cells)
    for (i, a), (j, b) in itertools.combinations(cells, 2):
        if math.dist(a.center, b.center) < a.radius + b.radius:
            g.add_edge(i, j)
    return g


def overlap_components(cells) -> int:
    return nx.number_connected_components(overlap_nx_graph(cells))


def rips_complex(cells, dim_max: int = 3) -> SimplicialComplex:
    """Clique complex of the overlap graph, truncated at ``dim_max``."""
    g = overlap_nx_graph(cells)
    out = []
    for clique in nx.enumerate_all_cliques(g):
        if len(clique) - 1 > dim_max:
            break
        out.append(clique)
    return SimplicialComplex(out)


def clearance(disks: Sequence[Disk]) -> float:
    """Signed depth of the common intersection: max over p of min_i (r_i - |p - c_i|).

    Positive when the intersection has an interior, negative when the disks
    miss each other by that margin.
    """
    c = np.array([[d.center.x, d.center.y] for d in disks])
    r = np.array([d.radius for d in disks])
    # weighted start point; solved in epigraph form: min t s.t. |p - c_i| - r_i <= t
    w = 1.0 / np.maximum(r, 1e-12)
    p0 = (c * w[:, None]).sum(axis=0) / w.sum()
    t0 = float(np.max(np.linalg.norm(c - p0, axis=1) - r))
    cons = [{"type": "ineq", "fun": (lambda z, i=i: z[2] - math.hypot(z[0] - c[i, 0], z[1] - c[i, 1]) + r[i])}
            for i in range(len(disks))]
    res = optimize.minimize(lambda z: z[2], np.array([p0[0], p0[1], t0]), constraints=cons,
                            method="SLSQP", options={"ftol": 1e-12, "maxiter": 500})
    p = res.x[:2]
    # evaluate the objective at the returned point, never trust t directly
    return float(-np.max(np.linalg.norm(c - p, axis=1) - r))
