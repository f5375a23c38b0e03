"""Čech complexes of disk families, built centrally or per cell.

A vertex set belongs to the complex when its disks pairwise overlap, all its
facets belong, and the disks share a common point.  Membership is a pure
function of the disks involved, which is what makes the per-cell views agree
with the centralized build.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

from .geometry import Disk, Tolerance, common_intersection_nonempty, disks_overlap
from .homology import Simplex, SimplicialComplex, facets

DEFAULT_DIM_MAX = 3


class InconsistentViews(ValueError):
    pass


@dataclass(frozen=True)
class Cell:
    id: int
    disk: Disk

    @property
    def x(self) -> float:
        return self.disk.center.x

    @property
    def y(self) -> float:
        return self.disk.center.y


def order_key(c: Cell) -> tuple[float, float, int]:
    return (c.x, c.y, c.id)


def right_hand_precedes(a: Cell, b: Cell) -> bool:
    """True iff ``b`` lies on ``a``'s right hand side.

    Smaller x first; equal x is broken by smaller y, and coincident centers
    by smaller id.
    """
    return order_key(a) < order_key(b)


class _Membership:
    """Memoized simplex test over a fixed disk table."""

    def __init__(self, disks: Mapping[int, Disk], tol: Tolerance):
        self.disks = disks
        self.tol = tol
        self._memo: dict[Simplex, bool] = {}

    def __call__(self, s: Simplex) -> bool:
        hit = self._memo.get(s)
        if hit is not None:
            return hit
        if len(s) == 1:
            ok = True
        elif len(s) == 2:
            ok = disks_overlap(self.disks[s[0]], self.disks[s[1]], self.tol)
        else:
            ok = all(self(f) for f in facets(s)) and common_intersection_nonempty(
                [self.disks[v] for v in s], self.tol)
        self._memo[s] = ok
        return ok


def _star_from(root: Cell, candidates: Sequence[Cell], member: _Membership, dim_max: int) -> list[Simplex]:
    """Simplices whose leftmost vertex is ``root`` and whose other vertices come from ``candidates``."""
    cands = sorted(candidates, key=order_key)
    out: list[Simplex] = [(root.id,)]
    # grow ordered vertex lists; each set is reached exactly once
    frontier: list[tuple[list[int], int]] = [([root.id], 0)]
    while frontier:
        nxt = []
        for verts, start in frontier:
            if len(verts) - 1 >= dim_max:
                continue
            for idx in range(start, len(cands)):
                c = cands[idx]
                s = tuple(sorted(verts + [c.id]))
                if member(s):
                    out.append(s)
                    nxt.append((verts + [c.id], idx + 1))
        frontier = nxt
    return out


def _tolerance(cells: Iterable[Cell]) -> Tolerance:
    return Tolerance.for_disks(c.disk for c in cells)


@dataclass
class LocalView:
    """What one cell knows: its own and its neighbors' disks plus simplices."""

    owner: int
    disks: dict[int, Disk]
    simplices: set[Simplex] = field(default_factory=set)

    @property
    def s0(self) -> list[int]:
        return sorted({v for s in self.simplices if self.owner in s for v in s} | {self.owner})

    def by_dim(self, k: int) -> list[Simplex]:
        return sorted(s for s in self.simplices if len(s) == k + 1)

    def star(self) -> set[Simplex]:
        return {s for s in self.simplices if self.owner in s}


def local_simplices(me: Cell, right_neighbors: Sequence[Cell], dim_max: int = DEFAULT_DIM_MAX,
                    tol: Tolerance | None = None) -> LocalView:
    """Simplices a cell discovers itself: those whose leftmost vertex it is."""
    cells = [me, *right_neighbors]
    tol = tol or _tolerance(cells)
    member = _Membership({c.id: c.disk for c in cells}, tol)
    view = LocalView(me.id, {c.id: c.disk for c in cells})
    view.simplices.update(_star_from(me, right_neighbors, member, dim_max))
    return view


def overlap_graph(cells: Sequence[Cell], tol: Tolerance) -> dict[int, list[Cell]]:
    """Right-hand neighbors of each cell in the pairwise-overlap graph."""
    ordered = sorted(cells, key=order_key)
    right: dict[int, list[Cell]] = {c.id: [] for c in cells}
    for i, a in enumerate(ordered):
        for b in ordered[i + 1:]:
            if disks_overlap(a.disk, b.disk, tol):
                right[a.id].append(b)
    return right


def build_cech_centralized(cells: Sequence[Cell], dim_max: int = DEFAULT_DIM_MAX,
                           tol: Tolerance | None = None) -> SimplicialComplex:
    ids = [c.id for c in cells]
    if len(set(ids)) != len(ids):
        raise ValueError("duplicate cell ids")
    cells = [c for c in cells if c.disk.radius > 0]
    if not cells:
        return SimplicialComplex()
    tol = tol or _tolerance(cells)
    member = _Membership({c.id: c.disk for c in cells}, tol)
    right = overlap_graph(cells, tol)
    out: list[Simplex] = []
    for c in cells:
        out.extend(_star_from(c, right[c.id], member, dim_max))
    return SimplicialComplex(out)


def merge_views(views: Sequence[LocalView], dim_max: int = DEFAULT_DIM_MAX) -> SimplicialComplex:
    known: dict[int, Disk] = {}
    everything: list[Simplex] = []
    for view in views:
        for cid, disk in view.disks.items():
            if cid in known and known[cid] != disk:
                raise InconsistentViews("inconsistent views")
            known.setdefault(cid, disk)
        everything.extend(view.simplices)
        everything.append((view.owner,))
    return SimplicialComplex.closure(everything, dim_max=dim_max)
