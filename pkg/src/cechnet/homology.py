"""GF(2) chain complexes and Betti numbers of abstract simplicial complexes."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Iterator, Mapping

import numpy as np

Simplex = tuple[int, ...]


class ComplexNotClosed(ValueError):
    pass


def simplex(vertices: Iterable[int]) -> Simplex:
    """Canonical (sorted, duplicate-free) form of a vertex set."""
    vs = tuple(sorted(int(v) for v in vertices))
    if len(set(vs)) != len(vs):
        raise ValueError(f"duplicate vertex in simplex {vs}")
    if not vs:
        raise ValueError("empty simplex")
    return vs


def facets(s: Simplex) -> Iterator[Simplex]:
    for i in range(len(s)):
        yield s[:i] + s[i + 1:]


class SimplicialComplex:
    """A set of simplices grouped by dimension.

    Construction does not enforce face closure; use :meth:`closure` for that,
    or :meth:`is_closed` to check.  Instances are treated as immutable.
    """

    def __init__(self, simplices: Iterable[Iterable[int]] = ()):
        by_dim: dict[int, set[Simplex]] = {}
        for s in simplices:
            s = simplex(s)
            by_dim.setdefault(len(s) - 1, set()).add(s)
        self._by_dim = {k: frozenset(v) for k, v in by_dim.items()}

    @classmethod
    def closure(cls, simplices: Iterable[Iterable[int]], dim_max: int | None = None) -> "SimplicialComplex":
        """Smallest face-closed complex containing ``simplices``."""
        out: set[Simplex] = set()
        for s in simplices:
            s = simplex(s)
            for k in range(1, len(s) + 1):
                if dim_max is not None and k - 1 > dim_max:
                    break
                out.update(itertools.combinations(s, k))
        return cls(out)

    @property
    def dim(self) -> int:
        return max(self._by_dim, default=-1)

    def simplices(self, k: int) -> list[Simplex]:
        return sorted(self._by_dim.get(k, ()))

    def count(self, k: int) -> int:
        return len(self._by_dim.get(k, ()))

    @property
    def vertices(self) -> list[int]:
        return [s[0] for s in self.simplices(0)]

    def __iter__(self) -> Iterator[Simplex]:
        for k in range(self.dim + 1):
            yield from self.simplices(k)

    def __contains__(self, s) -> bool:
        s = simplex(s)
        return s in self._by_dim.get(len(s) - 1, ())

    def __len__(self) -> int:
        return sum(len(v) for v in self._by_dim.values())

    def __eq__(self, other) -> bool:
        if not isinstance(other, SimplicialComplex):
            return NotImplemented
        return self.as_sets() == other.as_sets()

    def __repr__(self) -> str:
        counts = [self.count(k) for k in range(self.dim + 1)]
        return f"SimplicialComplex(counts={counts})"

    def as_sets(self) -> dict[int, frozenset[Simplex]]:
        return {k: v for k, v in self._by_dim.items() if v}

    def is_closed(self) -> bool:
        for k in range(1, self.dim + 1):
            lower = self._by_dim.get(k - 1, frozenset())
            for s in self._by_dim.get(k, ()):
                if any(f not in lower for f in facets(s)):
                    return False
        return True

    def truncated(self, dim_max: int) -> "SimplicialComplex":
        return SimplicialComplex(s for s in self if len(s) - 1 <= dim_max)

    def relabeled(self, mapping: Mapping[int, int]) -> "SimplicialComplex":
        return SimplicialComplex(tuple(mapping[v] for v in s) for s in self)

    def to_text(self) -> str:
        """One simplex per line, ordered by dimension then lexicographically."""
        return "".join(" ".join(map(str, s)) + "\n" for s in self)

    @classmethod
    def from_text(cls, text: str) -> "SimplicialComplex":
        return cls(tuple(int(t) for t in line.split()) for line in text.splitlines() if line.strip())


@dataclass(frozen=True)
class BoundaryMatrix:
    """Matrix of the boundary map C_k -> C_{k-1} over GF(2)."""

    rows: tuple[Simplex, ...]
    cols: tuple[Simplex, ...]
    data: np.ndarray

    @property
    def shape(self) -> tuple[int, int]:
        return self.data.shape


def boundary_matrix(X: SimplicialComplex, k: int) -> BoundaryMatrix:
    if k < 1:
        raise ValueError("k must be >= 1")
    if not X.is_closed():
        raise ComplexNotClosed("complex not closed")
    rows = tuple(X.simplices(k - 1))
    cols = tuple(X.simplices(k))
    index = {s: i for i, s in enumerate(rows)}
    data = np.zeros((len(rows), len(cols)), dtype=np.uint8)
    for j, s in enumerate(cols):
        for f in facets(s):
            data[index[f], j] = 1
    return BoundaryMatrix(rows, cols, data)


def _column_bits(M) -> list[int]:
    data = M.data if isinstance(M, BoundaryMatrix) else np.asarray(M)
    data = np.asarray(data, dtype=np.uint8) & 1
    if data.ndim != 2:
        raise ValueError("expected a 2-d matrix")
    bits = []
    for col in data.T:
        v = 0
        for i in np.flatnonzero(col):
            v |= 1 << int(i)
        bits.append(v)
    return bits


def rank_gf2(M) -> int:
    """Rank over GF(2) of a 0/1 matrix (or :class:`BoundaryMatrix`)."""
    return _rank_of_vectors(_column_bits(M))


def _rank_of_vectors(vectors: Iterable[int]) -> int:
    pivots: dict[int, int] = {}
    rank = 0
    for v in vectors:
        while v:
            top = v.bit_length() - 1
            if top in pivots:
                v ^= pivots[top]
            else:
                pivots[top] = v
                rank += 1
                break
    return rank


def _boundary_rank(X: SimplicialComplex, k: int) -> int:
    if k < 1 or X.count(k) == 0 or X.count(k - 1) == 0:
        return 0
    return rank_gf2(boundary_matrix(X, k))


def betti(X: SimplicialComplex, k: int) -> int:
    """k-th Betti number: |C_k| - rank d_k - rank d_{k+1}."""
    if k < 0:
        raise ValueError("k must be >= 0")
    if not X.is_closed():
        raise ComplexNotClosed("complex not closed")
    return X.count(k) - _boundary_rank(X, k) - _boundary_rank(X, k + 1)


def betti_numbers(X: SimplicialComplex, upto: int = 1) -> tuple[int, ...]:
    return tuple(betti(X, k) for k in range(upto + 1))


class CycleReducer:
    """Incremental independence test for 1-chains modulo a boundary space.

    Chains are edge sets; vectors are Python ints over an edge index.
    """

    def __init__(self, X: SimplicialComplex):
        self._edge_index = {e: i for i, e in enumerate(X.simplices(1))}
        self._pivots: dict[int, int] = {}
        for tri in X.simplices(2):
            self._insert(self.vector(facets(tri)))

    def vector(self, edges: Iterable[Simplex]) -> int:
        v = 0
        for e in edges:
            v ^= 1 << self._edge_index[simplex(e)]
        return v

    def _reduce(self, v: int) -> int:
        while v:
            top = v.bit_length() - 1
            if top not in self._pivots:
                return v
            v ^= self._pivots[top]
        return 0

    def _insert(self, v: int) -> bool:
        v = self._reduce(v)
        if v:
            self._pivots[v.bit_length() - 1] = v
            return True
        return False

    def is_boundary(self, edges: Iterable[Simplex]) -> bool:
        return self._reduce(self.vector(edges)) == 0

    def add_if_independent(self, edges: Iterable[Simplex]) -> bool:
        """Add the chain to the span if it is independent; report whether it was."""
        return self._insert(self.vector(edges))
