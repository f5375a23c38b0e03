"""Reports for finished runs: cycle classification, metrics, figures.

Figures are written as SVG by matplotlib with a
fixed hash salt and no date stamp, so the same input renders to the same bytes.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import matplotlib

matplotlib.use("Agg")
from matplotlib.figure import Figure  # noqa: E402
from matplotlib.patches import Circle, Polygon  # noqa: E402

from .cech import Cell  # noqa: E402
from .homology import CycleReducer, SimplicialComplex, betti_numbers  # noqa: E402
from .protocol import cycle_edges  # noqa: E402
from .simnet import MESSAGE_KINDS, SimulationTrace  # noqa: E402

matplotlib.rcParams["svg.hashsalt"] = "cechnet"
matplotlib.rcParams["svg.fonttype"] = "path"


@dataclass
class CycleReport:
    interior: list[tuple[int, ...]] = field(default_factory=list)
    outer: list[tuple[int, ...]] = field(default_factory=list)
    redundant: list[tuple[int, ...]] = field(default_factory=list)

    def to_text(self) -> str:
        lines = []
        for label, group in (("interior", self.interior), ("outer", self.outer), ("redundant", self.redundant)):
            lines += [f"{label} " + " ".join(map(str, c)) for c in group]
        return "".join(line + "\n" for line in lines)


def _point_in_polygon(p, poly) -> bool:
    """Even-odd test; points on an edge count as inside."""
    x, y = p
    inside = False
    n = len(poly)
    for i in range(n):
        (x1, y1), (x2, y2) = poly[i], poly[(i + 1) % n]
        cross = (x2 - x1) * (y - y1) - (y2 - y1) * (x - x1)
        if abs(cross) <= 1e-12 and min(x1, x2) - 1e-12 <= x <= max(x1, x2) + 1e-12 \
                and min(y1, y2) - 1e-12 <= y <= max(y1, y2) + 1e-12:
            return True
        if (y1 > y) != (y2 > y):
            xin = x1 + (y - y1) * (x2 - x1) / (y2 - y1)
            if x < xin:
                inside = not inside
    return inside


def _component_of(X: SimplicialComplex, v: int) -> set[int]:
    adj: dict[int, set[int]] = {u: set() for u in X.vertices}
    for a, b in X.simplices(1):
        adj[a].add(b)
        adj[b].add(a)
    seen, stack = {v}, [v]
    while stack:
        for w in adj[stack.pop()]:
            if w not in seen:
                seen.add(w)
                stack.append(w)
    return seen


def classify_cycles(X: SimplicialComplex, cycles: Sequence[Sequence[int]], cells: Sequence[Cell],
                    fenced: set[int] = frozenset()) -> CycleReport:
    """Split reported boundary cycles into hole cycles and the rest.

    A cycle is outer when its polygon encloses every center of its connected
    component, or when all its cells are fenced.  Hole (interior) cycles are
    picked greedily, shortest and non-outer first, as long as each one is
    independent of the triangles' boundaries and of the cycles already picked.
    """
    pos = {c.id: (c.x, c.y) for c in cells}
    report = CycleReport()
    reducer = CycleReducer(X)
    outer = {}
    for c in cycles:
        comp = _component_of(X, c[0])
        poly = [pos[v] for v in c]
        outer[tuple(c)] = all(v in fenced for v in c) or all(_point_in_polygon(pos[u], poly) for u in comp)
    for c in sorted((tuple(c) for c in cycles), key=lambda c: (outer[c], len(c), c)):
        if reducer.add_if_independent(cycle_edges(c)):
            report.interior.append(c)
        elif outer[c]:
            report.outer.append(c)
        else:
            report.redundant.append(c)
    for group in (report.interior, report.outer, report.redundant):
        group.sort(key=lambda c: (len(c), c))
    return report


def total_power(radii: Mapping[int, float], gamma: float) -> float:
    return float(sum(r ** gamma for _, r in sorted(radii.items()) if r > 0))


def metrics(X: SimplicialComplex, trace: SimulationTrace, radii: Mapping[int, float], gamma: float,
            **extra) -> dict:
    b0, b1 = betti_numbers(X, 1) if len(X) else (0, 0)
    out = {
        "beta0": b0,
        "beta1": b1,
        "simplex_counts": [X.count(k) for k in range(X.dim + 1)],
        "total_power": total_power(radii, gamma),
        "message_counts": trace.count_by_kind(MESSAGE_KINDS),
        "committed": len(trace.of_kind("COMMIT")),
        "reverted": len(trace.of_kind("REVERT")),
        "cancelled": len(trace.of_kind("CANCEL")),
        "turned_off": len(trace.of_kind("OFF")),
        "ticks": trace.records[-1].tick if trace.records else 0,
    }
    out.update(extra)
    return out


def dump_metrics(m: dict) -> str:
    return json.dumps(m, indent=2, sort_keys=True) + "\n"


def rows_to_csv(header: Sequence[str], rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def _svg(fig: Figure) -> str:
    buf = io.StringIO()
    fig.savefig(buf, format="svg", metadata={"Date": None})
    return buf.getvalue()


def render_scene(cells: Sequence[Cell], X: SimplicialComplex, holes: Sequence[Sequence[int]] = ()) -> str:
    """Disks on the left, their complex on the right, hole cycles in red."""
    fig = Figure(figsize=(10, 4.5))
    ax_d, ax_c = fig.subplots(1, 2)
    active = [c for c in cells if c.disk.radius > 0]
    pos = {c.id: (c.x, c.y) for c in cells}
    for ax, title in ((ax_d, "cells"), (ax_c, "Čech complex")):
        ax.set_aspect("equal")
        ax.set_title(title)
        ax.set_xticks([])
        ax.set_yticks([])
    for c in active:
        disk = Circle((c.x, c.y), c.disk.radius, facecolor="tab:blue", edgecolor="tab:blue", alpha=0.2)
        disk.set_gid(f"disk-{c.id}")
        ax_d.add_patch(disk)
        ax_d.plot([c.x], [c.y], "k.", ms=3)
        ax_d.annotate(f"c{c.id}", (c.x, c.y), fontsize=8, xytext=(3, 3), textcoords="offset points")
    for tri in X.simplices(2):
        p = Polygon([pos[v] for v in tri], closed=True, facecolor="tab:blue", alpha=0.25, edgecolor="none")
        p.set_gid("simplex-" + "-".join(map(str, tri)))
        ax_c.add_patch(p)
    for a, b in X.simplices(1):
        (line,) = ax_c.plot([pos[a][0], pos[b][0]], [pos[a][1], pos[b][1]], color="k", lw=0.8)
        line.set_gid(f"edge-{a}-{b}")
    for cyc in holes:
        pts = [pos[v] for v in cyc] + [pos[cyc[0]]]
        (line,) = ax_c.plot([p[0] for p in pts], [p[1] for p in pts], color="tab:red", lw=2.5, alpha=0.8)
        line.set_gid("cycle-" + "-".join(map(str, cyc)))
    for v in X.vertices:
        ax_c.plot([pos[v][0]], [pos[v][1]], "ko", ms=3)
        ax_c.annotate(f"v{v}", pos[v], fontsize=8, xytext=(3, 3), textcoords="offset points")
    if active:
        x0 = min(c.x - c.disk.radius for c in active)
        x1 = max(c.x + c.disk.radius for c in active)
        y0 = min(c.y - c.disk.radius for c in active)
        y1 = max(c.y + c.disk.radius for c in active)
        for ax in (ax_d, ax_c):
            ax.set_xlim(x0, x1)
            ax.set_ylim(y0, y1)
    fig.tight_layout()
    return _svg(fig)


def render_power(steps: Sequence[Mapping], initial_power: float) -> str:
    """Total power after each committed step."""
    fig = Figure(figsize=(6, 3.5))
    ax = fig.subplots()
    xs = [0] + [i + 1 for i in range(len(steps))]
    ys = [initial_power] + [s["total_power"] for s in steps]
    ax.step(xs, ys, where="post", color="tab:blue")
    ax.set_xlabel("committed step")
    ax.set_ylabel("total power")
    ax.grid(alpha=0.3)
    fig.tight_layout()
    return _svg(fig)
