"""Scenario files: a JSON object describing a deployment and protocol knobs.

Example::

    {
      "seed": 0,
      "cells": [{"id": 0, "x": 0.0, "y": 1.05, "r": 0.8, "fenced": false}],
      "dim_max": 3, "t_ack": 10, "t0": 50, "t_max": 100,
      "delta_r": null, "r_min": null, "gamma": 2.0,
      "random": {"count": 25, "box": [0, 0, 5, 5], "radius_range": [0.6, 1.0]}
    }

``delta_r`` and ``r_min`` are absolute lengths; when null each cell uses
1/20 and 1/4 of its initial radius.  Cells from ``random`` are appended after
the listed ones with fresh ids.
"""

from __future__ import annotations

import dataclasses
import json
import math
import random
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Any

from .cech import DEFAULT_DIM_MAX
from .geometry import Tolerance
from .protocol import CellSpec, ProtocolParams


class ScenarioError(ValueError):
    pass


_TOP_FIELDS = {"cells", "dim_max", "t_ack", "t0", "t_max", "delta_r", "r_min", "gamma", "seed", "random"}
_CELL_FIELDS = {"id", "x", "y", "r", "fenced"}
_RANDOM_FIELDS = {"count", "box", "radius_range"}


@dataclass(frozen=True)
class RandomDeployment:
    count: int
    box: tuple[float, float, float, float] = (0.0, 0.0, 5.0, 5.0)
    radius_range: tuple[float, float] = (0.6, 1.0)

    def generate(self, seed: int, first_id: int = 0) -> list[CellSpec]:
        rng = random.Random(f"deploy/{seed}")
        x0, y0, x1, y1 = self.box
        lo, hi = self.radius_range
        return [CellSpec(first_id + i, rng.uniform(x0, x1), rng.uniform(y0, y1), rng.uniform(lo, hi))
                for i in range(self.count)]


@dataclass(frozen=True)
class Scenario:
    seed: int
    cells: tuple[CellSpec, ...] = ()
    dim_max: int = DEFAULT_DIM_MAX
    t_ack: int = 10
    t0: int = 50
    t_max: int = 100
    delta_r: float | None = None
    r_min: float | None = None
    gamma: float = 2.0
    random: RandomDeployment | None = None

    def deployment(self) -> list[CellSpec]:
        """Listed cells plus the seeded random ones, ordered by id."""
        cells = list(self.cells)
        if self.random is not None:
            first = max((c.id for c in cells), default=-1) + 1
            cells += self.random.generate(self.seed, first)
        return sorted(cells, key=lambda c: c.id)

    def tolerance(self) -> Tolerance:
        return Tolerance.for_disks(c.cell.disk for c in self.deployment())

    def params(self) -> ProtocolParams:
        return ProtocolParams(self.tolerance(), dim_max=self.dim_max, t_ack=self.t_ack, t0=self.t0,
                              t_max=self.t_max)

    def replace(self, **changes) -> "Scenario":
        return dataclasses.replace(self, **changes)

    def to_json(self) -> str:
        doc: dict[str, Any] = {
            "seed": self.seed,
            "cells": [{"id": c.id, "x": c.x, "y": c.y, "r": c.r, "fenced": c.fenced} for c in self.cells],
            "dim_max": self.dim_max, "t_ack": self.t_ack, "t0": self.t0, "t_max": self.t_max,
            "delta_r": self.delta_r, "r_min": self.r_min, "gamma": self.gamma,
        }
        if self.random is not None:
            doc["random"] = {"count": self.random.count, "box": list(self.random.box),
                             "radius_range": list(self.random.radius_range)}
        return json.dumps(doc, indent=2) + "\n"


def _reject_unknown(obj: dict, allowed: set, where: str) -> None:
    if not isinstance(obj, dict):
        raise ScenarioError(f"{where}: expected an object")
    extra = set(obj) - allowed
    if extra:
        raise ScenarioError(f"{where}: unknown field(s) {sorted(extra)}")


def _number(v, name: str, positive: bool = False) -> float:
    if isinstance(v, bool) or not isinstance(v, (int, float)) or not math.isfinite(v):
        raise ScenarioError(f"{name} must be a finite number")
    if positive and v <= 0:
        raise ScenarioError(f"{name} must be > 0")
    return float(v)


def _int(v, name: str, minimum: int | None = None) -> int:
    if isinstance(v, bool) or not isinstance(v, int):
        raise ScenarioError(f"{name} must be an integer")
    if minimum is not None and v < minimum:
        raise ScenarioError(f"{name} must be >= {minimum}")
    return v


def parse_scenario(doc: dict) -> Scenario:
    _reject_unknown(doc, _TOP_FIELDS, "scenario")
    if "seed" not in doc:
        raise ScenarioError("scenario: seed is required")
    seed = _int(doc["seed"], "seed", 0)
    cells = []
    for k, c in enumerate(doc.get("cells", [])):
        _reject_unknown(c, _CELL_FIELDS, f"cells[{k}]")
        missing = {"id", "x", "y", "r"} - set(c)
        if missing:
            raise ScenarioError(f"cells[{k}]: missing {sorted(missing)}")
        fenced = c.get("fenced", False)
        if not isinstance(fenced, bool):
            raise ScenarioError(f"cells[{k}].fenced must be a boolean")
        cells.append(CellSpec(_int(c["id"], "id", 0), _number(c["x"], "x"), _number(c["y"], "y"),
                              _number(c["r"], "r", positive=True), fenced))
    ids = [c.id for c in cells]
    if len(set(ids)) != len(ids):
        raise ScenarioError("duplicate cell ids")

    rnd = None
    if doc.get("random") is not None:
        r = doc["random"]
        _reject_unknown(r, _RANDOM_FIELDS, "random")
        box = tuple(_number(v, "box") for v in r.get("box", RandomDeployment.box))
        rr = tuple(_number(v, "radius_range", positive=True)
                   for v in r.get("radius_range", RandomDeployment.radius_range))
        if len(box) != 4 or box[0] >= box[2] or box[1] >= box[3]:
            raise ScenarioError("random.box must be [xmin, ymin, xmax, ymax]")
        if len(rr) != 2 or rr[0] > rr[1]:
            raise ScenarioError("random.radius_range must be [lo, hi]")
        rnd = RandomDeployment(_int(r.get("count"), "random.count", 0), box, rr)

    opt = {}
    for name in ("delta_r", "r_min"):
        if doc.get(name) is not None:
            opt[name] = _number(doc[name], name, positive=True)
    sc = Scenario(
        seed=seed,
        cells=tuple(cells),
        dim_max=_int(doc.get("dim_max", DEFAULT_DIM_MAX), "dim_max", 1),
        t_ack=_int(doc.get("t_ack", 10), "t_ack", 2),
        t0=_int(doc.get("t0", 50), "t0", 1),
        t_max=_int(doc.get("t_max", 100), "t_max", 1),
        gamma=_number(doc.get("gamma", 2.0), "gamma", positive=True),
        random=rnd,
        **opt,
    )
    return sc


BUILTIN = ("fig2", "redundant5", "collision", "dumbbell")


def load_scenario(source: str | Path) -> Scenario:
    """Load from a path, or from a bundled scenario by name (e.g. ``fig2``)."""
    path = Path(source)
    if path.is_file():
        text = path.read_text()
    elif str(source) in BUILTIN:
        text = resources.files("cechnet.data").joinpath(f"{source}.json").read_text()
    else:
        raise ScenarioError(f"no such scenario: {source}")
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ScenarioError(f"invalid JSON: {exc}") from None
    return parse_scenario(doc)
