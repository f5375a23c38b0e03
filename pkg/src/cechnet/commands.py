"""The four subcommands as functions returning file contents and an exit code."""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path

from .cech import Cell, build_cech_centralized, merge_views
from .homology import betti_numbers
from .protocol import VERIFY_DIM, Goal, Network, Phase
from .report import classify_cycles, dump_metrics, metrics, render_power, render_scene, rows_to_csv, total_power
from .scenario import Scenario, ScenarioError
from .simnet import NoQuiescence

EXIT_OK = 0
EXIT_INVARIANT = 2
EXIT_NO_QUIESCENCE = 3
EXIT_BAD_INPUT = 4

MAX_TICKS = 1_000_000


@dataclass
class Outcome:
    files: dict[str, str] = field(default_factory=dict)
    exit_code: int = EXIT_OK
    message: str = ""
    network: Network | None = None

    def write(self, out_dir: str | Path) -> None:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        for name, text in self.files.items():
            (out / name).write_text(text)


def _network(sc: Scenario, goal: Goal) -> Network:
    return Network(sc.deployment(), sc.params(), goal, seed=sc.seed, delta_r=sc.delta_r, r_min=sc.r_min)


def _run(net: Network) -> Outcome | None:
    try:
        net.run(MAX_TICKS)
    except NoQuiescence as exc:
        return Outcome({"trace.log": exc.trace.to_text()}, EXIT_NO_QUIESCENCE, str(exc), net)
    stuck = sorted(a.id for a in net.agents.values() if a.view is None or
                   (a.goal != Goal.OPTIMIZE and a.phase != Phase.DONE))
    if stuck:
        return Outcome({"trace.log": net.sim.trace.to_text()}, EXIT_NO_QUIESCENCE,
                       f"cells {stuck} never finished their phase", net)
    return None


def _initial_cells(sc: Scenario) -> list[Cell]:
    return [c.cell for c in sc.deployment()]


def _exchange_complex(sc: Scenario, net: Network, oracle_check: bool, notes: dict):
    X = merge_views(net.views(), sc.dim_max)
    if oracle_check:
        central = build_cech_centralized(_initial_cells(sc), sc.dim_max, sc.tolerance())
        if central != X:
            notes["oracle_check"] = "fail"
            return X, "distributed complex differs from the centralized build"
        notes["oracle_check"] = "pass"
    else:
        notes["oracle_check"] = "skipped"
    return X, None


def cmd_build(sc: Scenario, oracle_check: bool = True) -> Outcome:
    net = _network(sc, Goal.BUILD)
    failed = _run(net)
    if failed:
        return failed
    notes: dict = {}
    X, err = _exchange_complex(sc, net, oracle_check, notes)
    trace = net.sim.trace
    m = metrics(X, trace, net.radii(), sc.gamma, command="build", cells=len(net.agents), **notes)
    out = Outcome({"complex.txt": X.to_text(), "metrics.json": dump_metrics(m), "trace.log": trace.to_text()},
                  network=net)
    if err:
        out.exit_code, out.message = EXIT_INVARIANT, err
    return out


def cmd_holes(sc: Scenario, oracle_check: bool = True) -> Outcome:
    net = _network(sc, Goal.HOLES)
    failed = _run(net)
    if failed:
        return failed
    notes: dict = {}
    X, err = _exchange_complex(sc, net, oracle_check, notes)
    fenced = {c.id for c in sc.deployment() if c.fenced}
    report = classify_cycles(X, net.cycles(), _initial_cells(sc), fenced)
    trace = net.sim.trace
    m = metrics(X, trace, net.radii(), sc.gamma, command="holes", cells=len(net.agents),
                cycles_found=len(net.cycles()), interior_cycles=len(report.interior),
                outer_cycles=len(report.outer), **notes)
    out = Outcome({"complex.txt": X.to_text(), "cycles.txt": report.to_text(), "metrics.json": dump_metrics(m),
                   "trace.log": trace.to_text()}, network=net)
    if err:
        out.exit_code, out.message = EXIT_INVARIANT, err
    return out


class _SafetyMonitor:
    """Recomputes the global Betti numbers after every committed step."""

    def __init__(self, net: Network, sc: Scenario):
        self.net = net
        self.sc = sc
        self.tol = sc.tolerance()
        self.target = betti_numbers(build_cech_centralized(net.cells(), VERIFY_DIM, self.tol), 1)
        self.last = dict(net.radii())
        self.power = total_power(self.last, sc.gamma)
        self.initial_power = self.power
        self.steps: list[dict] = []
        self.violations: list[str] = []

    def __call__(self, rec) -> None:
        if rec.kind != "COMMIT":
            return
        agent = self.net.agents[rec.sender]
        old, new = self.last[rec.sender], agent.radius
        self.last[rec.sender] = new
        b = betti_numbers(build_cech_centralized(self.net.cells(), VERIFY_DIM, self.tol), 1)
        power = total_power(self.last, self.sc.gamma)
        step = {"step": len(self.steps) + 1, "tick": rec.tick, "cell": rec.sender,
                "action": "off" if new == 0 else "reduce", "r_old": old, "r_new": new,
                "total_power": power, "beta0": b[0], "beta1": b[1]}
        self.steps.append(step)
        if b != self.target:
            self.violations.append(f"step {step['step']} (tick {rec.tick}, cell {rec.sender}): "
                                   f"betti {b} != {self.target}")
        if not power < self.power:
            self.violations.append(f"step {step['step']}: power did not decrease")
        self.power = power


def cmd_optimize(sc: Scenario, oracle_check: bool = True) -> Outcome:
    net = _network(sc, Goal.OPTIMIZE)
    monitor = _SafetyMonitor(net, sc)
    net.sim.observers.append(monitor)
    failed = _run(net)
    if failed:
        return failed
    notes: dict = {}
    _, err = _exchange_complex(sc, net, oracle_check, notes)
    violations = list(monitor.violations)
    if err:
        violations.append(err)
    final_cells = net.cells()
    X = build_cech_centralized(final_cells, sc.dim_max, sc.tolerance())
    final_b = betti_numbers(X, 1) if len(X) else (0, 0)
    if len(X) and final_b != monitor.target:
        violations.append(f"final betti {final_b} != initial {monitor.target}")
    unsettled = sorted(a.id for a in net.agents.values()
                       if not (a.fenced or a.turned_off or a.irreducible or a.at_floor()))
    if unsettled:
        violations.append(f"cells {unsettled} stopped above their floor radius")
    radii = net.radii()
    final_power = total_power(radii, sc.gamma)
    ip = monitor.initial_power
    trace = net.sim.trace
    m = metrics(X, trace, radii, sc.gamma, command="optimize", cells=len(net.agents),
                initial_beta0=monitor.target[0], initial_beta1=monitor.target[1],
                initial_power=ip, final_power=final_power,
                power_saving_ratio=(1 - final_power / ip) if ip > 0 else 0.0,
                fenced=sum(a.fenced for a in net.agents.values()),
                irreducible=sum(a.irreducible for a in net.agents.values()),
                violations=violations, **notes)
    step_cols = ["step", "tick", "cell", "action", "r_old", "r_new", "total_power", "beta0", "beta1"]
    files = {
        "complex.txt": X.to_text(),
        "metrics.json": dump_metrics(m),
        "trace.log": trace.to_text(),
        "steps.csv": rows_to_csv(step_cols, ([s[c] for c in step_cols] for s in monitor.steps)),
        "radii.csv": rows_to_csv(["id", "x", "y", "r_initial", "r_final", "state"], (
            [a.id, a.initial_disk.center.x, a.initial_disk.center.y, a.r_initial, a.radius, _state(a)]
            for a in net.agents.values())),
        "power.svg": render_power(monitor.steps, ip),
    }
    out = Outcome(files, network=net)
    if violations:
        out.exit_code, out.message = EXIT_INVARIANT, "; ".join(violations)
    return out


def _state(agent) -> str:
    if agent.turned_off:
        return "off"
    if agent.boundary:
        return "boundary"
    if agent.fenced:
        return "fenced"
    if agent.irreducible:
        return "irreducible"
    if agent.at_floor():
        return "floor"
    return "active"


def read_radii(path: str | Path) -> dict[int, float]:
    """Final radii from an optimize ``radii.csv``."""
    with open(path, newline="") as fh:
        try:
            return {int(row["id"]): float(row["r_final"]) for row in csv.DictReader(fh)}
        except (KeyError, ValueError) as exc:
            raise ScenarioError(f"bad radii file {path}: {exc}") from None


def apply_radii(sc: Scenario, radii: dict[int, float]) -> Scenario:
    """Freeze the deployment with new radii; switched-off cells are dropped."""
    cells = []
    for c in sc.deployment():
        r = radii.get(c.id, c.r)
        if r > 0:
            cells.append(type(c)(c.id, c.x, c.y, r, c.fenced))
    return sc.replace(cells=tuple(cells), random=None)


def cmd_render(sc: Scenario, result_dir: str | Path | None = None) -> Outcome:
    if result_dir is not None:
        sc = apply_radii(sc, read_radii(Path(result_dir) / "radii.csv"))
    holes = cmd_holes(sc, oracle_check=False)
    if holes.exit_code != EXIT_OK:
        return holes
    net = holes.network
    X = merge_views(net.views(), sc.dim_max)
    fenced = {c.id for c in sc.deployment() if c.fenced}
    report = classify_cycles(X, net.cycles(), net.cells(), fenced)
    return Outcome({"render.svg": render_scene(net.cells(), X, report.interior)}, network=net)
