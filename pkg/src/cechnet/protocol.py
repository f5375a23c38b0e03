"""Per-cell protocol: neighbor discovery, distributed Čech computation,
boundary-cycle detection and the distributed downhill power reduction.

Each :class:`CellAgent` is driven by a :class:`~cechnet.simnet.Simulator`
and only learns about other cells through messages.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

from .cech import DEFAULT_DIM_MAX, Cell, LocalView, build_cech_centralized, local_simplices, right_hand_precedes
from .geometry import Disk, Side, Tolerance, disks_overlap, side_of_edge
from .homology import Simplex, betti_numbers
from .simnet import Message, MessageKind, Simulator, TimerHandle

# betti numbers 0 and 1 only need the 2-skeleton
VERIFY_DIM = 2


class Phase(enum.IntEnum):
    DISCOVERY = 0
    EXCHANGE = 1
    HOLES = 2
    OPTIMIZING = 3
    DONE = 4


class Goal(enum.IntEnum):
    BUILD = 1
    HOLES = 2
    OPTIMIZE = 3


@dataclass(frozen=True)
class ProtocolParams:
    tol: Tolerance
    dim_max: int = DEFAULT_DIM_MAX
    t_ack: int = 10
    t0: int = 50
    t_max: int = 100
    # PAUSE must reach every neighbor, and a crossing PAUSE must come back,
    # before the attempt is resolved: two hops plus one tick
    verify_delay: int = 3
    auto_fence_boundary: bool = True

    def __post_init__(self):
        if self.t_ack < 2:
            raise ValueError("t_ack must cover a ping and its confirmation (>= 2 ticks)")
        if self.t0 < 1 or self.t_max < 1:
            raise ValueError("t0 and t_max must be positive")
        if self.dim_max < 1:
            raise ValueError("dim_max must be >= 1")


def canonical_cycle(cycle: Sequence[int]) -> tuple[int, ...]:
    """Rotate to the smallest id and orient toward the smaller neighbor."""
    c = list(cycle)
    i = c.index(min(c))
    c = c[i:] + c[:i]
    if len(c) > 2 and c[-1] < c[1]:
        c = [c[0]] + c[:0:-1]
    return tuple(c)


def cycle_edges(cycle: Sequence[int]) -> list[Simplex]:
    n = len(cycle)
    return [tuple(sorted((cycle[i], cycle[(i + 1) % n]))) for i in range(n)]


def detect_cover_edges(owner: int, star: Iterable[Simplex], centers: Mapping[int, Disk],
                       tol: Tolerance) -> set[int]:
    """Partners of ``owner`` along edges that lack filled triangles on both sides."""
    star = list(star)
    edges = sorted(s for s in star if len(s) == 2 and owner in s)
    triangles = [s for s in star if len(s) == 3 and owner in s]
    partners = set()
    me = centers[owner].center
    for e in edges:
        other = e[0] if e[1] == owner else e[1]
        b = centers[other].center
        sides = set()
        for t in triangles:
            if other in t:
                third = next(v for v in t if v != owner and v != other)
                sides.add(side_of_edge(centers[third].center, me, b, tol))
        if not (Side.LEFT in sides and Side.RIGHT in sides):
            partners.add(other)
    return partners


def local_betti(cells: Sequence[Cell], tol: Tolerance) -> tuple[int, int]:
    return betti_numbers(build_cech_centralized(cells, VERIFY_DIM, tol), 1)


def quick_verify(me: Cell, new_radius: float, neighbors: Sequence[Cell], tol: Tolerance) -> bool:
    """Local coverage check after one cell changes its radius.

    Compares Betti numbers 0 and 1 of the Čech complex of the cell and its
    neighbors before and after the change.  A radius of 0 removes the cell.
    """
    before = [me, *neighbors]
    after = [Cell(me.id, me.disk.with_radius(new_radius)), *neighbors]
    return local_betti(before, tol) == local_betti(after, tol)


@dataclass
class CellAgent:
    sim: Simulator
    id: int
    initial_disk: Disk
    params: ProtocolParams
    goal: Goal = Goal.OPTIMIZE
    fenced: bool = False
    delta_r: float | None = None
    r_min: float | None = None

    phase: Phase = Phase.DISCOVERY
    neighbors: dict[int, Disk] = field(default_factory=dict)
    view: LocalView | None = None
    cover_partners: set[int] = field(default_factory=set)
    cycles: list[tuple[int, ...]] = field(default_factory=list)
    paused_by: set[int] = field(default_factory=set)
    pending_pause: bool = False
    irreducible: bool = False
    turned_off: bool = False
    parked: bool = False
    boundary: bool = False
    radius: float = 0.0
    r_old: float = 0.0
    tentative: float = 0.0

    def __post_init__(self):
        self.radius = self.initial_disk.radius
        self.r_initial = self.initial_disk.radius
        if self.delta_r is None:
            self.delta_r = self.r_initial / 20
        if self.r_min is None:
            self.r_min = self.r_initial / 4
        self.rng = self.sim.rng_for(self.id)
        self.reductions = 0
        self._shares: dict[int, tuple[Simplex, ...]] = {}
        self._early_bdetect: list[Message] = []
        self._left: set[int] = set()
        self._waiting = False
        self._verify: TimerHandle | None = None
        self._reduce: TimerHandle | None = None

    # -- plumbing -----------------------------------------------------------

    @property
    def disk(self) -> Disk:
        return self.initial_disk.with_radius(self.radius)

    @property
    def cell(self) -> Cell:
        return Cell(self.id, self.disk)

    def _note(self, kind: str, payload: str = "-") -> None:
        self.sim.record(kind, self.id, self.id, payload)

    def _set_phase(self, phase: Phase) -> None:
        self.phase = phase
        self._note("PHASE", f"phase={phase.name}")

    def _send(self, dest: int, kind: MessageKind, **payload) -> None:
        self.sim.send_backhaul(self.id, dest, Message(kind, self.id, **payload))

    def active_neighbors(self) -> list[int]:
        return sorted(n for n, d in self.neighbors.items() if d.radius > 0)

    def neighbor_cells(self) -> list[Cell]:
        return [Cell(n, self.neighbors[n]) for n in self.active_neighbors()]

    def start(self) -> None:
        self.sim.broadcast_radio(self.id, Message(MessageKind.PING, self.id, disk=self.disk))
        self.sim.schedule_timer(self.id, self.params.t_ack, "discovery")

    def on_message(self, msg: Message) -> None:
        handler = {
            MessageKind.PING: self.on_ping,
            MessageKind.CONFIRM: self.on_confirm,
            MessageKind.SHARE: self.on_share,
            MessageKind.BDETECT: self.on_bdetect,
            MessageKind.PAUSE: self.on_pause,
            MessageKind.CONTINUE: self.on_continue,
            MessageKind.RUPDATE: self.on_radius_update,
            MessageKind.TURNOFF: self.on_turn_off,
        }[msg.kind]
        handler(msg)

    def on_timer(self, tag: str) -> None:
        {
            "discovery": self.on_discovery_timeout,
            "holes": self.on_holes_timeout,
            "reduce": self.on_reduce_timer,
            "verify": self.on_verify_timer,
        }[tag]()

    # -- discovery and simplex exchange -----------------------------------------

    def on_ping(self, msg: Message) -> None:
        if self.phase != Phase.DISCOVERY:
            return
        if disks_overlap(self.disk, msg.disk, self.params.tol):
            self.neighbors[msg.sender] = msg.disk
            self._send(msg.sender, MessageKind.CONFIRM, disk=self.disk)

    def on_confirm(self, msg: Message) -> None:
        if self.phase == Phase.DISCOVERY:
            self.neighbors[msg.sender] = msg.disk

    def on_discovery_timeout(self) -> None:
        self._set_phase(Phase.EXCHANGE)
        me = self.cell
        right = [c for c in self.neighbor_cells() if right_hand_precedes(me, c)]
        self._left = set(self.neighbors) - {c.id for c in right}
        self.view = local_simplices(me, right, self.params.dim_max, self.params.tol)
        self.view.disks.update(self.neighbors)
        own = sorted(self.view.simplices)
        for c in right:
            frag = tuple(s for s in own if c.id in s)
            self._send(c.id, MessageKind.SHARE, simplices=frag)
        self._maybe_finish_exchange()

    def on_share(self, msg: Message) -> None:
        if msg.sender in self._shares:
            self._note("WARN", f"duplicate-share from={msg.sender}")
            return
        self._shares[msg.sender] = msg.simplices
        if self.phase == Phase.EXCHANGE:
            self._maybe_finish_exchange()

    def _maybe_finish_exchange(self) -> None:
        if self.phase != Phase.EXCHANGE or not self._left <= set(self._shares):
            return
        for sender in sorted(self._left):
            self.view.simplices.update(self._shares[sender])
        if self.goal == Goal.BUILD:
            self._set_phase(Phase.DONE)
            return
        self._enter_holes()

    # -- boundary cycles --------------------------------------------------------

    def detect_cover_edges(self) -> set[int]:
        centers = dict(self.neighbors)
        centers[self.id] = self.disk
        self.cover_partners = detect_cover_edges(self.id, self.view.star(), centers, self.params.tol)
        return self.cover_partners

    def _enter_holes(self) -> None:
        self._set_phase(Phase.HOLES)
        self.detect_cover_edges()
        for p in sorted(self.cover_partners):
            self._send(p, MessageKind.BDETECT, path=(self.id,))
        self.sim.schedule_timer(self.id, self.params.t0, "holes")
        early, self._early_bdetect = self._early_bdetect, []
        for m in early:
            self.boundary_cycle_step(m)

    def on_bdetect(self, msg: Message) -> None:
        if self.phase < Phase.HOLES:
            self._early_bdetect.append(msg)
        elif self.phase == Phase.HOLES:
            self.boundary_cycle_step(msg)
        else:
            self._note("WARN", f"late-bdetect from={msg.sender}")

    def boundary_cycle_step(self, h: Message) -> None:
        path = h.path
        if len(set(path)) != len(path):
            self._note("WARN", "malformed-path " + ",".join(map(str, path)))
            return
        if self.id in path:
            cycle = path[path.index(self.id):]
            if len(cycle) >= 3:
                c = canonical_cycle(cycle)
                if c not in self.cycles:
                    self.cycles.append(c)
                    self._note("CYCLE", "path=" + ",".join(map(str, c)))
            return
        extended = path + (self.id,)
        for p in sorted(self.cover_partners - {h.sender}):
            self._send(p, MessageKind.BDETECT, path=extended)

    def on_holes_timeout(self) -> None:
        if self.goal == Goal.HOLES:
            self._set_phase(Phase.DONE)
            return
        self._set_phase(Phase.OPTIMIZING)
        if self.params.auto_fence_boundary and self.cover_partners:
            self.boundary = True
            self.fenced = True
        if self.fenced:
            self._set_phase(Phase.DONE)
            return
        self._arm()

    # -- downhill optimization --------------------------------------------------

    def _arm(self) -> None:
        delay = self.rng.randint(1, self.params.t_max)
        self._reduce = self.sim.schedule_timer(self.id, delay, "reduce")

    def _broadcast_neighbors(self, kind: MessageKind, **payload) -> None:
        for n in self.active_neighbors():
            self._send(n, kind, **payload)

    def on_reduce_timer(self) -> None:
        if self.phase != Phase.OPTIMIZING:
            return
        if self.paused_by:
            self._waiting = True
            return
        self.try_reduce()

    def try_reduce(self) -> None:
        """Start one reduction attempt; it resolves after ``verify_delay`` ticks."""
        if self.fenced or self.irreducible or self.turned_off or self.pending_pause:
            return
        self.r_old = self.radius
        # from the step count, so repeated subtraction does not drift
        r = self.r_initial - (self.reductions + 1) * self.delta_r
        if r < self.r_min - 1e-12 * self.r_initial:
            r = 0.0
        self.tentative = r
        self.pending_pause = True
        self._note("ATTEMPT", f"r={self.tentative!r}")
        self._broadcast_neighbors(MessageKind.PAUSE)
        self._verify = self.sim.schedule_timer(self.id, self.params.verify_delay, "verify")

    def on_pause(self, msg: Message) -> None:
        self.paused_by.add(msg.sender)
        if self.pending_pause and msg.sender < self.id:
            self._cancel()

    def _cancel(self) -> None:
        self.pending_pause = False
        self._verify.cancel()
        self._note("CANCEL", f"r={self.radius!r}")
        self._broadcast_neighbors(MessageKind.CONTINUE)
        self._arm()

    def on_continue(self, msg: Message) -> None:
        self.paused_by.discard(msg.sender)
        if not self.paused_by and self._waiting and self.phase == Phase.OPTIMIZING:
            self._waiting = False
            self.try_reduce()

    def quick_verify(self) -> bool:
        return quick_verify(self.cell, self.tentative, self.neighbor_cells(), self.params.tol)

    def on_verify_timer(self) -> None:
        self.pending_pause = False
        if self.quick_verify():
            self._commit()
        else:
            self._revert()

    def _commit(self) -> None:
        self.radius = self.tentative
        if self.radius == 0.0:
            self.turned_off = True
            self._note("COMMIT", "r=0.0")
            self._broadcast_neighbors(MessageKind.CONTINUE)
            self._broadcast_neighbors(MessageKind.TURNOFF)
            self._note("OFF")
            self._set_phase(Phase.DONE)
            return
        self.reductions += 1
        self._note("COMMIT", f"r={self.radius!r}")
        self._broadcast_neighbors(MessageKind.RUPDATE, radius=self.radius)
        self._broadcast_neighbors(MessageKind.CONTINUE)
        self._arm()

    def _revert(self) -> None:
        turn_off = self.tentative == 0.0
        self.radius = self.r_old
        self._note("REVERT", f"r={self.radius!r}")
        self._broadcast_neighbors(MessageKind.CONTINUE)
        if turn_off:
            # retried once a neighbor's state changes
            self.parked = True
            self._note("PARK")
        else:
            self.irreducible = True
            self._note("IRREDUCIBLE")
            self._set_phase(Phase.DONE)

    def _neighbor_changed(self) -> None:
        if self.parked and self.phase == Phase.OPTIMIZING and not self.pending_pause:
            self.parked = False
            self._arm()

    def on_radius_update(self, msg: Message) -> None:
        if msg.sender in self.neighbors:
            self.neighbors[msg.sender] = self.neighbors[msg.sender].with_radius(msg.radius)
        self._neighbor_changed()

    def on_turn_off(self, msg: Message) -> None:
        if msg.sender in self.neighbors:
            self.neighbors[msg.sender] = self.neighbors[msg.sender].with_radius(0.0)
        self.paused_by.discard(msg.sender)
        self._neighbor_changed()

    def at_floor(self) -> bool:
        """True when the next reduction step would be a switch-off attempt."""
        nxt = self.r_initial - (self.reductions + 1) * self.delta_r
        return nxt < self.r_min - 1e-12 * self.r_initial


@dataclass(frozen=True)
class CellSpec:
    id: int
    x: float
    y: float
    r: float
    fenced: bool = False

    @property
    def cell(self) -> Cell:
        return Cell(self.id, Disk.at(self.x, self.y, self.r))


class Network:
    """A simulator populated with one agent per cell."""

    def __init__(self, specs: Sequence[CellSpec], params: ProtocolParams, goal: Goal,
                 seed: int = 0, delta_r: float | None = None, r_min: float | None = None):
        self.sim = Simulator(seed)
        self.params = params
        self.agents: dict[int, CellAgent] = {}
        for s in sorted(specs, key=lambda s: s.id):
            agent = CellAgent(self.sim, s.id, Disk.at(s.x, s.y, s.r), params, goal,
                              fenced=s.fenced, delta_r=delta_r, r_min=r_min)
            self.agents[s.id] = agent
            self.sim.add_agent(agent)

    def run(self, max_ticks: int = 1_000_000):
        for a in self.agents.values():
            a.start()
        return self.sim.run_until_quiescent(max_ticks)

    def views(self) -> list[LocalView]:
        return [a.view for a in self.agents.values() if a.view is not None]

    def cells(self) -> list[Cell]:
        return [a.cell for a in self.agents.values()]

    def cycles(self) -> list[tuple[int, ...]]:
        return sorted({c for a in self.agents.values() for c in a.cycles}, key=lambda c: (len(c), c))

    def radii(self) -> dict[int, float]:
        return {i: a.radius for i, a in self.agents.items()}
