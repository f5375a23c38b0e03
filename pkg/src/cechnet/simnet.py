"""Deterministic discrete-event harness for message-passing cells.

Time is an integer tick.  Events are ordered by ``(tick, sequence)`` so
equal-time events are handled in the order they were scheduled, which makes a
run a pure function of the agents' behaviour and their seeds.
"""

from __future__ import annotations

import enum
import hashlib
import heapq
import itertools
import random
from dataclasses import dataclass, field
from typing import Any, Callable, Iterable, Protocol

from .geometry import Disk, distance


class MessageKind(enum.Enum):
    PING = "PING"
    CONFIRM = "CONFIRM"
    SHARE = "SHARE"
    BDETECT = "BDETECT"
    PAUSE = "PAUSE"
    CONTINUE = "CONTINUE"
    RUPDATE = "RUPDATE"
    TURNOFF = "TURNOFF"


MESSAGE_KINDS = tuple(k.value for k in MessageKind)


def _fmt(x: float) -> str:
    return repr(float(x))


@dataclass(frozen=True)
class Message:
    kind: MessageKind
    sender: int
    disk: Disk | None = None
    path: tuple[int, ...] = ()
    radius: float | None = None
    simplices: tuple[tuple[int, ...], ...] = ()

    def __post_init__(self):
        k = self.kind
        if k in (MessageKind.PING, MessageKind.CONFIRM) and self.disk is None:
            raise ValueError(f"{k.value} needs a disk")
        if k is MessageKind.BDETECT and not self.path:
            raise ValueError("BDETECT needs a path")
        if k is MessageKind.RUPDATE and self.radius is None:
            raise ValueError("RUPDATE needs a radius")

    def encode(self) -> str:
        """Canonical payload text used in traces."""
        k = self.kind
        if k in (MessageKind.PING, MessageKind.CONFIRM):
            d = self.disk
            return f"x={_fmt(d.center.x)},y={_fmt(d.center.y)},r={_fmt(d.radius)}"
        if k is MessageKind.BDETECT:
            return "path=" + ",".join(map(str, self.path))
        if k is MessageKind.RUPDATE:
            return f"r={_fmt(self.radius)}"
        if k is MessageKind.SHARE:
            body = ";".join(",".join(map(str, s)) for s in sorted(self.simplices))
            digest = hashlib.sha256(body.encode()).hexdigest()[:12]
            return f"n={len(self.simplices)},sha={digest}"
        return "-"


@dataclass(frozen=True)
class TraceRecord:
    tick: int
    kind: str
    sender: int
    dest: int
    payload: str = "-"

    def line(self) -> str:
        return f"{self.tick} {self.kind} {self.sender} {self.dest} {self.payload}"


@dataclass
class SimulationTrace:
    records: list[TraceRecord] = field(default_factory=list)

    def __iter__(self):
        return iter(self.records)

    def __len__(self):
        return len(self.records)

    def to_text(self) -> str:
        return "".join(r.line() + "\n" for r in self.records)

    def of_kind(self, *kinds: str) -> list[TraceRecord]:
        return [r for r in self.records if r.kind in kinds]

    def count_by_kind(self, kinds: Iterable[str] = MESSAGE_KINDS) -> dict[str, int]:
        counts = {k: 0 for k in kinds}
        for r in self.records:
            if r.kind in counts:
                counts[r.kind] += 1
        return counts


class NoQuiescence(RuntimeError):
    def __init__(self, message: str, trace: SimulationTrace):
        super().__init__(message)
        self.trace = trace


class Agent(Protocol):
    id: int

    @property
    def disk(self) -> Disk: ...

    def on_message(self, msg: Message) -> None: ...

    def on_timer(self, tag: str) -> None: ...


@dataclass
class TimerHandle:
    target: int
    tag: str
    due: int
    cancelled: bool = False

    def cancel(self) -> None:
        self.cancelled = True


@dataclass(order=True)
class _Event:
    time: int
    seq: int
    target: int = field(compare=False)
    message: Message | None = field(compare=False, default=None)
    timer: TimerHandle | None = field(compare=False, default=None)


class Simulator:
    def __init__(self, seed: int = 0, radio_latency: int = 1, backhaul_latency: int = 1):
        if radio_latency < 1 or backhaul_latency < 1:
            raise ValueError("latencies must be positive")
        self.seed = seed
        self.radio_latency = radio_latency
        self.backhaul_latency = backhaul_latency
        self.now = 0
        self.agents: dict[int, Any] = {}
        self.trace = SimulationTrace()
        self.observers: list[Callable[[TraceRecord], None]] = []
        self._queue: list[_Event] = []
        self._seq = itertools.count()

    def rng_for(self, cell_id: int) -> random.Random:
        # string seeds hash through sha512, stable across platforms
        return random.Random(f"{self.seed}/{cell_id}")

    def add_agent(self, agent) -> None:
        if agent.id in self.agents:
            raise ValueError(f"duplicate agent {agent.id}")
        self.agents[agent.id] = agent

    def record(self, kind: str, sender: int, dest: int, payload: str = "-") -> None:
        rec = TraceRecord(self.now, kind, sender, dest, payload)
        self.trace.records.append(rec)
        for obs in self.observers:
            obs(rec)

    def _push(self, time: int, target: int, message=None, timer=None) -> None:
        heapq.heappush(self._queue, _Event(time, next(self._seq), target, message, timer))

    def broadcast_radio(self, sender: int, msg: Message) -> frozenset[int]:
        """Deliver to every other active cell within twice the sender's radius."""
        src = self.agents[sender].disk
        if src.radius <= 0:
            raise ValueError(f"cell {sender} is switched off and cannot transmit")
        reach = 2 * src.radius
        got = []
        for cid in sorted(self.agents):
            if cid == sender:
                continue
            d = self.agents[cid].disk
            if d.radius > 0 and distance(src.center, d.center) <= reach:
                got.append(cid)
                self._push(self.now + self.radio_latency, cid, message=msg)
        return frozenset(got)

    def send_backhaul(self, sender: int, dest: int, msg: Message) -> None:
        if dest not in self.agents:
            raise KeyError(f"unknown destination {dest}")
        self._push(self.now + self.backhaul_latency, dest, message=msg)

    def schedule_timer(self, target: int, delay: int, tag: str = "timer") -> TimerHandle:
        if delay <= 0:
            raise ValueError("timer delay must be positive")
        handle = TimerHandle(target, tag, self.now + delay)
        self._push(handle.due, target, timer=handle)
        return handle

    def pending(self) -> int:
        return sum(1 for e in self._queue if e.timer is None or not e.timer.cancelled)

    def run_until_quiescent(self, max_ticks: int = 1_000_000) -> SimulationTrace:
        while self._queue:
            ev = self._queue[0]
            if ev.timer is not None and ev.timer.cancelled:
                heapq.heappop(self._queue)
                continue
            if ev.time > max_ticks:
                raise NoQuiescence(f"no quiescence within {max_ticks} ticks", self.trace)
            heapq.heappop(self._queue)
            self.now = ev.time
            agent = self.agents[ev.target]
            if ev.message is not None:
                m = ev.message
                self.record(m.kind.value, m.sender, ev.target, m.encode())
                agent.on_message(m)
            else:
                self.record("TIMER", ev.target, ev.target, f"tag={ev.timer.tag}")
                agent.on_timer(ev.timer.tag)
        return self.trace
