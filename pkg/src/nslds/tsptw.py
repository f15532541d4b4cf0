"""Traveling salesman with time windows.

Instance files are line oriented::

    # comment
    n
    id x y ready due [service]

with ``id`` 0 the depot.  Travel times are Euclidean distances.  A late
arrival counts one violated window and the tour carries on, so every
ordering of the cities is a complete tour with score

    Tcost = -distance - 1e6 * violations
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, List, Optional, Sequence, Tuple

from .search import State

PENALTY = 1e6


class InstanceError(ValueError):
    pass


@dataclass(frozen=True)
class TsptwInstance:
    name: str
    coords: Tuple[Tuple[float, float], ...]
    ready: Tuple[float, ...]
    due: Tuple[float, ...]
    service: Tuple[float, ...]
    travel: Tuple[Tuple[float, ...], ...]

    @property
    def n(self) -> int:
        return len(self.ready)

    @classmethod
    def from_points(cls, coords, ready, due, service=None, name="tsptw"):
        n = len(coords)
        service = tuple(service) if service is not None else (0.0,) * n
        if not (len(ready) == len(due) == len(service) == n):
            raise InstanceError("per-city arrays must all have length n")
        for i, (r, d) in enumerate(zip(ready, due)):
            if d < r:
                raise InstanceError(f"city {i}: due {d} < ready {r}")
        travel = tuple(
            tuple(math.dist(a, b) for b in coords) for a in coords
        )
        return cls(name, tuple(map(tuple, coords)), tuple(map(float, ready)),
                   tuple(map(float, due)), tuple(map(float, service)), travel)


def load_tsptw(text: str, name: str = "tsptw") -> TsptwInstance:
    rows = []
    n = None
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        fields = line.split()
        if n is None:
            if len(fields) != 1:
                raise InstanceError(f"line {lineno}: expected city count")
            try:
                n = int(fields[0])
            except ValueError:
                raise InstanceError(f"line {lineno}: bad city count {fields[0]!r}") from None
            if n < 1:
                raise InstanceError(f"line {lineno}: city count must be >= 1")
            continue
        if len(fields) not in (5, 6):
            raise InstanceError(f"line {lineno}: expected 'id x y ready due [service]'")
        try:
            cid = int(fields[0])
            vals = [float(f) for f in fields[1:]]
        except ValueError:
            raise InstanceError(f"line {lineno}: non-numeric field") from None
        if cid != len(rows):
            raise InstanceError(f"line {lineno}: expected city id {len(rows)}, got {cid}")
        if vals[3] < vals[2]:
            raise InstanceError(f"line {lineno}: due < ready for city {cid}")
        if len(vals) == 5 and vals[4] < 0:
            raise InstanceError(f"line {lineno}: negative service time")
        rows.append((vals, lineno))
    if n is None:
        raise InstanceError("empty instance")
    if len(rows) != n:
        raise InstanceError(f"declared {n} cities but found {len(rows)}")
    coords = [(v[0], v[1]) for v, _ in rows]
    return TsptwInstance.from_points(
        coords,
        [v[2] for v, _ in rows],
        [v[3] for v, _ in rows],
        [v[4] if len(v) == 5 else 0.0 for v, _ in rows],
        name=name,
    )


def tcost(distance: float, violations: int) -> float:
    return -distance - PENALTY * violations


def arrival(inst: TsptwInstance, time: float, src: int, dst: int) -> float:
    return max(time + inst.travel[src][dst], inst.ready[dst])


def due_then_distance(state: "TsptwState") -> List[int]:
    """Default move ordering: on-time cities first, then by due date and
    travel time, ties by city id."""
    inst, here = state.instance, state.visited[-1]
    keyed = []
    for c in state.unvisited():
        late = arrival(inst, state.time, here, c) > inst.due[c]
        keyed.append((late, inst.due[c], inst.travel[here][c], c))
    keyed.sort()
    return [k[-1] for k in keyed]


MoveOrder = Callable[["TsptwState"], List[int]]


class TsptwState(State):
    """Partial tour starting at the depot.

    Playing the last unvisited city also accounts the return leg, so a state
    is terminal exactly when every city has been visited.
    """

    __slots__ = ("instance", "visited", "time", "violations", "distance", "order")

    def __init__(self, instance: TsptwInstance, visited=(0,), time=0.0,
                 violations=0, distance=0.0, order: MoveOrder = due_then_distance):
        self.instance = instance
        self.visited = tuple(visited)
        self.time = time
        self.violations = violations
        self.distance = distance
        self.order = order

    @classmethod
    def initial(cls, instance: TsptwInstance, order: MoveOrder = due_then_distance):
        return cls(instance, (0,), instance.service[0], 0, 0.0, order)

    def unvisited(self) -> List[int]:
        seen = set(self.visited)
        return [c for c in range(self.instance.n) if c not in seen]

    def is_terminal(self):
        return len(self.visited) == self.instance.n

    def legal_moves(self):
        if self.is_terminal():
            return []
        return self.order(self)

    def play(self, city):
        inst = self.instance
        here = self.visited[-1]
        t = arrival(inst, self.time, here, city)
        viol = self.violations + (t > inst.due[city])
        dist = self.distance + inst.travel[here][city]
        t += inst.service[city]
        visited = self.visited + (city,)
        if len(visited) == inst.n:
            t = max(t + inst.travel[city][0], inst.ready[0])
            viol += t > inst.due[0]
            dist += inst.travel[city][0]
        return TsptwState(inst, visited, t, viol, dist, self.order)

    def score(self):
        return tcost(self.distance, self.violations)

    def __repr__(self):
        return f"TsptwState(visited={self.visited}, score={self.score():.2f})"


def evaluate_tour(inst: TsptwInstance, order: Sequence[int]) -> Tuple[float, int]:
    """Distance and violation count of depot -> order -> depot, from scratch."""
    t = inst.service[0]
    dist, viol, here = 0.0, 0, 0
    for c in order:
        dist += inst.travel[here][c]
        t = max(t + inst.travel[here][c], inst.ready[c])
        viol += t > inst.due[c]
        t += inst.service[c]
        here = c
    if order:
        dist += inst.travel[here][0]
        t = max(t + inst.travel[here][0], inst.ready[0])
        viol += t > inst.due[0]
    return dist, viol


def dumps_tsptw(inst: TsptwInstance) -> str:
    lines = [str(inst.n)]
    for i in range(inst.n):
        x, y = inst.coords[i]
        lines.append(f"{i} {x!r} {y!r} {inst.ready[i]!r} {inst.due[i]!r} {inst.service[i]!r}")
    return "\n".join(lines) + "\n"


def random_instance(rng, n: int, span: float = 100.0, slack: Optional[float] = None,
                    name: str = "random") -> TsptwInstance:
    """Random instance whose windows are built around a random feasible tour,
    then jittered so some orders become infeasible."""
    coords = [(rng.uniform(0, span), rng.uniform(0, span)) for _ in range(n)]
    tour = list(range(1, n))
    rng.shuffle(tour)
    slack = span / 2 if slack is None else slack
    ready, due = [0.0] * n, [0.0] * n
    t, here = 0.0, 0
    for c in tour:
        t += math.dist(coords[here], coords[c])
        lo = max(0.0, t - rng.uniform(0, slack))
        ready[c], due[c] = lo, t + rng.uniform(0, slack)
        here = c
    t += math.dist(coords[here], coords[0])
    due[0] = t + span * 2
    return TsptwInstance.from_points(coords, ready, due, name=name)
