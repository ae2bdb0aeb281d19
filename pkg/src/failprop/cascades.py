"""Deterministic overload cascades on a two-plane network.

Two engines share one trace shape:

* run_vertical: switches send their request rate to the first live
  controller in their preference list; any controller loaded strictly
  above capacity fails; failover shifts the load and the round repeats
  until nothing new fails. An optional attack adds rate to one switch.

* run_horizontal: data-plane demands follow deterministic shortest
  paths; any node loaded strictly above capacity fails; surviving nodes
  reroute and the round repeats until quiet. An optional injection is
  one more demand, meant to model hostile traffic entering at an edge
  switch.

Both iterations are monotone (failed stays failed), so the outcome does
not depend on evaluation order; the final recorded round is always the
quiet one that confirmed the fixed point.
"""

from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass, field
from math import isfinite
from typing import NamedTuple

from .topology import CONTROLLER, EDGE_SWITCH, SWITCH_ROLES, Network

INF = float("inf")


class ScenarioError(ValueError):
    pass


class Demand(NamedTuple):
    src: int
    dst: int
    volume: float


class Injection(NamedTuple):
    entry: int
    exit: int
    volume: float


def _fmt(x) -> str:
    # compact numbers for CSV/JSON text: 180.0 -> "180", inf -> "inf"
    if x == INF:
        return "inf"
    if float(x).is_integer():
        return str(int(x))
    return repr(float(x))


def _check_map(name: str, mapping: dict):
    for k, v in mapping.items():
        if not isinstance(k, int):
            raise ScenarioError(f"{name} key {k!r} is not a node id")
        if not (isfinite(v) and v >= 0):
            raise ScenarioError(f"{name}[{k}] must be finite and >= 0, got {v}")


@dataclass(frozen=True)
class VerticalScenario:
    """Controller capacities, per-switch request rates, optional attack.

    Controllers absent from controller_capacity are treated as unbounded;
    switches absent from base_rate send nothing.
    """

    controller_capacity: dict[int, float]
    base_rate: dict[int, float]
    attack: tuple[int, float] | None = None

    def __post_init__(self):
        _check_map("controller_capacity", self.controller_capacity)
        _check_map("base_rate", self.base_rate)
        if self.attack is not None:
            target, rate = self.attack
            if not isinstance(target, int):
                raise ScenarioError(f"attack target {target!r} is not a node id")
            if not (isfinite(rate) and rate >= 0):
                raise ScenarioError(f"attack rate must be finite and >= 0, got {rate}")


@dataclass(frozen=True)
class HorizontalScenario:
    """Node capacities, baseline demands, optional injected flow.

    Nodes absent from node_capacity are unbounded. misroute=True flips
    the routing tie-break to the lexicographically largest path, which
    stands in for a buggy route computation.
    """

    node_capacity: dict[int, float]
    demands: tuple[Demand, ...] = ()
    injection: Injection | None = None
    misroute: bool = False

    def __post_init__(self):
        _check_map("node_capacity", self.node_capacity)
        object.__setattr__(self, "demands", tuple(Demand(*d) for d in self.demands))
        for d in self.demands:
            if not (isfinite(d.volume) and d.volume >= 0):
                raise ScenarioError(f"demand {d.src}->{d.dst} volume must be finite >= 0")
        if self.injection is not None:
            inj = Injection(*self.injection)
            object.__setattr__(self, "injection", inj)
            if not (isfinite(inj.volume) and inj.volume >= 0):
                raise ScenarioError("injection volume must be finite and >= 0")


def validate_vertical(net: Network, sc: VerticalScenario) -> list[str]:
    """Raise on a scenario that cannot run; return warnings otherwise."""
    ctrls = set(net.controllers())
    if not ctrls:
        raise ScenarioError("network has no controller nodes")
    for c in sc.controller_capacity:
        if c >= net.node_count or net.roles[c] != CONTROLLER:
            raise ScenarioError(f"capacity key {c} is not a controller")
    for sw in sc.base_rate:
        if sw >= net.node_count or net.roles[sw] not in SWITCH_ROLES:
            raise ScenarioError(f"rate key {sw} is not a switch")
    warnings = []
    if sc.attack is not None:
        target = sc.attack[0]
        if target >= net.node_count or net.roles[target] not in SWITCH_ROLES:
            raise ScenarioError(f"attack target {target} is not a switch")
    for sw in net.switches():
        if not net.controller_prefs.get(sw):
            warnings.append(f"switch {sw} has no controller preference list")
    return warnings


def validate_horizontal(net: Network, sc: HorizontalScenario) -> list[str]:
    """Raise on a scenario that cannot run; return warnings otherwise."""
    def _dp_node(v: int, what: str):
        if not (0 <= v < net.node_count):
            raise ScenarioError(f"{what} {v} is not a node id")
        if net.roles[v] == CONTROLLER:
            raise ScenarioError(f"{what} {v} is a controller, not a data-plane node")

    warnings = []
    for v in sc.node_capacity:
        if not (0 <= v < net.node_count):
            raise ScenarioError(f"capacity key {v} is not a node id")
        if net.roles[v] == CONTROLLER:
            warnings.append(f"capacity on controller {v} has no effect")
    for d in sc.demands:
        _dp_node(d.src, "demand src")
        _dp_node(d.dst, "demand dst")
        if d.src == d.dst:
            raise ScenarioError(f"demand src and dst are both {d.src}")
    if sc.injection is not None:
        inj = sc.injection
        _dp_node(inj.entry, "injection entry")
        _dp_node(inj.exit, "injection exit")
        if inj.entry == inj.exit:
            raise ScenarioError(f"injection entry and exit are both {inj.entry}")
        for v in (inj.entry, inj.exit):
            if net.roles[v] != EDGE_SWITCH:
                warnings.append(f"injection endpoint {v} is not an edge switch")
    return warnings


# ---------------------------------------------------------------------------
# vertical: controller failover overload

def assign_switches(net: Network, failed_controllers: set[int]) -> dict[int, int | None]:
    """Map each switch to its first live preferred controller, else None."""
    out: dict[int, int | None] = {}
    for sw in net.switches():
        out[sw] = next(
            (c for c in net.controller_prefs.get(sw, ()) if c not in failed_controllers),
            None,
        )
    return out


@dataclass(frozen=True)
class VerticalRound:
    index: int
    assignment: dict[int, int | None]
    loads: dict[int, float]  # live controllers only
    failed_now: frozenset[int]
    failed_before: frozenset[int]


@dataclass(frozen=True)
class VerticalTerminal:
    failed_controllers: frozenset[int]
    orphaned_switches: frozenset[int]
    assignment: dict[int, int | None]
    loads: dict[int, float]
    rounds: int


def _effective_rate(sc: VerticalScenario, sw: int) -> float:
    rate = sc.base_rate.get(sw, 0.0)
    if sc.attack is not None and sc.attack[0] == sw:
        rate += sc.attack[1]
    return rate


def run_vertical(net: Network, sc: VerticalScenario) -> "CascadeTrace":
    """Iterate failover and overload to the fixed point.

    Each round reassigns every switch, sums effective request rates per
    live controller, and fails all controllers strictly over capacity at
    once. The loop always ends with one quiet round and never needs more
    than controller_count + 1 rounds total.
    """
    warnings = validate_vertical(net, sc)
    failed: set[int] = set()
    rounds: list[VerticalRound] = []
    while True:
        assignment = assign_switches(net, failed)
        loads = {c: 0.0 for c in net.controllers() if c not in failed}
        for sw, c in assignment.items():
            if c is not None:
                loads[c] += _effective_rate(sc, sw)
        now = frozenset(
            c for c, load in loads.items()
            if load > sc.controller_capacity.get(c, INF)
        )
        rounds.append(VerticalRound(len(rounds) + 1, assignment, loads, now, frozenset(failed)))
        if not now:
            break
        failed |= now
    assert len(rounds) <= len(net.controllers()) + 1
    last = rounds[-1]
    terminal = VerticalTerminal(
        failed_controllers=frozenset(failed),
        orphaned_switches=frozenset(sw for sw, c in last.assignment.items() if c is None),
        assignment=last.assignment,
        loads=last.loads,
        rounds=len(rounds),
    )
    return CascadeTrace("vertical", net, sc, tuple(rounds), terminal, tuple(warnings))


# ---------------------------------------------------------------------------
# horizontal: data-plane capacity overflow

def route_demand(net: Network, alive: set[int], src: int, dst: int,
                 misroute: bool = False) -> list[int] | None:
    """Deterministic shortest path from src to dst inside `alive`.

    Hop count first; among equal-length paths the lexicographically
    smallest node-id sequence wins (largest when misroute is set).
    Returns None when dst is unreachable.
    """
    if src == dst:
        raise ScenarioError(f"route endpoints are both {src}")
    if src not in alive or dst not in alive:
        return None
    # distances to dst, then greedy walk: picking the extremal neighbor one
    # step closer at each hop yields the extremal tied path
    dist = {dst: 0}
    queue = deque([dst])
    while queue:
        v = queue.popleft()
        for u in net.adj[v]:
            if u in alive and u not in dist:
                dist[u] = dist[v] + 1
                queue.append(u)
    if src not in dist:
        return None
    pick = max if misroute else min
    path = [src]
    cur = src
    while cur != dst:
        cur = pick(u for u in net.adj[cur] if u in alive and dist.get(u, -1) == dist[cur] - 1)
        path.append(cur)
    return path


@dataclass(frozen=True)
class LoadMap:
    """Per-node transit volume and the demands that found no path.

    Every routed demand adds its volume to every node on its path,
    endpoints included. Entries in dropped are (kind, src, dst, volume)
    with kind "demand" or "injection".
    """

    load: dict[int, float]
    dropped: tuple[tuple[str, int, int, float], ...] = ()


def _all_flows(sc: HorizontalScenario):
    flows = [("demand", d.src, d.dst, d.volume) for d in sc.demands]
    if sc.injection is not None:
        inj = sc.injection
        flows.append(("injection", inj.entry, inj.exit, inj.volume))
    return flows


def compute_loads(net: Network, alive: set[int], sc: HorizontalScenario) -> LoadMap:
    """Route every demand (and the injection) over `alive`, sum node loads."""
    load = {v: 0.0 for v in alive}
    dropped = []
    for kind, src, dst, volume in _all_flows(sc):
        path = route_demand(net, alive, src, dst, sc.misroute)
        if path is None:
            dropped.append((kind, src, dst, volume))
            continue
        for v in path:
            load[v] += volume
    return LoadMap(load, tuple(dropped))


@dataclass(frozen=True)
class HorizontalRound:
    index: int
    loads: dict[int, float]  # alive nodes only
    dropped: tuple[tuple[str, int, int, float], ...]
    failed_now: frozenset[int]
    failed_before: frozenset[int]


@dataclass(frozen=True)
class HorizontalTerminal:
    failed_nodes: frozenset[int]
    loads: dict[int, float]
    dropped: tuple[tuple[str, int, int, float], ...]
    rounds: int


def run_horizontal(net: Network, sc: HorizontalScenario) -> "CascadeTrace":
    """Iterate routing and overflow to the fixed point.

    Controllers never carry data traffic, so the alive set starts as all
    non-controller nodes. Each round recomputes loads over survivors and
    fails everything strictly over capacity at once; ends with a quiet
    round, after at most node_count rounds.
    """
    warnings = validate_horizontal(net, sc)
    alive = {v for v in range(net.node_count) if net.roles[v] != CONTROLLER}
    failed: set[int] = set()
    rounds: list[HorizontalRound] = []
    while True:
        lm = compute_loads(net, alive, sc)
        now = frozenset(
            v for v, load in lm.load.items()
            if load > sc.node_capacity.get(v, INF)
        )
        rounds.append(
            HorizontalRound(len(rounds) + 1, lm.load, lm.dropped, now, frozenset(failed))
        )
        if not now:
            break
        failed |= now
        alive -= now
    assert len(rounds) <= net.node_count
    last = rounds[-1]
    terminal = HorizontalTerminal(
        failed_nodes=frozenset(failed),
        loads=last.loads,
        dropped=last.dropped,
        rounds=len(rounds),
    )
    return CascadeTrace("horizontal", net, sc, tuple(rounds), terminal, tuple(warnings))


# ---------------------------------------------------------------------------
# shared trace

@dataclass(frozen=True)
class CascadeTrace:
    """Round-by-round record of one cascade run, plus the fixed point."""

    kind: str  # "vertical" | "horizontal"
    net: Network = field(repr=False)
    scenario: VerticalScenario | HorizontalScenario = field(repr=False, default=None)
    rounds: tuple = ()
    terminal: VerticalTerminal | HorizontalTerminal | None = None
    warnings: tuple[str, ...] = ()

    def _subjects(self) -> tuple[int, ...]:
        if self.kind == "vertical":
            return self.net.controllers()
        return tuple(v for v in range(self.net.node_count)
                     if self.net.roles[v] != CONTROLLER)

    def _cap_of(self, subject: int) -> float:
        if self.kind == "vertical":
            return self.scenario.controller_capacity.get(subject, INF)
        return self.scenario.node_capacity.get(subject, INF)

    def csv(self) -> str:
        """Per-round per-subject rows: round,<id>,load,capacity,status."""
        header = "round,controller,load,capacity,status" if self.kind == "vertical" \
            else "round,node,load,capacity,status"
        lines = [header]
        for rnd in self.rounds:
            for subject in self._subjects():
                if subject in rnd.failed_before:
                    load, status = "", "down"
                elif subject in rnd.failed_now:
                    load, status = _fmt(rnd.loads[subject]), "failed"
                else:
                    load, status = _fmt(rnd.loads[subject]), "ok"
                lines.append(
                    f"{rnd.index},{subject},{load},{_fmt(self._cap_of(subject))},{status}"
                )
        return "\n".join(lines) + "\n"

    def dropped_csv(self) -> str:
        """Horizontal only: one row per (round, unroutable demand)."""
        if self.kind != "horizontal":
            raise ScenarioError("dropped log exists only for horizontal cascades")
        lines = ["round,kind,src,dst,volume"]
        for rnd in self.rounds:
            for kind, src, dst, volume in rnd.dropped:
                lines.append(f"{rnd.index},{kind},{src},{dst},{_fmt(volume)}")
        return "\n".join(lines) + "\n"

    def terminal_json(self) -> str:
        t = self.terminal
        if self.kind == "vertical":
            payload = {
                "kind": "vertical",
                "rounds": t.rounds,
                "failed_controllers": sorted(t.failed_controllers),
                "orphaned_switches": sorted(t.orphaned_switches),
                "assignment": {str(sw): c for sw, c in sorted(t.assignment.items())},
                "loads": {str(c): t.loads[c] for c in sorted(t.loads)},
            }
        else:
            payload = {
                "kind": "horizontal",
                "rounds": t.rounds,
                "failed_nodes": sorted(t.failed_nodes),
                "dropped": [list(d) for d in t.dropped],
                "loads": {str(v): t.loads[v] for v in sorted(t.loads)},
            }
        if self.warnings:
            payload["warnings"] = list(self.warnings)
        return json.dumps(payload, sort_keys=True, indent=2) + "\n"
