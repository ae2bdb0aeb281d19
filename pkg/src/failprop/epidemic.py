"""Discrete-time stochastic compartment dynamics on a Network.

Four model families over node states S/I/R/D:

    SI    S -> I                      (infection only, I absorbing)
    SIS   S -> I -> S                 (recovery with delta1)
    SIR   S -> I -> R                 (immunizing recovery with delta1)
    SID   S -> I -> D -> S, I -> S    (control-plane repair delta1,
                                       takedown tau, node repair gamma)

Updates are synchronous: every transition at tick t+1 is computed from
the tick-t states. A node infected at tick t+1 transmits no earlier than
tick t+2, and D/R neighbors never transmit.

Randomness contract, relied on for reproducibility: per tick, one pass in
node-id ascending order consumes transition draws (a draw happens whenever
the node's state has an exit in the model, regardless of parameter
values), then a second id-ascending pass consumes one infection draw per
S node with at least one infected neighbor. Competing I-exits in SID use
a single uniform u: u < tau goes to D, tau <= u < tau+delta1 goes to S.
"""

from __future__ import annotations

import json
import random
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

from .rng import derive_seed
from .topology import Network

S = "S"
I = "I"
R = "R"
D = "D"

MODELS = ("SI", "SIS", "SIR", "SID")

# states that consume a transition draw, per model
_LEGAL = {
    "SI": frozenset((S, I)),
    "SIS": frozenset((S, I)),
    "SIR": frozenset((S, I, R)),
    "SID": frozenset((S, I, D)),
}


class EpidemicError(ValueError):
    pass


def _check_prob(name: str, value: float):
    if not 0.0 <= value <= 1.0:
        raise EpidemicError(f"{name} must be in [0, 1], got {value}")


@dataclass(frozen=True)
class EpidemicParams:
    """Model family plus rates; unused rates must stay at 0.

    beta: per-neighbor per-tick infection probability.
    delta1: I-exit back to S (SIS/SID) or to R (SIR).
    tau: I -> D takedown probability (SID only).
    gamma: D -> S repair probability (SID only).
    """

    model: str
    beta: float
    delta1: float = 0.0
    tau: float = 0.0
    gamma: float = 0.0

    def __post_init__(self):
        if self.model not in MODELS:
            raise EpidemicError(f"unknown model {self.model!r} (choices: {', '.join(MODELS)})")
        _check_prob("beta", self.beta)
        _check_prob("delta1", self.delta1)
        _check_prob("tau", self.tau)
        _check_prob("gamma", self.gamma)
        if self.model == "SI" and (self.delta1 or self.tau or self.gamma):
            raise EpidemicError("SI has no recovery: delta1, tau, gamma must be 0")
        if self.model in ("SIS", "SIR") and (self.tau or self.gamma):
            raise EpidemicError(f"{self.model} has no D state: tau and gamma must be 0")
        if self.model == "SID" and self.tau + self.delta1 > 1.0:
            raise EpidemicError(
                f"SID needs tau + delta1 <= 1, got {self.tau} + {self.delta1}"
            )


@dataclass(frozen=True)
class StateVector:
    """Per-node states at one tick; index is the node id."""

    states: tuple[str, ...]
    tick: int = 0

    def counts(self) -> tuple[int, int, int, int]:
        st = self.states
        return (st.count(S), st.count(I), st.count(R), st.count(D))


def initial_state(net: Network, seeds) -> StateVector:
    states = [S] * net.node_count
    for v in seeds:
        if not (0 <= v < net.node_count):
            raise EpidemicError(f"seed {v} is not a node id")
        states[v] = I
    return StateVector(tuple(states), 0)


def infection_probability(k: int, beta: float) -> float:
    """Chance an S node with k infected neighbors catches at least one hit."""
    if k < 0:
        raise EpidemicError(f"neighbor count must be >= 0, got {k}")
    _check_prob("beta", beta)
    if k == 0:
        return 0.0
    return 1.0 - (1.0 - beta) ** k


def step(net: Network, sv: StateVector, p: EpidemicParams, rng: random.Random) -> StateVector:
    """One synchronous update; consumes draws per the module contract."""
    cur = sv.states
    n = net.node_count
    if len(cur) != n:
        raise EpidemicError(f"state vector has {len(cur)} entries for {n} nodes")
    legal = _LEGAL[p.model]
    nxt = list(cur)
    model = p.model
    infected: list[int] = []

    for v in range(n):
        st = cur[v]
        if st == S:
            continue
        if st == I:
            infected.append(v)
            if model == "SID":
                u = rng.random()
                if u < p.tau:
                    nxt[v] = D
                elif u < p.tau + p.delta1:
                    nxt[v] = S
            elif model == "SIS":
                if rng.random() < p.delta1:
                    nxt[v] = S
            elif model == "SIR":
                if rng.random() < p.delta1:
                    nxt[v] = R
            # SI: absorbing, no draw
        elif st == D and model == "SID":
            if rng.random() < p.gamma:
                nxt[v] = S
        elif st == R and model == "SIR":
            pass
        elif st not in legal:
            raise EpidemicError(f"node {v}: state {st!r} illegal for {model}")

    if infected:
        pressure = [0] * n
        for v in infected:
            for u in net.adj[v]:
                pressure[u] += 1
        comp = 1.0 - p.beta
        for v in range(n):
            if cur[v] == S and pressure[v]:
                if rng.random() < 1.0 - comp ** pressure[v]:
                    nxt[v] = I

    return StateVector(tuple(nxt), sv.tick + 1)


@dataclass
class SimulationTrace:
    """Full record of one run: per-tick counts plus the state-change log."""

    node_count: int
    model: str
    counts: list[tuple[int, int, int, int, int]]  # (tick, S, I, R, D)
    events: list[tuple[int, int, str, str]]  # (tick, node, from, to)
    final_states: tuple[str, ...]

    @property
    def final_tick(self) -> int:
        return self.counts[-1][0]

    @property
    def ever_infected(self) -> set[int]:
        return {v for _, v, _, to in self.events if to == I}

    def counts_csv(self) -> str:
        lines = ["tick,S,I,R,D"]
        lines += [f"{t},{s},{i},{r},{d}" for t, s, i, r, d in self.counts]
        return "\n".join(lines) + "\n"

    def events_csv(self) -> str:
        lines = ["tick,node,from,to"]
        lines += [f"{t},{v},{a},{b}" for t, v, a, b in self.events]
        return "\n".join(lines) + "\n"


def run(
    net: Network,
    seeds,
    p: EpidemicParams,
    max_ticks: int,
    stop: str = "absorb",
    rng_seed: int = 0,
) -> SimulationTrace:
    """Simulate from the seeded state until absorption or the tick budget.

    stop="absorb" ends the run at the first tick with no I and no D nodes
    (still capped by max_ticks); stop="fixed_ticks" always produces rows
    for ticks 0..max_ticks. Identical arguments give identical traces.
    """
    seeds = set(seeds)
    if not seeds:
        raise EpidemicError("seeds must be nonempty")
    if max_ticks < 1:
        raise EpidemicError(f"max_ticks must be >= 1, got {max_ticks}")
    if stop not in ("absorb", "fixed_ticks"):
        raise EpidemicError(f"stop must be 'absorb' or 'fixed_ticks', got {stop!r}")

    sv = initial_state(net, seeds)
    rng = random.Random(rng_seed)
    events = [(0, v, S, I) for v in sorted(seeds)]
    counts = [(0, *sv.counts())]

    while sv.tick < max_ticks:
        row = counts[-1]
        if row[2] == 0 and row[4] == 0:  # no I, no D: nothing left to draw
            if stop == "absorb":
                break
            counts.extend((t, row[1], row[2], row[3], row[4])
                          for t in range(sv.tick + 1, max_ticks + 1))
            break
        prev = sv.states
        sv = step(net, sv, p, rng)
        t = sv.tick
        events.extend(
            (t, v, prev[v], sv.states[v])
            for v in range(net.node_count)
            if prev[v] != sv.states[v]
        )
        counts.append((t, *sv.counts()))

    return SimulationTrace(net.node_count, p.model, counts, events, sv.states)


def _mean(xs) -> float:
    return sum(xs) / len(xs)


def _stderr(xs) -> float:
    n = len(xs)
    if n < 2:
        return 0.0
    m = _mean(xs)
    var = sum((x - m) ** 2 for x in xs) / (n - 1)
    return (var / n) ** 0.5


@dataclass
class AggregateStats:
    """Replica-order-independent summary of a Monte Carlo batch.

    Per-tick rows are aligned to the longest replica; shorter replicas
    are extended by carrying their final row forward, which is exact for
    absorbed runs (an absorbed state never changes again).
    """

    node_count: int
    n_runs: int
    ticks: list[int]
    mean_counts: list[tuple[float, float, float, float]]  # per tick (S, I, R, D)
    min_counts: list[tuple[int, int, int, int]]
    max_counts: list[tuple[int, int, int, int]]
    outbreak_sizes: list[float] = field(default_factory=list)  # fraction, per replica

    @property
    def mean_outbreak(self) -> float:
        return _mean(self.outbreak_sizes)

    @property
    def stderr_outbreak(self) -> float:
        return _stderr(self.outbreak_sizes)

    def as_dict(self) -> dict:
        return {
            "node_count": self.node_count,
            "n_runs": self.n_runs,
            "ticks": self.ticks,
            "mean_counts": [list(row) for row in self.mean_counts],
            "min_counts": [list(row) for row in self.min_counts],
            "max_counts": [list(row) for row in self.max_counts],
            "outbreak_sizes": self.outbreak_sizes,
            "mean_outbreak": self.mean_outbreak,
            "stderr_outbreak": self.stderr_outbreak,
        }

    def json(self) -> str:
        return json.dumps(self.as_dict(), sort_keys=True, indent=2) + "\n"


def monte_carlo(
    net: Network,
    seeds,
    p: EpidemicParams,
    max_ticks: int,
    stop: str = "absorb",
    n_runs: int = 1,
    base_seed: int = 0,
    n_jobs: int = 1,
) -> AggregateStats:
    """Run n_runs independent replicas and aggregate their traces.

    Replica i always uses the seed derived from (base_seed, i), so the
    result does not depend on n_jobs or scheduling order.
    """
    if n_runs < 1:
        raise EpidemicError(f"n_runs must be >= 1, got {n_runs}")

    def one(i: int) -> SimulationTrace:
        return run(net, seeds, p, max_ticks, stop, derive_seed(base_seed, i))

    if n_jobs > 1:
        with ThreadPoolExecutor(max_workers=n_jobs) as pool:
            traces = list(pool.map(one, range(n_runs)))
    else:
        traces = [one(i) for i in range(n_runs)]

    length = max(len(tr.counts) for tr in traces)
    ticks = list(range(length))
    sums = [[0, 0, 0, 0] for _ in range(length)]
    mins = [[None] * 4 for _ in range(length)]
    maxs = [[None] * 4 for _ in range(length)]
    for tr in traces:
        for t in range(length):
            row = tr.counts[t] if t < len(tr.counts) else tr.counts[-1]
            for j in range(4):
                x = row[j + 1]
                sums[t][j] += x
                if mins[t][j] is None or x < mins[t][j]:
                    mins[t][j] = x
                if maxs[t][j] is None or x > maxs[t][j]:
                    maxs[t][j] = x

    return AggregateStats(
        node_count=net.node_count,
        n_runs=n_runs,
        ticks=ticks,
        mean_counts=[tuple(x / n_runs for x in row) for row in sums],
        min_counts=[tuple(row) for row in mins],
        max_counts=[tuple(row) for row in maxs],
        outbreak_sizes=[len(tr.ever_infected) / net.node_count for tr in traces],
    )
