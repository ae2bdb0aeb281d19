"""Summary quantities read off simulation and cascade traces."""

from __future__ import annotations

from dataclasses import dataclass, replace

from .cascades import CascadeTrace
from .epidemic import D, EpidemicParams, SimulationTrace, StateVector, monte_carlo
from .rng import derive_seed
from .topology import Network, connected_components


class MetricsError(ValueError):
    pass


def outbreak_size(trace: SimulationTrace) -> float:
    """Fraction of nodes that were ever infected.

    Counts entries into I from the event log; a node can only reach D
    through I, so I-entries already cover every node the failure touched.
    """
    return len(trace.ever_infected) / trace.node_count


def dp_connectivity(net: Network, sv: StateVector) -> float:
    """Size of the largest component after removing D nodes, over node_count.

    A node whose control plane is merely infected still forwards, so S, I
    and R nodes all stay in the graph; only D (data plane down) nodes are
    cut out. Established connections inside one surviving component are
    the traffic this fraction stands for.
    """
    if len(sv.states) != net.node_count:
        raise MetricsError(
            f"state vector has {len(sv.states)} entries for {net.node_count} nodes"
        )
    alive = [v for v in range(net.node_count) if sv.states[v] != D]
    if not alive:
        return 0.0
    comps = connected_components(net, alive)
    return max(len(c) for c in comps) / net.node_count


@dataclass(frozen=True)
class StabilizationResult:
    tick: int
    stabilized: bool


def stabilization_time(trace: SimulationTrace) -> StabilizationResult:
    """Earliest tick from which compartment counts never change again.

    When the counts are still moving at the final recorded tick, that
    tick is returned with stabilized=False.
    """
    rows = [row[1:] for row in trace.counts]
    if len(rows) >= 2 and rows[-1] != rows[-2]:
        return StabilizationResult(trace.counts[-1][0], False)
    i = len(rows) - 1
    while i > 0 and rows[i - 1] == rows[-1]:
        i -= 1
    return StabilizationResult(trace.counts[i][0], True)


def failed_fraction(trace: CascadeTrace) -> float:
    """Terminal failed share of the network for either cascade kind.

    Vertical counts failed controllers plus orphaned switches (a switch
    with no live controller is failed for service purposes even though
    its hardware is up); horizontal counts overloaded nodes.
    """
    t = trace.terminal
    n = trace.net.node_count
    if trace.kind == "vertical":
        return (len(t.failed_controllers) + len(t.orphaned_switches)) / n
    return len(t.failed_nodes) / n


@dataclass(frozen=True)
class SweepResult:
    """Outbreak response along a parameter grid, with run bookkeeping."""

    grid: tuple[float, ...]
    response: tuple[float, ...]  # mean outbreak fraction per grid point
    stderr: tuple[float, ...]
    n_runs: int
    epsilon: float

    @property
    def threshold_estimate(self) -> float | None:
        """Smallest grid value whose response exceeds epsilon, if any."""
        for b, r in zip(self.grid, self.response):
            if r > self.epsilon:
                return b
        return None

    def csv(self) -> str:
        lines = ["param,mean_outbreak,stderr,n_runs"]
        for b, r, se in zip(self.grid, self.response, self.stderr):
            lines.append(f"{_fmt(b)},{_fmt(r)},{_fmt(se)},{self.n_runs}")
        th = self.threshold_estimate
        lines.append(f"threshold_estimate={'none' if th is None else _fmt(th)}")
        return "\n".join(lines) + "\n"


def _fmt(x: float) -> str:
    if float(x).is_integer():
        return str(int(x))
    return repr(float(x))


def threshold_sweep(
    net: Network,
    seeds,
    template: EpidemicParams,
    grid,
    n_runs: int,
    max_ticks: int,
    epsilon: float = 0.05,
    base_seed: int = 0,
    stop: str = "absorb",
    n_jobs: int = 1,
) -> SweepResult:
    """Mean outbreak fraction as beta walks the grid, template fixed otherwise.

    Grid point i reruns monte_carlo with the stream derived from
    (base_seed, i), so the whole sweep is reproducible from one seed and
    independent of execution order.
    """
    grid = tuple(float(b) for b in grid)
    if not grid:
        raise MetricsError("grid must be nonempty")
    if any(b2 <= b1 for b1, b2 in zip(grid, grid[1:])):
        raise MetricsError("grid must be strictly increasing")
    if not 0.0 < epsilon < 1.0:
        raise MetricsError(f"epsilon must be in (0, 1), got {epsilon}")
    response = []
    stderrs = []
    for i, beta in enumerate(grid):
        p = replace(template, beta=beta)
        agg = monte_carlo(
            net, seeds, p, max_ticks, stop,
            n_runs=n_runs, base_seed=derive_seed(base_seed, i), n_jobs=n_jobs,
        )
        response.append(agg.mean_outbreak)
        stderrs.append(agg.stderr_outbreak)
    return SweepResult(grid, tuple(response), tuple(stderrs), n_runs, epsilon)
