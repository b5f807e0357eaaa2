"""Network model for capacitated hybrid graphs with explicit path systems.

A network couples a hybrid graph (every edge is individually directed or
undirected) with per-edge capacities and a list of source/sink commodities.
Flows live directly on explicit per-commodity path lists: a flow assigns a
nonnegative value to each listed path, and an edge is feasible when the gross
sum of the values of all paths using it stays within its capacity.

Everything in this module is immutable after construction and safe to share
across threads; the operations are pure functions.
"""

from __future__ import annotations

from dataclasses import dataclass, field

# Absolute slack allowed on every capacity comparison.
CAP_TOLERANCE = 1e-9


class ModelError(ValueError):
    """A network, path system, or flow violates a structural rule."""


@dataclass(frozen=True)
class Edge:
    """One capacitated edge; ``directed`` fixes the usable orientation."""

    id: str
    tail: str
    head: str
    capacity: float
    directed: bool

    def __post_init__(self) -> None:
        if not self.capacity >= 0.0:
            raise ModelError(f"edge {self.id!r}: capacity must be >= 0, got {self.capacity}")

    def other_end(self, node: str) -> str:
        return self.head if node == self.tail else self.tail


@dataclass(frozen=True)
class Commodity:
    """A source/sink pair with a positive demand bound."""

    index: int  # 1-based position in the network's commodity list
    source: str
    sink: str
    bound: float

    def __post_init__(self) -> None:
        if not self.bound > 0.0:
            raise ModelError(
                f"commodity {self.index}: bound must be positive, got {self.bound}"
            )


@dataclass(frozen=True)
class Network:
    """Hybrid graph, capacities, and commodity list.

    Invariants enforced here: node and edge identifiers are unique, every
    edge endpoint and commodity endpoint names an existing node, and every
    capacity is nonnegative.
    """

    nodes: tuple[str, ...]
    edges: tuple[Edge, ...]
    commodities: tuple[Commodity, ...]
    _edge_map: dict[str, Edge] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        node_set = set()
        for node in self.nodes:
            if node in node_set:
                raise ModelError(f"duplicate node id {node!r}")
            node_set.add(node)
        edge_map: dict[str, Edge] = {}
        for edge in self.edges:
            if edge.id in edge_map:
                raise ModelError(f"duplicate edge id {edge.id!r}")
            for endpoint in (edge.tail, edge.head):
                if endpoint not in node_set:
                    raise ModelError(f"edge {edge.id!r}: unknown node {endpoint!r}")
            edge_map[edge.id] = edge
        for pos, com in enumerate(self.commodities, start=1):
            if com.index != pos:
                raise ModelError(
                    f"commodity at position {pos} carries index {com.index}"
                )
            for endpoint in (com.source, com.sink):
                if endpoint not in node_set:
                    raise ModelError(f"commodity {com.index}: unknown node {endpoint!r}")
        object.__setattr__(self, "_edge_map", edge_map)

    @property
    def k(self) -> int:
        return len(self.commodities)

    def edge(self, edge_id: str) -> Edge:
        try:
            return self._edge_map[edge_id]
        except KeyError:
            raise ModelError(f"unknown edge id {edge_id!r}") from None

    def has_edge(self, edge_id: str) -> bool:
        return edge_id in self._edge_map

    def bounds(self) -> tuple[float, ...]:
        return tuple(c.bound for c in self.commodities)


@dataclass(frozen=True)
class Traversal:
    """One step along a path: an edge plus the direction it is walked in.

    ``forward`` means tail-to-head; undirected edges may be walked either
    way, directed edges only forward.
    """

    edge_id: str
    forward: bool = True


@dataclass(frozen=True)
class Path:
    """An explicit walk for one commodity, stored as oriented edge steps."""

    commodity: int
    steps: tuple[Traversal, ...]

    def edge_ids(self) -> tuple[str, ...]:
        return tuple(step.edge_id for step in self.steps)

    def edge_id_set(self) -> frozenset[str]:
        return frozenset(step.edge_id for step in self.steps)


def validate_path(network: Network, path: Path) -> str | None:
    """Check every path rule; return ``None`` when valid, else the first violation.

    Rules, in checking order: the commodity index exists; every step names a
    known edge walked in a legal direction that chains onto the previous
    step (positions are 1-based in messages); the walk runs source to sink;
    all nodes are pairwise distinct except that source may equal sink; every
    edge has positive capacity.
    """
    if not 1 <= path.commodity <= len(network.commodities):
        return f"unknown commodity index {path.commodity}"
    com = network.commodities[path.commodity - 1]
    if not path.steps:
        return "empty path"
    current = com.source
    sequence = [current]
    for pos, step in enumerate(path.steps, start=1):
        if not network.has_edge(step.edge_id):
            return f"unknown edge id {step.edge_id!r} at position {pos}"
        edge = network.edge(step.edge_id)
        if edge.directed and not step.forward:
            return f"directed edge {edge.id!r} walked backwards at position {pos}"
        start, end = (edge.tail, edge.head) if step.forward else (edge.head, edge.tail)
        if start != current:
            return f"broken chain at position {pos}"
        current = end
        sequence.append(current)
    if sequence[-1] != com.sink:
        return f"path ends at {sequence[-1]!r}, expected sink {com.sink!r}"
    # All nodes pairwise distinct, except the first and last may coincide.
    if len(set(sequence[:-1])) != len(sequence) - 1 or len(set(sequence[1:])) != len(sequence) - 1:
        return "repeated node on path"
    for pos, step in enumerate(path.steps, start=1):
        if not network.edge(step.edge_id).capacity > 0.0:
            return f"zero-capacity edge {step.edge_id!r} at position {pos}"
    return None


def infer_traversals(network: Network, source: str, edge_ids: list[str] | tuple[str, ...]) -> tuple[Traversal, ...]:
    """Orient a raw edge-id sequence by chaining nodes from ``source``.

    Directed edges must depart from their tail; an undirected edge is
    oriented away from the current node. Raises ``ModelError`` with a
    1-based position when the sequence does not chain.
    """
    current = source
    steps: list[Traversal] = []
    for pos, edge_id in enumerate(edge_ids, start=1):
        if not network.has_edge(edge_id):
            raise ModelError(f"unknown edge id {edge_id!r} at position {pos}")
        edge = network.edge(edge_id)
        if edge.tail == current:
            forward = True
        elif not edge.directed and edge.head == current:
            forward = False
        else:
            raise ModelError(f"broken chain at position {pos}")
        steps.append(Traversal(edge_id, forward))
        current = edge.head if forward else edge.tail
    return tuple(steps)


@dataclass(frozen=True)
class PathSystem:
    """Per-commodity explicit path lists over one network.

    Every listed path must validate and paths are distinct within their
    commodity. Commodities may carry empty lists.
    """

    network: Network
    paths: tuple[tuple[Path, ...], ...]

    def __post_init__(self) -> None:
        if len(self.paths) != self.network.k:
            raise ModelError(
                f"path system lists {len(self.paths)} commodities, network has {self.network.k}"
            )
        for i, group in enumerate(self.paths, start=1):
            seen = set()
            for path in group:
                if path.commodity != i:
                    raise ModelError(
                        f"path filed under commodity {i} carries index {path.commodity}"
                    )
                violation = validate_path(self.network, path)
                if violation is not None:
                    raise ModelError(f"commodity {i}: invalid path ({violation})")
                key = path.steps
                if key in seen:
                    raise ModelError(f"commodity {i}: duplicate path {path.edge_ids()}")
                seen.add(key)

    @property
    def k(self) -> int:
        return len(self.paths)

    @property
    def path_count(self) -> int:
        return sum(len(group) for group in self.paths)

    def edge_ids(self) -> tuple[str, ...]:
        """Edges used by at least one path, in first-use order."""
        seen: dict[str, None] = {}
        for group in self.paths:
            for path in group:
                for step in path.steps:
                    seen.setdefault(step.edge_id, None)
        return tuple(seen)

    def capacities(self) -> dict[str, float]:
        return {eid: self.network.edge(eid).capacity for eid in self.edge_ids()}

    def edge_groups(self) -> list[list[tuple[str, ...]]]:
        """Paths as plain edge-id tuples, grouped by commodity (solver input)."""
        return [[path.edge_ids() for path in group] for group in self.paths]


@dataclass(frozen=True)
class Flow:
    """Nonnegative value per path of a path system; missing paths carry 0."""

    system: PathSystem
    values: tuple[tuple[float, ...], ...]

    def __post_init__(self) -> None:
        if len(self.values) != self.system.k:
            raise ModelError("flow value groups do not match the path system")
        for group, vals in zip(self.system.paths, self.values):
            if len(group) != len(vals):
                raise ModelError("flow values do not match the path list")
            for v in vals:
                if not v >= 0.0:
                    raise ModelError(f"negative path value {v}")

    @classmethod
    def zero(cls, system: PathSystem) -> "Flow":
        return cls(system, tuple(tuple(0.0 for _ in group) for group in system.paths))

    @classmethod
    def from_mapping(cls, system: PathSystem, mapping: dict[tuple[int, int], float]) -> "Flow":
        """Build a flow from a sparse ``{(commodity index, path index): value}`` map."""
        dense = [[0.0] * len(group) for group in system.paths]
        for (ci, pi), value in mapping.items():
            if not (1 <= ci <= system.k and 0 <= pi < len(system.paths[ci - 1])):
                raise ModelError(f"no path ({ci}, {pi}) in the system")
            dense[ci - 1][pi] = value
        return cls(system, tuple(tuple(row) for row in dense))

    def value(self, ci: int, pi: int) -> float:
        return self.values[ci - 1][pi]


def edge_load(flow: Flow, edge_id: str) -> float:
    """Gross load on one edge: the sum of values of all paths using it.

    A path counts once even if it walks an undirected edge in both
    directions; traversal direction never enters the sum.
    """
    total = 0.0
    for group, vals in zip(flow.system.paths, flow.values):
        for path, v in zip(group, vals):
            if edge_id in path.edge_id_set():
                total += v
    return total


def edge_loads(flow: Flow) -> dict[str, float]:
    """Loads for every edge of the path system, in first-use order."""
    loads = {eid: 0.0 for eid in flow.system.edge_ids()}
    for group, vals in zip(flow.system.paths, flow.values):
        for path, v in zip(group, vals):
            for eid in path.edge_id_set():
                loads[eid] += v
    return loads


@dataclass(frozen=True)
class FeasibilityReport:
    feasible: bool
    worst_edge: str | None
    worst_excess: float

    def __bool__(self) -> bool:
        return self.feasible


def is_feasible(flow: Flow) -> FeasibilityReport:
    """Capacity check with ``CAP_TOLERANCE`` slack; reports the worst edge."""
    worst_edge: str | None = None
    worst_excess = 0.0
    feasible = True
    for eid, load in edge_loads(flow).items():
        excess = load - flow.system.network.edge(eid).capacity
        if worst_edge is None or excess > worst_excess:
            worst_edge, worst_excess = eid, excess
        if excess > CAP_TOLERANCE:
            feasible = False
    return FeasibilityReport(feasible, worst_edge, worst_excess)


def branch_value(flow: Flow, commodity_index: int) -> float:
    """Total value routed for one commodity, summed in path order."""
    total = 0.0
    for v in flow.values[commodity_index - 1]:
        total += v
    return total


def branch_values(flow: Flow) -> tuple[float, ...]:
    return tuple(branch_value(flow, i) for i in range(1, flow.system.k + 1))


def flow_value(flow: Flow) -> float:
    """Total flow value: the sum of all branch values, in commodity order."""
    total = 0.0
    for i in range(1, flow.system.k + 1):
        total += branch_value(flow, i)
    return total


def min_ratio(flow: Flow, bounds: tuple[float, ...] | list[float] | None = None) -> float:
    """Worst per-commodity service ratio ``min_i V_i / b_i``."""
    if bounds is None:
        bounds = flow.system.network.bounds()
    if len(bounds) != flow.system.k:
        raise ModelError("bounds length does not match the commodity count")
    if flow.system.k == 0:
        raise ModelError("min_ratio needs at least one commodity")
    for b in bounds:
        if not b > 0.0:
            raise ModelError(f"bound must be positive, got {b}")
    return min(branch_value(flow, i + 1) / bounds[i] for i in range(flow.system.k))


def enumerate_paths(network: Network, commodity: Commodity, max_edges: int) -> list[Path]:
    """All simple source-to-sink paths with at most ``max_edges`` edges.

    Only positive-capacity edges are walked; directed edges only forward.
    The result is ordered lexicographically by edge-id sequence, which the
    depth-first search yields directly by trying edges in id order. A
    source equal to the sink enumerates closed walks.
    """
    if max_edges < 1:
        raise ValueError(f"max_edges must be >= 1, got {max_edges}")
    for endpoint in (commodity.source, commodity.sink):
        if endpoint not in network.nodes:
            raise ModelError(f"node {endpoint!r} not in network")

    # Candidate steps per node, in edge-id order (one entry per usable direction).
    adjacency: dict[str, list[tuple[str, bool, str]]] = {n: [] for n in network.nodes}
    for edge in sorted(network.edges, key=lambda e: e.id):
        if not edge.capacity > 0.0:
            continue
        adjacency[edge.tail].append((edge.id, True, edge.head))
        if not edge.directed and edge.head != edge.tail:
            adjacency[edge.head].append((edge.id, False, edge.tail))
    for steps in adjacency.values():
        steps.sort(key=lambda item: item[0])

    source, sink = commodity.source, commodity.sink
    found: list[Path] = []
    prefix: list[Traversal] = []
    visited = {source}

    def walk(node: str) -> None:
        if len(prefix) == max_edges:
            return
        for edge_id, forward, nxt in adjacency[node]:
            if nxt == sink and (nxt not in visited or sink == source):
                found.append(Path(commodity.index, tuple(prefix) + (Traversal(edge_id, forward),)))
                continue
            if nxt in visited:
                continue
            prefix.append(Traversal(edge_id, forward))
            visited.add(nxt)
            walk(nxt)
            visited.remove(nxt)
            prefix.pop()

    walk(source)
    return found
