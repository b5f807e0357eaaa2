"""Instance and solution text formats.

An instance file is line-oriented: one record per line, tokens separated
by whitespace, ``#`` starting a comment. Records:

    format concurflow-instance 1
    name <string>                                  (optional)
    seed <int>                                     (optional)
    node <id>
    edge <id> <tail> <head> <capacity> directed|undirected
    commodity <id> <source> <sink> <bound>
    path <commodity-id> <edge-id> [<edge-id> ...]

Path lines list raw edge ids; orientation over undirected edges is
inferred by chaining nodes from the commodity source. Parse errors carry
the 1-based line number. Serialization renders floats with ``repr`` so a
parse/serialize round trip is the identity and files diff cleanly.
"""

from __future__ import annotations

from dataclasses import dataclass

from .netmodel import (
    Commodity,
    Edge,
    ModelError,
    Network,
    Path,
    PathSystem,
    infer_traversals,
)
from .solver import SolveReport

FORMAT_INSTANCE = "concurflow-instance"
FORMAT_SOLUTION = "concurflow-solution"
FORMAT_VERSION = "1"


class InstanceError(ValueError):
    """Malformed instance or solution text; carries a line number."""

    def __init__(self, line: int | None, message: str):
        self.line = line
        prefix = f"line {line}: " if line is not None else ""
        super().__init__(prefix + message)


@dataclass(frozen=True)
class Instance:
    """A parsed instance: the model plus file-level naming metadata."""

    name: str
    seed: int | None
    network: Network
    path_system: PathSystem
    commodity_ids: tuple[str, ...]

    @property
    def k(self) -> int:
        return self.network.k

    def commodity_id(self, index: int) -> str:
        return self.commodity_ids[index - 1]


def _fmt(x: float) -> str:
    return repr(float(x))


def parse_instance(text: str) -> Instance:
    """Parse instance text into a validated :class:`Instance`."""
    name = "unnamed"
    seed: int | None = None
    nodes: list[str] = []
    node_lines: dict[str, int] = {}
    edges: list[Edge] = []
    edge_lines: dict[str, int] = {}
    commodity_rows: list[tuple[str, str, str, float]] = []
    commodity_line: dict[str, int] = {}
    path_rows: list[tuple[int, str, list[str]]] = []
    saw_format = False

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tokens = line.split()
        kind, args = tokens[0], tokens[1:]
        if kind == "format":
            if args != [FORMAT_INSTANCE, FORMAT_VERSION]:
                raise InstanceError(lineno, f"unsupported format {' '.join(args)!r}")
            saw_format = True
        elif kind == "name":
            if len(args) != 1:
                raise InstanceError(lineno, "name takes exactly one token")
            name = args[0]
        elif kind == "seed":
            try:
                seed = int(args[0])
            except (IndexError, ValueError):
                raise InstanceError(lineno, "seed takes one integer") from None
        elif kind == "node":
            if len(args) != 1:
                raise InstanceError(lineno, "node takes exactly one id")
            if args[0] in node_lines:
                raise InstanceError(lineno, f"duplicate node id {args[0]!r}")
            node_lines[args[0]] = lineno
            nodes.append(args[0])
        elif kind == "edge":
            if len(args) != 5:
                raise InstanceError(lineno, "edge takes: id tail head capacity directed|undirected")
            eid, tail, head, cap_text, mode = args
            if eid in edge_lines:
                raise InstanceError(lineno, f"duplicate edge id {eid!r}")
            if mode not in ("directed", "undirected"):
                raise InstanceError(lineno, f"edge mode must be directed|undirected, got {mode!r}")
            try:
                cap = float(cap_text)
            except ValueError:
                raise InstanceError(lineno, f"bad capacity {cap_text!r}") from None
            for endpoint in (tail, head):
                if endpoint not in node_lines:
                    raise InstanceError(lineno, f"unknown node {endpoint!r}")
            if cap < 0:
                raise InstanceError(lineno, f"capacity must be >= 0, got {cap}")
            edge_lines[eid] = lineno
            edges.append(Edge(eid, tail, head, cap, mode == "directed"))
        elif kind == "commodity":
            if len(args) != 4:
                raise InstanceError(lineno, "commodity takes: id source sink bound")
            cid, source, sink, bound_text = args
            if cid in commodity_line:
                raise InstanceError(lineno, f"duplicate commodity id {cid!r}")
            try:
                bound = float(bound_text)
            except ValueError:
                raise InstanceError(lineno, f"bad bound {bound_text!r}") from None
            if not bound > 0:
                raise InstanceError(lineno, f"bound must be positive, got {bound}")
            for endpoint in (source, sink):
                if endpoint not in node_lines:
                    raise InstanceError(lineno, f"unknown node {endpoint!r}")
            commodity_line[cid] = lineno
            commodity_rows.append((cid, source, sink, bound))
        elif kind == "path":
            if len(args) < 2:
                raise InstanceError(lineno, "path takes: commodity-id edge-id...")
            cid, edge_ids = args[0], args[1:]
            if cid not in commodity_line:
                raise InstanceError(lineno, f"unknown commodity id {cid!r}")
            for eid in edge_ids:
                if eid not in edge_lines:
                    raise InstanceError(lineno, f"unknown edge id {eid!r}")
            path_rows.append((lineno, cid, list(edge_ids)))
        else:
            raise InstanceError(lineno, f"unknown record {kind!r}")

    if not saw_format:
        raise InstanceError(None, f"missing 'format {FORMAT_INSTANCE} {FORMAT_VERSION}' header")
    if not commodity_rows:
        raise InstanceError(None, "instance declares no commodities")

    try:
        network = Network(
            nodes=tuple(nodes),
            edges=tuple(edges),
            commodities=tuple(
                Commodity(i, s, t, b)
                for i, (_, s, t, b) in enumerate(commodity_rows, start=1)
            ),
        )
    except ModelError as exc:
        raise InstanceError(None, str(exc)) from None

    commodity_ids = tuple(cid for cid, *_ in commodity_rows)
    index_of = {cid: i for i, cid in enumerate(commodity_ids, start=1)}
    groups: list[list[Path]] = [[] for _ in commodity_rows]
    for lineno, cid, edge_ids in path_rows:
        ci = index_of[cid]
        source = network.commodities[ci - 1].source
        try:
            steps = infer_traversals(network, source, edge_ids)
        except ModelError as exc:
            raise InstanceError(lineno, f"path for {cid!r}: {exc}") from None
        groups[ci - 1].append(Path(ci, steps))

    try:
        system = PathSystem(network, tuple(tuple(g) for g in groups))
    except ModelError as exc:
        raise InstanceError(None, str(exc)) from None
    return Instance(name, seed, network, system, commodity_ids)


def serialize_instance(instance: Instance) -> str:
    lines = [f"format {FORMAT_INSTANCE} {FORMAT_VERSION}"]
    lines.append(f"name {instance.name}")
    if instance.seed is not None:
        lines.append(f"seed {instance.seed}")
    for node in instance.network.nodes:
        lines.append(f"node {node}")
    for e in instance.network.edges:
        mode = "directed" if e.directed else "undirected"
        lines.append(f"edge {e.id} {e.tail} {e.head} {_fmt(e.capacity)} {mode}")
    for cid, com in zip(instance.commodity_ids, instance.network.commodities):
        lines.append(f"commodity {cid} {com.source} {com.sink} {_fmt(com.bound)}")
    for ci, group in enumerate(instance.path_system.paths, start=1):
        cid = instance.commodity_ids[ci - 1]
        for path in group:
            lines.append(f"path {cid} {' '.join(path.edge_ids())}")
    return "\n".join(lines) + "\n"


def serialize_solution(report: SolveReport, instance: Instance) -> str:
    """Render a solve report; deterministic for a fixed report.

    Wall time deliberately stays out of the file so repeated runs with
    identical inputs produce byte-identical output; the CLI reports timing
    on stderr instead.
    """
    lines = [f"format {FORMAT_SOLUTION} {FORMAT_VERSION}"]
    lines.append(f"instance {instance.name}")
    lines.append(f"eta {_fmt(report.eta)}")
    lines.append(f"eps {_fmt(report.eps)}")
    lines.append(f"l_star {report.l_star}")
    lines.append(f"h_star {report.h_star}")
    lines.append(f"outer_iterations {report.outer_iterations}")
    lines.append(f"inner_iterations {report.inner_iterations}")
    lines.append(f"subroutine_calls {report.subroutine_calls}")
    lines.append(f"value {_fmt(report.value)}")
    lines.append(f"value_lower {_fmt(report.value_lower)}")
    lines.append(f"value_upper {_fmt(report.value_upper)}")
    lines.append(f"min_ratio {_fmt(report.min_ratio_value)}")
    lines.append(f"min_ratio_lower {_fmt(report.min_ratio_lower)}")
    lines.append(f"min_ratio_upper {_fmt(report.min_ratio_upper)}")
    for i, total in enumerate(report.branch_totals, start=1):
        lines.append(f"branch {instance.commodity_id(i)} {_fmt(total)}")
    for ci, row in enumerate(report.flow.values, start=1):
        cid = instance.commodity_id(ci)
        for pj, value in enumerate(row):
            lines.append(f"flow {cid} {pj} {_fmt(value)}")
    return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class SolutionData:
    """Parsed solution file (used by tests and downstream tooling)."""

    instance: str
    scalars: dict[str, float]
    counters: dict[str, int]
    branches: dict[str, float]
    flows: dict[tuple[str, int], float]


_SOLUTION_SCALARS = (
    "eta",
    "eps",
    "value",
    "value_lower",
    "value_upper",
    "min_ratio",
    "min_ratio_lower",
    "min_ratio_upper",
)
_SOLUTION_COUNTERS = ("l_star", "h_star", "outer_iterations", "inner_iterations", "subroutine_calls")


def parse_solution(text: str) -> SolutionData:
    instance = ""
    scalars: dict[str, float] = {}
    counters: dict[str, int] = {}
    branches: dict[str, float] = {}
    flows: dict[tuple[str, int], float] = {}
    saw_format = False
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tokens = line.split()
        kind, args = tokens[0], tokens[1:]
        try:
            if kind == "format":
                if args != [FORMAT_SOLUTION, FORMAT_VERSION]:
                    raise InstanceError(lineno, f"unsupported format {' '.join(args)!r}")
                saw_format = True
            elif kind == "instance":
                instance = args[0]
            elif kind in _SOLUTION_SCALARS:
                scalars[kind] = float(args[0])
            elif kind in _SOLUTION_COUNTERS:
                counters[kind] = int(args[0])
            elif kind == "branch":
                branches[args[0]] = float(args[1])
            elif kind == "flow":
                flows[(args[0], int(args[1]))] = float(args[2])
            else:
                raise InstanceError(lineno, f"unknown record {kind!r}")
        except (IndexError, ValueError) as exc:
            if isinstance(exc, InstanceError):
                raise
            raise InstanceError(lineno, f"malformed {kind!r} record") from None
    if not saw_format:
        raise InstanceError(None, f"missing 'format {FORMAT_SOLUTION} {FORMAT_VERSION}' header")
    return SolutionData(instance, scalars, counters, branches, flows)
