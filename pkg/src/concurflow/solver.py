"""Two-level search solver for saturated concurrent path flows.

Given a path system, per-commodity demand bounds ``b`` and a quantum
``eta``, the solver certifies two levels. An outer search raises a common
service level in steps of ``eta`` until the bounded-flow subroutine can no
longer nearly saturate the scaled demands, fixing the terminal count
``l_star``. An auxiliary network then splits every commodity's sink into a
dedicated sink (capacity pinned to the certified per-commodity share) and
one shared overflow sink; an inner search grows the overflow budget in
steps of ``eta`` until value stops keeping up, fixing ``h_star``. The
auxiliary flow projects back onto the original paths, giving an output
whose total value, per-commodity caps, and worst service ratio are all
sandwiched by closed-form functions of ``l_star``, ``h_star`` and ``eta``.

The subroutine is the packing approximation by default; an exact LP
subroutine can be substituted for deterministic trace tests.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from typing import Callable, Protocol, Sequence

from .netmodel import (
    Edge,
    Flow,
    Network,
    PathSystem,
    branch_values,
    flow_value,
    min_ratio,
)
from .oracle import lp_grouped_max
from .packing import pack_paths

# Strict "value fell below target" comparisons use this absolute slack;
# exact equality counts as still passing.
BELOW_TOL = 1e-12


class GroupedResult(Protocol):
    values: tuple[tuple[float, ...], ...]
    group_totals: tuple[float, ...]
    total: float


Subroutine = Callable[[dict, list, list, float], GroupedResult]


def _fptas_subroutine(caps, groups, bounds, eps):
    return pack_paths(caps, groups, bounds, eps)


def _oracle_subroutine(caps, groups, bounds, eps):
    return lp_grouped_max(caps, groups, bounds)


_SUBROUTINES: dict[str, Subroutine] = {
    "fptas": _fptas_subroutine,
    "oracle": _oracle_subroutine,
}


def resolve_subroutine(subroutine: str | Subroutine) -> Subroutine:
    if callable(subroutine):
        return subroutine
    try:
        return _SUBROUTINES[subroutine]
    except KeyError:
        raise ValueError(
            f"unknown subroutine {subroutine!r}; expected one of {sorted(_SUBROUTINES)}"
        ) from None


def compute_epsilon(eta: float, bounds: Sequence[float]) -> float:
    """Subroutine accuracy derived once from the quantum and total demand."""
    if not 0.0 < eta < 1.0:
        raise ValueError(f"eta must lie in (0, 1), got {eta}")
    for b in bounds:
        if not b > 0.0:
            raise ValueError(f"bounds must be positive, got {b}")
    return min(eta / sum(bounds), 0.5)


@dataclass(frozen=True)
class LstarResult:
    l_star: int
    last_flow: Flow | None
    calls: int


def find_lstar(
    system: PathSystem,
    bounds: Sequence[float],
    eta: float,
    eps: float,
    subroutine: str | Subroutine = "fptas",
) -> LstarResult:
    """Outer search: first level l at which scaled demands stop saturating.

    Stops at the first l >= 1 with ``l * eta > 1`` (no subroutine call) or
    with subroutine value strictly below ``sum(l*eta*b) / (1+eps)``.
    Returns the terminal l, the flow of the last passing level (``None``
    when the very first level already fails), and the number of
    subroutine calls made.
    """
    run = resolve_subroutine(subroutine)
    caps = system.capacities()
    groups = system.edge_groups()
    last: GroupedResult | None = None
    calls = 0
    l = 0
    while True:
        l += 1
        if l * eta > 1.0:
            break
        scale = l * eta
        scaled = [scale * b for b in bounds]
        result = run(caps, groups, scaled, eps)
        calls += 1
        target = sum(scaled) / (1.0 + eps)
        if result.total < target - BELOW_TOL:
            break
        last = result
    flow = Flow(system, last.values) if last is not None else None
    return LstarResult(l, flow, calls)


@dataclass(frozen=True)
class AuxNetwork:
    """Sink-splitting extension fixed by the outer search level.

    Every commodity i gains a dedicated sink behind an edge of capacity
    ``dedicated_bounds[i-1] = (l_star - 1) * eta * b_i`` and shares one
    overflow sink behind an edge of capacity ``b_i - dedicated_bounds[i-1]``.
    The subroutine sees ``k + 1`` groups: one per dedicated sink (bounded
    by its capacity) plus a single aggregated overflow group whose bound is
    the inner loop's moving budget. ``overflow_origin`` maps every
    overflow-group position back to its (commodity, path index) source, so
    the extension is a bijection over two copies of the base paths.
    """

    base: PathSystem
    network: Network
    eta: float
    l_star: int
    bounds0: tuple[float, ...]
    dedicated_bounds: tuple[float, ...]
    dedicated_edges: tuple[str, ...]
    overflow_edges: tuple[str, ...]
    dedicated_sinks: tuple[str, ...]
    overflow_sink: str
    capacities: dict[str, float]
    groups: tuple[tuple[tuple[str, ...], ...], ...]
    overflow_origin: tuple[tuple[int, int], ...]

    def engine_bounds(self, overflow_bound: float) -> list[float]:
        return [*self.dedicated_bounds, overflow_bound]


def _fresh_prefix(network: Network) -> str:
    used = set(network.nodes) | {e.id for e in network.edges}
    counter = 0
    while True:
        prefix = "aux:" if counter == 0 else f"aux{counter}:"
        if not any(name.startswith(prefix) for name in used):
            return prefix
        counter += 1


def build_auxiliary(
    system: PathSystem,
    bounds0: Sequence[float],
    l_star: int,
    eta: float,
) -> AuxNetwork:
    """Construct the sink-splitting extension for a finished outer search."""
    network = system.network
    if l_star < 1:
        raise ValueError(f"l_star must be >= 1, got {l_star}")
    if len(bounds0) != network.k:
        raise ValueError("bounds length does not match the commodity count")
    scale = (l_star - 1) * eta
    if scale > 1.0:
        raise ValueError(f"(l_star - 1) * eta = {scale} exceeds 1")

    prefix = _fresh_prefix(network)
    overflow_sink = f"{prefix}sink0"
    dedicated_sinks = tuple(f"{prefix}sink{i}" for i in range(1, network.k + 1))
    dedicated_edges = tuple(f"{prefix}ded{i}" for i in range(1, network.k + 1))
    overflow_edges = tuple(f"{prefix}ovf{i}" for i in range(1, network.k + 1))
    dedicated_bounds = tuple(scale * b for b in bounds0)

    new_edges = []
    for i, com in enumerate(network.commodities):
        new_edges.append(
            Edge(dedicated_edges[i], com.sink, dedicated_sinks[i], dedicated_bounds[i], True)
        )
        new_edges.append(
            Edge(overflow_edges[i], com.sink, overflow_sink, bounds0[i] - dedicated_bounds[i], True)
        )
    extended = Network(
        nodes=network.nodes + dedicated_sinks + (overflow_sink,),
        edges=network.edges + tuple(new_edges),
        commodities=network.commodities,
    )

    capacities = system.capacities()
    for edge in new_edges:
        capacities[edge.id] = edge.capacity

    base_groups = system.edge_groups()
    dedicated_groups = tuple(
        tuple(path + (dedicated_edges[i],) for path in group)
        for i, group in enumerate(base_groups)
    )
    overflow_group = []
    overflow_origin = []
    for i, group in enumerate(base_groups):
        for j, path in enumerate(group):
            overflow_group.append(path + (overflow_edges[i],))
            overflow_origin.append((i + 1, j))

    return AuxNetwork(
        base=system,
        network=extended,
        eta=eta,
        l_star=l_star,
        bounds0=tuple(float(b) for b in bounds0),
        dedicated_bounds=dedicated_bounds,
        dedicated_edges=dedicated_edges,
        overflow_edges=overflow_edges,
        dedicated_sinks=dedicated_sinks,
        overflow_sink=overflow_sink,
        capacities=capacities,
        groups=dedicated_groups + (tuple(overflow_group),),
        overflow_origin=tuple(overflow_origin),
    )


@dataclass(frozen=True)
class HstarResult:
    h_star: int
    aux_values: tuple[tuple[float, ...], ...]
    calls: int


def find_hstar(
    aux: AuxNetwork,
    eta: float,
    eps: float,
    sum_b0: float,
    subroutine: str | Subroutine = "fptas",
) -> HstarResult:
    """Inner search: first overflow budget the auxiliary value cannot keep up with.

    The loop is seeded with a zero-overflow solve so a result exists even
    when the very first budget fails. Stops at the first h >= 1 with
    ``h * eta > sum_b0`` or with subroutine value strictly below
    ``(sum(dedicated bounds) + h*eta) / (1+eps)``; returns the flow of the
    last passing budget.
    """
    run = resolve_subroutine(subroutine)
    caps = aux.capacities
    groups = list(aux.groups)
    current = run(caps, groups, aux.engine_bounds(0.0), eps)
    calls = 1
    sum_dedicated = sum(aux.dedicated_bounds)
    h = 0
    while True:
        h += 1
        budget = h * eta
        if budget > sum_b0:
            break
        result = run(caps, groups, aux.engine_bounds(budget), eps)
        calls += 1
        target = (sum_dedicated + budget) / (1.0 + eps)
        if result.total < target - BELOW_TOL:
            break
        current = result
    return HstarResult(h, current.values, calls)


def project_flow(aux_values: Sequence[Sequence[float]], aux: AuxNetwork) -> Flow:
    """Collapse an auxiliary flow back onto the original paths.

    Each original path receives the sum of its dedicated and overflow
    copies; totals and per-commodity values are conserved exactly.
    """
    dense = [list(map(float, group_vals)) for group_vals in aux_values[:-1]]
    for (ci, pj), value in zip(aux.overflow_origin, aux_values[-1]):
        dense[ci - 1][pj] += float(value)
    return Flow(aux.base, tuple(tuple(row) for row in dense))


@dataclass(frozen=True)
class SolveReport:
    """Solver outcome plus the certified intervals implied by the levels."""

    eta: float
    eps: float
    bounds0: tuple[float, ...]
    l_star: int
    h_star: int
    flow: Flow
    value: float
    value_lower: float
    value_upper: float
    min_ratio_value: float
    min_ratio_lower: float
    min_ratio_upper: float
    outer_iterations: int
    inner_iterations: int
    subroutine_calls: int
    wall_time_s: float

    @property
    def branch_totals(self) -> tuple[float, ...]:
        return branch_values(self.flow)


def solve(
    system: PathSystem,
    eta: float,
    bounds: Sequence[float] | None = None,
    subroutine: str | Subroutine = "fptas",
) -> SolveReport:
    """Run the full pipeline and return the flow with its certified report."""
    started = time.perf_counter()
    if bounds is None:
        bounds = system.network.bounds()
    if system.k == 0:
        raise ValueError("need at least one commodity")
    if len(bounds) != system.k:
        raise ValueError("bounds length does not match the commodity count")
    eps = compute_epsilon(eta, bounds)
    run = resolve_subroutine(subroutine)
    bounds0 = tuple(float(b) for b in bounds)

    outer = find_lstar(system, bounds0, eta, eps, run)
    aux = build_auxiliary(system, bounds0, outer.l_star, eta)
    inner = find_hstar(aux, eta, eps, sum(bounds0), run)
    flow = project_flow(inner.aux_values, aux)

    sum_b = sum(bounds0)
    l_star, h_star = outer.l_star, inner.h_star
    value = flow_value(flow)
    return SolveReport(
        eta=eta,
        eps=eps,
        bounds0=bounds0,
        l_star=l_star,
        h_star=h_star,
        flow=flow,
        value=value,
        value_lower=((l_star - 1) * sum_b + (h_star - 1)) * eta - 2 * eta,
        value_upper=((l_star - 1) * sum_b + h_star) * eta,
        min_ratio_value=min_ratio(flow, bounds0),
        min_ratio_lower=(l_star - 1) * eta - 2 * eta / min(bounds0),
        min_ratio_upper=l_star * eta,
        outer_iterations=l_star,
        inner_iterations=h_star,
        subroutine_calls=outer.calls + inner.calls,
        wall_time_s=time.perf_counter() - started,
    )
