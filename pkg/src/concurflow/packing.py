"""Fractional-packing approximation for explicit path flows.

The solver repeatedly routes along the currently cheapest path of an
edge-length system, inflating the lengths of the edges it touches, and
finally rescales the accumulated raw flow to a feasible one. Per-commodity
value caps are enforced structurally: each bounded group gets a private
virtual edge of capacity equal to its bound appended to all of its paths,
so the plain packing loop limits the group total like any other capacity.

Delivered factor: at least ``1/(1+eps)`` of the optimum. Internally the
loop runs at ``eps/3``, which over-delivers enough to absorb the scheme's
own losses; the oracle-gap tests pin this down against the exact LP.

Numerics: the canonical initial length scale ``delta`` underflows double
precision once the internal epsilon gets small, so lengths are stored with
``delta`` factored out and the loop renormalizes by exact powers of two,
tracking the dual objective in log space. All arithmetic is deterministic;
ties in path selection resolve to the lowest (group, path) index.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Hashable, Sequence

import numpy as np

from .netmodel import Flow, PathSystem

# Lengths renormalize by 2**-_RENORM_SHIFT whenever the scaled dual
# objective passes 2**_RENORM_SHIFT; exact in binary floating point.
_RENORM_SHIFT = 332


class PackingError(RuntimeError):
    """Iteration cap exceeded; the run is aborted rather than left looping."""


@dataclass(frozen=True)
class FptasConfig:
    """Resolved parameters of one packing run.

    ``log_delta`` is the natural log of the initial length scale (the scale
    itself may underflow a double, so it is never materialized).
    """

    eps_user: float
    eps_int: float
    log_delta: float
    max_iterations: int

    @classmethod
    def for_run(cls, eps: float, m: int) -> "FptasConfig":
        if not 0.0 < eps <= 0.5:
            raise ValueError(f"eps must lie in (0, 1/2], got {eps}")
        eps_int = min(eps / 3.0, 0.5)
        log_delta = math.log1p(eps_int) - math.log((1.0 + eps_int) * m) / eps_int
        max_iterations = 10 * math.ceil(m * math.log(m + 1) / eps_int**2) + 100
        return cls(eps, eps_int, log_delta, max_iterations)


@dataclass(frozen=True)
class PackingResult:
    values: tuple[tuple[float, ...], ...]
    group_totals: tuple[float, ...]
    total: float
    iterations: int
    config: FptasConfig | None


def pack_paths(
    capacities: dict[Hashable, float],
    groups: Sequence[Sequence[Sequence[Hashable]]],
    bounds: Sequence[float | None] | None,
    eps: float,
) -> PackingResult:
    """Approximately maximize total value over grouped paths.

    ``groups[g]`` lists paths as sequences of edge keys into ``capacities``;
    ``bounds[g]`` caps the group total (``None`` for unbounded, ``0`` shuts
    the group off). Paths crossing a zero-capacity edge can never carry
    flow and are dropped up front. Returns values aligned with the input
    group/path layout.
    """
    if not 0.0 < eps <= 0.5:
        raise ValueError(f"eps must lie in (0, 1/2], got {eps}")
    if bounds is not None:
        if len(bounds) != len(groups):
            raise ValueError("bounds length does not match the group count")
        for g, bound in enumerate(bounds):
            if bound is not None and not math.isinf(bound) and bound < 0:
                raise ValueError(f"negative bound {bound} for group {g}")

    def group_bound(g: int) -> float | None:
        if bounds is None:
            return None
        b = bounds[g]
        if b is None or (isinstance(b, float) and math.isinf(b)):
            return None
        return float(b)

    # Assemble columns: real edges in first-use order, then one virtual
    # bound edge per included bounded group.
    edge_index: dict[Hashable, int] = {}
    caps: list[float] = []
    path_edge_lists: list[list[int]] = []
    path_key: list[tuple[int, int]] = []
    pending_virtual: list[tuple[int, float]] = []  # (group, bound) awaiting a virtual column
    included_by_group: dict[int, list[int]] = {}

    for g, group in enumerate(groups):
        bound = group_bound(g)
        if bound == 0.0:
            continue
        member_rows: list[int] = []
        for j, path in enumerate(group):
            if len(path) == 0:
                raise ValueError(f"empty path ({g}, {j})")
            cols = []
            blocked = False
            for key in path:
                try:
                    cap = capacities[key]
                except KeyError:
                    raise ValueError(f"path uses edge {key!r} with no capacity entry") from None
                if cap <= 0.0:
                    blocked = True
                    break
                if key not in edge_index:
                    edge_index[key] = len(caps)
                    caps.append(float(cap))
                cols.append(edge_index[key])
            if blocked:
                continue
            member_rows.append(len(path_edge_lists))
            path_edge_lists.append(sorted(set(cols)))
            path_key.append((g, j))
        if member_rows and bound is not None:
            included_by_group[g] = member_rows
            pending_virtual.append((g, bound))

    values_dense = [[0.0] * len(group) for group in groups]
    zero_totals = tuple(0.0 for _ in groups)
    if not path_edge_lists:
        return PackingResult(
            tuple(tuple(v) for v in values_dense), zero_totals, 0.0, 0, None
        )

    for g, bound in pending_virtual:
        col = len(caps)
        caps.append(bound)
        for row in included_by_group[g]:
            path_edge_lists[row].append(col)

    n_paths = len(path_edge_lists)
    m = len(caps)
    config = FptasConfig.for_run(eps, m)
    eps_int = config.eps_int

    cap_arr = np.array(caps)
    incidence = np.zeros((n_paths, m))
    for row, cols in enumerate(path_edge_lists):
        incidence[row, cols] = 1.0
    edge_cols = [np.array(cols, dtype=np.intp) for cols in path_edge_lists]
    bottleneck = np.array([cap_arr[cols].min() for cols in edge_cols])

    # Lengths with delta factored out; the true length is delta * 2**shift * stored.
    length = 1.0 / cap_arr
    raw = np.zeros(n_paths)
    path_len = np.empty(n_paths)

    theta = -config.log_delta  # stop once log of the true dual objective >= 0
    dual = float(m)  # stored-scale dual objective, sum of cap * length
    shifts = 0
    renorm_cut = 2.0**_RENORM_SHIFT

    def threshold() -> float:
        exponent = theta - shifts * (_RENORM_SHIFT * math.log(2.0))
        return math.exp(exponent) if exponent < 700.0 else math.inf

    stop_at = threshold()
    iterations = 0
    while dual < stop_at:
        if iterations >= config.max_iterations:
            raise PackingError(
                f"packing exceeded {config.max_iterations} iterations (m={m}, eps={eps})"
            )
        iterations += 1
        np.dot(incidence, length, out=path_len)
        p = int(np.argmin(path_len))
        f = float(bottleneck[p])
        raw[p] += f
        cols = edge_cols[p]
        dual += eps_int * f * float(path_len[p])
        length[cols] *= 1.0 + eps_int * (f / cap_arr[cols])
        if dual > renorm_cut:
            length *= 2.0**-_RENORM_SHIFT
            dual *= 2.0**-_RENORM_SHIFT
            shifts += 1
            stop_at = threshold()

    scale_down = math.log((1.0 + eps_int) * m) / (eps_int * math.log1p(eps_int))
    values = raw / scale_down

    # Clip once so feasibility holds exactly despite rounding in the scale.
    loads = incidence.T @ values
    factor = 1.0
    for col in range(m):
        if loads[col] > cap_arr[col] > 0.0:
            factor = min(factor, cap_arr[col] / loads[col])
    if factor < 1.0:
        values = values * factor

    for (g, j), v in zip(path_key, values):
        values_dense[g][j] = float(v)
    group_totals = tuple(float(sum(row)) for row in values_dense)
    return PackingResult(
        tuple(tuple(row) for row in values_dense),
        group_totals,
        float(sum(group_totals)),
        iterations,
        config,
    )


def solve_mmfp(system: PathSystem, eps: float) -> Flow:
    """Feasible flow within factor ``1/(1+eps)`` of the maximum total value."""
    result = pack_paths(system.capacities(), system.edge_groups(), None, eps)
    return Flow(system, result.values)


def solve_mmfpb(system: PathSystem, bounds: Sequence[float], eps: float) -> Flow:
    """Like :func:`solve_mmfp` but with per-commodity value caps ``bounds``."""
    if len(bounds) != system.k:
        raise ValueError("bounds length does not match the commodity count")
    result = pack_paths(system.capacities(), system.edge_groups(), list(bounds), eps)
    return Flow(system, result.values)
