"""Exact LP reference solvers over path variables.

Desk-scale solvers used to verify everything the approximation pipeline
certifies: maximum total path flow with per-commodity caps, the best worst
service ratio, and the two-stage variant that saturates total value at the
optimal ratio. All of them reduce to small dense LPs with one variable per
path, solved by the in-package simplex.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Hashable, Sequence

import numpy as np

from .netmodel import Flow, PathSystem
from .simplex import SimplexError, solve_lp

# Slack subtracted from the stage-1 ratio before stage 2 re-imposes it,
# absorbing stage-1 rounding so the stage-2 region never comes up empty.
STAGE_SLACK = 1e-9


class OracleError(RuntimeError):
    """The reference LP failed to solve; results must not be trusted."""


@dataclass(frozen=True)
class PathLP:
    """Shape summary of an assembled path LP (introspection/debugging aid)."""

    n_variables: int
    n_capacity_rows: int
    n_bound_rows: int
    n_ratio_rows: int
    objective: str


@dataclass(frozen=True)
class GroupedLpResult:
    total: float
    values: tuple[tuple[float, ...], ...]
    group_totals: tuple[float, ...]


def _clip(x: np.ndarray) -> np.ndarray:
    return np.where(x > 0.0, x, 0.0)


def lp_grouped_max(
    capacities: dict[Hashable, float],
    groups: Sequence[Sequence[Sequence[Hashable]]],
    bounds: Sequence[float | None] | None,
) -> GroupedLpResult:
    """Maximize total value over grouped paths under edge caps and group bounds.

    ``groups[g]`` is a list of paths, each a sequence of edge keys into
    ``capacities``; ``bounds[g]`` caps the group's total value (``None``
    means unbounded). This is the engine behind the public solvers and is
    also callable directly with synthetic path groups.
    """
    if bounds is not None and len(bounds) != len(groups):
        raise ValueError("bounds length does not match the group count")
    cols: list[tuple[int, int]] = []
    col_edges: list[frozenset[Hashable]] = []
    for g, group in enumerate(groups):
        bound = None if bounds is None else bounds[g]
        if bound is not None and bound < 0:
            raise ValueError(f"negative bound {bound} for group {g}")
        if bound == 0:
            continue
        for j, path in enumerate(group):
            if len(path) == 0:
                raise ValueError(f"empty path ({g}, {j})")
            cols.append((g, j))
            col_edges.append(frozenset(path))

    values = [[0.0] * len(group) for group in groups]
    if not cols:
        return GroupedLpResult(0.0, tuple(tuple(v) for v in values), tuple(0.0 for _ in groups))

    edge_order: dict[Hashable, int] = {}
    for edges in col_edges:
        for e in sorted(edges, key=repr):
            edge_order.setdefault(e, len(edge_order))

    n = len(cols)
    rows = []
    for e, _ in sorted(edge_order.items(), key=lambda item: item[1]):
        coeffs = np.fromiter((1.0 if e in edges else 0.0 for edges in col_edges), float, n)
        try:
            cap = capacities[e]
        except KeyError:
            raise ValueError(f"path uses edge {e!r} with no capacity entry") from None
        rows.append((coeffs, "<=", cap))
    n_cap = len(rows)
    if bounds is not None:
        for g, bound in enumerate(bounds):
            if bound is None or bound == 0:
                continue
            coeffs = np.fromiter((1.0 if cg == g else 0.0 for cg, _ in cols), float, n)
            rows.append((coeffs, "<=", bound))

    try:
        res = solve_lp(np.ones(n), rows)
    except SimplexError as exc:
        raise OracleError(f"path LP failed: {exc}") from exc

    x = _clip(res.x)
    for (g, j), v in zip(cols, x):
        values[g][j] = float(v)
    group_totals = tuple(float(sum(v)) for v in values)
    return GroupedLpResult(float(sum(group_totals)), tuple(tuple(v) for v in values), group_totals)


def _flow_from_grouped(system: PathSystem, result: GroupedLpResult) -> Flow:
    return Flow(system, result.values)


def describe_lp(system: PathSystem, bounds: Sequence[float] | None, with_ratio: bool) -> PathLP:
    """Build the shape descriptor for the LP a solver call would assemble."""
    n = system.path_count + (1 if with_ratio else 0)
    n_bounds = 0 if bounds is None else sum(1 for b in bounds if b is not None)
    return PathLP(
        n_variables=n,
        n_capacity_rows=len(system.edge_ids()),
        n_bound_rows=n_bounds,
        n_ratio_rows=system.k if with_ratio else 0,
        objective="max ratio" if with_ratio else "max total value",
    )


def lp_mmfp_exact(system: PathSystem) -> tuple[float, Flow]:
    """Exact maximum total path flow (no per-commodity bounds)."""
    result = lp_grouped_max(system.capacities(), system.edge_groups(), None)
    return result.total, _flow_from_grouped(system, result)


def lp_mmfpb_exact(system: PathSystem, bounds: Sequence[float] | None = None) -> tuple[float, Flow]:
    """Exact maximum total path flow with per-commodity value caps.

    ``bounds`` defaults to the network's commodity bounds; entries must be
    finite and nonnegative.
    """
    if bounds is None:
        bounds = system.network.bounds()
    bounds = [float(b) for b in bounds]
    for b in bounds:
        if not np.isfinite(b) or b < 0:
            raise ValueError(f"bounds must be finite and >= 0, got {b}")
    result = lp_grouped_max(system.capacities(), system.edge_groups(), bounds)
    return result.total, _flow_from_grouped(system, result)


def _ratio_lp_rows(system: PathSystem, bounds: Sequence[float]):
    """Rows shared by the ratio LP: caps, V_i <= b_i, and V_i >= ratio*b_i.

    Variable 0 is the ratio; path variables follow in (commodity, path)
    order. Every row is a <= with nonnegative right-hand side, so the
    simplex starts from the slack basis.
    """
    groups = system.edge_groups()
    offsets = []
    pos = 1
    for group in groups:
        offsets.append(pos)
        pos += len(group)
    n = pos
    rows = []
    edge_ids = system.edge_ids()
    caps = system.capacities()
    for eid in edge_ids:
        coeffs = np.zeros(n)
        for g, group in enumerate(groups):
            for j, path in enumerate(group):
                if eid in path:
                    coeffs[offsets[g] + j] = 1.0
        rows.append((coeffs, "<=", caps[eid]))
    for g, group in enumerate(groups):
        coeffs = np.zeros(n)
        coeffs[offsets[g] : offsets[g] + len(group)] = 1.0
        rows.append((coeffs, "<=", float(bounds[g])))
    for g, group in enumerate(groups):
        coeffs = np.zeros(n)
        coeffs[0] = float(bounds[g])
        coeffs[offsets[g] : offsets[g] + len(group)] = -1.0
        rows.append((coeffs, "<=", 0.0))
    return n, offsets, rows


def lp_emcfp_lambda(system: PathSystem, bounds: Sequence[float] | None = None) -> float:
    """Exact best worst-case service ratio ``max min_i V_i / b_i`` with V_i <= b_i.

    A commodity with an empty path list pins the ratio to zero.
    """
    if bounds is None:
        bounds = system.network.bounds()
    for b in bounds:
        if not b > 0:
            raise ValueError(f"bounds must be positive, got {b}")
    n, _, rows = _ratio_lp_rows(system, bounds)
    objective = np.zeros(n)
    objective[0] = 1.0
    try:
        res = solve_lp(objective, rows)
    except SimplexError as exc:
        raise OracleError(f"ratio LP failed: {exc}") from exc
    return float(min(max(res.value, 0.0), 1.0))


def lp_emcfpsc(system: PathSystem, bounds: Sequence[float] | None = None) -> tuple[float, float, Flow]:
    """Two-stage exact solve: best ratio first, then maximum total value at it.

    Stage 2 re-imposes ``V_i >= (ratio - STAGE_SLACK) * b_i`` and maximizes
    the total value, returning ``(ratio, total, flow)``.
    """
    if bounds is None:
        bounds = system.network.bounds()
    lam = lp_emcfp_lambda(system, bounds)
    target = lam - STAGE_SLACK
    groups = system.edge_groups()
    offsets = []
    pos = 0
    for group in groups:
        offsets.append(pos)
        pos += len(group)
    n = pos
    if n == 0:
        return lam, 0.0, Flow.zero(system)
    rows = []
    caps = system.capacities()
    for eid in system.edge_ids():
        coeffs = np.zeros(n)
        for g, group in enumerate(groups):
            for j, path in enumerate(group):
                if eid in path:
                    coeffs[offsets[g] + j] = 1.0
        rows.append((coeffs, "<=", caps[eid]))
    for g, group in enumerate(groups):
        coeffs = np.zeros(n)
        coeffs[offsets[g] : offsets[g] + len(group)] = 1.0
        rows.append((coeffs, "<=", float(bounds[g])))
        if target > 0 and group:
            rows.append((coeffs.copy(), ">=", target * float(bounds[g])))
        # An empty group forces ratio 0; no floor row to add.
    objective = np.ones(n)
    try:
        res = solve_lp(objective, rows)
    except SimplexError as exc:
        raise OracleError(f"saturation LP failed: {exc}") from exc
    x = _clip(res.x)
    dense = []
    for g, group in enumerate(groups):
        dense.append(tuple(float(v) for v in x[offsets[g] : offsets[g] + len(group)]))
    flow = Flow(system, tuple(dense))
    return lam, float(x.sum()), flow
