"""Dense two-phase primal simplex with Bland's rule.

Solves  max c.x  subject to rows of the form  a.x (<=|>=|==) rhs  with x >= 0.
Built for desk-scale problems (at most a few hundred variables and rows),
where the plain tableau method in double precision is robust. Bland's
entering/leaving rule precludes cycling, so every solve terminates; the
iteration cap only guards against pathological floating-point behaviour.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

FEASIBILITY_TOL = 1e-9
OPTIMALITY_TOL = 1e-8
PIVOT_TOL = 1e-9

LESS_EQUAL = "<="
GREATER_EQUAL = ">="
EQUAL = "=="


class SimplexError(RuntimeError):
    """Infeasible, unbounded, or stalled solve."""


@dataclass(frozen=True)
class LpResult:
    x: np.ndarray
    value: float
    iterations: int


def solve_lp(
    objective,
    rows,
    max_iterations: int | None = None,
) -> LpResult:
    """Maximize ``objective . x`` over ``rows`` of (coefficients, sense, rhs).

    Coefficient vectors may be shorter than the variable count; missing
    entries are zero. Raises ``SimplexError`` for infeasible or unbounded
    problems and when the iteration cap is exceeded.
    """
    c = np.asarray(objective, dtype=float)
    n = c.size
    m = len(rows)
    if m == 0:
        raise SimplexError("no constraint rows; problem is unbounded or trivial")

    a = np.zeros((m, n))
    b = np.zeros(m)
    senses = []
    for i, (coeffs, sense, rhs) in enumerate(rows):
        coeffs = np.asarray(coeffs, dtype=float)
        if coeffs.size > n:
            raise ValueError("constraint row longer than the objective")
        a[i, : coeffs.size] = coeffs
        b[i] = rhs
        if sense not in (LESS_EQUAL, GREATER_EQUAL, EQUAL):
            raise ValueError(f"unknown sense {sense!r}")
        senses.append(sense)

    # Normalize to nonnegative right-hand sides.
    for i in range(m):
        if b[i] < 0:
            a[i] *= -1.0
            b[i] = -b[i]
            if senses[i] == LESS_EQUAL:
                senses[i] = GREATER_EQUAL
            elif senses[i] == GREATER_EQUAL:
                senses[i] = LESS_EQUAL

    # Column layout: structural | slack/surplus | artificial.
    n_slack = sum(1 for s in senses if s != EQUAL)
    n_art = sum(1 for s in senses if s != LESS_EQUAL)
    ncols = n + n_slack + n_art
    tableau = np.zeros((m, ncols + 1))
    tableau[:, :n] = a
    tableau[:, -1] = b

    basis = [-1] * m
    slack_col = n
    art_col = n + n_slack
    art_cols = []
    for i, sense in enumerate(senses):
        if sense == LESS_EQUAL:
            tableau[i, slack_col] = 1.0
            basis[i] = slack_col
            slack_col += 1
        elif sense == GREATER_EQUAL:
            tableau[i, slack_col] = -1.0
            slack_col += 1
            tableau[i, art_col] = 1.0
            basis[i] = art_col
            art_cols.append(art_col)
            art_col += 1
        else:
            tableau[i, art_col] = 1.0
            basis[i] = art_col
            art_cols.append(art_col)
            art_col += 1

    if max_iterations is None:
        max_iterations = 2000 + 200 * (m + ncols)
    iterations = 0

    def pivot(row: int, col: int) -> None:
        tableau[row] /= tableau[row, col]
        factors = tableau[:, col].copy()
        factors[row] = 0.0
        tableau[...] -= np.outer(factors, tableau[row])
        # Keep the pivot column numerically exact.
        tableau[:, col] = 0.0
        tableau[row, col] = 1.0
        basis[row] = col

    def run_phase(costs: np.ndarray, allowed: np.ndarray) -> None:
        nonlocal iterations
        while True:
            if iterations > max_iterations:
                raise SimplexError("iteration cap exceeded; solve stalled")
            iterations += 1
            cb = costs[basis]
            reduced = costs - cb @ tableau[:, :ncols]
            reduced[basis] = 0.0
            candidates = np.flatnonzero(allowed & (reduced > OPTIMALITY_TOL))
            if candidates.size == 0:
                return
            col = int(candidates[0])  # Bland: smallest eligible index.
            column = tableau[:, col]
            rows_ok = np.flatnonzero(column > PIVOT_TOL)
            if rows_ok.size == 0:
                raise SimplexError("unbounded objective")
            ratios = tableau[rows_ok, -1] / column[rows_ok]
            best = ratios.min()
            tied = rows_ok[np.flatnonzero(ratios <= best + 1e-12)]
            leave = int(min(tied, key=lambda r: basis[r]))  # Bland on ties.
            pivot(leave, col)

    allowed = np.ones(ncols, dtype=bool)
    if art_cols:
        art_mask = np.zeros(ncols, dtype=bool)
        art_mask[art_cols] = True
        phase1_costs = np.zeros(ncols)
        phase1_costs[art_cols] = -1.0
        run_phase(phase1_costs, allowed)
        art_total = sum(tableau[i, -1] for i in range(m) if basis[i] in set(art_cols))
        if art_total > FEASIBILITY_TOL * (1.0 + float(np.max(b, initial=0.0))):
            raise SimplexError("infeasible constraint system")
        # Drive leftover artificial basics out on any usable structural column.
        for i in range(m):
            if not art_mask[basis[i]]:
                continue
            row_cols = np.flatnonzero(
                (~art_mask) & (np.abs(tableau[i, :ncols]) > PIVOT_TOL)
            )
            if row_cols.size:
                pivot(i, int(row_cols[0]))
            # Otherwise the row is redundant; the artificial stays basic at 0.
        allowed = ~art_mask

    phase2_costs = np.zeros(ncols)
    phase2_costs[:n] = c
    run_phase(phase2_costs, allowed)

    x = np.zeros(ncols)
    for i in range(m):
        x[basis[i]] = tableau[i, -1]
    solution = x[:n]
    return LpResult(solution, float(c @ solution), iterations)
