"""Dense two-phase primal simplex for small and medium linear programs.

Conventions
-----------
A program is ``minimize c @ x`` subject to rows ``a_i @ x (<=|>=|=) b_i``
and per-variable bounds ``lower <= x <= upper`` (``+-inf`` allowed, so
free variables are supported directly by the bounded-variable method
rather than by splitting into differences).

The solver owns a dense tableau ``B^{-1} A``.  Entering columns are
priced by largest reduced-cost violation (Dantzig) while the objective
makes progress; after a run of degenerate pivots the solver switches to
Bland's rule (lowest eligible index entering, lowest basic index
leaving among ties), which breaks any cycle, and switches back once a
pivot makes progress.  ``solve(..., bland_only=True)`` forces Bland
pricing throughout.  Phase 1 starts from slack columns where they are
feasible and artificial columns elsewhere; artificial variables are
driven out of the basis before phase 2 and then fixed at zero.

Row duals are reported for the rows exactly as given (no row is ever
negated during standardization), so ``row_duals[i]`` is the multiplier
of constraint ``i`` in the minimization problem.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Sequence

import numpy as np

PIVOT_TOL = 1e-10       # entries smaller than this are rejected as pivots
REDCOST_TOL = 1e-9      # reduced-cost threshold for entering candidates
FEAS_TOL = 1e-8         # absolute-plus-relative feasibility tolerance
DEFAULT_MAX_PIVOTS = 1_000_000
_REFRESH_EVERY = 512    # periodic reduced-cost recomputation
_STALL_LIMIT = 64       # degenerate pivots tolerated before Bland kicks in


class LpStatus(enum.Enum):
    OPTIMAL = "optimal"
    INFEASIBLE = "infeasible"
    UNBOUNDED = "unbounded"


class SimplexIterationError(RuntimeError):
    """Pivot cap exceeded."""


@dataclass(frozen=True)
class LinearProgram:
    """minimize ``objective @ x`` subject to rows, relations, rhs, bounds."""

    objective: np.ndarray
    rows: np.ndarray
    relations: tuple[str, ...]
    rhs: np.ndarray
    lower: np.ndarray
    upper: np.ndarray

    def __post_init__(self) -> None:
        c = np.asarray(self.objective, dtype=float)
        a = np.atleast_2d(np.asarray(self.rows, dtype=float))
        b = np.asarray(self.rhs, dtype=float)
        lo = np.asarray(self.lower, dtype=float)
        up = np.asarray(self.upper, dtype=float)
        if c.ndim != 1:
            raise ValueError("objective must be 1-d")
        if a.shape != (b.size, c.size):
            raise ValueError(
                f"rows shape {a.shape} does not match {b.size} rhs / {c.size} vars"
            )
        if len(self.relations) != b.size:
            raise ValueError("one relation per row required")
        bad = set(self.relations) - {"<=", ">=", "="}
        if bad:
            raise ValueError(f"unknown relations {sorted(bad)}")
        if not np.all(np.isfinite(b)):
            raise ValueError("rhs must be finite")
        if lo.shape != c.shape or up.shape != c.shape:
            raise ValueError("bounds must match the variable count")
        if np.any(lo > up):
            raise ValueError("lower bound exceeds upper bound")
        object.__setattr__(self, "objective", c)
        object.__setattr__(self, "rows", a)
        object.__setattr__(self, "relations", tuple(self.relations))
        object.__setattr__(self, "rhs", b)
        object.__setattr__(self, "lower", lo)
        object.__setattr__(self, "upper", up)

    @property
    def n_vars(self) -> int:
        return int(self.objective.size)

    @property
    def n_rows(self) -> int:
        return int(self.rhs.size)


def make_lp(
    objective: Sequence[float],
    constraints: Sequence[tuple[Sequence[float], str, float]],
    lower: Sequence[float] | None = None,
    upper: Sequence[float] | None = None,
) -> LinearProgram:
    """Convenience constructor; bounds default to ``x >= 0``."""
    c = np.asarray(objective, dtype=float)
    rows = np.array([np.asarray(r, dtype=float) for r, _, _ in constraints])
    rels = tuple(rel for _, rel, _ in constraints)
    rhs = np.array([float(b) for _, _, b in constraints])
    lo = np.zeros_like(c) if lower is None else np.asarray(lower, dtype=float)
    up = np.full_like(c, np.inf) if upper is None else np.asarray(upper, dtype=float)
    return LinearProgram(c, rows, rels, rhs, lo, up)


@dataclass(frozen=True)
class LpSolution:
    status: LpStatus
    x: np.ndarray | None
    objective_value: float
    row_duals: np.ndarray | None = None


class _Tableau:
    """Mutable solver state for one :func:`solve` call."""

    def __init__(self, lp: LinearProgram) -> None:
        m, n = lp.n_rows, lp.n_vars
        slack_rows = [i for i, rel in enumerate(lp.relations) if rel != "="]
        n_slack = len(slack_rows)
        ntot = n + n_slack + m  # structural + slack + artificial

        A = np.zeros((m, ntot))
        A[:, :n] = lp.rows
        lo = np.concatenate([lp.lower, np.zeros(n_slack + m)])
        up = np.concatenate([lp.upper, np.full(n_slack + m, np.inf)])

        slack_col = {}
        for idx, i in enumerate(slack_rows):
            j = n + idx
            A[i, j] = 1.0 if lp.relations[i] == "<=" else -1.0
            slack_col[i] = j

        # Nonbasic starting values: finite lower bound, else finite upper
        # bound, else zero (free).
        val = np.where(np.isfinite(lo), lo, np.where(np.isfinite(up), up, 0.0))
        at_upper = ~np.isfinite(lo) & np.isfinite(up)

        resid = lp.rhs - A[:, : n + n_slack] @ val[: n + n_slack]
        basis = np.empty(m, dtype=int)
        art_cols = []
        for i in range(m):
            j = slack_col.get(i)
            sigma = A[i, j] if j is not None else 0.0
            if j is not None and sigma * resid[i] >= 0.0:
                basis[i] = j
                # basic slack absorbs the residual
            else:
                jart = n + n_slack + i
                A[i, jart] = 1.0 if resid[i] >= 0.0 else -1.0
                basis[i] = jart
                art_cols.append(jart)

        sign = np.array([A[i, basis[i]] for i in range(m)])
        self.T = A * sign[:, None]  # B^{-1} A with the diagonal start basis
        self.xB = sign * resid
        self.xB[self.xB < 0.0] = 0.0  # only roundoff can push below zero
        self.A = A
        self.basis = basis
        self.in_basis = np.zeros(ntot, dtype=bool)
        self.in_basis[basis] = True
        self.val = val
        self.at_upper = at_upper
        self.lo = lo
        self.up = up
        self.n = n
        self.ntot = ntot
        self.art_mask = np.zeros(ntot, dtype=bool)
        self.art_mask[n + n_slack :] = True
        self.free = ~np.isfinite(lo) & ~np.isfinite(up)
        self.pivots = 0

    def reduced_costs(self, costs: np.ndarray) -> np.ndarray:
        return costs - costs[self.basis] @ self.T

    def run_phase(self, costs: np.ndarray, max_pivots: int, bland_only: bool = False) -> LpStatus:
        """Iterate to optimality of ``costs`` from the current basis."""
        d = self.reduced_costs(costs)
        since_refresh = 0
        stall = 0
        bland_mode = bland_only
        while True:
            fixed = self.lo == self.up
            can_enter = ~self.in_basis & ~fixed
            viol = np.zeros_like(d)
            down_ok = can_enter & (self.at_upper | self.free) & (d > REDCOST_TOL)
            up_ok = can_enter & ~self.at_upper & (d < -REDCOST_TOL)
            viol[down_ok] = d[down_ok]
            viol[up_ok] = -d[up_ok]
            if not viol.any():
                return LpStatus.OPTIMAL
            if bland_mode:
                j = int(np.argmax(viol > 0.0))  # lowest eligible index
            else:
                j = int(np.argmax(viol))  # largest violation
            direction = 1.0 if d[j] < 0.0 else -1.0

            t_star, row = self._ratio_test(j, direction)
            span = self.up[j] - self.lo[j]
            if span <= t_star:
                # Bound flip: the entering variable crosses its own box
                # before any basic variable blocks.
                if not np.isfinite(span):
                    return LpStatus.UNBOUNDED
                self.xB -= direction * span * self.T[:, j]
                self.val[j] = self.up[j] if direction > 0 else self.lo[j]
                self.at_upper[j] = direction > 0
                step = span
            else:
                if row < 0:
                    return LpStatus.UNBOUNDED
                self._pivot(j, direction, t_star, row)
                d -= d[j] * self.T[row]
                d[j] = 0.0
                step = t_star
            self.pivots += 1
            since_refresh += 1
            if self.pivots > max_pivots:
                raise SimplexIterationError(
                    f"exceeded {max_pivots} pivots without terminating"
                )
            if not bland_only:
                # Degenerate stretches get Bland's anti-cycling rule;
                # any progress switches back to Dantzig pricing.
                if step > 1e-12:
                    stall = 0
                    bland_mode = False
                else:
                    stall += 1
                    if stall >= _STALL_LIMIT:
                        bland_mode = True
            if since_refresh >= _REFRESH_EVERY:
                d = self.reduced_costs(costs)
                since_refresh = 0

    def _ratio_test(self, j: int, direction: float) -> tuple[float, int]:
        """Largest step for entering column ``j``; returns (t, blocking row)."""
        w = direction * self.T[:, j]
        loB = self.lo[self.basis]
        upB = self.up[self.basis]
        t_best = np.inf
        row = -1
        dec = w > PIVOT_TOL  # basic value decreases toward its lower bound
        inc = w < -PIVOT_TOL
        with np.errstate(invalid="ignore", divide="ignore"):
            t_dec = np.where(dec, np.maximum(self.xB - loB, 0.0) / np.where(dec, w, 1.0), np.inf)
            t_inc = np.where(inc, np.maximum(upB - self.xB, 0.0) / np.where(inc, -w, 1.0), np.inf)
        t_rows = np.minimum(t_dec, t_inc)
        t_min = float(t_rows.min()) if t_rows.size else np.inf
        if np.isfinite(t_min):
            ties = np.flatnonzero(t_rows <= t_min + 1e-12)
            # Bland: lowest basic index among the blocking rows.
            row = int(ties[np.argmin(self.basis[ties])])
            t_best = t_min
        return t_best, row

    def _pivot(self, j: int, direction: float, t: float, row: int) -> None:
        leaving = self.basis[row]
        w = self.T[:, j]
        enter_val = self.val[j] + direction * t
        self.xB -= direction * t * w
        # The leaving variable exits at whichever bound blocked the step.
        if direction * w[row] > 0:
            self.val[leaving] = self.lo[leaving]
            self.at_upper[leaving] = False
        else:
            self.val[leaving] = self.up[leaving]
            self.at_upper[leaving] = True
        piv = self.T[row, j]
        self.T[row] /= piv
        col = self.T[:, j].copy()
        col[row] = 0.0
        self.T -= np.outer(col, self.T[row])
        self.in_basis[leaving] = False
        self.in_basis[j] = True
        self.basis[row] = j
        self.xB[row] = enter_val
        self.val[j] = enter_val

    def drive_out_artificials(self) -> None:
        """Degenerate t=0 pivots replacing basic artificials where possible."""
        for row in range(len(self.basis)):
            if not self.art_mask[self.basis[row]]:
                continue
            candidates = np.flatnonzero(
                (np.abs(self.T[row]) >= PIVOT_TOL) & ~self.in_basis & ~self.art_mask
            )
            if candidates.size == 0:
                continue  # numerically redundant row; artificial stays pinned
            self._pivot(int(candidates[0]), 1.0, 0.0, row)

    def solution_vector(self) -> np.ndarray:
        x = self.val.copy()
        x[self.basis] = self.xB
        return x

    def duals(self, costs: np.ndarray) -> np.ndarray:
        basis_matrix = self.A[:, self.basis]
        try:
            return np.linalg.solve(basis_matrix.T, costs[self.basis])
        except np.linalg.LinAlgError:
            return np.linalg.lstsq(basis_matrix.T, costs[self.basis], rcond=None)[0]


def solve(
    lp: LinearProgram,
    max_pivots: int = DEFAULT_MAX_PIVOTS,
    bland_only: bool = False,
) -> LpSolution:
    """Two-phase bounded-variable primal simplex.

    Returns an :class:`LpSolution` whose status is one of optimal,
    infeasible, or unbounded; raises :class:`SimplexIterationError` if
    the pivot cap is exceeded.  Deterministic: identical programs yield
    bit-identical solutions.
    """
    tab = _Tableau(lp)

    phase1_costs = np.zeros(tab.ntot)
    phase1_costs[tab.art_mask] = 1.0
    if np.any(tab.art_mask[tab.basis]):
        status = tab.run_phase(phase1_costs, max_pivots, bland_only)
        if status is not LpStatus.OPTIMAL:
            raise SimplexIterationError("phase 1 reported unbounded; tableau corrupt")
        infeas = float(phase1_costs @ tab.solution_vector())
        if infeas > FEAS_TOL * (1.0 + float(np.max(np.abs(lp.rhs), initial=0.0))):
            return LpSolution(LpStatus.INFEASIBLE, None, float("nan"), None)
        tab.drive_out_artificials()

    # Artificials are pinned at zero for phase 2.
    tab.lo[tab.art_mask] = 0.0
    tab.up[tab.art_mask] = 0.0
    tab.val[tab.art_mask & ~tab.in_basis] = 0.0

    phase2_costs = np.zeros(tab.ntot)
    phase2_costs[: lp.n_vars] = lp.objective
    status = tab.run_phase(phase2_costs, max_pivots, bland_only)
    if status is LpStatus.UNBOUNDED:
        return LpSolution(LpStatus.UNBOUNDED, None, float("-inf"), None)

    x_full = tab.solution_vector()
    x = x_full[: lp.n_vars].copy()
    objective_value = float(lp.objective @ x)
    duals = tab.duals(phase2_costs)
    return LpSolution(LpStatus.OPTIMAL, x, objective_value, duals)
