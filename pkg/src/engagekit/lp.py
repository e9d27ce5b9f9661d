"""Dense two-phase tableau simplex, built for determinism over scale.

Maximizes c @ x subject to equality rows, <= rows, and per-variable lower
bounds (default 0). Bland's rule everywhere — entering variable is the
lowest index with a favorable reduced cost, the leaving row breaks ratio
ties by lowest basic-variable index — so the solver cannot cycle and
identical inputs produce bit-identical solutions. Problem sizes here are
modest (recommendation plans, hundreds of variables), where a dense
tableau is simple to verify and fast enough.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "LinearProgram",
    "LpSolution",
    "ConstraintReport",
    "SimplexError",
    "solve",
    "check_solution",
]

_EPS_REDUCED = 1e-9   # reduced cost considered favorable
_EPS_PIVOT = 1e-9     # smallest usable pivot element
_EPS_FEAS = 1e-8      # phase-1 residual considered infeasible


class SimplexError(RuntimeError):
    """Internal failure (iteration cap hit); distinct from bad input."""


@dataclass
class LinearProgram:
    """max objective @ x s.t. eq rows hold, ub rows are <=, x >= lower bounds."""

    objective: np.ndarray
    eq_matrix: np.ndarray | None = None
    eq_rhs: np.ndarray | None = None
    ub_matrix: np.ndarray | None = None
    ub_rhs: np.ndarray | None = None
    lower_bounds: np.ndarray | None = None

    def __post_init__(self):
        self.objective = np.atleast_1d(np.asarray(self.objective, dtype=float))
        n = self.n_vars
        self.eq_matrix, self.eq_rhs = _coerce_rows(self.eq_matrix, self.eq_rhs, n, "eq")
        self.ub_matrix, self.ub_rhs = _coerce_rows(self.ub_matrix, self.ub_rhs, n, "ub")
        if self.lower_bounds is None:
            self.lower_bounds = np.zeros(n)
        else:
            self.lower_bounds = np.asarray(self.lower_bounds, dtype=float)
            if self.lower_bounds.shape != (n,):
                raise ValueError("lower_bounds length must match objective")
        for name, arr in (
            ("objective", self.objective),
            ("eq_matrix", self.eq_matrix),
            ("eq_rhs", self.eq_rhs),
            ("ub_matrix", self.ub_matrix),
            ("ub_rhs", self.ub_rhs),
            ("lower_bounds", self.lower_bounds),
        ):
            if not np.all(np.isfinite(arr)):
                raise ValueError(f"{name} must be finite")

    @property
    def n_vars(self) -> int:
        return len(self.objective)


def _coerce_rows(matrix, rhs, n, name):
    if matrix is None or (hasattr(matrix, "__len__") and len(matrix) == 0):
        return np.zeros((0, n)), np.zeros(0)
    matrix = np.atleast_2d(np.asarray(matrix, dtype=float))
    rhs = np.atleast_1d(np.asarray(rhs, dtype=float))
    if matrix.shape != (len(rhs), n):
        raise ValueError(
            f"{name} constraints have shape {matrix.shape}, expected ({len(rhs)}, {n})"
        )
    return matrix, rhs


@dataclass
class LpSolution:
    status: str  # optimal | infeasible | unbounded
    x: np.ndarray | None
    objective_value: float | None


@dataclass
class ConstraintReport:
    """Worst violation per constraint group for a candidate point."""

    eq: float
    ub: float
    bounds: float
    max_violation: float
    worst: tuple[str, int] | None
    passed: bool


def check_solution(lp: LinearProgram, x, tol: float = 1e-8) -> ConstraintReport:
    """Measure constraint violations of ``x`` (used by downstream audits)."""
    x = np.asarray(x, dtype=float)
    if x.shape != (lp.n_vars,):
        raise ValueError(f"x has shape {x.shape}, expected ({lp.n_vars},)")
    groups: list[tuple[str, np.ndarray]] = []
    if len(lp.eq_rhs):
        groups.append(("eq", np.abs(lp.eq_matrix @ x - lp.eq_rhs)))
    else:
        groups.append(("eq", np.zeros(0)))
    if len(lp.ub_rhs):
        groups.append(("ub", np.maximum(lp.ub_matrix @ x - lp.ub_rhs, 0.0)))
    else:
        groups.append(("ub", np.zeros(0)))
    groups.append(("bounds", np.maximum(lp.lower_bounds - x, 0.0)))
    maxima = {name: float(v.max()) if len(v) else 0.0 for name, v in groups}
    worst = None
    worst_val = 0.0
    for name, v in groups:
        if len(v) and v.max() > worst_val:
            worst_val = float(v.max())
            worst = (name, int(v.argmax()))
    max_violation = max(maxima.values())
    return ConstraintReport(
        eq=maxima["eq"],
        ub=maxima["ub"],
        bounds=maxima["bounds"],
        max_violation=max_violation,
        worst=worst,
        passed=max_violation <= tol,
    )


def solve(lp: LinearProgram, max_iterations: int | None = None) -> LpSolution:
    """Solve the program; returns status rather than raising on bad geometry.

    ``max_iterations`` overrides the default cap of 10 * (rows + cols)^2
    tableau pivots (a backstop only: Bland's rule already rules out
    cycling). Hitting the cap raises :class:`SimplexError`.
    """
    n = lp.n_vars
    shift = lp.lower_bounds
    # substitute y = x - lower_bounds so the tableau works on y >= 0
    b_eq = lp.eq_rhs - lp.eq_matrix @ shift if len(lp.eq_rhs) else lp.eq_rhs
    b_ub = lp.ub_rhs - lp.ub_matrix @ shift if len(lp.ub_rhs) else lp.ub_rhs
    offset = float(lp.objective @ shift)

    m_eq, m_ub = len(b_eq), len(b_ub)
    m = m_eq + m_ub
    nv = n + m_ub  # structural + slack columns
    A = np.zeros((m, nv))
    b = np.zeros(m)
    if m_eq:
        A[:m_eq, :n] = lp.eq_matrix
        b[:m_eq] = b_eq
    if m_ub:
        A[m_eq:, :n] = lp.ub_matrix
        A[m_eq:, n:] = np.eye(m_ub)
        b[m_eq:] = b_ub
    negative = b < 0
    A[negative] *= -1.0
    b[negative] *= -1.0

    # slack is a valid basis column only for <= rows that kept their sign
    basis = np.full(m, -1, dtype=int)
    needs_artificial = []
    for i in range(m):
        if i >= m_eq and not negative[i]:
            basis[i] = n + (i - m_eq)
        else:
            needs_artificial.append(i)
    n_art = len(needs_artificial)

    T = np.zeros((m + 1, nv + n_art + 1))
    T[:m, :nv] = A
    T[:m, -1] = b
    for k, i in enumerate(needs_artificial):
        T[i, nv + k] = 1.0
        basis[i] = nv + k

    cap = max_iterations if max_iterations is not None else 10 * (m + 1 + T.shape[1]) ** 2

    if n_art:
        # phase 1: maximize -(sum of artificials)
        T[m, :] = 0.0
        T[m, nv:nv + n_art] = -1.0
        for i in range(m):
            if basis[i] >= nv:
                T[m, :] -= T[m, basis[i]] * T[i, :]
        status = _pivot_loop(T, basis, nv + n_art, cap)
        if status == "unbounded":  # cannot happen: phase-1 objective bounded
            raise SimplexError("phase 1 reported unbounded")
        phase1_value = -T[m, -1]  # maximum of -(sum of artificials)
        if phase1_value < -_EPS_FEAS:
            return LpSolution("infeasible", None, None)
        _drive_out_artificials(T, basis, nv)
        T[:, nv:nv + n_art] = 0.0

    # phase 2 on the real objective
    T[m, :] = 0.0
    T[m, :n] = lp.objective
    for i in range(m):
        coef = T[m, basis[i]]
        if coef != 0.0:
            T[m, :] -= coef * T[i, :]
    status = _pivot_loop(T, basis, nv, cap)
    if status == "unbounded":
        return LpSolution("unbounded", None, None)

    y = np.zeros(nv)
    for i in range(m):
        if basis[i] < nv:
            y[basis[i]] = T[i, -1]
    x = y[:n] + shift
    return LpSolution("optimal", x, float(lp.objective @ y[:n]) + offset)


def _pivot_loop(T: np.ndarray, basis: np.ndarray, allowed: int, cap: int) -> str:
    """Bland-rule pivoting until no reduced cost among the first ``allowed``
    columns is favorable. Mutates T and basis in place."""
    m = T.shape[0] - 1
    iterations = 0
    while True:
        favorable = np.nonzero(T[m, :allowed] > _EPS_REDUCED)[0]
        if len(favorable) == 0:
            return "optimal"
        iterations += 1
        if iterations > cap:
            raise SimplexError(f"pivot iteration cap {cap} exceeded")
        j = int(favorable[0])
        col = T[:m, j]
        rows = np.nonzero(col > _EPS_PIVOT)[0]
        if len(rows) == 0:
            return "unbounded"
        ratios = T[rows, -1] / col[rows]
        best = ratios.min()
        ties = rows[ratios <= best + 1e-12 * (1.0 + abs(best))]
        i = int(ties[np.argmin(basis[ties])])
        _pivot(T, basis, i, j)


def _pivot(T: np.ndarray, basis: np.ndarray, i: int, j: int) -> None:
    T[i, :] /= T[i, j]
    factors = T[:, j].copy()
    factors[i] = 0.0
    T[:, :] -= np.outer(factors, T[i, :])
    T[:, j] = 0.0
    T[i, j] = 1.0
    basis[i] = j


def _drive_out_artificials(T: np.ndarray, basis: np.ndarray, nv: int) -> None:
    """Pivot basic artificials (all at value ~0) onto real columns where
    possible; rows with no real coefficient are redundant and stay put."""
    m = T.shape[0] - 1
    for i in range(m):
        if basis[i] >= nv:
            candidates = np.nonzero(np.abs(T[i, :nv]) > _EPS_PIVOT)[0]
            if len(candidates):
                _pivot(T, basis, i, int(candidates[0]))
