"""Independent reference implementations used to cross-check the library.

These deliberately avoid the code paths they validate: the stage maximizer
is a golden-section search over the raw objective, and the LP oracle
enumerates every vertex of the feasible polytope in the original variable
space instead of pivoting a tableau.
"""

import itertools
import math

import numpy as np


def golden_section_max(f, a, b, tol=1e-13):
    """Maximize a unimodal function on [a, b]; returns (argmax, max)."""
    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    c = b - invphi * (b - a)
    d = a + invphi * (b - a)
    fc, fd = f(c), f(d)
    while b - a > tol * max(1.0, abs(b)):
        if fc > fd:
            b, d, fd = d, c, fc
            c = b - invphi * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + invphi * (b - a)
            fd = f(d)
    x = 0.5 * (a + b)
    return x, f(x)


def stage_objective(dist, continuation, t):
    """The one-tier objective, assembled from raw distribution calls."""
    return (t + continuation) * float(dist.survival(t)) + dist.truncated_mean_below(t)


def best_stage(dist, continuation):
    """Golden-section stage maximizer over the effective support."""
    lo, hi = dist.support
    if math.isinf(hi):
        hi = dist.quantile(1.0 - 1e-12)
    return golden_section_max(lambda t: stage_objective(dist, continuation, t), lo, hi)


def enumerate_lp_max(lp, tol=1e-7):
    """Exhaustive vertex enumeration for small LPs.

    Treats every subset of n constraints (equalities, inequalities, lower
    bounds) as a candidate active set, solves the linear system, keeps
    feasible points, and returns the best objective (None if no feasible
    vertex exists).
    """
    n = lp.n_vars
    rows = []
    for i in range(len(lp.eq_rhs)):
        rows.append((lp.eq_matrix[i], lp.eq_rhs[i]))
    for i in range(len(lp.ub_rhs)):
        rows.append((lp.ub_matrix[i], lp.ub_rhs[i]))
    for j in range(n):
        e = np.zeros(n)
        e[j] = 1.0
        rows.append((e, lp.lower_bounds[j]))
    best = None
    for combo in itertools.combinations(range(len(rows)), n):
        A = np.array([rows[i][0] for i in combo])
        b = np.array([rows[i][1] for i in combo])
        if abs(np.linalg.det(A)) < 1e-10:
            continue
        x = np.linalg.solve(A, b)
        if len(lp.eq_rhs) and np.abs(lp.eq_matrix @ x - lp.eq_rhs).max() > tol:
            continue
        if len(lp.ub_rhs) and (lp.ub_matrix @ x - lp.ub_rhs).max() > tol:
            continue
        if (lp.lower_bounds - x).max() > tol:
            continue
        value = float(lp.objective @ x)
        if best is None or value > best:
            best = value
    return best
