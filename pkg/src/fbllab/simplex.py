"""Dense two-phase simplex with Bland's rule.

Solves  min c.x  s.t.  A x = b, x >= 0  on a dense numpy tableau.
Bland's smallest-index rule makes cycling impossible; pivots below
PIVOT_TOL raise NumericalInstability instead of dividing by noise.

On top of the raw solver sit the two entry points the rest of the
package shares:

* max_min_slack(A, g): the exact value and witnesses of
  max_{d in simplex} min_i ((A d)_i - g_i), switching between the primal
  formulation and its LP dual depending on which way the matrix is tall
  (the subset-constraint systems have 2^n - 1 rows but only n columns).
* polytope_gauge(V, x): the Minkowski gauge of conv(V) at x.
"""

from dataclasses import dataclass

import numpy as np

from .errors import NumericalInstability

PIVOT_TOL = 1e-10
FEAS_TOL = 1e-9

OPTIMAL = "optimal"
INFEASIBLE = "infeasible"
UNBOUNDED = "unbounded"


@dataclass
class SimplexResult:
    status: str
    x: np.ndarray
    objective: float
    duals: np.ndarray  # y with y.A approx c on the basis; phase-1 duals if infeasible


def solve_standard(c, A, b):
    """min c.x  s.t.  A x = b, x >= 0, by the two-phase tableau method."""
    A = np.asarray(A, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64).copy()
    c = np.asarray(c, dtype=np.float64)
    m, n = A.shape

    # normalize to b >= 0 so the artificial basis is feasible
    flip = b < 0
    A = A.copy()
    A[flip] *= -1.0
    b[flip] *= -1.0

    # tableau columns: [x (n) | artificials (m) | rhs]
    T = np.zeros((m, n + m + 1))
    T[:, :n] = A
    T[:, n:n + m] = np.eye(m)
    T[:, -1] = b
    basis = list(range(n, n + m))

    art_cost = np.zeros(n + m)
    art_cost[n:] = 1.0
    obj = _reduced_row(T, basis, art_cost)
    _iterate(T, basis, obj, allowed=n + m)

    phase1_value = -obj[-1]
    if phase1_value > FEAS_TOL:
        duals1 = 1.0 - obj[n:n + m]  # y = c_B B^{-1}, read off the artificial columns
        duals1[flip] *= -1.0  # restore the original row orientation
        x = np.zeros(n)
        return SimplexResult(INFEASIBLE, x, float("nan"), duals1)

    _expel_artificials(T, basis, n)

    full_cost = np.concatenate([c, np.zeros(m)])
    obj = _reduced_row(T, basis, full_cost)
    status = _iterate(T, basis, obj, allowed=n)  # artificials may not re-enter
    x = np.zeros(n + m)
    for i, j in enumerate(basis):
        x[j] = T[i, -1]
    duals = -obj[n:n + m]  # artificial costs are 0, so reduced cost = -y
    duals[flip] *= -1.0
    return SimplexResult(status, x[:n], float(-obj[-1]), duals)


def _reduced_row(T, basis, cost):
    """Objective row [reduced costs | -objective] for the current basis."""
    m = T.shape[0]
    cb = cost[basis]
    row = np.empty(T.shape[1])
    row[:-1] = cost - cb @ T[:, :-1]
    row[-1] = -(cb @ T[:, -1])
    return row


def _iterate(T, basis, obj, allowed):
    """Pivot to optimality with Bland's rule; mutates T, basis, obj."""
    m = T.shape[0]
    while True:
        candidates = np.flatnonzero(obj[:allowed] < -FEAS_TOL)
        if candidates.size == 0:
            return OPTIMAL
        j = int(candidates[0])  # Bland: smallest improving index
        col = T[:, j]
        eligible = np.flatnonzero(col > PIVOT_TOL)
        if eligible.size == 0:
            if np.any(col > 0):
                raise NumericalInstability(
                    f"pivot column {j} has only sub-tolerance positive entries")
            return UNBOUNDED
        ratios = T[eligible, -1] / col[eligible]
        best = np.min(ratios)
        ties = eligible[ratios <= best + PIVOT_TOL * (1.0 + abs(best))]
        r = int(min(ties, key=lambda i: basis[i]))  # Bland on the leaving variable
        _pivot(T, obj, r, j)
        basis[r] = j


def _pivot(T, obj, r, j):
    piv = T[r, j]
    if abs(piv) < PIVOT_TOL:
        raise NumericalInstability(f"pivot element {piv:.3e} below tolerance")
    T[r] /= piv
    col = T[:, j].copy()
    col[r] = 0.0
    T -= np.outer(col, T[r])
    obj -= obj[j] * T[r]


def _expel_artificials(T, basis, n):
    """Pivot zero-valued artificials out of the basis; drop redundant rows."""
    m = T.shape[0]
    drop = []
    for i in range(m):
        if basis[i] >= n:
            row = T[i, :n]
            j = np.flatnonzero(np.abs(row) > PIVOT_TOL)
            if j.size == 0:
                drop.append(i)  # redundant constraint
            else:
                dummy = np.zeros(T.shape[1])
                _pivot(T, dummy, i, int(j[0]))
                basis[i] = int(j[0])
    # redundant rows stay but can never pivot again; nothing else to do


@dataclass
class MinimaxResult:
    """Outcome of max_{d in simplex} min_i ((A d)_i - g_i)."""

    value: float
    d: np.ndarray  # maximizing simplex point over the columns
    y: np.ndarray  # minimizing row distribution; infeasibility certificate when value < 0

    @property
    def feasible(self):
        return self.value >= -FEAS_TOL


def max_min_slack(A, g):
    """Exact minimax of (A d) - g over the simplex in d.

    When the system has many more rows than columns the LP dual
    (min_{y in simplex} [max_j (A^T y)_j - g.y], by LP duality) is solved
    instead; both paths return the same value and both witnesses.
    """
    A = np.asarray(A, dtype=np.float64)
    g = np.asarray(g, dtype=np.float64)
    R, N = A.shape
    if R <= 4 * N + 4:
        return _minimax_primal(A, g)
    return _minimax_dual(A, g)


def _minimax_primal(A, g):
    R, N = A.shape
    # variables: [d (N), t+, t-, surplus (R)]
    nv = N + 2 + R
    Aeq = np.zeros((R + 1, nv))
    Aeq[:R, :N] = A
    Aeq[:R, N] = -1.0
    Aeq[:R, N + 1] = 1.0
    Aeq[:R, N + 2:] = -np.eye(R)
    Aeq[R, :N] = 1.0
    beq = np.concatenate([g, [1.0]])
    cost = np.zeros(nv)
    cost[N] = -1.0
    cost[N + 1] = 1.0
    res = solve_standard(cost, Aeq, beq)
    if res.status != OPTIMAL:
        raise NumericalInstability(f"minimax primal ended {res.status}")
    d = np.clip(res.x[:N], 0.0, None)
    total = d.sum()
    if total > 0:
        d = d / total
    y = np.clip(res.duals[:R], 0.0, None)
    ysum = y.sum()
    if ysum > 0:
        y = y / ysum
    return MinimaxResult(float(-res.objective), d, y)


def _minimax_dual(A, g):
    R, N = A.shape
    # dual LP: min lambda - g.y  s.t. A^T y <= lambda, sum y = 1, y >= 0
    # variables: [y (R), lambda+, lambda-, slack (N)]
    nv = R + 2 + N
    Aeq = np.zeros((N + 1, nv))
    Aeq[:N, :R] = A.T
    Aeq[:N, R] = -1.0
    Aeq[:N, R + 1] = 1.0
    Aeq[:N, R + 2:] = np.eye(N)
    Aeq[N, :R] = 1.0
    beq = np.concatenate([np.zeros(N), [1.0]])
    cost = np.zeros(nv)
    cost[:R] = -g
    cost[R] = 1.0
    cost[R + 1] = -1.0
    res = solve_standard(cost, Aeq, beq)
    if res.status != OPTIMAL:
        raise NumericalInstability(f"minimax dual ended {res.status}")
    y = np.clip(res.x[:R], 0.0, None)
    ysum = y.sum()
    if ysum > 0:
        y = y / ysum
    d = np.clip(-res.duals[:N], 0.0, None)  # row duals carry -d
    total = d.sum()
    if total > 0:
        d = d / total
    return MinimaxResult(float(res.objective), d, y)


def polytope_gauge(V, x):
    """Gauge of conv(rows of V) at x: min sum(lam), V^T lam = x, lam >= 0."""
    V = np.asarray(V, dtype=np.float64)
    x = np.asarray(x, dtype=np.float64)
    if not np.any(x):
        return 0.0
    M, d = V.shape
    res = solve_standard(np.ones(M), V.T, x)
    if res.status != OPTIMAL:
        raise NumericalInstability(f"gauge LP ended {res.status}")
    return float(res.objective)
