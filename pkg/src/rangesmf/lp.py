"""Small dense simplex solver for box-bounded equality systems.

Every LP in this package has the shape

    find / maximise over x:   Aeq x = beq,   0 <= x <= ub

with at most a few dozen variables.  The upper bounds are carried as explicit
slack rows, so the tableau is ``(n_eq + n + 1) x (2n + n_eq + 1)``.  Phase 1
minimises the sum of artificial variables; phase 2 reuses the phase-1 basis for
any number of objectives.

The kernels are written with whole-row numpy operations so the same source
runs compiled under numba or as plain numpy (see ``_jit``).
"""
import numpy as np

from ._jit import njit

OPTIMAL = 0
INFEASIBLE = 1
ITERATION_LIMIT = 2

TAU_LP = 1e-9
_PIVOT_EPS = 1e-11
_COST_EPS = 1e-11


@njit
def _pivot(T, basis, r, c):
    T[r, :] = T[r, :] / T[r, c]
    col = T[:, c].copy()
    col[r] = 0.0
    T -= np.outer(col, T[r, :])
    T[:, c] = 0.0
    T[r, c] = 1.0
    basis[r] = c


@njit
def _simplex(T, basis, n_allowed, max_iter):
    # Minimises the objective stored in the last row; columns >= n_allowed never enter.
    # Dantzig pricing, switching to Bland's rule once degeneracy could cycle.
    m = T.shape[0] - 1
    bland_after = 4 * (m + n_allowed)
    it = 0
    while True:
        obj = T[m, :n_allowed]
        if it < bland_after:
            c = np.argmin(obj)
            if obj[c] >= -_COST_EPS:
                return OPTIMAL
        else:
            cand = np.nonzero(obj < -_COST_EPS)[0]
            if cand.shape[0] == 0:
                return OPTIMAL
            c = cand[0]
        col = T[:m, c]
        ok = col > _PIVOT_EPS
        if not ok.any():
            # unbounded direction; impossible with finite bounds
            return ITERATION_LIMIT
        ratios = np.where(ok, T[:m, -1] / np.where(ok, col, 1.0), np.inf)
        r = np.argmin(ratios)
        if it >= bland_after:
            ties = np.nonzero(ratios <= ratios[r] + 1e-13)[0]
            r = ties[0]
            for t in ties:
                if basis[t] < basis[r]:
                    r = t
        _pivot(T, basis, r, c)
        it += 1
        if it > max_iter:
            return ITERATION_LIMIT


@njit
def _phase1(Aeq, beq, ub, tol, max_iter):
    m_eq, n = Aeq.shape
    m = m_eq + n
    T = np.zeros((m + 1, 2 * n + m_eq + 1))
    basis = np.empty(m, np.int64)
    for i in range(m_eq):
        s = 1.0 if beq[i] >= 0.0 else -1.0
        T[i, :n] = s * Aeq[i, :]
        T[i, 2 * n + i] = 1.0
        T[i, -1] = s * beq[i]
        basis[i] = 2 * n + i
    for j in range(n):
        T[m_eq + j, j] = 1.0
        T[m_eq + j, n + j] = 1.0
        T[m_eq + j, -1] = ub[j]
        basis[m_eq + j] = n + j
    if m_eq > 0:
        T[m, :] = -T[:m_eq, :].sum(axis=0)
        T[m, 2 * n:2 * n + m_eq] = 0.0
    status = _simplex(T, basis, 2 * n + m_eq, max_iter)
    if status != OPTIMAL:
        return T, basis, status
    scale = 1.0
    if m_eq > 0:
        scale += np.max(np.abs(beq))
    if -T[m, -1] > tol * scale:
        return T, basis, INFEASIBLE
    # drive zero-valued artificials out of the basis where possible
    for i in range(m):
        if basis[i] >= 2 * n:
            T[i, -1] = 0.0
            row = np.abs(T[i, :2 * n])
            j = np.argmax(row)
            if row[j] > 1e-9:
                _pivot(T, basis, i, j)
    return T, basis, OPTIMAL


@njit
def lp_feasible(Aeq, beq, ub, tol, max_iter):
    """Status of ``{x : Aeq x = beq, 0 <= x <= ub}``: OPTIMAL means feasible."""
    _, _, status = _phase1(Aeq, beq, ub, tol, max_iter)
    return status


@njit
def lp_feasible_batch(Aeq, Beq, ub, tol, max_iter):
    out = np.empty(Beq.shape[0], np.int64)
    for p in range(Beq.shape[0]):
        _, _, out[p] = _phase1(Aeq, Beq[p], ub, tol, max_iter)
    return out


@njit
def lp_maximize_batch(Aeq, beq, ub, C, tol, max_iter):
    """Maximise ``C[k] @ x`` for every row k over the same feasible set.

    Returns ``(status, values)``; values are NaN unless status is OPTIMAL.
    """
    n = Aeq.shape[1]
    values = np.full(C.shape[0], np.nan)
    T, basis, status = _phase1(Aeq, beq, ub, tol, max_iter)
    if status != OPTIMAL:
        return status, values
    m = T.shape[0] - 1
    for k in range(C.shape[0]):
        T2 = T.copy()
        T2[m, :] = 0.0
        T2[m, :n] = -C[k]
        for i in range(m):
            b = basis[i]
            if b < n and C[k, b] != 0.0:
                T2[m, :] += C[k, b] * T2[i, :]
        st = _simplex(T2, basis.copy(), 2 * n, max_iter)
        if st != OPTIMAL:
            return st, values
        values[k] = T2[m, -1]
    return OPTIMAL, values


def default_max_iter(n_eq, n_var):
    return 50 * (n_eq + 2 * n_var + 10)
