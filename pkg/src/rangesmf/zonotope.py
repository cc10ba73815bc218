"""Extended constrained zonotopes and their exact set algebra.

A set is stored as ``{G xi + c : A xi = b, lo <= xi <= hi}``.  Generator bounds
are general intervals, so one-sided ranges such as ``[0, 1]`` are kept as-is.
Linear maps, Minkowski sums and generalized intersections are exact and purely
structural; emptiness, support values, hulls and point membership go through the
small simplex kernel in :mod:`rangesmf.lp`.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from . import lp
from .errors import DimensionError, EmptySetError, LPIterationLimitError

log = logging.getLogger(__name__)

TAU_LP = lp.TAU_LP


def _frozen(a, ndim):
    arr = np.array(a, dtype=float, ndmin=ndim)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class ExtConstrainedZonotope:
    G: np.ndarray
    c: np.ndarray
    A: np.ndarray
    b: np.ndarray
    lo: np.ndarray
    hi: np.ndarray

    def __post_init__(self):
        G, c, A, b, lo, hi = self.G, self.c, self.A, self.b, self.lo, self.hi
        if G.ndim != 2 or c.ndim != 1 or A.ndim != 2 or b.ndim != 1:
            raise DimensionError("G, A must be 2-D and c, b 1-D")
        if G.shape[0] != c.shape[0]:
            raise DimensionError(f"G has {G.shape[0]} rows but c has length {c.shape[0]}")
        n_g = G.shape[1]
        if A.shape[1] != n_g:
            raise DimensionError(f"A has {A.shape[1]} columns, expected {n_g}")
        if A.shape[0] != b.shape[0]:
            raise DimensionError(f"A has {A.shape[0]} rows but b has length {b.shape[0]}")
        if lo.shape != (n_g,) or hi.shape != (n_g,):
            raise DimensionError(f"generator bounds must have length {n_g}")
        for name, arr in (("G", G), ("c", c), ("A", A), ("b", b), ("lo", lo), ("hi", hi)):
            if not np.all(np.isfinite(arr)):
                raise ValueError(f"{name} contains non-finite entries")
        if np.any(lo > hi):
            raise ValueError("generator bound with lo > hi")

    @property
    def dim(self) -> int:
        return self.c.shape[0]

    @property
    def n_gen(self) -> int:
        return self.G.shape[1]

    @property
    def n_con(self) -> int:
        return self.A.shape[0]

    @property
    def xi_box(self) -> tuple[np.ndarray, np.ndarray]:
        return self.lo, self.hi

    def __repr__(self):
        return f"ExtConstrainedZonotope(dim={self.dim}, n_gen={self.n_gen}, n_con={self.n_con})"


@dataclass(frozen=True)
class IntervalHull:
    lo: np.ndarray
    hi: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "lo", _frozen(self.lo, 1))
        object.__setattr__(self, "hi", _frozen(self.hi, 1))
        if self.lo.shape != self.hi.shape:
            raise DimensionError("hull bounds differ in length")
        if np.any(self.lo > self.hi):
            raise ValueError("hull with lo > hi")

    @property
    def center(self) -> np.ndarray:
        return 0.5 * (self.lo + self.hi)

    @property
    def half_widths(self) -> np.ndarray:
        return 0.5 * (self.hi - self.lo)

    def inf_norm(self, dims=None) -> float:
        """Largest half-width, i.e. ``||G||_inf`` of the box's diagonal generator matrix."""
        hw = self.half_widths if dims is None else self.half_widths[list(dims)]
        return float(np.max(hw)) if hw.size else 0.0

    def contains(self, x, tol=TAU_LP) -> bool:
        x = np.asarray(x, dtype=float)
        return bool(np.all(x >= self.lo - tol) and np.all(x <= self.hi + tol))

    def to_zonotope(self) -> ExtConstrainedZonotope:
        return box_zonotope(self.lo, self.hi)


def make_zonotope(G, c, A=None, b=None, xi_box=None) -> ExtConstrainedZonotope:
    """Validate and freeze a set.  ``xi_box`` is ``(lo, hi)``; default is ``[-1, 1]`` per generator."""
    G = np.array(G, dtype=float, ndmin=2)
    c = np.array(c, dtype=float).ravel()
    if G.size == 0:
        G = np.zeros((c.shape[0], 0))
    n_g = G.shape[1]
    if A is None or np.size(A) == 0:
        A = np.zeros((0, n_g))
        b = np.zeros(0) if b is None or np.size(b) == 0 else b
    A = np.array(A, dtype=float, ndmin=2)
    b = np.array(b, dtype=float).ravel()
    if xi_box is None:
        lo, hi = -np.ones(n_g), np.ones(n_g)
    else:
        lo, hi = xi_box
        lo = np.array(lo, dtype=float).ravel()
        hi = np.array(hi, dtype=float).ravel()
    return ExtConstrainedZonotope(
        _frozen(G, 2), _frozen(c, 1), _frozen(A, 2), _frozen(b, 1), _frozen(lo, 1), _frozen(hi, 1)
    )


def from_symmetric(G, c, A=None, b=None, h=None) -> ExtConstrainedZonotope:
    """Build from the symmetric quintuple ``(G, c, A, b, h)`` with ``xi_j in [-h_j, h_j]``."""
    G = np.array(G, dtype=float, ndmin=2)
    h = np.ones(G.shape[1]) if h is None else np.asarray(h, dtype=float)
    return make_zonotope(G, c, A, b, (-h, h))


def to_symmetric(Z: ExtConstrainedZonotope) -> ExtConstrainedZonotope:
    """Recenter every generator range to ``[-h, h]`` without changing the set."""
    mid = 0.5 * (Z.lo + Z.hi)
    half = 0.5 * (Z.hi - Z.lo)
    return make_zonotope(Z.G, Z.c + Z.G @ mid, Z.A, Z.b - Z.A @ mid, (-half, half))


def box_zonotope(lo, hi) -> ExtConstrainedZonotope:
    lo = np.asarray(lo, dtype=float)
    hi = np.asarray(hi, dtype=float)
    return make_zonotope(np.diag(0.5 * (hi - lo)), 0.5 * (lo + hi))


def point_zonotope(p) -> ExtConstrainedZonotope:
    p = np.asarray(p, dtype=float).ravel()
    return make_zonotope(np.zeros((p.shape[0], 0)), p)


def translate(Z: ExtConstrainedZonotope, p) -> ExtConstrainedZonotope:
    p = np.asarray(p, dtype=float).ravel()
    if p.shape[0] != Z.dim:
        raise DimensionError(f"shift has length {p.shape[0]}, set lives in R^{Z.dim}")
    return make_zonotope(Z.G, Z.c + p, Z.A, Z.b, Z.xi_box)


def linear_map(T, Z: ExtConstrainedZonotope) -> ExtConstrainedZonotope:
    T = np.array(T, dtype=float, ndmin=2)
    if T.shape[1] != Z.dim:
        raise DimensionError(f"map has {T.shape[1]} columns, set lives in R^{Z.dim}")
    return make_zonotope(T @ Z.G, T @ Z.c, Z.A, Z.b, Z.xi_box)


def minkowski_sum(Z: ExtConstrainedZonotope, W: ExtConstrainedZonotope) -> ExtConstrainedZonotope:
    if Z.dim != W.dim:
        raise DimensionError(f"cannot add sets in R^{Z.dim} and R^{W.dim}")
    A = np.block([
        [Z.A, np.zeros((Z.n_con, W.n_gen))],
        [np.zeros((W.n_con, Z.n_gen)), W.A],
    ])
    return make_zonotope(
        np.hstack([Z.G, W.G]),
        Z.c + W.c,
        A,
        np.concatenate([Z.b, W.b]),
        (np.concatenate([Z.lo, W.lo]), np.concatenate([Z.hi, W.hi])),
    )


def generalized_intersect(Z: ExtConstrainedZonotope, Y: ExtConstrainedZonotope, T=None) -> ExtConstrainedZonotope:
    """``{z in Z : T z in Y}``; ``T`` defaults to the identity."""
    T = np.eye(Z.dim) if T is None else np.array(T, dtype=float, ndmin=2)
    if T.shape != (Y.dim, Z.dim):
        raise DimensionError(f"map must be {Y.dim}x{Z.dim}, got {T.shape[0]}x{T.shape[1]}")
    A = np.block([
        [Z.A, np.zeros((Z.n_con, Y.n_gen))],
        [np.zeros((Y.n_con, Z.n_gen)), Y.A],
        [T @ Z.G, -Y.G],
    ])
    b = np.concatenate([Z.b, Y.b, Y.c - T @ Z.c])
    return make_zonotope(
        np.hstack([Z.G, np.zeros((Z.dim, Y.n_gen))]),
        Z.c,
        A,
        b,
        (np.concatenate([Z.lo, Y.lo]), np.concatenate([Z.hi, Y.hi])),
    )


def _shifted_system(Z: ExtConstrainedZonotope):
    # xi = lo + x with 0 <= x <= hi - lo
    Aeq = np.ascontiguousarray(Z.A)
    beq = np.ascontiguousarray(Z.b - Z.A @ Z.lo)
    return Aeq, beq, np.ascontiguousarray(Z.hi - Z.lo)


def is_empty(Z: ExtConstrainedZonotope) -> bool:
    if Z.n_con == 0:
        return False
    Aeq, beq, ub = _shifted_system(Z)
    status = lp.lp_feasible(Aeq, beq, ub, TAU_LP, lp.default_max_iter(*Aeq.shape))
    if status == lp.ITERATION_LIMIT:
        log.warning("LP iteration limit in is_empty (%r); treating set as nonempty", Z)
        return False
    return status == lp.INFEASIBLE


def support_values(Z: ExtConstrainedZonotope, D) -> np.ndarray:
    """``max_{z in Z} <d, z>`` for every row d of ``D``."""
    D = np.array(D, dtype=float, ndmin=2)
    if D.shape[1] != Z.dim:
        raise DimensionError(f"directions must have length {Z.dim}")
    W = D @ Z.G
    if Z.n_con == 0:
        return D @ Z.c + np.maximum(W * Z.lo, W * Z.hi).sum(axis=1)
    Aeq, beq, ub = _shifted_system(Z)
    status, vals = lp.lp_maximize_batch(
        Aeq, beq, ub, np.ascontiguousarray(W), TAU_LP, lp.default_max_iter(*Aeq.shape)
    )
    if status == lp.INFEASIBLE:
        raise EmptySetError("support of an empty set")
    if status != lp.OPTIMAL:
        raise LPIterationLimitError(f"support LP did not terminate for {Z!r}")
    return vals + D @ Z.c + W @ Z.lo


def support_value(Z: ExtConstrainedZonotope, d) -> float:
    return float(support_values(Z, np.asarray(d, dtype=float)[None, :])[0])


def interval_hull(Z: ExtConstrainedZonotope) -> IntervalHull:
    eye = np.eye(Z.dim)
    vals = support_values(Z, np.vstack([eye, -eye]))
    return IntervalHull(-vals[Z.dim:], vals[:Z.dim])


def radius_bound(Z: ExtConstrainedZonotope) -> float:
    """Upper bound on ``max_{z in Z} ||z - c||_2``; constraints are ignored."""
    if Z.n_gen == 0:
        return 0.0
    reach = np.maximum(np.abs(Z.lo), np.abs(Z.hi))
    return float(np.linalg.norm(np.abs(Z.G) @ reach))


def contains_points(Z: ExtConstrainedZonotope, X, tol=TAU_LP) -> np.ndarray:
    """Vectorised membership test for the rows of ``X``."""
    X = np.array(X, dtype=float, ndmin=2)
    if X.shape[1] != Z.dim:
        raise DimensionError(f"points must have length {Z.dim}")
    n_g = Z.n_gen
    M = np.vstack([Z.G, Z.A])
    rhs = np.hstack([X - Z.c, np.broadcast_to(Z.b, (X.shape[0], Z.n_con))])
    if n_g == 0:
        return np.all(np.abs(rhs) <= tol * (1.0 + np.abs(rhs)), axis=1)
    if M.shape[0] >= n_g and np.linalg.matrix_rank(M) == n_g:
        # unique candidate xi per point
        xi = rhs @ np.linalg.pinv(M).T
        scale = 1.0 + np.max(np.abs(rhs), axis=1)
        resid = np.max(np.abs(xi @ M.T - rhs), axis=1)
        in_box = np.all((xi >= Z.lo - tol * scale[:, None]) & (xi <= Z.hi + tol * scale[:, None]), axis=1)
        return (resid <= tol * scale) & in_box
    Beq = np.ascontiguousarray(rhs - M @ Z.lo)
    status = lp.lp_feasible_batch(
        np.ascontiguousarray(M), Beq, np.ascontiguousarray(Z.hi - Z.lo), tol, lp.default_max_iter(*M.shape)
    )
    if np.any(status == lp.ITERATION_LIMIT):
        log.warning("LP iteration limit in contains_points; affected points reported as members")
    return status != lp.INFEASIBLE


def contains_point(Z: ExtConstrainedZonotope, x, tol=TAU_LP) -> bool:
    return bool(contains_points(Z, np.asarray(x, dtype=float)[None, :], tol)[0])


_RECORD_FIELDS = ("n", "n_g", "n_c", "G", "c", "A", "b", "lo", "hi")


def to_record(Z: ExtConstrainedZonotope) -> dict:
    """Plain-data form with fixed key order; matrices are flattened row-major."""
    return {
        "n": Z.dim,
        "n_g": Z.n_gen,
        "n_c": Z.n_con,
        "G": Z.G.ravel().tolist(),
        "c": Z.c.tolist(),
        "A": Z.A.ravel().tolist(),
        "b": Z.b.tolist(),
        "lo": Z.lo.tolist(),
        "hi": Z.hi.tolist(),
    }


def from_record(rec: dict) -> ExtConstrainedZonotope:
    missing = [k for k in _RECORD_FIELDS if k not in rec]
    if missing:
        raise ValueError(f"zonotope record missing fields: {missing}")
    n, n_g, n_c = int(rec["n"]), int(rec["n_g"]), int(rec["n_c"])
    return make_zonotope(
        np.reshape(np.asarray(rec["G"], dtype=float), (n, n_g)),
        rec["c"],
        np.reshape(np.asarray(rec["A"], dtype=float), (n_c, n_g)),
        rec["b"],
        (rec["lo"], rec["hi"]),
    )
