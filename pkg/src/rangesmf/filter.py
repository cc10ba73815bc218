"""Sequential set-membership filter along an anchor-rooted chain.

Each time step predicts every agent, updates the anchor with its absolute
measurement, then walks the chain: agent ``i`` fuses its prior, its absolute
measurement and the range to agent ``i-1`` (using ``i-1``'s fresh posterior).
Posteriors are re-represented by their interval hulls.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, replace

import numpy as np

from .errors import (
    EmptySetError,
    FilterInconsistencyError,
    NoActiveSectorError,
    WindowTooWideError,
)
from .range_geom import (
    DEFAULT_SECTORS,
    SectorWindow,
    separation_holds,
    neighbour_compact,
    relative_wedge,
)
from .zonotope import (
    ExtConstrainedZonotope,
    IntervalHull,
    generalized_intersect,
    interval_hull,
    linear_map,
    minkowski_sum,
    translate,
)

log = logging.getLogger(__name__)

ANCHOR = "anchor"
ORDINARY = "ordinary"

# step flags
FALLBACK_EMPTY = "fallback_empty"
FALLBACK_NO_SECTOR = "fallback_no_sector"
FALLBACK_WIDE_WINDOW = "fallback_wide_window"
NON_CONTIGUOUS = "non_contiguous_window"
SEPARATION_VIOLATED = "separation_violated"
NEIGHBOUR_TOO_WIDE = "neighbour_too_wide"
FALLBACK_FLAGS = (FALLBACK_EMPTY, FALLBACK_NO_SECTOR, FALLBACK_WIDE_WINDOW)


def observability_matrix(A, C):
    A = np.asarray(A, dtype=float)
    C = np.asarray(C, dtype=float)
    blocks, M = [], C
    for _ in range(A.shape[0]):
        blocks.append(M)
        M = M @ A
    return np.vstack(blocks)


@dataclass(frozen=True, eq=False)
class AgentModel:
    A: np.ndarray
    B: np.ndarray
    C: np.ndarray
    W: ExtConstrainedZonotope
    V: ExtConstrainedZonotope
    r_bounds: tuple[float, float] = (0.0, 0.0)
    role: str = ORDINARY
    range_selector: np.ndarray | None = None

    def __post_init__(self):
        A = np.array(self.A, dtype=float, ndmin=2)
        B = np.array(self.B, dtype=float, ndmin=2)
        C = np.array(self.C, dtype=float, ndmin=2)
        n = A.shape[0]
        if A.shape != (n, n) or B.shape[0] != n or C.shape[1] != n:
            raise ValueError(f"inconsistent model shapes A{A.shape} B{B.shape} C{C.shape}")
        if self.W.dim != n or self.V.dim != C.shape[0]:
            raise ValueError("noise sets do not match state / measurement dimensions")
        if np.linalg.matrix_rank(observability_matrix(A, C)) < n:
            raise ValueError("(C, A) is not observable")
        r_lo, r_hi = (float(v) for v in self.r_bounds)
        if r_lo > r_hi:
            raise ValueError("range noise bounds reversed")
        if self.role not in (ANCHOR, ORDINARY):
            raise ValueError(f"unknown role {self.role!r}")
        sel = np.hstack([np.eye(2), np.zeros((2, n - 2))]) if self.range_selector is None else self.range_selector
        sel = np.array(sel, dtype=float, ndmin=2)
        if sel.shape != (2, n):
            raise ValueError(f"range selector must be 2x{n}")
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "B", B)
        object.__setattr__(self, "C", C)
        object.__setattr__(self, "r_bounds", (r_lo, r_hi))
        object.__setattr__(self, "range_selector", sel)

    @property
    def n(self) -> int:
        return self.A.shape[0]


@dataclass(frozen=True)
class MeasurementRecord:
    """Absolute measurements per agent and ranges per chain link (``y_rel[0]`` unused)."""

    y_abs: tuple
    y_rel: tuple

    def __post_init__(self):
        if len(self.y_rel) != len(self.y_abs):
            raise ValueError("need one relative slot per agent (slot 0 is the anchor's and ignored)")


@dataclass(frozen=True)
class AgentUpdate:
    posterior: ExtConstrainedZonotope
    hull: IntervalHull
    prior_hull: IntervalHull
    flags: tuple = ()
    window: SectorWindow | None = None
    separation: bool | None = None
    radius: float | None = None

    @property
    def fallback(self) -> bool:
        return any(f in FALLBACK_FLAGS for f in self.flags)


@dataclass(frozen=True)
class ChainState:
    """Filter state before processing step ``k``.

    ``posteriors`` is None until the first update; step 0 then uses ``priors``
    (the initial sets) directly instead of predicting.
    """

    k: int
    priors: tuple
    posteriors: tuple | None = None
    hulls: tuple | None = None

    @classmethod
    def initial(cls, initial_sets) -> "ChainState":
        return cls(0, tuple(initial_sets))

    @property
    def n_agents(self) -> int:
        return len(self.priors)


def predict(posterior: ExtConstrainedZonotope, model: AgentModel, u=None) -> ExtConstrainedZonotope:
    Z = linear_map(model.A, posterior)
    if u is not None:
        Z = translate(Z, model.B @ np.atleast_1d(np.asarray(u, dtype=float)))
    return minkowski_sum(Z, model.W)


def absolute_measurement_set(y, C, V: ExtConstrainedZonotope) -> ExtConstrainedZonotope:
    """``{y} (+) (-V)`` in measurement space; intersect with the prior through ``C``."""
    y = np.asarray(y, dtype=float)
    return translate(linear_map(-np.eye(V.dim), V), y)


def _hull_box(Z: ExtConstrainedZonotope) -> tuple[ExtConstrainedZonotope, IntervalHull]:
    hull = interval_hull(Z)
    return hull.to_zonotope(), hull


def absolute_posterior(prior, y, model: AgentModel) -> tuple[ExtConstrainedZonotope, IntervalHull]:
    meas = absolute_measurement_set(y, model.C, model.V)
    try:
        return _hull_box(generalized_intersect(prior, meas, model.C))
    except EmptySetError as exc:
        raise FilterInconsistencyError("prior and absolute measurement are disjoint") from exc


def update_anchor(prior, y, model: AgentModel) -> AgentUpdate:
    post, hull = absolute_posterior(prior, y, model)
    return AgentUpdate(post, hull, interval_hull(prior))


def update_chain_agent(
    prior,
    neighbor_posterior,
    y_abs,
    y_rel,
    model: AgentModel,
    M: int = DEFAULT_SECTORS,
    neighbour_ratio: float = 0.1,
) -> AgentUpdate:
    prior_hull = interval_hull(prior)
    sel = model.range_selector
    r_lo, r_hi = model.r_bounds
    flags = []
    try:
        wedge = relative_wedge(neighbor_posterior, y_rel, r_lo, r_hi, prior, sel, M)
    except NoActiveSectorError:
        post, hull = absolute_posterior(prior, y_abs, model)
        return AgentUpdate(post, hull, prior_hull, (FALLBACK_NO_SECTOR,))
    except WindowTooWideError:
        post, hull = absolute_posterior(prior, y_abs, model)
        return AgentUpdate(post, hull, prior_hull, (FALLBACK_WIDE_WINDOW,))

    sep = separation_holds(prior, wedge.ring, sel)
    if not sep:
        flags.append(SEPARATION_VIOLATED)
    if not neighbour_compact(wedge.radius, y_rel, neighbour_ratio):
        flags.append(NEIGHBOUR_TOO_WIDE)
    if not wedge.window.contiguous:
        flags.append(NON_CONTIGUOUS)

    meas = absolute_measurement_set(y_abs, model.C, model.V)
    Z = generalized_intersect(generalized_intersect(prior, wedge.zonotope, sel), meas, model.C)
    try:
        post, hull = _hull_box(Z)
    except EmptySetError:
        post, hull = absolute_posterior(prior, y_abs, model)
        flags.append(FALLBACK_EMPTY)
    return AgentUpdate(post, hull, prior_hull, tuple(flags), wedge.window, sep, wedge.radius)


def step_chain(
    state: ChainState,
    measurements: MeasurementRecord,
    models,
    inputs=None,
    M: int = DEFAULT_SECTORS,
    use_relative: bool = True,
    neighbour_ratio: float = 0.1,
) -> tuple[ChainState, list[AgentUpdate]]:
    """One filter cycle over the whole chain.  Agent 0 must be the anchor.

    With ``use_relative=False`` every agent uses its absolute measurement only
    (the comparison baseline).
    """
    n_agents = state.n_agents
    if len(models) != n_agents or len(measurements.y_abs) != n_agents:
        raise ValueError("models / measurements do not match the number of agents")
    if models[0].role != ANCHOR:
        raise ValueError("agent 0 must be the anchor")
    if state.posteriors is None:
        priors = list(state.priors)
    else:
        us = [None] * n_agents if inputs is None else inputs
        priors = [predict(state.posteriors[i], models[i], us[i]) for i in range(n_agents)]

    updates = [update_anchor(priors[0], measurements.y_abs[0], models[0])]
    for i in range(1, n_agents):
        if use_relative:
            upd = update_chain_agent(
                priors[i], updates[i - 1].posterior, measurements.y_abs[i], measurements.y_rel[i],
                models[i], M, neighbour_ratio,
            )
        else:
            post, hull = absolute_posterior(priors[i], measurements.y_abs[i], models[i])
            upd = AgentUpdate(post, hull, interval_hull(priors[i]))
        updates.append(upd)
    new_state = replace(
        state,
        k=state.k + 1,
        priors=tuple(priors),
        posteriors=tuple(u.posterior for u in updates),
        hulls=tuple(u.hull for u in updates),
    )
    return new_state, updates
