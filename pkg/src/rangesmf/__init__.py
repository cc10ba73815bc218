"""Guaranteed state estimation for anchor-rooted agent chains with range measurements."""
from ._jit import NUMBA_ACTIVE
from .zonotope import (
    ExtConstrainedZonotope,
    IntervalHull,
    box_zonotope,
    contains_point,
    contains_points,
    from_record,
    generalized_intersect,
    interval_hull,
    is_empty,
    linear_map,
    make_zonotope,
    minkowski_sum,
    point_zonotope,
    radius_bound,
    support_value,
    to_record,
)
from .range_geom import (
    BearingInterval,
    RangeRing,
    SectorWindow,
    inflate_ring,
    merged_wedge,
    relative_measurement_set,
    ring_from_range,
    sector_zonotope,
    segment_ring,
    select_active_window,
)
from .filter import AgentModel, ChainState, MeasurementRecord, predict, step_chain
from .sim import SimConfig, run_episode, run_monte_carlo

__version__ = "0.1.0"
