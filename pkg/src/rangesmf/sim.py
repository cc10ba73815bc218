"""Ground truth, bounded-noise measurements and Monte Carlo campaigns.

Each episode runs the proposed chain filter and the absolute-only baseline side
by side on the same noise draws, so per-step hull ratios compare like with like.
"""
from __future__ import annotations

import dataclasses
import json
import logging
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError, FilterInconsistencyError
from .filter import (
    ANCHOR,
    ORDINARY,
    AgentModel,
    ChainState,
    MeasurementRecord,
    step_chain,
)
from .zonotope import box_zonotope, contains_point, make_zonotope, to_record

log = logging.getLogger(__name__)


@dataclass
class SimConfig:
    steps: int = 40
    period: float = 0.5
    sectors: int = 64
    seed: int = 0
    runs: int = 50
    burn_in: int = 5
    process_noise: float = 0.1
    anchor_meas_noise: float = 0.1
    ordinary_meas_noise: float = 1.0
    range_noise: tuple = (-0.1, 0.1)
    init_halfwidth: float = 2.0
    initial_states: list = field(default_factory=list)
    inputs: list = field(default_factory=list)
    ratio_dims: tuple = (0, 1)
    neighbour_ratio: float = 0.1
    noise_scale: float = 1.0

    def __post_init__(self):
        self.range_noise = tuple(float(v) for v in self.range_noise)
        self.ratio_dims = tuple(int(v) for v in self.ratio_dims)
        self.initial_states = [[float(v) for v in s] for s in self.initial_states]
        self.inputs = [[[int(k), float(u)] for k, u in sched] for sched in self.inputs]
        self.validate()

    @property
    def n_agents(self) -> int:
        return len(self.initial_states)

    @property
    def chain_length(self) -> int:
        return self.n_agents - 1

    def validate(self):
        if self.steps < 1:
            raise ConfigError("steps must be >= 1")
        if self.runs < 1:
            raise ConfigError("runs must be >= 1")
        if self.period <= 0:
            raise ConfigError("period must be positive")
        if self.sectors < 8:
            raise ConfigError("sectors must be >= 8")
        if self.n_agents < 1:
            raise ConfigError("initial_states must list at least the anchor")
        if any(len(s) != 4 for s in self.initial_states):
            raise ConfigError("each initial state is [px, py, vx, vy]")
        if self.inputs and len(self.inputs) != self.n_agents:
            raise ConfigError("inputs must give one schedule per agent (or be empty)")
        if self.range_noise[0] > self.range_noise[1]:
            raise ConfigError("range_noise must be [lo, hi] with lo <= hi")
        for name in ("process_noise", "anchor_meas_noise", "ordinary_meas_noise", "init_halfwidth", "noise_scale"):
            if getattr(self, name) < 0:
                raise ConfigError(f"{name} must be nonnegative")
        if not 0 <= self.burn_in:
            raise ConfigError("burn_in must be nonnegative")
        if any(not 0 <= d < 4 for d in self.ratio_dims) or not self.ratio_dims:
            raise ConfigError("ratio_dims must index state components 0..3")

    def to_dict(self) -> dict:
        d = dataclasses.asdict(self)
        d["range_noise"] = list(self.range_noise)
        d["ratio_dims"] = list(self.ratio_dims)
        return d

    def input_at(self, agent: int, k: int) -> float:
        u = 0.0
        if self.inputs:
            for k0, val in self.inputs[agent]:
                if k >= k0:
                    u = val
        return u


def double_integrator(period: float):
    """State ``[px, py, vx, vy]``; one scalar input pushes both axes equally."""
    T = period
    A = np.kron(np.array([[1.0, T], [0.0, 1.0]]), np.eye(2))
    B = np.kron(np.array([[T * T / 2.0], [T]]), np.ones((2, 1)))
    return A, B, np.eye(4)


def build_models(cfg: SimConfig) -> list[AgentModel]:
    A, B, C = double_integrator(cfg.period)
    W = make_zonotope(cfg.process_noise * np.eye(4), np.zeros(4))
    models = []
    for i in range(cfg.n_agents):
        half = cfg.anchor_meas_noise if i == 0 else cfg.ordinary_meas_noise
        V = make_zonotope(half * np.eye(4), np.zeros(4))
        models.append(AgentModel(A, B, C, W, V, cfg.range_noise, ANCHOR if i == 0 else ORDINARY))
    return models


def _sample_box_zonotope(Z, rng, scale=1.0):
    xi = rng.uniform(Z.lo, Z.hi)
    return Z.G @ (scale * xi) + Z.c


def propagate_truth(x, model: AgentModel, u, rng, noise_scale=1.0):
    w = _sample_box_zonotope(model.W, rng, noise_scale)
    return model.A @ x + model.B @ np.atleast_1d(u) + w, w


def gen_abs_measurement(x, model: AgentModel, rng, noise_scale=1.0):
    v = _sample_box_zonotope(model.V, rng, noise_scale)
    return model.C @ x + v, v


def gen_rel_measurement(x_i, x_j, model: AgentModel, rng, noise_scale=1.0):
    r_lo, r_hi = model.r_bounds
    r = noise_scale * rng.uniform(r_lo, r_hi)
    sel = model.range_selector
    return float(np.linalg.norm(sel @ (x_i - x_j)) + r), r


@dataclass
class StepRecord:
    k: int
    agent: int
    truth: list
    y_abs: list
    y_rel: float | None
    prior_lo: list
    prior_hi: list
    post_lo: list
    post_hi: list
    base_lo: list
    base_hi: list
    contained: bool
    base_contained: bool
    noise_ok: bool
    window: list | None
    separation: bool | None
    flags: list
    ratio: float
    posterior: dict

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)


@dataclass
class RunLog:
    seed: int
    records: list = field(default_factory=list)
    aborted: bool = False
    abort_reason: str = ""

    def agent_records(self, agent: int) -> list[StepRecord]:
        return [r for r in self.records if r.agent == agent]

    @property
    def containment_rate(self) -> float:
        if not self.records:
            return 0.0
        return sum(r.contained for r in self.records) / len(self.records)


def _box_halfwidth(lo, hi, dims):
    return max(0.5 * (hi[d] - lo[d]) for d in dims)


def initial_sets(cfg: SimConfig, truths, rng):
    sets = []
    for x in truths:
        offset = rng.uniform(-0.5 * cfg.init_halfwidth, 0.5 * cfg.init_halfwidth, size=4)
        c = x + offset
        sets.append(box_zonotope(c - cfg.init_halfwidth, c + cfg.init_halfwidth))
    return sets


def run_episode(cfg: SimConfig, seed: int) -> RunLog:
    """Truth, measurements, proposed filter and baseline for one seeded episode."""
    rng = np.random.default_rng(seed)
    models = build_models(cfg)
    n = cfg.n_agents
    truths = [np.array(s, dtype=float) for s in cfg.initial_states]
    init = initial_sets(cfg, truths, rng)
    state = ChainState.initial(init)
    base = ChainState.initial(init)
    log_ = RunLog(seed)
    s = cfg.noise_scale
    for k in range(cfg.steps):
        if k > 0:
            truths_new, noise_ok = [], []
            for i in range(n):
                x, w = propagate_truth(truths[i], models[i], cfg.input_at(i, k - 1), rng, s)
                truths_new.append(x)
                noise_ok.append(contains_point(models[i].W, w))
            truths = truths_new
        else:
            noise_ok = [True] * n
        y_abs, y_rel = [], [None]
        for i in range(n):
            y, v = gen_abs_measurement(truths[i], models[i], rng, s)
            y_abs.append(y)
            noise_ok[i] = noise_ok[i] and contains_point(models[i].V, v)
        for i in range(1, n):
            y, r = gen_rel_measurement(truths[i], truths[i - 1], models[i], rng, s)
            y_rel.append(y)
            lo, hi = models[i].r_bounds
            noise_ok[i] = noise_ok[i] and lo - 1e-12 <= r <= hi + 1e-12
        meas = MeasurementRecord(tuple(y_abs), tuple(y_rel))
        us = [cfg.input_at(i, k - 1) for i in range(n)]
        try:
            state, upd = step_chain(state, meas, models, us, cfg.sectors, True, cfg.neighbour_ratio)
            base, bupd = step_chain(base, meas, models, us, cfg.sectors, False)
        except FilterInconsistencyError as exc:
            log_.aborted = True
            log_.abort_reason = f"step {k}: {exc}"
            log.warning("episode seed=%d aborted at step %d: %s", seed, k, exc)
            break
        for i in range(n):
            u, b = upd[i], bupd[i]
            base_hw = b.hull.inf_norm(cfg.ratio_dims)
            ratio = u.hull.inf_norm(cfg.ratio_dims) / base_hw if base_hw > 0 else 1.0
            win = None
            if u.window is not None:
                win = [u.window.q_lo, u.window.q_hi, u.window.count, u.window.contiguous]
            log_.records.append(StepRecord(
                k=k,
                agent=i,
                truth=truths[i].tolist(),
                y_abs=np.asarray(y_abs[i]).tolist(),
                y_rel=y_rel[i],
                prior_lo=u.prior_hull.lo.tolist(),
                prior_hi=u.prior_hull.hi.tolist(),
                post_lo=u.hull.lo.tolist(),
                post_hi=u.hull.hi.tolist(),
                base_lo=b.hull.lo.tolist(),
                base_hi=b.hull.hi.tolist(),
                contained=contains_point(u.posterior, truths[i]),
                base_contained=contains_point(b.posterior, truths[i]),
                noise_ok=bool(noise_ok[i]),
                window=win,
                separation=u.separation,
                flags=list(u.flags),
                ratio=float(ratio),
                posterior=to_record(u.posterior),
            ))
    return log_


def baseline_absolute_only(log_: RunLog) -> list[dict]:
    """Baseline hulls as recorded by :func:`run_episode` (same noise draws)."""
    return [
        {"k": r.k, "agent": r.agent, "lo": r.base_lo, "hi": r.base_hi, "contained": r.base_contained}
        for r in log_.records
    ]


def episode_seed(master: int, index: int) -> int:
    return int(np.random.SeedSequence([master, index]).generate_state(1, np.uint64)[0])


@dataclass
class AgentSummary:
    agent: int
    containment_rate: float
    mean_ratio: float
    runs: int
    steps_checked: int
    fallback_steps: int
    run_mean_halfwidth: list
    run_mean_base_halfwidth: list


@dataclass
class McSummary:
    agents: list
    runs: int
    aborted_runs: int

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)

    def ratio(self, agent: int) -> float:
        return self.agents[agent].mean_ratio

    @property
    def all_contained(self) -> bool:
        return self.aborted_runs == 0 and all(a.containment_rate == 1.0 for a in self.agents)


def summarize(cfg: SimConfig, logs: list[RunLog]) -> McSummary:
    out = []
    for i in range(cfg.n_agents):
        ratios, contained, total, fb = [], 0, 0, 0
        hw_runs, base_runs = [], []
        for lg in logs:
            recs = lg.agent_records(i)
            total += len(recs)
            contained += sum(r.contained for r in recs)
            fb += sum(any(f.startswith("fallback") for f in r.flags) for r in recs)
            late = [r for r in recs if r.k >= cfg.burn_in]
            ratios.extend(r.ratio for r in late)
            hw_runs.append(float(np.mean([_box_halfwidth(r.post_lo, r.post_hi, cfg.ratio_dims) for r in late]))
                           if late else math.nan)
            base_runs.append(float(np.mean([_box_halfwidth(r.base_lo, r.base_hi, cfg.ratio_dims) for r in late]))
                             if late else math.nan)
        out.append(AgentSummary(
            agent=i,
            containment_rate=contained / total if total else 0.0,
            mean_ratio=float(np.mean(ratios)) if ratios else math.nan,
            runs=len(logs),
            steps_checked=total,
            fallback_steps=fb,
            run_mean_halfwidth=hw_runs,
            run_mean_base_halfwidth=base_runs,
        ))
    return McSummary(out, len(logs), sum(lg.aborted for lg in logs))


def run_monte_carlo(cfg: SimConfig, keep_logs: bool = False):
    """Run ``cfg.runs`` episodes with seeds derived from ``cfg.seed`` by index."""
    logs = [run_episode(cfg, episode_seed(cfg.seed, j)) for j in range(cfg.runs)]
    summary = summarize(cfg, logs)
    return (summary, logs) if keep_logs else summary


def summary_json(summary: McSummary) -> str:
    return json.dumps(summary.to_dict(), sort_keys=False)
