"""Seeded Monte-Carlo driver comparing the min-max optimizer with CBF baselines."""

from __future__ import annotations

import logging
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .beamformers import cbf_ppa, cbf_upa
from .channel import draw_channels
from .config import ExperimentConfig
from .metrics import MetricsRecord, RadioParams, evaluate
from .network import NetworkLayout, associate_users, make_layout
from .optimizer import (OPTIMAL, build_model, branch_and_bound, check_feasibility,
                        compute_bounds, epigraph_gap, reduce_phase_wlog, solve_socp)

__all__ = [
    "IterationResult",
    "ResultsDataset",
    "SchemeSamples",
    "iteration_rng",
    "draw_instance",
    "run_iteration",
    "run_experiment",
    "MAX_EXCLUSION_RATE",
]

log = logging.getLogger(__name__)

MAX_EXCLUSION_RATE = 0.05
FEASIBILITY_TOL = 1e-6


@dataclass
class IterationResult:
    iteration: int
    scheme: str
    status: str
    metrics: MetricsRecord | None
    solve_time: float = 0.0
    z: float = float("nan")
    feasibility_worst: float = 0.0
    epigraph_gap: float = 0.0
    message: str = ""

    @property
    def ok(self) -> bool:
        return self.status == OPTIMAL and self.metrics is not None


@dataclass
class SchemeSamples:
    """Pooled samples of one scheme: per-user rates, per-serving-AP powers,
    one network EE per iteration."""

    rates: np.ndarray
    ap_powers: np.ndarray
    ee: np.ndarray
    rate_bounds: np.ndarray | None = None


@dataclass
class ResultsDataset:
    config: ExperimentConfig
    results: list = field(default_factory=list)
    provenance: dict = field(default_factory=dict)

    def for_scheme(self, scheme: str) -> list:
        return [r for r in self.results if r.scheme == scheme]

    def excluded(self, scheme: str | None = None) -> list:
        return [r for r in self.results if not r.ok and (scheme is None or r.scheme == scheme)]

    def exclusion_rate(self) -> float:
        return len(self.excluded()) / max(len(self.results), 1)

    def samples(self, scheme: str) -> SchemeSamples:
        good = [r.metrics for r in self.for_scheme(scheme) if r.ok]
        if not good:
            return SchemeSamples(np.zeros(0), np.zeros(0), np.zeros(0), np.zeros(0))
        return SchemeSamples(
            rates=np.concatenate([m.rate for m in good]),
            ap_powers=np.concatenate([m.ap_power[m.serving_ap] for m in good]),
            ee=np.array([m.energy_efficiency for m in good]),
            rate_bounds=np.concatenate([m.rate_bound for m in good]),
        )


def iteration_rng(seed: int, iteration: int) -> np.random.Generator:
    """Generator for one iteration, independent of run order."""
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(0, iteration)))


def _fixed_layout(cfg: ExperimentConfig) -> NetworkLayout:
    rng = np.random.default_rng(np.random.SeedSequence(cfg.seed, spawn_key=(1,)))
    return make_layout(cfg.n_aps, cfg.n_users, cfg.side_length_m, rng,
                       cfg.ap_height_m, cfg.user_height_m)


def draw_instance(cfg: ExperimentConfig, iteration: int):
    """Layout, channels, association and QoS bounds of one iteration."""
    rng = iteration_rng(cfg.seed, iteration)
    if cfg.redraw_positions:
        layout = make_layout(cfg.n_aps, cfg.n_users, cfg.side_length_m, rng,
                             cfg.ap_height_m, cfg.user_height_m)
    else:
        layout = _fixed_layout(cfg)
    channels = draw_channels(layout, cfg.m_ap, rng, cfg.freq_ghz, cfg.shadow_sigma_db,
                             cfg.shadow_r0_m, slot_index=iteration)
    assoc = associate_users(channels.large_scale.beta_linear, cfg.cluster_size)
    bounds = compute_bounds(channels, assoc, cfg.eta_w, cfg.noise_var, delta=cfg.delta)
    return layout, channels, assoc, bounds


def run_iteration(cfg: ExperimentConfig, iteration: int) -> list:
    _, channels, assoc, bounds = draw_instance(cfg, iteration)
    radio = RadioParams(cfg.bandwidth_hz, cfg.tau_ratio, cfg.noise_var)
    out = []
    for scheme in cfg.schemes:
        t0 = time.perf_counter()
        if scheme == "cbf-upa":
            f_set = cbf_upa(channels, assoc, cfg.eta_w)
        elif scheme == "cbf-ppa":
            f_set = cbf_ppa(channels, assoc, cfg.eta_w)
        else:
            model = build_model(channels, assoc, bounds)
            if cfg.strategy == "wlog":
                sol = solve_socp(reduce_phase_wlog(model))
            else:
                sol = branch_and_bound(model)
            if not sol.ok:
                log.warning("iteration %d: solver returned %s", iteration, sol.status)
                out.append(IterationResult(iteration, scheme, sol.status, None,
                                           time.perf_counter() - t0, message=sol.message))
                continue
            report = check_feasibility(sol, channels, assoc, bounds, FEASIBILITY_TOL)
            gap = epigraph_gap(sol, channels, bounds)
            name, worst = report.worst
            if not report.passed:
                log.warning("iteration %d: feasibility check failed (%s)", iteration, name)
                out.append(IterationResult(iteration, scheme, "failed-check", None,
                                           time.perf_counter() - t0, sol.z, worst, gap,
                                           f"violated {','.join(report.failed_families())}"))
                continue
            out.append(IterationResult(iteration, scheme, OPTIMAL,
                                       evaluate(channels, sol.beamformers, assoc, radio),
                                       time.perf_counter() - t0, sol.z, worst, gap))
            continue
        report = check_feasibility(f_set, channels, assoc, bounds, FEASIBILITY_TOL)
        out.append(IterationResult(iteration, scheme, OPTIMAL,
                                   evaluate(channels, f_set, assoc, radio),
                                   time.perf_counter() - t0,
                                   feasibility_worst=report.worst[1]))
    return out


def _run_one(args):
    cfg, i = args
    return run_iteration(cfg, i)


def run_experiment(cfg: ExperimentConfig, workers: int = 1, progress=None) -> ResultsDataset:
    """Run every iteration and collect results in iteration order.

    Failed solves are kept in the dataset with their status so they can be
    counted; they are left out of :meth:`ResultsDataset.samples`.
    """
    t0 = time.perf_counter()
    jobs = [(cfg, i) for i in range(cfg.n_iterations)]
    results = []
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            for i, chunk in enumerate(pool.map(_run_one, jobs)):
                results.extend(chunk)
                if progress:
                    progress(i + 1, cfg.n_iterations)
    else:
        for i, job in enumerate(jobs):
            results.extend(_run_one(job))
            if progress:
                progress(i + 1, cfg.n_iterations)
    ds = ResultsDataset(cfg, results, {
        "config_digest": cfg.digest(),
        "seed": cfg.seed,
        "wall_time_s": time.perf_counter() - t0,
    })
    return ds
