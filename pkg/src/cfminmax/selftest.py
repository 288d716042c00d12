"""Quick oracle cross-checks runnable from the command line."""

from __future__ import annotations

import numpy as np

from .beamformers import cbf_upa
from .config import ExperimentConfig
from .experiment import draw_instance
from .metrics import inner_products
from .optimizer import (branch_and_bound, build_model, check_feasibility, epigraph_gap,
                        reduce_phase_wlog, solve_socp)
from .oracles import enumerate_phi_solve, random_feasible_search, received_signal_bruteforce

__all__ = ["run_selftest"]


def _rel(a, b, scale):
    return abs(a - b) / max(abs(a), abs(b), scale)


def run_selftest(n_instances: int = 6, seed: int = 7) -> list:
    """Returns ``(name, passed, detail)`` tuples."""
    checks = []
    worst_agree = worst_feas = worst_gap = 0.0
    search_ok = True
    for k in range(n_instances):
        cfg = ExperimentConfig(n_aps=3, n_users=2 + k % 3, m_ap=1 + k % 2, cluster_size=2,
                               n_iterations=1, seed=seed + k)
        _, ch, assoc, bounds = draw_instance(cfg, 0)
        model = build_model(ch, assoc, bounds)
        w = solve_socp(reduce_phase_wlog(model))
        b = branch_and_bound(model)
        e = enumerate_phi_solve(model)
        if not (w.ok and b.ok and e.ok):
            checks.append((f"instance {k} solves", False, f"{w.status}/{b.status}/{e.status}"))
            continue
        scale = float(np.max(bounds.sqrt_rho))
        worst_agree = max(worst_agree, _rel(w.z, b.z, scale), _rel(w.z, e.z, scale))
        for sol in (w, b, e):
            worst_feas = max(worst_feas, check_feasibility(sol, ch, assoc, bounds).worst[1])
            worst_gap = max(worst_gap, epigraph_gap(sol, ch, bounds))
        rep = random_feasible_search(ch, assoc, bounds, 50, np.random.default_rng(k))
        if rep.found and rep.best_z < w.z - 1e-4 * max(w.z, scale):
            search_ok = False
    checks.append(("wlog / branch-and-bound / enumeration agree (1e-5)",
                   worst_agree <= 1e-5, f"worst rel diff {worst_agree:.2e}"))
    checks.append(("feasibility audit (1e-6)", worst_feas <= 1e-6, f"worst {worst_feas:.2e}"))
    checks.append(("epigraph tightness (1e-6)", worst_gap <= 1e-6, f"worst {worst_gap:.2e}"))
    checks.append(("random search never beats the optimum", search_ok, ""))

    cfg = ExperimentConfig(n_aps=4, n_users=3, m_ap=2, cluster_size=2, n_iterations=1, seed=seed)
    _, ch, assoc, bounds = draw_instance(cfg, 0)
    f = cbf_upa(ch, assoc, cfg.eta_w)
    s = np.exp(2j * np.pi * np.random.default_rng(seed).uniform(size=assoc.n_users))
    G = inner_products(ch, f)
    err = 0.0
    for u in range(assoc.n_users):
        r = received_signal_bruteforce(ch, f, s, u, assoc)
        err = max(err, abs(r.by_ap - r.by_user) / max(abs(r.by_ap), 1e-30),
                  abs(abs(r.desired) ** 2 - abs(G[u, u]) ** 2) / abs(G[u, u]) ** 2)
    checks.append(("received-signal regrouping matches metrics", err < 1e-10, f"{err:.1e}"))
    return checks
