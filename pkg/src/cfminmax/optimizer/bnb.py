"""Depth-first branch and bound over the either-or binaries.

Each node solves the continuous relaxation with some ``phi`` fixed and
the rest in ``[0, 1]``. A relaxation whose slacks are already
complementary (``min(v+, v-) ~ 0`` for every free user) is rounded and
re-solved as a leaf with all binaries fixed.
"""

from __future__ import annotations

import logging
import time

import numpy as np

from .model import MinMaxModel
from .solver import INFEASIBLE, OPTIMAL, BeamformingSolution, solve_model, solve_socp

__all__ = ["branch_and_bound", "MAX_BINARIES_WARN"]

log = logging.getLogger(__name__)

MAX_BINARIES_WARN = 16


def _most_violated(amps, free, tol):
    """Free user whose slacks are furthest from complementary, or None."""
    viol = np.minimum(amps["v_plus"], amps["v_minus"])
    viol = np.where(free, viol, -np.inf)
    u = int(np.argmax(viol))
    return None if viol[u] <= tol else u


def branch_and_bound(model: MinMaxModel, rel_gap: float = 1e-7,
                     max_nodes: int = 10_000) -> BeamformingSolution:
    """Globally optimal solution over all ``phi`` in {0, 1}^N_U."""
    if model.phase_fixed or model.n_binaries == 0:
        return solve_socp(model)
    nb = model.n_binaries
    if nb > MAX_BINARIES_WARN:
        log.warning("branch and bound over %d binaries may be slow", nb)

    t0 = time.perf_counter()
    # complementarity and pruning thresholds in physical amplitude units
    comp_tol = 1e-7 * model.amp_scale
    abs_gap = 1e-9 * model.amp_scale
    best: BeamformingSolution | None = None
    stack = [(np.zeros(nb), np.ones(nb))]
    nodes = iters = 0
    failures = []

    def better(obj):
        return best is None or obj < best.z - max(abs_gap, rel_gap * abs(best.z))

    while stack:
        lo, hi = stack.pop()
        nodes += 1
        if nodes > max_nodes:
            failures.append("node limit reached")
            break
        if np.all(lo == hi):
            leaf = solve_socp(model, phi=lo)
            iters += leaf.iterations
            if leaf.ok and better(leaf.z):
                best = leaf
            elif leaf.status not in (OPTIMAL, INFEASIBLE):
                failures.append(f"leaf {lo.astype(int).tolist()}: {leaf.status}")
            continue

        res = solve_model(model, lo, hi)
        iters += res.iterations
        if res.status == INFEASIBLE:
            continue
        if res.status != OPTIMAL:
            failures.append(f"relaxation: {res.status}")
            continue
        amps = model.decode_amplitudes(res.x)
        if not better(amps["z"]):
            continue
        free = lo != hi
        u = _most_violated(amps, free, comp_tol)
        if u is None:
            # complementary already: round and solve the fixed leaf
            phi = lo.copy()
            phi[free] = (amps["v_plus"][free] >= amps["v_minus"][free]).astype(float)
            stack.append((phi, phi.copy()))
            continue
        down_lo, down_hi = lo.copy(), hi.copy()
        down_hi[u] = 0.0
        up_lo, up_hi = lo.copy(), hi.copy()
        up_lo[u] = 1.0
        # explore the side the relaxation leans toward first
        if amps["v_plus"][u] >= amps["v_minus"][u]:
            stack += [(down_lo, down_hi), (up_lo, up_hi)]
        else:
            stack += [(up_lo, up_hi), (down_lo, down_hi)]

    elapsed = time.perf_counter() - t0
    if best is None:
        status = "numerical-failure" if failures else INFEASIBLE
        out = BeamformingSolution(None, np.nan, None, None, None, None, status,
                                  message="; ".join(failures) or "all leaves infeasible")
    else:
        out = best
        if failures:
            # an unexplored subtree could hide a better leaf
            out.status = "numerical-failure"
            out.message = "; ".join(failures)
    out.nodes = nodes
    out.iterations = iters
    out.solve_time = elapsed
    return out
