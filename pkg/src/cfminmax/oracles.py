"""Slow, independent reference computations used to validate the fast paths.

Nothing here calls into :mod:`cfminmax.metrics`; inner products are
expanded with explicit loops.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .beamformers import BeamformerSet
from .optimizer.model import MinMaxModel
from .optimizer.solver import INFEASIBLE, BeamformingSolution, solve_socp

__all__ = [
    "enumerate_phi_solve",
    "SearchReport",
    "random_feasible_search",
    "ReceivedSignal",
    "received_signal_bruteforce",
    "worst_interference_loops",
]

MAX_ENUM_USERS = 10


def enumerate_phi_solve(model: MinMaxModel) -> BeamformingSolution:
    """Solve every fixed-``phi`` subproblem and keep the best one."""
    nb = model.n_binaries
    if nb > MAX_ENUM_USERS:
        raise ValueError(f"refusing to enumerate 2^{nb} assignments")
    if nb == 0:
        return solve_socp(model)
    best, leaves, failures = None, [], []
    for bits in itertools.product((0.0, 1.0), repeat=nb):
        sol = solve_socp(model, phi=np.array(bits))
        leaves.append(sol.z if sol.ok else np.nan)
        if sol.ok:
            if best is None or sol.z < best.z:
                best = sol
        elif sol.status != INFEASIBLE:
            failures.append(sol.status)
    if best is None:
        best = BeamformingSolution(None, np.nan, None, None, None, None,
                                   failures[0] if failures else INFEASIBLE)
    elif failures:
        best.status = failures[0]
    best.nodes = len(leaves)
    best.extras["leaf_z"] = np.array(leaves)
    return best


def _cross(h, f, u, i, serving_i):
    acc = 0j
    for a in serving_i:
        for k in range(h.shape[2]):
            acc += np.conj(h[u, a, k]) * f[a, i, k]
    return acc


def worst_interference_loops(h: np.ndarray, f: np.ndarray, assoc) -> float:
    """``max_u sum_{i != u} |sum_{a in A_i} h[u,a]^H f[a,i]|`` by explicit loops."""
    n_u = h.shape[0]
    worst = 0.0
    for u in range(n_u):
        total = sum(abs(_cross(h, f, u, i, assoc.serving_aps[i]))
                    for i in range(n_u) if i != u)
        worst = max(worst, total)
    return worst


@dataclass
class SearchReport:
    n_samples: int
    n_feasible: int
    best_z: float
    beamformers: BeamformerSet | None = None

    @property
    def found(self) -> bool:
        return self.n_feasible > 0


def _feasible(h, f, assoc, bounds, slack=1e-12):
    for u, aps in enumerate(assoc.serving_aps):
        amp = abs(_cross(h, f, u, u, aps))
        if amp < bounds.sqrt_rho[u] * (1 - slack) or amp > bounds.sqrt_mu[u] * (1 + slack):
            return False
    power = np.sum(np.abs(f) ** 2, axis=(1, 2))
    return bool(np.all(power <= bounds.eta * (1 + slack)))


def _sample(h, assoc, bounds, rng, minimal):
    n_a, m = h.shape[1], h.shape[2]
    f = np.zeros((n_a, assoc.n_users, m), dtype=complex)
    for i, aps in enumerate(assoc.serving_aps):
        aps = list(aps)
        hv = h[i, aps]
        # mix of the matched direction and an isotropic one
        w = hv / np.linalg.norm(hv)
        noise = rng.standard_normal(hv.shape) + 1j * rng.standard_normal(hv.shape)
        w = w + rng.uniform(0.0, 3.0) * noise / np.linalg.norm(noise)
        gain = abs(np.vdot(hv.ravel(), w.ravel()))
        if gain == 0:
            continue
        lo, hi = bounds.sqrt_rho[i], bounds.sqrt_mu[i]
        target = lo if minimal else lo * (hi / lo) ** rng.uniform(0.0, 1.0)
        f[aps, i] = w * (target / gain) * np.exp(1j * rng.uniform(0, 2 * np.pi))
    return f


def _polish(h, f, assoc, bounds, rng, steps):
    """Stochastic local search: perturb one user's cluster, keep improvements."""
    best = worst_interference_loops(h, f, assoc)
    scale = 0.3
    for _ in range(steps):
        i = int(rng.integers(assoc.n_users))
        aps = list(assoc.serving_aps[i])
        trial = f.copy()
        blk = trial[aps, i]
        if rng.uniform() < 0.5:
            trial[aps, i] = blk * (1.0 - scale * rng.uniform())
        else:
            d = rng.standard_normal(blk.shape) + 1j * rng.standard_normal(blk.shape)
            trial[aps, i] = blk + scale * np.linalg.norm(blk) * d / np.linalg.norm(d)
        amp = abs(_cross(h, trial, i, i, aps))
        if 0 < amp < bounds.sqrt_rho[i]:
            trial[aps, i] *= bounds.sqrt_rho[i] / amp
        if not _feasible(h, trial, assoc, bounds):
            scale *= 0.99
            continue
        val = worst_interference_loops(h, trial, assoc)
        if val < best:
            f, best = trial, val
        else:
            scale *= 0.99
    return f, best


def random_feasible_search(channels, assoc, bounds, n_samples: int,
                           rng: np.random.Generator, polish_steps: int = 0) -> SearchReport:
    """Best objective over random feasible beamformers.

    Every returned value is attained by an explicit feasible point, so it
    upper-bounds the true optimum. ``polish_steps`` runs a local search
    from the best sample.
    """
    h = channels.h
    best_f, best_z, n_ok = None, np.inf, 0
    for s in range(n_samples):
        f = _sample(h, assoc, bounds, rng, minimal=False)
        if not _feasible(h, f, assoc, bounds):
            f = _sample(h, assoc, bounds, rng, minimal=True)
            if not _feasible(h, f, assoc, bounds):
                continue
        n_ok += 1
        z = worst_interference_loops(h, f, assoc)
        if z < best_z:
            best_f, best_z = f, z
    if best_f is not None and polish_steps:
        best_f, best_z = _polish(h, best_f, assoc, bounds, rng, polish_steps)
    return SearchReport(n_samples, n_ok, float(best_z),
                        None if best_f is None else BeamformerSet(best_f, "search"))


@dataclass
class ReceivedSignal:
    """Noiseless and noisy received sample, with its decomposition."""

    by_ap: complex
    by_user: complex
    desired: complex
    interference: np.ndarray
    noise: complex

    @property
    def total(self) -> complex:
        return self.by_ap + self.noise


def received_signal_bruteforce(channels, f_set: BeamformerSet, symbols, u: int, assoc,
                               noise: complex = 0j) -> ReceivedSignal:
    """Received sample at user ``u``, summed two ways.

    ``by_ap`` sums over APs of ``h^H x_a`` with ``x_a`` the AP's
    transmitted vector; ``by_user`` regroups the same double sum per
    intended user. Both exclude noise.
    """
    h, f = channels.h, f_set.f
    symbols = np.asarray(symbols, dtype=complex)
    m = h.shape[2]
    by_ap = 0j
    for a, users in enumerate(assoc.served_users):
        x_a = np.zeros(m, dtype=complex)
        for i in users:
            x_a = x_a + f[a, i] * symbols[i]
        for k in range(m):
            by_ap += np.conj(h[u, a, k]) * x_a[k]
    terms = np.zeros(assoc.n_users, dtype=complex)
    for i, aps in enumerate(assoc.serving_aps):
        terms[i] = _cross(h, f, u, i, aps) * symbols[i]
    desired = terms[u]
    interference = np.delete(terms, u)
    by_user = desired + np.sum(interference)
    return ReceivedSignal(by_ap, by_user, desired, interference, noise)
