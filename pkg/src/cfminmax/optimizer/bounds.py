"""Per-user desired-signal bounds and per-AP power budgets."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..beamformers import per_ap_budget
from ..errors import ConfigurationError

__all__ = ["QosBounds", "compute_bounds", "best_serving_ap"]


@dataclass(frozen=True)
class QosBounds:
    """Signal-power window ``[rho, mu]`` per user (W), budget ``eta`` per AP (W)
    and the big-M constant ``delta`` (amplitude units, sqrt(W))."""

    rho: np.ndarray
    mu: np.ndarray
    eta: np.ndarray
    delta: float = 1000.0

    def __post_init__(self):
        rho = np.atleast_1d(np.asarray(self.rho, dtype=float))
        mu = np.atleast_1d(np.asarray(self.mu, dtype=float))
        eta = np.atleast_1d(np.asarray(self.eta, dtype=float))
        if rho.shape != mu.shape:
            raise ConfigurationError("rho and mu must have one entry per user")
        if np.any(rho <= 0) or np.any(mu <= rho):
            raise ConfigurationError("need 0 < rho < mu for every user")
        if np.any(eta <= 0):
            raise ConfigurationError("power budgets must be positive")
        if not self.delta > np.sqrt(mu.max()):
            raise ConfigurationError("delta must exceed the largest sqrt(mu)")
        object.__setattr__(self, "rho", rho)
        object.__setattr__(self, "mu", mu)
        object.__setattr__(self, "eta", eta)

    @property
    def sqrt_rho(self) -> np.ndarray:
        return np.sqrt(self.rho)

    @property
    def sqrt_mu(self) -> np.ndarray:
        return np.sqrt(self.mu)


def best_serving_ap(channels, assoc) -> np.ndarray:
    """Index of the serving AP with the largest instantaneous ``||h||^2``."""
    gains = channels.gains()
    best = np.empty(assoc.n_users, dtype=int)
    for u, aps in enumerate(assoc.serving_aps):
        aps = np.asarray(aps)
        best[u] = aps[np.argmax(gains[u, aps])]
    return best


def compute_bounds(channels, assoc, eta, sigma_w2: float, n_aps: int | None = None,
                   n_users: int | None = None, delta: float = 1000.0) -> QosBounds:
    """Signal bounds anchored on each user's best serving AP ``t``.

    ``rho = s2 + eta_t/(N_A N_U) ||h_ut||^2`` and
    ``mu = 1e5 s2 + eta_t sqrt(N_A)/N_U ||h_ut||^2``.
    """
    if sigma_w2 <= 0:
        raise ValueError("noise variance must be positive")
    n_aps = channels.n_aps if n_aps is None else n_aps
    n_users = channels.n_users if n_users is None else n_users
    eta = per_ap_budget(eta, channels.n_aps)
    t = best_serving_ap(channels, assoc)
    g = channels.gains()[np.arange(assoc.n_users), t]
    eta_t = eta[t]
    rho = sigma_w2 + eta_t / (n_aps * n_users) * g
    mu = 1e5 * sigma_w2 + eta_t * np.sqrt(n_aps) / n_users * g
    return QosBounds(rho, mu, eta, delta)
