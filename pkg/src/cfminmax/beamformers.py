"""Conjugate beamforming baselines with uniform or proportional power split."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .channel import ChannelRealization
from .errors import DegenerateChannelError, ModelBuildError
from .network import AssociationMap

__all__ = ["BeamformerSet", "cbf_upa", "cbf_ppa", "per_ap_budget"]


@dataclass(frozen=True)
class BeamformerSet:
    """Beamforming vectors ``f[a, u, :]`` for every AP/user pair.

    Entries for pairs where AP ``a`` does not serve user ``u`` are zero.
    """

    f: np.ndarray
    scheme: str = ""

    @property
    def n_aps(self) -> int:
        return self.f.shape[0]

    @property
    def n_users(self) -> int:
        return self.f.shape[1]

    def ap_powers(self) -> np.ndarray:
        return np.sum(np.abs(self.f) ** 2, axis=(1, 2))

    def power_coefficients(self) -> np.ndarray:
        """``||f[a, u]||^2`` per pair, shape ``(n_aps, n_users)``."""
        return np.sum(np.abs(self.f) ** 2, axis=-1)


def per_ap_budget(eta, n_aps: int) -> np.ndarray:
    eta = np.broadcast_to(np.asarray(eta, dtype=float), (n_aps,)).copy()
    if np.any(eta <= 0):
        raise ValueError("power budgets must be positive")
    return eta


def _check(channels: ChannelRealization, assoc: AssociationMap):
    if channels.n_users != assoc.n_users or channels.n_aps != assoc.n_aps:
        raise ModelBuildError("channel and association dimensions differ")


def cbf_upa(channels: ChannelRealization, assoc: AssociationMap, eta) -> BeamformerSet:
    """Conjugate beamforming with each AP's budget split evenly over its users."""
    _check(channels, assoc)
    eta = per_ap_budget(eta, assoc.n_aps)
    h = channels.h
    f = np.zeros((assoc.n_aps, assoc.n_users, channels.m_ap), dtype=complex)
    for a, users in enumerate(assoc.served_users):
        if not users:
            continue
        p = eta[a] / len(users)
        for u in users:
            norm = np.linalg.norm(h[u, a])
            if norm == 0:
                raise DegenerateChannelError(f"zero channel between user {u} and AP {a}")
            f[a, u] = np.sqrt(p) * h[u, a] / norm
    return BeamformerSet(f, "cbf-upa")


def cbf_ppa(channels: ChannelRealization, assoc: AssociationMap, eta) -> BeamformerSet:
    """Conjugate beamforming with power proportional to ``||h||^2``."""
    _check(channels, assoc)
    eta = per_ap_budget(eta, assoc.n_aps)
    h = channels.h
    f = np.zeros((assoc.n_aps, assoc.n_users, channels.m_ap), dtype=complex)
    for a, users in enumerate(assoc.served_users):
        if not users:
            continue
        idx = list(users)
        total = np.sum(np.abs(h[idx, a]) ** 2)
        if total == 0:
            raise DegenerateChannelError(f"all served channels of AP {a} are zero")
        f[a, idx] = np.sqrt(eta[a] / total) * h[idx, a]
    return BeamformerSet(f, "cbf-ppa")
