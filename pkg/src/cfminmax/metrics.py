"""Signal, interference, SINR, rate and energy-efficiency figures of merit."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .beamformers import BeamformerSet
from .channel import ChannelRealization

__all__ = [
    "RadioParams",
    "MetricsRecord",
    "inner_products",
    "signal_power",
    "interference_power",
    "interference_amplitude_sum",
    "sinr",
    "rate",
    "rate_upper_bound",
    "ap_power",
    "energy_efficiency",
    "evaluate",
]


@dataclass(frozen=True)
class RadioParams:
    bandwidth_hz: float = 20e6
    tau_ratio: float = 0.42
    noise_var: float = 20e6 * 10 ** (-19.5)


def inner_products(channels: ChannelRealization, f_set: BeamformerSet) -> np.ndarray:
    """Matrix ``G[u, i] = sum_a h[u, a]^H f[a, i]``.

    Unserved pairs hold zero beamformers, so the sum over all APs equals
    the sum over the serving cluster of user ``i``.
    """
    return np.einsum("uam,aim->ui", channels.h.conj(), f_set.f)


def signal_power(channels, f_set, u=None):
    """Desired-signal power ``|sum_a h[u,a]^H f[a,u]|^2`` (all users if ``u`` is None)."""
    p = np.abs(np.diag(inner_products(channels, f_set))) ** 2
    return p if u is None else float(p[u])


def _offdiag(G):
    mask = ~np.eye(G.shape[0], dtype=bool)
    return np.where(mask, G, 0.0)


def interference_power(channels, f_set, assoc=None, u=None):
    """Interference power ``sum_{i != u} |sum_{a in A_i} h[u,a]^H f[a,i]|^2``.

    ``assoc`` is accepted for symmetry with the other helpers; the
    beamformer array already encodes the association.
    """
    G = _offdiag(inner_products(channels, f_set))
    p = np.sum(np.abs(G) ** 2, axis=1)
    return p if u is None else float(p[u])


def interference_amplitude_sum(channels, f_set, u=None):
    """Sum of interference moduli, the quantity the min-max objective bounds."""
    G = _offdiag(inner_products(channels, f_set))
    s = np.sum(np.abs(G), axis=1)
    return s if u is None else float(s[u])


def sinr(p_signal, p_interference, noise_var):
    if np.any(np.asarray(noise_var) <= 0):
        raise ValueError("noise variance must be positive")
    return np.asarray(p_signal) / (np.asarray(p_interference) + noise_var)


def rate(gamma, bandwidth_hz: float = 20e6, tau_ratio: float = 0.42):
    """Downlink rate in bit/s, ``tau_ratio * B * log2(1 + gamma)``."""
    gamma = np.asarray(gamma, dtype=float)
    if np.any(gamma < 0):
        raise ValueError("SINR must be nonnegative")
    out = tau_ratio * bandwidth_hz * np.log2(1.0 + gamma)
    return float(out) if out.ndim == 0 else out


def rate_upper_bound(channels, f_set, u=None, *, noise_var, bandwidth_hz=20e6, tau_ratio=0.42):
    """Rate with interference removed; not achievable, used as a reference."""
    ps = signal_power(channels, f_set, u)
    return rate(np.asarray(ps) / noise_var, bandwidth_hz, tau_ratio)


def ap_power(f_set: BeamformerSet, a=None):
    p = f_set.ap_powers()
    return p if a is None else float(p[a])


def energy_efficiency(rates, powers) -> float:
    """Network radio EE in bit/J: total rate over total radiated power."""
    total_rate = float(np.sum(rates))
    total_power = float(np.sum(powers))
    if total_power <= 0:
        if total_rate > 0:
            raise ArithmeticError("positive rate with zero radiated power")
        return 0.0
    return total_rate / total_power


@dataclass(frozen=True)
class MetricsRecord:
    signal: np.ndarray
    interference: np.ndarray
    interference_amplitude: np.ndarray
    sinr: np.ndarray
    rate: np.ndarray
    rate_bound: np.ndarray
    ap_power: np.ndarray
    serving_ap: np.ndarray
    sum_rate: float
    energy_efficiency: float


def evaluate(channels: ChannelRealization, f_set: BeamformerSet, assoc,
             radio: RadioParams = RadioParams()) -> MetricsRecord:
    """All per-user and per-AP metrics for one realization.

    ``serving_ap`` flags APs with at least one served user; the energy
    efficiency sums power over every AP (idle ones radiate nothing).
    """
    G = inner_products(channels, f_set)
    ps = np.abs(np.diag(G)) ** 2
    off = _offdiag(G)
    pi = np.sum(np.abs(off) ** 2, axis=1)
    amp = np.sum(np.abs(off), axis=1)
    gamma = sinr(ps, pi, radio.noise_var)
    r = rate(gamma, radio.bandwidth_hz, radio.tau_ratio)
    r_ub = rate(ps / radio.noise_var, radio.bandwidth_hz, radio.tau_ratio)
    pa = f_set.ap_powers()
    serving = np.array([len(us) > 0 for us in assoc.served_users])
    return MetricsRecord(
        signal=ps, interference=pi, interference_amplitude=amp, sinr=gamma,
        rate=np.atleast_1d(r), rate_bound=np.atleast_1d(r_ub), ap_power=pa,
        serving_ap=serving, sum_rate=float(np.sum(r)),
        energy_efficiency=energy_efficiency(r, pa),
    )
