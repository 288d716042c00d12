"""Large-scale fading with spatially correlated shadowing, and Rayleigh
small-scale fading.

Shadowing is correlated across users (exponential-in-distance, base 2)
for the same AP and independent across APs.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .network import NetworkLayout

__all__ = [
    "LargeScaleTable",
    "ChannelRealization",
    "db_to_linear",
    "linear_to_db",
    "noise_variance",
    "path_loss_dB",
    "shadow_covariance",
    "shadowing_factor",
    "sample_shadowing",
    "sample_small_scale",
    "channel_vector",
    "large_scale_table",
    "draw_channels",
]

PSD_CLIP_RTOL = 1e-10


def db_to_linear(x_db):
    return 10.0 ** (np.asarray(x_db, dtype=float) / 10.0)


def linear_to_db(x):
    return 10.0 * np.log10(np.asarray(x, dtype=float))


def noise_variance(bandwidth_hz: float, noise_figure_db: float = 9.0,
                   noise_psd_dbm_hz: float = -174.0) -> float:
    """Receiver noise power in watts: ``B * 10**(0.1*(NF + N0) - 3)``."""
    return bandwidth_hz * 10.0 ** (0.1 * (noise_figure_db + noise_psd_dbm_hz) - 3.0)


@dataclass(frozen=True)
class LargeScaleTable:
    """Large-scale gains, shape ``(n_users, n_aps)``, stored in dB."""

    beta_dB: np.ndarray

    @property
    def beta_linear(self) -> np.ndarray:
        return db_to_linear(self.beta_dB)


@dataclass(frozen=True)
class ChannelRealization:
    """Channel vectors ``h[u, a, :]`` of one coherence slot.

    ``h`` has shape ``(n_users, n_aps, m_ap)``; the user receives
    ``h[u, a].conj() @ f`` from beamformer ``f`` at AP ``a``.
    """

    h: np.ndarray
    large_scale: LargeScaleTable | None = None
    slot_index: int = 0

    @property
    def n_users(self) -> int:
        return self.h.shape[0]

    @property
    def n_aps(self) -> int:
        return self.h.shape[1]

    @property
    def m_ap(self) -> int:
        return self.h.shape[2]

    def gains(self) -> np.ndarray:
        """Instantaneous ``||h[u, a]||^2``, shape ``(n_users, n_aps)``."""
        return np.sum(np.abs(self.h) ** 2, axis=-1)


def path_loss_dB(d, f_GHz: float = 1.9):
    """Deterministic part of the large-scale gain in dB.

    ``-36.7 log10(d) - 22.7 log10(f)`` with ``d`` in meters and ``f`` in GHz.
    """
    d = np.asarray(d, dtype=float)
    if np.any(d <= 0):
        raise ValueError("distance must be positive")
    if f_GHz <= 0:
        raise ValueError("frequency must be positive")
    out = -36.7 * np.log10(d) - 22.7 * np.log10(f_GHz)
    return float(out) if out.ndim == 0 else out


def shadow_covariance(user_positions=None, r0: float = 9.0, sigma_sh: float = 4.0, *,
                      distances: np.ndarray | None = None,
                      side_length: float | None = None) -> np.ndarray:
    """Per-AP shadowing covariance between users, in dB^2.

    Entry ``(u, i)`` is ``sigma_sh**2 * 2**(-r_ui / r0)``. Pass either
    ``distances`` directly or positions (with ``side_length`` for the
    wrap-around metric; plain Euclidean otherwise).
    """
    if r0 <= 0:
        raise ValueError("r0 must be positive")
    if distances is None:
        P = np.asarray(user_positions, dtype=float).reshape(-1, 2)
        d = np.abs(P[:, None, :] - P[None, :, :])
        if side_length is not None:
            d = np.minimum(d, side_length - d)
        distances = np.sqrt(np.sum(d**2, axis=-1))
    distances = np.asarray(distances, dtype=float)
    cov = sigma_sh**2 * np.exp2(-distances / r0)
    return 0.5 * (cov + cov.T)


def shadowing_factor(cov: np.ndarray) -> np.ndarray:
    """Square-root factor ``L`` with ``L @ L.T == cov``.

    Eigenvalues below ``1e-10 * trace`` are clipped to zero, so a
    numerically indefinite or singular covariance still factors.
    """
    cov = 0.5 * (cov + cov.T)
    w, V = np.linalg.eigh(cov)
    floor = PSD_CLIP_RTOL * max(np.trace(cov), 0.0)
    if w.size and w.min() < -max(floor, 1e-12):
        raise ArithmeticError(f"covariance is not PSD (min eigenvalue {w.min():.3g})")
    w = np.where(w < floor, 0.0, w)
    return V * np.sqrt(w)


def sample_shadowing(cov: np.ndarray, rng: np.random.Generator, n_aps: int | None = None,
                     factor: np.ndarray | None = None) -> np.ndarray:
    """Zero-mean Gaussian shadowing in dB with covariance ``cov``.

    Returns one user vector, or an ``(n_users, n_aps)`` matrix of
    independent per-AP draws when ``n_aps`` is given.
    """
    L = shadowing_factor(cov) if factor is None else factor
    n = L.shape[0]
    if n_aps is None:
        return L @ rng.standard_normal(n)
    return L @ rng.standard_normal((n, n_aps))


def sample_small_scale(m_ap: int, rng: np.random.Generator, size=()) -> np.ndarray:
    """Circularly-symmetric ``CN(0, I)`` vectors of length ``m_ap``."""
    if m_ap < 1:
        raise ValueError("m_ap must be at least 1")
    shape = ((size,) if isinstance(size, int) else tuple(size)) + (m_ap,)
    re = rng.standard_normal(shape)
    im = rng.standard_normal(shape)
    return (re + 1j * im) / np.sqrt(2.0)


def channel_vector(beta_linear, g: np.ndarray) -> np.ndarray:
    """Scale small-scale fading by the amplitude gain ``sqrt(beta)``."""
    beta_linear = np.asarray(beta_linear, dtype=float)
    if np.any(beta_linear < 0):
        raise ValueError("beta must be nonnegative")
    return np.sqrt(beta_linear)[..., None] * g if beta_linear.ndim else np.sqrt(beta_linear) * g


def large_scale_table(layout: NetworkLayout, rng: np.random.Generator, f_GHz: float = 1.9,
                      sigma_sh: float = 4.0, r0: float = 9.0) -> LargeScaleTable:
    """Path loss plus correlated shadowing for every user/AP pair."""
    pl = path_loss_dB(layout.user_ap_distances(), f_GHz)
    cov = shadow_covariance(distances=layout.user_user_distances(), r0=r0, sigma_sh=sigma_sh)
    zeta = sample_shadowing(cov, rng, n_aps=layout.n_aps)
    return LargeScaleTable(pl + zeta)


def draw_channels(layout: NetworkLayout, m_ap: int, rng: np.random.Generator,
                  f_GHz: float = 1.9, sigma_sh: float = 4.0, r0: float = 9.0,
                  slot_index: int = 0) -> ChannelRealization:
    table = large_scale_table(layout, rng, f_GHz, sigma_sh, r0)
    g = sample_small_scale(m_ap, rng, size=(layout.n_users, layout.n_aps))
    h = channel_vector(table.beta_linear, g)
    return ChannelRealization(h, table, slot_index)
