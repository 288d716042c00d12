"""Experiment configuration and its flat ``section.key = value`` file format."""

from __future__ import annotations

import dataclasses
import hashlib
from dataclasses import dataclass, fields
from pathlib import Path

from .channel import noise_variance
from .errors import ConfigurationError

__all__ = ["ExperimentConfig", "load_config", "parse_config", "format_config", "SCHEMES"]

SCHEMES = ("minmax", "cbf-upa", "cbf-ppa")
STRATEGIES = ("wlog", "bnb")

# field name -> dotted key in the config file
_KEYS = {
    "n_aps": "network.n_aps",
    "n_users": "network.n_users",
    "m_ap": "network.m_ap",
    "cluster_size": "network.cluster_size",
    "side_length_m": "network.side_length_m",
    "ap_height_m": "network.ap_height_m",
    "user_height_m": "network.user_height_m",
    "redraw_positions": "network.redraw_positions",
    "eta_w": "radio.eta_w",
    "bandwidth_hz": "radio.bandwidth_hz",
    "tau_ratio": "radio.tau_ratio",
    "noise_figure_db": "radio.noise_figure_db",
    "noise_psd_dbm_hz": "radio.noise_psd_dbm_hz",
    "freq_ghz": "channel.freq_ghz",
    "shadow_sigma_db": "channel.shadow_sigma_db",
    "shadow_r0_m": "channel.shadow_r0_m",
    "delta": "optimizer.delta",
    "strategy": "optimizer.strategy",
    "n_iterations": "experiment.n_iterations",
    "seed": "experiment.seed",
    "schemes": "experiment.schemes",
}


@dataclass(frozen=True)
class ExperimentConfig:
    n_aps: int = 100
    n_users: int = 40
    m_ap: int = 4
    cluster_size: int = 15
    side_length_m: float = 1000.0
    ap_height_m: float = 10.0
    user_height_m: float = 1.65
    redraw_positions: bool = True
    eta_w: float = 0.2
    bandwidth_hz: float = 20e6
    tau_ratio: float = 0.42
    noise_figure_db: float = 9.0
    noise_psd_dbm_hz: float = -174.0
    freq_ghz: float = 1.9
    shadow_sigma_db: float = 4.0
    shadow_r0_m: float = 9.0
    delta: float = 1000.0
    strategy: str = "wlog"
    n_iterations: int = 250
    seed: int = 0
    schemes: tuple[str, ...] = SCHEMES

    def __post_init__(self):
        if isinstance(self.schemes, str):
            object.__setattr__(self, "schemes", _parse_schemes(self.schemes))
        else:
            object.__setattr__(self, "schemes", tuple(self.schemes))
        self.validate()

    def validate(self):
        for name in ("n_aps", "n_users", "m_ap", "cluster_size", "n_iterations"):
            if getattr(self, name) < 1:
                raise ConfigurationError(f"{_KEYS[name]} must be at least 1")
        if self.cluster_size > self.n_aps:
            raise ConfigurationError("network.cluster_size cannot exceed network.n_aps")
        if not self.ap_height_m > self.user_height_m > 0:
            raise ConfigurationError("need ap_height_m > user_height_m > 0")
        for name in ("side_length_m", "eta_w", "bandwidth_hz", "freq_ghz",
                     "shadow_r0_m", "delta"):
            if not getattr(self, name) > 0:
                raise ConfigurationError(f"{_KEYS[name]} must be positive")
        if not 0 < self.tau_ratio <= 1:
            raise ConfigurationError("radio.tau_ratio must be in (0, 1]")
        if self.shadow_sigma_db < 0:
            raise ConfigurationError("channel.shadow_sigma_db must be nonnegative")
        if self.strategy not in STRATEGIES:
            raise ConfigurationError(f"optimizer.strategy must be one of {STRATEGIES}")
        if not self.schemes:
            raise ConfigurationError("experiment.schemes is empty")
        for s in self.schemes:
            if s not in SCHEMES:
                raise ConfigurationError(f"unknown scheme {s!r}")

    @property
    def noise_var(self) -> float:
        return noise_variance(self.bandwidth_hz, self.noise_figure_db, self.noise_psd_dbm_hz)

    def replace(self, **changes) -> "ExperimentConfig":
        return dataclasses.replace(self, **changes)

    def digest(self) -> str:
        return hashlib.sha256(format_config(self).encode()).hexdigest()[:16]


def _parse_schemes(text: str) -> tuple[str, ...]:
    return tuple(s.strip() for s in text.split(",") if s.strip())


def _parse_bool(text: str) -> bool:
    t = text.strip().lower()
    if t in ("1", "true", "yes", "on"):
        return True
    if t in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


def _convert(name: str, text: str):
    ftype = {f.name: f.type for f in fields(ExperimentConfig)}[name]
    if name == "schemes":
        return _parse_schemes(text)
    if ftype == "bool":
        return _parse_bool(text)
    if ftype == "int":
        value = float(text)
        if value != int(value):
            raise ValueError(f"not an integer: {text!r}")
        return int(value)
    if ftype == "float":
        return float(text)
    return text.strip()


def parse_config(text: str, base: ExperimentConfig | None = None) -> ExperimentConfig:
    """Read ``section.key = value`` lines; ``#`` starts a comment.

    Unknown keys are rejected so a typo never silently falls back to a
    default.
    """
    by_key = {v: k for k, v in _KEYS.items()}
    values = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigurationError(f"line {lineno}: expected 'key = value'")
        key, value = (s.strip() for s in line.split("=", 1))
        if key not in by_key:
            raise ConfigurationError(f"line {lineno}: unknown key {key!r}")
        try:
            values[by_key[key]] = _convert(by_key[key], value)
        except ValueError as exc:
            raise ConfigurationError(f"line {lineno}: {exc}") from None
    return dataclasses.replace(base or ExperimentConfig(), **values)


def load_config(path) -> ExperimentConfig:
    return parse_config(Path(path).read_text())


def format_config(cfg: ExperimentConfig) -> str:
    lines = []
    for f in fields(cfg):
        value = getattr(cfg, f.name)
        if f.name == "schemes":
            value = ",".join(value)
        elif isinstance(value, bool):
            value = "true" if value else "false"
        elif isinstance(value, float):
            value = repr(value)
        lines.append(f"{_KEYS[f.name]} = {value}")
    return "\n".join(lines) + "\n"
