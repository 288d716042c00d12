"""CDF figures written next to the tabular results."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

__all__ = ["STYLE", "plot_cdf_figure", "plot_all"]

STYLE = {
    "figure.figsize": (5.0, 3.6),
    "font.size": 9,
    "axes.grid": True,
    "grid.alpha": 0.3,
    "legend.fontsize": 8,
    "savefig.dpi": 150,
    "savefig.bbox": "tight",
}

LABELS = {"minmax": "Min-max (proposed)", "cbf-upa": "CBF-UPA", "cbf-ppa": "CBF-PPA"}
COLORS = {"minmax": "C0", "cbf-upa": "C1", "cbf-ppa": "C2"}


def _step(ax, samples, **kw):
    x = np.sort(np.asarray(samples, dtype=float))
    if x.size:
        ax.step(x, np.arange(1, x.size + 1) / x.size, where="post", **kw)


def plot_cdf_figure(curves, xlabel, path, logx=False, dashed=None):
    """One CDF figure. ``curves`` and ``dashed`` map scheme -> samples."""
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots()
        for scheme, x in curves.items():
            _step(ax, x, label=LABELS.get(scheme, scheme), color=COLORS.get(scheme))
        for scheme, x in (dashed or {}).items():
            _step(ax, x, ls="--", color=COLORS.get(scheme),
                  label=f"{LABELS.get(scheme, scheme)}, no interference")
        if logx:
            ax.set_xscale("log")
        ax.set_xlabel(xlabel)
        ax.set_ylabel("CDF")
        ax.set_ylim(0, 1.0)
        ax.legend(loc="lower right")
        fig.savefig(path)
        plt.close(fig)
    return Path(path)


def plot_all(samples: dict, cfg, out_dir) -> list:
    """Rate, per-AP power and EE CDF figures for every scheme present."""
    out = Path(out_dir)
    if not samples:
        return []
    paths = []
    rates = {k: v.rates / 1e6 for k, v in samples.items()}
    bounds = {k: v.rate_bounds / 1e6 for k, v in samples.items()
              if k != "minmax" and v.rate_bounds is not None and v.rate_bounds.size}
    paths.append(plot_cdf_figure(rates, "User rate [Mbit/s]", out / "rates_cdf.png",
                                 dashed=bounds))
    with np.errstate(divide="ignore"):
        power = {k: 10 * np.log10(v.ap_powers * 1e3) for k, v in samples.items()}
    power = {k: v[np.isfinite(v)] for k, v in power.items()}
    paths.append(plot_cdf_figure(power, "AP transmit power [dBm]", out / "ap_power_cdf.png"))
    ee = {k: v.ee / 1e6 for k, v in samples.items()}
    paths.append(plot_cdf_figure(ee, "Radio energy efficiency [Mbit/J]", out / "ee_cdf.png",
                                 logx=True))
    return paths
