"""CDF tables, scheme comparison and the on-disk results directory.

Output directory layout::

    rates_<scheme>.cdf        per-user rate (bit/s), CDF, rate/B (bit/s/Hz)
    rate_bound_<scheme>.cdf   no-interference rate bound, same columns
    ap_power_<scheme>.cdf     per-AP radiated power (W) of serving APs
    ee_<scheme>.cdf           network radio EE (bit/J), one per iteration
    summary.txt               human-readable comparison table
    summary.kv                the same numbers as ``key = value`` lines
    config.echo               the effective configuration
    *.png                     CDF figures
"""

from __future__ import annotations

from pathlib import Path

import numpy as np

from .config import ExperimentConfig, format_config, parse_config
from .experiment import ResultsDataset, SchemeSamples

__all__ = [
    "emit_cdf",
    "read_cdf",
    "empirical_cdf",
    "scheme_stats",
    "compare_schemes",
    "format_summary",
    "format_kv",
    "write_results",
    "load_results",
]

FMT = "%.17g"


def empirical_cdf(samples):
    """Sorted samples and their CDF values ``rank / n``."""
    x = np.sort(np.asarray(samples, dtype=float).ravel())
    if x.size == 0:
        raise ValueError("empirical CDF of an empty sample")
    return x, np.arange(1, x.size + 1) / x.size


def emit_cdf(samples, path, name: str = "value", extra: tuple[str, float] | None = None):
    """Write ``value cdf [extra]`` rows sorted ascending.

    ``extra = (column_name, factor)`` appends ``value * factor`` as a third
    column, e.g. spectral efficiency from rate with ``factor = 1/B``.
    """
    x, F = empirical_cdf(samples)
    header = f"{name} cdf"
    cols = [x, F]
    if extra is not None:
        header += f" {extra[0]}"
        cols.append(x * extra[1])
    np.savetxt(path, np.column_stack(cols), fmt=FMT, header=header)
    return Path(path)


def read_cdf(path) -> np.ndarray:
    """Sample values (first column) of a CDF file."""
    data = np.loadtxt(path, ndmin=2)
    return data[:, 0]


def scheme_stats(s: SchemeSamples, eta: float) -> dict:
    p = s.ap_powers
    with np.errstate(divide="ignore"):
        p_db = 10 * np.log10(p / eta) if p.size else p
    return {
        "rate_p5_bps": float(np.percentile(s.rates, 5)),
        "rate_median_bps": float(np.median(s.rates)),
        "ap_power_min_db_rel_eta": float(np.min(p_db)),
        "ap_power_max_db_rel_eta": float(np.max(p_db)),
        "ee_min": float(np.min(s.ee)),
        "ee_median": float(np.median(s.ee)),
        "ee_max": float(np.max(s.ee)),
        "n_users_samples": int(s.rates.size),
        "n_iterations": int(s.ee.size),
    }


def compare_schemes(samples: dict, eta: float, reference: str = "minmax") -> dict:
    """Per-scheme statistics plus ratios of ``reference`` against every other scheme.

    Like-for-like ratios (``reference / other``) cover the 5th-percentile
    and median rate and the min/median/max EE. ``worst_ap_power_gain_db``
    is how far the reference's highest AP power sits below the other's.
    ``ee_worst_vs_best`` divides the reference's lowest EE by the other's
    highest.
    """
    if len(samples) < 2:
        raise ValueError("need at least two schemes to compare")
    stats = {k: scheme_stats(v, eta) for k, v in samples.items()}
    if reference not in stats:
        reference = next(iter(stats))
    ref = stats[reference]
    ratios = {}
    for other, st in stats.items():
        if other == reference:
            continue
        ratios[other] = {
            "rate_p5": ref["rate_p5_bps"] / st["rate_p5_bps"],
            "rate_median": ref["rate_median_bps"] / st["rate_median_bps"],
            "ee_min": ref["ee_min"] / st["ee_min"],
            "ee_median": ref["ee_median"] / st["ee_median"],
            "ee_max": ref["ee_max"] / st["ee_max"],
            "worst_ap_power_gain_db": st["ap_power_max_db_rel_eta"] - ref["ap_power_max_db_rel_eta"],
            "ee_worst_vs_best": ref["ee_min"] / st["ee_max"],
        }
    return {"reference": reference, "stats": stats, "ratios": ratios}


def format_summary(summary: dict, extra: dict | None = None) -> str:
    stats, ratios = summary["stats"], summary["ratios"]
    lines = [f"{'scheme':<10s} {'rate p5':>11s} {'rate med':>11s} {'P_AP min':>9s} "
             f"{'P_AP max':>9s} {'EE min':>11s} {'EE med':>11s} {'EE max':>11s}",
             f"{'':<10s} {'[Mbit/s]':>11s} {'[Mbit/s]':>11s} {'[dB/eta]':>9s} "
             f"{'[dB/eta]':>9s} {'[Mbit/J]':>11s} {'[Mbit/J]':>11s} {'[Mbit/J]':>11s}"]
    for name, st in stats.items():
        lines.append(
            f"{name:<10s} {st['rate_p5_bps'] / 1e6:11.4f} {st['rate_median_bps'] / 1e6:11.4f} "
            f"{st['ap_power_min_db_rel_eta']:9.2f} {st['ap_power_max_db_rel_eta']:9.2f} "
            f"{st['ee_min'] / 1e6:11.3f} {st['ee_median'] / 1e6:11.3f} {st['ee_max'] / 1e6:11.3f}")
    lines.append("")
    lines.append(f"ratios of {summary['reference']} over:")
    for other, r in ratios.items():
        lines.append(
            f"  {other:<8s} rate p5 x{r['rate_p5']:.3f}  rate med x{r['rate_median']:.3f}  "
            f"EE med x{r['ee_median']:.3f}  EE worst/best x{r['ee_worst_vs_best']:.3f}  "
            f"worst-AP power -{r['worst_ap_power_gain_db']:.2f} dB")
    if extra:
        lines.append("")
        for k, v in extra.items():
            lines.append(f"{k}: {v}")
    return "\n".join(lines) + "\n"


def format_kv(summary: dict, extra: dict | None = None) -> str:
    lines = [f"reference = {summary['reference']}"]
    for name, st in summary["stats"].items():
        for k, v in st.items():
            lines.append(f"{name}.{k} = {v!r}")
    for other, r in summary["ratios"].items():
        for k, v in r.items():
            lines.append(f"ratio.{summary['reference']}_over_{other}.{k} = {v!r}")
    for k, v in (extra or {}).items():
        lines.append(f"{k} = {v}")
    return "\n".join(lines) + "\n"


def _write_scheme(out: Path, scheme: str, s: SchemeSamples, cfg: ExperimentConfig):
    se = ("spectral_efficiency_bps_hz", 1.0 / cfg.bandwidth_hz)
    emit_cdf(s.rates, out / f"rates_{scheme}.cdf", "rate_bps", se)
    if s.rate_bounds is not None and s.rate_bounds.size:
        emit_cdf(s.rate_bounds, out / f"rate_bound_{scheme}.cdf", "rate_bps", se)
    emit_cdf(s.ap_powers, out / f"ap_power_{scheme}.cdf", "power_w")
    emit_cdf(s.ee, out / f"ee_{scheme}.cdf", "ee_bit_per_joule")


def write_results(ds: ResultsDataset, out_dir, figures: bool = True) -> dict:
    """Write CDF tables, summary and config echo; returns the summary dict
    (or ``None`` with fewer than two usable schemes)."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    cfg = ds.config
    (out / "config.echo").write_text(format_config(cfg))
    samples = {}
    for scheme in cfg.schemes:
        s = ds.samples(scheme)
        if s.rates.size == 0:
            continue
        _write_scheme(out, scheme, s, cfg)
        samples[scheme] = s
    extra = {
        "config_digest": ds.provenance.get("config_digest", cfg.digest()),
        "seed": cfg.seed,
        "iterations": cfg.n_iterations,
        "excluded_results": len(ds.excluded()),
        "exclusion_rate": f"{ds.exclusion_rate():.4f}",
    }
    summary = None
    if len(samples) >= 2:
        summary = compare_schemes(samples, cfg.eta_w)
        (out / "summary.txt").write_text(format_summary(summary, extra))
        (out / "summary.kv").write_text(format_kv(summary, extra))
    if figures:
        from .plotting import plot_all
        plot_all(samples, cfg, out)
    return summary


def load_results(in_dir) -> tuple[ExperimentConfig, dict]:
    """Config and per-scheme samples from a results directory."""
    src = Path(in_dir)
    cfg = parse_config((src / "config.echo").read_text())
    samples = {}
    for scheme in cfg.schemes:
        path = src / f"rates_{scheme}.cdf"
        if not path.exists():
            continue
        bound = src / f"rate_bound_{scheme}.cdf"
        samples[scheme] = SchemeSamples(
            rates=read_cdf(path),
            ap_powers=read_cdf(src / f"ap_power_{scheme}.cdf"),
            ee=read_cdf(src / f"ee_{scheme}.cdf"),
            rate_bounds=read_cdf(bound) if bound.exists() else None,
        )
    return cfg, samples
