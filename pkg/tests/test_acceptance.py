"""Acceptance criteria, one test per criterion.

Each test prints a ``PASS``/``FAIL`` line; the lines are repeated in the
terminal summary. Run with ``pytest tests/test_acceptance.py``.
"""

import math
import time

import numpy as np
import pytest

from cfminmax.beamformers import cbf_ppa, cbf_upa
from cfminmax.channel import large_scale_table, noise_variance, path_loss_dB, sample_small_scale
from cfminmax.config import ExperimentConfig
from cfminmax.experiment import draw_instance, run_experiment
from cfminmax.metrics import rate, signal_power
from cfminmax.network import NetworkLayout
from cfminmax.optimizer import (branch_and_bound, build_model, check_feasibility,
                                epigraph_gap, reduce_phase_wlog, solve_socp)
from cfminmax.oracles import enumerate_phi_solve
from cfminmax.report import compare_schemes, write_results

from conftest import rel_diff, report_criterion, toy_instance

AGREE_TOL = 1e-5
FEAS_TOL = 1e-6
EPI_TOL = 1e-6

MID = dict(n_aps=16, m_ap=2, n_users=6, cluster_size=4)


def tiny_instance(k, m_ap=2):
    cfg = ExperimentConfig(n_aps=3, m_ap=m_ap, n_users=2 + k % 3, cluster_size=2,
                           n_iterations=1, seed=1000 + k)
    return draw_instance(cfg, 0)[1:]


@pytest.fixture(scope="module")
def tiny_runs():
    """Criterion-1 instances solved by all three routes, with wall time."""
    t0 = time.perf_counter()
    runs = []
    for k in range(20):
        ch, assoc, b = tiny_instance(k)
        model = build_model(ch, assoc, b)
        runs.append((ch, assoc, b, solve_socp(reduce_phase_wlog(model)),
                     branch_and_bound(model), enumerate_phi_solve(model)))
    return runs, time.perf_counter() - t0


@pytest.fixture(scope="module")
def mid_runs():
    cfg = ExperimentConfig(**MID, n_iterations=100, seed=77)
    t0 = time.perf_counter()
    runs = []
    for i in range(cfg.n_iterations):
        _, ch, assoc, b = draw_instance(cfg, i)
        runs.append((ch, assoc, b, solve_socp(reduce_phase_wlog(build_model(ch, assoc, b)))))
    return runs, time.perf_counter() - t0


def test_c01_oracle_equivalence(tiny_runs):
    runs, elapsed = tiny_runs
    worst, solved = 0.0, True
    for ch, assoc, b, w, bb, en in runs:
        solved &= w.ok and bb.ok and en.ok
        if w.ok and bb.ok and en.ok:
            scale = float(np.max(b.sqrt_rho))
            worst = max(worst, rel_diff(w.z, bb.z, scale), rel_diff(w.z, en.z, scale))
    ok = solved and worst <= AGREE_TOL and elapsed < 60
    report_criterion(1, ok, f"wlog/bnb/enumeration on 20 tiny instances, worst rel diff "
                            f"{worst:.2e} (tol {AGREE_TOL:g}), {elapsed:.1f} s (< 60 s)")
    assert ok


def test_c01_supplement_nonzero_optimum():
    # single-antenna APs make zero-forcing impossible, so z > 0 is compared too
    worst, n_pos = 0.0, 0
    for k in range(20):
        ch, assoc, b = tiny_instance(k, m_ap=1)
        model = build_model(ch, assoc, b)
        w, bb, en = (solve_socp(reduce_phase_wlog(model)), branch_and_bound(model),
                     enumerate_phi_solve(model))
        assert w.ok and bb.ok and en.ok
        scale = float(np.max(b.sqrt_rho))
        worst = max(worst, rel_diff(w.z, bb.z, scale), rel_diff(w.z, en.z, scale))
        n_pos += w.z > 1e-6 * scale
    ok = worst <= AGREE_TOL and n_pos > 0
    report_criterion("1+", ok, f"same sweep with M_AP=1 ({n_pos}/20 with z > 0), "
                               f"worst rel diff {worst:.2e}")
    assert ok


def test_c02_feasibility_suite(mid_runs):
    runs, elapsed = mid_runs
    worst, family, n_ok = 0.0, "", 0
    for ch, assoc, b, sol in runs:
        if not sol.ok:
            continue
        n_ok += 1
        name, v = check_feasibility(sol, ch, assoc, b, FEAS_TOL).worst
        if v > worst:
            worst, family = v, name
    ok = n_ok == len(runs) and worst <= FEAS_TOL and elapsed < 600
    report_criterion(2, ok, f"{n_ok}/{len(runs)} mid-size instances optimal, worst violation "
                            f"{worst:.2e} ({family or 'none'}), {elapsed:.1f} s (< 600 s)")
    assert ok


def test_c03_epigraph_tightness(tiny_runs, mid_runs):
    gaps = []
    for ch, assoc, b, *sols in tiny_runs[0]:
        gaps += [epigraph_gap(s, ch, b) for s in sols if s.ok]
    for ch, assoc, b, sol in mid_runs[0]:
        if sol.ok:
            gaps.append(epigraph_gap(sol, ch, b))
    for k in range(10):
        ch, assoc, b = tiny_instance(k, m_ap=1)
        sol = solve_socp(reduce_phase_wlog(build_model(ch, assoc, b)))
        gaps.append(epigraph_gap(sol, ch, b))
    worst = max(gaps)
    ok = worst <= EPI_TOL
    report_criterion(3, ok, f"z vs recomputed worst interference on {len(gaps)} solutions, "
                            f"worst rel gap {worst:.2e} (tol {EPI_TOL:g})")
    assert ok


def test_c04_single_user():
    ch, assoc, b = toy_instance(np.ones((1, 1, 1)), [[0]], 0.25, 1.0, 1.0)
    cases = [(ch, assoc, b)]
    cfg = ExperimentConfig(n_aps=16, n_users=1, m_ap=2, cluster_size=4, n_iterations=1, seed=4)
    cases.append(draw_instance(cfg, 0)[1:])
    ok, worst_z, worst_b = True, 0.0, 0.0
    for ch, assoc, b in cases:
        for sol in (solve_socp(reduce_phase_wlog(build_model(ch, assoc, b))),
                    branch_and_bound(build_model(ch, assoc, b))):
            ok &= sol.ok
            amp = math.sqrt(signal_power(ch, sol.beamformers, 0))
            viol = max((b.sqrt_rho[0] - amp) / b.sqrt_rho[0], (amp - b.sqrt_mu[0]) / b.sqrt_mu[0])
            worst_z, worst_b = max(worst_z, abs(sol.z)), max(worst_b, viol)
    ok = ok and worst_z <= 1e-8 and worst_b <= 1e-8
    report_criterion(4, ok, f"single user: max |z| {worst_z:.1e} (<= 1e-8), "
                            f"bound violation {max(worst_b, 0):.1e} (<= 1e-8 relative)")
    assert ok


def test_c05_channel_statistics():
    n = 10_000
    rng = np.random.default_rng(2024)
    # 10^4 APs give 10^4 independent shadowing draws for two users 9 m apart
    aps = rng.uniform(0, 1000, size=(n, 2))
    users = np.array([[500.0, 500.0], [509.0, 500.0]])
    layout = NetworkLayout(1000.0, aps, users)
    table = large_scale_table(layout, rng)
    zeta = table.beta_dB - path_loss_dB(layout.user_ap_distances())
    var = zeta.var(axis=1)
    cov_same = np.mean(zeta[0] * zeta[1]) - zeta[0].mean() * zeta[1].mean()
    # same user, neighbouring APs: should be uncorrelated
    cross = np.mean(zeta[0, 0::2] * zeta[0, 1::2])
    cross_sigma = 16.0 / math.sqrt(n // 2)
    g = sample_small_scale(4, rng, size=n)
    eg = float(np.mean(np.sum(np.abs(g) ** 2, axis=1)))
    checks = {
        "shadow var": bool(np.all(np.abs(var / 16 - 1) <= 0.10)),
        "same-AP cov": abs(cov_same / 8 - 1) <= 0.15,
        "E|g|^2": abs(eg / 4 - 1) <= 0.05,
        "cross-AP cov": abs(cross) <= 3 * cross_sigma,
    }
    ok = all(checks.values())
    report_criterion(5, ok, f"var {var[0]:.2f}/{var[1]:.2f} dB^2 (16 +-10%), cov(r=9) "
                            f"{cov_same:.2f} (8 +-15%), E|g|^2 {eg:.3f} (4 +-5%), cross-AP "
                            f"{cross:.3f} (|.| <= {3 * cross_sigma:.3f})")
    assert ok, checks


def test_c06_units():
    r1 = rate(1.0, 20e6, 0.42)
    s2 = noise_variance(20e6, 9.0, -174.0)
    pl = path_loss_dB(100.0, 1.9)
    ok = (r1 == pytest.approx(8.4e6, rel=1e-15)
          and s2 == pytest.approx(20e6 * 10 ** -19.5, rel=1e-15)
          and abs(pl - -79.7276) <= 1e-3)
    report_criterion(6, ok, f"rate(1) {r1:.1f} bit/s, sigma^2 {s2:.6e} W, "
                            f"path loss(100 m) {pl:.4f} dB")
    assert ok


def test_c07_baseline_full_power():
    cfg = ExperimentConfig(**MID, n_iterations=20, seed=5)
    worst = 0.0
    for i in range(cfg.n_iterations):
        _, ch, assoc, b = draw_instance(cfg, i)
        serving = assoc.users_per_ap() > 0
        for scheme in (cbf_upa, cbf_ppa):
            p = scheme(ch, assoc, cfg.eta_w).ap_powers()[serving]
            worst = max(worst, float(np.max(np.abs(p / cfg.eta_w - 1))))
    ok = worst <= 1e-12
    report_criterion(7, ok, f"CBF-UPA/PPA serving-AP power = eta, worst rel error {worst:.1e}")
    assert ok


def test_c08_directional_comparison():
    cfg = ExperimentConfig(**MID, n_iterations=50, seed=2021)
    t0 = time.perf_counter()
    ds = run_experiment(cfg)
    elapsed = time.perf_counter() - t0
    samples = {s: ds.samples(s) for s in cfg.schemes}
    summary = compare_schemes(samples, cfg.eta_w)
    st, r = summary["stats"], summary["ratios"]
    a = all(st["minmax"]["rate_p5_bps"] > st[o]["rate_p5_bps"] for o in ("cbf-upa", "cbf-ppa"))
    b = st["minmax"]["ap_power_min_db_rel_eta"] < 0.0
    c = all(st["minmax"]["ee_median"] > st[o]["ee_median"] for o in ("cbf-upa", "cbf-ppa"))
    ok = a and b and c and ds.exclusion_rate() <= 0.05 and elapsed < 1200
    report_criterion(8, ok, f"rate p5 x{r['cbf-upa']['rate_p5']:.2f}/x{r['cbf-ppa']['rate_p5']:.2f}, "
                            f"min AP power {st['minmax']['ap_power_min_db_rel_eta']:.2f} dB re eta, "
                            f"EE median x{r['cbf-upa']['ee_median']:.2f}/"
                            f"x{r['cbf-ppa']['ee_median']:.2f}, "
                            f"excluded {len(ds.excluded())}, {elapsed:.1f} s")
    assert ok


@pytest.mark.slow
def test_c09_full_scale_smoke():
    cfg = ExperimentConfig(n_iterations=1, seed=0)
    t0 = time.perf_counter()
    _, ch, assoc, b = draw_instance(cfg, 0)
    sol = solve_socp(reduce_phase_wlog(build_model(ch, assoc, b)))
    elapsed = time.perf_counter() - t0
    feas = check_feasibility(sol, ch, assoc, b).worst[1] if sol.ok else float("nan")
    report_criterion(9, sol.ok, f"full scale (100 APs, 40 users, M=4, cluster 15): status "
                                f"{sol.status}, worst violation {feas:.1e}, wall time "
                                f"{elapsed:.1f} s (reference: about 60 s; informational)")
    assert sol.ok


def test_c10_determinism(tmp_path):
    cfg = ExperimentConfig(**MID, n_iterations=10, seed=99)
    dirs = [tmp_path / "a", tmp_path / "b"]
    for d in dirs:
        write_results(run_experiment(cfg), d, figures=False)
    files = sorted(p.name for p in dirs[0].glob("*.cdf"))
    same = [(dirs[0] / f).read_bytes() == (dirs[1] / f).read_bytes() for f in files]
    ok = len(files) >= 9 and all(same)
    report_criterion(10, ok, f"{sum(same)}/{len(files)} CDF files byte-identical across two runs")
    assert ok
