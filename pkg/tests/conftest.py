"""Shared builders for hand-made and simulated instances."""

import numpy as np
import pytest

from cfminmax.channel import ChannelRealization, LargeScaleTable
from cfminmax.config import ExperimentConfig
from cfminmax.experiment import draw_instance
from cfminmax.network import AssociationMap
from cfminmax.optimizer import QosBounds


def toy_instance(h, serving, rho, mu, eta, delta=1000.0):
    """Channels, association and bounds from explicit arrays.

    ``h`` has shape (users, aps, antennas); ``serving`` lists each user's APs.
    """
    h = np.asarray(h, dtype=complex)
    if h.ndim == 2:
        h = h[..., None]
    n_u, n_a, _ = h.shape
    beta = np.sum(np.abs(h) ** 2, axis=-1) / h.shape[2]
    with np.errstate(divide="ignore"):
        table = LargeScaleTable(10 * np.log10(np.maximum(beta, 1e-300)))
    ch = ChannelRealization(h, table)
    assoc = AssociationMap.from_serving(serving, n_a)
    bounds = QosBounds(np.broadcast_to(rho, n_u), np.broadcast_to(mu, n_u),
                       np.broadcast_to(eta, n_a), delta)
    return ch, assoc, bounds


def sim_instance(n_aps, n_users, m_ap, cluster, seed, iteration=0, **kw):
    cfg = ExperimentConfig(n_aps=n_aps, n_users=n_users, m_ap=m_ap, cluster_size=cluster,
                           n_iterations=1, seed=seed, **kw)
    _, ch, assoc, bounds = draw_instance(cfg, iteration)
    return ch, assoc, bounds


def rel_diff(a, b, scale):
    return abs(a - b) / max(abs(a), abs(b), scale)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


# one line per acceptance criterion, echoed after the run
ACCEPTANCE_LINES = []


def report_criterion(number, passed, text):
    line = f"{'PASS' if passed else 'FAIL'}  criterion {number:>2}: {text}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    return passed


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
