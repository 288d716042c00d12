import numpy as np
import pytest

from cfminmax.beamformers import BeamformerSet, cbf_ppa
from cfminmax.metrics import inner_products
from cfminmax.optimizer import build_model, check_feasibility
from cfminmax.oracles import (enumerate_phi_solve, random_feasible_search,
                              received_signal_bruteforce, worst_interference_loops)

from conftest import sim_instance, toy_instance


def test_enumeration_guard():
    ch, assoc, b = sim_instance(3, 11, 1, 2, 0)
    with pytest.raises(ValueError):
        enumerate_phi_solve(build_model(ch, assoc, b))


def test_enumeration_leaf_count():
    ch, assoc, b = sim_instance(3, 3, 1, 2, 4)
    sol = enumerate_phi_solve(build_model(ch, assoc, b))
    assert sol.ok and sol.nodes == 8
    assert sol.z == pytest.approx(np.nanmin(sol.extras["leaf_z"]))


def test_search_single_user_zero():
    ch, assoc, b = toy_instance(np.ones((1, 1, 2)), [[0]], 0.25, 1.0, 1.0)
    rep = random_feasible_search(ch, assoc, b, 20, np.random.default_rng(0))
    assert rep.found and rep.best_z == 0.0


def test_search_empty():
    ch, assoc, b = sim_instance(3, 2, 1, 2, 0)
    rep = random_feasible_search(ch, assoc, b, 0, np.random.default_rng(0))
    assert rep.n_samples == 0 and not rep.found and rep.beamformers is None


@pytest.mark.parametrize("seed", range(3))
def test_search_points_are_feasible(seed):
    ch, assoc, b = sim_instance(3, 3, 2, 2, seed)
    rep = random_feasible_search(ch, assoc, b, 50, np.random.default_rng(seed), 100)
    assert rep.found
    assert check_feasibility(rep.beamformers, ch, assoc, b).passed
    assert worst_interference_loops(ch.h, rep.beamformers.f, assoc) == pytest.approx(rep.best_z)


def test_search_deterministic():
    ch, assoc, b = sim_instance(3, 3, 1, 2, 1)
    a = random_feasible_search(ch, assoc, b, 30, np.random.default_rng(5), 50)
    c = random_feasible_search(ch, assoc, b, 30, np.random.default_rng(5), 50)
    assert a.best_z == c.best_z


def test_loop_interference_matches_vectorized():
    ch, assoc, _ = sim_instance(5, 4, 3, 2, 2)
    f = cbf_ppa(ch, assoc, 0.2)
    G = inner_products(ch, f)
    np.fill_diagonal(G, 0)
    assert worst_interference_loops(ch.h, f.f, assoc) == pytest.approx(
        np.max(np.abs(G).sum(axis=1)), rel=1e-12)


def test_received_signal_regrouping_with_symbols():
    ch, assoc, _ = sim_instance(4, 3, 2, 2, 6)
    f = cbf_ppa(ch, assoc, 0.2)
    s = np.exp(2j * np.pi * np.random.default_rng(0).uniform(size=3))
    for u in range(3):
        r = received_signal_bruteforce(ch, f, s, u, assoc, noise=1e-3j)
        assert r.by_ap == pytest.approx(r.by_user, rel=1e-12)
        assert r.total == pytest.approx(r.by_ap + 1e-3j)
        assert r.interference.shape == (2,)


def test_zero_beamformers():
    ch, assoc, _ = sim_instance(3, 2, 2, 2, 0)
    r = received_signal_bruteforce(ch, BeamformerSet(np.zeros((3, 2, 2), complex)),
                                   np.ones(2), 1, assoc)
    assert r.by_ap == 0 and r.by_user == 0
