import numpy as np
import pytest

from netpoa.mechanisms import basis_power, basis_set_covering, from_values, marginal_contribution
from netpoa.network import blind_network, complete_network, partition_into_classes, validate_network
from netpoa.oracle import (
    GameInstance,
    OracleError,
    ProfileCapError,
    build_tight_instance,
    deviate,
    empirical_poa,
    empirical_poa_report,
    enumerate_pure_ne,
    game_from_json,
    game_to_json,
    is_nash,
    potential_G,
    random_game,
    utility,
    welfare,
)
from netpoa.poa import poa_dual, poa_primal


def _setcover_pair():
    part = partition_into_classes(complete_network(2))
    w = basis_set_covering(2)
    return part, w


def test_two_agent_anti_coordination():
    # both prefer the valuable resource alone; marginal contribution splits them
    part, w = _setcover_pair()
    f = marginal_contribution(w, part)
    g = GameInstance([1.0, 0.6], [[{0}, {1}], [{0}, {1}]], part, w, f)
    assert sorted(enumerate_pure_ne(g)) == [(0, 1), (1, 0)]
    assert empirical_poa(g) == pytest.approx(1.0)
    assert welfare(g, (0, 0)) == pytest.approx(1.0)
    assert utility(g, 0, (0, 1)) == pytest.approx(1.0)
    assert utility(g, 0, (0, 0)) == pytest.approx(0.0)


def test_no_pure_equilibrium_returns_none():
    # on a 3-cycle agents 1 and 2 copy whom they see while agent 3 avoids agent 1
    part = partition_into_classes(validate_network([{0, 1}, {1, 2}, {2, 0}]))
    f = from_values([[1.0, 2.0], [1.0, 2.0], [1.0, 0.5]])
    g = GameInstance([1.0, 1.0], [[{0}, {1}]] * 3, part, basis_set_covering(3), f)
    assert enumerate_pure_ne(g) == []
    assert empirical_poa(g) is None
    rep = empirical_poa_report(g)
    assert rep.ratio is None and rep.n_equilibria == 0 and rep.optimal_welfare == pytest.approx(2.0)


def test_potential_identity_random(fig1):
    rng = np.random.default_rng(4)
    part = partition_into_classes(fig1)
    w = basis_power(5, 0.5)
    f = marginal_contribution(w, part)
    for _ in range(20):
        g = random_game(part, w, f, rng)
        p = tuple(int(rng.integers(len(a))) for a in g.actions)
        for i in range(g.n):
            j = g.owner[i]
            for a in range(len(g.actions[i])):
                q = deviate(p, i, a)
                du = utility(g, i, q) - utility(g, i, p)
                dg = potential_G(g, j, q) - potential_G(g, j, p)
                assert dg == pytest.approx(du, rel=1e-12, abs=1e-12)


def test_is_nash_methods_agree(fig1):
    rng = np.random.default_rng(5)
    part = partition_into_classes(fig1)
    w = basis_set_covering(5)
    f = marginal_contribution(w, part)
    for _ in range(15):
        g = random_game(part, w, f, rng)
        ne = set(enumerate_pure_ne(g))
        for p in np.ndindex(*[len(a) for a in g.actions]):
            assert is_nash(g, p, "potential") == is_nash(g, p, "utility") == (p in ne)


def test_soundness_small():
    part = partition_into_classes(blind_network(3, 1))
    w = basis_set_covering(3)
    f = marginal_contribution(w, part)
    bound = poa_dual(part, w, f).poa
    rng = np.random.default_rng(0)
    for _ in range(50):
        r = empirical_poa(random_game(part, w, f, rng))
        assert r is None or r >= bound - 1e-6


@pytest.mark.parametrize("n,kappa", [(3, 1), (4, 2)])
def test_tight_instance(n, kappa):
    part = partition_into_classes(blind_network(n, kappa))
    w = basis_power(n, 0.5)
    f = marginal_contribution(w, part)
    res = poa_primal(part, w, f)
    inst = build_tight_instance(part, w, f, res.theta_map())
    assert all(inst.checks.values()), inst.checks
    assert empirical_poa_report(inst.game).ratio == pytest.approx(res.poa, abs=1e-6)
    data = inst.to_json()
    assert data["a_ne"] == [1] * n and data["a_opt"] == [2] * n


def test_tight_rejects_bad_theta():
    part, w = _setcover_pair()
    f = marginal_contribution(w, part)
    theta = poa_primal(part, w, f).theta_map()
    with pytest.raises(OracleError):
        build_tight_instance(part, w, f, {t: 2 * v for t, v in theta.items()})


def test_profile_cap():
    part = partition_into_classes(complete_network(4))
    w = basis_set_covering(4)
    g = GameInstance([1.0], [[{0}] * 10] * 4, part, w, marginal_contribution(w, part))
    with pytest.raises(ProfileCapError):
        enumerate_pure_ne(g, cap=100)


def test_game_json_roundtrip(fig1):
    part = partition_into_classes(fig1)
    w = basis_set_covering(5)
    f = marginal_contribution(w, part)
    g = random_game(part, w, f, np.random.default_rng(9))
    h = game_from_json(game_to_json(g), part, w, f)
    assert np.array_equal(g.values, h.values) and g.actions == h.actions


def test_rejects_bad_games():
    part, w = _setcover_pair()
    f = marginal_contribution(w, part)
    with pytest.raises(OracleError):
        GameInstance([1.0], [[{0}], [{3}]], part, w, f)
    with pytest.raises(OracleError):
        GameInstance([-1.0], [[{0}], [{0}]], part, w, f)
