"""Acceptance criteria, one test per criterion.

A summary line per criterion is printed at the end of the pytest run.
"""

import math
import time

import numpy as np
import pytest

from netpoa.experiments import POA_TOL, rows_to_csv, sweep_robustness
from netpoa.mechanisms import basis_power, basis_set_covering, from_values, marginal_contribution
from netpoa.network import (
    blind_network,
    complete_network,
    isolated_network,
    partition_into_classes,
    validate_network,
)
from netpoa.oracle import (
    RandomGameSpec,
    build_tight_instance,
    deviate,
    empirical_poa,
    empirical_poa_report,
    is_nash,
    potential_G,
    random_game,
    utility,
    welfare,
)
from netpoa.poa import (
    cross_check_blind_vs_general,
    general_mechanism,
    optimize_blind,
    poa_blind,
    poa_dual,
    poa_primal,
)

FIG1_OBS = [{0, 1, 2, 3, 4}, {0, 1, 2, 4}, {0, 1, 2, 4}, {0, 3}, {0, 1, 2, 3, 4}]


def blind_formula(n, kappa):
    return max(1 / (1 + kappa), 1 / n)


def _networks():
    return {
        "complete3": complete_network(3),
        "complete4": complete_network(4),
        "complete6": complete_network(6),
        "blind4k1": blind_network(4, 1),
        "blind5k2": blind_network(5, 2),
        "blind5k5": blind_network(5, 5),
        "isolated4k3": isolated_network(4, 3),
        "isolated5k2": isolated_network(5, 2),
        "fig1": validate_network(FIG1_OBS),
    }


def _random_mechanism(part, seed):
    rng = np.random.default_rng(seed)
    return from_values([rng.uniform(0.05, 2.0, size=part.n_observed(j)) for j in range(part.k)])


def battery():
    """(label, partition, basis, mechanism): 9 networks x 2 bases x 2 mechanisms."""
    cases = []
    for seed, (name, net) in enumerate(_networks().items()):
        part = partition_into_classes(net)
        for bname, w in (("setcover", basis_set_covering(net.n)), ("power0.5", basis_power(net.n, 0.5))):
            cases.append((f"{name}/{bname}/mc", part, w, marginal_contribution(w, part)))
            cases.append((f"{name}/{bname}/random", part, w, _random_mechanism(part, 100 + seed)))
    return cases


def test_criterion_1_blind_formula():
    for n in (3, 8, 15):
        w = basis_set_covering(n)
        mc = np.diff(w.values)
        for kappa in range(1, n + 1):
            got = poa_blind(n, kappa, w, mc[0], mc).poa
            assert abs(got - blind_formula(n, kappa)) <= 1e-6, (n, kappa, got)


def test_criterion_2_mc_optimal_under_blindness():
    n = 15
    w = basis_set_covering(n)
    mc = np.diff(w.values)
    start = time.perf_counter()
    for kappa in range(1, n + 1):
        opt = optimize_blind(n, kappa, w).poa_opt
        assert abs(opt - blind_formula(n, kappa)) <= 1e-6, (kappa, opt)
    opt0 = optimize_blind(n, 0, w).poa_opt
    mc0 = poa_blind(n, 0, w, mc[0], mc).poa
    assert opt0 > mc0 + 0.05
    assert time.perf_counter() - start < 60


@pytest.mark.parametrize("case", battery(), ids=lambda c: c[0])
def test_criterion_3_strong_duality(case):
    _, part, w, f = case
    W = poa_primal(part, w, f).lp_value
    V = poa_dual(part, w, f).lp_value
    assert abs(W - V) <= 1e-6 * max(1.0, V)


@pytest.mark.parametrize("case", battery(), ids=lambda c: c[0])
def test_criterion_4_reduced_set_equivalence(case):
    _, part, w, f = case
    full = poa_dual(part, w, f, reduced=False).lp_value
    red = poa_dual(part, w, f, reduced=True).lp_value
    assert abs(full - red) <= 1e-6


def _soundness_configs():
    out = []
    for name, net in (
        ("complete3", complete_network(3)),
        ("complete4", complete_network(4)),
        ("blind4k2", blind_network(4, 2)),
        ("isolated3k1", isolated_network(3, 1)),
        ("chain4", validate_network([{0, 1}, {1, 2}, {2, 3}, {3, 0}])),
    ):
        part = partition_into_classes(net)
        for bname, w in (("setcover", basis_set_covering(net.n)), ("power0.5", basis_power(net.n, 0.5))):
            out.append((f"{name}/{bname}/mc", part, w, marginal_contribution(w, part)))
        w = basis_power(net.n, 0.5)
        out.append((f"{name}/power0.5/random", part, w, _random_mechanism(part, 7)))
    return out


def test_criterion_5_oracle_soundness():
    spec = RandomGameSpec(max_resources=4, max_actions=3)
    for seed, (name, part, w, f) in enumerate(_soundness_configs()):
        assert part.n <= 4
        bound = poa_dual(part, w, f).poa
        rng = np.random.default_rng(seed)
        no_ne = 0
        for _ in range(200):
            g = random_game(part, w, f, rng, spec)
            assert g.n_resources <= 4
            r = empirical_poa(g)
            if r is None:
                no_ne += 1
                continue
            assert r >= bound - 1e-6, (name, r, bound)
        print(f"{name}: lp poa {bound:.6f}, games without pure NE {no_ne}/200")


def _tight_configs():
    out = []
    nets = [
        complete_network(2),
        complete_network(3),
        complete_network(4),
        blind_network(3, 1),
        blind_network(4, 2),
        isolated_network(3, 1),
        isolated_network(4, 2),
        validate_network(FIG1_OBS),
    ]
    for net in nets:
        part = partition_into_classes(net)
        w = basis_power(net.n, 0.5)
        out.append((part, w, marginal_contribution(w, part)))
    for net in nets[1:5]:
        part = partition_into_classes(net)
        w = basis_set_covering(net.n)
        out.append((part, w, _random_mechanism(part, 11)))
    return out


def test_criterion_6_tight_instances():
    configs = _tight_configs()
    assert len(configs) >= 10
    for part, w, f in configs:
        res = poa_primal(part, w, f)
        inst = build_tight_instance(part, w, f, res.theta_map())
        assert all(inst.checks.values()), inst.checks
        assert is_nash(inst.game, inst.a_ne)
        assert abs(welfare(inst.game, inst.a_ne) - 1.0) <= 1e-6
        rep = empirical_poa_report(inst.game)
        assert abs(rep.ratio - 1.0 / res.lp_value) <= 1e-6, (part, rep.ratio, res.poa)


def test_criterion_7_potential_identity():
    rng = np.random.default_rng(2024)
    configs = _soundness_configs() + [
        ("fig1", partition_into_classes(validate_network(FIG1_OBS)), basis_power(5, 0.5), None)
    ]
    checked = 0
    for trial in range(100):
        name, part, w, f = configs[trial % len(configs)]
        if f is None:
            f = marginal_contribution(w, part)
        g = random_game(part, w, f, rng)
        p = tuple(int(rng.integers(len(a))) for a in g.actions)
        for i in range(g.n):
            j = g.owner[i]
            for a in range(len(g.actions[i])):
                q = deviate(p, i, a)
                du = utility(g, i, q) - utility(g, i, p)
                dg = potential_G(g, j, q) - potential_G(g, j, p)
                # both sides are sums of at most a few terms of order one
                assert math.isclose(dg, du, rel_tol=1e-12, abs_tol=1e-14), (name, dg, du)
                checked += 1
    assert checked > 0


@pytest.mark.parametrize("isolated", [False, True], ids=["blind", "isolated"])
def test_criterion_8_two_path_agreement(isolated):
    for n in range(1, 16):
        w = basis_power(n, 0.5)
        mc = np.diff(w.values)
        for kappa in sorted({k for k in (0, 1, 5, n) if k <= n}):
            cc = cross_check_blind_vs_general(n, kappa, w, mc, isolated=isolated, tol=2e-6)
            assert cc.agree, (n, kappa, cc.difference)


def test_criterion_9_robustness():
    n = 15
    w = basis_power(n, 0.5)
    start = time.perf_counter()
    for mode in ("blind", "isolated"):
        rows = sweep_robustness(n, w, mode)
        assert [r.kappa for r in rows] == list(range(n + 1))
        for r in rows:
            assert r.poa_fstar <= r.poa_opt + POA_TOL, (mode, r)
        assert abs(rows[0].poa_fstar - rows[0].poa_opt) <= POA_TOL
        csv = rows_to_csv(rows)
        assert csv.splitlines()[0].endswith(",gap")
        print(f"{mode} gap column: " + " ".join(f"{r.gap:.4f}" for r in rows))
    assert time.perf_counter() - start < 300


def test_criterion_10_scale_invariance():
    for _, part, w, f in battery():
        base = poa_dual(part, w, f).poa
        for alpha in (0.5, 2.0, 10.0):
            assert abs(poa_dual(part, w, f.scaled(alpha)).poa - base) <= 1e-6
    for n, kappa in ((4, 2), (8, 3), (15, 5)):
        w = basis_power(n, 0.5)
        mc = np.diff(w.values)
        ref = poa_blind(n, kappa, w, 1.0, mc).poa
        for f1 in (1e-3, 0.5, 3.0, 250.0):
            assert poa_blind(n, kappa, w, f1, mc).poa == ref
    # the same holds on the similarity partition, where f_bl(1) enters the tables
    n, kappa = 6, 2
    w = basis_power(n, 0.5)
    part = partition_into_classes(blind_network(n, kappa))
    ref = poa_dual(part, w, general_mechanism(part, 1.0, np.diff(w.values))).poa
    for f1 in (0.1, 4.0):
        assert abs(poa_dual(part, w, general_mechanism(part, f1, np.diff(w.values))).poa - ref) <= 1e-6
