"""Acceptance gate: one marked test per criterion, summarised at the end of the run."""

import math
from fractions import Fraction

import numpy as np
import pytest

from dirichlet_yang import cli, sweep
from dirichlet_yang import inequalities as ineq
from dirichlet_yang.cayley import (box, build_ball, busemann, ground_state_eigenvalue, lambda_min,
                                   parse_group, tree_ground_state)
from dirichlet_yang.eigensolve import dirichlet_matrix, dirichlet_system
from dirichlet_yang.network import dirichlet_energy, gamma2, inner_product, laplacian_apply, lambda_functional
from dirichlet_yang.randomnet import random_network, random_test_function

SLACK = -1e-9


def charpoly_roots(m):
    """Roots of det(xI - M) with coefficients from exact Faddeev-LeVerrier arithmetic."""
    n = len(m)
    a = [[Fraction(v).limit_denominator(10**12) for v in row] for row in m]
    coeffs = [Fraction(1)]
    mk = [[Fraction(0)] * n for _ in range(n)]
    for k in range(1, n + 1):
        # M_k = A M_{k-1} + c_{k-1} I ; c_k = -tr(A M_k) / k
        mk = [[sum(a[i][t] * mk[t][j] for t in range(n)) + (coeffs[-1] if i == j else 0)
               for j in range(n)] for i in range(n)]
        am = [[sum(a[i][t] * mk[t][j] for t in range(n)) for j in range(n)] for i in range(n)]
        coeffs.append(-sum(am[i][i] for i in range(n)) / k)
    return np.sort(np.roots([float(c) for c in coeffs]).real)


@pytest.mark.criterion(1, "closed-form spectra (Z intervals, T3 radius-1 ball)")
def test_criterion_01_closed_form_spectra(zn1_intervals):
    for m, inst in zn1_intervals.items():
        expected = 1.0 - np.cos(np.arange(1, m + 1) * np.pi / (m + 1))
        assert np.max(np.abs(inst.system.eigenvalues - expected)) <= 1e-10, m
        if m <= 5:
            oracle = charpoly_roots(dirichlet_matrix(inst.net))
            assert np.max(np.abs(inst.system.eigenvalues - oracle)) <= 1e-10, m

    ball = build_ball(parse_group("tree:3"), 1)
    lam = dirichlet_system(ball.host).eigenvalues
    # radial part: f(o) = A, f(leaf) = B gives [[1, -1], [-1/3, 1]]; the rest has eigenvalue 1
    tr, det = 2.0, 1.0 - 1.0 / 3.0
    disc = math.sqrt(tr * tr / 4 - det)
    radial = [tr / 2 - disc, tr / 2 + disc]
    expected = np.sort([*radial, 1.0, 1.0])
    assert np.max(np.abs(lam - expected)) <= 1e-10
    assert np.max(np.abs(lam - [1 - 1 / math.sqrt(3), 1, 1, 1 + 1 / math.sqrt(3)])) <= 1e-10


@pytest.mark.criterion(2, "identities A, B, C on 200 random networks")
def test_criterion_02_identities():
    worst = 0.0
    for seed in range(200):
        net = random_network(6 + seed % 7, seed)
        rng = np.random.default_rng(10_000 + seed)
        f = net.extend(rng.uniform(-1, 1, net.n_interior))
        g = net.extend(rng.uniform(-1, 1, net.n_interior))
        lap_f = net.extend(laplacian_apply(net, f))
        a = abs(dirichlet_energy(net, f, g) - 2 * inner_product(net, lap_f, g))
        g2 = net.extend(gamma2(net, f, g))
        b = abs(inner_product(net, g2, g) - inner_product(net, lap_f, g * g))
        c = abs(inner_product(net, g2, f * g)
                - (0.25 * dirichlet_energy(net, f * f, g * g) + lambda_functional(net, f, g)))
        worst = max(worst, a, b, c)
    assert worst <= 1e-12


@pytest.mark.criterion(3, "main bound unconditional and proof-identity audit")
def test_criterion_03_main_bound_random():
    for seed in range(200):
        net = random_network(6 + seed % 7, seed)
        system = dirichlet_system(net)
        for m in (1, 3):
            alpha = random_test_function(net, m, seed)
            terms = ineq.main_bound_terms(net, system, alpha)
            for k in range(1, system.interior_size):
                r = ineq.main_bound(net, system, alpha, k, terms)
                assert r.slack >= SLACK, (seed, m, k, r)
                audit = ineq.proof_identities_audit(net, system, alpha, k)
                assert audit.passed, (seed, m, k, audit.failures(), audit.errors)


@pytest.mark.criterion(3, "main bound unconditional and proof-identity audit")
def test_criterion_03_main_bound_structured(structured_instances):
    for inst in structured_instances:
        reports = sweep.run_checks(inst, ["main-bound"])
        assert all(r.slack >= SLACK for r in reports), inst.instance_id
        for row in sweep.audit_rows(inst):
            assert row[-1], (inst.instance_id, row)


@pytest.mark.criterion(4, "Yang-type inequality on trees, C_YT = 8 sqrt(d-1)/d")
def test_criterion_04_tree_yang_type(tree_instances):
    for (d, r), inst in tree_instances.items():
        assert inst.system.lambda_min == 1 - 2 * math.sqrt(d - 1) / d
        assert inst.constants["C_YT"] == 8 * math.sqrt(d - 1) / d
        for k in range(1, inst.n):
            rep = ineq.yang_type_check(inst.system, inst.constants["C_YT"], k)
            assert rep.slack >= SLACK, (d, r, k, rep)
    sizes = {key: inst.n for key, inst in tree_instances.items()}
    assert [sizes[(d, 4)] for d in (3, 4, 5)] == [46, 161, 426]


@pytest.mark.criterion(5, "abelian-quotient bound, constant 8 max mu = 4/n for uniform measures")
def test_criterion_05_abelian_quotient(abelian_instances):
    assert len(abelian_instances) == 11 + 5 + 20 + 3
    for inst in abelian_instances:
        spec = inst.ball.spec
        n = 2 if spec.family == "heisenberg" else spec.rank
        assert inst.constants["epsilon"] == 0.0
        assert 8 * inst.constants["mu_max"] == 4 / n == inst.constants["C_YT"]
        for k in range(1, inst.n):
            rep = ineq.abelian_quotient_check(inst.system, inst.constants["epsilon"],
                                              inst.constants["mu_max"], k)
            assert rep.slack >= SLACK, (inst.instance_id, k, rep)


@pytest.mark.criterion(6, "Yang inequality on Z intervals, C_Y = 6 / mu_*")
def test_criterion_06_yang(zn1_intervals, zn1_pm2_intervals):
    for family, expected_c in ((zn1_intervals, 12.0), (zn1_pm2_intervals, 24.0)):
        for m, inst in family.items():
            assert inst.constants["C_Y"] == expected_c
            for k in range(1, inst.n):
                rep = ineq.yang_check(inst.system, expected_c, k)
                assert rep.slack >= SLACK, (inst.instance_id, k, rep)


@pytest.mark.criterion(7, "tree test functions: Busemann and ground state")
def test_criterion_07_tree_test_functions():
    grid = np.round(np.linspace(0.25, 4.0, 61), 10)
    assert 1.0 in grid
    for d in (3, 4, 5):
        for r in (1, 2, 3):
            ball = build_ball(parse_group(f"tree:{d}"), r)
            net = ball.host
            b = busemann(ball).values[:, 0]
            assert np.max(np.abs(laplacian_apply(net, b) + (d - 2) / d)) <= 1e-14
            assert np.max(np.abs(gamma2(net, b) - 1.0)) <= 1e-14
            s, t = net.src, net.dst
            touching = (net.interior_mask[s] | net.interior_mask[t]) & (s != t)
            assert np.all(np.abs(b[s[touching]] - b[t[touching]]) == 1.0)

            def ratio(xi):
                f = tree_ground_state(ball, xi)
                q = laplacian_apply(net, f) / f[net.interior]
                return q

            for xi in (0.5, 1.0, 2.0):
                q = ratio(xi)
                assert np.max(np.abs(q - ground_state_eigenvalue(d, xi))) <= 1e-12
                assert np.ptp(q) <= 1e-12
            values = np.array([ratio(xi).mean() for xi in grid])
            # xi + 1/xi is smallest at xi = 1, where the eigenvalue reaches lambda_min
            assert grid[np.argmin(grid + 1 / grid)] == 1.0
            assert grid[np.argmax(values)] == 1.0
            assert abs(values.max() - lambda_min(ball.spec)) <= 1e-12


@pytest.mark.criterion(8, "corollary cascade on structured instances")
def test_criterion_08_cascade(structured_instances):
    names = ["trace", "lambda2", "yang-second", "hile-protter", "ppw", "ratio"]
    for inst in structured_instances:
        reports = sweep.run_checks(inst, names)
        bad = [r for r in reports if r.hypothesis_ok and not r.passed]
        assert not bad, (inst.instance_id, bad[:3])
        assert any(r.name == "trace" and r.passed for r in reports)

        theta = inst.constants.get("C_Y", inst.constants["C_YT"])
        mu = inst.system.eigenvalues - inst.system.lambda_min
        states = ineq.recursion_check(mu, theta)
        ks = np.arange(1, mu.size + 1)
        A = np.cumsum(mu) / ks
        B = np.cumsum(mu * mu) / ks
        F = (1 + theta / 2) * A * A - B
        assert np.allclose([s.F for s in states], F, rtol=1e-12, atol=0)
        for s in states[:-1]:
            k = s.k
            hyp = np.sum((mu[k] - mu[:k]) ** 2) <= theta * np.sum(mu[:k] * (mu[k] - mu[:k]))
            assert s.hypothesis_ok == hyp
            if hyp:
                bound = ((k + 1) / k) ** theta * F[k - 1]
                assert F[k] <= bound + 1e-12 * max(abs(F[k]), abs(bound)), (inst.instance_id, k)
                assert s.step_ok


@pytest.mark.criterion(9, "Yang-type with C_YT implies Yang with C_YT + 2 when lambda_min = 0")
def test_criterion_09_implication(abelian_instances, zn1_pm2_intervals):
    seen = 0
    for inst in [*abelian_instances, *zn1_pm2_intervals.values()]:
        assert inst.system.lambda_min == 0.0
        C = inst.constants["C_YT"]
        for k in range(1, inst.n):
            premise = ineq.yang_type_check(inst.system, C, k)
            conclusion = ineq.yang_check(inst.system, C + 2.0, k)
            if premise.passed:
                seen += 1
                assert conclusion.slack >= SLACK, (inst.instance_id, k)
            assert ineq.implication_check(inst.system, C, k).passed
    assert seen > 0


@pytest.mark.criterion(10, "byte-identical reports for identical configs")
def test_criterion_10_determinism(tmp_path):
    configs = [
        ["verify", "--random", "--vertices", "9", "--seed", "11", "--alpha", "random:3"],
        ["verify", "--group", "heisenberg", "--radius", "2"],
        ["bounds", "--group", "tree:3", "--radius", "3"],
        ["audit", "--group", "zn:2", "--interior", "box:4"],
    ]
    for t, args in enumerate(configs):
        outs = []
        for rep in range(2):
            path = tmp_path / f"run{t}-{rep}.csv"
            assert cli.main([*args, "--out", str(path)]) == 0
            outs.append(path.read_bytes())
        assert outs[0] == outs[1] and outs[0]
