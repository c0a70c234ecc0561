"""LP layer: exact phase-1 simplex, the static row systems, min-cut
separation against exhaustive enumeration, and the cutting-plane loop."""

import random
from fractions import Fraction

import pytest

from ftkcenter.clustering import (
    backup_union,
    build_gprime,
    monarch_clustering,
    select_backups,
)
from ftkcenter.instance import ContractViolation, InstanceError
from ftkcenter.lp import (
    LinearProgram,
    Row,
    feasible_point,
    lp_general_static,
    lp_uniform_static,
    separate_general,
    separate_uniform,
    solve_cutting_plane,
)
from ftkcenter.oracle import random_connected_graph

from helpers import (
    brute_separate_general,
    brute_separate_uniform,
    cycle_graph,
    path_graph,
)


def satisfies(rows, x):
    for row in rows:
        lhs = sum((c * x[v] for v, c in row.coeffs), Fraction(0))
        if row.rel == "==" and lhs != row.rhs:
            return False
        if row.rel == "<=" and lhs > row.rhs:
            return False
        if row.rel == ">=" and lhs < row.rhs:
            return False
    return True


def test_row_make_normalizes():
    row = Row.make({2: 1, 0: Fraction(1, 2), 1: 0}, ">=", 3)
    assert row.coeffs == ((0, Fraction(1, 2)), (2, Fraction(1)))
    assert row.rhs == Fraction(3)
    with pytest.raises(InstanceError):
        Row.make({0: 1}, "=", 1)


def test_feasible_point_exact_third():
    lp = LinearProgram(1)
    lp.add({0: 3}, "==", 1)
    x = feasible_point(lp)
    assert x == {0: Fraction(1, 3)}


def test_feasible_point_small_systems():
    lp = LinearProgram(2)
    lp.add({0: 1, 1: 1}, "==", 1)
    lp.add({0: 1, 1: -1}, "==", 0)
    x = feasible_point(lp)
    assert x == {0: Fraction(1, 2), 1: Fraction(1, 2)}

    lp = LinearProgram(1)
    lp.add({0: 1}, "<=", 1)
    lp.add({0: 1}, ">=", 2)
    assert feasible_point(lp) is None

    # negative rhs is normalized, and variables stay >= 0
    lp = LinearProgram(1)
    lp.add({0: -1}, "==", -3)
    assert feasible_point(lp) == {0: Fraction(3)}
    lp = LinearProgram(1)
    lp.add({0: 1}, ">=", -5)
    assert feasible_point(lp) == {0: Fraction(0)}


def test_feasible_point_rejects_out_of_range_variable():
    lp = LinearProgram(1)
    lp.add({1: 1}, "==", 1)
    with pytest.raises(InstanceError):
        feasible_point(lp)


def test_feasible_point_satisfies_random_systems():
    rng = random.Random(11)
    feasible_seen = infeasible_seen = 0
    for _ in range(60):
        nvars = rng.randint(1, 4)
        lp = LinearProgram(nvars)
        for _ in range(rng.randint(1, 5)):
            coeffs = {
                v: rng.randint(-3, 3)
                for v in range(nvars)
                if rng.random() < 0.8
            }
            lp.add(coeffs, rng.choice(["<=", ">=", "=="]), rng.randint(-4, 4))
        x = feasible_point(lp)
        if x is None:
            infeasible_seen += 1
            continue
        feasible_seen += 1
        assert all(v >= 0 for v in x.values())
        assert satisfies(lp.rows, x)
    assert feasible_seen and infeasible_seen


def test_general_static_c6_pinned_backups_overrun_k():
    """Two clusters each pin a backup and still demand coverage, which cannot
    fit in k=2; dropping the backups (alpha=0) makes the same system feasible."""
    g = cycle_graph(6)
    cl = monarch_clustering(g)
    caps = [1] * 6
    backups, _ = select_backups(cl, caps, 1)
    lp = lp_general_static(g, 2, caps, cl, backup_union(backups))
    assert feasible_point(lp) is None

    lp0 = lp_general_static(g, 2, caps, cl, frozenset())
    x = feasible_point(lp0)
    assert x is not None and satisfies(lp0.rows, x)


def test_uniform_static_rows():
    g = path_graph(3)
    lp = lp_uniform_static(g, 1, [1, 1, 1])
    x = feasible_point(lp)
    assert x is not None and satisfies(lp.rows, x)
    with pytest.raises(InstanceError):
        lp_uniform_static(g, 1, [2, 1, 1])
    # zero-capacity vertices cannot cover anyone
    lp = lp_uniform_static(g, 1, [0, 1, 0])
    x = feasible_point(lp)
    assert x is not None and x[1] == 1


def test_separate_uniform_frozen_path3():
    g = path_graph(3)
    y = {0: Fraction(0), 1: Fraction(1), 2: Fraction(0)}
    sep = separate_uniform(y, g, [1, 1, 1], 0)
    assert sep.value == Fraction(-2)
    assert sep.threshold == 0
    assert sep.violated
    assert sep.witness_U == (0, 1, 2)
    assert sep.row == Row.make({0: 1, 1: 1, 2: 1}, ">=", 3)


def test_separate_uniform_matches_brute():
    rng = random.Random(23)
    checked = violated = 0
    for _ in range(40):
        n = rng.randint(1, 6)
        g = random_connected_graph(rng, n, rng.randint(0, 3))
        L = rng.randint(1, 3)
        caps = [L if rng.random() < 0.8 else 0 for _ in range(n)]
        if not any(caps):
            caps[0] = L
        alpha = rng.randint(0, 1)
        y = {u: Fraction(rng.randint(0, 4), 4) for u in range(n)}
        sep = separate_uniform(y, g, caps, alpha)
        best = brute_separate_uniform(y, g, caps, alpha)
        assert sep.value == best
        assert sep.violated == (best < alpha * L)
        checked += 1
        if sep.violated:
            violated += 1
            lhs = sum(c * y[v] for v, c in sep.row.coeffs)
            assert lhs < sep.row.rhs
    assert checked == 40 and violated >= 5


def test_separate_general_matches_brute():
    rng = random.Random(37)
    checked = violated = 0
    while checked < 40:
        n = rng.randint(2, 6)
        g = random_connected_graph(rng, n, rng.randint(0, 3))
        caps = [rng.randint(0, 3) for _ in range(n)]
        alpha = rng.randint(0, 2)
        cl = monarch_clustering(g)
        backups, reason = select_backups(cl, caps, alpha)
        if reason is not None:
            continue
        bset = backup_union(backups)
        if len(bset) < alpha:
            continue
        gp = build_gprime(g, cl, backups)
        y = {u: Fraction(rng.randint(0, 4), 4) for u in range(n)}
        sep = separate_general(y, g, gp, bset, alpha, caps)
        best = brute_separate_general(y, g, gp, bset, alpha, caps)
        assert sep.value == best
        assert sep.violated == (best < 0)
        if sep.violated:
            violated += 1
            lhs = sum(c * y[v] for v, c in sep.row.coeffs)
            assert lhs < sep.row.rhs
            assert set(sep.witness_F) <= bset
        checked += 1
    assert violated >= 5


def test_separate_general_no_scenarios_is_clean():
    g = path_graph(2)
    cl = monarch_clustering(g)
    sep = separate_general({0: Fraction(1), 1: Fraction(0)}, g, build_gprime(g, cl, {}), frozenset(), 1, [1, 1])
    assert not sep.violated and sep.row is None


def test_cutting_plane_uniform_path5():
    """With capacity 2 and one failure, k=4 is feasible on the path but the
    static point needs a Hall cut first.  With unit capacities the full
    vertex set is a witness against every k <= n: a failure leaves k-1
    surviving units for 5 clients."""
    g = path_graph(5)
    caps = [2] * 5

    def separator(y):
        return separate_uniform(y, g, caps, 1)

    y, cuts = solve_cutting_plane(lp_uniform_static(g, 4, caps), separator)
    assert y is not None
    assert len(cuts) >= 1
    assert all(c.violated for c in cuts)
    assert not separate_uniform(y, g, caps, 1).violated
    assert sum(y.values()) == 4

    unit = [1] * 5
    y2, cuts2 = solve_cutting_plane(
        lp_uniform_static(g, 4, unit), lambda y: separate_uniform(y, g, unit, 1)
    )
    assert y2 is None
    assert len(cuts2) >= 1


def test_cutting_plane_round_cap():
    g = path_graph(5)
    caps = [2] * 5
    with pytest.raises(ContractViolation):
        solve_cutting_plane(
            lp_uniform_static(g, 4, caps),
            lambda y: separate_uniform(y, g, caps, 1),
            max_rounds=0,
        )


def test_cutting_plane_clean_separator_returns_first_point():
    lp = LinearProgram(1)
    lp.add({0: 1}, "==", 1)
    y, cuts = solve_cutting_plane(lp, lambda y: None)
    assert y == {0: Fraction(1)} and cuts == []
