"""Threshold sweep and per-component budget allocation, driven by scripted
solvers so every branch of the allocation logic is observable."""

import math

import pytest

from ftkcenter.bottleneck import (
    PerTauInfeasible,
    PerTauSolution,
    SweepInfeasible,
    SweepSuccess,
    quick_infeasible,
    solve_components,
    sweep,
)
from ftkcenter.instance import ContractViolation, MetricInstance, ThresholdGraph

from helpers import path_graph


def make_fake_solver(need, record=None):
    """Succeed iff budget >= need(sub); centers are the first `budget`
    local vertices, everyone assigned to local center 0."""

    def solver(sub, budget, caps):
        if record is not None:
            record.append((sub.n, budget))
        if budget < need(sub):
            return PerTauInfeasible(f"budget {budget} too small")
        centers = tuple(range(budget))
        assignment = {u: 0 for u in range(sub.n)}
        return PerTauSolution(centers, assignment, 1, lambda F: dict(assignment))

    return solver


def two_plus_four():
    return ThresholdGraph(6, [(0, 1), (2, 3), (3, 4), (4, 5)])


def test_quick_infeasible_certificates():
    g = path_graph(3)
    assert quick_infeasible(g, 3, [1, 1, 1], 1) == (
        "best 2 surviving capacities cover 2 < 3 clients"
    )
    assert quick_infeasible(g, 3, [1, 1, 1], 2) == (
        "vertex 0 has 2 positive-capacity neighbors, needs alpha+1=3"
    )
    assert quick_infeasible(g, 1, [3, 3, 3], 0) is None
    assert quick_infeasible(g, 1, [0, 1, 0], 0) is not None


def test_sweep_returns_first_success():
    inst = MetricInstance.from_points([(0, 0), (1, 0), (2, 0)], 2, 0, [3, 3, 3])
    assert inst.thresholds_sq() == (0, 1, 4)
    script = {0: "no", 1: "no", 4: "yes"}

    def per_tau(G):
        tau2 = [t for t in inst.thresholds_sq() if inst.threshold_graph(t).edges == G.edges]
        verdict = script[tau2[0]]
        if verdict == "yes":
            return PerTauSolution((0,), {u: 0 for u in range(3)}, 1, lambda F: {})
        return PerTauInfeasible(f"scripted failure at {tau2[0]}")

    out = sweep(inst, per_tau)
    assert isinstance(out, SweepSuccess)
    assert out.tau2_star == 4
    assert out.thresholds_tried == 3
    assert out.radius().mult == 1


def test_sweep_collects_reasons_in_order():
    inst = MetricInstance.from_points([(0, 0), (1, 0), (2, 0)], 2, 0, [3, 3, 3])

    def per_tau(G):
        return PerTauInfeasible(f"fails with {len(G.edges)} edges")

    out = sweep(inst, per_tau)
    assert isinstance(out, SweepInfeasible)
    assert [r for _, r in out.reasons] == [
        "fails with 0 edges",
        "fails with 2 edges",
        "fails with 3 edges",
    ]
    assert out.final_reason == "fails with 3 edges"
    assert [t for t, _ in out.reasons] == [0, 1, 4]


def test_components_minimal_budgets():
    g = two_plus_four()
    solver = make_fake_solver(lambda sub: math.ceil(sub.n / 2))
    out = solve_components(g, 3, 0, [1] * 6, solver)
    assert isinstance(out, PerTauSolution)
    assert out.centers == (0, 2, 3)
    assert out.assignment == {0: 0, 1: 0, 2: 2, 3: 2, 4: 2, 5: 2}


def test_components_surplus_spreads_left_to_right():
    g = two_plus_four()
    solver = make_fake_solver(lambda sub: math.ceil(sub.n / 2))
    out = solve_components(g, 5, 0, [1] * 6, solver)
    assert out.centers == (0, 1, 2, 3, 4)
    out = solve_components(g, 6, 0, [1] * 6, solver)
    assert out.centers == (0, 1, 2, 3, 4, 5)


def test_components_surplus_larger_than_first_component():
    """Three tiny components, k well above the sum of minimal budgets: the
    surplus has to spill across components instead of crowding into one."""
    g = ThresholdGraph(6, [(0, 1), (2, 3), (4, 5)])
    solver = make_fake_solver(lambda sub: 1)
    out = solve_components(g, 5, 0, [1] * 6, solver)
    assert out.centers == (0, 1, 2, 3, 4)


def test_components_budget_sum_exceeds_k():
    g = two_plus_four()
    solver = make_fake_solver(lambda sub: math.ceil(sub.n / 2))
    out = solve_components(g, 2, 0, [1] * 6, solver)
    assert isinstance(out, PerTauInfeasible)
    assert out.reason == "component budgets sum to 3 > k = 2"


def test_components_unsolvable_component():
    g = two_plus_four()
    solver = make_fake_solver(lambda sub: sub.n + 1)  # never enough
    out = solve_components(g, 6, 0, [1] * 6, solver)
    assert isinstance(out, PerTauInfeasible)
    assert "component containing vertex 0" in out.reason


def test_components_budget_monotonicity_guard():
    g = ThresholdGraph(4, [(0, 1), (2, 3)])

    def picky(sub, budget, caps):
        if budget != 1:
            return PerTauInfeasible("only exact budget 1 works")
        return PerTauSolution((0,), {u: 0 for u in range(sub.n)}, 1, lambda F: {})

    with pytest.raises(ContractViolation):
        solve_components(g, 3, 0, [1] * 4, picky)


def test_components_connected_shortcut_and_budget_search():
    g = path_graph(2)
    record = []
    solver = make_fake_solver(lambda sub: 1, record)
    out = solve_components(g, 2, 0, [1, 1], solver)
    assert record == [(2, 2)]  # one call, full k
    assert out.centers == (0, 1)

    record.clear()
    out = solve_components(g, 2, 0, [1, 1], solver, budget_search_when_connected=True)
    assert record[0] == (2, 1)  # search starts at alpha+1
    assert out.centers == (0, 1)


def test_merged_scenario_remaps_and_validates():
    g = two_plus_four()
    solver = make_fake_solver(lambda sub: math.ceil(sub.n / 2))
    out = solve_components(g, 3, 0, [1] * 6, solver)
    phi = out.scenario([2])
    assert phi == {0: 0, 1: 0, 2: 2, 3: 2, 4: 2, 5: 2}
    with pytest.raises(ContractViolation):
        out.scenario([1])  # vertex 1 is not a center
    assert out.detail["components"][0][0] == (0,)
    assert out.detail["components"][1][0] == (2, 3)
