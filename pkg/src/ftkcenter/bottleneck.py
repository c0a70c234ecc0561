"""Threshold sweep and per-component budget allocation.

The sweep walks the sorted distinct distances from below and returns the
first threshold whose unweighted solver succeeds; success is not monotone in
the threshold, so no bisection here.  On a disconnected threshold graph each
component gets its own minimal budget (a component can never borrow service
across components), the leftovers go back to the first component, and the
per-component solutions merge into one.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence

from .instance import ContractViolation, MetricInstance, Radius, ThresholdGraph


@dataclass
class PerTauSolution:
    """A distance-1 style solution of one threshold graph."""

    centers: tuple  # sorted vertex ids, exactly the budget many
    assignment: dict  # initial client -> center map
    stretch: int  # hop bound honored by assignments (7, 6, 10, or beta+6*alpha)
    scenario: Callable  # failure set -> full assignment avoiding it
    detail: dict = field(default_factory=dict)  # per-pipeline artifacts for tests


@dataclass
class PerTauInfeasible:
    reason: str


def quick_infeasible(graph: ThresholdGraph, k: int, caps: Sequence[int], alpha: int):
    """Cheap sound certificates that no distance-1 solution exists.

    Every vertex needs more than alpha positive-capacity vertices in its
    closed neighborhood (an adversary removes alpha), and the k-alpha largest
    capacities must cover all n clients.
    """
    n = graph.n
    for v in range(n):
        good = sum(1 for u in (graph.adj[v] | {v}) if caps[u] > 0)
        if good <= alpha:
            return (
                f"vertex {v} has {good} positive-capacity neighbors, needs alpha+1={alpha + 1}"
            )
    top = sorted(caps, reverse=True)[: max(k - alpha, 0)]
    if sum(top) < n:
        return (
            f"best {k - alpha} surviving capacities cover {sum(top)} < {n} clients"
        )
    return None


def solve_components(
    graph: ThresholdGraph,
    k: int,
    alpha: int,
    caps: Sequence[int],
    solver: Callable,
    budget_search_when_connected: bool = False,
):
    """Run a connected-graph solver per component with minimal budgets.

    `solver(subgraph, budget, caps)` must return PerTauSolution or
    PerTauInfeasible.  Each component must tolerate alpha failures on its
    own, so budgets below alpha+1 are never tried; any surplus goes to the
    first component, where success is guaranteed by budget monotonicity.
    """
    comps = graph.components()
    if len(comps) == 1 and not budget_search_when_connected:
        return solver(graph, k, list(caps))

    picked = []
    total = 0
    for comp in comps:
        sub, orig = graph.induced(comp)
        sub_caps = [caps[v] for v in orig]
        hi = min(k, sub.n)
        found = None
        for budget in range(alpha + 1, hi + 1):
            out = solver(sub, budget, sub_caps)
            if isinstance(out, PerTauSolution):
                found = (budget, out)
                break
        if found is None:
            return PerTauInfeasible(
                f"component containing vertex {comp[0]}: no distance-1 solution with budget <= {hi}"
            )
        picked.append([comp, orig, found[0], found[1]])
        total += found[0]
    if total > k:
        return PerTauInfeasible(
            f"component budgets sum to {total} > k = {k}"
        )
    surplus = k - total
    for entry in picked:
        if surplus == 0:
            break
        comp, orig, budget, _ = entry
        sub, orig = graph.induced(comp)
        extra = min(surplus, sub.n - budget)  # a component holds at most n centers
        if extra == 0:
            continue
        sub_caps = [caps[v] for v in orig]
        out = solver(sub, budget + extra, sub_caps)
        if not isinstance(out, PerTauSolution):
            raise ContractViolation(
                "solver succeeded at a budget but failed at a larger one"
            )
        entry[2] = budget + extra
        entry[3] = out
        surplus -= extra
    if surplus:
        raise ContractViolation("surplus centers exceed the total vertex count")
    return _merge(picked)


def _merge(picked):
    centers = []
    assignment = {}
    stretch = 0
    parts = []
    for comp, orig, budget, sol in picked:
        to_global = dict(enumerate(orig))
        centers.extend(to_global[c] for c in sol.centers)
        assignment.update(
            (to_global[u], to_global[c]) for u, c in sol.assignment.items()
        )
        stretch = max(stretch, sol.stretch)
        parts.append((set(to_global[c] for c in sol.centers), to_global, sol))

    def scenario(F):
        F = set(F)
        all_centers = set().union(*(c for c, _, _ in parts))
        unknown = F - all_centers
        if unknown:
            raise ContractViolation(f"failed vertices {sorted(unknown)} are not centers")
        out = {}
        for cset, to_global, sol in parts:
            local_F = [
                local for local, glob in to_global.items() if glob in F
            ]
            phi = sol.scenario(local_F)
            out.update((to_global[u], to_global[c]) for u, c in phi.items())
        return out

    detail = {"components": [(tuple(sorted(c)), s.detail) for c, _, s in parts]}
    return PerTauSolution(tuple(sorted(centers)), assignment, stretch, scenario, detail)


@dataclass
class SweepSuccess:
    tau2_star: Fraction
    solution: PerTauSolution
    thresholds_tried: int

    def radius(self) -> Radius:
        return Radius(self.solution.stretch, self.tau2_star)


@dataclass
class SweepInfeasible:
    """Every threshold failed; the instance is infeasible outright."""

    reasons: list  # (tau2, reason) per threshold, in sweep order

    @property
    def final_reason(self) -> str:
        return self.reasons[-1][1]


def sweep(inst: MetricInstance, per_tau_solver: Callable):
    """First threshold (in increasing order) whose solver succeeds.

    The winning threshold is a lower bound on the optimal radius: the solver
    only succeeds when a distance-1-style solution of the threshold graph
    exists, and it certifies infeasibility otherwise.
    """
    reasons = []
    for tau2 in inst.thresholds_sq():
        G = inst.threshold_graph(tau2)
        out = per_tau_solver(G)
        if isinstance(out, PerTauSolution):
            return SweepSuccess(tau2, out, len(reasons) + 1)
        reasons.append((tau2, out.reason))
    return SweepInfeasible(reasons)
