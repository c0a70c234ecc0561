"""End-to-end fault-tolerant solvers built on the threshold sweep.

Two pipelines: the general-capacity one (clustered LP with scenario cuts,
distance-8 transfer rounding, ten-hop scenario assignments) and the
uniform-capacity one for {0,L} instances (direct LP with scenario-free
rows plus Hall cuts, distance-5 transfer, six-hop assignments for any
number of failures below k).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import partial
from typing import Callable

from .bottleneck import (
    PerTauInfeasible,
    PerTauSolution,
    SweepInfeasible,
    SweepSuccess,
    quick_infeasible,
    solve_components,
    sweep,
)
from .clustering import backup_union, build_gprime, monarch_clustering, select_backups
from .instance import (
    InstanceError,
    MetricInstance,
    Radius,
    ThresholdGraph,
    strip_zero_zero_edges,
    uniform_capacity_level,
)
from .lp import (
    lp_general_static,
    lp_uniform_static,
    separate_general,
    separate_uniform,
    solve_cutting_plane,
)
from .rounding import (
    GeneralRounding,
    assign_scenario_general,
    assign_scenario_uniform,
    round_general,
    round_uniform,
)

DEFAULT_ALPHA_BOUND = 3


def ft_general_connected(graph: ThresholdGraph, k: int, caps, alpha: int):
    """Distance-1 solver for connected graphs with arbitrary capacities."""
    why = quick_infeasible(graph, k, caps, alpha)
    if why:
        return PerTauInfeasible(why)
    cl = monarch_clustering(graph)
    backups, why = select_backups(cl, caps, alpha)
    if backups is None:
        return PerTauInfeasible(why)
    bset = backup_union(backups)
    if len(bset) > k:
        return PerTauInfeasible(
            f"{len(bset)} pinned backups exceed the budget {k}"
        )
    gp = build_gprime(graph, cl, backups)
    lp = lp_general_static(graph, k, caps, cl, bset)
    y, cuts = solve_cutting_plane(
        lp, partial(separate_general, graph=graph, gprime=gp, backup_set=bset, alpha=alpha, capacities=caps)
    )
    if y is None:
        return PerTauInfeasible(
            "LP with scenario cuts is infeasible: no distance-1 solution"
        )
    rr = round_general(y, graph, cl, backups, caps)
    state = GeneralRounding(graph, list(caps), cl, backups, gp, rr, alpha)
    phi0 = assign_scenario_general(state, frozenset())
    detail = {
        "kind": "general",
        "y": y,
        "rounding": rr,
        "state": state,
        "clustering": cl,
        "backups": backups,
        "cuts": len(cuts),
    }
    return PerTauSolution(
        tuple(rr.R),
        phi0,
        10,
        lambda F: assign_scenario_general(state, F),
        detail,
    )


def ft_uniform_connected(graph: ThresholdGraph, k: int, caps, alpha: int):
    """Distance-1 solver for connected {0,L} graphs (0-0 edges pre-stripped)."""
    why = quick_infeasible(graph, k, caps, alpha)
    if why:
        return PerTauInfeasible(why)
    lp = lp_uniform_static(graph, k, caps)
    y, cuts = solve_cutting_plane(
        lp, partial(separate_uniform, graph=graph, capacities=caps, alpha=alpha)
    )
    if y is None:
        return PerTauInfeasible(
            "uniform LP with Hall cuts is infeasible: no distance-1 solution"
        )
    R = round_uniform(y, graph, k, caps)
    phi0 = assign_scenario_uniform(graph, R, caps, frozenset(), alpha)
    detail = {"kind": "uniform", "y": y, "R": R, "cuts": len(cuts)}
    return PerTauSolution(
        R,
        phi0,
        6,
        lambda F: assign_scenario_uniform(graph, R, caps, F, alpha),
        detail,
    )


@dataclass
class SolveResult:
    algorithm: str
    instance: MetricInstance
    outcome: object  # SweepSuccess | SweepInfeasible

    @property
    def feasible(self) -> bool:
        return isinstance(self.outcome, SweepSuccess)

    @property
    def tau2_star(self):
        return self.outcome.tau2_star if self.feasible else None

    @property
    def centers(self):
        return self.outcome.solution.centers if self.feasible else None

    @property
    def assignment(self):
        return self.outcome.solution.assignment if self.feasible else None

    @property
    def stretch(self):
        return self.outcome.solution.stretch if self.feasible else None

    def radius(self) -> Radius:
        if not self.feasible:
            raise InstanceError("no radius: instance certified infeasible")
        return self.outcome.radius()

    def scenario(self, F):
        if not self.feasible:
            raise InstanceError("no solution to fail centers in")
        return self.outcome.solution.scenario(F)


def _require_variant(inst: MetricInstance, variant: str, algorithm: str):
    if inst.variant != variant:
        raise InstanceError(
            f"{algorithm} solves the {variant!r} variant, instance is {inst.variant!r}"
        )


def solve_ft_general(
    inst: MetricInstance, alpha_bound: int = DEFAULT_ALPHA_BOUND
) -> SolveResult:
    """General-capacity fault-tolerant solver, radius at most 10 * tau*."""
    _require_variant(inst, "ft", "ft-general")
    if inst.alpha > alpha_bound:
        raise InstanceError(
            f"alpha={inst.alpha} exceeds the scenario-enumeration bound {alpha_bound}; "
            "use the uniform-capacity path or a conservative algorithm, or raise the bound"
        )

    def per_tau(G):
        return solve_components(
            G,
            inst.k,
            inst.alpha,
            inst.capacities,
            lambda sub, budget, caps: ft_general_connected(sub, budget, caps, inst.alpha),
        )

    return SolveResult("ft-general", inst, sweep(inst, per_tau))


def solve_ft_uniform(inst: MetricInstance) -> SolveResult:
    """{0,L}-capacity fault-tolerant solver, radius at most 6 * tau*."""
    _require_variant(inst, "ft", "ft-0l")
    uniform_capacity_level(inst.capacities)

    def per_tau(G):
        stripped = strip_zero_zero_edges(G, inst.capacities)
        return solve_components(
            stripped,
            inst.k,
            inst.alpha,
            inst.capacities,
            lambda sub, budget, caps: ft_uniform_connected(sub, budget, caps, inst.alpha),
        )

    return SolveResult("ft-0l", inst, sweep(inst, per_tau))
