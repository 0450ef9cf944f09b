"""Decision procedures: invariant measures, Folner sets and their extraction."""
from .lp import Constraint, LPResult, solve_feasibility
from .measures import (FEASIBLE, INFEASIBLE, ActionRelation, Decision, RationalMeasure,
                       UnionRelation, amenable_feasible, check_measure_properties,
                       day_invariance_feasible, domain_measure_feasible, fragment_feasibility,
                       localization_feasible, localized_feasible, periodic_fragment)

__all__ = [
    "FEASIBLE", "INFEASIBLE", "ActionRelation", "Constraint", "Decision", "LPResult",
    "RationalMeasure", "UnionRelation", "amenable_feasible", "check_measure_properties",
    "day_invariance_feasible", "domain_measure_feasible", "fragment_feasibility",
    "localization_feasible", "localized_feasible", "periodic_fragment", "solve_feasibility",
]
