"""Goal-ordering analysis and agenda-driven planning for ground STRIPS/ADL
problems: planning-graph and direct-analysis orderings, goal agendas, an
agenda-driven driver over GraphPlan or breadth-first base planners, and an
exhaustive oracle that checks the approximations on small instances."""

from .agenda import Agenda, GoalGraph, compute_agenda
from .graphplan import FalseSet, PlanningGraph, build_graph, false_set, graphplan_search
from .kernel import backend as kernel_backend
from .model import (
    AdlAction,
    AtomTable,
    ConditionalEffect,
    Plan,
    PlanningProblem,
    ResourceLimit,
    StripsAction,
    Unsolvable,
    apply_adl,
    apply_strips,
    result_sequence,
    validate_plan,
)
from .driver import forward_search, next_initial_state, plan_with_agenda
from .ordering import (
    FixpointResult,
    compute_f_da,
    fixpoint_reduce,
    implied_deletes,
    order_E,
    order_H,
    order_e,
    order_h,
    possibly_achievable,
    reduced_actions,
)
from .oracle import (
    InvertibilityReport,
    ReachabilityIndex,
    check_invertibility,
    decide_forced,
    decide_reasonable,
    enumerate_reachable,
    find_deadlocks,
    relaxed_achievable,
)
from .pddl import ground, parse

__version__ = "0.1.0"
