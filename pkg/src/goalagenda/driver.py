"""Agenda-driven planning: solve cumulative goal sets episode by episode.

Each episode plans for the union of all agenda entries so far, starting
from the state the previous episode's plan produced; the final plan is the
concatenation of the episode plans and is validated against the original
problem before being returned.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

from .agenda import Agenda
from .graphplan import graphplan_search
from .model import (
    Plan,
    PlanningError,
    PlanningProblem,
    ResourceLimit,
    State,
    Unsolvable,
    apply_action,
    validate_plan,
)


class InvalidPlanError(PlanningError):
    pass


def next_initial_state(problem: PlanningProblem, state: State,
                       plan: Plan) -> State:
    """Execute a plan; parallel steps apply all adds then all deletes, which
    the step non-conflict invariant makes order-independent. Raises on an
    inapplicable action (episode plans must never contain one)."""
    for step_index, step in enumerate(plan.steps):
        adds: set = set()
        deletes: set = set()
        for action_id in sorted(step):
            action = problem.actions[action_id]
            if not action.pre <= state:
                raise InvalidPlanError(
                    f"step {step_index}: {action.name} inapplicable")
            if problem.is_adl:
                state = apply_action(state, action)  # ADL plans are sequential
            else:
                adds |= action.add
                deletes |= action.delete
        if not problem.is_adl:
            state = (state | adds) - frozenset(deletes)
    return state


def forward_search(problem: PlanningProblem, max_states: int = 200_000):
    """Breadth-first search with duplicate detection: shortest sequential
    plan, complete on finite state spaces within the state budget."""
    if problem.goals <= problem.init:
        return Plan(())
    start = frozenset(problem.init)
    parents: dict = {start: None}
    queue = deque([start])
    while queue:
        state = queue.popleft()
        for action_id, action in enumerate(problem.actions):
            if not action.pre <= state:
                continue
            succ = apply_action(state, action)
            if succ in parents:
                continue
            parents[succ] = (state, action_id)
            if problem.goals <= succ:
                return _unwind(parents, succ)
            if len(parents) > max_states:
                return ResourceLimit("max_states", max_states)
            queue.append(succ)
    return Unsolvable("state space exhausted")


def _unwind(parents, state) -> Plan:
    actions = []
    while parents[state] is not None:
        state, action_id = parents[state]
        actions.append(action_id)
    actions.reverse()
    return Plan.sequential(actions)


@dataclass(frozen=True)
class PlanEpisode:
    index: int  # 1-based agenda position
    initial: frozenset
    goals: frozenset
    plan: Plan
    outcome: str  # solved | unsolvable | resource_limit


@dataclass(frozen=True)
class AgendaPlanResult:
    status: str  # solved | episode_unsolvable | resource_limit
    plan: Plan
    episodes: tuple  # tuple[PlanEpisode, ...]
    failed_episode: int = 0  # 0 when solved
    invertibility_certified: bool = None
    validation: object = None


def _base_planner(name: str, problem: PlanningProblem, limits: dict):
    if name == "graphplan":
        return graphplan_search(problem,
                                max_layers=limits.get("max_layers", 128),
                                max_nodes=limits.get("max_nodes", 10 ** 7))
    if name == "forward":
        return forward_search(problem,
                              max_states=limits.get("max_states", 200_000))
    raise ValueError(f"unknown base planner {name!r}")


def plan_with_agenda(problem: PlanningProblem, agenda: Agenda,
                     base: str = "graphplan", linearize_entries: bool = False,
                     limits: dict = None) -> AgendaPlanResult:
    """Run the base planner over incrementally growing goal sets.

    An unsolvable episode aborts the run; that verdict is definitive for the
    whole problem only when the problem is deadlock-free, so the result
    carries the syntactic invertibility certification status alongside.
    """
    from .oracle import check_invertibility

    limits = limits or {}
    entries = list(agenda.entries)
    if linearize_entries:
        entries = [frozenset([g]) for entry in entries for g in sorted(entry)]

    episodes = []
    all_steps: list = []
    state = frozenset(problem.init)
    cumulative: set = set()
    for index, entry in enumerate(entries, start=1):
        cumulative |= entry
        subproblem = PlanningProblem(
            atoms=problem.atoms,
            actions=problem.actions,
            init=state,
            goals=frozenset(cumulative),
            name=f"{problem.name}/episode-{index}",
        )
        outcome = _base_planner(base, subproblem, limits)
        if isinstance(outcome, Unsolvable):
            episodes.append(PlanEpisode(index, state, frozenset(cumulative),
                                        Plan(()), "unsolvable"))
            certified = False
            if not problem.is_adl:
                certified = check_invertibility(problem).certified
            return AgendaPlanResult(
                status="episode_unsolvable",
                plan=Plan(()),
                episodes=tuple(episodes),
                failed_episode=index,
                invertibility_certified=certified,
            )
        if isinstance(outcome, ResourceLimit):
            episodes.append(PlanEpisode(index, state, frozenset(cumulative),
                                        Plan(()), "resource_limit"))
            return AgendaPlanResult(
                status="resource_limit",
                plan=Plan(()),
                episodes=tuple(episodes),
                failed_episode=index,
            )
        episodes.append(PlanEpisode(index, state, frozenset(cumulative),
                                    outcome, "solved"))
        state = next_initial_state(problem, state, outcome)
        if not frozenset(cumulative) <= state:
            raise InvalidPlanError(
                f"episode {index} ended without its cumulative goals")
        all_steps.extend(outcome.steps)

    plan = Plan(tuple(all_steps))
    report = validate_plan(problem, plan)
    if not report.valid:
        raise InvalidPlanError(
            f"concatenated plan failed validation: {report.issues}")
    return AgendaPlanResult(
        status="solved",
        plan=plan,
        episodes=tuple(episodes),
        validation=report,
    )
