"""Layered planning graph with binary mutex propagation, and the backward
search that uses it as the STRIPS base planner.

The graph is grown until it levels off: the first layer t whose fact set and
mutex relation equal layer t+1's. Mutex rules are the standard ones: two
actions are mutex when one deletes a precondition or add effect of the other
or their preconditions contain a mutually exclusive fact pair; two facts are
mutex when every pair of achievers (no-ops included) is mutex.

ADL actions enter the graph split into one node per conditional effect,
carrying the action precondition plus the effect condition; no cross-effect
mutex inference is attempted, which is why the graph-based ordering can be
weaker than direct analysis on conditional-effect domains.
"""

from __future__ import annotations

from dataclasses import dataclass

from .kernel import GraphKernel, backend as kernel_backend
from .model import (
    Plan,
    PlanningError,
    PlanningProblem,
    ResourceLimit,
    StripsAction,
    Unsolvable,
)


class AnchorUnreachable(PlanningError):
    """An anchor atom never enters the planning graph: the ordering against
    it holds trivially (there is no state achieving it at all)."""

    def __init__(self, atom: int):
        self.atom = atom
        super().__init__(f"anchor atom {atom} never appears in the graph")


@dataclass(frozen=True)
class GraphNode:
    """An action-layer node: a ground action, or one conditional effect of
    one (effect_index >= 1), or implicitly a no-op (not materialized)."""

    action_id: int
    effect_index: int  # 0 for STRIPS actions and unconditional ADL parts
    name: str
    pre: frozenset
    add: frozenset
    delete: frozenset


def graph_nodes(problem: PlanningProblem) -> tuple:
    nodes = []
    for action_id, action in enumerate(problem.actions):
        if isinstance(action, StripsAction):
            nodes.append(GraphNode(action_id, 0, action.name, action.pre,
                                   action.add, action.delete))
        else:
            pre0 = action.effects[0].condition
            for i, eff in enumerate(action.effects):
                nodes.append(GraphNode(
                    action_id, i,
                    action.name if i == 0 else f"{action.name}#{i}",
                    pre0 | eff.condition, eff.adds, eff.deletes))
    return tuple(nodes)


@dataclass(frozen=True)
class PlanningGraph:
    problem: PlanningProblem
    nodes: tuple  # tuple[GraphNode, ...]; no-op for fact f has id len(nodes)+f
    fact_layers: tuple  # tuple[frozenset[int], ...], layers 0..leveled_at+1
    action_layers: tuple  # tuple[tuple[int, ...], ...] node ids incl. no-ops
    fact_mutex: tuple  # per fact layer: tuple[int, ...] row bitmasks or None
    action_mutex: tuple  # per action layer: tuple[int, ...] or None
    mutex_counts: tuple  # fact-mutex pair count per fact layer
    leveled_at: int
    backend: str

    @property
    def n_real_nodes(self) -> int:
        return len(self.nodes)

    def noop_id(self, fact: int) -> int:
        return len(self.nodes) + fact

    def leveled_rows(self):
        return self.fact_mutex[self.leveled_at]

    def is_fact_mutex(self, layer: int, p: int, q: int) -> bool:
        rows = self.fact_mutex[layer]
        if rows is None:
            raise ValueError(f"mutex rows for layer {layer} were not retained")
        return bool(rows[p] >> q & 1)

    def fact_mutex_pairs(self, layer: int):
        rows = self.fact_mutex[layer]
        pairs = set()
        for p, row in enumerate(rows):
            q = 0
            while row:
                if row & 1 and p < q:
                    pairs.add((p, q))
                row >>= 1
                q += 1
        return pairs


def _mask(ids) -> int:
    m = 0
    for i in ids:
        m |= 1 << i
    return m


def _mask_to_ids(mask: int):
    ids = []
    f = 0
    while mask:
        if mask & 1:
            ids.append(f)
        mask >>= 1
        f += 1
    return ids


def _pair_count(rows) -> int:
    return sum(bin(r).count("1") for r in rows) // 2


def build_graph(problem: PlanningProblem, max_layers: int = 128,
                retain_layers: bool = True) -> PlanningGraph:
    """Grow the graph until level-off (through leveled_at + 1 layers).

    With retain_layers=False only the leveled layer's mutex rows are kept,
    which is all the false-set computation needs; backward search builds
    with retention.
    """
    nodes = graph_nodes(problem)
    n_facts = len(problem.atoms)
    kern = GraphKernel(n_facts, [(sorted(n.pre), sorted(n.add), sorted(n.delete))
                                 for n in nodes])
    fact_mask = _mask(problem.init)
    rows = [0] * n_facts

    fact_layers = [frozenset(problem.init)]
    action_layers = []
    fact_mutex = [tuple(rows) if retain_layers else None]
    action_mutex = []
    mutex_counts = [0]
    leveled_at = None

    for t in range(max_layers):
        applicable, next_mask, next_rows, act_rows = kern.step(
            fact_mask, rows, want_actions=retain_layers)
        action_layers.append(tuple(applicable))
        action_mutex.append(tuple(act_rows) if retain_layers else None)
        fact_layers.append(frozenset(_mask_to_ids(next_mask)))
        mutex_counts.append(_pair_count(next_rows))
        leveled = next_mask == fact_mask and next_rows == rows
        if retain_layers or leveled:
            fact_mutex.append(tuple(next_rows))
        else:
            fact_mutex.append(None)
        fact_mask, rows = next_mask, next_rows
        if leveled:
            leveled_at = t
            break
    if leveled_at is None:
        raise ResourceLimitError(
            f"planning graph did not level off within {max_layers} layers")
    if not retain_layers:
        # keep rows only at the leveled layer (== its successor)
        fact_mutex[leveled_at] = fact_mutex[leveled_at + 1]
        for i in range(leveled_at):
            fact_mutex[i] = None
    return PlanningGraph(
        problem=problem,
        nodes=nodes,
        fact_layers=tuple(fact_layers),
        action_layers=tuple(action_layers),
        fact_mutex=tuple(fact_mutex),
        action_mutex=tuple(action_mutex),
        mutex_counts=tuple(mutex_counts),
        leveled_at=leveled_at,
        backend=kernel_backend(),
    )


class ResourceLimitError(PlanningError):
    pass


@dataclass(frozen=True)
class FalseSet:
    """Atoms that can never hold together with the anchor, per the leveled
    graph's mutex relation."""

    anchor: frozenset
    atoms: frozenset
    anchor_internal_mutex: bool = False


def false_set(graph: PlanningGraph, anchor) -> FalseSet:
    """Atoms mutex with at least one anchor member at level-off.

    Raises AnchorUnreachable when an anchor atom never enters the graph;
    callers treat that as a trivial ordering. Anchor members mutex with each
    other are excluded from the result and flagged (degenerate anchor).
    """
    anchor = frozenset(anchor)
    leveled_facts = graph.fact_layers[graph.leveled_at]
    rows = graph.leveled_rows()
    combined = 0
    for atom in sorted(anchor):
        if atom not in leveled_facts:
            raise AnchorUnreachable(atom)
        combined |= rows[atom]
    atoms = frozenset(_mask_to_ids(combined))
    internal = bool(atoms & anchor)
    return FalseSet(anchor=anchor, atoms=atoms - anchor,
                    anchor_internal_mutex=internal)


# --- backward search ---------------------------------------------------------

def graphplan_search(problem: PlanningProblem, max_layers: int = 128,
                     max_nodes: int = 10 ** 7):
    """GraphPlan backward search: step-optimal parallel plan, Unsolvable with
    a level-off + memoization exhaustion proof, or ResourceLimit.

    No-ops are preferred achievers (goals already true stay true when
    possible); remaining ties break by ascending node id, so plans are
    deterministic across runs.
    """
    if problem.is_adl:
        raise ValueError("graphplan_search requires a STRIPS problem")
    if problem.goals <= problem.init:
        return Plan(())

    # the assignment recursion descends one frame per goal per layer; deep
    # horizons (long sequential plans without an agenda) overrun the default
    # interpreter limit
    import sys
    if sys.getrecursionlimit() < 10_000:
        sys.setrecursionlimit(10_000)

    graph = build_graph(problem, max_layers=max_layers, retain_layers=True)
    searcher = _BackwardSearch(graph, max_nodes)
    leveled = graph.leveled_at
    goals = frozenset(problem.goals)

    prev_nogood_count = None
    horizon = 0
    while True:
        horizon += 1
        if horizon > max_layers:
            return ResourceLimit("max_layers", max_layers)
        present = graph.fact_layers[min(horizon, leveled)]
        if goals <= present and not searcher.goals_mutex(min(horizon, leveled),
                                                         goals):
            try:
                steps = searcher.search(goals, horizon)
            except _NodeBudgetExceeded:
                return ResourceLimit("max_nodes", max_nodes)
            if steps is not None:
                return _extract_plan(graph, steps)
        elif horizon > leveled:
            return Unsolvable("goals absent or mutex at level-off")
        if horizon >= leveled:
            count = len(searcher.memo.get(leveled, ()))
            if prev_nogood_count is not None and count == prev_nogood_count:
                return Unsolvable("memoized goal sets prove exhaustion")
            prev_nogood_count = count


class _NodeBudgetExceeded(Exception):
    pass


class _BackwardSearch:
    def __init__(self, graph: PlanningGraph, max_nodes: int):
        self.graph = graph
        self.leveled = graph.leveled_at
        self.max_nodes = max_nodes
        self.nodes_used = 0
        self.memo: dict = {}
        self._achievers_cache: dict = {}

    def _layer(self, t: int) -> int:
        return min(t, self.leveled)

    def goals_mutex(self, layer: int, goals) -> bool:
        rows = self.graph.fact_mutex[layer]
        gs = sorted(goals)
        for i, p in enumerate(gs):
            for q in gs[i + 1:]:
                if rows[p] >> q & 1:
                    return True
        return False

    def achievers(self, action_layer: int, fact: int):
        """Achiever node ids at the layer, no-op first, then ascending."""
        key = (self._layer(action_layer), fact)
        cached = self._achievers_cache.get(key)
        if cached is not None:
            return cached
        layer = self._layer(action_layer)
        noop = self.graph.noop_id(fact)
        out = []
        for node_id in self.graph.action_layers[layer]:
            if node_id == noop:
                out.insert(0, node_id)
            elif node_id < self.graph.n_real_nodes \
                    and fact in self.graph.nodes[node_id].add:
                out.append(node_id)
        self._achievers_cache[key] = out
        return out

    def _node_pre(self, node_id: int):
        if node_id >= self.graph.n_real_nodes:
            return frozenset((node_id - self.graph.n_real_nodes,))
        return self.graph.nodes[node_id].pre

    def search(self, goals, t: int):
        """Steps (list of node-id sets, layers 1..t) achieving goals at fact
        layer t, or None."""
        if t == 0:
            return [] if goals <= self.graph.fact_layers[0] else None
        layer_memo = self.memo.setdefault(t, set())
        if goals in layer_memo:
            return None
        result = self._assign(sorted(goals), 0, [], t)
        if result is None:
            layer_memo.add(frozenset(goals))
        return result

    def _assign(self, goals, index, chosen, t):
        self.nodes_used += 1
        if self.nodes_used > self.max_nodes:
            raise _NodeBudgetExceeded
        if index == len(goals):
            subgoals = frozenset().union(*(self._node_pre(n) for n in chosen)) \
                if chosen else frozenset()
            rest = self.search(subgoals, t - 1)
            if rest is None:
                return None
            return rest + [set(chosen)]
        goal = goals[index]
        for node_id in chosen:
            if node_id < self.graph.n_real_nodes \
                    and goal in self.graph.nodes[node_id].add:
                return self._assign(goals, index + 1, chosen, t)
        act_rows = self.graph.action_mutex[self._layer(t - 1)]
        for cand in self.achievers(t - 1, goal):
            row = act_rows[cand]
            if any(row >> other & 1 for other in chosen):
                continue
            result = self._assign(goals, index + 1, chosen + [cand], t)
            if result is not None:
                return result
        return None


def _extract_plan(graph: PlanningGraph, steps) -> Plan:
    out = []
    for step in steps:
        real = frozenset(graph.nodes[n].action_id for n in step
                         if n < graph.n_real_nodes)
        if real:
            out.append(real)
    return Plan(tuple(out))


def graph_dump(graph: PlanningGraph) -> dict:
    """Counts per layer, for the CLI's JSON dump."""
    return {
        "backend": graph.backend,
        "leveled_at": graph.leveled_at,
        "layers": [
            {
                "facts": len(graph.fact_layers[t]),
                "fact_mutex_pairs": graph.mutex_counts[t],
                "actions": len(graph.action_layers[t])
                if t < len(graph.action_layers) else None,
            }
            for t in range(len(graph.fact_layers))
        ],
    }
