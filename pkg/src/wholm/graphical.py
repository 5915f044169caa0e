"""Graphical formulation: local levels on nodes, transition coefficients on
edges, and the rejection/update loop shared by both ordering rules.

The update is implemented for any valid (G, alpha) pair; starting from the
weight-derived initial graph it stays in closed form (local level w_l * alpha
over the active weight mass, coefficients proportional to target weights),
which the tests use as an independent oracle.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, FrozenSet, Optional, Sequence, Tuple

from .core import OrderingKey, RejectionSet, TestingProblem, weighted_pvalues


class GraphInvariantError(RuntimeError):
    pass


@dataclass(frozen=True)
class TransitionGraph:
    active: FrozenSet[int]
    local_alpha: Dict[int, float]
    g: Dict[Tuple[int, int], float]


@dataclass(frozen=True)
class GraphStep:
    rejected_index: int
    before: TransitionGraph
    after: TransitionGraph


@dataclass(frozen=True)
class GraphTrace:
    steps: Tuple[GraphStep, ...]


def initial_graph(w: Sequence[float], alpha: float) -> TransitionGraph:
    """Weight-proportional initial allocation with row-stochastic coefficients."""
    m = len(w)
    total = sum(w)
    local = {i: w[i] * alpha / total for i in range(m)}
    g = {}
    for i in range(m):
        off = total - w[i]
        for j in range(m):
            if i != j:
                g[(i, j)] = w[j] / off if off > 0 else 0.0
    return TransitionGraph(active=frozenset(range(m)), local_alpha=local, g=g)


def reject_and_update(graph: TransitionGraph, j: int) -> TransitionGraph:
    """Remove node j, redistributing its level along g_j. and rewiring edges."""
    if j not in graph.active:
        raise ValueError(f"node {j} is not active")
    remaining = graph.active - {j}
    alpha_j = graph.local_alpha[j]
    local = {l: graph.local_alpha[l] + alpha_j * graph.g.get((j, l), 0.0)
             for l in remaining}
    g = {}
    for l in remaining:
        g_lj = graph.g.get((l, j), 0.0)
        g_jl = graph.g.get((j, l), 0.0)
        denom = 1.0 - g_lj * g_jl
        for k in remaining:
            if k == l:
                continue
            if denom <= 0.0:
                raise GraphInvariantError(
                    f"degenerate update: g[{l},{j}] * g[{j},{l}] = 1")
            g[(l, k)] = (graph.g.get((l, k), 0.0) + g_lj * graph.g.get((j, k), 0.0)) / denom
    return TransitionGraph(active=remaining, local_alpha=local, g=g)


def run_graphical(problem: TestingProblem,
                  ordering: OrderingKey) -> Tuple[RejectionSet, GraphTrace]:
    """Repeatedly test the active hypothesis with the smallest key value.

    WEIGHTED ordering reproduces WHP, RAW ordering reproduces WAP.  A
    hypothesis is rejected iff its raw p-value is at or below its current
    local level; the loop stops at the first failure.
    """
    keys = (weighted_pvalues(problem).tilde_p if ordering is OrderingKey.WEIGHTED
            else problem.p)
    graph = initial_graph(problem.w, problem.alpha)
    steps = []
    trace = []
    step_no = 0
    while graph.active:
        j = min(graph.active, key=lambda i: (keys[i], i))
        threshold = graph.local_alpha[j]
        if problem.p[j] > threshold:
            break
        step_no += 1
        updated = reject_and_update(graph, j)
        steps.append(GraphStep(rejected_index=j, before=graph, after=updated))
        trace.append((step_no, j, threshold))
        graph = updated
    rejected = frozenset(i for _, i, _ in trace)
    return (RejectionSet(rejected=rejected, trace=tuple(trace)),
            GraphTrace(steps=tuple(steps)))


def _coefficient_label(value: float) -> str:
    frac = Fraction(value).limit_denominator(10 ** 6)
    if abs(float(frac) - value) < 1e-12:
        if frac.denominator == 1:
            return str(frac.numerator)
        return f"{frac.numerator}/{frac.denominator}"
    return f"{value:.6f}"


def _stage_dot(name: str, graph: TransitionGraph, all_nodes, labels) -> str:
    lines = [f"digraph {name} {{"]
    for i in all_nodes:
        if i in graph.active:
            lines.append(
                f'  "{labels[i]}" [label="{labels[i]}\\n'
                f'alpha={graph.local_alpha[i]:.4f}"];')
        else:
            lines.append(f'  "{labels[i]}" [label="{labels[i]}", rejected=true];')
    for (i, j), value in sorted(graph.g.items()):
        lines.append(f'  "{labels[i]}" -> "{labels[j]}" '
                     f'[label="{_coefficient_label(value)}"];')
    lines.append("}")
    return "\n".join(lines)


def dot_stages(trace: GraphTrace, initial: TransitionGraph,
               labels: Optional[Sequence[str]] = None):
    """One DOT digraph per stage: the initial graph, then each post-rejection
    snapshot."""
    all_nodes = sorted(initial.active)
    if labels is None:
        labels = {i: f"H{i + 1}" for i in all_nodes}
    else:
        labels = {i: labels[i] for i in all_nodes}
    stages = [_stage_dot("stage_0", initial, all_nodes, labels)]
    for k, step in enumerate(trace.steps, start=1):
        stages.append(_stage_dot(f"stage_{k}", step.after, all_nodes, labels))
    return stages


def export_dot(trace: GraphTrace, initial: TransitionGraph,
               labels: Optional[Sequence[str]] = None) -> str:
    return "\n\n".join(dot_stages(trace, initial, labels)) + "\n"
