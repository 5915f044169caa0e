"""Step-down procedures: weighted Holm (WHP), alternative weighted Holm (WAP)
and the conventional unweighted Holm baseline.

WHP orders hypotheses by weighted p-values p_i/w_i and tests the j-th ordered
hypothesis against alpha / (tail sum of ordered weights).  WAP orders by raw
p-values and tests against (w_(j) / tail sum) * alpha.  Both stop at the first
index that fails its threshold.
"""

from __future__ import annotations

from enum import Enum
from typing import Sequence

from .core import (OrderingKey, RejectionSet, TestingProblem, order,
                   validate_problem, weighted_pvalues)


class Procedure(Enum):
    HOLM = "holm"
    WHP = "whp"
    WAP = "wap"


def _tail_weight_sums(weights_in_rank_order):
    # Accumulated from the last rank upward so the summation order is fixed.
    m = len(weights_in_rank_order)
    tails = [0.0] * m
    acc = 0.0
    for j in range(m - 1, -1, -1):
        acc += weights_in_rank_order[j]
        tails[j] = acc
    return tails


def whp_stepdown(problem: TestingProblem) -> RejectionSet:
    """Weighted Holm: reject while the ordered weighted p-value stays at or
    below alpha divided by the remaining weight mass."""
    tilde = weighted_pvalues(problem).tilde_p
    perm = order(tilde, OrderingKey.WEIGHTED).perm
    tails = _tail_weight_sums([problem.w[i] for i in perm])
    trace = []
    for j, idx in enumerate(perm):
        if tilde[idx] <= problem.alpha / tails[j]:
            # raw-scale threshold, guaranteed in (0, 1)
            trace.append((j + 1, idx, problem.w[idx] * problem.alpha / tails[j]))
        else:
            break
    return RejectionSet(rejected=frozenset(i for _, i, _ in trace), trace=tuple(trace))


def wap_stepdown(problem: TestingProblem) -> RejectionSet:
    """Alternative weighted Holm: raw p-value ordering, weight-share thresholds."""
    perm = order(problem.p, OrderingKey.RAW).perm
    tails = _tail_weight_sums([problem.w[i] for i in perm])
    trace = []
    for j, idx in enumerate(perm):
        threshold = problem.w[idx] * problem.alpha / tails[j]
        if problem.p[idx] <= threshold:
            trace.append((j + 1, idx, threshold))
        else:
            break
    return RejectionSet(rejected=frozenset(i for _, i, _ in trace), trace=tuple(trace))


def holm_stepdown(p: Sequence[float], alpha: float) -> RejectionSet:
    """Classic Holm procedure: thresholds alpha / (m - j + 1)."""
    problem = validate_problem([f"H{i + 1}" for i in range(len(p))], p,
                               [1.0] * len(p), alpha)
    return whp_stepdown(problem)
