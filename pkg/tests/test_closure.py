import numpy as np
import pytest

from wholm import (Procedure, check_consonance, check_monotonicity_condition,
                   ctp, find_pvalue_monotonicity_violation, validate_problem,
                   wap_local_test, wap_stepdown, whp_local_test, whp_stepdown)
from wholm.closure import (CapacityError, members, random_corpus,
                           random_problem)


def mask_of(*indices):
    out = 0
    for i in indices:
        out |= 1 << i
    return out


class TestLocalTests:
    def test_wap_full_set_divergent(self, divergent_problem):
        # min p = 0.01 with weight 1 against (1/6) * 0.05
        assert not wap_local_test(divergent_problem, mask_of(0, 1, 2))

    def test_wap_pair_coincident(self, coincident_problem):
        # min p = 0.01 with weight 1 against (1/3) * 0.05
        assert wap_local_test(coincident_problem, mask_of(0, 1))

    def test_wap_singleton_is_plain_level(self, ards_problem):
        assert wap_local_test(ards_problem, mask_of(3))

    def test_whp_full_set_divergent(self, divergent_problem):
        # p2 = 0.014 beats (2/6) * 0.05
        assert whp_local_test(divergent_problem, mask_of(0, 1, 2))

    def test_whp_full_set_coincident(self, coincident_problem):
        assert not whp_local_test(coincident_problem, mask_of(0, 1, 2))

    def test_wap_implies_whp_on_random_subsets(self):
        gen = np.random.default_rng(3)
        for _ in range(200):
            prob = random_problem(gen, int(gen.integers(1, 7)))
            for mask in range(1, (1 << prob.m)):
                if wap_local_test(prob, mask):
                    assert whp_local_test(prob, mask)

    def test_whp_subset_closure_through_witness(self):
        gen = np.random.default_rng(4)
        for _ in range(100):
            prob = random_problem(gen, int(gen.integers(2, 6)))
            total = sum(prob.w)
            for mask in range(1, (1 << prob.m)):
                idxs = members(mask)
                s = sum(prob.w[i] for i in idxs)
                for i in idxs:
                    if prob.p[i] <= prob.w[i] / s * prob.alpha:
                        for sub in range(1, mask + 1):
                            if sub & mask == sub and (sub >> i) & 1:
                                assert whp_local_test(prob, sub)

    def test_empty_intersection_raises(self, divergent_problem):
        with pytest.raises(ValueError):
            wap_local_test(divergent_problem, 0)
        with pytest.raises(ValueError):
            whp_local_test(divergent_problem, 0)


class TestCtp:
    def test_divergent_example(self, divergent_problem):
        assert ctp(divergent_problem,
                   wap_local_test).elementary_rejections.rejected == frozenset()
        assert ctp(divergent_problem,
                   whp_local_test).elementary_rejections.rejected == {0, 1}

    def test_single_hypothesis(self):
        prob = validate_problem(["H1"], [0.04], [2.0], 0.05)
        report = ctp(prob, whp_local_test)
        assert report.local_decisions == {1: True}
        assert report.elementary_rejections.rejected == {0}

    def test_capacity_cap(self):
        prob = validate_problem([f"H{i}" for i in range(21)], [0.5] * 21,
                                [1.0] * 21, 0.05)
        with pytest.raises(CapacityError, match="20"):
            ctp(prob, whp_local_test)

    def test_matches_stepdown_on_corpus(self):
        for prob in random_corpus(300, seed=17, m_max=7):
            assert (ctp(prob, whp_local_test).elementary_rejections.rejected
                    == whp_stepdown(prob).rejected)
            assert (ctp(prob, wap_local_test).elementary_rejections.rejected
                    == wap_stepdown(prob).rejected)


class TestConsonance:
    def test_holds_on_random_corpus_for_both_tests(self):
        for prob in random_corpus(300, seed=23, m_max=8):
            assert check_consonance(prob, wap_local_test).holds
            assert check_consonance(prob, whp_local_test).holds

    def test_single_hypothesis_vacuous(self):
        prob = validate_problem(["H1"], [0.5], [1.0], 0.05)
        assert check_consonance(prob, wap_local_test).holds


class TestMonotonicityCondition:
    def test_whp_always_holds(self):
        for prob in random_corpus(200, seed=31, m_max=8):
            assert check_monotonicity_condition(prob, Procedure.WHP).holds

    def test_single_hypothesis_vacuous(self):
        prob = validate_problem(["H1"], [0.5], [1.0], 0.05)
        assert check_monotonicity_condition(prob, Procedure.WAP).holds

    def test_wap_minimizer_attribution_is_monotone(self, divergent_problem):
        # The budget goes to the raw-p minimizer of each intersection; that
        # minimizer stays minimal in every subset containing it while the
        # weight sum only shrinks, so no nested pair can violate the
        # condition.  Verified exhaustively, this holds even on problems with
        # divergent orderings.
        assert check_monotonicity_condition(divergent_problem,
                                            Procedure.WAP).holds
        for prob in random_corpus(200, seed=37, m_max=7):
            assert check_monotonicity_condition(prob, Procedure.WAP).holds

    def test_capacity_cap(self):
        prob = validate_problem([f"H{i}" for i in range(13)], [0.5] * 13,
                                [1.0] * 13, 0.05)
        with pytest.raises(CapacityError, match="12"):
            check_monotonicity_condition(prob, Procedure.WHP)


class TestPvalueMonotonicitySearch:
    def test_wap_counterexample_found(self):
        found = find_pvalue_monotonicity_violation(Procedure.WAP,
                                                   trials=20_000, seed=7)
        assert found is not None
        problem, lowered = found
        assert all(q <= p for q, p in zip(lowered.p, problem.p))
        assert (len(wap_stepdown(lowered).rejected)
                < len(wap_stepdown(problem).rejected))

    def test_whp_no_counterexample(self):
        assert find_pvalue_monotonicity_violation(Procedure.WHP,
                                                  trials=10_000, seed=7) is None

    def test_zero_trials(self):
        assert find_pvalue_monotonicity_violation(Procedure.WAP,
                                                  trials=0, seed=7) is None
