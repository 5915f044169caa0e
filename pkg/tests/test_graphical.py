import numpy as np
import pytest

from wholm import (OrderingKey, initial_graph, reject_and_update,
                   run_graphical, validate_problem, wap_stepdown, whp_stepdown)
from wholm.closure import random_corpus
from wholm.graphical import dot_stages, export_dot


def closed_form(w, alpha, active):
    total = sum(w[i] for i in active)
    local = {i: w[i] * alpha / total for i in active}
    g = {}
    for l in active:
        off = total - w[l]
        for k in active:
            if k != l:
                g[(l, k)] = w[k] / off
    return local, g


class TestInitialGraph:
    def test_unequal_weight_values(self):
        graph = initial_graph([1.0, 2.0, 3.0], 0.05)
        assert graph.local_alpha[0] == pytest.approx(0.05 / 6)
        assert graph.local_alpha[1] == pytest.approx(0.05 / 3)
        assert graph.local_alpha[2] == pytest.approx(0.025)
        assert graph.g[(0, 1)] == pytest.approx(2 / 5)
        assert graph.g[(0, 2)] == pytest.approx(3 / 5)
        assert graph.g[(1, 0)] == pytest.approx(1 / 4)
        assert graph.g[(1, 2)] == pytest.approx(3 / 4)
        assert graph.g[(2, 0)] == pytest.approx(1 / 3)
        assert graph.g[(2, 1)] == pytest.approx(2 / 3)

    def test_equal_weights_symmetric(self):
        graph = initial_graph([2.0, 2.0, 2.0], 0.05)
        for i in range(3):
            assert graph.local_alpha[i] == pytest.approx(0.05 / 3)
        assert all(v == pytest.approx(0.5) for v in graph.g.values())

    def test_single_node(self):
        graph = initial_graph([4.0], 0.05)
        assert graph.local_alpha == {0: 0.05}
        assert graph.g == {}

    def test_row_sums_and_total_level(self):
        gen = np.random.default_rng(2)
        w = gen.uniform(0.5, 5.0, size=6)
        graph = initial_graph(w, 0.05)
        assert sum(graph.local_alpha.values()) == pytest.approx(0.05)
        for l in range(6):
            assert sum(graph.g[(l, k)] for k in range(6) if k != l) == pytest.approx(1.0)


class TestRejectAndUpdate:
    def test_update_after_middle_node(self):
        graph = reject_and_update(initial_graph([1.0, 2.0, 3.0], 0.05), 1)
        assert graph.active == {0, 2}
        assert graph.local_alpha[0] == pytest.approx(0.0125)
        assert graph.local_alpha[2] == pytest.approx(0.0375)
        assert graph.g[(0, 2)] == pytest.approx(1.0)
        assert graph.g[(2, 0)] == pytest.approx(1.0)

    def test_equal_weight_symmetry(self):
        graph = reject_and_update(initial_graph([1.0, 1.0, 1.0], 0.05), 0)
        assert graph.local_alpha[1] == pytest.approx(0.025)
        assert graph.local_alpha[2] == pytest.approx(0.025)
        assert graph.g[(1, 2)] == pytest.approx(1.0)

    def test_two_node_survivor_gets_everything(self):
        graph = reject_and_update(initial_graph([1.0, 3.0], 0.05), 1)
        assert graph.active == {0}
        assert graph.local_alpha[0] == pytest.approx(0.05)

    def test_inactive_node_rejected_is_usage_error(self):
        graph = reject_and_update(initial_graph([1.0, 2.0, 3.0], 0.05), 0)
        with pytest.raises(ValueError, match="not active"):
            reject_and_update(graph, 0)

    def test_matches_closed_form_along_random_removals(self):
        gen = np.random.default_rng(9)
        for _ in range(50):
            m = int(gen.integers(2, 8))
            w = gen.uniform(0.5, 5.0, size=m)
            graph = initial_graph(w, 0.05)
            active = set(range(m))
            order = gen.permutation(m)
            for j in order[:-1]:
                graph = reject_and_update(graph, int(j))
                active.discard(int(j))
                local, g = closed_form(w, 0.05, active)
                for i in active:
                    assert graph.local_alpha[i] == pytest.approx(local[i], rel=2e-15)
                for key, val in g.items():
                    assert graph.g[key] == pytest.approx(val, rel=2e-15)
                assert sum(graph.local_alpha.values()) == pytest.approx(0.05)
                if len(active) >= 2:
                    for l in active:
                        row = sum(graph.g[(l, k)] for k in active if k != l)
                        assert row == pytest.approx(1.0)


class TestRunGraphical:
    def test_divergent_weighted_matches_whp(self, divergent_problem):
        rejections, trace = run_graphical(divergent_problem, OrderingKey.WEIGHTED)
        assert rejections.rejected == {0, 1}
        assert [s.rejected_index for s in trace.steps] == [1, 0]

    def test_divergent_raw_matches_wap(self, divergent_problem):
        rejections, trace = run_graphical(divergent_problem, OrderingKey.RAW)
        assert rejections.rejected == frozenset()
        assert trace.steps == ()

    def test_hopeless_pvalues_reject_nothing(self):
        prob = validate_problem(["a", "b"], [1.0, 1.0], [1.0, 2.0], 0.05)
        for ordering in (OrderingKey.WEIGHTED, OrderingKey.RAW):
            assert run_graphical(prob, ordering)[0].rejected == frozenset()

    def test_equivalent_to_stepdowns_on_corpus(self):
        for prob in random_corpus(500, seed=41, m_max=10):
            assert (run_graphical(prob, OrderingKey.WEIGHTED)[0].rejected
                    == whp_stepdown(prob).rejected)
            assert (run_graphical(prob, OrderingKey.RAW)[0].rejected
                    == wap_stepdown(prob).rejected)


class TestExportDot:
    def test_initial_fraction_labels(self, divergent_problem):
        _, trace = run_graphical(divergent_problem, OrderingKey.RAW)
        text = export_dot(trace, initial_graph(divergent_problem.w, 0.05),
                          labels=divergent_problem.labels)
        assert '"H1" -> "H2" [label="2/5"]' in text
        assert 'alpha=0.0083' in text

    def test_empty_trace_single_stage(self, divergent_problem):
        _, trace = run_graphical(divergent_problem, OrderingKey.RAW)
        stages = dot_stages(trace, initial_graph(divergent_problem.w, 0.05))
        assert len(stages) == 1
        assert stages[0].startswith("digraph stage_0")

    def test_weighted_run_has_three_stages(self, divergent_problem):
        _, trace = run_graphical(divergent_problem, OrderingKey.WEIGHTED)
        stages = dot_stages(trace, initial_graph(divergent_problem.w, 0.05),
                            labels=divergent_problem.labels)
        assert len(stages) == 3
        assert 'rejected=true' in stages[1]
        assert '"H2" [label="H2", rejected=true]' in stages[1]
        # after both rejections only H3 keeps a level
        assert 'alpha=0.0500' in stages[2]
