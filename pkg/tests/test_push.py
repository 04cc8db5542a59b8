import io

import numpy as np
import pytest

from skppr import (
    Budget,
    BudgetExceeded,
    Graph,
    backward_push,
    exact_ssppr,
    forward_push,
    verify_invariant,
    write_push_result,
)

import helpers


class TestHandTrace:
    def test_self_loop_anchor(self):
        # alpha=0.2, r_max=0.5: four pushes settle 0.2 * (1 + 0.8 + 0.64 + 0.512)
        g = Graph.from_arcs(1, [(0, 0)], is_undirected=True)
        res = backward_push(g, 0.2, 0, 0.5)
        assert res.cost == 4
        assert res.reserves[0] == pytest.approx(0.5904, abs=1e-12)
        assert res.residues[0] == pytest.approx(0.4096, abs=1e-12)

    def test_no_work_above_one(self, two_cycle):
        # initial residue 1.0 never exceeds r_max >= 1, so nothing moves
        res = backward_push(two_cycle, 0.2, 0, 1.0)
        assert res.reserves == {} and res.residues == {0: 1.0} and res.cost == 0

    def test_drained_target_without_in_neighbors(self):
        g = Graph.from_arcs(2, [(0, 0), (1, 0)], is_undirected=False)
        res = backward_push(g, 0.2, 1, 0.1)
        assert res.residues == {}  # node 1 has no in-arcs, mass cannot spread
        assert res.reserves == {1: pytest.approx(0.2)}
        assert res.cost == 0


class TestBackwardPushBounds:
    @pytest.mark.parametrize("order", ["fifo", "lifo"])
    @pytest.mark.parametrize("r_max", [0.3, 0.05])
    def test_residues_and_reserve_error(self, small_directed, order, r_max):
        g = small_directed
        m = helpers.exact_matrix(g)
        for t in (0, 7, 19):
            res = backward_push(g, 0.2, t, r_max, order=order)
            if res.residues:
                assert max(res.residues.values()) <= r_max * (1 + 1e-12)
                assert min(res.residues.values()) > 0.0
            q = np.zeros(g.n)
            for v, x in res.reserves.items():
                q[v] = x
            # reserves underestimate, short by at most r_max, at every node
            gap = m[:, t] - q
            assert gap.min() >= -1e-9
            assert gap.max() <= r_max + 1e-9

    def test_invariant_at_every_push_boundary(self):
        g = helpers.random_graph(8, np.random.default_rng(2))
        m = helpers.exact_matrix(g)
        t = 3
        deviations = []

        def on_push(v, reserves, residues):
            q = np.zeros(g.n)
            for u, x in reserves.items():
                q[u] = x
            acc = q.copy()
            for u, r in residues.items():
                acc += m[:, u] * r
            deviations.append(float(np.abs(m[:, t] - acc).max()))

        backward_push(g, 0.2, t, 0.01, on_push=on_push)
        assert deviations and max(deviations) <= 1e-9

    def test_verify_invariant_helper(self, small_directed):
        res = backward_push(small_directed, 0.2, 4, 0.1)
        dev = verify_invariant(small_directed, 0.2, res, rows=range(small_directed.n))
        assert dev <= 1e-9

    def test_argument_validation(self, two_cycle):
        with pytest.raises(ValueError, match="alpha"):
            backward_push(two_cycle, 0.0, 0, 0.1)
        with pytest.raises(ValueError, match="r_max"):
            backward_push(two_cycle, 0.2, 0, 0.0)
        with pytest.raises(ValueError, match="out of range"):
            backward_push(two_cycle, 0.2, 5, 0.1)
        with pytest.raises(ValueError, match="order"):
            backward_push(two_cycle, 0.2, 0, 0.1, order="dfs")


class TestBudget:
    def test_exceeded_carries_spent(self, small_directed):
        budget = Budget(limit=3)
        with pytest.raises(BudgetExceeded) as exc:
            backward_push(small_directed, 0.2, 0, 0.001, budget=budget)
        assert exc.value.spent == budget.spent > 3

    def test_overshoot_bounded_by_max_in_degree(self, small_directed):
        g = small_directed
        budget = Budget(limit=5)
        with pytest.raises(BudgetExceeded):
            backward_push(g, 0.2, 0, 0.001, budget=budget)
        assert budget.spent - budget.limit <= int(g.in_degrees.max())

    def test_accumulates_across_calls(self, small_directed):
        budget = Budget(limit=10**9)
        backward_push(small_directed, 0.2, 0, 0.3, budget=budget)
        after_one = budget.spent
        backward_push(small_directed, 0.2, 1, 0.3, budget=budget)
        assert budget.spent > after_one

    def test_generous_budget_matches_unbudgeted(self, small_directed):
        free = backward_push(small_directed, 0.2, 2, 0.05)
        budgeted = backward_push(small_directed, 0.2, 2, 0.05, budget=Budget(limit=10**9))
        assert budgeted.reserves == free.reserves
        assert budgeted.residues == free.residues
        assert budgeted.cost == free.cost


class TestForwardPush:
    def test_degree_scaled_bounds_on_undirected(self, small_undirected):
        g = small_undirected
        r_max = 0.01
        s = 4
        res = forward_push(g, 0.2, s, r_max)
        truth = exact_ssppr(g, s).scores
        deg = g.out_degrees
        for v in range(g.n):
            assert res.residues.get(v, 0.0) <= r_max * deg[v] * (1 + 1e-12)
            assert abs(res.reserves.get(v, 0.0) - truth[v]) <= r_max * deg[v] + 1e-9

    def test_cost_counts_out_neighbor_updates(self, two_cycle):
        res = forward_push(two_cycle, 0.2, 0, 0.05)
        assert res.cost > 0
        assert res.source == 0

    def test_plain_float_state(self, small_undirected):
        res = forward_push(small_undirected, 0.2, 0, 0.1)
        assert all(type(x) is float for x in res.reserves.values())
        assert all(type(x) is float for x in res.residues.values())


class TestWritePushResult:
    def test_backward_format(self):
        g = Graph.from_arcs(1, [(0, 0)], is_undirected=True)
        res = backward_push(g, 0.2, 0, 0.5)
        buf = io.StringIO()
        write_push_result(res, buf)
        lines = buf.getvalue().splitlines()
        assert lines[0] == f"# t=0 r_max=0.5 cost=4"
        node, q, r = lines[1].split("\t")
        assert node == "0"
        assert float(q) == res.reserves[0] and float(r) == res.residues[0]

    def test_rows_sorted_by_node(self, small_directed):
        res = backward_push(small_directed, 0.2, 3, 0.05)
        buf = io.StringIO()
        write_push_result(res, buf)
        ids = [int(line.split("\t")[0]) for line in buf.getvalue().splitlines()[1:]]
        assert ids == sorted(ids)

    def test_forward_header(self, two_cycle):
        res = forward_push(two_cycle, 0.2, 1, 0.2)
        buf = io.StringIO()
        write_push_result(res, buf)
        assert buf.getvalue().startswith("# s=1 ")
