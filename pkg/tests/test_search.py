import random

import pytest
from hypothesis import given, settings, strategies as st

from oracles import StepOracle, all_leaves, discrepancies

from nslds.search import (
    DomainError,
    FIGURE_LEAF_SCORES,
    SearchLimits,
    SearchStats,
    State,
    Termination,
    lds,
    lds_leaf_count,
    lds_node_cost,
    make_figure_tree,
    make_uniform_tree,
    ns,
    ns_node_cost,
    paper_steps_lds,
    paper_steps_ns,
    playout,
    search,
)


def descend(root, path):
    s = root
    for m in path:
        s = s.play(m)
    return s


# -- figure tree ---------------------------------------------------------------

def test_figure_tree_leaves():
    root = make_figure_tree()
    assert descend(root, (1, 1, 0)).score() == 0
    assert descend(root, (1, 0, 0)).score() == -3
    assert descend(root, (0, 1, 1)).score() == 0
    scores = [descend(root, p).score() for p in all_leaves(3, 2)]
    assert tuple(scores) == FIGURE_LEAF_SCORES


def test_uniform_tree_matches_figure():
    t = make_uniform_tree(3, 2, lambda p: FIGURE_LEAF_SCORES[int("".join(map(str, p)), 2)],
                          solved_score=0)
    f = make_figure_tree()
    for level in range(4):
        for algo in ("lds", "ns"):
            a, b = search(algo, t, level), search(algo, f, level)
            assert (a.best_state.path, a.best_score, a.solved) == (
                b.best_state.path, b.best_score, b.solved)


def test_playout_figure():
    stats = SearchStats()
    leaf = playout(make_figure_tree(), stats)
    assert leaf.path == (0, 0, 0) and leaf.score() == -2
    assert stats.playout_steps == 3


def test_playout_terminal_is_identity():
    leaf = descend(make_figure_tree(), (1, 0, 1))
    stats = SearchStats()
    assert playout(leaf, stats) is leaf
    assert stats.playout_steps == 0


def test_playout_counts_height():
    stats = SearchStats()
    playout(make_uniform_tree(5, 3, lambda p: 0), stats)
    assert stats.playout_steps == 5


def test_lds_figure_levels():
    r1 = lds(make_figure_tree(), 1)
    assert not r1.solved and r1.best_score == -1
    r2 = lds(make_figure_tree(), 2)
    assert r2.solved and r2.best_score == 0
    assert r2.best_state.path == (0, 1, 1)


def test_ns_figure_levels():
    r0 = ns(make_figure_tree(), 0)
    assert r0.best_score == -2 and not r0.solved
    r1 = ns(make_figure_tree(), 1)
    assert r1.solved and r1.best_state.path == (0, 1, 1)


def test_ns_without_early_stop_follows_same_path():
    # same leaves but no solved threshold: the while loop must run to the end
    t = make_uniform_tree(3, 2, lambda p: FIGURE_LEAF_SCORES[int("".join(map(str, p)), 2)])
    r = ns(t, 1)
    assert r.best_state.path == (0, 1, 1) and r.best_score == 0
    assert not r.solved


def test_level_must_be_non_negative():
    with pytest.raises(ValueError):
        lds(make_figure_tree(), -1)
    with pytest.raises(ValueError):
        ns(make_figure_tree(), -1)


# -- discrepancy semantics -------------------------------------------------------

@pytest.mark.parametrize("h", range(0, 7))
@pytest.mark.parametrize("b", [1, 2, 3])
def test_lds_observes_exactly_low_discrepancy_leaves(h, b):
    for n in range(0, h + 1):
        seen = []

        def score(path):
            seen.append(path)
            return 0.0

        stats = SearchStats()
        lds(make_uniform_tree(h, b, score), n, stats=stats)
        expected = {p for p in all_leaves(h, b) if discrepancies(p) <= n}
        assert set(seen) == expected
        assert len(expected) == lds_leaf_count(n, h, b)
        assert stats.terminals_seen == len(expected)


def test_lds_leaf_count_examples():
    assert lds_leaf_count(1, 3, 2) == 4
    assert lds_leaf_count(0, 5, 3) == 1
    assert lds_leaf_count(4, 4, 3) == 81
    assert lds_leaf_count(7, 4, 3) == 81


def test_lds_level_four_visits_81_leaves():
    stats = SearchStats()
    lds(make_uniform_tree(4, 3, lambda p: 0), 4, stats=stats)
    assert stats.terminals_seen == 81


# -- monotonicity and determinism ------------------------------------------------

@settings(max_examples=60, deadline=None)
@given(h=st.integers(0, 6), b=st.integers(1, 3), seed=st.integers(0, 2**32 - 1))
def test_lds_monotone_in_level(h, b, seed):
    rng = random.Random(seed)
    table = {p: rng.randint(-20, 0) for p in all_leaves(h, b)}
    root = make_uniform_tree(h, b, table.__getitem__)
    scores = [lds(root, n).best_score for n in range(h + 2)]
    assert scores == sorted(scores)
    assert scores[-1] == max(table.values())


@settings(max_examples=40, deadline=None)
@given(h=st.integers(0, 6), b=st.integers(1, 3), seed=st.integers(0, 2**32 - 1))
def test_ns_zero_is_playout(h, b, seed):
    rng = random.Random(seed)
    table = {p: rng.random() for p in all_leaves(h, b)}
    root = make_uniform_tree(h, b, table.__getitem__)
    s1, s2 = SearchStats(), SearchStats()
    leaf = playout(root, s1)
    r = ns(root, 0, stats=s2)
    assert r.best_state.path == leaf.path
    assert s1.playout_steps == s2.playout_steps


def test_single_move_trees_are_playouts():
    root = make_uniform_tree(6, 1, lambda p: 1.0)
    for level in range(4):
        assert ns(root, level).best_state.path == (0,) * 6
        assert lds(root, level).best_state.path == (0,) * 6


def test_determinism():
    rng = random.Random(7)
    table = {p: rng.randint(-50, 0) for p in all_leaves(6, 3)}
    root = make_uniform_tree(6, 3, table.__getitem__)
    for algo in ("lds", "ns"):
        a, b = search(algo, root, 2), search(algo, root, 2)
        assert a.best_state.path == b.best_state.path
        assert a.best_score == b.best_score
        assert a.stats.best_score_trace == b.stats.best_score_trace
        assert a.stats.playout_steps == b.stats.playout_steps


def test_ns_ties_go_to_first_move():
    root = make_uniform_tree(3, 3, lambda p: 1.0)
    assert ns(root, 2).best_state.path == (0, 0, 0)


def test_global_best_is_tracked_for_ns():
    # root playouts: (0,0)=0 beats (1,0)=-5; below (0,), leaf (0,1)=3 wins.
    # (1,1)=10 is never visited.
    scores = {(0, 0): 0, (0, 1): 3, (1, 0): -5, (1, 1): 10}
    r = ns(make_uniform_tree(2, 2, scores.__getitem__), 1)
    assert r.best_state.path == (0, 1)
    assert r.best_score == r.best_state.score() == 3
    assert r.stats.best_score == 3
    trace_scores = [s for _, s in r.stats.best_score_trace]
    assert trace_scores == [0, 3]


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), level=st.integers(1, 3))
def test_ns_global_best_bounds_final(seed, level):
    rng = random.Random(seed)
    table = {p: rng.randint(-30, 0) for p in all_leaves(5, 3)}
    r = ns(make_uniform_tree(5, 3, table.__getitem__), level)
    assert r.stats.best_score >= r.best_score == r.best_state.score()


# -- step counts ---------------------------------------------------------------

@pytest.mark.parametrize("h", range(0, 9))
@pytest.mark.parametrize("b", [1, 2, 3])
@pytest.mark.parametrize("n", range(0, 4))
def test_measured_steps_match_oracle(h, b, n):
    rng = random.Random(h * 100 + b * 10 + n)
    table = {}

    def score(p):
        if p not in table:
            table[p] = rng.randint(-9, 0)
        return table[p]

    root = make_uniform_tree(h, b, score)
    oracle = StepOracle(h, b)
    oracle.lds((), n)
    stats = SearchStats()
    lds(root, n, stats=stats)
    assert (stats.playout_steps, stats.moves_played) == (oracle.level0, oracle.total)

    oracle = StepOracle(h, b)
    oracle.ns((), n, score)
    stats = SearchStats()
    ns(root, n, stats=stats)
    assert (stats.playout_steps, stats.moves_played) == (oracle.level0, oracle.total)


def test_recurrence_values():
    assert paper_steps_ns(0, 7, 2) == 7
    assert paper_steps_lds(0, 7, 2) == 7
    assert paper_steps_ns(1, 2, 2) == 2
    # t_1(3,2) = t_1(2,2) + t_0(2,2); t_1(2,2) = t_1(1,2) + t_0(1,2) = 0 + 1
    assert paper_steps_lds(1, 3, 2) == 1 + 2
    # one branch per node: only the level-0 playout contributes moves
    assert paper_steps_lds(0, 9, 1) == 9
    for n in range(1, 5):
        o = StepOracle(9, 1)
        o.lds((), n)
        assert paper_steps_lds(n, 9, 1) == o.level0 == 0


@pytest.mark.parametrize("n,h,b", [(2, 30, 2), (1, 12, 3), (3, 10, 2)])
def test_recurrence_tracks_oracle(n, h, b):
    o = StepOracle(h, b)
    o.lds((), n)
    assert abs(paper_steps_lds(n, h, b) - o.level0) <= 0.25 * o.level0
    o = StepOracle(h, b)
    o.ns((), n, lambda p: 0)
    assert abs(paper_steps_ns(n, h, b) - o.level0) <= 0.25 * o.level0


@settings(max_examples=50)
@given(n=st.integers(1, 6), h=st.integers(1, 20), b=st.integers(1, 6),
       seed=st.integers(0, 1000))
def test_node_cost_difference(n, h, b, seed):
    rng = random.Random(seed)
    cache = {}

    def lower(a, c, d):
        return cache.setdefault((a, c, d), rng.randint(0, 10**6))

    diff = ns_node_cost(n, h, b, lower) - lds_node_cost(n, h, b, lower)
    assert diff == lower(n - 1, h - 1, b)


def test_recurrence_args_checked():
    with pytest.raises(ValueError):
        paper_steps_ns(-1, 2, 2)
    with pytest.raises(ValueError):
        lds_leaf_count(1, 2, 0)


# -- limits and contract errors ---------------------------------------------------

def test_step_budget_stops_search():
    root = make_uniform_tree(8, 3, lambda p: -sum(p))
    r = lds(root, 8, SearchLimits(step_budget=50))
    assert r.terminated_by is Termination.BUDGET
    assert r.stats.moves_played <= 50
    assert r.best_state.is_terminal()
    assert r.best_score == r.best_state.score()


def test_timeout_stops_search():
    root = make_uniform_tree(40, 3, lambda p: 0.0)
    r = ns(root, 3, SearchLimits(max_seconds=0.2))
    assert r.terminated_by is Termination.TIMEOUT
    assert r.best_state.is_terminal()


def test_limits_reject_negative():
    with pytest.raises(ValueError):
        SearchLimits(max_seconds=-1)


class Broken(State):
    def is_terminal(self):
        return False

    def legal_moves(self):
        return []

    def play(self, move):
        return self

    def score(self):
        return 0


def test_contract_violation_is_reported():
    with pytest.raises(DomainError):
        playout(Broken())
    with pytest.raises(DomainError):
        lds(Broken(), 2)
