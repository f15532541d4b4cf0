"""Playout, Limited Discrepancy Search and Nested Search over abstract states.

A domain plugs in by subclassing :class:`State`.  Moves are returned best
heuristic move first; the engine never reorders them.

>>> root = make_figure_tree()
>>> playout(root).score()
-2
>>> lds(root, 1).best_score, lds(root, 2).solved
(-1, True)
>>> ns(root, 1).best_state.path
(0, 1, 1)
"""

from __future__ import annotations

import enum
import math
import sys
import time
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Hashable, Optional, Sequence

__all__ = [
    "State",
    "SearchLimits",
    "SearchStats",
    "SearchResult",
    "Termination",
    "DomainError",
    "playout",
    "lds",
    "ns",
    "search",
    "paper_steps_ns",
    "paper_steps_lds",
    "ns_node_cost",
    "lds_node_cost",
    "lds_leaf_count",
    "TreeState",
    "make_figure_tree",
    "make_uniform_tree",
    "FIGURE_LEAF_SCORES",
]

Move = Hashable


class DomainError(RuntimeError):
    """A state broke the domain contract (e.g. non-terminal without moves)."""


class State(ABC):
    """A node of a search tree.

    ``solved_score`` is the score at or above which a terminal state solves
    a decision problem.  Optimization domains leave it at ``None``.
    """

    solved_score: Optional[float] = None

    @abstractmethod
    def is_terminal(self) -> bool: ...

    @abstractmethod
    def legal_moves(self) -> Sequence[Move]:
        """Legal moves, best heuristic move first.  Empty iff terminal."""

    @abstractmethod
    def play(self, move: Move) -> "State":
        """Return the successor state; ``self`` is left untouched."""

    @abstractmethod
    def score(self) -> float:
        """Score to maximize; must be defined on terminal states."""

    def is_solved(self) -> bool:
        return self.solved_score is not None and self.score() >= self.solved_score


class Termination(str, enum.Enum):
    COMPLETED = "completed"
    TIMEOUT = "timeout"
    BUDGET = "budget"


@dataclass(frozen=True)
class SearchLimits:
    """Wall-clock and move budgets; 0 disables a limit."""

    max_seconds: float = 0.0
    step_budget: int = 0

    def __post_init__(self):
        if self.max_seconds < 0 or self.step_budget < 0:
            raise ValueError("search limits must be non-negative")


@dataclass
class SearchStats:
    """Counters filled in during a run.

    ``playout_steps`` counts moves played at level 0 (playouts and level-0
    LDS descents); ``moves_played`` counts every call to ``play``.
    """

    playout_steps: int = 0
    playouts: int = 0
    nodes_expanded: int = 0
    moves_played: int = 0
    terminals_seen: int = 0
    best_score: float = -math.inf
    best_state: Optional[State] = None
    best_score_trace: list = field(default_factory=list)


@dataclass
class SearchResult:
    best_state: State
    best_score: float
    solved: bool
    stats: SearchStats
    terminated_by: Termination


class _Halt(Exception):
    def __init__(self, reason: Optional[Termination]):
        super().__init__(reason)
        self.reason = reason  # None: a solution was found


class _Run:
    """Shared bookkeeping for one search invocation."""

    def __init__(self, limits: Optional[SearchLimits], stats: Optional[SearchStats]):
        self.limits = limits or SearchLimits()
        self.stats = stats if stats is not None else SearchStats()
        self.deadline = (
            time.perf_counter() + self.limits.max_seconds
            if self.limits.max_seconds > 0
            else None
        )

    def check(self) -> None:
        if self.deadline is not None and time.perf_counter() >= self.deadline:
            raise _Halt(Termination.TIMEOUT)
        budget = self.limits.step_budget
        if budget and self.stats.moves_played >= budget:
            raise _Halt(Termination.BUDGET)

    def moves(self, state: State) -> Sequence[Move]:
        moves = state.legal_moves()
        if not moves:
            raise DomainError(f"non-terminal state without legal moves: {state!r}")
        return moves

    def play(self, state: State, move: Move, level0: bool) -> State:
        self.check()
        self.stats.moves_played += 1
        if level0:
            self.stats.playout_steps += 1
        return state.play(move)

    def terminal(self, state: State) -> None:
        st = self.stats
        st.terminals_seen += 1
        score = state.score()
        if score > st.best_score:
            st.best_score = score
            st.best_state = state
            st.best_score_trace.append((st.moves_played, score))
        if state.is_solved():
            raise _Halt(None)

    def descend(self, state: State) -> State:
        """Follow first moves down to a terminal state."""
        self.stats.playouts += 1
        while not state.is_terminal():
            state = self.play(state, self.moves(state)[0], True)
        self.terminal(state)
        return state

    def lds(self, state: State, level: int) -> float:
        if level == 0:
            return self.descend(state).score()
        if state.is_terminal():
            self.terminal(state)
            return state.score()
        self.check()
        self.stats.nodes_expanded += 1
        best = -math.inf
        for i, move in enumerate(self.moves(state)):
            child = self.play(state, move, False)
            score = self.lds(child, level if i == 0 else level - 1)
            best = max(best, score)
        return best

    def ns(self, state: State, level: int) -> State:
        if level == 0:
            return self.descend(state)
        while not state.is_terminal():
            self.check()
            self.stats.nodes_expanded += 1
            best_child, best_score = None, -math.inf
            for move in self.moves(state):
                child = self.play(state, move, False)
                score = self.ns(child, level - 1).score()
                if best_child is None or score > best_score:
                    best_child, best_score = child, score
            state = best_child
        self.terminal(state)
        return state


def _finish(run: _Run, root: State, final: Optional[State], reason: Termination) -> SearchResult:
    st = run.stats
    if final is None:
        final = st.best_state
    if final is None:
        # Stopped before reaching any leaf: complete one unchecked descent.
        final = root
        while not final.is_terminal():
            final = final.play(final.legal_moves()[0])
        st.terminals_seen += 1
        st.best_score, st.best_state = final.score(), final
    score = final.score()
    return SearchResult(final, score, final.is_solved(), st, reason)


def _ensure_recursion(depth_hint: int = 20000) -> None:
    if sys.getrecursionlimit() < depth_hint:
        sys.setrecursionlimit(depth_hint)


def playout(state: State, stats: Optional[SearchStats] = None) -> State:
    """Play the first legal move until a terminal state is reached."""
    return _Run(None, stats).descend(state)


def lds(
    state: State,
    level: int,
    limits: Optional[SearchLimits] = None,
    stats: Optional[SearchStats] = None,
) -> SearchResult:
    """Limited Discrepancy Search visiting every path with at most ``level``
    non-first moves.  The result is the best terminal state seen."""
    if level < 0:
        raise ValueError("level must be >= 0")
    _ensure_recursion()
    run = _Run(limits, stats)
    try:
        run.lds(state, level)
        reason = Termination.COMPLETED
    except _Halt as halt:
        reason = halt.reason or Termination.COMPLETED
    return _finish(run, state, None, reason)


def ns(
    state: State,
    level: int,
    limits: Optional[SearchLimits] = None,
    stats: Optional[SearchStats] = None,
) -> SearchResult:
    """Nested Search of the given level.

    On normal completion ``best_state`` is the terminal state reached by the
    top-level loop, which may score below ``stats.best_score``.  When a
    solution is found or a limit fires, the best terminal seen is returned.
    """
    if level < 0:
        raise ValueError("level must be >= 0")
    _ensure_recursion()
    run = _Run(limits, stats)
    final = None
    try:
        final = run.ns(state, level)
        reason = Termination.COMPLETED
    except _Halt as halt:
        reason = halt.reason or Termination.COMPLETED
    return _finish(run, state, final, reason)


ALGORITHMS = {"lds": lds, "ns": ns}


def search(algo: str, state: State, level: int, limits=None, stats=None) -> SearchResult:
    try:
        fn = ALGORITHMS[algo]
    except KeyError:
        raise ValueError(f"unknown algorithm {algo!r}") from None
    return fn(state, level, limits, stats)


# -- step recurrences -------------------------------------------------------

def ns_node_cost(n: int, h: int, b: int, lower: Callable[[int, int, int], int]) -> int:
    """Cost of a level-n NS node of height h given the cost function below it."""
    return lower(n, h - 1, b) + b * lower(n - 1, h - 1, b)


def lds_node_cost(n: int, h: int, b: int, lower: Callable[[int, int, int], int]) -> int:
    return lower(n, h - 1, b) + (b - 1) * lower(n - 1, h - 1, b)


def _check_args(n, h, b):
    if n < 0 or h < 0 or b < 1:
        raise ValueError("need n >= 0, h >= 0, b >= 1")


@lru_cache(maxsize=None)
def paper_steps_ns(n: int, h: int, b: int) -> int:
    """Playout steps of NS(n) on a uniform tree; t_0(h) = h, t_n(0) = 0."""
    _check_args(n, h, b)
    if n == 0:
        return h
    if h == 0:
        return 0
    return ns_node_cost(n, h, b, paper_steps_ns)


@lru_cache(maxsize=None)
def paper_steps_lds(n: int, h: int, b: int) -> int:
    _check_args(n, h, b)
    if n == 0:
        return h
    if h == 0:
        return 0
    return lds_node_cost(n, h, b, paper_steps_lds)


def lds_leaf_count(n: int, h: int, b: int) -> int:
    """Number of leaves with at most n discrepancies on a uniform (h, b) tree."""
    _check_args(n, h, b)
    return sum(math.comb(h, k) * (b - 1) ** k for k in range(min(n, h) + 1))


# -- synthetic trees --------------------------------------------------------

FIGURE_LEAF_SCORES = (-2, -2, -1, 0, -3, -2, 0, -1)


class TreeState(State):
    """Node of a uniform tree identified by its path of child indices."""

    __slots__ = ("height", "branching", "leaf_score", "path")

    def __init__(self, height, branching, leaf_score, path=(), solved_score=None):
        self.height = height
        self.branching = branching
        self.leaf_score = leaf_score
        self.path = tuple(path)
        self.solved_score = solved_score

    def is_terminal(self):
        return len(self.path) >= self.height

    def legal_moves(self):
        return () if self.is_terminal() else range(self.branching)

    def play(self, move):
        return TreeState(self.height, self.branching, self.leaf_score,
                         self.path + (move,), self.solved_score)

    def score(self):
        if not self.is_terminal():
            raise ValueError("score is only defined on leaves")
        return self.leaf_score(self.path)

    def __repr__(self):
        return f"TreeState(path={self.path})"


def make_uniform_tree(h: int, b: int, leaf_scores: Callable[[tuple], float],
                      solved_score: Optional[float] = None) -> TreeState:
    if h < 0 or b < 1:
        raise ValueError("need h >= 0 and b >= 1")
    return TreeState(h, b, leaf_scores, (), solved_score)


def leaf_index(path: Sequence[int], b: int) -> int:
    """Left-to-right index of the leaf at ``path``."""
    idx = 0
    for m in path:
        idx = idx * b + m
    return idx


def make_figure_tree() -> TreeState:
    """Height-3 binary tree with the two solutions at L,R,R and R,R,L."""
    return make_uniform_tree(
        3, 2, lambda p: FIGURE_LEAF_SCORES[leaf_index(p, 2)], solved_score=0
    )
