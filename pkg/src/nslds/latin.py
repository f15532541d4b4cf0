"""Graeco-Latin squares as a CSP searched value by value.

Cells of both grids live in one flat array, ``k = square*n*n + row*n + col``,
so the tie-break order (square, row, column) is plain index order.  Unassigned
cells hold a bitmask domain.  Assigning a value removes it from the row and
column of its grid and keeps the superimposed pairs distinct: once a pair
``(a, b)`` exists, no other position may complete the same pair.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import List, Optional, Sequence, Tuple

from .search import State

MAX_ORDER = 32
VAR_HEURISTICS = ("dom", "deg")


@dataclass(frozen=True)
class LatinConfig:
    n: int
    var_heuristic: str = "deg"
    symmetry: bool = False
    mac: bool = False

    def __post_init__(self):
        if not 1 <= self.n <= MAX_ORDER:
            raise ValueError(f"order must be in 1..{MAX_ORDER}")
        if self.var_heuristic not in VAR_HEURISTICS:
            raise ValueError(f"var heuristic must be one of {VAR_HEURISTICS}")


def cell_index(n: int, square: int, row: int, col: int) -> int:
    return square * n * n + row * n + col


def cell_coords(n: int, k: int) -> Tuple[int, int, int]:
    s, rest = divmod(k, n * n)
    return (s,) + divmod(rest, n)


@lru_cache(maxsize=None)
def _peers(n: int) -> Tuple[Tuple[int, ...], ...]:
    """Cells sharing a row or a column with each cell, same grid."""
    out = []
    for k in range(2 * n * n):
        s, r, c = cell_coords(n, k)
        base = s * n * n
        row = [base + r * n + j for j in range(n) if j != c]
        col = [base + i * n + c for i in range(n) if i != r]
        out.append(tuple(row + col))
    return tuple(out)


@lru_cache(maxsize=None)
def _lines(n: int) -> Tuple[Tuple[int, ...], ...]:
    """Every row and column of both grids as tuples of cell ids."""
    lines = []
    for s in range(2):
        base = s * n * n
        for r in range(n):
            lines.append(tuple(base + r * n + c for c in range(n)))
        for c in range(n):
            lines.append(tuple(base + r * n + c for r in range(n)))
    return tuple(lines)


class LatinState(State):
    """A partial assignment of both grids.

    ``pairs[0][a]`` is the bitmask of grid-1 values already paired with
    grid-0 value ``a``; ``pairs[1]`` is the transpose.
    """

    solved_score = 0
    __slots__ = ("config", "n", "val", "dom", "pairs", "line_free", "free",
                 "failed", "_moves", "_var")

    def __init__(self, config: LatinConfig):
        n = config.n
        self.config = config
        self.n = n
        size = 2 * n * n
        self.val = [-1] * size
        self.dom = [(1 << n) - 1] * size
        self.pairs = ([0] * n, [0] * n)
        # free cells per row (0..2n-1 over both grids) then per column
        self.line_free = [n] * (4 * n)
        self.free = size
        self.failed = False
        self._moves = None
        self._var = None

    def copy(self) -> "LatinState":
        new = object.__new__(LatinState)
        new.config = self.config
        new.n = self.n
        new.val = self.val[:]
        new.dom = self.dom[:]
        new.pairs = (self.pairs[0][:], self.pairs[1][:])
        new.line_free = self.line_free[:]
        new.free = self.free
        new.failed = self.failed
        new._moves = None
        new._var = None
        return new

    # -- bookkeeping -------------------------------------------------------

    def _row_col_slots(self, k: int) -> Tuple[int, int]:
        n = self.n
        s, r, c = cell_coords(n, k)
        return s * n + r, 2 * n + s * n + c

    def degree(self, k: int) -> int:
        """Free cells in the same row and column as ``k`` (same grid)."""
        rs, cs = self._row_col_slots(k)
        own = 2 if self.val[k] < 0 else 0
        return self.line_free[rs] + self.line_free[cs] - own

    def _remove(self, j: int, bits: int) -> int:
        """Drop ``bits`` from unassigned cell ``j``; return how many went."""
        if self.val[j] >= 0:
            return 0
        hit = self.dom[j] & bits
        if not hit:
            return 0
        self.dom[j] ^= hit
        if not self.dom[j]:
            self.failed = True
        return hit.bit_count()

    def _assign(self, k: int, v: int) -> int:
        """Assign in place and forward-check; returns the deletion count."""
        n = self.n
        nn = n * n
        bit = 1 << v
        val, dom = self.val, self.dom
        val[k] = v
        dom[k] = bit
        self.free -= 1
        rs, cs = self._row_col_slots(k)
        self.line_free[rs] -= 1
        self.line_free[cs] -= 1
        removed = 0
        for j in _peers(n)[k]:
            removed += self._remove(j, bit)
        s = k // nn
        pos = k - s * nn
        o = 1 - s
        p = o * nn + pos
        w = val[p]
        if w >= 0:
            self.pairs[s][v] |= 1 << w
            self.pairs[o][w] |= bit
            wbit = 1 << w
            sbase, obase = s * nn, o * nn
            for q in range(nn):
                if q == pos:
                    continue
                if val[obase + q] == w:
                    removed += self._remove(sbase + q, bit)
                elif val[sbase + q] == v:
                    removed += self._remove(obase + q, wbit)
        else:
            removed += self._remove(p, self.pairs[s][v])
        return removed

    def deletions(self, k: int, v: int) -> int:
        """Values that assigning ``v`` to ``k`` would delete elsewhere,
        without running MAC.  Read-only."""
        n = self.n
        nn = n * n
        bit = 1 << v
        val, dom = self.val, self.dom
        total = 0
        for j in _peers(n)[k]:
            if val[j] < 0 and dom[j] & bit:
                total += 1
        s = k // nn
        pos = k - s * nn
        o = 1 - s
        p = o * nn + pos
        w = val[p]
        if w >= 0:
            wbit = 1 << w
            sbase, obase = s * nn, o * nn
            for q in range(nn):
                if q == pos:
                    continue
                if val[obase + q] == w:
                    j = sbase + q
                    if val[j] < 0 and dom[j] & bit:
                        total += 1
                elif val[sbase + q] == v:
                    j = obase + q
                    if val[j] < 0 and dom[j] & wbit:
                        total += 1
        elif val[p] < 0:
            total += (dom[p] & self.pairs[s][v]).bit_count()
        return total

    def _mac(self) -> None:
        """Singleton and hidden-single propagation to a fixpoint, in place."""
        n = self.n
        full = (1 << n) - 1
        lines = _lines(n)
        while not self.failed:
            changed = False
            for k in range(2 * n * n):
                if self.val[k] < 0 and self.dom[k] & (self.dom[k] - 1) == 0:
                    self._assign(k, self.dom[k].bit_length() - 1)
                    changed = True
                    if self.failed:
                        return
            for line in lines:
                placed = 0
                once = 0
                many = 0
                for j in line:
                    if self.val[j] >= 0:
                        placed |= 1 << self.val[j]
                    else:
                        d = self.dom[j]
                        many |= once & d
                        once |= d
                if (placed | once) != full:
                    self.failed = True
                    return
                single = once & ~many & ~placed
                while single:
                    b = single & -single
                    single ^= b
                    v = b.bit_length() - 1
                    for j in line:
                        if self.val[j] < 0 and self.dom[j] & b:
                            self._assign(j, v)
                            changed = True
                            break
                    if self.failed:
                        return
            if not changed:
                return

    # -- search interface --------------------------------------------------

    def is_terminal(self):
        return self.failed or self.free == 0

    def select_variable(self, heuristic: Optional[str] = None) -> int:
        heuristic = heuristic or self.config.var_heuristic
        best_k, best_key = -1, None
        for k in range(len(self.val)):
            if self.val[k] >= 0:
                continue
            key = self.dom[k].bit_count() if heuristic == "dom" else self.degree(k)
            if best_key is None or key < best_key:
                best_k, best_key = k, key
        return best_k

    def legal_moves(self):
        if self._moves is None:
            if self.is_terminal():
                self._moves = []
            else:
                k = self.select_variable()
                self._var = k
                d = self.dom[k]
                vals = [v for v in range(self.n) if d >> v & 1]
                keyed = sorted((self.deletions(k, v), v) for v in vals)
                self._moves = [(k, v) for _, v in keyed]
        return self._moves

    def play(self, move):
        k, v = move
        return propagate(self, k, v)

    def score(self):
        return -self.free

    # -- views -------------------------------------------------------------

    def grids(self) -> Tuple[List[List[int]], List[List[int]]]:
        n = self.n
        return tuple(
            [[self.val[cell_index(n, s, r, c)] for c in range(n)] for r in range(n)]
            for s in range(2)
        )

    def __repr__(self):
        return f"LatinState(n={self.n}, free={self.free}, failed={self.failed})"


def propagate(state: LatinState, cell: int, value: int) -> LatinState:
    """Assign ``value`` to ``cell`` in a copy, forward-check, then run MAC
    when the configuration asks for it."""
    if state.val[cell] >= 0 or not state.dom[cell] >> value & 1:
        raise ValueError(f"value {value} is not in the domain of cell {cell}")
    new = state.copy()
    new._assign(cell, value)
    if new.config.mac and not new.failed:
        new._mac()
    return new


def mac_fixpoint(state: LatinState) -> LatinState:
    new = state.copy()
    if not new.failed:
        new._mac()
    return new


def select_variable(state: LatinState, heuristic: str) -> int:
    return state.select_variable(heuristic)


def latin_moves(state: LatinState):
    return state.legal_moves()


def apply_symmetry_breaking(state: LatinState) -> LatinState:
    """Fix both first rows and the first column of grid 0 to 0..n-1."""
    n = state.n
    if state.free != 2 * n * n:
        raise ValueError("symmetry breaking applies to the empty state only")
    new = state.copy()
    fixed = [(cell_index(n, s, 0, c), c) for s in range(2) for c in range(n)]
    fixed += [(cell_index(n, 0, r, 0), r) for r in range(1, n)]
    for k, v in fixed:
        if new.failed:
            break
        if new.val[k] == v:
            continue
        if new.val[k] >= 0 or not new.dom[k] >> v & 1:
            new.failed = True
            break
        new._assign(k, v)
        if new.config.mac and not new.failed:
            new._mac()
    return new


def initial_state(config: LatinConfig) -> LatinState:
    state = LatinState(config)
    if config.symmetry:
        return apply_symmetry_breaking(state)
    if config.mac:
        return mac_fixpoint(state)
    return state


def is_latin(grid: Sequence[Sequence[int]]) -> bool:
    n = len(grid)
    want = set(range(n))
    return all(len(row) == n and set(row) == want for row in grid) and all(
        {grid[r][c] for r in range(n)} == want for c in range(n)
    )


def is_graeco_latin(g0: Sequence[Sequence[int]], g1: Sequence[Sequence[int]]) -> bool:
    n = len(g0)
    if len(g1) != n or not (is_latin(g0) and is_latin(g1)):
        return False
    pairs = {(g0[r][c], g1[r][c]) for r in range(n) for c in range(n)}
    return len(pairs) == n * n


def format_pairs(g0, g1) -> str:
    """Rows of ``a,b`` cells separated by spaces."""
    n = len(g0)
    return "\n".join(
        " ".join(f"{g0[r][c]},{g1[r][c]}" for c in range(n)) for r in range(n)
    )


def parse_pairs(text: str):
    g0, g1 = [], []
    for line in text.strip().splitlines():
        cells = [cell.split(",") for cell in line.replace("&", " ").split()]
        g0.append([int(a) for a, _ in cells])
        g1.append([int(b) for _, b in cells])
    return g0, g1
