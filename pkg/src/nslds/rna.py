"""RNA inverse folding against a maximum base-pair folding model.

Sequences are built site by site from left to right, where a site is either
an unpaired position or a paired position together with its partner.  A
terminal sequence scores minus the number of positions whose folded
structure differs from the target.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Dict, List, Optional, Tuple

from .search import State

MIN_LOOP = 3
PAIRS = frozenset({"AU", "UA", "GC", "CG", "GU", "UG"})
PAIR_MOVES = ("GC", "CG", "UA", "AU", "GU", "UG")
SINGLE_MOVES = ("A", "U", "G", "C")


class StructureError(ValueError):
    pass


def pair_table(target: str, min_loop: int = MIN_LOOP) -> Dict[int, int]:
    """Partner map of a dot-bracket string, both directions."""
    stack: List[int] = []
    pairs: Dict[int, int] = {}
    for i, ch in enumerate(target):
        if ch == "(":
            stack.append(i)
        elif ch == ")":
            if not stack:
                raise StructureError(f"position {i}: unbalanced ')'")
            j = stack.pop()
            pairs[i], pairs[j] = j, i
        elif ch != ".":
            raise StructureError(f"position {i}: illegal character {ch!r}")
    if stack:
        raise StructureError(f"position {stack[-1]}: unbalanced '('")
    for j in sorted(pairs):
        i = pairs[j]
        if i > j and i - j - 1 < min_loop:
            raise StructureError(f"position {j}: hairpin shorter than {min_loop}")
    return pairs


@dataclass(frozen=True)
class RnaPuzzle:
    name: str
    target: str
    locked: Optional[str] = None
    pairs: Dict[int, int] = field(default_factory=dict, compare=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "pairs", pair_table(self.target))
        if self.locked is not None:
            if len(self.locked) != len(self.target):
                raise StructureError("lock string length differs from target")
            bad = set(self.locked) - set("NACGU")
            if bad:
                raise StructureError(f"illegal lock characters {sorted(bad)}")

    def __len__(self):
        return len(self.target)

    def lock(self, i: int) -> Optional[str]:
        if self.locked is None or self.locked[i] == "N":
            return None
        return self.locked[i]

    @property
    def sites(self) -> Tuple[int, ...]:
        return _sites(self.target)


@lru_cache(maxsize=256)
def _sites(target: str) -> Tuple[int, ...]:
    return tuple(i for i, ch in enumerate(target) if ch != ")")


def parse_dot_bracket(text: str, name: str = "puzzle", locked: Optional[str] = None) -> RnaPuzzle:
    return RnaPuzzle(name, text.strip(), locked)


def load_puzzles(text: str) -> List[RnaPuzzle]:
    """``name<TAB>dot-bracket[<TAB>locks]`` per line; ``#`` starts a comment."""
    out = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        if not raw.strip() or raw.lstrip().startswith("#"):
            continue
        parts = raw.rstrip("\n").split("\t")
        if len(parts) not in (2, 3):
            raise StructureError(f"line {lineno}: expected name<TAB>structure[<TAB>locks]")
        try:
            out.append(RnaPuzzle(parts[0], parts[1].strip(),
                                 parts[2].strip() if len(parts) == 3 else None))
        except StructureError as exc:
            raise StructureError(f"line {lineno}: {exc}") from None
    return out


def can_pair(a: str, b: str) -> bool:
    return a + b in PAIRS


@lru_cache(maxsize=4096)
def fold(seq: str, min_loop: int = MIN_LOOP) -> str:
    """Maximum base-pair structure.

    best[i][j] is the pair count on seq[i..j].  Traceback at (i, j) pairs i
    with the smallest partner that keeps the optimum, else leaves i unpaired.
    """
    n = len(seq)
    best = [[0] * (n + 1) for _ in range(n + 1)]

    def at(i, j):
        return best[i][j] if i <= j else 0

    for span in range(min_loop + 1, n):
        for i in range(n - span):
            j = i + span
            v = at(i + 1, j)
            si = seq[i]
            for k in range(i + min_loop + 1, j + 1):
                if can_pair(si, seq[k]):
                    c = 1 + at(i + 1, k - 1) + at(k + 1, j)
                    if c > v:
                        v = c
            best[i][j] = v

    out = ["."] * n
    stack = [(0, n - 1)]
    while stack:
        i, j = stack.pop()
        if i >= j:
            continue
        target = at(i, j)
        if target == 0:
            continue
        for k in range(i + min_loop + 1, j + 1):
            if can_pair(seq[i], seq[k]) and 1 + at(i + 1, k - 1) + at(k + 1, j) == target:
                out[i], out[k] = "(", ")"
                stack.append((k + 1, j))
                stack.append((i + 1, k - 1))
                break
        else:
            stack.append((i + 1, j))
    return "".join(out)


def mismatches(structure: str, target: str) -> int:
    return sum(a != b for a, b in zip(structure, target))


class RnaState(State):
    """Partial sequence; ``cursor`` indexes the puzzle's decision sites."""

    solved_score = 0
    __slots__ = ("puzzle", "seq", "cursor", "lock_failed", "_score")

    def __init__(self, puzzle: RnaPuzzle, seq=None, cursor=0, lock_failed=False):
        self.puzzle = puzzle
        self.seq = list(seq) if seq is not None else [None] * len(puzzle)
        self.cursor = cursor
        self.lock_failed = lock_failed or (
            cursor < len(puzzle.sites) and not self._site_moves())
        self._score = None

    def _site_moves(self) -> List[str]:
        p = self.puzzle
        i = p.sites[self.cursor]
        j = p.pairs.get(i)
        li = p.lock(i)
        if j is None:
            return [m for m in SINGLE_MOVES if li is None or m == li]
        lj = p.lock(j)
        return [m for m in PAIR_MOVES
                if (li is None or m[0] == li) and (lj is None or m[1] == lj)]

    def is_terminal(self):
        if self.lock_failed or self.cursor >= len(self.puzzle.sites):
            return True
        return not self._site_moves()

    def legal_moves(self):
        if self.lock_failed or self.cursor >= len(self.puzzle.sites):
            return []
        return self._site_moves()

    def play(self, move):
        p = self.puzzle
        i = p.sites[self.cursor]
        seq = self.seq[:]
        seq[i] = move[0]
        if len(move) == 2:
            seq[p.pairs[i]] = move[1]
        return RnaState(p, seq, self.cursor + 1)

    @property
    def sequence(self) -> str:
        return "".join(b or "N" for b in self.seq)

    def score(self):
        if self._score is None:
            if self.lock_failed or None in self.seq:
                self._score = -len(self.puzzle)
            else:
                self._score = -mismatches(fold(self.sequence), self.puzzle.target)
        return self._score

    def __repr__(self):
        return f"RnaState({self.sequence!r})"


def random_structure(rng, length: int, pair_prob: float = 0.5) -> str:
    """Random nested dot-bracket string respecting the minimum loop."""
    out = ["."] * length

    def fill(i, j):
        while i <= j:
            if j - i >= MIN_LOOP + 1 and rng.random() < pair_prob:
                k = rng.randint(i + MIN_LOOP + 1, j)
                out[i], out[k] = "(", ")"
                fill(i + 1, k - 1)
                i = k + 1
            else:
                i += 1

    fill(0, length - 1)
    return "".join(out)
