"""Snake-in-the-box: longest induced paths in the hypercube.

Vertices are ints whose bits are the coordinates.  The state keeps a bitmask
of blocked vertices (every path vertex plus every neighbour of a non-head
path vertex), so a flip of the head is legal iff it lands outside the mask.
"""

from __future__ import annotations

from typing import Iterable, List, Sequence

from .search import State

DEAD_END_PENALTY = 10**6
MAX_DIMENSION = 20


def neighbours(v: int, dim: int) -> List[int]:
    return [v ^ (1 << i) for i in range(dim)]


def _closed_mask(v: int, dim: int) -> int:
    mask = 1 << v
    for i in range(dim):
        mask |= 1 << (v ^ (1 << i))
    return mask


def is_snake(path: Sequence[int], dim: int) -> bool:
    """Independent check of the induced-path property on a whole path."""
    if not path or len(set(path)) != len(path):
        return False
    if any(not 0 <= v < (1 << dim) for v in path):
        return False
    for a, b in zip(path, path[1:]):
        if bin(a ^ b).count("1") != 1:
            return False
    pos = {v: i for i, v in enumerate(path)}
    for i, v in enumerate(path):
        for w in neighbours(v, dim):
            j = pos.get(w)
            if j is not None and abs(i - j) != 1:
                return False
    return True


class SnakeState(State):
    __slots__ = ("dimension", "path", "blocked", "_moves")

    def __init__(self, dimension: int, path=(0,), blocked=None):
        if not 1 <= dimension <= MAX_DIMENSION:
            raise ValueError(f"dimension must be in 1..{MAX_DIMENSION}")
        self.dimension = dimension
        self.path = tuple(path)
        if blocked is None:
            blocked = 1 << self.path[-1]
            for v in self.path[:-1]:
                blocked |= _closed_mask(v, dimension)
        self.blocked = blocked
        self._moves = None

    @classmethod
    def from_path(cls, dimension: int, path: Iterable[int]) -> "SnakeState":
        path = tuple(path)
        if not path or path[0] != 0:
            raise ValueError("a snake path must start at vertex 0")
        if not is_snake(path, dimension):
            raise ValueError(f"not a snake in dimension {dimension}: {path}")
        return cls(dimension, path)

    def _extensions(self, head: int, blocked: int) -> List[int]:
        return [
            i for i in range(self.dimension)
            if not (blocked >> (head ^ (1 << i))) & 1
        ]

    def extensions(self) -> List[int]:
        """Legal flipped-bit indices from the head, in bit order."""
        return self._extensions(self.path[-1], self.blocked)

    def move_score(self, bit: int) -> int:
        head = self.path[-1]
        v = head ^ (1 << bit)
        count = len(self._extensions(v, self.blocked | _closed_mask(head, self.dimension)))
        return count if count else DEAD_END_PENALTY

    def is_terminal(self):
        return not self.legal_moves()

    def legal_moves(self):
        if self._moves is None:
            self._moves = sorted(self.extensions(), key=lambda b: (self.move_score(b), b))
        return self._moves

    def play(self, bit):
        head = self.path[-1]
        v = head ^ (1 << bit)
        blocked = self.blocked | _closed_mask(head, self.dimension) | (1 << v)
        return SnakeState(self.dimension, self.path + (v,), blocked)

    def score(self):
        return len(self.path) - 1

    def __repr__(self):
        return f"SnakeState(dim={self.dimension}, len={self.score()})"

