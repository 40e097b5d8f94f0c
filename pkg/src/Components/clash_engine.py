"""
Polynomial-time payoffs for pairs of symmetric strategies.

The clash matrix M[i][j] = sign(s_a[i] - s_b[j]) of two sorted allocations splits into a win
area W (+1), tie area T (0) and loss area L (-1). A permutation pairing A's battlefields with
B's is a placement of n non-attacking rooks on M, so the payoff only needs

    h(k_W, k_L) = #placements with k_W rooks on W and k_L rooks on L,

which `rook_counts` computes exactly by cutting the matrix along its staircase of knots.
Indices in comments are 1-based, as in the recurrence; arrays are 0-based.
"""
import math
import sys
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import NamedTuple, Optional

import numpy as np

from src.Components.game_model import AggregationKind, SymmetricStrategy, aggregate
from src.exception import InvalidInputError
from src.logger import logging

WIN, TIE, LOSS = 1, 0, -1


@dataclass(frozen=True, eq=False)
class ClashMatrix:
    cells: np.ndarray

    def __post_init__(self):
        cells = np.array(self.cells, dtype=np.int8)
        if cells.ndim != 2 or cells.shape[0] != cells.shape[1]:
            error_message = f"Clash matrix must be square, got shape {cells.shape}"
            logging.error(error_message)
            raise InvalidInputError(error_message)
        cells.setflags(write=False)
        object.__setattr__(self, "cells", cells)

    @property
    def n(self) -> int:
        return self.cells.shape[0]

    def __eq__(self, other):
        return isinstance(other, ClashMatrix) and np.array_equal(self.cells, other.cells)

    def __hash__(self):
        return hash(self.cells.tobytes())

    def tolist(self) -> list:
        return self.cells.tolist()

    def uniform_value(self, i: int, j: int) -> Optional[int]:
        """Area value if the leading i x j submatrix is uniform, TIE if it is empty, else None."""
        if i == 0 or j == 0:
            return TIE
        sub = self.cells[:i, :j]
        value = int(sub[0, 0])
        return value if bool((sub == value).all()) else None

    def tie_rectangles(self) -> list:
        """
        Splits the tie area T into rectangles.

        Scans T cells row-major; each unvisited cell grows right, then down while the whole row
        segment stays tied. Returns half-open (row_start, row_stop, col_start, col_stop) boxes.
        """
        cells = self.cells
        visited = np.zeros(cells.shape, dtype=bool)
        rectangles = []
        for r, c in zip(*np.nonzero(cells == TIE)):
            if visited[r, c]:
                continue
            c_stop = c
            while c_stop < self.n and cells[r, c_stop] == TIE and not visited[r, c_stop]:
                c_stop += 1
            r_stop = r + 1
            while r_stop < self.n and bool((cells[r_stop, c:c_stop] == TIE).all()):
                r_stop += 1
            visited[r:r_stop, c:c_stop] = True
            rectangles.append((int(r), int(r_stop), int(c), int(c_stop)))
        return rectangles


class Knot(NamedTuple):
    i: int
    j: int
    # area value at the corner (i, j); for the base knot, the value of the uniform submatrix
    corner: int
    base: bool


@dataclass(frozen=True)
class KnotStaircase:
    steps: tuple

    @property
    def knots(self) -> list:
        return [(knot.i, knot.j) for knot in self.steps]

    def __len__(self):
        return len(self.steps)

    def bands(self):
        """Yields (previous, current) knot pairs, i.e. every cut-off made by the recurrence."""
        for prev, cur in zip(self.steps, self.steps[1:]):
            yield prev, cur


@dataclass(frozen=True)
class RookCountTable:
    n: int
    counts: dict
    table_entries: int = field(default=0, compare=False)

    def __getitem__(self, key) -> int:
        return self.counts.get(tuple(key), 0)

    def total(self) -> int:
        return sum(self.counts.values())

    def nonzero(self) -> dict:
        return {key: value for key, value in self.counts.items() if value}


def build_clash_matrix(s_a: SymmetricStrategy, s_b: SymmetricStrategy) -> ClashMatrix:
    """
    Clash matrix of two sorted allocations.

    Args:
        s_a (SymmetricStrategy): Row player's allocation.
        s_b (SymmetricStrategy): Column player's allocation.

    Raises:
        InvalidInputError: If the battlefield counts differ.

    Returns:
        ClashMatrix: cells[i][j] = sign(s_a[i] - s_b[j]).
    """
    if s_a.n != s_b.n:
        error_message = f"Strategies have different battlefield counts: {s_a.n} vs {s_b.n}"
        logging.error(error_message)
        raise InvalidInputError(error_message)
    a = np.asarray(s_a.parts, dtype=np.int64)
    b = np.asarray(s_b.parts, dtype=np.int64)
    return ClashMatrix(np.sign(np.subtract.outer(a, b)))


def _last_index(mask: np.ndarray) -> int:
    """1-based position of the last True entry, 0 if there is none."""
    hits = np.flatnonzero(mask)
    return int(hits[-1]) + 1 if hits.size else 0


def detect_knots(m: ClashMatrix) -> KnotStaircase:
    """
    Staircase of cut-off points, descending from the corner (n, n).

    At each corner (i, j) the cut depends on the corner's area:
      - L: drop the bottom rows that are entirely L, (i', j') = (last row of column j not in L, j)
      - W: drop the right columns that are entirely W, (i', j') = (i, last column of row i not in W)
      - T: drop the tied block in the corner together with the L band to its left and the
        W band above it, i' = last row of column j in W, j' = last column of row i in L.
    The descent stops at the first submatrix that is uniform (or empty); that knot is the base.

    Returns:
        KnotStaircase: knots in ascending order, ending at (n, n).
    """
    cells = m.cells
    i = j = m.n
    descent = []
    while True:
        uniform = m.uniform_value(i, j)
        if uniform is not None:
            descent.append(Knot(i, j, uniform, True))
            break
        corner = int(cells[i - 1, j - 1])
        descent.append(Knot(i, j, corner, False))
        if corner == LOSS:
            i = _last_index(cells[:i, j - 1] != LOSS)
        elif corner == WIN:
            j = _last_index(cells[i - 1, :j] != WIN)
        else:
            i, j = _last_index(cells[:i, j - 1] == WIN), _last_index(cells[i - 1, :j] == LOSS)
    return KnotStaircase(tuple(reversed(descent)))


@lru_cache(maxsize=None)
def rect_count(i: int, j: int, t: int) -> int:
    """
    Ways to place t non-attacking rooks on a uniform i x j board: C(j,t) * C(i,t) * t!.

    Raises:
        InvalidInputError: For negative arguments.
    """
    if i < 0 or j < 0 or t < 0:
        error_message = f"rect_count needs non-negative arguments, got ({i}, {j}, {t})"
        logging.error(error_message)
        raise InvalidInputError(error_message)
    if t > min(i, j):
        return 0
    return math.comb(j, t) * math.comb(i, t) * math.factorial(t)


def _base_slab(knot: Knot) -> np.ndarray:
    size = min(knot.i, knot.j) + 1
    slab = np.zeros((size, size, size), dtype=object)
    for rooks in range(size):
        ways = rect_count(knot.i, knot.j, rooks)
        if knot.corner == WIN:
            slab[rooks, rooks, 0] = ways
        elif knot.corner == LOSS:
            slab[rooks, 0, rooks] = ways
        else:
            slab[rooks, 0, 0] = ways
    return slab


def _cut_slab(prev: Knot, cur: Knot, source: np.ndarray) -> np.ndarray:
    """
    Fills H(i, j, m, k_W, k_L) for the knot `cur` from the slab of `prev` = (i', j').

    Every m splits into m0 rooks kept in the i' x j' submatrix, r1 in the L band
    (rows i'+1..i, cols 1..j'), r2 in the tied block (rows i'+1..i, cols j'+1..j) and r3 in the
    W band (rows 1..i', cols j'+1..j). L and W corners are the zero-width and zero-height cases
    of the same sum, where r2 = r3 = 0 or r1 = r2 = 0 fall out of the empty ranges.
    """
    i, j, ip, jp = cur.i, cur.j, prev.i, prev.j
    size = min(i, j) + 1
    target = np.zeros((size, size, size), dtype=object)
    for m0 in range(source.shape[0]):
        # k_W + k_L <= m0 so only the leading (m0+1) x (m0+1) block can be non-zero
        block = source[m0, :m0 + 1, :m0 + 1]
        if not block.any():
            continue
        for r1 in range(min(i - ip, jp - m0) + 1):
            w1 = rect_count(i - ip, jp - m0, r1)
            for r2 in range(min(i - ip - r1, j - jp) + 1):
                w2 = w1 * rect_count(i - ip - r1, j - jp, r2)
                for r3 in range(min(ip - m0, j - jp - r2) + 1):
                    weight = w2 * rect_count(ip - m0, j - jp - r2, r3)
                    if not weight:
                        continue
                    rooks = m0 + r1 + r2 + r3
                    target[rooks, r3:r3 + m0 + 1, r1:r1 + m0 + 1] += weight * block
    return target


def rook_counts(m: ClashMatrix, staircase: Optional[KnotStaircase] = None) -> RookCountTable:
    """
    Exact h(k_W, k_L) for a clash matrix via the knot dynamic program.

    Slabs indexed (m, k_W, k_L) are filled knot by knot in ascending order; only the
    previous slab is kept alive, `table_entries` reports the entries the full table would hold.

    Args:
        m (ClashMatrix): Clash matrix of a sorted strategy pair.
        staircase (KnotStaircase, optional): Precomputed knots of `m`.

    Returns:
        RookCountTable: Non-zero counts keyed by (k_W, k_L); they sum to n!.
    """
    staircase = staircase or detect_knots(m)
    slab = None
    prev = None
    table_entries = 0
    for knot in staircase.steps:
        slab = _base_slab(knot) if knot.base else _cut_slab(prev, knot, slab)
        table_entries += slab.size
        prev = knot

    n = m.n
    final = slab[n]
    counts = {
        (int(k_w), int(k_l)): int(final[k_w, k_l])
        for k_w, k_l in zip(*np.nonzero(final))
    }
    return RookCountTable(n=n, counts=counts, table_entries=table_entries)


def payoff_from_counts(table: RookCountTable, agg: AggregationKind) -> Fraction:
    """(1/n!) * sum of h(k_W, k_L) * f_n(k_W, k_L)."""
    n = table.n
    total = sum(count * aggregate(agg, n, k_w, k_l) for (k_w, k_l), count in table.counts.items())
    return Fraction(total, math.factorial(n))


def payoff(s_a: SymmetricStrategy, s_b: SymmetricStrategy, agg: AggregationKind) -> Fraction:
    """
    Expected payoff to A when both players play their symmetric strategies.

    Args:
        s_a (SymmetricStrategy): A's sorted allocation.
        s_b (SymmetricStrategy): B's sorted allocation.
        agg (AggregationKind): Aggregation of the battlefield outcomes.

    Raises:
        InvalidInputError: If the battlefield counts differ.

    Returns:
        Fraction: Exact payoff with denominator dividing n!.
    """
    agg = AggregationKind.parse(agg)
    return payoff_from_counts(rook_counts(build_clash_matrix(s_a, s_b)), agg)


def table_budget(n: int) -> int:
    """Entry budget of the knot table, 2n * (n+1)^3."""
    return 2 * n * (n + 1) ** 3


if __name__ == "__main__":
    a = SymmetricStrategy(tuple(int(x) for x in sys.argv[1].split(","))) if len(sys.argv) > 2 else SymmetricStrategy((3, 1, 0))
    b = SymmetricStrategy(tuple(int(x) for x in sys.argv[2].split(","))) if len(sys.argv) > 2 else SymmetricStrategy((2, 2, 0))
    matrix = build_clash_matrix(a, b)
    print(matrix.cells)
    print(f"knots: {detect_knots(matrix).knots}")
    print(f"h: {rook_counts(matrix).nonzero()}")
    for kind in AggregationKind:
        print(f"{kind.value}: {payoff(a, b, kind)}")
