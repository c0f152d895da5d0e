"""Matrices indexed by unordered vertex pairs.

Pairs are ordered lexicographically, (1,2), (1,3), ..., (1,n), (2,3), ...,
and that order is shared by every matrix, report and export.
"""
import enum
import io
import logging
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

from .errors import OverflowGuard, TooSmall, UnknownPair
from .tree import DistanceTable, Tree, steiner_size

logger = logging.getLogger(__name__)

Pair = tuple[int, int]


class MatrixKind(str, enum.Enum):
    MAX4PC = "max4pc"
    MIN4PC = "min4pc"
    STEINER2 = "steiner2"


def normalize_pair(pair: Iterable[int]) -> Pair:
    u, v = sorted(pair)
    return (u, v)


@dataclass(frozen=True)
class PairIndex:
    n: int

    @cached_property
    def pairs(self) -> tuple[Pair, ...]:
        return tuple((i, j) for i in range(1, self.n + 1) for j in range(i + 1, self.n + 1))

    @cached_property
    def _positions(self) -> dict[Pair, int]:
        return {pair: k for k, pair in enumerate(self.pairs)}

    def __len__(self) -> int:
        return len(self.pairs)

    def pair_at(self, k: int) -> Pair:
        return self.pairs[k]

    def index_of(self, pair: Iterable[int]) -> int:
        try:
            key = normalize_pair(pair)
        except ValueError:
            raise UnknownPair(f"not a pair: {pair!r}")
        try:
            return self._positions[key]
        except KeyError:
            raise UnknownPair(f"{key} is not a pair of distinct vertices in 1..{self.n}")

    def nested_permutation(self) -> list[int]:
        """Positions listing all pairs of 1..n-1 (recursively) before {i, n}."""
        order: list[Pair] = []
        for top in range(2, self.n + 1):
            order.extend((i, top) for i in range(1, top))
        return [self._positions[pair] for pair in order]


@dataclass(frozen=True)
class PairMatrix:
    kind: MatrixKind
    n: int
    entries: np.ndarray
    index: PairIndex

    @property
    def size(self) -> int:
        return len(self.index)


def _three_sums(d: DistanceTable, a: Pair, b: Pair) -> tuple[int, int, int]:
    (w, x), (y, z) = a, b
    return (d(w, x) + d(y, z), d(w, y) + d(x, z), d(w, z) + d(x, y))


def max4pc_entry(d: DistanceTable, a: Sequence[int], b: Sequence[int]) -> int:
    return max(_three_sums(d, tuple(a), tuple(b)))


def min4pc_entry(d: DistanceTable, a: Sequence[int], b: Sequence[int]) -> int:
    return min(_three_sums(d, tuple(a), tuple(b)))


def _sum_stack(d: DistanceTable, index: PairIndex) -> np.ndarray:
    pairs = np.array(index.pairs, dtype=np.int64) - 1
    W, X = pairs[:, 0], pairs[:, 1]
    D = d.d
    own = D[W, X]
    return np.stack([
        own[:, None] + own[None, :],
        D[W[:, None], W[None, :]] + D[X[:, None], X[None, :]],
        D[W[:, None], X[None, :]] + D[X[:, None], W[None, :]],
    ])


def _steiner_entries(t: Tree, index: PairIndex) -> np.ndarray:
    size = len(index)
    out = np.zeros((size, size), dtype=np.int64)
    for r, (w, x) in enumerate(index.pairs):
        for c in range(r, size):
            y, z = index.pairs[c]
            out[r, c] = out[c, r] = steiner_size(t, (w, x, y, z))
    return out


def build_matrix(t: Tree, kind: MatrixKind | str) -> PairMatrix:
    kind = MatrixKind(kind)
    if t.n < 2:
        raise TooSmall("pair matrices need at least two vertices")
    d = t.distances
    if 4 * int(d.d.max()) >= np.iinfo(np.int64).max:
        raise OverflowGuard(f"distances up to {int(d.d.max())} overflow int64 sums")

    index = PairIndex(t.n)
    if kind is MatrixKind.STEINER2:
        entries = _steiner_entries(t, index)
    else:
        sums = _sum_stack(d, index)
        entries = sums.max(axis=0) if kind is MatrixKind.MAX4PC else sums.min(axis=0)
    logger.debug(f"built {kind.value} matrix for n={t.n} ({len(index)} pairs)")
    entries.setflags(write=False)
    return PairMatrix(kind=kind, n=t.n, entries=entries, index=index)


def row_of(m: PairMatrix, pair: Sequence[int]) -> np.ndarray:
    return m.entries[m.index.index_of(pair)]


def submatrix(m: PairMatrix, rows: Sequence[Sequence[int]] | None,
              cols: Sequence[Sequence[int]] | None) -> np.ndarray:
    """M[rows, cols] in the order given; None selects every pair."""
    r = range(m.size) if rows is None else [m.index.index_of(p) for p in rows]
    c = range(m.size) if cols is None else [m.index.index_of(p) for p in cols]
    return m.entries[np.ix_(list(r), list(c))]


def pair_label(pair: Pair) -> str:
    return f"{pair[0]}-{pair[1]}"


def to_csv(m: PairMatrix) -> str:
    buf = io.StringIO()
    buf.write(",".join(pair_label(p) for p in m.index.pairs) + "\n")
    for row in m.entries.tolist():
        buf.write(",".join(str(v) for v in row) + "\n")
    return buf.getvalue()


def to_json(m: PairMatrix) -> str:
    from .models import PairMatrixArtifact

    return PairMatrixArtifact(
        kind=m.kind.value,
        n=m.n,
        pairs=[list(p) for p in m.index.pairs],
        entries=m.entries.tolist(),
    ).model_dump_json()
