"""Labeled trees: parsing, Prüfer codes, distances and Steiner subtrees.

Vertex labels are 1-based everywhere a caller can see them. numpy arrays
owned by this module are indexed by ``label - 1``.
"""
import heapq
import itertools
import logging
import re
from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Iterator, Sequence

import numpy as np

from .errors import LabelOutOfRange, MalformedInput, NotATree, TooSmall

logger = logging.getLogger(__name__)

Edge = tuple[int, int]


@dataclass(frozen=True)
class DistanceTable:
    """All-pairs hop counts plus the BFS predecessor of every vertex, per root."""

    d: np.ndarray
    parent: np.ndarray

    @property
    def n(self) -> int:
        return self.d.shape[0]

    def __call__(self, u: int, v: int) -> int:
        n = self.d.shape[0]
        if not (1 <= u <= n and 1 <= v <= n):
            raise LabelOutOfRange(f"label pair ({u}, {v}) outside 1..{n}")
        return int(self.d[u - 1, v - 1])


@dataclass(frozen=True)
class LeafProfile:
    p: int
    pendants: tuple[int, ...]
    quasi_pendants: tuple[int, ...]


@dataclass(frozen=True)
class Tree:
    n: int
    edges: tuple[Edge, ...]
    adjacency: tuple[tuple[int, ...], ...] = field(compare=False, repr=False)

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[Sequence[int]]) -> "Tree":
        if n < 1:
            raise MalformedInput(f"vertex count must be positive, got {n}")
        normalized = []
        for edge in edges:
            u, v = int(edge[0]), int(edge[1])
            for label in (u, v):
                if not 1 <= label <= n:
                    raise LabelOutOfRange(f"label {label} outside 1..{n}")
            if u == v:
                raise NotATree(f"self-loop at vertex {u}")
            normalized.append((min(u, v), max(u, v)))

        if len(set(normalized)) != len(normalized):
            raise NotATree("duplicate edge")
        if len(normalized) != n - 1:
            raise NotATree(f"expected {n - 1} edges, got {len(normalized)}")

        adjacency: list[list[int]] = [[] for _ in range(n + 1)]
        for u, v in normalized:
            adjacency[u].append(v)
            adjacency[v].append(u)

        # n-1 distinct edges and connected means acyclic
        seen = {1}
        queue = deque([1])
        while queue:
            u = queue.popleft()
            for v in adjacency[u]:
                if v not in seen:
                    seen.add(v)
                    queue.append(v)
        if len(seen) != n:
            raise NotATree(f"graph is disconnected ({len(seen)} of {n} vertices reachable)")

        return cls(
            n=n,
            edges=tuple(sorted(normalized)),
            adjacency=tuple(tuple(sorted(nbrs)) for nbrs in adjacency),
        )

    def neighbors(self, v: int) -> tuple[int, ...]:
        return self.adjacency[v]

    def degree(self, v: int) -> int:
        return len(self.adjacency[v])

    @property
    def vertices(self) -> range:
        return range(1, self.n + 1)

    @cached_property
    def leaves(self) -> tuple[int, ...]:
        return tuple(v for v in self.vertices if self.degree(v) == 1)

    @cached_property
    def internal_vertices(self) -> tuple[int, ...]:
        return tuple(v for v in self.vertices if self.degree(v) > 1)

    @property
    def is_star(self) -> bool:
        return self.n >= 3 and len(self.internal_vertices) == 1

    @cached_property
    def distances(self) -> DistanceTable:
        return all_pairs_distances(self)

    def to_edge_list(self) -> str:
        lines = [str(self.n)] + [f"{u} {v}" for u, v in self.edges]
        return "\n".join(lines) + "\n"

    def remove_leaf(self, leaf: int) -> "Tree":
        """Delete a pendant vertex and shift larger labels down by one."""
        if self.degree(leaf) != 1 or self.n < 3:
            raise NotATree(f"vertex {leaf} is not a removable leaf")

        def relabel(v: int) -> int:
            return v - 1 if v > leaf else v

        kept = [(relabel(u), relabel(v)) for u, v in self.edges if leaf not in (u, v)]
        return Tree.from_edges(self.n - 1, kept)

    def component_without(self, start: int, removed: int) -> frozenset[int]:
        """Vertices of the component of T - removed that contains start."""
        seen = {start}
        queue = deque([start])
        while queue:
            u = queue.popleft()
            for v in self.adjacency[u]:
                if v != removed and v not in seen:
                    seen.add(v)
                    queue.append(v)
        return frozenset(seen)


_EDGE_LINE = re.compile(r"^(\S+)\s+(\S+)$")


def parse_tree(text: str) -> Tree:
    """Parse the edge-list format: first line n, then one "u v" per edge."""
    lines = []
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if line:
            lines.append(line)
    if not lines:
        raise MalformedInput("empty edge list")

    try:
        n = int(lines[0])
    except ValueError:
        raise MalformedInput(f"first line must be the vertex count, got {lines[0]!r}")

    edges = []
    for line in lines[1:]:
        match = _EDGE_LINE.match(line)
        if not match:
            raise MalformedInput(f"expected 'u v', got {line!r}")
        try:
            u, v = int(match.group(1)), int(match.group(2))
        except ValueError:
            raise MalformedInput(f"non-integer label in {line!r}")
        if u == v:
            raise MalformedInput(f"edge endpoints must differ: {line!r}")
        edges.append((u, v))
    return Tree.from_edges(n, edges)


def parse_edge_string(spec: str) -> Tree:
    """Parse the inline form "1-2,2-3"; n is the largest label."""
    edges = []
    for token in spec.replace(" ", "").split(","):
        if not token:
            continue
        parts = token.split("-")
        if len(parts) != 2:
            raise MalformedInput(f"expected 'u-v', got {token!r}")
        try:
            edges.append((int(parts[0]), int(parts[1])))
        except ValueError:
            raise MalformedInput(f"non-integer label in {token!r}")
    if not edges:
        raise MalformedInput("inline edge list is empty")
    n = max(max(e) for e in edges)
    return Tree.from_edges(n, edges)


def all_pairs_distances(t: Tree) -> DistanceTable:
    n = t.n
    d = np.zeros((n, n), dtype=np.int64)
    parent = np.full((n, n), -1, dtype=np.int64)
    for root in t.vertices:
        r = root - 1
        seen = [False] * (n + 1)
        seen[root] = True
        queue = deque([root])
        while queue:
            u = queue.popleft()
            for v in t.adjacency[u]:
                if not seen[v]:
                    seen[v] = True
                    d[r, v - 1] = d[r, u - 1] + 1
                    parent[r, v - 1] = u - 1
                    queue.append(v)
    return DistanceTable(d=d, parent=parent)


def check_four_point(d: DistanceTable, w: int, x: int, y: int, z: int) -> bool:
    sums = sorted((d(w, x) + d(y, z), d(w, y) + d(x, z), d(w, z) + d(x, y)))
    return sums[2] == sums[1]


def four_point_violations(d: DistanceTable, sample: int | None = None,
                          seed: int = 0) -> np.ndarray:
    """Quadruples (1-based rows w, x, y, z) whose largest 4PC sum is unique.

    Every quadruple is examined unless ``sample`` is given, in which case that
    many quadruples are drawn uniformly with replacement.
    """
    D = d.d
    if sample is None:
        s1 = D[:, :, None, None] + D[None, None, :, :]
        s2 = D[:, None, :, None] + D[None, :, None, :]
        s3 = D[:, None, None, :] + D[None, :, :, None]
        stacked = np.sort(np.stack([s1, s2, s3]), axis=0)
        bad = np.argwhere(stacked[2] != stacked[1])
    else:
        rng = np.random.default_rng(seed)
        q = rng.integers(0, d.n, size=(sample, 4))
        w, x, y, z = q.T
        stacked = np.sort(np.stack([
            D[w, x] + D[y, z], D[w, y] + D[x, z], D[w, z] + D[x, y],
        ]), axis=0)
        bad = q[stacked[2] != stacked[1]]
    return bad + 1


def steiner_size(t: Tree, s: Iterable[int]) -> int:
    """Edge count of the smallest subtree spanning the vertices in s."""
    members = sorted(set(s))
    if not members:
        raise MalformedInput("Steiner set must be nonempty")
    for v in members:
        if not 1 <= v <= t.n:
            raise LabelOutOfRange(f"label {v} outside 1..{t.n}")
    root = members[0] - 1
    parent = t.distances.parent[root]
    covered: set[int] = set()
    # union of root-to-member paths; each covered vertex owns the edge to its parent
    for v in members[1:]:
        u = v - 1
        while u != root and u not in covered:
            covered.add(u)
            u = int(parent[u])
    return len(covered)


def leaf_profile(t: Tree) -> LeafProfile:
    pendants = t.leaves
    quasi = sorted({t.neighbors(v)[0] for v in pendants})
    return LeafProfile(p=len(pendants), pendants=pendants, quasi_pendants=tuple(quasi))


def prufer_decode(seq: Sequence[int]) -> Tree:
    n = len(seq) + 2
    for label in seq:
        if not 1 <= label <= n:
            raise LabelOutOfRange(f"Prüfer label {label} outside 1..{n}")
    degree = [1] * (n + 1)
    for label in seq:
        degree[label] += 1
    heap = [v for v in range(1, n + 1) if degree[v] == 1]
    heapq.heapify(heap)

    edges = []
    for label in seq:
        leaf = heapq.heappop(heap)
        edges.append((leaf, label))
        degree[label] -= 1
        if degree[label] == 1:
            heapq.heappush(heap, label)
    edges.append((heapq.heappop(heap), heapq.heappop(heap)))
    return Tree.from_edges(n, edges)


def prufer_encode(t: Tree) -> list[int]:
    if t.n < 2:
        raise TooSmall("Prüfer codes need at least two vertices")
    degree = [0] + [t.degree(v) for v in t.vertices]
    removed = [False] * (t.n + 1)
    heap = list(t.leaves)
    heapq.heapify(heap)

    seq = []
    for _ in range(t.n - 2):
        leaf = heapq.heappop(heap)
        removed[leaf] = True
        nbr = next(v for v in t.adjacency[leaf] if not removed[v])
        seq.append(nbr)
        degree[nbr] -= 1
        if degree[nbr] == 1:
            heapq.heappush(heap, nbr)
    return seq


def random_tree(n: int, seed: int) -> Tree:
    """Uniform labeled tree on n vertices, reproducible from (n, seed)."""
    if n < 1:
        raise MalformedInput(f"vertex count must be positive, got {n}")
    if n == 1:
        return Tree.from_edges(1, [])
    rng = np.random.default_rng(seed)
    return prufer_decode(rng.integers(1, n + 1, size=n - 2).tolist())


def random_prufer_sequences(n: int, count: int, seed: int) -> list[list[int]]:
    rng = np.random.default_rng(seed)
    return [rng.integers(1, n + 1, size=n - 2).tolist() for _ in range(count)]


def all_prufer_sequences(n: int) -> Iterator[tuple[int, ...]]:
    """Every Prüfer sequence for n >= 2, in lexicographic order."""
    return itertools.product(range(1, n + 1), repeat=n - 2)


def star(n: int, center: int = 1) -> Tree:
    return Tree.from_edges(n, [(center, v) for v in range(1, n + 1) if v != center])


def path(n: int) -> Tree:
    return Tree.from_edges(n, [(v, v + 1) for v in range(1, n)])
