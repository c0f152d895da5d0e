"""Bases of the Max4PC row space from a traversal of the blocks of LG(T).

The line graph is never materialized. Its blocks are the edge stars of the
internal vertices of T, and an internal edge {v, w} is a live cut vertex
exactly while neither block b(v) nor b(w) has been consumed.
"""
import logging
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .errors import BadStarIndices, IsAStar, NotALeaf, NotAStar, TooSmall
from .models import BasisSet, BlockContribution, ChoicePolicy
from .tree import Tree

logger = logging.getLogger(__name__)

Pair = tuple[int, int]


def _edge(u: int, v: int) -> Pair:
    return (u, v) if u < v else (v, u)


@dataclass(frozen=True)
class BlockTree:
    blocks: dict[int, tuple[Pair, ...]]
    lg_cut_vertices: tuple[Pair, ...]
    block_adjacency: dict[int, tuple[int, ...]]

    def __len__(self) -> int:
        return len(self.blocks)

    def is_shared(self, edge: Pair) -> bool:
        return edge[0] in self.blocks and edge[1] in self.blocks


def block_tree(t: Tree) -> BlockTree:
    if t.n < 3:
        raise TooSmall(f"LG(T) has no block structure for n={t.n}")
    internal = set(t.internal_vertices)
    blocks = {v: tuple(_edge(v, w) for w in t.neighbors(v)) for v in t.internal_vertices}
    cuts = tuple(e for e in t.edges if e[0] in internal and e[1] in internal)
    adjacency = {v: tuple(w for w in t.neighbors(v) if w in internal) for v in t.internal_vertices}
    return BlockTree(blocks=blocks, lg_cut_vertices=cuts, block_adjacency=adjacency)


def _chooser(policy: ChoicePolicy) -> Callable[[Sequence], object]:
    if policy.mode == "min":
        return min
    if policy.mode == "max":
        return max
    rng = np.random.default_rng(policy.seed)

    def pick(candidates):
        ordered = sorted(candidates)
        return ordered[int(rng.integers(len(ordered)))]

    return pick


def _symmetric_difference(a: Pair, b: Pair) -> Pair:
    diff = set(a) ^ set(b)
    if len(diff) != 2:
        raise AssertionError(f"{a} and {b} do not share exactly one vertex")
    return _edge(*diff)


def build_basis(t: Tree, start_leaf: int, policy: ChoicePolicy | None = None) -> BasisSet:
    policy = policy or ChoicePolicy()
    if t.n < 3:
        raise TooSmall(f"no basis traversal for n={t.n}")
    if not 1 <= start_leaf <= t.n or t.degree(start_leaf) != 1:
        raise NotALeaf(f"vertex {start_leaf} is not a pendant vertex")
    if t.is_star:
        raise IsAStar("star trees take their bases from star_basis")

    bt = block_tree(t)
    pick = _chooser(policy)
    consumed: set[int] = set()
    pending: list[Pair] = []
    pairs: list[Pair] = []
    provenance: list[BlockContribution] = []

    start = _edge(start_leaf, t.neighbors(start_leaf)[0])
    while True:
        # Step 1: the starting vertex lies in exactly one unconsumed block
        owners = [v for v in start if v in bt.blocks and v not in consumed]
        if len(owners) != 1:
            raise AssertionError(f"starting vertex {start} lies in {len(owners)} live blocks")
        v = owners[0]
        members = bt.blocks[v]
        live_cuts = sorted(e for e in members
                           if e != start and bt.is_shared(e) and (set(e) - {v}).pop() not in consumed)

        if live_cuts:
            chosen = pick(live_cuts)
            pending.extend(e for e in live_cuts if e != chosen)
            added = [start, _symmetric_difference(start, chosen)]
            step = "2c"
        else:
            chosen = pick(sorted(e for e in members if e != start))
            added = [start, chosen]
            step = "3b"

        consumed.add(v)
        pairs.extend(added)
        provenance.append(BlockContribution(block_internal_vertex=v, step=step, pairs=added))
        logger.debug(f"block {v}: step {step}, start {start}, chosen {chosen}, added {added}")

        if step == "2c":
            start = chosen
        elif pending:
            start = pending.pop()
        else:
            break

    return BasisSet(start_leaf=start_leaf, policy=policy, pairs=pairs, provenance=provenance)


def star_center(t: Tree) -> int:
    if not t.is_star:
        raise NotAStar("tree is not a star")
    return t.internal_vertices[0]


def star_basis(t: Tree, i: int, j: int, k: int) -> BasisSet:
    """{{c, i}, {j, k}} for a star with center c and leaves i <= j < k."""
    c = star_center(t)
    if c in (i, j, k) or not all(1 <= v <= t.n for v in (i, j, k)):
        raise BadStarIndices(f"({i}, {j}, {k}) must be leaves of the star centered at {c}")
    if not i <= j < k:
        raise BadStarIndices(f"star basis needs i <= j < k, got ({i}, {j}, {k})")
    added = [_edge(c, i), (j, k)]
    return BasisSet(
        start_leaf=i,
        policy=ChoicePolicy(),
        pairs=added,
        provenance=[BlockContribution(block_internal_vertex=c, step="star", pairs=added)],
    )


def star_family(t: Tree) -> list[BasisSet]:
    leaves = t.leaves
    return [star_basis(t, i, j, k)
            for i in leaves for j in leaves for k in leaves if i <= j < k]


def basis_from_leaf(t: Tree, start_leaf: int, policy: ChoicePolicy | None = None) -> BasisSet:
    """build_basis, with stars routed to the star family."""
    policy = policy or ChoicePolicy()
    if not t.is_star:
        return build_basis(t, start_leaf, policy)
    if not 1 <= start_leaf <= t.n or t.degree(start_leaf) != 1:
        raise NotALeaf(f"vertex {start_leaf} is not a pendant vertex")
    family = star_family(t)
    candidates = [b for b in family if b.start_leaf == start_leaf] or family
    chosen = _chooser(policy)([tuple(b.pairs) for b in candidates])
    basis = next(b for b in candidates if tuple(b.pairs) == chosen)
    return basis.model_copy(update={"policy": policy})


def enumerate_family(t: Tree, max_runs: int, seed: int = 0) -> list[BasisSet]:
    """One min-policy run per leaf, then seeded random runs, deduplicated.

    Stars return the whole star family instead.
    """
    if t.n < 3:
        raise TooSmall(f"no basis traversal for n={t.n}")
    if t.is_star:
        return star_family(t)

    runs = [build_basis(t, leaf, ChoicePolicy(mode="min")) for leaf in t.leaves]
    rng = np.random.default_rng(seed)
    for _ in range(max(0, max_runs - len(runs))):
        leaf = t.leaves[int(rng.integers(len(t.leaves)))]
        policy = ChoicePolicy(mode="random", seed=int(rng.integers(2**31)))
        runs.append(build_basis(t, leaf, policy))

    seen = set()
    family = []
    for basis in runs:
        if basis.key() not in seen:
            seen.add(basis.key())
            family.append(basis)
    return family


def leaf_anchor_triples(t: Tree, basis: BasisSet) -> list[tuple[int, int, int]]:
    """All (u, v, w) with {u,v}, {u,w} in B, u a leaf, d(w) > 1 and uv, vw edges."""
    members = set(basis.pairs)
    triples = []
    for u in t.leaves:
        v = t.neighbors(u)[0]
        if _edge(u, v) not in members:
            continue
        for w in t.neighbors(v):
            if w != u and t.degree(w) > 1 and _edge(u, w) in members:
                triples.append((u, v, w))
    return triples
