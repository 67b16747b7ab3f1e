"""The PC algorithm.

Classic (non-stable) PC: edges are pruned from the complete undirected
graph by conditional-independence tests of growing order, unshielded
colliders are oriented from the recorded separating sets, and the Meek
rules close the orientation. Node and subset orderings are lexicographic
so runs are reproducible.

Collider conflicts are kept: orienting over an existing arrowhead yields a
bidirected endpoint pair that survives into the output (and is counted by
the metrics). Swap ``_orient_collider`` for last-writer-wins semantics if
the alternate convention is ever needed.
"""

from __future__ import annotations

import itertools
from collections.abc import Callable
from dataclasses import dataclass

from .gauss import CovarianceSummary, fisher_z_independent
from .graph import PartialGraph, PatternGraph, meek_closure

IndependenceTest = Callable[[int, int, tuple[int, ...]], bool]


@dataclass(frozen=True)
class PcConfig:
    alpha: float = 0.001
    max_conditioning_size: int | None = None
    deterministic_order: bool = True

    def __post_init__(self):
        if not 0.0 < self.alpha < 1.0:
            raise ValueError("alpha must lie in (0, 1)")
        if self.max_conditioning_size is not None and self.max_conditioning_size < 0:
            raise ValueError("max_conditioning_size must be nonnegative")
        if not self.deterministic_order:
            raise ValueError("only deterministic ordering is supported")


class SepsetMap:
    """Separating sets recorded for removed adjacencies."""

    def __init__(self):
        self._sets: dict[tuple[int, int], frozenset[int]] = {}

    @staticmethod
    def _key(x: int, y: int) -> tuple[int, int]:
        return (x, y) if x < y else (y, x)

    def record(self, x: int, y: int, s) -> None:
        self._sets[self._key(x, y)] = frozenset(s)

    def get(self, x: int, y: int) -> frozenset[int] | None:
        return self._sets.get(self._key(x, y))

    def __len__(self):
        return len(self._sets)


def _cov_test(cov: CovarianceSummary, alpha: float) -> IndependenceTest:
    def independent(x: int, y: int, s: tuple[int, ...]) -> bool:
        return fisher_z_independent(cov, x, y, s, alpha)

    return independent


def _adjacency_search(node_count: int, independent: IndependenceTest,
                      config: PcConfig) -> tuple[PartialGraph, SepsetMap]:
    pg = PartialGraph(node_count)
    for i, j in itertools.combinations(range(node_count), 2):
        pg.add_undirected(i, j)
    sepsets = SepsetMap()

    depth = 0
    while config.max_conditioning_size is None or depth <= config.max_conditioning_size:
        # stop once no ordered adjacent pair has enough other neighbors
        if not any(
            len(pg.neighbors(x)) - 1 >= depth
            for x in range(node_count)
            for y in pg.neighbors(x)
        ):
            break
        for x in range(node_count):
            for y in range(node_count):
                if y == x or not pg.adjacent(x, y):
                    continue
                others = sorted(pg.neighbors(x) - {y})
                if len(others) < depth:
                    continue
                for s in itertools.combinations(others, depth):
                    if independent(x, y, s):
                        pg.remove_edge(x, y)
                        sepsets.record(x, y, s)
                        break
        depth += 1
    return pg, sepsets


def _orient_colliders(pg: PartialGraph, sepsets: SepsetMap) -> None:
    for z in range(pg.node_count):
        for x, y in itertools.combinations(sorted(pg.neighbors(z)), 2):
            if pg.adjacent(x, y):
                continue
            s = sepsets.get(x, y)
            if s is not None and z not in s:
                _orient_collider(pg, x, y, z)


def _orient_collider(pg: PartialGraph, x: int, y: int, z: int) -> None:
    # arrowheads are only ever added, so conflicting triples leave a
    # bidirected edge behind
    pg.set_arrowhead(x, z)
    pg.set_arrowhead(y, z)


def pc_search_with_test(node_count: int, independent: IndependenceTest,
                        config: PcConfig = PcConfig()) -> PatternGraph:
    """PC over an arbitrary independence test (e.g. a d-separation oracle)."""
    pg, sepsets = _adjacency_search(node_count, independent, config)
    _orient_colliders(pg, sepsets)
    meek_closure(pg)
    return pg.freeze()


def pc_search(cov: CovarianceSummary, config: PcConfig = PcConfig()) -> PatternGraph:
    """Full PC search on a covariance matrix with the Fisher-z test."""
    return pc_search_with_test(cov.variable_count, _cov_test(cov, config.alpha), config)


def pc_adjacencies(cov: CovarianceSummary, config: PcConfig = PcConfig()) -> set[tuple[int, int]]:
    """Adjacency phase only: the surviving unordered pairs."""
    pg, _ = _adjacency_search(cov.variable_count, _cov_test(cov, config.alpha), config)
    return pg.freeze().adjacencies()
