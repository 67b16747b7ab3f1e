"""Greedy equivalence search (two-phase, score-based).

Forward phase: starting from the empty pattern, repeatedly apply the
highest-scoring valid Insert(x, y, T) operator until none has positive
delta. Backward phase: repeatedly apply the best valid Delete(x, y, H).
After every move the pattern is rebuilt into a proper CPDAG (consistent
DAG extension, then collider detection and Meek closure).

Operator validity and score deltas are the standard equivalence-class
conditions: for Insert, NA(y, x) | T must be a clique and every
semi-directed path y ~> x must cross NA(y, x) | T, with delta
s(y, NA|T|Pa(y)|{x}) - s(y, NA|T|Pa(y)); for Delete, NA(y, x) \\ H must be
a clique, with delta s(y, base) - s(y, base|{x}) where
base = (NA \\ H) | (Pa(y) \\ {x}).

Equal-delta moves are broken first-found in lexicographic candidate order,
so runs are reproducible. Local scores are cached per (node, parent set);
the forward phase additionally caches per-pair candidate moves and only
recomputes pairs whose local neighborhood changed.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .errors import SingularityError
from .gauss import CovarianceSummary, ScoreConfig, local_score, score_penalty
from .graph import PartialGraph, PatternGraph, _dag_to_cpdag_state, pdag_to_dag
from .pc import PcConfig, pc_adjacencies

_EPS = 1e-10
_EMPTY: frozenset[int] = frozenset()


@dataclass(frozen=True)
class GesConfig:
    score: ScoreConfig
    allowed_adjacencies: frozenset[tuple[int, int]] | None = None

    def __post_init__(self):
        if self.allowed_adjacencies is not None:
            pairs = frozenset(
                (i, j) if i < j else (j, i) for i, j in self.allowed_adjacencies
            )
            object.__setattr__(self, "allowed_adjacencies", pairs)


class _Scorer:
    """Local-score cache; values equal the uncached computation."""

    __slots__ = ("cov", "config", "_cache")

    def __init__(self, cov: CovarianceSummary, config: ScoreConfig):
        self.cov = cov
        self.config = config
        self._cache: dict[tuple[int, frozenset[int]], float] = {}

    def local(self, node: int, parents: frozenset[int]) -> float:
        key = (node, parents)
        value = self._cache.get(key)
        if value is None:
            value = local_score(self.cov, node, parents, self.config)
            self._cache[key] = value
        return value


def _is_clique(pg: PartialGraph, nodes) -> bool:
    nodes = list(nodes)
    for i in range(len(nodes)):
        nbrs = pg.neighbors(nodes[i])
        for j in range(i + 1, len(nodes)):
            if nodes[j] not in nbrs:
                return False
    return True


def _blocks_semidirected(pg: PartialGraph, src: int, dst: int, block) -> bool:
    """True iff every semi-directed path src ~> dst crosses ``block``."""
    seen = {src}
    stack = [src]
    while stack:
        v = stack.pop()
        for w in pg.neighbors(v):
            if pg.is_directed(v, w) or pg.is_undirected(v, w):
                if w == dst:
                    return False
                if w not in seen and w not in block:
                    seen.add(w)
                    stack.append(w)
    return True


def _insert_candidates(pg: PartialGraph, scorer: _Scorer, x: int, y: int):
    """Positive-delta, clique-valid Insert(x, y, T) moves, best delta first.

    The semi-directed path condition is deliberately not checked here; it
    depends on distant graph state and is verified at selection time.
    """
    n_y = pg.undirected_neighbors(y)
    adj_x = pg.neighbors(x)
    na = frozenset(n_y & adj_x)
    if not _is_clique(pg, na):
        return []
    pa = frozenset(pg.parents(y))
    t_pool = sorted(n_y - adj_x)
    out = []
    seq = 0
    for size in range(len(t_pool) + 1):
        for t in itertools.combinations(t_pool, size):
            seq += 1
            block = na.union(t)
            if size and not _is_clique(pg, block):
                continue
            base = block | pa
            try:
                delta = scorer.local(y, base | {x}) - scorer.local(y, base)
            except SingularityError:
                continue
            if delta > _EPS:
                out.append((delta, seq, t, na))
    out.sort(key=lambda c: (-c[0], c[1]))
    return out


class _SearchState:
    def __init__(self, cov: CovarianceSummary, config: GesConfig):
        self.cov = cov
        self.n = cov.variable_count
        self.scorer = _Scorer(cov, config.score)
        self.allowed = config.allowed_adjacencies
        self.pg = PartialGraph(self.n)
        self.deltas = np.full((self.n, self.n), -np.inf)
        self.details: dict[tuple[int, int], list] = {}

    def pair_allowed(self, x: int, y: int) -> bool:
        if self.allowed is None:
            return True
        return ((x, y) if x < y else (y, x)) in self.allowed

    # -- forward-phase candidate bookkeeping -------------------------------

    def init_deltas(self) -> None:
        """Vectorized Insert deltas for the empty starting pattern.

        With no edges every candidate has Pa = NA = T = {}, so the delta
        reduces to s(y, {x}) - s(y, {}) computed from single-regression
        residual variances. Matches the scorer up to float rounding.
        """
        m = self.cov.matrix
        ns = self.cov.sample_count
        diag = np.diag(m).copy()
        floor = 1e-10
        sigma2 = np.maximum(diag[np.newaxis, :] - (m ** 2) / diag[:, np.newaxis], floor)
        s_pair = -ns * (np.log(2.0 * np.pi * sigma2) + 1.0) - score_penalty(
            self.scorer.config, ns, 1)
        s_empty = -ns * (np.log(2.0 * np.pi * np.maximum(diag, floor)) + 1.0) - score_penalty(
            self.scorer.config, ns, 0)
        deltas = s_pair - s_empty[np.newaxis, :]
        np.fill_diagonal(deltas, -np.inf)
        deltas[deltas <= _EPS] = -np.inf
        if self.allowed is not None:
            mask = np.zeros((self.n, self.n), dtype=bool)
            for i, j in self.allowed:
                mask[i, j] = mask[j, i] = True
            deltas[~mask] = -np.inf
        self.deltas = deltas
        self.details = {}

    def refresh_pair(self, x: int, y: int) -> None:
        key = (x, y)
        if x == y or self.pg.adjacent(x, y) or not self.pair_allowed(x, y):
            self.deltas[x, y] = -np.inf
            self.details.pop(key, None)
            return
        cands = _insert_candidates(self.pg, self.scorer, x, y)
        if cands:
            self.deltas[x, y] = cands[0][0]
            self.details[key] = cands
        else:
            self.deltas[x, y] = -np.inf
            self.details.pop(key, None)

    def rebuild(self, before_marks: dict) -> None:
        """Re-close the mutated pattern into a CPDAG and refresh every
        candidate pair whose local structure may have changed."""
        old_adj = [set(s) for s in self.pg._adj]
        new_pg = _dag_to_cpdag_state(pdag_to_dag(self.pg))
        dirty = set()
        new_marks = new_pg._marks
        for key in before_marks.keys() | new_marks.keys():
            if before_marks.get(key) != new_marks.get(key):
                dirty.add(key[0])
                dirty.add(key[1])
        self.pg = new_pg
        spread = set(dirty)
        for v in dirty:
            spread |= old_adj[v]
            spread |= new_pg.neighbors(v)
        for xv in dirty:
            for yv in range(self.n):
                self.refresh_pair(xv, yv)
        for yv in spread:
            for xv in range(self.n):
                self.refresh_pair(xv, yv)


def _select_insert(state: _SearchState):
    """Best valid insert move, or None.

    Walks candidates in descending-delta order (first-found on ties) and
    checks the semi-directed path condition live; path-blocked candidates
    are skipped for this step only.
    """
    deltas = state.deltas
    overridden: dict[tuple[int, int], float] = {}
    session: dict[tuple[int, int], list] = {}
    skip: dict[tuple[int, int], int] = {}
    try:
        while True:
            flat = int(np.argmax(deltas))
            best = deltas.flat[flat]
            if not np.isfinite(best) or best <= _EPS:
                return None
            x, y = divmod(flat, state.n)
            key = (x, y)
            cands = session.get(key)
            if cands is None:
                cands = state.details.get(key)
                if cands is None:
                    # untouched since the empty start: single T = {} candidate
                    cands = [(float(best), 0, (), _EMPTY)]
                session[key] = cands
            k = skip.get(key, 0)
            delta, _seq, t, na = cands[k]
            if _blocks_semidirected(state.pg, y, x, na.union(t)):
                return x, y, t, na
            k += 1
            skip[key] = k
            overridden.setdefault(key, float(deltas[x, y]))
            deltas[x, y] = cands[k][0] if k < len(cands) else -np.inf
    finally:
        for (ox, oy), value in overridden.items():
            deltas[ox, oy] = value


def _forward_phase(state: _SearchState) -> None:
    state.init_deltas()
    while True:
        move = _select_insert(state)
        if move is None:
            return
        x, y, t, _na = move
        before = dict(state.pg._marks)
        state.pg.add_directed(x, y)
        for v in t:
            state.pg.orient(v, y)
        state.rebuild(before)


def _select_delete(state: _SearchState):
    pg = state.pg
    best = None
    for x in range(state.n):
        for y in sorted(pg.neighbors(x)):
            if not (pg.is_directed(x, y) or pg.is_undirected(x, y)):
                continue
            na = frozenset(pg.undirected_neighbors(y) & pg.neighbors(x))
            base_pa = frozenset(pg.parents(y)) - {x}
            na_sorted = sorted(na)
            for size in range(len(na_sorted) + 1):
                for h in itertools.combinations(na_sorted, size):
                    rem = na.difference(h)
                    if not _is_clique(pg, rem):
                        continue
                    base = rem | base_pa
                    try:
                        delta = state.scorer.local(y, base) - state.scorer.local(y, base | {x})
                    except SingularityError:
                        continue
                    if delta > _EPS and (best is None or delta > best[0]):
                        best = (delta, x, y, h)
    return best


def _backward_phase(state: _SearchState) -> None:
    while True:
        move = _select_delete(state)
        if move is None:
            return
        _delta, x, y, h = move
        pg = state.pg
        pg.remove_edge(x, y)
        for v in h:
            if pg.is_undirected(y, v):
                pg.orient(y, v)
            if pg.adjacent(x, v) and pg.is_undirected(x, v):
                pg.orient(x, v)
        state.pg = _dag_to_cpdag_state(pdag_to_dag(pg))


def ges_search(cov: CovarianceSummary, config: GesConfig) -> PatternGraph:
    """Two-phase greedy equivalence search over ``cov``.

    When ``config.allowed_adjacencies`` is set, Insert(x, y, .) is only
    considered for pairs in that set; deletions are unrestricted.
    """
    state = _SearchState(cov, config)
    _forward_phase(state)
    _backward_phase(state)
    return state.pg.freeze()


def pc_ges_search(cov: CovarianceSummary, pc_config: PcConfig, score: ScoreConfig) -> PatternGraph:
    """Hybrid search: PC's adjacency phase as a hard edge constraint for GES."""
    allowed = frozenset(pc_adjacencies(cov, pc_config))
    return ges_search(cov, GesConfig(score=score, allowed_adjacencies=allowed))
