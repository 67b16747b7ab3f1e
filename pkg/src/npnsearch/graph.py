"""Graph representations and operations for causal structure search.

Nodes are integer indices 0..node_count-1 throughout; names belong at the
I/O boundary. Two value types matter:

* ``Dag`` -- a directed acyclic graph (ground truth, search-space element).
* ``PatternGraph`` -- a mixed graph with tail/arrow endpoint marks,
  representing a CPDAG or an intermediate search state. Bidirected edges
  are representable (they arise as PC collider conflicts) but are never
  produced by ``dag_to_cpdag``.

Both are immutable once constructed; ``PartialGraph`` is the mutable
working representation used inside the search algorithms.
"""

from __future__ import annotations

import itertools
from collections import deque
from collections.abc import Iterable

import numpy as np

from .errors import CapacityError, ExtensionError

TAIL = 0
ARROW = 1


class Dag:
    """Directed acyclic graph over ``node_count`` indexed nodes."""

    __slots__ = ("node_count", "edges", "_parents", "_children", "_order")

    def __init__(self, node_count: int, edges: Iterable[tuple[int, int]] = ()):
        node_count = int(node_count)
        if node_count < 1:
            raise ValueError("node_count must be positive")
        edge_set = frozenset((int(i), int(j)) for i, j in edges)
        for i, j in edge_set:
            if i == j:
                raise ValueError(f"self-loop at node {i}")
            if not (0 <= i < node_count and 0 <= j < node_count):
                raise ValueError(f"edge ({i}, {j}) out of range for {node_count} nodes")
        self.node_count = node_count
        self.edges = edge_set

        parents: list[list[int]] = [[] for _ in range(node_count)]
        children: list[list[int]] = [[] for _ in range(node_count)]
        for i, j in sorted(edge_set):
            parents[j].append(i)
            children[i].append(j)
        self._parents = tuple(tuple(p) for p in parents)
        self._children = tuple(tuple(c) for c in children)

        # Kahn topological sort doubles as the acyclicity check.
        indegree = [len(self._parents[v]) for v in range(node_count)]
        queue = deque(v for v in range(node_count) if indegree[v] == 0)
        order: list[int] = []
        while queue:
            v = queue.popleft()
            order.append(v)
            for w in self._children[v]:
                indegree[w] -= 1
                if indegree[w] == 0:
                    queue.append(w)
        if len(order) < node_count:
            raise ValueError("edges contain a cycle")
        self._order = tuple(order)

    def parents(self, node: int) -> tuple[int, ...]:
        return self._parents[node]

    def children(self, node: int) -> tuple[int, ...]:
        return self._children[node]

    def adjacent(self, i: int, j: int) -> bool:
        return (i, j) in self.edges or (j, i) in self.edges

    def topological_order(self) -> tuple[int, ...]:
        return self._order

    def ancestors_of(self, nodes: Iterable[int]) -> set[int]:
        """All ancestors of ``nodes``, including the nodes themselves."""
        seen = set(nodes)
        stack = list(seen)
        while stack:
            v = stack.pop()
            for p in self._parents[v]:
                if p not in seen:
                    seen.add(p)
                    stack.append(p)
        return seen

    def __eq__(self, other):
        if not isinstance(other, Dag):
            return NotImplemented
        return self.node_count == other.node_count and self.edges == other.edges

    def __hash__(self):
        return hash((self.node_count, self.edges))

    def __repr__(self):
        return f"Dag(node_count={self.node_count}, edges={sorted(self.edges)})"


class PartialGraph:
    """Mutable mixed graph with {tail, arrow} endpoint marks.

    ``_marks[(i, j)]`` is the mark at the ``j`` end of the edge between
    ``i`` and ``j``; both key orders are present exactly when the pair is
    adjacent. ``neighbors`` returns live sets for speed -- callers must not
    mutate them.
    """

    __slots__ = ("node_count", "_marks", "_adj")

    def __init__(self, node_count: int):
        self.node_count = int(node_count)
        self._marks: dict[tuple[int, int], int] = {}
        self._adj: list[set[int]] = [set() for _ in range(self.node_count)]

    # -- mutation ---------------------------------------------------------

    def add_undirected(self, i: int, j: int) -> None:
        self._add(i, j, TAIL, TAIL)

    def add_directed(self, i: int, j: int) -> None:
        self._add(i, j, TAIL, ARROW)

    def _add(self, i, j, mark_i, mark_j):
        if i == j:
            raise ValueError("self-loops are not allowed")
        if j in self._adj[i]:
            raise ValueError(f"nodes {i} and {j} are already adjacent")
        self._marks[(i, j)] = mark_j
        self._marks[(j, i)] = mark_i
        self._adj[i].add(j)
        self._adj[j].add(i)

    def remove_edge(self, i: int, j: int) -> None:
        del self._marks[(i, j)]
        del self._marks[(j, i)]
        self._adj[i].discard(j)
        self._adj[j].discard(i)

    def orient(self, i: int, j: int) -> None:
        """Turn the undirected edge i -- j into i -> j."""
        if not self.is_undirected(i, j):
            raise ValueError(f"edge {i}-{j} is not undirected")
        self._marks[(i, j)] = ARROW

    def set_arrowhead(self, i: int, j: int) -> None:
        """Place an arrow mark at the ``j`` end, keeping the ``i`` end as is."""
        if j not in self._adj[i]:
            raise ValueError(f"nodes {i} and {j} are not adjacent")
        self._marks[(i, j)] = ARROW

    # -- queries ----------------------------------------------------------

    def adjacent(self, i: int, j: int) -> bool:
        return j in self._adj[i]

    def neighbors(self, i: int) -> set[int]:
        return self._adj[i]

    def mark_at(self, i: int, j: int) -> int:
        return self._marks[(i, j)]

    def has_arrowhead(self, i: int, j: int) -> bool:
        return self._marks.get((i, j)) == ARROW

    def is_undirected(self, i: int, j: int) -> bool:
        return self._marks.get((i, j)) == TAIL and self._marks.get((j, i)) == TAIL

    def is_directed(self, i: int, j: int) -> bool:
        return self._marks.get((i, j)) == ARROW and self._marks.get((j, i)) == TAIL

    def is_bidirected(self, i: int, j: int) -> bool:
        return self._marks.get((i, j)) == ARROW and self._marks.get((j, i)) == ARROW

    def undirected_neighbors(self, i: int) -> set[int]:
        return {j for j in self._adj[i] if self.is_undirected(i, j)}

    def parents(self, i: int) -> set[int]:
        return {j for j in self._adj[i] if self.is_directed(j, i)}

    def children(self, i: int) -> set[int]:
        return {j for j in self._adj[i] if self.is_directed(i, j)}

    def copy(self) -> "PartialGraph":
        out = PartialGraph(self.node_count)
        out._marks = dict(self._marks)
        out._adj = [set(s) for s in self._adj]
        return out

    def freeze(self) -> "PatternGraph":
        return PatternGraph(self.node_count, self._marks)


class PatternGraph:
    """Immutable mixed graph (pattern / CPDAG or PC output)."""

    __slots__ = ("node_count", "_marks", "_adj")

    def __init__(self, node_count: int, marks: dict[tuple[int, int], int] | None = None):
        self.node_count = int(node_count)
        if self.node_count < 1:
            raise ValueError("node_count must be positive")
        marks = dict(marks) if marks else {}
        for (i, j), m in marks.items():
            if i == j or not (0 <= i < self.node_count and 0 <= j < self.node_count):
                raise ValueError(f"endpoint key ({i}, {j}) out of range")
            if m not in (TAIL, ARROW):
                raise ValueError(f"invalid mark {m!r}")
            if (j, i) not in marks:
                raise ValueError(f"pair {{{i}, {j}}} has a mark at only one end")
        self._marks = marks
        adj: list[set[int]] = [set() for _ in range(self.node_count)]
        for i, j in marks:
            adj[i].add(j)
        self._adj = adj

    @classmethod
    def from_edges(
        cls,
        node_count: int,
        directed: Iterable[tuple[int, int]] = (),
        undirected: Iterable[tuple[int, int]] = (),
        bidirected: Iterable[tuple[int, int]] = (),
    ) -> "PatternGraph":
        marks: dict[tuple[int, int], int] = {}
        for i, j in directed:
            marks[(i, j)] = ARROW
            marks[(j, i)] = TAIL
        for i, j in undirected:
            marks[(i, j)] = TAIL
            marks[(j, i)] = TAIL
        for i, j in bidirected:
            marks[(i, j)] = ARROW
            marks[(j, i)] = ARROW
        return cls(node_count, marks)

    def thaw(self) -> PartialGraph:
        out = PartialGraph(self.node_count)
        out._marks = dict(self._marks)
        out._adj = [set(s) for s in self._adj]
        return out

    # -- queries ----------------------------------------------------------

    def adjacent(self, i: int, j: int) -> bool:
        return j in self._adj[i]

    def neighbors(self, i: int) -> set[int]:
        return set(self._adj[i])

    def mark_at(self, i: int, j: int) -> int:
        return self._marks[(i, j)]

    def has_arrowhead(self, i: int, j: int) -> bool:
        return self._marks.get((i, j)) == ARROW

    def is_undirected(self, i: int, j: int) -> bool:
        return self._marks.get((i, j)) == TAIL and self._marks.get((j, i)) == TAIL

    def is_directed(self, i: int, j: int) -> bool:
        return self._marks.get((i, j)) == ARROW and self._marks.get((j, i)) == TAIL

    def is_bidirected(self, i: int, j: int) -> bool:
        return self._marks.get((i, j)) == ARROW and self._marks.get((j, i)) == ARROW

    def adjacencies(self) -> set[tuple[int, int]]:
        """Unordered adjacent pairs, each as (i, j) with i < j."""
        return {(i, j) for (i, j) in self._marks if i < j}

    def arrows(self) -> set[tuple[int, int]]:
        """Ordered pairs (i, j) carrying an arrow mark at the j end.

        A bidirected edge contributes both orders.
        """
        return {(i, j) for (i, j), m in self._marks.items() if m == ARROW}

    def directed_edges(self) -> set[tuple[int, int]]:
        return {(i, j) for (i, j) in self._marks if self.is_directed(i, j)}

    def undirected_edges(self) -> set[tuple[int, int]]:
        return {(i, j) for (i, j) in self._marks if i < j and self.is_undirected(i, j)}

    def bidirected_edges(self) -> set[tuple[int, int]]:
        return {(i, j) for (i, j) in self._marks if i < j and self.is_bidirected(i, j)}

    def __eq__(self, other):
        if not isinstance(other, PatternGraph):
            return NotImplemented
        return self.node_count == other.node_count and self._marks == other._marks

    def __hash__(self):
        return hash((self.node_count, frozenset(self._marks.items())))

    def __repr__(self):
        parts = [f"{i}->{j}" for i, j in sorted(self.directed_edges())]
        parts += [f"{i}--{j}" for i, j in sorted(self.undirected_edges())]
        parts += [f"{i}<->{j}" for i, j in sorted(self.bidirected_edges())]
        return f"PatternGraph({self.node_count}: {', '.join(parts)})"


# -- random DAG generation --------------------------------------------------


def _pair_from_index(k: int, n: int) -> tuple[int, int]:
    # k-th unordered pair (i, j), i < j, in lexicographic order
    i = 0
    row = n - 1
    while k >= row:
        k -= row
        i += 1
        row -= 1
    return i, i + 1 + k


def random_dag(node_count: int, edge_count: int, seed: int) -> Dag:
    """Uniform random DAG: random topological order, then ``edge_count``
    distinct node pairs sampled uniformly, each oriented low-to-high in
    the order."""
    node_count = int(node_count)
    edge_count = int(edge_count)
    if node_count < 1:
        raise ValueError("node_count must be positive")
    if edge_count < 0:
        raise ValueError("edge_count must be nonnegative")
    capacity = node_count * (node_count - 1) // 2
    if edge_count > capacity:
        raise CapacityError(
            f"{edge_count} edges requested but {node_count} nodes hold at most {capacity}"
        )
    rng = np.random.default_rng(seed)
    order = rng.permutation(node_count)
    position = np.empty(node_count, dtype=np.int64)
    position[order] = np.arange(node_count)
    chosen = rng.choice(capacity, size=edge_count, replace=False)
    edges = []
    for flat in chosen:
        i, j = _pair_from_index(int(flat), node_count)
        if position[i] < position[j]:
            edges.append((i, j))
        else:
            edges.append((j, i))
    return Dag(node_count, edges)


# -- d-separation ------------------------------------------------------------


def d_separated(dag: Dag, x: int, y: int, s: Iterable[int] = ()) -> bool:
    """True iff every path between x and y is blocked given the set ``s``.

    Implemented by moralizing the ancestral graph of {x, y} | s and testing
    reachability with the conditioning nodes deleted.
    """
    s = frozenset(int(v) for v in s)
    if x == y:
        raise ValueError("x and y must differ")
    if x in s or y in s:
        raise ValueError("x and y must not be in the conditioning set")
    relevant = dag.ancestors_of({x, y} | s)
    adj: dict[int, set[int]] = {v: set() for v in relevant}
    for v in relevant:
        ps = dag.parents(v)  # parents of an ancestor are ancestors too
        for p in ps:
            adj[v].add(p)
            adj[p].add(v)
        for p, q in itertools.combinations(ps, 2):
            adj[p].add(q)
            adj[q].add(p)
    seen = {x}
    stack = [x]
    while stack:
        v = stack.pop()
        for w in adj[v]:
            if w == y:
                return False
            if w not in seen and w not in s:
                seen.add(w)
                stack.append(w)
    return True


# -- Meek orientation rules ---------------------------------------------------


def _meek_rule_fires(pg: PartialGraph, a: int, b: int) -> bool:
    """Would any of the four orientation rules direct the undirected edge
    a -- b as a -> b?"""
    adj_a = pg.neighbors(a)
    # R1: c -> a, a -- b, c and b nonadjacent.
    for c in adj_a:
        if pg.is_directed(c, a) and not pg.adjacent(c, b) and c != b:
            return True
    # R2: a -> c -> b with a -- b.
    for c in adj_a:
        if pg.is_directed(a, c) and pg.is_directed(c, b):
            return True
    # R3: a -- c, a -- d, c -> b, d -> b, c and d nonadjacent.
    into_b = [c for c in adj_a if pg.is_undirected(a, c) and pg.is_directed(c, b)]
    for c, d in itertools.combinations(into_b, 2):
        if not pg.adjacent(c, d):
            return True
    # R4: u -- a, u -> v, v -> b, v adjacent to a, u and b nonadjacent.
    for u in adj_a:
        if not pg.is_undirected(a, u) or pg.adjacent(u, b) or u == b:
            continue
        for v in pg.neighbors(u):
            if pg.is_directed(u, v) and pg.is_directed(v, b) and pg.adjacent(v, a):
                return True
    return False


def meek_closure(pg: PartialGraph) -> None:
    """Apply Meek rules R1-R4 in place until no rule fires.

    Only undirected edges are oriented; existing arrow marks are never
    erased, so bidirected conflict artifacts survive untouched.
    """
    changed = True
    while changed:
        changed = False
        for a in range(pg.node_count):
            for b in sorted(pg.neighbors(a)):
                if pg.is_undirected(a, b) and _meek_rule_fires(pg, a, b):
                    pg.orient(a, b)
                    changed = True


def apply_meek_rules(pattern: PatternGraph) -> PatternGraph:
    """Return the Meek-rule fixed point of ``pattern``."""
    pg = pattern.thaw()
    meek_closure(pg)
    return pg.freeze()


# -- DAG <-> pattern conversions ----------------------------------------------


def _dag_to_cpdag_state(dag: Dag) -> PartialGraph:
    pg = PartialGraph(dag.node_count)
    for i, j in sorted(dag.edges):
        pg.add_undirected(i, j)
    for z in range(dag.node_count):
        for a, b in itertools.combinations(dag.parents(z), 2):
            if not dag.adjacent(a, b):
                pg.set_arrowhead(a, z)
                pg.set_arrowhead(b, z)
    meek_closure(pg)
    return pg


def dag_to_cpdag(dag: Dag) -> PatternGraph:
    """Pattern of ``dag``: same adjacencies, arrows exactly on compelled
    endpoints (unshielded-collider detection plus Meek closure)."""
    return _dag_to_cpdag_state(dag).freeze()


def pdag_to_dag(pattern: PatternGraph | PartialGraph) -> Dag:
    """A consistent DAG extension of a partially directed graph.

    Preserves every directed edge and introduces no new unshielded
    colliders (Dor-Tarsi sink-elimination). Raises ``ExtensionError`` when
    no extension exists or the input has a bidirected edge.
    """
    pg = pattern.thaw() if isinstance(pattern, PatternGraph) else pattern.copy()
    n = pg.node_count
    for (i, j) in list(pg._marks):
        if i < j and pg.is_bidirected(i, j):
            raise ExtensionError(f"bidirected edge {i} <-> {j} admits no extension")
    edges: list[tuple[int, int]] = []
    pending = set(range(n))
    queue = deque(range(n))
    queued = [True] * n
    while pending:
        if not queue:
            raise ExtensionError("graph admits no consistent extension")
        x = queue.popleft()
        queued[x] = False
        if x not in pending:
            continue
        if not _is_removable_sink(pg, x):
            continue
        nbrs = list(pg.neighbors(x))
        for w in nbrs:
            edges.append((w, x))
            pg.remove_edge(w, x)
        pending.discard(x)
        for w in nbrs:
            # eligibility of a node can only improve when a neighbor leaves
            if w in pending and not queued[w]:
                queue.append(w)
                queued[w] = True
    return Dag(n, edges)


def _is_removable_sink(pg: PartialGraph, x: int) -> bool:
    nbrs = pg.neighbors(x)
    for w in nbrs:
        if pg.is_directed(x, w):
            return False
    for u in nbrs:
        if not pg.is_undirected(x, u):
            continue
        for w in nbrs:
            if w != u and not pg.adjacent(u, w):
                return False
    return True


# -- text format ---------------------------------------------------------------


def graph_to_text(graph: Dag | PatternGraph) -> str:
    """Serialize a graph: a ``nodes: N`` header, then one edge per line
    (``i -> j`` directed, ``i -- j`` undirected, ``i <-> j`` bidirected)."""
    lines = [f"nodes: {graph.node_count}"]
    if isinstance(graph, Dag):
        lines += [f"{i} -> {j}" for i, j in sorted(graph.edges)]
    else:
        lines += [f"{i} -> {j}" for i, j in sorted(graph.directed_edges())]
        lines += [f"{i} -- {j}" for i, j in sorted(graph.undirected_edges())]
        lines += [f"{i} <-> {j}" for i, j in sorted(graph.bidirected_edges())]
    return "\n".join(lines) + "\n"


def _parse_graph_lines(text: str):
    lines = [ln.strip() for ln in text.splitlines() if ln.strip()]
    if not lines or not lines[0].startswith("nodes:"):
        raise ValueError("missing 'nodes: N' header")
    node_count = int(lines[0].split(":", 1)[1])
    edges = []
    for ln in lines[1:]:
        for sep in (" <-> ", " -> ", " -- "):
            if sep in ln:
                i, j = ln.split(sep)
                edges.append((sep.strip(), int(i), int(j)))
                break
        else:
            raise ValueError(f"unparseable edge line: {ln!r}")
    return node_count, edges


def dag_from_text(text: str) -> Dag:
    node_count, edges = _parse_graph_lines(text)
    if any(sep != "->" for sep, _, _ in edges):
        raise ValueError("a DAG file may contain only '->' edges")
    return Dag(node_count, [(i, j) for _, i, j in edges])


def pattern_from_text(text: str) -> PatternGraph:
    node_count, edges = _parse_graph_lines(text)
    directed = [(i, j) for sep, i, j in edges if sep == "->"]
    undirected = [(i, j) for sep, i, j in edges if sep == "--"]
    bidirected = [(i, j) for sep, i, j in edges if sep == "<->"]
    return PatternGraph.from_edges(node_count, directed, undirected, bidirected)
