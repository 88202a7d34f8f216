"""
Multigraph Module

Connected undirected loopless multigraphs with vertex 0 as the sink and a
caller-controlled edge order (edge identifiers e_1..e_m follow list position),
plus their exact integer Laplacian matrices.
"""

import hashlib
from collections import deque
from dataclasses import dataclass
from functools import cached_property

SINK = 0


class LoopEdgeError(ValueError):
    """An edge joins a vertex to itself."""


class DisconnectedGraphError(ValueError):
    """Some vertex cannot be reached from the sink."""


class VertexRangeError(ValueError):
    """A vertex index lies outside 0..vertex_count-1."""


class EmptyEdgeListError(ValueError):
    """No edges were given."""


class VertexSetError(ValueError):
    """A vertex set argument is empty, full, or out of range."""


@dataclass(frozen=True)
class IntegerMatrix:
    """Square matrix of Python ints (arbitrary precision, never floats)."""
    rows: tuple

    @property
    def size(self):
        return len(self.rows)

    def __getitem__(self, index):
        i, j = index
        return self.rows[i][j]

    def transpose(self):
        return IntegerMatrix(tuple(zip(*self.rows)) if self.rows else ())

    def matvec(self, vector):
        if len(vector) != self.size:
            raise ValueError(f"Vector of length {len(vector)} does not match matrix size {self.size}")
        return tuple(sum(a * x for a, x in zip(row, vector)) for row in self.rows)

    def minor(self, index):
        """Delete row and column `index`."""
        return IntegerMatrix(tuple(
            tuple(value for j, value in enumerate(row) if j != index)
            for i, row in enumerate(self.rows) if i != index
        ))

    def to_lists(self):
        return [list(row) for row in self.rows]


@dataclass(frozen=True)
class Multigraph:
    """
    Validated multigraph. Build it with build_graph(), not directly.

    Attributes:
        vertex_count (int): n+1; vertices are 0..n and vertex 0 is the sink
        edges (tuple): (u, v) pairs; edge identifier i is edges[i-1]
    """
    vertex_count: int
    edges: tuple

    @property
    def n(self):
        """Number of non-sink vertices."""
        return self.vertex_count - 1

    @property
    def edge_count(self):
        return len(self.edges)

    @property
    def vertices(self):
        return range(self.vertex_count)

    @property
    def non_sink(self):
        return range(1, self.vertex_count)

    @property
    def edge_ids(self):
        return range(1, len(self.edges) + 1)

    def edge(self, eid):
        return self.edges[eid - 1]

    def other_end(self, eid, v):
        a, b = self.edges[eid - 1]
        return b if a == v else a

    @cached_property
    def _incidence(self):
        incident = [[] for _ in range(self.vertex_count)]
        for eid, (a, b) in enumerate(self.edges, start=1):
            incident[a].append(eid)
            incident[b].append(eid)
        return tuple(tuple(ids) for ids in incident)

    def incident_edges(self, v):
        """Edge identifiers at v, increasing."""
        return self._incidence[v]

    def degree(self, v):
        return len(self._incidence[v])

    def neighbors(self, v):
        return sorted({self.other_end(eid, v) for eid in self._incidence[v]})

    def multiplicity(self, u, v):
        return sum(1 for eid in self._incidence[u] if self.other_end(eid, u) == v)

    def edges_between(self, v, vertex_set):
        """Number of edges from v to vertices of vertex_set (v itself never counts)."""
        return sum(1 for eid in self._incidence[v] if self.other_end(eid, v) in vertex_set)

    def edges_leaving(self, v, vertex_set):
        """Number of edges from v (assumed in vertex_set) to the complement of vertex_set."""
        return sum(1 for eid in self._incidence[v] if self.other_end(eid, v) not in vertex_set)


def _reachable_from_sink(g):
    seen = {SINK}
    queue = deque([SINK])
    while queue:
        u = queue.popleft()
        for w in g.neighbors(u):
            if w not in seen:
                seen.add(w)
                queue.append(w)
    return seen


def build_graph(vertex_count, edge_list):
    """
    Validate and build a multigraph.

    Args:
        vertex_count (int): number of vertices (n+1), at least 2
        edge_list (list): vertex pairs in edge-identifier order (e_1 first)

    Returns:
        Multigraph: the validated graph

    Raises:
        VertexRangeError, LoopEdgeError, DisconnectedGraphError, EmptyEdgeListError
    """
    if not isinstance(vertex_count, int) or vertex_count < 2:
        raise VertexRangeError(f"vertex_count must be an integer >= 2, got {vertex_count!r}")
    if not edge_list:
        raise EmptyEdgeListError("Edge list is empty")

    edges = []
    for eid, pair in enumerate(edge_list, start=1):
        try:
            u, v = pair
        except (TypeError, ValueError):
            raise VertexRangeError(f"Edge e{eid} must be a pair of vertices, got {pair!r}")
        for w in (u, v):
            if not isinstance(w, int) or not 0 <= w < vertex_count:
                raise VertexRangeError(
                    f"Edge e{eid} = ({u}, {v}) references vertex {w!r} outside 0..{vertex_count - 1}"
                )
        if u == v:
            raise LoopEdgeError(f"Edge e{eid} = ({u}, {v}) is a loop")
        edges.append((u, v))

    g = Multigraph(vertex_count, tuple(edges))
    reached = _reachable_from_sink(g)
    if len(reached) != vertex_count:
        missing = min(set(range(vertex_count)) - reached)
        raise DisconnectedGraphError(f"Graph is disconnected: vertex {missing} is not reachable from the sink")

    return g


def degree(g, v):
    if not 0 <= v < g.vertex_count:
        raise VertexRangeError(f"Vertex {v} outside 0..{g.vertex_count - 1}")
    return g.degree(v)


def boundary_edges(g, vertex_set):
    """
    Edges with exactly one endpoint in vertex_set, by increasing identifier.

    Raises:
        VertexSetError: if vertex_set is empty, everything, or out of range
    """
    X = frozenset(vertex_set)
    if not X:
        raise VertexSetError("Boundary of the empty set is undefined")
    if any(not 0 <= v < g.vertex_count for v in X):
        raise VertexSetError(f"Vertex set {sorted(X)} references vertices outside 0..{g.vertex_count - 1}")
    if len(X) == g.vertex_count:
        raise VertexSetError("Boundary of the full vertex set is undefined")
    return [eid for eid, (a, b) in enumerate(g.edges, start=1) if (a in X) != (b in X)]


def laplacian(g):
    size = g.vertex_count
    rows = [[0] * size for _ in range(size)]
    for a, b in g.edges:
        rows[a][a] += 1
        rows[b][b] += 1
        rows[a][b] -= 1
        rows[b][a] -= 1
    return IntegerMatrix(tuple(tuple(row) for row in rows))


def reduced_laplacian(g):
    """Laplacian with the sink row and column deleted."""
    return laplacian(g).minor(SINK)


def relabel_edges(g, permutation):
    """
    Reorder the edge list: new edge i+1 is old edge permutation[i] (1-based ids).
    """
    if sorted(permutation) != list(g.edge_ids):
        raise ValueError(f"Not a permutation of edge ids 1..{g.edge_count}: {permutation}")
    return Multigraph(g.vertex_count, tuple(g.edge(eid) for eid in permutation))


def graph_hash(g):
    """Short stable digest of (vertex_count, ordered edge list)."""
    text = f"{g.vertex_count}:" + ";".join(f"{a}-{b}" for a, b in g.edges)
    return hashlib.sha256(text.encode('utf-8')).hexdigest()[:12]
