"""Graph representation, validation, and the directed-bond coordinate system.

An undirected simple graph (no self-loops, no parallel edges, optional
strictly positive edge weights) is the single source of combinatorial truth.
Every operator in the package lives either on the V vertices or on the 2B
directed bonds; the bond indexing fixed here is inherited by all downstream
matrices so results are reproducible across runs.
"""

from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    DisconnectedGraphError,
    DuplicateEdgeError,
    EndpointRangeError,
    GraphFormatError,
    NonPositiveWeightError,
    SelfLoopError,
    WeightCountError,
)


@dataclass
class Graph:
    """Undirected simple graph with optional positive edge weights.

    Vertices are 0-based.  Edges are stored with endpoints ordered
    ``u < v`` in the input edge order.  Instances are immutable by
    convention: nothing in the package mutates a Graph after construction,
    so they are safe to share across threads.
    """

    num_vertices: int
    edges: tuple[tuple[int, int], ...]
    weights: tuple[float, ...] | None = None

    # filled in __post_init__
    _adjacency: list[dict[int, int]] = field(init=False, repr=False, default_factory=list)
    _connected: bool = field(init=False, repr=False, default=False)

    def __post_init__(self):
        v = int(self.num_vertices)
        if v <= 0:
            raise EndpointRangeError("num_vertices must be positive")
        self.num_vertices = v

        norm_edges = []
        seen = set()
        for k, (i, j) in enumerate(self.edges):
            i, j = int(i), int(j)
            if not (0 <= i < v and 0 <= j < v):
                raise EndpointRangeError(f"edge {k} endpoint out of range: ({i}, {j})")
            if i == j:
                raise SelfLoopError(f"edge {k} is a self-loop at vertex {i}")
            key = (min(i, j), max(i, j))
            if key in seen:
                raise DuplicateEdgeError(f"edge {k} duplicates pair {key}")
            seen.add(key)
            norm_edges.append(key)
        self.edges = tuple(norm_edges)

        if self.weights is not None:
            if len(self.weights) != len(self.edges):
                raise WeightCountError(
                    f"{len(self.weights)} weights for {len(self.edges)} edges"
                )
            w = tuple(float(x) for x in self.weights)
            for k, x in enumerate(w):
                if not (x > 0.0) or not np.isfinite(x):
                    raise NonPositiveWeightError(f"weight of edge {k} is {x}")
            self.weights = w

        # adjacency: vertex -> {neighbour: edge index}
        adj: list[dict[int, int]] = [dict() for _ in range(v)]
        for k, (i, j) in enumerate(self.edges):
            adj[i][j] = k
            adj[j][i] = k
        self._adjacency = adj
        self._connected = self._bfs_connected()

    def _bfs_connected(self) -> bool:
        if self.num_vertices == 1:
            return True
        seen = [False] * self.num_vertices
        seen[0] = True
        queue = deque([0])
        count = 1
        while queue:
            i = queue.popleft()
            for j in self._adjacency[i]:
                if not seen[j]:
                    seen[j] = True
                    count += 1
                    queue.append(j)
        return count == self.num_vertices

    # -- basic queries ----------------------------------------------------

    @property
    def num_edges(self) -> int:
        return len(self.edges)

    @property
    def is_connected(self) -> bool:
        return self._connected

    @property
    def is_weighted(self) -> bool:
        return self.weights is not None

    def neighbors(self, i: int) -> tuple[int, ...]:
        return tuple(self._adjacency[i])

    def has_edge(self, i: int, j: int) -> bool:
        return j in self._adjacency[i]

    def edge_weight(self, k: int) -> float:
        return 1.0 if self.weights is None else self.weights[k]

    # -- matrices and degrees ---------------------------------------------

    def adjacency_matrix(self) -> np.ndarray:
        """0/1 connectivity matrix, symmetric with zero diagonal."""
        c = np.zeros((self.num_vertices, self.num_vertices))
        for i, j in self.edges:
            c[i, j] = 1.0
            c[j, i] = 1.0
        return c

    def weighted_adjacency_matrix(self) -> np.ndarray:
        """Connectivity matrix with weights in place of the ones."""
        c = np.zeros((self.num_vertices, self.num_vertices))
        for k, (i, j) in enumerate(self.edges):
            w = self.edge_weight(k)
            c[i, j] = w
            c[j, i] = w
        return c

    def degrees(self) -> "VertexDegrees":
        valency = np.zeros(self.num_vertices, dtype=int)
        weighted = np.zeros(self.num_vertices)
        for k, (i, j) in enumerate(self.edges):
            valency[i] += 1
            valency[j] += 1
            w = self.edge_weight(k)
            weighted[i] += w
            weighted[j] += w
        return VertexDegrees(valency=valency, weighted_valency=weighted)

    @property
    def is_regular(self) -> bool:
        deg = self.degrees().valency
        return bool(np.all(deg == deg[0]))

    @property
    def regular_degree(self) -> int:
        from .errors import RegularityError

        deg = self.degrees().valency
        if not np.all(deg == deg[0]):
            raise RegularityError("graph is not regular")
        return int(deg[0])


@dataclass
class VertexDegrees:
    """Per-vertex valencies and their weighted analogue u_i = sum_j w_ij."""

    valency: np.ndarray
    weighted_valency: np.ndarray


@dataclass
class DirectedBondSpace:
    """Indexed set of the 2B directed bonds of a graph.

    Edge k of the graph (with endpoints i < j) yields bond 2k = (i -> j)
    and bond 2k+1 = (j -> i), so reversal(2k) = 2k+1.  Bond d' may follow
    bond d exactly when terminus(d) == origin(d').
    """

    graph: Graph
    origin: np.ndarray
    terminus: np.ndarray
    reversal: np.ndarray
    bond_weight: np.ndarray  # weight of the underlying edge, 1.0 if unweighted

    @property
    def num_bonds(self) -> int:
        return len(self.origin)

    def bonds(self) -> list[tuple[int, int]]:
        return list(zip(self.origin.tolist(), self.terminus.tolist()))

    def follows(self, d: int, d_next: int) -> bool:
        return self.terminus[d] == self.origin[d_next]

    def successors(self, d: int) -> np.ndarray:
        """Bonds that may follow d, ascending; exactly one is reversal(d)."""
        return self.outgoing(int(self.terminus[d]))

    def outgoing(self, vertex: int) -> np.ndarray:
        return self._outgoing[vertex]

    def incoming(self, vertex: int) -> np.ndarray:
        return self._incoming[vertex]

    def __post_init__(self):
        v = self.graph.num_vertices
        self._outgoing = [
            np.flatnonzero(self.origin == i).astype(np.int64) for i in range(v)
        ]
        self._incoming = [
            np.flatnonzero(self.terminus == i).astype(np.int64) for i in range(v)
        ]
        # padded successor table for vectorized walk expansion
        max_deg = max((len(o) for o in self._outgoing), default=0)
        pad = np.full((self.num_bonds, max_deg), -1, dtype=np.int64)
        for d in range(self.num_bonds):
            succ = self._outgoing[int(self.terminus[d])]
            pad[d, : len(succ)] = succ
        self._succ_pad = pad

    def successor_table(self) -> np.ndarray:
        """(2B, max_degree) successor table padded with -1."""
        return self._succ_pad


def build_graph(
    num_vertices: int,
    edges,
    weights=None,
) -> Graph:
    """Validate and build a Graph from a vertex count and edge list."""
    return Graph(num_vertices=num_vertices, edges=tuple(edges), weights=weights)


def directed_bonds(g: Graph) -> DirectedBondSpace:
    """Build the directed-bond coordinate system of a graph."""
    b = g.num_edges
    origin = np.empty(2 * b, dtype=np.int64)
    terminus = np.empty(2 * b, dtype=np.int64)
    reversal = np.empty(2 * b, dtype=np.int64)
    weight = np.empty(2 * b)
    for k, (i, j) in enumerate(g.edges):
        origin[2 * k] = i
        terminus[2 * k] = j
        origin[2 * k + 1] = j
        terminus[2 * k + 1] = i
        reversal[2 * k] = 2 * k + 1
        reversal[2 * k + 1] = 2 * k
        weight[2 * k] = weight[2 * k + 1] = g.edge_weight(k)
    return DirectedBondSpace(
        graph=g, origin=origin, terminus=terminus, reversal=reversal, bond_weight=weight
    )


def cycle_rank(g: Graph) -> int:
    """Number of independent cycles, B - V + 1, of a connected graph."""
    if not g.is_connected:
        raise DisconnectedGraphError("cycle rank B - V + 1 assumes one component")
    return g.num_edges - g.num_vertices + 1


# -- file formats ----------------------------------------------------------

def parse_graph_json(text: str) -> Graph:
    """Parse the JSON graph format.

    ``{"num_vertices": int, "edges": [{"u": int, "v": int, "w": float?}, ...]}``
    An omitted "w" means weight 1; if no edge carries "w" the graph is
    unweighted.
    """
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise GraphFormatError(f"invalid JSON: {exc.msg}", line=exc.lineno) from exc
    if not isinstance(data, dict) or "num_vertices" not in data or "edges" not in data:
        raise GraphFormatError('expected {"num_vertices": ..., "edges": [...]}')
    edges = []
    weights = []
    any_weight = False
    for k, entry in enumerate(data["edges"]):
        if not isinstance(entry, dict) or "u" not in entry or "v" not in entry:
            raise GraphFormatError(f'edge {k}: expected {{"u": int, "v": int}}')
        edges.append((entry["u"], entry["v"]))
        if "w" in entry and entry["w"] is not None:
            any_weight = True
            weights.append(float(entry["w"]))
        else:
            weights.append(1.0)
    return build_graph(
        data["num_vertices"], edges, weights=tuple(weights) if any_weight else None
    )


def parse_graph_edgelist(text: str) -> Graph:
    """Parse the plain-text edge list: one "u v [w]" per line, '#' comments."""
    edges = []
    weights = []
    any_weight = False
    max_vertex = -1
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) not in (2, 3):
            raise GraphFormatError(f"expected 'u v [w]', got {raw!r}", line=lineno)
        try:
            u, v = int(parts[0]), int(parts[1])
        except ValueError:
            raise GraphFormatError(f"bad vertex index in {raw!r}", line=lineno) from None
        w = 1.0
        if len(parts) == 3:
            try:
                w = float(parts[2])
            except ValueError:
                raise GraphFormatError(f"bad weight in {raw!r}", line=lineno) from None
            any_weight = True
        edges.append((u, v))
        weights.append(w)
        max_vertex = max(max_vertex, u, v)
    if not edges:
        raise GraphFormatError("no edges found")
    return build_graph(
        max_vertex + 1, edges, weights=tuple(weights) if any_weight else None
    )


def load_graph(path) -> Graph:
    """Load a graph file, JSON or plain-text edge list."""
    with open(path, "r", encoding="utf-8") as fh:
        text = fh.read()
    stripped = text.lstrip()
    if stripped.startswith("{"):
        return parse_graph_json(text)
    return parse_graph_edgelist(text)


def graph_to_json(g: Graph) -> str:
    edges = []
    for k, (i, j) in enumerate(g.edges):
        entry = {"u": i, "v": j}
        if g.weights is not None:
            entry["w"] = g.weights[k]
        edges.append(entry)
    return json.dumps({"num_vertices": g.num_vertices, "edges": edges})
