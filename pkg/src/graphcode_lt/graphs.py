"""Simple undirected graphs with local complementation and LC orbits.

Adjacency is a tuple of neighbor bit masks, so graphs are hashable values
and local complementation is a few xors.  Canonical labeling fixes a
prefix of distinguished vertices (the code input) and minimizes the
adjacency bit string over the remaining permutations by branch and bound.
"""

from __future__ import annotations

import networkx as nx

from .pauli import PauliOperator, iter_bits


class Graph:
    """Immutable undirected graph on vertices 0..n-1, no self loops."""

    __slots__ = ("n", "nbr")

    def __init__(self, n: int, nbr: tuple[int, ...]):
        if len(nbr) != n:
            raise ValueError("adjacency length does not match vertex count")
        for v, row in enumerate(nbr):
            if row >> n:
                raise ValueError(f"vertex {v} has neighbors out of range")
            if (row >> v) & 1:
                raise ValueError(f"self loop at vertex {v}")
        for v in range(n):
            for u in iter_bits(nbr[v]):
                if not (nbr[u] >> v) & 1:
                    raise ValueError(f"asymmetric adjacency at ({v}, {u})")
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "nbr", tuple(nbr))

    def __setattr__(self, name, value):
        raise AttributeError("Graph is immutable")

    # -- constructors ----------------------------------------------------

    @classmethod
    def from_edges(cls, n: int, edges) -> "Graph":
        nbr = [0] * n
        for u, v in edges:
            if u == v:
                raise ValueError(f"self loop at vertex {u}")
            nbr[u] |= 1 << v
            nbr[v] |= 1 << u
        return cls(n, tuple(nbr))

    @classmethod
    def from_graph6(cls, text: str) -> "Graph":
        g = nx.from_graph6_bytes(text.strip().encode())
        n = g.number_of_nodes()
        return cls.from_edges(n, g.edges())

    def to_graph6(self) -> str:
        g = nx.Graph()
        g.add_nodes_from(range(self.n))
        g.add_edges_from(self.edges())
        return nx.to_graph6_bytes(g, header=False).decode().strip()

    # -- inspection ------------------------------------------------------

    def edges(self) -> list[tuple[int, int]]:
        out = []
        for v in range(self.n):
            for u in iter_bits(self.nbr[v]):
                if u > v:
                    out.append((v, u))
        return out

    def has_edge(self, u: int, v: int) -> bool:
        return bool((self.nbr[u] >> v) & 1)

    def degree(self, v: int) -> int:
        return self.nbr[v].bit_count()

    def neighbors(self, v: int) -> list[int]:
        return list(iter_bits(self.nbr[v]))

    def is_connected(self) -> bool:
        if self.n == 0:
            return True
        seen = 1
        frontier = 1
        while frontier:
            nxt = 0
            for v in iter_bits(frontier):
                nxt |= self.nbr[v]
            frontier = nxt & ~seen
            seen |= nxt
        return seen == (1 << self.n) - 1

    def induced(self, vertices: list[int]) -> "Graph":
        """Induced subgraph, relabeled to 0..len(vertices)-1 in list order."""
        pos = {v: i for i, v in enumerate(vertices)}
        nbr = [0] * len(vertices)
        for v in vertices:
            for u in iter_bits(self.nbr[v]):
                if u in pos:
                    nbr[pos[v]] |= 1 << pos[u]
        return Graph(len(vertices), tuple(nbr))

    def relabeled(self, perm: list[int]) -> "Graph":
        """Apply ``perm`` where perm[old] = new position."""
        nbr = [0] * self.n
        for v in range(self.n):
            row = 0
            for u in iter_bits(self.nbr[v]):
                row |= 1 << perm[u]
            nbr[perm[v]] = row
        return Graph(self.n, tuple(nbr))

    def add_vertex(self, neighborhood: int) -> "Graph":
        """New graph with vertex n attached to the given neighbor mask."""
        bit = 1 << self.n
        nbr = [row | (bit if (neighborhood >> v) & 1 else 0)
               for v, row in enumerate(self.nbr)]
        nbr.append(neighborhood)
        return Graph(self.n + 1, tuple(nbr))

    def __eq__(self, other) -> bool:
        return isinstance(other, Graph) and self.n == other.n and self.nbr == other.nbr

    def __hash__(self) -> int:
        return hash((self.n, self.nbr))

    def __repr__(self) -> str:
        return f"Graph({self.n}, edges={self.edges()})"


# -- standard builders ----------------------------------------------------

def path_graph(n: int) -> Graph:
    return Graph.from_edges(n, [(i, i + 1) for i in range(n - 1)])


def cycle_graph(n: int) -> Graph:
    return Graph.from_edges(n, [(i, (i + 1) % n) for i in range(n)])


def star_graph(n: int) -> Graph:
    """Star on n vertices with center 0."""
    return Graph.from_edges(n, [(0, i) for i in range(1, n)])


def complete_graph(n: int) -> Graph:
    return Graph.from_edges(n, [(i, j) for i in range(n) for j in range(i + 1, n)])


def graph_state_generators(g: Graph) -> list[PauliOperator]:
    """Stabilizer generators K_i = X_i prod_{k in N(i)} Z_k of the graph state."""
    return [PauliOperator(g.n, 1 << i, g.nbr[i]) for i in range(g.n)]


def local_complement(g: Graph, v: int) -> Graph:
    """Toggle all edges inside the neighborhood of v."""
    if not 0 <= v < g.n:
        raise ValueError(f"vertex {v} out of range")
    nv = g.nbr[v]
    nbr = list(g.nbr)
    for u in iter_bits(nv):
        nbr[u] ^= nv & ~(1 << u)
    return Graph(g.n, tuple(nbr))


# -- canonical labeling ----------------------------------------------------

def _canonical_perm(g: Graph, n_fixed: int) -> list[int]:
    """Minimize the adjacency bit string over permutations of vertices
    >= n_fixed; the first ``n_fixed`` vertices stay in place.

    The bit string is read column by column: placing a vertex at position
    p contributes the p bits linking it to positions 0..p-1, compared as
    an integer with bit i for position i.  Branch and bound on that
    lexicographic order.
    """
    n = g.n
    # place[pos] = original vertex
    place = list(range(n_fixed))
    used = (1 << n_fixed) - 1
    cols: list[int] = []

    # seed: identity placement gives an initial bound
    seed_cols = []
    for v in range(n_fixed, n):
        bits = 0
        for i in range(v):
            if g.has_edge(v, i):
                bits |= 1 << i
        seed_cols.append(bits)
    best_cols = seed_cols
    best_perm = list(range(n))

    def col_bits(cand: int) -> int:
        row = g.nbr[cand]
        bits = 0
        for i, orig in enumerate(place):
            if (row >> orig) & 1:
                bits |= 1 << i
        return bits

    def rec(pos: int):
        nonlocal best_cols, best_perm, used
        if pos == n:
            if cols < best_cols:
                best_cols = list(cols)
                best_perm = list(place)
            return
        cands = sorted((col_bits(c), c) for c in range(n) if not (used >> c) & 1)
        for bits, cand in cands:
            cols.append(bits)
            # reaching this node means cols[:-1] <= best prefix, so a
            # larger column here can only mean the prefixes were equal:
            # every remaining (sorted) candidate is worse too
            if cols > best_cols[: len(cols)]:
                cols.pop()
                break
            place.append(cand)
            used |= 1 << cand
            rec(pos + 1)
            place.pop()
            used &= ~(1 << cand)
            cols.pop()

    rec(n_fixed)
    # best_perm maps position -> original; invert to old -> new
    inv = [0] * n
    for pos, orig in enumerate(best_perm):
        inv[orig] = pos
    return inv


def canonical_form(g: Graph, n_fixed: int = 0) -> Graph:
    """The canonically relabeled graph (first ``n_fixed`` vertices pinned)."""
    return g.relabeled(_canonical_perm(g, n_fixed))


def canonical_key(g: Graph, n_fixed: int = 0) -> tuple:
    """Hashable canonical invariant under permutations preserving the pinned prefix."""
    cf = canonical_form(g, n_fixed)
    return (cf.n, cf.nbr)


def lc_orbit(g: Graph, cap: int = 10 ** 6, n_fixed: int = 1) -> tuple[set[Graph], bool]:
    """Closure of ``g`` under local complementation at every vertex.

    Members are deduplicated by canonical labeling with the first
    ``n_fixed`` vertices held fixed (vertex 0 is the code input by
    convention).  Returns (members, truncated_flag); enumeration stops
    once ``cap`` members are collected.
    """
    if cap <= 0:
        raise ValueError("cap must be positive")
    start = canonical_form(g, n_fixed)
    seen = {start}
    frontier = [start]
    truncated = False
    while frontier and not truncated:
        nxt = []
        for h in frontier:
            for v in range(h.n):
                if h.nbr[v] == 0:
                    continue
                cf = canonical_form(local_complement(h, v), n_fixed)
                if cf not in seen:
                    seen.add(cf)
                    nxt.append(cf)
                    if len(seen) >= cap:
                        truncated = True
                        break
            if truncated:
                break
        frontier = nxt
    return seen, truncated


def orbit_key(g: Graph, n_fixed: int = 1, cap: int = 10 ** 6) -> tuple:
    """Canonical key of the whole LC orbit: minimum member key."""
    members, truncated = lc_orbit(g, cap=cap, n_fixed=n_fixed)
    if truncated:
        raise RuntimeError("orbit truncated; key would not be canonical")
    return min((m.n, m.nbr) for m in members)
