"""Single-logical-qubit codes carved out of graph states.

A code is specified by a progenitor graph on n+1 vertices together with a
distinguished input vertex.  The n remaining vertices carry the code
qubits; the input's neighborhood B fixes the logical operators

    logical X = prod_{b in B} Z_b
    logical Z = K_{b0}          (the code-graph generator at the lowest b)

and the stabilizer group is generated by K_{b0} K_b for the other b in B
together with K_{b'} for every code qubit outside B.  All K operators here
live on the code graph, the induced subgraph on the code qubits.
"""

from __future__ import annotations

import json

from .graphs import Graph, graph_state_generators, local_complement, star_graph
from .pauli import PauliOperator, symplectic_rank


class InvalidCodeError(ValueError):
    """Raised when a progenitor graph does not define a valid code."""


class GraphCode:
    """A graph code for one logical qubit, from a progenitor graph.

    Code qubits are the progenitor vertices other than the input, relabeled
    to 0..n-1 in ascending original order.
    """

    __slots__ = ("progenitor", "input_vertex", "b0", "n", "code_vertices",
                 "code_graph", "branch_mask", "logical_x", "logical_y",
                 "logical_z", "stabilizer_generators")

    def __init__(self, progenitor: Graph, input_vertex: int = 0,
                 b0: int | None = None):
        if not 0 <= input_vertex < progenitor.n:
            raise InvalidCodeError(f"input vertex {input_vertex} out of range")
        b_orig = progenitor.neighbors(input_vertex)
        if not b_orig:
            raise InvalidCodeError("input vertex has no neighbors")
        if b0 is None:
            b0 = b_orig[0]
        elif b0 not in b_orig:
            raise InvalidCodeError(f"b0={b0} is not a neighbor of the input")

        code_vertices = tuple(v for v in range(progenitor.n) if v != input_vertex)
        pos = {v: i for i, v in enumerate(code_vertices)}
        n = len(code_vertices)
        code_graph = progenitor.induced(list(code_vertices))

        branch_mask = 0
        for b in b_orig:
            branch_mask |= 1 << pos[b]
        k = graph_state_generators(code_graph)
        b0_idx = pos[b0]

        logical_x = PauliOperator(n, 0, branch_mask)
        logical_z = k[b0_idx]
        gens = [k[b0_idx] * k[pos[b]] for b in b_orig if b != b0]
        gens += [k[i] for i in range(n) if not (branch_mask >> i) & 1]

        object.__setattr__(self, "progenitor", progenitor)
        object.__setattr__(self, "input_vertex", input_vertex)
        object.__setattr__(self, "b0", b0)
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "code_vertices", code_vertices)
        object.__setattr__(self, "code_graph", code_graph)
        object.__setattr__(self, "branch_mask", branch_mask)
        object.__setattr__(self, "logical_x", logical_x)
        object.__setattr__(self, "logical_z", logical_z)
        object.__setattr__(self, "logical_y", logical_x * logical_z)
        object.__setattr__(self, "stabilizer_generators", tuple(gens))
        self._check_invariants()

    def __setattr__(self, name, value):
        raise AttributeError("GraphCode is immutable")

    def _check_invariants(self):
        if self.logical_x.commutes(self.logical_z):
            raise InvalidCodeError("logical X and Z do not anticommute")
        gens = self.stabilizer_generators
        for i, g in enumerate(gens):
            if not g.commutes(self.logical_x) or not g.commutes(self.logical_z):
                raise InvalidCodeError("stabilizer fails to commute with a logical")
            for h in gens[i + 1:]:
                if not g.commutes(h):
                    raise InvalidCodeError("stabilizer generators do not commute")
        if symplectic_rank(gens) != self.n - 1:
            raise InvalidCodeError("stabilizer generators are dependent")

    # -- logical accessors ------------------------------------------------

    def logical(self, which: str) -> PauliOperator:
        if which == "X":
            return self.logical_x
        if which == "Y":
            return self.logical_y
        if which == "Z":
            return self.logical_z
        raise ValueError(f"unknown logical label: {which}")

    # -- serialization ----------------------------------------------------

    def to_json(self) -> str:
        return json.dumps({
            "n_vertices": self.progenitor.n,
            "edges": self.progenitor.edges(),
            "input": self.input_vertex,
            "b0": self.b0,
        })

    @classmethod
    def from_json(cls, text: str) -> "GraphCode":
        data = json.loads(text)
        graph = Graph.from_edges(data["n_vertices"], data["edges"])
        return cls(graph, data["input"], data.get("b0"))

    def lc_variant(self, vertex: int) -> "GraphCode":
        """The code from the locally complemented progenitor (same input)."""
        return GraphCode(local_complement(self.progenitor, vertex),
                         self.input_vertex)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, GraphCode)
            and self.progenitor == other.progenitor
            and self.input_vertex == other.input_vertex
            and self.b0 == other.b0
        )

    def __hash__(self) -> int:
        return hash((self.progenitor, self.input_vertex, self.b0))

    def __repr__(self) -> str:
        return (f"GraphCode(n={self.n}, input={self.input_vertex}, "
                f"edges={self.progenitor.edges()})")


# -- named examples ---------------------------------------------------------

def pentagon_code() -> GraphCode:
    """The five-cycle progenitor: four code qubits on a path."""
    ring = Graph.from_edges(5, [(i, (i + 1) % 5) for i in range(5)])
    return GraphCode(ring, 0)


def star_code(n: int) -> GraphCode:
    """Star progenitor with the input at the center; n code qubits."""
    return GraphCode(star_graph(n + 1), 0)


def cube_code() -> GraphCode:
    """Seven code qubits; the progenitor is in the cube's orbit."""
    edges = [(0, 4), (0, 5), (0, 7), (1, 3), (1, 4), (1, 5),
             (2, 3), (2, 5), (2, 7), (3, 6), (4, 6), (6, 7)]
    return GraphCode(Graph.from_edges(8, edges), 0)


def branched_chain_code() -> GraphCode:
    """Two two-qubit branches hanging off the input: four code qubits."""
    edges = [(0, 1), (1, 2), (0, 3), (3, 4)]
    return GraphCode(Graph.from_edges(5, edges), 0)


def decorated_pentagon_code() -> GraphCode:
    """Pentagon with pendant qubits on two non-adjacent cycle vertices.

    Six code qubits.  The smallest code we found that is loss tolerant
    for arbitrary-basis measurements (break-even near 32% loss) while
    its logical error rate approaches the bare output-qubit rate at low
    noise.
    """
    edges = [(0, 1), (1, 2), (2, 3), (3, 4), (4, 0), (1, 5), (3, 6)]
    return GraphCode(Graph.from_edges(7, edges), 0)


def shor_22_code() -> GraphCode:
    """The (2,2) Shor code as a graph code: the depth-two tree [2, 1].

    Hadamards on the two leaf qubits turn the tree code's stabilizers
    (Z X on each arm, X X Z Z across) into the familiar pair-wise Z Z
    plus all-X form, so this progenitor is in the Shor code's local
    equivalence class.  Four code qubits.
    """
    return tree_code([2, 1])


def tree_progenitor(branching: list[int]) -> Graph:
    """Tree with the input as root; level v has branching[v] children each."""
    edges = []
    level = [0]
    count = 1
    for b in branching:
        nxt = []
        for parent in level:
            for _ in range(b):
                edges.append((parent, count))
                nxt.append(count)
                count += 1
        level = nxt
    return Graph.from_edges(count, edges)


def tree_code(branching: list[int]) -> GraphCode:
    """Code whose progenitor is the rooted tree with the given branching."""
    return GraphCode(tree_progenitor(branching), 0)
