"""Cascaded and concatenated evaluation of layered graph codes.

Large codes built from small units admit a recursive analysis: once a
unit's logical measurement success is known as a function of its code
qubits' per-basis transmissions, layers compose by evaluating that
function instead of by decoding the composite graph.  Two compositions
are covered.  A cascade keeps every layer physical and hangs a fresh
unit below each code qubit, whose input that qubit becomes; the qubit
can then be measured directly or recovered through its subtree.  A
concatenation replaces each code qubit by an encoded block; the
replaced qubits are virtual and only the deepest layer is physical.

The recursion works on four-component transmission vectors, one entry
per measurement basis.  For a physical qubit with a cascade block
underneath, a Z demand succeeds directly or through the block's
indirect Z, while X, Y and arbitrary-basis demands need the direct
measurement and the block's logical X (or Y) simultaneously; the two
variants are incompatible, so the better one is chosen in advance.  In
a concatenation every demand is served entirely by the block.
"""

from __future__ import annotations

import csv
import io
import json
from functools import lru_cache
from itertools import product

from .codes import GraphCode
from .errordecode import logical_flip_rates
from .graphs import Graph
from .losstree import load_or_build, success_polynomial
from .polynomials import LossPolynomial

__all__ = [
    "LayerStack",
    "StackResult",
    "TransmissionVector",
    "build_cascade_code",
    "cascade_choices",
    "cascade_transmission",
    "concat_transmission",
    "fixed_point_threshold",
    "logical_transmission",
    "optimize_stack",
    "scaling_csv",
    "stack_flip_rates",
    "top_transmission",
    "unit_F",
]

MODES = ("cascaded", "concatenated")


class TransmissionVector:
    """Per-basis measurement success probabilities (X, Y, Z, arbitrary)."""

    __slots__ = ("x", "y", "z", "a")

    def __init__(self, x: float, y: float, z: float, a: float):
        for name, value in zip(self.__slots__, (x, y, z, a)):
            if not 0.0 <= value <= 1.0:
                raise ValueError(f"eta_{name}={value} outside [0, 1]")
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "y", y)
        object.__setattr__(self, "z", z)
        object.__setattr__(self, "a", a)

    def __setattr__(self, name, value):
        raise AttributeError("TransmissionVector is immutable")

    @classmethod
    def uniform(cls, eta: float) -> "TransmissionVector":
        return cls(eta, eta, eta, eta)

    def as_dict(self) -> dict:
        """Mapping keyed by basis letter, as the polynomials expect."""
        return {"X": self.x, "Y": self.y, "Z": self.z, "A": self.a}

    def component(self, basis: str) -> float:
        try:
            return getattr(self, basis.lower())
        except AttributeError:
            raise ValueError(f"unknown basis {basis!r}") from None

    def __eq__(self, other) -> bool:
        if not isinstance(other, TransmissionVector):
            return NotImplemented
        return (self.x, self.y, self.z, self.a) == (other.x, other.y,
                                                    other.z, other.a)

    def __hash__(self) -> int:
        return hash((self.x, self.y, self.z, self.a))

    def __repr__(self) -> str:
        return (f"TransmissionVector(x={self.x:.6g}, y={self.y:.6g}, "
                f"z={self.z:.6g}, a={self.a:.6g})")


class LayerStack:
    """An ordered choice of unit codes, outermost first, plus the noise.

    ``layers[0]`` carries the logical qubit; each deeper entry is the
    unit hung below (cascade) or substituted into (concatenation) every
    code qubit of the layer above.  ``eta`` is the physical transmission
    seen by whichever qubits are physical under the chosen mode.
    """

    __slots__ = ("layers", "mode", "eta")

    def __init__(self, layers, mode: str, eta: float):
        layers = tuple(layers)
        if not layers:
            raise ValueError("a stack needs at least one layer")
        if any(not isinstance(c, GraphCode) for c in layers):
            raise TypeError("layers must be GraphCode instances")
        if mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}, got {mode!r}")
        if not 0.0 <= eta <= 1.0:
            raise ValueError(f"eta={eta} outside [0, 1]")
        object.__setattr__(self, "layers", layers)
        object.__setattr__(self, "mode", mode)
        object.__setattr__(self, "eta", eta)

    def __setattr__(self, name, value):
        raise AttributeError("LayerStack is immutable")

    @property
    def depth(self) -> int:
        return len(self.layers)

    @property
    def qubit_count(self) -> int:
        """Physical qubits: every layer of a cascade, only the deepest
        layer of a concatenation."""
        sizes = [c.n for c in self.layers]
        block = 1
        total = 0
        for s in sizes:
            block *= s
            total += block
        return total if self.mode == "cascaded" else block

    @property
    def stack_id(self) -> str:
        parts = "+".join(f"{c.progenitor.to_graph6()}@{c.input_vertex}"
                         for c in self.layers)
        return f"{self.mode}:{parts}"

    def to_json(self) -> str:
        return json.dumps({
            "mode": self.mode,
            "eta": self.eta,
            "layers": [json.loads(c.to_json()) for c in self.layers],
        })

    @classmethod
    def from_json(cls, text: str) -> "LayerStack":
        data = json.loads(text)
        layers = [GraphCode.from_json(json.dumps(d)) for d in data["layers"]]
        return cls(layers, data["mode"], data["eta"])

    def __eq__(self, other) -> bool:
        if not isinstance(other, LayerStack):
            return NotImplemented
        return (self.layers, self.mode, self.eta) == (other.layers,
                                                      other.mode, other.eta)

    def __hash__(self) -> int:
        return hash((self.layers, self.mode, self.eta))

    def __repr__(self) -> str:
        sizes = "x".join(str(c.n) for c in self.layers)
        return f"LayerStack({sizes}, {self.mode}, eta={self.eta})"


# -- unit recursion functions ------------------------------------------------------


@lru_cache(maxsize=256)
def unit_F(code: GraphCode, basis: str) -> LossPolynomial:
    """Logical measurement success of one unit as a multivariate polynomial.

    The returned polynomial tracks transmission and loss exponents per
    measurement basis, so evaluating it at a heterogeneous vector gives
    the probability of a logical ``basis`` measurement when the unit's
    code qubits succeed with per-basis probabilities of their own.
    """
    if basis not in ("X", "Y", "Z", "A"):
        raise ValueError(f"basis must be X, Y, Z or A, got {basis!r}")
    tree = load_or_build(code, "arbitrary" if basis == "A" else basis)
    return success_polynomial(tree)


def _apply(code: GraphCode, basis: str, r: TransmissionVector) -> float:
    return unit_F(code, basis).evaluate_heterogeneous(r.as_dict())


def _cascade_step(code: GraphCode, r: TransmissionVector,
                  eta: float) -> tuple[TransmissionVector, str]:
    """Transmissions of a physical qubit with one cascade block below.

    Non-Z demands pair the direct measurement with the block's logical X
    or logical Y; the stronger option is fixed in advance and reported.
    Z demands accept either the direct or the block's indirect route.
    """
    fx = _apply(code, "X", r)
    fy = _apply(code, "Y", r)
    fz = _apply(code, "Z", r)
    best, choice = (fx, "X") if fx >= fy else (fy, "Y")
    return TransmissionVector(eta * best, eta * best,
                              eta + (1.0 - eta) * fz, eta * best), choice


def cascade_transmission(stack: LayerStack) -> TransmissionVector:
    """Effective transmissions of the outermost unit's code qubits.

    Folds the layers below the outermost unit bottom-up, starting from
    bare physical qubits.  Apply ``unit_F`` of ``stack.layers[0]`` to
    the result for the cascade's logical measurement probabilities.
    """
    if stack.mode != "cascaded":
        raise ValueError(f"stack mode is {stack.mode!r}, not cascaded")
    r = TransmissionVector.uniform(stack.eta)
    for code in reversed(stack.layers[1:]):
        r, _ = _cascade_step(code, r, stack.eta)
    return r


def cascade_choices(stack: LayerStack) -> tuple[str, ...]:
    """Pre-selected block delivery (X or Y) per folded layer, deepest first."""
    if stack.mode != "cascaded":
        raise ValueError(f"stack mode is {stack.mode!r}, not cascaded")
    r = TransmissionVector.uniform(stack.eta)
    choices = []
    for code in reversed(stack.layers[1:]):
        r, choice = _cascade_step(code, r, stack.eta)
        choices.append(choice)
    return tuple(choices)


def concat_transmission(stack: LayerStack) -> TransmissionVector:
    """Effective transmissions of the outermost unit's (virtual) code qubits.

    Every demand on a replaced qubit is served by its block's logical
    measurement, so each fold step is a plain application of the four
    unit polynomials; only the deepest layer contributes physical qubits.
    """
    if stack.mode != "concatenated":
        raise ValueError(f"stack mode is {stack.mode!r}, not concatenated")
    r = TransmissionVector.uniform(stack.eta)
    for code in reversed(stack.layers[1:]):
        r = TransmissionVector(*(_apply(code, b, r) for b in "XYZA"))
    return r


def top_transmission(stack: LayerStack) -> TransmissionVector:
    """Mode-appropriate vector feeding the outermost unit."""
    if stack.mode == "cascaded":
        return cascade_transmission(stack)
    return concat_transmission(stack)


def logical_transmission(stack: LayerStack) -> TransmissionVector:
    """Logical measurement success of the whole stack, per basis.

    The encoded qubit is the (virtual) input of the outermost unit, so
    the logical level applies that unit's polynomials with no direct
    measurement term in either mode.
    """
    r = top_transmission(stack)
    return TransmissionVector(*(_apply(stack.layers[0], b, r)
                                for b in "XYZA"))


# -- thresholds --------------------------------------------------------------------


def fixed_point_threshold(code: GraphCode, bases=("X", "Y", "Z"),
                          iters: int = 200, tol: float = 1e-9) -> float | None:
    """Loss threshold of self-concatenation, or None when there is none.

    Iterates the scalar map eta -> min over ``bases`` of F(eta, ..., eta)
    and bisects on the starting point separating flow to 1 from flow to
    0.  The scalar map is the exact depth recursion when the unit's F
    coincides on every basis the target pattern uses; otherwise the min
    tracks the pattern-limiting component.  Returns the loss fraction
    1 - eta* at the unstable crossing.
    """
    polys = [unit_F(code, b) for b in bases]

    def settle(eta: float) -> float:
        v = eta
        for _ in range(iters):
            r = {"X": v, "Y": v, "Z": v, "A": v}
            v = min(p.evaluate_heterogeneous(r) for p in polys)
            if v <= 1e-12 or v >= 1.0 - 1e-12:
                break
        return v

    # A map that moves neither probe has no unstable crossing to bracket.
    if abs(settle(0.25) - 0.25) < 1e-6 and abs(settle(0.75) - 0.75) < 1e-6:
        return None
    lo, hi = 0.0, 1.0
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if settle(mid) > 0.5:
            hi = mid
        else:
            lo = mid
    return 1.0 - 0.5 * (lo + hi)


def stack_flip_rates(stack: LayerStack, lam: float) -> tuple:
    """Logical per-basis flip rates of a concatenated stack.

    Composition choice: each unit's decoder is analyzed at unit
    transmission with the per-basis flip rates produced by the layer
    below, starting from the physical depolarizing flip rate 2*lambda.
    """
    if stack.mode != "concatenated":
        raise ValueError("flip-rate recursion is defined for concatenation")
    rates = (2.0 * lam,) * 3
    for code in reversed(stack.layers):
        rates = logical_flip_rates(code, rates)
    return rates


# -- stack search ------------------------------------------------------------------


class StackResult:
    """One ranked entry from a stack search."""

    __slots__ = ("stack", "logical_loss", "qubit_count")

    def __init__(self, stack: LayerStack, logical_loss: float,
                 qubit_count: int):
        object.__setattr__(self, "stack", stack)
        object.__setattr__(self, "logical_loss", logical_loss)
        object.__setattr__(self, "qubit_count", qubit_count)

    def __setattr__(self, name, value):
        raise AttributeError("StackResult is immutable")

    def __repr__(self) -> str:
        return (f"StackResult({self.stack!r}, loss={self.logical_loss:.3e}, "
                f"qubits={self.qubit_count})")


def optimize_stack(library, max_depth: int, eta: float, basis: str = "A",
                   mode: str = "concatenated") -> list:
    """Exhaustive stack search, best logical loss first.

    Tries every ordered combination of library units up to ``max_depth``
    layers and ranks by the logical loss of the objective basis.  Each
    entry reports its physical qubit count for resource-scaling plots.
    """
    library = list(library)
    if not library:
        raise ValueError("library is empty")
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}, got {mode!r}")

    vectors: dict = {}

    def below(layers: tuple) -> TransmissionVector:
        """Vector feeding layers[0], memoized over shared suffixes."""
        if len(layers) == 1:
            return TransmissionVector.uniform(eta)
        tail = layers[1:]
        r = vectors.get(tail)
        if r is None:
            sub = below(tail)
            if mode == "cascaded":
                r, _ = _cascade_step(tail[0], sub, eta)
            else:
                r = TransmissionVector(*(_apply(tail[0], b, sub)
                                         for b in "XYZA"))
            vectors[tail] = r
        return r

    results = []
    for depth in range(1, max_depth + 1):
        for combo in product(library, repeat=depth):
            value = unit_F(combo[0], basis).evaluate_heterogeneous(
                below(combo).as_dict())
            stack = LayerStack(combo, mode, eta)
            results.append(StackResult(stack, 1.0 - value,
                                       stack.qubit_count))
    results.sort(key=lambda res: (res.logical_loss, res.qubit_count))
    return results


def scaling_csv(results) -> str:
    """Resource-scaling table (n_qubits, logical_loss, stack_id, eta)."""
    buf = io.StringIO()
    writer = csv.writer(buf)
    writer.writerow(["n_qubits", "logical_loss", "stack_id", "eta"])
    for res in results:
        writer.writerow([res.qubit_count, f"{res.logical_loss:.12g}",
                         res.stack.stack_id, res.stack.eta])
    return buf.getvalue()


# -- explicit cascade graphs -------------------------------------------------------


def build_cascade_code(layers) -> GraphCode:
    """The cascade as one explicit progenitor graph.

    Each code qubit of layer k becomes the input vertex of a fresh copy
    of the layer k+1 unit.  The composite keeps the outermost input as
    its own, so decoding it directly must reproduce the layer recursion.
    """
    layers = list(layers)
    if not layers:
        raise ValueError("a cascade needs at least one layer")
    top = layers[0]
    edges = list(top.progenitor.edges())
    count = top.progenitor.n
    frontier = [v for v in range(count) if v != top.input_vertex]
    for unit in layers[1:]:
        nxt = []
        for host in frontier:
            ids = {}
            for v in range(unit.progenitor.n):
                if v == unit.input_vertex:
                    ids[v] = host
                else:
                    ids[v] = count
                    nxt.append(count)
                    count += 1
            edges.extend((ids[u], ids[v]) for u, v in unit.progenitor.edges())
        frontier = nxt
    return GraphCode(Graph.from_edges(count, edges), top.input_vertex)
