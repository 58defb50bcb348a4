"""Offline loss decoders compiled into decision trees.

A tree node attempts one qubit in one basis and branches on detection
versus loss.  The Pauli decoder hunts for any fully measured non-trivial
logical operator; the arbitrary decoder first locks in an output qubit
(measured in the rotated basis) and then teleports the logical onto it by
completing an anticommuting operator pair.  Trees are built once, then
evaluated exactly (success polynomial), sampled (Monte Carlo), or walked
per loss mask by the error decoder.
"""

from __future__ import annotations

import hashlib
import json
import os
from functools import lru_cache

import numpy as np

from .codes import GraphCode
from .opsets import (
    EXHAUSTIVE_LIMIT,
    OperatorSet,
    enumerate_nontrivial,
    filter_compatible,
)
from .pauli import (
    BASIS_A,
    Basis,
    MeasurementPattern,
    PauliOperator,
    commutes_qubitwise,
    iter_bits,
)
from .polynomials import LossPolynomial, break_even  # re-export break_even

__all__ = [
    "DecisionTree", "Leaf", "MeasureNode", "build_pauli_tree",
    "build_arbitrary_tree", "success_polynomial", "total_polynomial",
    "monte_carlo_decode", "decode", "optimal_success", "break_even",
    "load_or_build",
]

CACHE_ENV = "GRAPHCODE_LT_CACHE"


class Leaf:
    """Terminal decoder state.

    ``targets`` holds the fully measured operator (Pauli mode) or the
    anticommuting pair (arbitrary mode); ``output`` is the teleportation
    output qubit in arbitrary mode.
    """

    __slots__ = ("outcome", "pattern", "targets", "output")

    def __init__(self, outcome: str, pattern: MeasurementPattern,
                 targets: tuple = (), output: int | None = None):
        self.outcome = outcome
        self.pattern = pattern
        self.targets = targets
        self.output = output

    @property
    def success(self) -> bool:
        return self.outcome == "success"

    def correction(self, sign_first: int, sign_second: int) -> str:
        """Pauli frame fix-up on the output qubit given the measured signs
        of the two teleported operators (each +1 or -1).

        A negative sign on one operator is repaired by the letter of the
        *other* operator at the output, which anticommutes with the first's
        letter there and commutes with its own.
        """
        if not self.success or self.output is None:
            raise ValueError("corrections only apply to arbitrary-mode success leaves")
        first, second = self.targets
        u = PauliOperator.identity(1)
        if sign_first < 0:
            u = u * PauliOperator.from_letters(second.letter_at(self.output))
        if sign_second < 0:
            u = u * PauliOperator.from_letters(first.letter_at(self.output))
        return u.letters()

    def __repr__(self) -> str:
        return f"Leaf({self.outcome}, {self.pattern!r})"


class MeasureNode:
    __slots__ = ("qubit", "basis", "on_detect", "on_loss")

    def __init__(self, qubit: int, basis: Basis, on_detect, on_loss):
        self.qubit = qubit
        self.basis = basis
        self.on_detect = on_detect
        self.on_loss = on_loss

    def __repr__(self) -> str:
        return f"MeasureNode(q={self.qubit}, basis={self.basis.kind})"


class DecisionTree:
    """Immutable compiled decoder for one code and one measurement task."""

    __slots__ = ("code", "kind", "root", "__weakref__")

    def __init__(self, code: GraphCode, kind: str, root):
        self.code = code
        self.kind = kind
        self.root = root

    def leaves(self):
        stack = [self.root]
        while stack:
            node = stack.pop()
            if isinstance(node, Leaf):
                yield node
            else:
                stack.append(node.on_detect)
                stack.append(node.on_loss)

    def stats(self) -> dict:
        n_nodes = n_success = n_failure = 0
        for leaf in self.leaves():
            if leaf.success:
                n_success += 1
            else:
                n_failure += 1
        stack = [self.root]
        while stack:
            node = stack.pop()
            n_nodes += 1
            if isinstance(node, MeasureNode):
                stack.append(node.on_detect)
                stack.append(node.on_loss)
        return {"nodes": n_nodes, "success_leaves": n_success,
                "failure_leaves": n_failure}

    # -- serialization ------------------------------------------------------

    def to_json(self) -> str:
        def enc(node):
            if isinstance(node, Leaf):
                return {
                    "leaf": node.outcome,
                    "pattern": node.pattern.chars(),
                    "targets": [t.to_string() for t in node.targets],
                    "output": node.output,
                }
            return {
                "qubit": node.qubit,
                "basis": node.basis.kind,
                "detected": enc(node.on_detect),
                "lost": enc(node.on_loss),
            }
        return json.dumps({"kind": self.kind, "code": json.loads(self.code.to_json()),
                           "root": enc(self.root)})

    @classmethod
    def from_json(cls, text: str) -> "DecisionTree":
        data = json.loads(text)
        code = GraphCode.from_json(json.dumps(data["code"]))

        def dec(obj):
            if "leaf" in obj:
                return Leaf(obj["leaf"], MeasurementPattern.from_chars(obj["pattern"]),
                            tuple(PauliOperator.from_string(t) for t in obj["targets"]),
                            obj["output"])
            return MeasureNode(obj["qubit"], Basis(obj["basis"]),
                               dec(obj["detected"]), dec(obj["lost"]))

        return cls(code, data["kind"], dec(data["root"]))


# -- Pauli decoder -------------------------------------------------------------


def _next_meas(survivors, pattern: MeasurementPattern) -> tuple[int, Basis]:
    """Deterministic attempt choice: the minimum-weight surviving operator
    (sets are pre-sorted), then its lowest-index unmeasured support qubit."""
    op = survivors[0]
    live = op.support & pattern.unmeasured
    q = next(iter_bits(live))
    return q, Basis(op.letter_at(q))


@lru_cache(maxsize=64)
def build_pauli_tree(code: GraphCode, basis: str = "Z",
                     limit: int = EXHAUSTIVE_LIMIT) -> DecisionTree:
    """Compile the Pauli-basis loss decoder for one logical basis."""
    if basis not in ("X", "Y", "Z"):
        raise ValueError(f"basis must be X, Y or Z, got {basis!r}")
    ops = enumerate_nontrivial(code, "Logical" + basis, limit)

    def rec(pattern: MeasurementPattern):
        survivors = [op for op in ops
                     if commutes_qubitwise(op, pattern, completed=False)]
        if not survivors:
            return Leaf("failure", pattern)
        for op in survivors:
            if commutes_qubitwise(op, pattern, completed=True):
                return Leaf("success", pattern, targets=(op,))
        q, b = _next_meas(survivors, pattern)
        return MeasureNode(q, b, rec(pattern.measure(q, b)), rec(pattern.lose(q)))

    return DecisionTree(code, f"pauli-{basis}", rec(MeasurementPattern(code.n)))


# -- arbitrary-basis decoder -----------------------------------------------------


class _Strategy:
    """An anticommuting operator pair sharing a single output qubit."""

    __slots__ = ("output", "first", "second", "first_masked", "second_masked")

    def __init__(self, output: int, first: PauliOperator, second: PauliOperator):
        self.output = output
        self.first = first
        self.second = second
        bit = 1 << output
        self.first_masked = PauliOperator(first.n, first.x & ~bit, first.z & ~bit)
        self.second_masked = PauliOperator(second.n, second.x & ~bit, second.z & ~bit)

    def alive(self, pattern: MeasurementPattern) -> bool:
        """Still completable: output not lost to a wrong basis, and both
        members measurable on the remaining qubits."""
        status = pattern.status(self.output)
        if status not in ("unmeasured", BASIS_A):
            return False
        return (commutes_qubitwise(self.first_masked, pattern, completed=False)
                and commutes_qubitwise(self.second_masked, pattern, completed=False))

    def complete(self, pattern: MeasurementPattern) -> bool:
        return (pattern.status(self.output) == BASIS_A
                and commutes_qubitwise(self.first_masked, pattern, completed=True)
                and commutes_qubitwise(self.second_masked, pattern, completed=True))


@lru_cache(maxsize=64)
def _strategies(code: GraphCode, limit: int) -> tuple[_Strategy, ...]:
    ops = enumerate_nontrivial(code, "AllLogical", limit).operators
    out = []
    for i, a in enumerate(ops):
        for b in ops[i + 1:]:
            if a.commutes(b):
                continue
            # qubits where both act, with different letters
            both = (a.x | a.z) & (b.x | b.z)
            differ = both & ((a.x ^ b.x) | (a.z ^ b.z))
            if differ.bit_count() == 1:
                out.append(_Strategy(next(iter_bits(differ)), a, b))
    return tuple(out)


@lru_cache(maxsize=64)
def build_arbitrary_tree(code: GraphCode,
                         limit: int = EXHAUSTIVE_LIMIT) -> DecisionTree:
    """Compile the arbitrary-basis decoder (teleport onto an output qubit)."""
    all_strategies = _strategies(code, limit)

    def next_out(alive) -> int:
        counts: dict[int, int] = {}
        for s in alive:
            counts[s.output] = counts.get(s.output, 0) + 1
        best = max(counts.values())
        return min(o for o, c in counts.items() if c == best)

    def rec(pattern: MeasurementPattern, current: int | None):
        alive = [s for s in all_strategies if s.alive(pattern)]
        if not alive:
            return Leaf("failure", pattern)
        for s in alive:
            if s.complete(pattern):
                return Leaf("success", pattern, targets=(s.first, s.second),
                            output=s.output)
        if current is not None:
            at_out = [s for s in alive if s.output == current]
        else:
            at_out = []
        if not at_out:
            # pick (or re-pick) the output and try the rotated measurement
            o = next_out(alive)
            return MeasureNode(
                o, BASIS_A,
                rec(pattern.measure(o, BASIS_A), o),
                rec(pattern.lose(o), None),
            )
        members = sorted({op for s in at_out for op in (s.first, s.second)
                          if op.support & pattern.unmeasured},
                         key=lambda op: (op.weight, op.x, op.z))
        q, b = _next_meas(members, pattern)
        return MeasureNode(q, b,
                           rec(pattern.measure(q, b), current),
                           rec(pattern.lose(q), current))

    return DecisionTree(code, "arbitrary", rec(MeasurementPattern(code.n), None))


# -- evaluation ------------------------------------------------------------------


def _tree_polynomial(tree: DecisionTree, leaf_value) -> LossPolynomial:
    memo: dict[int, LossPolynomial] = {}

    def rec(node) -> LossPolynomial:
        key = id(node)
        if key in memo:
            return memo[key]
        if isinstance(node, Leaf):
            poly = leaf_value(node)
        else:
            kind = node.basis.kind
            poly = (rec(node.on_detect).attempt(kind, lost=False)
                    + rec(node.on_loss).attempt(kind, lost=True))
        memo[key] = poly
        return poly

    return rec(tree.root)


def success_polynomial(tree: DecisionTree) -> LossPolynomial:
    """Exact success probability, per-basis attempt exponents preserved."""
    return _tree_polynomial(
        tree,
        lambda leaf: LossPolynomial.one() if leaf.success else LossPolynomial.zero(),
    )


def total_polynomial(tree: DecisionTree) -> LossPolynomial:
    """Sum over all leaves; must equal 1 identically (conservation check)."""
    return _tree_polynomial(tree, lambda leaf: LossPolynomial.one())


def decode(tree: DecisionTree, detected_mask: int) -> Leaf:
    """Walk the tree for one loss configuration (bit set = qubit detected)."""
    node = tree.root
    while isinstance(node, MeasureNode):
        if (detected_mask >> node.qubit) & 1:
            node = node.on_detect
        else:
            node = node.on_loss
    return node


class MCResult:
    __slots__ = ("estimate", "stderr", "trials")

    def __init__(self, estimate: float, stderr: float, trials: int):
        self.estimate = estimate
        self.stderr = stderr
        self.trials = trials

    def __repr__(self) -> str:
        return f"MCResult({self.estimate:.6f} +/- {self.stderr:.6f}, trials={self.trials})"


def monte_carlo_decode(code: GraphCode, tree: DecisionTree, eta: float,
                       trials: int, seed: int = 0) -> MCResult:
    """Sample i.i.d. per-qubit loss and count decoder successes.

    Leaves are cylinder sets over the attempted qubits, so the count is
    vectorized: a sampled mask reaches a leaf iff every attempted qubit's
    fate matches the leaf's pattern.
    """
    if trials <= 0:
        raise ValueError("trials must be positive")
    rng = np.random.default_rng(seed)
    masks = np.zeros(trials, dtype=np.uint64)
    for q in range(code.n):
        bit = np.uint64(1 << q)
        masks |= np.where(rng.random(trials) < eta, bit, np.uint64(0))
    successes = 0
    for leaf in tree.leaves():
        if not leaf.success:
            continue
        p = leaf.pattern
        attempted = np.uint64(((1 << p.n) - 1) & ~p.unmeasured)
        detected = np.uint64(p.mx | p.my | p.mz | p.mother)
        successes += int(np.count_nonzero((masks & attempted) == detected))
    est = successes / trials
    stderr = float(np.sqrt(max(est * (1.0 - est), 1e-12) / trials))
    return MCResult(est, stderr, trials)


# -- exact-optimal benchmark -------------------------------------------------------


def optimal_success(code: GraphCode, eta: float, kind: str = "arbitrary",
                    limit: int = 6) -> float:
    """Best achievable success probability over all adaptive strategies.

    Full minimax over measurement choices with memoization on the pattern;
    exponential in n, so guarded by ``limit``.  Used to check that the
    deterministic heuristics give up nothing on the reference codes.
    """
    if code.n > limit:
        raise ValueError(f"optimal search limited to n <= {limit}")
    if kind == "arbitrary":
        strategies = _strategies(code, EXHAUSTIVE_LIMIT)

        def terminal(pattern):
            alive = [s for s in strategies if s.alive(pattern)]
            if not alive:
                return 0.0
            if any(s.complete(pattern) for s in alive):
                return 1.0
            return None

        def actions(pattern):
            acts = set()
            for s in strategies:
                if not s.alive(pattern):
                    continue
                if pattern.status(s.output) == "unmeasured":
                    acts.add((s.output, "A"))
                for op in (s.first_masked, s.second_masked):
                    for q in iter_bits(op.support & pattern.unmeasured):
                        acts.add((q, op.letter_at(q)))
            return acts
    else:
        ops = enumerate_nontrivial(code, "Logical" + kind)

        def terminal(pattern):
            survivors = [op for op in ops
                         if commutes_qubitwise(op, pattern, completed=False)]
            if not survivors:
                return 0.0
            if any(commutes_qubitwise(op, pattern, completed=True)
                   for op in survivors):
                return 1.0
            return None

        def actions(pattern):
            acts = set()
            for op in ops:
                if not commutes_qubitwise(op, pattern, completed=False):
                    continue
                for q in iter_bits(op.support & pattern.unmeasured):
                    acts.add((q, op.letter_at(q)))
            return acts

    memo: dict[MeasurementPattern, float] = {}

    def value(pattern) -> float:
        term = terminal(pattern)
        if term is not None:
            return term
        if pattern in memo:
            return memo[pattern]
        best = 0.0
        for q, letter in actions(pattern):
            basis = BASIS_A if letter == "A" else Basis(letter)
            v = (eta * value(pattern.measure(q, basis))
                 + (1.0 - eta) * value(pattern.lose(q)))
            if v > best:
                best = v
        memo[pattern] = best
        return best

    return value(MeasurementPattern(code.n))


# -- disk cache ---------------------------------------------------------------------


def load_or_build(code: GraphCode, kind: str) -> DecisionTree:
    """Build a tree, or reuse a cached copy when GRAPHCODE_LT_CACHE is set.

    ``kind`` is "arbitrary" or one of "X", "Y", "Z" (Pauli mode).
    """
    cache_dir = os.environ.get(CACHE_ENV)
    key = None
    if cache_dir:
        digest = hashlib.sha256(
            (code.to_json() + "|" + kind).encode()).hexdigest()[:24]
        key = os.path.join(cache_dir, f"tree_{digest}.json")
        if os.path.exists(key):
            with open(key) as fh:
                return DecisionTree.from_json(fh.read())
    tree = (build_arbitrary_tree(code) if kind == "arbitrary"
            else build_pauli_tree(code, kind))
    if key:
        os.makedirs(cache_dir, exist_ok=True)
        with open(key, "w") as fh:
            fh.write(tree.to_json())
    return tree
