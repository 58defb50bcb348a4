"""Maximum-likelihood error decoding layered on the loss decoder.

Once the loss decoder secures its target, the unspent qubits are used for
stabilizer checks (chosen greedily, re-chosen whenever a check qubit is
lost).  Each decoded leaf gets an exact syndrome table over all
outcome-flip strings; summing leaves, with decoder failure counted as a
fault, gives the combined fault probability.  Iterating the per-basis
logical flip map yields concatenation error thresholds.
"""

from __future__ import annotations

import weakref

import numpy as np

from .codes import GraphCode
from .losstree import DecisionTree, Leaf, build_pauli_tree
from .opsets import ResourceLimitError, stabilizer_group
from .pauli import (
    Basis,
    MeasurementPattern,
    PauliOperator,
    PauliSpan,
    commutes_qubitwise,
    iter_bits,
)
from .polynomials import LossPolynomial

ML_ENUMERATION_LIMIT = 20


class ErrorModel:
    """Per-qubit i.i.d. depolarizing noise, expressed as outcome-flip rates.

    A rate-lambda depolarizing channel flips a Pauli measurement outcome
    with probability 2*lambda (two of the three errors anticommute with
    the measured basis) and an arbitrary-basis outcome with probability
    3*lambda.  Concatenation feeds logical flip rates back in, so the
    per-basis rates can also be set directly.
    """

    __slots__ = ("lam", "rates")

    def __init__(self, lam: float):
        if not 0.0 <= 3.0 * lam <= 1.0:
            raise ValueError("lambda must satisfy 0 <= 3*lambda <= 1")
        object.__setattr__(self, "lam", lam)
        object.__setattr__(self, "rates",
                           {"X": 2 * lam, "Y": 2 * lam, "Z": 2 * lam, "A": 3 * lam})

    def __setattr__(self, name, value):
        raise AttributeError("ErrorModel is immutable")

    @classmethod
    def from_rates(cls, rx: float, ry: float, rz: float,
                   ra: float | None = None) -> "ErrorModel":
        em = cls.__new__(cls)
        object.__setattr__(em, "lam", None)
        if ra is None:
            ra = min(1.0, 0.5 * (rx + ry + rz))
        object.__setattr__(em, "rates", {"X": rx, "Y": ry, "Z": rz, "A": ra})
        return em

    def rate(self, kind: str) -> float:
        return self.rates[kind]

    def _key(self) -> tuple:
        return (self.rates["X"], self.rates["Y"], self.rates["Z"], self.rates["A"])

    def __repr__(self) -> str:
        return f"ErrorModel(rates={self.rates})"


class CheckSet:
    """Target operator(s) plus the stabilizer checks measured alongside."""

    __slots__ = ("targets", "checks")

    def __init__(self, targets: tuple, checks: tuple):
        self.targets = tuple(targets)
        self.checks = tuple(checks)

    def __repr__(self) -> str:
        return f"CheckSet({len(self.targets)} targets, {len(self.checks)} checks)"


def qubitwise_commuting(a: PauliOperator, b: PauliOperator) -> bool:
    """Letters agree wherever both operators act (jointly measurable)."""
    both = (a.x | a.z) & (b.x | b.z)
    return both & ((a.x ^ b.x) | (a.z ^ b.z)) == 0


def _masked_targets(leaf: Leaf) -> tuple[PauliOperator, ...]:
    """Leaf targets with the arbitrary-basis output qubit stripped off."""
    if leaf.output is None:
        return leaf.targets
    keep = ~(1 << leaf.output)
    return tuple(PauliOperator(t.n, t.x & keep, t.z & keep) for t in leaf.targets)


def _greedy_checks(pattern: MeasurementPattern, targets, group) -> tuple:
    """Independent qubit-wise-commuting checks, greedily ranked by overlap
    with the target supports; deterministic.

    Checks whose parity is a product of already chosen ones are skipped:
    their outcome bit is the XOR of the others' and adds no syndrome
    information.
    """
    target_support = 0
    for t in targets:
        target_support |= t.support
    cands = [s for s in group
             if s.weight and commutes_qubitwise(s, pattern, completed=False)]
    cands.sort(key=lambda s: (-(s.support & target_support).bit_count(),
                              s.weight, s.x, s.z))
    chosen: list[PauliOperator] = []
    span = PauliSpan(pattern.n)
    for cand in cands:
        if not all(qubitwise_commuting(cand, c) for c in chosen):
            continue
        if not span.add(cand):
            continue
        chosen.append(cand)
    return tuple(chosen)


def choose_checks(leaf: Leaf, surviving_stabilizers) -> CheckSet:
    """Check set for a success leaf, from the surviving stabilizer group."""
    if not leaf.success:
        raise ValueError("checks apply to success leaves only")
    targets = _masked_targets(leaf)
    return CheckSet(targets, _greedy_checks(leaf.pattern, targets,
                                            tuple(surviving_stabilizers)))


def exhaustive_checks(leaf: Leaf, surviving_stabilizers, em: "ErrorModel",
                      cap: int = 200_000) -> tuple[CheckSet, float]:
    """Best check set by brute force over commuting subsets (gap audit).

    Walks every independent qubit-wise-commuting subset of the surviving
    stabilizers and keeps the one minimizing the leaf's logical error.
    Exponential; guarded by ``cap`` on visited subsets.
    """
    targets = _masked_targets(leaf)
    group = [s for s in surviving_stabilizers
             if s.weight and commutes_qubitwise(s, leaf.pattern, completed=False)]
    group.sort(key=lambda s: (s.weight, s.x, s.z))
    best_err = ml_logical_error(leaf, CheckSet(targets, ()), em)
    best = CheckSet(targets, ())
    visited = 0

    def rec(start: int, chosen: list, span: PauliSpan):
        nonlocal best, best_err, visited
        for i in range(start, len(group)):
            cand = group[i]
            if not all(qubitwise_commuting(cand, c) for c in chosen):
                continue
            if span.contains(cand):
                continue
            visited += 1
            if visited > cap:
                raise ResourceLimitError("exhaustive check search exceeded cap")
            sub = span.copy()
            sub.add(cand)
            chosen.append(cand)
            err = ml_logical_error(leaf, CheckSet(targets, tuple(chosen)), em)
            if err < best_err - 1e-15:
                best_err = err
                best = CheckSet(targets, tuple(chosen))
            rec(i + 1, chosen, sub)
            chosen.pop()

    rec(0, [], PauliSpan(leaf.pattern.n))
    return best, best_err


def _parity(values: np.ndarray) -> np.ndarray:
    v = values.copy()
    v ^= v >> 16
    v ^= v >> 8
    v ^= v >> 4
    v ^= v >> 2
    v ^= v >> 1
    return v & 1


def ml_logical_error(leaf: Leaf, checks: CheckSet, em: ErrorModel) -> float:
    """Exact residual logical error after syndrome-table decoding.

    Enumerates every outcome-flip string on the qubits in the target and
    check supports (each qubit's flip rate set by the basis its letter
    dictates), groups strings by check syndrome, and grants the decoder
    the most likely target parity per syndrome.  For arbitrary-basis
    leaves the two teleported signs are decoded jointly and the
    unprotected output-qubit flip is folded in afterwards.
    """
    targets = checks.targets
    ops = tuple(targets) + tuple(checks.checks)
    relevant = 0
    for op in ops:
        relevant |= op.support
    qubits = list(iter_bits(relevant))
    if len(qubits) > ML_ENUMERATION_LIMIT:
        raise ResourceLimitError(
            f"{len(qubits)} qubits exceed the {ML_ENUMERATION_LIMIT}-qubit "
            "flip-string enumeration limit")
    pos = {q: i for i, q in enumerate(qubits)}

    probs = np.ones(1)
    for q in qubits:
        letter = next(op.letter_at(q) for op in ops if op.letter_at(q) != "I")
        r = em.rate(letter)
        probs = np.concatenate([probs * (1.0 - r), probs * r])

    size = 1 << len(qubits)
    flips = np.arange(size, dtype=np.uint32)

    def local_mask(op: PauliOperator) -> np.uint32:
        m = 0
        for q in iter_bits(op.support):
            m |= 1 << pos[q]
        return np.uint32(m)

    index = np.zeros(size, dtype=np.uint32)
    for op in checks.checks:
        index = (index << np.uint32(1)) | _parity(flips & local_mask(op))
    t_index = np.zeros(size, dtype=np.uint32)
    for op in targets:
        t_index = (t_index << np.uint32(1)) | _parity(flips & local_mask(op))

    n_t = 1 << len(targets)
    table = np.bincount(index * np.uint32(n_t) + t_index, weights=probs,
                        minlength=(1 << len(checks.checks)) * n_t)
    table = table.reshape(-1, n_t)
    err = float(1.0 - table.max(axis=1).sum())
    if leaf.output is not None:
        err = 1.0 - (1.0 - em.rate("A")) * (1.0 - err)
    return min(1.0, max(0.0, err))


# -- fault probability over a whole tree -----------------------------------------


class _ExtendedLeaf:
    __slots__ = ("monomial", "leaf", "checks", "_cache")

    def __init__(self, monomial: LossPolynomial, leaf: Leaf | None,
                 checks: CheckSet | None):
        self.monomial = monomial
        self.leaf = leaf
        self.checks = checks
        self._cache: dict = {}

    def error(self, em: ErrorModel) -> float:
        if self.leaf is None:
            return 1.0  # failure to measure the logical counts as a fault
        key = em._key()
        if key not in self._cache:
            self._cache[key] = ml_logical_error(self.leaf, self.checks, em)
        return self._cache[key]


class ErrorAnalysis:
    """A loss tree extended with adaptive check measurements.

    Past each success leaf the greedy check set is attempted qubit by
    qubit; a lost check qubit triggers a fresh greedy choice on the
    updated pattern.  Extension happens once; evaluation at any
    (eta, error model) is a sum over extended leaves.
    """

    __slots__ = ("code", "tree", "entries")

    def __init__(self, code: GraphCode, tree: DecisionTree):
        self.code = code
        self.tree = tree
        group = tuple(stabilizer_group(code))
        entries: list[_ExtendedLeaf] = []

        def extend(pattern: MeasurementPattern, monomial: LossPolynomial,
                   leaf: Leaf):
            targets = _masked_targets(leaf)
            chosen = _greedy_checks(pattern, targets, group)
            pending = 0
            for c in chosen:
                pending |= c.support & pattern.unmeasured
            if not pending:
                done = Leaf("success", pattern, leaf.targets, leaf.output)
                entries.append(_ExtendedLeaf(monomial, done,
                                             CheckSet(targets, chosen)))
                return
            q = next(iter_bits(pending))
            letter = next(c.letter_at(q) for c in chosen if c.letter_at(q) != "I")
            extend(pattern.measure(q, Basis(letter)),
                   monomial.attempt(letter, lost=False), leaf)
            extend(pattern.lose(q), monomial.attempt(letter, lost=True), leaf)

        def walk(node, monomial: LossPolynomial):
            if isinstance(node, Leaf):
                if node.success:
                    extend(node.pattern, monomial, node)
                else:
                    entries.append(_ExtendedLeaf(monomial, None, None))
                return
            kind = node.basis.kind
            walk(node.on_detect, monomial.attempt(kind, lost=False))
            walk(node.on_loss, monomial.attempt(kind, lost=True))

        walk(tree.root, LossPolynomial.one())
        self.entries = entries

    def fault_probability(self, eta: float, em: ErrorModel) -> float:
        total = 0.0
        for entry in self.entries:
            p = entry.monomial.evaluate(eta)
            if p:
                total += p * entry.error(em)
        return total


_ANALYSES: "weakref.WeakKeyDictionary[DecisionTree, ErrorAnalysis]" = (
    weakref.WeakKeyDictionary())


def fault_probability(code: GraphCode, tree: DecisionTree, eta: float,
                      em: ErrorModel) -> float:
    """P(logical fault): decoder failure, or a wrongly decoded outcome."""
    analysis = _ANALYSES.get(tree)
    if analysis is None:
        analysis = ErrorAnalysis(code, tree)
        _ANALYSES[tree] = analysis
    return analysis.fault_probability(eta, em)


def physical_fault(eta: float, em: ErrorModel, kind: str = "X") -> float:
    """Bare-qubit reference: lost, or its single measurement flipped."""
    return 1.0 - eta * (1.0 - em.rate(kind))


# -- concatenation error threshold ------------------------------------------------


def logical_flip_rates(code: GraphCode,
                       rates: tuple[float, float, float]
                       ) -> tuple[float, float, float]:
    """Per-basis logical flip rates at unit transmission.

    Physical qubits measured in X/Y/Z flip with the given per-basis rates;
    the result is the flip rate of each decoded logical Pauli basis, the
    quantity a concatenation layer feeds into the one above it.
    """
    em = ErrorModel.from_rates(*rates)
    out = []
    for basis in "XYZ":
        tree = build_pauli_tree(code, basis)
        out.append(fault_probability(code, tree, 1.0, em))
    return tuple(out)


def error_threshold(code: GraphCode, iters: int = 24, tol: float = 1e-4,
                    hi: float = 1.0 / 3.0) -> float:
    """Largest depolarizing rate whose per-basis flip map iterates to zero.

    Bisection on lambda; each probe starts from the physical flip vector
    (2*lambda,)*3 and applies ``logical_flip_rates`` ``iters`` times.
    """

    def converges(lam: float) -> bool:
        r = (2 * lam,) * 3
        for _ in range(iters):
            r = logical_flip_rates(code, r)
            m = max(r)
            if m < 1e-9:
                return True
            if m > 0.499999:
                return False
        return max(r) < 2 * lam

    lo, high = 0.0, hi
    if converges(high):
        return high
    while high - lo > tol:
        mid = 0.5 * (lo + high)
        if converges(mid):
            lo = mid
        else:
            high = mid
    return lo
