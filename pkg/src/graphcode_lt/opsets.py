"""Stabilizer and logical operator sets, and the filters that drive decoding.

For a code on n qubits the stabilizer group has 2^(n-1) elements and each
logical class is a coset of it.  Decoding works with the non-trivial coset
members: those that cannot be written as a smaller-weight operator times a
stabilizer of disjoint support.  Filtering against a measurement pattern
keeps the operators whose letters are all individually recoverable.
"""

from __future__ import annotations

import json
from functools import lru_cache

from .codes import GraphCode
from .pauli import (
    MeasurementPattern,
    PauliOperator,
    commutes_qubitwise,
    iter_bits,
)

KINDS = ("Stabilizers", "LogicalX", "LogicalY", "LogicalZ", "AllLogical")

EXHAUSTIVE_LIMIT = 14


class ResourceLimitError(RuntimeError):
    """Raised when an exact enumeration would exceed its configured limit."""


class OperatorSet:
    """An immutable, deterministically ordered set of Pauli operators.

    Operators are sorted by (weight, x bits, z bits) so downstream
    heuristics that take "the first" member are reproducible.
    """

    __slots__ = ("kind", "operators", "code")

    def __init__(self, kind: str, operators, code: GraphCode):
        if kind not in KINDS:
            raise ValueError(f"unknown kind: {kind}")
        ops = tuple(sorted(set(operators), key=lambda o: (o.weight, o.x, o.z)))
        object.__setattr__(self, "kind", kind)
        object.__setattr__(self, "operators", ops)
        object.__setattr__(self, "code", code)

    def __setattr__(self, name, value):
        raise AttributeError("OperatorSet is immutable")

    def __iter__(self):
        return iter(self.operators)

    def __len__(self) -> int:
        return len(self.operators)

    def __contains__(self, op) -> bool:
        return op in self.operators

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, OperatorSet)
            and self.kind == other.kind
            and self.operators == other.operators
        )

    def __hash__(self) -> int:
        return hash((self.kind, self.operators))

    def __repr__(self) -> str:
        return f"OperatorSet({self.kind}, {len(self.operators)} ops)"

    def to_json(self) -> str:
        return json.dumps({
            "kind": self.kind,
            "operators": [op.to_string() for op in self.operators],
        })


@lru_cache(maxsize=256)
def stabilizer_group(code: GraphCode) -> tuple[PauliOperator, ...]:
    """All 2^(n-1) stabilizer elements, exact phases included."""
    members = [PauliOperator.identity(code.n)]
    for gen in code.stabilizer_generators:
        members += [s * gen for s in members]
    return tuple(members)


def is_nontrivial(op: PauliOperator, stabilizers) -> bool:
    """True unless some non-identity stabilizer matches ``op`` letter for
    letter on the stabilizer's whole support (then the stabilizer part can
    be split off, leaving a smaller-weight operator of disjoint support)."""
    ox = op.x & ~op.z
    oy = op.x & op.z
    oz = op.z & ~op.x
    for s in stabilizers:
        if s.x == 0 and s.z == 0:
            continue
        sx = s.x & ~s.z
        sy = s.x & s.z
        sz = s.z & ~s.x
        if sx & ~ox == 0 and sy & ~oy == 0 and sz & ~oz == 0:
            return False
    return True


def _logical_class(code: GraphCode, which: str) -> list[PauliOperator]:
    rep = code.logical(which)
    return [rep * s for s in stabilizer_group(code)]


@lru_cache(maxsize=1024)
def enumerate_nontrivial(code: GraphCode, kind: str,
                         limit: int = EXHAUSTIVE_LIMIT) -> OperatorSet:
    """Exhaustive operator set of the given kind.

    Stabilizers come back whole (the group); logical kinds are reduced to
    their non-trivial members.  AllLogical is the union over X, Y, Z.
    """
    if kind not in KINDS:
        raise ValueError(f"unknown kind: {kind}")
    if code.n > limit:
        raise ResourceLimitError(
            f"exhaustive enumeration needs 2^{code.n - 1} products; "
            f"limit is n <= {limit}")
    if kind == "Stabilizers":
        return OperatorSet(kind, stabilizer_group(code), code)
    if kind == "AllLogical":
        ops = []
        for sub in ("LogicalX", "LogicalY", "LogicalZ"):
            ops.extend(enumerate_nontrivial(code, sub, limit).operators)
        return OperatorSet(kind, ops, code)
    which = kind[-1]
    group = stabilizer_group(code)
    ops = [op for op in _logical_class(code, which) if is_nontrivial(op, group)]
    return OperatorSet(kind, ops, code)


def filter_compatible(opset: OperatorSet, m: MeasurementPattern,
                      completed: bool = True) -> OperatorSet:
    """Members measurable letter by letter under the pattern.

    ``completed=False`` treats unmeasured qubits as wildcards (prospective
    mode, for strategies still being assembled).
    """
    kept = [op for op in opset if commutes_qubitwise(op, m, completed)]
    return OperatorSet(opset.kind, kept, opset.code)


def spc_satisfied(opset: OperatorSet, m: MeasurementPattern
                  ) -> tuple[PauliOperator, PauliOperator] | None:
    """First anticommuting pair surviving the pattern in prospective mode.

    This is the pathfinding condition for teleporting the logical qubit
    onto a detected output: two compatible logical operators that
    anticommute.  Returns None when no such pair exists.
    """
    survivors = filter_compatible(opset, m, completed=False).operators
    for i, a in enumerate(survivors):
        for b in survivors[i + 1:]:
            if not a.commutes(b):
                return (a, b)
    return None
