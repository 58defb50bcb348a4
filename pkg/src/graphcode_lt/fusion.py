"""Logical fusion of two identically encoded qubits.

A physical fusion is a destructive two-qubit measurement: on success it
returns both the XX and the ZZ parity of the pair, on gate failure a
single parity, and nothing when a photon is lost.  Encoding both fusion
partners in the same graph code makes the logical parities X̄X̄' and
Z̄Z̄' recoverable from incomplete outcome sets.

Two engines analyse this exactly.  The transversal engine fuses every
code qubit with its twin and enumerates all outcome combinations,
classifying each by GF(2) generation of the logical parities.  The
adaptive engine attempts fusions on candidate output qubits one at a
time; after the first success each code runs a teleportation decoder
toward the fused qubit, and when every attempt fails the codes fall back
on single-qubit measurements to salvage one parity.  Both report exact
(success, fail, loss) probabilities.
"""

from __future__ import annotations

import math
from fractions import Fraction
from functools import lru_cache

from .codes import GraphCode
from .losstree import _strategies
from .opsets import EXHAUSTIVE_LIMIT, ResourceLimitError, stabilizer_group
from .pauli import (
    BASIS_FUSION,
    Basis,
    MeasurementPattern,
    PauliOperator,
    PauliSpan,
    iter_bits,
)

__all__ = [
    "FusionModel", "LogicalFusionResult", "boosted_baseline", "best_boosted",
    "transversal_fusion", "adaptive_fusion", "compile_failure_bases",
    "AdaptiveFusionAnalysis",
]

TRANSVERSAL_LIMIT = 12


class FusionModel:
    """Outcome probabilities of one physical fusion gate.

    A gate with failure probability ``p_fail`` = 2^-m consumes 1/p_fail
    photons per side, so the arrival factor is eta^(1/p_fail).  The
    derived outcome probabilities are s (success), f (failure, one
    parity survives) and l (loss, no outcome); they sum to one.
    """

    __slots__ = ("p_fail", "eta", "s", "f", "l")

    def __init__(self, p_fail: float, eta: float):
        if not 0.0 <= p_fail <= 1.0:
            raise ValueError(f"p_fail must lie in [0, 1], got {p_fail}")
        if not 0.0 <= eta <= 1.0:
            raise ValueError(f"eta must lie in [0, 1], got {eta}")
        if p_fail == 0.0:
            arrival = 1.0 if eta == 1.0 else 0.0
        else:
            arrival = eta ** (1.0 / p_fail)
        object.__setattr__(self, "p_fail", p_fail)
        object.__setattr__(self, "eta", eta)
        object.__setattr__(self, "s", arrival * (1.0 - p_fail))
        object.__setattr__(self, "f", arrival * p_fail)
        object.__setattr__(self, "l", 1.0 - arrival)

    def __setattr__(self, name, value):
        raise AttributeError("FusionModel is immutable")

    @classmethod
    def boosted(cls, m: int, eta: float) -> "FusionModel":
        """Boost level m: 2^m - 2 ancillary photons, p_fail = 2^-m."""
        if m < 1:
            raise ValueError(f"boost level must be >= 1, got {m}")
        return cls(2.0 ** -m, eta)

    def __eq__(self, other) -> bool:
        return (isinstance(other, FusionModel)
                and (self.p_fail, self.eta) == (other.p_fail, other.eta))

    def __hash__(self) -> int:
        return hash((self.p_fail, self.eta))

    def __repr__(self) -> str:
        return f"FusionModel(p_fail={self.p_fail}, eta={self.eta})"


class LogicalFusionResult:
    """Exact outcome probabilities of one logical fusion.

    ``erasure_xx`` and ``erasure_zz`` assume the 50/50 failure-basis
    randomization used in fusion networks, under which a logical failure
    erases either parity with equal probability: erasure = p_loss +
    p_fail / 2.
    """

    __slots__ = ("p_success", "p_fail_logical", "p_loss_logical",
                 "erasure_xx", "erasure_zz")

    def __init__(self, p_success: float, p_fail_logical: float,
                 p_loss_logical: float):
        erasure = p_loss_logical + 0.5 * p_fail_logical
        object.__setattr__(self, "p_success", p_success)
        object.__setattr__(self, "p_fail_logical", p_fail_logical)
        object.__setattr__(self, "p_loss_logical", p_loss_logical)
        object.__setattr__(self, "erasure_xx", erasure)
        object.__setattr__(self, "erasure_zz", erasure)

    def __setattr__(self, name, value):
        raise AttributeError("LogicalFusionResult is immutable")

    def __repr__(self) -> str:
        return (f"LogicalFusionResult(success={self.p_success:.6f}, "
                f"fail={self.p_fail_logical:.6f}, "
                f"loss={self.p_loss_logical:.6f})")


def boosted_baseline(m: int, eta: float) -> float:
    """Success probability of a bare boosted fusion: (1 - 2^-m) eta^(2^m)."""
    if m < 1:
        raise ValueError(f"boost level must be >= 1, got {m}")
    return (1.0 - 2.0 ** -m) * eta ** (2 ** m)


def best_boosted(eta: float, max_m: int = 8) -> float:
    """Envelope of the boosted baseline over boost levels 1..max_m."""
    return max(boosted_baseline(m, eta) for m in range(1, max_m + 1))


# -- two-code operator helpers ----------------------------------------------------


def _embed(op: PauliOperator, side: int, n: int) -> PauliOperator:
    shift = side * n
    return PauliOperator(2 * n, op.x << shift, op.z << shift)


def _pair(letter: str, qubit: int, n: int) -> PauliOperator:
    bits = (1 << qubit) | (1 << (n + qubit))
    if letter == "X":
        return PauliOperator(2 * n, bits, 0)
    if letter == "Z":
        return PauliOperator(2 * n, 0, bits)
    raise ValueError(f"fusion parities are XX or ZZ, got letter {letter!r}")


def _base_span(code: GraphCode) -> tuple[PauliSpan, PauliOperator, PauliOperator]:
    """Span of both codes' stabilizers, plus the two logical parities."""
    n = code.n
    gens = []
    for side in (0, 1):
        gens += [_embed(g, side, n) for g in code.stabilizer_generators]
    span = PauliSpan(2 * n, gens)
    xx = _embed(code.logical_x, 0, n) * _embed(code.logical_x, 1, n)
    zz = _embed(code.logical_z, 0, n) * _embed(code.logical_z, 1, n)
    return span, xx, zz


def _classify(xx_in: bool, zz_in: bool) -> str:
    if xx_in and zz_in:
        return "success"
    if xx_in or zz_in:
        return "fail"
    return "loss"


# -- transversal engine ------------------------------------------------------------


@lru_cache(maxsize=256)
def _transversal_counts(code: GraphCode, failure_bases: tuple | None,
                        limit: int) -> dict:
    """Integer multiplicities of outcome assignments by class.

    Keys are (n_success, n_fail_x, n_fail_z, class); the per-assignment
    probability depends only on those counts, so one enumeration serves
    every fusion model.  ``failure_bases=None`` enumerates both failure
    bases per qubit (the per-shot randomized mode).
    """
    n = code.n
    if n > limit:
        raise ResourceLimitError(
            f"transversal enumeration needs 3^{n} assignments; "
            f"limit is n <= {limit}")
    span0, xx, zz = _base_span(code)
    counts: dict = {}

    def rec(i: int, span: PauliSpan, ns: int, nfx: int, nfz: int):
        if i == n:
            key = (ns, nfx, nfz, _classify(span.contains(xx), span.contains(zz)))
            counts[key] = counts.get(key, 0) + 1
            return
        rec(i + 1, span, ns, nfx, nfz)  # loss: nothing obtained
        sp = span.copy()
        sp.add(_pair("X", i, n))
        sp.add(_pair("Z", i, n))
        rec(i + 1, sp, ns + 1, nfx, nfz)
        if failure_bases is None:
            for letter, dx, dz in (("X", 1, 0), ("Z", 0, 1)):
                sp = span.copy()
                sp.add(_pair(letter, i, n))
                rec(i + 1, sp, ns, nfx + dx, nfz + dz)
        else:
            letter = failure_bases[i]
            sp = span.copy()
            sp.add(_pair(letter, i, n))
            rec(i + 1, sp, ns, nfx + (letter == "X"), nfz + (letter == "Z"))

    rec(0, span0, 0, 0, 0)
    return counts


def _transversal_result(code: GraphCode, fm: FusionModel,
                        failure_bases: tuple | None,
                        limit: int) -> LogicalFusionResult:
    counts = _transversal_counts(code, failure_bases, limit)
    n = code.n
    split = failure_bases is None
    sums = {"success": [], "fail": [], "loss": []}
    for (ns, nfx, nfz, klass), mult in counts.items():
        nf = nfx + nfz
        p = fm.s ** ns * fm.f ** nf * fm.l ** (n - ns - nf)
        if split:
            p *= 0.5 ** nf
        sums[klass].append(mult * p)
    return LogicalFusionResult(math.fsum(sums["success"]),
                               math.fsum(sums["fail"]),
                               math.fsum(sums["loss"]))


@lru_cache(maxsize=256)
def compile_failure_bases(code: GraphCode, fm: FusionModel,
                          limit: int = TRANSVERSAL_LIMIT) -> tuple[str, ...]:
    """Per-qubit failure basis maximizing transversal fusion success.

    Coordinate ascent over {X, Z} per qubit, each candidate evaluated by
    full enumeration at the given fusion model; ties keep Z.
    """
    bases = ["Z"] * code.n
    for _ in range(code.n + 1):
        changed = False
        for i in range(code.n):
            best = _transversal_result(code, fm, tuple(bases), limit).p_success
            flipped = bases.copy()
            flipped[i] = "X" if bases[i] == "Z" else "Z"
            trial = _transversal_result(code, fm, tuple(flipped), limit).p_success
            if trial > best + 1e-15:
                bases = flipped
                changed = True
        if not changed:
            break
    return tuple(bases)


def transversal_fusion(code: GraphCode, fm: FusionModel, *,
                       failure_bases: tuple | None = None,
                       randomize_failures: bool = False,
                       limit: int = TRANSVERSAL_LIMIT) -> LogicalFusionResult:
    """Logical fusion via physical fusions on every code qubit pair.

    With ``randomize_failures`` each failed gate keeps XX or ZZ with
    probability 1/2 per shot; otherwise the failure basis is the given
    per-qubit choice, compiled by maximum likelihood when omitted.
    """
    if randomize_failures:
        return _transversal_result(code, fm, None, limit)
    if failure_bases is None:
        failure_bases = compile_failure_bases(code, fm, limit)
    if len(failure_bases) != code.n:
        raise ValueError("need one failure basis per code qubit")
    return _transversal_result(code, fm, tuple(failure_bases), limit)


# -- adaptive engine ---------------------------------------------------------------


def _allowed_masks(pattern: MeasurementPattern, interfaces: tuple,
                   prospective: bool) -> tuple[int, int, int]:
    """Per-letter masks of qubits where that letter is recoverable.

    Measured qubits admit their own letter; unmeasured ones are wildcards
    in prospective mode.  A fused interface admits any letter after a
    successful gate and only the surviving parity's letter after a failed
    one (the partner code must match there, which the caller checks by
    intersecting letter vectors).
    """
    free = pattern.unmeasured if prospective else 0
    ax = pattern.mx | free
    ay = pattern.my | free
    az = pattern.mz | free
    for q, kind in interfaces:
        bit = 1 << q
        if kind == "s":
            ax |= bit
            ay |= bit
            az |= bit
        elif kind == "fx":
            ax |= bit
        else:
            az |= bit
    return ax, ay, az


def _compat(op: PauliOperator, masks: tuple[int, int, int]) -> bool:
    ax, ay, az = masks
    xs = op.x & ~op.z
    ys = op.x & op.z
    zs = op.z & ~op.x
    return xs & ~ax == 0 and ys & ~ay == 0 and zs & ~az == 0


class AdaptiveFusionAnalysis:
    """Compiled adaptive logical-fusion process for one code.

    Fusions are attempted on candidate output qubits while teleportation
    strategies survive; the first success pins the output and each side
    independently completes a strategy toward it.  Exhausted attempts
    fall back to single-operator salvage.  Terminal states carry exact
    probability monomials in (s, f, l, eta), so one compilation serves
    every fusion model.
    """

    __slots__ = ("code", "randomize", "_strategies", "_xops", "_zops",
                 "_terms", "_side_memo")

    def __init__(self, code: GraphCode, randomize_failures: bool = False,
                 limit: int = EXHAUSTIVE_LIMIT):
        self.code = code
        self.randomize = randomize_failures
        self._strategies = _strategies(code, limit)
        group = stabilizer_group(code)
        self._xops = tuple(code.logical_x * s for s in group)
        self._zops = tuple(code.logical_z * s for s in group)
        self._terms = {"success": {}, "fail": {}, "loss": {}}
        self._side_memo: dict = {}
        self._walk(MeasurementPattern(code.n), (), 0, 0, 0, Fraction(1))

    # -- per-side decoding ---------------------------------------------------

    def _vectors(self, coset, masks, interfaces) -> frozenset:
        found = set()
        for op in coset:
            if _compat(op, masks):
                found.add(tuple(op.letter_at(q) for q, _ in interfaces))
        return frozenset(found)

    def _side(self, pattern: MeasurementPattern, interfaces: tuple,
              output: int | None) -> dict:
        """Leaf groups of one code's decoder: {(lambda_x, lambda_z):
        {(detected, lost): count}} over single-qubit attempt outcomes."""
        key = (pattern, interfaces, output)
        if key in self._side_memo:
            return self._side_memo[key]
        if output is None:
            pairs = ()
        else:
            # members may route through failed interfaces: the partner code
            # shares the surviving parity there, and the final letter-vector
            # intersection decides whether the routes actually match
            masks0 = _allowed_masks(pattern, interfaces, True)
            pairs = tuple(
                st for st in self._strategies
                if st.output == output
                and _compat(st.first_masked, masks0)
                and _compat(st.second_masked, masks0))
        groups: dict = {}

        def record(pat: MeasurementPattern, d: int, e: int):
            masks = _allowed_masks(pat, interfaces, False)
            sig = (self._vectors(self._xops, masks, interfaces),
                   self._vectors(self._zops, masks, interfaces))
            poly = groups.setdefault(sig, {})
            poly[(d, e)] = poly.get((d, e), 0) + 1

        def attempt(ops, pat: MeasurementPattern) -> tuple[int, Basis]:
            op = min(ops, key=lambda o: (o.weight, o.x, o.z))
            q = next(iter_bits(op.support & pat.unmeasured))
            return q, Basis(op.letter_at(q))

        def rec(pat: MeasurementPattern, d: int, e: int):
            masks_p = _allowed_masks(pat, interfaces, True)
            masks_c = _allowed_masks(pat, interfaces, False)
            alive = [st for st in pairs
                     if _compat(st.first_masked, masks_p)
                     and _compat(st.second_masked, masks_p)]
            for st in alive:
                if (_compat(st.first_masked, masks_c)
                        and _compat(st.second_masked, masks_c)):
                    record(pat, d, e)
                    return
            if alive:
                members = [op for st in alive for op in
                           (st.first_masked, st.second_masked)
                           if op.support & pat.unmeasured]
                q, b = attempt(members, pat)
                rec(pat.measure(q, b), d + 1, e)
                rec(pat.lose(q), d, e + 1)
                return
            targets = [op for op in self._xops + self._zops
                       if _compat(op, masks_p)]
            if any(_compat(op, masks_c) for op in targets):
                record(pat, d, e)
                return
            live = [op for op in targets if op.support & pat.unmeasured]
            if not live:
                record(pat, d, e)
                return
            q, b = attempt(live, pat)
            rec(pat.measure(q, b), d + 1, e)
            rec(pat.lose(q), d, e + 1)

        rec(pattern, 0, 0)
        self._side_memo[key] = groups
        return groups

    # -- joint process --------------------------------------------------------

    def _fold(self, side: dict, fusions: tuple[int, int, int], mult: Fraction):
        """Two independent copies of one side, classified by intersecting
        interface letter vectors: a parity is recovered when both sides
        realize a common vector."""
        a, b, c = fusions
        for (lx1, lz1), poly1 in side.items():
            for (lx2, lz2), poly2 in side.items():
                klass = _classify(bool(lx1 & lx2), bool(lz1 & lz2))
                terms = self._terms[klass]
                for (d1, e1), c1 in poly1.items():
                    for (d2, e2), c2 in poly2.items():
                        key = (a, b, c, d1 + d2, e1 + e2)
                        terms[key] = terms.get(key, 0) + mult * c1 * c2

    def _walk(self, pattern: MeasurementPattern, interfaces: tuple,
              a: int, b: int, c: int, mult: Fraction):
        masks_p = _allowed_masks(pattern, interfaces, True)
        counts: dict[int, int] = {}
        for st in self._strategies:
            if ((pattern.unmeasured >> st.output) & 1
                    and _compat(st.first_masked, masks_p)
                    and _compat(st.second_masked, masks_p)):
                counts[st.output] = counts.get(st.output, 0) + 1
        if not counts:
            self._fold(self._side(pattern, interfaces, None), (a, b, c), mult)
            return
        best = max(counts.values())
        q = min(o for o, k in counts.items() if k == best)
        fused = pattern.measure(q, BASIS_FUSION)
        side = self._side(fused, interfaces + ((q, "s"),), q)
        self._fold(side, (a + 1, b, c), mult)
        if self.randomize:
            self._walk(fused, interfaces + ((q, "fx"),), a, b + 1, c, mult / 2)
            self._walk(fused, interfaces + ((q, "fz"),), a, b + 1, c, mult / 2)
        else:
            self._walk(fused, interfaces + ((q, "fz"),), a, b + 1, c, mult)
        self._walk(pattern.lose(q), interfaces, a, b, c + 1, mult)

    def result(self, fm: FusionModel) -> LogicalFusionResult:
        values = {}
        eta = fm.eta
        for klass, terms in self._terms.items():
            parts = [float(mult) * fm.s ** a * fm.f ** b * fm.l ** c
                     * eta ** d * (1.0 - eta) ** e
                     for (a, b, c, d, e), mult in terms.items()]
            values[klass] = math.fsum(parts)
        return LogicalFusionResult(values["success"], values["fail"],
                                   values["loss"])


@lru_cache(maxsize=64)
def _adaptive_analysis(code: GraphCode, randomize: bool,
                       limit: int) -> AdaptiveFusionAnalysis:
    return AdaptiveFusionAnalysis(code, randomize, limit)


def adaptive_fusion(code: GraphCode, fm: FusionModel, *,
                    randomize_failures: bool = False,
                    limit: int = EXHAUSTIVE_LIMIT) -> LogicalFusionResult:
    """Logical fusion via sequential output-qubit fusions plus per-code
    single-qubit decoding."""
    return _adaptive_analysis(code, randomize_failures, limit).result(fm)
