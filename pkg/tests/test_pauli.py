"""Pauli algebra checked against dense matrices.

Every algebraic claim (products, phases, commutation) is compared with the
literal 2^n x 2^n matrix computation for small n, so the bitmask arithmetic
never has to be trusted on its own.
"""

from __future__ import annotations

import itertools

import numpy as np
import pytest
from hypothesis import given, strategies as st

from graphcode_lt.pauli import (
    BASIS_A,
    BASIS_X,
    BASIS_Y,
    BASIS_Z,
    DimensionError,
    MeasurementPattern,
    PauliOperator,
    PauliSpan,
    commutes_qubitwise,
    iter_bits,
    symplectic_rank,
)

from _oracles import dense


def all_ops(n: int, phases=(0,)):
    for x in range(1 << n):
        for z in range(1 << n):
            for p in phases:
                yield PauliOperator(n, x, z, p)


# -- products and phases ------------------------------------------------


def test_product_matches_dense_exhaustive_two_qubits():
    ops = list(all_ops(2, phases=(0, 1, 2, 3)))
    for a in ops:
        for b in ops:
            got = dense(a * b)
            want = dense(a) @ dense(b)
            assert np.allclose(got, want), (a, b)


def test_product_matches_dense_sampled_three_qubits():
    rng = np.random.default_rng(7)
    for _ in range(300):
        xa, za, xb, zb = (int(v) for v in rng.integers(0, 8, size=4))
        pa, pb = (int(v) for v in rng.integers(0, 4, size=2))
        a = PauliOperator(3, xa, za, pa)
        b = PauliOperator(3, xb, zb, pb)
        assert np.allclose(dense(a * b), dense(a) @ dense(b))


def test_known_products():
    x = PauliOperator.from_string("X")
    z = PauliOperator.from_string("Z")
    y = PauliOperator.from_string("Y")
    assert (x * z).to_string() == "-iY"
    assert (z * x).to_string() == "+iY"
    assert (x * y).to_string() == "+iZ"
    assert x * x == PauliOperator.identity(1)
    assert (y * y) == PauliOperator.identity(1)


def test_path_graph_generator_product():
    # K_0 K_1 on the two-vertex path: (X tensor Z)(Z tensor X) = Y tensor Y
    k0 = PauliOperator.from_string("XZ")
    k1 = PauliOperator.from_string("ZX")
    prod = k0 * k1
    assert prod.to_string() == "+YY"
    assert np.allclose(dense(prod), dense(k0) @ dense(k1))


def test_string_round_trip():
    for text in ["+XIZY", "-YYZ", "+iXZ", "-iIII", "+I"]:
        assert PauliOperator.from_string(text).to_string() == text


def test_single_letter_constructor():
    op = PauliOperator.single(4, 2, "Y")
    assert op.to_string() == "+IIYI"
    assert op.weight == 1
    assert op.support == 4


def test_commutes_matches_dense():
    ops = list(all_ops(2))
    for a in ops:
        for b in ops:
            da, db = dense(a), dense(b)
            want = np.allclose(da @ db, db @ da)
            assert a.commutes(b) == want, (a, b)


def test_dimension_mismatch_raises():
    a = PauliOperator.from_string("XX")
    b = PauliOperator.from_string("X")
    with pytest.raises(DimensionError):
        _ = a * b
    with pytest.raises(DimensionError):
        a.commutes(b)


# -- hypothesis properties ------------------------------------------------

op_strategy = st.builds(
    PauliOperator,
    st.just(4),
    st.integers(0, 15),
    st.integers(0, 15),
    st.integers(0, 3),
)


@given(op_strategy, op_strategy, op_strategy)
def test_product_associative(a, b, c):
    assert (a * b) * c == a * (b * c)


@given(op_strategy)
def test_square_is_real_identity(a):
    sq = a * a
    assert sq.x == 0 and sq.z == 0
    assert sq.phase in (0, 2)


@given(op_strategy, op_strategy)
def test_commutation_symmetric(a, b):
    assert a.commutes(b) == b.commutes(a)


@given(op_strategy, op_strategy)
def test_weight_subadditive(a, b):
    assert (a * b).weight <= a.weight + b.weight


# -- qubit-wise commutation ------------------------------------------------

_STATUSES = ["unmeasured", "lost", BASIS_X, BASIS_Y, BASIS_Z, BASIS_A]


def _qubitwise_reference(op, statuses, completed):
    for q in range(op.n):
        letter = op.letter_at(q)
        if letter == "I":
            continue
        st_q = statuses[q]
        if st_q == "unmeasured":
            if completed:
                return False
            continue
        if st_q == "lost" or st_q == BASIS_A:
            return False
        if st_q.kind != letter:
            return False
    return True


def test_qubitwise_commutation_definition():
    letter_ops = ["".join(t) for t in itertools.product("IXYZ", repeat=3)]
    for statuses in itertools.product(_STATUSES, repeat=3):
        pattern = MeasurementPattern.from_statuses(statuses)
        for text in letter_ops:
            op = PauliOperator.from_letters(text)
            for completed in (True, False):
                want = _qubitwise_reference(op, statuses, completed)
                got = commutes_qubitwise(op, pattern, completed)
                assert got == want, (text, statuses, completed)


def test_pattern_updates_are_functional():
    m = MeasurementPattern(3)
    m2 = m.measure(1, BASIS_X)
    assert m.unmeasured == 0b111
    assert m2.unmeasured == 0b101
    m3 = m2.lose(0)
    assert m3.lost == 0b001
    with pytest.raises(ValueError):
        m3.measure(0, BASIS_Z)
    m4 = m3.lose(2)
    with pytest.raises(ValueError):
        m4.lose(2)


def test_pattern_statuses_round_trip():
    statuses = [BASIS_X, "lost", BASIS_A, "unmeasured", BASIS_Z]
    m = MeasurementPattern.from_statuses(statuses)
    assert [m.status(i) for i in range(5)] == statuses


# -- span and rank ----------------------------------------------------------


def _brute_span(ops):
    n = ops[0].n
    members = {(0, 0)}
    for bits in range(1, 1 << len(ops)):
        acc = PauliOperator.identity(n)
        for i in iter_bits(bits):
            acc = acc * ops[i]
        members.add(acc.key())
    return members


def test_span_membership_matches_brute_force():
    rng = np.random.default_rng(11)
    for _ in range(40):
        n = int(rng.integers(2, 5))
        gens = [
            PauliOperator(n, int(rng.integers(0, 1 << n)), int(rng.integers(0, 1 << n)))
            for _ in range(int(rng.integers(1, 6)))
        ]
        want = _brute_span(gens)
        span = PauliSpan(n, gens)
        assert len(want) == 1 << span.rank
        for x in range(1 << n):
            for z in range(1 << n):
                op = PauliOperator(n, x, z)
                assert span.contains(op) == (op.key() in want)


def test_symplectic_rank_examples():
    ops = [PauliOperator.from_string(s) for s in ["XX", "ZZ", "YY"]]
    assert symplectic_rank(ops) == 2  # XX * ZZ = YY up to phase
    assert symplectic_rank([]) == 0
    assert symplectic_rank([PauliOperator.identity(3)]) == 0


def test_iter_bits():
    assert list(iter_bits(0)) == []
    assert list(iter_bits(0b10110)) == [1, 2, 4]
