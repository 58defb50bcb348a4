"""Exact symplectic Pauli algebra over n qubits.

Operators are stored as ``i^phase * X^x Z^z`` with ``x``/``z`` packed into
Python ints (one bit per qubit), so commutation and multiplication are a
handful of bitwise ops regardless of n.  Phases are tracked exactly mod 4.
"""

from __future__ import annotations

# single-qubit letters in (x, z) form
_LETTER_BITS = {"I": (0, 0), "X": (1, 0), "Y": (1, 1), "Z": (0, 1)}
_BITS_LETTER = {v: k for k, v in _LETTER_BITS.items()}

_PHASE_STR = {0: "+", 1: "+i", 2: "-", 3: "-i"}
_STR_PHASE = {v: k for k, v in _PHASE_STR.items()}


class DimensionError(ValueError):
    """Raised when operators or patterns of different lengths are combined."""


class PauliOperator:
    """An n-qubit Pauli operator i^phase * X^x Z^z.

    Immutable.  ``x`` and ``z`` are bit masks; bit i of ``x`` (``z``) is the
    X (Z) component on qubit i.  A qubit with both bits set carries the
    letter Y, which in this normal form contributes i^1 (Y = i X Z).
    """

    __slots__ = ("n", "x", "z", "phase")

    def __init__(self, n: int, x: int = 0, z: int = 0, phase: int = 0):
        mask = (1 << n) - 1
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "x", x & mask)
        object.__setattr__(self, "z", z & mask)
        object.__setattr__(self, "phase", phase & 3)

    def __setattr__(self, name, value):
        raise AttributeError("PauliOperator is immutable")

    # -- constructors ---------------------------------------------------

    @classmethod
    def identity(cls, n: int) -> "PauliOperator":
        return cls(n)

    @classmethod
    def single(cls, n: int, qubit: int, letter: str) -> "PauliOperator":
        """The operator with ``letter`` on ``qubit`` and identity elsewhere."""
        xb, zb = _LETTER_BITS[letter]
        phase = 1 if letter == "Y" else 0
        return cls(n, xb << qubit, zb << qubit, phase)

    @classmethod
    def from_letters(cls, letters: str, sign: str = "+") -> "PauliOperator":
        """Build from a letter string such as ``"XIZY"`` (qubit 0 first)."""
        x = z = phase = 0
        for i, ch in enumerate(letters):
            xb, zb = _LETTER_BITS[ch]
            x |= xb << i
            z |= zb << i
            if ch == "Y":
                phase += 1
        return cls(len(letters), x, z, phase + _STR_PHASE[sign])

    @classmethod
    def from_string(cls, text: str) -> "PauliOperator":
        """Parse the text form ``[+|-][i]<letters>``, e.g. ``"-iXYZ"``."""
        sign = "+"
        body = text
        for cand in ("+i", "-i", "+", "-"):
            if text.startswith(cand):
                sign, body = cand, text[len(cand):]
                break
        return cls.from_letters(body, sign)

    # -- algebra --------------------------------------------------------

    def __mul__(self, other: "PauliOperator") -> "PauliOperator":
        if self.n != other.n:
            raise DimensionError(f"operator lengths differ: {self.n} vs {other.n}")
        # X^x1 Z^z1 X^x2 Z^z2 = (-1)^{|z1 & x2|} X^(x1^x2) Z^(z1^z2)
        sign = 2 * ((self.z & other.x).bit_count() & 1)
        return PauliOperator(
            self.n,
            self.x ^ other.x,
            self.z ^ other.z,
            self.phase + other.phase + sign,
        )

    def commutes(self, other: "PauliOperator") -> bool:
        if self.n != other.n:
            raise DimensionError(f"operator lengths differ: {self.n} vs {other.n}")
        return ((self.x & other.z).bit_count() + (self.z & other.x).bit_count()) % 2 == 0

    # -- inspection ------------------------------------------------------

    @property
    def support(self) -> int:
        return self.x | self.z

    @property
    def weight(self) -> int:
        return (self.x | self.z).bit_count()

    def letter_at(self, qubit: int) -> str:
        return _BITS_LETTER[((self.x >> qubit) & 1, (self.z >> qubit) & 1)]

    def letters(self) -> str:
        return "".join(self.letter_at(i) for i in range(self.n))

    @property
    def sign(self) -> str:
        """Displayed phase once Y letters absorb their i factors."""
        n_y = (self.x & self.z).bit_count()
        return _PHASE_STR[(self.phase - n_y) & 3]

    def to_string(self) -> str:
        return self.sign + self.letters()

    def key(self) -> tuple[int, int]:
        """Phaseless (x, z) pair; the GF(2) symplectic content."""
        return (self.x, self.z)

    # -- dunder ----------------------------------------------------------

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, PauliOperator)
            and self.n == other.n
            and self.x == other.x
            and self.z == other.z
            and self.phase == other.phase
        )

    def __hash__(self) -> int:
        return hash((self.n, self.x, self.z, self.phase))

    def __repr__(self) -> str:
        return f"PauliOperator({self.to_string()!r})"


class Basis:
    """A single-qubit measurement basis.

    ``kind`` is one of ``"X" | "Y" | "Z" | "A" | "fusion"``.  Arbitrary
    bases A(theta) = X cos(theta) + Y sin(theta) keep their angle for
    bookkeeping; the angle never enters loss analysis.
    """

    __slots__ = ("kind", "angle")

    def __init__(self, kind: str, angle: float | None = None):
        if kind not in ("X", "Y", "Z", "A", "fusion"):
            raise ValueError(f"unknown basis kind: {kind}")
        object.__setattr__(self, "kind", kind)
        object.__setattr__(self, "angle", angle)

    def __setattr__(self, name, value):
        raise AttributeError("Basis is immutable")

    @property
    def is_pauli(self) -> bool:
        return self.kind in ("X", "Y", "Z")

    def __eq__(self, other) -> bool:
        return isinstance(other, Basis) and self.kind == other.kind and self.angle == other.angle

    def __hash__(self) -> int:
        return hash((self.kind, self.angle))

    def __repr__(self) -> str:
        if self.kind == "A" and self.angle is not None:
            return f"Basis('A', {self.angle})"
        return f"Basis({self.kind!r})"


BASIS_X = Basis("X")
BASIS_Y = Basis("Y")
BASIS_Z = Basis("Z")
BASIS_A = Basis("A")
BASIS_FUSION = Basis("fusion")


class MeasurementPattern:
    """Per-qubit status: unmeasured, measured in some basis, or lost.

    Losses follow the convention that a Pauli letter commutes qubit-wise
    with a lost qubit only if it is the identity there.  Qubits measured
    in an arbitrary or fusion basis likewise admit no Pauli letter.
    """

    __slots__ = ("n", "mx", "my", "mz", "mother", "lost")

    def __init__(self, n: int, mx: int = 0, my: int = 0, mz: int = 0,
                 mother: int = 0, lost: int = 0):
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "mx", mx)
        object.__setattr__(self, "my", my)
        object.__setattr__(self, "mz", mz)
        object.__setattr__(self, "mother", mother)
        object.__setattr__(self, "lost", lost)

    def __setattr__(self, name, value):
        raise AttributeError("MeasurementPattern is immutable")

    @classmethod
    def from_statuses(cls, statuses) -> "MeasurementPattern":
        """Build from a sequence of 'unmeasured' | 'lost' | Basis | letter."""
        mx = my = mz = mother = lost = 0
        for i, st in enumerate(statuses):
            if st == "unmeasured":
                continue
            if st == "lost":
                lost |= 1 << i
                continue
            kind = st.kind if isinstance(st, Basis) else st
            if kind == "X":
                mx |= 1 << i
            elif kind == "Y":
                my |= 1 << i
            elif kind == "Z":
                mz |= 1 << i
            else:
                mother |= 1 << i
        return cls(len(statuses), mx, my, mz, mother, lost)

    @property
    def unmeasured(self) -> int:
        mask = (1 << self.n) - 1
        return mask & ~(self.mx | self.my | self.mz | self.mother | self.lost)

    def measure(self, qubit: int, basis: Basis) -> "MeasurementPattern":
        bit = 1 << qubit
        if not self.unmeasured & bit:
            raise ValueError(f"qubit {qubit} is not unmeasured")
        mx, my, mz, mother = self.mx, self.my, self.mz, self.mother
        if basis.kind == "X":
            mx |= bit
        elif basis.kind == "Y":
            my |= bit
        elif basis.kind == "Z":
            mz |= bit
        else:
            mother |= bit
        return MeasurementPattern(self.n, mx, my, mz, mother, self.lost)

    def lose(self, qubit: int) -> "MeasurementPattern":
        bit = 1 << qubit
        if not self.unmeasured & bit:
            raise ValueError(f"qubit {qubit} is not unmeasured")
        return MeasurementPattern(self.n, self.mx, self.my, self.mz,
                                  self.mother, self.lost | bit)

    def status(self, qubit: int):
        bit = 1 << qubit
        if self.mx & bit:
            return BASIS_X
        if self.my & bit:
            return BASIS_Y
        if self.mz & bit:
            return BASIS_Z
        if self.mother & bit:
            return BASIS_A
        if self.lost & bit:
            return "lost"
        return "unmeasured"

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, MeasurementPattern)
            and (self.n, self.mx, self.my, self.mz, self.mother, self.lost)
            == (other.n, other.mx, other.my, other.mz, other.mother, other.lost)
        )

    def __hash__(self) -> int:
        return hash((self.n, self.mx, self.my, self.mz, self.mother, self.lost))

    def chars(self) -> str:
        """One status letter per qubit: basis kind, '.' unmeasured, '_' lost."""
        out = []
        for i in range(self.n):
            st = self.status(i)
            if st == "unmeasured":
                out.append(".")
            elif st == "lost":
                out.append("_")
            else:
                out.append("F" if st.kind == "fusion" else st.kind)
        return "".join(out)

    @classmethod
    def from_chars(cls, chars: str) -> "MeasurementPattern":
        statuses: list = []
        for ch in chars:
            if ch == ".":
                statuses.append("unmeasured")
            elif ch == "_":
                statuses.append("lost")
            else:
                statuses.append(Basis(ch if ch != "F" else "fusion"))
        return cls.from_statuses(statuses)

    def __repr__(self) -> str:
        return f"MeasurementPattern({self.chars()!r})"


def commutes_qubitwise(op: PauliOperator, m: MeasurementPattern,
                       completed: bool = True) -> bool:
    """Qubit-wise commutation of a Pauli operator with a pattern.

    Every non-identity letter must sit on a qubit measured in exactly that
    Pauli basis.  Lost qubits admit only identity.  With ``completed=False``
    (prospective mode, for strategies still being assembled) unmeasured
    qubits are wildcards; with ``completed=True`` they also require identity.
    """
    if op.n != m.n:
        raise DimensionError(f"lengths differ: {op.n} vs {m.n}")
    xs = op.x & ~op.z
    ys = op.x & op.z
    zs = op.z & ~op.x
    free = 0 if completed else m.unmeasured
    return (
        xs & ~(m.mx | free) == 0
        and ys & ~(m.my | free) == 0
        and zs & ~(m.mz | free) == 0
    )


def iter_bits(mask: int):
    """Yield the set bit positions of ``mask`` in increasing order."""
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


class PauliSpan:
    """Incremental GF(2) span of Pauli operators, phases ignored.

    Each operator maps to the 2n-bit vector x | z << n; rows are kept in
    echelon form so membership tests and insertions are linear scans.
    """

    __slots__ = ("n", "rows")

    def __init__(self, n: int, ops=()):
        self.n = n
        self.rows: list[int] = []
        for op in ops:
            self.add(op)

    def _reduce(self, vec: int) -> int:
        for row in self.rows:
            high = 1 << (row.bit_length() - 1)
            if vec & high:
                vec ^= row
        return vec

    def _add_vec(self, vec: int) -> bool:
        vec = self._reduce(vec)
        if vec == 0:
            return False
        self.rows.append(vec)
        self.rows.sort(key=int.bit_length, reverse=True)
        return True

    def add(self, op: PauliOperator) -> bool:
        """Insert; True if the operator was independent of the span."""
        if op.n != self.n:
            raise DimensionError(f"lengths differ: {op.n} vs {self.n}")
        return self._add_vec(op.x | op.z << self.n)

    def contains(self, op: PauliOperator) -> bool:
        """Membership up to phase."""
        if op.n != self.n:
            raise DimensionError(f"lengths differ: {op.n} vs {self.n}")
        return self._reduce(op.x | op.z << self.n) == 0

    @property
    def rank(self) -> int:
        return len(self.rows)

    def copy(self) -> "PauliSpan":
        dup = PauliSpan(self.n)
        dup.rows = list(self.rows)
        return dup


def symplectic_rank(ops) -> int:
    """GF(2) rank of a collection of Pauli operators, phases ignored."""
    ops = list(ops)
    if not ops:
        return 0
    return PauliSpan(ops[0].n, ops).rank
