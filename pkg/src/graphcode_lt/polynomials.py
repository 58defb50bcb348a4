"""Exact success/loss polynomials with integer multiplicities.

A term counts detected and lost measurement attempts per basis, so the
same object evaluates both the homogeneous eta_bar(eta) curve and the
heterogeneous form needed when different bases see different effective
transmissions.  Expansion to plain power-series coefficients is exact
(integer arithmetic), which is what makes break-even points and leading
subthreshold coefficients trustworthy.
"""

from __future__ import annotations

from math import comb

BASES = ("X", "Y", "Z", "A")

# term key: ((aX, aY, aZ, aA), (bX, bY, bZ, bA)) -> integer multiplicity
_ZERO4 = (0, 0, 0, 0)


class LossPolynomial:
    """Sum of mult * prod_M eta_M^a_M (1-eta_M)^b_M with integer mults."""

    __slots__ = ("terms",)

    def __init__(self, terms: dict | None = None):
        clean = {}
        if terms:
            for key, mult in terms.items():
                if mult:
                    clean[key] = clean.get(key, 0) + mult
        object.__setattr__(self, "terms", dict(clean))

    def __setattr__(self, name, value):
        raise AttributeError("LossPolynomial is immutable")

    # -- constructors -----------------------------------------------------

    @classmethod
    def zero(cls) -> "LossPolynomial":
        return cls({})

    @classmethod
    def one(cls) -> "LossPolynomial":
        return cls({(_ZERO4, _ZERO4): 1})

    @classmethod
    def monomial(cls, detected: dict | None = None, lost: dict | None = None,
                 mult: int = 1) -> "LossPolynomial":
        """Single term from per-basis exponent dicts like {"X": 2, "A": 1}."""
        a = tuple((detected or {}).get(m, 0) for m in BASES)
        b = tuple((lost or {}).get(m, 0) for m in BASES)
        return cls({(a, b): mult})

    # -- ring operations ---------------------------------------------------

    def __add__(self, other: "LossPolynomial") -> "LossPolynomial":
        terms = dict(self.terms)
        for key, mult in other.terms.items():
            terms[key] = terms.get(key, 0) + mult
        return LossPolynomial(terms)

    def __sub__(self, other: "LossPolynomial") -> "LossPolynomial":
        terms = dict(self.terms)
        for key, mult in other.terms.items():
            terms[key] = terms.get(key, 0) - mult
        return LossPolynomial(terms)

    def __mul__(self, other) -> "LossPolynomial":
        if isinstance(other, int):
            return LossPolynomial({k: m * other for k, m in self.terms.items()})
        terms: dict = {}
        for (a1, b1), m1 in self.terms.items():
            for (a2, b2), m2 in other.terms.items():
                key = (tuple(x + y for x, y in zip(a1, a2)),
                       tuple(x + y for x, y in zip(b1, b2)))
                terms[key] = terms.get(key, 0) + m1 * m2
        return LossPolynomial(terms)

    __rmul__ = __mul__

    def attempt(self, basis_kind: str, lost: bool) -> "LossPolynomial":
        """Multiply by eta_M (detection) or 1-eta_M (loss) for one attempt."""
        if basis_kind == "fusion":
            basis_kind = "A"
        idx = BASES.index(basis_kind)
        terms = {}
        for (a, b), mult in self.terms.items():
            if lost:
                b = b[:idx] + (b[idx] + 1,) + b[idx + 1:]
            else:
                a = a[:idx] + (a[idx] + 1,) + a[idx + 1:]
            terms[(a, b)] = terms.get((a, b), 0) + mult
        return LossPolynomial(terms)

    # -- evaluation ----------------------------------------------------------

    def evaluate(self, eta: float) -> float:
        """Homogeneous evaluation: every basis sees the same transmission."""
        total = 0.0
        loss = 1.0 - eta
        for (a, b), mult in self.terms.items():
            total += mult * eta ** sum(a) * loss ** sum(b)
        return total

    def evaluate_heterogeneous(self, etas: dict) -> float:
        """Evaluation with per-basis transmissions, e.g. {"X": .9, "Z": 1.}."""
        total = 0.0
        for (a, b), mult in self.terms.items():
            val = float(mult)
            for i, m in enumerate(BASES):
                em = etas.get(m, etas.get("default", 1.0))
                if a[i]:
                    val *= em ** a[i]
                if b[i]:
                    val *= (1.0 - em) ** b[i]
            total += val
        return total

    # -- exact expansion -------------------------------------------------------

    def eta_coefficients(self) -> dict[int, int]:
        """Exact coefficients of eta^k when all bases share one eta."""
        coeffs: dict[int, int] = {}
        for (a, b), mult in self.terms.items():
            ta, tb = sum(a), sum(b)
            # eta^ta (1-eta)^tb = sum_j C(tb, j) (-1)^j eta^(ta+j)
            for j in range(tb + 1):
                k = ta + j
                coeffs[k] = coeffs.get(k, 0) + mult * comb(tb, j) * (-1) ** j
        return {k: c for k, c in sorted(coeffs.items()) if c}

    def loss_coefficients(self) -> dict[int, int]:
        """Exact coefficients of ell^k for the complement 1 - poly(1 - ell).

        This is the induced loss curve when the polynomial is a success
        probability in eta = 1 - ell.
        """
        out: dict[int, int] = {0: 1}
        for k, c in self.eta_coefficients().items():
            # eta^k = (1-ell)^k
            for j in range(k + 1):
                out[j] = out.get(j, 0) - c * comb(k, j) * (-1) ** j
        return {k: c for k, c in sorted(out.items()) if c}

    def to_string(self, var: str = "eta") -> str:
        """Canonical text form of the homogeneous expansion, e.g.
        ``2*eta^2 - eta^4``."""
        coeffs = self.eta_coefficients()
        if not coeffs:
            return "0"
        parts = []
        for k, c in coeffs.items():
            mag = abs(c)
            if k == 0:
                body = str(mag)
            elif k == 1:
                body = f"{mag}*{var}" if mag != 1 else var
            else:
                body = f"{mag}*{var}^{k}" if mag != 1 else f"{var}^{k}"
            if not parts:
                parts.append(body if c > 0 else f"-{body}")
            else:
                parts.append(f"+ {body}" if c > 0 else f"- {body}")
        return " ".join(parts)

    # -- inspection ---------------------------------------------------------

    @property
    def is_zero(self) -> bool:
        return not self.terms

    def total_multiplicity(self) -> int:
        return sum(self.terms.values())

    def __eq__(self, other) -> bool:
        return isinstance(other, LossPolynomial) and self.terms == other.terms

    def __hash__(self) -> int:
        return hash(frozenset(self.terms.items()))

    def __repr__(self) -> str:
        return f"LossPolynomial({self.to_string()})"


def equivalent_univariate(p: LossPolynomial, q: LossPolynomial) -> bool:
    """Equality of the homogeneous expansions (per-basis detail ignored)."""
    return p.eta_coefficients() == q.eta_coefficients()


def break_even(poly: LossPolynomial, tol: float = 1e-6) -> float | None:
    """Largest interior fixed point of the induced loss map.

    The loss curve is ell_bar(ell) = 1 - poly(1 - ell); the break-even
    point is the largest ell* in (0, 1) with ell_bar(ell*) = ell*, located
    by a downward grid scan for a sign change and bisection to ``tol``.
    Returns None when the curve never crosses the diagonal inside (0, 1).
    """

    def g(ell: float) -> float:
        return (1.0 - poly.evaluate(1.0 - ell)) - ell

    steps = 2000
    grid = [i / steps for i in range(steps - 1, 0, -1)]
    values = [g(ell) for ell in grid]
    if max(abs(v) for v in values) < 1e-14:
        return None  # the curve IS the diagonal; no isolated crossing
    for (ell, val), (prev_ell, prev_val) in zip(
            list(zip(grid, values))[1:], zip(grid, values)):
        if val == 0.0:
            return ell
        if prev_val * val < 0:
            lo, hi = ell, prev_ell
            flo = val
            while hi - lo > tol:
                mid = 0.5 * (lo + hi)
                fmid = g(mid)
                if fmid == 0.0:
                    return mid
                if (fmid < 0) == (flo < 0):
                    lo, flo = mid, fmid
                else:
                    hi = mid
            return 0.5 * (lo + hi)
    return None
