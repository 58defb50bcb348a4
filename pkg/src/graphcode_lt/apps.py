"""Repeater links and fusion-network loss thresholds from logical fusions.

Two consumers of the logical-fusion analysis.  A repeater chain carries
an encoded qubit through stations that swap entanglement by logically
fusing the right-ward code of one station with the left-ward code of
the next; the per-link probability is just the logical fusion success
of the shared code.  A fusion-based fault-tolerant network instead
feeds parity outcomes into syndrome graphs that tolerate a fixed
erasure budget per measurement, so the figure of merit is the largest
per-photon loss at which both parity erasures stay below that budget.
"""

from __future__ import annotations

import csv
import io

from .codes import GraphCode
from .fusion import FusionModel, LogicalFusionResult, adaptive_fusion, transversal_fusion

__all__ = [
    "ERASURE_BUDGET",
    "FbqcSpec",
    "RepeaterSpec",
    "end_to_end",
    "fbqc_loss_threshold",
    "link_table_csv",
    "rgs_link_probability",
    "threshold_table_csv",
]

# Highest measurement-erasure tolerance among the hexagonal-resource
# fusion networks; the network internals are reduced to this constant.
ERASURE_BUDGET = 0.12


def _validated_p_fail(p_fail: float) -> float:
    if not 0.0 < p_fail <= 1.0:
        raise ValueError(f"p_fail must lie in (0, 1], got {p_fail}")
    return p_fail


class RepeaterSpec:
    """One repeater design: the code used for both halves of a station.

    The total repeater graph is two copies of the progenitor joined at
    their inputs, both X-measured, so the link between neighboring
    stations is exactly one logical fusion of ``code`` with itself.
    """

    __slots__ = ("code", "p_fail", "stations", "adaptive")

    def __init__(self, code: GraphCode, p_fail: float = 0.5,
                 stations: int = 1, adaptive: bool = True):
        if stations < 1:
            raise ValueError(f"stations must be >= 1, got {stations}")
        object.__setattr__(self, "code", code)
        object.__setattr__(self, "p_fail", _validated_p_fail(p_fail))
        object.__setattr__(self, "stations", stations)
        object.__setattr__(self, "adaptive", bool(adaptive))

    def __setattr__(self, name, value):
        raise AttributeError("RepeaterSpec is immutable")

    def __repr__(self) -> str:
        return (f"RepeaterSpec(n={self.code.n}, p_fail={self.p_fail}, "
                f"stations={self.stations}, adaptive={self.adaptive})")


class FbqcSpec:
    """One fusion-network design point: code, gate quality, strategy."""

    __slots__ = ("code", "p_fail", "adaptive", "erasure_budget")

    def __init__(self, code: GraphCode, p_fail: float = 0.5,
                 adaptive: bool = True, erasure_budget: float = ERASURE_BUDGET):
        if not 0.0 < erasure_budget < 1.0:
            raise ValueError(
                f"erasure budget must lie in (0, 1), got {erasure_budget}")
        object.__setattr__(self, "code", code)
        object.__setattr__(self, "p_fail", _validated_p_fail(p_fail))
        object.__setattr__(self, "adaptive", bool(adaptive))
        object.__setattr__(self, "erasure_budget", erasure_budget)

    def __setattr__(self, name, value):
        raise AttributeError("FbqcSpec is immutable")

    def __repr__(self) -> str:
        return (f"FbqcSpec(n={self.code.n}, p_fail={self.p_fail}, "
                f"adaptive={self.adaptive})")


def _fuse(code: GraphCode, fm: FusionModel, adaptive: bool,
          randomize: bool) -> LogicalFusionResult:
    if adaptive:
        return adaptive_fusion(code, fm, randomize_failures=randomize)
    return transversal_fusion(code, fm, randomize_failures=randomize)


def rgs_link_probability(spec: RepeaterSpec, eta: float) -> float:
    """Success probability of one entanglement swap between stations."""
    result = _fuse(spec.code, FusionModel(spec.p_fail, eta), spec.adaptive,
                   randomize=False)
    return result.p_success


def end_to_end(spec: RepeaterSpec, eta: float,
               stations: int | None = None) -> float:
    """Probability that every link of the chain succeeds.

    Links are independent: each station holds a fresh repeater graph,
    so the chain succeeds with the per-link probability to the power of
    the station count.
    """
    count = spec.stations if stations is None else stations
    if count < 1:
        raise ValueError(f"stations must be >= 1, got {count}")
    return rgs_link_probability(spec, eta) ** count


def fbqc_loss_threshold(spec: FbqcSpec, tol: float = 1e-4) -> float:
    """Largest per-photon loss with both parity erasures inside budget.

    Failed fusions have their erased parity randomized (achievable with
    local Cliffords), so a logical failure still feeds one syndrome
    graph half the time; losses erase both.  The criterion
    max(erasure_xx, erasure_zz) < budget is monotone in loss, and the
    returned threshold is located by bisection to ``tol``.  A code
    outside budget even at zero loss returns 0.
    """

    def inside(ell: float) -> bool:
        fm = FusionModel(spec.p_fail, 1.0 - ell)
        result = _fuse(spec.code, fm, spec.adaptive, randomize=True)
        return max(result.erasure_xx, result.erasure_zz) < spec.erasure_budget

    lo, hi = 0.0, 1.0
    if not inside(lo):
        return 0.0
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if inside(mid):
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def link_table_csv(spec: RepeaterSpec, losses) -> str:
    """Per-link success against physical loss (ell, p_link rows)."""
    buf = io.StringIO()
    writer = csv.writer(buf)
    writer.writerow(["ell", "p_link"])
    for ell in losses:
        writer.writerow([f"{ell:.12g}",
                         f"{rgs_link_probability(spec, 1.0 - ell):.12g}"])
    return buf.getvalue()


def threshold_table_csv(code: GraphCode, p_fails, adaptive: bool = True,
                        tol: float = 1e-4) -> str:
    """Loss threshold against gate failure rate (p_fail, threshold rows)."""
    buf = io.StringIO()
    writer = csv.writer(buf)
    writer.writerow(["p_fail", "loss_threshold"])
    for p_fail in p_fails:
        spec = FbqcSpec(code, p_fail, adaptive)
        writer.writerow([f"{p_fail:.12g}",
                         f"{fbqc_loss_threshold(spec, tol):.12g}"])
    return buf.getvalue()
