"""Repeater-link and loss-threshold tests.

The repeater closed form below was derived by hand from the sequential
swap protocol on a depth-two tree [b, 1]: the station tries branch
fusions in order until one succeeds (that branch's two leaves then
carry the output, eta^2 each side), earlier failed gates contribute
their parity for free, earlier lost gates need both leaves indirectly
(eta^2), and every branch after the success point is removed by
single-leaf X measurements on both sides ((1 - (1-eta)^2)^2).
"""

import pytest

from graphcode_lt.codes import (
    branched_chain_code,
    cube_code,
    decorated_pentagon_code,
    pentagon_code,
    shor_22_code,
    star_code,
    tree_code,
)
from graphcode_lt.fusion import FusionModel, adaptive_fusion, transversal_fusion
from graphcode_lt.apps import (
    ERASURE_BUDGET,
    FbqcSpec,
    RepeaterSpec,
    end_to_end,
    fbqc_loss_threshold,
    link_table_csv,
    rgs_link_probability,
    threshold_table_csv,
)


def swap_chain_form(b: int, p_fail: float, eta: float) -> float:
    # [DERIVED: hand calculation, see module docstring]
    arrival = eta ** (1.0 / p_fail)
    succeed = arrival * (1.0 - p_fail)
    fail = arrival * p_fail
    lost = 1.0 - arrival
    trim = (1.0 - (1.0 - eta) ** 2) ** 2
    return succeed * eta * eta * sum(
        (fail + lost * eta * eta) ** (k - 1) * trim ** (b - k)
        for k in range(1, b + 1))


# -- spec objects -----------------------------------------------------------------


def test_repeater_spec_validation():
    code = pentagon_code()
    with pytest.raises(ValueError):
        RepeaterSpec(code, p_fail=0.0)
    with pytest.raises(ValueError):
        RepeaterSpec(code, p_fail=1.5)
    with pytest.raises(ValueError):
        RepeaterSpec(code, stations=0)
    spec = RepeaterSpec(code, p_fail=0.25, stations=4, adaptive=False)
    with pytest.raises(AttributeError):
        spec.stations = 2
    assert "stations=4" in repr(spec)


def test_fbqc_spec_validation():
    code = pentagon_code()
    with pytest.raises(ValueError):
        FbqcSpec(code, p_fail=-0.1)
    with pytest.raises(ValueError):
        FbqcSpec(code, erasure_budget=0.0)
    with pytest.raises(ValueError):
        FbqcSpec(code, erasure_budget=1.0)
    spec = FbqcSpec(code, p_fail=0.25)
    with pytest.raises(AttributeError):
        spec.adaptive = False
    assert spec.erasure_budget == ERASURE_BUDGET == 0.12


# -- repeater links ---------------------------------------------------------------


@pytest.mark.parametrize("branches", [1, 2, 3, 4])
@pytest.mark.parametrize("p_fail,eta", [(0.5, 0.9), (0.5, 0.97), (0.25, 0.95)])
def test_swap_chain_closed_form(branches, p_fail, eta):
    # [DERIVED: independent closed form for depth-two trees]
    spec = RepeaterSpec(tree_code([branches, 1]), p_fail=p_fail)
    assert rgs_link_probability(spec, eta) == pytest.approx(
        swap_chain_form(branches, p_fail, eta), abs=1e-12)


def test_link_probability_lossless_pentagon():
    # [DERIVED: exact enumeration] At eta=1 only gate failure remains and
    # both strategies recover from single failures: 1 - p_fail^2.
    for adaptive in (True, False):
        spec = RepeaterSpec(pentagon_code(), p_fail=0.5, adaptive=adaptive)
        assert rgs_link_probability(spec, 1.0) == pytest.approx(0.75, abs=1e-12)


def test_link_probability_vanishes_without_photons():
    spec = RepeaterSpec(tree_code([2, 1]), p_fail=0.5)
    # [TRIVIAL] no photon arrives at eta=0
    assert rgs_link_probability(spec, 0.0) == 0.0


def test_link_matches_raw_fusion():
    # [TRIVIAL: the spec is a thin wrapper over one logical fusion]
    code = decorated_pentagon_code()
    fm = FusionModel(0.25, 0.92)
    spec = RepeaterSpec(code, p_fail=0.25, adaptive=True)
    assert rgs_link_probability(spec, 0.92) == adaptive_fusion(code, fm).p_success
    spec_t = RepeaterSpec(code, p_fail=0.25, adaptive=False)
    assert rgs_link_probability(spec_t, 0.92) == transversal_fusion(code, fm).p_success


def test_end_to_end_composition():
    spec = RepeaterSpec(tree_code([2, 1]), p_fail=0.5, stations=3)
    p1 = rgs_link_probability(spec, 0.95)
    # [DERIVED: frozen from exact enumeration]
    assert p1 == pytest.approx(0.62482810703125, abs=1e-12)
    assert end_to_end(spec, 0.95) == pytest.approx(p1 ** 3, abs=1e-15)
    assert end_to_end(spec, 0.95, stations=5) == pytest.approx(p1 ** 5, abs=1e-15)
    assert end_to_end(spec, 0.95, stations=1) == pytest.approx(p1, abs=1e-15)
    with pytest.raises(ValueError):
        end_to_end(spec, 0.95, stations=0)


def test_adaptive_never_below_transversal_link():
    code = pentagon_code()
    for eta in (0.85, 0.92, 0.99):
        a = rgs_link_probability(RepeaterSpec(code, 0.5, adaptive=True), eta)
        t = rgs_link_probability(RepeaterSpec(code, 0.5, adaptive=False), eta)
        assert a >= t - 1e-12


# -- loss thresholds --------------------------------------------------------------


def test_shor_transversal_threshold():
    # [PAPER: 2.7% +- 0.3% for the four-qubit pair code at 75% boosted fusion]
    spec = FbqcSpec(shor_22_code(), p_fail=0.25, adaptive=False)
    thr = fbqc_loss_threshold(spec)
    assert thr == pytest.approx(0.027130126953125, abs=2e-4)
    assert abs(thr - 0.027) < 0.003


def test_shor_transversal_dead_at_half():
    # [DERIVED: unboosted failure alone exceeds the erasure budget]
    spec = FbqcSpec(shor_22_code(), p_fail=0.5, adaptive=False)
    assert fbqc_loss_threshold(spec) == 0.0


def test_shor_adaptive_beats_transversal():
    # [DERIVED: frozen from bisection over exact enumerations]
    a = fbqc_loss_threshold(FbqcSpec(shor_22_code(), 0.25, adaptive=True))
    t = fbqc_loss_threshold(FbqcSpec(shor_22_code(), 0.25, adaptive=False))
    assert a == pytest.approx(0.050201416015625, abs=2e-4)
    assert a > t


def test_threshold_unimodal_in_boosting():
    # Boosting trades arrival probability against failure rate, so the
    # threshold rises from zero and falls again along the boosted ladder.
    thrs = [fbqc_loss_threshold(FbqcSpec(shor_22_code(), pf, adaptive=False))
            for pf in (0.5, 0.25, 0.125, 0.0625)]
    # [DERIVED: frozen curve, peak at one boosting level]
    assert thrs[0] == 0.0
    assert thrs[1] == pytest.approx(0.027130126953125, abs=2e-4)
    assert thrs[2] == pytest.approx(0.022125244140625, abs=2e-4)
    assert thrs[3] == pytest.approx(0.013153076171875, abs=2e-4)
    peak = max(range(4), key=lambda i: thrs[i])
    assert peak == 1
    assert all(thrs[i] >= thrs[i + 1] for i in range(peak, 3))


@pytest.mark.parametrize("make,frozen", [
    (pentagon_code, 0.029327392578125),
    (decorated_pentagon_code, 0.026275634765625),
    (branched_chain_code, 0.021575927734375),
    (cube_code, 0.037994384765625),
])
def test_library_adaptive_thresholds(make, frozen):
    # [DERIVED: frozen from bisection over exact enumerations]
    spec = FbqcSpec(make(), p_fail=0.5, adaptive=True)
    assert fbqc_loss_threshold(spec) == pytest.approx(frozen, abs=2e-4)


def test_erasure_identity_under_randomization():
    # [TRIVIAL: 50/50 randomization splits failures between the parities]
    r = adaptive_fusion(pentagon_code(), FusionModel(0.5, 0.93),
                        randomize_failures=True)
    assert r.erasure_xx == pytest.approx(r.erasure_zz, abs=1e-15)
    assert r.erasure_xx == pytest.approx(
        r.p_loss_logical + 0.5 * r.p_fail_logical, abs=1e-15)


def test_threshold_monotone_in_budget():
    code = pentagon_code()
    loose = fbqc_loss_threshold(FbqcSpec(code, 0.5, erasure_budget=0.2))
    tight = fbqc_loss_threshold(FbqcSpec(code, 0.5, erasure_budget=0.08))
    base = fbqc_loss_threshold(FbqcSpec(code, 0.5))
    assert loose > base > tight


def test_star_code_has_no_threshold():
    # A bare star cannot protect both parities at once.
    spec = FbqcSpec(star_code(4), p_fail=0.5, adaptive=True)
    assert fbqc_loss_threshold(spec) == 0.0


# -- csv tables -------------------------------------------------------------------


def test_link_table_csv():
    spec = RepeaterSpec(tree_code([2, 1]), p_fail=0.5)
    text = link_table_csv(spec, [0.0, 0.05])
    lines = text.strip().splitlines()
    assert lines[0] == "ell,p_link"
    assert len(lines) == 3
    ell, p = lines[2].split(",")
    assert float(ell) == 0.05
    assert float(p) == pytest.approx(rgs_link_probability(spec, 0.95), abs=1e-9)


def test_threshold_table_csv():
    text = threshold_table_csv(shor_22_code(), [0.5, 0.25], adaptive=False)
    lines = text.strip().splitlines()
    assert lines[0] == "p_fail,loss_threshold"
    assert len(lines) == 3
    assert float(lines[1].split(",")[1]) == 0.0
    assert float(lines[2].split(",")[1]) == pytest.approx(0.0271, abs=2e-4)
