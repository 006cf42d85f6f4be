"""One-parameter valuations: F evaluation, argmax/return points, risk measures.

The analytic constants exposed by the library (x0, x1, sign of F(x)-b) are
cross-checked here against generic numeric oracles that know nothing about
the closed forms: a golden-section search for the maximum of a concave
function and a plain bisection for the return-to-b point.
"""

import math
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from eqforge.games import InputError, MixedStrategy, Profile
from eqforge.families import gen_D
from eqforge.valuations import (
    HalfClass,
    OneParamValuation,
    analyze,
    classify_half,
    compare_to_b,
    compare_to_b_exact,
    cost_distribution,
    cvar_of_distribution,
    eval_F,
    is_unimodal,
    valuation_from_json,
    valuation_of_profile,
    valuation_to_json,
    var_of_distribution,
    x0_of,
    x0_search,
    x1_of,
)

GOLDEN = (math.sqrt(5) - 1) / 2


def _argmax_golden(f, lo=0.0, hi=1.0, tol=1e-13):
    """Golden-section search for the argmax of a concave function on [lo, hi]."""
    a, b = lo, hi
    c = b - GOLDEN * (b - a)
    d = a + GOLDEN * (b - a)
    while b - a > tol:
        if f(c) >= f(d):
            b, d = d, c
            c = b - GOLDEN * (b - a)
        else:
            a, c = c, d
            d = a + GOLDEN * (b - a)
    return 0.5 * (a + b)


def _root_bisect(f, lo, hi, tol=1e-14):
    """Bisection root of a function that is >= 0 at lo and <= 0 at hi."""
    assert f(lo) >= 0 >= f(hi)
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if hi - lo < tol:
            return mid
        if f(mid) >= 0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


# ---------------------------------------------------------------------------
# Endpoints, shape, constructor checks
# ---------------------------------------------------------------------------

BUILTINS = [
    OneParamValuation.expectation(0, 1),
    OneParamValuation.evar(0, 1, Fraction(1, 2)),
    OneParamValuation.evar(0, 1, 4),
    OneParamValuation.esd(0, 1, 1),
    OneParamValuation.esd(0, 1, Fraction(5, 2)),
    OneParamValuation.cvar(0, 1, Fraction(3, 4)),
    OneParamValuation.evar(Fraction(1, 2), 3, 2),
]


@pytest.mark.parametrize("v", BUILTINS, ids=lambda v: v.describe())
def test_endpoints_pin_b_and_a(v):
    assert eval_F(v, 0) == v.b
    assert eval_F(v, 1) == v.a


@pytest.mark.parametrize("v", BUILTINS, ids=lambda v: v.describe())
def test_midpoint_concavity_on_a_grid(v):
    pts = [Fraction(i, 64) for i in range(65)]
    vals = [float(eval_F(v, x)) for x in pts]
    for i in range(1, 64):
        assert vals[i] >= 0.5 * (vals[i - 1] + vals[i + 1]) - 1e-12


def test_constructed_parameters_are_validated():
    with pytest.raises(InputError):
        OneParamValuation.evar(1, 0, 1)  # needs a < b
    with pytest.raises(InputError):
        OneParamValuation.evar(0, 1, 0)  # gamma must be positive
    with pytest.raises(InputError):
        OneParamValuation.cvar(0, 1, 1)  # alpha in (0,1)
    with pytest.raises(InputError):
        OneParamValuation.cvar(0, 1, 0)


# ---------------------------------------------------------------------------
# Analytic x0 / x1 versus numeric oracles
# ---------------------------------------------------------------------------


def test_x0_evar_gamma2_is_one_quarter():
    v = OneParamValuation.evar(0, 1, 2)
    assert x0_of(v) == Fraction(1, 4)
    # The float oracle cannot resolve a smooth max beyond ~sqrt(eps).
    found = _argmax_golden(lambda x: float(eval_F(v, x)))
    assert abs(float(x0_of(v)) - found) < 5e-8
    assert abs(x0_search(v) - 0.25) < 1e-9


def test_x0_esd_gamma1_closed_form():
    v = OneParamValuation.esd(0, 1, 1)
    expected = 0.5 - 1.0 / (2.0 * math.sqrt(2.0))
    assert abs(x0_of(v) - expected) < 1e-12
    found = _argmax_golden(lambda x: float(eval_F(v, x)))
    assert abs(found - expected) < 5e-8
    assert abs(x0_search(v) - expected) < 1e-9


def test_x1_evar_gamma4_is_three_quarters():
    v = OneParamValuation.evar(0, 1, 4)
    assert x1_of(v) == Fraction(3, 4)
    root = _root_bisect(lambda x: float(eval_F(v, x)) - 1.0, float(x0_of(v)), 1.0)
    assert abs(root - 0.75) < 1e-9


def test_x1_esd_is_exact_rational():
    # F(x) = -x + g*sqrt(x(1-x)) + b returns to b at x = g^2/(1+g^2).
    for g in (Fraction(1), Fraction(1, 2), Fraction(7, 3)):
        v = OneParamValuation.esd(0, 1, g)
        assert x1_of(v) == g * g / (1 + g * g)
        root = _root_bisect(lambda x: float(eval_F(v, x)) - 1.0, float(x0_of(v)) + 1e-12, 1.0)
        assert abs(float(x1_of(v)) - root) < 1e-9


def test_x0_search_agrees_with_closed_forms():
    for v in BUILTINS:
        assert abs(x0_search(v) - float(x0_of(v))) < 1e-9


def test_x0_is_zero_for_decreasing_valuations():
    assert x0_of(OneParamValuation.expectation(0, 1)) == 0
    assert x0_of(OneParamValuation.cvar(0, 1, Fraction(1, 2))) == 0
    # EVar with gamma*(b-a) <= 1 is strictly decreasing as well
    assert x0_of(OneParamValuation.evar(0, 1, 1)) == 0
    assert x1_of(OneParamValuation.expectation(0, 1)) is None


def test_x1_sits_beyond_x0_and_returns_to_b():
    for v in BUILTINS:
        if not is_unimodal(v):
            with pytest.raises(InputError):
                x1_of(v)
            continue
        x0, x1 = x0_of(v), x1_of(v)
        if x0 == 0:
            assert x1 is None
            continue
        assert x1 is not None and float(x1) > float(x0)
        assert abs(float(eval_F(v, x1)) - float(v.b)) < 1e-9


# ---------------------------------------------------------------------------
# Sign of F(x)-b: exact arithmetic versus float evaluation
# ---------------------------------------------------------------------------


@given(
    num=st.integers(min_value=0, max_value=256),
    gnum=st.integers(min_value=1, max_value=64),
    gden=st.integers(min_value=1, max_value=16),
)
@settings(max_examples=200, deadline=None)
def test_compare_to_b_exact_matches_float_sign_evar(num, gnum, gden):
    x = Fraction(num, 256)
    v = OneParamValuation.evar(0, 1, Fraction(gnum, gden))
    exact = compare_to_b_exact(v, x)
    diff = float(eval_F(v, x)) - 1.0
    if abs(diff) > 1e-9:
        assert exact == (1 if diff > 0 else -1)


@given(
    num=st.integers(min_value=0, max_value=256),
    gnum=st.integers(min_value=1, max_value=64),
    gden=st.integers(min_value=1, max_value=16),
)
@settings(max_examples=200, deadline=None)
def test_compare_to_b_exact_matches_float_sign_esd(num, gnum, gden):
    x = Fraction(num, 256)
    v = OneParamValuation.esd(0, 1, Fraction(gnum, gden))
    exact = compare_to_b_exact(v, x)
    diff = float(eval_F(v, x)) - 1.0
    if abs(diff) > 1e-9:
        assert exact == (1 if diff > 0 else -1)


def test_compare_to_b_handles_cvar_plateau():
    v = OneParamValuation.cvar(0, 1, Fraction(3, 4))
    assert compare_to_b(v, Fraction(1, 2)) == 0  # on the flat segment F == b
    assert compare_to_b(v, Fraction(3, 4)) == 0  # kink included
    assert compare_to_b(v, Fraction(7, 8)) == -1


# ---------------------------------------------------------------------------
# Half-point classification
# ---------------------------------------------------------------------------


def test_classify_half_esd_gamma1_is_exactly_equal():
    assert classify_half(OneParamValuation.esd(0, 1, 1)) is HalfClass.EQUAL


def test_classify_half_evar_threshold_at_gamma_span_2():
    # F(1/2) - b = (b-a) * (gamma*(b-a)/4 - 1/2): zero iff gamma*(b-a) == 2.
    assert classify_half(OneParamValuation.evar(0, 1, 2)) is HalfClass.EQUAL
    assert classify_half(OneParamValuation.evar(0, 1, Fraction(3, 2))) is HalfClass.LESS
    assert classify_half(OneParamValuation.evar(0, 1, 3)) is HalfClass.GREATER
    assert classify_half(OneParamValuation.evar(0, 2, 1)) is HalfClass.EQUAL


def test_classify_half_expectation_and_cvar():
    assert classify_half(OneParamValuation.expectation(0, 1)) is HalfClass.LESS
    assert classify_half(OneParamValuation.cvar(0, 1, Fraction(3, 4))) is HalfClass.EQUAL
    assert classify_half(OneParamValuation.cvar(0, 1, Fraction(1, 4))) is HalfClass.LESS


def test_analyze_bundle_is_consistent():
    v = OneParamValuation.esd(0, 1, 1)
    info = analyze(v)
    assert info.half_class is HalfClass.EQUAL
    assert info.unimodal
    assert info.x1 == Fraction(1, 2)
    assert abs(info.x0 - (0.5 - 0.5 / math.sqrt(2))) < 1e-12


def test_unimodality_flags():
    assert is_unimodal(OneParamValuation.evar(0, 1, 3))
    assert is_unimodal(OneParamValuation.esd(0, 1, Fraction(1, 2)))
    # Strictly decreasing = unique max at 0: still unimodal by convention.
    assert is_unimodal(OneParamValuation.expectation(0, 1))
    # CVaR is flat at its maximum, hence not unimodal.
    assert not is_unimodal(OneParamValuation.cvar(0, 1, Fraction(3, 4)))


def test_custom_valuation_wraps_a_callable():
    # Concave quadratic matching the EVar gamma=2 closed form.
    v = OneParamValuation.custom(0, 1, lambda x: -x + 1 + 2 * x * (1 - x), Fraction(1, 4))
    assert not v.exact
    assert x0_of(v) == Fraction(1, 4)
    # float-only comparisons: the search saturates around sqrt(eps)
    assert abs(x0_search(v) - 0.25) < 5e-8
    # the quadratic returns to b at x = 1/2 (peak 1/4, symmetric about it)
    assert abs(x1_of(v) - 0.5) < 1e-9
    assert is_unimodal(v)


# ---------------------------------------------------------------------------
# Distribution-side risk measures
# ---------------------------------------------------------------------------


def test_var_quantile_hand_values():
    # value-at-risk = smallest cost whose cumulative probability reaches alpha
    vals = [0, 1]
    probs = [Fraction(1, 4), Fraction(3, 4)]
    assert var_of_distribution(vals, probs, Fraction(1, 4)) == 0
    assert var_of_distribution(vals, probs, Fraction(1, 2)) == 1
    assert var_of_distribution([2, 5, 7], ["1/3", "1/3", "1/3"], Fraction(2, 3)) == 5
    with pytest.raises(InputError):
        var_of_distribution([5, 2], ["1/2", "1/2"], Fraction(1, 2))  # not sorted


def test_cvar_of_distribution_hand_values():
    vals = [0, 1]
    probs = [Fraction(1, 4), Fraction(3, 4)]
    # alpha below the mass of the best outcome: tail is all-b beyond it
    assert cvar_of_distribution(vals, probs, Fraction(3, 4)) == 1
    # alpha = 1/8: worst 7/8 of the distribution averages (1/8*0 + 3/4*1)/(7/8)
    assert cvar_of_distribution(vals, probs, Fraction(1, 8)) == Fraction(6, 7)
    assert cvar_of_distribution([2], [1], Fraction(1, 2)) == 2


@given(
    xn=st.integers(min_value=0, max_value=240),
    an=st.integers(min_value=1, max_value=239),
)
@settings(max_examples=200, deadline=None)
def test_cvar_closed_form_on_two_values(xn, an):
    # For a two-values cost (a w.p. x, b w.p. 1-x) the CVaR_alpha closed form
    # is b when x <= alpha, else ((x - alpha) a + (1 - x) b) / (1 - alpha).
    x, alpha = Fraction(xn, 240), Fraction(an, 240)
    a, b = Fraction(0), Fraction(1)
    v = OneParamValuation.cvar(a, b, alpha)
    got = eval_F(v, x)
    if x <= alpha:
        assert got == b
    else:
        assert got == ((x - alpha) * a + (1 - x) * b) / (1 - alpha)
    dist = cvar_of_distribution([a, b], [x, 1 - x], alpha)
    assert dist == got


def test_valuation_of_profile_routes_through_x():
    g = gen_D(3)
    prof = Profile(MixedStrategy.uniform(3), MixedStrategy.uniform(3))
    v = OneParamValuation.evar(0, 1, 2)
    # x = 1/3 for both players at uniform/uniform
    assert valuation_of_profile(g, 1, v, prof) == eval_F(v, Fraction(1, 3))
    assert valuation_of_profile(g, 2, v, prof) == eval_F(v, Fraction(1, 3))


def test_cost_distribution_collects_cell_masses():
    g = gen_D(2)
    prof = Profile(["1/2", "1/2"], ["1/4", "3/4"])
    vals, probs = cost_distribution(g.game if hasattr(g, "game") else g, 1, prof)
    as_map = dict(zip(vals, probs))
    # player 1 pays a on the diagonal: 1/2*1/4 + 1/2*3/4 = 1/2
    assert as_map[Fraction(0)] == Fraction(1, 2)
    assert as_map[Fraction(1)] == Fraction(1, 2)
    assert sum(probs) == 1


# ---------------------------------------------------------------------------
# Serialization
# ---------------------------------------------------------------------------


def test_valuation_json_round_trip():
    for v in BUILTINS:
        doc = valuation_to_json(v)
        v2 = valuation_from_json(doc)
        assert v2.kind == v.kind and v2.a == v.a and v2.b == v.b
        assert v2.gamma == v.gamma and v2.alpha == v.alpha


def test_valuation_json_rejects_unknown_kind():
    with pytest.raises(InputError):
        valuation_from_json({"kind": "entropy", "a": "0", "b": "1"})
