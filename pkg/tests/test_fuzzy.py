import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from epifuzz.fuzzy import (
    FuzzyRule,
    MembershipFunction,
    RuleBase,
    SeverityDegrees,
    classify,
    crisp_severity,
    default_rule_base,
    infer_severity,
    make_variable,
    membership_degree,
    severity_degrees,
)

from oracles import brute_force_severity, trapezoid


@pytest.mark.parametrize("x, expected", [(45, 1.0), (30, 0.5), (70, 0.0), (25, 0.0), (35, 1.0), (60, 0.5)])
def test_membership_trapezoid(x, expected):
    assert membership_degree(MembershipFunction(25, 35, 55, 65), x) == expected


def test_shoulders():
    young = MembershipFunction(0, 0, 25, 35)
    elderly = MembershipFunction(55, 65, 120, 120)
    assert young(0) == 1.0
    assert young(-5) == 0.0
    assert elderly(120) == 1.0
    assert elderly(121) == 0.0


@pytest.mark.parametrize("abcd", [(2, 1, 3, 4), (1, 3, 2, 4), (1, 2, 4, 3)])
def test_malformed_trapezoid_rejected(abcd):
    with pytest.raises(ValueError, match="malformed"):
        MembershipFunction(*abcd)


def test_vectorised_membership_matches_scalar():
    mf = MembershipFunction(23, 27, 28, 32)
    xs = np.linspace(0, 60, 601)
    np.testing.assert_array_equal(mf(xs), [trapezoid(x, 23, 27, 28, 32) for x in xs])


trapezoids = st.lists(st.floats(-50, 150, allow_nan=False), min_size=4, max_size=4).map(sorted)


@settings(max_examples=200, deadline=None)
@given(trapezoids)
def test_membership_shape(abcd):
    a, b, c, d = abcd
    mf = MembershipFunction(a, b, c, d)
    xs = np.linspace(a - 10, d + 10, 2001)
    y = mf(xs)
    assert np.all((y >= 0) & (y <= 1))
    assert np.all(y[(xs >= b) & (xs <= c)] == 1.0)
    outside = ((xs <= a) | (xs >= d)) & ~((xs >= b) & (xs <= c))
    assert np.all(y[outside] == 0.0)
    rising = y[(xs >= a) & (xs <= b)]
    falling = y[(xs >= c) & (xs <= d)]
    assert np.all(np.diff(rising) >= 0)
    assert np.all(np.diff(falling) <= 0)
    # continuity: on a fine grid no jump exceeds the steepest ramp slope
    step = xs[1] - xs[0]
    slopes = [1 / (b - a) if b > a else 0, 1 / (d - c) if d > c else 0]
    interior = (xs > a + step) & (xs < d - step)
    if interior.sum() > 1:
        assert np.max(np.abs(np.diff(y[interior]))) <= max(slopes) * step * (1 + 1e-9) + 1e-12


def test_variable_rejects_label_outside_universe():
    with pytest.raises(ValueError, match="leaves universe"):
        make_variable("age", (0, 120), {"old": (55, 65, 130, 130)})


def test_variable_rejects_coverage_gap():
    with pytest.raises(ValueError, match="no label covers"):
        make_variable("bmi", (10, 60), {"low": (10, 10, 20, 25), "high": (30, 35, 60, 60)})


def test_default_variables_cover_universe(rule_base):
    for var in rule_base.variables.values():
        lo, hi = var.universe
        deg = var.degrees(np.linspace(lo, hi, 1001))
        assert np.all(deg.max(axis=1) > 0)


def test_rule_base_validation(rule_base):
    age = rule_base.variables["age"]
    bmi = rule_base.variables["bmi"]
    with pytest.raises(ValueError, match="unknown label"):
        RuleBase({"age": age, "bmi": bmi}, (FuzzyRule((("age", "ancient"),), "critical"),))
    with pytest.raises(ValueError, match="no rule concludes"):
        RuleBase({"age": age, "bmi": bmi}, (FuzzyRule((("age", "young"),), "mild"),))
    with pytest.raises(ValueError, match="empty antecedent"):
        FuzzyRule((), "mild")
    with pytest.raises(ValueError, match="t_norm"):
        RuleBase({"age": age, "bmi": bmi}, rule_base.rules, t_norm="lukasiewicz")


@pytest.mark.parametrize(
    "age, bmi, expected",
    [
        # R4 (obese -> severe) fires fully alongside R3/R5; crisp label is still critical
        (80, 35, (0.0, 1.0, 1.0)),
        (20, 22, (1.0, 0.0, 0.0)),
        # adult@60 = elderly@60 = obese@30 = 0.5
        (60, 30, (0.0, 0.5, 0.5)),
    ],
)
def test_infer_severity_examples(rule_base, age, bmi, expected):
    assert infer_severity(rule_base, age, bmi).as_tuple() == expected
    assert brute_force_severity(rule_base, age, bmi) == expected


@pytest.mark.parametrize("age, bmi, label", [(80, 35, "critical"), (20, 22, "mild"), (60, 30, "critical")])
def test_crisp_labels_of_examples(rule_base, age, bmi, label):
    assert crisp_severity(infer_severity(rule_base, age, bmi)) == label


def test_inputs_are_clamped(rule_base):
    assert infer_severity(rule_base, 150, 80) == infer_severity(rule_base, 120, 60)
    assert infer_severity(rule_base, -3, 5) == infer_severity(rule_base, 0, 10)


@pytest.mark.parametrize(
    "deg, label",
    [((1.0, 0, 0), "mild"), ((0, 0.5, 0.5), "critical"), ((0.2, 0.7, 0.1), "severe"), ((0.4, 0.4, 0), "severe")],
)
def test_crisp_severity(deg, label):
    assert crisp_severity(SeverityDegrees(*deg)) == label
    assert crisp_severity(deg) == label


@pytest.mark.parametrize("t_norm, s_norm", [("min", "max"), ("product", "probsum"), ("min", "probsum")])
def test_oracle_equivalence_random_pairs(t_norm, s_norm):
    rb = default_rule_base(t_norm, s_norm)
    rng = np.random.default_rng(2024)
    ages = rng.uniform(-10, 130, 10_000)
    bmis = rng.uniform(5, 70, 10_000)
    got = severity_degrees(rb, ages, bmis)
    want = np.array([brute_force_severity(rb, a, b) for a, b in zip(ages, bmis)])
    np.testing.assert_array_equal(got, want)


def test_grid_degrees_bounded_and_nonzero(rule_base):
    a, b = np.meshgrid(np.linspace(0, 120, 101), np.linspace(10, 60, 101))
    deg = severity_degrees(rule_base, a, b)
    assert np.all((deg >= 0) & (deg <= 1))
    assert np.all(deg.max(axis=-1) > 0)


def test_critical_monotone_in_age_for_obese(rule_base):
    ages = np.linspace(0, 120, 1201)
    for bmi in (32, 40, 60):
        crit = severity_degrees(rule_base, ages, bmi)[:, 2]
        assert np.all(np.diff(crit) >= 0)


def test_elderly_obese_always_critical(rule_base):
    a, b = np.meshgrid(np.linspace(65, 120, 56), np.linspace(32, 60, 29))
    assert np.all(classify(rule_base, a, b) == 2)
