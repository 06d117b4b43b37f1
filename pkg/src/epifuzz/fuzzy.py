"""Trapezoidal fuzzy sets and the age/BMI severity classifier."""
from dataclasses import dataclass
from typing import Dict, Mapping, Sequence, Tuple

import numpy as np

SEVERITIES = ("mild", "severe", "critical")
MILD, SEVERE, CRITICAL = 0, 1, 2

T_NORMS = ("min", "product")
S_NORMS = ("max", "probsum")


@dataclass(frozen=True)
class MembershipFunction:
    """Trapezoid with support (a, d) and plateau [b, c].

    ``a == b`` gives a left shoulder and ``c == d`` a right shoulder.
    """

    a: float
    b: float
    c: float
    d: float

    def __post_init__(self):
        if not (self.a <= self.b <= self.c <= self.d):
            raise ValueError(
                f"malformed trapezoid ({self.a}, {self.b}, {self.c}, {self.d}): need a <= b <= c <= d"
            )

    def __call__(self, x):
        return membership_degree(self, x)


def membership_degree(mf: MembershipFunction, x):
    """Degree of ``x`` in ``mf``; scalar in, float out, array in, array out."""
    xa = np.asarray(x, dtype=np.float64)
    a, b, c, d = mf.a, mf.b, mf.c, mf.d
    out = np.zeros(xa.shape)
    plateau = (xa >= b) & (xa <= c)
    out[plateau] = 1.0
    if b > a:
        rise = (xa > a) & (xa < b)
        out[rise] = (xa[rise] - a) / (b - a)
    if d > c:
        fall = (xa > c) & (xa < d)
        out[fall] = (d - xa[fall]) / (d - c)
    if out.ndim == 0:
        return float(out)
    return out


@dataclass(frozen=True)
class LinguisticVariable:
    name: str
    universe: Tuple[float, float]
    labels: Mapping[str, MembershipFunction]

    def __post_init__(self):
        lo, hi = self.universe
        if not lo < hi:
            raise ValueError(f"{self.name}: empty universe {self.universe}")
        if not self.labels:
            raise ValueError(f"{self.name}: no labels")
        for label, mf in self.labels.items():
            if mf.a < lo or mf.d > hi:
                raise ValueError(f"{self.name}.{label}: support ({mf.a}, {mf.d}) leaves universe [{lo}, {hi}]")
        grid = np.linspace(lo, hi, 1001)
        covered = np.zeros(grid.shape, dtype=bool)
        for mf in self.labels.values():
            covered |= membership_degree(mf, grid) > 0
        if not covered.all():
            gap = grid[~covered][0]
            raise ValueError(f"{self.name}: no label covers x={gap:g}")

    def clamp(self, x):
        lo, hi = self.universe
        return np.clip(x, lo, hi)

    def degree(self, label, x):
        return membership_degree(self.labels[label], self.clamp(x))

    def degrees(self, x):
        """Array of shape ``x.shape + (n_labels,)`` in label order."""
        xc = self.clamp(np.asarray(x, dtype=np.float64))
        return np.stack([membership_degree(mf, xc) for mf in self.labels.values()], axis=-1)


@dataclass(frozen=True)
class FuzzyRule:
    antecedent: Tuple[Tuple[str, str], ...]
    consequent: str

    def __post_init__(self):
        if not self.antecedent:
            raise ValueError("rule with empty antecedent")
        if self.consequent not in SEVERITIES:
            raise ValueError(f"rule consequent {self.consequent!r} is not one of {SEVERITIES}")

    def __str__(self):
        lhs = " and ".join(f"{v}.{l}" for v, l in self.antecedent)
        return f"{lhs} -> {self.consequent}"


@dataclass(frozen=True)
class RuleBase:
    variables: Mapping[str, LinguisticVariable]
    rules: Tuple[FuzzyRule, ...]
    t_norm: str = "min"
    s_norm: str = "max"

    def __post_init__(self):
        if self.t_norm not in T_NORMS:
            raise ValueError(f"unknown t_norm {self.t_norm!r}; expected one of {T_NORMS}")
        if self.s_norm not in S_NORMS:
            raise ValueError(f"unknown s_norm {self.s_norm!r}; expected one of {S_NORMS}")
        for name in ("age", "bmi"):
            if name not in self.variables:
                raise ValueError(f"rule base lacks the {name!r} variable")
        for rule in self.rules:
            for var, label in rule.antecedent:
                if var not in self.variables:
                    raise ValueError(f"rule '{rule}' references unknown variable {var!r}")
                if label not in self.variables[var].labels:
                    raise ValueError(f"rule '{rule}' references unknown label {var}.{label}")
        missing = set(SEVERITIES) - {r.consequent for r in self.rules}
        if missing:
            raise ValueError(f"no rule concludes {sorted(missing)}")


@dataclass(frozen=True)
class SeverityDegrees:
    mild: float
    severe: float
    critical: float

    def as_tuple(self):
        return (self.mild, self.severe, self.critical)


AGE_UNIVERSE = (0.0, 120.0)
BMI_UNIVERSE = (10.0, 60.0)

DEFAULT_AGE_LABELS = {
    "young": (0, 0, 25, 35),
    "adult": (25, 35, 55, 65),
    "elderly": (55, 65, 120, 120),
}
DEFAULT_BMI_LABELS = {
    "normal": (10, 10, 23, 27),
    "overweight": (23, 27, 28, 32),
    "obese": (28, 32, 60, 60),
}
DEFAULT_RULES = (
    ((("age", "young"),), "mild"),
    ((("age", "adult"),), "severe"),
    ((("age", "elderly"),), "critical"),
    ((("bmi", "obese"),), "severe"),
    ((("age", "elderly"), ("bmi", "obese")), "critical"),
)


def make_variable(name, universe, labels: Mapping[str, Sequence[float]]):
    return LinguisticVariable(
        name, tuple(map(float, universe)), {k: MembershipFunction(*map(float, v)) for k, v in labels.items()}
    )


def default_rule_base(t_norm="min", s_norm="max") -> RuleBase:
    variables = {
        "age": make_variable("age", AGE_UNIVERSE, DEFAULT_AGE_LABELS),
        "bmi": make_variable("bmi", BMI_UNIVERSE, DEFAULT_BMI_LABELS),
    }
    rules = tuple(FuzzyRule(ante, cons) for ante, cons in DEFAULT_RULES)
    return RuleBase(variables, rules, t_norm, s_norm)


def _t(name, x, y):
    return np.minimum(x, y) if name == "min" else x * y


def _s(name, x, y):
    return np.maximum(x, y) if name == "max" else x + y - x * y


def severity_degrees(rb: RuleBase, age, bmi) -> np.ndarray:
    """Vectorised inference: returns shape ``broadcast(age, bmi).shape + (3,)``.

    Inputs are clamped to each variable's universe.
    """
    age, bmi = np.broadcast_arrays(np.asarray(age, dtype=np.float64), np.asarray(bmi, dtype=np.float64))
    inputs = {"age": age, "bmi": bmi}
    cache: Dict[Tuple[str, str], np.ndarray] = {}

    def atom(var, label):
        if (var, label) not in cache:
            cache[(var, label)] = rb.variables[var].degree(label, inputs[var])
        return cache[(var, label)]

    out = np.zeros(age.shape + (3,))
    for rule in rb.rules:
        strength = atom(*rule.antecedent[0])
        for var, label in rule.antecedent[1:]:
            strength = _t(rb.t_norm, strength, atom(var, label))
        k = SEVERITIES.index(rule.consequent)
        out[..., k] = _s(rb.s_norm, out[..., k], strength)
    return out


def infer_severity(rb: RuleBase, age: float, bmi: float) -> SeverityDegrees:
    mild, severe, critical = severity_degrees(rb, age, bmi)
    return SeverityDegrees(float(mild), float(severe), float(critical))


def crisp_codes(degrees) -> np.ndarray:
    """Argmax over the last axis, ties resolved toward the more severe class."""
    degrees = np.asarray(degrees)
    return (2 - np.argmax(degrees[..., ::-1], axis=-1)).astype(np.int8)


def crisp_severity(deg) -> str:
    if isinstance(deg, SeverityDegrees):
        deg = deg.as_tuple()
    return SEVERITIES[int(crisp_codes(np.asarray(deg, dtype=np.float64)))]


def classify(rb: RuleBase, age, bmi) -> np.ndarray:
    """Crisp severity codes (MILD/SEVERE/CRITICAL) for arrays of agents."""
    return crisp_codes(severity_degrees(rb, age, bmi))
