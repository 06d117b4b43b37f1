"""Fuzzy multi-agent epidemic simulator.

Agents carry age and BMI; a Mamdani rule base turns them into a mild, severe
or critical course. Infection spreads inside a transmissibility zone on a
torus, and hospital/ICU capacity shapes mortality.
"""
from ._backend import DEFAULT_BACKEND, HAS_NUMBA
from .engine import (
    DailyRecord,
    Hazards,
    ScenarioConfig,
    TimeSeries,
    WorldState,
    effective_radius,
    init_world,
    run,
    step,
)
from .fuzzy import (
    FuzzyRule,
    LinguisticVariable,
    MembershipFunction,
    RuleBase,
    SeverityDegrees,
    crisp_severity,
    default_rule_base,
    infer_severity,
    membership_degree,
)
from .metrics import ComparisonReport, RunSummary, compare, summarize
from .population import DemographicConfig, population_summary, sample_population

__version__ = "0.1.0"
