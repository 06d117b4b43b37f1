"""Synthetic population: age groups, BMI, socio-economic fragility."""
from dataclasses import dataclass, field
from typing import Optional, Tuple

import numpy as np

from .fuzzy import RuleBase, SEVERITIES, default_rule_base

# epidemic states
SUSCEPTIBLE, INFECTED, RECOVERED, DEAD = 0, 1, 2, 3
STATE_NAMES = ("Susceptible", "Infected", "Recovered", "Dead")

# care status
NO_CARE, HOSPITAL_BED, ICU_BED = 0, 1, 2
CARE_NAMES = ("None", "HospitalBed", "IcuBed")

AGE_GROUPS = ("young", "adult", "elderly")


@dataclass(frozen=True)
class DemographicConfig:
    group_proportions: Tuple[float, float, float] = (0.30, 0.45, 0.25)
    group_age_ranges: Tuple[Tuple[int, int], ...] = ((0, 29), (30, 59), (60, 100))
    bmi_mean: float = 26.5
    bmi_sd: float = 5.0
    fragility_alpha: float = 2.0
    fragility_beta: float = 5.0

    def __post_init__(self):
        props = tuple(float(p) for p in self.group_proportions)
        if len(props) != 3 or len(self.group_age_ranges) != 3:
            raise ValueError("need exactly three age groups (young, adult, elderly)")
        if any(p < 0 for p in props):
            raise ValueError(f"negative group proportion in {props}")
        if abs(sum(props) - 1.0) > 1e-9:
            raise ValueError(f"group proportions sum to {sum(props)!r}, not 1")
        for name, (lo, hi) in zip(AGE_GROUPS, self.group_age_ranges):
            if lo > hi:
                raise ValueError(f"empty age range for {name}: [{lo}, {hi}]")
        if not self.bmi_sd > 0 or not self.bmi_mean > 0:
            raise ValueError("bmi_mean and bmi_sd must be positive")
        if not (self.fragility_alpha > 0 and self.fragility_beta > 0):
            raise ValueError("fragility Beta shape parameters must be positive")

    def lognormal_params(self):
        """(mu, sigma) of the underlying normal for the configured BMI mean/sd."""
        sigma2 = np.log1p((self.bmi_sd / self.bmi_mean) ** 2)
        return float(np.log(self.bmi_mean) - sigma2 / 2), float(np.sqrt(sigma2))


@dataclass
class Agent:
    id: int
    age: int
    bmi: float
    fragility: float
    position: Tuple[float, float]
    heading: float
    state: str = "Susceptible"
    severity: Optional[str] = None
    infection_day: Optional[int] = None
    recovery_duration: Optional[int] = None
    care: str = "None"


@dataclass
class Population:
    """Structure-of-arrays agent table. ``agents()`` gives the record view."""

    age: np.ndarray
    bmi: np.ndarray
    fragility: np.ndarray
    position: np.ndarray
    heading: np.ndarray
    group: np.ndarray
    state: np.ndarray = field(default=None)
    severity: np.ndarray = field(default=None)
    infection_day: np.ndarray = field(default=None)
    recovery_duration: np.ndarray = field(default=None)
    care: np.ndarray = field(default=None)

    def __post_init__(self):
        n = len(self.age)
        if self.state is None:
            self.state = np.full(n, SUSCEPTIBLE, dtype=np.int8)
        if self.severity is None:
            self.severity = np.full(n, -1, dtype=np.int8)
        if self.infection_day is None:
            self.infection_day = np.full(n, -1, dtype=np.int64)
        if self.recovery_duration is None:
            self.recovery_duration = np.full(n, -1, dtype=np.int64)
        if self.care is None:
            self.care = np.full(n, NO_CARE, dtype=np.int8)

    def __len__(self):
        return len(self.age)

    def agent(self, i) -> Agent:
        infected_once = self.severity[i] >= 0
        return Agent(
            id=int(i),
            age=int(self.age[i]),
            bmi=float(self.bmi[i]),
            fragility=float(self.fragility[i]),
            position=(float(self.position[i, 0]), float(self.position[i, 1])),
            heading=float(self.heading[i]),
            state=STATE_NAMES[self.state[i]],
            severity=SEVERITIES[self.severity[i]] if infected_once else None,
            infection_day=int(self.infection_day[i]) if infected_once else None,
            recovery_duration=int(self.recovery_duration[i]) if infected_once else None,
            care=CARE_NAMES[self.care[i]],
        )

    def agents(self):
        return [self.agent(i) for i in range(len(self))]

    def copy(self):
        return Population(**{k: v.copy() for k, v in vars(self).items()})


def sample_population(cfg: DemographicConfig, n: int, rng, world=(200.0, 200.0)) -> Population:
    """Draw ``n`` susceptible agents; ids are positions in the returned arrays.

    ``rng`` is a seed or a ``numpy.random.Generator``. Draw order is fixed:
    group, age, BMI, fragility, position, heading.
    """
    if n < 1:
        raise ValueError(f"population size must be >= 1, got {n}")
    rng = np.random.default_rng(rng)
    width, height = world
    group = rng.choice(3, size=n, p=np.asarray(cfg.group_proportions, dtype=np.float64)).astype(np.int8)
    lo = np.array([r[0] for r in cfg.group_age_ranges], dtype=np.int64)[group]
    hi = np.array([r[1] for r in cfg.group_age_ranges], dtype=np.int64)[group]
    age = rng.integers(lo, hi + 1)
    mu, sigma = cfg.lognormal_params()
    bmi = np.clip(rng.lognormal(mu, sigma, size=n), 10.0, 60.0)
    fragility = rng.beta(cfg.fragility_alpha, cfg.fragility_beta, size=n)
    position = np.column_stack([rng.uniform(0.0, width, size=n), rng.uniform(0.0, height, size=n)])
    # uniform() can round up to the upper bound for huge worlds
    position[:, 0][position[:, 0] >= width] = 0.0
    position[:, 1][position[:, 1] >= height] = 0.0
    heading = rng.uniform(0.0, 2 * np.pi, size=n)
    return Population(age=age, bmi=bmi, fragility=fragility, position=position, heading=heading, group=group)


@dataclass(frozen=True)
class PopulationSummary:
    group_counts: Tuple[int, int, int]
    mean_age: float
    mean_bmi: float
    obese_fraction: float


def population_summary(pop, rule_base: Optional[RuleBase] = None) -> PopulationSummary:
    """Counts by fuzzy age group (argmax, ties go to the older group) and BMI stats.

    ``pop`` may be a Population or a list of Agent records.
    """
    if isinstance(pop, Population):
        age, bmi = pop.age, pop.bmi
    else:
        age = np.array([a.age for a in pop], dtype=np.float64)
        bmi = np.array([a.bmi for a in pop], dtype=np.float64)
    if len(age) == 0:
        raise ValueError("population_summary of an empty population")
    rb = rule_base or default_rule_base()
    age_var = rb.variables["age"]
    deg = age_var.degrees(age)
    labels = list(age_var.labels)
    crisp = deg.shape[-1] - 1 - np.argmax(deg[:, ::-1], axis=-1)
    counts = tuple(int(np.sum(crisp == labels.index(g))) if g in labels else 0 for g in AGE_GROUPS)
    obese = rb.variables["bmi"].degree("obese", bmi) >= 0.5
    return PopulationSummary(
        group_counts=counts,
        mean_age=float(np.mean(age)),
        mean_bmi=float(np.mean(bmi)),
        obese_fraction=float(np.mean(obese)),
    )
