"""Day-stepped simulation: move, index, transmit, allocate beds, progress.

All draws come from :mod:`epifuzz.rng` keyed by (seed, day, agent), so a run
is reproducible regardless of worker count.
"""
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, fields, replace
from typing import List, Optional, Tuple

import numpy as np

from . import kernels
from ._backend import resolve_backend
from .fuzzy import CRITICAL, SEVERE, SEVERITIES, RuleBase, classify, default_rule_base
from .population import (
    DEAD,
    HOSPITAL_BED,
    ICU_BED,
    INFECTED,
    NO_CARE,
    RECOVERED,
    DemographicConfig,
    Population,
    sample_population,
)
from .rng import TAG_DEATH, TAG_MOVE, TAG_TRANSMIT, day_key, truncated_normal_days, uniform_from_key
from .spatial import GridIndex, TorusWorld, rebuild_index

VARIANT_MODES = ("radius", "beta")


@dataclass(frozen=True)
class Hazards:
    """Per-day death probabilities by severity and care status (mild is always 0)."""

    severe_in_bed: float = 0.0002
    severe_no_bed: float = 0.0008
    critical_in_icu: float = 0.001
    critical_no_icu: float = 0.003

    def table(self):
        # rows: severity code; columns: care code (none, hospital, icu)
        return np.array(
            [
                [0.0, 0.0, 0.0],
                [self.severe_no_bed, self.severe_in_bed, self.severe_no_bed],
                [self.critical_no_icu, self.critical_no_icu, self.critical_in_icu],
            ]
        )


@dataclass(frozen=True)
class ScenarioConfig:
    n_agents: int = 20000
    world: Tuple[float, float] = (200.0, 200.0)
    initial_infected: int = 10
    beta: float = 0.08
    base_radius: float = 2.0
    variant_factor: float = 1.0
    variant_mode: str = "radius"
    move_speed: float = 1.5
    wiggle: float = math.pi / 4
    mean_recovery_days: float = 25.0
    recovery_sd_days: float = 5.0
    hospital_beds: int = 80
    icu_beds: int = 8
    hazards: Hazards = Hazards()
    max_days: int = 365
    seed: int = 1
    fragility_weight: float = 0.0
    demographics: DemographicConfig = DemographicConfig()
    rule_base: RuleBase = field(default_factory=default_rule_base)

    def __post_init__(self):
        problems = []
        if self.n_agents < 1:
            problems.append(f"n_agents must be >= 1 (got {self.n_agents})")
        if not 0 <= self.initial_infected <= self.n_agents:
            problems.append(f"initial_infected must be in [0, n_agents] (got {self.initial_infected})")
        if not 0.0 <= self.beta <= 1.0:
            problems.append(f"beta must be in [0, 1] (got {self.beta})")
        if not self.base_radius > 0:
            problems.append(f"base_radius must be positive (got {self.base_radius})")
        if not self.variant_factor >= 1.0:
            problems.append(f"variant_factor must be >= 1 (got {self.variant_factor})")
        if self.variant_mode not in VARIANT_MODES:
            problems.append(f"variant_mode must be one of {VARIANT_MODES} (got {self.variant_mode!r})")
        if not self.mean_recovery_days > 0:
            problems.append(f"mean_recovery_days must be positive (got {self.mean_recovery_days})")
        if self.recovery_sd_days < 0:
            problems.append(f"recovery_sd_days must be >= 0 (got {self.recovery_sd_days})")
        if self.hospital_beds < 0 or self.icu_beds < 0:
            problems.append("bed counts must be >= 0")
        if self.max_days < 0:
            problems.append(f"max_days must be >= 0 (got {self.max_days})")
        if self.move_speed < 0 or self.wiggle < 0:
            problems.append("move_speed and wiggle must be >= 0")
        if self.fragility_weight < 0:
            problems.append(f"fragility_weight must be >= 0 (got {self.fragility_weight})")
        if not 0 <= int(self.seed) < 2**64:
            problems.append(f"seed must be an unsigned 64-bit integer (got {self.seed})")
        for f in fields(Hazards):
            v = getattr(self.hazards, f.name)
            if not 0.0 <= v <= 1.0:
                problems.append(f"hazards.{f.name} must be in [0, 1] (got {v})")
        if problems:
            raise ValueError("; ".join(problems))
        TorusWorld(*self.world)

    @property
    def radius(self):
        """Transmissibility-zone radius used for exposure queries."""
        if self.variant_mode == "radius":
            return effective_radius(self.base_radius, self.variant_factor)
        return self.base_radius

    @property
    def contact_beta(self):
        if self.variant_mode == "beta":
            return min(1.0, self.beta * self.variant_factor)
        return self.beta

    def with_overrides(self, **kw):
        return replace(self, **kw)


def effective_radius(base_radius, variant_factor):
    """Radius whose disc area is ``variant_factor`` times the base disc."""
    if variant_factor < 1.0:
        raise ValueError(f"variant factor must be >= 1, got {variant_factor}")
    return base_radius * math.sqrt(variant_factor)


@dataclass(frozen=True)
class DailyRecord:
    day: int
    susceptible: int
    infected: int
    recovered: int
    dead: int
    new_infections: int
    hospital_occupancy: int
    icu_occupancy: int
    icu_demand: int


RECORD_FIELDS = tuple(f.name for f in fields(DailyRecord))


@dataclass
class TimeSeries:
    records: List[DailyRecord]
    n_agents: int
    icu_beds: int
    hospital_beds: int
    seed: Optional[int] = None

    def __len__(self):
        return len(self.records)

    def __iter__(self):
        return iter(self.records)

    def __getitem__(self, i):
        return self.records[i]

    def column(self, name):
        return np.array([getattr(r, name) for r in self.records], dtype=np.int64)


_executors = {}


def _executor(workers):
    if workers not in _executors:
        _executors[workers] = ThreadPoolExecutor(max_workers=workers, thread_name_prefix="epifuzz")
    return _executors[workers]


def _ranges(n, workers):
    bounds = np.linspace(0, n, workers + 1).astype(np.int64)
    return [(int(a), int(b)) for a, b in zip(bounds[:-1], bounds[1:]) if b > a]


@dataclass
class WorldState:
    config: ScenarioConfig
    pop: Population
    latent_severity: np.ndarray
    index: GridIndex
    day: int = 0
    last_record: Optional[DailyRecord] = None
    backend: str = "numba"
    workers: int = 1

    @property
    def n_agents(self):
        return len(self.pop)

    @property
    def seed(self):
        return int(self.config.seed)

    def agent(self, i):
        return self.pop.agent(i)

    def counts(self):
        return np.bincount(self.pop.state, minlength=4)

    def copy(self):
        return replace(self, pop=self.pop.copy(), index=_copy_index(self.index))

    def finished(self):
        return self.day >= self.config.max_days or not np.any(self.pop.state == INFECTED)

    def _map(self, fn, n):
        parts = _ranges(n, self.workers)
        if self.workers == 1 or len(parts) == 1:
            for lo, hi in parts:
                fn(lo, hi)
        else:
            list(_executor(self.workers).map(lambda r: fn(*r), parts))


def _copy_index(idx):
    return replace(idx, positions=idx.positions.copy())


def _cell_size(cfg):
    # a hair above the zone radius so floor() rounding at cell borders can never hide a neighbour
    return cfg.radius * (1.0 + 1e-9)


def init_world(cfg: ScenarioConfig, backend=None, workers=1) -> WorldState:
    """Sample the population, seed the first ``initial_infected`` ids, build the index."""
    if workers < 1:
        raise ValueError(f"workers must be >= 1, got {workers}")
    pop = sample_population(cfg.demographics, cfg.n_agents, np.random.default_rng(int(cfg.seed)), cfg.world)
    latent = classify(cfg.rule_base, pop.age, pop.bmi)
    state = WorldState(
        config=cfg,
        pop=pop,
        latent_severity=latent,
        index=None,
        backend=resolve_backend(backend),
        workers=int(workers),
    )
    seeds = np.arange(cfg.initial_infected)
    _infect(state, seeds, 0)
    state.index = rebuild_index(pop.position.copy(), _cell_size(cfg), cfg.world, alive=pop.state != DEAD)
    state.last_record = _record(state, len(seeds))
    return state


def assign_severity(state: WorldState, ids, day):
    """Set severity (crisp fuzzy class) and a recovery duration for ``ids``."""
    cfg = state.config
    ids = np.asarray(ids, dtype=np.int64)
    state.pop.severity[ids] = state.latent_severity[ids]
    state.pop.recovery_duration[ids] = truncated_normal_days(
        cfg.seed, day, ids, cfg.mean_recovery_days, cfg.recovery_sd_days
    )


def _infect(state, ids, day):
    pop = state.pop
    pop.state[ids] = INFECTED
    pop.infection_day[ids] = day
    assign_severity(state, ids, day)


def move_agents(state: WorldState, day=None):
    cfg = state.config
    day = state.day + 1 if day is None else day
    pop = state.pop
    key = day_key(cfg.seed, day, TAG_MOVE)
    w, h = cfg.world
    if state.backend == "numba":
        state._map(
            lambda lo, hi: kernels.move_nb(
                pop.position, pop.heading, pop.state, pop.care, key,
                float(cfg.move_speed), float(cfg.wiggle), float(w), float(h), lo, hi,
            ),
            len(pop),
        )
    else:
        kernels.move_np(pop.position, pop.heading, pop.state, pop.care, key, cfg.move_speed, cfg.wiggle, w, h)
    return state


def infection_probabilities(state: WorldState):
    cfg = state.config
    return np.minimum(1.0, cfg.contact_beta * (1.0 + cfg.fragility_weight * state.pop.fragility))


def infectious_mask(state: WorldState):
    """Infected agents outside hospital/ICU care."""
    return (state.pop.state == INFECTED) & (state.pop.care == NO_CARE)


def collect_exposures(state: WorldState, day=None):
    """Phase 1 of transmission on a frozen snapshot.

    Returns ``(infected_by, n_exposures)``: per agent, the lowest-id infector
    whose draw succeeded (-1 if none) and the number of successful exposures.
    """
    cfg = state.config
    day = state.day + 1 if day is None else day
    pop = state.pop
    idx = state.index
    key = day_key(cfg.seed, day, TAG_TRANSMIT)
    infectious = infectious_mask(state)
    p = infection_probabilities(state)
    radius = cfg.radius
    if state.backend == "numba":
        n = len(pop)
        infected_by = np.empty(n, dtype=np.int64)
        n_exposures = np.empty(n, dtype=np.int64)
        w, h = idx.world.width, idx.world.height
        state._map(
            lambda lo, hi: kernels.exposures_nb(
                idx.positions, pop.state, infectious, p, idx.order, idx.starts, idx.ncx, idx.ncy,
                idx.cell_size, idx.shifts_x, idx.shifts_y, w, h, radius, key, lo, hi,
                infected_by, n_exposures,
            ),
            n,
        )
        return infected_by, n_exposures
    return kernels.exposures_np(idx, pop.state, infectious, p, radius, key)


def transmit(state: WorldState, day=None):
    """Collect exposures, then infect every susceptible with at least one success."""
    day = state.day + 1 if day is None else day
    infected_by, _ = collect_exposures(state, day)
    new = np.flatnonzero(infected_by >= 0)
    _infect(state, new, day)
    return state, int(new.size)


def allocate_care(state: WorldState):
    """First-come-first-served beds by (infection_day, id); beds are kept until discharge."""
    cfg = state.config
    pop = state.pop
    infected = pop.state == INFECTED
    for sev, care_code, beds in ((CRITICAL, ICU_BED, cfg.icu_beds), (SEVERE, HOSPITAL_BED, cfg.hospital_beds)):
        free = beds - int(np.count_nonzero(pop.care == care_code))
        if free <= 0:
            continue
        waiting = np.flatnonzero(infected & (pop.severity == sev) & (pop.care == NO_CARE))
        if waiting.size == 0:
            continue
        queue = waiting[np.lexsort((waiting, pop.infection_day[waiting]))]
        pop.care[queue[:free]] = care_code
    return state


def progress_disease(state: WorldState, day=None):
    """Death draw by (severity, care); survivors past their duration recover."""
    cfg = state.config
    day = state.day + 1 if day is None else day
    pop = state.pop
    inf = np.flatnonzero(pop.state == INFECTED)
    if inf.size == 0:
        return state
    hazard = cfg.hazards.table()[pop.severity[inf], pop.care[inf]]
    u = uniform_from_key(day_key(cfg.seed, day, TAG_DEATH), inf, 0)
    dies = u < hazard
    recovers = ~dies & (day - pop.infection_day[inf] >= pop.recovery_duration[inf])
    pop.state[inf[dies]] = DEAD
    pop.state[inf[recovers]] = RECOVERED
    pop.care[inf[dies | recovers]] = NO_CARE
    return state


def _record(state, new_infections):
    pop = state.pop
    s, i, r, d = (int(c) for c in state.counts())
    infected = pop.state == INFECTED
    return DailyRecord(
        day=state.day,
        susceptible=s,
        infected=i,
        recovered=r,
        dead=d,
        new_infections=int(new_infections),
        hospital_occupancy=int(np.count_nonzero(pop.care == HOSPITAL_BED)),
        icu_occupancy=int(np.count_nonzero(pop.care == ICU_BED)),
        icu_demand=int(np.count_nonzero(infected & (pop.severity == CRITICAL))),
    )


def step(state: WorldState):
    """Advance one day in place and return its record.

    A finished simulation (day limit reached or nobody infected) is left
    untouched and its last record is returned again.
    """
    if state.finished():
        return state, state.last_record
    cfg = state.config
    day = state.day + 1
    move_agents(state, day)
    state.index = rebuild_index(
        state.pop.position.copy(),
        _cell_size(cfg),
        cfg.world,
        alive=state.pop.state != DEAD,
        generation=state.index.generation + 1,
    )
    _, new = transmit(state, day)
    allocate_care(state)
    progress_disease(state, day)
    state.day = day
    state.last_record = _record(state, new)
    return state, state.last_record


def run(cfg: ScenarioConfig, backend=None, workers=1) -> TimeSeries:
    """Simulate until ``max_days`` or until no one is infected; includes day 0."""
    state = init_world(cfg, backend=backend, workers=workers)
    records = [state.last_record]
    while not state.finished():
        _, rec = step(state)
        records.append(rec)
    return TimeSeries(records, cfg.n_agents, cfg.icu_beds, cfg.hospital_beds, int(cfg.seed))


def severity_name(code):
    return SEVERITIES[code] if code >= 0 else None
