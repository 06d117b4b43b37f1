"""Run summaries and simulated-vs-observed incidence comparison."""
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np


@dataclass(frozen=True)
class RunSummary:
    attack_rate: float
    cfr: float
    peak_day: int
    peak_active: int
    peak_new: int
    icu_overflow_days: int


@dataclass(frozen=True)
class ComparisonReport:
    rmse: float
    mae: float
    peak_day_offset: int
    truncation_day: Optional[int] = None
    n_days: int = 0


def summarize(series, n_agents=None, icu_beds=None) -> RunSummary:
    """Summary of a TimeSeries (or a list of DailyRecord with explicit sizes).

    CFR is deaths over ever-infected, and 0 when nobody was infected.
    """
    records = list(series)
    if not records:
        raise ValueError("cannot summarize an empty series")
    n_agents = getattr(series, "n_agents", None) if n_agents is None else n_agents
    icu_beds = getattr(series, "icu_beds", None) if icu_beds is None else icu_beds
    if n_agents is None or icu_beds is None:
        raise ValueError("n_agents and icu_beds are required for a plain record list")
    last = records[-1]
    ever = n_agents - last.susceptible
    active = np.array([r.infected for r in records])
    days = np.array([r.day for r in records])
    peak = int(np.argmax(active))
    return RunSummary(
        attack_rate=ever / n_agents,
        cfr=last.dead / ever if ever > 0 else 0.0,
        peak_day=int(days[peak]),
        peak_active=int(active[peak]),
        peak_new=int(max(r.new_infections for r in records)),
        icu_overflow_days=int(sum(r.icu_demand > icu_beds for r in records)),
    )


def compare(
    simulated: Sequence[float],
    observed: Sequence[float],
    truncate_at: Optional[int] = None,
    start_day: int = 0,
) -> ComparisonReport:
    """Error of a simulated daily series against an observed one.

    Both series start at ``start_day``. With ``truncate_at`` only days
    strictly before it are compared. Peaks are taken on the compared support,
    earliest day on ties.
    """
    sim = np.asarray(simulated, dtype=np.float64)
    obs = np.asarray(observed, dtype=np.float64)
    if sim.size == 0 or obs.size == 0:
        raise ValueError("compare needs two non-empty series")
    n = min(sim.size, obs.size)
    if truncate_at is not None:
        n = min(n, truncate_at - start_day)
    if n <= 0:
        raise ValueError("series do not overlap on the compared days")
    sim, obs = sim[:n], obs[:n]
    err = sim - obs
    return ComparisonReport(
        rmse=float(np.sqrt(np.mean(err * err))),
        mae=float(np.mean(np.abs(err))),
        peak_day_offset=int(np.argmax(sim)) - int(np.argmax(obs)),
        truncation_day=truncate_at,
        n_days=int(n),
    )


def smoothed(values, window=7):
    """Centred moving average over complete windows only."""
    v = np.asarray(values, dtype=np.float64)
    if v.size < window:
        return v.copy()
    return np.convolve(v, np.ones(window) / window, mode="valid")


def is_unimodal(values, window=7):
    """True when the smoothed curve never falls before its peak nor rises after it."""
    s = smoothed(values, window)
    k = int(np.argmax(s))
    d = np.diff(s)
    return bool(np.all(d[:k] >= 0) and np.all(d[k:] <= 0))
