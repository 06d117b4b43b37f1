"""Scenario configuration files.

INI-style text, one section per concern::

    [scenario]      population, world, transmission, recovery, beds, seed
    [hazards]       per-day death probabilities
    [demographics]  age groups, BMI and fragility distributions
    [fuzzy]         operators, universes and trapezoid breakpoints
    [rules]         severity rules; when present they replace the defaults
    [output]        svg = yes|no

Every key is optional and falls back to the built-in default. Unknown
sections and keys are errors. See ``configs/baseline.ini`` for all keys.
"""
import configparser
import re
from dataclasses import dataclass, fields, replace
from pathlib import Path

from .engine import Hazards, ScenarioConfig
from .fuzzy import FuzzyRule, RuleBase, make_variable
from .population import DemographicConfig


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class OutputOptions:
    svg: bool = False


INT_FIELDS = ("n_agents", "initial_infected", "hospital_beds", "icu_beds", "max_days", "seed")
FLOAT_FIELDS = (
    "beta", "base_radius", "variant_factor", "move_speed", "wiggle",
    "mean_recovery_days", "recovery_sd_days", "fragility_weight",
)
SCENARIO_KEYS = INT_FIELDS + FLOAT_FIELDS + ("width", "height", "variant_mode")
HAZARD_KEYS = tuple(f.name for f in fields(Hazards))
DEMOGRAPHIC_KEYS = (
    "proportions", "young_ages", "adult_ages", "elderly_ages",
    "bmi_mean", "bmi_sd", "fragility_alpha", "fragility_beta",
)
SWEEPABLE = INT_FIELDS[:-1] + FLOAT_FIELDS + ("width", "height") + HAZARD_KEYS

_RULE_RE = re.compile(r"^(?P<lhs>.+?)\s*->\s*(?P<rhs>\w+)$")


def _num(section, key, raw, kind=float):
    if kind is int:
        try:
            return int(raw.strip())
        except ValueError:
            pass
    try:
        v = float(raw)
    except ValueError:
        raise ConfigError(f"[{section}] {key}: expected a number, got {raw!r}") from None
    if kind is int:
        if v != int(v):
            raise ConfigError(f"[{section}] {key}: expected an integer, got {raw!r}")
        return int(v)
    return v


def _nums(section, key, raw, n=None):
    parts = [p.strip() for p in raw.split(",") if p.strip()]
    vals = [_num(section, key, p) for p in parts]
    if n is not None and len(vals) != n:
        raise ConfigError(f"[{section}] {key}: expected {n} comma-separated numbers, got {raw!r}")
    return vals


def _check_keys(parser, section, allowed):
    for key in parser[section]:
        if key not in allowed:
            raise ConfigError(f"[{section}] unknown key {key!r}")


def _parse_fuzzy(parser):
    from .fuzzy import default_rule_base

    base = default_rule_base()
    t_norm, s_norm = base.t_norm, base.s_norm
    universes = {name: var.universe for name, var in base.variables.items()}
    labels = {
        name: {k: (mf.a, mf.b, mf.c, mf.d) for k, mf in var.labels.items()}
        for name, var in base.variables.items()
    }
    if parser.has_section("fuzzy"):
        sec = parser["fuzzy"]
        for key, raw in sec.items():
            if key == "t_norm":
                t_norm = raw.strip()
            elif key == "s_norm":
                s_norm = raw.strip()
            else:
                var, _, label = key.partition(".")
                if var not in universes or not label:
                    raise ConfigError(f"[fuzzy] unknown key {key!r}")
                if label == "universe":
                    universes[var] = tuple(_nums("fuzzy", key, raw, 2))
                else:
                    labels[var][label] = tuple(_nums("fuzzy", key, raw, 4))
    rules = base.rules
    if parser.has_section("rules") and len(parser["rules"]):
        rules = []
        for name, raw in parser["rules"].items():
            m = _RULE_RE.match(raw.strip())
            if not m:
                raise ConfigError(f"[rules] {name}: expected 'var.label and ... -> severity', got {raw!r}")
            atoms = []
            for atom in re.split(r"\s+and\s+", m["lhs"].strip()):
                var, _, label = atom.strip().partition(".")
                if not label:
                    raise ConfigError(f"[rules] {name}: malformed atom {atom!r}")
                atoms.append((var, label))
            try:
                rules.append(FuzzyRule(tuple(atoms), m["rhs"]))
            except ValueError as exc:
                raise ConfigError(f"[rules] {name}: {exc}") from None
        rules = tuple(rules)
    try:
        variables = {name: make_variable(name, universes[name], labels[name]) for name in universes}
        return RuleBase(variables, rules, t_norm, s_norm)
    except ValueError as exc:
        raise ConfigError(f"[fuzzy] {exc}") from None


def parse_config(text, source="<config>"):
    """Parse config text into ``(ScenarioConfig, OutputOptions)``."""
    parser = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=("#",))
    parser.optionxform = str
    try:
        parser.read_string(text, source=source)
    except configparser.Error as exc:
        raise ConfigError(f"{source}: {exc}") from None
    known = {"scenario", "hazards", "demographics", "fuzzy", "rules", "output"}
    for section in parser.sections():
        if section not in known:
            raise ConfigError(f"unknown section [{section}]")

    kw = {}
    if parser.has_section("scenario"):
        _check_keys(parser, "scenario", SCENARIO_KEYS)
        sec = parser["scenario"]
        for key in INT_FIELDS:
            if key in sec:
                kw[key] = _num("scenario", key, sec[key], int)
        for key in FLOAT_FIELDS:
            if key in sec:
                kw[key] = _num("scenario", key, sec[key])
        if "variant_mode" in sec:
            kw["variant_mode"] = sec["variant_mode"].strip()
        if "width" in sec or "height" in sec:
            w, h = ScenarioConfig.world
            kw["world"] = (
                _num("scenario", "width", sec.get("width", str(w))),
                _num("scenario", "height", sec.get("height", str(h))),
            )
    if parser.has_section("hazards"):
        _check_keys(parser, "hazards", HAZARD_KEYS)
        kw["hazards"] = Hazards(**{k: _num("hazards", k, v) for k, v in parser["hazards"].items()})
    if parser.has_section("demographics"):
        _check_keys(parser, "demographics", DEMOGRAPHIC_KEYS)
        sec = parser["demographics"]
        dkw = {}
        if "proportions" in sec:
            dkw["group_proportions"] = tuple(_nums("demographics", "proportions", sec["proportions"], 3))
        ranges = list(DemographicConfig.group_age_ranges)
        for i, key in enumerate(("young_ages", "adult_ages", "elderly_ages")):
            if key in sec:
                lo, hi = _nums("demographics", key, sec[key], 2)
                ranges[i] = (int(lo), int(hi))
        dkw["group_age_ranges"] = tuple(ranges)
        for key in ("bmi_mean", "bmi_sd", "fragility_alpha", "fragility_beta"):
            if key in sec:
                dkw[key] = _num("demographics", key, sec[key])
        try:
            kw["demographics"] = DemographicConfig(**dkw)
        except ValueError as exc:
            raise ConfigError(f"[demographics] {exc}") from None
    if parser.has_section("fuzzy") or parser.has_section("rules"):
        kw["rule_base"] = _parse_fuzzy(parser)
    out = OutputOptions()
    if parser.has_section("output"):
        _check_keys(parser, "output", ("svg",))
        try:
            out = OutputOptions(svg=parser["output"].getboolean("svg", fallback=False))
        except ValueError:
            raise ConfigError(f"[output] svg: expected yes/no, got {parser['output']['svg']!r}") from None
    try:
        cfg = ScenarioConfig(**kw)
    except ValueError as exc:
        raise ConfigError(f"[scenario] {exc}") from None
    return cfg, out


def load_config(path):
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc.strerror}") from None
    return parse_config(text, source=str(path))


def override(cfg: ScenarioConfig, name, value):
    """Return ``cfg`` with one sweepable numeric parameter replaced."""
    if name not in SWEEPABLE:
        raise ConfigError(f"unknown sweep parameter {name!r}; choose from {', '.join(SWEEPABLE)}")
    if name in HAZARD_KEYS:
        return replace(cfg, hazards=replace(cfg.hazards, **{name: float(value)}))
    if name in ("width", "height"):
        w, h = cfg.world
        return replace(cfg, world=(float(value), h) if name == "width" else (w, float(value)))
    if name in INT_FIELDS:
        if float(value) != int(float(value)):
            raise ConfigError(f"parameter {name} needs integer values, got {value!r}")
        value = int(float(value))
    else:
        value = float(value)
    return replace(cfg, **{name: value})
