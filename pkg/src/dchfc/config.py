"""Simulation configuration: defaults, INI loading, ``section.key=value`` overrides."""
from __future__ import annotations

import configparser
import dataclasses
import json
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Mapping

from .election import ElectionConfig
from .fuzzy import DEFAULT_INPUT_BREAKPOINTS, DEFAULT_OUTPUT_BREAKPOINTS, DEFAULT_RESOLUTION, RuleBase
from .topology import ConfigError
from .trust import TrustConfig


@dataclass(frozen=True)
class EnergyModel:
    e_elec: float = 50e-9
    eps_amp: float = 10e-12
    packet_bits: int = 2000
    initial_energy: float = 0.5
    # per scored node per round, CHUFL mode only (emulates in-network fuzzy computation)
    fuzzy_cost: float = 0.0

    def __post_init__(self):
        for name in ("e_elec", "eps_amp", "packet_bits", "initial_energy"):
            if getattr(self, name) <= 0:
                raise ConfigError(f"energy.{name} must be positive")
        if self.fuzzy_cost < 0:
            raise ConfigError("energy.fuzzy_cost must be >= 0")


@dataclass(frozen=True)
class FuzzyConfig:
    rulebase_path: str | None = None
    resolution: int = DEFAULT_RESOLUTION
    input_terms: Mapping[str, tuple[float, ...]] = field(default_factory=lambda: dict(DEFAULT_INPUT_BREAKPOINTS))
    output_terms: Mapping[str, tuple[float, ...]] = field(default_factory=lambda: dict(DEFAULT_OUTPUT_BREAKPOINTS))

    def __post_init__(self):
        if self.resolution < 3:
            raise ConfigError("fuzzy.resolution must be >= 3")

    def rulebase(self) -> RuleBase:
        from .fuzzy import FuzzyError, default_rulebase, load_rule_table

        try:
            return default_rulebase(
                load_rule_table(self.rulebase_path), self.input_terms, self.output_terms, self.resolution
            )
        except (FuzzyError, OSError) as exc:
            raise ConfigError(f"fuzzy: {exc}") from exc


@dataclass(frozen=True)
class SimConfig:
    node_count: int = 122
    field_width: float = 1000.0
    field_height: float = 1000.0
    tx_range: float = 250.0
    sink_x: float = 500.0
    sink_y: float = 500.0
    malicious_count: int = 13
    max_rounds: int = 5000
    seed: int = 1
    seeds: tuple[int, ...] = tuple(range(1, 21))
    trust: TrustConfig = field(default_factory=TrustConfig)
    election: ElectionConfig = field(default_factory=ElectionConfig)
    energy: EnergyModel = field(default_factory=EnergyModel)
    fuzzy: FuzzyConfig = field(default_factory=FuzzyConfig)

    def __post_init__(self):
        if self.node_count < 2:
            raise ConfigError("network.node_count must be >= 2")
        if self.field_width <= 0 or self.field_height <= 0:
            raise ConfigError("network field dimensions must be positive")
        if self.tx_range <= 0:
            raise ConfigError("network.tx_range must be positive")
        if not (0 <= self.sink_x <= self.field_width and 0 <= self.sink_y <= self.field_height):
            raise ConfigError("network sink position must lie inside the field")
        if not 0 <= self.malicious_count < self.node_count:
            raise ConfigError(
                f"network.malicious_count ({self.malicious_count}) must be in [0, node_count={self.node_count})"
            )
        if self.max_rounds < 0:
            raise ConfigError("run.max_rounds must be >= 0")
        if not self.seeds:
            raise ConfigError("run.seeds must list at least one seed")

    def replace(self, **changes) -> "SimConfig":
        return dataclasses.replace(self, **changes)

    def to_dict(self) -> dict[str, dict[str, Any]]:
        """Sectioned view of every resolved value."""
        out: dict[str, dict[str, Any]] = {}
        for section, (owner, keys) in _SECTIONS.items():
            obj = self if owner is None else getattr(self, owner)
            out[section] = {k: _jsonable(getattr(obj, k)) for k in keys}
        out["fuzzy"].update({t.lower(): list(v) for t, v in self.fuzzy.input_terms.items()})
        out["fuzzy"].update({"potential_" + t.lower(): list(v) for t, v in self.fuzzy.output_terms.items()})
        return out

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)


def _jsonable(v):
    return list(v) if isinstance(v, tuple) else v


# section -> (attribute on SimConfig holding the sub-config or None, scalar keys)
_SECTIONS: dict[str, tuple[str | None, tuple[str, ...]]] = {
    "network": (None, ("node_count", "field_width", "field_height", "tx_range", "sink_x", "sink_y", "malicious_count")),
    "run": (None, ("max_rounds", "seed", "seeds")),
    "trust": ("trust", ("x", "ttf", "warmup_rounds")),
    "election": ("election", ("p_initial", "d_threshold", "chufl_head_pct", "rounding", "strict_initial_spacing")),
    "energy": ("energy", ("e_elec", "eps_amp", "packet_bits", "initial_energy", "fuzzy_cost")),
    "fuzzy": ("fuzzy", ("rulebase_path", "resolution")),
}


def _coerce(section: str, key: str, raw: str, template: Any):
    raw = raw.strip()
    try:
        if isinstance(template, bool):
            low = raw.lower()
            if low in ("1", "true", "yes", "on"):
                return True
            if low in ("0", "false", "no", "off"):
                return False
            raise ValueError(raw)
        if isinstance(template, int):
            return int(raw)
        if isinstance(template, float):
            return float(raw)
        if isinstance(template, tuple):
            return tuple(int(s) for s in raw.replace(",", " ").split())
        if template is None or isinstance(template, str):
            return None if raw.lower() in ("", "none") else raw
    except ValueError:
        raise ConfigError(f"{section}.{key}: cannot parse {raw!r}") from None
    raise ConfigError(f"{section}.{key}: unsupported value {raw!r}")


def _parse_breakpoints(section: str, key: str, raw: str) -> tuple[float, ...]:
    try:
        vals = tuple(float(s) for s in raw.replace(",", " ").split())
    except ValueError:
        raise ConfigError(f"{section}.{key}: breakpoints must be numbers") from None
    if len(vals) != 4:
        raise ConfigError(f"{section}.{key}: expected four breakpoints a,b,c,d")
    return vals


def build_config(values: Mapping[str, Mapping[str, str]], base: SimConfig | None = None) -> SimConfig:
    """Apply string ``{section: {key: value}}`` settings on top of ``base``.

    Unknown sections or keys raise :class:`ConfigError`.
    """
    base = base or SimConfig()
    top: dict[str, Any] = {}
    sub: dict[str, dict[str, Any]] = {}
    input_terms = dict(base.fuzzy.input_terms)
    output_terms = dict(base.fuzzy.output_terms)
    for section, items in values.items():
        if section not in _SECTIONS:
            raise ConfigError(f"unknown section [{section}]")
        owner, keys = _SECTIONS[section]
        obj = base if owner is None else getattr(base, owner)
        for key, raw in items.items():
            if section == "fuzzy" and key not in keys:
                lowered = {t.lower(): t for t in input_terms}
                outs = {"potential_" + t.lower(): t for t in output_terms}
                if key in lowered:
                    input_terms[lowered[key]] = _parse_breakpoints(section, key, raw)
                    continue
                if key in outs:
                    output_terms[outs[key]] = _parse_breakpoints(section, key, raw)
                    continue
            if key not in keys:
                raise ConfigError(f"unknown key {section}.{key}")
            val = _coerce(section, key, raw, getattr(obj, key))
            if owner is None:
                top[key] = val
            else:
                sub.setdefault(owner, {})[key] = val

    sub.setdefault("fuzzy", {}).update(input_terms=input_terms, output_terms=output_terms)
    for owner, changes in sub.items():
        top[owner] = dataclasses.replace(getattr(base, owner), **changes)
    return dataclasses.replace(base, **top)


def parse_overrides(pairs: list[str]) -> dict[str, dict[str, str]]:
    """Turn ``["trust.x=0.8", "node_count=50"]`` into sectioned settings.

    A bare key is resolved against the network and run sections.
    """
    out: dict[str, dict[str, str]] = {}
    for pair in pairs:
        if "=" not in pair:
            raise ConfigError(f"override {pair!r} is not of the form key=value")
        key, value = pair.split("=", 1)
        key = key.strip().lstrip("-")
        if "." in key:
            section, key = key.split(".", 1)
        else:
            section = next((s for s in ("network", "run") if key in _SECTIONS[s][1]), None)
            if section is None:
                raise ConfigError(f"unknown key {key!r}; use section.key")
        out.setdefault(section, {})[key] = value
    return out


def _key_line(text: str, section: str, key: str | None) -> int | None:
    current = None
    for lineno, line in enumerate(text.splitlines(), 1):
        s = line.strip()
        if s.startswith("[") and s.endswith("]"):
            current = s[1:-1].strip()
            if key is None and current == section:
                return lineno
        elif current == section and key and s.split("=", 1)[0].split(":", 1)[0].strip() == key:
            return lineno
    return None


def load_config(path: str | Path | None = None, overrides: list[str] | None = None) -> SimConfig:
    """Read an INI file (optional) and apply command-line style overrides.

    Validation errors from the file carry ``path:line`` context.
    """
    cfg = SimConfig()
    if path is not None:
        path = Path(path)
        try:
            text = path.read_text()
        except OSError as exc:
            raise ConfigError(f"{path}: {exc.strerror or exc}") from exc
        parser = configparser.ConfigParser(interpolation=None)
        parser.optionxform = str
        try:
            parser.read_string(text, source=str(path))
        except configparser.Error as exc:
            raise ConfigError(str(exc)) from exc
        values = {s: dict(parser.items(s)) for s in parser.sections()}
        try:
            cfg = build_config(values, cfg)
        except ConfigError as exc:
            line = None
            m = re.search(r"\[(\w+)\]|(\w+)\.(\w+)", str(exc))
            if m:
                line = _key_line(text, m.group(1), None) if m.group(1) else _key_line(text, m.group(2), m.group(3))
            where = f"{path}:{line}" if line else str(path)
            raise ConfigError(f"{where}: {exc}") from None
    if overrides:
        cfg = build_config(parse_overrides(overrides), cfg)
    return cfg


def write_config(cfg: SimConfig, path: str | Path) -> None:
    parser = configparser.ConfigParser(interpolation=None)
    parser.optionxform = str
    for section, items in cfg.to_dict().items():
        parser[section] = {
            k: "none" if v is None else ", ".join(map(str, v)) if isinstance(v, list) else str(v)
            for k, v in items.items()
        }
    with open(path, "w") as fh:
        parser.write(fh)
