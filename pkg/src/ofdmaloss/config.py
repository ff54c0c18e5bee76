"""Flat ``key = value`` scenario files.

Keys are the scenario field names; ``#`` starts a comment. Rates are
given per ``time_unit`` (``s`` or ``min``) and stored in SI. The bundled
configurations (``paper_sec3``, ``paper_sec4``, ``paper_sec5``) can be
named instead of a path.
"""

from importlib import resources
from pathlib import Path

from .model import (CellGeometry, RadioParams, Scenario, Shadowing, TrafficParams)

FLOAT_KEYS = ("gamma", "c0", "w", "p_ratio", "mean_gain", "beta_min", "rho", "nu",
              "radius", "mu_db", "sigma_db", "region_radius")
INT_KEYS = ("n_max",)
STR_KEYS = ("mode", "time_unit", "outage_policy", "association", "region")
KNOWN_KEYS = FLOAT_KEYS + INT_KEYS + STR_KEYS
REQUIRED = ("gamma", "c0", "w", "p_ratio", "rho", "nu", "radius")
TIME_UNITS = {"s": 1.0, "min": 60.0, "h": 3600.0}
BUNDLED = ("paper_sec3", "paper_sec4", "paper_sec5")


class ConfigError(ValueError):
    pass


def parse_config(text: str, source: str = "<string>") -> dict:
    values = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{source}:{lineno}: expected 'key = value'")
        key, value = (part.strip() for part in line.split("=", 1))
        if key not in KNOWN_KEYS:
            raise ConfigError(f"{source}:{lineno}: unknown key {key!r}")
        try:
            if key in FLOAT_KEYS:
                values[key] = float(value)
            elif key in INT_KEYS:
                values[key] = int(value)
            else:
                values[key] = value
        except ValueError:
            raise ConfigError(f"{source}:{lineno}: bad value for {key}: {value!r}") from None
    return values


def bundled_path(name: str):
    return resources.files("ofdmaloss").joinpath("configs", f"{name}.cfg")


def bundled_layout_path():
    return resources.files("ofdmaloss").joinpath("configs", "hex_layout.txt")


def read_config_text(path_or_name) -> tuple:
    if str(path_or_name) in BUNDLED:
        p = bundled_path(str(path_or_name))
        return p.read_text(), str(path_or_name)
    p = Path(path_or_name)
    if not p.is_file():
        raise ConfigError(f"config file not found: {p}")
    return p.read_text(), str(p)


def scenario_from_values(values: dict) -> Scenario:
    missing = [k for k in REQUIRED if k not in values]
    if missing:
        raise ConfigError(f"missing keys: {', '.join(missing)}")
    unit = values.get("time_unit", "s")
    if unit not in TIME_UNITS:
        raise ConfigError(f"time_unit must be one of {sorted(TIME_UNITS)}")
    per_second = 1.0 / TIME_UNITS[unit]
    try:
        radio = RadioParams(
            gamma=values["gamma"], c0=values["c0"], w=values["w"], p_ratio=values["p_ratio"],
            mean_gain=values.get("mean_gain", 1.0), beta_min=values.get("beta_min", 0.0),
            n_max=values.get("n_max"),
        )
        traffic = TrafficParams(values["rho"] * per_second, values["nu"] * per_second)
        shadowing = None
        if "mu_db" in values or "sigma_db" in values:
            shadowing = Shadowing(values.get("mu_db", 0.0), values.get("sigma_db", 0.0))
        return Scenario(radio, traffic, CellGeometry(values["radius"]), shadowing,
                        mode=values.get("mode", "deterministic"),
                        outage_policy=values.get("outage_policy", "clamp_to_nmax"))
    except ValueError as exc:
        raise ConfigError(str(exc)) from None


def load_scenario(path_or_name):
    """Scenario from a file or bundled name.

    Multicell configs yield a :class:`~ofdmaloss.multicell.MulticellScenario`
    with the hexagonal layout unless ``layout`` is supplied separately.
    """
    text, source = read_config_text(path_or_name)
    values = parse_config(text, source)
    return scenario_from_values(values), values


def multicell_from_values(values: dict, layout=None):
    from .multicell import MulticellScenario, hex_layout

    base = scenario_from_values(values)
    if layout is None:
        layout = hex_layout(base.cell.radius)
    try:
        return MulticellScenario(base, layout,
                                 association=values.get("association", "max_sir"),
                                 region=values.get("region", "disk"),
                                 region_radius=values.get("region_radius"))
    except ValueError as exc:
        raise ConfigError(str(exc)) from None


def dump_scenario(scenario: Scenario, time_unit: str = "s") -> str:
    """Inverse of :func:`scenario_from_values` (floats written with ``repr``)."""
    scale = TIME_UNITS[time_unit]
    r = scenario.radio
    lines = [
        f"mode = {scenario.mode}",
        f"gamma = {_num(r.gamma)}",
        f"c0 = {_num(r.c0)}",
        f"w = {_num(r.w)}",
        f"p_ratio = {_num(r.p_ratio)}",
        f"mean_gain = {_num(r.mean_gain)}",
        f"beta_min = {_num(r.beta_min)}",
        f"time_unit = {time_unit}",
        f"rho = {_num(scenario.traffic.rho * scale)}",
        f"nu = {_num(scenario.traffic.nu * scale)}",
        f"radius = {_num(scenario.cell.radius)}",
        f"outage_policy = {scenario.outage_policy}",
    ]
    if r.n_max is not None:
        lines.append(f"n_max = {r.n_max}")
    if scenario.shadowing is not None:
        lines.append(f"mu_db = {_num(scenario.shadowing.mu_db)}")
        lines.append(f"sigma_db = {_num(scenario.shadowing.sigma_db)}")
    return "\n".join(lines) + "\n"


def _num(x):
    return repr(float(x))
