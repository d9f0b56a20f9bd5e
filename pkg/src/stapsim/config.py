"""Human-readable key-value configuration files.

Scenario files are flat ``key = value`` lines (a ``[scenario]`` header is
optional); experiment files add an ``[experiment]`` section and one
``[algorithm <name>]`` section per filter.  Angles are degrees, power ratios
are dB, and ``#`` or ``;`` start a comment.
"""

import configparser
from pathlib import Path

import numpy as np

from .harness import AlgorithmSpec, ExperimentConfig
from .scene import RadarScenario


class ConfigError(Exception):
    """A configuration file is missing, malformed, or inconsistent."""


_SCENARIO_FIELDS = {
    "carrier_frequency": float,
    "prf": float,
    "platform_velocity": float,
    "platform_height": float,
    "num_elements": int,
    "num_pulses": int,
    "cnr_db": float,
    "jnr_db": float,
    "noise_power": float,
    "target_azimuth": float,
    "target_normalized_doppler": float,
    "element_spacing": float,
}

_ALGORITHM_PARAMS = {
    "abfa-sg": {"mu", "rank", "num_banks", "guard"},
    "abfa-rls": {"lambda", "delta", "rank", "num_banks", "guard"},
    "full-rank-sg": {"mu", "guard"},
    "full-rank-rls": {"lambda", "delta", "guard"},
    "smi": {"loading", "refit_interval"},
    "mswf": {"rank", "refit_interval"},
    "avf": {"rank", "refit_interval"},
}

_INT_PARAMS = {"rank", "num_banks", "refit_interval"}


def _read_config(path) -> configparser.ConfigParser:
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"config file not found: {path}")
    text = path.read_text()
    parser = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
    parser.optionxform = str
    try:
        parser.read_string(text, source=str(path))
    except configparser.MissingSectionHeaderError:
        try:
            parser.read_string("[scenario]\n" + text, source=str(path))
        except configparser.Error as exc:
            raise ConfigError(f"{path}: {exc}") from exc
    except configparser.Error as exc:
        raise ConfigError(f"{path}: {exc}") from exc
    return parser


def _parse_scenario_section(section, source) -> RadarScenario:
    kwargs = {}
    for key, raw in section.items():
        if key == "jammer_azimuths":
            raw = raw.strip()
            if raw:
                try:
                    kwargs[key] = tuple(float(tok) for tok in raw.replace(",", " ").split())
                except ValueError as exc:
                    raise ConfigError(f"{source}: bad jammer_azimuths {raw!r}") from exc
            else:
                kwargs[key] = ()
            continue
        if key not in _SCENARIO_FIELDS:
            raise ConfigError(f"{source}: unknown scenario key {key!r}")
        caster = _SCENARIO_FIELDS[key]
        try:
            kwargs[key] = caster(float(raw)) if caster is int else caster(raw)
        except ValueError as exc:
            raise ConfigError(f"{source}: bad value for {key}: {raw!r}") from exc
    try:
        return RadarScenario(**kwargs)
    except ValueError as exc:
        raise ConfigError(f"{source}: {exc}") from exc


def load_scenario(path) -> RadarScenario:
    """Load a scenario from a flat key-value file."""
    parser = _read_config(path)
    sections = [s for s in parser.sections() if s != "scenario"]
    if sections:
        raise ConfigError(f"{path}: unexpected sections {sections} in a scenario file")
    section = parser["scenario"] if parser.has_section("scenario") else parser.defaults()
    return _parse_scenario_section(section, path)


def _parse_grid(raw, source) -> np.ndarray:
    parts = raw.split(":")
    if len(parts) != 3:
        raise ConfigError(f"{source}: pd_grid_db must be 'min:max:count', got {raw!r}")
    try:
        low, high, count = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError as exc:
        raise ConfigError(f"{source}: bad pd_grid_db {raw!r}") from exc
    if count < 1:
        raise ConfigError(f"{source}: pd_grid_db count must be positive")
    return np.linspace(low, high, count)


def load_experiment(path) -> ExperimentConfig:
    """Load a full experiment description (scenario, filters, run controls)."""
    parser = _read_config(path)
    source = Path(path)

    if parser.has_section("scenario"):
        scenario = _parse_scenario_section(parser["scenario"], source)
    else:
        scenario = RadarScenario()

    kwargs = {}
    pd_grid = None
    if parser.has_section("experiment"):
        for key, raw in parser["experiment"].items():
            try:
                if key in ("num_trials", "snapshot_count", "base_seed", "workers"):
                    kwargs[key] = int(raw)
                elif key in ("pfa", "snr_db"):
                    kwargs[key] = float(raw)
                elif key == "output_dir":
                    kwargs[key] = Path(raw)
                elif key == "pd_grid_db":
                    pd_grid = _parse_grid(raw, source)
                else:
                    raise ConfigError(f"{source}: unknown experiment key {key!r}")
            except ValueError as exc:
                raise ConfigError(f"{source}: bad value for {key}: {raw!r}") from exc

    algorithms = []
    for section in parser.sections():
        if section in ("scenario", "experiment"):
            continue
        if not section.startswith("algorithm"):
            raise ConfigError(f"{source}: unknown section [{section}]")
        name = section[len("algorithm"):].strip()
        if name not in _ALGORITHM_PARAMS:
            raise ConfigError(
                f"{source}: unknown algorithm {name!r}; expected one of "
                f"{sorted(_ALGORITHM_PARAMS)}"
            )
        allowed = _ALGORITHM_PARAMS[name]
        params = {}
        for key, raw in parser[section].items():
            if key not in allowed:
                raise ConfigError(
                    f"{source}: parameter {key!r} not recognised for {name} "
                    f"(allowed: {sorted(allowed)})"
                )
            try:
                params[key] = int(float(raw)) if key in _INT_PARAMS else float(raw)
            except ValueError as exc:
                raise ConfigError(f"{source}: bad value for {key}: {raw!r}") from exc
        algorithms.append(AlgorithmSpec(name=name, params=params))

    try:
        config = ExperimentConfig(scenario=scenario, algorithms=algorithms, **kwargs)
    except ValueError as exc:
        raise ConfigError(f"{source}: {exc}") from exc
    if pd_grid is not None:
        config.pd_grid_db = pd_grid
    return config
