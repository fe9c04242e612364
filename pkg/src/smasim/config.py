"""Scenario configuration files.

A config is an INI document. An optional ``[defaults]`` section supplies
keys shared by every ``[scenario <name>]`` section::

    [defaults]
    experiment = ber
    nt = 4
    snr_db = 0:2:20     # start:step:stop, stop included; or "0, 5, 10"

    [scenario sma]
    scheme = SMA

Unknown sections or keys are errors. Presets reproducing the three
comparison figures ship in ``smasim/presets``.
"""

import configparser
from importlib import resources
import math
import os

from .analytic import TargetRates
from .montecarlo import Scenario

__all__ = ["ConfigError", "parse_config", "serialize_config", "load_config_text",
           "list_presets", "preset_text", "parse_snr_grid"]

_SCENARIO_PREFIX = "scenario "

_KEYS = {
    "scheme": str,
    "experiment": str,
    "nt": int,
    "nr": int,
    "m": int,
    "sigma1_sq": float,
    "sigma2_sq": float,
    "a1": float,
    "a2": float,
    "r1_target": float,
    "r2_target": float,
    "snr_db": "grid",
    "trials": int,
    "seed": int,
    "fair_comparison": bool,
    "min_errors": int,
}


class ConfigError(ValueError):
    """Invalid config document; ``path`` names the offending section/key."""

    def __init__(self, path, message):
        self.path = path
        super().__init__(f"{path}: {message}" if path else message)


def parse_snr_grid(text: str) -> tuple:
    """Parse ``"start:step:stop"`` (inclusive) or a comma-separated list of dB values."""
    text = text.strip()
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise ValueError(f"range must be start:step:stop, got {text!r}")
        start, step, stop = (float(p) for p in parts)
        if step <= 0 or stop < start:
            raise ValueError(f"invalid range {text!r}")
        count = int(math.floor((stop - start) / step + 1e-9)) + 1
        return tuple(float(start + k * step) for k in range(count))
    values = tuple(float(v) for v in text.replace(",", " ").split())
    if not values:
        raise ValueError("empty SNR grid")
    return values


def _convert(kind, raw: str):
    if kind == "grid":
        return parse_snr_grid(raw)
    if kind is bool:
        low = raw.strip().lower()
        if low in ("1", "true", "yes", "on"):
            return True
        if low in ("0", "false", "no", "off"):
            return False
        raise ValueError(f"expected a boolean, got {raw!r}")
    if kind is int:
        return int(raw.strip().replace("_", ""), 10)
    return kind(raw.strip())


def _read(text: str) -> configparser.ConfigParser:
    cp = configparser.ConfigParser(interpolation=None, default_section="\x00none",
                                   inline_comment_prefixes=("#", ";"))
    try:
        cp.read_string(text)
    except configparser.Error as exc:
        raise ConfigError("", f"malformed document: {exc}") from exc
    return cp


def _scenario_from(name, values, path):
    typed = {}
    for key, raw in values.items():
        if key not in _KEYS:
            raise ConfigError(f"{path}.{key}", "unknown key")
        try:
            typed[key] = _convert(_KEYS[key], raw)
        except ValueError as exc:
            raise ConfigError(f"{path}.{key}", str(exc)) from exc
    for required in ("scheme", "experiment"):
        if required not in typed:
            raise ConfigError(f"{path}.{required}", "missing required key")
    kwargs = dict(name=name, scheme=typed["scheme"].upper(), experiment=typed["experiment"].lower())
    rename = {"nt": "Nt", "nr": "Nr", "m": "M", "snr_db": "snr_grid_db", "seed": "master_seed"}
    for key in ("nt", "nr", "m", "sigma1_sq", "sigma2_sq", "a1", "a2", "snr_db",
                "trials", "seed", "fair_comparison", "min_errors"):
        if key in typed:
            kwargs[rename.get(key, key)] = typed[key]
    if "r1_target" in typed or "r2_target" in typed:
        nt = kwargs.get("Nt", 4)
        default = math.log2(nt) if nt > 1 else 1.0
        try:
            kwargs["target_rates"] = TargetRates(typed.get("r1_target", default),
                                                 typed.get("r2_target", default))
        except ValueError as exc:
            raise ConfigError(f"{path}.r1_target", str(exc)) from exc
    try:
        return Scenario(**kwargs)
    except ValueError as exc:
        raise ConfigError(path, str(exc)) from exc


def parse_config(text: str) -> list:
    """Parse a config document into validated :class:`Scenario` objects, in file order."""
    cp = _read(text)
    defaults = {}
    scenarios = []
    names = set()
    for section in cp.sections():
        if section == "defaults":
            defaults = dict(cp.items(section))
            for key in defaults:
                if key not in _KEYS:
                    raise ConfigError(f"defaults.{key}", "unknown key")
            continue
        if not section.startswith(_SCENARIO_PREFIX):
            raise ConfigError(section, "unknown section (expected [defaults] or [scenario <name>])")
        name = section[len(_SCENARIO_PREFIX):].strip()
        if not name or not name.replace("_", "").replace("-", "").isalnum():
            raise ConfigError(section, "scenario names must be alphanumeric (with _ or -)")
        if name in names:
            raise ConfigError(section, "duplicate scenario name")
        names.add(name)
        values = {**defaults, **dict(cp.items(section))}
        scenarios.append(_scenario_from(name, values, f"scenario {name}"))
    if not scenarios:
        raise ConfigError("", "no [scenario <name>] sections")
    return scenarios


def _fmt(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return repr(v)
    return str(v)


def serialize_config(scenarios) -> str:
    """Render scenarios as a config document that parses back to equal scenarios."""
    lines = []
    for scn in scenarios:
        lines.append(f"[scenario {scn.name}]")
        fields = [
            ("scheme", scn.scheme), ("experiment", scn.experiment),
            ("nt", scn.Nt), ("nr", scn.Nr), ("m", scn.M),
            ("sigma1_sq", scn.sigma1_sq), ("sigma2_sq", scn.sigma2_sq),
            ("a1", scn.a1), ("a2", scn.a2),
            ("r1_target", float(scn.target_rates.r1_target)),
            ("r2_target", float(scn.target_rates.r2_target)),
            ("snr_db", ", ".join(repr(float(s)) for s in scn.snr_grid_db)),
            ("trials", scn.trials), ("seed", scn.master_seed),
            ("fair_comparison", scn.fair_comparison),
        ]
        if scn.min_errors is not None:
            fields.append(("min_errors", scn.min_errors))
        lines.extend(f"{k} = {_fmt(v)}" for k, v in fields)
        lines.append("")
    return "\n".join(lines)


def list_presets() -> dict:
    """Map preset name to its one-line description."""
    out = {}
    for entry in sorted(resources.files("smasim.presets").iterdir(), key=lambda p: p.name):
        if entry.name.endswith(".ini"):
            lines = entry.read_text().splitlines()
            out[entry.name[:-4]] = lines[0].lstrip("# ").strip() if lines else ""
    return out


def preset_text(name: str) -> str:
    entry = resources.files("smasim.presets").joinpath(f"{name}.ini")
    if not entry.is_file():
        raise ConfigError("", f"unknown preset {name!r}; available: {', '.join(list_presets())}")
    return entry.read_text()


def load_config_text(spec: str) -> str:
    """Text of a config file path, or of a bundled preset given by name."""
    if os.path.isfile(spec):
        with open(spec, encoding="utf-8") as fh:
            return fh.read()
    name = spec[len("preset:"):] if spec.startswith("preset:") else spec
    if name in list_presets():
        return preset_text(name)
    raise ConfigError("", f"config file not found: {spec}")

