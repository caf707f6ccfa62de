"""Run configuration: a JSON document plus command-line overrides."""
from __future__ import annotations

import json
import math
import os
from dataclasses import dataclass, field

from .errors import ConfigError
from .params import ModelParams

EXPERIMENTS = ("spectrum", "eigenfunction", "classical-orbit", "phase-portrait", "morse-catalog",
               "coherent-evolve", "cat-evolve", "uncertainties", "verify")
FORMATS = ("csv", "json")
OUTPUT_DIR_ENV = "PDMOSC_OUTPUT_DIR"

# experiment -> figure builder used to produce its dataset
BUILDER_OF = {
    "spectrum": "spectrum",
    "eigenfunction": "eigenfunction",
    "classical-orbit": "classical-orbit",
    "phase-portrait": "phase-portrait",
    "morse-catalog": "morse-catalog",
    "coherent-evolve": "cs-expectations",
    "cat-evolve": "cat-evolve",
    "uncertainties": "uncertainties",
}

PARAM_KEYS = ("m0", "omega0", "hbar", "gamma", "gamma_sigma0")


@dataclass
class RunConfig:
    params: ModelParams
    experiment: str
    options: dict = field(default_factory=dict)
    output: str | None = None
    format: str = "csv"

    def __post_init__(self):
        if self.experiment not in EXPERIMENTS:
            raise ConfigError(f"unknown experiment {self.experiment!r}; choose from {', '.join(EXPERIMENTS)}")
        if self.format not in FORMATS:
            raise ConfigError(f"unknown format {self.format!r}; choose csv or json")

    def to_dict(self) -> dict:
        return {"experiment": self.experiment, "params": self.params.to_dict(),
                "options": dict(self.options), "output": self.output, "format": self.format}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=1, sort_keys=True)

    @classmethod
    def from_dict(cls, doc: dict) -> "RunConfig":
        if not isinstance(doc, dict):
            raise ConfigError("configuration must be a JSON object")
        unknown = set(doc) - {"experiment", "params", "options", "output", "format"}
        if unknown:
            raise ConfigError(f"unknown configuration keys: {sorted(unknown)}")
        if "experiment" not in doc:
            raise ConfigError("configuration needs an 'experiment'")
        params = params_from_dict(doc.get("params", {}))
        options = doc.get("options", {})
        if not isinstance(options, dict):
            raise ConfigError("'options' must be an object")
        return cls(params, doc["experiment"], dict(options), doc.get("output"), doc.get("format", "csv"))

    @classmethod
    def from_json(cls, text: str) -> "RunConfig":
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"malformed configuration: {exc}") from exc
        return cls.from_dict(doc)

    def builder_options(self) -> dict:
        """Options handed to the figure builder, with the physical constants merged in."""
        P = self.params
        return {"m0": P.m0, "omega0": P.omega0, "hbar": P.hbar,
                "gamma_sigma0": self.options.get("gamma_sigma0", P.gamma_sigma0), **self.options}

    def output_path(self) -> str | None:
        if self.output:
            return self.output
        d = os.environ.get(OUTPUT_DIR_ENV)
        if d:
            return os.path.join(d, f"{self.experiment}.{self.format}")
        return None


def params_from_dict(d: dict) -> ModelParams:
    if not isinstance(d, dict):
        raise ConfigError("'params' must be an object")
    unknown = set(d) - set(PARAM_KEYS)
    if unknown:
        raise ConfigError(f"unknown parameter keys: {sorted(unknown)}")
    try:
        vals = {k: float(v) for k, v in d.items()}
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"parameters must be numbers: {exc}") from exc
    if "gamma" in vals and "gamma_sigma0" in vals:
        raise ConfigError("give gamma or gamma_sigma0, not both")
    base = {k: vals[k] for k in ("m0", "omega0", "hbar") if k in vals}
    if "gamma_sigma0" in vals:
        P = ModelParams(**base)
        return ModelParams(**base, gamma=vals["gamma_sigma0"] / P.sigma0)
    return ModelParams(**base, gamma=vals.get("gamma", 0.0))


def load_config(path: str) -> dict:
    try:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"malformed configuration {path}: {exc}") from exc
    if not isinstance(doc, dict):
        raise ConfigError("configuration must be a JSON object")
    return doc


def merge(doc: dict, experiment: str, param_flags: dict, option_flags: dict, output=None, fmt=None) -> RunConfig:
    """Combine a config document with flags; flags win."""
    doc = dict(doc)
    if doc.get("experiment", experiment) != experiment:
        raise ConfigError(f"config is for {doc['experiment']!r}, command is {experiment!r}")
    params = dict(doc.get("params", {}))
    flags = {k: v for k, v in param_flags.items() if v is not None}
    if "gamma" in flags:
        params.pop("gamma_sigma0", None)
    if "gamma_sigma0" in flags:
        params.pop("gamma", None)
    params.update(flags)
    options = dict(doc.get("options", {}))
    options.update({k: v for k, v in option_flags.items() if v is not None and v != ()})
    for k, v in list(options.items()):
        if isinstance(v, tuple):
            options[k] = list(v)
        if isinstance(v, float) and not math.isfinite(v):
            raise ConfigError(f"option {k} must be finite")
    return RunConfig.from_dict({"experiment": experiment, "params": params, "options": options,
                                "output": output if output is not None else doc.get("output"),
                                "format": fmt if fmt is not None else doc.get("format", "csv")})
