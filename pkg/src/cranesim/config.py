"""Scenario configuration files: a versioned, strictly validated JSON schema.

A scenario bundles crane parameters, controller gains, the actuated
set-point, simulation settings and an optional wind disturbance.  Unknown
keys are rejected so typos fail loudly; domain rules (positivity and the
like) are enforced by the dataclass constructors.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import jsonschema
import numpy as np

from .controller import ControllerGains, Reference, SwingDampingController
from .dynamics import CraneParameters, GeneralizedState
from .engine import SimulationConfig
from .wind import DragConfig, GustProfile, WindDisturbance

SCHEMA_VERSION = 1


def default_parameters() -> CraneParameters:
    """Constants of the reference crane used by the shipped scenarios."""
    return CraneParameters(tower_inertia=207.13, boom_inertia=2068.0,
                           boom_length=6.2, boom_mass=312.2,
                           payload_mass=50.0, gravity=9.81)


def default_gains() -> ControllerGains:
    """Gain set of the reference controller tuning."""
    return ControllerGains(k_ad=[100.0, 100.0, 150.0], k_ap=[10.0, 20.0, 50.0],
                           k_ud=[120.0, 120.0], k_up=[10.0, 10.0],
                           alpha1=-1.0, alpha2="sign(beta)")


class ConfigError(ValueError):
    """Configuration file is malformed or violates the schema."""


_NUMBER = {"type": "number"}
_POSITIVE = {"type": "number", "exclusiveMinimum": 0}

SCENARIO_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "additionalProperties": False,
    "required": ["schema_version", "name", "crane", "gains", "reference", "simulation"],
    "properties": {
        "schema_version": {"const": SCHEMA_VERSION},
        "name": {"type": "string"},
        "notes": {"type": "string"},
        "paper_fidelity": {"enum": ["full", "partial", "none"]},
        "crane": {
            "type": "object",
            "additionalProperties": False,
            "required": ["tower_inertia", "boom_inertia", "boom_length",
                         "boom_mass", "payload_mass", "gravity"],
            "properties": {name: _POSITIVE for name in
                           ["tower_inertia", "boom_inertia", "boom_length",
                            "boom_mass", "payload_mass", "gravity"]},
        },
        "gains": {
            "type": "object",
            "additionalProperties": False,
            "required": ["k_ad", "k_ap", "k_ud", "k_up", "alpha1", "alpha2"],
            "properties": {
                "k_ad": {"type": "array", "items": {"type": "number", "minimum": 0},
                         "minItems": 3, "maxItems": 3},
                "k_ap": {"type": "array", "items": {"type": "number", "minimum": 0},
                         "minItems": 3, "maxItems": 3},
                "k_ud": {"type": "array", "items": {"type": "number", "minimum": 0},
                         "minItems": 2, "maxItems": 2},
                "k_up": {"type": "array", "items": {"type": "number", "minimum": 0},
                         "minItems": 2, "maxItems": 2},
                "alpha1": _NUMBER,
                "alpha2": {"anyOf": [_NUMBER, {"const": "sign(beta)"}]},
            },
        },
        "reference": {
            "type": "object",
            "additionalProperties": False,
            "required": ["alpha", "beta", "rope_length"],
            "properties": {
                "alpha": _NUMBER,
                "beta": _NUMBER,
                "rope_length": _POSITIVE,
            },
        },
        "simulation": {
            "type": "object",
            "additionalProperties": False,
            "required": ["dt", "duration", "initial"],
            "properties": {
                "dt": _POSITIVE,
                "duration": _POSITIVE,
                "record_stride": {"type": "integer", "minimum": 1},
                "initial": {
                    "type": "object",
                    "additionalProperties": False,
                    "required": ["alpha", "beta", "rope_length"],
                    "properties": {
                        "alpha": _NUMBER, "beta": _NUMBER,
                        "rope_length": _POSITIVE,
                        "theta1": _NUMBER, "theta2": _NUMBER,
                        "alpha_dot": _NUMBER, "beta_dot": _NUMBER,
                        "rope_length_dot": _NUMBER,
                        "theta1_dot": _NUMBER, "theta2_dot": _NUMBER,
                    },
                },
                "saturation": {
                    "type": "array",
                    "items": {"anyOf": [_POSITIVE, {"type": "null"}]},
                    "minItems": 3, "maxItems": 3,
                },
            },
        },
        "disturbance": {
            "type": "object",
            "additionalProperties": False,
            "required": ["gust"],
            "properties": {
                "gust": {
                    "type": "object",
                    "additionalProperties": False,
                    "required": ["start_time", "ramp_up", "plateau", "ramp_down",
                                 "peak_speed", "direction"],
                    "properties": {
                        "start_time": {"type": "number", "minimum": 0},
                        "ramp_up": {"type": "number", "minimum": 0},
                        "plateau": {"type": "number", "minimum": 0},
                        "ramp_down": {"type": "number", "minimum": 0},
                        "peak_speed": _POSITIVE,
                        "direction": {
                            "anyOf": [
                                {"enum": ["tangential", "radial"]},
                                {"type": "array", "items": _NUMBER,
                                 "minItems": 3, "maxItems": 3},
                            ],
                        },
                    },
                },
                "drag": {
                    "type": "object",
                    "additionalProperties": False,
                    "properties": {
                        "rho": _POSITIVE,
                        "area": _POSITIVE,
                        "drag_coefficient": _POSITIVE,
                    },
                },
            },
        },
    },
}


@dataclass(frozen=True)
class Scenario:
    name: str
    notes: str
    paper_fidelity: str
    params: CraneParameters
    gains: ControllerGains
    reference: Reference
    sim: SimulationConfig

    def controller(self) -> SwingDampingController:
        return SwingDampingController(params=self.params, gains=self.gains,
                                      reference=self.reference)


def _schema_error_message(err: jsonschema.ValidationError) -> str:
    path = "$" + "".join(f".{p}" if isinstance(p, str) else f"[{p}]"
                         for p in err.absolute_path)
    return f"{path}: {err.message}"


def load_scenario(path) -> Scenario:
    """Parse and validate a scenario file; raises ConfigError with the field."""
    path = Path(path)
    try:
        raw = json.loads(path.read_text())
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path} is not valid JSON: {exc}") from exc
    return scenario_from_dict(raw)


def scenario_from_dict(raw: dict) -> Scenario:
    validator = jsonschema.Draft202012Validator(SCENARIO_SCHEMA)
    errors = sorted(validator.iter_errors(raw), key=lambda e: list(e.absolute_path))
    if errors:
        raise ConfigError("; ".join(_schema_error_message(e) for e in errors[:3]))

    try:
        params = CraneParameters(**raw["crane"])
        gains = ControllerGains(**raw["gains"])
        r = raw["reference"]
        reference = Reference(q1d=[r["alpha"], r["beta"], r["rope_length"]])
        sim_raw = raw["simulation"]
        initial = GeneralizedState.from_values(**sim_raw["initial"])
        disturbance = None
        if "disturbance" in raw:
            gust = GustProfile(**raw["disturbance"]["gust"])
            drag = DragConfig(**raw["disturbance"].get("drag", {}))
            disturbance = WindDisturbance(profile=gust, drag=drag)
        sim = SimulationConfig(
            dt=sim_raw["dt"],
            duration=sim_raw["duration"],
            initial_state=initial,
            saturation=_saturation_array(sim_raw.get("saturation")),
            disturbance=disturbance,
            record_stride=sim_raw.get("record_stride", 1),
        )
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from exc

    return Scenario(name=raw["name"], notes=raw.get("notes", ""),
                    paper_fidelity=raw.get("paper_fidelity", "none"),
                    params=params, gains=gains, reference=reference, sim=sim)


def _saturation_array(raw):
    if raw is None:
        return None
    return np.array([np.inf if v is None else float(v) for v in raw])
