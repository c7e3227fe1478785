"""Device stack description: geometry, materials, switching kinetics.

A dual-port FeFET is modeled as a 1D vertical stack

    write gate | ferroelectric | interfacial dielectric | thin Si body | back
    dielectric (BOX) | read gate

with the thin body treated as an equipotential charge sheet. All parameters
are SI. ``DeviceParams`` is immutable after construction and safe to share
across threads.
"""

from __future__ import annotations

import configparser
import enum
import math
from dataclasses import dataclass, fields, replace

from .constants import EPS0, thermal_voltage
from .errors import ConfigurationError, ValidationError


class PortId(enum.Enum):
    """The two electrical gates of a dual-port FeFET."""

    WriteGate = "wg"
    ReadGate = "rg"

    @classmethod
    def parse(cls, text: str) -> "PortId":
        t = text.strip().lower()
        for member in cls:
            if t in (member.value, member.name.lower()):
                return member
        raise ConfigurationError(f"unknown port {text!r}; expected 'wg' or 'rg'")


@dataclass(frozen=True)
class DeviceParams:
    """Geometry, permittivities, ferroelectric and transport parameters.

    Lengths in m, permittivities relative, charge densities in C/m^2,
    voltages in V, times in s. ``q_ch_scale`` (F/m^2) and ``psi_on`` (V)
    define the smooth sheet-charge channel model; ``tau0``/``alpha`` and the
    per-domain offset-voltage distribution define the nucleation-limited
    switching kinetics.
    """

    t_fe: float
    eps_fe: float
    t_il: float
    eps_il: float
    t_box: float
    eps_box: float
    t_body: float
    p_r: float
    n_domains: int
    v_offset_mean: float
    v_offset_sigma: float
    tau0: float
    alpha: float
    vfb_front: float
    vfb_back: float
    mobility_factor: float
    width: float
    length: float
    temperature: float
    q_ch_scale: float
    psi_on: float

    # -- derived per-area capacitances and EOTs ------------------------------

    @property
    def c_fe(self) -> float:
        return EPS0 * self.eps_fe / self.t_fe

    @property
    def c_il(self) -> float:
        return EPS0 * self.eps_il / self.t_il

    @property
    def c_box(self) -> float:
        return EPS0 * self.eps_box / self.t_box

    @property
    def c_front(self) -> float:
        """Series capacitance of the write-gate stack (FE + IL)."""
        return 1.0 / (1.0 / self.c_fe + 1.0 / self.c_il)

    @property
    def c_series(self) -> float:
        """Series capacitance of the whole stack (FE + IL + BOX)."""
        return 1.0 / (1.0 / self.c_fe + 1.0 / self.c_il + 1.0 / self.c_box)

    @property
    def eot_front(self) -> float:
        """SiO2-equivalent thickness of the write-gate stack, m."""
        return 3.9 * (self.t_fe / self.eps_fe + self.t_il / self.eps_il)

    @property
    def eot_back(self) -> float:
        return 3.9 * self.t_box / self.eps_box

    @property
    def eot_ratio(self) -> float:
        return self.eot_back / self.eot_front

    @property
    def thermal_voltage(self) -> float:
        return thermal_voltage(self.temperature)


# Calibrated defaults for a 22 nm class FDSOI FeFET with a 10 nm doped-HfO2
# ferroelectric and a 20 nm SiO2 buried oxide acting as read-gate dielectric.
# t_il / eps_il and the NLS constants (alpha, v_offset_mean/sigma) are
# calibration artifacts, not measured values; see README for the procedure.
FDSOI22_DEFAULTS: dict[str, float | int] = {
    "t_fe": 10e-9,
    "eps_fe": 19.5,
    "t_il": 0.5e-9,
    "eps_il": 3.9,
    "t_box": 20e-9,
    "eps_box": 3.9,
    "t_body": 6e-9,
    "p_r": 1.295e-2,
    "n_domains": 256,
    "v_offset_mean": -0.2,
    "v_offset_sigma": 0.08,
    "tau0": 1e-10,
    "alpha": 6.0,
    "vfb_front": 0.0,
    "vfb_back": 0.0,
    "mobility_factor": 1e-3,
    "width": 1e-6,
    "length": 1e-7,
    "temperature": 300.0,
    "q_ch_scale": 1.0,
    "psi_on": 0.2,
}

_PROFILES = {"fdsoi22": FDSOI22_DEFAULTS}

_FIELD_NAMES = [f.name for f in fields(DeviceParams)]
_INT_FIELDS = {"n_domains"}


def _validate(dev: DeviceParams) -> DeviceParams:
    positive = ["t_fe", "t_il", "t_box", "t_body", "tau0", "alpha", "width", "length",
                "temperature", "q_ch_scale", "mobility_factor"]
    for name in positive:
        if not getattr(dev, name) > 0:
            raise ValidationError(f"{name} must be > 0, got {getattr(dev, name)!r}")
    for name in ["eps_fe", "eps_il", "eps_box"]:
        if not getattr(dev, name) >= 1.0:
            raise ValidationError(f"{name} must be >= 1, got {getattr(dev, name)!r}")
    if not dev.p_r >= 0:
        raise ValidationError(f"p_r must be >= 0, got {dev.p_r!r}")
    if not dev.n_domains >= 1:
        raise ValidationError(f"n_domains must be >= 1, got {dev.n_domains!r}")
    if not dev.v_offset_sigma >= 0:
        raise ValidationError(f"v_offset_sigma must be >= 0, got {dev.v_offset_sigma!r}")
    for name in _FIELD_NAMES:
        value = getattr(dev, name)
        if not math.isfinite(value):
            raise ValidationError(f"{name} must be finite, got {value!r}")
    ratio = dev.eot_ratio
    if not (math.isfinite(ratio) and ratio > 0):
        raise ValidationError(f"eot_back/eot_front must be finite and > 0, got {ratio!r}")
    return dev


def build_device(config: dict) -> DeviceParams:
    """Build validated ``DeviceParams`` from a flat key-value map.

    The special key ``defaults`` selects a named parameter profile
    (currently ``"fdsoi22"``); remaining keys override individual fields.
    Without ``defaults`` every field must be supplied.

    Raises ``ConfigurationError`` for missing/unknown keys and
    ``ValidationError`` when a value violates its invariant.
    """
    cfg = dict(config)
    values: dict[str, float | int] = {}
    profile = cfg.pop("defaults", None)
    if profile is not None:
        if profile not in _PROFILES:
            raise ConfigurationError(
                f"unknown defaults profile {profile!r}; available: {sorted(_PROFILES)}")
        values.update(_PROFILES[profile])
    for key, raw in cfg.items():
        if key not in _FIELD_NAMES:
            raise ConfigurationError(f"unknown device parameter {key!r}")
        if key in _INT_FIELDS:
            values[key] = int(raw)
        else:
            values[key] = float(raw)
    missing = [name for name in _FIELD_NAMES if name not in values]
    if missing:
        raise ConfigurationError(f"missing device parameter {missing[0]!r}"
                                 + (f" (and {len(missing) - 1} more)" if len(missing) > 1 else ""))
    return _validate(DeviceParams(**values))  # type: ignore[arg-type]


def default_fdsoi22() -> DeviceParams:
    """The calibrated 22 nm class FDSOI dual-port FeFET."""
    return build_device({"defaults": "fdsoi22"})


def with_overrides(dev: DeviceParams, **overrides) -> DeviceParams:
    """A validated copy of ``dev`` with selected fields replaced."""
    return _validate(replace(dev, **overrides))


def load_device_config(path: str) -> DeviceParams:
    """Load a device from an INI-style config file.

    Keys in the ``[device]`` section match ``DeviceParams`` field names
    exactly; a ``defaults`` key selects a profile. Inline ``#`` comments are
    allowed.
    """
    parser = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
    try:
        read = parser.read(path)
    except configparser.Error as exc:
        raise ConfigurationError(f"cannot parse config {path!r}: {exc}") from exc
    if not read:
        raise ConfigurationError(f"config file not found: {path!r}")
    if not parser.has_section("device"):
        raise ConfigurationError(f"config {path!r} has no [device] section")
    raw = dict(parser.items("device"))
    cfg: dict = {}
    for key, value in raw.items():
        cfg[key] = value if key == "defaults" else value
    return build_device(cfg)


def load_circuit_section(path: str) -> dict[str, float | int]:
    """Raw ``[circuit]`` key-value pairs from a config file (may be empty)."""
    parser = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
    if not parser.read(path):
        raise ConfigurationError(f"config file not found: {path!r}")
    if not parser.has_section("circuit"):
        return {}
    out: dict[str, float | int] = {}
    for key, value in parser.items("circuit"):
        out[key] = int(value) if key == "n_stages" else float(value)
    return out
