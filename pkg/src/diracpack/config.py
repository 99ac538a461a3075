"""Run configuration: JSON parsing, strict validation, gate checks.

A config is a UTF-8 JSON document with flat sections (packet,
polarization, engine, grid, schedule, outputs); every key is validated,
defaults are resolved eagerly, and the three gates are enforced up front:

  * resolution gate: all grid spacings < 1 Compton wavelength
  * stability gate (fdtd engines): margin(d, dt) > 0
  * norm gate: sampled initial state within 1% of unit norm
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .fdtd import default_dt, max_stable_dt, stability_margin
from .grid import PositionGrid
from .packet import GaussianPacket, PolarizedState, sampled_norm_estimate

SLICE_FIELDS = ("density", "sigma_x", "sigma_y", "sigma_z")
OBSERVABLES = ("velocity", "spin", "norm")
ENGINES = ("spectral", "fdtd", "both")


class ConfigError(ValueError):
    pass


def _require(section: dict, name: str, key: str):
    if key not in section:
        raise ConfigError(f"missing required key '{name}.{key}'")
    return section[key]


def _check_keys(section: dict, name: str, allowed):
    unknown = set(section) - set(allowed)
    if unknown:
        raise ConfigError(
            f"unknown key(s) in '{name}': {sorted(unknown)} "
            f"(allowed: {sorted(allowed)})")


def _number(value, name: str, positive=False) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"'{name}' must be a number, got {value!r}")
    v = float(value)
    if not math.isfinite(v):
        raise ConfigError(f"'{name}' must be finite")
    if positive and v <= 0:
        raise ConfigError(f"'{name}' must be positive, got {v}")
    return v


@dataclass
class SliceSpec:
    plane: str
    value: float
    fields: tuple

    def label(self) -> str:
        return f"{self.plane}{self.value:g}"


@dataclass
class RunConfig:
    packet: GaussianPacket
    polarization: np.ndarray
    engine: str
    grid_shape: tuple
    grid_spacing: tuple
    dt: object                   # "auto" or float
    t_end: float
    snapshots: tuple
    series_interval: float
    out_dir: str
    observables: tuple
    slices: tuple
    wsplit: bool
    dumps: bool
    raw: dict = field(repr=False, default_factory=dict)

    def state(self) -> PolarizedState:
        return PolarizedState(self.packet, self.polarization)

    def position_grid(self) -> PositionGrid:
        return PositionGrid(self.grid_shape, self.grid_spacing)

    def engines(self) -> tuple:
        return ("spectral", "fdtd") if self.engine == "both" \
            else (self.engine,)

    def resolved_dict(self) -> dict:
        return {
            "packet": {"d": self.packet.d, "delta": self.packet.delta,
                       "k0": self.packet.k0,
                       "m_axial": self.packet.m_axial},
            "polarization": [[float(c.real), float(c.imag)]
                             for c in self.polarization],
            "engine": self.engine,
            "grid": {"n": list(self.grid_shape),
                     "spacing": list(self.grid_spacing),
                     "dt": self.dt},
            "schedule": {"t_end": self.t_end,
                         "snapshots": list(self.snapshots),
                         "series_interval": self.series_interval},
            "outputs": {"directory": self.out_dir,
                        "observables": list(self.observables),
                        "slices": [{"plane": s.plane, "value": s.value,
                                    "fields": list(s.fields)}
                                   for s in self.slices],
                        "wsplit": self.wsplit,
                        "dumps": self.dumps},
        }

    def echo_json(self) -> str:
        return json.dumps(self.resolved_dict(), indent=2, sort_keys=True)


def _auto_shape(packet: GaussianPacket, t_end: float, spacing):
    half_t = 3.5 * packet.d + t_end + 2.0
    half_z = 3.5 * packet.delta + t_end + 2.0
    shape = []
    for half, h in zip((half_t, half_t, half_z), spacing):
        n = int(np.ceil(2.0 * half / h))
        shape.append(n + n % 2)
    return tuple(shape)


def build_config(doc: dict) -> RunConfig:
    if not isinstance(doc, dict):
        raise ConfigError("config root must be an object")
    _check_keys(doc, "config", ("packet", "polarization", "engine", "grid",
                                "schedule", "outputs"))

    pk_sec = _require(doc, "config", "packet")
    _check_keys(pk_sec, "packet", ("d", "delta", "k0", "m_axial"))
    d = _number(_require(pk_sec, "packet", "d"), "packet.d", positive=True)
    delta = _number(_require(pk_sec, "packet", "delta"), "packet.delta",
                    positive=True)
    k0 = _number(pk_sec.get("k0", 0.0), "packet.k0")
    m_axial = pk_sec.get("m_axial", 0)
    if isinstance(m_axial, bool) or not isinstance(m_axial, int):
        raise ConfigError("'packet.m_axial' must be an integer")
    packet = GaussianPacket(d, delta, k0, m_axial)

    pol_raw = _require(doc, "config", "polarization")
    if (not isinstance(pol_raw, list) or len(pol_raw) != 4
            or any(not isinstance(p, list) or len(p) != 2 for p in pol_raw)):
        raise ConfigError(
            "'polarization' must be four [re, im] pairs")
    pol = np.array([complex(_number(p[0], "polarization.re"),
                            _number(p[1], "polarization.im"))
                    for p in pol_raw])
    if np.linalg.norm(pol) == 0.0:
        raise ConfigError("'polarization' has zero norm")

    engine = _require(doc, "config", "engine")
    if engine not in ENGINES:
        raise ConfigError(f"'engine' must be one of {ENGINES}, "
                          f"got {engine!r}")

    sched = doc.get("schedule", {})
    _check_keys(sched, "schedule", ("t_end", "snapshots",
                                    "series_interval"))
    t_end = _number(sched.get("t_end", 2.0 * np.pi), "schedule.t_end",
                    positive=True)
    snapshots = sched.get("snapshots", [t_end])
    if not isinstance(snapshots, list):
        raise ConfigError("'schedule.snapshots' must be an array")
    snapshots = tuple(_number(s, "schedule.snapshots[]") for s in snapshots)
    if any(s < 0 or s > t_end + 1e-12 for s in snapshots):
        raise ConfigError("snapshot times must lie in [0, t_end]")
    series_interval = _number(sched.get("series_interval", t_end / 100.0),
                              "schedule.series_interval", positive=True)

    grid_sec = doc.get("grid", {})
    _check_keys(grid_sec, "grid", ("n", "spacing", "dt"))
    spacing_raw = grid_sec.get("spacing", 0.4)
    if isinstance(spacing_raw, list):
        if len(spacing_raw) != 3:
            raise ConfigError("'grid.spacing' must be a number or 3 numbers")
        spacing = tuple(_number(s, "grid.spacing", positive=True)
                        for s in spacing_raw)
    else:
        spacing = (_number(spacing_raw, "grid.spacing", positive=True),) * 3
    for s in spacing:
        if s >= 1.0:
            raise ConfigError(
                f"resolution gate: grid spacing {s} must be < 1 "
                "(Compton-resolution condition)")
    if "n" in grid_sec:
        n_raw = grid_sec["n"]
        if not isinstance(n_raw, list) or len(n_raw) != 3 or \
                any(isinstance(n, bool) or not isinstance(n, int)
                    for n in n_raw):
            raise ConfigError("'grid.n' must be three integers")
        shape = tuple(n_raw)
    else:
        shape = _auto_shape(packet, t_end, spacing)
    try:
        grid = PositionGrid(shape, spacing)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None

    dt = grid_sec.get("dt", "auto")
    if dt != "auto":
        dt = _number(dt, "grid.dt", positive=True)
    if engine in ("fdtd", "both"):
        if not grid.is_uniform:
            raise ConfigError(
                "stability gate: fdtd engine requires uniform spacing")
        dt_val = default_dt(grid) if dt == "auto" else dt
        margin = stability_margin(grid, dt_val)
        if margin <= 0:
            raise ConfigError(
                f"stability gate: margin = {margin:.6g} for "
                f"d={grid.spacing[0]}, dt={dt_val:.6g} "
                f"(max stable dt = {max_stable_dt(grid.spacing[0]):.6g})")

    state = PolarizedState(packet, pol)
    nrm = sampled_norm_estimate(state, grid)
    if abs(nrm - 1.0) > 0.01:
        raise ConfigError(
            f"norm gate: sampled initial norm {nrm:.6f} deviates from 1 "
            "by more than 1% (grid too coarse or too small for the packet)")

    out_sec = doc.get("outputs", {})
    _check_keys(out_sec, "outputs", ("directory", "observables", "slices",
                                     "wsplit", "dumps"))
    out_dir = out_sec.get("directory", "out")
    if not isinstance(out_dir, str) or not out_dir:
        raise ConfigError("'outputs.directory' must be a non-empty string")
    observables = out_sec.get("observables", list(OBSERVABLES))
    if not isinstance(observables, list) or \
            any(o not in OBSERVABLES for o in observables):
        raise ConfigError(f"'outputs.observables' must be a subset of "
                          f"{OBSERVABLES}")
    slices = []
    for i, s in enumerate(out_sec.get("slices", [])):
        _check_keys(s, f"outputs.slices[{i}]", ("plane", "value", "fields"))
        plane = _require(s, f"outputs.slices[{i}]", "plane")
        if plane not in ("x", "y", "z"):
            raise ConfigError(f"slice plane must be x, y or z, got {plane!r}")
        value = _number(s.get("value", 0.0), "slice.value")
        axis = {"x": 0, "y": 1, "z": 2}[plane]
        lim = grid.axis(axis)
        if value < lim[0] or value > lim[-1]:
            raise ConfigError(
                f"slice plane {plane}={value} outside grid "
                f"[{lim[0]:.3f}, {lim[-1]:.3f}]")
        fields = s.get("fields", ["density"])
        if any(f not in SLICE_FIELDS for f in fields):
            raise ConfigError(f"slice fields must be a subset of "
                              f"{SLICE_FIELDS}")
        slices.append(SliceSpec(plane, value, tuple(fields)))
    wsplit = bool(out_sec.get("wsplit", False))
    dumps = bool(out_sec.get("dumps", True))

    return RunConfig(
        packet=packet, polarization=pol, engine=engine,
        grid_shape=grid.shape, grid_spacing=grid.spacing, dt=dt,
        t_end=t_end, snapshots=snapshots, series_interval=series_interval,
        out_dir=out_dir, observables=tuple(observables),
        slices=tuple(slices), wsplit=wsplit, dumps=dumps, raw=doc)


def parse_config(text: str) -> RunConfig:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config is not valid JSON: {exc}") from None
    return build_config(doc)


def load_config(path) -> RunConfig:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_config(fh.read())


def apply_overrides(doc: dict, overrides) -> dict:
    """Apply CLI 'section.key=value' overrides onto a raw config dict."""
    out = json.loads(json.dumps(doc))     # deep copy
    for item in overrides:
        if "=" not in item:
            raise ConfigError(f"override {item!r} is not key=value")
        key, _, value = item.partition("=")
        parts = key.split(".")
        target = out
        for part in parts[:-1]:
            target = target.setdefault(part, {})
            if not isinstance(target, dict):
                raise ConfigError(f"cannot override through scalar {part!r}")
        try:
            target[parts[-1]] = json.loads(value)
        except json.JSONDecodeError:
            target[parts[-1]] = value
    return out
