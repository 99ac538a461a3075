"""Built-in run configurations reproducing every figure's data.

Packet parameters (d, delta, k0, t) match the figure captions exactly;
grids are sized so the packet plus its light-cone spread stays inside the
box with < 1e-6 mass at the walls, and spacings satisfy the resolution
gate.  Series-only presets (fig2*, fig4, fig5) use compact grids because
momentum-space moments do not need a large synthesis box.
"""

from __future__ import annotations

import json
from importlib import resources

from .config import RunConfig, build_config

_AXIAL = [[1, 0], [0, 0], [1, 0], [0, 0]]
_ZPARITY = [[1, 0], [0, 0], [0, 0], [1, 0]]


def _doc(packet, polarization, engine, grid, schedule, outputs) -> dict:
    return {"packet": packet, "polarization": polarization,
            "engine": engine, "grid": grid, "schedule": schedule,
            "outputs": outputs}


PRESETS = {
    # probability-density slice of the narrow packet's cylindrical wave
    "fig1a": _doc(
        {"d": 1.0, "delta": 5.0, "k0": 0.0}, _AXIAL, "spectral",
        {"n": [128, 128, 208], "spacing": 0.25},
        {"t_end": 7.5, "snapshots": [7.5], "series_interval": 0.75},
        {"directory": "fig1a", "slices": [
            {"plane": "z", "value": 0.0, "fields": ["density"]}]}),
    # wide packet, vertical cut
    "fig1b": _doc(
        {"d": 5.0, "delta": 5.0, "k0": 0.0}, _AXIAL, "spectral",
        {"n": [120, 120, 120], "spacing": 0.45},
        {"t_end": 7.5, "snapshots": [7.5], "series_interval": 0.75},
        {"directory": "fig1b", "slices": [
            {"plane": "y", "value": 0.0, "fields": ["density"]}]}),
    # energy-sign momentum distributions, resting packet
    "fig2a": _doc(
        {"d": 1.0, "delta": 5.0, "k0": 0.0}, _AXIAL, "spectral",
        {"n": [48, 48, 96], "spacing": 0.5},
        {"t_end": 1.0, "snapshots": [], "series_interval": 0.5},
        {"directory": "fig2a", "wsplit": True, "dumps": False}),
    # energy-sign momentum distributions, boosted packet
    "fig2b": _doc(
        {"d": 5.0, "delta": 5.0, "k0": 1.0}, _AXIAL, "spectral",
        {"n": [64, 64, 64], "spacing": 0.55},
        {"t_end": 1.0, "snapshots": [], "series_interval": 0.5},
        {"directory": "fig2b", "wsplit": True, "dumps": False}),
    # symmetry-breaking polarization, horizontal cut
    "fig3a": _doc(
        {"d": 1.0, "delta": 5.0, "k0": 0.0}, _ZPARITY, "spectral",
        {"n": [136, 136, 208], "spacing": 0.25},
        {"t_end": 6.283185307179586, "snapshots": [6.283185307179586],
         "series_interval": 0.6283185307179586},
        {"directory": "fig3a", "slices": [
            {"plane": "z", "value": 0.0, "fields": ["density"]}]}),
    # boosted symmetry-breaking packet, vertical cut
    "fig3b": _doc(
        {"d": 2.5, "delta": 5.0, "k0": 1.0}, _ZPARITY, "spectral",
        {"n": [112, 112, 216], "spacing": 0.25},
        {"t_end": 7.5, "snapshots": [7.5], "series_interval": 0.75},
        {"directory": "fig3b", "slices": [
            {"plane": "y", "value": 0.0, "fields": ["density"]}]}),
    # transverse velocity oscillations, resting packet
    "fig4": _doc(
        {"d": 1.0, "delta": 5.0, "k0": 0.0}, _ZPARITY, "spectral",
        {"n": [96, 96, 96], "spacing": 0.5},
        {"t_end": 30.0, "snapshots": [], "series_interval": 0.25},
        {"directory": "fig4", "dumps": False}),
    # transverse velocity oscillations, boosted packet
    "fig5": _doc(
        {"d": 2.5, "delta": 5.0, "k0": 1.0}, _ZPARITY, "spectral",
        {"n": [64, 64, 96], "spacing": 0.5},
        {"t_end": 30.0, "snapshots": [], "series_interval": 0.25},
        {"directory": "fig5", "dumps": False}),
    # spin-density maps of the axially symmetric packet
    "fig6": _doc(
        {"d": 1.0, "delta": 5.0, "k0": 0.0}, _AXIAL, "spectral",
        {"n": [128, 128, 208], "spacing": 0.25},
        {"t_end": 7.5, "snapshots": [7.5], "series_interval": 0.75},
        {"directory": "fig6", "slices": [
            {"plane": "z", "value": 0.0,
             "fields": ["density", "sigma_x", "sigma_y", "sigma_z"]}]}),
    # spin-density maps, z-parity packet (caption parameter set, k0 = 0)
    "fig7": _doc(
        {"d": 3.64, "delta": 3.64, "k0": 0.0}, _ZPARITY, "spectral",
        {"n": [128, 128, 128], "spacing": 0.36},
        {"t_end": 8.0, "snapshots": [8.0], "series_interval": 0.8},
        {"directory": "fig7", "slices": [
            {"plane": "y", "value": 0.0,
             "fields": ["sigma_x", "sigma_y", "sigma_z"]}]}),
    # same map with the body-text parameter set (k0 = 1)
    "fig7alt": _doc(
        {"d": 3.64, "delta": 3.64, "k0": 1.0}, _ZPARITY, "spectral",
        {"n": [128, 128, 160], "spacing": 0.36},
        {"t_end": 8.0, "snapshots": [8.0], "series_interval": 0.8},
        {"directory": "fig7alt", "slices": [
            {"plane": "y", "value": 0.0,
             "fields": ["sigma_x", "sigma_y", "sigma_z"]}]}),
}


def preset_names():
    return sorted(PRESETS)


def preset_doc(name: str) -> dict:
    try:
        return json.loads(json.dumps(PRESETS[name]))
    except KeyError:
        raise KeyError(
            f"unknown preset {name!r}; available: {preset_names()}"
        ) from None


def preset_config(name: str) -> RunConfig:
    return build_config(preset_doc(name))


def load_packaged(name: str) -> dict:
    """Read the JSON file shipped under diracpack/presets/ (kept in sync
    with PRESETS; the files are the CLI-facing form)."""
    ref = resources.files("diracpack").joinpath(f"presets/{name}.json")
    return json.loads(ref.read_text(encoding="utf-8"))
