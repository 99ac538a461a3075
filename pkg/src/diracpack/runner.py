"""Scenario driver: turns a validated RunConfig into artifacts on disk.

Layout under the output directory:

    config.echo.json            resolved configuration (provenance)
    report.json                 summary: drift fit, oscillation frequency,
                                symmetry metrics, norm drift, gate notes
    oracle_series.csv           quadrature-oracle observables (closed-form
                                polarizations only)
    wsplit.csv                  energy-sign momentum curves (if requested)
    <engine>/series.csv         time, Vx, Vy, Vz, Sx, Sy, Sz, norm
    <engine>/field_tXXX.dpfd    binary snapshots (if dumps enabled)
    <engine>/<field>_<plane>_tXXX.txt   slice matrices

Engines write into separate subdirectories so engine=both cannot collide.
All text output uses %.17g: identical configs give byte-identical files.
"""

from __future__ import annotations

import json
import sys
from dataclasses import dataclass, field

import numpy as np

from . import fdtd, observables as obs, spectral
from .config import RunConfig
from .fieldio import (ensure_dir, export_slice, slice_indices, take_plane,
                      write_csv, write_field_dump)
from .grid import BispinorField
from .packet import PHI_AXIAL, PHI_ZPARITY, initial_bispinor_field
from .quadrature import MomentumNodes2D, gaussian_cutoff


def _fmt_time(t: float) -> str:
    return f"{t:.4f}".rstrip("0").rstrip(".").replace(".", "p")


def _series_times(cfg: RunConfig) -> np.ndarray:
    n = int(np.floor(cfg.t_end / cfg.series_interval + 1e-9))
    return np.round(np.arange(n + 1) * cfg.series_interval, 12)


def _slice_matrix(fld: BispinorField, what: str, axis: int, idx: int):
    if what == "density":
        arr = fld.density()
    else:
        arr = obs.spin_density(fld).component(what[-1])
    return take_plane(arr, axis, idx)


def _write_slices(out, fld: BispinorField, cfg: RunConfig, tag: str):
    paths = []
    for spec in cfg.slices:
        axis, idx = slice_indices(fld.grid, spec.plane, spec.value)
        for what in spec.fields:
            mat = _slice_matrix(fld, what, axis, idx)
            name = f"{what}_{spec.plane}{spec.value:g}_t{tag}.txt"
            free_axes = [a for a in "xyz" if a != spec.plane]
            header = [
                f"{what} on plane {spec.plane} = {spec.value:g} "
                f"at t = {fld.time:.12g}",
                f"rows: {free_axes[0]}, cols: {free_axes[1]} "
                "(centered offsets, row-major)",
                f"grid n = {list(fld.grid.shape)}, "
                f"spacing = {list(fld.grid.spacing)}",
                f"packet d={cfg.packet.d:g} delta={cfg.packet.delta:g} "
                f"k0={cfg.packet.k0:g} m={cfg.packet.m_axial}",
            ]
            export_slice(out / name, mat, header)
            paths.append(out / name)
    return paths


def _symmetry_summary(fld: BispinorField, engine=None, t: float = 0.0):
    dens = fld.density()
    out = {
        "z_parity": obs.parity_metric(dens, (2,)),
        "xy_parity": obs.parity_metric(dens, (0, 1)),
        "axial_grid": obs.axial_metric_grid(dens, fld.grid),
    }
    if engine is not None:
        half = 0.45 * min(fld.grid.axis(0)[-1], fld.grid.axis(1)[-1])
        radii = np.linspace(0.15 * half, 2.0 * half, 8)
        out["axial_spectral"] = obs.axial_metric_spectral(
            engine, t, [0.0], radii)
    return out


def _series_from_spectral(engine, times):
    rows = {k: [] for k in ("time", "vx", "vy", "vz", "sx", "sy", "sz",
                            "norm")}
    for t in times:
        mf = engine.momentum_field_at(float(t))
        v = obs.velocity_expectation(mf)
        s = obs.spin_expectation(mf)
        rows["time"].append(t)
        for key, val in zip(("vx", "vy", "vz"), v):
            rows[key].append(val)
        for key, val in zip(("sx", "sy", "sz"), s):
            rows[key].append(val)
        rows["norm"].append(mf.norm())
    return rows


@dataclass
class ScenarioResult:
    out_dir: object
    report: dict
    series: dict = field(default_factory=dict)       # engine -> columns
    oracle_series: dict = field(default_factory=dict)
    snapshot_fields: dict = field(default_factory=dict)


def run_scenario(cfg: RunConfig, base_dir=".", *, series_only: bool = False,
                 wsplit_only: bool = False, verbose: bool = True
                 ) -> ScenarioResult:
    out = ensure_dir(f"{base_dir}/{cfg.out_dir}")
    (out / "config.echo.json").write_text(cfg.echo_json() + "\n",
                                          encoding="utf-8")
    report = {"preset_parameters": cfg.resolved_dict()["packet"],
              "engines": {}, "partial": False}
    result = ScenarioResult(out, report)
    state = cfg.state()
    times = _series_times(cfg)

    phi = state.phi
    oracle_kind = None
    if cfg.packet.m_axial == 0:
        if np.allclose(phi, PHI_AXIAL):
            oracle_kind = "axial"
        elif np.allclose(phi, PHI_ZPARITY):
            oracle_kind = "zparity"

    # quadrature-oracle series (independent of any grid)
    if oracle_kind and not wsplit_only:
        nodes = MomentumNodes2D(cfg.packet, float(times.max()))
        if oracle_kind == "axial":
            v = obs.velocity_series_axial(cfg.packet, times, nodes=nodes)
            s = obs.spin_series_axial(cfg.packet, times, nodes=nodes)
            drift_component = "vz"
        else:
            v = obs.velocity_series_zparity(cfg.packet, times, nodes=nodes)
            s = obs.spin_series_zparity(cfg.packet, times, nodes=nodes)
            drift_component = "vx"
        cols = {"time": times, "vx": v[:, 0], "vy": v[:, 1], "vz": v[:, 2],
                "sx": s[:, 0], "sy": s[:, 1], "sz": s[:, 2],
                "norm": np.ones_like(times)}
        write_csv(out / "oracle_series.csv", cols)
        result.oracle_series = cols
        osc = cols[drift_component]
        entry = {"drift_component": drift_component,
                 "drift": obs.drift_from_series(times, osc)}
        if len(times) >= 32:
            try:
                fit = obs.zb_fit(times, osc)
                entry.update(frequency=fit.frequency,
                             amplitude=fit.amplitude,
                             decay_time_10pct=fit.decay_time(0.1))
            except obs.SeriesError as exc:
                entry["fit_error"] = str(exc)
        report["oracle"] = entry

    # energy-sign momentum curves
    if cfg.wsplit or wsplit_only:
        cut = gaussian_cutoff(cfg.packet.delta)
        pz = np.linspace(cfg.packet.k0 - 1.2 * cut,
                         cfg.packet.k0 + 1.2 * cut, 201)
        wp, wm = spectral.w_curve(state, pz)
        write_csv(out / "wsplit.csv",
                  {"pz": pz, "w_plus": wp, "w_minus": wm})
        ip, im = spectral.w_curve_integrals(state)
        report["wsplit"] = {
            "integral_plus": ip, "integral_minus": im,
            "negative_pz_mass": spectral.w_negative_mass_fraction(state)}
        if wsplit_only:
            _write_report(out, report)
            return result

    grid = cfg.position_grid()
    snapshot_times = () if series_only else cfg.snapshots

    for engine_name in cfg.engines():
        if verbose:
            print(f"[diracpack] engine {engine_name}: grid "
                  f"{grid.shape} spacing {grid.spacing[0]:g}",
                  file=sys.stderr)
        edir = ensure_dir(out / engine_name)
        entry = {}
        if engine_name == "spectral":
            engine = spectral.SpectralEngine.from_state(state, grid,
                                                        normalize=True)
            cols = _series_from_spectral(engine, times)
            write_csv(edir / "series.csv", cols)
            result.series["spectral"] = cols
            entry["norm_drift"] = float(
                np.abs(np.asarray(cols["norm"]) - cols["norm"][0]).max())
            snaps = {}
            for t in snapshot_times:
                fld = engine.field_at(float(t))
                tag = _fmt_time(t)
                if cfg.dumps:
                    write_field_dump(edir / f"field_t{tag}.dpfd", fld)
                _write_slices(edir, fld, cfg, tag)
                snaps[t] = fld
                entry.setdefault("symmetry", {})[tag] = _symmetry_summary(
                    fld, engine, float(t))
            result.snapshot_fields["spectral"] = snaps
        else:
            f0 = initial_bispinor_field(state, grid, normalize=True)
            dt = fdtd.default_dt(grid) if cfg.dt == "auto" else float(cfg.dt)
            # shrink dt so the run lands exactly on t_end (and snapshots
            # at t_end are exact); margin only improves
            n_steps = int(np.ceil(cfg.t_end / dt - 1e-9))
            dt = cfg.t_end / n_steps
            lf = fdtd.prepare(f0, dt)
            snap_steps = sorted({max(1, int(round(t / dt)))
                                 for t in snapshot_times})
            series_every = max(1, int(round(cfg.series_interval / dt)))
            rows = {k: [] for k in ("time", "vx", "vy", "vz",
                                    "sx", "sy", "sz", "norm")}

            def sample(fldnow: BispinorField, norm: float):
                v = obs.velocity_expectation(fldnow)
                s = obs.spin_expectation(fldnow)
                rows["time"].append(fldnow.time)
                for key, val in zip(("vx", "vy", "vz"), v):
                    rows[key].append(val)
                for key, val in zip(("sx", "sy", "sz"), s):
                    rows[key].append(val)
                rows["norm"].append(norm)

            snaps = {}
            sample(BispinorField(grid, f0.values, 0.0), lf.norm0)
            flagged = False
            while lf.step_count < n_steps + 1:
                fdtd.step(lf)
                if lf.step_count % series_every == 0:
                    sample(lf.current_field(), lf.norm_history[-1])
                if lf.step_count in snap_steps:
                    fld = lf.current_field()
                    tag = _fmt_time(fld.time)
                    if cfg.dumps:
                        write_field_dump(edir / f"field_t{tag}.dpfd", fld)
                    _write_slices(edir, fld, cfg, tag)
                    snaps[fld.time] = fld
                    entry.setdefault("symmetry", {})[tag] = \
                        _symmetry_summary(fld)
                if lf.step_count % 200 == 0:
                    flagged = flagged or (lf.boundary_mass_fraction()
                                          > fdtd.BOUNDARY_GATE)
            write_csv(edir / "series.csv", rows)
            result.series["fdtd"] = rows
            result.snapshot_fields["fdtd"] = snaps
            nh = np.asarray(lf.norm_history)
            entry.update(dt=dt, steps=lf.step_count,
                         norm_drift=float(np.abs(nh / nh[0] - 1.0).max()),
                         boundary_flagged=bool(flagged))
            if flagged:
                print("[diracpack] warning: boundary shell exceeded "
                      "mass gate; reflections may re-enter",
                      file=sys.stderr)
        report["engines"][engine_name] = entry

    _write_report(out, report)
    return result


def _write_report(out, report: dict) -> None:
    (out / "report.json").write_text(
        json.dumps(report, indent=2, sort_keys=True, default=float) + "\n",
        encoding="utf-8")


def summarize_series(columns: dict) -> dict:
    """Re-derive drift/frequency numbers from a series table (used by the
    report subcommand)."""
    times = np.asarray(columns["time"])
    out = {}
    for comp in ("vx", "vy", "vz"):
        vals = np.asarray(columns[comp])
        entry = {"drift": obs.drift_from_series(times, vals)}
        if len(times) >= 32:
            try:
                fit = obs.zb_fit(times, vals)
                if fit.amplitude > 1e-12:
                    entry.update(frequency=fit.frequency,
                                 amplitude=fit.amplitude)
            except obs.SeriesError:
                pass
        out[comp] = entry
    return out
