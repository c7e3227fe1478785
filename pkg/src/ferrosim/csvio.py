"""CSV writers/readers for every exported result table.

All files are UTF-8 with Unix newlines and a mandatory header row. Floats
are written with repr-stable %.10g so identical runs produce identical
bytes.
"""

from __future__ import annotations

import csv
from pathlib import Path

import numpy as np

from .circuits import TransientTrace
from .device_iv import IVCurve, MemoryWindow
from .electrostatics import BandProfile, EfeCurve
from .errors import ConfigurationError
from .polarization import Trajectory
from .protocols import MWMap, NlsFit, RetentionTrace, nls_model_pw


def _fmt(x: float) -> str:
    return f"{x:.10g}"


def _open_writer(path):
    handle = open(path, "w", encoding="utf-8", newline="")
    return handle, csv.writer(handle, lineterminator="\n")


def write_efe_curve(path, curve: EfeCurve) -> None:
    handle, w = _open_writer(path)
    with handle:
        w.writerow(["v_read", "e_fe_Vpm"])
        for v, e in zip(curve.v_read, curve.e_fe):
            w.writerow([_fmt(v), _fmt(e)])


def write_band_profile(path, profile: BandProfile) -> None:
    handle, w = _open_writer(path)
    with handle:
        w.writerow(["depth_m", "potential_V"])
        for d, p in zip(profile.depth, profile.potential):
            w.writerow([_fmt(d), _fmt(p)])


def write_trajectory(path, traj: Trajectory) -> None:
    handle, w = _open_writer(path)
    with handle:
        w.writerow(["t_s", "P_Cpm2", "e_fe_Vpm", "psi_s_V"])
        for row in zip(traj.t, traj.p, traj.e_fe, traj.psi_s):
            w.writerow([_fmt(x) for x in row])


def write_iv_curve(path, curve: IVCurve) -> None:
    handle, w = _open_writer(path)
    with handle:
        w.writerow(["v_g", "i_d_A"])
        for v, i in zip(curve.v_g, curve.i_d):
            w.writerow([_fmt(v), _fmt(i)])


def write_mw_report(path, port_name: str, window: MemoryWindow) -> None:
    handle, w = _open_writer(path)
    with handle:
        w.writerow(["port", "vth_low_V", "vth_high_V", "mw_V"])
        w.writerow([port_name, _fmt(window.vth_low), _fmt(window.vth_high), _fmt(window.mw)])


def write_mw_map(path, mw_map: MWMap) -> None:
    """Long format, one row per (amplitude, pulse width) cell."""
    handle, w = _open_writer(path)
    with handle:
        w.writerow(["amp_V", "pw_s", "mw_V", "scenario"])
        for i, amp in enumerate(mw_map.amp_axis):
            for j, pw in enumerate(mw_map.pw_axis):
                w.writerow([_fmt(amp), _fmt(pw), _fmt(mw_map.mw[i, j]), mw_map.scenario])


def read_mw_map(path) -> MWMap:
    amps, pws, vals = [], [], {}
    scenario = "from_high"
    with open(path, encoding="utf-8") as handle:
        reader = csv.DictReader(handle)
        if reader.fieldnames is None or "amp_V" not in reader.fieldnames:
            raise ConfigurationError(f"{path}: expected header amp_V,pw_s,mw_V,scenario")
        for row in reader:
            a, p = float(row["amp_V"]), float(row["pw_s"])
            vals[(a, p)] = float(row["mw_V"])
            scenario = row.get("scenario", scenario)
            if a not in amps:
                amps.append(a)
            if p not in pws:
                pws.append(p)
    amps_arr = np.array(sorted(amps))
    pws_arr = np.array(sorted(pws))
    grid = np.full((amps_arr.size, pws_arr.size), np.nan)
    for i, a in enumerate(amps_arr):
        for j, p in enumerate(pws_arr):
            grid[i, j] = vals.get((a, p), np.nan)
    return MWMap(amp_axis=amps_arr, pw_axis=pws_arr, mw=grid, scenario=scenario)


def write_iso_mw(path, points: list[tuple[float, float]]) -> None:
    handle, w = _open_writer(path)
    with handle:
        w.writerow(["amp_V", "pw_s"])
        for amp, pw in points:
            w.writerow([_fmt(amp), _fmt(pw)])


def write_retention_trace(path, trace: RetentionTrace) -> None:
    handle, w = _open_writer(path)
    with handle:
        w.writerow(["port", "state", "stress_V", "stress_t_s", "vth_V"])
        for t, vth in zip(trace.stress_t, trace.vth):
            w.writerow([trace.port.value, trace.state, _fmt(trace.stress_v),
                        _fmt(t), _fmt(vth)])


def read_fit_points(path) -> list[tuple[float, float]]:
    """Input table for the switching-law fit: header v_app_V,pw_s."""
    points = []
    with open(path, encoding="utf-8") as handle:
        reader = csv.DictReader(handle)
        if reader.fieldnames is None or set(reader.fieldnames) < {"v_app_V", "pw_s"}:
            raise ConfigurationError(f"{path}: expected header v_app_V,pw_s")
        for row in reader:
            points.append((float(row["v_app_V"]), float(row["pw_s"])))
    return points


def write_nls_report(path, fit: NlsFit, points: list[tuple[float, float]]) -> None:
    """Plain-text key-value summary followed by the residual table."""
    import math
    with open(path, "w", encoding="utf-8", newline="") as handle:
        handle.write(f"tau0_s = {_fmt(fit.tau0)}\n")
        handle.write(f"alpha_V = {_fmt(fit.alpha)}\n")
        handle.write(f"v_offset_V = {_fmt(fit.v_offset)}\n")
        handle.write(f"rms_log_residual = {_fmt(fit.rms_log_residual)}\n")
        handle.write("\nv_app_V,pw_s,model_pw_s,log_residual\n")
        for v, pw in points:
            model = nls_model_pw(fit, v)
            resid = math.log(pw) - math.log(model) if math.isfinite(model) else math.nan
            handle.write(f"{_fmt(v)},{_fmt(pw)},{_fmt(model)},{_fmt(resid)}\n")


def write_transient_trace(path, trace: TransientTrace) -> None:
    handle, w = _open_writer(path)
    with handle:
        w.writerow(["t_s"] + [f"{name}_V" for name in trace.node_names])
        for k in range(len(trace.t)):
            w.writerow([_fmt(trace.t[k])] + [_fmt(x) for x in trace.v[k]])


def write_frequency_report(path, freq: float, extras: dict | None = None) -> None:
    with open(path, "w", encoding="utf-8", newline="") as handle:
        handle.write(f"frequency_Hz = {_fmt(freq)}\n")
        for key, value in (extras or {}).items():
            handle.write(f"{key} = {value}\n")
