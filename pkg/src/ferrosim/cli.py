"""Command-line entry point.

One subcommand per protocol or circuit. Every run writes its CSV results,
a ``manifest.json`` capturing the resolved configuration, seed, and argv
(so ``ferrosim replay manifest.json`` reproduces the outputs bit-for-bit),
and optionally an SVG chart per table when ``--plot`` is given.

Exit codes: 0 success, 2 configuration/usage error, 3 numerical error,
4 I/O error.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__, csvio, svgplot
from .circuits import (CircuitConfig, simulate_lut, simulate_ring_oscillator,
                       simulate_switch)
from .device_iv import id_vg_sweep, memory_window, standard_write
from .electrostatics import efe_vs_vread
from .errors import (ConfigurationError, DivergenceError, DomainError, ExtractionError,
                     FerrosimError, FitError, NumericalError, StabilityError,
                     StagnationError, ValidationError)
from .polarization import Waveform
from .protocols import (RETENTION_CAP, fit_nls, iso_mw_curve, log_times, mw_contour,
                        read_disturb_experiment, retention_time)
from .stack import (DeviceParams, PortId, default_fdsoi22, load_circuit_section,
                    load_device_config)

_NUMERICAL_ERRORS = (NumericalError, DomainError, ValidationError, ExtractionError,
                     FitError, StabilityError, DivergenceError, StagnationError)


def _add_common(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--config", help="device config file (INI, [device] section)")
    sub.add_argument("--seed", type=int, default=0, help="ensemble RNG seed (u64)")
    sub.add_argument("--out-dir", default=".", help="output directory")
    sub.add_argument("--plot", action="store_true", help="also emit SVG charts")


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ferrosim",
        description="Dual-port FeFET compact simulator: electrostatics, switching "
                    "dynamics, read-disturb protocols and demo circuits.")
    parser.add_argument("--version", action="version", version=f"ferrosim {__version__}")
    subs = parser.add_subparsers(dest="command", required=True)

    p = subs.add_parser("efe-sweep", help="ferroelectric field vs read bias")
    _add_common(p)
    p.add_argument("--port", default="wg", help="swept port: wg or rg")
    p.add_argument("--state", default="low", choices=["low", "high"],
                   help="polarization state (low = +p_r, high = -p_r)")
    p.add_argument("--p", type=float, default=None,
                   help="explicit polarization in C/m^2 (overrides --state)")
    p.add_argument("--vmin", type=float, default=0.0, help="sweep start, V")
    p.add_argument("--vmax", type=float, default=2.0, help="sweep stop, V")
    p.add_argument("--n", type=int, default=64, help="number of points")

    p = subs.add_parser("iv-sweep", help="drain current vs gate bias")
    _add_common(p)
    p.add_argument("--port", default="wg", help="swept port: wg or rg")
    p.add_argument("--state", default="low", choices=["low", "high"])
    p.add_argument("--p", type=float, default=None, help="explicit polarization, C/m^2")
    p.add_argument("--vstart", type=float, default=-2.0, help="sweep start, V")
    p.add_argument("--vstop", type=float, default=2.5, help="sweep stop, V")
    p.add_argument("--n", type=int, default=128, help="number of points")
    p.add_argument("--vds", type=float, default=0.1, help="drain bias, V")

    p = subs.add_parser("mw-map", help="memory-window contour over write pulses")
    _add_common(p)
    p.add_argument("--scenario", default="from_high", choices=["from_high", "from_low"])
    p.add_argument("--amp-min", type=float, default=-4.0, help="pulse amplitude axis start, V")
    p.add_argument("--amp-max", type=float, default=4.0, help="pulse amplitude axis stop, V")
    p.add_argument("--amp-n", type=int, default=17, help="amplitude points")
    p.add_argument("--pw-min", type=float, default=1e-7, help="pulse width axis start, s")
    p.add_argument("--pw-max", type=float, default=1e-2, help="pulse width axis stop, s")
    p.add_argument("--pw-per-decade", type=int, default=4, help="pulse widths per decade")

    p = subs.add_parser("iso-mw", help="iso-window pulse width vs amplitude from a map CSV")
    _add_common(p)
    p.add_argument("--input", required=True, help="mw-map CSV (amp_V,pw_s,mw_V,scenario)")
    p.add_argument("--level", type=float, default=1.0, help="window level, V")

    p = subs.add_parser("fit-nls", help="fit the switching law to (v_app, pw) points")
    _add_common(p)
    p.add_argument("--input", required=True, help="CSV with header v_app_V,pw_s")

    p = subs.add_parser("disturb", help="read-stress retention trace")
    _add_common(p)
    p.add_argument("--port", default="wg", help="stressed port: wg or rg")
    p.add_argument("--state", default="high", choices=["low", "high"])
    p.add_argument("--vread", type=float, default=1.4, help="stress voltage, V")
    p.add_argument("--tmin", type=float, default=1e-7, help="first checkpoint, s")
    p.add_argument("--tmax", type=float, default=1e3, help="last checkpoint, s")
    p.add_argument("--per-decade", type=int, default=8, help="checkpoints per decade")

    p = subs.add_parser("retention", help="time to a threshold-loss fraction")
    _add_common(p)
    p.add_argument("--port", default="wg", help="stressed port: wg or rg")
    p.add_argument("--state", default="high", choices=["low", "high"])
    p.add_argument("--vread", type=float, default=1.4, help="stress voltage, V")
    p.add_argument("--loss-fraction", type=float, default=0.5,
                   help="fraction of the memory window counted as lost")
    p.add_argument("--cap", type=float, default=RETENTION_CAP,
                   help="search horizon, s (returned when never crossed)")

    p = subs.add_parser("circuit-switch", help="routing-switch transient")
    _add_common(p)
    p.add_argument("--port", default="rg", help="activation port: wg or rg")
    p.add_argument("--state", default="low", choices=["low", "high"])
    p.add_argument("--activation", type=float, default=None,
                   help="activation bias, V (default 0.25 wg / 3.0 rg)")
    p.add_argument("--input-amp", type=float, default=0.5, help="input square amplitude, V")
    p.add_argument("--periods", type=int, default=3, help="input periods simulated")

    p = subs.add_parser("circuit-lut", help="LUT cell read transient")
    _add_common(p)
    p.add_argument("--logic", default="1", choices=["0", "1"], help="stored value")
    p.add_argument("--read-port", default="rg", help="read port: wg or rg")
    p.add_argument("--read-v", type=float, default=None,
                   help="read pulse amplitude, V (default 0.8 wg / 3.0 rg)")

    p = subs.add_parser("circuit-ro", help="ring-oscillator transient and frequency")
    _add_common(p)
    p.add_argument("--stages", type=int, default=3, help="odd stage count >= 3")
    p.add_argument("--write", type=float, default=4.0, help="write amplitude, V")

    p = subs.add_parser("replay", help="re-run a previous invocation from its manifest")
    p.add_argument("manifest", help="manifest.json written by a previous run")
    p.add_argument("--out-dir", default=None, help="override output directory")
    return parser


def _device(args) -> DeviceParams:
    if getattr(args, "config", None):
        return load_device_config(args.config)
    return default_fdsoi22()


def _circuit_cfg(args, **overrides) -> CircuitConfig:
    base: dict = {}
    if getattr(args, "config", None):
        base.update(load_circuit_section(args.config))
    base.update(overrides)
    return CircuitConfig(**base)


def _state_p(dev: DeviceParams, args) -> float:
    if getattr(args, "p", None) is not None:
        return args.p
    return dev.p_r if args.state == "low" else -dev.p_r


def _square_wave(amplitude: float, period: float, periods: int) -> Waveform:
    """Square-ish input: fast linear edges, value carried on the wg channel."""
    edge = period / 200.0
    pts = [(0.0, 0.0)]
    t = 0.0
    for _ in range(periods):
        pts += [(t + period / 2, 0.0), (t + period / 2 + edge, amplitude),
                (t + period, amplitude), (t + period + edge, 0.0)]
        t += period + 2 * edge
    return Waveform.from_points(pts, [(0.0, 0.0)], duration=t + period / 2)


def _run(args, out_dir: Path) -> list[str]:
    """Execute one subcommand; returns the list of files written."""
    written: list[str] = []

    def out(name: str) -> Path:
        written.append(name)
        return out_dir / name

    cmd = args.command
    if cmd == "efe-sweep":
        dev = _device(args)
        port = PortId.parse(args.port)
        curve = efe_vs_vread(dev, _state_p(dev, args), port, args.vmin, args.vmax, args.n)
        csvio.write_efe_curve(out("efe_sweep.csv"), curve)
        if args.plot:
            svgplot.line_chart(out("efe_sweep.svg"), curve.v_read,
                               {"e_fe": curve.e_fe}, "v_read (V)", "e_fe (V/m)",
                               f"FE field vs {port.value} read bias")

    elif cmd == "iv-sweep":
        dev = _device(args)
        port = PortId.parse(args.port)
        curve = id_vg_sweep(dev, _state_p(dev, args), port, args.vstart, args.vstop,
                            args.n, args.vds)
        csvio.write_iv_curve(out("iv_sweep.csv"), curve)
        if args.plot:
            svgplot.line_chart(out("iv_sweep.svg"), curve.v_g, {"i_d": curve.i_d},
                               "v_g (V)", "i_d (A)", f"{port.value} transfer curve",
                               logy=True)

    elif cmd == "mw-map":
        dev = _device(args)
        amps = np.linspace(args.amp_min, args.amp_max, args.amp_n)
        pws = log_times(args.pw_min, args.pw_max, args.pw_per_decade)
        mw_map = mw_contour(dev, amps, pws, args.scenario, seed=args.seed)
        csvio.write_mw_map(out("mw_map.csv"), mw_map)
        if args.plot:
            svgplot.contour_chart(out("mw_map.svg"), mw_map.amp_axis, mw_map.pw_axis,
                                  mw_map.mw, "amplitude (V)", "pulse width (s)",
                                  f"MW map ({args.scenario})")

    elif cmd == "iso-mw":
        mw_map = csvio.read_mw_map(args.input)
        points = iso_mw_curve(mw_map, args.level)
        csvio.write_iso_mw(out("iso_mw.csv"), points)
        if args.plot and points:
            arr = np.array(points)
            svgplot.line_chart(out("iso_mw.svg"), arr[:, 0], {"pw": arr[:, 1]},
                               "amplitude (V)", "pulse width (s)",
                               f"iso-MW {args.level} V", logy=True)

    elif cmd == "fit-nls":
        points = csvio.read_fit_points(args.input)
        fit = fit_nls(points)
        csvio.write_nls_report(out("nls_fit.txt"), fit, points)
        print(f"tau0 = {fit.tau0:.6g} s, alpha = {fit.alpha:.6g} V, "
              f"v_offset = {fit.v_offset:.6g} V, rms log residual = "
              f"{fit.rms_log_residual:.4g}")

    elif cmd == "disturb":
        dev = _device(args)
        port = PortId.parse(args.port)
        ts = log_times(args.tmin, args.tmax, args.per_decade)
        traces = read_disturb_experiment(dev, port, args.state, [args.vread], ts,
                                         seed=args.seed)
        csvio.write_retention_trace(out("disturb.csv"), traces[0])
        if args.plot:
            svgplot.line_chart(out("disturb.svg"), traces[0].stress_t,
                               {"vth": traces[0].vth}, "stress time (s)", "vth (V)",
                               f"{args.state} state, {args.vread} V on {port.value}",
                               logx=True)

    elif cmd == "retention":
        dev = _device(args)
        port = PortId.parse(args.port)
        t_ret = retention_time(dev, port, args.state, args.vread,
                               vth_loss_fraction=args.loss_fraction, cap=args.cap,
                               seed=args.seed)
        with open(out("retention.txt"), "w", encoding="utf-8", newline="") as handle:
            handle.write(f"retention_time_s = {t_ret:.10g}\n")
            handle.write(f"capped = {t_ret >= args.cap}\n")
        print(f"retention time: {t_ret:.4g} s" + (" (cap)" if t_ret >= args.cap else ""))

    elif cmd == "circuit-switch":
        dev = _device(args)
        port = PortId.parse(args.port)
        v_act = args.activation
        if v_act is None:
            v_act = 0.25 if port is PortId.WriteGate else 3.0
        cfg = _circuit_cfg(args, topology="switch", c_node=1e-11)
        p = _state_p(dev, args)
        # input period scaled to the pass-state settling time, not the load RC
        wf = _square_wave(args.input_amp, period=5e5 * cfg.c_node, periods=args.periods)
        trace = simulate_switch(dev, p, (port, v_act), wf, cfg)
        csvio.write_transient_trace(out("switch.csv"), trace)
        if args.plot:
            svgplot.line_chart(out("switch.svg"), trace.t,
                               {n: trace.node(n) for n in trace.node_names},
                               "t (s)", "V", f"switch {args.state}/{port.value}")

    elif cmd == "circuit-lut":
        dev = _device(args)
        port = PortId.parse(args.read_port)
        v_read = args.read_v
        if v_read is None:
            v_read = 0.8 if port is PortId.WriteGate else 3.0
        cfg = _circuit_cfg(args, topology="lut", vdd=1.0, v_switch=0.5, c_node=1e-11)
        upper, lower = (dev.p_r, -dev.p_r) if args.logic == "1" else (-dev.p_r, dev.p_r)
        tau = cfg.c_node / 2e-4  # on-state settling scale
        wf = Waveform.rect(port, v_read, width=40.0 * tau, edge=2.0 * tau, delay=5.0 * tau)
        trace = simulate_lut(dev, upper, lower, port, wf, cfg)
        csvio.write_transient_trace(out("lut.csv"), trace)
        if args.plot:
            svgplot.line_chart(out("lut.svg"), trace.t,
                               {n: trace.node(n) for n in trace.node_names},
                               "t (s)", "V", f"LUT logic {args.logic} via {port.value}")

    elif cmd == "circuit-ro":
        dev = _device(args)
        cfg = _circuit_cfg(args, topology="ring", n_stages=args.stages)
        trace, freq = simulate_ring_oscillator(dev, cfg, args.write, seed=args.seed)
        csvio.write_transient_trace(out("ring.csv"), trace)
        csvio.write_frequency_report(out("frequency.txt"), freq,
                                     {"stages": args.stages, "write_amp_V": args.write})
        print(f"oscillation frequency: {freq / 1e3:.4g} kHz")
        if args.plot:
            svgplot.line_chart(out("ring.svg"), trace.t,
                               {n: trace.node(n) for n in trace.node_names},
                               "t (s)", "V", f"{args.stages}-stage ring, "
                                             f"write {args.write} V")
    else:  # pragma: no cover - argparse restricts choices
        raise ConfigurationError(f"unknown subcommand {cmd!r}")
    return written


def _manifest(args, argv: list[str], out_dir: Path, written: list[str],
              duration: float) -> None:
    dev = None
    try:
        if hasattr(args, "seed"):
            dev = dataclasses.asdict(_device(args))
    except FerrosimError:
        dev = None
    manifest = {
        "tool": "ferrosim",
        "version": __version__,
        "subcommand": args.command,
        "argv": argv,
        "seed": getattr(args, "seed", None),
        "out_dir": str(out_dir),
        "device": dev,
        "outputs": written,
        "duration_s": duration,
    }
    with open(out_dir / "manifest.json", "w", encoding="utf-8", newline="") as handle:
        json.dump(manifest, handle, indent=2, sort_keys=True)
        handle.write("\n")


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)

    if args.command == "replay":
        try:
            with open(args.manifest, encoding="utf-8") as handle:
                manifest = json.load(handle)
            stored = list(manifest["argv"])
        except (OSError, KeyError, json.JSONDecodeError) as exc:
            print(f"ferrosim: cannot replay manifest: {exc}", file=sys.stderr)
            return 2
        if args.out_dir is not None:
            stored = _override_out_dir(stored, args.out_dir)
        return main(stored)

    out_dir = Path(args.out_dir)
    start = time.perf_counter()
    try:
        out_dir.mkdir(parents=True, exist_ok=True)
        written = _run(args, out_dir)
        _manifest(args, argv, out_dir, written, time.perf_counter() - start)
    except ConfigurationError as exc:
        print(f"ferrosim: configuration error: {exc}", file=sys.stderr)
        return 2
    except _NUMERICAL_ERRORS as exc:
        print(f"ferrosim: numerical error: {exc}", file=sys.stderr)
        return 3
    except OSError as exc:
        print(f"ferrosim: I/O error: {exc}", file=sys.stderr)
        return 4
    return 0


def _override_out_dir(argv: list[str], out_dir: str) -> list[str]:
    out = []
    skip = False
    for i, tok in enumerate(argv):
        if skip:
            skip = False
            continue
        if tok == "--out-dir":
            skip = True
            continue
        if tok.startswith("--out-dir="):
            continue
        out.append(tok)
    return out + ["--out-dir", out_dir]


if __name__ == "__main__":
    raise SystemExit(main())
