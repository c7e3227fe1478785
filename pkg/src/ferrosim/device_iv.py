"""Drain current, gate sweeps, threshold extraction and memory window.

Transport is a linear-region charge-sheet model: the drain current is
proportional to the electron sheet charge and the (small) drain bias. Gate
sweeps are taken at frozen polarization -- characterization reads are fast
and non-disturbing by assumption; disturb is the protocols module's job.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .electrostatics import ElectrostaticSolution, electron_charge, solve_operating_point
from .errors import DomainError, ExtractionError
from .polarization import Waveform, apply_waveform, init_ensemble
from .stack import DeviceParams, PortId

VTH_CRITERION_A = 1e-7  # constant-current threshold criterion, A * L/W

# default sweep windows wide enough to cover both states on either port
_SWEEP_RANGE = {
    PortId.WriteGate: (-2.0, 2.5),
    PortId.ReadGate: (-7.0, 10.5),
}
_SWEEP_POINTS = 128
DEFAULT_V_DS = 0.1


@dataclass(frozen=True)
class IVCurve:
    """One gate sweep at frozen polarization."""

    port: PortId
    v_g: np.ndarray
    i_d: np.ndarray
    v_ds: float
    p: float


@dataclass(frozen=True)
class MemoryWindow:
    """Threshold pair and their difference; negative if the states invert."""

    vth_low: float
    vth_high: float

    @property
    def mw(self) -> float:
        return self.vth_high - self.vth_low


def drain_current(dev: DeviceParams, sol: ElectrostaticSolution, v_ds: float) -> float:
    """Linear-region drain current at an operating point.

    Only the electron (inversion) sheet charge conducts; hole accumulation
    carries no n-channel current.
    """
    if v_ds < 0.0:
        raise DomainError(f"v_ds must be >= 0, got {v_ds}")
    q_e = min(sol.q_ch, 0.0)
    return dev.mobility_factor * (dev.width / dev.length) * (-q_e / dev.q_ch_scale) * v_ds


def channel_conductance(dev: DeviceParams, sol: ElectrostaticSolution) -> float:
    """d(i_d)/d(v_ds) of the linear-region model, in siemens."""
    q_e = min(sol.q_ch, 0.0)
    return dev.mobility_factor * (dev.width / dev.length) * (-q_e / dev.q_ch_scale)


def id_vg_sweep(dev: DeviceParams, p: float, port: PortId, v_start: float,
                v_stop: float, n: int, v_ds: float = DEFAULT_V_DS) -> IVCurve:
    """I_D-V_G on the named port (other port grounded), polarization frozen."""
    if n < 2:
        raise DomainError(f"n must be >= 2, got {n}")
    if not v_start < v_stop:
        raise DomainError(f"need v_start < v_stop, got {v_start} >= {v_stop}")
    vs = np.linspace(v_start, v_stop, n)
    ids = np.empty(n)
    hint = None
    for i, v in enumerate(vs):
        biases = (float(v), 0.0) if port is PortId.WriteGate else (0.0, float(v))
        sol = solve_operating_point(dev, p, *biases, psi_hint=hint)
        hint = sol.psi_s
        ids[i] = drain_current(dev, sol, v_ds)
    return IVCurve(port=port, v_g=vs, i_d=ids, v_ds=v_ds, p=p)


def extract_vth(curve: IVCurve, width: float, length: float) -> float:
    """Constant-current threshold: V_G where i_d crosses 1e-7 * W/L amperes.

    Log-linear interpolation between the bracketing samples (subthreshold
    current is exponential in V_G). Raises ``ExtractionError`` when the
    criterion is never crossed, reporting the curve's current range.
    """
    i_crit = VTH_CRITERION_A * width / length
    v = curve.v_g
    i = curve.i_d
    pos = i > 0.0
    if not pos.any():
        raise ExtractionError("curve carries no current", i_min=0.0, i_max=0.0)
    i_min, i_max = float(i[pos].min()), float(i.max())
    if i_crit < i_min or i_crit > i_max:
        raise ExtractionError(
            f"criterion {i_crit:.3e} A outside curve range [{i_min:.3e}, {i_max:.3e}] A",
            i_min=i_min, i_max=i_max)
    exact = np.nonzero(i == i_crit)[0]
    if exact.size:
        return float(v[exact[0]])
    above = np.nonzero(i >= i_crit)[0]
    k = int(above[0])
    if k == 0:
        return float(v[0])
    i0, i1 = i[k - 1], i[k]
    if i0 <= 0.0:
        return float(v[k])
    frac = (math.log(i_crit) - math.log(i0)) / (math.log(i1) - math.log(i0))
    return float(v[k - 1] + frac * (v[k] - v[k - 1]))


def standard_write(amplitude: float, width: float = 1e-6, settle: float = 1e-7) -> Waveform:
    """A write-gate pulse of the given signed amplitude, then a short settle."""
    return Waveform.rect(PortId.WriteGate, amplitude, width, settle=settle)


def _sweep_and_extract(dev: DeviceParams, p: float, port: PortId,
                       sweep: tuple[float, float, int] | None, v_ds: float) -> float:
    if sweep is None:
        lo, hi = _SWEEP_RANGE[port]
        n = _SWEEP_POINTS
    else:
        lo, hi, n = sweep
    curve = id_vg_sweep(dev, p, port, lo, hi, n, v_ds)
    return extract_vth(curve, dev.width, dev.length)


def memory_window(dev: DeviceParams, port: PortId, write_plus: Waveform,
                  write_minus: Waveform, seed: int = 0,
                  sweep: tuple[float, float, int] | None = None,
                  v_ds: float = DEFAULT_V_DS) -> MemoryWindow:
    """Window between the states programmed by the two write waveforms.

    Each write is applied to a fresh ensemble started from the same initial
    state (all domains down) and seed, so identical waveforms give a zero
    window exactly. Thresholds are read on ``port`` at frozen polarization.
    """
    states = []
    for wf in (write_plus, write_minus):
        ens = init_ensemble(dev, "down", seed)
        ens, _ = apply_waveform(dev, ens, wf)
        states.append(ens.polarization)
    p_plus, p_minus = states
    vths = []
    for label, p_state in (("low", p_plus), ("high", p_minus)):
        try:
            vths.append(_sweep_and_extract(dev, p_state, port, sweep, v_ds))
        except ExtractionError as exc:
            raise ExtractionError(f"{label} state: {exc}",
                                  i_min=exc.i_min, i_max=exc.i_max) from exc
    return MemoryWindow(vth_low=vths[0], vth_high=vths[1])
