"""Measurement protocols: MW contour maps, switching-law fits, read disturb.

These drive the polarization dynamics and the IV characterization the same
way a probe-station script would: program a state, stress it, and sample
thresholds with fast frozen-polarization sweeps between stress segments.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np

from .constants import SECONDS_PER_10_YEARS
from .device_iv import _sweep_and_extract, memory_window, standard_write
from .errors import DomainError, FerrosimError, FitError
from .polarization import DomainEnsemble, StepPolicy, Waveform, apply_waveform, init_ensemble
from .stack import DeviceParams, PortId
from .util import thread_map

log = logging.getLogger("ferrosim.protocols")

WRITE_AMP = 4.0       # V, standard set/reset amplitude
WRITE_WIDTH = 1e-6    # s, standard write pulse width
RETENTION_CAP = SECONDS_PER_10_YEARS


# ---------------------------------------------------------------------------
# result types
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class MWMap:
    """Memory window opened by a (amplitude, width) program pulse.

    ``scenario`` is ``"from_high"`` (initialize high-threshold, positive set
    pulses open the window) or ``"from_low"`` (initialize low-threshold,
    negative reset pulses open it). ``mw[i, j]`` corresponds to
    ``amp_axis[i]``, ``pw_axis[j]``; failed cells hold NaN.
    """

    amp_axis: np.ndarray
    pw_axis: np.ndarray
    mw: np.ndarray
    scenario: str


@dataclass(frozen=True)
class RetentionTrace:
    """Extracted threshold voltage versus stress time at one read stress."""

    stress_v: float
    port: PortId
    state: str               # "low" or "high"
    stress_t: np.ndarray
    vth: np.ndarray
    vth_initial: float       # pre-stress threshold


@dataclass(frozen=True)
class NlsFit:
    """Fitted nucleation-limited switching law parameters."""

    tau0: float
    alpha: float
    v_offset: float
    rms_log_residual: float


# ---------------------------------------------------------------------------
# MW contour map and iso-MW extraction
# ---------------------------------------------------------------------------

def _scenario_init(scenario: str) -> str:
    if scenario == "from_high":
        return "down"
    if scenario == "from_low":
        return "up"
    raise DomainError(f"unknown scenario {scenario!r}; expected 'from_high' or 'from_low'")


def mw_contour(dev: DeviceParams, amps, pws, scenario: str, seed: int = 0) -> MWMap:
    """Map the window opened by one program pulse over (amplitude, width).

    Per cell: initialize the ensemble per scenario, apply a rectangular
    write-gate pulse, then measure the threshold shift against the
    unperturbed initial state (write-gate read, frozen polarization). Cell
    failures are recorded as NaN with a logged cause.
    """
    amps = np.asarray(list(amps), dtype=float)
    pws = np.asarray(list(pws), dtype=float)
    if amps.size == 0 or pws.size == 0:
        raise DomainError("amps and pws must be non-empty")
    init = _scenario_init(scenario)
    ref = init_ensemble(dev, init, seed)
    vth_ref = _sweep_and_extract(dev, ref.polarization, PortId.WriteGate, None, 0.1)

    def cell(args):
        amp, pw = args
        try:
            ens = init_ensemble(dev, init, seed)
            wf = Waveform.rect(PortId.WriteGate, amp, pw, settle=pw / 10.0)
            ens, _ = apply_waveform(dev, ens, wf)
            vth = _sweep_and_extract(dev, ens.polarization, PortId.WriteGate, None, 0.1)
        except FerrosimError as exc:
            log.warning("mw_contour cell amp=%.3g V pw=%.3g s failed: %s", amp, pw, exc)
            return math.nan
        if scenario == "from_high":
            return vth_ref - vth
        return vth - vth_ref

    jobs = [(float(a), float(w)) for a in amps for w in pws]
    flat = thread_map(cell, jobs)
    mw = np.array(flat).reshape(amps.size, pws.size)
    return MWMap(amp_axis=amps, pw_axis=pws, mw=mw, scenario=scenario)


def iso_mw_curve(mw_map: MWMap, level: float) -> list[tuple[float, float]]:
    """Pulse width needed per amplitude to open the window to ``level``.

    For each amplitude row the first crossing of ``level`` is interpolated
    in log pulse-width; amplitudes that never reach the level are omitted.
    An empty result is returned (with a logged reason), not raised.
    """
    out: list[tuple[float, float]] = []
    for i, amp in enumerate(mw_map.amp_axis):
        row = mw_map.mw[i]
        pws = mw_map.pw_axis
        ok = np.isfinite(row)
        if not ok.any():
            continue
        rv = row[ok]
        pv = pws[ok]
        idx = None
        for k in range(len(rv)):
            if rv[k] >= level:
                idx = k
                break
        if idx is None or idx == 0:
            # never reached, or already past the level at the shortest pulse:
            # no bracketed crossing on this row
            continue
        m0, m1 = rv[idx - 1], rv[idx]
        frac = (level - m0) / (m1 - m0) if m1 > m0 else 1.0
        pw = pv[idx - 1] * (pv[idx] / pv[idx - 1]) ** frac
        out.append((float(amp), float(pw)))
    if not out:
        log.warning("iso_mw_curve: level %.3g V not reached by any amplitude row", level)
    return out


# ---------------------------------------------------------------------------
# switching-law fit
# ---------------------------------------------------------------------------

def _nls_lin_fit(v: np.ndarray, y: np.ndarray, v_offset: float) -> tuple[float, float, float]:
    """Given v_offset, solve ln pw = a + b/(v-v_offset)^2 by least squares.

    Returns (a, b, rss); b is clamped at zero since it represents alpha^2.
    """
    x = 1.0 / (v - v_offset) ** 2
    n = len(x)
    sx, sy = x.sum(), y.sum()
    sxx, sxy = (x * x).sum(), (x * y).sum()
    denom = n * sxx - sx * sx
    if denom <= 0.0:
        return y.mean(), 0.0, float(((y - y.mean()) ** 2).sum())
    b = (n * sxy - sx * sy) / denom
    b = max(b, 0.0)
    a = (sy - b * sx) / n
    resid = y - (a + b * x)
    return a, b, float((resid * resid).sum())


def fit_nls(points) -> NlsFit:
    """Fit (tau0, alpha, v_offset) of the switching law to (v_app, pw) data.

    Minimizes the sum of squared log-time residuals. The model is linear in
    (ln tau0, alpha^2) once v_offset is fixed, so v_offset is scanned on a
    coarse grid over [0, min(v)) and refined by golden-section search.
    """
    pts = [(float(v), float(pw)) for v, pw in points]
    if len(pts) < 4:
        raise FitError(f"need at least 4 points, got {len(pts)}")
    v = np.array([p[0] for p in pts])
    pw = np.array([p[1] for p in pts])
    if np.any(pw <= 0.0):
        raise DomainError("all pulse widths must be > 0")
    if np.unique(v).size < 2:
        raise FitError("degenerate design: all v_app values equal")
    y = np.log(pw)
    v_min = float(v.min())
    eps = max(1e-9, 1e-4 * (float(v.max()) - v_min))
    upper = v_min - eps
    if upper <= 0.0:
        upper = v_min * (1.0 - 1e-6)

    grid = np.linspace(0.0, upper, 256)
    rss_grid = [_nls_lin_fit(v, y, g)[2] for g in grid]
    k = int(np.argmin(rss_grid))
    lo = grid[max(0, k - 1)]
    hi = grid[min(len(grid) - 1, k + 1)]

    phi = (math.sqrt(5.0) - 1.0) / 2.0
    a_g, b_g = lo, hi
    c = b_g - phi * (b_g - a_g)
    d = a_g + phi * (b_g - a_g)
    fc = _nls_lin_fit(v, y, c)[2]
    fd = _nls_lin_fit(v, y, d)[2]
    for _ in range(80):
        if fc < fd:
            b_g, d, fd = d, c, fc
            c = b_g - phi * (b_g - a_g)
            fc = _nls_lin_fit(v, y, c)[2]
        else:
            a_g, c, fc = c, d, fd
            d = a_g + phi * (b_g - a_g)
            fd = _nls_lin_fit(v, y, d)[2]
    v_off = 0.5 * (a_g + b_g)
    a, b, rss = _nls_lin_fit(v, y, v_off)
    if b <= 0.0:
        raise FitError("fit collapsed to alpha = 0; data do not follow the switching law")
    return NlsFit(tau0=math.exp(a), alpha=math.sqrt(b), v_offset=float(v_off),
                  rms_log_residual=math.sqrt(rss / len(pts)))


def nls_model_pw(fit: NlsFit, v_app: float) -> float:
    """Pulse width predicted by a fit at one applied voltage."""
    dv = v_app - fit.v_offset
    if dv <= 0.0:
        return math.inf
    return fit.tau0 * math.exp((fit.alpha / dv) ** 2)


# ---------------------------------------------------------------------------
# read-disturb stress experiments
# ---------------------------------------------------------------------------

def _write_state(dev: DeviceParams, state: str, seed: int) -> DomainEnsemble:
    """Program 'low' or 'high' with the standard +-4 V / 1 us write."""
    if state == "low":
        ens = init_ensemble(dev, "down", seed)
        amp = WRITE_AMP
    elif state == "high":
        ens = init_ensemble(dev, "up", seed)
        amp = -WRITE_AMP
    else:
        raise DomainError(f"unknown state {state!r}; expected 'low' or 'high'")
    ens, _ = apply_waveform(dev, ens, standard_write(amp, WRITE_WIDTH))
    return ens


def _stress_chunk(port: PortId, stress_v: float, duration: float, onset: bool) -> Waveform:
    edge = 1e-8
    if onset:
        pts = [(0.0, 0.0), (edge, stress_v)]
    else:
        pts = [(0.0, stress_v)]
    flat = [(0.0, 0.0)]
    if port is PortId.WriteGate:
        return Waveform.from_points(pts, flat, duration)
    return Waveform.from_points(flat, pts, duration)


def _chunk_policy(duration: float) -> StepPolicy:
    # constant-bias hazard is step-placement independent; scale the first log
    # step with the chunk so ten-year marches stay cheap
    return StepPolicy(first_step=max(1e-9, duration / 300.0))


def read_disturb_experiment(dev: DeviceParams, port: PortId, state: str,
                            stress_vs, stress_ts, seed: int = 0) -> list[RetentionTrace]:
    """Hold a read stress on one port and track the threshold over time.

    Per stress voltage: program the state with the standard write, then hold
    the stress, sampling the write-gate threshold (frozen polarization) at
    each checkpoint. The ensemble keeps evolving across checkpoints; the
    sampling sweeps themselves cannot disturb.
    """
    ts = np.asarray(list(stress_ts), dtype=float)
    if ts.size == 0 or np.any(ts <= 0.0) or np.any(np.diff(ts) <= 0.0):
        raise DomainError("stress_ts must be positive and strictly increasing")

    def one_branch(stress_v: float) -> RetentionTrace:
        ens = _write_state(dev, state, seed)
        vth0 = _sweep_and_extract(dev, ens.polarization, PortId.WriteGate, None, 0.1)
        vths = np.empty(ts.size)
        t_prev = 0.0
        for k, t_k in enumerate(ts):
            try:
                chunk = _stress_chunk(port, stress_v, t_k - t_prev, onset=(k == 0))
                ens_new, _ = apply_waveform(dev, ens, chunk, _chunk_policy(t_k - t_prev))
                ens = ens_new
                vths[k] = _sweep_and_extract(dev, ens.polarization, PortId.WriteGate, None, 0.1)
            except FerrosimError as exc:
                raise type(exc)(
                    f"disturb branch stress_v={stress_v:.3g} V failed at "
                    f"stress_t={t_k:.3g} s: {exc}") from exc
            t_prev = t_k
        return RetentionTrace(stress_v=float(stress_v), port=port, state=state,
                              stress_t=ts.copy(), vth=vths, vth_initial=vth0)

    return thread_map(one_branch, [float(v) for v in stress_vs])


def log_times(t_min: float = 1e-7, t_max: float = 1e3, per_decade: int = 8) -> np.ndarray:
    """Log-spaced stress checkpoint times, ``per_decade`` points per decade."""
    decades = math.log10(t_max / t_min)
    n = max(2, int(round(per_decade * decades)) + 1)
    return np.geomspace(t_min, t_max, n)


def retention_time(dev: DeviceParams, port: PortId, state: str, stress_v: float,
                   vth_loss_fraction: float = 0.5, cap: float = RETENTION_CAP,
                   seed: int = 0, per_decade: int = 8, t_min: float = 1e-7) -> float:
    """First stress time at which the threshold has moved by the given
    fraction of the unperturbed memory window; the cap when never reached.

    Marches checkpoints logarithmically out to ``cap`` (default ten years),
    evolving the ensemble between checkpoints, and returns the checkpoint
    time of the first crossing.
    """
    if not 0.0 < vth_loss_fraction < 1.0:
        raise DomainError(f"vth_loss_fraction must be in (0, 1), got {vth_loss_fraction}")
    mw0 = memory_window(dev, PortId.WriteGate, standard_write(WRITE_AMP),
                        standard_write(-WRITE_AMP), seed=seed).mw
    threshold = vth_loss_fraction * abs(mw0)

    ens = _write_state(dev, state, seed)
    vth0 = _sweep_and_extract(dev, ens.polarization, PortId.WriteGate, None, 0.1)
    ts = log_times(t_min, cap, per_decade)
    t_prev = 0.0
    for k, t_k in enumerate(ts):
        if stress_v == 0.0:
            chunk = Waveform.constant(0.0, 0.0, duration=t_k - t_prev)
        else:
            chunk = _stress_chunk(port, stress_v, t_k - t_prev, onset=(k == 0))
        ens, _ = apply_waveform(dev, ens, chunk, _chunk_policy(t_k - t_prev))
        vth = _sweep_and_extract(dev, ens.polarization, PortId.WriteGate, None, 0.1)
        if abs(vth - vth0) >= threshold:
            return float(t_k)
        t_prev = t_k
    return float(cap)
