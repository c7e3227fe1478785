"""Multi-domain ferroelectric switching dynamics.

The film is an ensemble of binary domains. Each domain i carries a sign
(+1 toward the channel, -1 toward the gate), a fixed offset voltage drawn
once from a truncated normal, and a deterministic switching-hazard
accumulator. Under a field-equivalent voltage ``v_fe = e_fe * t_fe`` a
domain opposing the field accumulates ``dt / tau(|v_fe|)`` where

    tau(v) = tau0 * exp((alpha / (v - v_offset))**2)

is the nucleation-limited switching time; it flips when the accumulator
reaches one. Domains aligned with the field never flip, and a reversal of
the field direction clears all accumulators. All stochasticity lives in the
one-time offset-voltage draw, so a (seed, waveform, step policy) triple
fully determines a trajectory.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .electrostatics import solve_operating_point
from .errors import DomainError, NumericalError, ValidationError
from .stack import DeviceParams, PortId


def nls_switching_time(tau0: float, alpha: float, v_offset: float, v_app: float) -> float:
    """Nucleation-limited switching time tau0*exp((alpha/(v_app-v_offset))^2).

    Returns +inf when the applied voltage does not exceed the offset (no
    driving overdrive, no switching).
    """
    dv = v_app - v_offset
    if dv <= 0.0:
        return math.inf
    exponent = (alpha / dv) ** 2
    if exponent > 700.0:
        return math.inf
    return tau0 * math.exp(exponent)


# ---------------------------------------------------------------------------
# waveforms
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Waveform:
    """Piecewise-linear voltage vs time on the two gates.

    Breakpoint times must be strictly increasing; values hold flat before the
    first and after the last breakpoint, out to ``duration``.
    """

    wg_t: np.ndarray
    wg_v: np.ndarray
    rg_t: np.ndarray
    rg_v: np.ndarray
    duration: float

    def __post_init__(self):
        for name, t in (("wg", self.wg_t), ("rg", self.rg_t)):
            if len(t) == 0:
                raise ValidationError(f"{name} needs at least one breakpoint")
            if np.any(np.diff(t) <= 0):
                raise ValidationError(f"{name} breakpoint times must be strictly increasing")
        last = max(self.wg_t[-1], self.rg_t[-1])
        if self.duration < last - 1e-18:
            raise ValidationError(f"duration {self.duration} < last breakpoint {last}")

    @classmethod
    def from_points(cls, wg: list[tuple[float, float]], rg: list[tuple[float, float]],
                    duration: float | None = None) -> "Waveform":
        wg = wg or [(0.0, 0.0)]
        rg = rg or [(0.0, 0.0)]
        wg_t = np.array([t for t, _ in wg], dtype=float)
        wg_v = np.array([v for _, v in wg], dtype=float)
        rg_t = np.array([t for t, _ in rg], dtype=float)
        rg_v = np.array([v for _, v in rg], dtype=float)
        if duration is None:
            duration = float(max(wg_t[-1], rg_t[-1]))
        return cls(wg_t, wg_v, rg_t, rg_v, float(duration))

    @classmethod
    def constant(cls, wg: float = 0.0, rg: float = 0.0, duration: float = 1.0) -> "Waveform":
        return cls.from_points([(0.0, wg)], [(0.0, rg)], duration)

    @classmethod
    def rect(cls, port: PortId, amplitude: float, width: float, edge: float = 1e-8,
             delay: float = 0.0, settle: float = 0.0) -> "Waveform":
        """Trapezoidal pulse on one port, other port grounded."""
        edge = min(edge, width / 10.0)
        pts = [(0.0, 0.0)] if delay == 0.0 else [(0.0, 0.0), (delay, 0.0)]
        t0 = delay
        pts += [(t0 + edge, amplitude), (t0 + edge + width, amplitude),
                (t0 + 2 * edge + width, 0.0)]
        duration = t0 + 2 * edge + width + settle
        flat = [(0.0, 0.0)]
        if port is PortId.WriteGate:
            return cls.from_points(pts, flat, duration)
        return cls.from_points(flat, pts, duration)

    def value(self, port: PortId, t: float) -> float:
        if port is PortId.WriteGate:
            return float(np.interp(t, self.wg_t, self.wg_v))
        return float(np.interp(t, self.rg_t, self.rg_v))

    def values(self, t: float) -> tuple[float, float]:
        return (float(np.interp(t, self.wg_t, self.wg_v)),
                float(np.interp(t, self.rg_t, self.rg_v)))

    def breakpoint_times(self) -> np.ndarray:
        ts = np.unique(np.concatenate([self.wg_t, self.rg_t, [0.0, self.duration]]))
        return ts[(ts >= 0.0) & (ts <= self.duration)]


@dataclass(frozen=True)
class StepPolicy:
    """Time-stepping policy for waveform application.

    Constant-bias segments are stepped logarithmically with at least
    ``steps_per_decade`` steps per decade starting from ``first_step``;
    ramped segments are stepped uniformly with at least ``ramp_steps``.
    """

    steps_per_decade: int = 32
    first_step: float = 1e-9
    ramp_steps: int = 8
    max_step: float | None = None

    def segment_times(self, t0: float, t1: float, constant: bool) -> np.ndarray:
        length = t1 - t0
        if length <= 0:
            return np.array([t1])
        if constant and length > 4.0 * self.first_step:
            decades = math.log10(length / self.first_step)
            n = max(2, int(math.ceil(self.steps_per_decade * decades)))
            rel = np.geomspace(self.first_step, length, n)
        else:
            n = max(self.ramp_steps, 2)
            rel = np.linspace(length / n, length, n)
        if self.max_step is not None and self.max_step < length:
            n_uniform = int(math.ceil(length / self.max_step))
            uniform = np.linspace(length / n_uniform, length, n_uniform)
            rel = np.unique(np.concatenate([rel, uniform]))
        ts = t0 + rel
        ts[-1] = t1
        return ts


# ---------------------------------------------------------------------------
# domain ensemble
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class DomainEnsemble:
    """State of the multi-domain film; treat as immutable."""

    n: int
    sign: np.ndarray        # +-1 per domain
    v_offset: np.ndarray    # V per domain
    accum: np.ndarray       # switching-hazard accumulator in [0, 1)
    seed: int
    p_r: float
    last_field_sign: int = 0

    @property
    def polarization(self) -> float:
        """Net polarization p_r * mean(sign), in C/m^2."""
        return self.p_r * float(self.sign.sum()) / self.n


def init_ensemble(dev: DeviceParams, initial: str | float, seed: int) -> DomainEnsemble:
    """Create an ensemble with offsets drawn from the device's distribution.

    ``initial`` is ``"up"`` (all domains toward the channel, p = +p_r),
    ``"down"`` (p = -p_r), or a float fraction in [0, 1] of up-domains
    assigned deterministically (round-half-up count, first domains up).
    The normal offset draw is truncated at +-3 sigma by resampling.
    """
    n = dev.n_domains
    rng = np.random.default_rng(seed)
    if dev.v_offset_sigma > 0.0:
        v_off = rng.normal(dev.v_offset_mean, dev.v_offset_sigma, size=n)
        for _ in range(1000):
            bad = np.abs(v_off - dev.v_offset_mean) > 3.0 * dev.v_offset_sigma
            if not bad.any():
                break
            v_off[bad] = rng.normal(dev.v_offset_mean, dev.v_offset_sigma, size=int(bad.sum()))
        else:  # pragma: no cover - 3-sigma resampling converges immediately in practice
            v_off = np.clip(v_off, dev.v_offset_mean - 3 * dev.v_offset_sigma,
                            dev.v_offset_mean + 3 * dev.v_offset_sigma)
    else:
        v_off = np.full(n, dev.v_offset_mean)

    sign = np.empty(n, dtype=np.int8)
    if initial == "up":
        sign[:] = 1
    elif initial == "down":
        sign[:] = -1
    else:
        frac = float(initial)
        if not 0.0 <= frac <= 1.0:
            raise DomainError(f"mixed fraction must be in [0, 1], got {frac}")
        n_up = int(math.floor(frac * n + 0.5))
        sign[:n_up] = 1
        sign[n_up:] = -1
    return DomainEnsemble(n=n, sign=sign, v_offset=v_off, accum=np.zeros(n),
                          seed=seed, p_r=dev.p_r)


def step_ensemble(dev: DeviceParams, ens: DomainEnsemble, v_fe: float, dt: float) -> DomainEnsemble:
    """Advance the ensemble by dt under FE-layer voltage v_fe.

    Domains opposing the field accumulate hazard dt/tau and flip at one;
    aligned domains are untouched; a field reversal clears all accumulators.
    """
    if dt <= 0.0:
        raise DomainError(f"dt must be > 0, got {dt}")
    if v_fe == 0.0:
        return ens

    field_sign = 1 if v_fe > 0.0 else -1
    accum = ens.accum.copy()
    if ens.last_field_sign != 0 and field_sign != ens.last_field_sign:
        accum[:] = 0.0

    sign = ens.sign.copy()
    opposing = sign != field_sign
    if opposing.any():
        dv = abs(v_fe) - ens.v_offset[opposing]
        rate = np.zeros(dv.shape)
        drive = dv > 0.0
        if drive.any():
            exponent = (dev.alpha / dv[drive]) ** 2
            rate[drive] = np.exp(-np.minimum(exponent, 745.0)) / dev.tau0
        accum[opposing] += dt * rate
        flipped = opposing & (accum >= 1.0)
        if flipped.any():
            sign[flipped] = field_sign
            accum[flipped] = 0.0
    return replace(ens, sign=sign, accum=accum, last_field_sign=field_sign)


# ---------------------------------------------------------------------------
# waveform application
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Trajectory:
    """Sampled (t, P, e_fe, psi_s) history of one waveform application."""

    t: np.ndarray
    p: np.ndarray
    e_fe: np.ndarray
    psi_s: np.ndarray


def apply_waveform(dev: DeviceParams, ens: DomainEnsemble, wf: Waveform,
                   policy: StepPolicy | None = None) -> tuple[DomainEnsemble, Trajectory]:
    """Evolve the ensemble under a terminal waveform.

    Per step: solve the stack at the current polarization and instantaneous
    biases, convert the FE field to the layer voltage e_fe*t_fe, advance the
    domain hazards, record. Constant-bias segments use logarithmic time
    stepping per the policy.
    """
    policy = policy or StepPolicy()
    breaks = wf.breakpoint_times()
    ts: list[float] = [0.0]
    ps: list[float] = []
    efes: list[float] = []
    psis: list[float] = []

    v_wg, v_rg = wf.values(0.0)
    hint = None
    try:
        sol = solve_operating_point(dev, ens.polarization, v_wg, v_rg, psi_hint=hint)
    except NumericalError as exc:
        raise NumericalError(f"waveform failed at t=0: {exc}", residual=exc.residual) from exc
    hint = sol.psi_s
    ps.append(ens.polarization)
    efes.append(sol.e_fe)
    psis.append(sol.psi_s)

    t_cur = 0.0
    for k in range(len(breaks) - 1):
        t0, t1 = float(breaks[k]), float(breaks[k + 1])
        if t1 <= t0:
            continue
        v0 = wf.values(t0)
        v1 = wf.values(t1)
        constant = (abs(v0[0] - v1[0]) < 1e-15) and (abs(v0[1] - v1[1]) < 1e-15)
        for t_next in policy.segment_times(t0, t1, constant):
            dt = t_next - t_cur
            if dt <= 0.0:
                continue
            v_fe = sol.e_fe * dev.t_fe
            ens = step_ensemble(dev, ens, v_fe, dt)
            t_cur = t_next
            v_wg, v_rg = wf.values(t_cur)
            try:
                sol = solve_operating_point(dev, ens.polarization, v_wg, v_rg, psi_hint=hint)
            except NumericalError as exc:
                raise NumericalError(f"waveform failed at t={t_cur:.6g} s: {exc}",
                                     residual=exc.residual) from exc
            hint = sol.psi_s
            ts.append(t_cur)
            ps.append(ens.polarization)
            efes.append(sol.e_fe)
            psis.append(sol.psi_s)

    traj = Trajectory(t=np.array(ts), p=np.array(ps), e_fe=np.array(efes),
                      psi_s=np.array(psis))
    return ens, traj
