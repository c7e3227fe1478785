"""Fixed-topology transient engine and the three demo circuits.

The engine integrates C*dv/dt = sum(currents) per floating node with an
explicit midpoint (RK2) rule. FeFETs contribute a linear-region channel
conductance solved from the stack electrostatics at frozen polarization,
with both gate ports referenced to the instantaneous source potential.
Logic inverters are behavioral: a resistive pull toward a rail selected by
a steep smooth threshold on the input.

Topologies:

* ``switch``  -- one FeFET pass gate: input drives the source, the drain is
  loaded by r_load parallel c_node.
* ``lut``     -- two FeFETs in series between vdd and ground storing
  complementary states; the middle node is the output.
* ``ring``    -- an odd ring: stage one is a FeFET with a resistive pull-up,
  remaining stages are inverters; the feedback drives the FeFET read gate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .device_iv import channel_conductance
from .electrostatics import solve_operating_point
from .errors import (DivergenceError, DomainError, StabilityError, StagnationError,
                     ValidationError)
from .polarization import StepPolicy, Waveform, apply_waveform, init_ensemble
from .stack import DeviceParams, PortId

STABILITY_FACTOR = 10.0  # dt must be at most min(RC)/10
DEFAULT_DT_FACTOR = 40.0


@dataclass(frozen=True)
class CircuitConfig:
    """Passive component values and the behavioral inverter model.

    The shipped defaults are calibrated so the three-stage ring oscillator
    lands near its reference frequencies (see configs/ring_oscillator.cfg).
    """

    topology: str = "ring"       # "switch" | "lut" | "ring"
    n_stages: int = 3
    r_load: float = 2e6          # ohm, switch drain load
    r_pull: float = 5.0e4        # ohm, ring stage-one pull-up
    r_on: float = 1.0e4          # ohm, inverter output resistance
    c_node: float = 1.6e-10      # F, per node
    vdd: float = 5.0             # V
    v_switch: float = 0.85       # V, inverter threshold (inside the FeFET
                                 # stage's output band so the ring toggles)
    v_switch_width: float = 0.1  # V, inverter transition width

    def __post_init__(self):
        for name in ("r_load", "r_pull", "r_on", "c_node", "vdd"):
            if not getattr(self, name) > 0:
                raise ValidationError(f"{name} must be > 0, got {getattr(self, name)!r}")
        if self.topology == "ring":
            if self.n_stages < 3 or self.n_stages % 2 == 0:
                raise ValidationError(f"n_stages must be odd and >= 3, got {self.n_stages}")


@dataclass(frozen=True)
class TransientTrace:
    """Node voltages on a uniform time grid."""

    t: np.ndarray
    v: np.ndarray            # shape (len(t), n_nodes)
    node_names: tuple[str, ...]

    def node(self, name: str) -> np.ndarray:
        return self.v[:, self.node_names.index(name)]


class _FetElement:
    """Channel conductance between source and drain, gate(s) per waveform/node.

    ``gate_port`` names which gate carries the signal; the other gate is held
    at ``other_bias``. Both gate voltages are referenced to the source.
    """

    def __init__(self, dev: DeviceParams, p: float, gate_port: PortId,
                 other_bias: float = 0.0):
        self.dev = dev
        self.p = p
        self.gate_port = gate_port
        self.other_bias = other_bias
        self._hint: float | None = None

    def conductance(self, v_gate: float, v_source: float) -> float:
        if self.gate_port is PortId.WriteGate:
            v_wg, v_rg = v_gate - v_source, self.other_bias - v_source
        else:
            v_wg, v_rg = self.other_bias - v_source, v_gate - v_source
        sol = solve_operating_point(self.dev, self.p, v_wg, v_rg, psi_hint=self._hint)
        self._hint = sol.psi_s
        return channel_conductance(self.dev, sol)

    def max_conductance(self, v_gate_max: float) -> float:
        saved = self._hint
        g = self.conductance(v_gate_max, 0.0)
        self._hint = saved
        return g


def _inverter_target(v_in: float, cfg: CircuitConfig) -> float:
    """Rail the inverter output pulls toward (smooth threshold)."""
    x = (v_in - cfg.v_switch) / cfg.v_switch_width
    if x > 35.0:
        return 0.0
    if x < -35.0:
        return cfg.vdd
    return cfg.vdd * 0.5 * (1.0 - math.tanh(x))


class _Network:
    """Assembled fixed topology: floating nodes plus current contributions."""

    def __init__(self, names: list[str], c_node: float):
        self.names = names
        self.c = c_node
        self.resistors: list[tuple[int, int | None, float, float]] = []
        # (node, other_node or None for a fixed rail, rail_v, conductance)
        self.fets: list[tuple[_FetElement, int | None, float, int | None, float, int | None, float]] = []
        # (fet, gate_node or None, gate_const, source_node or None, source_const,
        #  drain_node or None, drain_const)
        self.inverters: list[tuple[int | None, int]] = []  # (in_node or -1 -> const, out_node)
        self.inverter_in_const: dict[int, float] = {}
        self.driven: list[tuple[int, object]] = []  # (node, waveform fn(t) -> V)

    def index(self, name: str) -> int:
        return self.names.index(name)


def _rk2(network: _Network, cfg: CircuitConfig, v0: np.ndarray, t_end: float,
         dt: float, record_every: int = 1) -> TransientTrace:
    n = len(network.names)
    steps = max(1, int(math.ceil(t_end / dt)))
    v = v0.copy()

    def set_driven(t: float, vec: np.ndarray):
        for node, fn in network.driven:
            vec[node] = fn(t)

    def derivative(t: float, vec: np.ndarray) -> np.ndarray:
        cur = np.zeros(n)
        for node, other, rail, g in network.resistors:
            v_other = rail if other is None else vec[other]
            cur[node] += (v_other - vec[node]) * g
            if other is not None:
                cur[other] += (vec[node] - v_other) * g
        for fet, g_node, g_const, s_node, s_const, d_node, d_const in network.fets:
            vg = g_const if g_node is None else vec[g_node]
            vs = s_const if s_node is None else vec[s_node]
            vd = d_const if d_node is None else vec[d_node]
            g = fet.conductance(vg, vs)
            i_sd = g * (vs - vd)  # current flowing source -> drain
            if d_node is not None:
                cur[d_node] += i_sd
            if s_node is not None:
                cur[s_node] -= i_sd
        for in_node, out_node in network.inverters:
            v_in = network.inverter_in_const[out_node] if in_node is None else vec[in_node]
            target = _inverter_target(v_in, cfg)
            cur[out_node] += (target - vec[out_node]) / cfg.r_on
        dv = cur / network.c
        for node, _ in network.driven:
            dv[node] = 0.0
        return dv

    set_driven(0.0, v)
    times = [0.0]
    states = [v.copy()]
    t = 0.0
    for k in range(steps):
        h = min(dt, t_end - t)
        if h <= 0:
            break
        k1 = derivative(t, v)
        mid = v + 0.5 * h * k1
        set_driven(t + 0.5 * h, mid)
        k2 = derivative(t + 0.5 * h, mid)
        v = v + h * k2
        t += h
        set_driven(t, v)
        if not np.all(np.isfinite(v)) or np.any(np.abs(v) > 1e3):
            raise DivergenceError(f"non-finite or runaway node voltage at t={t:.6g} s", t=t)
        if (k + 1) % record_every == 0 or k == steps - 1:
            times.append(t)
            states.append(v.copy())
    return TransientTrace(t=np.array(times), v=np.array(states),
                          node_names=tuple(network.names))


def _check_dt(dt: float, min_rc: float):
    if dt > min_rc / STABILITY_FACTOR:
        raise StabilityError(
            f"dt={dt:.3g} s exceeds stability bound {min_rc / STABILITY_FACTOR:.3g} s "
            f"(min RC = {min_rc:.3g} s)")


# ---------------------------------------------------------------------------
# public operations
# ---------------------------------------------------------------------------

def transient_solve(cfg: CircuitConfig, network: _Network, t_end: float, dt: float,
                    min_rc: float, v0: np.ndarray | None = None,
                    record_every: int = 1) -> TransientTrace:
    """Integrate an assembled network; explicit RK2 with a stability precheck."""
    _check_dt(dt, min_rc)
    if v0 is None:
        v0 = np.zeros(len(network.names))
    return _rk2(network, cfg, v0, t_end, dt, record_every)


def _switch_network(dev: DeviceParams, p: float, activation: tuple[PortId, float],
                    input_wf: Waveform, cfg: CircuitConfig) -> tuple[_Network, float]:
    port, v_act = activation
    net = _Network(["in", "out"], cfg.c_node)
    fet = _FetElement(dev, p, gate_port=port)
    net.driven.append((net.index("in"), lambda t: input_wf.value(PortId.WriteGate, t)))
    net.fets.append((fet, None, v_act, net.index("in"), 0.0, net.index("out"), 0.0))
    net.resistors.append((net.index("out"), None, 0.0, 1.0 / cfg.r_load))
    g_max = fet.max_conductance(v_act) + 1.0 / cfg.r_load
    min_rc = cfg.c_node / g_max
    return net, min_rc


def simulate_switch(dev: DeviceParams, p: float, activation: tuple[PortId, float],
                    input_wf: Waveform, cfg: CircuitConfig | None = None,
                    t_end: float | None = None, dt: float | None = None,
                    v0: np.ndarray | None = None) -> TransientTrace:
    """Routing switch: pass or block the input per the stored state.

    ``p`` is the frozen polarization of the pre-written state; ``activation``
    holds one gate at the read bias. Input drives the source; the drain node
    (loaded by r_load parallel c_node) is the output.
    """
    cfg = cfg or CircuitConfig(topology="switch", c_node=1e-11)
    net, min_rc = _switch_network(dev, p, activation, input_wf, cfg)
    if t_end is None:
        t_end = input_wf.duration
    if dt is None:
        dt = min_rc / DEFAULT_DT_FACTOR
    return transient_solve(cfg, net, t_end, dt, min_rc, v0=v0)


def simulate_lut(dev: DeviceParams, p_upper: float, p_lower: float, read_port: PortId,
                 read_wf: Waveform, cfg: CircuitConfig | None = None,
                 t_end: float | None = None, dt: float | None = None,
                 validate: bool = True) -> TransientTrace:
    """LUT cell: series FeFET pair between vdd and ground, read on both gates.

    Stored states must be complementary (opposite polarization signs) unless
    ``validate=False`` for fault studies. Output is the internal node.
    """
    cfg = cfg or CircuitConfig(topology="lut", vdd=1.0, v_switch=0.5, c_node=1e-11)
    if validate and not (p_upper * p_lower < 0.0):
        raise ValidationError(
            f"LUT states must be complementary, got p_upper={p_upper:.3g}, "
            f"p_lower={p_lower:.3g} C/m^2 (pass validate=False to override)")
    net = _Network(["read", "out"], cfg.c_node)
    read_fn = lambda t: read_wf.value(read_port, t)
    net.driven.append((net.index("read"), read_fn))
    fet_up = _FetElement(dev, p_upper, gate_port=read_port)
    fet_dn = _FetElement(dev, p_lower, gate_port=read_port)
    i_read, i_out = net.index("read"), net.index("out")
    # upper: source = out, drain = vdd rail; lower: source = ground, drain = out
    net.fets.append((fet_up, i_read, 0.0, i_out, 0.0, None, cfg.vdd))
    net.fets.append((fet_dn, i_read, 0.0, None, 0.0, i_out, 0.0))
    v_read_max = float(max(np.max(read_wf.wg_v), np.max(read_wf.rg_v), 0.0))
    g_max = (fet_up.max_conductance(v_read_max) + fet_dn.max_conductance(v_read_max))
    min_rc = cfg.c_node / max(g_max, 1e-12)
    if t_end is None:
        t_end = read_wf.duration
    if dt is None:
        dt = min_rc / DEFAULT_DT_FACTOR
    return transient_solve(cfg, net, t_end, dt, min_rc)


def prepare_ring_state(dev: DeviceParams, write_amp: float, seed: int = 0) -> float:
    """Program the oscillator FeFET: reset to high threshold, then a
    write_amp / 1 us set pulse on the write gate. Returns the frozen
    polarization."""
    ens = init_ensemble(dev, "up", seed)
    ens, _ = apply_waveform(dev, ens, Waveform.rect(PortId.WriteGate, -4.0, 1e-6, settle=1e-7))
    ens, _ = apply_waveform(dev, ens, Waveform.rect(PortId.WriteGate, write_amp, 1e-6, settle=1e-7))
    return ens.polarization


def _ring_network(dev: DeviceParams, p: float, cfg: CircuitConfig) -> tuple[_Network, float]:
    names = [f"n{i + 1}" for i in range(cfg.n_stages)]
    net = _Network(names, cfg.c_node)
    fet = _FetElement(dev, p, gate_port=PortId.ReadGate)
    i_first = net.index("n1")
    i_last = net.index(names[-1])
    # stage 1: FeFET pulls n1 low (source grounded), resistor pulls it to vdd;
    # the ring feedback drives the read gate
    net.fets.append((fet, i_last, 0.0, None, 0.0, i_first, 0.0))
    net.resistors.append((i_first, None, cfg.vdd, 1.0 / cfg.r_pull))
    for i in range(1, cfg.n_stages):
        net.inverters.append((net.index(names[i - 1]), net.index(names[i])))
    g_max = fet.max_conductance(cfg.vdd) + 1.0 / cfg.r_pull
    min_rc = cfg.c_node * min(1.0 / g_max, cfg.r_on, cfg.r_pull)
    return net, min_rc


def _rising_crossings(t: np.ndarray, x: np.ndarray, level: float) -> np.ndarray:
    below = x[:-1] < level
    above = x[1:] >= level
    idx = np.nonzero(below & above)[0]
    if idx.size == 0:
        return np.array([])
    frac = (level - x[idx]) / (x[idx + 1] - x[idx])
    return t[idx] + frac * (t[idx + 1] - t[idx])


def simulate_ring_oscillator(dev: DeviceParams, cfg: CircuitConfig, write_amp: float,
                             seed: int = 0, dt: float | None = None,
                             min_periods: int = 20) -> tuple[TransientTrace, float]:
    """Run the ring until at least ``min_periods`` periods, extract frequency.

    The FeFET state is programmed by a write_amp / 1 us pulse beforehand.
    Frequency is the mean reciprocal period over the last ten periods, from
    rising-edge crossings of the feedback node at vdd/2. Raises
    ``StagnationError`` if no oscillation develops.
    """
    p = prepare_ring_state(dev, write_amp, seed)
    net, min_rc = _ring_network(dev, p, cfg)
    if dt is None:
        dt = min_rc / DEFAULT_DT_FACTOR
    _check_dt(dt, min_rc)

    # alternate initial rail assignment kicks the ring deterministically
    v0 = np.array([cfg.vdd if i % 2 == 0 else 0.0 for i in range(cfg.n_stages)])

    # rough period scale from the dominant RCs (deliberate overestimate)
    est_period = cfg.c_node * (0.7 * cfg.r_pull + 2.0 * (cfg.n_stages - 1) * cfg.r_on)
    t_end = (min_periods + 15) * est_period
    last = net.names[-1]
    for attempt in range(2):
        trace = _rk2(net, cfg, v0, t_end, dt)
        crossings = _rising_crossings(trace.t, trace.node(last), cfg.vdd / 2.0)
        if crossings.size >= min_periods + 1:
            periods = np.diff(crossings)[-10:]
            freq = float(np.mean(1.0 / periods))
            return trace, freq
        t_end *= 3.0
    final = {name: float(trace.node(name)[-1]) for name in net.names}
    raise StagnationError(f"no oscillation detected (final node voltages {final})")
