"""Self-consistent 1D electrostatics of the dual-port stack.

Sign conventions, used everywhere in the package:

* fields are positive when pointing from the write gate toward the read
  gate (front to back);
* polarization ``p`` is positive when it points toward the channel, the
  direction that produces the low-threshold state.

For a surface potential ``psi_s`` (channel sheet referenced to the grounded
source) the unknowns follow from displacement continuity,

    eps0*eps_fe*e_fe + p = eps0*eps_il*e_il
    eps0*eps_il*e_il - eps0*eps_box*e_box = -q_ch(psi_s)

and the two potential loops

    v_wg - vfb_front = e_fe*t_fe + e_il*t_il + psi_s
    v_rg - vfb_back  = psi_s - e_box*t_box.

The channel sheet charge is a smooth two-branch softplus: electrons turn on
above ``+psi_on``, holes below ``-psi_on`` (both with kT/q width), which
keeps q_ch monotone in psi_s so the scalar root-find has a unique solution.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .constants import EPS0
from .errors import ConsistencyError, DomainError, NumericalError
from .stack import DeviceParams, PortId

RESIDUAL_LIMIT = 1e-9
_PSI_TOL = 1e-12          # Newton polish tolerance on psi_s, V
_BRACKET = (-5.0, 25.0)   # initial psi_s bracket, widened adaptively


def _softplus(x: float) -> float:
    if x > 35.0:
        return x + math.exp(-x)
    if x < -700.0:
        return 0.0
    return math.log1p(math.exp(x))


def _sigmoid(x: float) -> float:
    if x >= 0.0:
        return 1.0 / (1.0 + math.exp(-x)) if x < 700.0 else 1.0
    e = math.exp(x) if x > -700.0 else 0.0
    return e / (1.0 + e)


def channel_charge(dev: DeviceParams, psi_s: float) -> tuple[float, float]:
    """Electron and hole sheet charge (C/m^2) at surface potential psi_s.

    Electrons are negative charge (inversion, psi_s above +psi_on), holes
    positive (accumulation, psi_s below -psi_on).
    """
    vt = dev.thermal_voltage
    s = dev.q_ch_scale
    q_e = -s * vt * _softplus((psi_s - dev.psi_on) / vt)
    q_h = s * vt * _softplus(-(psi_s + dev.psi_on) / vt)
    return q_e, q_h


def electron_charge(dev: DeviceParams, psi_s: float) -> float:
    """Electron (inversion) sheet charge only, <= 0."""
    return channel_charge(dev, psi_s)[0]


@dataclass(frozen=True)
class ElectrostaticSolution:
    """One self-consistent operating point of the stack."""

    psi_s: float     # channel surface potential, V
    e_fe: float      # field in the ferroelectric, V/m
    e_il: float      # field in the interfacial layer, V/m
    e_box: float     # field in the back dielectric, V/m
    q_ch: float      # net channel sheet charge, C/m^2 (<= 0 in inversion)
    residual: float  # worst normalized defect of the solved system


def solve_operating_point(dev: DeviceParams, p: float, v_wg: float, v_rg: float,
                          psi_hint: float | None = None) -> ElectrostaticSolution:
    """Solve the stack at polarization ``p`` and terminal biases.

    Scalar safeguarded Newton (bisection bracket, Newton polish to 1e-12 V)
    on psi_s; the loop equation is strictly monotone in psi_s so the bracket
    contains exactly one root.

    Raises ``DomainError`` if |p| exceeds the remanent polarization or a
    bias is not finite, ``NumericalError`` on failure to converge.
    """
    if not (math.isfinite(p) and math.isfinite(v_wg) and math.isfinite(v_rg)):
        raise DomainError("polarization and biases must be finite")
    if abs(p) > dev.p_r * (1.0 + 1e-12):
        raise DomainError(f"|p|={abs(p):.4g} exceeds p_r={dev.p_r:.4g}")

    vgf = v_wg - dev.vfb_front
    vgb = v_rg - dev.vfb_back
    k_fe = dev.t_fe / (EPS0 * dev.eps_fe)
    k_il = dev.t_il / (EPS0 * dev.eps_il)
    c_box = dev.c_box
    vt = dev.thermal_voltage
    s = dev.q_ch_scale
    psi_on = dev.psi_on

    def loop(psi: float) -> tuple[float, float, float, float]:
        """Loop defect F, derivative dF/dpsi, q_ch and D_il at psi."""
        q_e = -s * vt * _softplus((psi - psi_on) / vt)
        q_h = s * vt * _softplus(-(psi + psi_on) / vt)
        q = q_e + q_h
        d_il = c_box * (psi - vgb) - q
        f = (d_il - p) * k_fe + d_il * k_il + psi - vgf
        dq = -s * (_sigmoid((psi - psi_on) / vt) + _sigmoid(-(psi + psi_on) / vt))
        df = (k_fe + k_il) * (c_box - dq) + 1.0
        return f, df, q, d_il

    lo, hi = _BRACKET
    f_lo = loop(lo)[0]
    while f_lo > 0.0:
        lo = lo * 2.0 if lo < 0 else -5.0
        if abs(lo) > 1e5:
            raise NumericalError("cannot bracket psi_s from below", residual=f_lo)
        f_lo = loop(lo)[0]
    f_hi = loop(hi)[0]
    while f_hi < 0.0:
        hi *= 2.0
        if hi > 1e5:
            raise NumericalError("cannot bracket psi_s from above", residual=f_hi)
        f_hi = loop(hi)[0]

    psi = psi_hint if (psi_hint is not None and lo < psi_hint < hi) else 0.5 * (lo + hi)
    f = None
    for _ in range(300):
        f, df, q, d_il = loop(psi)
        if f > 0.0:
            hi = psi
        else:
            lo = psi
        step = f / df
        nxt = psi - step
        if not (lo < nxt < hi):
            nxt = 0.5 * (lo + hi)
        if abs(nxt - psi) < _PSI_TOL:
            psi = nxt
            break
        psi = nxt
    else:
        raise NumericalError("psi_s iteration cap reached", residual=f)

    f, _, q, d_il = loop(psi)
    e_box = (psi - vgb) / dev.t_box
    e_il = d_il / (EPS0 * dev.eps_il)
    e_fe = (d_il - p) / (EPS0 * dev.eps_fe)

    d_fe = EPS0 * dev.eps_fe * e_fe
    d_box = EPS0 * dev.eps_box * e_box
    d_max = max(abs(d_fe), abs(d_il), abs(d_box), abs(p), abs(q), 1e-30)
    defect_fe_il = abs(d_fe + p - d_il)
    defect_il_box = abs(d_il - d_box + q)
    v_max = max(1.0, abs(vgf), abs(vgb), abs(psi))
    residual = max(defect_fe_il / d_max, defect_il_box / d_max, abs(f) / v_max)
    if residual > RESIDUAL_LIMIT:
        raise NumericalError("operating point residual above limit", residual=residual)
    return ElectrostaticSolution(psi_s=psi, e_fe=e_fe, e_il=e_il, e_box=e_box,
                                 q_ch=q, residual=residual)


def fe_voltage(dev: DeviceParams, sol: ElectrostaticSolution) -> float:
    """Field-equivalent voltage across the ferroelectric layer, e_fe * t_fe."""
    return sol.e_fe * dev.t_fe


# ---------------------------------------------------------------------------
# sweeps
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class EfeCurve:
    """Ferroelectric field versus read bias on one port."""

    port: PortId
    p: float
    v_read: np.ndarray
    e_fe: np.ndarray
    q_ch: np.ndarray


def _biases(port: PortId, v: float) -> tuple[float, float]:
    return (v, 0.0) if port is PortId.WriteGate else (0.0, v)


def efe_vs_vread(dev: DeviceParams, p: float, port: PortId,
                 v_min: float, v_max: float, n: int) -> EfeCurve:
    """Sweep the named port (other port grounded) and record e_fe per bias."""
    if n < 2:
        raise DomainError(f"n must be >= 2, got {n}")
    if not v_min < v_max:
        raise DomainError(f"need v_min < v_max, got {v_min} >= {v_max}")
    vs = np.linspace(v_min, v_max, n)
    e = np.empty(n)
    q = np.empty(n)
    hint = None
    for i, v in enumerate(vs):
        v_wg, v_rg = _biases(port, float(v))
        try:
            sol = solve_operating_point(dev, p, v_wg, v_rg, psi_hint=hint)
        except NumericalError as exc:
            raise NumericalError(f"sweep failed at v_read={v:.6g} V: {exc}",
                                 residual=exc.residual) from exc
        hint = sol.psi_s
        e[i] = sol.e_fe
        q[i] = sol.q_ch
    return EfeCurve(port=port, p=p, v_read=vs, e_fe=e, q_ch=q)


def saturated_efe(dev: DeviceParams, p: float, port: PortId = PortId.ReadGate,
                  q_ref: float = 2e-2, v_hi: float = 40.0) -> tuple[float, float]:
    """e_fe once the channel has turned on, at a matched inversion level.

    Saturation is defined at a fixed electron sheet density ``q_ref`` so
    curves for different back dielectrics are compared at the same channel
    condition (as band diagrams are compared at matched current). Returns
    ``(v_read, e_fe)`` at the bias where |q_e| crosses q_ref.
    """
    def q_at(v: float) -> float:
        v_wg, v_rg = _biases(port, v)
        sol = solve_operating_point(dev, p, v_wg, v_rg)
        return -electron_charge(dev, sol.psi_s)

    lo, hi = 0.0, v_hi
    if q_at(hi) < q_ref:
        raise NumericalError(f"channel never reaches q_ref={q_ref} below {v_hi} V")
    while q_at(lo) > q_ref:
        lo -= 5.0
        if lo < -100.0:
            raise NumericalError("cannot bracket saturation bias")
    for _ in range(80):
        mid = 0.5 * (lo + hi)
        if q_at(mid) < q_ref:
            lo = mid
        else:
            hi = mid
    v_star = 0.5 * (lo + hi)
    v_wg, v_rg = _biases(port, v_star)
    sol = solve_operating_point(dev, p, v_wg, v_rg)
    return v_star, sol.e_fe


# ---------------------------------------------------------------------------
# band profile
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class BandProfile:
    """Piecewise-linear potential through the stack, gate metal to back gate."""

    depth: np.ndarray      # m, from the write-gate metal surface
    potential: np.ndarray  # V
    boundaries: tuple[float, ...]  # layer interfaces: FE/IL, IL/body, body/BOX


def band_profile(dev: DeviceParams, sol: ElectrostaticSolution,
                 v_wg: float, v_rg: float) -> BandProfile:
    """Potential profile for a solution previously obtained at (v_wg, v_rg).

    Raises ``ConsistencyError`` if the solution does not close the potential
    loops for the biases given.
    """
    vgf = v_wg - dev.vfb_front
    vgb = v_rg - dev.vfb_back
    scale = max(1.0, abs(vgf), abs(vgb))
    front_gap = vgf - (sol.e_fe * dev.t_fe + sol.e_il * dev.t_il + sol.psi_s)
    back_gap = (sol.psi_s - sol.e_box * dev.t_box) - vgb
    if abs(front_gap) > 1e-6 * scale or abs(back_gap) > 1e-6 * scale:
        raise ConsistencyError(
            f"solution does not match biases (front gap {front_gap:.3g} V, "
            f"back gap {back_gap:.3g} V)")

    d0 = 0.0
    d1 = dev.t_fe
    d2 = d1 + dev.t_il
    d3 = d2 + dev.t_body
    d4 = d3 + dev.t_box
    phi0 = vgf
    phi1 = phi0 - sol.e_fe * dev.t_fe
    phi2 = phi1 - sol.e_il * dev.t_il          # == psi_s
    phi3 = phi2                                 # equipotential thin body
    phi4 = phi3 - sol.e_box * dev.t_box         # == v_rg - vfb_back
    return BandProfile(depth=np.array([d0, d1, d2, d3, d4]),
                       potential=np.array([phi0, phi1, phi2, phi3, phi4]),
                       boundaries=(d1, d2, d3))
