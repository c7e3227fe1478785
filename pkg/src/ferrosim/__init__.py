"""ferrosim: compact-model simulator for dual-port ferroelectric FETs.

Solves the 1D gate-stack electrostatics self-consistently with a
multi-domain nucleation-limited switching model, reproduces standard
characterization protocols (transfer sweeps, memory-window maps, read-
disturb stress), and runs small demo circuits (routing switch, LUT cell,
ring oscillator) on top of the device model.
"""

__version__ = "0.1.0"

from .circuits import (CircuitConfig, TransientTrace, prepare_ring_state, simulate_lut,
                       simulate_ring_oscillator, simulate_switch)
from .device_iv import (IVCurve, MemoryWindow, channel_conductance, drain_current,
                        extract_vth, id_vg_sweep, memory_window, standard_write)
from .electrostatics import (BandProfile, EfeCurve, ElectrostaticSolution, band_profile,
                             channel_charge, efe_vs_vread, electron_charge, fe_voltage,
                             saturated_efe, solve_operating_point)
from .errors import (ConfigurationError, ConsistencyError, DivergenceError, DomainError,
                     ExtractionError, FerrosimError, FitError, NumericalError,
                     StabilityError, StagnationError, ValidationError)
from .polarization import (DomainEnsemble, StepPolicy, Trajectory, Waveform,
                           apply_waveform, init_ensemble, nls_switching_time,
                           step_ensemble)
from .protocols import (MWMap, NlsFit, RETENTION_CAP, RetentionTrace, fit_nls,
                        iso_mw_curve, log_times, mw_contour, nls_model_pw,
                        read_disturb_experiment, retention_time)
from .stack import (DeviceParams, FDSOI22_DEFAULTS, PortId, build_device,
                    default_fdsoi22, load_device_config, with_overrides)

__all__ = [
    "__version__",
    # stack
    "DeviceParams", "PortId", "build_device", "default_fdsoi22", "with_overrides",
    "load_device_config", "FDSOI22_DEFAULTS",
    # electrostatics
    "ElectrostaticSolution", "BandProfile", "EfeCurve", "solve_operating_point",
    "efe_vs_vread", "band_profile", "saturated_efe", "channel_charge",
    "electron_charge", "fe_voltage",
    # polarization dynamics
    "DomainEnsemble", "Waveform", "StepPolicy", "Trajectory", "nls_switching_time",
    "init_ensemble", "step_ensemble", "apply_waveform",
    # device IV
    "IVCurve", "MemoryWindow", "drain_current", "channel_conductance", "id_vg_sweep",
    "extract_vth", "memory_window", "standard_write",
    # protocols
    "MWMap", "RetentionTrace", "NlsFit", "mw_contour", "iso_mw_curve", "fit_nls",
    "nls_model_pw", "read_disturb_experiment", "retention_time", "log_times",
    "RETENTION_CAP",
    # circuits
    "CircuitConfig", "TransientTrace", "simulate_switch", "simulate_lut",
    "simulate_ring_oscillator", "prepare_ring_state",
    # errors
    "FerrosimError", "ConfigurationError", "ValidationError", "DomainError",
    "NumericalError", "ExtractionError", "ConsistencyError", "FitError",
    "StabilityError", "DivergenceError", "StagnationError",
]
