"""Physical constants (SI)."""

EPS0 = 8.8541878128e-12   # vacuum permittivity, F/m
Q_E = 1.602176634e-19     # elementary charge, C
K_B = 1.380649e-23        # Boltzmann constant, J/K

SECONDS_PER_10_YEARS = 3.15e8  # retention horizon cap, s


def thermal_voltage(temperature: float) -> float:
    """kT/q in volts."""
    return K_B * temperature / Q_E
