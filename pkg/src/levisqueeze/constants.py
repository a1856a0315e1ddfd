"""Physical constants and unit-mode handling.

Two unit modes are supported:

* ``"natural"``: hbar = m = 1 and temperatures/pressures are taken as the
  corresponding rate coefficients directly.  Used for dimensionless studies.
* ``"si"``: CODATA 2018 values, all quantities in SI units.

Every routine that needs a constant goes through :class:`UnitSystem` so a
single switch controls the whole stack.
"""

from __future__ import annotations

from dataclasses import dataclass

# CODATA 2018 exact values.
HBAR_SI = 1.054571817e-34  # J s
KB_SI = 1.380649e-23  # J / K
C_SI = 299792458.0  # m / s
EPS0_SI = 8.8541878128e-12  # F / m

MODES = ("natural", "si")


@dataclass(frozen=True)
class UnitSystem:
    """Bundle of fundamental constants for one unit mode."""

    mode: str
    hbar: float
    kb: float
    c: float
    eps0: float

    @staticmethod
    def from_mode(mode: str) -> "UnitSystem":
        if mode == "natural":
            return UnitSystem(mode="natural", hbar=1.0, kb=1.0, c=1.0, eps0=1.0)
        if mode == "si":
            return UnitSystem(mode="si", hbar=HBAR_SI, kb=KB_SI, c=C_SI, eps0=EPS0_SI)
        raise ValueError(f"unknown unit mode {mode!r}; expected one of {MODES}")


NATURAL = UnitSystem.from_mode("natural")
SI = UnitSystem.from_mode("si")
