"""
Physical constants used throughout hapq.
"""

import math
from dataclasses import dataclass


@dataclass(frozen=True)
class PhysicalConstants:
    """Fixed constants for homonuclear 1H dipolar calculations (SI units)."""

    gamma_H: float = 2.6752218744e8  # rad s^-1 T^-1
    mu0_over_4pi: float = 1e-7  # T m / A
    hbar: float = 1.054571817e-34  # J s

    @property
    def magic_angle(self) -> float:
        """Angle where 3cos^2(theta) - 1 vanishes, in radians."""
        return math.acos(1.0 / math.sqrt(3.0))

    @property
    def gamma_over_2pi_hz_per_t(self) -> float:
        """Proton gyromagnetic ratio in Hz/T."""
        return self.gamma_H / (2.0 * math.pi)


CONSTANTS = PhysicalConstants()

MAGIC_ANGLE = CONSTANTS.magic_angle

ANGSTROM = 1e-10
