"""
Hanning-windowed tone burst used to excite the transmitter ring.

For the 5-cycle case the burst is

    H(t) = 2.5 * (1 - cos(2*pi*f*t/5)) * sin(2*pi*f*t),   0 <= t <= 5/f

and zero elsewhere. The cycle count is a parameter: the constant 2.5 becomes
cycles/2 and the 5 inside the cosine becomes cycles, so cycles=5 gives back the
expression above. amplitude_scale multiplies the whole burst.
"""

from typing import Union
from dataclasses import dataclass
import math

import numpy as np

__all__ = [
    "ExcitationSpec",
    "toneburst_at",
    "hanning_toneburst",
]

# Minimum samples per cycle of the carrier
MIN_SAMPLES_PER_CYCLE = 10.0

# %% --------------------------------------------------------------------------


@dataclass(frozen=True)
class ExcitationSpec:
    """
    Tone burst parameters.

    Args:
        center_frequency (float):          Carrier frequency f in Hz.
        cycles (int, optional):            Number of carrier cycles under the window. Defaults to 5.
        amplitude_scale (float, optional): Multiplier on the burst. Defaults to 1.0,
                                           which gives a peak-to-peak close to 10 V for 5 cycles.
        sampling_rate (float, optional):   Sampling rate f_s in Hz. Defaults to 10 MHz.
    """

    center_frequency: float
    cycles: int = 5
    amplitude_scale: float = 1.0
    sampling_rate: float = 10.0e6

    def __post_init__(self):
        if not self.center_frequency > 0.0:
            raise ValueError(
                f"\nExcitationSpec: center_frequency must be positive, but received: {self.center_frequency}"
            )
        if not self.sampling_rate > 0.0:
            raise ValueError(f"\nExcitationSpec: sampling_rate must be positive, but received: {self.sampling_rate}")
        if self.sampling_rate < MIN_SAMPLES_PER_CYCLE * self.center_frequency:
            raise ValueError(
                "\nExcitationSpec: sampling_rate must be at least 10 x center_frequency.\n"
                f"Received: sampling_rate={self.sampling_rate}, center_frequency={self.center_frequency}"
            )
        if int(self.cycles) != self.cycles or self.cycles < 1:
            raise ValueError(f"\nExcitationSpec: cycles must be an integer >= 1, but received: {self.cycles}")
        object.__setattr__(self, "cycles", int(self.cycles))

    @property
    def duration(self) -> float:
        """
        Length of the nonzero part of the burst, cycles / f.

        Returns:
            float: Duration in seconds.
        """
        return self.cycles / self.center_frequency

    @property
    def envelope_peak(self) -> float:
        """Maximum of the window envelope, cycles * amplitude_scale (5 for the 5-cycle burst)."""
        return self.cycles * self.amplitude_scale

    @property
    def num_samples(self) -> int:
        """Length of the sampled burst, ceil(cycles / f * f_s) + 1."""
        support = self.cycles * self.sampling_rate / self.center_frequency
        return math.ceil(support - 1.0e-9) + 1

    @property
    def wavelength_time(self) -> float:
        """Carrier period in seconds."""
        return 1.0 / self.center_frequency

    @classmethod
    def with_simulation(cls) -> "ExcitationSpec":
        """85 kHz, 5 cycles at 10 MHz: the finite element excitation."""
        return cls(center_frequency=85.0e3)

    @classmethod
    def with_experiment(cls) -> "ExcitationSpec":
        """75 kHz, 5 cycles at 10 MHz: the bench excitation, which gave cleaner waveforms."""
        return cls(center_frequency=75.0e3)


# %% --------------------------------------------------------------------------


def toneburst_at(t: Union[float, np.ndarray], spec: ExcitationSpec) -> np.ndarray:
    """
    Evaluate the burst at arbitrary times. Outside (0, cycles/f) the burst is exactly zero.

    Args:
        t (Union[float, np.ndarray]): Time(s) in seconds relative to burst onset.
        spec (ExcitationSpec):        Burst parameters.

    Returns:
        np.ndarray: Burst amplitude at each time.
    """
    t = np.asarray(t, dtype=np.float64)
    f = spec.center_frequency
    n = spec.cycles
    inside = (t > 0.0) & (t < spec.duration)
    phase = 2.0 * np.pi * f * t
    value = spec.amplitude_scale * (0.5 * n) * (1.0 - np.cos(phase / n)) * np.sin(phase)
    return np.where(inside, value, 0.0)


def hanning_toneburst(spec: ExcitationSpec) -> np.ndarray:
    """
    Sampled burst, sample n at t_n = n / f_s for n = 0 .. ceil(cycles/f * f_s).

    Args:
        spec (ExcitationSpec): Burst parameters.

    Returns:
        np.ndarray: The sampled burst; first and last samples are zero.
    """
    t = np.arange(spec.num_samples) / spec.sampling_rate
    return toneburst_at(t, spec)
