"""
Ray-based synthetic T(0,1) waveforms and the acquisition chain behind them.

Each receiver trace is a sum of delayed copies of the excitation burst:

    direct arrival      tx ring -> rx ring, delay separation / C
    defect scatter      tx ring -> defect -> receiver, delay (d_tx + d_rx) / C
    edge reflections    tx ring -> pipe end -> rx ring (reflective ends only)
    mode leakage        optional second direct burst at another speed

followed by white Gaussian noise, averaging of repeated realizations,
ADC quantization and decimation. The burst is evaluated analytically at every
sample time, so arbitrary (fractional) delays are exact.

Defect physics is reduced to two scalars: scatter_amplitude (the fraction of the
incident wave re-radiated towards the receivers) and transmission_loss (the
fractional drop of the direct wave passing the defect's axial plane).
"""

from typing import Optional, Sequence, Union
from dataclasses import dataclass, field, replace
from enum import Enum, IntEnum
import logging
import math

import numpy as np

from .geometry import MM, ArrayLayout, PipeSpec, SurfacePoint, rx_distance, tx_distance
from .excitation import ExcitationSpec, toneburst_at

__all__ = [
    "DefectKind",
    "BoundaryMode",
    "Label",
    "DefectSpec",
    "PropagationSpec",
    "AcquisitionSpec",
    "WaveformSet",
    "BASELINE_AMPLITUDE",
    "ADDED_MASS_AMPLITUDES",
    "ADC_FULL_SCALE",
    "transmission_loss_from_amplitudes",
    "simulate",
    "simulate_pair",
    "apply_adc",
    "adc_codes",
    "adc_lsb",
    "decimate",
    "average_traces",
]

logger = logging.getLogger(__name__)

# Direct T(0,1) amplitude measured on the bench in baseline condition (V).
BASELINE_AMPLITUDE = 82.5e-3

# Direct amplitude with the C-clamp mass at 100, 200 and 300 mm from the transmitter ring (V).
ADDED_MASS_AMPLITUDES = {
    100.0 * MM: 81.72e-3,
    200.0 * MM: 78.2e-3,
    300.0 * MM: 80.94e-3,
}

# Peak-to-peak ADC range, four times the direct amplitude (V).
ADC_FULL_SCALE = 0.33

# %% --------------------------------------------------------------------------


class DefectKind(str, Enum):
    NOTCH = "notch"
    ADDED_MASS = "added_mass"


class BoundaryMode(str, Enum):
    REFLECTIVE = "reflective"
    LOW_REFLECTING = "low_reflecting"


class Label(IntEnum):
    BASELINE = 0
    DAMAGE = 1


def transmission_loss_from_amplitudes(baseline: float, loaded: float) -> float:
    """
    Fractional drop of the direct amplitude, 1 - loaded / baseline.

    Args:
        baseline (float): Direct amplitude without the defect.
        loaded (float):   Direct amplitude with the defect.

    Returns:
        float: Transmission loss in [0, 1].
    """
    if not baseline > 0.0 or loaded < 0.0 or loaded > baseline:
        raise ValueError(
            "\ntransmission_loss_from_amplitudes: require baseline > 0 and 0 <= loaded <= baseline.\n"
            f"Received: baseline={baseline}, loaded={loaded}"
        )
    return 1.0 - loaded / baseline


def _check_fraction(owner: str, name: str, value: float):
    if not 0.0 <= value <= 1.0:
        raise ValueError(f"\n{owner}: {name} must be in [0, 1], but received: {value}")


# %% --------------------------------------------------------------------------


@dataclass(frozen=True)
class DefectSpec:
    """
    A single defect between the transducer rings.

    Args:
        kind (DefectKind):                   notch or added_mass (descriptive only).
        position (SurfacePoint):             Defect location.
        scatter_amplitude (float, optional): Fraction of the incident amplitude re-radiated
                                             towards the receivers, in [0, 1]. Defaults to 0.0.
        transmission_loss (float, optional): Fractional amplitude drop of the direct wave,
                                             in [0, 1]. Defaults to 0.0.
    """

    kind: DefectKind
    position: SurfacePoint
    scatter_amplitude: float = 0.0
    transmission_loss: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "kind", DefectKind(self.kind))
        _check_fraction("DefectSpec", "scatter_amplitude", self.scatter_amplitude)
        _check_fraction("DefectSpec", "transmission_loss", self.transmission_loss)

    def moved_to(self, position: SurfacePoint) -> "DefectSpec":
        return replace(self, position=position)

    @classmethod
    def with_notch(cls, z: float, theta: float, scatter_amplitude: float = 0.1) -> "DefectSpec":
        """
        A notch: scatters part of the incident wave, no measurable transmission loss.

        Args:
            z (float):                           Axial position in meters.
            theta (float):                       Angular position in degrees.
            scatter_amplitude (float, optional): Defaults to 0.1.

        Returns:
            DefectSpec: The notch.
        """
        return cls(DefectKind.NOTCH, SurfacePoint(z, theta), scatter_amplitude, 0.0)

    @classmethod
    def with_added_mass(
        cls,
        z: float,
        theta: float,
        scatter_amplitude: float = 0.0,
        transmission_loss: Optional[float] = None,
    ) -> "DefectSpec":
        """
        A clamped mass: mainly lowers the direct arrival amplitude.

        If transmission_loss is None, the loss measured on the bench for the nearest of the
        100, 200 and 300 mm clamp positions is used (81.72, 78.2 and 80.94 mV against 82.5 mV).

        Args:
            z (float):                            Axial position in meters.
            theta (float):                        Angular position in degrees.
            scatter_amplitude (float, optional):  Defaults to 0.0.
            transmission_loss (float, optional):  Defaults to None.

        Returns:
            DefectSpec: The added mass.
        """
        if transmission_loss is None:
            nearest = min(ADDED_MASS_AMPLITUDES, key=lambda zt: abs(zt - z))
            transmission_loss = transmission_loss_from_amplitudes(BASELINE_AMPLITUDE, ADDED_MASS_AMPLITUDES[nearest])
        return cls(DefectKind.ADDED_MASS, SurfacePoint(z, theta), scatter_amplitude, transmission_loss)


@dataclass(frozen=True)
class PropagationSpec:
    """
    T(0,1) propagation and boundary model.

    Args:
        group_velocity (float, optional):              C in m/s. Defaults to 3130.
        boundary_mode (BoundaryMode, optional):        reflective or low_reflecting ends. Defaults to reflective.
        edge_reflection_coefficient (float, optional): Amplitude of end reflections in [0, 1]. Defaults to 1.0.
        pipe_end_positions (tuple, optional):          Axial coordinates of the two pipe ends in meters.
                                                       Defaults to (-0.25, 0.75).
        mode_leakage_snr (float, optional):            White noise level in dB relative to direct_amplitude,
                                                       or None for no noise. Defaults to None.
        direct_amplitude (float, optional):            Envelope peak of the undisturbed direct arrival in volts.
                                                       Defaults to 82.5 mV.
        geometric_spreading (bool, optional):          Scale scatter by 1/sqrt(d_rx / separation). Defaults to False.
        leakage_velocity (float, optional):            Speed of a coherent interfering mode, None disables it.
        leakage_amplitude (float, optional):           Relative amplitude of the interfering mode. Defaults to 0.0.
    """

    group_velocity: float = 3130.0
    boundary_mode: BoundaryMode = BoundaryMode.REFLECTIVE
    edge_reflection_coefficient: float = 1.0
    pipe_end_positions: tuple = (-250.0 * MM, 750.0 * MM)
    mode_leakage_snr: Optional[float] = None
    direct_amplitude: float = BASELINE_AMPLITUDE
    geometric_spreading: bool = False
    leakage_velocity: Optional[float] = None
    leakage_amplitude: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "boundary_mode", BoundaryMode(self.boundary_mode))
        if not self.group_velocity > 0.0:
            raise ValueError(f"\nPropagationSpec: group_velocity must be positive, but received: {self.group_velocity}")
        _check_fraction("PropagationSpec", "edge_reflection_coefficient", self.edge_reflection_coefficient)
        ends = tuple(float(z) for z in self.pipe_end_positions)
        if len(ends) != 2 or not ends[0] < ends[1]:
            raise ValueError(
                "\nPropagationSpec: pipe_end_positions must be two increasing axial coordinates.\n"
                f"Received: {self.pipe_end_positions}"
            )
        object.__setattr__(self, "pipe_end_positions", ends)
        if self.mode_leakage_snr is not None and not math.isfinite(self.mode_leakage_snr):
            raise ValueError(
                f"\nPropagationSpec: mode_leakage_snr must be finite or None, received: {self.mode_leakage_snr}"
            )
        if not self.direct_amplitude > 0.0:
            raise ValueError(
                f"\nPropagationSpec: direct_amplitude must be positive, but received: {self.direct_amplitude}"
            )
        if self.leakage_velocity is not None and not self.leakage_velocity > 0.0:
            raise ValueError(
                f"\nPropagationSpec: leakage_velocity must be positive, but received: {self.leakage_velocity}"
            )
        if self.leakage_amplitude < 0.0:
            raise ValueError(
                f"\nPropagationSpec: leakage_amplitude must be non-negative, but received: {self.leakage_amplitude}"
            )

    @property
    def noise_sigma(self) -> float:
        """Standard deviation of the per-realization noise in volts, 0 when noise is off."""
        if self.mode_leakage_snr is None:
            return 0.0
        return self.direct_amplitude * 10.0 ** (-self.mode_leakage_snr / 20.0)


@dataclass(frozen=True)
class AcquisitionSpec:
    """
    Acquisition chain settings.

    Args:
        sampling_rate (float, optional):      Native ADC rate in Hz. Defaults to 10 MHz.
        samples_per_channel (int, optional):  Samples captured per channel before decimation. Defaults to 6000.
        num_averages (int, optional):         Realizations averaged per trace. Defaults to 1.
        decimation_factor (int, optional):    Keep every n-th sample. Defaults to 1.
        adc_bits (int, optional):             ADC resolution in [2, 24], None for no quantization. Defaults to None.
        adc_full_scale (float, optional):     Peak-to-peak input range in volts. Defaults to 0.33 (4 x 82.5 mV).
    """

    sampling_rate: float = 10.0e6
    samples_per_channel: int = 6000
    num_averages: int = 1
    decimation_factor: int = 1
    adc_bits: Optional[int] = None
    adc_full_scale: float = ADC_FULL_SCALE

    def __post_init__(self):
        if not self.sampling_rate > 0.0:
            raise ValueError(f"\nAcquisitionSpec: sampling_rate must be positive, but received: {self.sampling_rate}")
        for name in ("samples_per_channel", "num_averages", "decimation_factor"):
            value = getattr(self, name)
            if int(value) != value or value < 1:
                raise ValueError(f"\nAcquisitionSpec: {name} must be a positive integer, but received: {value}")
            object.__setattr__(self, name, int(value))
        if self.decimation_factor > self.samples_per_channel:
            raise ValueError(
                "\nAcquisitionSpec: decimation_factor cannot exceed samples_per_channel.\n"
                f"Received: decimation_factor={self.decimation_factor}, samples_per_channel={self.samples_per_channel}"
            )
        if self.adc_bits is not None:
            if int(self.adc_bits) != self.adc_bits or not 2 <= self.adc_bits <= 24:
                raise ValueError(f"\nAcquisitionSpec: adc_bits must be in [2, 24] or None, received: {self.adc_bits}")
            object.__setattr__(self, "adc_bits", int(self.adc_bits))
        if not self.adc_full_scale > 0.0:
            raise ValueError(f"\nAcquisitionSpec: adc_full_scale must be positive, received: {self.adc_full_scale}")

    @property
    def effective_sampling_rate(self) -> float:
        return self.sampling_rate / self.decimation_factor

    @property
    def decimated_samples(self) -> int:
        return self.samples_per_channel // self.decimation_factor

    @classmethod
    def with_fpga_capture(cls) -> "AcquisitionSpec":
        """6000 samples at 10 Msps, 10 averages, 10-bit ADC, decimated by 10."""
        return cls(num_averages=10, decimation_factor=10, adc_bits=10)


# %% --------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class WaveformSet:
    """
    Sampled receiver traces of one measurement.

    Sample 0 of every channel is the excitation onset.

    Args:
        channels (np.ndarray):            [num_receivers x num_samples] voltages.
        sampling_rate (float):            Effective sampling rate of the stored samples in Hz.
        label (Label, optional):          baseline or damage. Defaults to baseline.
        adc_bits (int, optional):         Resolution the samples were quantized with, None if unquantized.
        full_scale (float, optional):     ADC peak-to-peak range in volts. Defaults to 0.33.
        layout_digest (int, optional):    ArrayLayout.digest of the layout recorded with. Defaults to None.
    """

    channels: np.ndarray
    sampling_rate: float
    label: Label = Label.BASELINE
    adc_bits: Optional[int] = None
    full_scale: float = ADC_FULL_SCALE
    layout_digest: Optional[int] = field(default=None)

    def __post_init__(self):
        channels = np.array(self.channels, dtype=np.float64)
        if channels.ndim != 2 or channels.shape[0] < 1 or channels.shape[1] < 1:
            raise ValueError(
                "\nWaveformSet: channels must be a non-empty [num_receivers x num_samples] matrix.\n"
                f"Received shape: {channels.shape}"
            )
        channels.setflags(write=False)
        object.__setattr__(self, "channels", channels)
        object.__setattr__(self, "label", Label(self.label))
        if not self.sampling_rate > 0.0:
            raise ValueError(f"\nWaveformSet: sampling_rate must be positive, but received: {self.sampling_rate}")
        object.__setattr__(self, "sampling_rate", float(self.sampling_rate))

    @property
    def num_receivers(self) -> int:
        return self.channels.shape[0]

    @property
    def num_samples(self) -> int:
        return self.channels.shape[1]

    @property
    def shape(self) -> tuple:
        return self.channels.shape

    @property
    def duration(self) -> float:
        return self.num_samples / self.sampling_rate

    def time_axis(self) -> np.ndarray:
        return np.arange(self.num_samples) / self.sampling_rate

    def decimated(self, factor: int) -> "WaveformSet":
        """
        Keep every factor-th sample and record the lower effective sampling rate.

        Args:
            factor (int): Decimation factor >= 1.

        Returns:
            WaveformSet: The decimated set.
        """
        return replace(self, channels=decimate(self.channels, factor), sampling_rate=self.sampling_rate / factor)

    def truncated(self, duration: float) -> "WaveformSet":
        """
        Keep only the first `duration` seconds of every trace.

        Args:
            duration (float): Recording duration to keep, in seconds.

        Returns:
            WaveformSet: The truncated set.
        """
        keep = int(round(duration * self.sampling_rate))
        if keep < 1:
            raise ValueError(f"\nWaveformSet.truncated: duration {duration} s keeps no samples")
        return replace(self, channels=self.channels[:, :keep])

    def scaled(self, k: float) -> "WaveformSet":
        return replace(self, channels=self.channels * k)

    def relabeled(self, label: Label) -> "WaveformSet":
        return replace(self, label=Label(label))

    def __eq__(self, other) -> bool:
        if not isinstance(other, WaveformSet):
            return NotImplemented
        return (
            self.shape == other.shape
            and self.sampling_rate == other.sampling_rate
            and self.label == other.label
            and self.adc_bits == other.adc_bits
            and self.full_scale == other.full_scale
            and self.layout_digest == other.layout_digest
            and np.array_equal(self.channels, other.channels)
        )

    def __repr__(self) -> str:
        return (
            f"WaveformSet(label={self.label.name.lower()}, channels={self.num_receivers}, "
            f"samples={self.num_samples}, sampling_rate={self.sampling_rate:g})"
        )


# %% --------------------------------------------------------------------------


def adc_lsb(bits: int, full_scale: float) -> float:
    """Quantization step of a bits-resolution converter spanning full_scale volts peak-to-peak."""
    return full_scale / 2**bits


def adc_codes(trace: np.ndarray, bits: int, full_scale: float) -> np.ndarray:
    """
    Signed ADC output codes of a mid-tread quantizer, saturating at the rails.

    Args:
        trace (np.ndarray):  Input voltages.
        bits (int):          Resolution in [2, 24].
        full_scale (float):  Peak-to-peak input range in volts.

    Returns:
        np.ndarray: Integer codes in [-2^(bits-1), 2^(bits-1) - 1].
    """
    if int(bits) != bits or not 2 <= bits <= 24:
        raise ValueError(f"\nadc_codes: bits must be in [2, 24], but received: {bits}")
    if not full_scale > 0.0:
        raise ValueError(f"\nadc_codes: full_scale must be positive, but received: {full_scale}")
    bits = int(bits)
    lsb = adc_lsb(bits, full_scale)
    top = 2 ** (bits - 1)
    codes = np.rint(np.asarray(trace, dtype=np.float64) / lsb)
    return np.clip(codes, -top, top - 1).astype(np.int32)


def apply_adc(trace: np.ndarray, bits: int, full_scale: float) -> np.ndarray:
    """
    Mid-tread uniform quantization to 2^bits levels spanning [-full_scale/2, +full_scale/2].
    Zero input maps to the zero level; inputs beyond the range clamp to the end codes.

    Args:
        trace (np.ndarray):  Input voltages.
        bits (int):          Resolution in [2, 24].
        full_scale (float):  Peak-to-peak input range in volts.

    Returns:
        np.ndarray: Reconstructed (quantized) voltages.
    """
    return adc_codes(trace, bits, full_scale) * adc_lsb(int(bits), full_scale)


def decimate(trace: np.ndarray, factor: int) -> np.ndarray:
    """
    Keep every factor-th sample starting at index 0, with no anti-alias filter.
    Operates on the last axis, output length floor(len / factor).

    Args:
        trace (np.ndarray): Samples (1-D trace or [channels x samples]).
        factor (int):       Decimation factor >= 1.

    Returns:
        np.ndarray: Decimated samples.
    """
    trace = np.asarray(trace)
    if int(factor) != factor or factor < 1:
        raise ValueError(f"\ndecimate: factor must be an integer >= 1, but received: {factor}")
    factor = int(factor)
    length = trace.shape[-1]
    if factor > length:
        raise ValueError(f"\ndecimate: factor {factor} exceeds trace length {length}")
    keep = (length // factor) * factor
    return trace[..., :keep:factor].copy()


def average_traces(realizations: Union[Sequence[np.ndarray], np.ndarray]) -> np.ndarray:
    """
    Element-wise mean of repeated recordings of the same trace.

    Args:
        realizations (Sequence[np.ndarray]): Non-empty list of equal-length traces.

    Returns:
        np.ndarray: The averaged trace.
    """
    if len(realizations) == 0:
        raise ValueError("\naverage_traces: realizations must not be empty")
    lengths = {np.shape(r) for r in realizations}
    if len(lengths) != 1:
        raise ValueError(f"\naverage_traces: realizations have ragged shapes: {sorted(lengths)}")
    return np.mean(np.asarray(realizations, dtype=np.float64), axis=0)


# %% --------------------------------------------------------------------------


def _check_scene(
    layout: ArrayLayout,
    excitation: ExcitationSpec,
    propagation: PropagationSpec,
    acquisition: AcquisitionSpec,
    defect: Optional[DefectSpec],
):
    if defect is not None and not layout.contains_axially(defect.position.z, strict=True):
        raise ValueError(
            "\nsimulate: defect must lie strictly between the transducer rings.\n"
            f"Received: defect z={defect.position.z}, rings at {layout.tx_ring.z} and {layout.rx_ring.z}"
        )
    near, far = propagation.pipe_end_positions
    if near > layout.tx_ring.z or far < layout.rx_ring.z:
        raise ValueError(
            "\nsimulate: pipe_end_positions must enclose both transducer rings.\n"
            f"Received: ends {propagation.pipe_end_positions}, rings at {layout.tx_ring.z} and {layout.rx_ring.z}"
        )
    direct_end = layout.separation / propagation.group_velocity + excitation.duration
    record = acquisition.samples_per_channel / acquisition.sampling_rate
    if record < direct_end:
        raise ValueError(
            "\nsimulate: traces are too short to contain the direct arrival.\n"
            f"Record length {record * 1e6:.1f} us, direct arrival ends at {direct_end * 1e6:.1f} us"
        )


def simulate(
    pipe: PipeSpec,
    layout: ArrayLayout,
    excitation: ExcitationSpec,
    propagation: PropagationSpec,
    acquisition: AcquisitionSpec,
    defect: Optional[DefectSpec] = None,
    rng_seed: int = 0,
    realization: int = 0,
) -> WaveformSet:
    """
    Synthesize one measurement: every receiver trace of the array for a single firing of the
    transmitter ring, passed through noise, averaging, ADC quantization and decimation.

    Deterministic for a given rng_seed and realization. Each channel draws its noise from its
    own stream, SeedSequence(rng_seed, spawn_key=(realization, channel)), so channels can be
    synthesized in any order.

    Args:
        pipe (PipeSpec):                     The pipe.
        layout (ArrayLayout):                Transducer rings.
        excitation (ExcitationSpec):         Tone burst.
        propagation (PropagationSpec):       Wave speed, boundaries and noise.
        acquisition (AcquisitionSpec):       Acquisition chain.
        defect (DefectSpec, optional):       Defect, None for a baseline measurement. Defaults to None.
        rng_seed (int, optional):            Non-negative seed. Defaults to 0.
        realization (int, optional):         Independent measurement index for the same seed. Defaults to 0.

    Returns:
        WaveformSet: The simulated measurement, labeled damage when a defect is given.
    """
    if int(rng_seed) != rng_seed or rng_seed < 0:
        raise ValueError(f"\nsimulate: rng_seed must be a non-negative integer, but received: {rng_seed}")
    _check_scene(layout, excitation, propagation, acquisition, defect)

    fs = acquisition.sampling_rate
    t = np.arange(acquisition.samples_per_channel) / fs
    c = propagation.group_velocity
    unit = propagation.direct_amplitude / excitation.envelope_peak

    def burst(delay: float, amplitude: float) -> np.ndarray:
        return (amplitude * unit) * toneburst_at(t - delay, excitation)

    direct_scale = 1.0 if defect is None else 1.0 - defect.transmission_loss
    common = burst(layout.separation / c, direct_scale)

    if propagation.boundary_mode is BoundaryMode.REFLECTIVE and propagation.edge_reflection_coefficient > 0.0:
        for z_end in propagation.pipe_end_positions:
            path = abs(z_end - layout.tx_ring.z) + abs(z_end - layout.rx_ring.z)
            common = common + burst(path / c, propagation.edge_reflection_coefficient)

    if propagation.leakage_velocity is not None and propagation.leakage_amplitude > 0.0:
        common = common + burst(layout.separation / propagation.leakage_velocity, propagation.leakage_amplitude)

    sigma = propagation.noise_sigma
    traces = []
    for m, rx in enumerate(layout.rx_elements()):
        clean = common
        if defect is not None and defect.scatter_amplitude > 0.0:
            d_tx = tx_distance(defect.position, layout)
            d_rx = rx_distance(defect.position, rx, pipe)
            amplitude = defect.scatter_amplitude
            if propagation.geometric_spreading:
                amplitude *= math.sqrt(layout.separation / d_rx)
            clean = common + burst((d_tx + d_rx) / c, amplitude)

        if sigma > 0.0:
            stream = np.random.SeedSequence(int(rng_seed), spawn_key=(int(realization), m))
            rng = np.random.default_rng(stream)
            noisy = clean + rng.normal(0.0, sigma, size=(acquisition.num_averages, clean.size))
            trace = average_traces(noisy)
        else:
            trace = clean  # averaging identical realizations

        if acquisition.adc_bits is not None:
            trace = apply_adc(trace, acquisition.adc_bits, acquisition.adc_full_scale)
        traces.append(decimate(trace, acquisition.decimation_factor))

    label = Label.BASELINE if defect is None else Label.DAMAGE
    logger.debug(
        "simulated %s set: %d channels x %d samples, sigma=%g V",
        label.name.lower(),
        len(traces),
        traces[0].size,
        sigma,
    )
    return WaveformSet(
        channels=np.vstack(traces),
        sampling_rate=acquisition.effective_sampling_rate,
        label=label,
        adc_bits=acquisition.adc_bits,
        full_scale=acquisition.adc_full_scale,
        layout_digest=layout.digest,
    )


def simulate_pair(
    pipe: PipeSpec,
    layout: ArrayLayout,
    excitation: ExcitationSpec,
    propagation: PropagationSpec,
    acquisition: AcquisitionSpec,
    defect: DefectSpec,
    rng_seed: int = 0,
) -> tuple:
    """
    Baseline and damage measurements with independent noise (realizations 0 and 1 of rng_seed).

    Returns:
        tuple[WaveformSet, WaveformSet]: (baseline, damage).
    """
    baseline = simulate(pipe, layout, excitation, propagation, acquisition, None, rng_seed, realization=0)
    damage = simulate(pipe, layout, excitation, propagation, acquisition, defect, rng_seed, realization=1)
    return baseline, damage
