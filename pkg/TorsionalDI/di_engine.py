"""
Damage index (DI) maps by baseline subtraction over the unrolled pipe.

For every pixel between the rings and every receiver m the time of flight is

    T_tof = (d_tx + d_rx) / C,    sn = round(T_tof * f_s)

where d_tx is the axial distance from the transmitter ring and d_rx the wrap-aware
distance to receiver m. The baseline windows [sn, sn + W) of all receivers are
added into one array, the damage windows into another, and the pixel value is
the sum over the W samples of the squared difference of the two arrays.
Windows running past the end of a trace are zero padded.

Two implementations share this contract: reference_di_map, a literal loop over
rows, columns and receivers, and compute_di_map, which precomputes all window
starts with numpy and runs the accumulation in a numba kernel. The kernel adds
samples in the same order as the reference, so both agree to rounding of the
final sum of squares.
"""

from typing import Optional
from dataclasses import dataclass, field, replace
from enum import Enum
import logging

import numpy as np
from numba import njit, prange

from .geometry import (
    ArrayLayout,
    PipeSpec,
    SurfacePoint,
    normalize_angle,
    rx_distance,
    surface_error,
    tx_distance,
    unrolled_distance,
)
from .simulator import WaveformSet

__all__ = [
    "InputMismatchError",
    "GridSpec",
    "DIParams",
    "DIMap",
    "LocalizationStatus",
    "LocalizationReport",
    "sample_index",
    "scaled_window_length",
    "window_starts",
    "compute_di_map",
    "reference_di_map",
    "localize",
    "normalize",
]

logger = logging.getLogger(__name__)

DEFAULT_WINDOW = 600

# %% --------------------------------------------------------------------------


class InputMismatchError(ValueError):
    """Baseline, damage, layout and grid do not describe the same measurement."""


@dataclass(frozen=True)
class GridSpec:
    """
    Pixel grid over the unrolled pipe between the rings.

    Rows run around the circumference, columns along the axis. Pixel (i, j) is centered at
    theta = (i + 0.5) * 360 / rows and z = z0 + (j + 0.5) * (z1 - z0) / cols.

    Args:
        rows (int):            Circumferential pixel count, >= 2.
        cols (int):            Axial pixel count, >= 2.
        axial_extent (tuple):  (z0, z1) in meters, the transmitter and receiver ring planes.
    """

    rows: int
    cols: int
    axial_extent: tuple

    def __post_init__(self):
        for name in ("rows", "cols"):
            value = getattr(self, name)
            if int(value) != value or value < 2:
                raise ValueError(f"\nGridSpec: {name} must be an integer >= 2, but received: {value}")
            object.__setattr__(self, name, int(value))
        extent = tuple(float(z) for z in self.axial_extent)
        if len(extent) != 2 or not extent[0] < extent[1]:
            raise ValueError(
                f"\nGridSpec: axial_extent must be two increasing positions, received: {self.axial_extent}"
            )
        object.__setattr__(self, "axial_extent", extent)

    @classmethod
    def with_layout(cls, layout: ArrayLayout, rows: int, cols: int) -> "GridSpec":
        """
        Grid spanning the ring separation of a layout.

        Args:
            layout (ArrayLayout): Transducer rings.
            rows (int):           Circumferential pixels.
            cols (int):           Axial pixels.

        Returns:
            GridSpec: The grid.
        """
        return cls(rows, cols, (layout.tx_ring.z, layout.rx_ring.z))

    @property
    def shape(self) -> tuple:
        return self.rows, self.cols

    @property
    def axial_pitch(self) -> float:
        return (self.axial_extent[1] - self.axial_extent[0]) / self.cols

    @property
    def angular_pitch(self) -> float:
        return 360.0 / self.rows

    def circumferential_pitch(self, pipe: PipeSpec) -> float:
        return pipe.circumference / self.rows

    def z_centers(self) -> np.ndarray:
        z0, z1 = self.axial_extent
        return z0 + (np.arange(self.cols) + 0.5) * (z1 - z0) / self.cols

    def theta_centers(self) -> np.ndarray:
        return normalize_angle((np.arange(self.rows) + 0.5) * 360.0 / self.rows)

    def pixel_center(self, i: int, j: int) -> SurfacePoint:
        if not (0 <= i < self.rows and 0 <= j < self.cols):
            raise IndexError(f"\nGridSpec.pixel_center: pixel ({i}, {j}) outside {self.rows} x {self.cols} grid")
        return SurfacePoint(float(self.z_centers()[j]), float(self.theta_centers()[i]))

    def matches(self, layout: ArrayLayout) -> bool:
        return self.axial_extent == (layout.tx_ring.z, layout.rx_ring.z)


@dataclass(frozen=True)
class DIParams:
    """
    Imaging parameters.

    Args:
        group_velocity (float, optional):        T(0,1) group velocity in m/s. Defaults to 3130.
        window_length_samples (int, optional):   Window length W in samples. Defaults to 600.
        sampling_rate (float, optional):         Expected effective sampling rate of the inputs;
                                                 None accepts the rate of the data. Defaults to None.
    """

    group_velocity: float = 3130.0
    window_length_samples: int = DEFAULT_WINDOW
    sampling_rate: Optional[float] = None

    def __post_init__(self):
        if not self.group_velocity > 0.0:
            raise ValueError(f"\nDIParams: group_velocity must be positive, but received: {self.group_velocity}")
        w = self.window_length_samples
        if int(w) != w or w < 1:
            raise ValueError(f"\nDIParams: window_length_samples must be an integer >= 1, but received: {w}")
        object.__setattr__(self, "window_length_samples", int(w))
        if self.sampling_rate is not None and not self.sampling_rate > 0.0:
            raise ValueError(f"\nDIParams: sampling_rate must be positive or None, but received: {self.sampling_rate}")


@dataclass(frozen=True, eq=False)
class DIMap:
    """
    Damage index values on a GridSpec.

    Args:
        values (np.ndarray):         [rows x cols] non-negative pixel values.
        grid (GridSpec):             The pixel grid.
        metadata (dict, optional):   Window length, group velocity, sampling rate and sources.
    """

    values: np.ndarray
    grid: GridSpec
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        values = np.array(self.values, dtype=np.float64)
        if values.shape != self.grid.shape:
            raise ValueError(f"\nDIMap: values shape {values.shape} does not match grid shape {self.grid.shape}")
        if np.any(values < 0.0) or not np.all(np.isfinite(values)):
            raise ValueError("\nDIMap: values must be finite and non-negative")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    @property
    def shape(self) -> tuple:
        return self.values.shape

    @property
    def peak_value(self) -> float:
        return float(self.values.max())

    def argmax(self) -> tuple:
        """
        Pixel index of the largest value; ties go to the lowest row, then the lowest column.

        Returns:
            tuple[int, int]: (row, col).
        """
        flat = int(np.argmax(self.values))
        return divmod(flat, self.grid.cols)


class LocalizationStatus(str, Enum):
    LOCATED = "located"
    NO_DAMAGE = "no damage detected"


@dataclass(frozen=True, eq=False)
class LocalizationReport:
    """
    Result of localize.

    Args:
        status (LocalizationStatus):      located, or no damage detected for an all-zero map.
        estimated (SurfacePoint):         Center of the peak pixel, None when no damage was detected.
        peak_value (float):               Map value at the peak.
        row (int):                        Peak pixel row, None when no damage was detected.
        col (int):                        Peak pixel column, None when no damage was detected.
        map (DIMap):                      The map that was searched.
        truth (SurfacePoint, optional):   Known defect location.
        error (float, optional):          surface_error(estimated, truth) in meters, present iff truth is.
    """

    status: LocalizationStatus
    estimated: Optional[SurfacePoint]
    peak_value: float
    row: Optional[int]
    col: Optional[int]
    map: DIMap
    truth: Optional[SurfacePoint] = None
    error: Optional[float] = None

    @property
    def located(self) -> bool:
        return self.status is LocalizationStatus.LOCATED

    def with_truth(self, truth: SurfacePoint, pipe: PipeSpec) -> "LocalizationReport":
        """
        Attach the known defect location and the surface error of the estimate.

        Args:
            truth (SurfacePoint): Known defect location.
            pipe (PipeSpec):      The pipe, for the surface metric.

        Returns:
            LocalizationReport: A copy with truth and error set (error stays None if nothing was located).
        """
        error = None if self.estimated is None else surface_error(self.estimated, truth, pipe)
        return replace(self, truth=truth, error=error)

    def as_dict(self) -> dict:
        """
        Machine-readable summary in millimeters and degrees.

        Returns:
            dict: Report fields.
        """
        out = {
            "status": self.status.value,
            "estimated_z_mm": None if self.estimated is None else self.estimated.z_mm,
            "estimated_theta_deg": None if self.estimated is None else self.estimated.theta,
            "row": self.row,
            "col": self.col,
            "peak_value": self.peak_value,
            "grid_rows": self.map.grid.rows,
            "grid_cols": self.map.grid.cols,
        }
        if self.truth is not None:
            out["truth_z_mm"] = self.truth.z_mm
            out["truth_theta_deg"] = self.truth.theta
            out["error_mm"] = None if self.error is None else self.error * 1.0e3
        return out


# %% --------------------------------------------------------------------------


def sample_index(t_tof, sampling_rate: float):
    """
    Window start for a time of flight: T_tof * f_s rounded half up to the nearest sample.

    Args:
        t_tof (Union[float, np.ndarray]): Time(s) of flight in seconds.
        sampling_rate (float):            Sampling rate of the traces in Hz.

    Returns:
        Union[int, np.ndarray]: Sample index (int64 array for array input).
    """
    sn = np.floor(np.asarray(t_tof) * sampling_rate + 0.5).astype(np.int64)
    if sn.ndim == 0:
        return int(sn)
    return sn


def scaled_window_length(window: int, native_rate: float, effective_rate: float) -> int:
    """
    Window length that covers the same duration at another sampling rate,
    e.g. 600 samples at 10 MHz -> 60 samples after 10x decimation.

    Args:
        window (int):            Window length at native_rate.
        native_rate (float):     Rate the window length was chosen for.
        effective_rate (float):  Rate of the data being imaged.

    Returns:
        int: Window length in samples, at least 1.
    """
    return max(1, int(round(window * effective_rate / native_rate)))


def _check_inputs(
    baseline: WaveformSet,
    damage: WaveformSet,
    layout: ArrayLayout,
    grid: GridSpec,
    params: DIParams,
) -> float:
    if baseline.shape != damage.shape:
        raise InputMismatchError(
            f"\ncompute_di_map: baseline shape {baseline.shape} differs from damage shape {damage.shape}"
        )
    if baseline.sampling_rate != damage.sampling_rate:
        raise InputMismatchError(
            "\ncompute_di_map: baseline and damage sampling rates differ: "
            f"{baseline.sampling_rate} Hz vs {damage.sampling_rate} Hz"
        )
    if baseline.num_receivers != layout.num_receivers:
        raise InputMismatchError(
            f"\ncompute_di_map: data has {baseline.num_receivers} channels but the layout has "
            f"{layout.num_receivers} receivers"
        )
    for ws in (baseline, damage):
        if ws.layout_digest is not None and ws.layout_digest != layout.digest:
            raise InputMismatchError(
                f"\ncompute_di_map: {ws.label.name.lower()} set was recorded with a different layout "
                f"(digest {ws.layout_digest:#010x}, expected {layout.digest:#010x})"
            )
    if not grid.matches(layout):
        raise InputMismatchError(
            f"\ncompute_di_map: grid axial extent {grid.axial_extent} does not span the rings "
            f"({layout.tx_ring.z}, {layout.rx_ring.z})"
        )
    fs = baseline.sampling_rate
    if params.sampling_rate is not None and params.sampling_rate != fs:
        raise InputMismatchError(
            f"\ncompute_di_map: params expect {params.sampling_rate} Hz but the data is sampled at {fs} Hz"
        )
    return fs


def _make_map(values: np.ndarray, grid: GridSpec, params: DIParams, fs: float, baseline, damage) -> DIMap:
    metadata = {
        "window_length_samples": params.window_length_samples,
        "group_velocity": params.group_velocity,
        "sampling_rate": fs,
        "sources": (baseline.label.name.lower(), damage.label.name.lower()),
    }
    return DIMap(values, grid, metadata)


def window_starts(layout: ArrayLayout, pipe: PipeSpec, grid: GridSpec, params: DIParams, fs: float) -> np.ndarray:
    """
    Window start sample of every (pixel, receiver) pair.

    Args:
        layout (ArrayLayout): Transducer rings.
        pipe (PipeSpec):      The pipe.
        grid (GridSpec):      Pixel grid.
        params (DIParams):    Imaging parameters.
        fs (float):           Sampling rate of the traces.

    Returns:
        np.ndarray: int64 array [rows x cols x receivers].
    """
    z = grid.z_centers()
    theta = grid.theta_centers()
    d_tx = np.abs(z - layout.tx_ring.z)
    d_rx = unrolled_distance(
        z[None, :, None] - layout.rx_ring.z,
        theta[:, None, None] - layout.rx_angles[None, None, :],
        pipe.circumference,
    )
    t_tof = (d_tx[None, :, None] + d_rx) / params.group_velocity
    return sample_index(t_tof, fs)


def _di_kernel(baseline, damage, starts, window):
    rows, cols, n_rx = starts.shape
    n = baseline.shape[1]
    out = np.zeros((rows, cols))
    for i in prange(rows):
        win_bs = np.empty(window)
        win_dm = np.empty(window)
        for j in range(cols):
            win_bs[:] = 0.0
            win_dm[:] = 0.0
            for m in range(n_rx):
                sn = starts[i, j, m]
                stop = min(sn + window, n)
                for k in range(sn, stop):
                    win_bs[k - sn] += baseline[m, k]
                    win_dm[k - sn] += damage[m, k]
            acc = 0.0
            for s in range(window):
                delta = win_bs[s] - win_dm[s]
                acc += delta * delta
            out[i, j] = acc
    return out


_di_kernel_serial = njit(cache=True)(_di_kernel)
_di_kernel_parallel = njit(parallel=True)(_di_kernel)


def compute_di_map(
    baseline: WaveformSet,
    damage: WaveformSet,
    layout: ArrayLayout,
    pipe: PipeSpec,
    grid: GridSpec,
    params: DIParams,
    parallel: bool = False,
) -> DIMap:
    """
    Damage index map of a baseline/damage pair.

    Pixels are independent; with parallel=True rows are spread over threads and the
    result is bit-identical to the serial run.

    Args:
        baseline (WaveformSet):     Measurement in the healthy state.
        damage (WaveformSet):       Measurement to inspect.
        layout (ArrayLayout):       Transducer rings the data was recorded with.
        pipe (PipeSpec):            The pipe.
        grid (GridSpec):            Pixel grid, spanning the ring separation.
        params (DIParams):          Imaging parameters.
        parallel (bool, optional):  Use all cores. Defaults to False.

    Returns:
        DIMap: The map.
    """
    fs = _check_inputs(baseline, damage, layout, grid, params)
    starts = window_starts(layout, pipe, grid, params, fs)
    kernel = _di_kernel_parallel if parallel else _di_kernel_serial
    values = kernel(
        np.ascontiguousarray(baseline.channels),
        np.ascontiguousarray(damage.channels),
        starts,
        params.window_length_samples,
    )
    logger.debug(
        "DI map %d x %d from %d receivers, W=%d",
        grid.rows,
        grid.cols,
        layout.num_receivers,
        params.window_length_samples,
    )
    return _make_map(values, grid, params, fs, baseline, damage)


def _padded_window(trace: np.ndarray, sn: int, window: int) -> np.ndarray:
    out = np.zeros(window)
    segment = trace[sn : sn + window]
    out[: segment.size] = segment
    return out


def reference_di_map(
    baseline: WaveformSet,
    damage: WaveformSet,
    layout: ArrayLayout,
    pipe: PipeSpec,
    grid: GridSpec,
    params: DIParams,
) -> DIMap:
    """
    Unoptimized, line-by-line implementation of the DI map loop. Same contract as compute_di_map,
    kept as the equivalence oracle for it.
    """
    fs = _check_inputs(baseline, damage, layout, grid, params)
    c = params.group_velocity
    w = params.window_length_samples
    receivers = layout.rx_elements()
    di = np.zeros(grid.shape)
    for i in range(grid.rows):
        for j in range(grid.cols):
            pixel = grid.pixel_center(i, j)
            window_bs = np.zeros(w)
            window_dm = np.zeros(w)
            for m, rx in enumerate(receivers):
                t_bs = baseline.channels[m]
                t_dm = damage.channels[m]
                t_tof = (tx_distance(pixel, layout) + rx_distance(pixel, rx, pipe)) / c
                sn = sample_index(t_tof, fs)
                window_bs += _padded_window(t_bs, sn, w)
                window_dm += _padded_window(t_dm, sn, w)
            delta = window_bs - window_dm
            di[i, j] = np.sum(delta**2)
    return _make_map(di, grid, params, fs, baseline, damage)


# %% --------------------------------------------------------------------------


def localize(
    di_map: DIMap,
    truth: Optional[SurfacePoint] = None,
    pipe: Optional[PipeSpec] = None,
) -> LocalizationReport:
    """
    Defect estimate at the center of the brightest pixel.

    An all-zero map means baseline and damage were identical and is reported as
    "no damage detected" without a location.

    Args:
        di_map (DIMap):                   The map.
        truth (SurfacePoint, optional):   Known defect location; requires pipe. Defaults to None.
        pipe (PipeSpec, optional):        The pipe, for the error metric. Defaults to None.

    Returns:
        LocalizationReport: The estimate.
    """
    if truth is not None and pipe is None:
        raise ValueError("\nlocalize: pipe is required to compute the error against truth")
    peak = di_map.peak_value
    if peak <= 0.0:
        report = LocalizationReport(LocalizationStatus.NO_DAMAGE, None, peak, None, None, di_map)
    else:
        i, j = di_map.argmax()
        report = LocalizationReport(LocalizationStatus.LOCATED, di_map.grid.pixel_center(i, j), peak, i, j, di_map)
    if truth is not None:
        report = report.with_truth(truth, pipe)
    return report


def normalize(di_map: DIMap) -> DIMap:
    """
    Scale a map so its maximum is 1. An all-zero map is returned unchanged.

    Args:
        di_map (DIMap): The map.

    Returns:
        DIMap: The normalized map.
    """
    peak = di_map.peak_value
    if peak == 0.0:
        return di_map
    return replace(di_map, values=di_map.values / peak)
