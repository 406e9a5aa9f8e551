"""
TorsionalDI: damage-index imaging of pipes with torsional guided waves.

A transmitter ring excites the T(0,1) mode, a receiver ring records it, and a
baseline measurement is subtracted from a damage measurement inside time-of-flight
windows to build a damage index map of the unrolled pipe surface. A ray-based
simulator and an acquisition chain emulator produce the measurements for testing.
"""

from .geometry import (
    MM,
    ArrayLayout,
    PipeSpec,
    RingSpec,
    SurfacePoint,
    circumference,
    normalize_angle,
    rx_distance,
    surface_error,
    tx_distance,
    unrolled_distance,
)
from .excitation import ExcitationSpec, hanning_toneburst, toneburst_at
from .simulator import (
    AcquisitionSpec,
    BoundaryMode,
    DefectKind,
    DefectSpec,
    Label,
    PropagationSpec,
    WaveformSet,
    apply_adc,
    average_traces,
    decimate,
    simulate,
    simulate_pair,
    transmission_loss_from_amplitudes,
)
from .di_engine import (
    DIMap,
    DIParams,
    GridSpec,
    InputMismatchError,
    LocalizationReport,
    LocalizationStatus,
    compute_di_map,
    localize,
    normalize,
    reference_di_map,
    scaled_window_length,
)
from .acquisition_io import (
    CaptureError,
    CorruptCaptureError,
    MapFormat,
    NotACaptureError,
    UnsupportedVersionError,
    export_map,
    parse_capture,
    read_map_csv,
    read_pgm,
    write_capture,
    write_report,
)
from .scenario import ScenarioConfig, ScenarioError, load_scenario, scenario_from_dict
from ._metadata import (
    __version__,
    __author__,
    __email__,
    __license__,
    __status__,
    __maintainer__,
    __credits__,
    __url__,
    __description__,
    __copyright__,
)

__all__ = [
    "MM",
    "ArrayLayout",
    "PipeSpec",
    "RingSpec",
    "SurfacePoint",
    "circumference",
    "normalize_angle",
    "rx_distance",
    "surface_error",
    "tx_distance",
    "unrolled_distance",
    "ExcitationSpec",
    "hanning_toneburst",
    "toneburst_at",
    "AcquisitionSpec",
    "BoundaryMode",
    "DefectKind",
    "DefectSpec",
    "Label",
    "PropagationSpec",
    "WaveformSet",
    "apply_adc",
    "average_traces",
    "decimate",
    "simulate",
    "simulate_pair",
    "transmission_loss_from_amplitudes",
    "DIMap",
    "DIParams",
    "GridSpec",
    "InputMismatchError",
    "LocalizationReport",
    "LocalizationStatus",
    "compute_di_map",
    "localize",
    "normalize",
    "reference_di_map",
    "scaled_window_length",
    "CaptureError",
    "CorruptCaptureError",
    "MapFormat",
    "NotACaptureError",
    "UnsupportedVersionError",
    "export_map",
    "parse_capture",
    "read_map_csv",
    "read_pgm",
    "write_capture",
    "write_report",
    "ScenarioConfig",
    "ScenarioError",
    "load_scenario",
    "scenario_from_dict",
]


if __name__ == "__main__":
    print(f"Version: {__version__}")
    print(f"Author: {__author__}")
    print(f"Email: {__email__}")
    print(f"License: {__license__}")
    print(f"Status: {__status__}")
    print(f"Maintainer: {__maintainer__}")
    print(f"Credits: {__credits__}")
    print(f"URL: {__url__}")
    print(f"Description: {__description__}")
    print(f"Copyright: {__copyright__}")
