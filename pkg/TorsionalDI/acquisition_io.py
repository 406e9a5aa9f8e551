"""
Binary capture files, DI map exports and localization reports.

Capture layout (all little-endian)::

    offset  size  field
         0     4  magic b"TGWC"
         4     2  format version (u16), currently 1
         6     1  channel count (u8)
         7     4  samples per channel (u32)
        11     4  effective sampling rate in Hz (u32)
        15     1  format byte: bits 0-5 ADC resolution, bit 6 reserved (0), bit 7 label (0 baseline, 1 damage)
        16     4  ADC full scale in microvolts (u32)
        20     4  CRC-32 of the array layout (u32), 0 when unknown
        24   2*N  signed 16-bit ADC codes, channel-major, N = channels * samples

The file size is therefore always 24 + 2 * channels * samples bytes.
"""

from typing import BinaryIO, Optional, Union
from enum import Enum
from pathlib import Path
import io
import json
import logging
import os
import re
import struct

import numpy as np

from .di_engine import DIMap, GridSpec, LocalizationReport, normalize
from .geometry import ArrayLayout
from .simulator import Label, WaveformSet, adc_codes, adc_lsb

__all__ = [
    "CaptureError",
    "NotACaptureError",
    "CorruptCaptureError",
    "UnsupportedVersionError",
    "MapFormat",
    "CAPTURE_MAGIC",
    "CAPTURE_VERSION",
    "HEADER_SIZE",
    "encode_capture",
    "decode_capture",
    "write_capture",
    "parse_capture",
    "export_map",
    "read_map_csv",
    "read_pgm",
    "write_report",
]

logger = logging.getLogger(__name__)

CAPTURE_MAGIC = b"TGWC"
CAPTURE_VERSION = 1
HEADER_FORMAT = "<4sHBIIBII"
HEADER_SIZE = struct.calcsize(HEADER_FORMAT)

DEFAULT_ADC_BITS = 10
MAX_ADC_BITS = 16  # payload words are int16

_BITS_MASK = 0x3F
_RESERVED_BIT = 0x40
_LABEL_BIT = 0x80

PathOrFile = Union[str, os.PathLike, BinaryIO]

# %% --------------------------------------------------------------------------


class CaptureError(ValueError):
    """A byte stream could not be turned into a WaveformSet."""


class NotACaptureError(CaptureError):
    """not a capture file"""


class CorruptCaptureError(CaptureError):
    """corrupt capture"""


class UnsupportedVersionError(CaptureError):
    """unsupported version"""


class MapFormat(str, Enum):
    CSV = "csv"
    PGM = "pgm"


# %% --------------------------------------------------------------------------


def encode_capture(waveforms: WaveformSet) -> bytes:
    """
    Serialize a WaveformSet to capture bytes.

    Samples are written as ADC codes of the set's resolution (10 bits when the set is
    unquantized) over its full scale rounded to whole microvolts, so an already quantized
    set with a microvolt full scale survives the round trip exactly.

    Args:
        waveforms (WaveformSet): The measurement.

    Returns:
        bytes: Header followed by the payload.
    """
    ch, ns = waveforms.shape
    bits = DEFAULT_ADC_BITS if waveforms.adc_bits is None else int(waveforms.adc_bits)
    if not 2 <= bits <= MAX_ADC_BITS:
        raise ValueError(f"\nencode_capture: adc_bits must be in [2, {MAX_ADC_BITS}], but received: {bits}")
    if ch > 0xFF:
        raise ValueError(f"\nencode_capture: at most 255 channels fit the header, received: {ch}")
    if ns > 0xFFFFFFFF:
        raise ValueError(f"\nencode_capture: too many samples per channel for the header: {ns}")
    rate = waveforms.sampling_rate
    if rate != int(rate) or rate > 0xFFFFFFFF:
        raise ValueError(f"\nencode_capture: sampling_rate must be a whole number of Hz below 2^32, received: {rate}")
    full_scale_uv = int(round(waveforms.full_scale * 1.0e6))
    if not 0 < full_scale_uv <= 0xFFFFFFFF:
        raise ValueError(f"\nencode_capture: full_scale out of range, received: {waveforms.full_scale}")
    digest = 0 if waveforms.layout_digest is None else int(waveforms.layout_digest)

    codes = adc_codes(waveforms.channels, bits, full_scale_uv / 1.0e6)
    fmt_byte = bits | (_LABEL_BIT if waveforms.label is Label.DAMAGE else 0)
    header = struct.pack(
        HEADER_FORMAT, CAPTURE_MAGIC, CAPTURE_VERSION, ch, ns, int(rate), fmt_byte, full_scale_uv, digest
    )
    return header + codes.astype("<i2").tobytes(order="C")


def decode_capture(data: bytes, layout: Optional[ArrayLayout] = None) -> WaveformSet:
    """
    Parse capture bytes. Every malformed input raises a CaptureError subclass.

    Args:
        data (bytes):                    The complete file contents.
        layout (ArrayLayout, optional):  If given, the channel count and stored layout digest must match it.

    Returns:
        WaveformSet: The measurement with voltages rebuilt from the codes.
    """
    data = bytes(data)
    if len(data) < len(CAPTURE_MAGIC) or data[: len(CAPTURE_MAGIC)] != CAPTURE_MAGIC:
        raise NotACaptureError(f"\ndecode_capture: not a capture file (magic {data[:4]!r})")
    if len(data) < HEADER_SIZE:
        raise CorruptCaptureError(f"\ndecode_capture: corrupt capture, header truncated at {len(data)} bytes")

    _, version, ch, ns, rate, fmt_byte, full_scale_uv, digest = struct.unpack_from(HEADER_FORMAT, data)
    if version != CAPTURE_VERSION:
        raise UnsupportedVersionError(
            f"\ndecode_capture: unsupported version {version}, this reader handles version {CAPTURE_VERSION}"
        )
    bits = fmt_byte & _BITS_MASK
    if ch < 1 or ns < 1:
        raise CorruptCaptureError(f"\ndecode_capture: corrupt capture, {ch} channels x {ns} samples")
    if rate < 1 or full_scale_uv < 1:
        raise CorruptCaptureError(f"\ndecode_capture: corrupt capture, rate {rate} Hz, full scale {full_scale_uv} uV")
    if fmt_byte & _RESERVED_BIT or not 2 <= bits <= MAX_ADC_BITS:
        raise CorruptCaptureError(f"\ndecode_capture: corrupt capture, format byte {fmt_byte:#04x}")

    expected = HEADER_SIZE + 2 * ch * ns
    if len(data) != expected:
        raise CorruptCaptureError(
            f"\ndecode_capture: corrupt capture, header declares {expected} bytes but the stream has {len(data)}"
        )
    codes = np.frombuffer(data, dtype="<i2", count=ch * ns, offset=HEADER_SIZE).reshape(ch, ns)
    top = 2 ** (bits - 1)
    if codes.min() < -top or codes.max() > top - 1:
        raise CorruptCaptureError(f"\ndecode_capture: corrupt capture, sample codes exceed {bits}-bit range")

    full_scale = full_scale_uv / 1.0e6
    if layout is not None:
        if ch != layout.num_receivers:
            raise CaptureError(
                f"\ndecode_capture: capture has {ch} channels but the layout has {layout.num_receivers} receivers"
            )
        if digest != 0 and digest != layout.digest:
            raise CaptureError(
                f"\ndecode_capture: capture was recorded with a different layout "
                f"(digest {digest:#010x}, expected {layout.digest:#010x})"
            )

    return WaveformSet(
        channels=codes.astype(np.int32) * adc_lsb(bits, full_scale),
        sampling_rate=float(rate),
        label=Label.DAMAGE if fmt_byte & _LABEL_BIT else Label.BASELINE,
        adc_bits=bits,
        full_scale=full_scale,
        layout_digest=None if digest == 0 else digest,
    )


def write_capture(waveforms: WaveformSet, destination: PathOrFile) -> int:
    """
    Write a WaveformSet as a capture file.

    Args:
        waveforms (WaveformSet):                        The measurement.
        destination (Union[str, PathLike, BinaryIO]):   File path or writable binary stream.

    Returns:
        int: Number of bytes written, 24 + 2 * channels * samples.
    """
    payload = encode_capture(waveforms)
    if hasattr(destination, "write"):
        destination.write(payload)
    else:
        Path(destination).write_bytes(payload)
    logger.debug("wrote %s capture, %d bytes", waveforms.label.name.lower(), len(payload))
    return len(payload)


def parse_capture(source: Union[PathOrFile, bytes], layout: Optional[ArrayLayout] = None) -> WaveformSet:
    """
    Read a capture file written by write_capture.

    Args:
        source (Union[str, PathLike, BinaryIO, bytes]):  File path, readable binary stream or raw bytes.
        layout (ArrayLayout, optional):                  Layout to check the capture against. Defaults to None.

    Returns:
        WaveformSet: The measurement.
    """
    if isinstance(source, (bytes, bytearray, memoryview)):
        data = bytes(source)
    elif hasattr(source, "read"):
        data = source.read()
    else:
        data = Path(source).read_bytes()
    return decode_capture(data, layout)


# %% --------------------------------------------------------------------------


def _map_header(di_map: DIMap) -> dict:
    grid = di_map.grid
    header = {
        "rows": grid.rows,
        "cols": grid.cols,
        "z0_m": repr(grid.axial_extent[0]),
        "z1_m": repr(grid.axial_extent[1]),
        "row_axis": "theta_deg",
        "col_axis": "z",
    }
    for key, value in di_map.metadata.items():
        header[key] = ",".join(map(str, value)) if isinstance(value, (tuple, list)) else value
    return header


def _pgm_bytes(di_map: DIMap) -> bytes:
    scaled = np.rint(normalize(di_map).values * 65535.0).astype(">u2")
    rows, cols = scaled.shape
    return f"P5\n{cols} {rows}\n65535\n".encode("ascii") + scaled.tobytes(order="C")


def export_map(di_map: DIMap, fmt: Union[MapFormat, str], destination: Union[str, os.PathLike, BinaryIO]):
    """
    Write a DI map as CSV or as a 16-bit grayscale PGM image.

    CSV holds one line per row (circumferential position) and one column per axial position,
    values printed with 17 significant digits, preceded by "# key: value" lines describing the grid.
    PGM is the normalized map, rows downward and columns to the right, maxval 65535.

    Args:
        di_map (DIMap):                                The map.
        fmt (Union[MapFormat, str]):                   "csv" or "pgm".
        destination (Union[str, PathLike, BinaryIO]):  File path or writable binary stream.
    """
    fmt = MapFormat(fmt)
    if fmt is MapFormat.PGM:
        payload = _pgm_bytes(di_map)
    else:
        header = "\n".join(f"{key}: {value}" for key, value in _map_header(di_map).items())
        buffer = io.StringIO()
        np.savetxt(buffer, di_map.values, fmt="%.17g", delimiter=",", header=header, comments="# ")
        payload = buffer.getvalue().encode("ascii")

    if hasattr(destination, "write"):
        destination.write(payload)
    else:
        Path(destination).write_bytes(payload)


def read_map_csv(source: Union[str, os.PathLike]) -> DIMap:
    """
    Read a map written by export_map in CSV form.

    Args:
        source (Union[str, PathLike]): CSV file path.

    Returns:
        DIMap: The map, with the extra header entries as string metadata.
    """
    text = Path(source).read_text(encoding="ascii")
    header = {}
    for line in text.splitlines():
        if not line.startswith("#"):
            break
        key, _, value = line[1:].partition(":")
        header[key.strip()] = value.strip()
    try:
        rows, cols = int(header.pop("rows")), int(header.pop("cols"))
        grid = GridSpec(rows, cols, (float(header.pop("z0_m")), float(header.pop("z1_m"))))
    except KeyError as err:
        raise ValueError(f"\nread_map_csv: header is missing {err.args[0]!r}") from None
    header.pop("row_axis", None)
    header.pop("col_axis", None)
    values = np.loadtxt(io.StringIO(text), delimiter=",", comments="#", ndmin=2)
    return DIMap(values, grid, header)


def read_pgm(source: Union[str, os.PathLike, bytes]) -> np.ndarray:
    """
    Read a binary 16-bit PGM image.

    Args:
        source (Union[str, PathLike, bytes]): File path or raw bytes.

    Returns:
        np.ndarray: uint16 pixel array [height x width].
    """
    data = bytes(source) if isinstance(source, (bytes, bytearray)) else Path(source).read_bytes()
    match = re.match(rb"P5\s+(\d+)\s+(\d+)\s+(\d+)\s", data)
    if match is None:
        raise ValueError("\nread_pgm: not a binary PGM image")
    width, height, maxval = (int(g) for g in match.groups())
    if maxval != 65535:
        raise ValueError(f"\nread_pgm: expected a 16-bit image, maxval is {maxval}")
    pixels = np.frombuffer(data, dtype=">u2", offset=match.end())
    if pixels.size != width * height:
        raise ValueError(f"\nread_pgm: expected {width * height} pixels, found {pixels.size}")
    return pixels.reshape(height, width).astype(np.uint16)


def write_report(report: LocalizationReport, destination: Union[str, os.PathLike], extra: Optional[dict] = None):
    """
    Write a localization report as indented JSON.

    Args:
        report (LocalizationReport):     The report.
        destination (Union[str, PathLike]): Output path.
        extra (dict, optional):          Additional top-level entries, e.g. the capture file names.
    """
    content = report.as_dict()
    if extra:
        content.update(extra)
    Path(destination).write_text(json.dumps(content, indent=2, sort_keys=True) + "\n", encoding="utf-8")
