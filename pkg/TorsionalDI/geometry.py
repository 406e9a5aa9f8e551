"""
Coordinates on the unrolled pipe surface.

The pipe is cut along a generator line and laid flat: the horizontal axis is the
axial position z measured from the transmitter ring plane, the vertical axis is
the arc length theta * circumference / 360. Distances on that sheet wrap around
the circumference, so a point at 350 deg and a point at 10 deg are 20 deg apart.

All lengths are meters and all angles are degrees.
"""

from typing import Optional, Union
from dataclasses import dataclass
import math
import zlib

import numpy as np

__all__ = [
    "MM",
    "PipeSpec",
    "SurfacePoint",
    "RingSpec",
    "ArrayLayout",
    "normalize_angle",
    "unrolled_distance",
    "circumference",
    "tx_distance",
    "rx_distance",
    "surface_error",
]

MM = 1.0e-3  # meters per millimeter

ArrayOrFloat = Union[float, np.ndarray]

# %% --------------------------------------------------------------------------


def normalize_angle(theta: ArrayOrFloat) -> ArrayOrFloat:
    """
    Map an angle (or array of angles) in degrees into [0, 360).

    Args:
        theta (Union[float, np.ndarray]): Angle(s) in degrees.

    Returns:
        Union[float, np.ndarray]: Angle(s) in [0, 360).
    """
    wrapped = np.mod(theta, 360.0)
    # np.mod(-1e-20, 360.0) rounds up to 360.0
    wrapped = np.where(wrapped >= 360.0, 0.0, wrapped)
    if np.ndim(wrapped) == 0:
        return float(wrapped)
    return wrapped


def unrolled_distance(dz: ArrayOrFloat, dtheta: ArrayOrFloat, circ: float) -> ArrayOrFloat:
    """
    Distance on the unrolled sheet with circumferential wrap.

    The angular separation is folded into [0, 180] degrees before it is turned into an arc
    length, so the shorter way around the pipe is always used. Works elementwise on arrays,
    which lets the scalar and vectorised callers share the exact same arithmetic.

    Args:
        dz (Union[float, np.ndarray]):     Axial separation(s) in meters.
        dtheta (Union[float, np.ndarray]): Angular separation(s) in degrees.
        circ (float):                      Pipe circumference in meters.

    Returns:
        Union[float, np.ndarray]: sqrt(dz^2 + arc^2) in meters.
    """
    d = np.mod(np.abs(dtheta), 360.0)
    d = np.minimum(d, 360.0 - d)
    dy = d / 360.0 * circ
    dist = np.sqrt(dz * dz + dy * dy)
    if np.ndim(dist) == 0:
        return float(dist)
    return dist


# %% --------------------------------------------------------------------------


@dataclass(frozen=True)
class PipeSpec:
    """
    Geometry and material metadata of a straight pipe.

    Args:
        outer_diameter (float):            Outer diameter in meters.
        wall_thickness (float):            Wall thickness in meters.
        length (float):                    Pipe length in meters.
        density (float, optional):         Density in kg/m^3 (metadata only).
        youngs_modulus (float, optional):  Young's modulus in Pa (metadata only).
        poisson_ratio (float, optional):   Poisson ratio (metadata only).
    """

    outer_diameter: float
    wall_thickness: float
    length: float
    density: Optional[float] = None
    youngs_modulus: Optional[float] = None
    poisson_ratio: Optional[float] = None

    def __post_init__(self):
        if not self.wall_thickness > 0.0:
            raise ValueError(f"\nPipeSpec: wall_thickness must be positive, but received: {self.wall_thickness}")
        if not self.outer_diameter > 2.0 * self.wall_thickness:
            raise ValueError(
                "\nPipeSpec: outer_diameter must be greater than 2 * wall_thickness.\n"
                f"Received: outer_diameter={self.outer_diameter}, wall_thickness={self.wall_thickness}"
            )
        if not self.length > 0.0:
            raise ValueError(f"\nPipeSpec: length must be positive, but received: {self.length}")

    @property
    def circumference(self) -> float:
        """
        Outer-surface circumference, pi * outer_diameter.

        Returns:
            float: Circumference in meters.
        """
        return math.pi * self.outer_diameter

    @classmethod
    def with_steel_pipe(cls) -> "PipeSpec":
        """
        Create the steel pipe used in the finite element study:
        OD 114.6 mm, wall 4 mm, length 1000 mm, 7850 kg/m^3, 200 GPa, Poisson ratio 0.3.

        Returns:
            PipeSpec: The steel pipe.
        """
        return cls(
            outer_diameter=114.6 * MM,
            wall_thickness=4.0 * MM,
            length=1000.0 * MM,
            density=7850.0,
            youngs_modulus=200.0e9,
            poisson_ratio=0.3,
        )


@dataclass(frozen=True)
class SurfacePoint:
    """
    A point on the pipe surface.

    Args:
        z (float):     Axial position in meters, measured from the transmitter ring plane.
        theta (float): Angular position in degrees, normalized into [0, 360) on construction.
    """

    z: float
    theta: float

    def __post_init__(self):
        object.__setattr__(self, "z", float(self.z))
        object.__setattr__(self, "theta", normalize_angle(float(self.theta)))

    @classmethod
    def from_mm(cls, z_mm: float, theta_deg: float) -> "SurfacePoint":
        return cls(z_mm * MM, theta_deg)

    @property
    def z_mm(self) -> float:
        return self.z / MM

    def rotated(self, dtheta: float) -> "SurfacePoint":
        return SurfacePoint(self.z, self.theta + dtheta)

    def __str__(self) -> str:
        return f"(z={self.z_mm:.1f} mm, theta={self.theta:.2f} deg)"


@dataclass(frozen=True)
class RingSpec:
    """
    A ring of uniformly spaced transducer elements.

    Args:
        z (float):   Axial position of the ring plane in meters.
        count (int): Number of elements; element k sits at 360 * k / count degrees.
    """

    z: float
    count: int

    def __post_init__(self):
        if int(self.count) != self.count or self.count < 1:
            raise ValueError(f"\nRingSpec: count must be a positive integer, but received: {self.count}")
        object.__setattr__(self, "count", int(self.count))
        object.__setattr__(self, "z", float(self.z))

    @property
    def angles(self) -> np.ndarray:
        """
        Element angles in degrees, 360 * k / count for k = 0..count-1.

        Returns:
            np.ndarray: Angles of each element.
        """
        return 360.0 * np.arange(self.count) / self.count

    def element(self, k: int) -> SurfacePoint:
        if k < 0 or self.count <= k:
            raise IndexError(f"\nRingSpec.element: index {k} out of range for {self.count} elements")
        return SurfacePoint(self.z, 360.0 * k / self.count)

    def elements(self) -> tuple:
        return tuple(self.element(k) for k in range(self.count))


@dataclass(frozen=True)
class ArrayLayout:
    """
    Transmitter ring plus receiver ring on the pipe surface.

    All transmitters fire together, so only the axial plane of the transmitter ring
    matters for time of flight; receivers are individual points.

    Args:
        tx_ring (RingSpec): Transmitter ring.
        rx_ring (RingSpec): Receiver ring, must lie at larger z than tx_ring.
    """

    tx_ring: RingSpec
    rx_ring: RingSpec

    def __post_init__(self):
        if not self.rx_ring.z > self.tx_ring.z:
            raise ValueError(
                "\nArrayLayout: rx_ring.z must be greater than tx_ring.z.\n"
                f"Received: tx_ring.z={self.tx_ring.z}, rx_ring.z={self.rx_ring.z}"
            )

    @property
    def separation(self) -> float:
        return self.rx_ring.z - self.tx_ring.z

    @property
    def rx_angles(self) -> np.ndarray:
        return self.rx_ring.angles

    @property
    def num_receivers(self) -> int:
        return self.rx_ring.count

    def rx_elements(self) -> tuple:
        return self.rx_ring.elements()

    def contains_axially(self, z: float, strict: bool = False) -> bool:
        """
        Check whether an axial position lies between the rings.

        Args:
            z (float):             Axial position in meters.
            strict (bool, optional): Exclude the ring planes themselves. Defaults to False.

        Returns:
            bool: True if z is inside the ring span.
        """
        if strict:
            return self.tx_ring.z < z < self.rx_ring.z
        return self.tx_ring.z <= z <= self.rx_ring.z

    @property
    def digest(self) -> int:
        """
        CRC-32 of the canonical layout description, stored in capture headers
        to tie a capture to the layout it was recorded with.

        Returns:
            int: Unsigned 32-bit checksum.
        """
        text = (
            f"tx:{self.tx_ring.z!r}:{self.tx_ring.count};"
            f"rx:{self.rx_ring.z!r}:{self.rx_ring.count}"
        )
        return zlib.crc32(text.encode("ascii")) & 0xFFFFFFFF

    @classmethod
    def with_rings(cls, count: int, separation: float, tx_z: float = 0.0, rx_count: Optional[int] = None):
        """
        Create a layout with a transmitter ring at tx_z and a receiver ring separation further along.

        Args:
            count (int):                 Element count of the transmitter ring (and receiver ring).
            separation (float):          Ring separation in meters.
            tx_z (float, optional):      Transmitter ring position. Defaults to 0.0.
            rx_count (int, optional):    Receiver count if it differs from count. Defaults to None.

        Returns:
            ArrayLayout: The layout.
        """
        if rx_count is None:
            rx_count = count
        return cls(RingSpec(tx_z, count), RingSpec(tx_z + separation, rx_count))

    @classmethod
    def with_simulation_rings(cls) -> "ArrayLayout":
        """16 transmitters and 16 receivers, rings 400 mm apart."""
        return cls.with_rings(16, 400.0 * MM)

    @classmethod
    def with_experimental_rings(cls) -> "ArrayLayout":
        """8 transmitters and 8 receivers, rings 400 mm apart."""
        return cls.with_rings(8, 400.0 * MM)


# %% --------------------------------------------------------------------------


def circumference(pipe: PipeSpec) -> float:
    """
    Outer-surface circumference of the pipe, pi * outer_diameter.

    Args:
        pipe (PipeSpec): The pipe.

    Returns:
        float: Circumference in meters.
    """
    return pipe.circumference


def tx_distance(pixel: SurfacePoint, layout: ArrayLayout) -> float:
    """
    Distance from the transmitter ring to a pixel. The whole ring fires at once,
    so only the axial separation counts and the pixel angle is irrelevant.

    Args:
        pixel (SurfacePoint):   Point on the surface.
        layout (ArrayLayout):   Transducer layout.

    Returns:
        float: |pixel.z - tx_ring.z| in meters.
    """
    return abs(pixel.z - layout.tx_ring.z)


def rx_distance(pixel: SurfacePoint, rx_element: SurfacePoint, pipe: PipeSpec) -> float:
    """
    Wrap-aware distance on the unrolled sheet from a pixel to a receiver element.

    Args:
        pixel (SurfacePoint):       Point on the surface.
        rx_element (SurfacePoint):  Receiver position.
        pipe (PipeSpec):            The pipe, for its circumference.

    Returns:
        float: Distance in meters.
    """
    return unrolled_distance(pixel.z - rx_element.z, pixel.theta - rx_element.theta, pipe.circumference)


def surface_error(a: SurfacePoint, b: SurfacePoint, pipe: PipeSpec) -> float:
    """
    Localization error between two surface points, using the same wrap-aware metric as rx_distance.

    Args:
        a (SurfacePoint): First point.
        b (SurfacePoint): Second point.
        pipe (PipeSpec):  The pipe.

    Returns:
        float: Distance in meters; 0 iff the points coincide (mod 360 deg).
    """
    return unrolled_distance(a.z - b.z, a.theta - b.theta, pipe.circumference)
