"""
Scenario files: one YAML tree holding every physical and analysis parameter of a run.

Keys carry their unit as a suffix (_mm, _deg, _hz, _m_s, _v, _db); inside the package
lengths are meters and angles degrees. Every section is optional and falls back to the
finite element study setup. Unknown keys are rejected so a typo never silently turns
into a default. See docs/scenario.md for the full table.
"""

from typing import Optional, Union
from dataclasses import dataclass, replace
from pathlib import Path
import logging
import os

import yaml

from .di_engine import DIParams, GridSpec
from .excitation import ExcitationSpec
from .geometry import MM, ArrayLayout, PipeSpec, RingSpec, SurfacePoint
from .simulator import (
    ADC_FULL_SCALE,
    BASELINE_AMPLITUDE,
    AcquisitionSpec,
    BoundaryMode,
    DefectKind,
    DefectSpec,
    PropagationSpec,
    WaveformSet,
)

__all__ = [
    "ScenarioError",
    "ScenarioConfig",
    "load_scenario",
    "scenario_from_dict",
]

logger = logging.getLogger(__name__)

# %% --------------------------------------------------------------------------


class ScenarioError(ValueError):
    """
    Invalid scenario content. `field` holds the dotted path of the offending key.
    """

    def __init__(self, field: str, message: str):
        self.field = field
        super().__init__(f"\nscenario: {field}: {message}")


class _Section:
    """Key access on one mapping of the tree, remembering which keys were consumed."""

    def __init__(self, tree, path: str):
        if tree is None:
            tree = {}
        if not isinstance(tree, dict):
            raise ScenarioError(path or "<root>", f"expected a mapping, found {type(tree).__name__}")
        self.tree = tree
        self.path = path
        self.used = set()

    def where(self, key: str) -> str:
        return f"{self.path}.{key}" if self.path else key

    def has(self, key: str) -> bool:
        return key in self.tree

    def section(self, key: str) -> "_Section":
        self.used.add(key)
        return _Section(self.tree.get(key), self.where(key))

    def number(self, key: str, default: Optional[float], optional: bool = False) -> Optional[float]:
        self.used.add(key)
        value = self.tree.get(key, default)
        if value is None:
            if optional:
                return None
            raise ScenarioError(self.where(key), "is required")
        if isinstance(value, bool):
            raise ScenarioError(self.where(key), f"expected a number, found {value!r}")
        try:
            return float(value)
        except (TypeError, ValueError):
            raise ScenarioError(self.where(key), f"expected a number, found {value!r}") from None

    def integer(self, key: str, default: Optional[int]) -> Optional[int]:
        self.used.add(key)
        value = self.tree.get(key, default)
        if value is None:
            return None
        if isinstance(value, bool) or not isinstance(value, (int, float)) or int(value) != value:
            raise ScenarioError(self.where(key), f"expected an integer, found {value!r}")
        return int(value)

    def flag(self, key: str, default: bool) -> bool:
        self.used.add(key)
        value = self.tree.get(key, default)
        if not isinstance(value, bool):
            raise ScenarioError(self.where(key), f"expected true or false, found {value!r}")
        return value

    def choice(self, key: str, default: str, enum):
        self.used.add(key)
        value = self.tree.get(key, default)
        try:
            return enum(value)
        except ValueError:
            options = ", ".join(e.value for e in enum)
            raise ScenarioError(self.where(key), f"expected one of {options}, found {value!r}") from None

    def pair(self, key: str, default: tuple) -> tuple:
        self.used.add(key)
        value = self.tree.get(key, default)
        if not isinstance(value, (list, tuple)) or len(value) != 2:
            raise ScenarioError(self.where(key), f"expected a list of two numbers, found {value!r}")
        try:
            return tuple(float(v) for v in value)
        except (TypeError, ValueError):
            raise ScenarioError(self.where(key), f"expected a list of two numbers, found {value!r}") from None

    def finish(self):
        unknown = sorted(str(k) for k in set(self.tree) - self.used)
        if unknown:
            raise ScenarioError(self.where(unknown[0]), "unknown key")


# %% --------------------------------------------------------------------------


@dataclass(frozen=True)
class ScenarioConfig:
    """
    Everything needed to simulate and image one measurement pair.

    Args:
        pipe (PipeSpec):                  The pipe.
        layout (ArrayLayout):             Transducer rings.
        excitation (ExcitationSpec):      Tone burst.
        propagation (PropagationSpec):    Wave speed, boundaries and noise.
        acquisition (AcquisitionSpec):    Acquisition chain.
        grid (GridSpec):                  Imaging grid between the rings.
        di_params (DIParams):             Imaging parameters.
        defect (DefectSpec, optional):    Ground truth defect, None for a baseline-only run.
        rng_seed (int, optional):         Noise seed. Defaults to 0.
        source (str, optional):           File the scenario was read from.
    """

    pipe: PipeSpec
    layout: ArrayLayout
    excitation: ExcitationSpec
    propagation: PropagationSpec
    acquisition: AcquisitionSpec
    grid: GridSpec
    di_params: DIParams
    defect: Optional[DefectSpec] = None
    rng_seed: int = 0
    source: Optional[str] = None

    def __post_init__(self):
        if not self.grid.matches(self.layout):
            raise ScenarioError("grid", f"axial extent {self.grid.axial_extent} does not span the rings")
        if self.defect is not None and not self.layout.contains_axially(self.defect.position.z, strict=True):
            raise ScenarioError(
                "defect.z_mm",
                f"{self.defect.position.z_mm:g} mm is not strictly between the rings at "
                f"{self.layout.tx_ring.z / MM:g} mm and {self.layout.rx_ring.z / MM:g} mm",
            )
        near, far = self.propagation.pipe_end_positions
        if near > self.layout.tx_ring.z or far < self.layout.rx_ring.z:
            raise ScenarioError(
                "propagation.pipe_ends_mm",
                f"ends at {near / MM:g} and {far / MM:g} mm do not enclose the rings",
            )
        record = self.acquisition.samples_per_channel / self.acquisition.sampling_rate
        if record < self.layout.separation / self.propagation.group_velocity + self.excitation.duration:
            raise ScenarioError(
                "acquisition.samples_per_channel",
                f"{self.acquisition.samples_per_channel} samples are too short to hold the direct arrival",
            )

    @property
    def truth(self) -> Optional[SurfacePoint]:
        return None if self.defect is None else self.defect.position

    def with_defect_at(self, position: SurfacePoint) -> "ScenarioConfig":
        """
        Same scenario with the defect moved; used by position sweeps.

        Args:
            position (SurfacePoint): New defect position.

        Returns:
            ScenarioConfig: The moved scenario.
        """
        if self.defect is None:
            raise ScenarioError("defect", "a sweep needs a defect section to move")
        return replace(self, defect=self.defect.moved_to(position))

    def check_capture(self, waveforms: WaveformSet, name: str = "capture"):
        """
        Check that a capture fits this scenario's layout.

        Args:
            waveforms (WaveformSet): Parsed capture.
            name (str, optional):    Name used in the error message. Defaults to "capture".
        """
        count = self.layout.num_receivers
        if waveforms.num_receivers != count:
            raise ScenarioError(
                "layout.rx_ring.count",
                f"is {count} but {name} has {waveforms.num_receivers} channels",
            )
        if waveforms.layout_digest is not None and waveforms.layout_digest != self.layout.digest:
            raise ScenarioError(
                "layout",
                f"{name} was recorded with layout digest {waveforms.layout_digest:#010x}, "
                f"this scenario has {self.layout.digest:#010x}",
            )


# %% --------------------------------------------------------------------------


def _pipe(s: _Section) -> PipeSpec:
    modulus = s.number("youngs_modulus_gpa", 200.0, optional=True)
    pipe = PipeSpec(
        outer_diameter=s.number("outer_diameter_mm", 114.6) * MM,
        wall_thickness=s.number("wall_thickness_mm", 4.0) * MM,
        length=s.number("length_mm", 1000.0) * MM,
        density=s.number("density_kg_m3", 7850.0, optional=True),
        youngs_modulus=None if modulus is None else modulus * 1.0e9,
        poisson_ratio=s.number("poisson_ratio", 0.3, optional=True),
    )
    s.finish()
    return pipe


def _ring(s: _Section, z_mm: float) -> RingSpec:
    ring = RingSpec(s.number("z_mm", z_mm) * MM, s.integer("count", 16))
    s.finish()
    return ring


def _layout(s: _Section) -> ArrayLayout:
    layout = ArrayLayout(_ring(s.section("tx_ring"), 0.0), _ring(s.section("rx_ring"), 400.0))
    s.finish()
    return layout


def _excitation(s: _Section, sampling_rate: float) -> ExcitationSpec:
    spec = ExcitationSpec(
        center_frequency=s.number("center_frequency_hz", 85.0e3),
        cycles=s.integer("cycles", 5),
        amplitude_scale=s.number("amplitude_scale", 1.0),
        sampling_rate=sampling_rate,
    )
    s.finish()
    return spec


def _propagation(s: _Section) -> PropagationSpec:
    ends = s.pair("pipe_ends_mm", (-250.0, 750.0))
    spec = PropagationSpec(
        group_velocity=s.number("group_velocity_m_s", 3130.0),
        boundary_mode=s.choice("boundary_mode", "reflective", BoundaryMode),
        edge_reflection_coefficient=s.number("edge_reflection_coefficient", 1.0),
        pipe_end_positions=(ends[0] * MM, ends[1] * MM),
        mode_leakage_snr=s.number("snr_db", None, optional=True),
        direct_amplitude=s.number("direct_amplitude_v", BASELINE_AMPLITUDE),
        geometric_spreading=s.flag("geometric_spreading", False),
        leakage_velocity=s.number("leakage_velocity_m_s", None, optional=True),
        leakage_amplitude=s.number("leakage_amplitude", 0.0),
    )
    s.finish()
    return spec


def _acquisition(s: _Section) -> AcquisitionSpec:
    spec = AcquisitionSpec(
        sampling_rate=s.number("sampling_rate_hz", 10.0e6),
        samples_per_channel=s.integer("samples_per_channel", 6000),
        num_averages=s.integer("num_averages", 10),
        decimation_factor=s.integer("decimation_factor", 1),
        adc_bits=s.integer("adc_bits", 10),
        adc_full_scale=s.number("adc_full_scale_v", ADC_FULL_SCALE),
    )
    s.finish()
    return spec


def _defect(s: _Section) -> DefectSpec:
    kind = s.choice("kind", "notch", DefectKind)
    position = SurfacePoint.from_mm(s.number("z_mm", None), s.number("theta_deg", None))
    if kind is DefectKind.NOTCH:
        defect = DefectSpec.with_notch(position.z, position.theta, s.number("scatter_amplitude", 0.1))
    else:
        defect = DefectSpec.with_added_mass(
            position.z,
            position.theta,
            scatter_amplitude=s.number("scatter_amplitude", 0.0),
            transmission_loss=s.number("transmission_loss", None, optional=True),
        )
    s.finish()
    return defect


def _guarded(path: str, build, *args):
    try:
        return build(*args)
    except ScenarioError:
        raise
    except ValueError as err:
        raise ScenarioError(path, str(err).strip()) from None


def scenario_from_dict(tree: Optional[dict], source: Optional[str] = None) -> ScenarioConfig:
    """
    Build a ScenarioConfig from an already parsed tree.

    Args:
        tree (dict):             Scenario tree, None for all defaults.
        source (str, optional):  Where the tree came from, kept for the manifest. Defaults to None.

    Returns:
        ScenarioConfig: The validated scenario.
    """
    root = _Section(tree, "")
    acquisition = _guarded("acquisition", _acquisition, root.section("acquisition"))
    propagation = _guarded("propagation", _propagation, root.section("propagation"))
    pipe = _guarded("pipe", _pipe, root.section("pipe"))
    layout = _guarded("layout", _layout, root.section("layout"))
    excitation = _guarded("excitation", _excitation, root.section("excitation"), acquisition.sampling_rate)
    defect = _guarded("defect", _defect, root.section("defect")) if root.has("defect") else None

    grid_s = root.section("grid")
    grid = _guarded("grid", GridSpec.with_layout, layout, grid_s.integer("rows", 90), grid_s.integer("cols", 100))
    grid_s.finish()

    di_s = root.section("di")
    di_params = _guarded(
        "di",
        DIParams,
        di_s.number("group_velocity_m_s", propagation.group_velocity),
        di_s.integer("window_length_samples", 600),
    )
    di_s.finish()

    seed = root.integer("rng_seed", 0)
    if seed is None or seed < 0:
        raise ScenarioError("rng_seed", f"must be non-negative, found {seed}")
    root.finish()

    config = ScenarioConfig(
        pipe=pipe,
        layout=layout,
        excitation=excitation,
        propagation=propagation,
        acquisition=acquisition,
        grid=grid,
        di_params=di_params,
        defect=defect,
        rng_seed=seed,
        source=source,
    )
    logger.debug("scenario %s: %d receivers, defect=%s", source or "<dict>", layout.num_receivers, defect)
    return config


def load_scenario(path: Union[str, os.PathLike]) -> ScenarioConfig:
    """
    Read and validate a YAML scenario file.

    Args:
        path (Union[str, PathLike]): Scenario file.

    Returns:
        ScenarioConfig: The validated scenario.
    """
    text = Path(path).read_text(encoding="utf-8")
    try:
        tree = yaml.safe_load(text)
    except yaml.YAMLError as err:
        raise ScenarioError("<file>", f"{path} is not valid YAML: {err}") from None
    return scenario_from_dict(tree, source=str(path))
