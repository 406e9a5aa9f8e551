from TorsionalDI import (
    MM,
    ArrayLayout,
    BoundaryMode,
    DefectKind,
    ScenarioConfig,
    ScenarioError,
    SurfacePoint,
    WaveformSet,
    load_scenario,
    scenario_from_dict,
)
from pathlib import Path
import numpy as np
import pytest

scenario_dir = Path(__file__).resolve().parent.parent / "scenarios"

minimal = {"defect": {"z_mm": 200, "theta_deg": 90}}


def test_defaults_are_the_simulation_setup():
    config = scenario_from_dict(minimal)
    assert config.pipe.outer_diameter == pytest.approx(114.6 * MM)
    assert config.pipe.wall_thickness == pytest.approx(4.0 * MM)
    assert config.pipe.youngs_modulus == pytest.approx(200.0e9)
    assert config.layout == ArrayLayout.with_simulation_rings()
    assert config.excitation.center_frequency == 85.0e3
    assert config.excitation.cycles == 5
    assert config.propagation.group_velocity == 3130.0
    assert config.propagation.boundary_mode is BoundaryMode.REFLECTIVE
    assert config.propagation.pipe_end_positions == pytest.approx((-0.25, 0.75))
    assert config.propagation.noise_sigma == 0.0
    assert config.acquisition.samples_per_channel == 6000
    assert config.acquisition.num_averages == 10
    assert config.acquisition.adc_bits == 10
    assert config.acquisition.adc_full_scale == 0.33
    assert config.grid.shape == (90, 100)
    assert config.di_params.window_length_samples == 600
    assert config.di_params.group_velocity == 3130.0
    assert config.rng_seed == 0

    assert config.defect.kind is DefectKind.NOTCH
    assert config.defect.scatter_amplitude == 0.1
    assert config.truth == SurfacePoint(0.2, 90.0)


def test_no_defect_section():
    config = scenario_from_dict(None)
    assert config.defect is None
    assert config.truth is None
    with pytest.raises(ScenarioError):
        config.with_defect_at(SurfacePoint(0.2, 0.0))


def test_full_tree():
    tree = {
        "pipe": {"outer_diameter_mm": 114.6, "wall_thickness_mm": 4, "length_mm": 1000},
        "layout": {"tx_ring": {"z_mm": 0, "count": 8}, "rx_ring": {"z_mm": 400, "count": 8}},
        "excitation": {"center_frequency_hz": 75000, "cycles": 5},
        "propagation": {
            "boundary_mode": "low_reflecting",
            "snr_db": 30,
            "geometric_spreading": True,
            "leakage_velocity_m_s": 5900,
            "leakage_amplitude": 0.05,
        },
        "acquisition": {"num_averages": 1, "decimation_factor": 10, "adc_bits": None},
        "defect": {"kind": "added_mass", "z_mm": 300, "theta_deg": 45, "scatter_amplitude": 0.02},
        "grid": {"rows": 36, "cols": 40},
        "di": {"group_velocity_m_s": 3100, "window_length_samples": 60},
        "rng_seed": 7,
    }
    config = scenario_from_dict(tree, source="bench.yaml")
    assert config.layout == ArrayLayout.with_experimental_rings()
    assert config.excitation.center_frequency == 75.0e3
    assert config.propagation.boundary_mode is BoundaryMode.LOW_REFLECTING
    assert config.propagation.mode_leakage_snr == 30.0
    assert config.propagation.geometric_spreading
    assert config.propagation.leakage_velocity == 5900.0
    assert config.acquisition.adc_bits is None
    assert config.acquisition.effective_sampling_rate == 1.0e6
    assert config.defect.kind is DefectKind.ADDED_MASS
    assert config.defect.transmission_loss == pytest.approx(1.0 - 80.94 / 82.5)
    assert config.grid.shape == (36, 40)
    assert config.di_params.group_velocity == 3100.0
    assert config.di_params.window_length_samples == 60
    assert config.rng_seed == 7
    assert config.source == "bench.yaml"


@pytest.mark.parametrize(
    "tree, field",
    [
        ({"pipe": {"outer_diamter_mm": 100}}, "pipe.outer_diamter_mm"),
        ({"layout": {"rx_ring": {"z_mm": 400, "cuont": 8}}}, "layout.rx_ring.cuont"),
        ({"defect": {"z_mm": 200, "theta_deg": 0}, "extra": 1}, "extra"),
        ({"defect": {"theta_deg": 90}}, "defect.z_mm"),
        ({"defect": {"z_mm": 500, "theta_deg": 90}}, "defect.z_mm"),
        ({"defect": {"z_mm": 0, "theta_deg": 90}}, "defect.z_mm"),
        ({"defect": {"kind": "crack", "z_mm": 200, "theta_deg": 90}}, "defect.kind"),
        ({"defect": {"z_mm": 200, "theta_deg": 90, "scatter_amplitude": 2.0}}, "defect"),
        ({"propagation": {"boundary_mode": "open"}}, "propagation.boundary_mode"),
        ({"propagation": {"group_velocity_m_s": "fast"}}, "propagation.group_velocity_m_s"),
        ({"propagation": {"pipe_ends_mm": [-250]}}, "propagation.pipe_ends_mm"),
        ({"propagation": {"pipe_ends_mm": [100, 750]}}, "propagation.pipe_ends_mm"),
        ({"propagation": {"geometric_spreading": "yes"}}, "propagation.geometric_spreading"),
        ({"acquisition": {"samples_per_channel": 1000}}, "acquisition.samples_per_channel"),
        ({"acquisition": {"num_averages": 2.5}}, "acquisition.num_averages"),
        ({"acquisition": {"adc_bits": 30}}, "acquisition"),
        ({"excitation": {"center_frequency_hz": 2.0e6}}, "excitation"),
        ({"grid": {"rows": 1}}, "grid"),
        ({"grid": {"rows": 90, "colums": 100}}, "grid.colums"),
        ({"di": {"window_length_samples": 0}}, "di"),
        ({"rng_seed": -1}, "rng_seed"),
        ({"pipe": [1, 2]}, "pipe"),
    ],
)
def test_invalid_trees_name_the_field(tree, field):
    with pytest.raises(ScenarioError) as info:
        scenario_from_dict(tree)
    assert info.value.field == field
    assert field in str(info.value)
    assert isinstance(info.value, ValueError)


def test_check_capture():
    config = scenario_from_dict(minimal)
    config.check_capture(WaveformSet(np.zeros((16, 10)), 1.0e6, layout_digest=config.layout.digest))
    with pytest.raises(ScenarioError) as info:
        config.check_capture(WaveformSet(np.zeros((8, 10)), 1.0e6), "baseline.tgwc")
    assert info.value.field == "layout.rx_ring.count"
    assert "16" in str(info.value) and "8 channels" in str(info.value)
    assert "baseline.tgwc" in str(info.value)
    with pytest.raises(ScenarioError):
        config.check_capture(WaveformSet(np.zeros((16, 10)), 1.0e6, layout_digest=1234))


def test_with_defect_at():
    config = scenario_from_dict(minimal)
    moved = config.with_defect_at(SurfacePoint(0.3, 157.5))
    assert moved.truth == SurfacePoint(0.3, 157.5)
    assert moved.defect.scatter_amplitude == config.defect.scatter_amplitude
    assert config.truth == SurfacePoint(0.2, 90.0)
    assert isinstance(moved, ScenarioConfig)


def test_load_yaml(tmp_path):
    path = tmp_path / "notch.yaml"
    path.write_text("defect:\n  z_mm: 100\n  theta_deg: 270\ngrid:\n  rows: 36\n  cols: 40\nrng_seed: 3\n")
    config = load_scenario(path)
    assert config.truth == SurfacePoint(0.1, 270.0)
    assert config.grid.shape == (36, 40)
    assert config.source == str(path)


def test_load_scientific_notation(tmp_path):
    path = tmp_path / "rates.yaml"
    path.write_text("acquisition:\n  sampling_rate_hz: 10e6\nexcitation:\n  center_frequency_hz: 85e3\n")
    config = load_scenario(path)
    assert config.acquisition.sampling_rate == 10.0e6
    assert config.excitation.center_frequency == 85.0e3


def test_load_invalid_yaml(tmp_path):
    path = tmp_path / "broken.yaml"
    path.write_text("defect: [z_mm: 200\n")
    with pytest.raises(ScenarioError) as info:
        load_scenario(path)
    assert info.value.field == "<file>"


def test_load_empty_file(tmp_path):
    path = tmp_path / "empty.yaml"
    path.write_text("")
    assert load_scenario(path).defect is None


@pytest.mark.parametrize("path", sorted(scenario_dir.glob("*.yaml")), ids=lambda p: p.name)
def test_shipped_scenarios_load(path):
    config = load_scenario(path)
    assert config.grid.matches(config.layout)


def test_shipped_scenarios_exist():
    assert len(list(scenario_dir.glob("*.yaml"))) >= 4
