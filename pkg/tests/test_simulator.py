from TorsionalDI import (
    MM,
    AcquisitionSpec,
    ArrayLayout,
    BoundaryMode,
    DefectKind,
    DefectSpec,
    ExcitationSpec,
    Label,
    PipeSpec,
    PropagationSpec,
    SurfacePoint,
    WaveformSet,
    apply_adc,
    average_traces,
    decimate,
    rx_distance,
    simulate,
    simulate_pair,
    toneburst_at,
    transmission_loss_from_amplitudes,
    tx_distance,
)
from TorsionalDI.simulator import BASELINE_AMPLITUDE, adc_codes, adc_lsb
import math
import numpy as np
import pytest

pipe = PipeSpec.with_steel_pipe()
layout = ArrayLayout.with_simulation_rings()
excitation = ExcitationSpec.with_simulation()
quiet = PropagationSpec(boundary_mode=BoundaryMode.LOW_REFLECTING)
acquisition = AcquisitionSpec()


def scatter_component(defect: DefectSpec, m: int, spread: bool = False) -> np.ndarray:
    t = np.arange(acquisition.samples_per_channel) / acquisition.sampling_rate
    rx = layout.rx_ring.element(m)
    d_tx = tx_distance(defect.position, layout)
    d_rx = rx_distance(defect.position, rx, pipe)
    amplitude = defect.scatter_amplitude
    if spread:
        amplitude *= math.sqrt(layout.separation / d_rx)
    unit = quiet.direct_amplitude / excitation.envelope_peak
    return (amplitude * unit) * toneburst_at(t - (d_tx + d_rx) / quiet.group_velocity, excitation)


def test_low_reflecting_baseline_is_a_single_direct_burst():
    ws = simulate(pipe, layout, excitation, quiet, acquisition)
    assert ws.label is Label.BASELINE
    assert ws.shape == (16, 6000)
    for m in range(1, 16):
        assert np.array_equal(ws.channels[m], ws.channels[0])

    t = ws.time_axis()
    arrival = layout.separation / quiet.group_velocity
    nonzero = t[ws.channels[0] != 0.0]
    assert nonzero.size > 0
    assert np.all(nonzero > arrival)
    assert np.all(nonzero < arrival + excitation.duration)
    peak = np.max(np.abs(ws.channels[0]))
    assert 0.95 * BASELINE_AMPLITUDE <= peak <= BASELINE_AMPLITUDE


def test_reflective_ends_add_late_arrivals():
    reflective = PropagationSpec()
    ws = simulate(pipe, layout, excitation, reflective, acquisition)
    late = ws.time_axis() > layout.separation / quiet.group_velocity + excitation.duration
    assert np.any(ws.channels[0][late] != 0.0)

    absorbed = PropagationSpec(edge_reflection_coefficient=0.0)
    assert simulate(pipe, layout, excitation, absorbed, acquisition) == simulate(
        pipe, layout, excitation, quiet, acquisition
    )


def test_null_defect_keeps_channels_identical():
    null = DefectSpec(DefectKind.NOTCH, SurfacePoint(0.2, 45.0), 0.0, 0.0)
    ws = simulate(pipe, layout, excitation, quiet, acquisition, defect=null)
    assert ws.label is Label.DAMAGE
    base = simulate(pipe, layout, excitation, quiet, acquisition)
    assert np.array_equal(ws.channels, base.channels)


def test_added_mass_scales_the_direct_arrival():
    mass = DefectSpec.with_added_mass(200.0 * MM, 90.0)
    assert mass.transmission_loss == pytest.approx(1.0 - 78.2 / 82.5)
    base, damage = simulate_pair(pipe, layout, excitation, quiet, acquisition, mass)
    np.testing.assert_allclose(damage.channels, base.channels * (78.2 / 82.5), rtol=1e-12, atol=1e-18)


@pytest.mark.parametrize("z_mm, loaded", [(90.0, 81.72e-3), (210.0, 78.2e-3), (330.0, 80.94e-3)])
def test_added_mass_picks_nearest_bench_loss(z_mm, loaded):
    mass = DefectSpec.with_added_mass(z_mm * MM, 0.0)
    assert mass.transmission_loss == transmission_loss_from_amplitudes(BASELINE_AMPLITUDE, loaded)
    assert DefectSpec.with_added_mass(z_mm * MM, 0.0, transmission_loss=0.2).transmission_loss == 0.2


def test_transmission_loss_from_amplitudes():
    assert transmission_loss_from_amplitudes(82.5e-3, 78.2e-3) == pytest.approx(0.05212, abs=1e-5)
    assert transmission_loss_from_amplitudes(1.0, 1.0) == 0.0
    with pytest.raises(ValueError):
        transmission_loss_from_amplitudes(1.0, 1.5)
    with pytest.raises(ValueError):
        transmission_loss_from_amplitudes(0.0, 0.0)


@pytest.mark.parametrize("z_mm, theta", [(100.0, 90.0), (200.0, 0.0), (300.0, 337.0), (250.0, 181.3)])
def test_notch_adds_the_analytic_scatter(z_mm, theta):
    notch = DefectSpec.with_notch(z_mm * MM, theta, scatter_amplitude=0.1)
    base = simulate(pipe, layout, excitation, quiet, acquisition)
    damage = simulate(pipe, layout, excitation, quiet, acquisition, defect=notch)
    for m in range(layout.num_receivers):
        np.testing.assert_allclose(damage.channels[m] - base.channels[m], scatter_component(notch, m), atol=1e-12)


@pytest.mark.parametrize("amplitude", [0.01, 0.05, 0.1, 0.3])
def test_scatter_energy_per_channel(amplitude):
    notch = DefectSpec.with_notch(0.2, 45.0, scatter_amplitude=amplitude)
    base = simulate(pipe, layout, excitation, quiet, acquisition)
    damage = simulate(pipe, layout, excitation, quiet, acquisition, defect=notch)
    # the low-reflecting baseline is one unit burst per channel
    unit_energy = np.sum(base.channels[0] ** 2)
    for m in range(layout.num_receivers):
        scatter = damage.channels[m] - base.channels[m]
        assert np.sum(scatter**2) == pytest.approx(amplitude**2 * unit_energy, rel=1e-6)


def test_rotating_the_defect_by_one_pitch_rolls_the_channels():
    notch = DefectSpec.with_notch(0.2, 90.0)
    original = simulate(pipe, layout, excitation, quiet, acquisition, defect=notch)
    turned = notch.moved_to(notch.position.rotated(22.5))
    rotated = simulate(pipe, layout, excitation, quiet, acquisition, defect=turned)
    np.testing.assert_allclose(rotated.channels, np.roll(original.channels, 1, axis=0), atol=1e-12)


def test_geometric_spreading():
    notch = DefectSpec.with_notch(0.2, 90.0)
    spread = PropagationSpec(boundary_mode=BoundaryMode.LOW_REFLECTING, geometric_spreading=True)
    base = simulate(pipe, layout, excitation, quiet, acquisition)
    plain = simulate(pipe, layout, excitation, quiet, acquisition, defect=notch)
    scaled = simulate(pipe, layout, excitation, spread, acquisition, defect=notch)
    m = 4  # receiver straight above the notch, 200 mm away
    np.testing.assert_allclose(
        scaled.channels[m] - base.channels[m],
        math.sqrt(2.0) * (plain.channels[m] - base.channels[m]),
        rtol=1e-9,
        atol=1e-15,
    )
    for m in range(layout.num_receivers):
        np.testing.assert_allclose(
            scaled.channels[m] - base.channels[m], scatter_component(notch, m, spread=True), atol=1e-12
        )


def test_mode_leakage_arrives_first():
    leaky = PropagationSpec(boundary_mode=BoundaryMode.LOW_REFLECTING, leakage_velocity=5900.0, leakage_amplitude=0.5)
    ws = simulate(pipe, layout, excitation, leaky, acquisition)
    first = ws.time_axis()[np.flatnonzero(ws.channels[0])[0]]
    assert abs(first - layout.separation / 5900.0) <= 1.0 / acquisition.sampling_rate


def test_noise_is_deterministic_and_per_channel():
    noisy = PropagationSpec(boundary_mode=BoundaryMode.LOW_REFLECTING, mode_leakage_snr=20.0)
    notch = DefectSpec.with_notch(0.2, 90.0)
    first = simulate(pipe, layout, excitation, noisy, acquisition, defect=notch, rng_seed=11)
    again = simulate(pipe, layout, excitation, noisy, acquisition, defect=notch, rng_seed=11)
    other = simulate(pipe, layout, excitation, noisy, acquisition, defect=notch, rng_seed=11, realization=1)
    assert first == again
    assert first != other

    clean = simulate(pipe, layout, excitation, quiet, acquisition, defect=notch)
    rng = np.random.default_rng(np.random.SeedSequence(11, spawn_key=(0, 5)))
    expected = clean.channels[5] + rng.normal(0.0, noisy.noise_sigma, size=(1, 6000))[0]
    np.testing.assert_allclose(first.channels[5], expected, rtol=0.0, atol=1e-15)


def test_noise_sigma_follows_snr():
    assert PropagationSpec().noise_sigma == 0.0
    assert PropagationSpec(mode_leakage_snr=20.0).noise_sigma == pytest.approx(BASELINE_AMPLITUDE / 10.0)
    assert PropagationSpec(mode_leakage_snr=40.0, direct_amplitude=1.0).noise_sigma == pytest.approx(0.01)


def test_averaging_reduces_noise():
    noisy = PropagationSpec(boundary_mode=BoundaryMode.LOW_REFLECTING, mode_leakage_snr=20.0)
    clean = simulate(pipe, layout, excitation, quiet, acquisition)
    single = simulate(pipe, layout, excitation, noisy, acquisition, rng_seed=3)
    averaged = simulate(pipe, layout, excitation, noisy, AcquisitionSpec(num_averages=10), rng_seed=3)
    ratio = np.std(averaged.channels - clean.channels) / np.std(single.channels - clean.channels)
    assert ratio == pytest.approx(1.0 / math.sqrt(10.0), rel=0.2)


def test_simulate_pair_uses_independent_realizations():
    noisy = PropagationSpec(boundary_mode=BoundaryMode.LOW_REFLECTING, mode_leakage_snr=30.0)
    notch = DefectSpec.with_notch(0.2, 90.0)
    base, damage = simulate_pair(pipe, layout, excitation, noisy, acquisition, notch, rng_seed=5)
    assert base.label is Label.BASELINE and damage.label is Label.DAMAGE
    assert base == simulate(pipe, layout, excitation, noisy, acquisition, rng_seed=5, realization=0)
    assert damage == simulate(pipe, layout, excitation, noisy, acquisition, notch, rng_seed=5, realization=1)


def test_fpga_capture_chain():
    fpga = AcquisitionSpec.with_fpga_capture()
    assert fpga.effective_sampling_rate == 1.0e6
    assert fpga.decimated_samples == 600

    notch = DefectSpec.with_notch(0.2, 90.0)
    ws = simulate(pipe, layout, excitation, PropagationSpec(mode_leakage_snr=30.0), fpga, defect=notch)
    assert ws.shape == (16, 600)
    assert ws.sampling_rate == 1.0e6
    assert ws.adc_bits == 10
    assert ws.layout_digest == layout.digest
    steps = ws.channels / adc_lsb(10, fpga.adc_full_scale)
    assert np.allclose(steps, np.rint(steps), atol=1e-6)


def test_adc_levels():
    lsb = adc_lsb(10, 0.33)
    assert lsb == 0.33 / 1024
    assert np.array_equal(apply_adc(np.zeros(8), 10, 0.33), np.zeros(8))
    assert apply_adc(np.array([0.33]), 10, 0.33)[0] == 511 * lsb
    assert apply_adc(np.array([-0.33]), 10, 0.33)[0] == -512 * lsb
    assert adc_codes(np.array([0.4 * lsb, 0.6 * lsb, -0.6 * lsb]), 10, 0.33).tolist() == [0, 1, -1]
    with pytest.raises(ValueError):
        apply_adc(np.zeros(3), 1, 0.33)
    with pytest.raises(ValueError):
        apply_adc(np.zeros(3), 10, 0.0)


@pytest.mark.parametrize("bits", [4, 8, 10, 12, 16])
def test_adc_error_within_half_step(bits):
    n = np.arange(4000)
    sine = 0.1 * np.sin(2.0 * np.pi * n / 4.0 + 0.3)
    error = apply_adc(sine, bits, 0.33) - sine
    assert np.max(np.abs(error)) <= adc_lsb(bits, 0.33) / 2.0 + 1e-15


def test_decimate():
    x = np.arange(10.0)
    assert decimate(x, 1).tolist() == x.tolist()
    assert decimate(x, 3).tolist() == [0.0, 3.0, 6.0]
    assert decimate(x, 10).tolist() == [0.0]
    assert decimate(np.vstack([x, -x]), 5).tolist() == [[0.0, 5.0], [-0.0, -5.0]]
    for factor in (0, 11, 2.5):
        with pytest.raises(ValueError):
            decimate(x, factor)


def test_average_traces():
    assert average_traces([np.ones(4), 3.0 * np.ones(4)]).tolist() == [2.0] * 4
    with pytest.raises(ValueError):
        average_traces([])
    with pytest.raises(ValueError):
        average_traces([np.ones(4), np.ones(5)])


def test_waveform_set_helpers():
    ws = simulate(pipe, layout, excitation, quiet, acquisition)
    assert ws.duration == pytest.approx(600e-6)
    assert ws.truncated(200.0e-6).num_samples == 2000
    assert ws.decimated(10).shape == (16, 600)
    assert ws.decimated(10).sampling_rate == 1.0e6
    assert ws.relabeled(Label.DAMAGE).label is Label.DAMAGE
    np.testing.assert_array_equal(ws.scaled(2.0).channels, 2.0 * ws.channels)
    assert "channels=16" in repr(ws)
    with pytest.raises(ValueError):
        ws.channels[0, 0] = 1.0
    with pytest.raises(ValueError):
        ws.truncated(0.0)
    with pytest.raises(ValueError):
        WaveformSet(np.zeros(5), 1.0e6)
    with pytest.raises(ValueError):
        WaveformSet(np.zeros((2, 5)), 0.0)


@pytest.mark.parametrize("z_mm", [0.0, 400.0, 450.0, -10.0])
def test_defect_outside_ring_span(z_mm):
    with pytest.raises(ValueError):
        simulate(pipe, layout, excitation, quiet, acquisition, defect=DefectSpec.with_notch(z_mm * MM, 0.0))


def test_scene_validation():
    short = AcquisitionSpec(samples_per_channel=1000)  # 100 us, direct arrival ends near 187 us
    with pytest.raises(ValueError):
        simulate(pipe, layout, excitation, quiet, short)
    with pytest.raises(ValueError):
        simulate(pipe, layout, excitation, PropagationSpec(pipe_end_positions=(0.1, 0.75)), acquisition)
    with pytest.raises(ValueError):
        simulate(pipe, layout, excitation, quiet, acquisition, rng_seed=-1)


@pytest.mark.parametrize(
    "kwargs",
    [
        dict(group_velocity=0.0),
        dict(edge_reflection_coefficient=1.5),
        dict(pipe_end_positions=(0.75, -0.25)),
        dict(mode_leakage_snr=math.inf),
        dict(leakage_velocity=-1.0),
        dict(boundary_mode="absorbing"),
    ],
)
def test_invalid_propagation(kwargs):
    with pytest.raises(ValueError):
        PropagationSpec(**kwargs)


@pytest.mark.parametrize(
    "kwargs",
    [
        dict(samples_per_channel=0),
        dict(num_averages=0),
        dict(decimation_factor=7000),
        dict(adc_bits=1),
        dict(adc_bits=25),
        dict(adc_full_scale=0.0),
    ],
)
def test_invalid_acquisition(kwargs):
    with pytest.raises(ValueError):
        AcquisitionSpec(**kwargs)


def test_invalid_defect():
    with pytest.raises(ValueError):
        DefectSpec.with_notch(0.2, 0.0, scatter_amplitude=1.2)
    with pytest.raises(ValueError):
        DefectSpec(DefectKind.ADDED_MASS, layout.rx_ring.element(0), 0.0, -0.1)
    with pytest.raises(ValueError):
        DefectSpec("crack", layout.rx_ring.element(0))
