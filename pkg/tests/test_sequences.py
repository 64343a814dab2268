"""
Tests for pulse sequences and average Hamiltonian theory.
"""

import math

import numpy as np
import pytest
from numpy.testing import assert_allclose

from hapq.core.exceptions import QuadratureError, SequenceError
from hapq.sequences import averaging
from hapq.sequences.averaging import (
    aht_convergence,
    average_hamiltonian,
    cycle_propagator,
    effective_propagator,
    offset_scaling,
    stroboscopic_propagator,
    summarize_recoupling,
)
from hapq.sequences.library import (
    channel_frequencies_hz,
    check_recoupling_frequencies,
    commensurate_window,
    double_irradiation,
    excitation_profile,
    lee_goldburg,
    lg_axis,
    lg_tilt_angle,
    mrev8,
    selective_pulse,
)
from hapq.sequences.pulses import IdealRotation, PulseChannel, PulseSegment, PulseSequence, rf_hamiltonian
from hapq.sequences.textformat import format_sequence, parse_sequence, report_rows, report_to_csv
from hapq.spins.evolution import fidelity, unitarity_error
from hapq.spins.hamiltonians import dipolar_hamiltonian, internal_hamiltonian
from hapq.spins.operators import Operator
from hapq.structure.constants import MAGIC_ANGLE
from tests.conftest import chain_model


class TestPulseSequence:
    def test_channel_from_field_vector(self):
        field = np.array([3.0, -4.0, 7.0])
        channel = PulseChannel.from_field(2, field)
        assert channel.target == (2,)
        assert channel.amplitude_hz == pytest.approx(5.0)
        assert_allclose(channel.field_hz(), field, atol=1e-12)

    def test_empty_sequence_rejected(self):
        with pytest.raises(SequenceError):
            PulseSequence(())

    def test_negative_duration_rejected(self):
        with pytest.raises(SequenceError):
            PulseSegment(-1e-6)

    def test_rotation_segment_has_no_duration(self):
        with pytest.raises(SequenceError):
            PulseSegment(1e-6, rotation=IdealRotation(math.pi))

    def test_selective_channel_overrides_broadband(self):
        segment = PulseSegment(
            1e-5, (PulseChannel(None, 100.0, 1000.0, 0.0), PulseChannel(1, 0.0, 500.0, math.pi / 2))
        )
        assert_allclose(segment.field_for_plane(0), [1000.0, 0.0, 100.0])
        assert_allclose(segment.field_for_plane(1), [0.0, 500.0, 0.0], atol=1e-12)

    def test_rf_hamiltonian_rejects_absent_plane(self):
        seq = PulseSequence((PulseSegment(1e-5, (PulseChannel(5, 0.0, 1e3),)),))
        with pytest.raises(SequenceError):
            rf_hamiltonian(seq, 0, chain_model(2))

    def test_rotation_sense_takes_y_to_z(self):
        model = chain_model(1)
        seq = PulseSequence((PulseSegment(0.0, rotation=IdealRotation(math.pi / 2, (1.0, 0.0, 0.0))),))
        u = cycle_propagator(seq, model, dipolar_hamiltonian(model)).matrix
        iy = np.array([[0, -0.5j], [0.5j, 0]])
        iz = np.diag([0.5, -0.5])
        assert_allclose(u @ iy @ u.conj().T, iz, atol=1e-12)


class TestLeeGoldburg:
    def test_tilt_is_magic_angle(self):
        seq = lee_goldburg(10e3)
        channel = seq.segments[0].channels[0]
        assert lg_tilt_angle(channel.amplitude_hz, channel.offset_hz) == pytest.approx(MAGIC_ANGLE)
        assert seq.cycle_time == pytest.approx(1.0 / (10e3 * math.sqrt(1.5)))

    def test_negative_sign_gives_supplementary_angle(self):
        channel = lee_goldburg(10e3, sign=-1).segments[0].channels[0]
        assert lg_tilt_angle(channel.amplitude_hz, channel.offset_hz) == pytest.approx(math.pi - MAGIC_ANGLE)

    @pytest.mark.parametrize("n_planes", [2, 4, 6])
    def test_removes_dipolar_couplings(self, n_planes):
        model = chain_model(n_planes)
        h = dipolar_hamiltonian(model)
        report = average_hamiltonian(lee_goldburg(20 * model.couplings.max_abs_hz()), h, model, tolerance=1e-9)
        assert report.max_two_spin_hz() <= 1e-6 * model.couplings.max_abs_hz()
        assert max(after for _, after in report.suppression_ratios.values()) <= 1e-6 * model.couplings.max_abs_hz()

    def test_frequency_switched_variant_doubles_cycle(self):
        plain, switched = lee_goldburg(10e3), lee_goldburg(10e3, alternate=True)
        assert switched.cycle_time == pytest.approx(2 * plain.cycle_time)
        assert switched.name == "lg-fslg"

    def test_zeroth_order_tracks_exact_evolution(self):
        model = chain_model(4)
        h = dipolar_hamiltonian(model)
        (point,) = aht_convergence(model, h, [50.0], n_cycles=10)
        assert point.fidelity >= 0.999
        assert point.amplitude_hz == pytest.approx(50 * model.couplings.max_abs_hz())

    def test_convergence_improves_with_amplitude(self):
        model = chain_model(3)
        points = aht_convergence(model, dipolar_hamiltonian(model), [5.0, 50.0], n_cycles=4)
        assert points[1].fidelity > points[0].fidelity

    def test_cycle_closes_without_couplings(self):
        model = chain_model(3)
        silent = Operator(np.zeros((8, 8), dtype=complex))
        for seq in (lee_goldburg(1e4), lee_goldburg(1e4, sign=-1), lee_goldburg(1e4, alternate=True)):
            assert fidelity(cycle_propagator(seq, model, silent), Operator(np.eye(8))) == pytest.approx(1.0)

    def test_convergence_grid(self):
        model = chain_model(3)
        points = aht_convergence(model, dipolar_hamiltonian(model), [10.0, 20.0, 50.0, 100.0], n_cycles=10)
        values = [p.fidelity for p in points]
        assert values == sorted(values)
        assert min(values[2:]) >= 0.999

    def test_convergence_needs_couplings(self):
        model = chain_model(1)
        with pytest.raises(SequenceError):
            aht_convergence(model, dipolar_hamiltonian(model), [10.0])

    def test_nonpositive_amplitude(self):
        with pytest.raises(SequenceError):
            lee_goldburg(0.0)


class TestMrev8:
    def test_cycle_time(self):
        assert mrev8(5e-6).cycle_time == pytest.approx(60e-6)

    def test_removes_dipolar_couplings(self):
        model = chain_model(3)
        h = dipolar_hamiltonian(model)
        report = average_hamiltonian(mrev8(5e-6), h, model)
        assert report.max_two_spin_hz() <= 1e-10 * model.couplings.max_abs_hz()

    def test_offset_scaling_factor(self):
        factor, axis = offset_scaling(mrev8(5e-6), 1000.0)
        assert factor == pytest.approx(math.sqrt(2) / 3, abs=0.005)
        assert np.linalg.norm(axis) == pytest.approx(1.0)

    def test_finite_pulses_keep_cycle_time(self):
        seq = mrev8(5e-6, ideal_pulses=False)
        assert seq.cycle_time == pytest.approx(60e-6)
        assert all(s.rotation is None for s in seq.segments)

    def test_bad_pulse_fraction(self):
        with pytest.raises(SequenceError):
            mrev8(5e-6, ideal_pulses=False, pulse_fraction=1.5)


class TestDoubleIrradiation:
    def test_cycle_is_two_mirrored_windows(self):
        seq = double_irradiation(0, 2, 30e3, duration=1 / 30e3)
        assert seq.info["half_window_s"] == pytest.approx(1 / 30e3)
        assert seq.info["window_s"] == pytest.approx(2 / 30e3)
        assert seq.cycle_time == pytest.approx(2 / 30e3)
        assert seq.info["steps_per_half"] == 6 * 32
        assert len(seq.segments) == 2 * 6 * 32
        assert seq.n_repeats == 1

    def test_both_planes_carry_equal_magic_angle_lg(self):
        seq = double_irradiation(0, 2, 30e3, duration=1 / 30e3)
        forward = seq.segments[: seq.info["steps_per_half"]]
        for plane in (0, 2):
            mean = np.mean([s.field_for_plane(plane) for s in forward], axis=0)
            assert_allclose(mean, 180e3 * lg_axis(), atol=1e-6 * 180e3)
        spectator = np.mean([s.field_for_plane(1) for s in forward], axis=0)
        assert_allclose(spectator, 90e3 * lg_axis(), atol=1e-6 * 90e3)

    def test_repeats_cover_the_requested_duration(self):
        seq = double_irradiation(0, 2, 30e3, duration=10 * 2 / 30e3)
        assert seq.n_repeats == 10
        assert seq.info["duration_s"] == pytest.approx(10 * 2 / 30e3)

    def test_same_plane_rejected(self):
        with pytest.raises(SequenceError):
            double_irradiation(1, 1, 30e3, duration=1e-3)

    def test_unknown_plane_rejected(self):
        with pytest.raises(SequenceError):
            double_irradiation(0, 5, 30e3, duration=1e-3, available_planes=[0, 1, 2])

    @pytest.mark.parametrize(
        "ratios",
        [
            {"b_ratio": 1.0},
            {"lg_ratio": 1.0},
            {"b_ratio": 5.0},
            {"decoupling_ratio": 5.0},
        ],
    )
    def test_resonant_ratios_rejected(self, ratios):
        with pytest.raises(SequenceError):
            double_irradiation(0, 2, 30e3, duration=1e-3, **ratios)

    def test_irrational_ratio_rejected(self):
        with pytest.raises(SequenceError, match="rational"):
            double_irradiation(0, 2, 30e3, duration=1e-3, b_ratio=math.sqrt(2.0))

    def test_rf_cycle_is_the_identity(self, six_spin_model):
        seq = double_irradiation(0, 2, 30e3, duration=1 / 30e3)
        silent = Operator(np.zeros((64, 64), dtype=complex))
        assert fidelity(cycle_propagator(seq, six_spin_model, silent), Operator(np.eye(64))) == pytest.approx(1.0)

    def test_recouples_only_the_chosen_planes(self, six_spin_model, six_spin_device_hamiltonian):
        seq = double_irradiation(0, 2, 30e3, duration=1 / 30e3, available_planes=six_spin_model.planes())
        report = average_hamiltonian(seq, six_spin_device_hamiltonian, six_spin_model)
        summary = summarize_recoupling(report, six_spin_model, 0, 2)
        assert summary.projection >= 0.9
        assert summary.suppression_ratio >= 10
        assert summary.bare_hz == pytest.approx(368.84, rel=0.01)
        assert summary.d_ab_hz == pytest.approx(2 * summary.bare_hz / 3, rel=0.02)
        assert summary.scaling == pytest.approx(2 / 3, rel=0.02)
        assert summary.sign == 1
        assert summary.spins in {(0, 4), (1, 5)}
        assert summary.label.count("x'") == 2
        assert summary.omega_a_hz == pytest.approx(30e3)
        assert summary.omega_b_hz == pytest.approx(60e3)

    def test_retained_axis_is_perpendicular_to_the_lg_axis(self, six_spin_model, six_spin_device_hamiltonian):
        seq = double_irradiation(0, 2, 30e3, duration=1 / 30e3)
        report = average_hamiltonian(seq, six_spin_device_hamiltonian, six_spin_model)
        summary = summarize_recoupling(report, six_spin_model, 0, 2)
        assert np.dot(summary.axis_a, lg_axis()) == pytest.approx(0.0, abs=1e-12)
        assert_allclose(summary.axis_a, summary.axis_b, atol=1e-12)

    def test_spectator_plane_is_decoupled(self, six_spin_model, six_spin_device_hamiltonian):
        seq = double_irradiation(0, 2, 30e3, duration=1 / 30e3)
        report = average_hamiltonian(seq, six_spin_device_hamiltonian, six_spin_model)
        spectators = set(six_spin_model.spins_in_plane(1))
        recoupled = set(six_spin_model.spins_in_plane(0)) | set(six_spin_model.spins_in_plane(2))
        mixed = [
            t for t in report.decomposition if len(t.spins) == 2 and len(set(t.spins) & spectators) == 1
        ]
        largest = max((abs(t.coefficient_hz) for t in mixed if set(t.spins) & recoupled), default=0.0)
        assert largest <= 0.01 * six_spin_model.couplings.max_abs_hz()

    def test_zeroth_order_converges_with_amplitude(self):
        model = chain_model(3)
        h = internal_hamiltonian(model, "interplane_zz", zeeman=False)

        def cross_check(amplitude_hz: float) -> float:
            seq = double_irradiation(0, 2, amplitude_hz, duration=10 * 2 / amplitude_hz)
            report = average_hamiltonian(seq, h, model)
            return fidelity(stroboscopic_propagator(seq, model, h), effective_propagator(report, seq.n_repeats))

        slow, fast = cross_check(5e3), cross_check(200e3)
        assert fast >= 0.99
        assert fast > slow

    def test_summary_needs_both_planes(self, six_spin_model, six_spin_device_hamiltonian):
        seq = double_irradiation(0, 2, 30e3, duration=1 / 30e3)
        report = average_hamiltonian(seq, six_spin_device_hamiltonian, six_spin_model)
        with pytest.raises(SequenceError):
            summarize_recoupling(report, six_spin_model, 0, 7)

    def test_frequency_check_accepts_default_ratios(self):
        check_recoupling_frequencies(30e3, 60e3, 180e3, 90e3)


class TestAveraging:
    def test_free_evolution_average_is_the_hamiltonian(self):
        model = chain_model(2)
        h = dipolar_hamiltonian(model)
        report = average_hamiltonian(PulseSequence((PulseSegment(1e-4),)), h, model)
        assert_allclose(report.h_bar.matrix, h.matrix, atol=1e-9)
        assert report.residual_norm <= 1e-9

    def test_effective_propagator_is_unitary(self):
        model = chain_model(3)
        report = average_hamiltonian(lee_goldburg(1e5), dipolar_hamiltonian(model), model)
        assert unitarity_error(effective_propagator(report, 5)) <= 1e-10

    def test_stroboscopic_zero_repeats(self):
        model = chain_model(2)
        u = stroboscopic_propagator(lee_goldburg(1e5), model, dipolar_hamiltonian(model), n_repeats=0)
        assert_allclose(u.matrix, np.eye(4))

    def test_quadrature_failure_is_reported(self, monkeypatch):
        model = chain_model(2, gradient=2e4)
        h = internal_hamiltonian(model)
        monkeypatch.setattr(averaging, "leggauss", lambda n: (np.zeros(n), np.full(n, 2.0 / n) * (1 + 1e-3 * n)))
        with pytest.raises(QuadratureError):
            average_hamiltonian(lee_goldburg(1e4), h, model, max_nodes=64)

    def test_long_segment_matches_one_turn(self):
        model = chain_model(3)
        h = dipolar_hamiltonian(model)
        one_turn = lee_goldburg(1e4)
        (segment,) = one_turn.segments
        long_run = PulseSequence((PulseSegment(1000 * segment.duration, segment.channels),))
        short, long = average_hamiltonian(one_turn, h, model), average_hamiltonian(long_run, h, model)
        assert_allclose(long.h_bar.matrix, short.h_bar.matrix, atol=1e-6 * float(np.max(np.abs(h.matrix))))

    @pytest.mark.parametrize("count", [1, 2, 7, 1500])
    def test_subinterval_phases_sum_in_closed_form(self, count):
        omega = np.array([0.0, 1.3, -2.0 * math.pi, 4.0 * math.pi, 40.0])
        expected = np.array([np.sum(np.exp(1j * w * 0.5 * np.arange(count))) for w in omega])
        assert_allclose(averaging._subinterval_sum(omega, 0.5, count), expected, atol=1e-9 * count)

    def test_report_rows(self, tmp_path):
        model = chain_model(2)
        report = average_hamiltonian(lee_goldburg(1e5), dipolar_hamiltonian(model), model)
        rows = report_rows(report)
        assert rows[-1][0] == "residual_norm"
        assert any(label.startswith("weff:") for label, _ in rows)
        path = tmp_path / "avgham.csv"
        report_to_csv(report, path)
        assert path.read_text().splitlines()[0] == "term_label,coefficient_hz"


class TestTextFormat:
    def test_parse_written_sequence(self):
        seq = mrev8(5e-6, n_cycles=3)
        parsed = parse_sequence(format_sequence(seq))
        assert parsed == seq

    def test_broadband_and_selective_channels(self):
        text = "# sequence name=custom n_repeats=2\n1e-5 | channel(target=all, offset_hz=1.0, amp_hz=2.0, phase_rad=0.0) channel(target=0 2, amp_hz=3.0)\n"
        seq = parse_sequence(text)
        assert seq.name == "custom"
        assert seq.n_repeats == 2
        assert seq.segments[0].channels[1].target == (0, 2)

    @pytest.mark.parametrize(
        "text",
        [
            "1e-5 channel(target=all)",
            "abc | channel(target=all)",
            "1e-5 | gibberish",
            "0.0 | rotation(target=0, axis=1 0, angle_rad=1.0)",
        ],
    )
    def test_malformed_lines_name_the_line(self, text):
        with pytest.raises(SequenceError, match="line 1"):
            parse_sequence(text)


class TestHelpers:
    def test_commensurate_window(self):
        window = commensurate_window([30e3, 45e3, 15e3])
        assert window.converged
        assert window.cycles_of_slowest == 1
        assert window.window_s == pytest.approx(1 / 15e3)

    def test_incommensurate_window_reports_best(self):
        window = commensurate_window([1.0, math.sqrt(2.0)], tolerance_rad=1e-12, max_cycles=10)
        assert not window.converged
        assert window.residual_rad > 0

    def test_commensurate_window_needs_frequency(self):
        with pytest.raises(SequenceError):
            commensurate_window([0.0])

    def test_selective_pulse_duration(self):
        seq = selective_pulse(1, math.pi / 2, amplitude_hz=50.0)
        assert seq.cycle_time == pytest.approx(5e-3)

    def test_negative_angle_flips_phase(self):
        channel = selective_pulse(0, -math.pi, amplitude_hz=50.0).segments[0].channels[0]
        assert channel.phase == pytest.approx(math.pi)

    def test_excitation_profile(self):
        model = chain_model(3, gradient=2e4)
        points = {p.plane: p for p in excitation_profile(model, 1, math.pi / 2, 0.0, 50.0)}
        assert points[1].depolarization == pytest.approx(1.0, abs=1e-9)
        for plane in (0, 2):
            assert abs(points[plane].offset_hz) == pytest.approx(292.93, abs=0.01)
            assert points[plane].depolarization <= 2 * points[plane].off_resonance_factor + 1e-9

    def test_exact_cycle_is_unitary(self, six_spin_model, six_spin_hamiltonian):
        seq = double_irradiation(0, 2, 30e3, duration=1 / 30e3)
        u = cycle_propagator(seq, six_spin_model, six_spin_hamiltonian)
        assert unitarity_error(u) <= 1e-10
        assert fidelity(u, u) == pytest.approx(1.0)

    def test_channel_frequencies(self):
        model = chain_model(3, gradient=2e4)
        channels = (
            PulseChannel(target=0, amplitude_hz=30e3),
            PulseChannel(target=2, offset_hz=100.0, amplitude_hz=45e3),
            PulseChannel(amplitude_hz=10e3),
        )
        seq = PulseSequence((PulseSegment(1e-4, channels),))
        by_amplitude = {round(f.amplitude_hz): f for f in channel_frequencies_hz(seq, model)}
        assert by_amplitude[30000].plane == 0
        assert by_amplitude[30000].frequency_hz == 0.0
        assert by_amplitude[45000].plane == 2
        assert by_amplitude[45000].frequency_hz == pytest.approx(685.86, abs=0.02)
        assert by_amplitude[10000].plane is None
        assert by_amplitude[10000].frequency_hz == 0.0
