"""
Tests for gate synthesis, schedules and routing.
"""

import math

import numpy as np
import pytest
from numpy.testing import assert_allclose

from hapq.core.exceptions import GateError
from hapq.gates import (
    CNOT,
    GateSchedule,
    chainwise_target,
    cnot_from_coupling,
    cnot_schedule,
    embed_two_spin,
    locally_equivalent,
    makhlin_invariants,
    realize_schedule,
    route_gate_count,
    route_unitary,
    schedule_to_text,
    swap_count,
    swap_route,
    synthesize_entangler,
)
from hapq.gates.synthesis import CZ, Y_AXIS, Z_AXIS, entangler_time, rotation_to_z
from hapq.sequences.averaging import (
    average_hamiltonian,
    sequence_evolution,
    stroboscopic_propagator,
    summarize_recoupling,
)
from hapq.sequences.library import double_irradiation
from hapq.spins.evolution import fidelity
from hapq.spins.operators import Operator
from tests.conftest import chain_model

IDENTITY_4 = Operator(np.eye(4, dtype=complex))


@pytest.fixture
def recoupling_sequence(six_spin_model):
    return double_irradiation(0, 2, 100e3, duration=1 / 100e3, available_planes=six_spin_model.planes())


@pytest.fixture
def recoupling(six_spin_model, six_spin_device_hamiltonian, recoupling_sequence):
    report = average_hamiltonian(recoupling_sequence, six_spin_device_hamiltonian, six_spin_model)
    return report, summarize_recoupling(report, six_spin_model, 0, 2)


class TestCnotFromCoupling:
    @pytest.mark.parametrize("d_hz", [375.0, -71.85])
    @pytest.mark.parametrize("axes", [(Z_AXIS, Z_AXIS), (Y_AXIS, Y_AXIS), ((1.0, 0.0, 0.0), Y_AXIS)])
    def test_two_spin_cnot(self, d_hz, axes):
        schedule = cnot_from_coupling(0, 2, d_hz, *axes)
        assert fidelity(realize_schedule(schedule), Operator(CNOT)) >= 0.999

    def test_cnot_squared_is_identity(self):
        u = realize_schedule(cnot_from_coupling(0, 2, 375.0, Y_AXIS, Y_AXIS))
        assert fidelity(u @ u, IDENTITY_4) == pytest.approx(1.0, abs=1e-12)

    def test_reversed_control(self):
        u = realize_schedule(cnot_from_coupling(2, 0, 375.0))
        assert fidelity(u, Operator(CNOT)) == pytest.approx(1.0, abs=1e-12)

    def test_gate_time_is_one_entangler(self):
        assert cnot_from_coupling(0, 2, 375.0).gate_time == pytest.approx(1 / 750)

    @pytest.mark.parametrize("d_hz", [0.0, math.inf, math.nan])
    def test_needs_finite_nonzero_coupling(self, d_hz):
        with pytest.raises(GateError):
            cnot_from_coupling(0, 2, d_hz)

    def test_same_plane(self):
        with pytest.raises(GateError):
            cnot_from_coupling(1, 1, 375.0)


class TestEntangler:
    def test_entangler_time(self):
        assert entangler_time(375.0) == pytest.approx(1.3333e-3, rel=1e-4)
        assert entangler_time(750.0) == pytest.approx(entangler_time(375.0) / 2)

    def test_fourfold_entangler_is_identity(self):
        u = realize_schedule(synthesize_entangler(375.0))
        assert fidelity(Operator(np.linalg.matrix_power(u.matrix, 4)), IDENTITY_4) == pytest.approx(1.0, abs=1e-12)

    def test_entangler_locally_equivalent_to_cnot(self):
        for d_hz in (375.0, -375.0):
            assert locally_equivalent(synthesize_entangler(d_hz).ideal_target, CNOT)

    def test_entangler_sign(self):
        assert synthesize_entangler(-10.0).notes["sign"] == -1.0

    def test_rotation_to_z(self):
        assert rotation_to_z(Y_AXIS) == (pytest.approx((1.0, 0.0, 0.0)), pytest.approx(math.pi / 2))
        assert rotation_to_z(Z_AXIS)[1] == 0.0
        assert rotation_to_z((0.0, 0.0, -1.0))[1] == pytest.approx(math.pi)


class TestMakhlin:
    def test_cnot_invariants(self):
        g1, g2 = makhlin_invariants(CNOT)
        assert abs(g1) == pytest.approx(0.0, abs=1e-12)
        assert g2 == pytest.approx(1.0)

    def test_identity_invariants(self):
        g1, g2 = makhlin_invariants(np.eye(4))
        assert g1 == pytest.approx(1.0)
        assert g2 == pytest.approx(3.0)

    def test_cz_equivalent_to_cnot(self):
        assert locally_equivalent(CZ, CNOT)
        assert not locally_equivalent(np.eye(4), CNOT)

    def test_needs_4x4(self):
        with pytest.raises(GateError):
            makhlin_invariants(np.eye(2))


class TestClusterRealization:
    def test_ideal_evolution_matches_chainwise_target(self, six_spin_model):
        schedule = cnot_from_coupling(0, 2, 368.84, Y_AXIS, Y_AXIS)
        realized = realize_schedule(schedule, six_spin_model)
        assert fidelity(realized, chainwise_target(schedule, six_spin_model)) == pytest.approx(1.0, abs=1e-10)

    def test_error_terms_lower_the_fidelity(
        self, six_spin_model, six_spin_device_hamiltonian, recoupling_sequence, recoupling
    ):
        report, summary = recoupling
        schedule = cnot_schedule(0, 2, six_spin_model, summary)
        assert schedule.notes["projection"] >= 0.9
        target = chainwise_target(schedule, six_spin_model)
        ideal = fidelity(realize_schedule(schedule), Operator(CNOT))
        evolution = sequence_evolution(recoupling_sequence, six_spin_model, six_spin_device_hamiltonian)
        exact = fidelity(realize_schedule(schedule, six_spin_model, evolution=evolution), target)
        averaged = fidelity(realize_schedule(schedule, six_spin_model, hamiltonian=report.h_bar), target)
        assert ideal == pytest.approx(1.0, abs=1e-9)
        assert 0.5 < exact < ideal - 1e-6
        assert 0.5 < averaged < ideal - 1e-6

    def test_exact_evolution_runs_whole_cycles(self, six_spin_model, six_spin_device_hamiltonian, recoupling_sequence):
        seq, h = recoupling_sequence, six_spin_device_hamiltonian
        evolve_for = sequence_evolution(seq, six_spin_model, h)
        expected = stroboscopic_propagator(seq, six_spin_model, h, n_repeats=2)
        assert_allclose(evolve_for(2.4 * seq.cycle_time).matrix, expected.matrix, atol=1e-10)
        assert_allclose(evolve_for(0.1 * seq.cycle_time).matrix, evolve_for(seq.cycle_time).matrix, atol=1e-12)

    def test_schedule_from_report(self, six_spin_model, recoupling):
        report, summary = recoupling
        schedule = cnot_schedule(0, 2, six_spin_model, report)
        assert schedule.notes["d_ab_hz"] == pytest.approx(summary.d_ab_hz)

    def test_summary_for_other_planes(self, six_spin_model, recoupling):
        _, summary = recoupling
        with pytest.raises(GateError):
            cnot_schedule(0, 1, six_spin_model, summary)

    def test_finite_pulses_degrade_the_gate(self):
        model = chain_model(3, gradient=2e4)
        schedule = cnot_from_coupling(0, 2, 368.84)
        target = chainwise_target(schedule, model)
        finite = fidelity(realize_schedule(schedule, model, finite_pulse_hz=50.0), target)
        assert 0.5 < finite < 1.0 - 1e-6

    def test_absent_plane(self):
        with pytest.raises(GateError):
            realize_schedule(cnot_from_coupling(0, 5, 375.0), chain_model(3))

    def test_hamiltonian_needs_model(self):
        with pytest.raises(GateError):
            realize_schedule(cnot_from_coupling(0, 2, 375.0), hamiltonian=IDENTITY_4)

    def test_evolution_needs_model(self):
        with pytest.raises(GateError):
            realize_schedule(cnot_from_coupling(0, 2, 375.0), evolution=lambda t: IDENTITY_4)


class TestRouting:
    def test_nominal_route_count(self):
        assert swap_count(0, 6) == 2
        assert route_gate_count(0, 6) == 13
        assert len(swap_route(0, 6)) == 13

    def test_within_reach_needs_no_swap(self):
        assert route_gate_count(3, 1) == 1
        assert len(swap_route(3, 1)) == 1

    @pytest.mark.parametrize("reach", [1, 2, 3, 4])
    def test_route_lengths(self, reach):
        for distance in range(1, 21):
            route = swap_route(0, distance, reach=reach)
            assert len(route) == route_gate_count(0, distance, reach)
            swaps = swap_count(0, distance, reach)
            assert distance - swaps * reach <= reach
            assert all(abs(g.planes_involved[0] - g.planes_involved[1]) <= reach for g in route)

    def test_routed_cnot_equals_direct_cnot(self):
        planes = [0, 2, 4, 6]
        u = route_unitary(swap_route(0, 6), planes)
        assert_allclose(u.matrix, embed_two_spin(CNOT, 0, 3, 4), atol=1e-12)

    def test_routed_cnot_backwards(self):
        planes = [0, 2, 4]
        u = route_unitary(swap_route(4, 0), planes)
        assert_allclose(u.matrix, embed_two_spin(CNOT, 2, 0, 3), atol=1e-12)

    def test_route_errors(self):
        with pytest.raises(GateError):
            swap_route(2, 2)
        with pytest.raises(GateError):
            swap_route(0, 8, n_planes=5)
        with pytest.raises(GateError):
            swap_route(0, 4, reach=0)
        with pytest.raises(GateError):
            route_unitary(swap_route(0, 2), [0, 1])


class TestScheduleText:
    def test_header_and_steps(self):
        schedule = cnot_from_coupling(0, 2, 375.0, Y_AXIS, Y_AXIS)
        lines = schedule_to_text(schedule).splitlines()
        assert lines[0] == "# schedule name=cnot(0->2) planes=0 2"
        assert lines[1].startswith("# ideal_target=")
        assert len(lines) == 2 + len(schedule.steps)
        assert sum("coupling_hz=375.0" in line for line in lines) == 1

    def test_non_unitary_target(self):
        with pytest.raises(GateError):
            GateSchedule([], np.ones((4, 4)), (0, 1))
