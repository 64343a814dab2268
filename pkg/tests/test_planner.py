"""
Tests for device planning.
"""

import pytest

from hapq.core.config import DeviceConfig, LatticeConfig
from hapq.core.exceptions import PlannerError
from hapq.planner import (
    addressable_planes,
    device_plan,
    overlap_check,
    physical_plane_limit,
    plan_to_text,
    plane_splitting_hz,
    spins_per_plane,
)
from hapq.planner.device import gauss_per_cm_to_tesla_per_metre


def nominal_device(**overrides) -> DeviceConfig:
    values = {
        "gradient": 2e4,
        "bandwidth": 45e3,
        "sample_thickness": 0.035,
        "sample_width": 0.095,
        "sample_depth": 0.095,
        "strategy": "nnn",
        "broadening": 375.0,
    }
    values.update(overrides)
    return DeviceConfig(**values)


class TestCapacity:
    def test_boosted_splitting(self):
        assert plane_splitting_hz(2e4, 3.44e-10) == pytest.approx(292.93, abs=0.01)

    def test_unboosted_splitting(self):
        assert plane_splitting_hz(gauss_per_cm_to_tesla_per_metre(2e4), 3.44e-10) == pytest.approx(2.929, abs=0.001)

    def test_zero_gradient_gives_zero_splitting(self):
        assert plane_splitting_hz(0.0, 3.44e-10) == 0.0

    def test_negative_gradient(self):
        with pytest.raises(PlannerError):
            plane_splitting_hz(-1.0, 3.44e-10)

    def test_addressable_planes(self):
        assert addressable_planes(45e3, plane_splitting_hz(2e4, 3.44e-10)) == 153

    def test_exact_ratio_keeps_last_plane(self):
        assert addressable_planes(45e3, 300.0) == 150

    def test_physical_plane_limit(self):
        assert physical_plane_limit(0.035, 3.44e-10) == 101_744_186
        assert physical_plane_limit(1e-6, 3.44e-10) == 2906

    def test_spins_per_plane(self):
        assert spins_per_plane(0.095, 0.095, 9.42e-10) == pytest.approx(1.1744e16, rel=1e-4)

    @pytest.mark.parametrize("bandwidth, splitting", [(0.0, 300.0), (45e3, 0.0), (-1.0, 300.0)])
    def test_nonpositive_inputs(self, bandwidth, splitting):
        with pytest.raises(PlannerError):
            addressable_planes(bandwidth, splitting)


class TestOverlap:
    def test_margins(self):
        splitting = plane_splitting_hz(2e4, 3.44e-10)
        nn = overlap_check("nn", 400.0, splitting)
        nnn = overlap_check("nnn", 400.0, splitting)
        assert not nn.passed
        assert nn.margin_hz == pytest.approx(-107.07, abs=0.01)
        assert nnn.passed
        assert nnn.margin_hz == pytest.approx(185.86, abs=0.01)
        assert nnn.threshold_hz == pytest.approx(2 * splitting)

    def test_equal_broadening_fails(self):
        assert not overlap_check("nn", 300.0, 300.0).passed

    def test_unknown_strategy(self):
        with pytest.raises(PlannerError):
            overlap_check("nnnn", 1.0, 1.0)


class TestDevicePlan:
    def test_nominal_plan(self):
        plan = device_plan(nominal_device())
        assert plan.feasible
        assert plan.issues == []
        assert plan.addressable_planes == 153
        assert plan.physical_plane_limit == 101_744_186
        assert plan.gradient_gauss_per_cm == pytest.approx(2e6)
        assert plan.total_spins == pytest.approx(101_744_186 * 1.1744e16, rel=1e-4)
        assert plan.active_thickness_m == pytest.approx(153 * 3.44e-10)

    def test_unboosted_plan_fails_overlap(self):
        plan = device_plan(nominal_device(gradient=200.0))
        assert not plan.feasible
        assert plan.overlap.threshold_hz == pytest.approx(5.86, abs=0.01)
        assert any("overlap" in issue for issue in plan.issues)

    def test_zero_gradient(self):
        plan = device_plan(nominal_device(gradient=0.0))
        assert plan.addressable_planes == 0
        assert not plan.feasible
        assert any("zero gradient" in issue for issue in plan.issues)

    def test_bandwidth_below_splitting(self):
        plan = device_plan(nominal_device(bandwidth=100.0))
        assert plan.addressable_planes == 0
        assert any("below the plane splitting" in issue for issue in plan.issues)

    def test_more_planes_than_sample(self):
        plan = device_plan(nominal_device(sample_thickness=1e-8))
        assert plan.physical_plane_limit == 29
        assert any("exceed" in issue for issue in plan.issues)

    def test_broadening_override_wins(self):
        plan = device_plan(nominal_device(), broadening_hz=700.0)
        assert plan.overlap.broadening_hz == 700.0
        assert not plan.feasible

    def test_missing_broadening(self):
        with pytest.raises(PlannerError, match="broadening"):
            device_plan(nominal_device(broadening=None))

    def test_custom_lattice(self):
        plan = device_plan(nominal_device(), LatticeConfig(chain_spacing=6.88e-10))
        assert plan.splitting_hz == pytest.approx(2 * 292.93, abs=0.02)

    def test_text_report(self):
        text = plan_to_text(device_plan(nominal_device()))
        lines = dict(line.split(" = ", 1) for line in text.splitlines())
        assert lines["addressable_planes"] == "153"
        assert lines["overlap.strategy"] == "nnn"
        assert lines["issues"] == "none"
        assert lines["feasible"] == "true"
