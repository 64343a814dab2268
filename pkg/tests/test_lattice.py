"""
Tests for lattice geometry.
"""

import csv
import math

import numpy as np
import pytest
from pydantic import ValidationError as PydanticValidationError

from hapq.core.exceptions import DegeneratePairError
from hapq.structure.constants import ANGSTROM
from hapq.structure.lattice import LatticeSpec, build_lattice, pair_geometry, select_sites, sites_to_csv


class TestBuildLattice:
    def test_single_plane_single_chain(self):
        sites = build_lattice(LatticeSpec(n_planes=1))
        assert len(sites) == 1
        assert sites[0].position == (0.0, 0.0, 0.0)

    def test_two_planes_at_lattice_spacing(self):
        sites = build_lattice(LatticeSpec(n_planes=2))
        assert [s.position[2] for s in sites] == pytest.approx([0.0, 3.44e-10], abs=1e-15)

    def test_hexagonal_pattern(self):
        sites = build_lattice(LatticeSpec(n_planes=1, chain_pattern="central_plus_six_hex"))
        assert len(sites) == 7
        center = sites[0].vector
        outer = [s.vector for s in sites[1:]]
        for v in outer:
            assert np.linalg.norm(v - center) == pytest.approx(9.42e-10, rel=1e-12)
        nearest = min(np.linalg.norm(a - b) for i, a in enumerate(outer) for b in outer[i + 1 :])
        assert nearest == pytest.approx(9.42e-10, rel=1e-12)

    def test_ids_plane_major(self):
        spec = LatticeSpec(n_planes=3, chain_pattern="central_plus_six_hex")
        sites = build_lattice(spec)
        assert len(sites) == 21
        assert [s.id for s in sites] == list(range(21))
        assert all(s.id == s.plane_index * 7 + s.chain_id for s in sites)

    def test_plane_height_matches_index(self):
        spec = LatticeSpec(n_planes=4, chain_pattern="central_plus_six_hex")
        for site in build_lattice(spec):
            assert np.dot(site.vector, spec.field_axis) == pytest.approx(site.plane_index * 3.44e-10, abs=1e-15)

    def test_tilted_field_axis(self):
        axis = (0.0, math.sin(0.3), math.cos(0.3))
        sites = build_lattice(LatticeSpec(n_planes=2, field_axis=axis))
        r, theta = pair_geometry(sites[0], sites[1], axis)
        assert r == pytest.approx(3.44e-10)
        assert theta == pytest.approx(0.0, abs=1e-7)


class TestLatticeSpecValidation:
    @pytest.mark.parametrize("field", ["chain_spacing", "chain_separation"])
    def test_nonpositive_length(self, field):
        with pytest.raises(PydanticValidationError, match=field):
            LatticeSpec(**{field: 0.0})

    def test_zero_planes(self):
        with pytest.raises(PydanticValidationError, match="n_planes"):
            LatticeSpec(n_planes=0)

    def test_field_axis_must_be_unit(self):
        with pytest.raises(PydanticValidationError, match="field_axis"):
            LatticeSpec(field_axis=(0.0, 0.0, 2.0))

    def test_offsets_only_with_explicit_pattern(self):
        with pytest.raises(PydanticValidationError):
            LatticeSpec(chain_offsets=((0.0, 0.0),))


class TestPairGeometry:
    def test_adjacent_planes_same_chain(self):
        a, b = build_lattice(LatticeSpec(n_planes=2))
        r, theta = pair_geometry(a, b, (0.0, 0.0, 1.0))
        assert r == pytest.approx(3.44 * ANGSTROM)
        assert theta == pytest.approx(0.0, abs=1e-12)

    def test_same_plane_adjacent_chains(self, two_chain_spec):
        sites = build_lattice(two_chain_spec)
        r, theta = pair_geometry(sites[0], sites[1], two_chain_spec.field_axis)
        assert r == pytest.approx(9.42 * ANGSTROM)
        assert theta == pytest.approx(math.pi / 2)

    def test_adjacent_chain_two_planes_apart(self, two_chain_spec):
        sites = build_lattice(two_chain_spec)
        a = next(s for s in sites if s.plane_index == 0 and s.chain_id == 0)
        b = next(s for s in sites if s.plane_index == 2 and s.chain_id == 1)
        r, theta = pair_geometry(a, b, two_chain_spec.field_axis)
        assert r == pytest.approx(11.665e-10, rel=1e-4)
        assert math.cos(theta) == pytest.approx(6.88 / math.hypot(9.42, 6.88))

    def test_coincident_sites(self):
        spec = LatticeSpec(n_planes=1, chain_pattern="explicit", chain_offsets=((0.0, 0.0), (0.0, 0.0)))
        a, b = build_lattice(spec)
        with pytest.raises(DegeneratePairError):
            pair_geometry(a, b, spec.field_axis)


def test_select_sites(two_chain_spec):
    sites = build_lattice(two_chain_spec)
    chosen = select_sites(sites, planes=[0, 2], chains=[1])
    assert [(s.plane_index, s.chain_id) for s in chosen] == [(0, 1), (2, 1)]
    assert select_sites(sites, chains=[5]) == []


def test_sites_csv(tmp_path, two_chain_spec):
    path = tmp_path / "sites.csv"
    sites_to_csv(build_lattice(two_chain_spec), path)
    with open(path, newline="") as f:
        rows = list(csv.reader(f))
    assert rows[0] == ["id", "chain_id", "plane_index", "x_m", "y_m", "z_m"]
    assert len(rows) == 7
    assert float(rows[2][3]) == pytest.approx(9.42e-10)
