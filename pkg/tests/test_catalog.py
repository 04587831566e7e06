import math

import numpy as np
import pytest

from revtype import (
    broken_diagonal,
    catenoid,
    eval_value,
    fit_matrix,
    forms_at,
    sphere,
    torus,
    validate_profile,
)
from revtype import catalog
from revtype.geometry import profile_from_dict, profile_to_dict, sample_regular


class TestEntries:
    def test_all_valid_entries_validate(self):
        for name in catalog.names():
            entry = catalog.make(name)
            report = validate_profile(entry.curve)
            if entry.valid:
                assert report.passed, name
                assert report.max_arc_defect <= 1e-10, name
            else:
                assert not report.passed, name

    def test_catenoid_waist(self):
        curve = catenoid(1.0).curve
        assert eval_value(curve.f, 0.0, curve.params_dict) == pytest.approx(1.0)
        assert eval_value(curve.g, 0.0, curve.params_dict) == pytest.approx(0.0)

    def test_catenoid_scaled(self):
        curve = catenoid(2.0).curve
        assert eval_value(curve.f, 2.0, curve.params_dict) == pytest.approx(2.0 * math.sqrt(2.0))

    def test_catenoid_arclength_identity(self):
        report = validate_profile(catenoid(1.0).curve, n_samples=101)
        assert report.max_arc_defect <= 1e-12

    def test_sphere_equator(self):
        curve = sphere(1.0).curve
        fm = forms_at(curve, math.pi / 2)
        assert fm.radius == pytest.approx(1.0)
        assert fm.H == pytest.approx(1.0, abs=1e-12)
        assert fm.K == pytest.approx(1.0, abs=1e-12)

    def test_sphere_quotient_constant(self):
        curve = sphere(2.0).curve
        for s in sample_regular(curve, 15):
            assert forms_at(curve, s).R == pytest.approx(4.0, rel=1e-13)

    def test_sphere_pole_collar(self):
        curve = sphere(1.0).curve
        assert curve.s_min == pytest.approx(0.05)
        assert curve.s_max == pytest.approx(math.pi - 0.05)

    def test_torus_closed_curvatures(self):
        entry = torus(3.0, 1.0)
        for s in sample_regular(entry.curve, 21):
            fm = forms_at(entry.curve, s)
            assert fm.K == pytest.approx(entry.gauss_curvature(s), rel=1e-11)
            assert fm.H == pytest.approx(entry.mean_curvature(s), rel=1e-11)

    def test_torus_outer_equator(self):
        entry = torus(3.0, 1.0)
        fm = forms_at(entry.curve, 0.0)
        assert fm.radius == pytest.approx(4.0)
        assert fm.K == pytest.approx(0.25)
        assert fm.H == pytest.approx(0.625)

    def test_known_truth_matches_fit(self):
        for name in catalog.names():
            entry = catalog.make(name)
            if not entry.valid or entry.expected_verdict is None:
                continue
            report = fit_matrix(entry.curve)
            assert report.verdict == entry.expected_verdict, name
            if entry.known_matrix is not None:
                assert np.allclose(report.matrix, entry.known_matrix, atol=1e-8), name


class TestGuards:
    @pytest.mark.parametrize("bad", [0.0, -1.0])
    def test_catenoid_waist_positive(self, bad):
        with pytest.raises(ValueError):
            catenoid(bad)

    @pytest.mark.parametrize("bad", [0.0, -2.0])
    def test_sphere_radius_positive(self, bad):
        with pytest.raises(ValueError):
            sphere(bad)

    def test_torus_radii_ordered(self):
        with pytest.raises(ValueError):
            torus(1.0, 2.0)
        with pytest.raises(ValueError):
            torus(3.0, 0.0)

    def test_make_unknown_surface(self):
        with pytest.raises(ValueError, match="unknown catalog surface"):
            catalog.make("unduloid")

    def test_make_unknown_parameter(self):
        with pytest.raises(ValueError, match="does not take parameter"):
            catalog.make("sphere", {"c": 1.0})


class TestExport:
    def test_names_listed(self):
        assert {"catenoid", "sphere", "torus", "broken-diagonal"} <= set(catalog.names())

    def test_make_with_cli_parameter_names(self):
        entry = catalog.make("torus", {"R": 4.0, "r": 0.5})
        assert "torus" in entry.curve.name
        fm = forms_at(entry.curve, 0.0)
        assert fm.radius == pytest.approx(4.5)

    def test_profile_format_roundtrip(self):
        for name in ("catenoid", "sphere", "torus"):
            curve = catalog.make(name).curve
            assert profile_from_dict(profile_to_dict(curve)) == curve

    def test_broken_entry_flagged(self):
        assert not broken_diagonal().valid
