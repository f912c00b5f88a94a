import math

import numpy as np
import pytest
from numpy.testing import assert_allclose

from vdw import forces
from vdw.exceptions import NonFiniteError
from vdw.forces import (
    Component,
    asymptotic_ratios,
    calibrate_chirality,
    cavity_experiment,
    default_step,
    force,
    potential_function,
    ratio_field,
)
from vdw.polarizability import enantiomer
from vdw.schemas import Environment, GeometryPair, ScanConfig

FREE = Environment.free()
NEGATIVE = Environment.single_plate(chirality=-1)


def pair(r_a, r_b) -> GeometryPair:
    return GeometryPair(r_a=tuple(r_a), r_b=tuple(r_b))


def test_free_london_force_is_attractive_and_radial(electric, spec):
    g = pair((0.0, 0.0, 0.0), (1e-3, 2e-3, -1e-3))
    f = force(Component.EE_NR, electric, electric, g, FREE, spec)
    radial = float(g.e_r @ f)
    assert radial < 0
    assert np.linalg.norm(f - radial * g.e_r) < 1e-5 * abs(radial)
    u = potential_function(Component.EE_NR, electric, electric, FREE, spec)(g)
    assert radial == pytest.approx(6.0 * u / g.distance, rel=1e-5)


def test_force_richardson_order(electric, spec):
    g = pair((0.0, 0.0, 0.0), (0.2, 0.1, 0.0))
    exact_radial = 6.0 * potential_function(Component.EE_NR, electric, electric, FREE, spec)(g) / g.distance
    coarse = force(Component.EE_NR, electric, electric, g, FREE, spec, h=5e-3)
    fine = force(Component.EE_NR, electric, electric, g, FREE, spec, h=2.5e-3)
    ratio = abs(g.e_r @ coarse - exact_radial) / abs(g.e_r @ fine - exact_radial)
    assert ratio == pytest.approx(4.0, rel=0.05)


def test_full_ee_force_matches_nonretarded_at_short_range(electric, spec):
    g = pair((0.0, 0.0, 0.0), (1e-3, 0.0, 0.0))
    full = force(Component.EE, electric, electric, g, FREE, spec)
    nr = force(Component.EE_NR, electric, electric, g, FREE, spec)
    assert_allclose(full, nr, rtol=1e-4, atol=1e-6 * np.linalg.norm(nr))


def test_ce_force_has_transverse_component_near_plate(chiral, electric, spec):
    g = pair((0.0, 0.0, 1e-3), (0.0, 1.5e-3, 2e-3))
    f = force(Component.CE_NR, chiral, electric, g, NEGATIVE, spec)
    transverse = f - (g.e_r @ f) * g.e_r
    assert np.linalg.norm(transverse) > 1e-3 * np.linalg.norm(f)


def test_default_step_is_clamped_by_plate():
    g = pair((0.0, 0.0, 1e-3), (0.0, 1.0, 1e-5))
    assert default_step(g, NEGATIVE) == pytest.approx(0.5e-5)
    assert default_step(g, FREE) == pytest.approx(1e-4 * g.distance)


def test_asymptotic_ratios_are_minus_two_apart(two_level, electric, spec):
    parallel, perpendicular = asymptotic_ratios(two_level, electric, -1, spec)
    assert parallel / perpendicular == pytest.approx(-2.0, rel=1e-12)
    flipped = asymptotic_ratios(two_level, electric, 1, spec)
    assert flipped == pytest.approx((-parallel, -perpendicular))


def test_calibration_reaches_target(chiral, electric, spec):
    calibrated = calibrate_chirality(chiral, electric, -1, target=0.0675, spec=spec)
    parallel, perpendicular = asymptotic_ratios(calibrated, electric, -1, spec)
    assert parallel == pytest.approx(0.0675, rel=1e-9)
    assert perpendicular == pytest.approx(-0.03375, rel=1e-9)


def test_calibration_rejects_achiral(electric, spec):
    with pytest.raises(ValueError):
        calibrate_chirality(electric, electric, -1, spec=spec)


def scan(a, b, env, **kwargs) -> ScanConfig:
    return ScanConfig(
        z_a=1e-3,
        y=kwargs.pop("y", (1e4,)),
        z=kwargs.pop("z", (0.0,)),
        molecule_a=a,
        molecule_b=b,
        environment=env,
        **kwargs,
    )


def test_ratio_field_parallel_and_perpendicular_asymptotes(chiral, electric, spec):
    parallel, perpendicular = asymptotic_ratios(chiral, electric, -1, spec)
    along = ratio_field(scan(chiral, electric, NEGATIVE, quadrature=spec)).points[0]
    above = ratio_field(scan(chiral, electric, NEGATIVE, y=(0.0,), z=(1e4,), quadrature=spec)).points[0]
    assert along.ratio_CE_EE == pytest.approx(parallel, rel=1e-3)
    assert above.ratio_CE_EE == pytest.approx(perpendicular, rel=2e-3)


def test_ratio_field_is_odd_under_plate_flip(chiral, electric, spec):
    grid = {"y": (0.5, 1.0, 3.0), "z": (0.0, 1.0)}
    negative = ratio_field(scan(chiral, electric, NEGATIVE, quadrature=spec, **dict(grid)))
    positive = ratio_field(scan(chiral, electric, NEGATIVE.flipped(), quadrature=spec, **dict(grid)))
    for n, p in zip(negative.points, positive.points, strict=True):
        assert p.ratio_CE_EE == pytest.approx(-n.ratio_CE_EE, rel=1e-9)


def test_ratio_field_grid_order_and_threads(chiral, electric, spec):
    grid = {"y": (0.5, 2.0), "z": (0.0, 1.0, 2.0)}
    serial = ratio_field(scan(chiral, electric, NEGATIVE, quadrature=spec, **dict(grid)))
    threaded = ratio_field(scan(chiral, electric, NEGATIVE, quadrature=spec, workers=3, **dict(grid)))
    assert [p.y for p in serial.points] == pytest.approx([0.5, 0.5, 0.5, 2.0, 2.0, 2.0])
    assert [p.z for p in serial.points] == pytest.approx([0.0, 1.0, 2.0, 0.0, 1.0, 2.0])
    assert serial == threaded


def test_ratio_field_isolates_failures(chiral, electric, spec, monkeypatch):
    original = forces.potential_CE_nr_plate

    def failing(a, b, g, plate, quadrature):
        if g.r_b[1] > 1.5e-3:
            raise NonFiniteError("potential_CE_nr_plate: injected", "potential_CE_nr_plate", g.r_b)
        return original(a, b, g, plate, quadrature)

    monkeypatch.setattr(forces, "potential_CE_nr_plate", failing)
    result = ratio_field(scan(chiral, electric, NEGATIVE, y=(1.0, 2.0), quadrature=spec))
    assert result.points[0].failure is None
    assert result.points[0].ratio_CE_EE is not None
    assert "NonFiniteError" in result.points[1].failure
    assert result.points[1].U_EE is None
    assert len(result.failures) == 1


def test_scan_config_rejects_points_below_plate(chiral, electric):
    with pytest.raises(ValueError):
        scan(chiral, electric, NEGATIVE, z=(-1.5,))
    with pytest.raises(ValueError):
        scan(chiral, electric, NEGATIVE, y=(0.0,), z=(0.0,))


CAVITY = Environment.cavity(4e-3, chirality=1)
CENTRE = (0.0, 0.0, 2e-3)


@pytest.mark.parametrize("offset", [0.5e-3, 1e-3, 1.5e-3])
def test_cavity_same_handedness_cancels(chiral, electric, spec, offset):
    report = cavity_experiment(chiral, electric, chiral, CAVITY, CENTRE, offset, spec=spec)
    assert abs(report.force_ab_ce) > 0.0
    assert abs(report.force_b) < 1e-6 * abs(report.force_ab_ee)
    assert "three-body" in report.note


def test_cavity_opposite_handedness_leaves_twice_ce(chiral, electric, spec):
    report = cavity_experiment(chiral, electric, enantiomer(chiral), CAVITY, CENTRE, 1e-3, spec=spec)
    assert report.force_b != 0.0
    assert report.force_b == pytest.approx(2.0 * report.force_ab_ce, rel=1e-6)
    assert report.handedness_c == -report.handedness_a


def test_cavity_parallel_axis(chiral, electric, spec):
    same = cavity_experiment(chiral, electric, chiral, CAVITY, CENTRE, 1e-3, axis="parallel", spec=spec)
    assert abs(same.force_b) < 1e-6 * abs(same.force_ab_ee)


def test_cavity_achiral_neighbours_give_zero(electric, spec):
    report = cavity_experiment(electric, electric, electric, CAVITY, CENTRE, 1e-3, spec=spec)
    assert report.force_ab_ce == 0.0
    assert abs(report.force_b) < 1e-6 * abs(report.force_ab_ee)


def test_cavity_rejects_invalid_setups(chiral, electric, spec):
    with pytest.raises(ValueError):
        cavity_experiment(chiral, electric, chiral, CAVITY, (0.0, 0.0, 1.5e-3), 1e-3, spec=spec)
    with pytest.raises(ValueError):
        cavity_experiment(chiral, chiral, chiral, CAVITY, CENTRE, 1e-3, spec=spec)
    with pytest.raises(ValueError):
        cavity_experiment(chiral, electric, chiral, NEGATIVE, CENTRE, 1e-3, spec=spec)


def test_components_cover_closed_forms(chiral, electric, spec):
    g = pair((0.0, 0.0, 1e-3), (0.0, 2e-3, 1e-3))
    total = potential_function(Component.TOTAL_NR, chiral, electric, NEGATIVE, spec)(g)
    parts = sum(
        potential_function(c, chiral, electric, NEGATIVE, spec)(g)
        for c in (Component.EE_NR, Component.CE_NR, Component.CC_NR)
    )
    assert total == pytest.approx(parts)
    assert math.isfinite(total)


def test_scan_error_estimate_is_an_energy(electric, spec):
    near, far = ratio_field(scan(electric, electric, FREE, y=(1.0, 2.0), quadrature=spec)).points
    assert near.err_estimate == pytest.approx(64.0 * far.err_estimate, rel=1e-9)
    assert near.err_estimate <= 1e-9 * abs(near.U_EE)
