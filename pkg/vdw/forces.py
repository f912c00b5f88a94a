"""
Created on : Tuesday, 20th October 2026 9:15:31 am
Author: chiral-vdw contributors
-----
Forces from potential gradients, ratio scans over molecule-B positions, and the
three-molecule cavity discrimination scenario.
"""

import logging
import math
from collections.abc import Callable
from concurrent.futures import ThreadPoolExecutor
from enum import StrEnum
from typing import Literal

import numpy as np
import numpy.typing as npt

from vdw.exceptions import NumericalError, SingularGeometryError
from vdw.greens import DEFAULT_QUADRATURE
from vdw.math_core import Vector3, gradient_central
from vdw.polarizability import scaled_magnetic
from vdw.potentials import (
    alpha_alpha_integral,
    chi_alpha_integral,
    closed_form_error,
    potential_breakdown,
    potential_CC,
    potential_CC_free_iso,
    potential_CE,
    potential_CE_nr_plate,
    potential_EE,
    potential_EE_nr_free,
)
from vdw.schemas import (
    CavityReport,
    Environment,
    GeometryPair,
    PolarizabilityModel,
    QuadratureSpec,
    ScanConfig,
    ScanPoint,
    ScanResult,
    Sign,
)

logger = logging.getLogger(__name__)

DEFAULT_RELATIVE_STEP = 1e-4
DEFAULT_PARALLEL_RATIO = 0.0675


class Component(StrEnum):
    EE = "EE"
    CE = "CE"
    CC = "CC"
    EE_NR = "EE_nr"
    CE_NR = "CE_nr"
    CC_NR = "CC_nr"
    TOTAL = "total"
    TOTAL_NR = "total_nr"


type Potential = Callable[[GeometryPair], float]


def _ce_nr(
    a: PolarizabilityModel, b: PolarizabilityModel, env: Environment, spec: QuadratureSpec
) -> Potential:
    return lambda g: sum(
        (potential_CE_nr_plate(a, b, g, plate, spec) for plate in env.plates), 0.0
    )


def potential_function(
    component: Component,
    a: PolarizabilityModel,
    b: PolarizabilityModel,
    env: Environment,
    spec: QuadratureSpec = DEFAULT_QUADRATURE,
) -> Potential:
    """Energy of one component as a function of the pair geometry.

    The `_nr` components use closed forms: London for EE, the plate factor for CE (zero
    in free space) and the free-space loop formula for CC.
    """
    match component:
        case Component.EE:
            return lambda g: potential_EE(a, b, g, env, spec)
        case Component.CE:
            return lambda g: potential_CE(a, b, g, env, spec)
        case Component.CC:
            return lambda g: potential_CC(a, b, g, env, spec)
        case Component.EE_NR:
            return lambda g: potential_EE_nr_free(a, b, g.distance, spec)
        case Component.CE_NR:
            return _ce_nr(a, b, env, spec)
        case Component.CC_NR:
            return lambda g: potential_CC_free_iso(a, b, g.distance, spec)
        case Component.TOTAL:
            return lambda g: potential_breakdown(a, b, g, env, spec).total
        case Component.TOTAL_NR:
            ce = _ce_nr(a, b, env, spec)
            return lambda g: (
                potential_EE_nr_free(a, b, g.distance, spec)
                + ce(g)
                + potential_CC_free_iso(a, b, g.distance, spec)
            )
    raise ValueError(f"potential_function: unknown component {component!r}")


def default_step(g: GeometryPair, env: Environment) -> float:
    """1e-4 |r|, clamped so the stencil never reaches a plate."""
    h = DEFAULT_RELATIVE_STEP * g.distance
    for plate in env.plates:
        h = min(h, 0.5 * plate.height(g.r_b))
    return h


def force(
    component: Component,
    a: PolarizabilityModel,
    b: PolarizabilityModel,
    g: GeometryPair,
    env: Environment,
    spec: QuadratureSpec = DEFAULT_QUADRATURE,
    h: float | None = None,
) -> Vector3:
    """Force on B, -grad_r U(r_A, r_A + r), by central differences."""
    if g.distance == 0.0:
        raise SingularGeometryError(f"force: molecules coincide at {g.r_a}", "force", g.r_a)
    step = default_step(g, env) if h is None else h
    potential = potential_function(component, a, b, env, spec)
    r_a = np.asarray(g.r_a, dtype=float)
    logger.debug("force: component=%s r_b=%s h=%.3e", component, g.r_b, step)
    return -gradient_central(
        lambda r: potential(g.with_b(r_a + r)), g.separation, step
    )


def scan_point(cfg: ScanConfig, g: GeometryPair) -> ScanPoint:
    """Energies, forces and ratio at one grid geometry; numerical failures are recorded."""
    a, b, env, spec = cfg.molecule_a, cfg.molecule_b, cfg.environment, cfg.quadrature
    x, y, z = (np.asarray(g.r_b) - np.asarray(cfg.r_a)) / cfg.z_a
    point = ScanPoint(x=float(x), y=float(y), z=float(z))
    ee, ce, cc = (
        (Component.EE, Component.CE, Component.CC)
        if cfg.full
        else (Component.EE_NR, Component.CE_NR, Component.CC_NR)
    )
    h = cfg.step * g.distance
    for plate in env.plates:
        h = min(h, 0.5 * plate.height(g.r_b))
    try:
        u_ee = potential_function(ee, a, b, env, spec)(g)
        u_ce = potential_function(ce, a, b, env, spec)(g)
        u_cc = potential_function(cc, a, b, env, spec)(g)
        f_ee = force(ee, a, b, g, env, spec, h)
        f_ce = force(ce, a, b, g, env, spec, h)
        if cfg.full:
            err = sum(potential_breakdown(a, b, g, env, spec).errors.values())
        else:
            err = closed_form_error(a, b, g, env, spec)
    except NumericalError as e:
        logger.warning("ratio_field: point r_b=%s failed: %s", g.r_b, e)
        return point.model_copy(update={"failure": f"{type(e).__name__}: {e}"})
    e_r = g.e_r
    radial_ee = float(e_r @ f_ee)
    radial_ce = float(e_r @ f_ce)
    return point.model_copy(
        update={
            "U_EE": u_ee,
            "U_CE": u_ce,
            "U_CC": u_cc,
            "F_EE": tuple(float(c) for c in f_ee),
            "F_CE": tuple(float(c) for c in f_ce),
            "er_dot_F_EE": radial_ee,
            "er_dot_F_CE": radial_ce,
            "ratio_CE_EE": radial_ce / radial_ee if radial_ee != 0.0 else None,
            "err_estimate": float(err),
        }
    )


def ratio_field(cfg: ScanConfig) -> ScanResult:
    """Attractiveness ratio e_r.F^CE / e_r.F^EE over the scan grid, in grid order.

    Points are evaluated on `cfg.workers` threads; a numerical failure at one point is
    recorded on that point and the scan continues.
    """
    geometries = cfg.geometries()
    logger.info(
        "ratio_field: points=%d full=%s workers=%d", len(geometries), cfg.full, cfg.workers
    )
    if cfg.workers == 1:
        points = [scan_point(cfg, g) for g in geometries]
    else:
        with ThreadPoolExecutor(max_workers=cfg.workers) as executor:
            points = list(executor.map(lambda g: scan_point(cfg, g), geometries))
    result = ScanResult(points=points)
    if result.failures:
        logger.warning("ratio_field: %d of %d points failed", len(result.failures), len(points))
    return result


def asymptotic_ratios(
    a: PolarizabilityModel,
    b: PolarizabilityModel,
    chirality: Sign,
    spec: QuadratureSpec = DEFAULT_QUADRATURE,
) -> tuple[float, float]:
    """Far-field (parallel, perpendicular) limits of the non-retarded ratio; their quotient is -2."""
    chi_alpha = float(chi_alpha_integral(a, b, spec).value)
    alpha_alpha = float(alpha_alpha_integral(a, b, spec).value)
    if alpha_alpha == 0.0:
        raise ValueError("asymptotic_ratios: molecule pair has no electric response")
    parallel = 4.0 * chirality * chi_alpha / (3.0 * alpha_alpha)
    perpendicular = -2.0 * chirality * chi_alpha / (3.0 * alpha_alpha)
    return parallel, perpendicular


def calibrate_chirality(
    a: PolarizabilityModel,
    b: PolarizabilityModel,
    chirality: Sign,
    target: float = DEFAULT_PARALLEL_RATIO,
    spec: QuadratureSpec = DEFAULT_QUADRATURE,
) -> PolarizabilityModel:
    """Rescale A's magnetic moments so the parallel asymptote equals `target`."""
    parallel, _ = asymptotic_ratios(a, b, chirality, spec)
    if parallel == 0.0:
        raise ValueError(f"calibrate_chirality: molecule {a.name} is achiral")
    factor = target / parallel
    logger.info("calibrate_chirality: model=%s factor=%.6g target=%s", a.name, factor, target)
    return scaled_magnetic(a, factor)


def axis_vector(axis: Literal["normal", "parallel"]) -> npt.NDArray[np.float64]:
    return np.array([0.0, 0.0, 1.0]) if axis == "normal" else np.array([0.0, 1.0, 0.0])


def check_cavity(
    env: Environment,
    r_a: npt.NDArray[np.float64],
    r_b: npt.NDArray[np.float64],
    r_c: npt.NDArray[np.float64],
    axis: Literal["normal", "parallel"],
) -> None:
    if len(env.plates) != 2:
        raise ValueError("cavity_experiment: environment must contain two plates")
    lower, upper = sorted(env.plates, key=lambda p: p.z0)
    if lower.chirality != upper.chirality:
        raise ValueError("cavity_experiment: cavity plates must be identical")
    scale = max(float(np.max(np.abs(r_a - r_c))), upper.z0 - lower.z0)
    tol = 1e-12 * scale
    mid = 0.5 * (lower.z0 + upper.z0)
    if not np.allclose(r_a + r_c, 2.0 * r_b, rtol=0.0, atol=tol):
        raise ValueError("cavity_experiment: A and C must be mirror-symmetric about B")
    if abs(r_b[2] - mid) > tol:
        raise ValueError("cavity_experiment: B must lie on the cavity mid-plane")
    offset = r_c - r_b
    direction = axis_vector(axis)
    if np.linalg.norm(offset) == 0.0 or np.linalg.norm(np.cross(offset, direction)) > tol:
        raise ValueError(f"cavity_experiment: A, B and C must lie on the {axis} axis through B")


def pair_forces(
    source: PolarizabilityModel,
    b: PolarizabilityModel,
    g: GeometryPair,
    env: Environment,
    spec: QuadratureSpec,
    full: bool,
    h: float | None,
) -> tuple[Vector3, Vector3]:
    ee, ce = (Component.EE, Component.CE) if full else (Component.EE_NR, Component.CE_NR)
    return (
        force(ee, source, b, g, env, spec, h),
        force(ce, source, b, g, env, spec, h),
    )


def cavity_experiment(
    a: PolarizabilityModel,
    b: PolarizabilityModel,
    c: PolarizabilityModel,
    env: Environment,
    r_b: npt.ArrayLike,
    offset: float,
    axis: Literal["normal", "parallel"] = "normal",
    spec: QuadratureSpec = DEFAULT_QUADRATURE,
    full: bool = False,
    h: float | None = None,
) -> CavityReport:
    """Force on achiral B between chiral A and C placed at r_B -/+ offset along `axis`.

    Identical handedness gives zero force by the cavity's rotation symmetry; opposite
    handedness leaves twice the chiral-electric force. Only pair potentials enter.
    """
    if b.is_chiral:
        raise ValueError(f"cavity_experiment: middle molecule {b.name} must be achiral")
    centre = np.asarray(r_b, dtype=float)
    direction = axis_vector(axis)
    r_a, r_c = centre - offset * direction, centre + offset * direction
    check_cavity(env, r_a, centre, r_c, axis)
    pair_ab = GeometryPair(r_a=tuple(r_a), r_b=tuple(centre))
    pair_cb = GeometryPair(r_a=tuple(r_c), r_b=tuple(centre))
    ab_ee, ab_ce = pair_forces(a, b, pair_ab, env, spec, full, h)
    cb_ee, cb_ce = pair_forces(c, b, pair_cb, env, spec, full, h)
    return cavity_report(a, c, axis, ab_ee, ab_ce, cb_ee, cb_ce)


def cavity_report(
    a: PolarizabilityModel,
    c: PolarizabilityModel,
    axis: Literal["normal", "parallel"],
    ab_ee: Vector3,
    ab_ce: Vector3,
    cb_ee: Vector3,
    cb_ce: Vector3,
) -> CavityReport:
    direction = axis_vector(axis)
    components = [float(direction @ f) for f in (ab_ee, ab_ce, cb_ee, cb_ce)]
    total = math.fsum(components)
    logger.info(
        "cavity_experiment: axis=%s handedness=(%d,%d) force_b=%.6e",
        axis,
        a.handedness,
        c.handedness,
        total,
    )
    return CavityReport(
        axis=axis,
        handedness_a=a.handedness,
        handedness_c=c.handedness,
        force_b=total,
        force_ab_ee=components[0],
        force_ab_ce=components[1],
        force_cb_ee=components[2],
        force_cb_ce=components[3],
    )
