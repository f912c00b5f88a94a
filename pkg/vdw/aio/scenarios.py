"""
Created on : Tuesday, 20th October 2026 2:03:48 pm
Author: chiral-vdw contributors
-----
Async variants of the scan and cavity scenarios; point evaluations run in worker
threads and are gathered in grid order.
"""

import asyncio
import logging
from typing import Literal

import numpy as np
import numpy.typing as npt

from vdw.forces import axis_vector, cavity_report, check_cavity, pair_forces, scan_point
from vdw.greens import DEFAULT_QUADRATURE
from vdw.schemas import (
    CavityReport,
    Environment,
    GeometryPair,
    PolarizabilityModel,
    QuadratureSpec,
    ScanConfig,
    ScanResult,
)

logger = logging.getLogger(__name__)


async def ratio_field(cfg: ScanConfig) -> ScanResult:
    """Async ratio scan; at most `cfg.workers` points are evaluated at once."""
    geometries = cfg.geometries()
    limit = asyncio.Semaphore(cfg.workers)

    async def evaluate(g: GeometryPair):
        async with limit:
            return await asyncio.to_thread(scan_point, cfg, g)

    logger.info("ratio_field: points=%d full=%s workers=%d", len(geometries), cfg.full, cfg.workers)
    points = await asyncio.gather(*(evaluate(g) for g in geometries))
    result = ScanResult(points=list(points))
    if result.failures:
        logger.warning("ratio_field: %d of %d points failed", len(result.failures), len(points))
    return result


async def cavity_experiment(
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
    """Async cavity scenario; the A-B and C-B pair forces are computed concurrently."""
    if b.is_chiral:
        raise ValueError(f"cavity_experiment: middle molecule {b.name} must be achiral")
    centre = np.asarray(r_b, dtype=float)
    direction = axis_vector(axis)
    r_a, r_c = centre - offset * direction, centre + offset * direction
    check_cavity(env, r_a, centre, r_c, axis)
    pair_ab = GeometryPair(r_a=tuple(r_a), r_b=tuple(centre))
    pair_cb = GeometryPair(r_a=tuple(r_c), r_b=tuple(centre))
    (ab_ee, ab_ce), (cb_ee, cb_ce) = await asyncio.gather(
        asyncio.to_thread(pair_forces, a, b, pair_ab, env, spec, full, h),
        asyncio.to_thread(pair_forces, c, b, pair_cb, env, spec, full, h),
    )
    return cavity_report(a, c, axis, ab_ee, ab_ce, cb_ee, cb_ce)
