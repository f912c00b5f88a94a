"""
Created on : Monday, 19th October 2026 11:12:40 am
Author: chiral-vdw contributors
-----
Green's tensors at imaginary frequency xi: the free-space part, the scattering part of
a perfect chiral plate, and their curls.

Conventions (hbar = c = eps0 = 1, r = r_B - r_A):
    left curl   (curl_A x T)_ij = eps_ikl d^A_k T_lj
    right curl  (T x curl_B)_ij = eps_jkl T_ik d^B_l
The plate tensor is an angular spectrum integral over in-plane wave vectors with phase
exp(-i k.(r_B - r_A)) and TE/TM mixing coefficients r_sp = -s, r_ps = +s.
"""

import logging
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Any

import numpy as np
import numpy.typing as npt

from vdw.exceptions import ImaginaryResidueError, SingularGeometryError
from vdw.math_core import (
    Tensor3,
    cross_matrix,
    integrate_periodic,
    integrate_semi_infinite,
    rotate,
)
from vdw.schemas import Environment, GeometryPair, PlateFrame, PlateSpec, QuadratureSpec

logger = logging.getLogger(__name__)

DEFAULT_QUADRATURE = QuadratureSpec()

# k.z_plus beyond which exp(-k z_plus) is below double precision
_DECAY_CUTOFF = 40.0
_RESIDUE_FACTOR = 1e3
_K_CHUNK = 256


def _check_xi(xi: float, operation: str) -> None:
    if not xi > 0 or not math.isfinite(xi):
        raise ValueError(f"{operation}: xi must be positive and finite, got {xi!r}")


def _separation(g: GeometryPair, operation: str) -> tuple[npt.NDArray[np.float64], float]:
    r = g.distance
    if r == 0.0:
        logger.error("%s: coincident positions r_a=%s", operation, g.r_a)
        raise SingularGeometryError(
            f"{operation}: molecules coincide at {g.r_a}", operation, g.r_a
        )
    return g.separation / r, r


def _plate_frame(g: GeometryPair, plate: PlateSpec, operation: str) -> PlateFrame:
    frame = g.local(plate)
    if frame.z_a <= 0.0 or frame.z_b <= 0.0:
        logger.error(
            "%s: positions not above plate z0=%s r_a=%s r_b=%s",
            operation,
            plate.z0,
            g.r_a,
            g.r_b,
        )
        raise SingularGeometryError(
            f"{operation}: both molecules must lie strictly above the plate at z0={plate.z0}",
            operation,
            (g.r_a, g.r_b),
        )
    return frame


def free_space_G(g: GeometryPair, xi: float) -> Tensor3:
    """exp(-x)/(4 pi xi^2 r^3) [(1+x+x^2) I - (3+3x+x^2) e_r e_r], x = xi r."""
    _check_xi(xi, "free_space_G")
    e, r = _separation(g, "free_space_G")
    x = xi * r
    a = 1.0 + x + x * x
    b = 3.0 + 3.0 * x + x * x
    return math.exp(-x) / (4.0 * math.pi * xi**2 * r**3) * (a * np.eye(3) - b * np.outer(e, e))


def curl_free_space_G(g: GeometryPair, xi: float) -> Tensor3:
    """Left curl of the free-space tensor: exp(-x)(1+x)/(4 pi r^2) [e_r]_x."""
    _check_xi(xi, "curl_free_space_G")
    e, r = _separation(g, "curl_free_space_G")
    x = xi * r
    return math.exp(-x) * (1.0 + x) / (4.0 * math.pi * r**2) * cross_matrix(e)


def free_space_double_curl(g: GeometryPair, xi: float) -> Tensor3:
    return xi**2 * free_space_G(g, xi)


def _phi_nodes(rho: float, z_plus: float, xi: float, spec: QuadratureSpec) -> int:
    k_max = _DECAY_CUTOFF / z_plus
    if xi * z_plus >= _DECAY_CUTOFF:
        k_max = math.sqrt(2.0 * xi * _DECAY_CUTOFF / z_plus)
    n = max(spec.phi_nodes, math.ceil(1.2 * rho * k_max) + 32)
    return 4 * math.ceil(n / 4)


def _plate_kernel(
    phi: npt.NDArray[np.float64],
    k: npt.NDArray[np.float64],
    x: float,
    y: float,
    z_plus: float,
    xi: float,
    chirality: int,
) -> npt.NDArray[np.complex128]:
    """Angular spectrum integrand for G, left curl, right curl and double curl, shape (nphi, nk, 4, 3, 3).

    Blocks are normalised by 1, r_plus, r_plus and 1/xi^2 to a common magnitude.
    """
    r_sp, r_ps = -float(chirality), float(chirality)
    r_plus = math.sqrt(x * x + y * y + z_plus * z_plus)
    cos, sin = np.cos(phi)[:, None], np.sin(phi)[:, None]
    kk = k[None, :]
    kappa = np.sqrt(xi * xi + kk * kk)
    weight = (
        (kk / kappa)
        * np.exp(-kappa * z_plus)
        * np.exp(-1j * kk * (x * cos + y * sin))
        / (8.0 * math.pi**2)
    )
    shape = np.broadcast_shapes(cos.shape, kk.shape)
    zero = np.zeros(shape)
    e_s = np.stack(np.broadcast_arrays(sin, -cos, zero), axis=-1).astype(complex)
    kc, ks = kappa * cos, kappa * sin
    ikz = np.broadcast_to(-1j * kk, shape)
    e_p_up = np.stack([-kc, -ks, ikz], axis=-1) / xi
    e_p_down = np.stack([kc, ks, ikz], axis=-1) / xi

    def outer(u: Any, v: Any) -> Any:
        return u[..., :, None] * v[..., None, :]

    ss, pp = outer(e_s, e_s), outer(e_p_up, e_p_down)
    ps, sp = outer(e_p_up, e_s), outer(e_s, e_p_down)
    blocks = np.stack(
        [
            r_sp * ps + r_ps * sp,
            r_plus * xi * (r_ps * pp - r_sp * ss),
            r_plus * xi * (r_sp * pp - r_ps * ss),
            -(r_sp * sp + r_ps * ps),
        ],
        axis=-3,
    )
    return weight[..., None, None, None] * blocks


@lru_cache(maxsize=4096)
def _plate_blocks_local(
    x: float, y: float, z_plus: float, xi: float, chirality: int, spec: QuadratureSpec
) -> npt.NDArray[np.float64]:
    rho = math.hypot(x, y)
    r_plus = math.sqrt(rho * rho + z_plus * z_plus)
    n_phi = _phi_nodes(rho, z_plus, xi, spec)
    k_scale = max(1.0 / z_plus, math.sqrt(xi / z_plus))

    def over_k(k: npt.NDArray[np.float64]) -> Any:
        chunks = np.array_split(k, math.ceil(k.size / _K_CHUNK))
        return np.concatenate(
            [
                integrate_periodic(
                    lambda phi: _plate_kernel(phi, chunk, x, y, z_plus, xi, chirality),
                    n_phi,
                    operation="plate_scattering_G",
                )
                for chunk in chunks
            ]
        )

    result = integrate_semi_infinite(
        over_k, spec, scale=k_scale, operation="plate_scattering_G"
    )
    value = np.asarray(result.value)
    magnitude = max(float(np.max(np.abs(value.real))), np.finfo(float).tiny)
    residue = float(np.max(np.abs(value.imag)))
    if residue > _RESIDUE_FACTOR * spec.rtol * magnitude:
        logger.error(
            "plate_scattering_G: imaginary residue=%.3e at xi=%s x=%s y=%s z_plus=%s",
            residue,
            xi,
            x,
            y,
            z_plus,
        )
        raise ImaginaryResidueError(
            f"plate_scattering_G: imaginary residue {residue:.3e} exceeds tolerance",
            "plate_scattering_G",
            (xi, x, y, z_plus),
            residue,
        )
    blocks = value.real.copy()
    blocks[1:3] /= r_plus
    blocks[3] *= xi * xi
    blocks.flags.writeable = False
    logger.debug(
        "plate_scattering_G: xi=%s rho=%s z_plus=%s nodes=%d phi_nodes=%d",
        xi,
        rho,
        z_plus,
        result.nodes,
        n_phi,
    )
    return blocks


def _plate_blocks(
    g: GeometryPair, plate: PlateSpec, xi: float, spec: QuadratureSpec, operation: str
) -> npt.NDArray[np.float64]:
    _check_xi(xi, operation)
    frame = _plate_frame(g, plate, operation)
    local = _plate_blocks_local(
        frame.x, frame.y, frame.z_plus, float(xi), plate.chirality, spec
    )
    return np.array([rotate(block, frame.rotation) for block in local])


def plate_scattering_G(
    g: GeometryPair, plate: PlateSpec, xi: float, spec: QuadratureSpec = DEFAULT_QUADRATURE
) -> Tensor3:
    """Scattering Green's tensor of a perfect chiral plate; the zz entry vanishes."""
    return _plate_blocks(g, plate, xi, spec, "plate_scattering_G")[0]


def curl_plate_G(
    g: GeometryPair, plate: PlateSpec, xi: float, spec: QuadratureSpec = DEFAULT_QUADRATURE
) -> Tensor3:
    return _plate_blocks(g, plate, xi, spec, "curl_plate_G")[1]


def curl_plate_G_right(
    g: GeometryPair, plate: PlateSpec, xi: float, spec: QuadratureSpec = DEFAULT_QUADRATURE
) -> Tensor3:
    return _plate_blocks(g, plate, xi, spec, "curl_plate_G_right")[2]


def double_curl_plate_G(
    g: GeometryPair, plate: PlateSpec, xi: float, spec: QuadratureSpec = DEFAULT_QUADRATURE
) -> Tensor3:
    return _plate_blocks(g, plate, xi, spec, "double_curl_plate_G")[3]


def plate_scattering_G_nr(g: GeometryPair, plate: PlateSpec, xi: float) -> Tensor3:
    """Closed-form plate tensor for xi r_plus << 1.

    With h = (2 r_plus + z_plus)/(r_plus + z_plus)^2 the in-plane block carries
    -2xy h, (x^2 - y^2) h, 2xy h; written this way it has no cancellation on axis.
    The antisymmetric part follows the exp(-i k.(r_B - r_A)) phase, so the local
    (x, z) entry is -y and (z, x) is +y.
    """
    _check_xi(xi, "plate_scattering_G_nr")
    frame = _plate_frame(g, plate, "plate_scattering_G_nr")
    x, y, z, r = frame.x, frame.y, frame.z_plus, frame.r_plus
    h = (2.0 * r + z) / (r + z) ** 2
    local = np.array(
        [
            [-2.0 * x * y * h, (x * x - y * y) * h, -y],
            [(x * x - y * y) * h, 2.0 * x * y * h, x],
            [y, -x, 0.0],
        ]
    )
    return rotate(plate.chirality / (4.0 * math.pi * xi * r**3) * local, frame.rotation)


def curl_plate_G_nr(g: GeometryPair, plate: PlateSpec, xi: float) -> Tensor3:
    """Closed-form left curl of the plate tensor for xi r_plus << 1."""
    _check_xi(xi, "curl_plate_G_nr")
    frame = _plate_frame(g, plate, "curl_plate_G_nr")
    x, y, z, r = frame.x, frame.y, frame.z_plus, frame.r_plus
    local = np.array(
        [
            [2 * x * x - y * y - z * z, 3 * x * y, 3 * x * z],
            [3 * x * y, -x * x + 2 * y * y - z * z, 3 * y * z],
            [-3 * x * z, -3 * y * z, x * x + y * y - 2 * z * z],
        ]
    )
    return rotate(plate.chirality / (4.0 * math.pi * xi * r**5) * local, frame.rotation)


@dataclass(frozen=True)
class DualGreens:
    """Green's tensor of a pair with its left, right and double curls."""

    g: Tensor3
    left: Tensor3
    right: Tensor3
    double: Tensor3

    def reverse(self) -> "DualGreens":
        """Blocks for the propagation B -> A, from reciprocity."""
        return DualGreens(
            g=self.g.T, left=-self.right.T, right=-self.left.T, double=self.double.T
        )

    def superscript(self, lam: int, lam_p: int, xi: float) -> Tensor3:
        """Propagator between a lam-type source and a lam'-type receiver."""
        match (lam, lam_p):
            case (0, 0):
                return xi * xi * self.g
            case (1, 0):
                return -xi * self.left
            case (0, 1):
                return -xi * self.right
            case (1, 1):
                return self.double
        raise ValueError(f"superscript: indices must be 0 or 1, got {lam}{lam_p}")


@lru_cache(maxsize=8192)
def dual_blocks(
    g: GeometryPair,
    env: Environment,
    xi: float,
    spec: QuadratureSpec = DEFAULT_QUADRATURE,
) -> DualGreens:
    """Free-space plus plate contributions of G and its curls."""
    _check_xi(xi, "dual_blocks")
    g0 = free_space_G(g, xi)
    c0 = curl_free_space_G(g, xi)
    blocks = np.array([g0, c0, -c0, xi * xi * g0])
    for plate in env.plates:
        blocks = blocks + _plate_blocks(g, plate, xi, spec, "dual_blocks")
    blocks.flags.writeable = False
    return DualGreens(g=blocks[0], left=blocks[1], right=blocks[2], double=blocks[3])


def total_G(
    g: GeometryPair, env: Environment, xi: float, spec: QuadratureSpec = DEFAULT_QUADRATURE
) -> Tensor3:
    return dual_blocks(g, env, xi, spec).g


def total_curl_G(
    g: GeometryPair, env: Environment, xi: float, spec: QuadratureSpec = DEFAULT_QUADRATURE
) -> Tensor3:
    return dual_blocks(g, env, xi, spec).left
