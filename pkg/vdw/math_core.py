"""
Created on : Monday, 19th October 2026 9:40:55 am
Author: chiral-vdw contributors
-----
Small 3-vector / 3x3 tensor helpers, semi-infinite and periodic quadrature, and
central finite differences.
"""

import logging
from collections.abc import Callable
from dataclasses import dataclass
from functools import lru_cache
from typing import Any, Literal

import numpy as np
import numpy.typing as npt
from numpy.polynomial.legendre import leggauss

from vdw.exceptions import ConvergenceError, NonFiniteError
from vdw.schemas import QuadratureSpec

logger = logging.getLogger(__name__)

type Vector3 = npt.NDArray[Any]
type Tensor3 = npt.NDArray[Any]
type Integrand = Callable[[npt.NDArray[np.float64]], npt.ArrayLike]

LEVI_CIVITA = np.zeros((3, 3, 3))
for _i, _j, _k in ((0, 1, 2), (1, 2, 0), (2, 0, 1)):
    LEVI_CIVITA[_i, _j, _k] = 1.0
    LEVI_CIVITA[_i, _k, _j] = -1.0


def vector3(x: float, y: float, z: float) -> Vector3:
    return np.array([x, y, z], dtype=float)


def as_vector3(value: npt.ArrayLike) -> Vector3:
    v = np.asarray(value)
    if v.shape != (3,):
        raise ValueError(f"as_vector3: expected shape (3,), got {v.shape}")
    return v


def identity3() -> Tensor3:
    return np.eye(3)


def dyadic(u: npt.ArrayLike, v: npt.ArrayLike) -> Tensor3:
    """Outer product u v^T, no conjugation."""
    return np.outer(as_vector3(u), as_vector3(v))


def dot(u: npt.ArrayLike, v: npt.ArrayLike) -> complex | float:
    """Conjugate-symmetric product sum(conj(u_i) v_i)."""
    result = np.vdot(as_vector3(u), as_vector3(v))
    if np.isrealobj(result):
        return float(result)
    return complex(result)


def cross_matrix(e: npt.ArrayLike) -> Tensor3:
    """Matrix [e]_x with [e]_x v = e x v."""
    ex, ey, ez = as_vector3(e)
    return np.array([[0.0, -ez, ey], [ez, 0.0, -ex], [-ey, ex, 0.0]])


def rotate(tensor: Tensor3, rotation: npt.NDArray[np.float64]) -> Tensor3:
    """R^T T R for a local-frame tensor T and a global-to-local rotation R."""
    return rotation.T @ tensor @ rotation


@dataclass(frozen=True)
class QuadratureResult:
    value: Any
    error: Any
    levels: int
    nodes: int

    @property
    def max_error(self) -> float:
        return float(np.max(np.abs(self.error)))


@lru_cache(maxsize=64)
def _unit_gauss_legendre(n: int) -> tuple[npt.NDArray[np.float64], npt.NDArray[np.float64]]:
    """Gauss-Legendre nodes and weights on (0, 1)."""
    y, w = leggauss(n)
    t = 0.5 * (y + 1.0)
    t.flags.writeable = False
    weights = 0.5 * w
    weights.flags.writeable = False
    return t, weights


def _weighted_sum(weights: npt.NDArray[np.float64], values: npt.NDArray[Any]) -> Any:
    shaped = weights.reshape((-1,) + (1,) * (values.ndim - 1))
    return np.sum(shaped * values, axis=0)


def _check_finite(values: npt.NDArray[Any], nodes: npt.NDArray[Any], operation: str) -> None:
    bad = ~np.isfinite(values)
    if np.any(bad):
        index = np.argwhere(bad)[0]
        node = float(nodes[index[0]]) if nodes.ndim == 1 else nodes[tuple(index[:1])]
        logger.error("%s: non-finite integrand at node=%r", operation, node)
        raise NonFiniteError(
            f"{operation}: non-finite integrand at node={node!r}", operation, node
        )


def integrate_semi_infinite(
    f: Integrand,
    spec: QuadratureSpec,
    *,
    scale: float | None = None,
    envelope: Integrand | None = None,
    operation: str = "integrate_semi_infinite",
) -> QuadratureResult:
    """Integrate f over (0, inf) with Gauss-Legendre nodes mapped by x = s t / (1 - t).

    `f` takes the array of mapped nodes and returns values with the node axis first.
    Node counts double until max|I_2n - I_n| <= max(rtol * max|I|, rtol * int(envelope)),
    so integrands that vanish identically converge once the envelope is resolved.
    """
    s = spec.scale if spec.scale is not None else (scale if scale is not None else 1.0)
    if s <= 0 or not np.isfinite(s):
        raise ValueError(f"{operation}: mapping scale must be positive, got {s!r}")
    n = spec.nodes
    previous: Any = None
    error: Any = None
    for level in range(spec.max_levels + 2):
        t, w = _unit_gauss_legendre(n)
        x = s * t / (1.0 - t)
        weights = w * s / (1.0 - t) ** 2
        values = np.asarray(f(x))
        _check_finite(values, x, operation)
        estimate = _weighted_sum(weights, values)
        floor = 0.0
        if envelope is not None:
            bound = np.asarray(envelope(x))
            _check_finite(bound, x, operation)
            floor = spec.rtol * float(np.max(np.abs(_weighted_sum(weights, bound))))
        if previous is not None:
            error = np.abs(estimate - previous)
            threshold = max(spec.rtol * float(np.max(np.abs(estimate))), floor)
            if float(np.max(error)) <= threshold:
                logger.debug(
                    "%s: converged nodes=%d levels=%d error=%.3e",
                    operation,
                    n,
                    level,
                    float(np.max(error)),
                )
                return QuadratureResult(estimate, error, level, n)
        previous = estimate
        n *= 2
    worst = float(np.max(error)) if error is not None else float("inf")
    logger.error(
        "%s: no convergence after %d levels error=%.3e", operation, spec.max_levels, worst
    )
    raise ConvergenceError(
        f"{operation}: quadrature did not converge, error={worst:.3e}",
        operation,
        estimate=previous,
        error=worst,
        levels=spec.max_levels,
    )


def integrate_periodic(
    f: Callable[[npt.NDArray[np.float64]], npt.ArrayLike],
    n: int,
    operation: str = "integrate_periodic",
) -> Any:
    """Trapezoid rule over [0, 2 pi) with n equispaced nodes, node axis first."""
    if n < 4:
        raise ValueError(f"{operation}: need at least 4 nodes, got {n}")
    phi = 2.0 * np.pi * np.arange(n) / n
    values = np.asarray(f(phi))
    _check_finite(values, phi, operation)
    return (2.0 * np.pi / n) * np.sum(values, axis=0)


def gradient_central(
    f: Callable[[Vector3], float], at: npt.ArrayLike, h: float
) -> Vector3:
    """Central-difference gradient of a scalar field; error O(h^2)."""
    if h <= 0:
        raise ValueError(f"gradient_central: step must be positive, got {h!r}")
    point = as_vector3(at).astype(float)
    grad = np.empty(3)
    for j in range(3):
        step = np.zeros(3)
        step[j] = h
        plus, minus = f(point + step), f(point - step)
        if not (np.isfinite(plus) and np.isfinite(minus)):
            logger.error("gradient_central: non-finite value near point=%r", point)
            raise NonFiniteError(
                f"gradient_central: non-finite value near point={point.tolist()}",
                "gradient_central",
                point.tolist(),
            )
        grad[j] = (plus - minus) / (2.0 * h)
    return grad


def curl_central(
    field: Callable[[Vector3], Tensor3],
    at: npt.ArrayLike,
    h: float,
    side: Literal["left", "right"] = "left",
) -> Tensor3:
    """Central-difference curl of a tensor field.

    side="left":  (curl x T)_ij = eps_ikl d_k T_lj
    side="right": (T x curl)_ij = eps_jkl T_ik d_l
    """
    if h <= 0:
        raise ValueError(f"curl_central: step must be positive, got {h!r}")
    point = as_vector3(at).astype(float)
    derivative = []
    for k in range(3):
        step = np.zeros(3)
        step[k] = h
        derivative.append((field(point + step) - field(point - step)) / (2.0 * h))
    d = np.array(derivative)
    if not np.all(np.isfinite(d)):
        raise NonFiniteError(
            f"curl_central: non-finite value near point={point.tolist()}",
            "curl_central",
            point.tolist(),
        )
    if side == "left":
        return np.einsum("ikl,klj->ij", LEVI_CIVITA, d)
    return np.einsum("jkl,lik->ij", LEVI_CIVITA, d)
