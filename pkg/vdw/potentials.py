"""
Created on : Monday, 19th October 2026 1:47:22 pm
Author: chiral-vdw contributors
-----
Ground-state dispersion potentials as integrals over imaginary frequency.

Every energy is a sum of index quadruples

    U_{l1 l2 l3 l4} = -(1/2 pi) int dxi Tr[a_A^{l1 l2} T^{l2 l3}(A, B) a_B^{l3 l4} T^{l4 l1}(B, A)]

with l = 0 electric and l = 1 magnetic. The specialised potentials below are fixed
sums of quadruples written out in closed trace form.
"""

import logging
import math
from collections.abc import Callable
from itertools import product

import numpy as np
import numpy.typing as npt

from vdw.exceptions import SingularGeometryError
from vdw.greens import DEFAULT_QUADRATURE, DualGreens, dual_blocks
from vdw.math_core import QuadratureResult, integrate_semi_infinite
from vdw.polarizability import alpha_iso, chi_iso, polarizability_blocks
from vdw.schemas import (
    Environment,
    GeometryPair,
    PlateSpec,
    PolarizabilityModel,
    PotentialBreakdown,
    QuadratureSpec,
)

logger = logging.getLogger(__name__)

type Quadruple = tuple[int, int, int, int]
type TermFunction = Callable[[float], tuple[float, float]]

QUADRUPLES: tuple[Quadruple, ...] = tuple(product((0, 1), repeat=4))  # type: ignore[assignment]
CC_QUADRUPLES: tuple[Quadruple, ...] = ((0, 1, 0, 1), (0, 1, 1, 0), (1, 0, 0, 1), (1, 0, 1, 0))
EM_QUADRUPLES: tuple[Quadruple, ...] = ((0, 0, 1, 1), (1, 1, 0, 0))


def _component_of(quadruple: Quadruple) -> str:
    magnetic = sum(quadruple)
    match magnetic:
        case 0:
            return "U_EE"
        case 1:
            return "U_CE"
        case 2:
            return "U_CC" if quadruple in CC_QUADRUPLES else "U_EM"
        case 3:
            return "U_CM"
    return "U_MM"


def _norm(t: npt.NDArray[np.float64]) -> float:
    return float(np.linalg.norm(t))


def _xi_scale(a: PolarizabilityModel, b: PolarizabilityModel, r: float) -> float:
    """Frequency mapping scale: the lower of the molecular resonances and 1/r."""
    return min(a.dominant_frequency, b.dominant_frequency, 1.0 / r)


def _check_pair(g: GeometryPair, operation: str) -> float:
    r = g.distance
    if r == 0.0:
        raise SingularGeometryError(
            f"{operation}: molecules coincide at {g.r_a}", operation, g.r_a
        )
    return r


def _integrate_terms(
    term: Callable[[float], tuple[npt.ArrayLike, npt.ArrayLike]],
    scale: float,
    spec: QuadratureSpec,
    operation: str,
) -> QuadratureResult:
    """Integrate a per-frequency (value, envelope) pair over xi in (0, inf)."""
    memo: dict[float, tuple[npt.ArrayLike, npt.ArrayLike]] = {}

    def evaluate(xi: float) -> tuple[npt.ArrayLike, npt.ArrayLike]:
        if xi not in memo:
            memo[xi] = term(xi)
        return memo[xi]

    def values(xs: npt.NDArray[np.float64]) -> npt.NDArray[np.float64]:
        return np.array([evaluate(float(x))[0] for x in xs])

    def envelope(xs: npt.NDArray[np.float64]) -> npt.NDArray[np.float64]:
        return np.array([evaluate(float(x))[1] for x in xs])

    result = integrate_semi_infinite(
        values, spec, scale=scale, envelope=envelope, operation=operation
    )
    logger.debug(
        "%s: value=%r error=%.3e nodes=%d", operation, result.value, result.max_error, result.nodes
    )
    return result


def _forward_reverse(
    g: GeometryPair, env: Environment, xi: float, spec: QuadratureSpec
) -> tuple[DualGreens, DualGreens]:
    forward = dual_blocks(g, env, xi, spec)
    return forward, forward.reverse()


def _ee_term(
    a: PolarizabilityModel,
    b: PolarizabilityModel,
    g: GeometryPair,
    env: Environment,
    spec: QuadratureSpec,
) -> TermFunction:
    def term(xi: float) -> tuple[float, float]:
        forward, reverse = _forward_reverse(g, env, xi, spec)
        alpha_a = polarizability_blocks(a, xi)[(0, 0)]
        alpha_b = polarizability_blocks(b, xi)[(0, 0)]
        trace = np.trace(alpha_a @ forward.g @ alpha_b @ reverse.g)
        bound = _norm(alpha_a) * _norm(alpha_b) * _norm(forward.g) ** 2
        return -(xi**4) * float(trace) / (2.0 * math.pi), xi**4 * bound / (2.0 * math.pi)

    return term


def _ce_term(
    a: PolarizabilityModel,
    b: PolarizabilityModel,
    g: GeometryPair,
    env: Environment,
    spec: QuadratureSpec,
) -> TermFunction:
    def term(xi: float) -> tuple[float, float]:
        forward, reverse = _forward_reverse(g, env, xi, spec)
        chi_a = polarizability_blocks(a, xi)[(0, 1)]
        alpha_b = polarizability_blocks(b, xi)[(0, 0)]
        trace = np.trace(chi_a @ forward.left @ alpha_b @ reverse.g)
        bound = _norm(chi_a) * _norm(forward.left) * _norm(alpha_b) * _norm(forward.g)
        return xi**3 * float(trace) / math.pi, xi**3 * bound / math.pi

    return term


def _cc_term(
    a: PolarizabilityModel,
    b: PolarizabilityModel,
    g: GeometryPair,
    env: Environment,
    spec: QuadratureSpec,
) -> TermFunction:
    def term(xi: float) -> tuple[float, float]:
        forward, reverse = _forward_reverse(g, env, xi, spec)
        chi_a = polarizability_blocks(a, xi)[(0, 1)]
        chi_b = polarizability_blocks(b, xi)[(0, 1)]
        trace = np.trace(chi_a @ forward.double @ (-chi_b.T) @ reverse.g) + np.trace(
            chi_a @ forward.left @ chi_b @ reverse.left
        )
        bound = _norm(chi_a) * _norm(chi_b) * (
            _norm(forward.double) * _norm(forward.g) + _norm(forward.left) * _norm(reverse.left)
        )
        return -(xi**2) * float(trace) / math.pi, xi**2 * bound / math.pi

    return term


def _quadruple_terms(
    a: PolarizabilityModel,
    b: PolarizabilityModel,
    g: GeometryPair,
    env: Environment,
    spec: QuadratureSpec,
    quadruples: tuple[Quadruple, ...],
) -> Callable[[float], tuple[npt.NDArray[np.float64], npt.NDArray[np.float64]]]:
    def term(xi: float) -> tuple[npt.NDArray[np.float64], npt.NDArray[np.float64]]:
        forward, reverse = _forward_reverse(g, env, xi, spec)
        blocks_a = polarizability_blocks(a, xi)
        blocks_b = polarizability_blocks(b, xi)
        values, bounds = [], []
        for l1, l2, l3, l4 in quadruples:
            factors = (
                blocks_a[(l1, l2)],
                forward.superscript(l2, l3, xi),
                blocks_b[(l3, l4)],
                reverse.superscript(l4, l1, xi),
            )
            values.append(-float(np.trace(np.linalg.multi_dot(factors))) / (2.0 * math.pi))
            bounds.append(math.prod(_norm(f) for f in factors) / (2.0 * math.pi))
        return np.array(values), np.array(bounds)

    return term


def _sum_of_quadruples(
    a: PolarizabilityModel,
    b: PolarizabilityModel,
    g: GeometryPair,
    env: Environment,
    spec: QuadratureSpec,
    quadruples: tuple[Quadruple, ...],
    operation: str,
) -> QuadratureResult:
    r = _check_pair(g, operation)
    terms = _quadruple_terms(a, b, g, env, spec, quadruples)

    def summed(xi: float) -> tuple[float, float]:
        values, bounds = terms(xi)
        return float(np.sum(values)), float(np.sum(bounds))

    return _integrate_terms(summed, _xi_scale(a, b, r), spec, operation)


def potential_EE_result(
    a: PolarizabilityModel,
    b: PolarizabilityModel,
    g: GeometryPair,
    env: Environment,
    spec: QuadratureSpec = DEFAULT_QUADRATURE,
) -> QuadratureResult:
    r = _check_pair(g, "potential_EE")
    return _integrate_terms(_ee_term(a, b, g, env, spec), _xi_scale(a, b, r), spec, "potential_EE")


def potential_EE(
    a: PolarizabilityModel,
    b: PolarizabilityModel,
    g: GeometryPair,
    env: Environment,
    spec: QuadratureSpec = DEFAULT_QUADRATURE,
) -> float:
    """-(1/2 pi) int dxi xi^4 Tr[alpha_A G(A,B) alpha_B G(B,A)]."""
    return float(potential_EE_result(a, b, g, env, spec).value)


def potential_CE_result(
    a: PolarizabilityModel,
    b: PolarizabilityModel,
    g: GeometryPair,
    env: Environment,
    spec: QuadratureSpec = DEFAULT_QUADRATURE,
) -> QuadratureResult:
    r = _check_pair(g, "potential_CE")
    return _integrate_terms(_ce_term(a, b, g, env, spec), _xi_scale(a, b, r), spec, "potential_CE")


def potential_CE(
    a: PolarizabilityModel,
    b: PolarizabilityModel,
    g: GeometryPair,
    env: Environment,
    spec: QuadratureSpec = DEFAULT_QUADRATURE,
) -> float:
    """(1/pi) int dxi xi^3 Tr[chi_A (curl_A x G)(A,B) alpha_B G(B,A)], chiral A on electric B.

    Equal to the quadruples 0100 + 1000.
    """
    return float(potential_CE_result(a, b, g, env, spec).value)


def potential_CC_result(
    a: PolarizabilityModel,
    b: PolarizabilityModel,
    g: GeometryPair,
    env: Environment,
    spec: QuadratureSpec = DEFAULT_QUADRATURE,
) -> QuadratureResult:
    return _sum_of_quadruples(a, b, g, env, spec, CC_QUADRUPLES, "potential_CC")


def potential_CC(
    a: PolarizabilityModel,
    b: PolarizabilityModel,
    g: GeometryPair,
    env: Environment,
    spec: QuadratureSpec = DEFAULT_QUADRATURE,
) -> float:
    """Chiral-chiral energy, the quadruples 0101 + 0110 + 1001 + 1010.

    See `potential_CC_direct` for the same energy in two-term trace form.
    """
    return float(potential_CC_result(a, b, g, env, spec).value)


def potential_CC_direct_result(
    a: PolarizabilityModel,
    b: PolarizabilityModel,
    g: GeometryPair,
    env: Environment,
    spec: QuadratureSpec = DEFAULT_QUADRATURE,
) -> QuadratureResult:
    r = _check_pair(g, "potential_CC_direct")
    term = _cc_term(a, b, g, env, spec)
    return _integrate_terms(term, _xi_scale(a, b, r), spec, "potential_CC_direct")


def potential_CC_direct(
    a: PolarizabilityModel,
    b: PolarizabilityModel,
    g: GeometryPair,
    env: Environment,
    spec: QuadratureSpec = DEFAULT_QUADRATURE,
) -> float:
    """-(1/pi) int dxi xi^2 Tr[chi_A (curl x G x curl) chi_B^me G(B,A)
    + chi_A (curl_A x G) chi_B (curl_B x G)(B,A)] with chi_B^me = -chi_B^T.

    0110 and 1001 are transposes of each other and give the first trace, 0101 and 1010 the second.
    """
    return float(potential_CC_direct_result(a, b, g, env, spec).value)


def potential_MM(
    a: PolarizabilityModel,
    b: PolarizabilityModel,
    g: GeometryPair,
    env: Environment,
    spec: QuadratureSpec = DEFAULT_QUADRATURE,
) -> float:
    return float(_sum_of_quadruples(a, b, g, env, spec, ((1, 1, 1, 1),), "potential_MM").value)


def potential_EM(
    a: PolarizabilityModel,
    b: PolarizabilityModel,
    g: GeometryPair,
    env: Environment,
    spec: QuadratureSpec = DEFAULT_QUADRATURE,
) -> float:
    """Electric-magnetic terms 0011 + 1100."""
    return float(_sum_of_quadruples(a, b, g, env, spec, EM_QUADRUPLES, "potential_EM").value)


def potential_CM(
    a: PolarizabilityModel,
    b: PolarizabilityModel,
    g: GeometryPair,
    env: Environment,
    spec: QuadratureSpec = DEFAULT_QUADRATURE,
) -> float:
    """Terms with three magnetic indices."""
    quadruples = tuple(q for q in QUADRUPLES if sum(q) == 3)
    return float(_sum_of_quadruples(a, b, g, env, spec, quadruples, "potential_CM").value)


def potential_general(
    a: PolarizabilityModel,
    b: PolarizabilityModel,
    quadruple: Quadruple,
    g: GeometryPair,
    env: Environment,
    spec: QuadratureSpec = DEFAULT_QUADRATURE,
) -> float:
    """Single index quadruple U_{l1 l2 l3 l4}."""
    if len(quadruple) != 4 or any(index not in (0, 1) for index in quadruple):
        raise ValueError(f"potential_general: invalid index quadruple {quadruple!r}")
    quadruple = tuple(int(index) for index in quadruple)  # type: ignore[assignment]
    return float(
        _sum_of_quadruples(a, b, g, env, spec, (quadruple,), "potential_general").value
    )


def potential_breakdown(
    a: PolarizabilityModel,
    b: PolarizabilityModel,
    g: GeometryPair,
    env: Environment,
    spec: QuadratureSpec = DEFAULT_QUADRATURE,
) -> PotentialBreakdown:
    """All 16 quadruples from one Green's tensor sweep, grouped by magnetic index count."""
    r = _check_pair(g, "potential_breakdown")
    result = _integrate_terms(
        _quadruple_terms(a, b, g, env, spec, QUADRUPLES),
        _xi_scale(a, b, r),
        spec,
        "potential_breakdown",
    )
    totals: dict[str, float] = {}
    errors: dict[str, float] = {}
    for quadruple, value, error in zip(QUADRUPLES, result.value, result.error, strict=True):
        key = _component_of(quadruple)
        totals[key] = totals.get(key, 0.0) + float(value)
        errors[key] = errors.get(key, 0.0) + float(error)
    logger.info("potential_breakdown: r=%s total=%.6e", r, sum(totals.values()))
    return PotentialBreakdown(**totals, errors=errors)


def _frequency_integral(
    integrand: Callable[[npt.NDArray[np.float64]], npt.NDArray[np.float64]],
    scale: float,
    spec: QuadratureSpec,
    operation: str,
) -> QuadratureResult:
    return integrate_semi_infinite(
        integrand,
        spec,
        scale=scale,
        envelope=lambda xs: np.abs(integrand(xs)),
        operation=operation,
    )


def chi_alpha_integral(
    a: PolarizabilityModel, b: PolarizabilityModel, spec: QuadratureSpec = DEFAULT_QUADRATURE
) -> QuadratureResult:
    """int dxi chi_A(i xi) alpha_B(i xi) for isotropic polarizabilities."""
    return _frequency_integral(
        lambda xs: chi_iso(a, xs) * alpha_iso(b, xs),
        min(a.dominant_frequency, b.dominant_frequency),
        spec,
        "chi_alpha_integral",
    )


def alpha_alpha_integral(
    a: PolarizabilityModel, b: PolarizabilityModel, spec: QuadratureSpec = DEFAULT_QUADRATURE
) -> QuadratureResult:
    return _frequency_integral(
        lambda xs: alpha_iso(a, xs) * alpha_iso(b, xs),
        min(a.dominant_frequency, b.dominant_frequency),
        spec,
        "alpha_alpha_integral",
    )


def potential_EE_nr_free(
    a: PolarizabilityModel,
    b: PolarizabilityModel,
    r: float,
    spec: QuadratureSpec = DEFAULT_QUADRATURE,
) -> float:
    """London limit -3/(16 pi^3 r^6) int dxi alpha_A alpha_B."""
    if r <= 0:
        raise SingularGeometryError(f"potential_EE_nr_free: r must be positive, got {r}", "potential_EE_nr_free", r)
    return -3.0 / (16.0 * math.pi**3 * r**6) * float(alpha_alpha_integral(a, b, spec).value)


def nonretarded_ce_factor(x: float, y: float, z_plus: float, r: float) -> float:
    """Geometric factor [r^2 (2 r_+^2 - 3 rho^2) - 3 r_+^2 rho^2] / (r^5 r_+^5)."""
    if r <= 0 or z_plus <= 0:
        raise SingularGeometryError(
            f"nonretarded_ce_factor: need r > 0 and z_plus > 0, got r={r} z_plus={z_plus}",
            "nonretarded_ce_factor",
            (x, y, z_plus),
        )
    rho2 = x * x + y * y
    r_plus2 = rho2 + z_plus * z_plus
    numerator = r * r * (2.0 * r_plus2 - 3.0 * rho2) - 3.0 * r_plus2 * rho2
    return numerator / (r**5 * r_plus2**2.5)


def potential_CE_nr_plate(
    a: PolarizabilityModel,
    b: PolarizabilityModel,
    g: GeometryPair,
    plate: PlateSpec,
    spec: QuadratureSpec = DEFAULT_QUADRATURE,
) -> float:
    """Non-retarded chiral-electric energy near one plate, s/(16 pi^3) int chi_A alpha_B * factor.

    s = +1 for a positive plate; the caller is responsible for ensuring xi r_+ << 1 over the
    relevant frequencies.
    """
    r = _check_pair(g, "potential_CE_nr_plate")
    frame = g.local(plate)
    if frame.z_a <= 0.0 or frame.z_b <= 0.0:
        raise SingularGeometryError(
            "potential_CE_nr_plate: both molecules must lie above the plate",
            "potential_CE_nr_plate",
            (g.r_a, g.r_b),
        )
    factor = nonretarded_ce_factor(frame.x, frame.y, frame.z_plus, r)
    integral = float(chi_alpha_integral(a, b, spec).value)
    return plate.chirality * integral * factor / (16.0 * math.pi**3)


def loop_function(x: npt.ArrayLike) -> npt.NDArray[np.float64]:
    """l(x) = exp(-2x)(3 + 6x + 4x^2)."""
    v = np.asarray(x, dtype=float)
    return np.exp(-2.0 * v) * (3.0 + 6.0 * v + 4.0 * v * v)


def potential_CC_free_iso_result(
    a: PolarizabilityModel,
    b: PolarizabilityModel,
    r: float,
    spec: QuadratureSpec = DEFAULT_QUADRATURE,
) -> QuadratureResult:
    if r <= 0:
        raise SingularGeometryError(
            f"potential_CC_free_iso: r must be positive, got {r}", "potential_CC_free_iso", r
        )

    def integrand(xs: npt.NDArray[np.float64]) -> npt.NDArray[np.float64]:
        return chi_iso(a, xs) * chi_iso(b, xs) * loop_function(xs * r)

    scale = min(a.dominant_frequency, b.dominant_frequency, 1.0 / r)
    result = _frequency_integral(integrand, scale, spec, "potential_CC_free_iso")
    prefactor = 1.0 / (8.0 * math.pi**3 * r**6)
    return QuadratureResult(
        result.value * prefactor, result.error * prefactor, result.levels, result.nodes
    )


def potential_CC_free_iso(
    a: PolarizabilityModel,
    b: PolarizabilityModel,
    r: float,
    spec: QuadratureSpec = DEFAULT_QUADRATURE,
) -> float:
    """Free-space isotropic chiral-chiral energy 1/(8 pi^3 r^6) int chi_A chi_B l(xi r)."""
    return float(potential_CC_free_iso_result(a, b, r, spec).value)


def closed_form_error(
    a: PolarizabilityModel,
    b: PolarizabilityModel,
    g: GeometryPair,
    env: Environment,
    spec: QuadratureSpec = DEFAULT_QUADRATURE,
) -> float:
    """Quadrature error of U_EE + U_CE + U_CC in their non-retarded closed forms, as an energy."""
    r = _check_pair(g, "closed_form_error")
    error = 3.0 / (16.0 * math.pi**3 * r**6) * alpha_alpha_integral(a, b, spec).max_error
    frames = [g.local(plate) for plate in env.plates]
    factors = sum(abs(nonretarded_ce_factor(f.x, f.y, f.z_plus, r)) for f in frames)
    if factors:
        error += factors * chi_alpha_integral(a, b, spec).max_error / (16.0 * math.pi**3)
    return error + potential_CC_free_iso_result(a, b, r, spec).max_error
