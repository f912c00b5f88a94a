"""
Created on : Monday, 19th October 2026 10:31:07 am
Author: chiral-vdw contributors
-----
Electric, magnetic and chiral polarizabilities at imaginary frequency, plus molecule
file loading.
"""

import logging
import tomllib
from functools import lru_cache
from importlib import resources
from pathlib import Path
from typing import Any

import numpy as np
import numpy.typing as npt
from pydantic import ValidationError

from vdw.exceptions import ConfigError, ImaginaryResidueError
from vdw.math_core import Tensor3
from vdw.schemas import PolarizabilityModel, Transition
from vdw.units import (
    DEFAULT_OMEGA_REF,
    UnitSystem,
    electric_dipole_to_internal,
    frequency_to_internal,
    magnetic_dipole_to_internal,
)

logger = logging.getLogger(__name__)

type Frequency = float | npt.NDArray[np.float64]

PRESET_PREFIX = "preset:"


def _check_xi(xi: Frequency, operation: str) -> npt.NDArray[np.float64]:
    values = np.asarray(xi, dtype=float)
    if np.any(values < 0) or not np.all(np.isfinite(values)):
        raise ValueError(f"{operation}: xi must be finite and non-negative, got {xi!r}")
    return values


def rotatory_strength(transition: Transition, handedness: int = 1) -> float:
    """R = Im(d_0k . m_k0) with m_k0 = conj(m_0k) = -i * m_imag."""
    d = np.asarray(transition.d, dtype=float)
    m_k0 = -1j * handedness * np.asarray(transition.m_imag, dtype=float)
    return float(np.imag(np.dot(d, m_k0)))


def rotatory_strengths(model: PolarizabilityModel) -> npt.NDArray[np.float64]:
    return np.array(
        [rotatory_strength(t, model.handedness) for t in model.transitions]
    )


def _lorentz(model: PolarizabilityModel, xi: npt.NDArray[np.float64]) -> tuple[Any, Any]:
    """Per-transition factors omega/(omega^2+xi^2) and xi/(omega^2+xi^2), shape (..., n)."""
    omega = model.omegas()
    denominator = omega**2 + xi[..., None] ** 2
    return omega / denominator, xi[..., None] / denominator


def alpha_iso(model: PolarizabilityModel, xi: Frequency) -> Any:
    """(2/3) sum |d|^2 omega / (omega^2 + xi^2)."""
    x = _check_xi(xi, "alpha_iso")
    even, _ = _lorentz(model, x)
    strength = np.sum(model.electric_moments() ** 2, axis=1)
    return (2.0 / 3.0) * np.sum(strength * even, axis=-1)


def beta_iso(model: PolarizabilityModel, xi: Frequency) -> Any:
    """(2/3) sum |m|^2 omega / (omega^2 + xi^2), m in units of m/c."""
    x = _check_xi(xi, "beta_iso")
    even, _ = _lorentz(model, x)
    strength = np.sum(model.magnetic_moments() ** 2, axis=1)
    return (2.0 / 3.0) * np.sum(strength * even, axis=-1)


def chi_iso(model: PolarizabilityModel, xi: Frequency) -> Any:
    """-(2/3) sum R xi / (omega^2 + xi^2); zero at xi = 0 and for achiral models."""
    x = _check_xi(xi, "chi_iso")
    _, odd = _lorentz(model, x)
    return -(2.0 / 3.0) * np.sum(rotatory_strengths(model) * odd, axis=-1)


def _moments(model: PolarizabilityModel, kind: int) -> tuple[Any, Any]:
    """Transition moments (mu_0k, mu_k0) for kind 0 (electric) or 1 (magnetic)."""
    if kind == 0:
        d = model.electric_moments().astype(complex)
        return d, d
    m = model.magnetic_moments()
    return 1j * m, -1j * m


def general_polarizability(
    model: PolarizabilityModel, lam: int, lam_p: int, xi: float
) -> Tensor3:
    """alpha^{lam lam'}(i xi) = sum mu^lam_k0 mu^lam'_0k/(omega+i xi) + mu^lam_0k mu^lam'_k0/(omega-i xi).

    Isotropic models return (1/3) Tr(alpha) * I.
    """
    if lam not in (0, 1) or lam_p not in (0, 1):
        raise ValueError(f"general_polarizability: indices must be 0 or 1, got {lam}{lam_p}")
    _check_xi(xi, "general_polarizability")
    omega = model.omegas().astype(complex)
    left_0k, left_k0 = _moments(model, lam)
    right_0k, right_k0 = _moments(model, lam_p)
    tensor = np.einsum(
        "k,ki,kj->ij", 1.0 / (omega + 1j * xi), left_k0, right_0k
    ) + np.einsum("k,ki,kj->ij", 1.0 / (omega - 1j * xi), left_0k, right_k0)
    scale = max(float(np.max(np.abs(tensor))), np.finfo(float).tiny)
    residue = float(np.max(np.abs(tensor.imag)))
    if residue > 1e-12 * scale:
        raise ImaginaryResidueError(
            f"general_polarizability: imaginary residue {residue:.3e} at xi={xi}",
            "general_polarizability",
            xi,
            residue,
        )
    result = tensor.real
    if not model.anisotropic:
        result = np.trace(result) / 3.0 * np.eye(3)
    return result


@lru_cache(maxsize=4096)
def polarizability_blocks(model: PolarizabilityModel, xi: float) -> dict[tuple[int, int], Tensor3]:
    """All four alpha^{lam lam'} blocks at one frequency."""
    blocks = {}
    for lam in (0, 1):
        for lam_p in (0, 1):
            block = general_polarizability(model, lam, lam_p, xi)
            block.flags.writeable = False
            blocks[(lam, lam_p)] = block
    return blocks


def alpha_tensor(model: PolarizabilityModel, xi: float) -> Tensor3:
    return polarizability_blocks(model, xi)[(0, 0)]


def chi_tensor(model: PolarizabilityModel, xi: float) -> Tensor3:
    """Electric-magnetic block alpha^{01}."""
    return polarizability_blocks(model, xi)[(0, 1)]


def enantiomer(model: PolarizabilityModel) -> PolarizabilityModel:
    """Mirror-image molecule: chi changes sign, alpha and beta are unchanged."""
    return model.model_copy(update={"handedness": -model.handedness})


def scaled_magnetic(model: PolarizabilityModel, factor: float) -> PolarizabilityModel:
    """Scale every magnetic moment by `factor`; a negative factor flips handedness."""
    if not np.isfinite(factor):
        raise ValueError(f"scaled_magnetic: factor must be finite, got {factor!r}")
    magnitude = abs(factor)
    transitions = tuple(
        t.model_copy(update={"m_imag": tuple(magnitude * c for c in t.m_imag)})
        for t in model.transitions
    )
    handedness = model.handedness if factor >= 0 else -model.handedness
    logger.debug("scaled_magnetic: model=%s factor=%.6g", model.name, factor)
    return model.model_copy(update={"transitions": transitions, "handedness": handedness})


def _read_molecule_document(source: str | Path) -> tuple[dict[str, Any], str]:
    text = str(source)
    if text.startswith(PRESET_PREFIX):
        name = text.removeprefix(PRESET_PREFIX)
        resource = resources.files("vdw.presets").joinpath(f"{name}.toml")
        if not resource.is_file():
            raise ConfigError(f"load_molecule: unknown preset {name!r}", key="molecule")
        return tomllib.loads(resource.read_text(encoding="utf-8")), name
    path = Path(source)
    with path.open("rb") as handle:
        return tomllib.load(handle), path.stem


def load_molecule(
    source: str | Path, omega_ref: float = DEFAULT_OMEGA_REF
) -> PolarizabilityModel:
    """Read a molecule TOML file or a `preset:<name>` and convert to internal units.

    Missing files raise OSError; malformed content raises ConfigError.
    """
    try:
        document, default_name = _read_molecule_document(source)
    except tomllib.TOMLDecodeError as e:
        logger.error("load_molecule: cannot parse %s: %s", source, e, exc_info=True)
        raise ConfigError(f"load_molecule: cannot parse {source}: {e}", key="molecule") from e
    try:
        units = UnitSystem(document.get("units", "internal"))
    except ValueError as e:
        raise ConfigError(
            f"load_molecule: unknown units {document.get('units')!r} in {source}",
            key="units",
        ) from e
    raw = document.get("transition", [])
    if not raw:
        raise ConfigError(f"load_molecule: no [[transition]] entries in {source}", key="transition")
    try:
        transitions = tuple(
            Transition(
                omega=frequency_to_internal(float(t["omega"]), units, omega_ref),
                d=tuple(
                    electric_dipole_to_internal(float(c), units, omega_ref)
                    for c in t.get("d", (0.0, 0.0, 0.0))
                ),
                m_imag=tuple(
                    magnetic_dipole_to_internal(float(c), units, omega_ref)
                    for c in t.get("m_imag", (0.0, 0.0, 0.0))
                ),
            )
            for t in raw
        )
        model = PolarizabilityModel(
            name=document.get("name", default_name),
            transitions=transitions,
            handedness=document.get("handedness", 1),
            anisotropic=document.get("anisotropic", False),
        )
    except (KeyError, TypeError, ValidationError) as e:
        raise ConfigError(f"load_molecule: invalid molecule in {source}: {e}", key="transition") from e
    logger.info(
        "load_molecule: loaded %s with %d transitions units=%s",
        model.name,
        len(model.transitions),
        units,
    )
    return model
