"""Pydantic schemas for molecules, environments, geometries, quadrature settings and results."""

from itertools import product
from typing import Literal, NamedTuple

import numpy as np
import numpy.typing as npt
from pydantic import BaseModel, ConfigDict, Field, computed_field, model_validator

type Triple = tuple[float, float, float]
type Sign = Literal[1, -1]


class QuadratureSpec(BaseModel):
    """Node counts, mapping scale and tolerance for the xi, k and phi integrals.

    `max_levels` counts the node doublings allowed after the first n / 2n comparison.
    """

    model_config = ConfigDict(frozen=True)

    nodes: int = Field(default=32, ge=2)
    phi_nodes: int = Field(default=64, ge=4)
    scale: float | None = Field(default=None, gt=0.0)
    rtol: float = Field(default=1e-10, gt=0.0)
    max_levels: int = Field(default=6, ge=0)


class Transition(BaseModel):
    """A dipole transition 0 -> k; `m_imag` holds m_0k / i in units of m/c."""

    model_config = ConfigDict(frozen=True)

    omega: float = Field(gt=0.0)
    d: Triple = (0.0, 0.0, 0.0)
    m_imag: Triple = (0.0, 0.0, 0.0)


class PolarizabilityModel(BaseModel):
    """Set of transitions of one molecule; handedness -1 negates every magnetic moment."""

    model_config = ConfigDict(frozen=True)

    name: str = "molecule"
    transitions: tuple[Transition, ...] = Field(min_length=1)
    handedness: Sign = 1
    anisotropic: bool = False

    def omegas(self) -> npt.NDArray[np.float64]:
        return np.array([t.omega for t in self.transitions], dtype=float)

    def electric_moments(self) -> npt.NDArray[np.float64]:
        return np.array([t.d for t in self.transitions], dtype=float)

    def magnetic_moments(self) -> npt.NDArray[np.float64]:
        """Real amplitudes m_0k / i with handedness applied, shape (n, 3)."""
        moments = np.array([t.m_imag for t in self.transitions], dtype=float)
        return self.handedness * moments

    @property
    def dominant_frequency(self) -> float:
        weights = np.sum(self.electric_moments() ** 2, axis=1) + np.sum(
            self.magnetic_moments() ** 2, axis=1
        )
        return float(self.omegas()[int(np.argmax(weights))])

    @property
    def is_chiral(self) -> bool:
        return bool(
            np.any(np.sum(self.electric_moments() * self.magnetic_moments(), axis=1))
        )


class PlateFrame(NamedTuple):
    """Pair coordinates in a plate's local frame (plate at z = 0, normal +z)."""

    x: float
    y: float
    z_a: float
    z_b: float
    rotation: npt.NDArray[np.float64]

    @property
    def z_plus(self) -> float:
        return self.z_a + self.z_b

    @property
    def rho(self) -> float:
        return float(np.hypot(self.x, self.y))

    @property
    def r_plus(self) -> float:
        return float(np.sqrt(self.x**2 + self.y**2 + self.z_plus**2))


class PlateSpec(BaseModel):
    """A perfect chiral plate in the plane z = z0 with outward normal `normal` * e_z."""

    model_config = ConfigDict(frozen=True)

    z0: float = 0.0
    chirality: Sign = 1
    normal: Sign = 1

    @property
    def r_sp(self) -> float:
        return -float(self.chirality)

    @property
    def r_ps(self) -> float:
        return float(self.chirality)

    def rotation(self) -> npt.NDArray[np.float64]:
        """Proper rotation taking global offsets into the local frame."""
        if self.normal == 1:
            return np.eye(3)
        return np.diag([1.0, -1.0, -1.0])

    def height(self, position: npt.ArrayLike) -> float:
        """Signed distance of `position` from the plate along its outward normal."""
        return float(self.normal * (np.asarray(position, dtype=float)[2] - self.z0))


class Environment(BaseModel):
    """Free space, one plate, or a two-plate cavity with inward-facing normals."""

    model_config = ConfigDict(frozen=True)

    plates: tuple[PlateSpec, ...] = ()

    @model_validator(mode="after")
    def _check_plates(self) -> "Environment":
        if len(self.plates) > 2:
            raise ValueError("environment: at most two plates are supported")
        if len(self.plates) == 2:
            lower, upper = sorted(self.plates, key=lambda p: p.z0)
            if lower.z0 == upper.z0:
                raise ValueError("environment: cavity plates must not coincide")
            if lower.normal != 1 or upper.normal != -1:
                raise ValueError("environment: cavity plate normals must face inward")
        return self

    @classmethod
    def free(cls) -> "Environment":
        return cls()

    @classmethod
    def single_plate(cls, chirality: Sign, z0: float = 0.0) -> "Environment":
        return cls(plates=(PlateSpec(z0=z0, chirality=chirality),))

    @classmethod
    def cavity(cls, separation: float, chirality: Sign, z0: float = 0.0) -> "Environment":
        """Two identical plates at z0 and z0 + separation."""
        if separation <= 0:
            raise ValueError("environment: cavity separation must be positive")
        return cls(
            plates=(
                PlateSpec(z0=z0, chirality=chirality, normal=1),
                PlateSpec(z0=z0 + separation, chirality=chirality, normal=-1),
            )
        )

    def flipped(self) -> "Environment":
        """Same geometry with every plate's chirality reversed."""
        return Environment(
            plates=tuple(
                p.model_copy(update={"chirality": -p.chirality}) for p in self.plates
            )
        )


class GeometryPair(BaseModel):
    """Positions of molecules A and B; r = r_B - r_A."""

    model_config = ConfigDict(frozen=True)

    r_a: Triple
    r_b: Triple

    @property
    def separation(self) -> npt.NDArray[np.float64]:
        return np.asarray(self.r_b, dtype=float) - np.asarray(self.r_a, dtype=float)

    @property
    def distance(self) -> float:
        return float(np.linalg.norm(self.separation))

    @property
    def e_r(self) -> npt.NDArray[np.float64]:
        return self.separation / self.distance

    def swapped(self) -> "GeometryPair":
        return GeometryPair(r_a=self.r_b, r_b=self.r_a)

    def with_b(self, r_b: npt.ArrayLike) -> "GeometryPair":
        b = np.asarray(r_b, dtype=float)
        return GeometryPair(r_a=self.r_a, r_b=(float(b[0]), float(b[1]), float(b[2])))

    def local(self, plate: PlateSpec) -> PlateFrame:
        rotation = plate.rotation()
        x, y, _ = rotation @ self.separation
        return PlateFrame(
            x=float(x),
            y=float(y),
            z_a=plate.height(self.r_a),
            z_b=plate.height(self.r_b),
            rotation=rotation,
        )


class PotentialBreakdown(BaseModel):
    """Energy components in units of hbar * omega_ref with quadrature error estimates.

    U_CE and U_CC collect both A <-> B orderings; U_CM holds the terms with three
    magnetic indices.
    """

    U_EE: float
    U_CE: float
    U_CC: float
    U_MM: float
    U_EM: float
    U_CM: float
    errors: dict[str, float] = Field(default_factory=dict)

    @computed_field  # type: ignore[prop-decorator]
    @property
    def total(self) -> float:
        return self.U_EE + self.U_CE + self.U_CC + self.U_MM + self.U_EM + self.U_CM


class ScanConfig(BaseModel):
    """Grid of molecule-B positions around A = (0, 0, z_a); x, y, z in units of z_a."""

    model_config = ConfigDict(frozen=True)

    z_a: float = Field(gt=0.0)
    x: tuple[float, ...] = (0.0,)
    y: tuple[float, ...]
    z: tuple[float, ...]
    molecule_a: PolarizabilityModel
    molecule_b: PolarizabilityModel
    environment: Environment = Environment.single_plate(chirality=-1)
    quadrature: QuadratureSpec = QuadratureSpec()
    full: bool = False
    step: float = Field(default=1e-4, gt=0.0)
    workers: int = Field(default=1, ge=1)

    @property
    def r_a(self) -> Triple:
        return (0.0, 0.0, self.z_a)

    def geometries(self) -> list[GeometryPair]:
        """Grid points in x-major, then y, then z order."""
        return [
            GeometryPair(
                r_a=self.r_a,
                r_b=(x * self.z_a, y * self.z_a, self.z_a + z * self.z_a),
            )
            for x, y, z in product(self.x, self.y, self.z)
        ]

    @model_validator(mode="after")
    def _check_grid(self) -> "ScanConfig":
        for g in self.geometries():
            if g.distance == 0.0:
                raise ValueError("scan: grid contains the position of molecule A")
            for plate in self.environment.plates:
                if plate.height(g.r_a) <= 0.0 or plate.height(g.r_b) <= 0.0:
                    raise ValueError(
                        f"scan: grid point {g.r_b} is not above plate at z0={plate.z0}"
                    )
        return self


class ScanPoint(BaseModel):
    """One sample of a ratio scan; `failure` is set when the point could not be evaluated."""

    x: float
    y: float
    z: float
    U_EE: float | None = None
    U_CE: float | None = None
    U_CC: float | None = None
    F_EE: Triple | None = None
    F_CE: Triple | None = None
    er_dot_F_EE: float | None = None
    er_dot_F_CE: float | None = None
    ratio_CE_EE: float | None = None
    err_estimate: float | None = None
    failure: str | None = None


class ScanResult(BaseModel):
    points: list[ScanPoint]

    @property
    def failures(self) -> list[ScanPoint]:
        return [p for p in self.points if p.failure is not None]


class CavityReport(BaseModel):
    """Force on the middle molecule B along the cavity axis, with its pair contributions."""

    axis: Literal["normal", "parallel"]
    handedness_a: Sign
    handedness_c: Sign
    force_b: float
    force_ab_ee: float
    force_ab_ce: float
    force_cb_ee: float
    force_cb_ce: float
    note: str = (
        "two-body pair potentials only; three-body contributions are not included"
    )
