"""Scene description: small inclusions, background medium, frequency, directions.

Everything here is immutable after construction and safe to share across
workers without synchronization.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

__all__ = [
    "Inhomogeneity",
    "SceneConfig",
    "FrequencySpec",
    "DirectionSet",
    "make_directions",
    "validate_scene",
    "load_scene",
]

# relative tolerance tying omega and wavelength together
_FREQ_REL_TOL = 1e-12
# unit-norm tolerance for direction vectors
_UNIT_TOL = 1e-12


@dataclass(frozen=True)
class Inhomogeneity:
    """One small circular inclusion embedded in the background medium.

    Attributes
    ----------
    location : ndarray, shape (2,)
        Center of the inclusion (length units).
    radius : float
        Inclusion radius (length units), > 0.
    permittivity : float
        Relative dielectric permittivity of the inclusion, > 0.
    permeability : float
        Relative magnetic permeability of the inclusion, > 0.
    shape_area : float
        Area of the unit reference shape the inclusion is scaled from.
        Defaults to pi (unit disk).
    """

    location: np.ndarray
    radius: float
    permittivity: float
    permeability: float
    shape_area: float = math.pi

    def __post_init__(self) -> None:
        loc = np.asarray(self.location, dtype=float)
        if loc.shape != (2,):
            raise ValueError(f"location must be a 2-vector, got shape {loc.shape}")
        if not np.all(np.isfinite(loc)):
            raise ValueError("location must be finite")
        object.__setattr__(self, "location", loc)
        for name in ("radius", "permittivity", "permeability", "shape_area"):
            value = float(getattr(self, name))
            if not (math.isfinite(value) and value > 0):
                raise ValueError(f"{name} must be a positive finite real, got {value}")
            object.__setattr__(self, name, value)


@dataclass(frozen=True)
class SceneConfig:
    """Full physical configuration: targets plus homogeneous background."""

    inhomogeneities: tuple[Inhomogeneity, ...]
    background_permittivity: float = 1.0
    background_permeability: float = 1.0

    def __post_init__(self) -> None:
        inhs = tuple(self.inhomogeneities)
        if len(inhs) < 1:
            raise ValueError("scene needs at least one inhomogeneity")
        object.__setattr__(self, "inhomogeneities", inhs)
        for name in ("background_permittivity", "background_permeability"):
            value = float(getattr(self, name))
            if not (math.isfinite(value) and value > 0):
                raise ValueError(f"{name} must be a positive finite real, got {value}")
            object.__setattr__(self, name, value)
        locs = self.locations()
        for i in range(len(inhs)):
            for j in range(i + 1, len(inhs)):
                if np.linalg.norm(locs[i] - locs[j]) == 0.0:
                    raise ValueError(f"inhomogeneities {i} and {j} are coincident")

    @property
    def count(self) -> int:
        return len(self.inhomogeneities)

    def locations(self) -> np.ndarray:
        """Target centers stacked as an (M, 2) array, in scene order."""
        return np.array([inh.location for inh in self.inhomogeneities])


@dataclass(frozen=True)
class FrequencySpec:
    """Angular frequency and wavelength, kept consistent: omega * wavelength = 2*pi."""

    omega: float
    wavelength: float

    def __post_init__(self) -> None:
        omega = float(self.omega)
        wavelength = float(self.wavelength)
        if not (math.isfinite(omega) and omega > 0):
            raise ValueError(f"omega must be a positive finite real, got {omega}")
        if not (math.isfinite(wavelength) and wavelength > 0):
            raise ValueError(f"wavelength must be a positive finite real, got {wavelength}")
        if abs(omega * wavelength - 2 * math.pi) > _FREQ_REL_TOL * 2 * math.pi:
            raise ValueError(
                f"omega * wavelength = {omega * wavelength!r} is not 2*pi; "
                "construct via from_omega/from_wavelength"
            )
        object.__setattr__(self, "omega", omega)
        object.__setattr__(self, "wavelength", wavelength)

    @classmethod
    def from_omega(cls, omega: float) -> "FrequencySpec":
        omega = float(omega)
        if not (math.isfinite(omega) and omega > 0):
            raise ValueError(f"omega must be a positive finite real, got {omega}")
        return cls(omega=omega, wavelength=2 * math.pi / omega)

    @classmethod
    def from_wavelength(cls, wavelength: float) -> "FrequencySpec":
        wavelength = float(wavelength)
        if not (math.isfinite(wavelength) and wavelength > 0):
            raise ValueError(f"wavelength must be a positive finite real, got {wavelength}")
        return cls(omega=2 * math.pi / wavelength, wavelength=wavelength)


@dataclass(frozen=True)
class DirectionSet:
    """N unit vectors on the circle, used for incidence and (negated) observation."""

    vectors: np.ndarray  # (N, 2)

    def __post_init__(self) -> None:
        vec = np.asarray(self.vectors, dtype=float)
        if vec.ndim != 2 or vec.shape[1] != 2 or vec.shape[0] < 3:
            raise ValueError(f"need an (N >= 3, 2) array of directions, got shape {vec.shape}")
        norms = np.linalg.norm(vec, axis=1)
        if np.any(np.abs(norms - 1.0) > _UNIT_TOL):
            raise ValueError("all directions must have unit norm")
        # pairwise distinctness
        diff = vec[:, None, :] - vec[None, :, :]
        dist = np.linalg.norm(diff, axis=2)
        np.fill_diagonal(dist, np.inf)
        if dist.min() == 0.0:
            raise ValueError("directions must be pairwise distinct")
        object.__setattr__(self, "vectors", vec)

    @property
    def count(self) -> int:
        return self.vectors.shape[0]


def make_directions(n: int) -> DirectionSet:
    """Equispaced unit directions (cos(2*pi*l/n), sin(2*pi*l/n)) for l = 1..n.

    Parameters
    ----------
    n : int
        Number of directions, at least 3 so the circle is spanned.
    """
    n = int(n)
    if n < 3:
        raise ValueError(f"need at least 3 directions to span the circle, got {n}")
    l = np.arange(1, n + 1)
    angles = 2 * np.pi * l / n
    return DirectionSet(np.stack([np.cos(angles), np.sin(angles)], axis=1))


def validate_scene(
    scene: SceneConfig,
    freq: FrequencySpec,
    separation_margin: float = 7.5,
) -> list[str]:
    """Advisory checks on target separation and resolvability.

    Emits a warning string for every target pair whose scaled separation
    omega * |z_m - z_m'| falls at or below ``separation_margin`` and for
    every target whose diameter is not resolved by the wavelength
    (wavelength <= 2 * radius).  An empty list means all conditions hold.
    Never raises on a physically questionable scene; the checks are advisory.
    """
    warnings: list[str] = []
    locs = scene.locations()
    for i in range(scene.count):
        for j in range(i + 1, scene.count):
            scaled = freq.omega * float(np.linalg.norm(locs[i] - locs[j]))
            if scaled <= separation_margin:
                warnings.append(
                    f"targets {i} and {j} are poorly separated: "
                    f"omega*distance = {scaled:.6g} <= {separation_margin:.6g}"
                )
    for i, inh in enumerate(scene.inhomogeneities):
        if freq.wavelength <= 2 * inh.radius:
            warnings.append(
                f"target {i} is not resolved: wavelength {freq.wavelength:.6g} "
                f"<= 2*radius = {2 * inh.radius:.6g}"
            )
    return warnings


def load_scene(path) -> SceneConfig:
    """Read a scene from a TOML file.

    Expected layout::

        [background]
        permittivity = 1.0
        permeability = 1.0

        [[inhomogeneity]]
        location = [0.4, 0.0]
        radius = 0.05
        permittivity = 5.0
        permeability = 5.0
        # shape_area = 3.141592653589793   (optional)
    """
    with open(path, "rb") as fh:
        data = tomllib.load(fh)
    try:
        background = data["background"]
        eps0 = float(background["permittivity"])
        mu0 = float(background["permeability"])
        blocks = data["inhomogeneity"]
    except KeyError as exc:
        raise ValueError(f"scene file {path}: missing key {exc}") from exc
    if not isinstance(blocks, list) or not blocks:
        raise ValueError(f"scene file {path}: need at least one [[inhomogeneity]] block")
    inhs = []
    for k, block in enumerate(blocks):
        try:
            inhs.append(
                Inhomogeneity(
                    location=np.asarray(block["location"], dtype=float),
                    radius=float(block["radius"]),
                    permittivity=float(block["permittivity"]),
                    permeability=float(block["permeability"]),
                    shape_area=float(block.get("shape_area", math.pi)),
                )
            )
        except KeyError as exc:
            raise ValueError(
                f"scene file {path}: inhomogeneity #{k} missing key {exc}"
            ) from exc
    return SceneConfig(
        inhomogeneities=tuple(inhs),
        background_permittivity=eps0,
        background_permeability=mu0,
    )
