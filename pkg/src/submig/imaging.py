"""Signal-space migration imaging on a rectangular grid.

The imaging function projects a unit test vector, steered to a trial point at
a test frequency eta, onto the selected singular-vector pairs and takes the
magnitude of the bilinear sum.  With a matched test frequency the map peaks
near the true target locations; with a mismatched one the peaks relocate
radially (see :mod:`submig.analytic`).
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from pathlib import Path
from typing import NamedTuple

import numpy as np

from .scene import DirectionSet
from .spectral import SpectralFactors

__all__ = [
    "ImagingGridSpec",
    "ImageMap",
    "Peak",
    "test_vector",
    "imaging_value",
    "image_grid",
    "extract_peaks",
    "write_image",
    "read_image",
    "write_peaks",
]

DEFAULT_THRESHOLD_FRAC = 0.5
DEFAULT_MIN_SEPARATION = 0.1


@dataclass(frozen=True)
class ImagingGridSpec:
    """Rectangular search region sampled on an inclusive uniform grid."""

    x_min: float
    x_max: float
    y_min: float
    y_max: float
    nx: int
    ny: int

    def __post_init__(self) -> None:
        if not (self.x_min < self.x_max and self.y_min < self.y_max):
            raise ValueError("grid bounds must satisfy x_min < x_max and y_min < y_max")
        if int(self.nx) < 2 or int(self.ny) < 2:
            raise ValueError("grid needs at least 2 nodes per axis")
        for name in ("x_min", "x_max", "y_min", "y_max"):
            object.__setattr__(self, name, float(getattr(self, name)))
        object.__setattr__(self, "nx", int(self.nx))
        object.__setattr__(self, "ny", int(self.ny))

    def x_nodes(self) -> np.ndarray:
        return np.linspace(self.x_min, self.x_max, self.nx)

    def y_nodes(self) -> np.ndarray:
        return np.linspace(self.y_min, self.y_max, self.ny)

    def cell_diagonal(self) -> float:
        """Length of one grid cell's diagonal."""
        dx = (self.x_max - self.x_min) / (self.nx - 1)
        dy = (self.y_max - self.y_min) / (self.ny - 1)
        return math.hypot(dx, dy)


@dataclass(frozen=True)
class ImageMap:
    """Nonnegative scalar field sampled on a grid, tagged with its test frequency.

    ``values[i, j]`` is the field at node (x_i, y_j).
    """

    grid: ImagingGridSpec
    values: np.ndarray  # (nx, ny)
    eta: float
    source: str  # "numeric" | "analytic"

    def __post_init__(self) -> None:
        values = np.asarray(self.values, dtype=float)
        if values.shape != (self.grid.nx, self.grid.ny):
            raise ValueError(
                f"values shape {values.shape} does not match grid "
                f"({self.grid.nx}, {self.grid.ny})"
            )
        if np.any(values < 0):
            raise ValueError("image values must be nonnegative")
        eta = float(self.eta)
        if not (math.isfinite(eta) and eta > 0):
            raise ValueError(f"eta must be a positive finite real, got {eta}")
        if self.source not in ("numeric", "analytic"):
            raise ValueError(f"source must be 'numeric' or 'analytic', got {self.source!r}")
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "eta", eta)


class Peak(NamedTuple):
    x: float
    y: float
    value: float


def test_vector(x, eta: float, dirs: DirectionSet) -> np.ndarray:
    """Unit steering vector with entries (1/sqrt(N)) e^{i eta theta_n . x}."""
    eta = float(eta)
    if not (math.isfinite(eta) and eta > 0):
        raise ValueError(f"eta must be a positive finite real, got {eta}")
    x = np.asarray(x, dtype=float)
    return np.exp(1j * eta * (dirs.vectors @ x)) / math.sqrt(dirs.count)


def _bilinear_sums(points: np.ndarray, eta: float, factors: SpectralFactors,
                   dirs: DirectionSet) -> np.ndarray:
    """|sum_m <W,U_m><W,Vbar_m>| over the selected rank, for each point.

    The per-point inner products are evaluated one point at a time with
    identical array shapes, so a value computed inside a grid sweep is
    bit-identical to the same point evaluated alone.
    """
    if factors.rank is None:
        raise ValueError("no rank selected; call select_rank() first")
    k = factors.rank
    theta = dirs.vectors
    scale = 1.0 / math.sqrt(dirs.count)
    u_k = factors.left_vectors[:, :k]
    v_k = factors.right_vectors[:, :k]
    out = np.empty(points.shape[0], dtype=float)
    for p in range(points.shape[0]):
        w_conj = np.exp(-1j * eta * (theta @ points[p])) * scale  # conj(W)
        left = w_conj @ u_k  # <W, U_m>, m = 1..k
        right = w_conj @ v_k  # <W, Vbar_m>
        out[p] = abs(np.sum(left * right))
    return out


def imaging_value(x, eta: float, factors: SpectralFactors, dirs: DirectionSet) -> float:
    """Imaging function at a single point; requires a selected rank."""
    eta = float(eta)
    if not (math.isfinite(eta) and eta > 0):
        raise ValueError(f"eta must be a positive finite real, got {eta}")
    point = np.asarray(x, dtype=float).reshape(1, 2)
    return float(_bilinear_sums(point, eta, factors, dirs)[0])


def image_grid(
    grid: ImagingGridSpec,
    eta: float,
    factors: SpectralFactors,
    dirs: DirectionSet,
) -> ImageMap:
    """Evaluate the imaging function on every grid node.

    Node values match :func:`imaging_value` bit-exactly.
    """
    eta = float(eta)
    if not (math.isfinite(eta) and eta > 0):
        raise ValueError(f"eta must be a positive finite real, got {eta}")
    xg, yg = np.meshgrid(grid.x_nodes(), grid.y_nodes(), indexing="ij")
    points = np.stack([xg.ravel(), yg.ravel()], axis=1)
    values = _bilinear_sums(points, eta, factors, dirs).reshape(grid.nx, grid.ny)
    return ImageMap(grid=grid, values=values, eta=eta, source="numeric")


def extract_peaks(
    image: ImageMap,
    threshold_frac: float = DEFAULT_THRESHOLD_FRAC,
    min_separation: float = DEFAULT_MIN_SEPARATION,
) -> list[Peak]:
    """Strict 8-neighborhood local maxima, thresholded and separation-filtered.

    Keeps maxima with value >= threshold_frac * global max, then greedily
    drops any peak closer than ``min_separation`` to an already accepted
    (higher) peak.  Returns peaks sorted by descending value; an all-zero
    image yields an empty list.
    """
    threshold_frac = float(threshold_frac)
    if not 0.0 < threshold_frac < 1.0:
        raise ValueError(f"threshold_frac must be in (0, 1), got {threshold_frac}")
    min_separation = float(min_separation)
    if not min_separation > 0:
        raise ValueError(f"min_separation must be positive, got {min_separation}")
    values = image.values
    global_max = float(values.max())
    if global_max <= 0.0:
        return []
    nx, ny = values.shape
    padded = np.full((nx + 2, ny + 2), -np.inf)
    padded[1:-1, 1:-1] = values
    is_peak = np.ones((nx, ny), dtype=bool)
    for di in (-1, 0, 1):
        for dj in (-1, 0, 1):
            if di == 0 and dj == 0:
                continue
            neighbor = padded[1 + di : nx + 1 + di, 1 + dj : ny + 1 + dj]
            is_peak &= values > neighbor
    is_peak &= values >= threshold_frac * global_max
    xs = image.grid.x_nodes()
    ys = image.grid.y_nodes()
    ii, jj = np.nonzero(is_peak)
    order = np.lexsort((jj, ii, -values[ii, jj]))  # by value desc, then index
    accepted: list[Peak] = []
    for idx in order:
        x, y, v = float(xs[ii[idx]]), float(ys[jj[idx]]), float(values[ii[idx], jj[idx]])
        if all(math.hypot(x - p.x, y - p.y) >= min_separation for p in accepted):
            accepted.append(Peak(x, y, v))
    return accepted


_IMAGE_HEADER = re.compile(
    r"^# image nx=(\d+) ny=(\d+) eta=(\S+) source=(numeric|analytic)$"
)
_BOUNDS_HEADER = re.compile(r"^# bounds (\S+) (\S+) (\S+) (\S+)$")


def write_image(image: ImageMap, path) -> None:
    """Write an image map as text: two header lines, then ny rows of nx values.

    Row j holds the values at y_j, listed from y_min upward.
    """
    grid = image.grid
    lines = [
        f"# image nx={grid.nx} ny={grid.ny} eta={image.eta:.17g} source={image.source}",
        f"# bounds {grid.x_min:.17g} {grid.x_max:.17g} {grid.y_min:.17g} {grid.y_max:.17g}",
    ]
    for j in range(grid.ny):
        lines.append(" ".join(f"{v:.17g}" for v in image.values[:, j]))
    Path(path).write_text("\n".join(lines) + "\n")


def read_image(path) -> ImageMap:
    """Read an image map written by :func:`write_image`; rejects size mismatches."""
    lines = Path(path).read_text().splitlines()
    if len(lines) < 2:
        raise ValueError(f"{path}: truncated image file")
    header = _IMAGE_HEADER.match(lines[0])
    if header is None:
        raise ValueError(f"{path}: malformed image header: {lines[0]!r}")
    bounds = _BOUNDS_HEADER.match(lines[1])
    if bounds is None:
        raise ValueError(f"{path}: malformed bounds header: {lines[1]!r}")
    nx, ny = int(header.group(1)), int(header.group(2))
    eta = float(header.group(3))
    source = header.group(4)
    x_min, x_max, y_min, y_max = (float(bounds.group(g)) for g in range(1, 5))
    rows = [line for line in lines[2:] if line.strip()]
    if len(rows) != ny:
        raise ValueError(f"{path}: expected {ny} data rows, found {len(rows)}")
    values = np.empty((nx, ny), dtype=float)
    for j, line in enumerate(rows):
        parts = line.split()
        if len(parts) != nx:
            raise ValueError(f"{path}: row {j} has {len(parts)} values, expected {nx}")
        values[:, j] = [float(p) for p in parts]
    grid = ImagingGridSpec(x_min=x_min, x_max=x_max, y_min=y_min, y_max=y_max, nx=nx, ny=ny)
    return ImageMap(grid=grid, values=values, eta=eta, source=source)


def write_peaks(peaks: list[Peak], path) -> None:
    """Write peaks as text lines ``x y value``, descending in value."""
    lines = [f"{p.x:.17g} {p.y:.17g} {p.value:.17g}" for p in peaks]
    Path(path).write_text("\n".join(lines) + ("\n" if lines else ""))
