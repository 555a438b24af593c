"""Far-field data synthesis: MSR matrix assembly and SNR-controlled noise.

The multistatic response (MSR) matrix collects the leading-order far-field
amplitude for every (observation, incidence) direction pair.  With the
observation directions chosen opposite to the incidence directions the
noiseless matrix is complex-symmetric and has rank at most 3 per target
(one permittivity mode and two permeability modes).
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .scene import DirectionSet, FrequencySpec, SceneConfig

__all__ = [
    "MSRMatrix",
    "farfield_entry",
    "assemble_msr",
    "build_E_matrix",
    "add_noise",
    "write_msr",
    "read_msr",
]


@dataclass(frozen=True)
class MSRMatrix:
    """Square complex matrix of far-field amplitudes plus its generating frequency."""

    entries: np.ndarray  # (N, N) complex
    omega: float
    noisy: bool = False

    def __post_init__(self) -> None:
        entries = np.asarray(self.entries, dtype=complex)
        if entries.ndim != 2 or entries.shape[0] != entries.shape[1]:
            raise ValueError(f"entries must be square, got shape {entries.shape}")
        omega = float(self.omega)
        if not (math.isfinite(omega) and omega > 0):
            raise ValueError(f"omega must be a positive finite real, got {omega}")
        object.__setattr__(self, "entries", entries)
        object.__setattr__(self, "omega", omega)
        object.__setattr__(self, "noisy", bool(self.noisy))

    @property
    def size(self) -> int:
        return self.entries.shape[0]


def _contrasts(scene: SceneConfig) -> tuple[np.ndarray, np.ndarray]:
    """Per-target monopole and dipole contrast coefficients (area included).

    Monopole: (eps_m - eps0) / sqrt(eps0 * mu0) * area.
    Dipole:   2 * mu0 / (mu_m + mu0) * area  (isotropic polarization).
    """
    eps0 = scene.background_permittivity
    mu0 = scene.background_permeability
    a = np.array(
        [
            (inh.permittivity - eps0) / math.sqrt(eps0 * mu0) * inh.shape_area
            for inh in scene.inhomogeneities
        ]
    )
    b = np.array(
        [
            2 * mu0 / (inh.permeability + mu0) * inh.shape_area
            for inh in scene.inhomogeneities
        ]
    )
    return a, b


def farfield_entry(
    scene: SceneConfig,
    freq: FrequencySpec,
    obs_dir,
    inc_dir,
) -> complex:
    """Far-field amplitude for one (observation, incidence) direction pair.

    Evaluates the leading-order small-inclusion model

        r_m^2 * omega^2 * e^{i pi/4} / sqrt(8 omega pi)
            * sum_m [ a_m - b_m * (obs . inc) ] * e^{i omega (inc - obs) . z_m}

    where a_m, b_m are the monopole/dipole contrast coefficients of target m
    (areas included) and each target contributes with its own radius r_m.
    Both directions are assumed unit vectors.
    """
    obs = np.asarray(obs_dir, dtype=float)
    inc = np.asarray(inc_dir, dtype=float)
    omega = freq.omega
    prefactor = omega**2 * np.exp(1j * np.pi / 4) / math.sqrt(8 * omega * math.pi)
    a, b = _contrasts(scene)
    total = 0j
    for m, inh in enumerate(scene.inhomogeneities):
        bracket = a[m] - b[m] * float(obs @ inc)
        phase = np.exp(1j * omega * float((inc - obs) @ inh.location))
        total += inh.radius**2 * prefactor * bracket * phase
    return complex(total)


def assemble_msr(
    scene: SceneConfig,
    freq: FrequencySpec,
    dirs: DirectionSet,
) -> MSRMatrix:
    """Noiseless MSR matrix with observation directions opposite the incidence set.

    Entry (j, l) equals ``farfield_entry(scene, freq, -theta_j, theta_l)``; the
    result is complex-symmetric and additive over targets.
    """
    theta = dirs.vectors
    omega = freq.omega
    n = dirs.count
    prefactor = omega**2 * np.exp(1j * np.pi / 4) / math.sqrt(8 * omega * math.pi)
    a, b = _contrasts(scene)
    dots = theta @ theta.T  # theta_j . theta_l
    entries = np.zeros((n, n), dtype=complex)
    for m, inh in enumerate(scene.inhomogeneities):
        proj = theta @ inh.location  # (N,)
        phase = np.exp(1j * omega * (proj[:, None] + proj[None, :]))
        entries += inh.radius**2 * prefactor * (a[m] + b[m] * dots) * phase
    return MSRMatrix(entries=entries, omega=omega, noisy=False)


def build_E_matrix(location, freq_omega: float, dirs: DirectionSet) -> np.ndarray:
    """Steering matrix of one target: the three columns spanning its signal modes.

    Column 1 holds (1/sqrt(N)) e^{i omega theta_n . z}; columns 2 and 3 carry
    the extra factors theta_n . e_1 and theta_n . e_2.  Column 1 has unit norm;
    the squared norms of columns 2 and 3 sum to 1.
    """
    z = np.asarray(location, dtype=float)
    theta = dirs.vectors
    n = dirs.count
    phase = np.exp(1j * float(freq_omega) * (theta @ z)) / math.sqrt(n)
    return np.stack([phase, theta[:, 0] * phase, theta[:, 1] * phase], axis=1)


def add_noise(msr: MSRMatrix, snr_db: float, seed: int) -> MSRMatrix:
    """Add circularly-symmetric complex Gaussian noise at a target SNR.

    The per-entry noise variance is P / 10^(snr_db/10) with the signal power
    P measured as the mean squared entry magnitude.  Real and imaginary parts
    are independent with variance half each.  Variates are drawn row-major
    over (j, l), real part before imaginary part, so a given seed reproduces
    the same matrix bit-for-bit.
    """
    if msr.noisy:
        raise ValueError("matrix is already noisy")
    snr_db = float(snr_db)
    if not math.isfinite(snr_db):
        raise ValueError(f"snr_db must be finite, got {snr_db}")
    n = msr.size
    power = float(np.mean(np.abs(msr.entries) ** 2))
    variance = power / 10.0 ** (snr_db / 10.0)
    rng = np.random.default_rng(int(seed))
    gauss = rng.standard_normal((n, n, 2))
    noise = math.sqrt(variance / 2.0) * (gauss[..., 0] + 1j * gauss[..., 1])
    return MSRMatrix(entries=msr.entries + noise, omega=msr.omega, noisy=True)


_MSR_HEADER = re.compile(r"^# msr N=(\d+) omega=(\S+) noisy=([01])$")


def write_msr(msr: MSRMatrix, path) -> None:
    """Write an MSR matrix as text: header line, then N rows of re/im pairs."""
    lines = [f"# msr N={msr.size} omega={msr.omega:.17g} noisy={int(msr.noisy)}"]
    for row in msr.entries:
        lines.append(" ".join(f"{v:.17g}" for c in row for v in (c.real, c.imag)))
    Path(path).write_text("\n".join(lines) + "\n")


def read_msr(path) -> MSRMatrix:
    """Read an MSR matrix written by :func:`write_msr`; rejects size mismatches."""
    lines = Path(path).read_text().splitlines()
    if not lines:
        raise ValueError(f"{path}: empty MSR file")
    match = _MSR_HEADER.match(lines[0])
    if match is None:
        raise ValueError(f"{path}: malformed MSR header: {lines[0]!r}")
    n = int(match.group(1))
    omega = float(match.group(2))
    noisy = match.group(3) == "1"
    rows = [line for line in lines[1:] if line.strip()]
    if len(rows) != n:
        raise ValueError(f"{path}: expected {n} data rows, found {len(rows)}")
    entries = np.empty((n, n), dtype=complex)
    for j, line in enumerate(rows):
        parts = line.split()
        if len(parts) != 2 * n:
            raise ValueError(
                f"{path}: row {j} has {len(parts)} values, expected {2 * n}"
            )
        values = np.array([float(p) for p in parts])
        entries[j] = values[0::2] + 1j * values[1::2]
    return MSRMatrix(entries=entries, omega=omega, noisy=noisy)
