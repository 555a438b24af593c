"""Singular value decomposition of the MSR matrix and signal-space selection."""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass

import numpy as np

from .forward import MSRMatrix

__all__ = ["SpectralFactors", "ComputationError", "decompose", "select_rank"]

# default relative threshold for automatic rank selection
DEFAULT_AUTO_TAU = 0.01


class ComputationError(RuntimeError):
    """Numerical routine failed to converge."""


@dataclass(frozen=True)
class SpectralFactors:
    """SVD factors of an MSR matrix plus the selected signal-space dimension.

    The factorization convention is ``M = left @ diag(s) @ right.T``, i.e. the
    columns of ``right_vectors`` are the conjugated right singular vectors, so
    the stored right factor enters the product transposed but unconjugated.
    ``rank`` is None until a truncation has been chosen with
    :func:`select_rank`.
    """

    singular_values: np.ndarray  # (N,), nonincreasing, >= 0
    left_vectors: np.ndarray  # (N, N), columns U_m
    right_vectors: np.ndarray  # (N, N), columns are conjugated right vectors
    rank: int | None = None

    def __post_init__(self) -> None:
        s = np.asarray(self.singular_values, dtype=float)
        u = np.asarray(self.left_vectors, dtype=complex)
        v = np.asarray(self.right_vectors, dtype=complex)
        n = s.shape[0]
        if s.ndim != 1 or u.shape != (n, n) or v.shape != (n, n):
            raise ValueError(
                f"inconsistent factor shapes: s {s.shape}, U {u.shape}, V {v.shape}"
            )
        if np.any(s < 0) or np.any(np.diff(s) > 0):
            raise ValueError("singular values must be nonnegative and nonincreasing")
        if self.rank is not None and not 0 <= int(self.rank) <= n:
            raise ValueError(f"rank must be in [0, {n}], got {self.rank}")
        object.__setattr__(self, "singular_values", s)
        object.__setattr__(self, "left_vectors", u)
        object.__setattr__(self, "right_vectors", v)
        if self.rank is not None:
            object.__setattr__(self, "rank", int(self.rank))

    @property
    def size(self) -> int:
        return self.singular_values.shape[0]


def decompose(msr: MSRMatrix) -> SpectralFactors:
    """Full SVD of the MSR matrix; the returned factors have no rank selected."""
    try:
        u, s, vh = np.linalg.svd(msr.entries)
    except np.linalg.LinAlgError as exc:
        raise ComputationError(
            f"SVD did not converge for N={msr.size}, omega={msr.omega}, "
            f"noisy={msr.noisy}: {exc}"
        ) from exc
    # rows of vh are the conjugated right singular vectors; store them as columns
    return SpectralFactors(
        singular_values=s, left_vectors=u, right_vectors=vh.T, rank=None
    )


def select_rank(
    factors: SpectralFactors,
    *,
    fixed: int | None = None,
    auto: float | None = None,
) -> SpectralFactors:
    """Return a copy of the factors with the signal-space dimension set.

    Exactly one mode must be given.  ``fixed=k`` keeps the leading k singular
    triplets (callers supply k = 3M when the target count M is known).
    ``auto=tau`` keeps every singular value with sigma_k >= tau * sigma_1
    (ties included), and selects 0 when the matrix is identically zero.
    """
    if (fixed is None) == (auto is None):
        raise ValueError("specify exactly one of fixed= or auto=")
    n = factors.size
    if fixed is not None:
        k = int(fixed)
        if not 0 < k <= n:
            raise ValueError(f"fixed rank must be in (0, {n}], got {k}")
        return dataclasses.replace(factors, rank=k)
    tau = float(auto)
    if not 0.0 < tau < 1.0:
        raise ValueError(f"auto threshold must be in (0, 1), got {tau}")
    s = factors.singular_values
    top = s[0] if n else 0.0
    k = 0 if top == 0.0 else int(np.sum(s >= tau * top))
    return dataclasses.replace(factors, rank=k)
