"""Dense linear-algebra kernels used by the ELM solver.

Everything here is built on a thin SVD: pseudoinverse, minimum-norm least
squares, numerical rank and condition numbers all derive from the same
singular spectrum so that the reported diagnostics describe exactly the
decomposition that produced the weights.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

EPS = np.finfo(np.float64).eps


class DecompositionError(RuntimeError):
    """The SVD failed to converge or produced non-finite output."""


def as_matrix(m) -> np.ndarray:
    """Return ``m`` as a finite 2-D float64 array, raising ``ValueError`` otherwise."""
    a = np.asarray(m, dtype=np.float64)
    if a.ndim != 2:
        raise ValueError(f"expected a 2-D matrix, got shape {a.shape}")
    if a.shape[0] < 1 or a.shape[1] < 1:
        raise ValueError(f"matrix must have at least one row and column, got {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError("matrix contains NaN or Inf entries")
    return a


@dataclass(frozen=True)
class SingularSpectrum:
    """Singular values in non-increasing order plus the rank cut-off."""

    values: np.ndarray
    rank_tolerance: float

    def __post_init__(self):
        v = np.asarray(self.values, dtype=np.float64)
        if v.ndim != 1:
            raise ValueError("singular values must be a 1-D sequence")
        if np.any(v < 0) or np.any(np.diff(v) > 0):
            raise ValueError("singular values must be non-negative and non-increasing")
        if not self.rank_tolerance > 0:
            raise ValueError("rank_tolerance must be positive")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    def __len__(self):
        return len(self.values)

    @property
    def above_tolerance(self) -> np.ndarray:
        return self.values[self.values > self.rank_tolerance]


def rank_tolerance(shape: tuple[int, int], sigma_max: float, rank_tol_factor: float = 1.0) -> float:
    """``factor * max(rows, cols) * eps * sigma_max``, floored at the smallest normal float."""
    if not rank_tol_factor > 0:
        raise ValueError("rank_tol_factor must be positive")
    tol = rank_tol_factor * max(shape) * EPS * sigma_max
    return max(tol, np.finfo(np.float64).tiny)


def svd(m, rank_tol_factor: float = 1.0):
    """Thin SVD ``m = U diag(s) Vᵀ``.

    Returns ``(U, spectrum, V)`` with ``V`` (not ``Vᵀ``) so the three factors
    read the same way as the decomposition is usually written.
    """
    a = as_matrix(m)
    try:
        u, s, vt = np.linalg.svd(a, full_matrices=False)
    except np.linalg.LinAlgError as exc:
        raise DecompositionError(f"SVD did not converge: {exc}") from exc
    if not (np.all(np.isfinite(s)) and np.all(np.isfinite(u)) and np.all(np.isfinite(vt))):
        raise DecompositionError("SVD produced non-finite factors")
    # LAPACK guarantees ordering; clip the occasional -0.0
    s = np.maximum(s, 0.0)
    spectrum = SingularSpectrum(s, rank_tolerance(a.shape, s[0] if s.size else 0.0, rank_tol_factor))
    return u, spectrum, vt.T


def _kept(spectrum: SingularSpectrum) -> np.ndarray:
    return spectrum.values > spectrum.rank_tolerance


def pseudoinverse(m, rank_tol_factor: float = 1.0) -> np.ndarray:
    """Moore-Penrose pseudoinverse; singular values at or below the rank tolerance are zeroed."""
    u, spectrum, v = svd(m, rank_tol_factor)
    keep = _kept(spectrum)
    inv = np.zeros_like(spectrum.values)
    inv[keep] = 1.0 / spectrum.values[keep]
    return (v * inv) @ u.T


def solve_from_svd(u: np.ndarray, spectrum: SingularSpectrum, v: np.ndarray, t: np.ndarray) -> np.ndarray:
    """Minimum-norm least-squares solution from precomputed SVD factors."""
    keep = _kept(spectrum)
    coeffs = (u[:, keep].T @ t) / spectrum.values[keep]
    return v[:, keep] @ coeffs


def least_squares_solve(h, t, rank_tol_factor: float = 1.0) -> np.ndarray:
    """Minimum-norm minimiser of ``||h @ beta - t||_2``, i.e. ``beta = h⁺ t``."""
    a = as_matrix(h)
    t = np.asarray(t, dtype=np.float64)
    if t.ndim != 1 or t.shape[0] != a.shape[0]:
        raise ValueError(f"target length {t.shape} does not match {a.shape[0]} rows")
    u, spectrum, v = svd(a, rank_tol_factor)
    return solve_from_svd(u, spectrum, v, t)


def numerical_rank(spectrum: SingularSpectrum) -> int:
    return int(np.count_nonzero(_kept(spectrum)))


def condition_number(spectrum: SingularSpectrum) -> tuple[float, float]:
    """Return ``(raw, effective)`` condition numbers.

    ``raw`` uses the smallest singular value overall and is ``inf`` when that
    value is zero; ``effective`` only looks at values above the rank tolerance.
    """
    s = spectrum.values
    if s.size == 0:
        raise ValueError("condition number of an empty spectrum is undefined")
    raw = np.inf if s[-1] == 0 else float(s[0] / s[-1])
    kept = spectrum.above_tolerance
    effective = float(kept[0] / kept[-1]) if kept.size else np.inf
    return raw, effective


def log10_det_proxy(spectrum: SingularSpectrum) -> float:
    """Sum of log10 of the above-tolerance singular values (stand-in for log|det|)."""
    kept = spectrum.above_tolerance
    return float(np.sum(np.log10(kept))) if kept.size else -np.inf


def gram_psd_check(a) -> tuple[float, bool]:
    """Smallest eigenvalue of ``A Aᵀ`` via singular values, and whether it is PSD.

    ``A Aᵀ`` is ``rows x rows``; when ``rows > cols`` it has ``rows - cols``
    structural zero eigenvalues.
    """
    a = as_matrix(a)
    _, spectrum, _ = svd(a)
    lam = spectrum.values ** 2
    lam_max = float(lam[0])
    lam_min = 0.0 if a.shape[0] > a.shape[1] else float(lam[-1])
    return lam_min, lam_min >= -1e-10 * lam_max
