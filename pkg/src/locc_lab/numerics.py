"""Small dense complex linear algebra used throughout the package.

Matrices are plain ``numpy.ndarray`` objects of dtype ``complex128``.
Everything here is pure: inputs are never mutated.
"""
from __future__ import annotations

import os
from dataclasses import dataclass

import numpy as np


class InvalidInputError(ValueError):
    """Raised when an operation receives malformed or inconsistent input."""


@dataclass(frozen=True)
class Tolerance:
    """Numerical cutoffs.

    ``rel`` is the relative singular-value (or eigenvalue) cutoff used for
    ranks and supports; ``abs`` is the absolute cutoff used for inner
    products, annihilation and identity tests.
    """

    rel: float = 1e-9
    abs: float = 1e-9

    def __post_init__(self):
        for name in ("rel", "abs"):
            value = getattr(self, name)
            if not (0.0 <= value < 1.0):
                raise InvalidInputError(f"tolerance {name}={value} outside [0, 1)")

    @classmethod
    def from_env(cls, rel: float | None = None, abs: float | None = None) -> "Tolerance":
        """Defaults, overridden by LOCC_LAB_TOL_REL/ABS, overridden by arguments."""
        env_rel = os.environ.get("LOCC_LAB_TOL_REL")
        env_abs = os.environ.get("LOCC_LAB_TOL_ABS")
        if rel is None:
            rel = float(env_rel) if env_rel else cls.rel
        if abs is None:
            abs = float(env_abs) if env_abs else cls.abs
        return cls(rel=rel, abs=abs)


DEFAULT_TOL = Tolerance()


def as_matrix(m, name: str = "matrix") -> np.ndarray:
    """Coerce to a finite 2-D complex array."""
    arr = np.asarray(m, dtype=np.complex128)
    if arr.ndim != 2:
        raise InvalidInputError(f"{name} must be 2-D, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise InvalidInputError(f"{name} has non-finite entries")
    return arr


def singular_values(m) -> np.ndarray:
    m = as_matrix(m)
    if m.size == 0:
        return np.zeros(0)
    return np.linalg.svd(m, compute_uv=False)


def numeric_rank(m, tol: Tolerance = DEFAULT_TOL) -> int:
    """Number of singular values above ``tol.rel * sigma_max``.

    A matrix whose largest singular value is at most ``tol.abs`` is treated
    as the zero matrix (rank 0), so roundoff residue left by an annihilating
    operator does not register as rank 1.
    """
    m = as_matrix(m)
    if m.size == 0:
        raise InvalidInputError("rank of a dimension-zero matrix is undefined")
    s = singular_values(m)
    smax = s[0]
    if smax <= tol.abs:
        return 0
    return int(np.count_nonzero(s > tol.rel * smax))


def kron(a, b) -> np.ndarray:
    return np.kron(as_matrix(a, "a"), as_matrix(b, "b"))


def is_hermitian(m, tol: Tolerance = DEFAULT_TOL) -> bool:
    m = as_matrix(m)
    if m.shape[0] != m.shape[1]:
        return False
    scale = max(1.0, float(np.abs(m).max(initial=0.0)))
    return bool(np.abs(m - m.conj().T).max(initial=0.0) <= tol.abs * scale)


def support_projector(m, tol: Tolerance = DEFAULT_TOL) -> np.ndarray:
    """Orthogonal projector onto the span of eigenvectors with eigenvalue
    above ``tol.rel * lambda_max`` of a Hermitian PSD matrix."""
    m = as_matrix(m)
    if m.shape[0] != m.shape[1] or not is_hermitian(m, tol):
        raise InvalidInputError("support_projector needs a square Hermitian matrix")
    w, v = np.linalg.eigh((m + m.conj().T) / 2)
    lam_max = w.max(initial=0.0)
    if lam_max <= tol.abs:
        return np.zeros_like(m)
    keep = v[:, w > tol.rel * lam_max]
    return keep @ keep.conj().T


def range_projector(m, tol: Tolerance = DEFAULT_TOL) -> np.ndarray:
    """Projector onto the column space of an arbitrary matrix."""
    m = as_matrix(m)
    u, s, _ = np.linalg.svd(m)
    if s.size == 0 or s[0] <= tol.abs:
        return np.zeros((m.shape[0], m.shape[0]), dtype=np.complex128)
    keep = u[:, : int(np.count_nonzero(s > tol.rel * s[0]))]
    return keep @ keep.conj().T


def is_proportional_unitary(a, tol: Tolerance = DEFAULT_TOL) -> bool:
    """True iff ``a^dagger a = c I`` for some c > 0 (deviation relative to c)."""
    a = as_matrix(a)
    n = a.shape[0]
    if n != a.shape[1]:
        return False
    gram = a.conj().T @ a
    c = float(np.trace(gram).real) / n
    if c <= tol.abs:
        return False
    return bool(np.abs(gram - c * np.eye(n)).max() <= tol.abs * c)


def is_identity(m, tol: Tolerance = DEFAULT_TOL) -> bool:
    m = as_matrix(m)
    if m.shape[0] != m.shape[1]:
        return False
    return bool(np.abs(m - np.eye(m.shape[0])).max(initial=0.0) <= tol.abs)


def hs_inner(x, y) -> complex:
    """Hilbert-Schmidt inner product Tr(x^dagger y)."""
    return complex(np.vdot(as_matrix(x), as_matrix(y)))


def diag_projector(dim: int, indices) -> np.ndarray:
    p = np.zeros((dim, dim), dtype=np.complex128)
    for i in indices:
        p[i, i] = 1.0
    return p


def basis_projector(basis, indices) -> np.ndarray:
    """Projector onto the span of the given columns of ``basis``."""
    cols = np.asarray(basis, dtype=np.complex128)[:, list(indices)]
    return cols @ cols.conj().T


def random_unitary(dim: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-random unitary via QR of a complex Gaussian matrix."""
    z = (rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    d = np.diag(r)
    return q * (d / np.abs(d))


def matrix_to_json(m) -> dict:
    m = as_matrix(m)
    return {
        "rows": int(m.shape[0]),
        "cols": int(m.shape[1]),
        "data": [[float(z.real), float(z.imag)] for z in m.reshape(-1)],
    }


def matrix_from_json(obj) -> np.ndarray:
    try:
        rows, cols, data = int(obj["rows"]), int(obj["cols"]), obj["data"]
    except (KeyError, TypeError, ValueError) as exc:
        raise InvalidInputError(f"bad matrix JSON: {exc}") from exc
    if rows <= 0 or cols <= 0 or len(data) != rows * cols:
        raise InvalidInputError(f"matrix JSON has {len(data)} entries for {rows}x{cols}")
    flat = np.array([complex(re, im) for re, im in data], dtype=np.complex128)
    return as_matrix(flat.reshape(rows, cols))
