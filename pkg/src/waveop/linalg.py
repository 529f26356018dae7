"""Dense complex-matrix primitives shared by every other module.

All operators are plain ``numpy.ndarray`` squares of complex128.  The
helpers here are deliberately small: products, adjoints, commutators and a
hermitian eigendecomposition with a deterministic eigenvector phase
convention, so that repeated runs produce identical output files.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

# Hermiticity is checked with an absolute-plus-relative tolerance because
# superoperators are assembled from floating-point traces.
HERM_ATOL = 1e-12
HERM_RTOL = 1e-10

_PHASE_CUTOFF = 1e-12


def as_operator(m) -> np.ndarray:
    """Coerce input to a square complex matrix, validating shape and finiteness."""
    a = np.asarray(m, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"operator must be a square matrix, got shape {a.shape}")
    if a.shape[0] < 1:
        raise ValueError("operator dimension must be at least 1")
    if not np.all(np.isfinite(a.real)) or not np.all(np.isfinite(a.imag)):
        raise ValueError("operator contains non-finite entries")
    return a


def _check_same_dim(a: np.ndarray, b: np.ndarray) -> None:
    if a.shape != b.shape:
        raise ValueError(f"dimension mismatch: {a.shape} vs {b.shape}")


def mat_mul(a, b) -> np.ndarray:
    """Matrix product a·b of two equal-dimension operators."""
    a = as_operator(a)
    b = as_operator(b)
    _check_same_dim(a, b)
    return a @ b


def dagger(m) -> np.ndarray:
    """Conjugate transpose."""
    return as_operator(m).conj().T.copy()


def commutator(a, b) -> np.ndarray:
    """Commutator a·b − b·a."""
    a = as_operator(a)
    b = as_operator(b)
    _check_same_dim(a, b)
    return a @ b - b @ a


def max_abs(m) -> float:
    """Entrywise max-modulus norm, the scale used in tolerance checks."""
    return float(np.max(np.abs(m))) if np.asarray(m).size else 0.0


def hermiticity_defect(m) -> float:
    """Max-modulus of m − m†."""
    m = np.asarray(m)
    return max_abs(m - m.conj().T)


def is_hermitian(m, atol: float = HERM_ATOL, rtol: float = HERM_RTOL) -> bool:
    m = np.asarray(m)
    return hermiticity_defect(m) <= atol + rtol * max_abs(m)


def require_hermitian(m, name: str = "operator") -> np.ndarray:
    """Return m as an operator, raising with the measured defect if not hermitian."""
    a = as_operator(m)
    defect = hermiticity_defect(a)
    if defect > HERM_ATOL + HERM_RTOL * max_abs(a):
        raise ValueError(f"{name} is not hermitian: asymmetry max|m - m^dagger| = {defect:.3e}")
    return a


@dataclass(frozen=True)
class HermitianEigenSystem:
    """Eigendecomposition of a hermitian matrix.

    ``values`` are real and nondecreasing; ``vectors`` holds the
    eigenvectors as columns of a unitary matrix, each with its first
    non-negligible component rotated to be real positive.
    """

    values: np.ndarray
    vectors: np.ndarray

    @property
    def dim(self) -> int:
        return self.values.shape[0]

    def reconstruct(self) -> np.ndarray:
        v = self.vectors
        return (v * self.values) @ v.conj().T


def eig_hermitian(m, atol: float = HERM_ATOL, rtol: float = HERM_RTOL) -> HermitianEigenSystem:
    """Eigendecomposition with a deterministic phase convention.

    The input must be hermitian within ``atol + rtol * max|m|``; otherwise a
    ValueError reporting the measured asymmetry is raised.  Each eigenvector
    column is multiplied by a unit phase making its first component of
    magnitude above 1e-12 real positive, which pins the (otherwise
    arbitrary) phases for golden-file comparisons.
    """
    a = as_operator(m)
    defect = hermiticity_defect(a)
    if defect > atol + rtol * max_abs(a):
        raise ValueError(f"matrix is not hermitian: asymmetry max|m - m^dagger| = {defect:.3e}")
    values, vectors = np.linalg.eigh(a)
    vectors = vectors.copy()
    for k in range(vectors.shape[1]):
        col = vectors[:, k]
        idx = np.flatnonzero(np.abs(col) > _PHASE_CUTOFF)
        if idx.size:
            lead = col[idx[0]]
            vectors[:, k] = col * (abs(lead) / lead)
    return HermitianEigenSystem(values=values, vectors=vectors)
