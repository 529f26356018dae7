"""Hermitian operator basis of the N^2-dimensional extended space.

The basis consists of sqrt(2/N) times the identity followed by the
generalized Gell-Mann matrices, all normalized to trace(B_a B_b) = 2
delta_ab.  For N = 2 this is exactly (identity, sigma_x, sigma_y, sigma_z).
A wave operator expands as rho_hat = (1/sqrt(2)) * sum_a v_a B_a, and the
component vector v doubles as the state in the extended space: the
Hilbert-Schmidt inner product trace(a_dagger b) equals the plain vector
product of the component vectors.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .linalg import as_operator

SQRT2 = np.sqrt(2.0)


@dataclass(frozen=True)
class HermitianBasis:
    """N^2 hermitian matrices with trace(B_a B_b) = 2 delta_ab.

    Element order: identity component first, then symmetric pair matrices
    (j < k, lexicographic), then antisymmetric pairs, then the diagonal
    (traceless) matrices.  The ordering is part of the file-format contract:
    scenario files give operators as real coefficients over these elements.
    """

    dim: int
    elements: np.ndarray  # shape (dim**2, dim, dim)

    def __len__(self) -> int:
        return self.elements.shape[0]


def build_basis(n: int) -> HermitianBasis:
    """Construct the hermitian basis for an n-dimensional system."""
    if n < 1:
        raise ValueError("basis dimension must be at least 1")
    mats = [np.sqrt(2.0 / n) * np.eye(n, dtype=complex)]
    # symmetric pairs: E_jk + E_kj
    for j in range(n):
        for k in range(j + 1, n):
            m = np.zeros((n, n), dtype=complex)
            m[j, k] = 1.0
            m[k, j] = 1.0
            mats.append(m)
    # antisymmetric pairs: -i E_jk + i E_kj
    for j in range(n):
        for k in range(j + 1, n):
            m = np.zeros((n, n), dtype=complex)
            m[j, k] = -1.0j
            m[k, j] = 1.0j
            mats.append(m)
    # diagonal: sqrt(2/(l(l+1))) (sum_{m<l} E_mm - l E_ll)
    for l in range(1, n):
        d = np.zeros(n, dtype=complex)
        d[:l] = 1.0
        d[l] = -l
        mats.append(np.sqrt(2.0 / (l * (l + 1))) * np.diag(d))
    return HermitianBasis(dim=n, elements=np.array(mats))


def to_coherence(rho_hat, basis: HermitianBasis) -> np.ndarray:
    """Component vector v_a = trace(B_a rho_hat) / sqrt(2)."""
    rho_hat = as_operator(rho_hat)
    if rho_hat.shape[0] != basis.dim:
        raise ValueError(f"dimension mismatch: operator is {rho_hat.shape[0]}, basis is {basis.dim}")
    return np.einsum("aij,ji->a", basis.elements, rho_hat) / SQRT2


def from_coherence(v, basis: HermitianBasis) -> np.ndarray:
    """Inverse of :func:`to_coherence`: (1/sqrt(2)) sum_a v_a B_a."""
    v = np.asarray(v, dtype=complex)
    if v.shape != (basis.dim**2,):
        raise ValueError(f"dimension mismatch: vector has shape {v.shape}, expected ({basis.dim**2},)")
    return np.einsum("a,aij->ij", v, basis.elements) / SQRT2


def inner_product(a, b) -> complex:
    """Extended inner product trace(a_dagger b).

    Equals the component-wise vector product of the two coherence vectors.
    For rank-1 projectors it reduces to the squared overlap of the
    underlying state vectors.
    """
    a = as_operator(a)
    b = as_operator(b)
    if a.shape != b.shape:
        raise ValueError(f"dimension mismatch: {a.shape} vs {b.shape}")
    return complex(np.vdot(a, b))
