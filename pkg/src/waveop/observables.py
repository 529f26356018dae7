"""Physical readout: density matrices, expectations, purity, and the
lift of observables into the extended space.

An N x N observable A acts on wave operators by left multiplication; its
matrix over the hermitian basis, (1/2) trace(B_a A B_b), is the unique
hermitian N^2 x N^2 image satisfying

    trace(A rho_hat rho_hat^dagger) = sum_ab v_a^* A_ab v_b

for every wave operator.  The lift is a unital algebra homomorphism, so it
preserves commutation relations; each eigenvalue of A reappears N-fold
degenerate.  Operators that split that degeneracy necessarily lie outside
the lifted-observable subspace.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .basis import HermitianBasis, build_basis
from .dynamics import Superoperator
from .linalg import as_operator, eig_hermitian, max_abs, require_hermitian

_ZERO_NORM_TOL = 1e-14


@dataclass(frozen=True)
class MappedObservable:
    """Hermitian N^2 x N^2 image of an N x N observable."""

    dim: int
    matrix: np.ndarray


@dataclass(frozen=True)
class ConservationCheck:
    conserved: bool
    residual: float

    def __bool__(self) -> bool:
        return self.conserved


def density_matrix(rho_hat) -> np.ndarray:
    """rho = rho_hat rho_hat^dagger; hermitian positive semidefinite by construction."""
    rho_hat = as_operator(rho_hat)
    return rho_hat @ rho_hat.conj().T


def _norm_squared(rho_hat: np.ndarray) -> float:
    val = float(np.real(np.vdot(rho_hat, rho_hat)))
    if val <= _ZERO_NORM_TOL:
        raise ValueError(f"wave operator has (near-)zero norm {val!r}; state undefined")
    return val


def expectation(a, rho_hat) -> float:
    """Expectation value trace(a rho) / trace(rho) with rho = rho_hat rho_hat^dagger."""
    a = as_operator(a)
    rho_hat = as_operator(rho_hat)
    if a.shape != rho_hat.shape:
        raise ValueError(f"dimension mismatch: {a.shape} vs {rho_hat.shape}")
    norm = _norm_squared(rho_hat)
    return float(np.real(np.einsum("ij,jk,ik->", a, rho_hat, rho_hat.conj()))) / norm


def purity(rho_hat) -> float:
    """trace(rho^2) / trace(rho)^2; 1 for pure states, 1/N at maximal mixing."""
    rho_hat = as_operator(rho_hat)
    norm = _norm_squared(rho_hat)
    rho = rho_hat @ rho_hat.conj().T
    return float(np.real(np.trace(rho @ rho))) / norm**2


def purity_of_density(rho) -> float:
    """Purity computed from a density matrix directly (comparator runs)."""
    rho = as_operator(rho)
    tr = float(np.real(np.trace(rho)))
    if abs(tr) <= _ZERO_NORM_TOL:
        raise ValueError("density matrix has (near-)zero trace")
    return float(np.real(np.trace(rho @ rho))) / tr**2


def map_observable(a, basis: HermitianBasis) -> MappedObservable:
    """Lift an observable to the extended space: entries (1/2) trace(B_a A B_b)."""
    a = require_hermitian(a, "observable")
    if a.shape[0] != basis.dim:
        raise ValueError(f"dimension mismatch: observable is {a.shape[0]}, basis is {basis.dim}")
    b = basis.elements
    matrix = 0.5 * np.einsum("aij,jk,bki->ab", b, a, b, optimize=True)
    return MappedObservable(dim=basis.dim, matrix=matrix)


def is_conserved(obs: MappedObservable, superop: Superoperator, tol: float) -> ConservationCheck:
    """Whether the lifted observable commutes with the evolution generator."""
    if obs.matrix.shape != superop.matrix.shape:
        raise ValueError(
            f"dimension mismatch: observable is {obs.matrix.shape}, generator is {superop.matrix.shape}"
        )
    residual = max_abs(obs.matrix @ superop.matrix - superop.matrix @ obs.matrix)
    return ConservationCheck(conserved=residual < tol, residual=residual)


def expectation_from_coherence(obs: MappedObservable, v) -> float:
    """Quadratic-form expectation sum_ab v_a^* A_ab v_b / sum_a |v_a|^2."""
    v = np.asarray(v, dtype=complex).reshape(-1)
    norm = float(np.real(np.vdot(v, v)))
    if norm <= _ZERO_NORM_TOL:
        raise ValueError("coherence vector has (near-)zero norm")
    return float(np.real(np.vdot(v, obs.matrix @ v))) / norm


def mapped_subspace_projection(m, basis: HermitianBasis) -> np.ndarray:
    """Orthogonal projection of an N^2 x N^2 matrix onto the lifted-observable span.

    The lifted images of the basis elements are mutually orthogonal under
    the Frobenius inner product with squared norm 2N, which makes the
    projection a plain expansion.
    """
    m = as_operator(m)
    n = basis.dim
    if m.shape[0] != n**2:
        raise ValueError(f"expected a {n**2}x{n**2} matrix, got {m.shape}")
    proj = np.zeros_like(m)
    for elem in basis.elements:
        image = map_observable_unchecked(elem, basis)
        proj += (np.vdot(image, m) / (2.0 * n)) * image
    return proj


def map_observable_unchecked(a, basis: HermitianBasis) -> np.ndarray:
    """Lift matrix without hermiticity validation (internal helper)."""
    b = basis.elements
    return 0.5 * np.einsum("aij,jk,bki->ab", b, np.asarray(a, dtype=complex), b, optimize=True)


def degeneracy_complement(obs: MappedObservable) -> list[np.ndarray]:
    """Commuting hermitian operators that split the lifted observable's degeneracy.

    Returns the rank-1 projectors onto the (phase-fixed) eigenvectors of
    ``obs``.  Each commutes with ``obs``; jointly they label every
    eigenvector uniquely, so the common eigenbasis is non-degenerate.  None
    of them lies in the lifted-observable subspace (their spectra lack the
    N-fold degeneracy every lifted observable carries), which is verified
    here by projection.
    """
    n = obs.dim
    if n == 1:
        return []
    eig = eig_hermitian(obs.matrix)
    basis = build_basis(n)
    out = []
    for k in range(n**2):
        w = eig.vectors[:, k]
        p = np.outer(w, w.conj())
        resid = max_abs(p - mapped_subspace_projection(p, basis))
        if resid <= 1e-8:
            raise RuntimeError(
                "degeneracy-splitting projector unexpectedly lies in the lifted-observable subspace"
            )
        out.append(p)
    return out
