"""Dense complex matrix core.

Operators are plain complex ndarrays.  All matrix-equality assertions in
the package use the entrywise max norm with MATRIX_TOL; eigenvalues of
root-of-unity spectra snap to the nearest 2d-th root within SNAP_TOL.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .modring import omega_exponent_of, omega_power

MATRIX_TOL = 1e-9
SNAP_TOL = 1e-6


def dagger(a: np.ndarray) -> np.ndarray:
    return a.conj().T


def max_norm(a: np.ndarray) -> float:
    return float(np.max(np.abs(a))) if a.size else 0.0


def is_close(a: np.ndarray, b: np.ndarray, tol: float = MATRIX_TOL) -> bool:
    return bool(max_norm(np.asarray(a) - np.asarray(b)) <= tol)


def is_hermitian(a: np.ndarray, tol: float = MATRIX_TOL) -> bool:
    return is_close(a, dagger(a), tol)


def is_unitary(a: np.ndarray, tol: float = MATRIX_TOL) -> bool:
    return is_close(a @ dagger(a), np.eye(a.shape[0]), tol)


def tensor(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Kronecker product; the first factor is the slow index."""
    return np.kron(np.asarray(a), np.asarray(b))


def tensor_all(mats) -> np.ndarray:
    out = np.eye(1, dtype=complex)
    for m in mats:
        out = np.kron(out, m)
    return out


def hs_inner(a: np.ndarray, b: np.ndarray) -> complex:
    """Hilbert-Schmidt inner product tr(a^dagger b)."""
    a = np.asarray(a)
    b = np.asarray(b)
    if a.shape != b.shape:
        raise ValueError(f"dimension mismatch: {a.shape} vs {b.shape}")
    return complex(np.vdot(a, b))


@dataclass(frozen=True)
class SpectralDecomposition:
    """terms: (exponent k in Z_2d, projector); eigenvalue is exp(i*pi*k/d)."""

    d: int
    terms: tuple  # of (int, np.ndarray)

    @property
    def exponents(self):
        return tuple(k for k, _ in self.terms)

    def projector(self, k: int) -> np.ndarray:
        for exp, p in self.terms:
            if exp == k % (2 * self.d):
                return p
        raise KeyError(f"no eigenvalue exponent {k}")

    def reconstruct(self) -> np.ndarray:
        dim = self.terms[0][1].shape[0]
        out = np.zeros((dim, dim), dtype=complex)
        for k, p in self.terms:
            out += omega_power(k, self.d) * p
        return out


def spectral_decompose(u: np.ndarray, d: int, tol: float = MATRIX_TOL) -> SpectralDecomposition:
    """Spectral decomposition of a normal matrix whose eigenvalues are 2d-th
    roots of unity.

    Eigenvalues are snapped to the nearest root exponent; degenerate
    clusters are grouped by exponent and the clustered eigenvectors are
    orthonormalized, so the projectors are basis-independent.
    """
    u = np.asarray(u, dtype=complex)
    if not is_close(u @ dagger(u), dagger(u) @ u, tol):
        raise ValueError("matrix is not normal")
    evals, evecs = np.linalg.eig(u)
    groups: dict[int, list[int]] = {}
    for i, lam in enumerate(evals):
        k = omega_exponent_of(complex(lam), d, SNAP_TOL)
        groups.setdefault(k, []).append(i)
    terms = []
    for k in sorted(groups):
        cluster = evecs[:, groups[k]]
        q, _ = np.linalg.qr(cluster)
        terms.append((k, q @ dagger(q)))
    return SpectralDecomposition(d=d, terms=tuple(terms))
