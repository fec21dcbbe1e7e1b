"""Dense Hermitian linear algebra and special functions."""

from __future__ import annotations

from typing import NamedTuple

import numpy as np
from scipy.special import gammaln, lambertw

from .errors import DomainError, NegativeEigenvalue, NonHermitianInput

ASYMMETRY_RTOL = 1e-10
SUPPORT_RTOL = 1e-9


class EigDecomposition(NamedTuple):
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray


def as_hermitian(a, rtol: float = ASYMMETRY_RTOL) -> np.ndarray:
    """Return the Hermitian part of ``a`` after checking it is Hermitian to ``rtol``."""
    a = np.atleast_2d(np.asarray(a, dtype=complex))
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise NonHermitianInput(f"expected a square matrix, got shape {a.shape}")
    asym = np.linalg.norm(a - a.conj().T)
    if asym > rtol * (1.0 + np.linalg.norm(a)):
        raise NonHermitianInput(f"matrix asymmetry {asym:.3e} exceeds tolerance")
    return 0.5 * (a + a.conj().T)


def hermitian_eig(a) -> EigDecomposition:
    """Eigendecomposition with ascending eigenvalues and orthonormal eigenvector columns."""
    h = as_hermitian(a)
    w, v = np.linalg.eigh(h)
    return EigDecomposition(w, v)


def operator_norm(a) -> float:
    """Largest eigenvalue magnitude of a Hermitian matrix."""
    w = np.linalg.eigvalsh(as_hermitian(a))
    return float(np.max(np.abs(w))) if w.size else 0.0


def default_support_tol(a) -> float:
    return SUPPORT_RTOL * (1.0 + operator_norm(a))


def support_basis(a, tol: float | None = None) -> tuple[np.ndarray, np.ndarray]:
    """Eigenvalues above ``tol`` and the matching orthonormal eigenvectors."""
    w, v = hermitian_eig(a)
    if tol is None:
        tol = SUPPORT_RTOL * (1.0 + float(np.max(np.abs(w))))
    if w[0] < -tol:
        raise NegativeEigenvalue(f"lowest eigenvalue {w[0]:.3e} below -{tol:.1e}")
    keep = w > tol
    return w[keep], v[:, keep]


def support_projector(a, tol: float | None = None) -> np.ndarray:
    """Orthogonal projector onto the span of eigenvectors with eigenvalue above ``tol``."""
    _, v = support_basis(a, tol)
    return v @ v.conj().T


def in_support(a, b, tol: float = SUPPORT_RTOL) -> bool:
    """True when ``b`` has no weight outside the support of the PSD matrix ``a``."""
    p = support_projector(a)
    q = np.eye(p.shape[0]) - p
    b = as_hermitian(b)
    scale = tol * (1.0 + np.linalg.norm(b, 2))
    return bool(np.linalg.norm(q @ b @ q, 2) <= scale and np.linalg.norm(q @ b @ p, 2) <= scale)


def pinv_sqrt(a, tol: float | None = None) -> np.ndarray:
    """Inverse square root of a PSD matrix restricted to its support."""
    w, v = support_basis(a, tol)
    return (v / np.sqrt(w)) @ v.conj().T


def pinv(a, tol: float | None = None) -> np.ndarray:
    """Inverse of a PSD matrix restricted to its support."""
    w, v = support_basis(a, tol)
    return (v / w) @ v.conj().T


def hermitian_basis(r: int) -> np.ndarray:
    """Real-linear basis of r x r Hermitian matrices, shape (r*r, r, r).

    Diagonal units first, then (E_jk + E_kj) and i(E_jk - E_kj) for j < k.
    """
    basis = []
    for j in range(r):
        e = np.zeros((r, r), dtype=complex)
        e[j, j] = 1.0
        basis.append(e)
    for j in range(r):
        for k in range(j + 1, r):
            e = np.zeros((r, r), dtype=complex)
            e[j, k] = e[k, j] = 1.0
            basis.append(e)
            e = np.zeros((r, r), dtype=complex)
            e[j, k] = 1j
            e[k, j] = -1j
            basis.append(e)
    return np.array(basis).reshape(r * r, r, r)


def hermitian_from_coords(x, r: int) -> np.ndarray:
    return np.tensordot(np.asarray(x, dtype=float), hermitian_basis(r), axes=1)


def partial_trace(a, dims: tuple[int, int], keep: int) -> np.ndarray:
    """Partial trace of a bipartite operator; ``keep`` is 0 or 1."""
    d0, d1 = dims
    t = np.asarray(a).reshape(d0, d1, d0, d1)
    if keep == 0:
        return np.einsum("ijkj->ik", t)
    return np.einsum("ijil->jl", t)


def lambert_w0(x: float) -> float:
    """Principal branch of the Lambert W function for real ``x >= -1/e``."""
    x = float(x)
    branch = -np.exp(-1.0)
    if x < branch - 1e-15:
        raise DomainError(f"lambert_w0 undefined for x={x} < -1/e")
    if x - branch < 1e-10:
        # series about the branch point; float -1/e can fall just outside the domain
        p = np.sqrt(max(2.0 * (np.e * x + 1.0), 0.0))
        return float(-1.0 + p - p**2 / 3.0 + 11.0 / 72.0 * p**3)
    return float(lambertw(x, 0).real)


def bell_half(x: float) -> float:
    """Order-1/2 Bell polynomial  e^{-x} sum_n x^n sqrt(n) / n!."""
    x = float(x)
    if x < 0:
        raise DomainError("bell_half requires x >= 0")
    if x == 0.0:
        return 0.0
    # Poisson weights are negligible (< 1e-30 relative) outside mean +- 12 sd
    spread = 12.0 * np.sqrt(x) + 40.0
    lo = max(1, int(np.floor(x - spread)))
    hi = int(np.ceil(x + spread))
    n = np.arange(lo, hi + 1, dtype=float)
    logw = -x + n * np.log(x) - gammaln(n + 1.0)
    return float(np.sum(np.exp(logw) * np.sqrt(n)))
