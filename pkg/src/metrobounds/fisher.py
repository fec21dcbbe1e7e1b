"""State-level quantum and classical Fisher information."""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from . import sdp
from .channels import KrausSet, apply, apply_derivative
from .errors import KernelDerivative, NotNormalized, SingularPdf
from .numerics import as_hermitian, hermitian_basis

SLD_RTOL = 1e-10


@dataclass(frozen=True)
class ParametrizedState:
    rho: np.ndarray
    drho: np.ndarray

    def __post_init__(self):
        rho = as_hermitian(self.rho, rtol=1e-8)
        drho = as_hermitian(self.drho, rtol=1e-8)
        if rho.shape != drho.shape:
            raise ValueError("rho and drho shapes differ")
        object.__setattr__(self, "rho", rho)
        object.__setattr__(self, "drho", drho)

    @property
    def dim(self) -> int:
        return self.rho.shape[0]


def output_state(k: KrausSet, rho_in) -> ParametrizedState:
    """Channel output and its parameter derivative for a fixed input."""
    return ParametrizedState(apply(k, rho_in), apply_derivative(k, rho_in))


def _sld_eigenframe(s: ParametrizedState, tol: float | None):
    lam, vec = np.linalg.eigh(s.rho)
    if tol is None:
        tol = SLD_RTOL * max(float(np.real(np.trace(s.rho))), 1.0)
    d = vec.conj().T @ s.drho @ vec
    denom = lam[:, None] + lam[None, :]
    keep = denom > tol
    return lam, vec, d, denom, keep


def sld(s: ParametrizedState, tol: float | None = None) -> np.ndarray:
    """Symmetric logarithmic derivative on the subspace where lambda_i + lambda_j > tol."""
    lam, vec, d, denom, keep = _sld_eigenframe(s, tol)
    l_eig = np.where(keep, 2.0 * d / np.where(keep, denom, 1.0), 0.0)
    l = vec @ l_eig @ vec.conj().T
    l = 0.5 * (l + l.conj().T)
    resid = np.linalg.norm(0.5 * (s.rho @ l + l @ s.rho) - s.drho)
    if resid > 1e-6 * (1.0 + np.linalg.norm(s.drho)):
        warnings.warn(f"state derivative has kernel weight {resid:.2e}", KernelDerivative, stacklevel=2)
    return l


def qfi_state(s: ParametrizedState, tol: float | None = None) -> float:
    """Quantum Fisher information Tr(drho L)."""
    lam, vec, d, denom, keep = _sld_eigenframe(s, tol)
    kernel = np.abs(d[~keep]).max() if np.any(~keep) else 0.0
    if kernel > 1e-6 * (1.0 + np.abs(d).max()):
        warnings.warn(f"state derivative has kernel weight {kernel:.2e}", KernelDerivative, stacklevel=2)
    terms = np.where(keep, 2.0 * np.abs(d) ** 2 / np.where(keep, denom, 1.0), 0.0)
    return float(max(np.sum(terms), 0.0))


def qfi_batch(rho: np.ndarray, drho: np.ndarray, tol: float = SLD_RTOL) -> np.ndarray:
    """Vectorized QFI over a stack of states, shapes (..., d, d); kernel terms dropped silently."""
    lam, vec = np.linalg.eigh(rho)
    d = np.conj(np.swapaxes(vec, -1, -2)) @ drho @ vec
    denom = lam[..., :, None] + lam[..., None, :]
    keep = denom > tol
    terms = np.where(keep, 2.0 * np.abs(d) ** 2 / np.where(keep, denom, 1.0), 0.0)
    return np.sum(terms, axis=(-1, -2))


def qfi_pure(psi, dpsi) -> float:
    """4(<dpsi|dpsi> - |<dpsi|psi>|^2) for a normalized pure state."""
    psi = np.asarray(psi, dtype=complex).ravel()
    dpsi = np.asarray(dpsi, dtype=complex).ravel()
    norm = np.vdot(psi, psi).real
    if abs(norm - 1.0) > 1e-9:
        raise NotNormalized(f"state norm^2 = {norm}")
    if abs(np.vdot(psi, dpsi).real) > 1e-9:
        raise NotNormalized("derivative changes the norm")
    val = 4.0 * (np.vdot(dpsi, dpsi).real - abs(np.vdot(dpsi, psi)) ** 2)
    return float(max(val, 0.0))


def classical_fi(p, dp) -> float:
    """sum_x dp(x)^2 / p(x)."""
    p = np.asarray(p, dtype=float)
    dp = np.asarray(dp, dtype=float)
    small = p < 1e-15
    if np.any(np.abs(dp[small]) >= 1e-12):
        raise SingularPdf("nonzero derivative where the probability vanishes")
    return float(np.sum(dp[~small] ** 2 / p[~small]))


def purification_problem(k: KrausSet, psi_in) -> sdp.SdpProblem:
    """SDP: minimize t s.t. [[t, v^dag], [v, I]] >= 0 with v = stacked (dK_i - i sum_j h_ij K_j)|psi>."""
    psi = np.asarray(psi_in, dtype=complex).ravel()
    r, d_out = k.rank, k.d_out
    kpsi = np.einsum("kai,i->ka", k.kraus, psi)
    dkpsi = np.einsum("kai,i->ka", k.dkraus, psi)
    basis = hermitian_basis(r)
    nv = r * r + 1
    dim = 1 + r * d_out

    def lmi(vec):
        m = np.zeros((dim, dim), dtype=complex)
        m[1:, 0] = vec
        m[0, 1:] = vec.conj()
        return m

    f0 = lmi(dkpsi.ravel())
    f0[1:, 1:] = np.eye(r * d_out)
    fs = np.zeros((nv, dim, dim), dtype=complex)
    for m, g in enumerate(basis):
        fs[m] = lmi((-1j * g @ kpsi).ravel())
    fs[-1, 0, 0] = 1.0
    c = np.zeros(nv)
    c[-1] = 1.0
    return sdp.SdpProblem.build(c, [(f0, fs)])


def qfi_purification_min(k: KrausSet, psi_in, tol: float | None = None) -> float:
    """4 min_h <psi| sum dK~^dag dK~ |psi>, the smallest purification-based QFI of the output."""
    psi = np.asarray(psi_in, dtype=complex).ravel()
    if abs(np.vdot(psi, psi).real - 1.0) > 1e-9:
        raise NotNormalized("input state must be normalized")
    sol = sdp.solve(purification_problem(k, psi), gap_tol=tol)
    return 4.0 * sol.primal_value
