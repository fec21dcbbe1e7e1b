"""Parametrized quantum channels in Kraus and Choi form."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, InvalidParameter, RankDeficientDerivative
from .numerics import as_hermitian, default_support_tol, hermitian_eig, in_support

SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)
IDENTITY_2 = np.eye(2, dtype=complex)

NOISE_KINDS = ("dephasing", "depolarization", "loss", "spontaneous_emission", "lossy_interferometer")
PARAM_LABELS = ("phase", "strength")


def _frozen(a) -> np.ndarray:
    a = np.array(a, dtype=complex)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class KrausSet:
    """Kraus operators with their derivatives at a working parameter point.

    ``kraus`` and ``dkraus`` have shape (r, d_out, d_in).
    """

    kraus: np.ndarray
    dkraus: np.ndarray
    param: str = "phase"
    point: float = 0.0

    def __post_init__(self):
        k = _frozen(self.kraus)
        dk = _frozen(self.dkraus)
        if k.ndim == 2:
            k, dk = _frozen(k[None]), _frozen(dk[None])
        if k.shape != dk.shape:
            raise DimensionMismatch(f"kraus {k.shape} and dkraus {dk.shape} differ")
        object.__setattr__(self, "kraus", k)
        object.__setattr__(self, "dkraus", dk)

    @property
    def rank(self) -> int:
        return self.kraus.shape[0]

    @property
    def d_out(self) -> int:
        return self.kraus.shape[1]

    @property
    def d_in(self) -> int:
        return self.kraus.shape[2]

    def tp_residual(self) -> float:
        s = np.einsum("kai,kaj->ij", self.kraus.conj(), self.kraus)
        return float(np.linalg.norm(s - np.eye(self.d_in)))

    def tp_derivative_residual(self) -> float:
        s = np.einsum("kai,kaj->ij", self.dkraus.conj(), self.kraus)
        return float(np.linalg.norm(s + s.conj().T))


@dataclass(frozen=True)
class ChoiMatrix:
    """Unnormalized Choi matrix (trace d_in) on output (x) input, with its derivative."""

    omega: np.ndarray
    domega: np.ndarray
    d_in: int
    d_out: int
    param: str = "phase"
    point: float = 0.0

    def partial_trace_output(self) -> np.ndarray:
        t = self.omega.reshape(self.d_out, self.d_in, self.d_out, self.d_in)
        return np.einsum("aiaj->ij", t)


@dataclass(frozen=True)
class NoiseModel:
    kind: str
    eta: float
    eta_b: float | None = None

    def __post_init__(self):
        if self.kind not in NOISE_KINDS:
            raise InvalidParameter(f"unknown noise model {self.kind!r}")
        for e in (self.eta, self.eta_b):
            if e is not None and not 0.0 <= e <= 1.0:
                raise InvalidParameter(f"eta={e} outside [0, 1]")
        if self.kind == "lossy_interferometer" and self.eta_b is None:
            raise InvalidParameter("lossy_interferometer needs eta_b")


def noise_kraus(kind: str, eta: float, eta_b: float | None = None) -> np.ndarray:
    """Pure-noise Kraus operators, shape (r, d_out, 2)."""
    if kind == "dephasing":
        return np.array([np.sqrt((1 + eta) / 2) * IDENTITY_2, np.sqrt((1 - eta) / 2) * SIGMA_Z])
    if kind == "depolarization":
        c = np.sqrt((1 - eta) / 4)
        return np.array([np.sqrt((1 + 3 * eta) / 4) * IDENTITY_2, c * SIGMA_X, c * SIGMA_Y, c * SIGMA_Z])
    if kind == "loss":
        return _loss_kraus(eta, eta)
    if kind == "lossy_interferometer":
        return _loss_kraus(eta, eta_b)
    if kind == "spontaneous_emission":
        return np.array(
            [[[1, 0], [0, np.sqrt(eta)]], [[0, np.sqrt(1 - eta)], [0, 0]]],
            dtype=complex,
        )
    raise InvalidParameter(f"unknown noise model {kind!r}")


def noise_kraus_derivative(kind: str, eta: float) -> np.ndarray:
    """Analytic eta-derivatives of ``noise_kraus``; requires 0 < eta < 1."""
    if not 0.0 < eta < 1.0:
        raise InvalidParameter("strength derivative requires 0 < eta < 1")
    if kind == "dephasing":
        return np.array(
            [IDENTITY_2 / (4 * np.sqrt((1 + eta) / 2)), -SIGMA_Z / (4 * np.sqrt((1 - eta) / 2))]
        )
    if kind == "depolarization":
        c = -1.0 / (8 * np.sqrt((1 - eta) / 4))
        return np.array([IDENTITY_2 * 3 / (8 * np.sqrt((1 + 3 * eta) / 4)), c * SIGMA_X, c * SIGMA_Y, c * SIGMA_Z])
    if kind == "loss":
        d = np.zeros((3, 3, 2), dtype=complex)
        d[0, 0, 0] = d[0, 1, 1] = 1 / (2 * np.sqrt(eta))
        d[1, 2, 0] = d[2, 2, 1] = -1 / (2 * np.sqrt(1 - eta))
        return d
    if kind == "spontaneous_emission":
        return np.array(
            [[[0, 0], [0, 1 / (2 * np.sqrt(eta))]], [[0, -1 / (2 * np.sqrt(1 - eta))], [0, 0]]],
            dtype=complex,
        )
    raise InvalidParameter(f"strength derivative not available for {kind!r}")


def _loss_kraus(eta_a: float, eta_b: float) -> np.ndarray:
    k = np.zeros((3, 3, 2), dtype=complex)
    k[0, 0, 0] = np.sqrt(eta_a)
    k[0, 1, 1] = np.sqrt(eta_b)
    k[1, 2, 0] = np.sqrt(1 - eta_a)
    k[2, 2, 1] = np.sqrt(1 - eta_b)
    return k


def phase_unitary(phi: float) -> np.ndarray:
    """exp(-i sigma_z phi / 2)."""
    return np.diag([np.exp(-0.5j * phi), np.exp(0.5j * phi)])


def _phase_encoded(kraus: np.ndarray, phi0: float) -> tuple[np.ndarray, np.ndarray]:
    k = kraus @ phase_unitary(phi0)
    return k, k @ (-0.5j * SIGMA_Z)


def make_noise_channel(m: NoiseModel, param: str = "phase", point: float | None = None) -> KrausSet:
    """Channel for a noise model, differentiated w.r.t. the phase or the noise strength.

    For ``param="phase"`` the channel is K_i U_phi with U_phi = exp(-i sigma_z phi/2)
    evaluated at ``point`` (default 0). For ``param="strength"`` the parameter is eta
    itself at zero phase and ``point`` is ignored.
    """
    if param not in PARAM_LABELS:
        raise InvalidParameter(f"unknown parameter label {param!r}")
    if param == "strength":
        if m.kind == "lossy_interferometer":
            raise InvalidParameter("strength parametrization is not offered for lossy_interferometer")
        return KrausSet(noise_kraus(m.kind, m.eta), noise_kraus_derivative(m.kind, m.eta), "strength", float(m.eta))
    phi0 = 0.0 if point is None else float(point)
    k, dk = _phase_encoded(noise_kraus(m.kind, m.eta, m.eta_b), phi0)
    return KrausSet(k, dk, "phase", phi0)


def lossy_interferometer_channel(eta_a: float, eta_b: float, phi0: float = 0.0) -> KrausSet:
    """Single-photon channel of a two-arm interferometer with arm transmittances eta_a, eta_b.

    The phase enters as (phi/2, -phi/2) on the two arms; the third output level is the vacuum.
    """
    for e in (eta_a, eta_b):
        if not 0.0 < e <= 1.0:
            raise InvalidParameter(f"transmittance {e} outside (0, 1]")
    k, dk = _phase_encoded(_loss_kraus(eta_a, eta_b), phi0)
    return KrausSet(k, dk, "phase", float(phi0))


def unitary_channel(u, generator) -> KrausSet:
    """Single-Kraus channel U with derivative -i H U."""
    u = np.asarray(u, dtype=complex)
    h = np.asarray(generator, dtype=complex)
    return KrausSet(u[None], (-1j * h @ u)[None])


def _vec(k: np.ndarray) -> np.ndarray:
    # |K> = (K (x) I)|I>, ordered output (x) input
    return k.reshape(k.shape[0], -1)


def choi_from_kraus(k: KrausSet) -> ChoiMatrix:
    v = _vec(k.kraus)
    dv = _vec(k.dkraus)
    omega = v.T @ v.conj()
    cross = dv.T @ v.conj()
    domega = cross + cross.conj().T
    return ChoiMatrix(0.5 * (omega + omega.conj().T), domega, k.d_in, k.d_out, k.param, k.point)


def canonical_kraus(c: ChoiMatrix, tol: float | None = None) -> KrausSet:
    """Kraus operators sqrt(lambda_i) psi_i from the Choi eigendecomposition.

    Derivatives are recovered inside the span of the canonical operators with the
    symmetric gauge dK_i = sum_j D_ji / (sqrt(l_i) + sqrt(l_j)) psi_j, where D is the
    Choi derivative in the eigenbasis. Raises RankDeficientDerivative when the
    derivative leaves the support.
    """
    tol = default_support_tol(c.omega) if tol is None else tol
    if not in_support(c.omega, c.domega):
        raise RankDeficientDerivative("Choi derivative is not contained in the Choi support")
    w, v = hermitian_eig(c.omega)
    keep = w > tol
    w, v = w[keep][::-1], v[:, keep][:, ::-1]
    s = np.sqrt(w)
    d = v.conj().T @ c.domega @ v
    coeff = d.T / (s[:, None] + s[None, :])  # coeff[i, j] multiplies psi_j in dK_i
    kraus = (v * s).T.reshape(-1, c.d_out, c.d_in)
    dkraus = (coeff @ v.T).reshape(-1, c.d_out, c.d_in)
    return KrausSet(kraus, dkraus, c.param, c.point)


def rotate_kraus(k: KrausSet, h) -> KrausSet:
    """Locally equivalent representation: dK_i -> dK_i - i sum_j h_ij K_j."""
    h = np.asarray(h, dtype=complex)
    if h.shape != (k.rank, k.rank):
        raise DimensionMismatch(f"generator shape {h.shape} does not match rank {k.rank}")
    h = as_hermitian(h)
    dk = k.dkraus - 1j * np.tensordot(h, k.kraus, axes=1)
    return KrausSet(k.kraus, dk, k.param, k.point)


def alpha_beta(k: KrausSet) -> tuple[np.ndarray, np.ndarray]:
    """alpha = sum dK^dag dK and beta = i sum dK^dag K."""
    alpha = np.einsum("kai,kaj->ij", k.dkraus.conj(), k.dkraus)
    beta = 1j * np.einsum("kai,kaj->ij", k.dkraus.conj(), k.kraus)
    return 0.5 * (alpha + alpha.conj().T), 0.5 * (beta + beta.conj().T)


def apply(k: KrausSet, rho) -> np.ndarray:
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (k.d_in, k.d_in):
        raise DimensionMismatch(f"state shape {rho.shape} does not match d_in={k.d_in}")
    return np.einsum("kai,ij,kbj->ab", k.kraus, rho, k.kraus.conj())


def apply_derivative(k: KrausSet, rho) -> np.ndarray:
    """Derivative of the output state for a parameter-independent input."""
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (k.d_in, k.d_in):
        raise DimensionMismatch(f"state shape {rho.shape} does not match d_in={k.d_in}")
    t = np.einsum("kai,ij,kbj->ab", k.dkraus, rho, k.kraus.conj())
    return t + t.conj().T


def tensor(a: KrausSet, b: KrausSet) -> KrausSet:
    """Parallel composition of two channels sharing the same parameter."""
    kraus = np.array([np.kron(x, y) for x in a.kraus for y in b.kraus])
    dkraus = np.array(
        [np.kron(dx, y) + np.kron(x, dy) for x, dx in zip(a.kraus, a.dkraus) for y, dy in zip(b.kraus, b.dkraus)]
    )
    return KrausSet(kraus, dkraus, a.param, a.point)
