"""Channel QFIs and asymptotic / finite-N precision bounds for N parallel channels."""

from __future__ import annotations

import numpy as np
from scipy.optimize import minimize

from . import sdp
from .channels import ChoiMatrix, KrausSet, alpha_beta, choi_from_kraus, rotate_kraus
from .errors import EqualityInconsistent
from .fisher import qfi_batch
from .geometry import cs_bound, is_phi_nonextremal
from .numerics import hermitian_basis, hermitian_from_coords, operator_norm, partial_trace, pinv
from .reports import BoundReport

ISO_TOL = 1e-6
GRID_THETA = 90
GRID_PHI = 180

__all__ = [
    "BoundReport",
    "channel_qfi",
    "unitary_channel_qfi",
    "extended_channel_qfi",
    "rld_bound",
    "ce_bound",
    "qs_bound",
    "cs_bound",
    "finite_n_ce",
    "quantum_enhancement",
    "alpha_beta_at",
    "all_bounds",
]


# channel QFI -----------------------------------------------------------------


def _pure_output_qfi(k: KrausSet, psi: np.ndarray) -> np.ndarray:
    """QFI of the channel output for a stack of pure inputs, psi shape (m, d_in)."""
    kp = np.einsum("rai,mi->mra", k.kraus, psi)
    dkp = np.einsum("rai,mi->mra", k.dkraus, psi)
    rho = np.einsum("mra,mrb->mab", kp, kp.conj())
    cross = np.einsum("mra,mrb->mab", dkp, kp.conj())
    return qfi_batch(rho, cross + np.conj(np.swapaxes(cross, -1, -2)))


def _bloch(theta, phi) -> np.ndarray:
    return np.stack([np.cos(theta / 2), np.exp(1j * phi) * np.sin(theta / 2)], axis=-1)


def channel_qfi(k: KrausSet, restarts: int = 20, seed: int = 0) -> BoundReport:
    """Maximal output QFI over pure inputs (no ancilla)."""
    if k.d_in == 2:
        theta = (np.arange(GRID_THETA) + 0.5) * np.pi / GRID_THETA
        phi = np.arange(GRID_PHI) * 2 * np.pi / GRID_PHI
        tt, pp = np.meshgrid(theta, phi, indexing="ij")
        vals = _pure_output_qfi(k, _bloch(tt.ravel(), pp.ravel()))
        best = int(np.argmax(vals))
        starts = [np.array([tt.ravel()[best], pp.ravel()[best]])]

        def objective(v):
            return -_pure_output_qfi(k, _bloch(np.array([v[0]]), np.array([v[1]])))[0]

        def to_state(v):
            return _bloch(np.array([v[0]]), np.array([v[1]]))[0]

    else:
        d = k.d_in
        rng = np.random.default_rng(seed)
        starts = list(rng.normal(size=(restarts, 2 * d)))

        def to_state(v):
            psi = v[:d] + 1j * v[d:]
            return psi / np.linalg.norm(psi)

        def objective(v):
            return -_pure_output_qfi(k, to_state(v)[None])[0]

    best_val, best_state = -np.inf, None
    for x0 in starts:
        res = minimize(objective, x0, method="Nelder-Mead", options={"xatol": 1e-10, "fatol": 1e-14, "maxiter": 4000})
        if -res.fun > best_val:
            best_val, best_state = -res.fun, to_state(res.x)
    return BoundReport("channel_qfi", float(best_val), extra={"input_state": best_state})


def unitary_channel_qfi(h_eigs) -> float:
    """(mu_max - mu_min)^2 for a unitary channel generated by H."""
    h = np.asarray(h_eigs, dtype=float)
    return float((h.max() - h.min()) ** 2)


# SDP formulation ------------------------------------------------------------


def _offdiag(x: np.ndarray) -> np.ndarray:
    """[[0, X^dag], [X, 0]] for a rectangular X."""
    m, n = x.shape
    out = np.zeros((n + m, n + m), dtype=complex)
    out[n:, :n] = x
    out[:n, n:] = x.conj().T
    return out


def _alpha_block(k: KrausSet, basis: np.ndarray, nextra: int):
    """LMI  [[t I, S^dag], [S, I]] >= 0, S = stacked dK~, equivalent to alpha <= t I."""
    r, d_out, d_in = k.kraus.shape
    s0 = k.dkraus.reshape(r * d_out, d_in)
    f0 = _offdiag(s0)
    f0[d_in:, d_in:] = np.eye(r * d_out)
    nh = basis.shape[0]
    fs = np.zeros((nh + nextra, *f0.shape), dtype=complex)
    for m, g in enumerate(basis):
        fs[m] = _offdiag((-1j * np.tensordot(g, k.kraus, axes=1)).reshape(r * d_out, d_in))
    fs[nh, :d_in, :d_in] = np.eye(d_in)
    return f0, fs


def _beta_terms(k: KrausSet, basis: np.ndarray):
    """beta_K and the matrices B_m with beta(h) = beta_K - sum_m x_m B_m."""
    _, beta = alpha_beta(k)
    kk = np.einsum("iab,jac->ijbc", k.kraus.conj(), k.kraus)
    bs = np.einsum("mij,ijbc->mbc", basis, kk)
    return beta, bs


def _beta_block(k: KrausSet, basis: np.ndarray):
    """LMI  [[s I, beta], [beta, I]] >= 0, equivalent to ||beta||^2 <= s."""
    d = k.d_in
    beta, bs = _beta_terms(k, basis)
    nh = basis.shape[0]
    f0 = np.zeros((2 * d, 2 * d), dtype=complex)
    f0[:d, d:] = beta
    f0[d:, :d] = beta.conj().T
    f0[d:, d:] = np.eye(d)
    fs = np.zeros((nh + 2, 2 * d, 2 * d), dtype=complex)
    for m in range(nh):
        fs[m, :d, d:] = -bs[m]
        fs[m, d:, :d] = -bs[m].conj().T
    fs[nh + 1, :d, :d] = np.eye(d)
    return f0, fs


def _beta_equalities(k: KrausSet, basis: np.ndarray, nvars: int):
    """Real linear system A x = b expressing beta(h) = 0 on the h coordinates."""
    beta, bs = _beta_terms(k, basis)
    d = k.d_in
    iu = np.triu_indices(d)
    iu_off = np.triu_indices(d, 1)
    rows = [bs[:, i, j].real for i, j in zip(*iu)] + [bs[:, i, j].imag for i, j in zip(*iu_off)]
    rhs = [beta[i, j].real for i, j in zip(*iu)] + [beta[i, j].imag for i, j in zip(*iu_off)]
    a = np.zeros((len(rows), nvars))
    a[:, : basis.shape[0]] = np.array(rows)
    return a, np.array(rhs)


def _finite_n_problem(k: KrausSet, n: int) -> sdp.SdpProblem:
    basis = hermitian_basis(k.rank)
    nh = basis.shape[0]
    if n == 1:
        f0, fs = _alpha_block(k, basis, 1)
        c = np.zeros(nh + 1)
        c[nh] = 1.0
        return sdp.SdpProblem.build(c, [(f0, fs)])
    fa0, fas = _alpha_block(k, basis, 2)
    fb0, fbs = _beta_block(k, basis)
    c = np.zeros(nh + 2)
    c[nh] = 1.0
    c[nh + 1] = n - 1.0
    return sdp.SdpProblem.build(c, [(fa0, fas), (fb0, fbs)])


def _ce_problem(k: KrausSet) -> sdp.SdpProblem:
    basis = hermitian_basis(k.rank)
    nh = basis.shape[0]
    f0, fs = _alpha_block(k, basis, 1)
    c = np.zeros(nh + 1)
    c[nh] = 1.0
    a, b = _beta_equalities(k, basis, nh + 1)
    return sdp.SdpProblem.build(c, [(f0, fs)], a, b)


def alpha_beta_at(k: KrausSet, h) -> tuple[np.ndarray, np.ndarray]:
    """alpha and beta of the representation rotated by generator h."""
    return alpha_beta(rotate_kraus(k, h))


def _prune(k: KrausSet, tol: float = 1e-14) -> tuple[KrausSet, np.ndarray]:
    """Drop Kraus operators that vanish together with their derivative; they never affect a bound."""
    scale = max(float(np.abs(k.kraus).max()), 1.0)
    live = (np.abs(k.kraus).reshape(k.rank, -1).max(axis=1) > tol * scale) | (
        np.abs(k.dkraus).reshape(k.rank, -1).max(axis=1) > tol * scale
    )
    idx = np.nonzero(live)[0]
    if idx.size == k.rank:
        return k, idx
    return KrausSet(k.kraus[idx], k.dkraus[idx], k.param, k.point), idx


def _report_from_solution(
    method: str, k: KrausSet, sol: sdp.SdpSolution, value: float, live: np.ndarray | None = None, **extra
) -> BoundReport:
    """Build the report; ``live`` lists the Kraus indices kept by pruning, h is embedded back."""
    r = k.rank if live is None else live.size
    h_live = hermitian_from_coords(sol.x[: r * r], r)
    if live is None:
        h = h_live
    else:
        h = np.zeros((k.rank, k.rank), dtype=complex)
        h[np.ix_(live, live)] = h_live
    alpha, beta = alpha_beta_at(k, h)
    eigs = np.linalg.eigvalsh(alpha)
    top = eigs[-1]
    multiplicity = int(np.sum(eigs > top - 1e-6 * max(top, 1e-300)))
    return BoundReport(
        method,
        float(value),
        h_opt=h,
        sdp_gap=float(sol.gap),
        beta_norm=float(operator_norm(beta)),
        alpha_eigs=tuple(float(e) for e in eigs),
        extra={"alpha_top_multiplicity": multiplicity, "iterations": sol.iterations, **extra},
    )


def finite_n_ce(k: KrausSet, n: int, gap_tol: float | None = None) -> BoundReport:
    """Per-particle bound 4 min_h (||alpha|| + (N-1) ||beta||^2) for N parallel channels."""
    if n < 1:
        raise ValueError("N must be a positive integer")
    kp, live = _prune(k)
    sol = sdp.solve(_finite_n_problem(kp, int(n)), gap_tol=gap_tol)
    return _report_from_solution("finite_n_ce", k, sol, 4.0 * sol.primal_value, live, n=int(n))


def extended_channel_qfi(k: KrausSet, gap_tol: float | None = None) -> BoundReport:
    """QFI of the channel extended by an ancilla: 4 min_h ||alpha||.

    ``alpha_top_multiplicity`` = 1 indicates a non-degenerate optimal input, which is then pure.
    """
    rep = finite_n_ce(k, 1, gap_tol)
    return BoundReport(
        "extended_qfi",
        rep.value,
        h_opt=rep.h_opt,
        sdp_gap=rep.sdp_gap,
        beta_norm=rep.beta_norm,
        alpha_eigs=rep.alpha_eigs,
        extra={k2: v for k2, v in rep.extra.items() if k2 != "n"},
    )


def ce_bound(k: KrausSet, gap_tol: float | None = None) -> BoundReport:
    """Asymptotic channel-extension bound 4 min_{h: beta=0} ||alpha||."""
    kp, live = _prune(k)
    try:
        sol = sdp.solve(_ce_problem(kp), gap_tol=gap_tol)
    except EqualityInconsistent:
        return BoundReport("ce", None, "beta_condition_unsatisfiable")
    return _report_from_solution("ce", k, sol, 4.0 * sol.primal_value, live)


def qs_bound(k: KrausSet, iso_tol: float = ISO_TOL, gap_tol: float | None = None) -> BoundReport:
    """Quantum-simulation bound, certified when the CE optimizer has alpha proportional to I."""
    ce = ce_bound(k, gap_tol)
    if not ce.applicable:
        return BoundReport("qs", None, ce.applicability)
    eigs = np.array(ce.alpha_eigs)
    spread = float(eigs[-1] - eigs[0])
    if spread > iso_tol * max(abs(eigs[-1]), 1e-300):
        return BoundReport(
            "qs",
            None,
            "alpha_not_scalar",
            h_opt=ce.h_opt,
            sdp_gap=ce.sdp_gap,
            beta_norm=ce.beta_norm,
            alpha_eigs=ce.alpha_eigs,
            extra={"alpha_spread": spread},
        )
    return BoundReport(
        "qs",
        ce.value,
        h_opt=ce.h_opt,
        sdp_gap=ce.sdp_gap,
        beta_norm=ce.beta_norm,
        alpha_eigs=ce.alpha_eigs,
        extra={"alpha_spread": spread},
    )


def rld_bound(c: ChoiMatrix) -> BoundReport:
    """||Tr_out(dOmega Omega^+ dOmega)||, applicable when the channel is not parameter-extremal."""
    if not is_phi_nonextremal(c):
        return BoundReport("rld", None, "phi_extremal")
    x = c.domega @ pinv(c.omega) @ c.domega
    reduced = partial_trace(x, (c.d_out, c.d_in), keep=1)
    return BoundReport("rld", operator_norm(0.5 * (reduced + reduced.conj().T)))


def quantum_enhancement(k: KrausSet) -> float:
    """Upper bound sqrt(F_CE / F[channel]) on the asymptotic precision gain from entanglement."""
    ce = ce_bound(k)
    if not ce.applicable:
        raise EqualityInconsistent("CE bound not applicable")
    return float(np.sqrt(ce.value / channel_qfi(k).value))


def all_bounds(k: KrausSet) -> dict[str, BoundReport]:
    """Every single-channel quantity for one channel."""
    c = choi_from_kraus(k)
    ce = ce_bound(k)
    return {
        "channel_qfi": channel_qfi(k),
        "extended_qfi": extended_channel_qfi(k),
        "rld": rld_bound(c),
        "ce": ce,
        "qs": qs_bound(k),
        "cs": cs_bound(c),
    }
