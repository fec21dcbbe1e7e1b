"""Lossy and noiseless two-mode (Mach-Zehnder) phase estimation.

Inputs are N-photon states sum_n alpha_n |n, N-n> with n photons in arm a. The phase
imprints exp(-i n phi) and photons are lost independently in each arm with
transmittances eta_a, eta_b.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
from scipy.linalg import eigh_tridiagonal
from cvxopt import matrix, solvers
from scipy.optimize import minimize, minimize_scalar
from scipy.special import gammaln

from .errors import ConvergenceFailure, DegenerateQuadratic, Divergent, InvalidParameter, NotNormalized, PathologicalPoint, ScaleLimit
from .fisher import ParametrizedState, classical_fi
from .numerics import bell_half

ORACLE_MAX_N = 10
FREQUENTIST_MAX_N = 200
BAYES_MAX_N = 5000
NORM_TOL = 1e-12


@dataclass(frozen=True)
class TwoModeState:
    """Pure N-photon two-mode state; ``alpha[n]`` is the amplitude of |n, N-n>."""

    alpha: np.ndarray

    def __post_init__(self):
        a = np.array(self.alpha, dtype=complex).ravel()
        norm = float(np.sum(np.abs(a) ** 2))
        if abs(norm - 1.0) > NORM_TOL * max(1, a.size):
            raise NotNormalized(f"sum |alpha_n|^2 = {norm}")
        a.setflags(write=False)
        object.__setattr__(self, "alpha", a)

    @property
    def n_photons(self) -> int:
        return self.alpha.size - 1

    @property
    def weights(self) -> np.ndarray:
        return np.abs(self.alpha) ** 2

    @classmethod
    def from_weights(cls, x) -> "TwoModeState":
        x = np.clip(np.asarray(x, dtype=float), 0.0, None)
        return cls(np.sqrt(x / x.sum()))

    @classmethod
    def noon(cls, n: int) -> "TwoModeState":
        a = np.zeros(n + 1)
        a[0] = a[-1] = 1.0
        return cls(a / np.sqrt(a @ a))

    @classmethod
    def fock(cls, n: int) -> "TwoModeState":
        """|N, 0>: all photons in arm a."""
        a = np.zeros(n + 1)
        a[-1] = 1.0
        return cls(a)

    @classmethod
    def classical(cls, n: int, tau: float = 0.5) -> "TwoModeState":
        """N uncorrelated photons, each in sqrt(tau)|a> + sqrt(1-tau)|b>."""
        k = np.arange(n + 1)
        logw = _log_binom(n, k) + k * np.log(tau) + (n - k) * np.log1p(-tau)
        return cls(np.sqrt(np.exp(logw)))

    @classmethod
    def berry_wiseman(cls, n: int) -> "TwoModeState":
        """sin-profile state, optimal for flat-prior Bayesian cost without loss."""
        k = np.arange(n + 1)
        a = np.sin((k + 1) * np.pi / (n + 2))
        return cls(a / np.linalg.norm(a))


@dataclass(frozen=True)
class LossSetting:
    eta_a: float
    eta_b: float
    n_photons: int

    def __post_init__(self):
        for e in (self.eta_a, self.eta_b):
            if not 0.0 < e <= 1.0:
                raise InvalidParameter(f"transmittance {e} outside (0, 1]")
        if int(self.n_photons) != self.n_photons or self.n_photons < 0:
            raise InvalidParameter(f"photon number {self.n_photons} must be a nonnegative integer")
        object.__setattr__(self, "n_photons", int(self.n_photons))

    @property
    def noiseless(self) -> bool:
        return self.eta_a == 1.0 and self.eta_b == 1.0


def _log_binom(n, k):
    return gammaln(np.asarray(n) + 1.0) - gammaln(np.asarray(k) + 1.0) - gammaln(np.asarray(n) - np.asarray(k) + 1.0)


def _binom_pmf_table(n_max: int, eta: float) -> np.ndarray:
    """P[m, l]: probability of losing l of m photons with transmittance eta (rows m = 0..n_max)."""
    m = np.arange(n_max + 1)[:, None]
    l = np.arange(n_max + 1)[None, :]
    valid = l <= m
    if eta == 1.0:
        return (l == 0).astype(float) * np.ones_like(m, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        logp = _log_binom(m, np.where(valid, l, 0)) + (m - l) * np.log(eta) + l * np.log1p(-eta)
    return np.where(valid, np.exp(np.where(valid, logp, -np.inf)), 0.0)


def _loss_factors(s: LossSetting) -> tuple[np.ndarray, np.ndarray]:
    """Arm factors a[l_a, n] and b[l_b, n] with b_n^(l_a,l_b) = a[l_a, n] * b[l_b, n]."""
    n = s.n_photons
    pa = _binom_pmf_table(n, s.eta_a)  # [m, l]
    pb = _binom_pmf_table(n, s.eta_b)
    idx = np.arange(n + 1)
    return pa[idx, :].T, pb[n - idx, :].T


def loss_coeff(n: int, la: int, lb: int, s: LossSetting) -> float:
    """Probability b_n^(l_a,l_b) that l_a photons are lost from the n in arm a and l_b from the N-n in arm b."""
    big_n = s.n_photons
    if not 0 <= n <= big_n:
        raise InvalidParameter(f"n={n} outside [0, {big_n}]")
    if la < 0 or lb < 0 or la > n or lb > big_n - n:
        return 0.0

    def arm(m, l, eta):
        if eta == 1.0:
            return 1.0 if l == 0 else 0.0
        return float(np.exp(_log_binom(m, l) + (m - l) * np.log(eta) + l * np.log1p(-eta)))

    return arm(n, la, s.eta_a) * arm(big_n - n, lb, s.eta_b)


def lossy_output_state(psi: TwoModeState, s: LossSetting, phi: float = 0.0) -> ParametrizedState:
    """Block-diagonal output over surviving-photon sectors N' = 0..N, with its phi-derivative.

    Sector N' occupies basis indices offset by sum_{M<N'} (M+1); within it index j is |j, N'-j>.
    """
    big_n = s.n_photons
    if psi.n_photons != big_n:
        raise InvalidParameter("state and setting photon numbers differ")
    if big_n > ORACLE_MAX_N:
        raise ScaleLimit(f"dense output state limited to N <= {ORACLE_MAX_N}")
    fa, fb = _loss_factors(s)
    dim = (big_n + 1) * (big_n + 2) // 2
    offsets = np.concatenate([[0], np.cumsum(np.arange(1, big_n + 2))])
    rho = np.zeros((dim, dim), dtype=complex)
    drho = np.zeros((dim, dim), dtype=complex)
    n = np.arange(big_n + 1)
    amp = psi.alpha * np.exp(-1j * n * phi)
    for la in range(big_n + 1):
        for lb in range(big_n + 1 - la):
            sub = big_n - la - lb
            xi = amp * np.sqrt(fa[la] * fb[lb])
            v = np.zeros(dim, dtype=complex)
            dv = np.zeros(dim, dtype=complex)
            rows = offsets[sub] + (n - la)
            mask = (n >= la) & (n <= big_n - lb)
            v[rows[mask]] = xi[mask]
            dv[rows[mask]] = -1j * n[mask] * xi[mask]
            rho += np.outer(v, v.conj())
            cross = np.outer(dv, v.conj())
            drho += cross + cross.conj().T
    return ParametrizedState(rho, drho)


def _sector_sums(x: np.ndarray, fa: np.ndarray, fb: np.ndarray):
    n = np.arange(x.size, dtype=float)
    s0 = (fa * x) @ fb.T
    s1 = (fa * (x * n)) @ fb.T
    s2 = (fa * (x * n * n)) @ fb.T
    return s0, s1, s2


def _frequentist_value_grad(x: np.ndarray, fa: np.ndarray, fb: np.ndarray) -> tuple[float, np.ndarray]:
    s0, s1, s2 = _sector_sums(x, fa, fb)
    live = s0 > 1e-300
    mean = np.where(live, s1 / np.where(live, s0, 1.0), 0.0)
    value = 4.0 * float(np.sum(np.where(live, s2 - s1 * mean, 0.0)))
    n = np.arange(x.size, dtype=float)
    w0 = live.astype(float)
    # gradient 4 sum_sectors b_n (n - mean)^2, with b_n = fa[la, n] fb[lb, n]
    c0 = np.einsum("an,ab,bn->n", fa, w0, fb, optimize=True)
    c1 = np.einsum("an,ab,bn->n", fa, mean, fb, optimize=True)
    c2 = np.einsum("an,ab,bn->n", fa, mean**2, fb, optimize=True)
    grad = 4.0 * (n * n * c0 - 2.0 * n * c1 + c2)
    return max(value, 0.0), grad


def frequentist_bound(psi: TwoModeState, s: LossSetting) -> float:
    """Convexity upper bound: sum over loss sectors of p_(la,lb) F_Q[xi_(la,lb)]."""
    if psi.n_photons != s.n_photons:
        raise InvalidParameter("state and setting photon numbers differ")
    fa, fb = _loss_factors(s)
    return _frequentist_value_grad(psi.weights, fa, fb)[0]


def _frequentist_hessian(x: np.ndarray, fa: np.ndarray, fb: np.ndarray) -> np.ndarray:
    """Exact Hessian -8 sum_sectors v v^T / S0 with v_n = b_n (n - mean)."""
    s0, s1, _ = _sector_sums(x, fa, fb)
    live = s0 > 1e-300
    mean = s1[live] / s0[live]
    la, lb = np.nonzero(live)
    n = np.arange(x.size, dtype=float)
    v = fa[la] * fb[lb] * (n[None, :] - mean[:, None]) / np.sqrt(s0[live])[:, None]
    return -8.0 * (v.T @ v)


def _amplitude_ascent(y: np.ndarray, fa: np.ndarray, fb: np.ndarray) -> np.ndarray:
    """L-BFGS on amplitudes y with x = y^2 / |y|^2, which removes the simplex constraint."""

    def fun(y):
        nrm = y @ y
        x = y * y / nrm
        f, g = _frequentist_value_grad(x, fa, fb)
        return -f, -2.0 * y * (g - g @ x) / nrm

    res = minimize(
        fun, y, jac=True, method="L-BFGS-B", options={"maxiter": 20000, "ftol": 1e-16, "gtol": 1e-14, "maxcor": 30}
    )
    return res.x / np.linalg.norm(res.x)


def _sqp_step(x, f, g, fa, fb):
    """One sequential-QP step: maximize the exact quadratic model on the simplex, then Armijo backtracking."""
    m = x.size
    p = -_frequentist_hessian(x, fa, fb)
    p = 0.5 * (p + p.T) + 1e-9 * max(float(np.abs(np.diag(p)).max()), 1.0) * np.eye(m)
    q = -g - p @ x
    sol = solvers.qp(
        matrix(p), matrix(q), matrix(-np.eye(m)), matrix(np.zeros(m)), matrix(np.ones((1, m))), matrix(1.0),
        options={"show_progress": False, "abstol": 1e-14, "reltol": 1e-14, "feastol": 1e-14, "maxiters": 100},
    )
    y = np.maximum(np.array(sol["x"]).ravel(), 0.0)
    y /= y.sum()
    d = y - x
    slope = float(g @ d)
    if slope <= 0.0:
        # fall back to the Frank-Wolfe vertex
        d = -x.copy()
        d[np.argmax(g)] += 1.0
        slope = float(g @ d)
    t = 1.0
    while t > 1e-16:
        cand = x + t * d
        f_c, g_c = _frequentist_value_grad(cand, fa, fb)
        if f_c >= f + 1e-4 * t * slope:
            return cand, f_c, g_c
        t *= 0.5
    return x, f, g


def optimize_frequentist_input(
    s: LossSetting, tol: float = 1e-9, max_iter: int = 200
) -> tuple[TwoModeState, float]:
    """Maximize the concave frequentist bound over photon-number weights x_n = |alpha_n|^2.

    Starts from the uniform point with L-BFGS on amplitudes (with a few restarts off
    saddle points), then polishes with sequential-QP steps on the simplex. Convergence is
    certified by the Frank-Wolfe gap max(g) - g.x, an upper bound on the distance to the
    optimum, falling below ``tol`` * max(1, value). Raises ConvergenceFailure otherwise;
    the exception carries the best state, value and relative gap.
    """
    n = s.n_photons
    if n > FREQUENTIST_MAX_N:
        raise ScaleLimit(f"frequentist optimization limited to N <= {FREQUENTIST_MAX_N}")
    fa, fb = _loss_factors(s)

    def done(x, f, g):
        return float(g.max() - g @ x) <= tol * max(1.0, f)

    y = np.full(n + 1, 1.0 / np.sqrt(n + 1))
    for _ in range(5):
        y = _amplitude_ascent(y, fa, fb)
        x = y * y
        f, g = _frequentist_value_grad(x, fa, fb)
        if done(x, f, g):
            return TwoModeState.from_weights(x), f
        # push weight onto the steepest coordinate to leave a saddle with a missing level
        y[np.argmax(g)] += 1e-3
        y /= np.linalg.norm(y)
    for _ in range(max_iter):
        x_new, f_new, g_new = _sqp_step(x, f, g, fa, fb)
        stalled = x_new is x
        x, f, g = x_new, f_new, g_new
        if done(x, f, g):
            return TwoModeState.from_weights(x), f
        if stalled:
            break
    gap = float(g.max() - g @ x) / max(1.0, f)
    err = ConvergenceFailure(f"optimizer stopped at relative Frank-Wolfe gap {gap:.2e} > {tol:g}")
    err.state, err.value, err.gap = TwoModeState.from_weights(x), f, gap
    raise err


def noon_qfi_lossy(s: LossSetting) -> float:
    """QFI of the NOON state under arm losses: 2 (eta_a eta_b)^N / (eta_a^N + eta_b^N) N^2."""
    n = s.n_photons
    pa, pb = s.eta_a**n, s.eta_b**n
    return 2.0 * pa * pb / (pa + pb) * n * n


def classical_coherent_crb(s: LossSetting) -> float:
    """N times the coherent-state precision limit: (1/4)(1/sqrt(eta_a) + 1/sqrt(eta_b))^2."""
    return 0.25 * (1.0 / np.sqrt(s.eta_a) + 1.0 / np.sqrt(s.eta_b)) ** 2


def _loss_ratio(eta: float) -> float:
    return np.sqrt((1.0 - eta) / eta)


def asymptotic_loss_bound(s: LossSetting) -> tuple[float, np.ndarray]:
    """Asymptotic per-photon QFI bound 4/(sqrt((1-eta_a)/eta_a) + sqrt((1-eta_b)/eta_b))^2 and its generator.

    The generator is diagonal in the (K_a-lossless, K_a-loss, K_b-loss) Kraus ordering of
    the single-photon lossy interferometer channel.
    """
    ea, eb = s.eta_a, s.eta_b
    if ea == 1.0 and eb == 1.0:
        raise Divergent("no loss: the per-photon bound is unbounded")
    value = 4.0 / (_loss_ratio(ea) + _loss_ratio(eb)) ** 2
    chi = value * (ea - eb) / (ea * eb)
    diag = [chi]
    diag.append(ea / (1.0 - ea) * (4.0 / ea - chi) if ea < 1.0 else 0.0)
    diag.append(-eb / (1.0 - eb) * (4.0 / eb + chi) if eb < 1.0 else 0.0)
    return float(value), -np.diag(diag) / 8.0


def loss_enhancement(eta: float) -> float:
    """Maximal precision gain sqrt(1/(1-eta)) over the classical strategy for equal arm losses."""
    if not 0.0 < eta < 1.0:
        raise InvalidParameter("enhancement needs 0 < eta < 1")
    return float(np.sqrt(1.0 / (1.0 - eta)))


def escher_finite_n_bound(s: LossSetting) -> float:
    """Definite-photon-number QFI bound (2N / (sqrt(1 + N(1-eta_a)/eta_a) + sqrt(1 + N(1-eta_b)/eta_b)))^2."""
    n = s.n_photons
    da = np.sqrt(1.0 + (1.0 - s.eta_a) / s.eta_a * n)
    db = np.sqrt(1.0 + (1.0 - s.eta_b) / s.eta_b * n)
    return float((2.0 * n / (da + db)) ** 2)


def two_mode_moments(psi: TwoModeState) -> dict[str, float]:
    """Photon-number means, variances and covariance of the two arms."""
    x = psi.weights
    na = np.arange(x.size, dtype=float)
    nb = psi.n_photons - na
    ma, mb = x @ na, x @ nb
    va = x @ (na - ma) ** 2
    vb = x @ (nb - mb) ** 2
    cov = x @ ((na - ma) * (nb - mb))
    return {"mean_a": float(ma), "var_a": float(va), "mean_b": float(mb), "var_b": float(vb), "cov": float(cov)}


def js_variational_bound(moments: dict[str, float], s: LossSetting, literal: bool = False) -> float:
    """Purification bound minimized over the environment generator weights (g_a, g_b).

    With u = 1 - g_a and v = 1 - g_b the objective is
    u^2 Va + k_a (1-u)^2 + v^2 Vb + k_b (1-v)^2 - 2 u v C, where k_x = eta_x <n_x> / (1 - eta_x).
    ``literal=True`` uses middle terms linear in g_x instead; it is for inspection only and
    does not upper-bound the QFI in general. Arms with eta = 1 keep g = 0.
    A singular or indefinite quadratic falls back to the g = 0 value Var(n_a - n_b)
    with a DegenerateQuadratic warning. The result is clamped at 0.
    """
    va, vb, c = moments["var_a"], moments["var_b"], moments["cov"]
    if va < -1e-12 or vb < -1e-12 or abs(c) > np.sqrt(max(va, 0) * max(vb, 0)) + 1e-9 * (1 + abs(c)):
        raise InvalidParameter("moments are not a valid covariance")
    etas = np.array([s.eta_a, s.eta_b])
    means = np.array([moments["mean_a"], moments["mean_b"]])
    quad = np.array([[va, -c], [-c, vb]])
    base = va + vb - 2.0 * c  # value at u = v = 1
    free = etas < 1.0
    if not np.any(free):
        return max(base, 0.0)
    # objective q(y) = y^T H y - lin^T y + const over y = (u, v)
    if literal:
        h = quad.copy()
        lin = np.where(free, etas * means, 0.0)
        const = float(np.sum(lin))
    else:
        k = np.where(free, etas * means / np.where(free, 1.0 - etas, 1.0), 0.0)
        h = quad + np.diag(k)
        lin = 2.0 * k
        const = float(np.sum(k))
    # eliminate coordinates pinned at 1 (eta = 1)
    idx = np.nonzero(free)[0]
    fixed = np.nonzero(~free)[0]
    h_ff = h[np.ix_(idx, idx)]
    lin_f = lin[idx] - 2.0 * h[np.ix_(idx, fixed)].sum(axis=1)
    const_f = const + float(h[np.ix_(fixed, fixed)].sum()) - float(lin[fixed].sum())
    w = np.linalg.eigvalsh(h_ff)
    if w[0] <= 1e-12 * max(1.0, abs(w[-1])):
        warnings.warn("variational quadratic is not positive definite, using g = 0", DegenerateQuadratic, stacklevel=2)
        return max(base, 0.0)
    y = np.linalg.solve(h_ff, lin_f) / 2.0
    value = const_f - float(lin_f @ y) / 2.0
    return max(value, 0.0)


# Bayesian (flat prior, covariant measurement) --------------------------------


@dataclass(frozen=True)
class BayesCostMatrix:
    """First off-diagonal A_{n,n-1}, n = 1..N, of the symmetric cost matrix."""

    offdiag: np.ndarray

    @property
    def n_photons(self) -> int:
        return self.offdiag.size


def bayes_cost_matrix(s: LossSetting) -> BayesCostMatrix:
    """A_{n,n-1} = sum_{la,lb} sqrt(b_n b_{n-1}); factorizes into separate arm sums."""
    n = s.n_photons
    if n > BAYES_MAX_N:
        raise ScaleLimit(f"cost matrix limited to N <= {BAYES_MAX_N}")
    if n == 0:
        return BayesCostMatrix(np.zeros(0))
    k = np.arange(1, n + 1)
    arm_a = _overlap_sum(k, k - 1, s.eta_a)  # photons n and n-1 in arm a
    arm_b = _overlap_sum(n - k, n - k + 1, s.eta_b)
    return BayesCostMatrix(np.clip(arm_a * arm_b, 0.0, 1.0))


def _overlap_sum(m1: np.ndarray, m2: np.ndarray, eta: float) -> np.ndarray:
    """sum_l sqrt(P(l | m1) P(l | m2)) for binomial loss, elementwise over m1, m2."""
    if eta == 1.0:
        return np.ones(m1.shape)
    lmax = int(np.max(np.minimum(m1, m2))) if m1.size else 0
    l = np.arange(lmax + 1)[None, :]
    a, b = m1[:, None], m2[:, None]
    valid = (l <= a) & (l <= b)
    la = np.where(valid, l, 0)
    log_eta, log_loss = np.log(eta), np.log1p(-eta)
    logp1 = _log_binom(a, np.minimum(la, a)) + (a - la) * log_eta + la * log_loss
    logp2 = _log_binom(b, np.minimum(la, b)) + (b - la) * log_eta + la * log_loss
    terms = np.where(valid, np.exp(0.5 * (logp1 + logp2)), 0.0)
    return terms.sum(axis=1)


def _top_eigenpair(offdiag: np.ndarray) -> tuple[float, np.ndarray]:
    n = offdiag.size + 1
    if n == 1:
        return 0.0, np.ones(1)
    w, v = eigh_tridiagonal(np.zeros(n), offdiag, select="i", select_range=(n - 1, n - 1), lapack_driver="stebz")
    vec = v[:, 0]
    vec = vec * np.sign(vec[np.argmax(np.abs(vec))])
    return float(w[0]), np.clip(vec, 0.0, None) / np.linalg.norm(np.clip(vec, 0.0, None))


def bayes_minimal_cost(s: LossSetting) -> tuple[float, TwoModeState]:
    """Minimal flat-prior average cost 2 - lambda_max(A) and the optimal real input."""
    a = bayes_cost_matrix(s)
    lam, vec = _top_eigenpair(a.offdiag)
    return 2.0 - lam, TwoModeState(vec)


def bayes_lower_bound(s: LossSetting) -> float:
    """2 [1 - max_n A_{n,n-1} cos(pi/(N+2))], valid for any loss."""
    a = bayes_cost_matrix(s)
    top = float(np.max(a.offdiag)) if a.offdiag.size else 0.0
    return 2.0 * (1.0 - top * np.cos(np.pi / (s.n_photons + 2)))


def bayes_classical_cost(s: LossSetting, tau_in: float) -> float:
    """Average cost of a phase-averaged coherent state with mean photon number N split tau_in : 1 - tau_in."""
    if not 0.0 < tau_in < 1.0:
        raise InvalidParameter("tau_in must lie in (0, 1)")
    n = s.n_photons
    xa = n * s.eta_a * tau_in
    xb = n * s.eta_b * (1.0 - tau_in)
    return float(2.0 - 2.0 * bell_half(xa) * bell_half(xb) / (n * np.sqrt(s.eta_a * tau_in * s.eta_b * (1.0 - tau_in))))


def optimal_classical_split(s: LossSetting) -> tuple[float, float]:
    """(tau_opt, cost) minimizing the coherent-state cost over the input splitting."""
    res = minimize_scalar(lambda t: bayes_classical_cost(s, t), bounds=(1e-9, 1 - 1e-9), method="bounded", options={"xatol": 1e-10})
    return float(res.x), float(res.fun)


def classical_noiseless_bayes_cost(n: int) -> float:
    """2 (1 - 2^-N sum_n sqrt(C(N,n) C(N,n-1))) for N uncorrelated photons."""
    if n < 1:
        raise InvalidParameter("N must be positive")
    k = np.arange(1, n + 1)
    logs = 0.5 * (_log_binom(n, k) + _log_binom(n, k - 1)) - n * np.log(2.0)
    return float(2.0 * (1.0 - np.sum(np.exp(logs))))


def noiseless_bayes_cost(n: int) -> float:
    """Berry-Wiseman minimal cost 2 (1 - cos(pi/(N+2)))."""
    return float(2.0 * (1.0 - np.cos(np.pi / (n + 2))))


# noiseless two-mode examples ----------------------------------------------------


def noiseless_two_mode_qfi(psi: TwoModeState) -> float:
    """4 Var(n) of the photon number in arm a."""
    x = psi.weights
    n = np.arange(x.size, dtype=float)
    mean = x @ n
    return float(max(4.0 * (x @ (n - mean) ** 2), 0.0))


def parity_fi(n: int, phi: float) -> float:
    """Classical FI of parity detection on a noiseless NOON state: outcomes cos^2(N phi/2), sin^2(N phi/2)."""
    p = np.array([np.cos(n * phi / 2) ** 2, np.sin(n * phi / 2) ** 2])
    dp = np.array([-n * np.sin(n * phi) / 2, n * np.sin(n * phi) / 2])
    return classical_fi(p, dp)


@dataclass(frozen=True)
class BinomialRecord:
    n: int
    k: int
    fi: float
    ml: float
    local_efficient: float | None
    bayes_h: float
    avg_cost_h: float
    p_mmse: float
    p_avg_mse: float


def _arccot(x: float) -> float:
    """Inverse cotangent on (0, pi)."""
    return float(np.pi / 2 - np.arctan(x))


def _gamma_ratio(n: int, k: np.ndarray) -> np.ndarray:
    """Gamma(k+1/2) Gamma(N-k+1/2) / (k! (N-k)!)."""
    return np.exp(gammaln(k + 0.5) + gammaln(n - k + 0.5) - gammaln(k + 1.0) - gammaln(n - k + 1.0))


def binomial_ml(n: int, k: int) -> float:
    """ML phase on [0, pi] for k of N photons in the cos^2(phi/2) port."""
    return float(2.0 * np.arctan2(np.sqrt(n - k), np.sqrt(k)))


def binomial_local_estimator(n: int, k: int, phi0: float) -> float:
    """Locally unbiased efficient estimator phi0 + cot(phi0/2) - 2k/(N sin phi0)."""
    if np.isclose(np.sin(phi0), 0.0, atol=1e-12):
        raise PathologicalPoint("local estimator diverges where the outcome is deterministic")
    return float(phi0 + 1.0 / np.tan(phi0 / 2) - 2.0 * k / (np.sin(phi0) * n))


def binomial_bayes_estimator(n: int, k: int) -> float:
    """Flat-prior estimator on [0, pi] minimizing the 2(1 - cos) cost."""
    return _arccot((k - n / 2) * float(_gamma_ratio(n, np.array(float(k)))))


def binomial_avg_cost(n: int) -> float:
    """Average cost of the optimal flat-prior estimator."""
    k = np.arange(n + 1, dtype=float)
    terms = np.sqrt(4.0 + ((n - 2 * k) * _gamma_ratio(n, k)) ** 2)
    return float(2.0 * (1.0 - terms.sum() / (np.pi * (n + 1))))


def binomial_suite(n: int, k: int, phi0: float | None = None) -> BinomialRecord:
    """Frequentist and Bayesian estimators for k of N photons in one output port."""
    if n < 1 or not 0 <= k <= n:
        raise InvalidParameter("need N >= 1 and 0 <= k <= N")
    local = None if phi0 is None else binomial_local_estimator(n, k, phi0)
    return BinomialRecord(
        n=n,
        k=k,
        fi=float(n),
        ml=binomial_ml(n, k),
        local_efficient=local,
        bayes_h=binomial_bayes_estimator(n, k),
        avg_cost_h=binomial_avg_cost(n),
        p_mmse=(k + 1) / (n + 2),
        p_avg_mse=1.0 / (6 * (n + 2)),
    )


def binomial_fi(n: int, phi: float) -> float:
    """Classical FI of the binomial photon-count distribution at phi (equals N away from 0, pi)."""
    k = np.arange(n + 1)
    c2, s2 = np.cos(phi / 2) ** 2, np.sin(phi / 2) ** 2
    logc = _log_binom(n, k)
    p = np.exp(logc) * c2**k * s2 ** (n - k)
    # d/dphi of c2^k s2^(N-k): derivative of c2 is -sin(phi)/2, of s2 is +sin(phi)/2
    with np.errstate(divide="ignore", invalid="ignore"):
        score = np.where(p > 0, -k * np.sin(phi) / (2 * c2) + (n - k) * np.sin(phi) / (2 * s2), 0.0)
    return classical_fi(p, p * score)
