"""Small dense semidefinite programs with complex Hermitian LMI blocks.

Problems are stated as

    minimize  c.x  subject to  F0_k + sum_i x_i F_i_k >= 0  for every block k,
                               A x = b  (optional),

with real decision variables and Hermitian F matrices. Equalities are removed
by a nullspace parametrization, directions that leave every block unchanged
are projected out, and the reduced problem is handed to the cvxopt cone
solver after the usual realification  H -> [[Re H, -Im H], [Im H, Re H]].
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field

import cvxopt
import cvxopt.solvers
import numpy as np

from .errors import (
    EqualityInconsistent,
    Infeasible,
    MaxIterations,
    NumericalBreakdown,
    Unbounded,
)

DEFAULT_GAP_TOL = 1e-9
DEFAULT_MAX_ITER = 200
EQ_RESIDUAL_RTOL = 1e-8
PSD_TOL = 1e-9
FEASTOL_LADDER = (1e-10, 1e-9, 1e-8)


def default_gap_tol() -> float:
    """Gap tolerance, overridable through the METRO_SDP_TOL environment variable."""
    raw = os.environ.get("METRO_SDP_TOL")
    return float(raw) if raw else DEFAULT_GAP_TOL


@dataclass(frozen=True)
class LmiBlock:
    f0: np.ndarray
    fs: np.ndarray  # shape (nvars, d, d)

    @property
    def dim(self) -> int:
        return self.f0.shape[0]

    def evaluate(self, x) -> np.ndarray:
        return self.f0 + np.tensordot(np.asarray(x, dtype=float), self.fs, axes=1)


@dataclass(frozen=True)
class SdpProblem:
    c: np.ndarray
    blocks: tuple[LmiBlock, ...]
    a_eq: np.ndarray | None = None
    b_eq: np.ndarray | None = None

    @property
    def nvars(self) -> int:
        return self.c.shape[0]

    @classmethod
    def build(cls, c, blocks, a_eq=None, b_eq=None) -> "SdpProblem":
        c = np.asarray(c, dtype=float)
        lmis = []
        for f0, fs in blocks:
            f0 = np.asarray(f0, dtype=complex)
            fs = np.asarray(fs, dtype=complex).reshape(len(c), *f0.shape)
            lmis.append(LmiBlock(f0, fs))
        if a_eq is not None:
            a_eq = np.atleast_2d(np.asarray(a_eq, dtype=float))
            b_eq = np.asarray(b_eq, dtype=float).ravel()
        return cls(c, tuple(lmis), a_eq, b_eq)


@dataclass(frozen=True)
class SdpSolution:
    x: np.ndarray
    primal_value: float
    dual_value: float
    gap: float
    iterations: int
    status: str
    duals: tuple[np.ndarray, ...] = field(default=(), repr=False)


@dataclass(frozen=True)
class CertificateReport:
    min_eigenvalues: tuple[float, ...]
    slackness: tuple[float, ...]
    gap: float

    @property
    def worst_eigenvalue(self) -> float:
        return min(self.min_eigenvalues)


def _realify(h: np.ndarray) -> np.ndarray:
    re, im = h.real, h.imag
    return np.block([[re, -im], [im, re]])


def _complexify(z: np.ndarray) -> np.ndarray:
    d = z.shape[0] // 2
    a, b, c, e = z[:d, :d], z[:d, d:], z[d:, :d], z[d:, d:]
    return (a + e) + 1j * (c - b)


def _eliminate_equalities(p: SdpProblem):
    n = p.nvars
    if p.a_eq is None or p.a_eq.size == 0:
        return np.zeros(n), np.eye(n)
    a, b = p.a_eq, p.b_eq
    x0, *_ = np.linalg.lstsq(a, b, rcond=None)
    resid = np.linalg.norm(a @ x0 - b)
    if resid > EQ_RESIDUAL_RTOL * max(np.linalg.norm(b), 1e-300):
        raise EqualityInconsistent(f"equality residual {resid:.3e}")
    _, s, vt = np.linalg.svd(a)
    rank = int(np.sum(s > 1e-12 * (s[0] if s.size else 1.0)))
    return x0, vt[rank:].T


def solve(p: SdpProblem, gap_tol: float | None = None, max_iter: int = DEFAULT_MAX_ITER) -> SdpSolution:
    """Minimize c.x over the LMI-feasible set; raises a SolverFailure subclass on failure.

    A solution is accepted when the duality gap is at most gap_tol * max(1, |c.x|) and
    every block is PSD to within PSD_TOL.
    """
    gap_tol = default_gap_tol() if gap_tol is None else gap_tol
    x0, z_eq = _eliminate_equalities(p)
    offset = float(p.c @ x0)

    f0s, gcols = [], []
    for blk in p.blocks:
        f0 = blk.evaluate(x0)
        fs = np.tensordot(z_eq.T, blk.fs, axes=1)
        f0s.append(_realify(f0))
        gcols.append(np.array([_realify(f).ravel(order="F") for f in fs]).T.reshape(-1, fs.shape[0]))
    g_all = np.vstack(gcols)
    c_red = z_eq.T @ p.c

    # drop directions that no block depends on
    if g_all.shape[1]:
        _, s, vt = np.linalg.svd(g_all, full_matrices=True)
        rank = int(np.sum(s > 1e-12 * max(s[0], 1e-300))) if s.size else 0
    else:
        vt, rank = np.zeros((0, 0)), 0
    null = vt[rank:]
    if null.size and np.max(np.abs(null @ c_red)) > 1e-10 * max(np.linalg.norm(c_red), 1.0):
        raise Unbounded("objective decreases along a direction free of constraints")
    w = vt[:rank].T

    if rank == 0:
        for f in f0s:
            if np.linalg.eigvalsh(f)[0] < -1e-9:
                raise Infeasible("constant LMI block is not PSD")
        x = x0.copy()
        return SdpSolution(x, offset, offset, 0.0, 0, "optimal", tuple())

    c_cvx = cvxopt.matrix(w.T @ c_red)
    gs, hs = [], []
    start = 0
    for f0 in f0s:
        rows = f0.size
        gs.append(cvxopt.matrix(-(g_all[start : start + rows] @ w)))
        hs.append(cvxopt.matrix(f0))
        start += rows
    best_err: Exception | None = None
    # cvxopt can stall just above a tight feasibility tolerance and then diverge,
    # so the tolerance is relaxed step by step and every candidate is re-verified
    for feastol in FEASTOL_LADDER:
        opts = {
            "show_progress": bool(os.environ.get("METRO_SDP_DEBUG")),
            "maxiters": int(max_iter),
            "abstol": gap_tol * 0.1,
            "reltol": 1e-10,
            "refinement": 2,
            "feastol": feastol,
        }
        try:
            res = cvxopt.solvers.sdp(c_cvx, Gs=gs, hs=hs, options=opts)
        except (ArithmeticError, ValueError) as exc:
            best_err = NumericalBreakdown(str(exc))
            continue
        status = res["status"]
        if status == "primal infeasible":
            raise Infeasible("LMI constraints admit no feasible point")
        if status == "dual infeasible":
            raise Unbounded("objective unbounded below")
        if res["x"] is None or res["dual objective"] is None:
            best_err = NumericalBreakdown(f"solver returned no iterate (status {status})")
            continue
        y = np.array(res["x"]).ravel()
        x = x0 + z_eq @ (w @ y)
        primal = float(p.c @ x)
        dual = float(res["dual objective"]) + offset
        gap = abs(primal - dual)
        iters = int(res.get("iterations", 0))
        worst = min(np.linalg.eigvalsh(0.5 * (f + f.conj().T))[0] for f in (b.evaluate(x) for b in p.blocks))
        if np.isfinite(gap) and gap <= gap_tol * max(1.0, abs(primal)) and worst >= -PSD_TOL:
            duals = tuple(_complexify(np.array(z)) for z in res["zs"])
            return SdpSolution(x, primal, dual, gap, iters, status, duals)
        if iters >= max_iter:
            best_err = MaxIterations(f"gap {gap:.3e}, min eigenvalue {worst:.3e} after {iters} iterations")
        else:
            best_err = NumericalBreakdown(f"stalled with gap {gap:.3e}, min eigenvalue {worst:.3e}")
    raise best_err


def check_certificate(p: SdpProblem, s: SdpSolution) -> CertificateReport:
    """Recompute block feasibility, complementary slackness and the duality gap at ``s.x``."""
    mins, slack = [], []
    for k, blk in enumerate(p.blocks):
        f = blk.evaluate(s.x)
        f = 0.5 * (f + f.conj().T)
        mins.append(float(np.linalg.eigvalsh(f)[0]))
        if k < len(s.duals):
            slack.append(float(abs(np.trace(f @ s.duals[k]).real)))
        else:
            slack.append(0.0)
    gap = abs(float(p.c @ s.x) - s.dual_value)
    return CertificateReport(tuple(mins), tuple(slack), gap)
