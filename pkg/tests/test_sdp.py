import numpy as np
import pytest

from metrobounds import sdp
from metrobounds.errors import EqualityInconsistent, Infeasible, Unbounded


def _scalar_block(value, coeffs):
    return (np.array([[value]], dtype=complex), np.array(coeffs, dtype=complex).reshape(-1, 1, 1))


def test_linear_program_as_diagonal_lmi():
    # minimize x subject to x >= 2
    p = sdp.SdpProblem.build([1.0], [_scalar_block(-2.0, [1.0])])
    sol = sdp.solve(p)
    assert sol.primal_value == pytest.approx(2.0, abs=1e-8)
    assert sol.gap <= 1e-8


def test_operator_norm_via_lmi():
    # min t s.t. t I - A >= 0 equals lambda_max(A) for Hermitian A
    a = np.array([[1.0, 2.0 - 1.0j], [2.0 + 1.0j, -0.5]])
    p = sdp.SdpProblem.build([1.0], [(-a, np.eye(2)[None])])
    sol = sdp.solve(p)
    assert sol.primal_value == pytest.approx(np.linalg.eigvalsh(a)[-1], abs=1e-7)
    cert = sdp.check_certificate(p, sol)
    assert cert.worst_eigenvalue >= -1e-9
    assert min(np.linalg.eigvalsh(z)[0] for z in sol.duals) >= -1e-9


def test_schur_complement_norm():
    # min t s.t. [[t, v^dag], [v, I]] >= 0 gives |v|^2
    v = np.array([1.0, 2.0j, -0.5])
    f0 = np.zeros((4, 4), dtype=complex)
    f0[1:, 0] = v
    f0[0, 1:] = v.conj()
    f0[1:, 1:] = np.eye(3)
    f1 = np.zeros((4, 4), dtype=complex)
    f1[0, 0] = 1.0
    sol = sdp.solve(sdp.SdpProblem.build([1.0], [(f0, f1[None])]))
    assert sol.primal_value == pytest.approx(np.vdot(v, v).real, abs=1e-7)


def test_equalities_eliminated():
    # minimize x + y s.t. x >= 0, y >= 0, x - y = 1
    blocks = [_scalar_block(0.0, [1.0, 0.0]), _scalar_block(0.0, [0.0, 1.0])]
    sol = sdp.solve(sdp.SdpProblem.build([1.0, 1.0], blocks, a_eq=[[1.0, -1.0]], b_eq=[1.0]))
    assert sol.primal_value == pytest.approx(1.0, abs=1e-7)
    assert sol.x[0] - sol.x[1] == pytest.approx(1.0, abs=1e-9)


def test_inconsistent_equalities():
    blocks = [_scalar_block(1.0, [1.0])]
    with pytest.raises(EqualityInconsistent):
        sdp.solve(sdp.SdpProblem.build([1.0], blocks, a_eq=[[1.0], [1.0]], b_eq=[0.0, 1.0]))


def test_unbounded_and_infeasible():
    with pytest.raises(Unbounded):
        sdp.solve(sdp.SdpProblem.build([1.0, 1.0], [_scalar_block(0.0, [1.0, 0.0])]))
    with pytest.raises(Infeasible):
        sdp.solve(sdp.SdpProblem.build([0.0], [_scalar_block(-1.0, [0.0])]))


def test_env_gap_tolerance(monkeypatch):
    monkeypatch.setenv("METRO_SDP_TOL", "1e-6")
    assert sdp.default_gap_tol() == 1e-6
    monkeypatch.delenv("METRO_SDP_TOL")
    assert sdp.default_gap_tol() == sdp.DEFAULT_GAP_TOL
