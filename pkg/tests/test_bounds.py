import numpy as np
import pytest

from conftest import MODELS, phase_channel
from metrobounds import bounds
from metrobounds.channels import SIGMA_Z, choi_from_kraus, lossy_interferometer_channel, unitary_channel


def test_unitary_channel_qfi():
    k = unitary_channel(np.eye(2), SIGMA_Z / 2)
    assert bounds.channel_qfi(k).value == pytest.approx(1.0, abs=1e-9)
    assert bounds.unitary_channel_qfi([0.5, -0.5]) == 1.0


def test_unitary_ce_not_applicable():
    k = unitary_channel(np.eye(2), SIGMA_Z / 2)
    assert bounds.ce_bound(k).applicability == "beta_condition_unsatisfiable"


@pytest.mark.parametrize("model", MODELS)
def test_finite_n_tends_to_ce(model):
    k = phase_channel(model, 0.8)
    ce = bounds.ce_bound(k).value
    vals = [bounds.finite_n_ce(k, n).value for n in (1, 10, 1000)]
    assert vals[0] <= vals[1] <= vals[2] <= ce * (1 + 1e-7)
    assert vals[2] == pytest.approx(1000 * ce / (1000 + ce), rel=1e-5)


def test_ce_optimizer_has_zero_beta():
    rep = bounds.ce_bound(phase_channel("depolarization", 0.7))
    assert rep.beta_norm < 1e-6
    alpha, beta = bounds.alpha_beta_at(phase_channel("depolarization", 0.7), rep.h_opt)
    assert 4 * np.linalg.eigvalsh(alpha)[-1] == pytest.approx(rep.value, rel=1e-6)


def test_qs_certification():
    assert bounds.qs_bound(phase_channel("dephasing", 0.5)).applicable
    assert bounds.qs_bound(phase_channel("spontaneous_emission", 0.5)).applicability == "alpha_not_scalar"


def test_rld_states():
    assert bounds.rld_bound(choi_from_kraus(phase_channel("loss", 0.5))).applicability == "phi_extremal"
    assert bounds.rld_bound(choi_from_kraus(phase_channel("dephasing", 0.5))).value == pytest.approx(1 / 3)


def test_quantum_enhancement_dephasing():
    assert bounds.quantum_enhancement(phase_channel("dephasing", 0.6)) == pytest.approx(1 / np.sqrt(1 - 0.36), rel=1e-6)


def test_single_arm_interferometer_ce():
    # one lossless arm: per-photon CE bound 4 eta_a / (1 - eta_a) with eta_b = 1
    k = lossy_interferometer_channel(0.7, 1.0)
    assert bounds.ce_bound(k).value == pytest.approx(4 / (np.sqrt(0.3 / 0.7)) ** 2, rel=1e-6)


def test_all_bounds_keys():
    reps = bounds.all_bounds(phase_channel("dephasing", 0.5))
    assert set(reps) == {"channel_qfi", "extended_qfi", "rld", "ce", "qs", "cs"}
