import numpy as np
import pytest

from conftest import MODELS, phase_channel, random_density
from metrobounds.channels import (
    KrausSet,
    NoiseModel,
    SIGMA_Z,
    alpha_beta,
    apply,
    apply_derivative,
    canonical_kraus,
    choi_from_kraus,
    lossy_interferometer_channel,
    make_noise_channel,
    rotate_kraus,
    tensor,
    unitary_channel,
)
from metrobounds.errors import DimensionMismatch, InvalidParameter, RankDeficientDerivative


@pytest.mark.parametrize("model", MODELS)
@pytest.mark.parametrize("param", ["phase", "strength"])
def test_trace_preserving(model, param):
    k = make_noise_channel(NoiseModel(model, 0.4), param)
    assert k.tp_residual() < 1e-12
    assert k.tp_derivative_residual() < 1e-12


def test_noise_model_validation():
    with pytest.raises(InvalidParameter):
        NoiseModel("bitflip", 0.5)
    with pytest.raises(InvalidParameter):
        NoiseModel("dephasing", 1.5)
    with pytest.raises(InvalidParameter):
        NoiseModel("lossy_interferometer", 0.5)
    with pytest.raises(InvalidParameter):
        make_noise_channel(NoiseModel("dephasing", 0.0), "strength")


def test_dephasing_shrinks_coherence():
    k = phase_channel("dephasing", 0.6)
    plus = 0.5 * np.ones((2, 2))
    out = apply(k, plus)
    assert abs(out[0, 1]) == pytest.approx(0.5 * 0.6)


def test_depolarization_action():
    k = make_noise_channel(NoiseModel("depolarization", 0.3), "strength")
    rho = np.diag([1.0, 0.0])
    assert np.allclose(apply(k, rho), 0.3 * rho + 0.7 * np.eye(2) / 2)
    assert np.allclose(apply_derivative(k, rho), rho - np.eye(2) / 2)


def test_loss_moves_population_to_vacuum():
    k = phase_channel("loss", 0.7)
    out = apply(k, np.diag([1.0, 0.0]))
    assert out.shape == (3, 3)
    assert out[2, 2].real == pytest.approx(0.3)


def test_choi_canonical_roundtrip(rng):
    for model in ("dephasing", "depolarization"):
        k = phase_channel(model, 0.5, point=0.3)
        kc = canonical_kraus(choi_from_kraus(k))
        rho = random_density(rng, 2)
        assert np.allclose(apply(k, rho), apply(kc, rho))
        assert np.allclose(apply_derivative(k, rho), apply_derivative(kc, rho))


def test_canonical_rejects_extremal_derivative():
    with pytest.raises(RankDeficientDerivative):
        canonical_kraus(choi_from_kraus(phase_channel("spontaneous_emission", 0.5)))


def test_rotation_preserves_action(rng):
    k = phase_channel("depolarization", 0.5)
    h = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
    kr = rotate_kraus(k, h + h.conj().T)
    rho = random_density(rng, 2)
    assert np.allclose(apply_derivative(k, rho), apply_derivative(kr, rho))
    with pytest.raises(DimensionMismatch):
        rotate_kraus(k, np.eye(2))


def test_unitary_alpha_beta():
    k = unitary_channel(np.eye(2), SIGMA_Z / 2)
    alpha, beta = alpha_beta(k)
    assert np.allclose(alpha, np.eye(2) / 4)
    assert np.allclose(beta, -SIGMA_Z / 2)


def test_tensor_product_rule(rng):
    k = make_noise_channel(NoiseModel("depolarization", 0.4), "strength")
    kk = tensor(k, k)
    r1, r2 = random_density(rng, 2), random_density(rng, 2)
    d = apply_derivative(kk, np.kron(r1, r2))
    expect = np.kron(apply_derivative(k, r1), apply(k, r2)) + np.kron(apply(k, r1), apply_derivative(k, r2))
    assert np.allclose(d, expect)


def test_lossy_interferometer_channel_validation():
    k = lossy_interferometer_channel(0.8, 0.5)
    assert k.tp_residual() < 1e-12
    with pytest.raises(InvalidParameter):
        lossy_interferometer_channel(0.0, 0.5)


def test_kraus_shape_checks():
    with pytest.raises(DimensionMismatch):
        KrausSet(np.zeros((1, 2, 2)), np.zeros((2, 2, 2)))
    with pytest.raises(DimensionMismatch):
        apply(phase_channel("dephasing", 0.5), np.eye(3))
