import numpy as np
import pytest

from metrobounds.channels import NoiseModel, make_noise_channel

MODELS = ("dephasing", "depolarization", "loss", "spontaneous_emission")
ETA_GRID = tuple(round(0.1 * i, 1) for i in range(1, 10))

_ACCEPTANCE: dict[int, tuple[bool, str]] = {}


def random_pure(rng, d):
    v = rng.normal(size=d) + 1j * rng.normal(size=d)
    return v / np.linalg.norm(v)


def random_density(rng, d, rank=None):
    rank = d if rank is None else rank
    g = rng.normal(size=(d, rank)) + 1j * rng.normal(size=(d, rank))
    rho = g @ g.conj().T
    return rho / np.trace(rho).real


def phase_channel(model, eta, point=None):
    return make_noise_channel(NoiseModel(model, eta), "phase", point)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def acceptance_record():
    def record(number: int, ok: bool, detail: str):
        _ACCEPTANCE[number] = (ok, detail)

    return record


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_ACCEPTANCE):
        ok, detail = _ACCEPTANCE[number]
        terminalreporter.write_line(f"criterion {number:2d}: {'PASS' if ok else 'FAIL'}  {detail}")
