"""Channel geometry: extremality, parameter-extremality and classical simulation."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .channels import ChoiMatrix, KrausSet
from .errors import NotClassicallySimulable, UnboundedEpsilon
from .numerics import SUPPORT_RTOL, in_support, pinv_sqrt
from .reports import BoundReport

GRAM_RTOL = 1e-8


@dataclass(frozen=True)
class CsDecomposition:
    eps_plus: float
    eps_minus: float

    @property
    def bound(self) -> float:
        return 1.0 / (self.eps_plus * self.eps_minus)


def is_extremal(k: KrausSet, tol: float | None = None) -> bool:
    """True when the r^2 operators K_i^dag K_j are linearly independent."""
    prods = np.einsum("iab,jac->ijbc", k.kraus.conj(), k.kraus).reshape(k.rank**2, -1)
    gram = prods.conj() @ prods.T
    w = np.linalg.eigvalsh(0.5 * (gram + gram.conj().T))
    if tol is None:
        tol = GRAM_RTOL * max(float(np.max(np.real(np.diag(gram)))), 1e-300)
    return bool(np.all(w > tol))


def is_phi_nonextremal(c: ChoiMatrix, tol: float = SUPPORT_RTOL) -> bool:
    """True when the Choi derivative lies within the support of the Choi matrix."""
    return in_support(c.omega, c.domega, tol)


def cs_epsilons(c: ChoiMatrix) -> CsDecomposition:
    """Largest steps eps_+/- keeping Omega +/- eps Omega-dot positive semidefinite."""
    if not is_phi_nonextremal(c):
        raise NotClassicallySimulable("Choi derivative leaves the support")
    s = pinv_sqrt(c.omega)
    m = s @ c.domega @ s
    w = np.linalg.eigvalsh(0.5 * (m + m.conj().T))
    scale = 1e-12 * max(np.max(np.abs(w)), 1.0)
    lo, hi = w[0], w[-1]
    if lo >= -scale or hi <= scale:
        raise UnboundedEpsilon("Choi derivative is semidefinite, one of eps_+/- is infinite")
    return CsDecomposition(eps_plus=1.0 / abs(lo), eps_minus=1.0 / hi)


def cs_bound(c: ChoiMatrix) -> BoundReport:
    """Two-point classical-simulation bound 1/(eps_+ eps_-)."""
    try:
        dec = cs_epsilons(c)
    except NotClassicallySimulable:
        return BoundReport("cs", None, "phi_extremal")
    except UnboundedEpsilon:
        return BoundReport("cs", None, "not_simulable")
    note = "optimal two-point simulation" if c.param == "phase" else "valid simulation, optimality not certified"
    return BoundReport(
        "cs",
        float(dec.bound),
        extra={"eps_plus": dec.eps_plus, "eps_minus": dec.eps_minus, "note": note},
    )
