"""Result record shared by every bound computation."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any

import numpy as np

APPLICABILITY = ("ok", "phi_extremal", "beta_condition_unsatisfiable", "alpha_not_scalar", "not_simulable")


@dataclass(frozen=True)
class BoundReport:
    method: str
    value: float | None
    applicability: str = "ok"
    h_opt: np.ndarray | None = field(default=None, repr=False)
    sdp_gap: float | None = None
    beta_norm: float | None = None
    alpha_eigs: tuple[float, ...] | None = None
    extra: dict[str, Any] = field(default_factory=dict)

    @property
    def applicable(self) -> bool:
        return self.applicability == "ok"

    def certificate(self) -> dict[str, Any]:
        cert: dict[str, Any] = {"applicability": self.applicability}
        if self.sdp_gap is not None:
            cert["sdp_gap"] = self.sdp_gap
        if self.beta_norm is not None:
            cert["beta_norm"] = self.beta_norm
        if self.alpha_eigs is not None:
            cert["alpha_eigs"] = list(self.alpha_eigs)
        cert.update(self.extra)
        return cert
