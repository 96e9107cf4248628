"""Polar decomposition of Dirac spinors.

A non-singular spinor is written as

    psi = phi * exp(-i beta pi / 2) * exp(i gauge_phase) * L^{-1} (1, 0, 1, 0)^T

with phi > 0 the module, beta the chiral angle and L the spinor
transformation taking psi to its rest frame with spin along the third axis.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .clifford import ETA, REST_SPINOR, SpinGroupElement, build_gamma_basis, exp_spin, lorentz_of_spin
from .errors import InvalidPolarData, NotSpinGroup, SingularSpinor
from .observables import as_components, bilinears

SINGULAR_REL = 1e-12


@dataclass(frozen=True, eq=False)
class PolarData:
    phi: float
    beta: float
    u: np.ndarray  # u^a
    s: np.ndarray  # s^a
    L: SpinGroupElement
    gauge_phase: float = 0.0

    @property
    def frame_lorentz(self) -> np.ndarray:
        """Real transform carrying (1,0,0,0) to u and (0,0,0,1) to s."""
        return ETA @ self.L.Lambda.T @ ETA

    def invariant_residuals(self) -> dict[str, float]:
        u, s = self.u, self.s
        lam = self.frame_lorentz
        return {
            "norm_u": abs(u @ ETA @ u - 1.0),
            "norm_s": abs(s @ ETA @ s + 1.0),
            "orthogonal": abs(u @ ETA @ s),
            "frame_u": float(np.abs(lam[:, 0] - u).max()),
            "frame_s": float(np.abs(lam[:, 3] - s).max()),
        }


def _rotation_taking_z_to(n: np.ndarray) -> SpinGroupElement:
    axis = np.array([-n[1], n[0], 0.0])
    sin = float(np.linalg.norm(axis))
    cos = float(n[2])
    if sin < 1e-15:
        if cos > 0:
            return exp_spin()
        return exp_spin(angles=(math.pi, 0.0, 0.0))
    return exp_spin(angles=math.atan2(sin, cos) * axis / sin)


def frame_transform(u: np.ndarray, s: np.ndarray) -> SpinGroupElement:
    """Boost-then-rotate transformation whose Lorentz part maps e0 -> u and e3 -> s."""
    p = np.asarray(u[1:], dtype=float)
    pn = float(np.linalg.norm(p))
    if pn > 0.0:
        boost = exp_spin(rapidities=math.asinh(pn) * p / pn)
    else:
        boost = exp_spin()
    s_rest = ETA @ boost.Lambda.T @ ETA @ np.asarray(s, dtype=float)
    n = s_rest[1:] / np.linalg.norm(s_rest[1:])
    return boost @ _rotation_taking_z_to(n)


def polar_decompose(psi, rel: float = SINGULAR_REL) -> PolarData:
    psi = as_components(psi)
    b = bilinears(psi)
    norm2 = b.Theta ** 2 + b.Phi ** 2
    if norm2 <= rel * float(np.vdot(psi, psi).real) ** 2:
        raise SingularSpinor("Theta^2 + Phi^2 vanishes: flag-type spinor has no polar form")
    two_phi2 = math.sqrt(norm2)
    phi = math.sqrt(two_phi2 / 2.0)
    beta = math.atan2(b.Theta, b.Phi)
    u = b.U / two_phi2
    s = b.S / two_phi2
    S_f = frame_transform(u, s)
    cand = _chiral(beta) @ (phi * S_f.S @ REST_SPINOR)
    mags = np.abs(psi)
    k = int(np.argmax(mags > 0.5 * mags.max()))
    gauge = float(np.angle(psi[k] / cand[k]))
    return PolarData(phi=phi, beta=beta, u=u, s=s, L=S_f.inverse(), gauge_phase=gauge)


def _chiral(beta: float) -> np.ndarray:
    pi = build_gamma_basis().pi
    # pi^2 = 1, so exp(-i beta pi / 2) = cos(beta/2) - i sin(beta/2) pi
    return math.cos(beta / 2) * np.eye(4) - 1j * math.sin(beta / 2) * pi


def polar_reconstruct(p: PolarData, tol: float = 1e-8) -> np.ndarray:
    res = p.invariant_residuals()
    bad = {k: v for k, v in res.items() if not v <= tol}
    if bad or not p.phi >= 0.0:
        raise InvalidPolarData(f"polar data violates its constraints: {bad or {'phi': p.phi}}")
    Linv = np.linalg.inv(p.L.S)
    return p.phi * np.exp(1j * p.gauge_phase) * (_chiral(p.beta) @ (Linv @ REST_SPINOR))


def real_lorentz_of(L, tol: float = 1e-6) -> np.ndarray:
    """Lambda with L gamma^j L^{-1} Lambda^i_j = gamma^i."""
    S = L.S if isinstance(L, SpinGroupElement) else np.asarray(L, dtype=complex)
    try:
        lam = lorentz_of_spin(S)
    except np.linalg.LinAlgError as exc:
        raise NotSpinGroup("matrix is not invertible") from exc
    defect = float(np.abs(lam.T @ ETA @ lam - ETA).max())
    if not defect <= tol:
        raise NotSpinGroup(f"extracted Lambda fails Lambda^T eta Lambda = eta by {defect:.2e}")
    return lam
