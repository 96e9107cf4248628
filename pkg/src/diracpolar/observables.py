"""Spinor bilinears and the Fierz-type relations between them."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .clifford import EPS_LOWER, EPS_UPPER, ETA, build_gamma_basis
from .errors import NonRealBilinear, SingularSpinor

IMAG_TOLERANCE = 1e-10


@dataclass(frozen=True)
class Spinor:
    """Four complex components in the frame named by ``frame``."""

    components: np.ndarray
    frame: str = "tetrad"

    def __post_init__(self):
        comp = np.asarray(self.components, dtype=complex).reshape(4)
        if not np.all(np.isfinite(comp)):
            raise ValueError("spinor components must be finite")
        object.__setattr__(self, "components", comp)

    def __array__(self, dtype=None, copy=None):
        return self.components if dtype is None else self.components.astype(dtype)


def as_components(psi) -> np.ndarray:
    if isinstance(psi, Spinor):
        return psi.components
    comp = np.asarray(psi, dtype=complex)
    if comp.shape != (4,):
        raise ValueError(f"a spinor has 4 components, got shape {comp.shape}")
    return comp


@dataclass(frozen=True)
class Bilinears:
    Theta: float
    Phi: float
    U: np.ndarray  # U^a
    S: np.ndarray  # S^a
    M: np.ndarray  # M^{ab}
    Sigma: np.ndarray  # Sigma^{ab}

    @property
    def scale(self) -> float:
        return max(1.0, self.Theta ** 2 + self.Phi ** 2)


def _bilinear_tables():
    b = build_gamma_basis()
    # kernels K such that the bilinear is psi^dagger K psi
    g0 = b.gamma[0]
    return {
        "Phi": g0,
        "Theta": 1j * g0 @ b.pi,
        "U": np.einsum("ij,ajk->aik", g0, b.gamma),
        "S": np.einsum("ij,ajk,kl->ail", g0, b.gamma, b.pi),
        "M": 2j * np.einsum("ij,abjk->abik", g0, b.sigma),
        "Sigma": 2.0 * np.einsum("ij,abjk,kl->abil", g0, b.sigma, b.pi),
    }


KERNELS = _bilinear_tables()


def _contract(kernel: np.ndarray, left: np.ndarray, right: np.ndarray) -> np.ndarray:
    return np.einsum("i,...ij,j->...", np.conj(left), kernel, right)


def bilinears(psi, *, strict: bool = True) -> Bilinears:
    psi = as_components(psi)
    raw = {name: _contract(k, psi, psi) for name, k in KERNELS.items()}
    if strict:
        scale = max(1.0, float(np.vdot(psi, psi).real) ** 2)
        worst = max(float(np.abs(np.imag(v)).max()) for v in raw.values())
        if worst > IMAG_TOLERANCE * scale:
            raise NonRealBilinear(f"imaginary residue {worst:.3e} in a bilinear; gamma basis broken?")
    r = {k: np.real(v) for k, v in raw.items()}
    return Bilinears(Theta=float(r["Theta"]), Phi=float(r["Phi"]), U=r["U"], S=r["S"],
                     M=r["M"], Sigma=r["Sigma"])


def bilinear_derivatives(psi: np.ndarray, dpsi: np.ndarray) -> dict[str, np.ndarray]:
    """Derivatives of every bilinear given d psi along a leading axis.

    ``dpsi`` has shape (n, 4); each returned array gets that leading axis.
    """
    out = {}
    for name, k in KERNELS.items():
        term = np.einsum("ni,...ij,j->n...", np.conj(dpsi), k, psi)
        term = term + np.einsum("i,...ij,nj->n...", np.conj(psi), k, dpsi)
        out[name] = np.real(term)
    return out


def fierz_residuals(b: Bilinears) -> dict[str, float]:
    """Residuals of the quadratic identities, relative to max(1, Theta^2 + Phi^2)."""
    U_l, S_l = ETA @ b.U, ETA @ b.S
    M_l = ETA @ b.M @ ETA
    norm2 = b.Theta ** 2 + b.Phi ** 2
    scale = b.scale
    m_rhs = (b.Phi * np.einsum("j,k,jkab->ab", b.U, b.S, EPS_LOWER)
             + b.Theta * (np.outer(U_l, S_l) - np.outer(S_l, U_l)))
    hodge = -0.5 * np.einsum("abij,ab->ij", EPS_UPPER, M_l)
    uu = float(b.U @ U_l)
    ss = float(b.S @ S_l)
    return {
        "M": float(np.abs(M_l * norm2 - m_rhs).max()) / scale,
        "norm_U": abs(uu - norm2) / scale,
        "norm_S": abs(ss + norm2) / scale,
        "orthogonal": abs(float(b.U @ S_l)) / scale,
        "hodge": float(np.abs(b.Sigma - hodge).max()) / scale,
    }


def is_singular(psi, rel: float = 1e-12) -> bool:
    psi = as_components(psi)
    b = bilinears(psi, strict=False)
    norm4 = float(np.vdot(psi, psi).real) ** 2
    return b.Theta ** 2 + b.Phi ** 2 <= rel * norm4


def aux_residual(psi, *, normalized: bool = False) -> float:
    """Norm of 2 U_m S_n sigma^{mn} pi psi + U^2 psi, or of the unit-vector form."""
    basis = build_gamma_basis()
    psi = as_components(psi)
    b = bilinears(psi)
    U_l, S_l = ETA @ b.U, ETA @ b.S
    if not normalized:
        op = 2.0 * np.einsum("m,n,mnij->ij", U_l, S_l, basis.sigma) @ basis.pi
        return float(np.linalg.norm(op @ psi + float(b.U @ U_l) * psi))
    if is_singular(psi):
        raise SingularSpinor("normalized aux relation needs Theta^2 + Phi^2 > 0")
    two_phi2 = np.sqrt(b.Theta ** 2 + b.Phi ** 2)
    u, s = U_l / two_phi2, S_l / two_phi2
    wedge = np.outer(u, s) - np.outer(s, u)
    op = np.einsum("mn,mnij->ij", wedge, basis.sigma) @ basis.pi
    return float(np.linalg.norm(op @ psi + psi))


def random_spinors(n: int, seed: int = 0) -> np.ndarray:
    """(n, 4) spinors with real and imaginary parts uniform in [-1, 1]."""
    rng = np.random.default_rng(seed)
    return rng.uniform(-1.0, 1.0, (n, 4)) + 1j * rng.uniform(-1.0, 1.0, (n, 4))
