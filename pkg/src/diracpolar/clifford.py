"""Clifford algebra in the chiral representation.

Signature is (+,-,-,-) and the Levi-Civita symbol has eps_{0123} = +1.
World (frame) indices are the array axes; ``sigma[a, b]`` carries upper
indices, ``sigma_lower[a, b]`` lower ones.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy.linalg import expm

ETA = np.diag([1.0, -1.0, -1.0, -1.0])
IDENTITY = np.eye(4, dtype=complex)

PAULI = np.array(
    [
        [[0, 1], [1, 0]],
        [[0, -1j], [1j, 0]],
        [[1, 0], [0, -1]],
    ],
    dtype=complex,
)


def _levi_civita() -> np.ndarray:
    eps = np.zeros((4, 4, 4, 4))
    for perm in itertools.permutations(range(4)):
        inversions = sum(1 for i in range(4) for j in range(i + 1, 4) if perm[i] > perm[j])
        eps[perm] = -1.0 if inversions % 2 else 1.0
    return eps


#: eps_{abcd}, all indices down, eps_{0123} = +1
EPS_LOWER = _levi_civita()
#: eps^{abcd}; raising four indices with eta flips the sign
EPS_UPPER = -EPS_LOWER

#: the rest-frame, spin-up spinor every polar form is built on
REST_SPINOR = np.array([1, 0, 1, 0], dtype=complex)


@dataclass(frozen=True, eq=False)
class GammaBasis:
    gamma: np.ndarray  # (4, 4, 4): gamma^a
    pi: np.ndarray  # (4, 4)
    sigma: np.ndarray  # (4, 4, 4, 4): sigma^{ab}
    eta: np.ndarray = field(default_factory=lambda: ETA.copy())
    eps: np.ndarray = field(default_factory=lambda: EPS_LOWER.copy())

    @classmethod
    def from_gammas(cls, gamma: np.ndarray, pi: np.ndarray) -> "GammaBasis":
        gamma = np.asarray(gamma, dtype=complex)
        sigma = np.einsum("aij,bjk->abik", gamma, gamma)
        sigma = (sigma - sigma.transpose(1, 0, 2, 3)) / 4.0
        return cls(gamma=gamma, pi=np.asarray(pi, dtype=complex), sigma=sigma)

    @property
    def gamma_lower(self) -> np.ndarray:
        return np.einsum("ab,bij->aij", self.eta, self.gamma)

    @property
    def sigma_lower(self) -> np.ndarray:
        return np.einsum("ac,bd,cdij->abij", self.eta, self.eta, self.sigma)

    @property
    def gamma0(self) -> np.ndarray:
        return self.gamma[0]

    def adjoint(self, psi: np.ndarray) -> np.ndarray:
        """Dirac adjoint psi^dagger gamma^0 as a row vector."""
        return np.conj(psi) @ self.gamma[0]

    def sigma_contract(self, omega: np.ndarray) -> np.ndarray:
        """Return omega_{ab} sigma^{ab} for an antisymmetric, all-lower omega."""
        return np.einsum("ab,abij->ij", omega, self.sigma)


@lru_cache(maxsize=None)
def build_gamma_basis() -> GammaBasis:
    zero = np.zeros((2, 2), dtype=complex)
    one = np.eye(2, dtype=complex)
    gamma = np.empty((4, 4, 4), dtype=complex)
    gamma[0] = np.block([[zero, one], [one, zero]])
    for k in range(3):
        gamma[k + 1] = np.block([[zero, PAULI[k]], [-PAULI[k], zero]])
    # pi = i g0 g1 g2 g3 = diag(-1, -1, 1, 1): the sign compatible with
    # 2i sigma_ab = eps_abcd pi sigma^cd and S^3 = +2 on the rest spinor.
    pi = 1j * gamma[0] @ gamma[1] @ gamma[2] @ gamma[3]
    basis = GammaBasis.from_gammas(gamma, pi)
    for arr in (basis.gamma, basis.pi, basis.sigma):
        arr.setflags(write=False)
    return basis


# --- Lorentz generators -----------------------------------------------------


def omega_from_parameters(rapidities, angles) -> np.ndarray:
    """All-lower antisymmetric omega_{ab} for the given boost/rotation parameters.

    A positive rapidity along axis k boosts the rest frame towards +k; a
    positive angle about axis k is a right-handed rotation about k.
    """
    r = np.asarray(rapidities, dtype=float)
    th = np.asarray(angles, dtype=float)
    omega = np.zeros((4, 4))
    for k in range(3):
        omega[0, k + 1] = r[k]
        omega[k + 1, 0] = -r[k]
    for i, j, k in ((1, 2, 3), (2, 3, 1), (3, 1, 2)):
        omega[i, j] = th[k - 1]
        omega[j, i] = -th[k - 1]
    return omega


def spin_generator(omega: np.ndarray, basis: GammaBasis | None = None) -> np.ndarray:
    basis = basis or build_gamma_basis()
    return 0.5 * basis.sigma_contract(omega)


def lorentz_generator(omega: np.ndarray) -> np.ndarray:
    """Mixed K^a_b = eta^{ac} omega_{cb}, the vector image of spin_generator."""
    return ETA @ omega


def _unit_generators():
    basis = build_gamma_basis()
    spin, real = [], []
    for i in range(6):
        params = np.zeros(6)
        params[i] = 1.0
        om = omega_from_parameters(params[:3], params[3:])
        spin.append(spin_generator(om, basis))
        real.append(lorentz_generator(om))
    return np.array(spin), np.array(real)


SPIN_GENERATORS, LORENTZ_GENERATORS = _unit_generators()
SPIN_GENERATORS.setflags(write=False)
LORENTZ_GENERATORS.setflags(write=False)


@dataclass(frozen=True, eq=False)
class SpinGroupElement:
    """A spinor transformation S together with its real Lorentz image.

    Convention: ``S^{-1} gamma^i S = Lambda^i_j gamma^j``, equivalently
    ``S gamma^j S^{-1} Lambda^i_j = gamma^i``, so that psi -> S psi sends the
    vector bilinear U to Lambda U.
    """

    S: np.ndarray
    Lambda: np.ndarray
    phase: float = 0.0

    def __matmul__(self, other: "SpinGroupElement") -> "SpinGroupElement":
        return SpinGroupElement(self.S @ other.S, self.Lambda @ other.Lambda, self.phase + other.phase)

    def inverse(self) -> "SpinGroupElement":
        return SpinGroupElement(np.linalg.inv(self.S), ETA @ self.Lambda.T @ ETA, -self.phase)


def exp_spin(rapidities=(0.0, 0.0, 0.0), angles=(0.0, 0.0, 0.0), phase: float = 0.0,
             charge: float = 1.0) -> SpinGroupElement:
    params = np.concatenate([np.asarray(rapidities, float), np.asarray(angles, float)])
    S = expm(np.tensordot(params, SPIN_GENERATORS, axes=1))
    Lam = expm(np.tensordot(params, LORENTZ_GENERATORS, axes=1))
    if phase:
        S = S * np.exp(1j * charge * phase)
    return SpinGroupElement(S=S, Lambda=Lam, phase=float(phase))


def lorentz_of_spin(S: np.ndarray, basis: GammaBasis | None = None) -> np.ndarray:
    """Lambda^i_j = tr(S^{-1} gamma^i S gamma_j) / 4, with no validation."""
    basis = basis or build_gamma_basis()
    Sinv = np.linalg.inv(S)
    conj = np.einsum("ij,ajk,kl->ail", Sinv, basis.gamma, S)
    lam = np.einsum("aij,bji->ab", conj, basis.gamma_lower) / 4.0
    return lam.real


# --- identity checks --------------------------------------------------------


def check_algebra_identities(basis: GammaBasis | None = None) -> dict[str, float]:
    """Max absolute residual of each defining identity of the basis."""
    b = basis or build_gamma_basis()
    g, gl, pi = b.gamma, b.gamma_lower, b.pi
    sig, sigl = b.sigma, b.sigma_lower
    eta = b.eta
    eye = np.eye(4)

    anti = np.einsum("aij,bjk->abik", g, g)
    anti = anti + anti.transpose(1, 0, 2, 3)
    anti_res = anti - 2.0 * eta[:, :, None, None] * eye

    comm = np.einsum("aij,bjk->abik", g, g)
    sig_res = sig - (comm - comm.transpose(1, 0, 2, 3)) / 4.0

    dual_res = 2j * sigl - np.einsum("abcd,ij,cdjk->abik", b.eps, pi, sig)

    # [sigma^{nr}, gamma^a] = eta^{ar} gamma^n - eta^{an} gamma^r
    sg = np.einsum("nrij,ajk->nraik", sig, g)
    gs = np.einsum("aij,nrjk->nraik", g, sig)
    rhs = (np.einsum("ar,nij->nraij", eta, g) - np.einsum("an,rij->nraij", eta, g))
    comm_res = sg - gs - rhs

    ss = np.einsum("abij,cdjk->abcdik", sigl, sigl)
    ss = ss + ss.transpose(2, 3, 0, 1, 4, 5)
    metric_part = (np.einsum("ad,bc->abcd", eta, eta) - np.einsum("ac,bd->abcd", eta, eta))
    sig_anti_res = (2.0 * ss - metric_part[..., None, None] * eye
                    - 1j * np.einsum("abcd,ij->abcdij", b.eps, pi))

    comm_ij = np.einsum("iab,jbc->ijac", gl, gl)
    comm_ij = comm_ij - comm_ij.transpose(1, 0, 2, 3)
    sandwich = np.einsum("sab,ijbc,scd->ijad", gl, comm_ij, g)

    return {
        "anticommutator": float(np.abs(anti_res).max()),
        "sigma_definition": float(np.abs(sig_res).max()),
        "duality": float(np.abs(dual_res).max()),
        "sigma_gamma_commutator": float(np.abs(comm_res).max()),
        "sigma_anticommutator": float(np.abs(sig_anti_res).max()),
        "gamma_sandwich": float(np.abs(sandwich).max()),
        "pi_square": float(np.abs(pi @ pi - eye).max()),
        "pi_anticommutes": float(np.abs(np.einsum("ij,ajk->aik", pi, g)
                                        + np.einsum("aij,jk->aik", g, pi)).max()),
    }
