"""Dirac dynamics in polar variables: residuals, Z/Y vectors, momentum, energy."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .clifford import EPS_LOWER, EPS_UPPER, ETA, build_gamma_basis
from .fields import FieldPoint


@dataclass(frozen=True)
class DynamicsContext:
    mass: float = 0.0

    def __post_init__(self):
        if not (np.isfinite(self.mass) and self.mass >= 0.0):
            raise ValueError(f"mass must be finite and non-negative, got {self.mass}")


@dataclass(frozen=True, eq=False)
class ZYPair:
    Z: np.ndarray  # Z_a, frame components
    Y: np.ndarray


class _Frame:
    """Frame-index view of a field point (all arrays carry frame indices)."""

    def __init__(self, fp: FieldPoint):
        E = fp.geo.E
        self.fp = fp
        self.u, self.s = fp.u, fp.s
        self.ul, self.sl = ETA @ fp.u, ETA @ fp.s
        # Nu[a, b] = nabla_a u_b
        self.Nu = E.T @ (fp.nabla_u @ ETA)
        self.Ns = E.T @ (fp.nabla_s @ ETA)
        self.dlnphi2 = 2.0 * (E.T @ fp.dphi) / fp.phi
        self.dbeta = E.T @ fp.dbeta
        self.P = E.T @ fp.P
        self.V = E.T @ fp.V
        # F_{ab c}, every index in the frame
        self.F = np.einsum("abm,mc->abc", fp.F_lower, E)


def _frame(field, chart, x) -> _Frame:
    fp = field if isinstance(field, FieldPoint) else field.at(chart, x)
    return _Frame(fp)


def _zy(f: _Frame) -> ZYPair:
    u, s, ul, sl, Nu, Ns = f.u, f.s, f.ul, f.sl, f.Nu, f.Ns
    div_u = float(np.einsum("ab,ab->", ETA, Nu))
    div_s = float(np.einsum("ab,ab->", ETA, Ns))
    dus = Nu @ s  # nabla_nu u_i s^i
    z2 = (f.dlnphi2 + ul * div_u - sl * div_s - u @ Nu + s @ Ns
          + ul * float(s @ dus) - sl * float(u @ dus))
    Nu_up = ETA @ Nu @ ETA  # nabla^nu u^beta
    Ns_up = ETA @ Ns @ ETA
    dus_up = ETA @ dus
    # the u-term enters with a plus sign; with a minus the compact and the
    # expanded axial equations disagree off-shell (checked on Dirac solutions)
    y2 = (f.dbeta + np.einsum("mabn,a,nb->m", EPS_LOWER, u, Nu_up)
          + np.einsum("mbna,b,na->m", EPS_LOWER, s, Ns_up)
          + np.einsum("mabn,a,b,n->m", EPS_LOWER, u, s, dus_up))
    return ZYPair(Z=0.5 * z2, Y=0.5 * y2)


def zy_vectors(field, chart=None, x=None) -> ZYPair:
    return _zy(_frame(field, chart, x))


def _wedge_contract(v_up, ul, sl):
    """v^n (u_n s_m - u_m s_n)."""
    return float(v_up @ ul) * sl - float(v_up @ sl) * ul


def dirac_residuals(field, chart=None, ctx: DynamicsContext | None = None, x=None) -> dict:
    """Residual vectors of the polar Dirac equations (frame components) and of the spinor equation."""
    ctx = ctx or DynamicsContext()
    f = _frame(field, chart, x)
    fp = f.fp
    m = ctx.mass
    beta = fp.beta
    u, s, ul, sl = f.u, f.s, f.ul, f.sl
    P_up = ETA @ f.P
    PV_up = ETA @ (f.P - f.V)
    F_trace = np.einsum("abc,bc->a", f.F, ETA)
    F_up = np.einsum("ad,be,cf,def->abc", ETA, ETA, ETA, f.F)
    d1 = (f.dlnphi2 + F_trace - 2.0 * np.einsum("r,n,a,mrna->m", P_up, u, s, EPS_LOWER)
          + 2.0 * m * sl * np.sin(beta))
    d2 = (f.dbeta + 0.5 * np.einsum("mani,ani->m", EPS_LOWER, F_up)
          - 2.0 * _wedge_contract(P_up, ul, sl) + 2.0 * m * sl * np.cos(beta))
    zy = _zy(f)
    sm = zy.Z - np.einsum("r,n,a,mrna->m", PV_up, u, s, EPS_LOWER) + m * sl * np.sin(beta)
    ca = zy.Y - _wedge_contract(PV_up, ul, sl) + m * sl * np.cos(beta)
    g = build_gamma_basis().gamma
    nabla_frame = fp.geo.E.T @ fp.nabla_psi
    spinor = 1j * np.einsum("aij,aj->i", g, nabla_frame) - m * fp.psi
    return {"D1": d1, "D2": d2, "SM": sm, "CA": ca, "spinor": spinor}


def momentum(field, chart=None, ctx: DynamicsContext | None = None, x=None) -> np.ndarray:
    """(P - V)^eta predicted from Z, Y and the mass, frame components (upper)."""
    ctx = ctx or DynamicsContext()
    f = _frame(field, chart, x)
    zy = _zy(f)
    Y_up = ETA @ zy.Y
    wedge = float(Y_up @ f.ul) * f.s - float(Y_up @ f.sl) * f.u  # Y_m u^[m s^e]
    eps_term = np.einsum("m,p,t,mpte->e", zy.Z, f.ul, f.sl, EPS_UPPER)
    return ctx.mass * np.cos(f.fp.beta) * f.u + wedge + eps_term


def p_minus_v(field, chart=None, x=None) -> np.ndarray:
    """(P - V)^a from the tensorial connections, frame components (upper)."""
    f = _frame(field, chart, x)
    return ETA @ (f.P - f.V)


def energy_tensor(field, chart=None, x=None, *, form: str = "polar") -> np.ndarray:
    """T^{rho sigma} in frame components.

    ``form``: "spinor" (the bilinear definition), "polar-F" (in terms of P and F)
    or "polar" (in terms of P - V and the derivatives of u).
    """
    f = _frame(field, chart, x)
    fp = f.fp
    if form == "spinor":
        b = build_gamma_basis()
        nab_up = ETA @ (fp.geo.E.T @ fp.nabla_psi)
        bar = np.conj(fp.psi) @ b.gamma[0]
        X = np.einsum("i,rij,sj->rs", bar, b.gamma, nab_up)
        return -0.5 * (X.imag + X.imag.T)
    phi2 = fp.phi ** 2
    u, s, sl, ul = f.u, f.s, f.sl, f.ul
    dbeta_up = ETA @ f.dbeta
    if form == "polar-F":
        P_up = ETA @ f.P
        F_mixed = np.einsum("abc,cd->abd", f.F, ETA)  # F_{an}^{sigma}
        t = (np.outer(P_up, u) + 0.5 * np.outer(dbeta_up, s)
             - 0.25 * np.einsum("ans,k,rank->rs", F_mixed, sl, EPS_UPPER))
    elif form == "polar":
        PV_up = ETA @ (f.P - f.V)
        Nu_up_first = ETA @ f.Nu  # nabla^sigma u_nu, indexed [sigma, nu]
        t = (np.outer(PV_up, u) + 0.5 * np.outer(dbeta_up, s)
             - 0.5 * np.einsum("k,a,sn,rnka->rs", sl, ul, Nu_up_first, EPS_UPPER))
    else:
        raise ValueError(f"unknown form {form!r}")
    return phi2 * (t + t.T)


def spin_divergence(field, chart=None, x=None) -> float:
    """nabla_i S^i for the axial vector S = 2 phi^2 s."""
    fp = field if isinstance(field, FieldPoint) else field.at(chart, x)
    S = 2.0 * fp.phi ** 2 * fp.s
    dS = 2.0 * (2.0 * fp.phi * fp.dphi[:, None] * fp.s[None, :] + fp.phi ** 2 * fp.ds)
    nab = dS + np.einsum("mab,b->ma", fp.geo.C, S)
    return float(np.einsum("ma,ma->", fp.geo.E, nab))


def divergence_residual(field, chart=None, ctx: DynamicsContext | None = None, x=None) -> float:
    ctx = ctx or DynamicsContext()
    fp = field if isinstance(field, FieldPoint) else field.at(chart, x)
    return abs(spin_divergence(fp) - 4.0 * ctx.mass * fp.phi ** 2 * np.sin(fp.beta))
