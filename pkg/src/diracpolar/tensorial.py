"""Tensorial connections F_{ab mu}, P_mu, the vector V_mu and their identities."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .clifford import EPS_LOWER, ETA
from .fields import FieldPoint, PolarField, v_vector
from .geometry import SpacetimeChart

__all__ = [
    "TensorialConnection", "tensorial_F", "tensorial_P", "v_vector", "tensorial_connection",
    "rfull_reconstruction", "transport_residuals", "curvature_residuals",
]


@dataclass(frozen=True, eq=False)
class TensorialConnection:
    F: np.ndarray  # F_{ab mu}, indexed [a, b, mu]
    P: np.ndarray  # P_mu
    V: np.ndarray  # V_mu

    @property
    def F_upper(self) -> np.ndarray:
        """F^{ab}_mu."""
        return np.einsum("ac,bd,cdm->abm", ETA, ETA, self.F)

    def antisymmetry_residual(self) -> float:
        return float(np.abs(self.F + self.F.transpose(1, 0, 2)).max())


def _point(field, chart, x) -> FieldPoint:
    return field if isinstance(field, FieldPoint) else field.at(chart, x)


def tensorial_F(field: PolarField, chart: SpacetimeChart, x) -> np.ndarray:
    """F_{ab mu}: Goldstone connection minus Levi-Civita, indexed [a, b, mu]."""
    return _point(field, chart, x).F_lower


def tensorial_P(field: PolarField, chart: SpacetimeChart, x) -> np.ndarray:
    return _point(field, chart, x).P


def tensorial_connection(field, chart=None, x=None) -> TensorialConnection:
    p = _point(field, chart, x)
    return TensorialConnection(F=p.F_lower, P=p.P, V=p.V)


def rfull_reconstruction(nabla_u_low, nabla_s_low, u_low, s_low, V) -> np.ndarray:
    """F_{ab mu} rebuilt from the covariant derivatives of u, s and V.

    ``nabla_u_low[mu, a]`` = nabla_mu u_a.  The antisymmetrised products
    carry no 1/2.
    """
    u, s = u_low, s_low
    u_up, s_up = ETA @ u, ETA @ s
    du, ds = nabla_u_low, nabla_s_low
    dus = du @ s_up  # nabla_mu u_k s^k
    F = (np.einsum("a,mb->abm", u, du) - np.einsum("b,ma->abm", u, du)
         + np.einsum("b,ma->abm", s, ds) - np.einsum("a,mb->abm", s, ds)
         + np.einsum("ab,m->abm", np.outer(u, s) - np.outer(s, u), dus)
         + 2.0 * np.einsum("abij,i,j,m->abm", EPS_LOWER, u_up, s_up, V))
    return F


def transport_residuals(field, chart=None, x=None) -> dict[str, float]:
    """Max residuals of the transport identities for u and s at a point.

    ``nabla_u`` and ``nabla_s`` are rebuilt from the spinor and its
    derivative; F comes from the derivatives of Lambda.
    """
    p = _point(field, chart, x)
    u_low, s_low = ETA @ p.u, ETA @ p.s
    Fl = p.F_lower
    nu_low = p.nabla_u @ ETA
    ns_low = p.nabla_s @ ETA
    du_res = nu_low - np.einsum("jim,j->mi", Fl, p.u)
    ds_res = ns_low - np.einsum("jim,j->mi", Fl, p.s)
    rebuilt = rfull_reconstruction(nu_low, ns_low, u_low, s_low, p.V)
    du_lambda = -np.einsum("mab,b->ma", p.Omega, p.u)
    ds_lambda = -np.einsum("mab,b->ma", p.Omega, p.s)
    return {
        "nabla_u": float(np.abs(du_res).max()),
        "nabla_s": float(np.abs(ds_res).max()),
        "rfull": float(np.abs(rebuilt - Fl).max()),
        "goldstone_u": float(np.abs(p.du + np.einsum("mab,b->ma", p.Omega, p.u)).max()),
        "goldstone_s": float(np.abs(p.ds + np.einsum("mab,b->ma", p.Omega, p.s)).max()),
        "spinor_vs_lambda": float(max(np.abs(p.du - du_lambda).max(), np.abs(p.ds - ds_lambda).max())),
        "antisymmetry": float(np.abs(Fl + Fl.transpose(1, 0, 2)).max()),
    }


def curvature_residuals(field, chart=None, x=None) -> dict[str, float]:
    """Residuals of the curvature and Maxwell identities at a point.

    ``riemann`` compares R^a_{b mu nu} with minus the covariant curl of F
    plus its square; ``riemann_coordinate`` repeats the comparison against
    the independently computed Christoffel curvature.
    """
    p = _point(field, chart, x)
    geo = p.geo
    F, dF, C = p.F, p.dF, geo.C
    # D_m F_n = d_m F_n + [C_m, F_n]; Christoffel terms cancel in the curl
    DF = dF + np.einsum("mac,ncb->mnab", C, F) - np.einsum("nac,mcb->mnab", F, C)
    FF = np.einsum("mac,ncb->mnab", F, F)
    recon = -(DF - DF.transpose(1, 0, 2, 3) + FF - FF.transpose(1, 0, 2, 3))
    rc = np.einsum("ra,mnab,bs->rsmn", geo.E, recon, geo.e)
    curlP = p.dP - p.dP.T
    faraday = p.q * (p.dA - p.dA.T)
    return {
        "riemann": float(np.abs(recon - geo.R).max()),
        "riemann_coordinate": float(np.abs(rc - geo.riemann_christoffel).max()),
        "faraday": float(np.abs(faraday + curlP).max()),
        "riemann_scale": float(np.abs(geo.R).max()),
        "faraday_scale": float(np.abs(faraday).max()),
    }
