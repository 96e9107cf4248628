"""Lie derivatives of spinors and bilinears along Killing fields.

Strong invariance means L_xi psi = 0; weak invariance means every bilinear
(Theta, Phi, U, S, M) has vanishing Lie derivative.  The two differ by the
bracket operator

    B = 1/2 omega^{ab} sigma_ab - i xi.(P - V),
    omega^{ab} = 1/2 (d xi)_{cd} Pi^{ac} Pi^{bd},  Pi = eta - u u + s s,

which annihilates psi exactly when the scalar ``cond`` vanishes.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass, field
from typing import Any

import numpy as np

from .clifford import EPS_UPPER, ETA, build_gamma_basis
from .errors import NotKilling, NotWeaklyInvariant
from .fields import FieldPoint, PolarField
from .geometry import KillingField, SpacetimeChart, covariant_gradient_lower

KILLING_TOLERANCE = 1e-6
WEAK_TOLERANCE = 1e-8


class LieContext:
    """A field point together with xi and its derivatives."""

    def __init__(self, fp: FieldPoint, xi: KillingField, *, require_killing: bool = True):
        self.fp = fp
        self.xi_field = xi
        self.xi, self.dxi = xi.evaluate(fp.x)
        geo = fp.geo
        self.nabla_xi = covariant_gradient_lower(geo, self.xi, self.dxi)
        self.killing_residual = float(np.abs(self.nabla_xi + self.nabla_xi.T).max())
        if require_killing and not self.killing_residual <= KILLING_TOLERANCE:
            raise NotKilling(f"{xi.name!r} fails the Killing equation by {self.killing_residual:.3e} "
                             f"at {fp.x.tolist()}")

    @property
    def curl(self) -> np.ndarray:
        """(d xi)_{mn} = d_m xi_n - d_n xi_m, coordinate components."""
        return self.nabla_xi - self.nabla_xi.T

    @property
    def curl_frame(self) -> np.ndarray:
        E = self.fp.geo.E
        return E.T @ self.curl @ E


def _context(field, chart, xi, x, require_killing=True) -> LieContext:
    fp = field if isinstance(field, FieldPoint) else field.at(chart, x)
    return LieContext(fp, xi, require_killing=require_killing)


# --- spinor -----------------------------------------------------------------


def _liecov(ctx: LieContext) -> np.ndarray:
    fp = ctx.fp
    sig = build_gamma_basis().sigma
    return ctx.xi @ fp.nabla_psi + 0.25 * np.einsum("ab,abij,j->i", ctx.curl_frame, sig, fp.psi)


def _lie_tetrad(ctx: LieContext) -> np.ndarray:
    fp, geo = ctx.fp, ctx.fp.geo
    sig = build_gamma_basis().sigma
    # (L_xi E_k)^alpha = xi^l d_l E_k^alpha - E_k^m d_m xi^alpha
    LE = np.einsum("l,lak->ak", ctx.xi, geo.dE) - np.einsum("mk,ma->ak", geo.E, ctx.dxi)
    w = ETA @ geo.e @ LE
    gauge = ctx.xi @ (fp.dpsi + 1j * fp.q * fp.A[:, None] * fp.psi[None, :])
    return gauge + 0.5 * np.einsum("bk,bkij,j->i", w, sig, fp.psi)


def lie_spinor(field, chart=None, xi=None, x=None, *, form: str = "covariant") -> np.ndarray:
    """L_xi psi in the chart tetrad frame; ``form`` is "covariant" or "tetrad"."""
    ctx = _context(field, chart, xi, x)
    if form == "covariant":
        return _liecov(ctx)
    if form == "tetrad":
        return _lie_tetrad(ctx)
    raise ValueError(f"unknown form {form!r}")


# --- bilinears -----------------------------------------------------------------


def _coordinate_bilinears(fp: FieldPoint):
    """Bilinears and their derivatives in coordinate components."""
    from .observables import bilinear_derivatives

    geo = fp.geo
    b = fp.bilinears
    db = bilinear_derivatives(fp.psi, fp.dpsi)
    E, dE = geo.E, geo.dE
    vec, dvec = {}, {}
    for name in ("U", "S"):
        vec[name] = E @ getattr(b, name)
        dvec[name] = np.einsum("mak,k->ma", dE, getattr(b, name)) + db[name] @ E.T
    M = E @ b.M @ E.T
    dM = (np.einsum("mak,kl,bl->mab", dE, b.M, E) + np.einsum("ak,mkl,bl->mab", E, db["M"], E)
          + np.einsum("ak,kl,mbl->mab", E, b.M, dE))
    scal = {"Theta": (b.Theta, db["Theta"]), "Phi": (b.Phi, db["Phi"])}
    return scal, vec, dvec, (M, dM)


def lie_bilinears(field, chart=None, xi=None, x=None, *, require_killing: bool = True) -> dict:
    """Tensor Lie derivatives of Theta, Phi, U^alpha, S^alpha and M^{alpha beta}."""
    ctx = _context(field, chart, xi, x, require_killing)
    return _lie_bilinears(ctx)


def _lie_bilinears(ctx: LieContext) -> dict:
    scal, vec, dvec, (M, dM) = _coordinate_bilinears(ctx.fp)
    xi, dxi = ctx.xi, ctx.dxi
    out: dict[str, Any] = {k: float(xi @ d) for k, (_, d) in scal.items()}
    for k in ("U", "S"):
        out[k] = xi @ dvec[k] - vec[k] @ dxi
    out["M"] = np.einsum("m,mab->ab", xi, dM) - dxi.T @ M - M @ dxi
    return out


def weak_residuals(lie_b: dict) -> dict[str, float]:
    return {k: float(np.linalg.norm(np.atleast_1d(v))) for k, v in lie_b.items()}


def _gamma_contraction(ctx: LieContext, lie_psi) -> np.ndarray:
    """psi-bar L_xi(gamma^alpha) psi, read off as L(psi-bar gamma psi) minus the spinor terms."""
    fp = ctx.fp
    b = build_gamma_basis()
    gam_coord = np.einsum("ak,kij->aij", fp.geo.E, b.gamma)
    spinor_part = 2.0 * np.real(np.einsum("i,ij,ajk,k->a", np.conj(fp.psi), b.gamma[0], gam_coord, lie_psi))
    return _lie_bilinears(ctx)["U"] - spinor_part


def lie_gamma_residual(field, chart=None, xi=None, x=None) -> float:
    """Norm of psi-bar L_xi(gamma^alpha) psi (coordinate components).

    Zero along Killing fields; for other fields it equals the norm of
    -1/2 (psi-bar gamma_nu psi)(nabla^alpha xi^nu + nabla^nu xi^alpha).
    """
    ctx = _context(field, chart, xi, x, require_killing=False)
    return float(np.linalg.norm(_gamma_contraction(ctx, _liecov(ctx))))


def lie_gamma_identity_residual(field, chart=None, xi=None, x=None) -> float:
    """Mismatch between psi-bar L_xi gamma psi and its symmetrized-gradient form."""
    ctx = _context(field, chart, xi, x, require_killing=False)
    geo = ctx.fp.geo
    lhs = _gamma_contraction(ctx, _liecov(ctx))
    sym = ctx.nabla_xi + ctx.nabla_xi.T
    U_low = geo.g @ (geo.E @ ctx.fp.bilinears.U)
    rhs = -0.5 * (geo.ginv @ sym @ geo.ginv) @ U_low
    return float(np.linalg.norm(lhs - rhs))


# --- polar decomposition of L_xi psi -------------------------------------------


def _frame_vector_lie(ctx: LieContext, v_frame, dv_frame) -> np.ndarray:
    """Frame components of L_xi of a vector given by frame components and their derivatives."""
    geo = ctx.fp.geo
    vc = geo.E @ v_frame
    dvc = np.einsum("mak,k->ma", geo.dE, v_frame) + dv_frame @ geo.E.T
    return geo.e @ (ctx.xi @ dvc - vc @ ctx.dxi)


def bracket_operator(ctx: LieContext):
    """(B, omega^{ab}) with B = 1/2 omega^{ab} sigma_ab - i xi.(P - V)."""
    fp = ctx.fp
    sigl = build_gamma_basis().sigma_lower
    Pi = ETA - np.outer(fp.u, fp.u) + np.outer(fp.s, fp.s)
    omega = 0.5 * Pi @ ctx.curl_frame @ Pi.T
    pv = float(ctx.xi @ (fp.P - fp.V))
    B = 0.5 * np.einsum("ab,abij->ij", omega, sigl) - 1j * pv * np.eye(4)
    return B, omega


def polar_lie_decomposition(field, chart=None, xi=None, x=None):
    """(right-hand side of the polar decomposition of L_xi psi, residual against lie_spinor)."""
    ctx = _context(field, chart, xi, x)
    fp = ctx.fp
    b = build_gamma_basis()
    sigl, pi, psi = b.sigma_lower, b.pi, fp.psi
    u, s = fp.u, fp.s
    Lu = _frame_vector_lie(ctx, u, fp.du)
    Ls = _frame_vector_lie(ctx, s, fp.ds)
    L_beta = float(ctx.xi @ fp.dbeta)
    L_lnphi = float(ctx.xi @ fp.dphi) / fp.phi
    s_low = ETA @ s
    rot = (np.outer(u, Lu) + np.outer(Ls, s) + np.outer(u, s) * float(s_low @ Lu))
    B, _ = bracket_operator(ctx)
    rhs = (-0.5j * L_beta * (pi @ psi) + L_lnphi * psi
           - np.einsum("ab,abij,j->i", rot, sigl, psi) + B @ psi)
    return rhs, float(np.linalg.norm(rhs - _liecov(ctx)))


def cond_scalar(field, chart=None, xi=None, x=None) -> float:
    """1/4 (d xi)_{mn} s_t u_s eps^{mnts} - 2 xi.(P - V)."""
    ctx = _context(field, chart, xi, x, require_killing=False)
    return _cond(ctx)


def _cond(ctx: LieContext) -> float:
    fp = ctx.fp
    u_low, s_low = ETA @ fp.u, ETA @ fp.s
    lhs = 0.25 * np.einsum("mn,t,s,mnts->", ctx.curl_frame, s_low, u_low, EPS_UPPER)
    return float(lhs - 2.0 * ctx.xi @ (fp.P - fp.V))


def equivalence_check(field, chart=None, xi=None, x=None, *, weak_tol: float = WEAK_TOLERANCE) -> dict:
    """Compare |B psi| with |cond| on a weakly invariant sample."""
    ctx = _context(field, chart, xi, x)
    weak = weak_residuals(_lie_bilinears(ctx))
    worst = max(weak.values())
    if not worst <= weak_tol:
        raise NotWeaklyInvariant(f"weak residual {worst:.3e} exceeds {weak_tol:g} at {ctx.fp.x.tolist()}")
    B, omega = bracket_operator(ctx)
    psi = ctx.fp.psi
    bn = float(np.linalg.norm(B @ psi))
    pn = float(np.linalg.norm(psi))
    c = _cond(ctx)
    return {
        "bracket_norm": bn,
        "psi_norm": pn,
        "cond": c,
        "xi_dot_p_minus_v": float(ctx.xi @ (ctx.fp.P - ctx.fp.V)),
        # |B psi| / |psi| = |cond| / 2 on weakly invariant samples
        "ratio": bn / (pn * abs(c)) if c != 0.0 else None,
        "omega": omega,
        "weak_max": worst,
        "strong_residual": float(np.linalg.norm(_liecov(ctx))),
    }


# --- report -------------------------------------------------------------------


@dataclass
class LieReport:
    point: list
    killing: str
    strong_residual: float
    weak_residuals: dict
    cond_residual: float
    lie_gamma_residual: float
    lie_gamma_identity: float
    tetrad_vs_covariant: float
    final_equation_residual: float
    bracket_norm: float
    killing_residual: float
    extra: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return asdict(self)


def lie_report(field, chart=None, xi=None, x=None) -> LieReport:
    ctx = _context(field, chart, xi, x)
    fp = ctx.fp
    lp = _liecov(ctx)
    weak = weak_residuals(_lie_bilinears(ctx))
    _, final_res = polar_lie_decomposition(fp, None, xi, None)
    B, _ = bracket_operator(ctx)
    return LieReport(
        point=[float(v) for v in fp.x],
        killing=ctx.xi_field.name,
        strong_residual=float(np.linalg.norm(lp)),
        weak_residuals=weak,
        cond_residual=_cond(ctx),
        lie_gamma_residual=float(np.linalg.norm(_gamma_contraction(ctx, lp))),
        lie_gamma_identity=lie_gamma_identity_residual(fp, None, xi, None),
        tetrad_vs_covariant=float(np.linalg.norm(lp - _lie_tetrad(ctx))),
        final_equation_residual=final_res,
        bracket_norm=float(np.linalg.norm(B @ fp.psi)),
        killing_residual=ctx.killing_residual,
    )
