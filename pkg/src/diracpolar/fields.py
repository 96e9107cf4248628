"""Polar spinor fields on a chart and their exact jets at a point.

A field is given by expressions for the module phi, the chiral angle beta,
the gauge phase zeta, the gauge potential A_mu and the parameters of the
spinor transformation L(x).  The spinor itself is

    psi(x) = phi e^{-i beta pi / 2} e^{-i q zeta} L(x)^{-1} (1, 0, 1, 0)^T

so that the gauge tensorial connection is P_mu = q (d_mu zeta - A_mu).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Mapping, Sequence

import numpy as np
from scipy.linalg import expm, expm_frechet

from .clifford import (EPS_UPPER, ETA, LORENTZ_GENERATORS, REST_SPINOR, SPIN_GENERATORS,
                       build_gamma_basis)
from .errors import InvalidScenario, SingularSpinor
from .expr import Expr, as_expr, compile_many
from .geometry import PAIRS, GeometryPoint, SpacetimeChart
from .observables import bilinear_derivatives, bilinears
from .polar import _chiral

ZERO3 = ("0", "0", "0")


@dataclass(frozen=True, eq=False)
class LFactor:
    """exp of rapidities . K + angles . J, each parameter an expression."""

    rapidities: tuple = ZERO3
    angles: tuple = ZERO3

    def __post_init__(self):
        r = tuple(as_expr(v) for v in self.rapidities)
        a = tuple(as_expr(v) for v in self.angles)
        if len(r) != 3 or len(a) != 3:
            raise InvalidScenario("an L factor needs 3 rapidities and 3 angles")
        object.__setattr__(self, "rapidities", r)
        object.__setattr__(self, "angles", a)

    @property
    def params(self) -> tuple:
        return self.rapidities + self.angles


@dataclass(frozen=True, eq=False)
class PolarField:
    phi: Expr = "1"
    beta: Expr = "0"
    L: tuple = ()  # factors, composed left to right
    A: tuple = ("0", "0", "0", "0")
    q: float = 1.0
    zeta: Expr = "0"
    name: str = "field"
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "phi", as_expr(self.phi))
        object.__setattr__(self, "beta", as_expr(self.beta))
        object.__setattr__(self, "zeta", as_expr(self.zeta))
        A = tuple(as_expr(a) for a in self.A)
        if len(A) != 4:
            raise InvalidScenario("the gauge potential needs 4 components")
        object.__setattr__(self, "A", A)
        factors = self.L
        if isinstance(factors, LFactor):
            factors = (factors,)
        object.__setattr__(self, "L", tuple(factors))
        object.__setattr__(self, "q", float(self.q))

    def replace(self, **changes) -> "PolarField":
        kw = dict(phi=self.phi, beta=self.beta, L=self.L, A=self.A, q=self.q, zeta=self.zeta,
                  name=self.name)
        kw.update(changes)
        return PolarField(**kw)

    def all_exprs(self):
        out = [self.phi, self.beta, self.zeta, *self.A]
        for f in self.L:
            out.extend(f.params)
        return out

    def compiled(self, coords: tuple):
        """Compiled jet evaluator for the given coordinate names (cached)."""
        if coords in self._cache:
            return self._cache[coords]
        unbound = set()
        for e in self.all_exprs():
            unbound |= e.free_symbols() - set(coords)
        if unbound:
            raise InvalidScenario(f"field uses symbols that are not coordinates: {sorted(unbound)}")
        exprs = []
        for s in (self.phi, self.beta):
            exprs += [s] + [s.diff(c) for c in coords]
        z = self.zeta
        exprs += [z] + [z.diff(c) for c in coords]
        exprs += [z.diff(coords[k]).diff(coords[l]) for k, l in PAIRS]
        exprs += list(self.A) + [a.diff(c) for c in coords for a in self.A]
        for f in self.L:
            p = f.params
            exprs += list(p)
            exprs += [e.diff(c) for c in coords for e in p]
            exprs += [e.diff(coords[k]).diff(coords[l]) for k, l in PAIRS for e in p]
        fn = compile_many(exprs, coords)
        self._cache[coords] = fn
        return fn

    def at(self, chart: SpacetimeChart, x) -> "FieldPoint":
        return FieldPoint(self, chart, x)


def _sym_pairs(flat: np.ndarray, tail: tuple) -> np.ndarray:
    out = np.empty((4, 4) + tail, dtype=flat.dtype)
    flat = flat.reshape((len(PAIRS),) + tail)
    for i, (k, l) in enumerate(PAIRS):
        out[k, l] = flat[i]
        out[l, k] = flat[i]
    return out


def _commutes(mats, tol=1e-13) -> bool:
    scale = max([1.0] + [float(np.abs(m).max()) for m in mats])
    for i in range(len(mats)):
        for j in range(i + 1, len(mats)):
            if np.abs(mats[i] @ mats[j] - mats[j] @ mats[i]).max() > tol * scale * scale:
                return False
    return True


def exp_jet(X, dX, ddX=None):
    """exp(X(x)) with its first (and optionally second) partial derivatives.

    ``dX[m]`` = d_m X and ``ddX[k, l]`` = d_k d_l X.  First derivatives are
    Frechet derivatives of expm; second derivatives come from the upper
    triangular block exponential, so both are exact up to rounding.
    """
    n = X.shape[0]
    mats = [X, *dX] + ([] if ddX is None else [ddX[k, l] for k, l in PAIRS])
    nonzero = [m for m in mats if np.any(m)]
    if _commutes(nonzero):
        M = expm(X)
        dM = np.einsum("mij,jk->mik", dX, M)
        if ddX is None:
            return M, dM, None
        ddM = np.einsum("klij,jn->klin", ddX + np.einsum("kij,ljn->klin", dX, dX), M)
        return M, dM, ddM
    M = expm(X)
    dM = np.array([expm_frechet(X, dX[m], compute_expm=False) for m in range(4)])
    if ddX is None:
        return M, dM, None
    ddM = np.empty((4, 4, n, n), dtype=M.dtype)
    Z = np.zeros_like(X)
    for k, l in PAIRS:
        val = _block3(X, dX[k], ddX[k, l], dX[l]) + _block3(X, dX[l], Z, dX[k])
        ddM[k, l] = val
        ddM[l, k] = val
    return M, dM, ddM


def _block3(X, A, B, C):
    n = X.shape[0]
    Z = np.zeros_like(X)
    big = np.block([[X, A, B], [Z, X, C], [Z, Z, X]])
    return expm(big)[:n, 2 * n:]


def _product_jet(jets):
    M, dM, ddM = jets[0]
    for N, dN, ddN in jets[1:]:
        newM = M @ N
        newd = np.einsum("mij,jk->mik", dM, N) + np.einsum("ij,mjk->mik", M, dN)
        if ddM is not None:
            ddM = (np.einsum("klij,jn->klin", ddM, N) + np.einsum("kij,ljn->klin", dM, dN)
                   + np.einsum("lij,kjn->klin", dM, dN) + np.einsum("ij,kljn->klin", M, ddN))
        M, dM = newM, newd
    return M, dM, ddM


class FieldPoint:
    """Every quantity of a polar field at one chart point.

    Frame (Latin) indices use the chart tetrad; derivative (Greek) indices
    are coordinate indices unless a name says otherwise.
    """

    def __init__(self, fld: PolarField, chart: SpacetimeChart, x):
        self.field = fld
        self.chart = chart
        self.x = np.asarray(x, dtype=float)
        self.geo: GeometryPoint = chart.at(self.x)
        try:
            vals = np.array(fld.compiled(tuple(chart.coords))(*self.x), dtype=float)
        except (ValueError, ZeroDivisionError, OverflowError) as exc:
            raise InvalidScenario(f"field cannot be evaluated at {self.x.tolist()}: {exc}") from None
        self.phi, self.dphi = vals[0], vals[1:5]
        self.beta, self.dbeta = vals[5], vals[6:10]
        self.zeta, self.dzeta = vals[10], vals[11:15]
        self.ddzeta = _sym_pairs(vals[15:25], ())
        self.A, self.dA = vals[25:29], vals[29:45].reshape(4, 4)
        self.q = fld.q
        self._params = []
        off = 45
        for _ in fld.L:
            p = vals[off:off + 6]
            dp = vals[off + 6:off + 30].reshape(4, 6)
            ddp = _sym_pairs(vals[off + 30:off + 90], (6,))
            self._params.append((p, dp, ddp))
            off += 90
        if not self.phi > 0.0:
            raise SingularSpinor(f"module phi = {self.phi} is not positive at {self.x.tolist()}")

    # --- the spinor transformation and its Lorentz image --------------------

    def _jets(self, gens, second):
        jets = []
        for p, dp, ddp in self._params:
            X = np.tensordot(p, gens, axes=1)
            dX = np.tensordot(dp, gens, axes=1)
            ddX = np.tensordot(ddp, gens, axes=1) if second else None
            jets.append(exp_jet(X, dX, ddX))
        if not jets:
            n = gens.shape[1]
            eye = np.eye(n, dtype=gens.dtype)
            return eye, np.zeros((4, n, n), gens.dtype), np.zeros((4, 4, n, n), gens.dtype)
        return _product_jet(jets)

    @cached_property
    def _spin(self):
        return self._jets(SPIN_GENERATORS, second=False)

    @cached_property
    def _lorentz(self):
        return self._jets(LORENTZ_GENERATORS, second=True)

    @property
    def S(self):
        return self._spin[0]

    @property
    def dS(self):
        return self._spin[1]

    @property
    def Lambda(self):
        return self._lorentz[0]

    @property
    def dLambda(self):
        return self._lorentz[1]

    @property
    def ddLambda(self):
        return self._lorentz[2]

    @cached_property
    def Lambda_inv(self):
        return ETA @ self.Lambda.T @ ETA

    # --- kinematics ---------------------------------------------------------

    @cached_property
    def u(self):
        """u^a, frame components."""
        return self.Lambda_inv[:, 0].copy()

    @cached_property
    def s(self):
        return self.Lambda_inv[:, 3].copy()

    @cached_property
    def Omega(self):
        """Goldstone connection Omega[mu] = Lambda^{-1} d_mu Lambda (mixed frame matrix)."""
        return np.einsum("ab,mbc->mac", self.Lambda_inv, self.dLambda)

    @cached_property
    def dOmega(self):
        Om = self.Omega
        return (-np.einsum("kab,mbc->kmac", Om, Om)
                + np.einsum("ab,kmbc->kmac", self.Lambda_inv, self.ddLambda))

    @cached_property
    def F(self):
        """F[mu] = F^a_{b mu}, the space-time tensorial connection (mixed)."""
        return self.Omega - self.geo.C

    @cached_property
    def dF(self):
        return self.dOmega - self.geo.dC

    @cached_property
    def F_lower(self):
        """F_{ab mu} indexed [a, b, mu]."""
        return np.einsum("ac,mcb->abm", ETA, self.F)

    @cached_property
    def P(self):
        """P_mu = q (d_mu zeta - A_mu), coordinate components."""
        return self.q * (self.dzeta - self.A)

    @cached_property
    def dP(self):
        """dP[k, m] = d_k P_m."""
        return self.q * (self.ddzeta - self.dA)

    @cached_property
    def V(self):
        """V_mu = 1/4 F_{ij mu} eps^{ijcd} u_c s_d, coordinate components."""
        return v_vector(self.F_lower, ETA @ self.u, ETA @ self.s)

    # --- the spinor ------------------------------------------------------

    @cached_property
    def S_inv(self):
        return np.linalg.inv(self.S)

    @cached_property
    def psi(self):
        phase = np.exp(-1j * self.q * self.zeta)
        return self.phi * phase * (_chiral(self.beta) @ (self.S_inv @ REST_SPINOR))

    @cached_property
    def dpsi(self):
        """d_mu psi, shape (4, 4): first axis the derivative index."""
        pi = build_gamma_basis().pi
        psi = self.psi
        gen = np.einsum("ij,mjk->mik", self.S_inv, self.dS)
        scal = self.dphi / self.phi - 1j * self.q * self.dzeta
        return (scal[:, None] * psi[None, :] - 0.5j * self.dbeta[:, None] * (pi @ psi)[None, :]
                - np.einsum("mij,j->mi", gen, psi))

    @cached_property
    def nabla_psi(self):
        """Gauge and Levi-Civita covariant derivative nabla_mu psi."""
        conn = self.geo.spinor_connection
        return (self.dpsi + np.einsum("mij,j->mi", conn, self.psi)
                + 1j * self.q * self.A[:, None] * self.psi[None, :])

    # --- kinematics recomputed from the spinor ---------------------------------

    @cached_property
    def bilinears(self):
        return bilinears(self.psi)

    @cached_property
    def _uv_from_psi(self):
        b = self.bilinears
        db = bilinear_derivatives(self.psi, self.dpsi)
        N = np.hypot(b.Theta, b.Phi)
        if N == 0.0:
            raise SingularSpinor("Theta = Phi = 0")
        dN = (b.Theta * db["Theta"] + b.Phi * db["Phi"]) / N
        u, s = b.U / N, b.S / N
        du = db["U"] / N - np.outer(dN, u) / N
        ds = db["S"] / N - np.outer(dN, s) / N
        return u, s, du, ds

    @property
    def du(self):
        """d_mu u^a computed from the spinor (not from Lambda)."""
        return self._uv_from_psi[2]

    @property
    def ds(self):
        return self._uv_from_psi[3]

    @cached_property
    def nabla_u(self):
        """nabla_mu u^a = d_mu u^a + C^a_{b mu} u^b, indexed [mu, a]."""
        return self.du + np.einsum("mab,b->ma", self.geo.C, self.u)

    @cached_property
    def nabla_s(self):
        return self.ds + np.einsum("mab,b->ma", self.geo.C, self.s)

    # --- frame conversions -----------------------------------------------

    def to_frame_derivative(self, arr):
        """Convert the leading coordinate derivative axis to a frame index."""
        return np.tensordot(self.geo.E, arr, axes=([0], [0]))

    def vector_to_frame(self, v):
        """Frame components X_a of a coordinate covector X_mu."""
        return self.geo.E.T @ v


def v_vector(F_lower, u_low, s_low) -> np.ndarray:
    """V_mu = 1/4 F_{ij mu} eps^{ijcd} u_c s_d; ``F_lower`` indexed [i, j, mu]."""
    return 0.25 * np.einsum("ijm,ijcd,c,d->m", F_lower, EPS_UPPER, u_low, s_low)


# --- construction from JSON-like specs --------------------------------------------


def _factor(spec) -> LFactor:
    if not isinstance(spec, Mapping):
        raise InvalidScenario("each L factor must be an object with rapidities/angles")
    unknown = set(spec) - {"rapidities", "angles"}
    if unknown:
        raise InvalidScenario(f"unknown L keys {sorted(unknown)}")
    return LFactor(tuple(spec.get("rapidities", ZERO3)), tuple(spec.get("angles", ZERO3)))


def field_from_spec(spec: Mapping) -> PolarField:
    if not isinstance(spec, Mapping):
        raise InvalidScenario("field spec must be an object")
    unknown = set(spec) - {"phi", "beta", "L", "A", "q", "zeta", "name"}
    if unknown:
        raise InvalidScenario(f"unknown field keys {sorted(unknown)}")
    L = spec.get("L", [])
    factors = [_factor(L)] if isinstance(L, Mapping) else [_factor(f) for f in L]
    return PolarField(phi=spec.get("phi", "1"), beta=spec.get("beta", "0"), L=tuple(factors),
                      A=tuple(spec.get("A", ("0",) * 4)), q=float(spec.get("q", 1.0)),
                      zeta=spec.get("zeta", "0"), name=spec.get("name", "field"))
