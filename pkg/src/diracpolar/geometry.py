"""Charts, tetrads and the Levi-Civita geometry they induce.

Array layouts used throughout (Greek = coordinate, Latin = frame):

* ``e[a, mu]``: coframe e^a_mu; ``E[mu, a]``: frame vectors E_a^mu
* ``de[l, a, mu]`` = d_l e^a_mu, ``dde[k, l, a, mu]`` = d_k d_l e^a_mu
* ``Gamma[r, m, n]`` = Gamma^r_{mn}
* ``C[mu, a, b]`` = C^a_{b mu}, the spin connection as a matrix on frame vectors
* ``R[mu, nu, a, b]`` = R^a_{b mu nu}
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Mapping, Sequence

import numpy as np

from .clifford import ETA, build_gamma_basis
from .errors import DegenerateTetrad, InvalidScenario, OutOfDomain
from .expr import Expr, Guard, as_expr, compile_many, parse_guard

PAIRS = [(k, l) for k in range(4) for l in range(k, 4)]
DET_TOL = 1e-12


def _eval_guard_free(exprs, coords):
    extra = set()
    for e in exprs:
        extra |= e.free_symbols() - set(coords)
    return extra


@dataclass(frozen=True, eq=False)
class SpacetimeChart:
    """A 4d chart described by its coframe e^a_mu as expressions."""

    coords: tuple
    tetrad: tuple  # 4 x 4 tuple of Expr
    guards: tuple = ()
    name: str = "custom"
    family: str = "custom"
    killing_presets: Mapping[str, tuple] = field(default_factory=dict)
    sample_box: Mapping[str, tuple] = field(default_factory=dict)

    def __post_init__(self):
        if len(self.coords) != 4:
            raise InvalidScenario("a chart needs exactly 4 coordinates")
        flat = [as_expr(x) for row in self.tetrad for x in row]
        if len(flat) != 16:
            raise InvalidScenario("the tetrad must be a 4x4 table")
        unbound = _eval_guard_free(flat, self.coords)
        if unbound:
            raise InvalidScenario(f"tetrad uses unbound symbols: {sorted(unbound)}")
        object.__setattr__(self, "tetrad", tuple(tuple(flat[4 * a: 4 * a + 4]) for a in range(4)))

    @cached_property
    def _jet(self):
        flat = [x for row in self.tetrad for x in row]
        first = [x.diff(c) for c in self.coords for x in flat]
        second = [x.diff(self.coords[k]).diff(self.coords[l]) for k, l in PAIRS for x in flat]
        return compile_many(flat + first + second, self.coords)

    def in_domain(self, x) -> bool:
        env = dict(zip(self.coords, map(float, x)))
        return all(g.holds(env) for g in self.guards)

    def check_domain(self, x):
        env = dict(zip(self.coords, map(float, x)))
        for g in self.guards:
            if not g.holds(env):
                raise OutOfDomain(f"point {list(map(float, x))} violates '{g.text}'")

    def tetrad_jet(self, x):
        """(e, de, dde) at x without domain checks."""
        try:
            vals = np.array(self._jet(*map(float, x)), dtype=float)
        except (ValueError, ZeroDivisionError, OverflowError) as exc:
            raise OutOfDomain(f"tetrad cannot be evaluated at {list(x)}: {exc}") from None
        e = vals[:16].reshape(4, 4)
        de = vals[16:80].reshape(4, 4, 4)
        dd = vals[80:].reshape(len(PAIRS), 4, 4)
        dde = np.empty((4, 4, 4, 4))
        for i, (k, l) in enumerate(PAIRS):
            dde[k, l] = dd[i]
            dde[l, k] = dd[i]
        return e, de, dde

    def at(self, x) -> "GeometryPoint":
        x = np.asarray(x, dtype=float)
        self.check_domain(x)
        e, de, dde = self.tetrad_jet(x)
        det = float(np.linalg.det(e))
        if not np.isfinite(det) or abs(det) < DET_TOL:
            raise DegenerateTetrad(f"det(e) = {det:.3e} at {x.tolist()}")
        return GeometryPoint(x, e, de, dde)

    def killing_field(self, name: str) -> "KillingField":
        try:
            comps = self.killing_presets[name]
        except KeyError:
            raise InvalidScenario(
                f"chart {self.name!r} has no Killing field {name!r}; known: {sorted(self.killing_presets)}"
            ) from None
        return KillingField(tuple(comps), self.coords, name)

    def fd_crosscheck(self, expr, x) -> float:
        return fd_crosscheck(expr, dict(zip(self.coords, map(float, x))), self.guards)

    def derivative_crosscheck(self, x) -> float:
        """Max discrepancy of symbolic first/second tetrad derivatives vs. finite differences."""
        x = np.asarray(x, dtype=float)
        self.check_domain(x)
        _, de, dde = self.tetrad_jet(x)
        worst = 0.0
        for mu in range(4):
            h = 1e-3 * max(1.0, abs(x[mu]))
            stencil = []
            for k in (-2, -1, 1, 2):
                xs = x.copy()
                xs[mu] += k * h
                self.check_domain(xs)
                stencil.append(self.tetrad_jet(xs))
            fd_e = _five_point([s[0] for s in stencil], h)
            fd_de = _five_point([s[1] for s in stencil], h)
            worst = max(worst, float(np.abs(fd_e - de[mu]).max()), float(np.abs(fd_de - dde[mu]).max()))
        return worst

    def metric_exprs(self):
        """g_{mu nu} as expressions, derived as eta_ab e^a_mu e^b_nu."""
        g = [[None] * 4 for _ in range(4)]
        for m in range(4):
            for n in range(4):
                acc = as_expr(0.0)
                for a in range(4):
                    acc = acc + ETA[a, a] * self.tetrad[a][m] * self.tetrad[a][n]
                g[m][n] = acc
        return g

    def with_tetrad(self, tetrad, name: str | None = None) -> "SpacetimeChart":
        return SpacetimeChart(self.coords, tuple(tuple(r) for r in tetrad), self.guards,
                              name or self.name, self.family, self.killing_presets, self.sample_box)

    def sample_points(self, n: int, seed: int = 0) -> np.ndarray:
        if not self.sample_box:
            raise InvalidScenario(f"chart {self.name!r} has no sampling box; give explicit samples")
        rng = np.random.default_rng(seed)
        lo = np.array([self.sample_box[c][0] for c in self.coords], float)
        hi = np.array([self.sample_box[c][1] for c in self.coords], float)
        return lo + (hi - lo) * rng.uniform(size=(n, 4))


def _five_point(vals, h):
    fm2, fm1, fp1, fp2 = vals
    return (fm2 - 8.0 * fm1 + 8.0 * fp1 - fp2) / (12.0 * h)


class GeometryPoint:
    """All Levi-Civita quantities of a chart at one point (computed lazily)."""

    def __init__(self, x, e, de, dde):
        self.x = x
        self.e = e
        self.de = de
        self.dde = dde

    @cached_property
    def E(self):
        return np.linalg.inv(self.e)

    @cached_property
    def dE(self):
        return -np.einsum("ma,lab,bn->lmn", self.E, self.de, self.E)

    @cached_property
    def g(self):
        return self.e.T @ ETA @ self.e

    @cached_property
    def ginv(self):
        return self.E @ ETA @ self.E.T

    @cached_property
    def dg(self):
        t = np.einsum("lam,ab,bn->lmn", self.de, ETA, self.e)
        return t + t.transpose(0, 2, 1)

    @cached_property
    def ddg(self):
        t = np.einsum("klam,ab,bn->klmn", self.dde, ETA, self.e)
        t = t + np.einsum("lam,ab,kbn->klmn", self.de, ETA, self.de)
        return t + t.transpose(0, 1, 3, 2)

    @cached_property
    def Gamma(self):
        dg = self.dg
        # lower[l, m, n] = (d_m g_ln + d_n g_lm - d_l g_mn) / 2
        lower = 0.5 * (dg.transpose(1, 0, 2) + dg.transpose(1, 2, 0) - dg)
        return np.einsum("rl,lmn->rmn", self.ginv, lower)

    @cached_property
    def dGamma(self):
        dg, ddg = self.dg, self.ddg
        lower = 0.5 * (dg.transpose(1, 0, 2) + dg.transpose(1, 2, 0) - dg)
        dlower = 0.5 * (ddg.transpose(0, 2, 1, 3) + ddg.transpose(0, 2, 3, 1) - ddg)
        dginv = -np.einsum("rp,kpq,qs->krs", self.ginv, dg, self.ginv)
        return np.einsum("krl,lmn->krmn", dginv, lower) + np.einsum("rl,klmn->krmn", self.ginv, dlower)

    @cached_property
    def C(self):
        # C^a_{b mu} = (e^a_n Gamma^n_{mu r} - d_mu e^a_r) E_b^r
        core = np.einsum("an,nmr->mar", self.e, self.Gamma) - self.de
        return np.einsum("mar,rb->mab", core, self.E)

    @cached_property
    def dC(self):
        core = np.einsum("an,nmr->mar", self.e, self.Gamma) - self.de
        dcore = (np.einsum("kan,nmr->kmar", self.de, self.Gamma)
                 + np.einsum("an,knmr->kmar", self.e, self.dGamma) - self.dde)
        return np.einsum("kmar,rb->kmab", dcore, self.E) + np.einsum("mar,krb->kmab", core, self.dE)

    @cached_property
    def R(self):
        dC, C = self.dC, self.C
        cc = np.einsum("mac,ncb->mnab", C, C)
        return dC - dC.transpose(1, 0, 2, 3) + cc - cc.transpose(1, 0, 2, 3)

    @cached_property
    def riemann_christoffel(self):
        """R^r_{s m n} from Christoffel symbols, the independent route."""
        G, dG = self.Gamma, self.dGamma
        t = np.einsum("mrns->rsmn", dG)
        gg = np.einsum("rml,lns->rsmn", G, G)
        return t - t.transpose(0, 1, 3, 2) + gg - gg.transpose(0, 1, 3, 2)

    @cached_property
    def spinor_connection(self):
        """(4, 4, 4) complex: the matrices C_mu = 1/2 C_{ab mu} sigma^{ab}."""
        sig = build_gamma_basis().sigma
        C_low = np.einsum("ac,mcb->mab", ETA, self.C)
        return 0.5 * np.einsum("mab,abij->mij", C_low, sig)

    def to_frame(self, v_coord_lower):
        """Frame components X_a = E_a^mu X_mu of a covector (last axis)."""
        return np.tensordot(v_coord_lower, self.E, axes=([-1], [0]))


# --- public operations ---------------------------------------------------------


def spin_connection(chart: SpacetimeChart, x) -> np.ndarray:
    """C^{ab}_mu as an array indexed [a, b, mu]."""
    C = chart.at(x).C
    return np.einsum("mac,cb->abm", C, ETA)


def riemann(chart: SpacetimeChart, x) -> np.ndarray:
    """R^{ab}_{mu nu} indexed [a, b, mu, nu], built from the spin connection."""
    R = chart.at(x).R
    return np.einsum("mnac,cb->abmn", R, ETA)


def riemann_coordinate_lower(gp: GeometryPoint) -> np.ndarray:
    """R_{alpha rho mu nu} from the spin-connection curvature."""
    return np.einsum("ap,mnab,bq->pqmn", ETA @ gp.e, gp.R, gp.e)


@dataclass(frozen=True, eq=False)
class KillingField:
    components: tuple
    coords: tuple
    name: str = "xi"

    def __post_init__(self):
        comps = tuple(as_expr(c) for c in self.components)
        if len(comps) != 4:
            raise InvalidScenario("a vector field needs 4 components")
        object.__setattr__(self, "components", comps)

    @cached_property
    def _jet(self):
        first = [c.diff(v) for v in self.coords for c in self.components]
        return compile_many(list(self.components) + first, self.coords)

    def evaluate(self, x):
        """(xi^mu, dxi[m, n] = d_m xi^n) at x."""
        vals = np.array(self._jet(*map(float, x)), dtype=float)
        return vals[:4], vals[4:].reshape(4, 4)


def covariant_gradient_lower(gp: GeometryPoint, xi, dxi) -> np.ndarray:
    """nabla_m xi_n for a vector with d_m xi^n = dxi[m, n]."""
    xi_l = gp.g @ xi
    d_xil = np.einsum("mnl,l->mn", gp.dg, xi) + dxi @ gp.g
    return d_xil - np.einsum("lmn,l->mn", gp.Gamma, xi_l)


def killing_residual(chart: SpacetimeChart, xi: KillingField, x) -> float:
    gp = chart.at(x)
    v, dv = xi.evaluate(x)
    nab = covariant_gradient_lower(gp, v, dv)
    return float(np.abs(nab + nab.T).max())


def lie_bracket(X: KillingField, Y: KillingField, x) -> np.ndarray:
    xv, dx = X.evaluate(x)
    yv, dy = Y.evaluate(x)
    return xv @ dy - yv @ dx


def fd_crosscheck(expr, point: Mapping[str, float], guards: Sequence[Guard] = ()) -> float:
    """Max |symbolic - 4th-order central difference| over the point's variables."""
    expr = as_expr(expr)
    names = tuple(point)
    f = compile_many([expr], names)
    worst = 0.0
    for i, name in enumerate(names):
        x0 = float(point[name])
        h = 1e-3 * max(1.0, abs(x0))
        vals = []
        for k in (-2, -1, 1, 2):
            env = dict(point)
            env[name] = x0 + k * h
            for gd in guards:
                if not gd.holds(env):
                    raise OutOfDomain(f"finite-difference stencil leaves the domain ('{gd.text}')")
            vals.append(f(*[env[n] for n in names])[0])
        fd = _five_point(vals, h)
        sym = compile_many([expr.diff(name)], names)(*[point[n] for n in names])[0]
        worst = max(worst, abs(sym - fd))
    return worst


# --- chart construction ----------------------------------------------------------

CARTESIAN = ("t", "x", "y", "z")
SPHERICAL = ("t", "r", "theta", "phi")

SPHERICAL_KILLING = {
    "xi0": ("1", "0", "0", "0"),
    "xi1": ("0", "0", "-cos(phi)", "sin(phi)*cot(theta)"),
    "xi2": ("0", "0", "sin(phi)", "cos(phi)*cot(theta)"),
    "xi3": ("0", "0", "0", "1"),
}
SPHERICAL_KILLING["t"] = SPHERICAL_KILLING["xi0"]

CARTESIAN_KILLING = {
    "t": ("1", "0", "0", "0"),
    "x": ("0", "1", "0", "0"),
    "y": ("0", "0", "1", "0"),
    "z": ("0", "0", "0", "1"),
    "rot-x": ("0", "0", "-z", "y"),
    "rot-y": ("0", "z", "0", "-x"),
    "rot-z": ("0", "-y", "x", "0"),
    "boost-x": ("x", "t", "0", "0"),
    "boost-y": ("y", "0", "t", "0"),
    "boost-z": ("z", "0", "0", "t"),
}
CARTESIAN_KILLING["xi0"] = CARTESIAN_KILLING["t"]
# not Killing; kept so callers can exercise the rejection path
CARTESIAN_NON_KILLING = {
    "dilation": ("0", "x", "y", "z"),
    "dilation-x": ("0", "x", "0", "0"),
}

SPHERICAL_GUARDS = ("r > 0", "theta > 0", "theta < pi")


def build_chart(coords, tetrad, *, params=None, define=None, domain=(), name="custom",
                family="custom", killing=None, sample_box=None) -> SpacetimeChart:
    """Chart from expression strings; ``define`` macros and ``params`` are substituted."""
    subs = {}
    for k, v in (define or {}).items():
        subs[k] = as_expr(v).substitute(subs)
    for k, v in (params or {}).items():
        subs[k] = as_expr(float(v))
    rows = tuple(tuple(as_expr(c).substitute(subs) for c in row) for row in tetrad)
    guards = tuple(_guard(gtext, subs) for gtext in domain)
    return SpacetimeChart(tuple(coords), rows, guards, name, family, dict(killing or {}),
                          dict(sample_box or {}))


def _guard(text, subs):
    g = parse_guard(text)
    return Guard(g.lhs.substitute(subs), g.op, g.rhs.substitute(subs), g.text)


def flat_cartesian() -> SpacetimeChart:
    eye = [["1" if a == m else "0" for m in range(4)] for a in range(4)]
    killing = dict(CARTESIAN_KILLING)
    killing.update(CARTESIAN_NON_KILLING)
    box = {"t": (-1.0, 1.0), "x": (-1.0, 1.0), "y": (-1.0, 1.0), "z": (-1.0, 1.0)}
    return build_chart(CARTESIAN, eye, name="flat-cartesian", family="flat-cartesian",
                       killing=killing, sample_box=box)


def flat_spherical() -> SpacetimeChart:
    tetrad = [["1", "0", "0", "0"], ["0", "1", "0", "0"], ["0", "0", "r", "0"],
              ["0", "0", "0", "r*sin(theta)"]]
    return build_chart(SPHERICAL, tetrad, domain=SPHERICAL_GUARDS, name="flat-spherical",
                       family="spherical", killing=SPHERICAL_KILLING, sample_box=_spherical_box(0.5, 3.0))


def schwarzschild(M: float = 1.0) -> SpacetimeChart:
    tetrad = [["sqrt(1 - 2*M/r)", "0", "0", "0"], ["0", "1/sqrt(1 - 2*M/r)", "0", "0"],
              ["0", "0", "r", "0"], ["0", "0", "0", "r*sin(theta)"]]
    return build_chart(SPHERICAL, tetrad, params={"M": M}, domain=SPHERICAL_GUARDS + ("r > 2*M",),
                       name="schwarzschild", family="spherical", killing=SPHERICAL_KILLING,
                       sample_box=_spherical_box(3.0 * M, 10.0 * M))


DEFAULT_STATIONARY = {
    "A": "-1/(2 + r)",
    "B": "1/(2 + r)",
    "C": "log(r) + 0.1/(1 + r)",
    "eta": "0.3*exp(-r)",
}


def stationary_tetrad():
    """Coframe whose metric is the general stationary spherical one in A, B, C, eta."""
    return [["exp(A)", "exp(B)*sinh(eta)", "0", "0"],
            ["0", "exp(B)*cosh(eta)", "0", "0"],
            ["0", "0", "exp(C)", "0"],
            ["0", "0", "0", "exp(C)*sin(theta)"]]


def stationary_spherical(A=None, B=None, C=None, eta=None, params=None) -> SpacetimeChart:
    define = {
        "A": A if A is not None else DEFAULT_STATIONARY["A"],
        "B": B if B is not None else DEFAULT_STATIONARY["B"],
        "C": C if C is not None else DEFAULT_STATIONARY["C"],
        "eta": eta if eta is not None else DEFAULT_STATIONARY["eta"],
    }
    # params may appear inside the radial functions
    p = {k: as_expr(float(v)) for k, v in (params or {}).items()}
    define = {k: as_expr(v).substitute(p) for k, v in define.items()}
    return build_chart(SPHERICAL, stationary_tetrad(), define=define, domain=SPHERICAL_GUARDS,
                       name="stationary-spherical", family="spherical", killing=SPHERICAL_KILLING,
                       sample_box=_spherical_box(0.5, 3.0))


def _spherical_box(rmin, rmax):
    return {"t": (-1.0, 1.0), "r": (rmin, rmax), "theta": (0.3, math.pi - 0.3), "phi": (0.0, 2 * math.pi)}


PRESETS = {
    "flat-cartesian": flat_cartesian,
    "flat-spherical": flat_spherical,
    "schwarzschild": schwarzschild,
    "stationary-spherical": stationary_spherical,
}


def chart_from_spec(spec) -> SpacetimeChart:
    """Chart from a preset name, ``{"preset": ..., ...}`` or a full chart spec."""
    if isinstance(spec, str):
        if spec not in PRESETS:
            raise InvalidScenario(f"unknown chart preset {spec!r}; known: {sorted(PRESETS)}")
        return PRESETS[spec]()
    if not isinstance(spec, Mapping):
        raise InvalidScenario("chart spec must be a preset name or an object")
    if "preset" in spec:
        name = spec["preset"]
        params = dict(spec.get("params", {}))
        if name == "schwarzschild":
            return schwarzschild(**params)
        if name == "stationary-spherical":
            funcs = {k: spec[k] for k in ("A", "B", "C", "eta") if k in spec}
            return stationary_spherical(params=params, **funcs)
        if name not in PRESETS:
            raise InvalidScenario(f"unknown chart preset {name!r}")
        return PRESETS[name]()
    try:
        coords = spec["coords"]
        tetrad = spec["tetrad"]
    except KeyError as exc:
        raise InvalidScenario(f"chart spec missing {exc.args[0]!r}") from None
    return build_chart(coords, tetrad, params=spec.get("params"), define=spec.get("define"),
                       domain=spec.get("domain", ()), name=spec.get("name", "custom"),
                       killing=spec.get("killing"),
                       sample_box={k: tuple(v) for k, v in spec.get("sample_box", {}).items()})


def rotated_tetrad(chart: SpacetimeChart, angle, axis: int = 1) -> SpacetimeChart:
    """Rotate the spatial legs of the coframe by ``angle`` (an expression) about ``axis``."""
    ang = as_expr(angle)
    i, j = [k for k in (1, 2, 3) if k != axis]
    c, s = as_expr("cos(w)").substitute({"w": ang}), as_expr("sin(w)").substitute({"w": ang})
    rows = [list(r) for r in chart.tetrad]
    new_i = [c * rows[i][m] - s * rows[j][m] for m in range(4)]
    new_j = [s * rows[i][m] + c * rows[j][m] for m in range(4)]
    rows[i], rows[j] = new_i, new_j
    return chart.with_tetrad(rows, name=f"{chart.name}+rotated")


def frame_rotation_matrix(angle: float, axis: int = 1) -> np.ndarray:
    """The Lorentz matrix applied to frame components by :func:`rotated_tetrad`."""
    i, j = [k for k in (1, 2, 3) if k != axis]
    R = np.eye(4)
    R[i, i] = R[j, j] = math.cos(angle)
    R[i, j] = -math.sin(angle)
    R[j, i] = math.sin(angle)
    return R
