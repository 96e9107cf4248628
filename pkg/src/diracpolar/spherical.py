"""Stationary spherical symmetry: Killing fields, the weakly invariant ansatz,
parity, and the certificate that the two are incompatible with s.s = -1.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass

import numpy as np

from .clifford import ETA
from .errors import InvalidScenario
from .expr import as_expr, parse_guard
from .fields import LFactor, PolarField
from .geometry import (DEFAULT_STATIONARY, SPHERICAL, SPHERICAL_KILLING, KillingField,
                       SpacetimeChart, rotated_tetrad, stationary_spherical)

PARITY_JACOBIAN = np.diag([1.0, 1.0, -1.0, 1.0])
COMPONENTS = ("t", "r", "theta", "phi")


def spherical_killing_fields() -> list[KillingField]:
    """xi0 = d_t, xi1, xi2 (rotations about the 1 and 2 axes) and xi3 = d_phi."""
    return [KillingField(SPHERICAL_KILLING[f"xi{k}"], SPHERICAL, f"xi{k}") for k in range(4)]


@dataclass(frozen=True, eq=False)
class SphericalScenario:
    A: str = DEFAULT_STATIONARY["A"]
    B: str = DEFAULT_STATIONARY["B"]
    C: str = DEFAULT_STATIONARY["C"]
    eta: str = DEFAULT_STATIONARY["eta"]
    alpha: str = "r/10"
    phi: str = "exp(-r/4)"
    beta: str = "0"
    energy: float = 0.5  # zeta = energy * t: stationary bilinears, t-dependent phase
    samples: tuple = ()
    frame_rotation: str | None = None  # optional theta-dependent tetrad rotation about axis 1
    name: str = "spherical"
    r_range: tuple = (0.5, 3.0)  # radial sampling interval
    domain: tuple = ()  # extra guards, e.g. "r > 2"

    def __post_init__(self):
        for key in ("A", "B", "C", "eta", "alpha", "phi", "beta"):
            e = as_expr(getattr(self, key))
            extra = e.free_symbols() - {"r"}
            if extra:
                raise InvalidScenario(f"{key} must depend on r only, found {sorted(extra)}")
        if self.frame_rotation is not None:
            extra = as_expr(self.frame_rotation).free_symbols() - set(SPHERICAL)
            if extra:
                raise InvalidScenario(f"frame_rotation uses unknown symbols {sorted(extra)}")
        pts = tuple(tuple(float(v) for v in p) for p in self.samples)
        if any(len(p) != 4 for p in pts):
            raise InvalidScenario("sample points are (t, r, theta, phi)")
        object.__setattr__(self, "samples", pts)
        lo, hi = (float(v) for v in self.r_range)
        if not 0.0 <= lo < hi:
            raise InvalidScenario(f"r_range must satisfy 0 <= r_min < r_max, got {self.r_range}")
        object.__setattr__(self, "r_range", (lo, hi))
        object.__setattr__(self, "domain", tuple(parse_guard(g) if isinstance(g, str) else g
                                                 for g in self.domain))

    def expr(self, key):
        return as_expr(getattr(self, key))

    def chart(self) -> SpacetimeChart:
        ch = stationary_spherical(self.A, self.B, self.C, self.eta)
        box = dict(ch.sample_box, r=self.r_range)
        ch = dataclasses.replace(ch, sample_box=box, guards=ch.guards + self.domain)
        if self.frame_rotation is not None:
            ch = rotated_tetrad(ch, self.frame_rotation, axis=1)
        return ch

    def sample_points(self, n: int = 20, seed: int = 0) -> np.ndarray:
        if self.samples:
            pts = np.array(self.samples)
        else:
            pts = self.chart().sample_points(n, seed)
        ch = self.chart()
        for p in pts:
            ch.check_domain(p)
        return pts

    def metric_residual(self, x) -> float:
        """Max deviation of g from the stationary spherical line element."""
        ch = self.chart()
        g = ch.at(x).g
        env = {"r": float(x[1])}
        A, B, C, eta = (self.expr(k).evaluate(env) for k in ("A", "B", "C", "eta"))
        th = float(x[2])
        want = np.zeros((4, 4))
        want[0, 0] = math.exp(2 * A)
        want[0, 1] = want[1, 0] = math.exp(A + B) * math.sinh(eta)
        want[1, 1] = -math.exp(2 * B)
        want[2, 2] = -math.exp(2 * C)
        want[3, 3] = -math.exp(2 * C) * math.sin(th) ** 2
        return float(np.abs(g - want).max())

    def with_(self, **changes) -> "SphericalScenario":
        kw = {k: getattr(self, k) for k in self.__dataclass_fields__}
        kw.update(changes)
        return SphericalScenario(**kw)


def ansatz_field(scn: SphericalScenario) -> PolarField:
    """Polar field whose velocity and spin have only t and r components.

    In the chart's frame u = (cosh(alpha+eta), sinh(alpha+eta), 0, 0) and
    s = (sinh(alpha+eta), cosh(alpha+eta), 0, 0), so that u_t = e^A cosh(alpha+eta),
    u_r = -e^B sinh(alpha), s_t = e^A sinh(alpha+eta), s_r = -e^B cosh(alpha).
    """
    chi = f"-(({scn.alpha}) + ({scn.eta}))"
    factors = [LFactor(angles=("0", str(-math.pi / 2), "0")), LFactor(rapidities=(chi, "0", "0"))]
    if scn.frame_rotation is not None:
        factors.append(LFactor(angles=(f"-({scn.frame_rotation})", "0", "0")))
    return PolarField(phi=scn.phi, beta=scn.beta, L=tuple(factors), q=1.0,
                      zeta=f"{scn.energy!r}*t", name=f"{scn.name}-ansatz")


def covector_components(field: PolarField, chart: SpacetimeChart, x):
    """(u_mu, s_mu, beta) in coordinate components at x."""
    fp = field.at(chart, x)
    e = fp.geo.e
    return e.T @ ETA @ fp.u, e.T @ ETA @ fp.s, float(fp.beta)


def ansatz_component_exprs(scn: SphericalScenario) -> dict:
    """Closed-form t, r components of u and s for the ansatz."""
    A, B, al, eta = (scn.expr(k) for k in ("A", "B", "alpha", "eta"))
    e = lambda name, arg: as_expr(f"{name}(w)").substitute({"w": arg})
    return {
        "u_t": e("exp", A) * e("cosh", al + eta),
        "u_r": -(e("exp", B) * e("sinh", al)),
        "s_t": e("exp", A) * e("sinh", al + eta),
        "s_r": -(e("exp", B) * e("cosh", al)),
    }


@dataclass
class Constraint:
    quantity: str
    parity: int  # sign picked up under theta -> pi - theta
    value: float  # at the probe point
    expression: str
    already_zero: bool
    satisfiable: bool
    reason: str = ""

    def to_dict(self) -> dict:
        return dict(self.__dict__)


def parity_constraints(scn: SphericalScenario, x=None, tol: float = 1e-12) -> list[Constraint]:
    """Quantities that parity invariance forces to vanish, found by explicit pullback.

    Under theta -> pi - theta (Jacobian diag(1, 1, -1, 1), det = -1) a true
    covector picks up J, an axial one det(J) J and a pseudo-scalar det(J).
    Invariance compares the field at the image point with the transformed
    field at the original point; a component whose sign flips but whose
    value does not must vanish.
    """
    chart = scn.chart()
    fld = ansatz_field(scn)
    if x is None:
        x = scn.sample_points(1)[0]
    x = np.asarray(x, dtype=float)
    xp = x.copy()
    xp[2] = math.pi - x[2]
    u, s, beta = covector_components(fld, chart, x)
    u2, s2, beta2 = covector_components(fld, chart, xp)
    det = float(np.linalg.det(PARITY_JACOBIAN))
    exprs = ansatz_component_exprs(scn)
    out = []
    entries = [(f"u_{c}", u[i], u2[i], PARITY_JACOBIAN[i, i]) for i, c in enumerate(COMPONENTS)]
    entries += [(f"s_{c}", s[i], s2[i], det * PARITY_JACOBIAN[i, i]) for i, c in enumerate(COMPONENTS)]
    entries.append(("beta", beta, beta2, det))
    for name, v, v_img, sign in entries:
        if sign > 0:
            continue
        # invariance: v(x') = sign * v(x); the ansatz has v(x') = v(x)
        if abs(v_img - v) > 1e-9 * max(1.0, abs(v)):
            raise InvalidScenario(f"{name} is not parity-even as a function; not of ansatz form")
        expr = exprs.get(name)
        text = str(expr) if expr is not None else ("0" if name != "beta" else scn.beta)
        zero = bool(abs(v) <= tol)
        c = Constraint(name, int(sign), float(v), f"{text} = 0", zero, True)
        if name == "s_r":
            c.satisfiable = False
            c.reason = "|s_r| = e^B cosh(alpha) >= e^B > 0"
        elif name == "s_t" and not zero:
            c.reason = "requires alpha + eta = 0"
        elif name == "beta":
            c.reason = "already satisfied" if zero else "requires beta = 0"
        out.append(c)
    return out


def grid_witness(scn: SphericalScenario, r: float = 1.0, lo: float = -5.0, hi: float = 5.0,
                 n: int = 10001) -> dict:
    """Minimise max(|s_t|, |s_r|) over alpha on a grid at fixed r."""
    env = {"r": r}
    A, B, eta = (scn.expr(k).evaluate(env) for k in ("A", "B", "eta"))
    al = np.linspace(lo, hi, n)
    st = np.abs(math.exp(A) * np.sinh(al + eta))
    sr = np.abs(math.exp(B) * np.cosh(al))
    obj = np.maximum(st, sr)
    k = int(np.argmin(obj))
    return {
        "r": r,
        "alpha_range": [lo, hi],
        "grid_size": n,
        "min_objective": float(obj[k]),
        "argmin_alpha": float(al[k]),
        "min_abs_s_r": float(sr.min()),
        "bound_e_B": math.exp(B),
    }


def nogo_certificate(scn: SphericalScenario, x=None) -> dict:
    chart = scn.chart()
    if tuple(chart.coords) != SPHERICAL:
        raise InvalidScenario("the no-go certificate needs a spherical chart (t, r, theta, phi)")
    pts = scn.sample_points()
    probe = np.asarray(x if x is not None else pts[0], dtype=float)
    constraints = parity_constraints(scn, probe)
    fld = ansatz_field(scn)
    # norm of s for the ansatz itself, at every sample
    norms = []
    for p in pts:
        _, s_cov, _ = covector_components(fld, chart, p)
        norms.append(float(s_cov @ chart.at(p).ginv @ s_cov))
    # the constraint set: every s component that survives parity vanishes
    forced = np.zeros(4)
    _, s_cov, _ = covector_components(fld, chart, probe)
    killed = {c.quantity for c in constraints}
    for i, comp in enumerate(COMPONENTS):
        if f"s_{comp}" not in killed:
            forced[i] = s_cov[i]
    ginv = chart.at(probe).ginv
    forced_norm = float(forced @ ginv @ forced)
    required = -1.0
    env = {"r": float(probe[1])}
    return {
        "scenario": scn.name,
        "probe_point": [float(v) for v in probe],
        "constraints": [c.to_dict() for c in constraints],
        "deduction": [
            "parity invariance forces s_t = 0 and s_r = 0 (axial components odd under theta -> pi - theta)",
            "s_theta = s_phi = 0 already, by spherical symmetry of the ansatz",
            "hence s_nu = 0 and s_a s^a = 0",
            "the polar form requires s_a s^a = -1",
        ],
        "surviving_s_components": forced.tolist(),
        "s_norm_forced": forced_norm,
        "s_norm_required": required,
        "discrepancy": abs(forced_norm - required),
        "ansatz_s_norm_max_error": float(max(abs(n - required) for n in norms)),
        "analytic_bound": {"statement": "|s_r| >= e^B > 0 since cosh(alpha) >= 1",
                           "e_B_at_probe": math.exp(scn.expr("B").evaluate(env))},
        "witness": grid_witness(scn, r=float(probe[1])),
    }


def random_scenarios(n: int, seed: int = 0) -> list[SphericalScenario]:
    """Randomised stationary scenarios; the first two are static and Schwarzschild-like."""
    rng = np.random.default_rng(seed)
    out = []
    for k in range(n):
        a, b, c, e, al = (float(v) for v in rng.uniform(-0.5, 0.5, 5))
        eta = f"{e!r}*exp(-r)" if k > 0 else "0"
        C = "log(r)" if k == 1 else f"log(r) + {c!r}/(1 + r)"
        out.append(SphericalScenario(A=f"{a!r}/(2 + r)", B=f"{b!r}/(2 + r)", C=C, eta=eta,
                                     alpha=f"{al!r}*r", name=f"random-{k}"))
    return out


def schwarzschild_like(M: float = 1.0) -> SphericalScenario:
    """A = -B = ln sqrt(1 - 2M/r), C = ln r, eta = 0."""
    half = f"0.5*log(1 - {2 * M!r}/r)"
    r0 = 2 * M
    samples = tuple((0.0, r0 * k, 1.0 + 0.1 * k, 0.5 * k) for k in (1.5, 2.0, 3.0, 4.0))
    return SphericalScenario(A=half, B=f"-{half}", C="log(r)", eta="0", alpha="r/10",
                             samples=samples, name="schwarzschild-like", r_range=(3 * M, 10 * M),
                             domain=(f"r > {r0!r}",))
