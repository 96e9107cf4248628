"""Scenarios: a chart, a polar field, a mass, Killing fields and sample points.

Scenarios come from JSON files or from the built-in registry.  JSON layout::

    {
      "name": "...",
      "chart": "schwarzschild" | {"preset": ..., "params": {...}} | {coords, tetrad, ...},
      "field": {"phi", "beta", "L", "A", "q", "zeta"},
      "spherical": {"A", "B", "C", "eta", "alpha", "phi", "beta", "energy"},
      "mass": 1.0,
      "killing": ["xi0", ...] | {"name": [4 expressions]},
      "samples": [[x0, x1, x2, x3], ...],
      "tolerances": {"transport": 1e-8, ...},
      "seed": 0,
      "solution": false
    }

``spherical`` replaces both ``chart`` and ``field`` with the stationary
spherical chart and the weakly invariant ansatz.
"""

from __future__ import annotations

import json
import math
import os
from dataclasses import dataclass, field
from typing import Callable, Mapping

import numpy as np

from .errors import InvalidScenario
from .fields import LFactor, PolarField, field_from_spec
from .geometry import (KillingField, SpacetimeChart, chart_from_spec, flat_cartesian,
                       flat_spherical, schwarzschild, stationary_spherical)
from .lie import LieContext, _cond
from .spherical import SphericalScenario, ansatz_field, schwarzschild_like

DEFAULT_TOLERANCES = {
    "clifford": 1e-14,
    "fierz": 1e-10,
    "polar": 1e-10,
    "transport": 1e-8,
    "curvature": 1e-6,
    "faraday": 1e-10,
    "dynamics": 1e-10,
    "killing": 1e-10,
    "lie": 1e-8,
    "dirac": 1e-10,
}


@dataclass(eq=False)
class Scenario:
    name: str
    chart: SpacetimeChart
    field: PolarField
    mass: float = 0.0
    killing: dict = field(default_factory=dict)
    samples: np.ndarray | None = None
    tolerances: dict = field(default_factory=lambda: dict(DEFAULT_TOLERANCES))
    seed: int = 0
    spherical: SphericalScenario | None = None
    description: str = ""
    solution: bool = False  # the field solves the Dirac equation with this mass

    def points(self, n: int | None = None, seed: int | None = None) -> np.ndarray:
        """Explicit samples, followed by ``n`` seeded random points if requested."""
        seed = self.seed if seed is None else seed
        explicit = np.zeros((0, 4)) if self.samples is None else np.asarray(self.samples, float)
        if n is None:
            n = 0 if len(explicit) else 20
        pts = explicit
        if n:
            pts = np.vstack([explicit, self.chart.sample_points(n, seed)])
        for p in pts:
            self.chart.check_domain(p)
        return pts

    def killing_field(self, name: str) -> KillingField:
        if name in self.killing:
            return self.killing[name]
        return self.chart.killing_field(name)


# --- built-in scenarios -----------------------------------------------------------


def plane_wave_field(mass: float = 1.3, rapidity: float = 0.5, direction=(0.6, 0.8, 0.0),
                     angles=(0.3, 0.1, 0.0), phi: float = 0.7, q: float = 1.0) -> PolarField:
    """Boosted free plane wave: psi = phi L^{-1} psi_0 e^{-i p.x} with p = m u."""
    n = np.asarray(direction, float)
    n = n / np.linalg.norm(n)
    ch, sh = math.cosh(rapidity), math.sinh(rapidity)
    u = np.array([ch, *(sh * n)])
    p_low = mass * np.array([u[0], -u[1], -u[2], -u[3]])
    zeta = " + ".join(f"({float(c / q)!r})*{v}" for c, v in zip(p_low, "txyz"))
    # L^{-1} boosts the rest frame to u; then rotate the spin
    factors = (LFactor(angles=tuple(str(-float(a)) for a in angles)),
               LFactor(rapidities=tuple(str(-float(rapidity * c)) for c in n)))
    return PolarField(phi=str(phi), L=factors, q=q, zeta=zeta, name="plane-wave")


def rotation_field(k: float = 0.6, q: float = 0.8, detune: float = 0.0) -> PolarField:
    """Axisymmetric rest-frame field on flat space with spin along z.

    The phase zeta = (c/q) atan2(y, x) is tuned so that the invariance
    condition along the z-rotation holds, then shifted so that
    xi.(P - V) moves by ``detune``.
    """
    # xi.V = k/2 and the curl term equals 1, so cond = 1 - 2 (c - k/2)
    c = 0.5 + 0.5 * k + detune
    return PolarField(phi="exp(-(x^2 + y^2 + z^2)/4)", beta="0.1*z*(x^2 + y^2)",
                      L=(LFactor(angles=("0", "0", f"{k!r}*atan2(y, x)")),), q=q,
                      zeta=f"{c / q!r}*atan2(y, x)", name=f"rotation(detune={detune:g})")


def static_field(detune: float = 0.0, q: float = 1.0) -> PolarField:
    """Time-independent bilinears on flat space; zeta = (detune/q) t."""
    return PolarField(phi="exp(-(x^2 + y^2 + z^2)/8)", beta="0.2*x",
                      L=(LFactor(rapidities=("0.3*sin(y)", "0.2*z", "0.1"), angles=("0.1*x", "0", "0.2*y")),),
                      q=q, zeta=f"{detune / q!r}*t", name=f"static(detune={detune:g})")


def generic_field(coords) -> PolarField:
    """A field with every ingredient switched on, for identity checks."""
    if tuple(coords) == ("t", "x", "y", "z"):
        return PolarField(phi="exp(-(x^2 + y^2)/6)*(1 + 0.1*z^2)", beta="0.2*sin(x + t)",
                          L=(LFactor(rapidities=("0.3*x", "0.1*t", "0.2*y*z"), angles=("0.2*z", "0.1*x*y", "0.4*t")),
                             LFactor(angles=("0", "0.3*y", "0"))),
                          A=("0.1*x*y", "0.2*z", "0", "0.3*x"), q=0.7, zeta="0.5*t + 0.1*x*y",
                          name="generic-cartesian")
    return PolarField(phi="exp(-r/3)", beta="0.2*sin(theta)",
                      L=(LFactor(rapidities=("0.3*r", "0.1*t", "0"), angles=("0.2*theta", "0", "0.5*phi")),
                         LFactor(rapidities=("0", "0", "0.2"), angles=("0", "r*t/10", "0"))),
                      A=("0.1/r", "0.1*t*r", "0", "0.2*cos(theta)"), q=0.7, zeta="t + r/2",
                      name="generic-spherical")


def rotation_samples(n=12, seed=0):
    rng = np.random.default_rng(seed)
    lo = np.array([-1.0, 0.3, -0.5, -1.0])
    hi = np.array([1.0, 1.0, 0.5, 1.0])
    return lo + (hi - lo) * rng.uniform(size=(n, 4))


def _flat_killing(chart):
    names = ["t", "x", "y", "z", "rot-x", "rot-y", "rot-z", "boost-x", "boost-y", "boost-z"]
    return {n: chart.killing_field(n) for n in names}


def _spherical_killing(chart):
    return {n: chart.killing_field(n) for n in ("xi0", "xi1", "xi2", "xi3")}


def _builtin_plane_wave():
    ch = flat_cartesian()
    return Scenario("flat-plane-wave", ch, plane_wave_field(), mass=1.3, killing=_flat_killing(ch),
                    description="boosted free plane wave solving the Dirac equation", solution=True)


def _builtin_constant():
    ch = flat_cartesian()
    return Scenario("flat-constant", ch, PolarField(name="constant"), mass=0.0,
                    killing={"t": ch.killing_field("t")}, description="constant rest spinor, massless")


def _builtin_generic(chart_fn, name):
    def build():
        ch = chart_fn()
        killing = _flat_killing(ch) if ch.family == "flat-cartesian" else _spherical_killing(ch)
        return Scenario(name, ch, generic_field(ch.coords), mass=1.0, killing=killing,
                        description=f"generic polar field on {ch.name}")
    return build


def _builtin_spherical(scn_fn, name):
    def build():
        scn = scn_fn()
        ch = scn.chart()
        return Scenario(name, ch, ansatz_field(scn), mass=1.0, killing=_spherical_killing(ch),
                        samples=np.array(scn.samples) if scn.samples else None, spherical=scn,
                        description="weakly invariant stationary spherical ansatz")
    return build


def _builtin_rotation():
    ch = flat_cartesian()
    return Scenario("flat-rotation-cond", ch, rotation_field(), mass=1.0,
                    killing={"rot-z": ch.killing_field("rot-z")}, samples=rotation_samples(),
                    description="axisymmetric field with the invariance condition enforced")


def _builtin_static():
    ch = flat_cartesian()
    return Scenario("flat-static-cond", ch, static_field(), mass=1.0,
                    killing={"t": ch.killing_field("t")},
                    description="time-independent bilinears with xi.(P - V) = 0 along d_t")


BUILTIN: dict[str, Callable[[], Scenario]] = {
    "flat-plane-wave": _builtin_plane_wave,
    "flat-constant": _builtin_constant,
    "flat-cartesian-generic": _builtin_generic(flat_cartesian, "flat-cartesian-generic"),
    "flat-spherical-generic": _builtin_generic(flat_spherical, "flat-spherical-generic"),
    "schwarzschild-generic": _builtin_generic(schwarzschild, "schwarzschild-generic"),
    "stationary-generic": _builtin_generic(stationary_spherical, "stationary-generic"),
    "spherical-ansatz": _builtin_spherical(SphericalScenario, "spherical-ansatz"),
    "schwarzschild-ansatz": _builtin_spherical(schwarzschild_like, "schwarzschild-ansatz"),
    "flat-rotation-cond": _builtin_rotation,
    "flat-static-cond": _builtin_static,
}


# --- loading ------------------------------------------------------------------


def _killing_from_spec(spec, chart: SpacetimeChart) -> dict:
    if spec is None:
        return {n: chart.killing_field(n) for n in chart.killing_presets
                if n not in ("dilation", "dilation-x")}
    if isinstance(spec, list):
        return {n: chart.killing_field(n) for n in spec}
    if isinstance(spec, Mapping):
        return {n: KillingField(tuple(v), tuple(chart.coords), n) for n, v in spec.items()}
    raise InvalidScenario("killing must be a list of names or an object of components")


def scenario_from_dict(data: Mapping) -> Scenario:
    if not isinstance(data, Mapping):
        raise InvalidScenario("a scenario must be a JSON object")
    known = {"name", "chart", "field", "spherical", "mass", "killing", "samples", "tolerances",
             "seed", "schema_version", "description", "solution"}
    unknown = set(data) - known
    if unknown:
        raise InvalidScenario(f"unknown scenario keys {sorted(unknown)}")
    spherical = None
    if "spherical" in data:
        sp = dict(data["spherical"])
        try:
            spherical = SphericalScenario(**sp, samples=tuple(data.get("samples", ())),
                                          name=data.get("name", "spherical"))
        except TypeError as exc:
            raise InvalidScenario(f"bad spherical section: {exc}") from None
        chart = spherical.chart()
        fld = ansatz_field(spherical)
    else:
        if "chart" not in data:
            raise InvalidScenario("scenario needs a 'chart' or a 'spherical' section")
        chart = chart_from_spec(data["chart"])
        fld = field_from_spec(data.get("field", {}))
    tol = dict(DEFAULT_TOLERANCES)
    for k, v in dict(data.get("tolerances", {})).items():
        if k not in tol:
            raise InvalidScenario(f"unknown tolerance {k!r}")
        tol[k] = float(v)
    samples = data.get("samples")
    if samples is not None:
        samples = np.asarray(samples, dtype=float)
        if samples.ndim != 2 or samples.shape[1] != 4:
            raise InvalidScenario("samples must be a list of 4-component points")
    mass = float(data.get("mass", 0.0))
    if not (math.isfinite(mass) and mass >= 0):
        raise InvalidScenario("mass must be a finite non-negative number")
    return Scenario(name=str(data.get("name", "scenario")), chart=chart, field=fld, mass=mass,
                    killing=_killing_from_spec(data.get("killing"), chart), samples=samples,
                    tolerances=tol, seed=int(data.get("seed", 0)), spherical=spherical,
                    description=str(data.get("description", "")),
                    solution=bool(data.get("solution", False)))


def load_scenario(ref: str) -> Scenario:
    """A built-in scenario name or a path to a JSON scenario file."""
    if ref in BUILTIN and not os.path.exists(ref):
        return BUILTIN[ref]()
    try:
        with open(ref, encoding="utf-8") as fh:
            data = json.load(fh)
    except FileNotFoundError:
        raise InvalidScenario(f"no scenario file or built-in named {ref!r}; built-ins: {sorted(BUILTIN)}") from None
    except json.JSONDecodeError as exc:
        raise InvalidScenario(f"{ref}: invalid JSON at line {exc.lineno} column {exc.colno}: {exc.msg}") from None
    return scenario_from_dict(data)


def cond_at(field: PolarField, chart: SpacetimeChart, xi: KillingField, x) -> float:
    return _cond(LieContext(field.at(chart, x), xi, require_killing=False))
