"""Command-line front end: ``diracpolar verify | invariance | nogo SCENARIO``.

SCENARIO is a built-in name or a path to a JSON scenario file.  Exit codes:
0 success, 1 residual failure, 2 input error.
"""

from __future__ import annotations

import argparse
import sys

import numpy as np

from . import report as rpt
from .clifford import check_algebra_identities
from .dynamics import DynamicsContext, dirac_residuals, divergence_residual, energy_tensor, momentum, p_minus_v
from .errors import DiracPolarError, InvalidScenario, NotWeaklyInvariant
from .geometry import killing_residual
from .lie import equivalence_check, lie_report
from .observables import aux_residual, bilinears, fierz_residuals, is_singular, random_spinors
from .polar import polar_decompose, polar_reconstruct
from .scenario import BUILTIN, Scenario, load_scenario
from .spherical import nogo_certificate
from .tensorial import curvature_residuals, transport_residuals

EXIT_OK, EXIT_FAIL, EXIT_INPUT = 0, 1, 2
RANDOM_SPINORS = 1000


class _Suite:
    """Running maxima of named residuals, with the point that produced each."""

    def __init__(self, tolerance: float):
        self.tolerance = tolerance
        self.residuals: dict[str, float] = {}
        self.worst_point: dict[str, list | None] = {}

    def add(self, values: dict, point=None):
        for k, v in values.items():
            v = float(v)
            if k not in self.residuals or not v <= self.residuals[k]:
                self.residuals[k] = v
                self.worst_point[k] = None if point is None else [float(c) for c in point]

    def failures(self) -> list[str]:
        return [k for k, v in self.residuals.items() if not v <= self.tolerance]

    def to_dict(self) -> dict:
        return {
            "tolerance": self.tolerance,
            "max": max(self.residuals.values(), default=0.0),
            "pass": not self.failures(),
            "residuals": dict(self.residuals),
            "worst_point": dict(self.worst_point),
        }


def _tolerances(scn: Scenario, override: float | None) -> dict:
    tol = dict(scn.tolerances)
    if override is not None:
        tol = {k: override for k in tol}
    return tol


def _points(scn: Scenario, args) -> np.ndarray:
    return scn.points(args.samples, args.seed)


def _spinor_checks(psis, fierz: _Suite, polar: _Suite, points=None):
    for i, psi in enumerate(psis):
        pt = None if points is None else points[i]
        if is_singular(psi):
            continue
        res = fierz_residuals(bilinears(psi))
        scale = max(1.0, float(np.vdot(psi, psi).real))
        res["aux"] = aux_residual(psi) / scale ** 1.5
        res["aux_normalized"] = aux_residual(psi, normalized=True) / scale ** 0.5
        fierz.add(res, pt)
        back = polar_reconstruct(polar_decompose(psi))
        polar.add({"round_trip": float(np.abs(back - psi).max()) / scale ** 0.5}, pt)


def run_verify(scn: Scenario, args) -> tuple[int, dict]:
    tol = _tolerances(scn, args.tolerance)
    pts = _points(scn, args)
    seed = scn.seed if args.seed is None else args.seed
    suites = {name: _Suite(tol[name]) for name in
              ("clifford", "fierz", "polar", "transport", "curvature", "faraday", "dynamics", "killing")}
    if scn.solution:
        suites["dirac"] = _Suite(tol["dirac"])
    suites["clifford"].add(check_algebra_identities())
    _spinor_checks(random_spinors(RANDOM_SPINORS, seed), suites["fierz"], suites["polar"])
    ctx = DynamicsContext(scn.mass)
    field_psis = []
    for x in pts:
        fp = scn.field.at(scn.chart, x)
        field_psis.append(fp.psi)
        suites["transport"].add(transport_residuals(fp), x)
        cur = curvature_residuals(fp)
        suites["curvature"].add({"riemann": cur["riemann"], "riemann_coordinate": cur["riemann_coordinate"]}, x)
        suites["faraday"].add({"faraday": cur["faraday"]}, x)
        dyn = dirac_residuals(fp, ctx=ctx)
        T = energy_tensor(fp, form="spinor")
        tscale = max(1.0, float(np.abs(T).max()))
        suites["dynamics"].add({
            "D1_vs_SM": float(np.abs(dyn["D1"] - 2 * dyn["SM"]).max()) / max(1.0, float(np.abs(dyn["D1"]).max())),
            "D2_vs_CA": float(np.abs(dyn["D2"] - 2 * dyn["CA"]).max()) / max(1.0, float(np.abs(dyn["D2"]).max())),
            "energy_polar_F": float(np.abs(energy_tensor(fp, form="polar-F") - T).max()) / tscale,
            "energy_polar": float(np.abs(energy_tensor(fp, form="polar") - T).max()) / tscale,
        }, x)
        if scn.solution:
            suites["dirac"].add({
                "spinor_equation": float(np.abs(dyn["spinor"]).max()),
                "D1": float(np.abs(dyn["D1"]).max()),
                "D2": float(np.abs(dyn["D2"]).max()),
                "momentum": float(np.abs(momentum(fp, ctx=ctx) - p_minus_v(fp)).max()),
                "divergence": divergence_residual(fp, ctx=ctx),
            }, x)
        for name, xi in scn.killing.items():
            suites["killing"].add({name: killing_residual(scn.chart, xi, x)}, x)
    _spinor_checks(field_psis, suites["fierz"], suites["polar"], pts)
    failures = [f"{s}.{k}" for s, suite in suites.items() for k in suite.failures()]
    body = {
        "seed": seed,
        "points": pts,
        "suites": {k: v.to_dict() for k, v in suites.items()},
        "failures": failures,
        "pass": not failures,
    }
    return (EXIT_FAIL if failures else EXIT_OK), rpt.make_report("verify", scn.name, body)


def run_invariance(scn: Scenario, args) -> tuple[int, dict]:
    tol = _tolerances(scn, args.tolerance)
    names = [args.killing] if args.killing else list(scn.killing)
    if not names:
        raise InvalidScenario("scenario declares no Killing fields; pass --killing NAME")
    fields = {n: scn.killing_field(n) for n in names}
    pts = _points(scn, args)
    reports, summaries, failures = [], [], []
    for name, xi in fields.items():
        for x in pts:
            r = lie_report(scn.field, scn.chart, xi, x)
            reports.append(r.to_dict())
            checks = {
                "tetrad_vs_covariant": (r.tetrad_vs_covariant, tol["lie"]),
                "final_equation": (r.final_equation_residual, tol["lie"]),
                "lie_gamma": (r.lie_gamma_residual, tol["lie"]),
                "lie_gamma_identity": (r.lie_gamma_identity, tol["lie"]),
                "killing": (r.killing_residual, tol["killing"]),
            }
            entry = {"killing": name, "point": r.point}
            try:
                eq = equivalence_check(scn.field, scn.chart, xi, x)
            except NotWeaklyInvariant:
                entry.update(weakly_invariant=False)
            else:
                # on weakly invariant samples |B psi| = |cond| |psi| / 2
                gap = abs(eq["bracket_norm"] - 0.5 * abs(eq["cond"]) * eq["psi_norm"])
                checks["bracket_vs_cond"] = (gap / max(1.0, eq["psi_norm"]), tol["lie"])
                entry.update(weakly_invariant=True, cond=eq["cond"], bracket_norm=eq["bracket_norm"],
                             psi_norm=eq["psi_norm"], strong_residual=eq["strong_residual"],
                             strongly_invariant=eq["strong_residual"] <= tol["lie"] * max(1.0, eq["psi_norm"]))
            entry["checks"] = {k: v for k, (v, _) in checks.items()}
            bad = [k for k, (v, t) in checks.items() if not v <= t]
            failures.extend(f"{name}@{len(summaries)}.{k}" for k in bad)
            summaries.append(entry)
    body = {
        "seed": scn.seed if args.seed is None else args.seed,
        "killing": names,
        "reports": reports,
        "equivalence": summaries,
        "failures": failures,
        "pass": not failures,
    }
    return (EXIT_FAIL if failures else EXIT_OK), rpt.make_report("invariance", scn.name, body)


def run_nogo(scn: Scenario, args) -> tuple[int, dict]:
    if scn.spherical is None:
        raise InvalidScenario(f"scenario {scn.name!r} is not a spherical ansatz scenario")
    cert = nogo_certificate(scn.spherical)
    ok = cert["discrepancy"] == 1.0
    body = {"certificate": cert, "pass": ok}
    return (EXIT_OK if ok else EXIT_FAIL), rpt.make_report("nogo", scn.name, body)


COMMANDS = {"verify": run_verify, "invariance": run_invariance, "nogo": run_nogo}


def _summary(report: dict) -> list[str]:
    lines = [f"{report['command']} {report['scenario']}"]
    if report["command"] == "verify":
        for name, s in report["suites"].items():
            flag = "PASS" if s["pass"] else "FAIL"
            lines.append(f"  {name:<10} max {s['max']:.3e}  tol {s['tolerance']:.1e}  {flag}")
    elif report["command"] == "invariance":
        weak = sum(e["weakly_invariant"] for e in report["equivalence"])
        lines.append(f"  {len(report['reports'])} point/field pairs, {weak} weakly invariant")
        for e in report["equivalence"]:
            if e["weakly_invariant"]:
                lines.append(f"  {e['killing']:<8} cond {e['cond']:+.3e}  |B psi| {e['bracket_norm']:.3e}"
                             f"  strong {e['strong_residual']:.3e}")
    else:
        c = report["certificate"]
        lines.extend(f"  {step}" for step in c["deduction"])
        lines.append(f"  discrepancy {c['discrepancy']:g}")
    for f in report.get("failures", []):
        lines.append(f"  failing: {f}")
    lines.append("PASS" if report["pass"] else "FAIL")
    return lines


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="diracpolar", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)
    for name, help_ in (("verify", "run the identity suites"),
                        ("invariance", "Lie derivatives along Killing fields"),
                        ("nogo", "spherical no-go certificate")):
        sp = sub.add_parser(name, help=help_)
        sp.add_argument("scenario", help=f"JSON file or built-in: {', '.join(sorted(BUILTIN))}")
        sp.add_argument("--tolerance", type=float, default=None, help="override every tolerance")
        sp.add_argument("--seed", type=int, default=None)
        sp.add_argument("--json", metavar="PATH", default=None, help="write the JSON report ('-' for stdout)")
        sp.add_argument("--samples", type=int, default=None, help="number of random sample points")
        sp.add_argument("--killing", default=None, metavar="NAME")
        sp.add_argument("--quiet", action="store_true")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.samples is not None and args.samples < 0:
        print("error: --samples must be non-negative", file=sys.stderr)
        return EXIT_INPUT
    try:
        scn = load_scenario(args.scenario)
        code, report = COMMANDS[args.command](scn, args)
    except DiracPolarError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INPUT
    rpt.write_report(report, args.json)
    if not args.quiet and args.json != "-":
        print("\n".join(_summary(report)))
    return code


if __name__ == "__main__":
    sys.exit(main())
