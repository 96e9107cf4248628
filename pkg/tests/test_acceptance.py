"""Acceptance criteria, one test each.

Every test prints a single ``CRITERION <n> PASS|FAIL ...`` line (also
collected into the pytest terminal summary). Run directly with
``python tests/test_acceptance.py`` to get just those lines.
"""

import math
import sys
import time
from pathlib import Path

import numpy as np

sys.path.insert(0, str(Path(__file__).parent))

from conftest import ACCEPTANCE_LINES  # noqa: E402

from diracpolar.clifford import check_algebra_identities  # noqa: E402
from diracpolar.clifford import ETA  # noqa: E402
from diracpolar.dynamics import energy_tensor  # noqa: E402
from diracpolar.errors import SingularSpinor  # noqa: E402
from diracpolar.fields import LFactor, PolarField  # noqa: E402
from diracpolar.geometry import (flat_cartesian, flat_spherical, killing_residual, riemann_coordinate_lower,  # noqa: E402
                                 schwarzschild, stationary_spherical)
from diracpolar.lie import (LieContext, bracket_operator, equivalence_check, lie_gamma_residual,  # noqa: E402
                            lie_spinor, polar_lie_decomposition)
from diracpolar.observables import aux_residual, bilinears, fierz_residuals, random_spinors  # noqa: E402
from diracpolar.polar import polar_decompose, polar_reconstruct  # noqa: E402
from diracpolar.scenario import BUILTIN, generic_field, rotation_field, rotation_samples, static_field  # noqa: E402
from diracpolar.spherical import nogo_certificate, random_scenarios, spherical_killing_fields  # noqa: E402
from diracpolar.tensorial import curvature_residuals, transport_residuals  # noqa: E402

CHARTS = {"flat-cartesian": flat_cartesian, "flat-spherical": flat_spherical,
          "schwarzschild": schwarzschild, "stationary-spherical": stationary_spherical}


def verdict(n: int, ok: bool, detail: str) -> None:
    line = f"CRITERION {n} {'PASS' if ok else 'FAIL'} {detail}"
    print(line)
    ACCEPTANCE_LINES.append(line)
    assert ok, line


def test_criterion_1_clifford_identities():
    t0 = time.perf_counter()
    res = check_algebra_identities()
    dt = time.perf_counter() - t0
    worst = max(res.values())
    verdict(1, len(res) >= 6 and worst < 1e-14 and dt < 1.0,
            f"clifford identities: {len(res)} checked, max residual {worst:.2e} (< 1e-14), {dt:.3f}s (< 1s)")


def test_criterion_2_fierz():
    t0 = time.perf_counter()
    worst = {}
    for psi in random_spinors(1000, seed=2024):
        res = fierz_residuals(bilinears(psi))
        scale = max(1.0, float(np.vdot(psi, psi).real))
        res["aux"] = aux_residual(psi) / scale ** 1.5
        for k, v in res.items():
            worst[k] = max(worst.get(k, 0.0), v)
    dt = time.perf_counter() - t0
    top = max(worst.values())
    verdict(2, top < 1e-10 and dt < 5.0,
            f"fierz on 1000 spinors: max relative residual {top:.2e} over {sorted(worst)} (< 1e-10), {dt:.2f}s (< 5s)")


def test_criterion_3_polar_round_trip():
    worst = 0.0
    for psi in random_spinors(1000, seed=77):
        worst = max(worst, float(np.abs(polar_reconstruct(polar_decompose(psi)) - psi).max()))
    flags = [np.array(v, dtype=complex) for v in ([1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1j])]
    rejected = 0
    for f in flags:
        try:
            polar_decompose(f)
        except SingularSpinor:
            rejected += 1
    verdict(3, worst < 1e-10 and rejected == len(flags),
            f"polar round trip: max error {worst:.2e} (< 1e-10) on 1000 spinors; {rejected}/{len(flags)} flag spinors rejected")


def test_criterion_4_transport():
    t0 = time.perf_counter()
    worst = {}
    for name, make in CHARTS.items():
        ch = make()
        fld = generic_field(ch.coords)
        for x in ch.sample_points(20, seed=4):
            res = transport_residuals(fld, ch, x)
            worst[name] = max(worst.get(name, 0.0), res["nabla_u"], res["nabla_s"], res["rfull"])
    dt = time.perf_counter() - t0
    top = max(worst.values())
    verdict(4, top < 1e-8 and dt < 30.0,
            f"transport (nabla u, nabla s, F reconstruction) at 20 points x 4 charts: max {top:.2e} (< 1e-8), {dt:.2f}s (< 30s)")


def test_criterion_5_curvature():
    sch = schwarzschild()
    fld = generic_field(sch.coords)
    worst_s = 0.0
    for x in sch.sample_points(20, seed=5):
        res = curvature_residuals(fld, sch, x)
        worst_s = max(worst_s, res["riemann"], res["riemann_coordinate"])
    worst_flat = 0.0
    for make in (flat_cartesian, flat_spherical):
        ch = make()
        f = generic_field(ch.coords)
        for x in ch.sample_points(20, seed=6):
            res = curvature_residuals(f, ch, x)
            worst_flat = max(worst_flat, res["riemann"], float(np.abs(ch.at(x).R).max()))
    poly = PolarField(L=(LFactor(angles=("0.2*x", "0", "0.1*y*z")),), q=0.8, zeta="0.3*t*x",
                      A=("x*y", "t^2 - z", "0.5*x^3", "y*z*t"))
    fc = flat_cartesian()
    worst_far = max(curvature_residuals(poly, fc, x)["faraday"] for x in fc.sample_points(20, seed=7))
    ok = worst_s < 1e-6 and worst_flat < 1e-9 and worst_far < 1e-10
    verdict(5, ok, f"curvature: schwarzschild {worst_s:.2e} (< 1e-6), flat {worst_flat:.2e} (< 1e-9), "
                   f"faraday {worst_far:.2e} (< 1e-10)")


def test_criterion_6_lie_forms_and_gamma():
    worst_forms = 0.0
    for name in ("flat-cartesian-generic", "flat-spherical-generic", "schwarzschild-generic",
                 "stationary-generic", "spherical-ansatz"):
        sc = BUILTIN[name]()
        for xi in sc.killing.values():
            for x in sc.points(3, seed=8):
                a = lie_spinor(sc.field, sc.chart, xi, x)
                b = lie_spinor(sc.field, sc.chart, xi, x, form="tetrad")
                worst_forms = max(worst_forms, float(np.abs(a - b).max()))
    worst_gamma = 0.0
    sph = BUILTIN["stationary-generic"]()
    for xi in spherical_killing_fields():
        for x in sph.points(5, seed=9):
            worst_gamma = max(worst_gamma, lie_gamma_residual(sph.field, sph.chart, xi, x))
    flat = BUILTIN["flat-cartesian-generic"]()
    for n in ("t", "x", "y", "z", "rot-x", "rot-y", "rot-z"):
        for x in flat.points(5, seed=9):
            worst_gamma = max(worst_gamma, lie_gamma_residual(flat.field, flat.chart, flat.killing[n], x))
    verdict(6, worst_forms < 1e-8 and worst_gamma < 1e-10,
            f"lie derivative: tetrad vs covariant {worst_forms:.2e} (< 1e-8), L_xi gamma {worst_gamma:.2e} (< 1e-10)")


def test_criterion_7_polar_lie_decomposition():
    worst, pairs = 0.0, 0
    for name in sorted(BUILTIN):
        sc = BUILTIN[name]()
        for xi in sc.killing.values():
            for x in sc.points(3, seed=10):
                _, res = polar_lie_decomposition(sc.field, sc.chart, xi, x)
                worst = max(worst, res)
                pairs += 1
    verdict(7, worst < 1e-8 and pairs >= 100,
            f"polar decomposition of L_xi psi: max residual {worst:.2e} (< 1e-8) over {pairs} point/field pairs")


def test_criterion_8_theorem():
    fc = flat_cartesian()
    xi = fc.killing_field("rot-z")
    pts = rotation_samples(12, seed=3)
    enforced = max(equivalence_check(rotation_field(), fc, xi, x)["bracket_norm"] for x in pts)
    deltas = np.array([0.1, 0.2, 0.5])
    norms = []
    for d in deltas:
        vals = [equivalence_check(rotation_field(detune=float(d)), fc, xi, x) for x in pts]
        norms.append(np.mean([v["bracket_norm"] / v["psi_norm"] for v in vals]))
    slope, intercept = np.polyfit(deltas, norms, 1)
    ok = enforced < 1e-8 and abs(slope - 1) < 0.1 and abs(intercept) < 1e-8
    verdict(8, ok, f"theorem: |B psi| = {enforced:.2e} with the condition enforced (< 1e-8); "
                   f"slope of |B psi|/|psi| against detuning {slope:.6f} (within 10% of 1)")


def test_criterion_9_energy():
    fc = flat_cartesian()
    xi = fc.killing_field("t")
    xv = np.array([1.0, 0, 0, 0])
    m = BUILTIN["flat-static-cond"]().mass
    worst_rel, weak, ratios = 0.0, 0.0, []
    for x in fc.sample_points(20, seed=11):
        eq = equivalence_check(static_field(0.0), fc, xi, x)
        weak = max(weak, eq["weak_max"], abs(eq["cond"]))
        fp = static_field(0.0).at(fc, x)
        T = ETA @ energy_tensor(fp) @ ETA
        worst_rel = max(worst_rel, abs(xv @ T @ xv) / (fp.phi ** 2 * m))
        for d in (0.1, 0.2, 0.5):
            fd = static_field(d).at(fc, x)
            Td = xv @ ETA @ energy_tensor(fd) @ ETA @ xv
            ratios.append(Td / (2 * fd.phi ** 2 * fd.u[0] * d))
    ok = worst_rel < 1e-8 and weak < 1e-8 and min(ratios) > 0.5 and max(ratios) < 2
    verdict(9, ok, f"energy: |T(xi, xi)|/(phi^2 m) = {worst_rel:.2e} with the condition (< 1e-8); "
                   f"detuned T_tt / (2 phi^2 u_t delta) in [{min(ratios):.3f}, {max(ratios):.3f}]")


def test_criterion_10_nogo():
    t0 = time.perf_counter()
    scns = random_scenarios(6, seed=10)
    disc = [nogo_certificate(s)["discrepancy"] for s in scns]
    dt = time.perf_counter() - t0
    static = scns[0].eta == "0"
    schw = scns[1].C == "log(r)"
    ok = all(d == 1.0 for d in disc) and len(disc) >= 5 and static and schw and dt < 5.0
    verdict(10, ok, f"no-go: discrepancies {sorted(set(disc))} over {len(disc)} scenarios "
                    f"(static and log r included), {dt:.2f}s (< 5s)")


def test_criterion_11_killing():
    ch = stationary_spherical()
    rng = np.random.default_rng(11)
    pts = ch.sample_points(20, seed=11)
    pts[:, 2] = rng.uniform(0.1, math.pi - 0.1, 20)
    worst = max(killing_residual(ch, xi, x) for xi in spherical_killing_fields() for x in pts)
    verdict(11, worst < 1e-10, f"killing: four spherical fields at 20 points, max residual {worst:.2e} (< 1e-10)")


if __name__ == "__main__":
    failed = 0
    for name, fn in sorted(((k, v) for k, v in globals().items() if k.startswith("test_criterion_")),
                           key=lambda kv: int(kv[0].split("_")[2])):
        try:
            fn()
        except AssertionError:
            failed += 1
    sys.exit(1 if failed else 0)
