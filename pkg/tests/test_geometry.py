import math

import numpy as np
import pytest
import sympy as sp

from diracpolar.errors import DegenerateTetrad, InvalidScenario, OutOfDomain
from diracpolar.geometry import (build_chart, chart_from_spec, fd_crosscheck, flat_cartesian, flat_spherical,
                                 killing_residual, lie_bracket, riemann, riemann_coordinate_lower,
                                 rotated_tetrad, schwarzschild, spin_connection, stationary_spherical)
from diracpolar.spherical import spherical_killing_fields

from sympy_oracle import COORDS, riemann_from_metric, schwarzschild_metric, stationary_metric

ALL_CHARTS = [flat_cartesian, flat_spherical, schwarzschild, stationary_spherical]


@pytest.mark.parametrize("make", ALL_CHARTS)
def test_metric_is_symmetric_and_lorentzian(make):
    ch = make()
    for x in ch.sample_points(5, seed=2):
        g = ch.at(x).g
        assert np.allclose(g, g.T)
        ev = np.sort(np.linalg.eigvalsh(g))
        assert (ev[:3] < 0).all() and ev[3] > 0


@pytest.mark.parametrize("make", ALL_CHARTS)
def test_symbolic_derivatives_agree_with_finite_differences(make):
    ch = make()
    for x in ch.sample_points(3, seed=4):
        assert ch.derivative_crosscheck(x) < 1e-7


def test_flat_cartesian_connection_vanishes():
    ch = flat_cartesian()
    for x in ch.sample_points(4):
        assert not spin_connection(ch, x).any()
        assert not riemann(ch, x).any()


def test_flat_spherical_has_connection_but_no_curvature():
    ch = flat_spherical()
    x = [0.0, 1.3, math.pi / 2, 0.4]
    C = spin_connection(ch, x)
    assert np.abs(C).max() > 0.5
    assert np.abs(riemann(ch, x)).max() < 1e-10
    for x in ch.sample_points(10):
        assert np.abs(riemann(ch, x)).max() < 1e-10


def test_spin_connection_antisymmetric():
    ch = stationary_spherical()
    for x in ch.sample_points(5):
        C = spin_connection(ch, x)
        assert np.abs(C + C.transpose(1, 0, 2)).max() < 1e-14


@pytest.mark.parametrize("r", [3.0, 5.0, 20.0])
def test_schwarzschild_tidal_component(r):
    M = 1.0
    R = riemann(schwarzschild(M), [0.0, r, 1.1, 0.3])
    assert R[0, 1, 0, 1] == pytest.approx(-2 * M / r ** 3, rel=1e-10)
    # mixed frame/coordinate slot: the orthonormal value times e^2_theta e^3_phi = r^2 sin(theta)
    assert R[2, 3, 2, 3] == pytest.approx(-2 * M / r * math.sin(1.1), rel=1e-10)


def _check_against_sympy(chart, metric, points, rel):
    R = riemann_from_metric(metric)
    fns = {k: sp.lambdify(COORDS, v, "math") for k, v in R.items()}
    for x in points:
        got = chart.at(x).riemann_christoffel
        from_spin = np.einsum("ap,pqmn->aqmn", chart.at(x).ginv, riemann_coordinate_lower(chart.at(x)))
        scale = max(1.0, np.abs(got).max())
        for (a, b, c, d), fn in fns.items():
            want = fn(*x)
            assert got[a, b, c, d] == pytest.approx(want, abs=rel * scale)
            assert from_spin[a, b, c, d] == pytest.approx(want, abs=rel * scale)


def test_schwarzschild_against_symbolic_oracle():
    ch = schwarzschild(1.5)
    _check_against_sympy(ch, schwarzschild_metric(sp.Rational(3, 2)), ch.sample_points(4, seed=8), 1e-10)


def test_stationary_against_symbolic_oracle():
    r = COORDS[1]
    A, B, C, eta = -1 / (2 + r), 1 / (2 + r), sp.log(r) + sp.Rational(1, 10) / (1 + r), sp.Rational(3, 10) * sp.exp(-r)
    ch = stationary_spherical()
    _check_against_sympy(ch, stationary_metric(A, B, C, eta), ch.sample_points(3, seed=9), 1e-9)


@pytest.mark.parametrize("make", [schwarzschild, stationary_spherical])
def test_first_bianchi_identity(make):
    ch = make()
    for x in ch.sample_points(6, seed=5):
        Rl = riemann_coordinate_lower(ch.at(x))
        cyc = Rl + Rl.transpose(0, 2, 3, 1) + Rl.transpose(0, 3, 1, 2)
        assert np.abs(cyc).max() < 1e-8


def test_riemann_pair_symmetry():
    ch = stationary_spherical()
    for x in ch.sample_points(4):
        Rl = riemann_coordinate_lower(ch.at(x))
        assert np.abs(Rl - Rl.transpose(2, 3, 0, 1)).max() < 1e-10


def test_frame_rotation_leaves_metric_and_curvature_scalar():
    ch = schwarzschild()
    rot = rotated_tetrad(ch, "0.3*r + theta", axis=2)
    x = [0.2, 4.0, 1.0, 0.5]
    assert np.allclose(ch.at(x).g, rot.at(x).g, atol=1e-13)
    assert np.allclose(ch.at(x).riemann_christoffel, rot.at(x).riemann_christoffel, atol=1e-12)


def test_killing_fields_on_flat_cartesian():
    ch = flat_cartesian()
    x = [0.1, 0.2, -0.3, 0.5]
    for name in ("t", "x", "rot-x", "rot-z", "boost-y"):
        assert killing_residual(ch, ch.killing_field(name), x) == 0
    assert killing_residual(ch, ch.killing_field("dilation-x"), x) == 2


@pytest.mark.parametrize("make", [flat_spherical, schwarzschild, stationary_spherical])
def test_spherical_killing_fields(make):
    ch = make()
    rng = np.random.default_rng(0)
    pts = ch.sample_points(20, seed=1)
    pts[:, 2] = rng.uniform(0.1, math.pi - 0.1, len(pts))
    for xi in spherical_killing_fields():
        for x in pts:
            assert killing_residual(ch, xi, x) < 1e-10


def test_xi1_components_on_equator():
    xi1 = spherical_killing_fields()[1]
    v, _ = xi1.evaluate([0, 1.0, math.pi / 2, 0.0])
    assert np.allclose(v, [0, 0, -1, 0], atol=1e-16)


def test_rotation_algebra_closes():
    _, x1, x2, x3 = spherical_killing_fields()
    for x in flat_spherical().sample_points(8):
        br = lie_bracket(x1, x2, x)
        v3, _ = x3.evaluate(x)
        assert min(np.abs(br - v3).max(), np.abs(br + v3).max()) < 1e-8


def test_fd_crosscheck_examples():
    assert fd_crosscheck("r^2", {"r": 2.0}) < 1e-10
    assert fd_crosscheck("exp(r)", {"r": 1.0}) < 1e-9
    ch = schwarzschild()
    with pytest.raises(OutOfDomain):
        ch.fd_crosscheck("log(r - 2)", [0.0, 2.0 + 1e-4, 1.0, 0.0])


def test_domain_and_degeneracy():
    ch = schwarzschild()
    with pytest.raises(OutOfDomain):
        ch.at([0, 1.5, 1.0, 0])
    with pytest.raises(OutOfDomain):
        flat_spherical().at([0, 1.0, 0.0, 0])
    bad = build_chart(("t", "x", "y", "z"), [["1", "0", "0", "0"], ["0", "x", "0", "0"],
                                             ["0", "0", "1", "0"], ["0", "0", "0", "1"]])
    bad.at([0, 0.5, 0, 0])
    with pytest.raises(DegenerateTetrad):
        bad.at([0, 0.0, 0, 0])


def test_chart_specs():
    assert chart_from_spec("schwarzschild").name == "schwarzschild"
    ch = chart_from_spec({"preset": "schwarzschild", "params": {"M": 2.0}})
    with pytest.raises(OutOfDomain):
        ch.at([0, 3.9, 1, 0])
    custom = chart_from_spec({"coords": ["t", "x", "y", "z"],
                              "tetrad": [["a", "0", "0", "0"], ["0", "1", "0", "0"], ["0", "0", "1", "0"],
                                         ["0", "0", "0", "1"]],
                              "params": {"a": 2.0}})
    assert custom.at([0, 0, 0, 0]).g[0, 0] == 4.0
    with pytest.raises(InvalidScenario):
        chart_from_spec("anti-de-sitter")
    with pytest.raises(InvalidScenario):
        chart_from_spec({"coords": ["t", "x", "y", "z"]})
    with pytest.raises(InvalidScenario):
        flat_cartesian().killing_field("nope")
