import math

import numpy as np
import pytest

from diracpolar.clifford import EPS_UPPER, ETA
from diracpolar.fields import LFactor, PolarField, v_vector
from diracpolar.geometry import flat_cartesian, flat_spherical, schwarzschild, stationary_spherical
from diracpolar.scenario import BUILTIN, generic_field
from diracpolar.tensorial import (curvature_residuals, rfull_reconstruction, tensorial_connection,
                                  tensorial_F, tensorial_P, transport_residuals)

CHARTS = [flat_cartesian, flat_spherical, schwarzschild, stationary_spherical]


def test_constant_field_on_flat_chart():
    ch = flat_cartesian()
    fp = PolarField(L=(LFactor(rapidities=("0.3", "0", "0.1"), angles=("0.2", "0", "0")),)).at(ch, [0, 0.1, 0.2, 0.3])
    assert not tensorial_F(fp, None, None).any()
    assert not fp.nabla_u.any()
    assert not fp.V.any()


@pytest.mark.parametrize("k", [0.5, -1.3])
def test_rotation_along_z(k):
    ch = flat_cartesian()
    F = tensorial_F(PolarField(L=(LFactor(angles=("0", "0", f"{k}*z")),)), ch, [0, 0.3, -0.2, 0.4])
    assert abs(F[1, 2, 3]) == pytest.approx(abs(k))
    assert F[1, 2, 3] == -F[2, 1, 3]
    mask = np.ones_like(F, dtype=bool)
    mask[1, 2, 3] = mask[2, 1, 3] = False
    assert np.abs(F[mask]).max() < 1e-15


def test_constant_L_on_schwarzschild_is_minus_levi_civita():
    ch = schwarzschild()
    x = [0.0, 4.0, 1.0, 0.5]
    F = tensorial_F(PolarField(L=(LFactor(angles=("0.4", "0", "0")),)), ch, x)
    C_low = np.einsum("ac,mcb->abm", ETA, ch.at(x).C)
    assert np.allclose(F, -C_low, atol=1e-15)


def test_gauge_vector():
    ch = flat_spherical()
    x = [0, 2.0, 1.0, 0.0]
    assert not tensorial_P(PolarField(q=0.0, zeta="t"), ch, x).any()
    assert np.allclose(tensorial_P(PolarField(zeta="t"), ch, x), [1, 0, 0, 0])
    e = 0.6
    P = tensorial_P(PolarField(q=e, A=("exp(-r)/r", "0", "0", "0")), ch, x)
    assert P[0] == pytest.approx(-e * math.exp(-2.0) / 2.0)


def test_v_vector_examples(rng):
    assert not v_vector(np.zeros((4, 4, 4)), ETA @ [1, 0, 0, 0], ETA @ [0, 0, 0, 1]).any()
    F = rng.normal(size=(4, 4, 4))
    F = F - F.transpose(1, 0, 2)
    V = v_vector(F, ETA @ np.array([1.0, 0, 0, 0]), ETA @ np.array([0, 0, 0, 1.0]))
    assert np.allclose(V, 0.5 * F[1, 2])


def test_rfull_with_random_connection(rng):
    # nabla u and nabla s built from the transport law reconstruct any F
    fld = generic_field(("t", "x", "y", "z"))
    fp = fld.at(flat_cartesian(), [0.1, 0.2, 0.3, 0.4])
    F = rng.normal(size=(4, 4, 4))
    F = F - F.transpose(1, 0, 2)
    u, s = fp.u, fp.s
    nu = np.einsum("jim,j->mi", F, u)
    ns = np.einsum("jim,j->mi", F, s)
    V = v_vector(F, ETA @ u, ETA @ s)
    rec = rfull_reconstruction(nu, ns, ETA @ u, ETA @ s, V)
    assert np.abs(rec - F).max() < 1e-10


@pytest.mark.parametrize("make", CHARTS)
def test_transport_on_each_chart(make):
    ch = make()
    fld = generic_field(ch.coords)
    for x in ch.sample_points(10, seed=11):
        res = transport_residuals(fld, ch, x)
        assert max(res.values()) < 1e-8, res


def test_radial_boost_gradient():
    ch = flat_cartesian()
    fld = PolarField(L=(LFactor(rapidities=("-0.5*x^2", "0", "0")),))
    x = 0.7
    fp = fld.at(ch, [0, x, 0, 0])
    alpha = 0.5 * x * x
    assert fp.u[0] == pytest.approx(math.cosh(alpha))
    nab = fp.nabla_u @ ETA  # nabla_mu u_a
    assert nab[1, 0] == pytest.approx(math.sinh(alpha) * x)
    assert abs(nab[1, 1]) == pytest.approx(math.cosh(alpha) * x)
    assert not nab[[0, 2, 3]].any()
    assert nab[1, 0] == pytest.approx(np.einsum("j,j->", fp.F_lower[:, 0, 1], fp.u))


@pytest.mark.parametrize("make", CHARTS)
def test_curvature_reconstruction(make):
    ch = make()
    fld = generic_field(ch.coords)
    for x in ch.sample_points(5, seed=12):
        res = curvature_residuals(fld, ch, x)
        assert res["riemann"] < 1e-9 * max(1, res["riemann_scale"])
        assert res["riemann_coordinate"] < 1e-9
        assert res["faraday"] < 1e-10 * max(1, res["faraday_scale"])


def test_constant_L_schwarzschild_curvature():
    ch = schwarzschild()
    for x in ch.sample_points(5):
        res = curvature_residuals(PolarField(), ch, x)
        assert res["riemann"] < 1e-6
        assert res["riemann_scale"] > 1e-3


def test_magnetic_potential():
    ch = flat_cartesian()
    B0, q = 0.8, 1.5
    fp = PolarField(q=q, A=("0", "0", "0", f"{B0}*x")).at(ch, [0, 0.2, 0.1, 0.3])
    res = curvature_residuals(fp)
    assert res["faraday"] < 1e-10
    curl = fp.dP - fp.dP.T
    assert curl[1, 3] == pytest.approx(-q * B0)
    curl[1, 3] = curl[3, 1] = 0
    assert not curl.any()


def test_connection_bundle():
    sc = BUILTIN["stationary-generic"]()
    tc = tensorial_connection(sc.field, sc.chart, sc.points(1)[0])
    assert tc.antisymmetry_residual() < 1e-14
    assert np.allclose(np.einsum("ac,bd,cdm->abm", ETA, ETA, tc.F_upper), tc.F)
    assert tc.P.shape == tc.V.shape == (4,)
