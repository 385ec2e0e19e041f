import pytest
import sympy as sp

from symred import expr as ex
from symred import geometry as geo
from symred.geometry import (Chart, CollineationKind, Metric, VectorField)

r, th, x, y, z, sig = sp.symbols("r theta x y z sigma")


def polar_metric():
    chart = Chart((r, th), {"r": (0.5, 2.0), "theta": (0.5, 1.5)})
    return Metric(chart, sp.ImmutableMatrix([[1, 0], [0, r ** 2]]))


def frw_metric():
    chart = Chart((sig, x, y, z), {"sigma": (0.5, 2.0), "x": (0.5, 2.0),
                                   "y": (0.5, 2.0), "z": (0.5, 2.0)})
    g = sp.ImmutableMatrix(sp.diag(1, -sig ** 2, -sig ** 2, -sig ** 2))
    return Metric(chart, g)


class TestChart:
    def test_midpoint_is_exact_rational(self):
        chart = polar_metric().chart
        assert chart.midpoint("r") == sp.Rational(5, 4)

    def test_duplicate_coord_rejected(self):
        with pytest.raises(geo.GeometryError):
            Chart((x, x), {})


class TestChristoffel:
    def test_flat_vanishes(self):
        chart = Chart((x, y), {})
        m = Metric(chart, sp.ImmutableMatrix(sp.eye(2)))
        gamma = geo.christoffel(m)
        assert all(gamma[k, i, j] == 0
                   for k in range(2) for i in range(2) for j in range(2))

    def test_polar(self):
        gamma = geo.christoffel(polar_metric())
        assert gamma[0, 1, 1] == -r            # Gamma^r_{theta theta}
        assert gamma[1, 0, 1] == 1 / r          # Gamma^theta_{r theta}

    def test_contracted(self):
        got = geo.contracted_christoffel(polar_metric())
        assert ex.structurally_equal(got[0], -1 / r)
        assert got[1] == 0


class TestLaplaceBeltrami:
    def test_polar(self):
        f = sp.Function("f")(r, th)
        got = geo.laplace_beltrami(polar_metric(), f)
        want = (sp.diff(f, r, 2) + sp.diff(f, r) / r
                + sp.diff(f, th, 2) / r ** 2)
        assert sp.simplify(got - want) == 0

    def test_harmonic_log(self):
        # ln r is harmonic on the flat plane away from the origin
        assert ex.normalize(
            geo.laplace_beltrami(polar_metric(), sp.log(r))) == 0


class TestHeatPDE:
    def test_frw_form(self):
        pde = geo.heat_pde(frw_metric())
        assert pde.has_ut
        assert pde.A[0, 0] == 1
        assert ex.structurally_equal(pde.A[1, 1], -1 / sig ** 2)
        # drift: the u_sigma coefficient is +3/sigma, i.e. B_sigma = -3/sigma
        assert ex.structurally_equal(pde.B[0], -3 / sig)

    def test_flux_term(self):
        q = sp.Symbol("u") / (2 * sp.Symbol("t"))
        pde = geo.heat_pde(frw_metric(), q)
        assert ex.structurally_equal(pde.f, q)

    def test_laplace_pde_static(self):
        pde = geo.laplace_pde(polar_metric())
        assert not pde.has_ut
        assert ex.structurally_equal(pde.B[0], -1 / r)


class TestCollineations:
    def test_killing_rotation(self):
        chart = Chart((x, y), {})
        m = Metric(chart, sp.ImmutableMatrix(sp.eye(2)))
        cls = geo.classify_collineation(VectorField(chart, (y, -x)), m)
        assert cls.kind is CollineationKind.KV
        assert cls.gradient_flag is False

    def test_gradient_killing_translation(self):
        chart = Chart((x, y), {})
        m = Metric(chart, sp.ImmutableMatrix(sp.eye(2)))
        cls = geo.classify_collineation(VectorField(chart, (1, 0)), m)
        assert cls.kind is CollineationKind.KV
        assert cls.gradient_flag is True

    def test_homothety(self):
        chart = Chart((x, y), {})
        m = Metric(chart, sp.ImmutableMatrix(sp.eye(2)))
        cls = geo.classify_collineation(VectorField(chart, (x, y)), m)
        assert cls.kind is CollineationKind.HV
        assert cls.psi == 1

    def test_frw_gradient_homothety(self):
        m = frw_metric()
        cls = geo.classify_collineation(
            VectorField(m.chart, (sig, 0, 0, 0)), m)
        assert cls.kind is CollineationKind.HV
        assert cls.psi == 1
        assert cls.gradient_flag is True

    def test_conformal(self):
        chart = Chart((x, y), {})
        m = Metric(chart, sp.ImmutableMatrix(sp.eye(2)))
        v = VectorField(chart, (x ** 2 - y ** 2, 2 * x * y))
        cls = geo.classify_collineation(v, m)
        assert cls.kind is CollineationKind.CKV
        assert ex.structurally_equal(cls.psi, 2 * x)

    def test_not_conformal(self):
        chart = Chart((x, y), {"x": (0.5, 2.0), "y": (0.5, 2.0)})
        m = Metric(chart, sp.ImmutableMatrix(sp.eye(2)))
        cls = geo.classify_collineation(VectorField(chart, (y ** 2, 0)), m)
        assert cls.kind is CollineationKind.NOT_CONFORMAL


class TestGradientPotential:
    def test_translation(self):
        chart = Chart((x, y), {"x": (0.5, 2.0), "y": (0.5, 2.0)})
        m = Metric(chart, sp.ImmutableMatrix(sp.eye(2)))
        S = geo.gradient_potential(VectorField(chart, (1, 0)), m)
        assert ex.structurally_equal(sp.diff(S, x), 1)
        assert sp.diff(S, y) == 0

    def test_rotation_has_none(self):
        chart = Chart((x, y), {"x": (0.5, 2.0), "y": (0.5, 2.0)})
        m = Metric(chart, sp.ImmutableMatrix(sp.eye(2)))
        assert geo.gradient_potential(VectorField(chart, (y, -x)), m) is None

    def test_frw_homothety_potential(self):
        m = frw_metric()
        S = geo.gradient_potential(VectorField(m.chart, (sig, 0, 0, 0)), m)
        assert ex.structurally_equal(S, sig ** 2 / 2)


class TestConformal:
    def test_rescale_round_trip(self):
        m = polar_metric()
        n2 = sp.exp(r)
        mbar = geo.conformal_rescale_metric(m, n2)
        assert ex.structurally_equal(mbar.g[1, 1], sp.exp(r) * r ** 2)

    def test_transport(self):
        # a KV of g is a CKV of N^2 g with factor xi(ln N)
        m = polar_metric()
        mbar = geo.conformal_rescale_metric(m, sp.exp(r ** 2))
        v = VectorField(m.chart, (0, 1))
        cls = geo.classify_collineation(v, mbar)
        assert cls.kind is CollineationKind.KV

    def test_metric_compatibility(self):
        assert all(ex.normalize(e) == 0
                   for e in geo.metric_compatibility_residuals(polar_metric()))
