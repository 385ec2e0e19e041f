import pytest
import sympy as sp

from symred import expr as ex
from symred import geometry as geo
from symred.classify import (ClassificationError, classify_reduction,
                             inheritance_map, pushforward)
from symred.geometry import (Chart, CollineationClass, CollineationKind,
                             Metric, VectorField)
from symred.pde import TIME, PointGenerator, SymmetryAlgebra
from symred.reduction import invariants_for, reduce_pde
from symred.symmetry import (AlgebraEntry, flux_symmetries_from_homothetic,
                             heat_symmetries_from_homothetic)

x, y1, y2 = sp.symbols("x y1 y2")
KV = CollineationKind.KV


def flat3():
    chart = Chart((x, y1, y2),
                  {"x": (0.5, 2.0), "y1": (0.5, 2.0), "y2": (0.5, 2.0)})
    return Metric(chart, sp.ImmutableMatrix(sp.eye(3)))


def flat_algebra():
    m = flat3()
    entries = [
        AlgebraEntry("X_1", VectorField(m.chart, (1, 0, 0)),
                     CollineationClass(KV, sp.Integer(0), True), potential=x),
        AlgebraEntry("Y_1", VectorField(m.chart, (0, 1, 0)),
                     CollineationClass(KV, sp.Integer(0), False)),
        AlgebraEntry("Y_12", VectorField(m.chart, (0, y2, -y1)),
                     CollineationClass(KV, sp.Integer(0), False)),
    ]
    return m, heat_symmetries_from_homothetic(m, entries)


class TestInheritance:
    def test_commuting_vectors_inherit(self):
        m, algebra = flat_algebra()
        inh = inheritance_map(algebra, algebra.named("X_1"))
        assert inh["Y_1"] == "inheriting"
        assert inh["Y_12"] == "inheriting"
        assert inh["X_t"] == "inheriting"

    def test_bracket_outside_span_blocks(self):
        m, algebra = flat_algebra()
        # [X_t, X_1_sq] = X_1, outside span{X_1_sq} + background
        inh = inheritance_map(algebra, algebra.named("X_1_sq"))
        assert inh["X_t"] == "non-inheriting"
        assert inh["Y_1"] == "inheriting"


class TestPushforward:
    def test_projectable(self):
        m, algebra = flat_algebra()
        invch = invariants_for(algebra.named("X_1"))
        img = pushforward(algebra.named("Y_12"), invch)
        assert img is not None
        assert img.xi == (y2, -y1)

    def test_not_expressible(self):
        m, algebra = flat_algebra()
        invch = invariants_for(algebra.named("X_1"))
        # t d_x - x/2 u d_u does not project: its u-part keeps x
        img = pushforward(algebra.named("X_1_sq"), invch)
        assert img is None

    def test_u_part_transported(self):
        m, algebra = flat_algebra()
        invch = invariants_for(algebra.named("X_1_sq"))
        img = pushforward(algebra.named("Y_1"), invch)
        assert img is not None and img.a == 0


class TestClassifyReduction:
    def test_plain_reduction_no_hidden(self):
        m, algebra = flat_algebra()
        Z = algebra.named("X_1")
        red = reduce_pde(geo.heat_pde(m), Z, invariants_for(Z))
        block = Metric(red.chart.chart, sp.ImmutableMatrix(sp.eye(2)))
        rsyms = heat_symmetries_from_homothetic(block, [
            AlgebraEntry("Y_1", VectorField(block.chart, (1, 0)),
                         CollineationClass(KV, sp.Integer(0), False)),
            AlgebraEntry("Y_12", VectorField(block.chart, (y2, -y1)),
                         CollineationClass(KV, sp.Integer(0), False)),
        ])
        rep = classify_reduction(algebra, "X_1", red, rsyms)
        assert {n for n, _ in rep.inherited} >= {"X_t", "X_u", "Y_1", "Y_12"}
        assert rep.type1_hidden == ["X_1_sq"]
        assert rep.type2_hidden == []
        assert any("does not project" in c for c in rep.caveats)

    def test_flux_reduction_type2(self):
        m, algebra = flat_algebra()
        Z = algebra.named("X_1_sq")
        red = reduce_pde(geo.heat_pde(m), Z, invariants_for(Z))
        block = Metric(red.chart.chart, sp.ImmutableMatrix(sp.eye(2)))
        rsyms = flux_symmetries_from_homothetic(block, [
            AlgebraEntry("Y_1", VectorField(block.chart, (1, 0)),
                         CollineationClass(KV, sp.Integer(0), False)),
        ])
        rep = classify_reduction(algebra, "X_1_sq", red, rsyms)
        t2 = {n for n, _ in rep.type2_hidden}
        assert t2 == {"X_tau"}
        _, gen = rep.type2_hidden[0]
        assert gen.xi_t == 1
        assert ex.structurally_equal(gen.a, -1 / (2 * TIME))

    def test_background_marker_always_inherits(self):
        m, algebra = flat_algebra()
        Z = algebra.named("X_1")
        red = reduce_pde(geo.heat_pde(m), Z, invariants_for(Z))
        block = Metric(red.chart.chart, sp.ImmutableMatrix(sp.eye(2)))
        rsyms = heat_symmetries_from_homothetic(block, [])
        rep = classify_reduction(algebra, "X_1", red, rsyms)
        names = {n for n, _ in rep.inherited}
        assert "X_b" in names and "X_u" in names
