"""Quasilinear PDE and point-generator data types.

The PDE form is ``A^{ij} u_{ij} - B^i u_i [- u_t] - f(x, u) = 0`` on a
space chart, with the evolution term switched by ``has_ut``.  Point
generators act as ``xi^t d_t + xi^i d_i + (a u + b) d_u`` with ``xi`` and
``a`` independent of ``u``; the ``b`` part is either an explicit
expression or the marker for the always-present arbitrary-solution
family ``b(t, x) d_u``.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Mapping, Sequence

import sympy as sp

from . import expr as ex
from .expr import Expression
from .geometry import Chart, GeometryError

#: Reserved evolution coordinate and dependent variable.
TIME = sp.Symbol("t")
DEP = sp.Symbol("u")


class _ArbitrarySolutionMarker:
    """b(t, x) d_u with b an arbitrary solution of the target PDE."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "ArbitrarySolutionMarker"


ARBITRARY_SOLUTION = _ArbitrarySolutionMarker()


@dataclass(frozen=True)
class QuasiLinearPDE:
    chart: Chart
    A: sp.ImmutableMatrix
    B: tuple[Expression, ...]
    f: Expression = sp.Integer(0)
    has_ut: bool = False

    def __post_init__(self):
        A = sp.ImmutableMatrix(self.A).applyfunc(ex.normalize)
        object.__setattr__(self, "A", A)
        object.__setattr__(
            self, "B", tuple(ex.normalize(sp.sympify(b)) for b in self.B))
        object.__setattr__(self, "f", ex.normalize(sp.sympify(self.f)))
        n = self.chart.dim
        if A.shape != (n, n) or A != A.T:
            raise GeometryError("A must be a symmetric n x n matrix")
        if len(self.B) != n:
            raise GeometryError("B has wrong length")

    @property
    def dim(self) -> int:
        return self.chart.dim

    def apply_operator(self, w: Expression) -> Expression:
        """A^{ij} w_{ij} - B^i w_i [- w_t] - f(x, u -> w)."""
        x = self.chart.coords
        n = self.dim
        out = sum(self.A[i, j] * sp.diff(w, x[i], x[j])
                  for i in range(n) for j in range(n))
        out -= sum(self.B[i] * sp.diff(w, x[i]) for i in range(n))
        if self.has_ut:
            out -= sp.diff(w, TIME)
        out -= self.f.subs(DEP, w)
        return ex.normalize(out)

    def coefficients_equal(self, other: "QuasiLinearPDE") -> bool:
        if (self.chart.names != other.chart.names
                or self.has_ut != other.has_ut):
            return False
        diffs = [self.A[i, j] - other.A[i, j]
                 for i in range(self.dim) for j in range(self.dim)]
        diffs += [a - b for a, b in zip(self.B, other.B)]
        diffs.append(self.f - other.f)
        return all(ex.normalize(d) == 0 or sp.simplify(d) == 0 for d in diffs)


@dataclass(frozen=True)
class PointGenerator:
    chart: Chart
    #: spatial components xi^i, ordered like the chart; may depend on t.
    xi: tuple[Expression, ...]
    xi_t: Expression = sp.Integer(0)
    a: Expression = sp.Integer(0)
    b: Expression | _ArbitrarySolutionMarker = sp.Integer(0)

    def __post_init__(self):
        object.__setattr__(
            self, "xi", tuple(ex.normalize(sp.sympify(c)) for c in self.xi))
        object.__setattr__(self, "xi_t", ex.normalize(sp.sympify(self.xi_t)))
        object.__setattr__(self, "a", ex.normalize(sp.sympify(self.a)))
        if not isinstance(self.b, _ArbitrarySolutionMarker):
            object.__setattr__(self, "b", ex.normalize(sp.sympify(self.b)))
        if len(self.xi) != self.chart.dim:
            raise GeometryError("xi has wrong length for the chart")
        bad = [c for c in (*self.xi, self.xi_t, self.a) if c.has(DEP)]
        if bad:
            raise GeometryError(f"xi and a must be independent of u: {bad}")

    # -- algebra ------------------------------------------------------------

    @property
    def has_marker(self) -> bool:
        return isinstance(self.b, _ArbitrarySolutionMarker)

    def parts(self) -> tuple[Expression, ...]:
        """(xi_t, xi..., a, b) with the marker excluded."""
        b = sp.Integer(0) if self.has_marker else self.b
        return (self.xi_t, *self.xi, self.a, b)

    def is_zero(self) -> bool:
        return not self.has_marker and all(p == 0 for p in self.parts())

    def __add__(self, other: "PointGenerator") -> "PointGenerator":
        if self.has_marker or other.has_marker:
            raise GeometryError("cannot add marker generators")
        return PointGenerator(
            self.chart,
            tuple(a + b for a, b in zip(self.xi, other.xi)),
            self.xi_t + other.xi_t, self.a + other.a, self.b + other.b)

    def scale(self, c) -> "PointGenerator":
        if self.has_marker:
            raise GeometryError("cannot scale a marker generator")
        return PointGenerator(self.chart, tuple(c * v for v in self.xi),
                              c * self.xi_t, c * self.a, c * self.b)

    def apply(self, f: Expression) -> Expression:
        """First-order action on a function of (t, x): xi^t f_t + xi^i f_i."""
        out = self.xi_t * sp.diff(f, TIME)
        out += sum(xi * sp.diff(f, c)
                   for xi, c in zip(self.xi, self.chart.coords))
        return ex.normalize(out)

    def canonical(self) -> "PointGenerator":
        """Scale so the leading coefficient in the fixed term order is 1."""
        if self.has_marker:
            return self
        for part in self.parts():
            if part != 0:
                terms = sorted(sp.Add.make_args(sp.expand(part)),
                               key=sp.default_sort_key)
                lead = terms[0].as_coeff_Mul()[0]
                if lead != 0 and lead.is_Rational:
                    return self.scale(sp.Rational(1, 1) / lead)
                return self
        return self

    def equals(self, other: "PointGenerator") -> bool:
        if self.has_marker != other.has_marker:
            return False
        if self.has_marker:
            return True
        return all(ex.structurally_equal(a, b)
                   for a, b in zip(self.parts(), other.parts()))

    def same_line(self, other: "PointGenerator") -> bool:
        """Equality up to a nonzero constant scale."""
        if self.has_marker or other.has_marker:
            return self.has_marker and other.has_marker
        return self.canonical().equals(other.canonical())

    def pretty(self) -> str:
        names = ("t", *self.chart.names)
        comps = (self.xi_t, *self.xi)
        parts = [f"({sp.sstr(c)})*d_{n}" for n, c in zip(names, comps)
                 if c != 0]
        eta = []
        if self.a != 0:
            eta.append(f"({sp.sstr(self.a)})*u")
        if self.has_marker:
            eta.append("b(t,x)")
        elif self.b != 0:
            eta.append(f"{sp.sstr(self.b)}")
        if eta:
            parts.append(f"({' + '.join(eta)})*d_u")
        return " + ".join(parts) if parts else "0"


def commutator(g1: PointGenerator, g2: PointGenerator) -> PointGenerator:
    """Lie bracket [g1, g2], closed on the linear-in-u generator form."""
    if g1.chart.names != g2.chart.names:
        raise GeometryError("generators live on different charts")
    if g1.has_marker or g2.has_marker:
        raise GeometryError("bracket with a marker generator is not explicit")
    xi = tuple(
        ex.normalize(g1.apply(c2) - g2.apply(c1))
        for c1, c2 in zip(g1.xi, g2.xi))
    xi_t = ex.normalize(g1.apply(g2.xi_t) - g2.apply(g1.xi_t))
    a = ex.normalize(g1.apply(g2.a) - g2.apply(g1.a))
    b = ex.normalize(g1.apply(g2.b) - g2.apply(g1.b)
                     + g2.a * g1.b - g1.a * g2.b)
    return PointGenerator(g1.chart, xi, xi_t, a, b)


@dataclass
class SymmetryAlgebra:
    """Named generators with a lazily computed structure-constant table."""

    generators: dict[str, PointGenerator]
    notes: list[str] = field(default_factory=list)

    def named(self, name: str) -> PointGenerator:
        return self.generators[name]

    def explicit_items(self) -> list[tuple[str, PointGenerator]]:
        return [(n, g) for n, g in self.generators.items() if not g.has_marker]

    def structure_constants(self):
        """((name1, name2) -> {name: c}) for closing brackets, plus the
        list of non-closing pairs.  Antisymmetry holds by construction and
        every recorded bracket is re-verified against the expansion."""
        from .linsys import NotPolynomialError, split_identity, solve_affine

        items = self.explicit_items()
        table: dict[tuple[str, str], dict[str, sp.Rational]] = {}
        exceptions: list[tuple[str, str]] = []
        for i, (n1, g1) in enumerate(items):
            for n2, g2 in items[i + 1:]:
                br = commutator(g1, g2)
                coeffs = express_in_span(br, dict(items))
                if coeffs is None:
                    exceptions.append((n1, n2))
                    continue
                nz = {n: c for n, c in coeffs.items() if c != 0}
                table[(n1, n2)] = nz
                table[(n2, n1)] = {n: -c for n, c in nz.items()}
        return table, exceptions


def express_in_span(
    gen: PointGenerator, basis: Mapping[str, PointGenerator]
) -> dict[str, sp.Rational] | None:
    """Write ``gen`` as a constant-coefficient combination of ``basis``
    generators, or None when it lies outside the span."""
    from .linsys import NotPolynomialError, split_identity, solve_affine

    items = [(n, g) for n, g in basis.items() if not g.has_marker]
    params = [sp.Dummy(f"c{k}") for k in range(len(items))]
    wrt = [TIME, *gen.chart.coords]
    conditions: list[sp.Expr] = []
    for idx in range(len(gen.parts())):
        combo = sum((p * g.parts()[idx] for p, (_, g) in zip(params, items)),
                    sp.Integer(0))
        try:
            conditions.extend(split_identity(combo - gen.parts()[idx], wrt))
        except NotPolynomialError:
            return None
    sol = solve_affine(conditions, params)
    if sol is None:
        return None
    # solve_affine pins free parameters; verify the reconstruction exactly
    recon = None
    for p, (_, g) in zip(params, items):
        term = g.scale(sol[p])
        recon = term if recon is None else recon + term
    if recon is None:
        return None if not gen.is_zero() else {}
    if not recon.equals(gen):
        return None
    return {n: sol[p] for p, (n, _) in zip(params, items)}
