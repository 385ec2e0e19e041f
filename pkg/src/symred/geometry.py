"""Tensor calculus on a coordinate chart.

Inverse metric, Christoffel symbols, the Laplace-Beltrami operator
(signature-agnostic), Lie derivatives of the metric, collineation
classification (KV / HV / CKV), the gradient test with potential
reconstruction, and conformal transport of conformal factors.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Mapping

import sympy as sp

from . import expr as ex
from .expr import Expression, ZeroStatus


class GeometryError(ValueError):
    pass


@dataclass(frozen=True)
class Chart:
    """Ordered coordinates with a per-coordinate open sampling interval
    (the positivity box) that avoids the metric's singular loci."""

    coords: tuple[sp.Symbol, ...]
    box: Mapping[str, tuple[float, float]] = field(default_factory=dict)

    def __post_init__(self):
        coords = tuple(sp.Symbol(c) if isinstance(c, str) else c
                       for c in self.coords)
        object.__setattr__(self, "coords", coords)
        names = [str(c) for c in coords]
        if len(set(names)) != len(names):
            raise GeometryError(f"duplicate coordinate names in {names}")
        for name, (lo, hi) in self.box.items():
            if not lo < hi:
                raise GeometryError(f"empty interval for {name}: ({lo}, {hi})")

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(str(c) for c in self.coords)

    @property
    def dim(self) -> int:
        return len(self.coords)

    def intervals(self) -> dict[str, tuple[float, float]]:
        return {n: self.box.get(n, (0.5, 2.0)) for n in self.names}

    def index(self, coord: sp.Symbol | str) -> int:
        return self.names.index(str(coord))

    def midpoint(self, coord: sp.Symbol | str) -> sp.Rational:
        lo, hi = self.box.get(str(coord), (0.5, 2.0))
        return sp.Rational(sp.nsimplify((lo + hi) / 2, rational=True))


@dataclass(frozen=True)
class Metric:
    chart: Chart
    g: sp.ImmutableMatrix

    def __post_init__(self):
        g = sp.ImmutableMatrix(self.g)
        object.__setattr__(self, "g", g.applyfunc(ex.normalize))
        n = self.chart.dim
        if self.g.shape != (n, n):
            raise GeometryError(f"metric shape {self.g.shape} != chart dim {n}")
        if self.g != self.g.T:
            raise GeometryError("metric is not symmetric after normalization")

    @property
    def dim(self) -> int:
        return self.chart.dim

    def check_nondegenerate(self) -> None:
        det = ex.normalize(self.g.det())
        if ex.is_zero_expr(det, self.chart.intervals()) is not ZeroStatus.NONZERO:
            raise GeometryError(f"metric determinant {det} not nonzero on box")


@dataclass(frozen=True)
class VectorField:
    chart: Chart
    components: tuple[Expression, ...]

    def __post_init__(self):
        comps = tuple(ex.normalize(sp.sympify(c)) for c in self.components)
        object.__setattr__(self, "components", comps)
        if len(comps) != self.chart.dim:
            raise GeometryError(
                f"{len(comps)} components for a {self.chart.dim}-dim chart")

    def __add__(self, other: "VectorField") -> "VectorField":
        return VectorField(self.chart, tuple(
            a + b for a, b in zip(self.components, other.components)))

    def scale(self, c) -> "VectorField":
        return VectorField(self.chart, tuple(c * a for a in self.components))

    def apply(self, f: Expression) -> Expression:
        """Directional derivative xi^i d_i f."""
        return ex.normalize(sum(
            xi * sp.diff(f, x)
            for xi, x in zip(self.components, self.chart.coords)))


class CollineationKind(enum.Enum):
    KV = "KV"
    HV = "HV"
    CKV = "CKV"
    NOT_CONFORMAL = "NotConformal"


@dataclass(frozen=True)
class CollineationClass:
    kind: CollineationKind
    #: conformal factor; 0 for a KV, a nonzero constant for an HV,
    #: non-constant for a CKV, None when not conformal.
    psi: Expression | None
    #: True / False / None (undetermined) for the gradient test.
    gradient_flag: bool | None = None
    notes: tuple[str, ...] = ()


# ---------------------------------------------------------------------------
# Operations
# ---------------------------------------------------------------------------

def inverse_metric(m: Metric) -> sp.ImmutableMatrix:
    """g^{ij} with entries normalized; g^{ik} g_{kj} = delta^i_j exactly."""
    m.check_nondegenerate()
    inv = m.g.inv().applyfunc(ex.normalize)
    return sp.ImmutableMatrix(inv)


def christoffel(m: Metric) -> sp.Array:
    """Christoffel symbols Gamma^i_{jk} of the Levi-Civita connection."""
    n = m.dim
    ginv = inverse_metric(m)
    x = m.chart.coords
    gamma = [[[sp.Integer(0)] * n for _ in range(n)] for _ in range(n)]
    for i in range(n):
        for j in range(n):
            for k in range(j, n):
                val = sp.Integer(0)
                for l in range(n):
                    val += ginv[i, l] * (sp.diff(m.g[l, k], x[j])
                                         + sp.diff(m.g[l, j], x[k])
                                         - sp.diff(m.g[j, k], x[l]))
                val = ex.normalize(val / 2)
                gamma[i][j][k] = val
                gamma[i][k][j] = val
    return sp.Array(gamma)


def contracted_christoffel(m: Metric) -> tuple[Expression, ...]:
    """Gamma^i = g^{jk} Gamma^i_{jk}."""
    n = m.dim
    ginv = inverse_metric(m)
    gamma = christoffel(m)
    return tuple(
        ex.normalize(sum(ginv[j, k] * gamma[i, j, k]
                         for j in range(n) for k in range(n)))
        for i in range(n))


def laplace_beltrami(m: Metric, f: Expression) -> Expression:
    """Delta f = g^{ij} f_{ij} - Gamma^i f_i (any signature)."""
    ginv = inverse_metric(m)
    gam = contracted_christoffel(m)
    x = m.chart.coords
    n = m.dim
    out = sum(ginv[i, j] * sp.diff(f, x[i], x[j])
              for i in range(n) for j in range(n))
    out -= sum(gam[i] * sp.diff(f, x[i]) for i in range(n))
    return ex.normalize(out)


def heat_pde(m: Metric, q: Expression = sp.Integer(0)):
    """Heat equation with flux on the chart:
    g^{ij} u_{ij} - Gamma^i u_i - u_t = q(t, x, u)."""
    from .pde import QuasiLinearPDE

    return QuasiLinearPDE(
        chart=m.chart,
        A=inverse_metric(m),
        B=contracted_christoffel(m),
        f=ex.normalize(sp.sympify(q)),
        has_ut=True,
    )


def laplace_pde(m: Metric, f: Expression = sp.Integer(0)):
    """Laplace equation on the chart: g^{ij} u_{ij} - Gamma^i u_i = f."""
    from .pde import QuasiLinearPDE

    return QuasiLinearPDE(
        chart=m.chart,
        A=inverse_metric(m),
        B=contracted_christoffel(m),
        f=ex.normalize(sp.sympify(f)),
        has_ut=False,
    )


def lie_derivative_metric(v: VectorField, m: Metric) -> sp.ImmutableMatrix:
    """(L_v g)_{ij} = xi^k d_k g_{ij} + g_{kj} d_i xi^k + g_{ik} d_j xi^k."""
    if v.chart.names != m.chart.names:
        raise GeometryError("vector and metric live on different charts")
    n = m.dim
    x = m.chart.coords
    out = sp.zeros(n, n)
    for i in range(n):
        for j in range(n):
            val = sum(v.components[k] * sp.diff(m.g[i, j], x[k])
                      for k in range(n))
            val += sum(m.g[k, j] * sp.diff(v.components[k], x[i])
                       for k in range(n))
            val += sum(m.g[i, k] * sp.diff(v.components[k], x[j])
                       for k in range(n))
            out[i, j] = ex.normalize(val)
    return sp.ImmutableMatrix(out)


def classify_collineation(v: VectorField, m: Metric) -> CollineationClass:
    """Solve (L_v g)_{ij} = 2 psi g_{ij} for a single scalar psi.

    psi is read off the first structurally nonzero metric component and
    verified against every remaining component; Unknown zero-tests are
    escalated to the numeric oracle and reported in ``notes``.
    """
    lie = lie_derivative_metric(v, m)
    box = m.chart.intervals()
    n = m.dim
    psi = None
    for i in range(n):
        for j in range(i, n):
            if m.g[i, j] != 0:
                psi = ex.normalize(lie[i, j] / (2 * m.g[i, j]))
                break
        if psi is not None:
            break
    if psi is None:
        raise GeometryError("metric is structurally zero")

    notes = []
    for i in range(n):
        for j in range(i, n):
            res = lie[i, j] - 2 * psi * m.g[i, j]
            status = ex.is_zero_expr(res, box)
            if status is ZeroStatus.NONZERO:
                return CollineationClass(CollineationKind.NOT_CONFORMAL, None)
            if status is ZeroStatus.UNKNOWN:
                notes.append(
                    f"component ({i},{j}): residual not symbolically zero, "
                    f"numerically below tolerance")

    grad = None
    if ex.is_zero_expr(psi, box) is ZeroStatus.ZERO:
        kind, psi_out = CollineationKind.KV, sp.Integer(0)
    elif not psi.free_symbols:
        kind, psi_out = CollineationKind.HV, psi
    else:
        kind, psi_out = CollineationKind.CKV, psi
    if kind in (CollineationKind.KV, CollineationKind.HV):
        grad = gradient_potential(v, m) is not None
    return CollineationClass(kind, psi_out, grad, tuple(notes))


def lower_index(v: VectorField, m: Metric) -> tuple[Expression, ...]:
    n = m.dim
    return tuple(
        ex.normalize(sum(m.g[i, j] * v.components[j] for j in range(n)))
        for i in range(n))


def gradient_potential(v: VectorField, m: Metric) -> Expression | None:
    """Potential S with S^{,i} = xi^i, or None when xi_(i,j) is not closed.

    The lowered components are checked for closedness exactly, then
    integrated leg by leg along coordinate paths from the midpoint of the
    chart box; the additive constant is dropped so that e.g. the potential
    of a translation comes out as the bare coordinate.
    """
    xi = lower_index(v, m)
    x = m.chart.coords
    n = m.dim
    for i in range(n):
        for j in range(i + 1, n):
            closed = ex.normalize(sp.diff(xi[i], x[j]) - sp.diff(xi[j], x[i]))
            if closed != 0 and sp.simplify(closed) != 0:
                return None

    base = {str(c): m.chart.midpoint(c) for c in x}
    total = sp.Integer(0)
    s = sp.Dummy("s")
    for k in range(n):
        leg = xi[k]
        # earlier coordinates stay free, later ones pinned at the base point
        leg = leg.subs({x[i]: sp.Symbol(str(x[i])) for i in range(k)})
        leg = leg.subs({x[i]: base[str(x[i])] for i in range(k + 1, n)})
        leg = leg.subs(x[k], s)
        try:
            anti = sp.integrate(leg, (s, base[str(x[k])], x[k]))
        except Exception:
            return None
        if anti.has(sp.Integral):
            return None
        total += anti
    total = ex.normalize(total)
    # drop the pure-constant part (potentials are defined up to a constant)
    const = total.subs({c: 0 for c in total.free_symbols})
    if const.is_finite is not False:
        total = ex.normalize(total - const)

    # verify S^{,i} = xi^i
    for i in range(n):
        res = ex.normalize(sp.diff(total, x[i]) - xi[i])
        if res != 0 and sp.simplify(res) != 0:
            return None
    return total


def conformal_transport(v: VectorField, psi_bar: Expression,
                        N: Expression) -> Expression:
    """Conformal factor of v on g when v has factor psi_bar on N^2 g:
    psi = psi_bar N^2 - N N_{,i} xi^i."""
    N = sp.sympify(N)
    out = sp.sympify(psi_bar) * N ** 2
    out -= N * sum(sp.diff(N, c) * xi
                   for c, xi in zip(v.chart.coords, v.components))
    return ex.normalize(out)


def conformal_rescale_metric(m: Metric, N2: Expression) -> Metric:
    """The conformally related metric N^2 g (componentwise product)."""
    N2 = sp.sympify(N2)
    return Metric(m.chart, sp.ImmutableMatrix(
        m.g.applyfunc(lambda e: ex.normalize(N2 * e))))


def metric_compatibility_residuals(m: Metric) -> list[Expression]:
    """All components of nabla_k g_{ij}; each must normalize to 0."""
    n = m.dim
    x = m.chart.coords
    gamma = christoffel(m)
    out = []
    for k in range(n):
        for i in range(n):
            for j in range(i, n):
                val = sp.diff(m.g[i, j], x[k])
                val -= sum(gamma[l, k, i] * m.g[l, j] for l in range(n))
                val -= sum(gamma[l, k, j] * m.g[i, l] for l in range(n))
                out.append(ex.normalize(val))
    return out
