"""Reduction of evolution PDEs by zeroth-order invariants.

Given a point symmetry, one coordinate is eliminated along its flow:
the characteristic system is solved for a functionally independent set
of invariants ``I_k(t, x)`` plus the similarity variable ``w = u nu(t,
x)``, and the PDE is rewritten in the invariants by the chain rule.  The
solver covers generators whose flow is affine in the spatial
coordinates with time profile ``c t^k`` (k = 0, 1, 2), which is the
closure needed for heat-type symmetry algebras; Jordan-coupled flows
come out with the expected logarithmic mixing.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import sympy as sp

from . import expr as ex
from . import geometry as geo
from .expr import Expression, ZeroStatus
from .geometry import Chart, GeometryError, Metric
from .pde import DEP, TIME, PointGenerator, QuasiLinearPDE


class ReductionError(GeometryError):
    """The generator flow is outside the solvable class, the invariants
    fail verification, or the eliminated coordinate does not drop out."""


@dataclass(frozen=True)
class InvariantChart:
    """Zeroth-order invariants of a point symmetry.

    ``invariants[k]`` is the expression of the new coordinate
    ``chart.coords[k]`` in the old variables; ``nu`` defines the
    similarity variable ``w = u * nu``; ``inverse`` maps each old symbol
    (including ``t`` when present) to its expression in the new
    coordinates plus the eliminated symbol.
    """

    source: Chart
    chart: Chart
    invariants: tuple[Expression, ...]
    nu: Expression
    eliminated: sp.Symbol
    inverse: dict
    #: True when the reduced equation keeps the evolution coordinate.
    has_time: bool

    def similarity_variable(self) -> Expression:
        return ex.normalize(DEP * self.nu)


def _monomial_in_t(e: Expression):
    """(c, k) with e == c * t**k for constant rational-power k, else None."""
    e = sp.expand(sp.sympify(e))
    if e == 0:
        return None
    c, k = e.as_coeff_exponent(TIME)
    if c.has(TIME) or not k.is_Integer or k < 0 or k > 2:
        return None
    return c, int(k)


def _affine_parts(components, coords):
    """(M, d) with components == M x + d for constant M, d; None if not."""
    n = len(coords)
    M = sp.zeros(n, n)
    d = sp.zeros(n, 1)
    for i, comp in enumerate(components):
        comp = sp.expand(comp)
        rest = comp
        for j, c in enumerate(coords):
            coeff = comp.coeff(c, 1)
            if coeff.free_symbols & set(coords) or coeff.has(TIME):
                return None
            M[i, j] = coeff
            rest -= coeff * c
        rest = sp.expand(rest)
        if rest.free_symbols & set(coords) or rest.has(TIME):
            return None
        d[i] = rest
    return M, d


def _default_box() -> tuple[float, float]:
    return (0.5, 2.0)


def invariants_for(
    gen: PointGenerator,
    *,
    names: tuple[str, ...] | None = None,
    boxes: dict | None = None,
) -> InvariantChart:
    """Solve the characteristic system of ``gen`` for invariants.

    Time-translation-like generators (``xi^t = c t^k`` with affine
    spatial components) eliminate ``t``; purely spatial generators with a
    single nonzero component eliminate that coordinate and keep ``t``.
    """
    chart = gen.chart
    coords = list(chart.coords)
    n = len(coords)
    boxes = dict(boxes or {})

    if gen.xi_t == 0:
        nz = [i for i, c in enumerate(gen.xi) if c != 0]
        if len(nz) != 1:
            raise ReductionError(
                "spatial generator must have exactly one nonzero component")
        e = nz[0]
        xe = coords[e]
        if any(gen.xi[e].has(c) for c in coords):
            raise ReductionError(
                f"eliminated-direction component may depend on t only, got "
                f"{gen.xi[e]}")
        keep = [c for i, c in enumerate(coords) if i != e]
        if names is None:
            names = tuple(str(c) for c in keep)
        new_syms = [sp.Symbol(nm) for nm in names]
        box = {nm: boxes.get(nm, chart.box.get(str(c), _default_box()))
               for nm, c in zip(names, keep)}
        new_chart = Chart(tuple(new_syms), box)
        s = sp.Dummy("s")
        lnnu = -sp.integrate(
            (gen.a / gen.xi[e]).subs(xe, s), (s, 0, xe))
        nu = ex.normalize(sp.exp(lnnu))
        inverse = {c: sym for c, sym in zip(keep, new_syms)}
        inverse[xe] = xe
        inverse[TIME] = TIME
        invch = InvariantChart(chart, new_chart, tuple(keep), nu, xe,
                               inverse, has_time=True)
        _verify(gen, invch)
        return invch

    mono = _monomial_in_t(gen.xi_t)
    if mono is None:
        raise ReductionError(f"unsupported time profile {gen.xi_t}")
    c, k = mono
    if k == 0:
        parts = _affine_parts(list(gen.xi), coords)
        if parts is None or parts[0] != sp.zeros(n, n):
            raise ReductionError(
                "constant time profile requires constant spatial components")
        M, d = parts
        inv_exprs = [coords[i] - d[i] / c * TIME for i in range(n)]
    else:
        scaled = [sp.cancel(comp / TIME ** (k - 1)) for comp in gen.xi]
        parts = _affine_parts(scaled, coords)
        if parts is None:
            raise ReductionError(
                "spatial components are not affine with the t^(k-1) profile")
        M, d = parts

    if names is None:
        names = tuple(f"z{i + 1}" for i in range(n))
    new_syms = [sp.Symbol(nm) for nm in names]
    box = {nm: boxes.get(nm, chart.box.get(str(c0), _default_box()))
           for nm, c0 in zip(names, coords)}
    new_chart = Chart(tuple(new_syms), box)

    if k == 0:
        inverse = {coords[i]: new_syms[i] + d[i] / c * TIME
                   for i in range(n)}
    else:
        # homogenize the affine flow; invariants via the matrix exponential
        Mh = sp.zeros(n + 1, n + 1)
        Mh[:n, :n] = M
        Mh[:n, n] = d
        s = sp.Dummy("s")
        try:
            flow = sp.simplify((Mh * s).exp())
        except (NotImplementedError, ValueError) as exc:
            raise ReductionError(f"flow exponential failed: {exc}") from exc
        lnt = sp.log(TIME)
        back = flow.subs(s, -lnt / c)
        fwd = flow.subs(s, lnt / c)
        xvec = sp.Matrix(coords + [1])
        inv_exprs = list((back * xvec)[:n])
        ivec = sp.Matrix(new_syms + [1])
        inverse = {coords[i]: ex.normalize((fwd * ivec)[i])
                   for i in range(n)}
    inverse[TIME] = TIME

    # u-part: integrate -a / xi^t along the flow, invariants held fixed
    dmap = {ns: sp.Dummy(f"I_{nm}") for ns, nm in zip(new_syms, names)}
    a_flow = gen.a.subs(
        {coords[i]: inverse[coords[i]].subs(dmap, simultaneous=True)
         for i in range(n)}, simultaneous=True)
    lnnu = -sp.integrate(sp.cancel(a_flow / gen.xi_t), TIME)
    lnnu = lnnu.subs({dmap[ns]: inv for ns, inv in zip(new_syms, inv_exprs)},
                     simultaneous=True)
    nu = ex.normalize(sp.exp(sp.expand(lnnu)))

    invch = InvariantChart(chart, new_chart,
                           tuple(ex.normalize(ie) for ie in inv_exprs),
                           nu, TIME, inverse, has_time=False)
    _verify(gen, invch)
    return invch


def _verify(gen: PointGenerator, invch: InvariantChart) -> None:
    box = dict(gen.chart.intervals())
    box.setdefault("t", (0.5, 2.0))
    for inv in invch.invariants:
        r = gen.apply(inv)
        if not _surely_zero(r, box):
            raise ReductionError(f"invariant candidate fails: X({inv}) = {r}")
    r = gen.apply(invch.nu) + gen.a * invch.nu
    if not _surely_zero(r, box):
        raise ReductionError(f"similarity variable fails: residual {r}")


def _surely_zero(e: Expression, box) -> bool:
    status = ex.is_zero_expr(e, box)
    if status is ZeroStatus.ZERO:
        return True
    if status is ZeroStatus.NONZERO:
        return False
    return sp.simplify(e) == 0


def verify_invariants(gen: PointGenerator, invch: InvariantChart) -> bool:
    try:
        _verify(gen, invch)
    except ReductionError:
        return False
    return True


@dataclass(frozen=True)
class ReducedPDE:
    """A reduced equation with its provenance."""

    pde: QuasiLinearPDE
    source: QuasiLinearPDE
    generator: PointGenerator
    chart: InvariantChart


def reduce_pde(pde: QuasiLinearPDE, gen: PointGenerator,
               invch: InvariantChart | None = None) -> ReducedPDE:
    """Reduce ``pde`` by the invariants of ``gen``; the invariant chart
    is solved for when not supplied."""
    if invch is None:
        invch = invariants_for(gen)
    elif not verify_invariants(gen, invch):
        raise ReductionError("supplied invariant chart fails verification")
    reduced = _rewrite_in_invariants(pde, invch)
    return ReducedPDE(reduced, pde, gen, invch)


def _rewrite_in_invariants(pde: QuasiLinearPDE,
                           invch: InvariantChart) -> QuasiLinearPDE:
    """Rewrite ``pde`` in the invariant chart.

    The substitution ``u = W(I(t, x)) / nu`` is expanded by the chain
    rule, coefficients are mapped through the inverse chart, and the
    eliminated coordinate must drop out of the normalized equation
    (coefficient of ``-W_t`` scaled to 1 when time survives, else the
    leading diagonal second-order coefficient).
    """
    if not pde.has_ut:
        raise ReductionError("only evolution equations are reduced here")
    new_syms = list(invch.chart.coords)
    keep_time = invch.has_time
    m = len(new_syms)

    # chain rule with placeholder symbols for W and its derivatives; the
    # placeholder route avoids composite-argument Derivative objects
    old = [TIME] + list(invch.source.coords)
    heads = ([TIME] if keep_time else []) + list(invch.invariants)
    nargs = len(heads)
    Ws = sp.Dummy("W")
    W1 = [sp.Dummy(f"W_{k}") for k in range(nargs)]
    W2 = [[None] * nargs for _ in range(nargs)]
    for k in range(nargs):
        for l in range(k, nargs):
            W2[k][l] = W2[l][k] = sp.Dummy(f"W_{k}_{l}")

    inv_nu = 1 / invch.nu
    J = [[sp.diff(h, o) for o in old] for h in heads]
    no = len(old)
    u_first = [
        sum(W1[k] * J[k][i] for k in range(nargs)) * inv_nu
        + Ws * sp.diff(inv_nu, old[i])
        for i in range(no)]
    u_second = [[None] * no for _ in range(no)]
    for i in range(no):
        for j in range(i, no):
            val = sum(W2[k][l] * J[k][i] * J[l][j]
                      for k in range(nargs) for l in range(nargs)) * inv_nu
            val += sum(W1[k] * sp.diff(J[k][i], old[j])
                       for k in range(nargs)) * inv_nu
            val += sum(W1[k] * J[k][i] for k in range(nargs)) \
                * sp.diff(inv_nu, old[j])
            val += sum(W1[k] * J[k][j] for k in range(nargs)) \
                * sp.diff(inv_nu, old[i])
            val += Ws * sp.diff(inv_nu, old[i], old[j])
            u_second[i][j] = u_second[j][i] = val

    x = list(pde.chart.coords)
    n = pde.dim
    E = sum(pde.A[i, j] * u_second[i + 1][j + 1]
            for i in range(n) for j in range(n))
    E -= sum(pde.B[i] * u_first[i + 1] for i in range(n))
    E -= u_first[0]
    E -= pde.f.subs(DEP, Ws * inv_nu)

    # move to the new coordinates
    E = E.subs(invch.inverse, simultaneous=True)
    E = sp.expand(sp.cancel(sp.together(E)))

    # placeholder index of each surviving new coordinate
    off = 1 if keep_time else 0
    A = sp.zeros(m, m)
    B = [sp.Integer(0)] * m
    rest = E
    for i in range(m):
        for j in range(i, m):
            coeff = E.coeff(W2[off + i][off + j])
            A[i, j] = A[j, i] = coeff if i == j else coeff / 2
            rest -= coeff * W2[off + i][off + j]
    for i in range(m):
        coeff = sp.expand(rest).coeff(W1[off + i])
        B[i] = -coeff
        rest -= coeff * W1[off + i]
    if keep_time:
        ct = sp.expand(rest).coeff(W1[0])
        rest -= ct * W1[0]
    rest = sp.expand(rest)
    leftover = rest.free_symbols & ({w for row in W2 for w in row} | set(W1))
    if leftover:
        raise ReductionError(
            f"unreduced derivative terms remain: {leftover}")
    fterm = -rest.subs(Ws, DEP)

    if keep_time:
        scale = -ct
    else:
        scale = next((A[i, i] for i in range(m) if A[i, i] != 0), None)
        if scale is None:
            raise ReductionError("degenerate second-order part")
    A = (A / scale).applyfunc(lambda e: ex.normalize(sp.cancel(e)))
    B = [ex.normalize(sp.cancel(b / scale)) for b in B]
    fterm = ex.normalize(sp.cancel(fterm / scale))

    elim = invch.eliminated
    box = dict(invch.chart.intervals())
    box[str(elim)] = (0.5, 2.0)
    box.setdefault("u", (0.5, 2.0))
    if keep_time:
        box.setdefault("t", (0.5, 2.0))
    leftovers = [e for e in
                 list(A) + B + [fterm] if sp.sympify(e).has(elim)]
    for e in leftovers:
        d = sp.diff(e, elim)
        if not _surely_zero(d, box):
            raise ReductionError(
                f"eliminated coordinate {elim} survives in coefficient {e}")
    sub_elim = {elim: sp.Integer(1)}
    A = A.applyfunc(lambda e: ex.normalize(e.subs(sub_elim)))
    B = [ex.normalize(b.subs(sub_elim)) for b in B]
    fterm = ex.normalize(fterm.subs(sub_elim))

    return QuasiLinearPDE(invch.chart, sp.ImmutableMatrix(A), tuple(B),
                          fterm, has_ut=keep_time)


def laplace_form_detect(pde: QuasiLinearPDE):
    """Recognize a time-free reduced equation as a Laplace equation of a
    conformally rescaled metric.

    Solves ``d ln Omega = 2/(n-2) g (Gamma - B)`` for the conformal
    factor (n > 2, closed one-form required); returns ``(metric, Omega)``
    with ``metric = Omega * A^{-1}`` when the equation matches
    ``Delta_metric u = 0`` exactly, else None.
    """
    if pde.has_ut or pde.dim < 3:
        return None
    if ex.normalize(pde.f) != 0:
        return None
    n = pde.dim
    chart = pde.chart
    coords = chart.coords
    g = pde.A.inv().applyfunc(lambda e: ex.normalize(sp.cancel(e)))
    base = Metric(chart, sp.ImmutableMatrix(g))
    gam = geo.contracted_christoffel(base)
    rhs = [ex.normalize(sp.Rational(2, n - 2)
                        * sum(g[i, j] * (gam[j] - pde.B[j])
                              for j in range(n)))
           for i in range(n)]
    box = chart.intervals()
    for i in range(n):
        for j in range(i + 1, n):
            closed = sp.diff(rhs[i], coords[j]) - sp.diff(rhs[j], coords[i])
            if not _surely_zero(closed, box):
                return None
    # path integration from the box midpoint, leg by leg
    mid = {c: chart.midpoint(c) for c in coords}
    lnOmega = sp.Integer(0)
    point = dict(mid)
    for i in range(n):
        s = sp.Dummy("s")
        leg = rhs[i].subs({coords[j]: (point[coords[j]] if j > i
                                       else coords[j])
                           for j in range(n) if j != i}, simultaneous=True)
        lnOmega += sp.integrate(leg.subs(coords[i], s),
                                (s, mid[coords[i]], coords[i]))
        point[coords[i]] = coords[i]
    # the conformal factor is determined up to a constant scale; drop the
    # additive constant picked up by anchoring the path at the midpoint
    lnOmega = sp.Add(*[term for term in sp.Add.make_args(sp.expand(lnOmega))
                       if term.free_symbols & set(coords)])
    Omega = ex.normalize(sp.exp(sp.expand(lnOmega)))
    conf = Metric(chart, sp.ImmutableMatrix(
        (Omega * g).applyfunc(ex.normalize)))
    target = geo.laplace_pde(conf)
    probe = QuasiLinearPDE(chart, pde.A * (1 / Omega),
                           tuple(b / Omega for b in pde.B), 0,
                           has_ut=False)
    if not probe.coefficients_equal(target):
        return None
    return conf, Omega
