"""Built-in case studies.

Each case bundles a metric, its declared collineations, the expected
extra heat symmetries and commutator table, reduction targets with the
expected hidden-symmetry partition, a default ansatz basis, and the list
of known discrepancies between the published tables and what the engine
derives.  Expectations are data; the golden suite re-derives everything
through the engine and diffs.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Mapping

import sympy as sp

from .geometry import (Chart, CollineationClass, CollineationKind, Metric,
                       VectorField)

KV = CollineationKind.KV
HV = CollineationKind.HV
CKV = CollineationKind.CKV


@dataclass(frozen=True)
class DeclaredVector:
    """A collineation shipped with a case, with its expected class."""

    name: str
    components: tuple
    kind: CollineationKind
    psi: object = 0
    gradient: bool = False
    potential: object = None
    #: entry is used for the heat factory with this gradient flag even if
    #: the engine's own gradient test disagrees (generic-template cases)
    factory_gradient: bool | None = None
    #: set when the declared data is known to fail engine verification;
    #: the golden suite records the engine value instead of hard-matching
    discrepancy: str | None = None

    def factory_flag(self) -> bool:
        return (self.gradient if self.factory_gradient is None
                else self.factory_gradient)


@dataclass(frozen=True)
class ReductionCase:
    """One reduction target: which generator, how the reduced equation's
    symmetries are found, and what the expected partition is."""

    by: str
    invariant_names: tuple[str, ...]
    #: reduced-symmetry route: "heat" / "flux" factories on the block
    #: metric, "laplace" via conformal detection + CKV candidates, or
    #: "ansatz" via the determining solver on the reduced equation
    route: str
    expected_type2: tuple[str, ...] = ()
    expected_flux: str | None = None
    #: ansatz route: source symmetries expected to survive as the full
    #: non-background reduced algebra (so Type II is expected empty)
    expected_survivors: tuple[str, ...] | None = None
    #: ansatz route: polynomial degree and extra function kernels,
    #: written in the invariant-chart coordinate names
    degree: int = 3
    kernels: tuple[str, ...] = ()
    notes: tuple[str, ...] = ()


@dataclass(frozen=True)
class CaseStudy:
    name: str
    description: str
    metric: Metric
    vectors: tuple[DeclaredVector, ...]
    reductions: tuple[ReductionCase, ...]
    #: names of the expected extra heat symmetries (beyond d_t, u d_u and
    #: the arbitrary-solution family)
    expected_extra: tuple[str, ...]
    #: expected nonzero commututators {(n1, n2): {name: coeff}} over the
    #: heat algebra; entries listed in discrepancies are diffed, not
    #: hard-matched
    expected_commutators: Mapping[tuple[str, str], Mapping[str, object]]
    #: block metric of the decomposable cases (reduced-space factories)
    block: Metric | None = None
    block_vectors: tuple[DeclaredVector, ...] = ()
    #: CKV candidates per laplace-route reduction, in invariant-chart
    #: coordinates: {by: ((name, components), ...)}
    ckv_candidates: Mapping[str, tuple] = field(default_factory=dict)
    discrepancies: tuple[str, ...] = ()
    #: expectation ids ("vector:NAME", "bracket:N1,N2") whose failure is
    #: a recorded discrepancy rather than an error
    tolerated: tuple[str, ...] = ()


def case_names() -> tuple[str, ...]:
    return tuple(sorted(_BUILDERS))


def get_case(name: str, **params) -> CaseStudy:
    try:
        builder = _BUILDERS[name]
    except KeyError:
        raise KeyError(
            f"unknown case {name!r}; available: {', '.join(case_names())}"
        ) from None
    return builder(**params)


# ---------------------------------------------------------------------------
# decomposable 1+2 cases
# ---------------------------------------------------------------------------

def _flat_block():
    y1, y2 = sp.symbols("y1 y2")
    chart = Chart((y1, y2), {"y1": (0.5, 2.0), "y2": (0.5, 2.0)})
    metric = Metric(chart, sp.ImmutableMatrix(sp.eye(2)))
    vectors = (
        DeclaredVector("Y_1", (1, 0), KV, factory_gradient=False,
                       gradient=True, potential=y1),
        DeclaredVector("Y_2", (0, 1), KV, factory_gradient=False,
                       gradient=True, potential=y2),
        DeclaredVector("Y_12", (y2, -y1), KV),
    )
    return chart, metric, vectors


def _decomposable_flat_1p2() -> CaseStudy:
    x, y1, y2 = sp.symbols("x y1 y2")
    chart = Chart((x, y1, y2),
                  {"x": (0.5, 2.0), "y1": (0.5, 2.0), "y2": (0.5, 2.0)})
    metric = Metric(chart, sp.ImmutableMatrix(sp.eye(3)))
    _, block, bvecs = _flat_block()
    lift = tuple(
        DeclaredVector(v.name, (0,) + tuple(v.components), v.kind,
                       gradient=v.gradient, factory_gradient=False,
                       potential=v.potential)
        for v in bvecs)
    vectors = (
        DeclaredVector("X_1", (1, 0, 0), KV, gradient=True, potential=x),
    ) + lift
    reductions = (
        ReductionCase("X_1", ("y1", "y2"), "heat"),
        ReductionCase("X_1_sq", ("y1", "y2"), "flux",
                      expected_type2=("X_tau",),
                      expected_flux="u/(2*t)"),
    )
    return CaseStudy(
        name="decomposable_flat_1p2",
        description="1+2 decomposable space with a flat block; the "
                    "distinguished gradient Killing vector is d_x",
        metric=metric,
        vectors=vectors,
        reductions=reductions,
        expected_extra=("X_1", "X_1_sq", "Y_1", "Y_2", "Y_12"),
        expected_commutators={
            ("X_t", "X_1_sq"): {"X_1": 1},
            ("X_1_sq", "X_1"): {"X_u": sp.Rational(1, 2)},
            ("Y_1", "Y_12"): {"Y_2": -1},
            ("Y_2", "Y_12"): {"Y_1": 1},
        },
        block=block,
        block_vectors=bvecs,
        discrepancies=(
            "the block translations are gradient KVs of the flat "
            "instantiation; the generic template treats the block algebra "
            "as nongradient, so their squared-time descendants are not "
            "emitted",),
    )


def _constcurv_block(K):
    y1, y2 = sp.symbols("y1 y2")
    chart = Chart((y1, y2), {"y1": (0.5, 2.0), "y2": (0.5, 2.0)})
    N = 1 + sp.Rational(K, 4) * (y1 ** 2 + y2 ** 2) if isinstance(
        K, int) else 1 + K * (y1 ** 2 + y2 ** 2) / 4
    metric = Metric(chart, sp.ImmutableMatrix(
        [[N ** -2, 0], [0, N ** -2]]))
    # the constant-curvature block KVs: one rotation and two boosts
    vectors = (
        DeclaredVector("Y_12", (y2, -y1), KV),
        DeclaredVector(
            "K_1",
            (1 + sp.Rational(K, 4) * (y1 ** 2 - y2 ** 2),
             sp.Rational(K, 2) * y1 * y2), KV),
        DeclaredVector(
            "K_2",
            (sp.Rational(K, 2) * y1 * y2,
             1 - sp.Rational(K, 4) * (y1 ** 2 - y2 ** 2)), KV),
    )
    return chart, metric, vectors


def _decomposable_constcurv_1p2(K: int = 1) -> CaseStudy:
    x, y1, y2 = sp.symbols("x y1 y2")
    chart = Chart((x, y1, y2),
                  {"x": (0.5, 2.0), "y1": (0.5, 2.0), "y2": (0.5, 2.0)})
    _, block, bvecs = _constcurv_block(K)
    metric = Metric(chart, sp.ImmutableMatrix(sp.diag(
        sp.Integer(1), block.g[0, 0], block.g[1, 1])))
    lift = tuple(
        DeclaredVector(v.name, (0,) + tuple(v.components), v.kind)
        for v in bvecs)
    vectors = (
        DeclaredVector("X_1", (1, 0, 0), KV, gradient=True, potential=x),
    ) + lift
    reductions = (
        ReductionCase("X_1", ("y1", "y2"), "heat"),
        ReductionCase("X_1_sq", ("y1", "y2"), "flux",
                      expected_type2=("X_tau",),
                      expected_flux="u/(2*t)"),
    )
    return CaseStudy(
        name="decomposable_constcurv_1p2",
        description="1+2 decomposable space whose block has constant "
                    f"curvature K={K}",
        metric=metric,
        vectors=vectors,
        reductions=reductions,
        expected_extra=("X_1", "X_1_sq", "Y_12", "K_1", "K_2"),
        expected_commutators={
            ("X_t", "X_1_sq"): {"X_1": 1},
            ("X_1_sq", "X_1"): {"X_u": sp.Rational(1, 2)},
        },
        block=block,
        block_vectors=bvecs,
    )


# ---------------------------------------------------------------------------
# FRW-like space with a gradient homothety
# ---------------------------------------------------------------------------

def _gradient_hv_flat_frw() -> CaseStudy:
    sig, x, y, z = sp.symbols("sigma x y z")
    chart = Chart((sig, x, y, z),
                  {"sigma": (0.5, 2.0), "x": (0.5, 2.0),
                   "y": (0.5, 2.0), "z": (0.5, 2.0)})
    metric = Metric(chart, sp.ImmutableMatrix(
        sp.diag(1, -sig ** 2, -sig ** 2, -sig ** 2)))
    vectors = (
        DeclaredVector("H", (sig, 0, 0, 0), HV, psi=1, gradient=True,
                       potential=sig ** 2 / 2),
        DeclaredVector("X_1", (0, 1, 0, 0), KV),
        DeclaredVector("X_2", (0, 0, 1, 0), KV),
        DeclaredVector("X_3", (0, 0, 0, 1), KV),
        DeclaredVector("X_4", (0, y, -x, 0), KV),
        DeclaredVector("X_5", (0, z, 0, -x), KV),
        DeclaredVector("X_6", (0, 0, z, -y), KV),
    )
    phi = sp.Symbol("phi")
    lnphi = sp.log(phi)
    ckvs = (
        ("X_1", (0, 1, 0, 0)), ("X_2", (0, 0, 1, 0)), ("X_3", (0, 0, 0, 1)),
        ("X_4", (0, y, -x, 0)), ("X_5", (0, z, 0, -x)),
        ("X_6", (0, 0, z, -y)),
        ("X_7", (phi, 0, 0, 0)),
        ("X_8", (phi * x, lnphi, 0, 0)),
        ("X_9", (phi * y, 0, lnphi, 0)),
        ("X_10", (phi * z, 0, 0, lnphi)),
    )
    reductions = (
        ReductionCase("H", ("phi", "x", "y", "z"), "laplace",
                      notes=("conformal factor exp(phi^2/4) expected",)),
        ReductionCase("H_sq", ("phi", "x", "y", "z"), "laplace",
                      expected_type2=("X_7", "X_8", "X_9", "X_10")),
    )
    return CaseStudy(
        name="gradient_hv_flat_frw",
        description="spatially flat FRW-like metric with the gradient "
                    "homothety sigma d_sigma",
        metric=metric,
        vectors=vectors,
        reductions=reductions,
        expected_extra=("H", "H_sq", "X_1", "X_2", "X_3", "X_4", "X_5",
                        "X_6"),
        expected_commutators={
            ("X_t", "H"): {"X_t": 2},
            ("X_t", "H_sq"): {"H": 1, "X_u": -2},
            ("X_1", "X_4"): {"X_2": -1},
            ("X_2", "X_4"): {"X_1": 1},
        },
        ckv_candidates={"H": ckvs, "H_sq": ckvs},
    )


# ---------------------------------------------------------------------------
# Petrov-type spacetimes with a nongradient homothety
# ---------------------------------------------------------------------------

def _petrov_N() -> CaseStudy:
    x, y, rho, v = sp.symbols("x y rho v")
    chart = Chart((x, y, rho, v),
                  {"x": (0.5, 2.0), "y": (0.5, 2.0),
                   "rho": (0.5, 2.0), "v": (0.5, 2.0)})
    metric = Metric(chart, sp.ImmutableMatrix([
        [1, 0, 0, 0],
        [0, x ** 2, 0, 0],
        [0, 0, sp.log(x ** 2), 1],
        [0, 0, 1, 0]]))
    vectors = (
        DeclaredVector("X_1", (0, 0, 1, 0), KV),
        DeclaredVector("X_2", (0, 0, 0, 1), KV),
        DeclaredVector("X_3", (0, 1, 0, 0), KV),
        DeclaredVector(
            "H", (x, 0, rho, v - 2 * rho), HV, psi=1,
            discrepancy="declared homothety has v-component v - 2*rho; "
                        "the engine derives v - rho"),
    )
    reductions = (
        ReductionCase(
            "H", ("alpha", "delta", "beta", "gamma"), "ansatz",
            degree=3, kernels=("ln(alpha)",),
            expected_survivors=("X_3",)),
    )
    return CaseStudy(
        name="petrov_N",
        description="Petrov type N spacetime",
        metric=metric,
        vectors=vectors,
        reductions=reductions,
        expected_extra=("X_1", "X_2", "X_3", "H"),
        expected_commutators={
            ("X_t", "H"): {"X_t": 2},
            ("X_1", "H"): {"X_1": 1, "X_2": -2},
            ("X_2", "H"): {"X_2": 1},
        },
        tolerated=("vector:H", "bracket:X_1,H"),
        discrepancies=(
            "declared homothety v-component v - 2*rho fails the "
            "homothety equations; engine value is v - rho",
            "with the corrected homothety the bracket [X_1, H] is "
            "X_1 - X_2, not X_1 - 2*X_2",
        ),
    )


def _petrov_N_sec2() -> CaseStudy:
    x, y, rho, v = sp.symbols("x y rho v")
    chart = Chart((x, y, rho, v),
                  {"x": (0.5, 2.0), "y": (0.5, 2.0),
                   "rho": (0.5, 2.0), "v": (0.5, 2.0)})
    metric = Metric(chart, sp.ImmutableMatrix([
        [1, 0, 0, 0],
        [0, 1, 0, 0],
        [0, 0, -2 * sp.log(x ** 2 + y ** 2), 1],
        [0, 0, 1, 0]]))
    vectors = (
        DeclaredVector("X_1", (0, 0, 1, 0), KV),
        DeclaredVector("X_2", (0, 0, 0, 1), KV),
        DeclaredVector(
            "H", (x, y, rho, v + 2 * rho), HV, psi=1),
    )
    reductions = ()
    return CaseStudy(
        name="petrov_N_sec2",
        description="Petrov type N spacetime, alternative metric variant",
        metric=metric,
        vectors=vectors,
        reductions=reductions,
        expected_extra=("X_1", "X_2", "H"),
        expected_commutators={
            ("X_t", "H"): {"X_t": 2},
            ("X_1", "H"): {"X_1": 1, "X_2": 2},
            ("X_2", "H"): {"X_2": 1},
        },
    )


def _petrov_D() -> CaseStudy:
    x, y, rho, z = sp.symbols("x y rho z")
    chart = Chart((x, y, rho, z),
                  {"x": (0.5, 2.0), "y": (0.5, 2.0),
                   "rho": (0.5, 2.0), "z": (0.5, 2.0)})
    metric = Metric(chart, sp.ImmutableMatrix(sp.diag(
        -1, x ** sp.Rational(-2, 3),
        -x ** sp.Rational(4, 3), -x ** sp.Rational(4, 3))))
    vectors = (
        DeclaredVector("X_1", (0, 0, 1, 0), KV),
        DeclaredVector("X_2", (0, 0, 0, 1), KV),
        DeclaredVector("X_3", (0, 1, 0, 0), KV),
        DeclaredVector("X_4", (0, 0, z, -rho), KV),
        DeclaredVector(
            "H", (x, sp.Rational(4, 3) * y, rho / 3, z / 3), HV, psi=1),
    )
    reductions = (
        ReductionCase(
            "H", ("alpha", "beta", "gamma", "delta"), "ansatz",
            degree=3, kernels=("alpha^(1/3)",),
            expected_survivors=("X_4",)),
    )
    return CaseStudy(
        name="petrov_D",
        description="Petrov type D spacetime",
        metric=metric,
        vectors=vectors,
        reductions=reductions,
        expected_extra=("X_1", "X_2", "X_3", "X_4", "H"),
        expected_commutators={
            ("X_t", "H"): {"X_t": 2},
            ("X_1", "H"): {"X_1": sp.Rational(1, 3)},
            ("X_4", "X_1"): {"X_2": -1},
            ("X_2", "X_4"): {"X_1": 1},
            ("X_2", "H"): {"X_2": sp.Rational(1, 3)},
            ("X_3", "H"): {"X_3": sp.Rational(4, 3)},
        },
        tolerated=("bracket:X_4,X_1",),
        discrepancies=(
            "the declared bracket [X_4, X_1] = -X_2 has the wrong sign; "
            "the engine finds [X_4, X_1] = X_2",),
    )


def _petrov_II() -> CaseStudy:
    x, y, z, rho = sp.symbols("x y z rho")
    chart = Chart((x, y, z, rho),
                  {"x": (0.5, 2.0), "y": (0.5, 2.0),
                   "z": (0.5, 2.0), "rho": (0.5, 2.0)})
    metric = Metric(chart, sp.ImmutableMatrix([
        [0, -rho, 0, 0],
        [-rho, rho * sp.log(rho), 0, 0],
        [0, 0, rho ** sp.Rational(-1, 2), 0],
        [0, 0, 0, rho ** sp.Rational(-1, 2)]]))
    vectors = (
        DeclaredVector("X_1", (1, 0, 0, 0), KV),
        DeclaredVector("X_2", (0, 1, 0, 0), KV),
        DeclaredVector("X_3", (0, 0, 1, 0), KV),
        DeclaredVector(
            "H", ((x + 2 * y) / 3, y / 3, sp.Rational(4, 3) * z,
                  sp.Rational(4, 3) * rho), HV, psi=1),
    )
    reductions = (
        ReductionCase(
            "H", ("gamma", "delta", "beta", "alpha"), "ansatz",
            degree=3, kernels=("ln(alpha)", "sqrt(alpha)"),
            expected_survivors=()),
    )
    return CaseStudy(
        name="petrov_II",
        description="Petrov type II spacetime",
        metric=metric,
        vectors=vectors,
        reductions=reductions,
        expected_extra=("X_1", "X_2", "X_3", "H"),
        expected_commutators={
            ("X_t", "H"): {"X_t": 2},
            ("X_1", "H"): {"X_1": sp.Rational(1, 3)},
            ("X_3", "H"): {"X_3": sp.Rational(4, 3)},
            ("X_2", "H"): {"X_1": sp.Rational(2, 3),
                              "X_2": sp.Rational(1, 3)},
        },
    )


def _petrov_III() -> CaseStudy:
    x, y, rho, v = sp.symbols("x y rho v")
    chart = Chart((x, y, rho, v),
                  {"x": (0.5, 2.0), "y": (0.5, 2.0),
                   "rho": (0.5, 2.0), "v": (0.5, 2.0)})
    metric = Metric(chart, sp.ImmutableMatrix([
        [v ** 2 / x ** 3, 0, 0, 0],
        [0, v ** 2 / x ** 3, 0, 0],
        [0, 0, sp.Rational(3, 2) * x, 1],
        [0, 0, 1, 0]]))
    vectors = (
        DeclaredVector("X_1", (0, 0, 1, 0), KV),
        DeclaredVector("X_2", (0, 1, 0, 0), KV),
        DeclaredVector("X_3", (2 * x, 2 * y, -rho, v), KV),
        DeclaredVector("H", (0, 0, rho, v), HV, psi=1),
    )
    reductions = (
        ReductionCase(
            "H", ("gamma", "delta", "beta", "alpha"), "ansatz",
            degree=3,
            expected_survivors=("X_2", "X_3")),
    )
    return CaseStudy(
        name="petrov_III",
        description="Petrov type III spacetime",
        metric=metric,
        vectors=vectors,
        reductions=reductions,
        expected_extra=("X_1", "X_2", "X_3", "H"),
        expected_commutators={
            ("X_t", "H"): {"X_t": 2},
            ("X_2", "X_3"): {"X_2": 2},
            ("X_3", "X_1"): {"X_1": 1},
            ("X_1", "H"): {"X_1": 1},
        },
    )


_BUILDERS: dict[str, Callable[..., CaseStudy]] = {
    "decomposable_flat_1p2": _decomposable_flat_1p2,
    "decomposable_constcurv_1p2": _decomposable_constcurv_1p2,
    "gradient_hv_flat_frw": _gradient_hv_flat_frw,
    "petrov_N": _petrov_N,
    "petrov_N_sec2": _petrov_N_sec2,
    "petrov_D": _petrov_D,
    "petrov_II": _petrov_II,
    "petrov_III": _petrov_III,
}
