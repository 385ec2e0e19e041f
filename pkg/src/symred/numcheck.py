"""Numerical oracle: seeded random-point evaluation of symbolic residuals
and central finite-difference derivative checks.

Sampling is counter-based: each sample point is derived from a BLAKE2
digest of ``(seed, expression key, sample index, symbol)``, so reports are
bitwise reproducible regardless of evaluation order or parallelism.
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import sympy as sp

from . import expr as ex


class PoleError(RuntimeError):
    """Sampling kept hitting singular points beyond the retry budget."""


@dataclass(frozen=True)
class SampleConfig:
    seed: int = 0
    samples: int = 100
    #: per-symbol open interval; symbols not listed fall back to (0.5, 2).
    intervals: Mapping[str, tuple[float, float]] = field(default_factory=dict)
    tolerance: float = 1e-9
    retry_budget: int = 8

    def interval(self, name: str) -> tuple[float, float]:
        return tuple(self.intervals.get(name, (0.5, 2.0)))


def _unit(seed: int, key: str, index: int, sym: str) -> float:
    """Deterministic uniform draw in (0, 1)."""
    h = hashlib.blake2b(
        f"{seed}|{key}|{index}|{sym}".encode(), digest_size=8).digest()
    return (int.from_bytes(h, "big") + 1) / (2 ** 64 + 2)


def sample_point(cfg: SampleConfig, key: str, index: int,
                 symbols: Sequence[str]) -> dict[str, float]:
    pt = {}
    for s in symbols:
        lo, hi = cfg.interval(s)
        pt[s] = lo + (hi - lo) * _unit(cfg.seed, key, index, s)
    return pt


def _expr_key(e: sp.Expr) -> str:
    return sp.srepr(e)


def _lambdify(e: sp.Expr, symbols: Sequence[str]):
    return sp.lambdify([sp.Symbol(s) for s in symbols], e, modules=["numpy"])


def _eval_at(fn, pt: Mapping[str, float], symbols: Sequence[str]) -> float:
    val = fn(*[pt[s] for s in symbols])
    val = complex(val)
    if not (math.isfinite(val.real) and math.isfinite(val.imag)):
        raise ArithmeticError("nonfinite sample")
    if abs(val.imag) > 1e-10 * (1.0 + abs(val.real)):
        raise ArithmeticError("complex sample")
    return val.real


def max_abs_residual(
    exprs: Sequence[sp.Expr], cfg: SampleConfig
) -> tuple[float, dict[str, float]]:
    """Maximum absolute value over the seeded sample cloud.

    Returns ``(worst value, maximizing point)``.  Samples that land on a
    pole are re-drawn with a shifted counter; a point that stays singular
    past ``cfg.retry_budget`` raises :class:`PoleError`.
    """
    worst = 0.0
    worst_pt: dict[str, float] = {}
    for e in exprs:
        e = sp.sympify(e)
        syms = sorted(str(s) for s in e.free_symbols)
        if not syms:
            v = abs(float(sp.N(e)))
            if v >= worst:
                worst, worst_pt = v, {}
            continue
        key = _expr_key(e)
        fn = _lambdify(e, syms)
        for i in range(cfg.samples):
            for retry in range(cfg.retry_budget + 1):
                pt = sample_point(cfg, key, i + retry * 10_000_019, syms)
                try:
                    v = abs(_eval_at(fn, pt, syms))
                except (ArithmeticError, ZeroDivisionError, OverflowError,
                        ValueError):
                    continue
                break
            else:
                raise PoleError(
                    f"sample {i} of {e} singular after {cfg.retry_budget} retries")
            if v >= worst:
                worst, worst_pt = v, pt
    return worst, worst_pt


def fd_derivative_check(
    e: sp.Expr, s: sp.Symbol | str, cfg: SampleConfig
) -> float:
    """Max relative error between :func:`symred.expr.differentiate` and a
    central finite difference with step ``1e-5 * scale``."""
    s = str(s)
    e = sp.sympify(e)
    de = ex.differentiate(e, s)
    syms = sorted(str(x) for x in (e.free_symbols | {sp.Symbol(s)}))
    fn = _lambdify(e, syms)
    dfn = _lambdify(de, syms)
    key = _expr_key(e) + f"|d/d{s}"
    worst = 0.0
    for i in range(cfg.samples):
        for retry in range(cfg.retry_budget + 1):
            pt = sample_point(cfg, key, i + retry * 10_000_019, syms)
            lo, hi = cfg.interval(s)
            h = 1e-5 * max(abs(pt[s]), (hi - lo))
            if pt[s] - h <= lo or pt[s] + h >= hi:
                continue  # keep the stencil inside the box
            try:
                up = dict(pt, **{s: pt[s] + h})
                dn = dict(pt, **{s: pt[s] - h})
                fd = (_eval_at(fn, up, syms) - _eval_at(fn, dn, syms)) / (2 * h)
                exact = _eval_at(dfn, pt, syms)
            except (ArithmeticError, ZeroDivisionError, OverflowError,
                    ValueError):
                continue
            break
        else:
            raise PoleError(f"derivative stencil for {e} kept failing")
        rel = abs(fd - exact) / max(1.0, abs(exact))
        worst = max(worst, rel)
    return worst
