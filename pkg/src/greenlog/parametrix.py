"""Parametrix symbol recursion for admissible elliptic expansions.

With p ~ p_m + p_{m-1} + ... the left inverse q ~ q_{-m} + q_{-m-1} + ...
is produced degree by degree:

    q_{-m}   = p_m^{-1},
    q_{-m-j} = -q_{-m} * sum_{|alpha|+k+l = j, k < j}
                  (1/alpha!) d_xi^alpha q_{-m-k} * D_x^alpha p_{m-l} .

Only p is ever differentiated in x, so when the caller needs the parametrix
at the base point alone (jet_order=0) the whole recursion runs on numeric
xi-rational symbols while still consuming the full jet content of p; this is
exact, not an approximation.

Each step sums thousands of terms over different |xi| powers, so the inner
accumulator buckets by denominator and lifts each bucket to the common power
once, instead of re-aligning pairwise.
"""

from __future__ import annotations

from math import factorial

import numpy as np

from . import _basis
from .errors import JetOrderError, MissingPartError
from .symbols import (EXACT, HomogeneousSymbol, SymbolExpansion, compose,
                      invert_principal)


def required_jet_order(m: int, n: int) -> int:
    """Minimal trusted metric order guaranteeing the degree -n parametrix part
    at the base point: n - m recursion steps can consume that many metric
    derivatives on top of the two already spent by curvature coefficients."""
    if m % 2 != 0:
        raise ValueError("operator order must be even")
    if m > n:
        raise ValueError(
            f"operator order {m} exceeds the dimension {n}: the Green kernel "
            "has no logarithmic singularity to compute")
    return n - m + 2


def _alpha_factorial(alpha) -> int:
    out = 1
    for a in alpha:
        out *= factorial(int(a))
    return out


def _sum_symbols(symbols: list, n: int, degree: int, jet_order_floor: int = 0) -> HomogeneousSymbol:
    """Bucketed sum of same-degree symbols (minimizes denominator lifts)."""
    live = [s for s in symbols if not (s.is_zero() and s.valid_order == EXACT)]
    if not live:
        return HomogeneousSymbol.zero(n, degree, jet_order_floor)
    jo = min(s.jet_order for s in live)
    valid = min(s.valid_order for s in live)
    live = [s.with_jet_order(jo) for s in live]
    buckets: dict = {}
    for s in live:
        if s.d in buckets:
            buckets[s.d] = buckets[s.d] + s.num
        else:
            buckets[s.d] = s.num.copy()
    total = None
    total_d = None
    for d in sorted(buckets):
        if total is None:
            total, total_d = buckets[d], d
        else:
            while total_d < d:
                total = _lift_sigma(total, n, degree + 2 * total_d)
                total_d += 1
            total = total + buckets[d]
    return HomogeneousSymbol(n, degree, total_d, total, jo, valid)


def _lift_sigma(num: np.ndarray, n: int, deg: int) -> np.ndarray:
    out = np.zeros((_basis.homog_dim(n, deg + 2), num.shape[1]), dtype=num.dtype)
    for j in range(n):
        gamma = tuple(2 if t == j else 0 for t in range(n))
        out[_basis.xi_shift_index(n, deg, gamma)] += num
    return out


class _DerivativeCache:
    """Iterated-derivative cache keyed by (part index, multi-index)."""

    def __init__(self, parts: list, apply_fn):
        self.parts = parts
        self.apply_fn = apply_fn
        self.cache: dict = {}

    def get(self, idx: int, alpha: tuple) -> HomogeneousSymbol:
        key = (idx, alpha)
        if key not in self.cache:
            if sum(alpha) == 0:
                self.cache[key] = self.parts[idx]
            else:
                i = next(t for t, a in enumerate(alpha) if a > 0)
                prev = list(alpha)
                prev[i] -= 1
                self.cache[key] = self.apply_fn(self.get(idx, tuple(prev)), i)
        return self.cache[key]


def parametrix(p: SymbolExpansion, target_degree: int,
               jet_order: int | None = None, verify: bool = True,
               verify_tol: float = 1e-11) -> SymbolExpansion:
    """Left parametrix of an admissible expansion, down to target_degree.

    jet_order restricts how much x-dependence the returned parts carry
    (jet_order=0 keeps base-point values only; p's jets are still consumed in
    full through the D_x^alpha terms, so the result is exact).  When verify is
    set, compose(q, p) is recomputed independently and checked against 1.
    """
    m = p.order
    n = p.n
    steps = -target_degree - m
    if steps < 0:
        raise ValueError(f"target degree {target_degree} is above the leading "
                         f"parametrix degree {-m}")
    if p.depth < steps:
        raise MissingPartError(
            f"parametrix to degree {target_degree} needs the symbol expansion "
            f"at depth {steps}, have {p.depth}")

    p_lead = p.parts[0] if jet_order is None else p.parts[0].with_jet_order(
        min(jet_order, p.parts[0].jet_order))
    q0 = invert_principal(p_lead)

    dxi_q = _DerivativeCache([q0], lambda s, i: s.xi_derivative(i))
    dx_p = _DerivativeCache(list(p.parts), lambda s, i: s.x_derivative(i))

    q_parts = [q0]
    for j in range(1, steps + 1):
        terms = []
        for k in range(j):          # k < j
            for l in range(j - k + 1):
                a = j - k - l
                if l > p.depth:
                    continue
                if p.parts[l].is_zero():
                    continue
                for alpha_row in _basis.homog_exponents(n, a):
                    alpha = tuple(int(x) for x in alpha_row)
                    dq = dxi_q.get(k, alpha)
                    if dq.is_zero():
                        continue
                    dp = dx_p.get(l, alpha)
                    if dp.is_zero():
                        continue
                    term = dq.mul(dp)
                    if a > 0:
                        term = term.scale(1.0 / _alpha_factorial(alpha))
                    terms.append(term)
        s_j = _sum_symbols(terms, n, -j, q0.jet_order)
        q_j = q0.mul(s_j).scale(-1.0)
        if q_j.valid_order < 0 and not q_j.is_zero():
            raise JetOrderError(
                f"parametrix part of degree {-m - j} lost all trusted jet "
                "orders; supply a deeper metric jet",
                required=required_jet_order(m, n), available=None)
        q_parts.append(q_j)
        dxi_q.parts.append(q_j)
    q = SymbolExpansion(n, -m, q_parts)

    if verify:
        residual = compose(q, p, steps)
        lead_err = (residual.part(0) -
                    HomogeneousSymbol.constant(n, 1.0, residual.part(0).jet_order)).max_abs()
        low_err = max((residual.parts[j].max_abs() for j in range(1, steps + 1)),
                      default=0.0)
        if max(lead_err, low_err) > verify_tol:
            raise AssertionError(
                f"parametrix self-check failed: compose(q, p) deviates from 1 "
                f"by {max(lead_err, low_err):.3e}")
    return q
