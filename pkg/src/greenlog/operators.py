"""Symbol expansions for the concrete Laplace-type operators.

All builders take a *normalized* metric jet (g(0) = I); that is what licenses
the Euclidean |xi| in the symbol representation.  The scalar Laplacian is the
geometric-positive one,

    Delta = -(1/sqrt g) d_i (sqrt g g^{ij} d_j .),

whose left symbol is p_2 + p_1 with

    p_2 = g^{ij} xi_i xi_j,
    p_1 = -i (d_i g^{ij} + g^{ij} d_i log sqrt(g)) xi_j ,

and the conformal Laplacian adds the degree-0 part kappa (n-2)/(4(n-1)).
Conformal k-th powers of the Laplacian beyond their principal part carry
lower-order terms with no closed form available here; a tagged stand-in
provides the exact principal part and refuses queries that would need more.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import JetOrderError, PrincipalOnlyError
from .jets import MetricJet, ScalarJet
from .symbols import HomogeneousSymbol, SymbolExpansion, compose
from .tensor import Geometry, ricci_scalar


@dataclass(frozen=True)
class OperatorSpec:
    """Identity card of a buildable operator.

    biweight (w, w') are the conformal conjugation exponents in
    P_{e^f g} = e^{w' f} P_g e^{-w f}; None for operators that are not
    conformally covariant.  conformal_factor_exponent records which rescaling
    convention the operator family uses (g -> e^{2f} g here).
    """

    kind: str                   # laplacian | yamabe | laplacian_power | gjms_principal_stub
    n: int
    k: int = 1
    principal_only: bool = False

    def __post_init__(self):
        if self.kind not in ("laplacian", "yamabe", "laplacian_power",
                             "gjms_principal_stub"):
            raise ValueError(f"unknown operator kind {self.kind!r}")
        if self.k < 1:
            raise ValueError("power index k must be >= 1")

    @property
    def order(self) -> int:
        return 2 * self.k if self.kind in ("laplacian_power", "gjms_principal_stub") else 2

    @property
    def biweight(self):
        if self.kind in ("yamabe", "gjms_principal_stub"):
            k, n = (1 if self.kind == "yamabe" else self.k), self.n
            return (Fraction(2 * k - n, 4), Fraction(-(n + 2 * k), 4))
        return None

    @property
    def conformal_factor_exponent(self) -> int:
        return 2

    def describe(self) -> str:
        if self.kind == "laplacian_power":
            return f"laplacian^{self.k}"
        if self.kind == "gjms_principal_stub":
            return f"gjms-stub(k={self.k})"
        return self.kind


def laplacian_spec(n: int) -> OperatorSpec:
    return OperatorSpec("laplacian", n)


def yamabe_spec(n: int) -> OperatorSpec:
    if n < 3:
        raise ValueError("the conformal Laplacian needs n >= 3")
    return OperatorSpec("yamabe", n)


def laplacian_power_spec(n: int, k: int) -> OperatorSpec:
    return OperatorSpec("laplacian_power", n, k=k)


def gjms_stub_spec(n: int, k: int) -> OperatorSpec:
    return OperatorSpec("gjms_principal_stub", n, k=k, principal_only=True)


def _require_normalized(g: MetricJet):
    if not g.normalized:
        raise ValueError("operator symbols require a normalized metric "
                         "(g(0) = I); call normalize_metric first")


def _principal_and_subprincipal(g: MetricJet):
    """p_2 and p_1 of the scalar Laplacian over a normalized metric."""
    n = g.n
    ginv = g.inverse_data()
    order = g.order
    terms2 = []
    for i in range(n):
        for j in range(i, n):
            coeff = ScalarJet(n, order, ginv[i, j], g.valid_order)
            if i != j:
                coeff = 2.0 * coeff
            beta = tuple((1 if t == i else 0) + (1 if t == j else 0) for t in range(n))
            terms2.append((coeff, beta, 0))
    p2 = HomogeneousSymbol.from_terms(n, 2, terms2, order)

    # d_i log sqrt(g) = (1/2) g^{kl} d_i g_kl
    met = g.data
    terms1 = []
    for j in range(n):
        b = ScalarJet.zero(n, order - 1, valid_order=g.valid_order - 1)
        for i in range(n):
            gij = ScalarJet(n, order, ginv[i, j], g.valid_order)
            b = b + gij.diff(i)
            dlog = ScalarJet.zero(n, order - 1, valid_order=g.valid_order - 1)
            for kk in range(n):
                for ll in range(n):
                    gkl = ScalarJet(n, order, ginv[kk, ll], g.valid_order)
                    dgkl = ScalarJet(n, order, met[kk, ll], g.valid_order).diff(i)
                    dlog = dlog + gkl * dgkl
            b = b + 0.5 * gij.truncate(order - 1) * dlog
        beta = tuple(1 if t == j else 0 for t in range(n))
        terms1.append((b, beta, 0))
    p1 = HomogeneousSymbol.from_terms(n, 1, terms1, order - 1).scale(-1j)
    return p2, p1


def laplacian_symbol(g: MetricJet, depth: int) -> SymbolExpansion:
    """Full left symbol of the positive Laplacian, padded with zero parts."""
    _require_normalized(g)
    if g.valid_order < depth + 1:
        raise JetOrderError("Laplacian symbol at this depth needs a deeper metric",
                            required=depth + 1, available=g.valid_order)
    p2, p1 = _principal_and_subprincipal(g)
    parts = [p2]
    if depth >= 1:
        parts.append(p1)
    exp = SymbolExpansion(g.n, 2, parts)
    return exp.extended(depth, jet_order=0)


def yamabe_symbol(g: MetricJet, depth: int) -> SymbolExpansion:
    """Conformal Laplacian Delta + (n-2)/(4(n-1)) kappa."""
    n = g.n
    if n < 3:
        raise ValueError("the conformal Laplacian needs n >= 3")
    _require_normalized(g)
    if g.valid_order < max(depth + 1, 2):
        raise JetOrderError("conformal Laplacian needs a deeper metric",
                            required=max(depth + 1, 2), available=g.valid_order)
    exp = laplacian_symbol(g, depth)
    if depth >= 2:
        _, kappa = ricci_scalar(g, Geometry(g))
        factor = (n - 2) / (4.0 * (n - 1))
        p0 = HomogeneousSymbol.from_terms(
            n, 0, [(factor * kappa, (0,) * n, 0)], kappa.order)
        parts = list(exp.parts)
        parts[2] = parts[2] + p0
        exp = SymbolExpansion(n, 2, parts)
    return exp


def laplacian_power_symbol(g: MetricJet, k: int, depth: int) -> SymbolExpansion:
    """Delta^k as a symbol expansion, by repeated composition."""
    if k < 1:
        raise ValueError("k must be >= 1")
    base = laplacian_symbol(g, depth)
    out = base
    for _ in range(k - 1):
        out = compose(out, base, depth)
    return out


def gjms_principal_stub(g: MetricJet, k: int, depth: int) -> SymbolExpansion:
    """Principal part of a conformal k-th Laplacian power, with zero padding.

    Only quantities that depend on the principal symbol alone are meaningful;
    downstream consumers must check the spec's principal_only flag (the
    critical case 2k = n is the intended use).
    """
    _require_normalized(g)
    p2, _ = _principal_and_subprincipal(g)
    principal = p2
    for _ in range(k - 1):
        principal = principal.mul(p2)
    return SymbolExpansion(g.n, 2 * k, [principal]).extended(depth, jet_order=0)


def build_symbol(spec: OperatorSpec, g: MetricJet, depth: int) -> SymbolExpansion:
    """Dispatch an OperatorSpec to its builder."""
    if spec.n != g.n:
        raise ValueError("operator spec and metric dimensions differ")
    if spec.kind == "laplacian":
        return laplacian_symbol(g, depth)
    if spec.kind == "yamabe":
        return yamabe_symbol(g, depth)
    if spec.kind == "laplacian_power":
        return laplacian_power_symbol(g, spec.k, depth)
    return gjms_principal_stub(g, spec.k, depth)


def guard_principal_only(spec: OperatorSpec, n: int):
    """Refuse principal-only stand-ins for queries needing lower-order data."""
    if spec.principal_only and 2 * spec.k != n:
        raise PrincipalOnlyError(
            f"the degree -{n} parametrix part of a {spec.describe()} operator "
            f"depends on lower-order terms that have no closed form here; "
            f"use the conformal Laplacian or the critical power 2k = n")
