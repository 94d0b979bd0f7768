"""Logarithmic singularities of Schwartz and Green kernels.

The density is the exact cosphere integral of the degree -n symbol part,

    c_P(x0) = (2 pi)^{-n} int_{S^{n-1}} p_{-n}(x0, xi) dsigma(xi),

evaluated with the Gamma-function formula for monomial integrals (the
|xi|^{-2d} factors are 1 on the unit sphere).  Work happens in coordinates
normalized so that g(x0) = I; there the density component equals the
chart-free scalar obtained by dividing by the Riemannian volume, and the
density in any other chart is recovered as scalar * sqrt(det g(x0)) in that
chart's metric.

Green kernels: gamma_P is the Schwartz-kernel log-singularity of any
parametrix of P; the heat-trace coefficient a_{n-m} equals m * gamma and is
reported alongside.

Conformal transformation: for a family with P_{e^F g} = e^{w' F} P_g e^{-w F},
the parametrix conjugates as Q_{e^F g} = e^{w F} Q_g e^{-w' F}, so the adopted
Green-kernel law is gamma_{e^F g} = e^{(w - w') F(x0)} gamma_g as densities in
a fixed chart.  (The opposite sign pattern, mirroring the Schwartz-kernel law,
is also evaluated and reported, so a convention mismatch is visible rather
than silent.)
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import pi

import numpy as np

from . import _basis
from .errors import ConventionError, JetOrderError, MissingPartError
from .jets import MetricJet, ScalarJet, conformal_rescale, normalize_metric
from .operators import OperatorSpec, build_symbol, guard_principal_only
from .parametrix import parametrix, required_jet_order
from .symbols import HomogeneousSymbol, SymbolExpansion

IMAG_TOL = 1e-10

sphere_monomial_integral = _basis.sphere_monomial_integral


@dataclass(frozen=True)
class LogSingularity:
    """A kernel log-singularity at the base point.

    c_density is the density component in coordinates with g(x0) = I, where it
    coincides with scalar_invariant (the chart-free value per unit Riemannian
    volume).  orig_sqrt_det carries sqrt(det g(x0)) of the metric as supplied,
    so the density in the caller's chart is scalar_invariant * orig_sqrt_det.
    """

    n: int
    c_density: float
    scalar_invariant: float
    kind: str                                  # "schwartz" | "green"
    heat_coefficient: float | None = None
    operator: OperatorSpec | None = None
    imag_residue: float = 0.0
    orig_sqrt_det: float = 1.0
    density_part: HomogeneousSymbol | None = field(default=None, repr=False)

    def __post_init__(self):
        if self.kind not in ("schwartz", "green"):
            raise ValueError(f"unknown kind {self.kind!r}")
        if self.kind == "green" and self.heat_coefficient is None:
            raise ValueError("green-kernel singularities carry a heat coefficient")

    def density_in_original_chart(self) -> float:
        return self.scalar_invariant * self.orig_sqrt_det


def part_sphere_integral(part: HomogeneousSymbol) -> complex:
    """Exact integral of a homogeneous symbol at the base point over S^{n-1}."""
    weights = _basis.sphere_integrals(part.n, part.num_degree)
    return complex(part.constant_column() @ weights)


def logsing_density(p: SymbolExpansion, n: int,
                    operator: OperatorSpec | None = None,
                    orig_sqrt_det: float = 1.0) -> LogSingularity:
    """Schwartz-kernel log-singularity of an expansion over a normalized metric."""
    if p.n != n:
        raise ValueError("expansion dimension does not match n")
    part = p.part(-n)  # raises MissingPartError when the expansion is too shallow
    if part.valid_order < 0:
        raise JetOrderError("degree -n symbol part is untrusted at the base point",
                            required=0, available=part.valid_order)
    val = part_sphere_integral(part) / (2.0 * pi) ** n
    if abs(val.imag) > IMAG_TOL:
        raise ConventionError(
            f"log-singularity density has imaginary residue {val.imag:.3e}; "
            "this indicates an inconsistent symbol convention upstream")
    return LogSingularity(n=n, c_density=val.real, scalar_invariant=val.real,
                          kind="schwartz", operator=operator,
                          imag_residue=abs(val.imag), orig_sqrt_det=orig_sqrt_det,
                          density_part=part)


def green_logsing(spec: OperatorSpec, g: MetricJet,
                  verify: bool | None = None) -> LogSingularity:
    """Green-kernel log-singularity of an operator built from a metric jet.

    Normalizes the metric, builds the operator's symbol expansion, runs the
    parametrix recursion down to degree -n at the base point, and integrates.
    """
    n = g.n
    m = spec.order
    if spec.n != n:
        raise ValueError("operator spec dimension does not match the metric")
    req = required_jet_order(m, n)   # also rejects m > n
    if g.valid_order < req:
        raise JetOrderError(
            f"green_logsing for order {m} in dimension {n}",
            required=req, available=g.valid_order)
    guard_principal_only(spec, n)

    gn, _ = normalize_metric(g)
    steps = n - m
    internal = min(gn.order, max(steps + 1, 2))
    gn = gn.truncate(internal)
    p = build_symbol(spec, gn, depth=steps)
    if verify is None:
        verify = True
    # roundoff in the self-check accumulates with the term count, which grows
    # steeply with the dimension; the acceptance tolerances still apply to the
    # final densities.
    q = parametrix(p, -n, jet_order=0, verify=verify, verify_tol=1e-9)
    base = logsing_density(q, n, operator=spec,
                           orig_sqrt_det=g.sqrt_det_constant())
    return LogSingularity(n=n, c_density=base.c_density,
                          scalar_invariant=base.scalar_invariant,
                          kind="green",
                          heat_coefficient=m * base.scalar_invariant,
                          operator=spec, imag_residue=base.imag_residue,
                          orig_sqrt_det=g.sqrt_det_constant(),
                          density_part=base.density_part)


@dataclass(frozen=True)
class ConformalReport:
    """Outcome of the conformal covariance check for the Green singularity."""

    n: int
    operator: str
    biweight: tuple
    factor_exponent: int         # metric was rescaled by exp(factor_exponent * f)
    f0: float                    # f at the base point
    lhs: float                   # density for the rescaled metric, original chart
    rhs: float                   # e^{(w-w') F} * density for g  (adopted law)
    rhs_alt: float               # e^{-(w-w') F} * density for g (mirrored sign)
    rel_error: float
    rel_error_alt: float
    matched_exponent: str

    def passed(self, tol: float) -> bool:
        return self.rel_error < tol


def conformal_check(spec: OperatorSpec, g: MetricJet, f: ScalarJet,
                    verify: bool | None = None) -> ConformalReport:
    """Compare gamma for e^{2f} g against the conformal transformation law.

    Densities are compared in the caller's chart: the engine computes the
    chart-free scalar in normalized coordinates and multiplies back by
    sqrt(det g(x0)) of each metric, which is equivalent to composing the
    normalization maps so both densities refer to identical coordinates.
    """
    if spec.biweight is None:
        raise ValueError(f"{spec.describe()} carries no conformal biweight")
    w, wp = (float(x) for x in spec.biweight)
    g_hat = conformal_rescale(g, f, spec.conformal_factor_exponent)
    ls = green_logsing(spec, g, verify=verify)
    ls_hat = green_logsing(spec, g_hat, verify=verify)
    big_f = spec.conformal_factor_exponent * float(f.value)
    lhs = ls_hat.density_in_original_chart()
    base = ls.density_in_original_chart()
    rhs = float(np.exp((w - wp) * big_f)) * base
    rhs_alt = float(np.exp(-(w - wp) * big_f)) * base
    scale = max(abs(lhs), abs(rhs), 1e-300)
    rel = abs(lhs - rhs) / scale
    rel_alt = abs(lhs - rhs_alt) / max(abs(lhs), abs(rhs_alt), 1e-300)
    if rel <= rel_alt:
        matched = "-(w'-w)"
    else:
        matched = "-(w-w')"
    return ConformalReport(n=g.n, operator=spec.describe(),
                           biweight=(w, wp),
                           factor_exponent=spec.conformal_factor_exponent,
                           f0=float(f.value), lhs=lhs, rhs=rhs, rhs_alt=rhs_alt,
                           rel_error=rel, rel_error_alt=rel_alt,
                           matched_exponent=matched)


def parity_vanishing_check(spec: OperatorSpec, g: MetricJet,
                           verify: bool | None = None) -> float:
    """Odd-dimension vanishing: returns |gamma| after asserting term-level
    parity of the degree -n parametrix part."""
    if g.n % 2 != 1:
        raise ValueError("parity vanishing concerns odd dimensions")
    ls = green_logsing(spec, g, verify=verify)
    part = ls.density_part
    exps = _basis.homog_exponents(part.n, part.num_degree)
    live = np.nonzero(np.abs(part.num).max(axis=1))[0]
    degs = exps[live].sum(axis=1)
    if live.size and not np.all(degs % 2 == (g.n % 2)):
        raise ConventionError("degree -n part carries terms of the wrong parity")
    return abs(ls.scalar_invariant)


def weight_scaling_check(spec: OperatorSpec, g: MetricJet, t: float,
                         verify: bool | None = None) -> tuple:
    """Scalar invariant under g -> t g: returns (measured, expected)."""
    if spec.biweight is None:
        raise ValueError("weight scaling needs a conformal biweight")
    w, wp = (float(x) for x in spec.biweight)
    ls = green_logsing(spec, g, verify=verify)
    gt = MetricJet(g.n, g.data * t, g.order, g.valid_order)
    ls_t = green_logsing(spec, gt, verify=verify)
    w_eff = g.n / 2.0 - (w - wp)
    return ls_t.scalar_invariant, t ** (-w_eff) * ls.scalar_invariant
