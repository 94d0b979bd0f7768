"""Truncated multivariate Taylor jets at the origin.

A ScalarJet stores the coefficients c_alpha = (d^alpha f)(0) / alpha! of a
function on R^n, truncated at a total degree.  Each jet also tracks a
``valid_order``: the degree through which its coefficients are trusted.
Arithmetic propagates the minimum of the operands' valid orders and
differentiation decrements it, so a computation that consumes more derivatives
than the input metric supplies fails loudly instead of returning truncation
garbage.

Coefficients are plain numpy vectors over the graded monomial basis of
``_basis``; all operations are pure and the objects are treated as immutable.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import comb, exp, log, sqrt

import numpy as np

from . import _basis
from .errors import DimensionMismatchError, DomainError, JetOrderError


def _trunc(c: np.ndarray, n: int, from_order: int, to_order: int) -> np.ndarray:
    if to_order == from_order:
        return c
    m = _basis.jet_dim(n, to_order)
    if to_order < from_order:
        return c[:m]
    out = np.zeros(m, dtype=c.dtype)
    out[: c.size] = c
    return out


@dataclass(frozen=True)
class ScalarJet:
    """Truncated Taylor expansion of a scalar function at the origin."""

    n: int
    order: int
    c: np.ndarray
    valid_order: int

    def __post_init__(self):
        if self.c.shape != (_basis.jet_dim(self.n, self.order),):
            raise ValueError("coefficient vector does not match (n, order)")
        if self.valid_order > self.order:
            raise ValueError("valid_order exceeds stored order")

    # -- construction -------------------------------------------------------
    @staticmethod
    def zero(n: int, order: int, valid_order: int | None = None) -> "ScalarJet":
        v = order if valid_order is None else valid_order
        return ScalarJet(n, order, np.zeros(_basis.jet_dim(n, order)), v)

    @staticmethod
    def constant(n: int, order: int, value: float) -> "ScalarJet":
        c = np.zeros(_basis.jet_dim(n, order), dtype=np.result_type(type(value), np.float64))
        c[0] = value
        return ScalarJet(n, order, c, order)

    @staticmethod
    def variable(n: int, order: int, i: int) -> "ScalarJet":
        """The coordinate function x_i (0-based index)."""
        if not 0 <= i < n:
            raise IndexError(f"variable index {i} out of range for n={n}")
        if order < 1:
            raise ValueError("order >= 1 needed to store a coordinate function")
        c = np.zeros(_basis.jet_dim(n, order))
        c[_basis.jet_index_of(n, order, tuple(1 if j == i else 0 for j in range(n)))] = 1.0
        return ScalarJet(n, order, c, order)

    @staticmethod
    def from_terms(n: int, order: int, terms: dict) -> "ScalarJet":
        """Build from a sparse {multi-index tuple: coefficient} map."""
        vals = list(terms.values())
        dtype = np.result_type(np.float64, *[type(v) for v in vals]) if vals else np.float64
        c = np.zeros(_basis.jet_dim(n, order), dtype=dtype)
        for alpha, v in terms.items():
            if len(alpha) != n:
                raise DimensionMismatchError(f"multi-index {alpha} has wrong length")
            c[_basis.jet_index_of(n, order, alpha)] = v
        return ScalarJet(n, order, c, order)

    # -- inspection ---------------------------------------------------------
    def coeff(self, alpha) -> float:
        """Taylor coefficient d^alpha f(0)/alpha! (0 beyond the stored order)."""
        if sum(alpha) > self.order:
            return 0.0
        return self.c[_basis.jet_index_of(self.n, self.order, tuple(alpha))]

    def coeffs(self) -> dict:
        """Sparse view: {multi-index: coefficient} over the nonzero entries."""
        exps = _basis.jet_exponents(self.n, self.order)
        nz = np.nonzero(self.c)[0]
        return {tuple(int(e) for e in exps[i]): self.c[i] for i in nz}

    @property
    def value(self):
        """f(0)."""
        return self.c[0]

    def evaluate(self, point) -> complex:
        """Evaluate the truncated polynomial at a numeric point."""
        x = np.asarray(point, dtype=np.float64)
        exps = _basis.jet_exponents(self.n, self.order)
        mono = np.prod(x[None, :] ** exps, axis=1)
        return (self.c * mono).sum()

    def is_real(self, tol: float = 0.0) -> bool:
        return not np.iscomplexobj(self.c) or np.abs(self.c.imag).max() <= tol

    # -- shaping ------------------------------------------------------------
    def truncate(self, order: int) -> "ScalarJet":
        """Restrict (or zero-pad) storage to the given order."""
        return ScalarJet(self.n, order, _trunc(self.c, self.n, self.order, order),
                         min(self.valid_order, order))

    def with_valid(self, valid_order: int) -> "ScalarJet":
        return ScalarJet(self.n, self.order, self.c, valid_order)

    # -- ring arithmetic ----------------------------------------------------
    def _check(self, other: "ScalarJet"):
        if self.n != other.n:
            raise DimensionMismatchError(
                f"jets over {self.n} and {other.n} variables cannot be combined")

    def _coerce(self, other):
        if isinstance(other, ScalarJet):
            return other
        return ScalarJet.constant(self.n, self.order, other)

    def __add__(self, other) -> "ScalarJet":
        other = self._coerce(other)
        self._check(other)
        order = min(self.order, other.order)
        ca = _trunc(self.c, self.n, self.order, order)
        cb = _trunc(other.c, self.n, other.order, order)
        return ScalarJet(self.n, order, ca + cb, min(self.valid_order, other.valid_order))

    __radd__ = __add__

    def __neg__(self) -> "ScalarJet":
        return ScalarJet(self.n, self.order, -self.c, self.valid_order)

    def __sub__(self, other) -> "ScalarJet":
        return self + (-self._coerce(other))

    def __rsub__(self, other) -> "ScalarJet":
        return (-self) + other

    def __mul__(self, other) -> "ScalarJet":
        if not isinstance(other, ScalarJet):
            return ScalarJet(self.n, self.order, self.c * other, self.valid_order)
        self._check(other)
        order = min(self.order, other.order)
        ca = _trunc(self.c, self.n, self.order, order)
        cb = _trunc(other.c, self.n, other.order, order)
        return ScalarJet(self.n, order, _basis.jet_conv(ca, cb, self.n, order),
                         min(self.valid_order, other.valid_order))

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, ScalarJet):
            return self * jet_compose_analytic(other, "inv")
        return self * (1.0 / other)

    def __rtruediv__(self, other):
        return jet_compose_analytic(self, "inv") * other

    def diff(self, i: int) -> "ScalarJet":
        """Partial derivative d/dx_i; consumes one trusted order."""
        if self.valid_order < 1:
            raise JetOrderError(
                "cannot differentiate: the source jet was built from a metric "
                "jet of insufficient order", required=1, available=self.valid_order)
        return ScalarJet(self.n, self.order - 1,
                         _basis.jet_diff(self.c, self.n, self.order, i),
                         self.valid_order - 1)

    def max_abs(self) -> float:
        return float(np.abs(self.c).max()) if self.c.size else 0.0


def jet_arith(a: ScalarJet, b: ScalarJet, op: str) -> ScalarJet:
    """Named entry point for the truncated ring operations."""
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    raise ValueError(f"unknown op {op!r}")


def jet_diff(f: ScalarJet, i: int) -> ScalarJet:
    return f.diff(i)


# ---------------------------------------------------------------------------
# analytic composition

def _series_coefficients(fn: str, c: float, k_max: int) -> list:
    """Taylor coefficients fn^{(k)}(c)/k! for the supported outer functions."""
    if fn == "exp":
        base = exp(c)
        out, fact = [], 1.0
        for k in range(k_max + 1):
            out.append(base / fact)
            fact *= k + 1
        return out
    if fn == "log":
        if c <= 0:
            raise DomainError(f"log of a jet with constant term {c} <= 0")
        return [log(c)] + [(-1.0) ** (k + 1) / (k * c ** k) for k in range(1, k_max + 1)]
    if fn == "inv":
        if c == 0:
            raise DomainError("inverse of a jet with vanishing constant term")
        return [(-1.0) ** k / c ** (k + 1) for k in range(k_max + 1)]
    if fn == "sqrt":
        if c <= 0:
            raise DomainError(f"sqrt of a jet with constant term {c} <= 0")
        out, coef = [], sqrt(c)
        for k in range(k_max + 1):
            out.append(coef)
            coef *= (0.5 - k) / ((k + 1) * c)
        return out
    if fn in ("sin", "cos"):
        import math
        cycle = [math.sin(c), math.cos(c), -math.sin(c), -math.cos(c)]
        start = 0 if fn == "sin" else 1
        out, fact = [], 1.0
        for k in range(k_max + 1):
            out.append(cycle[(start + k) % 4] / fact)
            fact *= k + 1
        return out
    raise ValueError(f"unsupported analytic function {fn!r}")


def jet_compose_analytic(f: ScalarJet, fn: str) -> ScalarJet:
    """Compose an analytic function with a jet: fn(f), exact to truncation.

    The constant term must lie in the domain of fn (inv: nonzero, log/sqrt:
    positive).  Evaluation is a Horner scheme in the nilpotent part of f.
    """
    if np.iscomplexobj(f.c):
        raise DomainError("analytic composition is defined for real jets only")
    c0 = float(f.c[0])
    coeffs = _series_coefficients(fn, c0, f.order)
    h = ScalarJet(f.n, f.order, f.c.copy(), f.valid_order)
    h.c[0] = 0.0
    acc = ScalarJet.constant(f.n, f.order, coeffs[-1])
    for a_k in reversed(coeffs[:-1]):
        acc = acc * h + a_k
    return acc.with_valid(f.valid_order)


# ---------------------------------------------------------------------------
# metric jets

class MetricJet:
    """Symmetric matrix of scalar jets with positive definite constant term."""

    def __init__(self, n: int, data: np.ndarray, order: int,
                 valid_order: int | None = None):
        if data.shape[:2] != (n, n) or data.shape[2] != _basis.jet_dim(n, order):
            raise ValueError("metric data shape does not match (n, order)")
        sym_err = np.abs(data - data.transpose(1, 0, 2)).max()
        scale = max(np.abs(data).max(), 1.0)
        if sym_err > 1e-12 * scale:
            raise ValueError(f"metric entries are not symmetric (deviation {sym_err:.2e})")
        self.n = n
        self.order = order
        self.valid_order = order if valid_order is None else valid_order
        self.data = 0.5 * (data + data.transpose(1, 0, 2))
        g0 = self.constant_term()
        if np.linalg.eigvalsh(g0).min() <= 0:
            raise ValueError("metric constant term is not positive definite")
        self.normalized = bool(np.abs(g0 - np.eye(n)).max() <= 1e-13)
        if self.normalized:
            self.data[:, :, 0] = np.eye(n)

    @staticmethod
    def from_entries(entries) -> "MetricJet":
        """Build from an n x n nested sequence of ScalarJet."""
        n = len(entries)
        order = min(min(e.order for e in row) for row in entries)
        valid = min(min(e.valid_order for e in row) for row in entries)
        data = np.stack([
            np.stack([entries[i][j].truncate(order).c for j in range(n)])
            for i in range(n)])
        return MetricJet(n, data, order, valid)

    @staticmethod
    def identity(n: int, order: int) -> "MetricJet":
        data = np.zeros((n, n, _basis.jet_dim(n, order)))
        data[:, :, 0] = np.eye(n)
        return MetricJet(n, data, order)

    def entry(self, i: int, j: int) -> ScalarJet:
        return ScalarJet(self.n, self.order, self.data[i, j], self.valid_order)

    def constant_term(self) -> np.ndarray:
        return self.data[:, :, 0].copy()

    def truncate(self, order: int) -> "MetricJet":
        if order == self.order:
            return self
        m = _basis.jet_dim(self.n, order)
        if order < self.order:
            data = self.data[:, :, :m]
        else:
            data = np.zeros((self.n, self.n, m))
            data[:, :, : self.data.shape[2]] = self.data
        return MetricJet(self.n, data.copy(), order, min(self.valid_order, order))

    def require_valid(self, order: int, what: str):
        if self.valid_order < order:
            raise JetOrderError(f"{what} needs a deeper metric jet",
                                required=order, available=self.valid_order)

    def inverse_data(self) -> np.ndarray:
        """Coefficients of g^{-1} by Newton iteration in the jet ring."""
        n, order = self.n, self.order
        x = np.zeros_like(self.data)
        x[:, :, 0] = np.linalg.inv(self.constant_term())
        steps = max(1, int(np.ceil(np.log2(order + 1))) + 1) if order > 0 else 1
        for _ in range(steps):
            gx = _matmul_jets(self.data, x, n, order)
            gx[:, :, 0] -= 2.0 * np.eye(n)
            x = -_matmul_jets(x, gx, n, order)
        x = 0.5 * (x + x.transpose(1, 0, 2))
        return x

    def sqrt_det_constant(self) -> float:
        return float(np.sqrt(np.linalg.det(self.constant_term())))


def _matmul_jets(a: np.ndarray, b: np.ndarray, n: int, order: int) -> np.ndarray:
    """(n, n, M) jet-matrix product."""
    out = np.zeros_like(a)
    for k in range(n):
        for j in range(n):
            out[:, j, :] += _basis.jet_conv_many(a[:, k, :], b[k, j, :], n, order)
    return out


def metric_inverse(g: MetricJet):
    """Inverse metric as a contravariant rank-2 tensor jet."""
    from .tensor import TensorJet
    return TensorJet(g.n, ("u", "u"), g.inverse_data(), g.order, g.valid_order)


def normalize_metric(g: MetricJet) -> tuple:
    """Pull g back through x -> Lx so that the constant term becomes the
    identity; L is the inverse transpose Cholesky factor of g(0).

    Returns (normalized metric, L).  Idempotent on its own output.
    """
    g0 = g.constant_term()
    if np.abs(g0 - np.eye(g.n)).max() <= 1e-13:
        return g, np.eye(g.n)
    chol = np.linalg.cholesky(g0)
    L = np.linalg.inv(chol).T
    data = np.empty_like(g.data)
    for i in range(g.n):
        for j in range(i, g.n):
            data[i, j] = _basis.linear_pullback(g.data[i, j], L, g.n, g.order)
            data[j, i] = data[i, j]
    data = np.einsum("ia,jb,ijm->abm", L, L, data)
    out = MetricJet(g.n, data, g.order, g.valid_order)
    if not out.normalized:
        raise ValueError("normalization failed to produce an identity constant term")
    return out, L


def conformal_rescale(g: MetricJet, f: ScalarJet, factor_exponent: int) -> MetricJet:
    """Multiply the metric by exp(factor_exponent * f) jet-wise."""
    if factor_exponent not in (1, 2):
        raise ValueError("factor_exponent must be 1 or 2")
    if f.n != g.n:
        raise DimensionMismatchError("conformal factor dimension mismatch")
    order = min(g.order, f.order)
    scale = jet_compose_analytic((factor_exponent * f).truncate(order), "exp")
    gt = g.truncate(order)
    data = np.empty_like(gt.data)
    for i in range(g.n):
        for j in range(i, g.n):
            data[i, j] = _basis.jet_conv(gt.data[i, j], scale.c, g.n, order)
            data[j, i] = data[i, j]
    return MetricJet(g.n, data, order, min(g.valid_order, f.valid_order, order))
