"""Classical homogeneous symbols with jet coefficients, and their calculus.

A homogeneous symbol of degree m is stored with a single common denominator:

    p(x, xi) = sum_beta c_beta(x) xi^beta |xi|^{-2d},   |beta| = m + 2d,

where the c_beta are Taylor jets in x (rows of one numpy matrix, one column
per jet monomial).  Keeping every term over the same |xi| power makes addition
a plain matrix sum, and xi-differentiation closed: the quotient rule only ever
raises d by one.  The Euclidean |xi| is legitimate because symbols are only
built over metrics normalized to g(0) = I; builders reject anything else.

Asymptotic expansions are lists of homogeneous parts with degrees stepping
down by one; composition follows the standard left-symbol product rule

    r_{m+m'-j} = sum_{|alpha|+k+l=j} (1/alpha!) d_xi^alpha p_{m-k} D_x^alpha q_{m'-l}

with D_x = -i d_x, so coefficients are complex in general.
"""

from __future__ import annotations

from math import factorial

import numpy as np

from . import _basis
from .errors import (DimensionMismatchError, JetOrderError, MissingPartError,
                     NotLaplaceTypeError)
from .jets import ScalarJet

#: valid_order sentinel for symbols that are exactly zero at every order
EXACT = 10 ** 9


def _alpha_factorial(alpha) -> int:
    out = 1
    for a in alpha:
        out *= factorial(int(a))
    return out


class HomogeneousSymbol:
    """One homogeneous piece of a symbol; immutable by convention."""

    def __init__(self, n: int, degree: int, d: int, num: np.ndarray,
                 jet_order: int, valid_order: int):
        if d < 0:
            raise ValueError("denominator power must be nonnegative")
        if degree + 2 * d < 0:
            raise ValueError(
                f"degree {degree} cannot be represented with |xi|^{-2 * d}")
        rows = _basis.homog_dim(n, degree + 2 * d)
        cols = _basis.jet_dim(n, jet_order)
        if num.shape != (rows, cols):
            raise ValueError(f"numerator shape {num.shape} != ({rows}, {cols})")
        self.n = n
        self.degree = degree
        self.d = d
        self.num = num
        self.jet_order = jet_order
        self.valid_order = valid_order

    # -- constructors ---------------------------------------------------------
    @staticmethod
    def zero(n: int, degree: int, jet_order: int = 0) -> "HomogeneousSymbol":
        d = 0 if degree >= 0 else (-degree + 1) // 2
        rows = _basis.homog_dim(n, degree + 2 * d)
        return HomogeneousSymbol(
            n, degree, d, np.zeros((rows, _basis.jet_dim(n, jet_order)),
                                   dtype=np.complex128), jet_order, EXACT)

    @staticmethod
    def from_terms(n: int, degree: int, terms, jet_order: int) -> "HomogeneousSymbol":
        """Build from a list of (coeff, beta, d) with coeff a ScalarJet or a
        number; every term must satisfy |beta| - 2d = degree."""
        d_common = 0
        for _, beta, d in terms:
            if sum(beta) - 2 * d != degree:
                raise ValueError(
                    f"term xi^{tuple(beta)} |xi|^{-2 * d} is not homogeneous "
                    f"of degree {degree}")
            d_common = max(d_common, d)
        out = HomogeneousSymbol.zero(n, degree, jet_order)
        d_common = max(d_common, out.d)
        rows = _basis.homog_dim(n, degree + 2 * d_common)
        cols = _basis.jet_dim(n, jet_order)
        num = np.zeros((rows, cols), dtype=np.complex128)
        valid = EXACT
        for coeff, beta, d in terms:
            if isinstance(coeff, ScalarJet):
                if coeff.n != n:
                    raise DimensionMismatchError("coefficient jet dimension mismatch")
                cj = coeff.truncate(jet_order)
                vec = cj.c.astype(np.complex128)
                valid = min(valid, coeff.valid_order)
            else:
                vec = np.zeros(cols, dtype=np.complex128)
                vec[0] = coeff
            deg = sum(beta)
            row_block = np.zeros(_basis.homog_dim(n, deg), dtype=np.complex128)
            row_block[int(np.searchsorted(_basis.homog_codes(n, deg),
                                          _basis._pack(np.asarray([beta], dtype=np.int64))[0]))] = 1.0
            for _ in range(d_common - d):
                row_block = _basis.xi_mul_sigma(row_block, n, deg)
                deg += 2
            num += np.outer(row_block, vec)
        return HomogeneousSymbol(n, degree, d_common, num, jet_order, valid)

    @staticmethod
    def constant(n: int, value: complex, jet_order: int = 0) -> "HomogeneousSymbol":
        num = np.zeros((1, _basis.jet_dim(n, jet_order)), dtype=np.complex128)
        num[0, 0] = value
        return HomogeneousSymbol(n, 0, 0, num, jet_order, EXACT)

    @staticmethod
    def sigma_power(n: int, k: int, jet_order: int = 0) -> "HomogeneousSymbol":
        """|xi|^{2k} for integer k (negative k goes to the denominator)."""
        if k >= 0:
            row = np.ones((1,), dtype=np.complex128)
            deg = 0
            for _ in range(k):
                row = _basis.xi_mul_sigma(row, n, deg)
                deg += 2
            num = np.zeros((row.size, _basis.jet_dim(n, jet_order)), dtype=np.complex128)
            num[:, 0] = row
            return HomogeneousSymbol(n, 2 * k, 0, num, jet_order, EXACT)
        num = np.zeros((1, _basis.jet_dim(n, jet_order)), dtype=np.complex128)
        num[0, 0] = 1.0
        return HomogeneousSymbol(n, 2 * k, -k, num, jet_order, EXACT)

    # -- inspection -----------------------------------------------------------
    @property
    def num_degree(self) -> int:
        return self.degree + 2 * self.d

    def is_zero(self, tol: float = 0.0) -> bool:
        return bool(np.abs(self.num).max() <= tol) if self.num.size else True

    def terms(self):
        """Yield (coefficient ScalarJet, beta, d) for each nonzero row."""
        exps = _basis.homog_exponents(self.n, self.num_degree)
        for r in np.nonzero(np.abs(self.num).max(axis=1))[0]:
            yield (ScalarJet(self.n, self.jet_order, self.num[r].copy(),
                             min(self.valid_order, self.jet_order)),
                   tuple(int(e) for e in exps[r]), self.d)

    def max_abs(self) -> float:
        return float(np.abs(self.num).max()) if self.num.size else 0.0

    def constant_column(self) -> np.ndarray:
        """Coefficient values at the base point (requires valid_order >= 0)."""
        if self.valid_order < 0:
            raise JetOrderError("symbol coefficients are untrusted at the base point",
                                required=0, available=self.valid_order)
        return self.num[:, 0]

    # -- shaping --------------------------------------------------------------
    def with_jet_order(self, jet_order: int) -> "HomogeneousSymbol":
        if jet_order == self.jet_order:
            return self
        cols = _basis.jet_dim(self.n, jet_order)
        if jet_order < self.jet_order:
            num = np.ascontiguousarray(self.num[:, :cols])
            valid = min(self.valid_order, jet_order) if self.valid_order != EXACT else EXACT
        else:
            num = np.zeros((self.num.shape[0], cols), dtype=self.num.dtype)
            num[:, : self.num.shape[1]] = self.num
            valid = self.valid_order
        return HomogeneousSymbol(self.n, self.degree, self.d, num, jet_order, valid)

    def with_denominator(self, d: int) -> "HomogeneousSymbol":
        if d == self.d:
            return self
        if d < self.d:
            raise ValueError("cannot lower the denominator power")
        num = self.num
        deg = self.num_degree
        for _ in range(d - self.d):
            num = _mul_sigma_rows(num, self.n, deg)
            deg += 2
        return HomogeneousSymbol(self.n, self.degree, d, num, self.jet_order,
                                 self.valid_order)

    # -- algebra ----------------------------------------------------------------
    def __add__(self, other: "HomogeneousSymbol") -> "HomogeneousSymbol":
        if self.n != other.n:
            raise DimensionMismatchError("symbol dimensions differ")
        if self.degree != other.degree:
            raise ValueError("cannot add symbols of different homogeneity degrees")
        if other.is_zero() and other.valid_order == EXACT:
            return self
        if self.is_zero() and self.valid_order == EXACT:
            return other
        d = max(self.d, other.d)
        jo = min(self.jet_order, other.jet_order)
        a = self.with_jet_order(jo).with_denominator(d)
        b = other.with_jet_order(jo).with_denominator(d)
        return HomogeneousSymbol(self.n, self.degree, d, a.num + b.num, jo,
                                 min(self.valid_order, other.valid_order))

    def __sub__(self, other: "HomogeneousSymbol") -> "HomogeneousSymbol":
        return self + other.scale(-1.0)

    def scale(self, c: complex) -> "HomogeneousSymbol":
        return HomogeneousSymbol(self.n, self.degree, self.d, self.num * c,
                                 self.jet_order, self.valid_order)

    def mul(self, other: "HomogeneousSymbol") -> "HomogeneousSymbol":
        """Pointwise product; degrees and denominator powers add."""
        if self.n != other.n:
            raise DimensionMismatchError("symbol dimensions differ")
        n = self.n
        degree = self.degree + other.degree
        d = self.d + other.d
        if self.is_zero() or other.is_zero():
            jo = min(self.jet_order, other.jet_order)
            z = HomogeneousSymbol.zero(n, degree, jo)
            v = EXACT if (self.valid_order == EXACT or other.valid_order == EXACT) \
                else min(self.valid_order, other.valid_order)
            return HomogeneousSymbol(n, degree, z.d, z.num, jo, v)
        jo = min(self.jet_order, other.jet_order)
        a = self.with_jet_order(jo)
        b = other.with_jet_order(jo)
        if b.num.shape[0] > a.num.shape[0]:
            a, b = b, a
        rows_out = _basis.homog_dim(n, degree + 2 * d)
        out = np.zeros((rows_out, a.num.shape[1]), dtype=np.complex128)
        b_exps = _basis.homog_exponents(n, b.num_degree)
        b_live = np.nonzero(np.abs(b.num).max(axis=1))[0]
        scalar_jets = jo == 0
        for r in b_live:
            gamma = tuple(int(e) for e in b_exps[r])
            idx = _basis.xi_shift_index(n, a.num_degree, gamma)
            if scalar_jets:
                out[idx, 0] += a.num[:, 0] * b.num[r, 0]
            else:
                out[idx, :] += _basis.jet_conv_many(a.num, b.num[r], n, jo)
        valid = min(self.valid_order, other.valid_order)
        return HomogeneousSymbol(n, degree, d, out, jo, valid)

    def xi_derivative(self, i: int) -> "HomogeneousSymbol":
        """d/dxi_i; closed in the representation, degree drops by one."""
        n, dd = self.n, self.d
        deg_num = self.num_degree
        src, dst, scale = _basis.xi_diff_data(n, deg_num, i)
        d_num = np.zeros((_basis.homog_dim(n, deg_num - 1), self.num.shape[1]),
                         dtype=self.num.dtype)
        if src.size:
            d_num[dst] = self.num[src] * scale[:, None]
        if dd == 0:
            # plain polynomial: no quotient rule needed
            if self.degree - 1 + 0 < 0:
                return HomogeneousSymbol.zero(n, self.degree - 1, self.jet_order)
            return HomogeneousSymbol(n, self.degree - 1, 0, d_num,
                                     self.jet_order, self.valid_order)
        part1 = _mul_sigma_rows(d_num, n, deg_num - 1)
        idx = _basis.xi_shift_index(n, deg_num, _unit(n, i))
        part2 = np.zeros((_basis.homog_dim(n, deg_num + 1), self.num.shape[1]),
                         dtype=self.num.dtype)
        part2[idx] = self.num
        return HomogeneousSymbol(n, self.degree - 1, dd + 1,
                                 part1 - 2.0 * dd * part2,
                                 self.jet_order, self.valid_order)

    def x_derivative(self, i: int) -> "HomogeneousSymbol":
        """D_{x_i} = -i d/dx_i on the jet coefficients."""
        if self.valid_order == EXACT:
            # exactly-known symbols are x-constant (or exactly zero)
            return HomogeneousSymbol.zero(self.n, self.degree, max(self.jet_order - 1, 0))
        if self.valid_order < 1:
            raise JetOrderError("x-derivative of a symbol with exhausted jet order",
                                required=1, available=self.valid_order)
        num = -1j * _basis.jet_diff_cols(self.num, self.n, self.jet_order, i)
        return HomogeneousSymbol(self.n, self.degree, self.d, num,
                                 self.jet_order - 1, self.valid_order - 1)

    def at_base_point(self) -> "HomogeneousSymbol":
        return self.with_jet_order(0)

    def evaluate(self, xi: np.ndarray, x: np.ndarray | None = None) -> complex:
        """Numeric evaluation at one (x, xi) with xi != 0."""
        xi = np.asarray(xi, dtype=np.float64)
        exps = _basis.homog_exponents(self.n, self.num_degree)
        mono = np.prod(xi[None, :] ** exps, axis=1)
        if x is None:
            coeffs = self.num[:, 0]
        else:
            xexps = _basis.jet_exponents(self.n, self.jet_order)
            xm = np.prod(np.asarray(x)[None, :] ** xexps, axis=1)
            coeffs = self.num @ xm
        return complex((coeffs * mono).sum() * float(xi @ xi) ** (-self.d))

    def parity_ok(self) -> bool:
        """Per-term homogeneity parity: every stored xi-monomial has total
        degree = degree + 2d, hence parity (-1)^degree under xi -> -xi."""
        return (self.num_degree - self.degree) % 2 == 0


def _mul_sigma_rows(num: np.ndarray, n: int, deg: int) -> np.ndarray:
    """Multiply a (rows, cols) numerator on degree deg by |xi|^2."""
    out = np.zeros((_basis.homog_dim(n, deg + 2), num.shape[1]), dtype=num.dtype)
    for j in range(n):
        idx = _basis.xi_shift_index(n, deg, _unit(n, j, 2))
        out[idx] += num
    return out


def _unit(n: int, i: int, k: int = 1) -> tuple:
    g = [0] * n
    g[i] = k
    return tuple(g)


def sym_mul(p: HomogeneousSymbol, q: HomogeneousSymbol) -> HomogeneousSymbol:
    return p.mul(q)


def sym_xi_derivative(p: HomogeneousSymbol, i: int) -> HomogeneousSymbol:
    return p.xi_derivative(i)


def sym_x_derivative(p: HomogeneousSymbol, i: int) -> HomogeneousSymbol:
    return p.x_derivative(i)


# ---------------------------------------------------------------------------
# expansions

class SymbolExpansion:
    """Asymptotic expansion p ~ sum_j p_{m-j} down to depth J."""

    def __init__(self, n: int, order: int, parts: list):
        for j, part in enumerate(parts):
            if part.n != n:
                raise DimensionMismatchError("expansion parts over different dimensions")
            if part.degree != order - j:
                raise ValueError("part degrees must decrease by one from the order")
        self.n = n
        self.order = order
        self.parts = list(parts)

    @property
    def depth(self) -> int:
        return len(self.parts) - 1

    def part(self, degree: int) -> HomogeneousSymbol:
        j = self.order - degree
        if not 0 <= j < len(self.parts):
            raise MissingPartError(
                f"expansion of order {self.order} (depth {self.depth}) has no "
                f"degree {degree} part")
        return self.parts[j]

    def extended(self, depth: int, jet_order: int = 0) -> "SymbolExpansion":
        """Pad with explicit zero parts down to the requested depth."""
        parts = list(self.parts)
        while len(parts) - 1 < depth:
            parts.append(HomogeneousSymbol.zero(self.n, self.order - len(parts), jet_order))
        return SymbolExpansion(self.n, self.order, parts)

    def scale(self, c: complex) -> "SymbolExpansion":
        return SymbolExpansion(self.n, self.order, [p.scale(c) for p in self.parts])

    def __add__(self, other: "SymbolExpansion") -> "SymbolExpansion":
        if self.order != other.order:
            raise ValueError("cannot add expansions of different orders")
        depth = min(self.depth, other.depth)
        return SymbolExpansion(self.n, self.order, [
            self.parts[j] + other.parts[j] for j in range(depth + 1)])

    def __sub__(self, other: "SymbolExpansion") -> "SymbolExpansion":
        return self + other.scale(-1.0)

    def at_base_point(self) -> "SymbolExpansion":
        return SymbolExpansion(self.n, self.order,
                               [p.at_base_point() for p in self.parts])

    def min_valid_order(self) -> int:
        return min(p.valid_order for p in self.parts)

    def max_abs(self) -> float:
        return max(p.max_abs() for p in self.parts)


def compose(p: SymbolExpansion, q: SymbolExpansion, depth: int) -> SymbolExpansion:
    """Left-symbol composition r ~ sum (1/alpha!) d_xi^alpha p D_x^alpha q,
    graded so that r_{m+m'-j} collects |alpha| + k + l = j."""
    if p.n != q.n:
        raise DimensionMismatchError("expansion dimensions differ")
    if p.depth < depth or q.depth < depth:
        raise MissingPartError(
            f"composition at depth {depth} needs both expansions at that depth "
            f"(have {p.depth} and {q.depth})")
    n = p.n
    dxi_cache: dict = {}
    dxq_cache: dict = {}

    def dxi_p(k: int, alpha: tuple) -> HomogeneousSymbol:
        key = (k, alpha)
        if key not in dxi_cache:
            if sum(alpha) == 0:
                dxi_cache[key] = p.parts[k]
            else:
                i = next(idx for idx, a in enumerate(alpha) if a > 0)
                prev = list(alpha)
                prev[i] -= 1
                dxi_cache[key] = dxi_p(k, tuple(prev)).xi_derivative(i)
        return dxi_cache[key]

    def dx_q(l: int, alpha: tuple) -> HomogeneousSymbol:
        key = (l, alpha)
        if key not in dxq_cache:
            if sum(alpha) == 0:
                dxq_cache[key] = q.parts[l]
            else:
                i = next(idx for idx, a in enumerate(alpha) if a > 0)
                prev = list(alpha)
                prev[i] -= 1
                dxq_cache[key] = dx_q(l, tuple(prev)).x_derivative(i)
        return dxq_cache[key]

    parts = []
    for j in range(depth + 1):
        acc = HomogeneousSymbol.zero(n, p.order + q.order - j)
        for k in range(j + 1):
            if p.parts[k].is_zero():
                continue
            for l in range(j - k + 1):
                if q.parts[l].is_zero():
                    continue
                a = j - k - l
                for alpha_row in _basis.homog_exponents(n, a):
                    alpha = tuple(int(x) for x in alpha_row)
                    term = dxi_p(k, alpha).mul(dx_q(l, alpha))
                    if sum(alpha) > 0:
                        term = term.scale(1.0 / _alpha_factorial(alpha))
                    acc = acc + term
        parts.append(acc)
    return SymbolExpansion(n, p.order + q.order, parts)


def invert_principal(p_m: HomogeneousSymbol) -> HomogeneousSymbol:
    """Multiplicative inverse of a Laplace-type principal symbol.

    Requires p_m(0, xi) = |xi|^{2k} exactly (metric normalized upstream); the
    inverse is the finite geometric series in the correction e = p_m - |xi|^{2k},
    whose coefficient jets vanish at the base point and are therefore nilpotent
    at any finite jet order.
    """
    if p_m.degree < 0 or p_m.degree % 2 != 0:
        raise NotLaplaceTypeError(
            f"principal degree {p_m.degree} is not an even nonnegative integer")
    k = p_m.degree // 2
    n = p_m.n
    sigma_k = HomogeneousSymbol.sigma_power(n, k, p_m.jet_order)
    e = p_m - sigma_k
    const = np.abs(e.constant_column()).max() if e.num.size else 0.0
    if const > 1e-12:
        raise NotLaplaceTypeError(
            "principal symbol at the base point is not |xi|^{2k} "
            f"(deviation {const:.2e}); normalize the metric first")
    inv0 = HomogeneousSymbol.sigma_power(n, -k, p_m.jet_order)
    acc = inv0
    term = inv0
    for _ in range(p_m.jet_order):
        term = term.mul(e).mul(inv0).scale(-1.0)
        acc = acc + term
    return acc


def mult_operator_symbol(f: ScalarJet) -> SymbolExpansion:
    """The order-0 symbol of multiplication by f(x)."""
    part = HomogeneousSymbol.from_terms(f.n, 0, [(f, (0,) * f.n, 0)], f.order)
    return SymbolExpansion(f.n, 0, [part])


def apply_to_jet(p: SymbolExpansion, u: ScalarJet) -> ScalarJet:
    """Apply a differential-operator expansion (all parts polynomial in xi)
    to a jet: p(x, D) u = sum c_beta(x) D^beta u with D = -i d/dx."""
    acc = ScalarJet(u.n, u.order,
                    np.zeros(_basis.jet_dim(u.n, u.order), dtype=np.complex128),
                    u.valid_order)
    deriv_cache = {(0,) * u.n: u}
    for part in p.parts:
        for coeff, beta, d in part.terms():
            if d != 0:
                raise ValueError("only polynomial (differential) symbols can be applied")
            du = _iterated_diff(u, beta, deriv_cache)
            acc = acc + coeff * du * (-1j) ** sum(beta)
    return acc


def _iterated_diff(u: ScalarJet, beta: tuple, cache: dict) -> ScalarJet:
    if beta in cache:
        return cache[beta]
    i = next(idx for idx, b in enumerate(beta) if b > 0)
    prev = list(beta)
    prev[i] -= 1
    out = _iterated_diff(u, tuple(prev), cache).diff(i)
    cache[beta] = out
    return out
