"""Monomial bases and index tables for truncated polynomial arithmetic.

Everything downstream (jets, symbols, tensors) stores coefficients as flat
numpy vectors over a graded monomial basis.  This module owns the bases and
the precomputed index maps that make multiplication, differentiation and
variable shifts pure numpy operations.  All tables are cached per (n, order).

Two bases are used:

* the *jet basis*: all exponents alpha with |alpha| <= order, graded by total
  degree (degree-major, so truncation to a lower order is a prefix slice);
* the *homogeneous basis*: exponents of one fixed total degree, used for the
  xi-numerators of homogeneous symbols.

Exponents are packed into int64 codes (6 bits per variable) so that monomial
products become integer additions and lookups become searchsorted calls.
"""

from __future__ import annotations

from functools import lru_cache
from math import comb, lgamma, pi

import numpy as np
from scipy import sparse

_BITS = 6  # per-variable exponent field; exponents must stay < 64
_MAXEXP = (1 << _BITS) - 1


def jet_dim(n: int, order: int) -> int:
    """Number of monomials of total degree <= order in n variables."""
    return comb(order + n, n)


def homog_dim(n: int, deg: int) -> int:
    """Number of monomials of total degree == deg in n variables."""
    return comb(deg + n - 1, n - 1) if deg >= 0 else 0


def _pack(exps: np.ndarray) -> np.ndarray:
    """Pack exponent rows into additive int64 codes."""
    if exps.size and exps.max() > _MAXEXP:
        raise OverflowError("monomial exponent exceeds packing capacity")
    n = exps.shape[1]
    shifts = (_BITS * np.arange(n)).astype(np.int64)
    return (exps.astype(np.int64) << shifts).sum(axis=1)


@lru_cache(maxsize=None)
def homog_exponents(n: int, deg: int) -> np.ndarray:
    """All exponent rows of total degree deg, sorted by packed code."""
    if deg < 0:
        return np.zeros((0, n), dtype=np.int64)
    if deg == 0:
        return np.zeros((1, n), dtype=np.int64)
    if n == 1:
        return np.full((1, 1), deg, dtype=np.int64)
    blocks = []
    for first in range(deg + 1):
        rest = homog_exponents(n - 1, deg - first)
        blk = np.empty((rest.shape[0], n), dtype=np.int64)
        blk[:, 0] = first
        blk[:, 1:] = rest
        blocks.append(blk)
    exps = np.concatenate(blocks, axis=0)
    return exps[np.argsort(_pack(exps), kind="stable")]


@lru_cache(maxsize=None)
def homog_codes(n: int, deg: int) -> np.ndarray:
    return _pack(homog_exponents(n, deg))


@lru_cache(maxsize=None)
def jet_exponents(n: int, order: int) -> np.ndarray:
    """Exponent rows with |alpha| <= order, graded degree-major."""
    return np.concatenate([homog_exponents(n, d) for d in range(order + 1)], axis=0)


@lru_cache(maxsize=None)
def jet_offsets(n: int, order: int) -> np.ndarray:
    """Start index of each degree block inside jet_exponents(n, order)."""
    sizes = [homog_dim(n, d) for d in range(order + 1)]
    return np.concatenate([[0], np.cumsum(sizes)]).astype(np.int64)


def jet_index_of(n: int, order: int, alpha) -> int:
    """Index of a single exponent tuple in the jet basis."""
    alpha = np.asarray(alpha, dtype=np.int64)
    d = int(alpha.sum())
    if d > order:
        raise IndexError(f"degree {d} exceeds jet order {order}")
    codes = homog_codes(n, d)
    pos = int(np.searchsorted(codes, _pack(alpha[None, :])[0]))
    return int(jet_offsets(n, order)[d]) + pos


@lru_cache(maxsize=None)
def jet_mul_table(n: int, order: int):
    """(ia, ib, ic) index triples with c[ic] += a[ia] * b[ib] defining the
    truncated product on the jet basis."""
    off = jet_offsets(n, order)
    ia, ib, ic = [], [], []
    for d1 in range(order + 1):
        c1 = homog_codes(n, d1)
        for d2 in range(order + 1 - d1):
            c2 = homog_codes(n, d2)
            cr = homog_codes(n, d1 + d2)
            s = c1[:, None] + c2[None, :]
            pos = np.searchsorted(cr, s.ravel())
            i1 = np.repeat(np.arange(c1.size), c2.size) + off[d1]
            i2 = np.tile(np.arange(c2.size), c1.size) + off[d2]
            ia.append(i1)
            ib.append(i2)
            ic.append(pos + off[d1 + d2])
    return (
        np.concatenate(ia).astype(np.int64),
        np.concatenate(ib).astype(np.int64),
        np.concatenate(ic).astype(np.int64),
    )


def jet_conv(a: np.ndarray, b: np.ndarray, n: int, order: int) -> np.ndarray:
    """Truncated product of two coefficient vectors on the jet basis."""
    ia, ib, ic = jet_mul_table(n, order)
    m = jet_dim(n, order)
    w = a[ia] * b[ib]
    if np.iscomplexobj(w):
        return (
            np.bincount(ic, weights=w.real, minlength=m)
            + 1j * np.bincount(ic, weights=w.imag, minlength=m)
        )
    return np.bincount(ic, weights=w, minlength=m)


def jet_mul_operator(b: np.ndarray, n: int, order: int) -> sparse.csr_matrix:
    """Sparse matrix of 'multiply by b' acting on jet coefficient vectors,
    so that conv(a, b) == a @ jet_mul_operator(b)."""
    ia, ib, ic = jet_mul_table(n, order)
    m = jet_dim(n, order)
    return sparse.csr_matrix((b[ib], (ia, ic)), shape=(m, m))


def jet_conv_many(rows: np.ndarray, b: np.ndarray, n: int, order: int) -> np.ndarray:
    """Row-wise truncated product of a coefficient matrix with one vector."""
    return rows @ jet_mul_operator(b, n, order)


@lru_cache(maxsize=None)
def jet_diff_data(n: int, order: int, i: int):
    """(src, dst, scale): d/dx_i on Taylor coefficients c_alpha = d^alpha f / alpha!
    is out[dst] = scale * f[src] with src = alpha + e_i, scale = alpha_i + 1.
    The output lives on the jet basis of (order - 1)."""
    exps = jet_exponents(n, order)
    src = np.nonzero(exps[:, i] > 0)[0]
    shifted = exps[src].copy()
    shifted[:, i] -= 1
    dst = np.empty(src.size, dtype=np.int64)
    off_lo = jet_offsets(n, order - 1) if order >= 1 else np.array([0])
    degs = shifted.sum(axis=1)
    for d in np.unique(degs):
        sel = degs == d
        dst[sel] = off_lo[d] + np.searchsorted(homog_codes(n, int(d)), _pack(shifted[sel]))
    scale = (exps[src, i]).astype(np.float64)
    return src, dst, scale


def jet_diff(c: np.ndarray, n: int, order: int, i: int) -> np.ndarray:
    """Differentiate a jet coefficient vector; result has order-1."""
    src, dst, scale = jet_diff_data(n, order, i)
    out = np.zeros(jet_dim(n, order - 1), dtype=c.dtype)
    out[dst] = scale * c[src]
    return out


def jet_diff_cols(rows: np.ndarray, n: int, order: int, i: int) -> np.ndarray:
    """Differentiate every row of a coefficient matrix at once."""
    src, dst, scale = jet_diff_data(n, order, i)
    out = np.zeros((rows.shape[0], jet_dim(n, order - 1)), dtype=rows.dtype)
    out[:, dst] = rows[:, src] * scale
    return out


# ---------------------------------------------------------------------------
# homogeneous xi-basis maps

@lru_cache(maxsize=None)
def xi_shift_index(n: int, deg: int, gamma: tuple) -> np.ndarray:
    """Index map of 'multiply by xi^gamma': position of (beta + gamma) in the
    degree (deg + |gamma|) basis, for each beta of degree deg."""
    g = np.asarray(gamma, dtype=np.int64)
    hi = homog_codes(n, deg + int(g.sum()))
    return np.searchsorted(hi, homog_codes(n, deg) + _pack(g[None, :])[0])


@lru_cache(maxsize=None)
def xi_diff_data(n: int, deg: int, i: int):
    """(src, dst, scale) for d/dxi_i on a homogeneous numerator of degree deg."""
    exps = homog_exponents(n, deg)
    src = np.nonzero(exps[:, i] > 0)[0]
    if src.size == 0:
        return src, src.copy(), np.zeros(0)
    shifted = exps[src].copy()
    shifted[:, i] -= 1
    dst = np.searchsorted(homog_codes(n, deg - 1), _pack(shifted))
    return src, dst, exps[src, i].astype(np.float64)


@lru_cache(maxsize=None)
def _unit_gamma(n: int, i: int, k: int) -> tuple:
    g = [0] * n
    g[i] = k
    return tuple(g)


def xi_mul_sigma(rows: np.ndarray, n: int, deg: int) -> np.ndarray:
    """Multiply homogeneous numerator rows by |xi|^2 = sum_j xi_j^2."""
    out = np.zeros(rows.shape[:-1] + (homog_dim(n, deg + 2),), dtype=rows.dtype)
    for j in range(n):
        idx = xi_shift_index(n, deg, _unit_gamma(n, j, 2))
        out[..., idx] += rows
    return out


@lru_cache(maxsize=None)
def sphere_integrals(n: int, deg: int) -> np.ndarray:
    """Integral of xi^beta over the unit sphere S^{n-1}, for each beta of the
    given degree: zero when any exponent is odd, else
    2 prod Gamma((beta_i+1)/2) / Gamma((|beta|+n)/2)."""
    exps = homog_exponents(n, deg)
    even = (exps % 2 == 0).all(axis=1)
    out = np.zeros(exps.shape[0])
    if even.any():
        e = exps[even]
        logs = np.vectorize(lgamma)((e + 1) / 2.0).sum(axis=1)
        out[even] = 2.0 * np.exp(logs - lgamma((deg + n) / 2.0))
    return out


def sphere_monomial_integral(beta, n: int) -> float:
    """Exact integral of xi^beta over S^{n-1} (Gamma-function formula)."""
    if n < 2:
        raise ValueError("sphere integration needs n >= 2")
    beta = tuple(int(b) for b in beta)
    if len(beta) != n:
        raise ValueError(f"exponent length {len(beta)} does not match n={n}")
    if any(b < 0 for b in beta):
        raise ValueError("negative exponent")
    if any(b % 2 == 1 for b in beta):
        return 0.0
    num = sum(lgamma((b + 1) / 2.0) for b in beta)
    return 2.0 * float(np.exp(num - lgamma((sum(beta) + n) / 2.0)))


def surface_area(n: int) -> float:
    """|S^{n-1}|."""
    return 2.0 * pi ** (n / 2.0) / float(np.exp(lgamma(n / 2.0)))


# ---------------------------------------------------------------------------
# linear change of coordinates on jets

@lru_cache(maxsize=64)
def _pullback_block(key: tuple, n: int, deg: int) -> np.ndarray:
    """Matrix S of the substitution x -> Ax on the degree-deg coefficient
    block: coeffs(f(Ax)) = S @ coeffs(f).  Column alpha holds the expansion of
    (Ax)^alpha, built recursively as (Ax)^{alpha - e_i} * (Ax)_i."""
    if deg == 0:
        return np.ones((1, 1))
    A = np.array(key, dtype=np.float64).reshape(n, n)
    lo = _pullback_block(key, n, deg - 1)
    r_lo = homog_dim(n, deg - 1)
    r_hi = homog_dim(n, deg)
    exps = homog_exponents(n, deg)
    first = np.argmax(exps > 0, axis=1)
    out = np.zeros((r_hi, r_hi))
    for i in range(n):
        cols = np.nonzero(first == i)[0]
        if cols.size == 0:
            continue
        shifted = exps[cols].copy()
        shifted[:, i] -= 1
        col_lo = np.searchsorted(homog_codes(n, deg - 1), _pack(shifted))
        mul_i = np.zeros((r_hi, r_lo))  # multiply-by-(Ax)_i, degree deg-1 -> deg
        for j in range(n):
            if A[i, j] != 0.0:
                idx = xi_shift_index(n, deg - 1, _unit_gamma(n, j, 1))
                mul_i[idx, np.arange(r_lo)] += A[i, j]
        out[:, cols] = mul_i @ lo[:, col_lo]
    return out


def linear_pullback(c: np.ndarray, A: np.ndarray, n: int, order: int) -> np.ndarray:
    """Coefficients of f(Ax) given coefficients of f, per degree block."""
    off = jet_offsets(n, order)
    out = np.empty_like(c)
    key = tuple(np.asarray(A, dtype=np.float64).ravel().tolist())
    for d in range(order + 1):
        blk = _pullback_block(key, n, d)
        out[off[d]:off[d + 1]] = blk @ c[off[d]:off[d + 1]]
    return out
