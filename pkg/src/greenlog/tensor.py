"""Tensor calculus over metric jets: connection, curvature, and the named
curvature invariants used to cross-validate the symbol pipeline.

Conventions (fixed here once, used everywhere):

* Curvature sign: R(X,Y)Z = nabla_X nabla_Y Z - nabla_Y nabla_X Z - nabla_[X,Y] Z
  and R_ijkl = <R(d_i, d_j) d_k, d_l>.  With this pairing the (1,4) trace
  rho_jk = g^{il} R_ijkl is the Ricci tensor and the round unit sphere has
  scalar curvature kappa = +n(n-1).
* Laplacian on scalars is geometric-positive: Delta f = -g^{ij} (f_;ij).
* Schouten P_jk = (rho_jk - kappa g_jk / (2(n-1))) / (n-2); the Weyl tensor
  W_ijkl = R_ijkl - (P_jk g_il + P_il g_jk - P_jl g_ik - P_ik g_jl) is then
  trace-free in all pairs.
* Cotton C_jkl = P_jk;l - P_jl;k, and the rank-5/rank-4 companions

      V_sijkl = W_ijkl;s - g_is C_jkl + g_js C_ikl - g_ks C_lij + g_ls C_kij,
      U_sjkl  = C_jkl;s + P_s^q W_qjkl,

  feeding the weight-3 invariant Phi = |V|^2 + 16 <W,U> + 16 |C|^2 where
  <W,U> = W^{sjkl} U_sjkl and norms are full metric contractions.

TensorJet stores a dense rank-dimensional block of jets as one numpy array
(entry index first, monomial axis last); all contractions funnel through a
single sparse-matrix convolution kernel so that no Python loop runs over
individual tensor entries.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import sparse

from . import _basis
from .errors import DimensionMismatchError, JetOrderError
from .jets import MetricJet, ScalarJet

_NNZ_CHUNK = 4_000_000  # cap on sparse kernel size per matmul chunk


class TensorJet:
    """Dense multi-index array of scalar jets with per-slot variance.

    variance is a tuple of 'd' (covariant) / 'u' (contravariant) flags, one
    per slot.  Entries are stored as data[(i1,...,ir), monomial].
    """

    def __init__(self, n: int, variance: tuple, data: np.ndarray, order: int,
                 valid_order: int | None = None):
        rank = len(variance)
        if data.shape != (n,) * rank + (_basis.jet_dim(n, order),):
            raise ValueError("tensor data shape does not match (n, rank, order)")
        if any(v not in ("d", "u") for v in variance):
            raise ValueError("variance flags must be 'd' or 'u'")
        self.n = n
        self.variance = tuple(variance)
        self.rank = rank
        self.data = data
        self.order = order
        self.valid_order = order if valid_order is None else valid_order

    # -- construction / inspection ------------------------------------------
    @staticmethod
    def zero(n: int, variance: tuple, order: int) -> "TensorJet":
        return TensorJet(n, variance, np.zeros((n,) * len(variance) + (_basis.jet_dim(n, order),)), order)

    @staticmethod
    def from_metric(g: MetricJet) -> "TensorJet":
        return TensorJet(g.n, ("d", "d"), g.data, g.order, g.valid_order)

    @staticmethod
    def scalar(j: ScalarJet) -> "TensorJet":
        return TensorJet(j.n, (), j.c.reshape(-1), j.order, j.valid_order)

    def entry(self, *index) -> ScalarJet:
        return ScalarJet(self.n, self.order, self.data[index], self.valid_order)

    def as_scalar(self) -> ScalarJet:
        if self.rank != 0:
            raise ValueError("not a scalar tensor")
        return ScalarJet(self.n, self.order, self.data, self.valid_order)

    def at_point(self) -> np.ndarray:
        """Constant terms as a plain numpy array of shape (n,)*rank."""
        return self.data[..., 0].copy()

    def truncate(self, order: int) -> "TensorJet":
        if order == self.order:
            return self
        if order > self.order:
            out = np.zeros(self.data.shape[:-1] + (_basis.jet_dim(self.n, order),),
                           dtype=self.data.dtype)
            out[..., : self.data.shape[-1]] = self.data
            return TensorJet(self.n, self.variance, out, order, self.valid_order)
        m = _basis.jet_dim(self.n, order)
        return TensorJet(self.n, self.variance, np.ascontiguousarray(self.data[..., :m]),
                         order, min(self.valid_order, order))

    def transpose(self, perm) -> "TensorJet":
        perm = tuple(perm)
        data = np.ascontiguousarray(self.data.transpose(perm + (self.rank,)))
        return TensorJet(self.n, tuple(self.variance[p] for p in perm), data,
                         self.order, self.valid_order)

    def max_abs(self) -> float:
        return float(np.abs(self.data).max())

    # -- linear structure -----------------------------------------------------
    def _align(self, other: "TensorJet"):
        if self.n != other.n:
            raise DimensionMismatchError("tensor dimensions differ")
        if self.variance != other.variance:
            raise ValueError("variance mismatch in tensor addition")
        order = min(self.order, other.order)
        return self.truncate(order), other.truncate(order), order

    def __add__(self, other: "TensorJet") -> "TensorJet":
        a, b, order = self._align(other)
        return TensorJet(self.n, self.variance, a.data + b.data, order,
                         min(self.valid_order, other.valid_order))

    def __sub__(self, other: "TensorJet") -> "TensorJet":
        a, b, order = self._align(other)
        return TensorJet(self.n, self.variance, a.data - b.data, order,
                         min(self.valid_order, other.valid_order))

    def __mul__(self, scalar) -> "TensorJet":
        return TensorJet(self.n, self.variance, self.data * scalar, self.order,
                         self.valid_order)

    __rmul__ = __mul__

    def __neg__(self) -> "TensorJet":
        return self * (-1.0)

    # -- calculus -------------------------------------------------------------
    def partial(self, i: int) -> "TensorJet":
        """Coordinate derivative of every entry; consumes one trusted order."""
        if self.valid_order < 1:
            raise JetOrderError("cannot differentiate tensor jet",
                                required=1, available=self.valid_order)
        flat = self.data.reshape(-1, self.data.shape[-1])
        out = _basis.jet_diff_cols(flat, self.n, self.order, i)
        shape = self.data.shape[:-1] + (out.shape[-1],)
        return TensorJet(self.n, self.variance, out.reshape(shape),
                         self.order - 1, self.valid_order - 1)

    def gradient(self) -> "TensorJet":
        """Stack of coordinate derivatives, new covariant slot first."""
        parts = [self.partial(i).data for i in range(self.n)]
        return TensorJet(self.n, ("d",) + self.variance, np.stack(parts),
                         self.order - 1, self.valid_order - 1)

    def trace_pair(self, a: int, b: int) -> "TensorJet":
        """Contract two slots of opposite variance directly."""
        if {self.variance[a], self.variance[b]} != {"d", "u"}:
            raise ValueError("direct trace needs one covariant and one contravariant slot")
        data = np.trace(self.data, axis1=a, axis2=b)
        var = tuple(v for s, v in enumerate(self.variance) if s not in (a, b))
        return TensorJet(self.n, var, data, self.order, self.valid_order)


def tensor_dot(a: TensorJet, b: TensorJet, pairs, order: int | None = None) -> "TensorJet":
    """Jet-ring tensordot: contract a's slots against b's slots per `pairs`
    (each pair must have opposite variance).  Result slots are a's free slots
    followed by b's free slots."""
    if a.n != b.n:
        raise DimensionMismatchError("tensor dimensions differ")
    pairs = list(pairs)
    for sa, sb in pairs:
        if {a.variance[sa], b.variance[sb]} != {"d", "u"}:
            raise ValueError(f"slots {sa},{sb} are not of opposite variance")
    out_order = min(a.order, b.order) if order is None else order
    at = a.truncate(out_order)
    bt = b.truncate(out_order)
    n = a.n
    ca = [s for s, _ in pairs]
    cb = [s for _, s in pairs]
    fa = [s for s in range(a.rank) if s not in ca]
    fb = [s for s in range(b.rank) if s not in cb]
    a2 = at.transpose(fa + ca).data.reshape(n ** len(fa), n ** len(ca), -1)
    b2 = bt.transpose(cb + fb).data.reshape(n ** len(cb), n ** len(fb), -1)
    out = _jet_tensordot(a2, b2, n, out_order)
    var = tuple(a.variance[s] for s in fa) + tuple(b.variance[s] for s in fb)
    data = out.reshape((n,) * len(var) + (out.shape[-1],))
    return TensorJet(n, var, data, out_order, min(a.valid_order, b.valid_order))


def _jet_tensordot(a2: np.ndarray, b2: np.ndarray, n: int, order: int) -> np.ndarray:
    """Core kernel: out[fa, fb, :] = sum_c conv(a2[fa, c, :], b2[c, fb, :])."""
    ia, ib, ic = _basis.jet_mul_table(n, order)
    m = _basis.jet_dim(n, order)
    f_a, n_c, _ = a2.shape
    _, f_b, _ = b2.shape
    dtype = np.result_type(a2.dtype, b2.dtype)
    out = np.zeros((f_a, f_b * m), dtype=dtype)
    t = ia.size
    chunk = max(1, _NNZ_CHUNK // t)
    for c in range(n_c):
        for lo in range(0, f_b, chunk):
            hi = min(f_b, lo + chunk)
            nb = hi - lo
            rows = np.tile(ia, nb)
            cols = (np.arange(lo, hi)[:, None] * m + ic[None, :]).ravel()
            vals = b2[c, lo:hi][:, ib].ravel()
            op = sparse.csr_matrix((vals, (rows, cols)),
                                   shape=(a2.shape[-1], f_b * m))
            out += a2[:, c, :] @ op
    return out.reshape(f_a, f_b, m)


def jet_outer(a: TensorJet, b: TensorJet, order: int | None = None) -> TensorJet:
    """Tensor product with no contraction."""
    out_order = min(a.order, b.order) if order is None else order
    at, bt = a.truncate(out_order), b.truncate(out_order)
    a2 = at.data.reshape(-1, 1, at.data.shape[-1])
    b2 = bt.data.reshape(1, -1, bt.data.shape[-1])
    res = _jet_tensordot(a2, b2, a.n, out_order)
    var = a.variance + b.variance
    data = res.reshape((a.n,) * len(var) + (res.shape[-1],))
    return TensorJet(a.n, var, data, out_order, min(a.valid_order, b.valid_order))


# ---------------------------------------------------------------------------
# geometry cache

class Geometry:
    """Lazy bundle of connection data derived from one metric jet."""

    def __init__(self, g: MetricJet):
        self.g = g
        self.n = g.n
        self._ginv = None
        self._gamma = None

    @property
    def metric(self) -> TensorJet:
        return TensorJet.from_metric(self.g)

    @property
    def ginv(self) -> TensorJet:
        if self._ginv is None:
            self._ginv = TensorJet(self.n, ("u", "u"), self.g.inverse_data(),
                                   self.g.order, self.g.valid_order)
        return self._ginv

    @property
    def gamma(self) -> TensorJet:
        if self._gamma is None:
            self._gamma = christoffel(self.g, geom=self)
        return self._gamma

    def ginv0(self) -> np.ndarray:
        return np.linalg.inv(self.g.constant_term())


def christoffel(g: MetricJet, geom: Geometry | None = None) -> TensorJet:
    """Levi-Civita connection coefficients, slots (k; i, j) = Gamma^k_ij."""
    g.require_valid(1, "Christoffel symbols")
    geom = geom or Geometry(g)
    met = TensorJet.from_metric(g)
    dg = met.gradient()  # (l, i, j) = d_l g_ij
    # s[l, i, j] = d_i g_jl + d_j g_il - d_l g_ij; slot 0 is contracted with g^{kl}
    s = dg.transpose((1, 0, 2)) + dg.transpose((2, 1, 0)) - dg
    out = tensor_dot(geom.ginv, s, pairs=[(1, 0)])
    out = TensorJet(g.n, ("u", "d", "d"), 0.5 * out.data, out.order, out.valid_order)
    return out


def riemann(g: MetricJet, geom: Geometry | None = None) -> TensorJet:
    """All-covariant curvature R_ijkl = <R(d_i,d_j)d_k, d_l>."""
    g.require_valid(2, "curvature tensor")
    geom = geom or Geometry(g)
    gam = geom.gamma
    dgam = gam.gradient()  # (a, k, i, j) = d_a Gamma^k_ij
    # Riem^l_{ijk} = d_i G^l_jk - d_j G^l_ik + G^l_im G^m_jk - G^l_jm G^m_ik
    d_i = dgam.transpose((1, 0, 2, 3))  # (l, i, j, k) = d_i Gamma^l_jk
    gg = tensor_dot(gam, gam, pairs=[(2, 0)])
    # gg slots: (l, i, m)x(m, j, k) -> (l, i, j, k) = G^l_im G^m_jk
    quad = gg  # (l, i, j, k)
    riem_up = d_i - d_i.transpose((0, 2, 1, 3)) + quad - quad.transpose((0, 2, 1, 3))
    riem_up = TensorJet(g.n, ("u", "d", "d", "d"), riem_up.data,
                        riem_up.order, riem_up.valid_order)
    low = tensor_dot(TensorJet.from_metric(g), riem_up, pairs=[(1, 0)])
    # low slots: (l, i, j, k) all covariant; reorder to (i, j, k, l)
    out = low.transpose((1, 2, 3, 0))
    return TensorJet(g.n, ("d",) * 4, out.data, out.order, out.valid_order)


def ricci_scalar(g: MetricJet, geom: Geometry | None = None,
                 riem: TensorJet | None = None):
    """Ricci tensor rho_jk = g^{il} R_ijkl and scalar curvature kappa."""
    geom = geom or Geometry(g)
    riem = riem if riem is not None else riemann(g, geom)
    r_perm = riem.transpose((0, 3, 1, 2))  # (i, l, j, k)
    rho = tensor_dot(geom.ginv, r_perm, pairs=[(0, 0), (1, 1)])
    kappa = tensor_dot(geom.ginv, rho, pairs=[(0, 0), (1, 1)]).as_scalar()
    return rho, kappa


def covariant_derivative(t: TensorJet, g: MetricJet,
                         geom: Geometry | None = None) -> TensorJet:
    """Levi-Civita covariant derivative; the new covariant slot comes first:
    out[s, I] = (nabla_s T)_I."""
    if t.valid_order < 1:
        raise JetOrderError("covariant derivative needs one more trusted order",
                            required=1, available=t.valid_order)
    geom = geom or Geometry(g)
    gam = geom.gamma.truncate(t.order - 1)
    out = t.gradient()
    for slot, var in enumerate(t.variance):
        if var == "d":
            # -Gamma^m_{s a} T[... m ...] placed at slot `slot`
            corr = tensor_dot(gam.transpose((1, 2, 0)), t, pairs=[(2, slot)])
            # corr slots: (s, a, rest...) with `a` destined for position slot+1
            perm = [0] + [i + 2 for i in range(slot)] + [1] + [i + 2 for i in range(slot, t.rank - 1)]
            out = out - corr.transpose(perm)
        else:
            # +Gamma^{a}_{s m} T[... m ...]
            corr = tensor_dot(gam.transpose((1, 0, 2)), t, pairs=[(2, slot)])
            # corr slots: (s, a_up, rest...)
            perm = [0] + [i + 2 for i in range(slot)] + [1] + [i + 2 for i in range(slot, t.rank - 1)]
            out = out + corr.transpose(perm)
    return out


def contract_full(t: TensorJet, pairing, g: MetricJet,
                  geom: Geometry | None = None) -> ScalarJet:
    """Complete contraction of a tensor along the given slot pairs, raising or
    lowering with the metric where both slots share a variance.  The result is
    independent of the order in which the pairs are listed."""
    pairs = [tuple(p) for p in pairing]
    seen = [s for p in pairs for s in p]
    if sorted(seen) != list(range(t.rank)):
        raise ValueError("pairing must cover every slot exactly once")
    geom = geom or Geometry(g)
    cur = t
    labels = list(range(t.rank))
    for sa, sb in pairs:
        a = labels.index(sa)
        b = labels.index(sb)
        if cur.variance[a] == cur.variance[b]:
            raiser = geom.ginv if cur.variance[a] == "d" else TensorJet.from_metric(g)
            cur = tensor_dot(raiser, cur, pairs=[(1, a)])
            # the raised slot is now first; move it back to position a
            cur = cur.transpose(tuple([*range(1, a + 1), 0, *range(a + 1, cur.rank)]))
        cur = cur.trace_pair(a, b)
        labels.pop(max(a, b))
        labels.pop(min(a, b))
    return cur.as_scalar()


# ---------------------------------------------------------------------------
# named invariants

@dataclass(frozen=True)
class InvariantValue:
    name: str
    weight: int
    value: float


#: registry of scalar invariants and their scaling weights w: I(t*g) = t^-w I(g)
INVARIANT_WEIGHTS = {
    "kappa": 1,
    "riem_sq": 2,
    "ricci_sq": 2,
    "kappa_sq": 2,
    "lap_kappa": 2,
    "weyl_sq": 2,
    "weyl_cube_a": 3,
    "weyl_cube_b": 3,
    "fg_phi": 3,
}


def _registered(name: str, value: float) -> InvariantValue:
    return InvariantValue(name, INVARIANT_WEIGHTS[name], float(value))


def laplacian_scalar(f: ScalarJet, g: MetricJet, geom: Geometry | None = None) -> ScalarJet:
    """Geometric-positive Laplacian -g^{ij} (f_;ij) of a scalar jet."""
    geom = geom or Geometry(g)
    grad = TensorJet(f.n, ("d",), np.stack([f.diff(i).c for i in range(f.n)]),
                     f.order - 1, f.valid_order - 1)
    hess = covariant_derivative(grad, g, geom)
    out = tensor_dot(geom.ginv, hess, pairs=[(0, 0), (1, 1)])
    scalar = out.as_scalar()
    return ScalarJet(scalar.n, scalar.order, -scalar.c, scalar.valid_order)


def weight2_invariants(g: MetricJet, geom: Geometry | None = None) -> list:
    """The four weight-2 invariants |R|^2, |rho|^2, kappa^2, Delta kappa at 0."""
    g.require_valid(4, "weight-2 invariants (Delta kappa)")
    geom = geom or Geometry(g)
    riem = riemann(g, geom)
    rho, kappa = ricci_scalar(g, geom, riem)
    gi0 = geom.ginv0()
    r0 = riem.at_point()
    rho0 = rho.at_point()
    riem_sq = np.einsum("ijkl,abcd,ia,jb,kc,ld->", r0, r0, gi0, gi0, gi0, gi0)
    ricci_sq = np.einsum("ij,ab,ia,jb->", rho0, rho0, gi0, gi0)
    k0 = float(kappa.value)
    lap_k = laplacian_scalar(kappa, g, geom)
    return [
        _registered("riem_sq", riem_sq),
        _registered("ricci_sq", ricci_sq),
        _registered("kappa_sq", k0 * k0),
        _registered("lap_kappa", float(lap_k.value)),
    ]


def schouten(g: MetricJet, geom: Geometry | None = None,
             riem: TensorJet | None = None) -> TensorJet:
    if g.n < 3:
        raise ValueError("Schouten tensor needs n >= 3")
    geom = geom or Geometry(g)
    riem = riem if riem is not None else riemann(g, geom)
    rho, kappa = ricci_scalar(g, geom, riem)
    n = g.n
    met = TensorJet.from_metric(g).truncate(rho.order)
    kg = tensor_dot(TensorJet.scalar(kappa), met, pairs=[])
    out = (1.0 / (n - 2)) * (rho - (1.0 / (2 * (n - 1))) * kg)
    return TensorJet(n, ("d", "d"), out.data, out.order, out.valid_order)


def weyl_schouten(g: MetricJet, geom: Geometry | None = None):
    """Weyl tensor and Schouten tensor (W, P)."""
    if g.n < 3:
        raise ValueError("Weyl decomposition needs n >= 3")
    g.require_valid(2, "Weyl/Schouten tensors")
    geom = geom or Geometry(g)
    riem = riemann(g, geom)
    p = schouten(g, geom, riem)
    met = TensorJet.from_metric(g).truncate(p.order)
    pg = jet_outer(p, met)  # (j, k, i, l) = P_jk g_il
    term = (pg.transpose((2, 0, 1, 3))        # P_jk g_il -> slots (i,j,k,l)
            + pg.transpose((0, 3, 2, 1))      # P_il g_jk
            - pg.transpose((2, 0, 3, 1))      # P_jl g_ik
            - pg.transpose((0, 2, 1, 3)))     # P_ik g_jl
    w = riem.truncate(term.order) - term
    return w, p


def cotton_v_u_phi(g: MetricJet, geom: Geometry | None = None):
    """Cotton tensor C, companions V and U, and the invariant Phi at 0."""
    if g.n < 4:
        raise ValueError("this invariant set needs n >= 4")
    g.require_valid(4, "Cotton/V/U tensors")
    geom = geom or Geometry(g)
    w, p = weyl_schouten(g, geom)
    dp = covariant_derivative(p, g, geom)        # (s, j, k) = P_jk;s
    # C_jkl = P_jk;l - P_jl;k
    c = dp.transpose((1, 2, 0)) - dp.transpose((1, 0, 2))
    dw = covariant_derivative(w, g, geom)        # (s, i, j, k, l) = W_ijkl;s
    met = TensorJet.from_metric(g).truncate(c.order)
    # V_sijkl = W_ijkl;s - g_is C_jkl + g_js C_ikl - g_ks C_lij + g_ls C_kij
    v = dw - _place_gc(met, c, pos=1, args=(2, 3, 4)) \
           + _place_gc(met, c, pos=2, args=(1, 3, 4)) \
           - _place_gc(met, c, pos=3, args=(4, 1, 2)) \
           + _place_gc(met, c, pos=4, args=(3, 1, 2))
    dc = covariant_derivative(c, g, geom)        # (s, j, k, l) = C_jkl;s
    pw = tensor_dot(tensor_dot(geom.ginv, p, pairs=[(1, 1)]), w, pairs=[(0, 0)])
    # pw slots: (q_up, s)x contraction -> (s, j, k, l) = P_s^q W_qjkl
    u = dc + pw
    gi0 = geom.ginv0()
    c0, v0, u0, w0 = c.at_point(), v.at_point(), u.at_point(), w.at_point()
    v_sq = np.einsum("sijkl,abcde,sa,ib,jc,kd,le->", v0, v0, gi0, gi0, gi0, gi0, gi0)
    c_sq = np.einsum("jkl,abc,ja,kb,lc->", c0, c0, gi0, gi0, gi0)
    wu = np.einsum("sjkl,abcd,sa,jb,kc,ld->", u0, w0, gi0, gi0, gi0, gi0)
    phi = _registered("fg_phi", v_sq + 16.0 * wu + 16.0 * c_sq)
    return c, v, u, phi


def _place_gc(met: TensorJet, c: TensorJet, pos: int, args: tuple) -> TensorJet:
    """Rank-5 tensor T_{s i1 i2 i3 i4} = g_{x s} C_{abc} where x is the slot at
    position `pos` (1-based among the four non-s slots) and (a, b, c) are the
    slots listed in `args` (positions among 1..4)."""
    gc = jet_outer(met, c)  # slots (x, s, a, b, c)
    perm = [1]  # s first
    slot_of = {pos: 0, args[0]: 2, args[1]: 3, args[2]: 4}
    for target in range(1, 5):
        perm.append(slot_of[target])
    out = gc.transpose(tuple(perm))
    return TensorJet(met.n, ("d",) * 5, out.data, out.order, out.valid_order)


def weight3_weyl_invariants(g: MetricJet, geom: Geometry | None = None) -> list:
    """The two cubic Weyl contractions at the base point."""
    if g.n < 4:
        raise ValueError("cubic Weyl invariants need n >= 4")
    geom = geom or Geometry(g)
    w, _ = weyl_schouten(g, geom)
    w0 = w.at_point()
    gi = geom.ginv0()
    wud = np.einsum("ijab,ak,bl->ijkl", w0, gi, gi)
    inv_a = np.einsum("ijkl,lkpq,pqij->", wud, wud, wud)
    t1 = np.einsum("iabl,aj,bk->ijkl", w0, gi, gi)
    t2 = np.einsum("cpkd,ci,dq->ipkq", w0, gi, gi)
    t3 = np.einsum("jefq,ep,fl->jplq", w0, gi, gi)
    inv_b = np.einsum("ijkl,ipkq,jplq->", t1, t2, t3)
    return [_registered("weyl_cube_a", inv_a), _registered("weyl_cube_b", inv_b)]


def kappa_invariant(g: MetricJet, geom: Geometry | None = None) -> InvariantValue:
    geom = geom or Geometry(g)
    _, kappa = ricci_scalar(g, geom)
    return _registered("kappa", float(kappa.value))


def weyl_sq_invariant(g: MetricJet, geom: Geometry | None = None) -> InvariantValue:
    geom = geom or Geometry(g)
    w, _ = weyl_schouten(g, geom)
    w0 = w.at_point()
    gi = geom.ginv0()
    val = np.einsum("ijkl,abcd,ia,jb,kc,ld->", w0, w0, gi, gi, gi, gi)
    return _registered("weyl_sq", val)
