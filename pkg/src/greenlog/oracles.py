"""Independent brute-force references for the main pipeline stages.

Every nontrivial computation has a slower twin here: Monte-Carlo sphere
integration against the exact Gamma formula, finite-difference metric jets
against Taylor-mode jets, plain-loop tensor contractions against the vectorized
engine, and a Newton iteration against the series inverse.  Model metrics
(flat, round-sphere patch, conformally flat, seeded random polynomial) come
with closed-form evaluators where the finite-difference oracles need them.
"""

from __future__ import annotations

from math import factorial

import numpy as np

from . import _basis
from .jets import MetricJet, ScalarJet, jet_compose_analytic
from .symbols import HomogeneousSymbol
from .tensor import TensorJet


def mc_sphere_integral(part: HomogeneousSymbol, n: int, samples: int,
                       seed: int, chunk: int = 2048) -> tuple:
    """Monte-Carlo estimate of the base-point cosphere integral of a symbol.

    Uniform sphere sampling with a counter-based Philox generator, so results
    are reproducible for a given seed regardless of chunking.
    """
    if samples < 10_000:
        raise ValueError("use at least 1e4 samples for a meaningful band")
    rng = np.random.Generator(np.random.Philox(seed))
    coeffs = part.constant_column()
    exps = _basis.homog_exponents(n, part.num_degree)
    live = np.nonzero(np.abs(coeffs) > 0)[0]
    coeffs = coeffs[live]
    exps = exps[live]
    total = 0.0
    total_sq = 0.0
    done = 0
    while done < samples:
        m = min(chunk, samples - done)
        pts = rng.standard_normal((m, n))
        pts /= np.linalg.norm(pts, axis=1, keepdims=True)
        mono = np.prod(pts[:, None, :] ** exps[None, :, :], axis=2)
        vals = (mono @ coeffs).real
        total += vals.sum()
        total_sq += (vals ** 2).sum()
        done += m
    area = _basis.surface_area(n)
    mean = total / samples
    var = max(total_sq / samples - mean ** 2, 0.0)
    return area * mean, area * np.sqrt(var / samples)


def _stencil_1d(k: int) -> dict:
    """Offsets/weights of the k-fold iterated central difference (unit step)."""
    w = {0: 1.0}
    for _ in range(k):
        nxt: dict = {}
        for off, c in w.items():
            nxt[off + 1] = nxt.get(off + 1, 0.0) + 0.5 * c
            nxt[off - 1] = nxt.get(off - 1, 0.0) - 0.5 * c
        w = nxt
    return w


def fd_metric_jet(gfun, x0, order: int, h: float = 1e-3) -> MetricJet:
    """Central finite-difference Taylor jet of a closed-form metric evaluator."""
    if order > 4:
        raise ValueError("finite differences above order 4 drown in roundoff")
    x0 = np.asarray(x0, dtype=np.float64)
    n = x0.size
    cache: dict = {}

    def geval(offset) -> np.ndarray:
        if offset not in cache:
            cache[offset] = np.asarray(gfun(x0 + h * np.asarray(offset)), dtype=np.float64)
        return cache[offset]

    m = _basis.jet_dim(n, order)
    data = np.zeros((n, n, m))
    exps = _basis.jet_exponents(n, order)
    for idx in range(m):
        alpha = exps[idx]
        stencils = [_stencil_1d(int(a)) for a in alpha]
        acc = np.zeros((n, n))
        def rec(axis, offset, weight):
            nonlocal acc
            if axis == n:
                acc += weight * geval(tuple(offset))
                return
            for off, c in stencils[axis].items():
                offset[axis] = off
                rec(axis + 1, offset, weight * c)
            offset[axis] = 0
        rec(0, [0] * n, 1.0)
        fact = 1.0
        for a in alpha:
            fact *= factorial(int(a))
        data[:, :, idx] = acc / (h ** int(alpha.sum())) / fact
    return MetricJet(n, data, order)


def naive_contract(t: TensorJet, s: TensorJet, pattern, g: MetricJet) -> float:
    """Plain-loop full contraction of two tensors' base-point values.

    pattern is a list of (slot_of_t, slot_of_s) pairs covering all slots of
    both tensors; pairs of equal variance are contracted through the metric
    (inverse metric for covariant pairs).  Deliberately unoptimized.
    """
    n = g.n
    t0 = t.at_point()
    s0 = s.at_point()
    g0 = g.constant_term()
    gi0 = np.linalg.inv(g0)
    pairs = [tuple(p) for p in pattern]
    if sorted(a for a, _ in pairs) != list(range(t.rank)) or \
       sorted(b for _, b in pairs) != list(range(s.rank)):
        raise ValueError("pattern must cover every slot of both tensors once")
    weights = []
    for a, b in pairs:
        va, vb = t.variance[a], s.variance[b]
        if va == vb:
            weights.append(gi0 if va == "d" else g0)
        else:
            weights.append(np.eye(n))
    total = 0.0
    npairs = len(pairs)
    index = [0] * (2 * npairs)
    def rec(p, w):
        nonlocal total
        if p == npairs:
            ti = [0] * t.rank
            si = [0] * s.rank
            for q, (a, b) in enumerate(pairs):
                ti[a] = index[2 * q]
                si[b] = index[2 * q + 1]
            total += w * t0[tuple(ti)] * s0[tuple(si)]
            return
        for ia in range(n):
            for ib in range(n):
                ww = w * weights[p][ia, ib]
                if ww == 0.0:
                    continue
                index[2 * p] = ia
                index[2 * p + 1] = ib
                rec(p + 1, ww)
    rec(0, 1.0)
    return total


def newton_inverse_jet(f: ScalarJet) -> ScalarJet:
    """Multiplicative inverse by Newton iteration x <- x (2 - f x)."""
    if f.value == 0:
        raise ValueError("inverse of a jet with vanishing constant term")
    x = ScalarJet.constant(f.n, f.order, 1.0 / float(f.value))
    steps = max(1, int(np.ceil(np.log2(f.order + 1))) + 1)
    for _ in range(steps):
        x = x * (2.0 - f * x)
    return x.with_valid(f.valid_order)


# ---------------------------------------------------------------------------
# model metrics

def sphere_conformal_factor(n: int, order: int) -> ScalarJet:
    """The jet of 4 / (1 + |x|^2)^2 at the origin."""
    r2 = ScalarJet.zero(n, order)
    for i in range(n):
        xi = ScalarJet.variable(n, order, i)
        r2 = r2 + xi * xi
    inv = jet_compose_analytic(1 + r2, "inv")
    return 4.0 * inv * inv


def random_scalar_jet(n: int, order: int, seed: int, magnitude: float = 0.1,
                      zero_constant: bool = False) -> ScalarJet:
    """Seeded random jet with degree-damped coefficients (1/alpha! scale)."""
    rng = np.random.default_rng(seed)
    exps = _basis.jet_exponents(n, order)
    damp = np.array([1.0 / np.prod([factorial(int(e)) for e in row]) for row in exps])
    c = rng.uniform(-magnitude, magnitude, _basis.jet_dim(n, order)) * damp
    if zero_constant:
        c[0] = 0.0
    return ScalarJet(n, order, c, order)


def model_metric(kind: str, n: int, order: int, seed: int = 0,
                 magnitude: float = 0.1, normalized: bool = True,
                 conformal_factor: ScalarJet | None = None):
    """Documented metric generators; returns (MetricJet, evaluator or None).

    kinds: flat | sphere | conformally_flat | random_polynomial.  The sphere
    patch is g_ij = 4 delta_ij/(1+|x|^2)^2 (round unit sphere in stereographic
    coordinates).  Random metrics are I + symmetric degree-damped polynomial
    perturbations; with normalized=False a constant symmetric offset is added
    as well, keeping the constant term positive definite for magnitude <= 0.2.
    """
    m = _basis.jet_dim(n, order)
    if kind == "flat":
        return MetricJet.identity(n, order), lambda x: np.eye(n)
    if kind == "sphere":
        conf = sphere_conformal_factor(n, order)
        data = np.zeros((n, n, m))
        for i in range(n):
            data[i, i] = conf.c

        def ev(x):
            x = np.asarray(x, dtype=np.float64)
            return 4.0 * np.eye(n) / (1.0 + float(x @ x)) ** 2

        return MetricJet(n, data, order), ev
    if kind == "conformally_flat":
        f = conformal_factor if conformal_factor is not None else \
            random_scalar_jet(n, order, seed, magnitude)
        scale = jet_compose_analytic(2.0 * f, "exp")
        data = np.zeros((n, n, m))
        for i in range(n):
            data[i, i] = scale.c
        return MetricJet(n, data, order), None
    if kind == "random_polynomial":
        if magnitude > 0.2:
            raise ValueError("magnitude above 0.2 risks an indefinite constant term")
        rng = np.random.default_rng(seed)
        exps = _basis.jet_exponents(n, order)
        damp = np.array([1.0 / np.prod([factorial(int(e)) for e in row]) for row in exps])
        data = np.zeros((n, n, m))
        data[:, :, 0] = np.eye(n)
        for i in range(n):
            for j in range(i, n):
                c = rng.uniform(-magnitude, magnitude, m) * damp
                c[0] = 0.0
                data[i, j] += c
                if j != i:
                    data[j, i] += c
        if not normalized:
            const = rng.uniform(-magnitude, magnitude, (n, n))
            const = 0.5 * (const + const.T)
            data[:, :, 0] += const

        exps_f = exps.astype(np.float64)

        def ev(x, data=data.copy()):
            x = np.asarray(x, dtype=np.float64)
            mono = np.prod(x[None, :] ** exps_f, axis=1)
            return data @ mono

        return MetricJet(n, data, order), ev
    raise ValueError(f"unknown model metric kind {kind!r}")
