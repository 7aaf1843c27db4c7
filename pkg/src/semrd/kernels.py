"""Hot numeric kernels with a numba fast path and a vectorized numpy fallback.

Two operations dominate runtime: scoring batches of candidate channels
inside the solver (rate plus both expected distortions per channel) and
multiplying per-position likelihood ratios over blocks of code proposals.
Both exist twice: a loop form compiled with numba when the numba backend is
active, and an einsum/broadcast form used otherwise. The two forms agree to
float round-off, not bit-exactly, because summation order differs.

Semantic measures are passed as integer codes (see distortion module) plus
optional generator sample arrays for the tabulated f-divergence; symbolic
measures always arrive as a materialized |X| x |Y| cost table.

``python -m benchmarks.bench_backends`` (repo root) times the two paths.
"""

from __future__ import annotations

import numpy as np

from .backend import BACKEND, NUMBA_ENABLED, jit

_EMPTY = np.zeros(0, dtype=np.float64)


# ---------------------------------------------------------------------------
# loop forms (numba-compatible; also runnable as plain python for testing)
# ---------------------------------------------------------------------------

def _interp_scalar(x, ts, fs):
    # linear interpolation with flat extrapolation, ts strictly increasing
    n = ts.shape[0]
    if x <= ts[0]:
        return fs[0]
    if x >= ts[n - 1]:
        return fs[n - 1]
    lo, hi = 0, n - 1
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if ts[mid] <= x:
            lo = mid
        else:
            hi = mid
    frac = (x - ts[lo]) / (ts[hi] - ts[lo])
    return fs[lo] + frac * (fs[hi] - fs[lo])


def _pair_distance(p, q, code, gen_t, gen_f):
    n = p.shape[0]
    if code == 0:  # half-L1 total variation
        acc = 0.0
        for s in range(n):
            acc += abs(p[s] - q[s])
        return 0.5 * acc
    if code == 1:  # KL in bits
        acc = 0.0
        for s in range(n):
            ps = p[s]
            if ps > 0.0:
                qs = q[s]
                if qs <= 0.0:
                    return np.inf
                acc += ps * np.log2(ps / qs)
        return acc if acc > 0.0 else 0.0
    if code == 2:  # chi-squared
        acc = 0.0
        for s in range(n):
            ps, qs = p[s], q[s]
            if qs <= 0.0:
                if ps > 0.0:
                    return np.inf
            else:
                diff = ps - qs
                acc += diff * diff / qs
        return acc
    acc = 0.0  # tabulated f-divergence
    for s in range(n):
        ps, qs = p[s], q[s]
        if qs <= 0.0:
            if ps > 0.0:
                return np.inf
        else:
            acc += qs * _interp_scalar(ps / qs, gen_t, gen_f)
    return acc


def _eval_channels_loops(p_sx, p_x, post_x, batch, sem_code, gen_t, gen_f, obs_cost, rates, dps, dos):
    num_b, num_x, num_y = batch.shape
    num_s = p_sx.shape[0]
    p_y = np.zeros(num_y)
    joint_sy = np.zeros((num_s, num_y))
    post_y = np.zeros(num_s)
    for b in range(num_b):
        w_mat = batch[b]
        for y in range(num_y):
            p_y[y] = 0.0
            for s in range(num_s):
                joint_sy[s, y] = 0.0
        for x in range(num_x):
            px = p_x[x]
            if px <= 0.0:
                continue
            for y in range(num_y):
                w = w_mat[x, y]
                if w <= 0.0:
                    continue
                p_y[y] += px * w
                for s in range(num_s):
                    joint_sy[s, y] += p_sx[s, x] * w
        rate = 0.0
        do = 0.0
        for x in range(num_x):
            px = p_x[x]
            if px <= 0.0:
                continue
            for y in range(num_y):
                w = w_mat[x, y]
                do += px * w * obs_cost[x, y]
                if w > 0.0 and p_y[y] > 0.0:
                    rate += px * w * np.log2(w / p_y[y])
        dp = 0.0
        for y in range(num_y):
            if p_y[y] <= 0.0:
                continue
            for s in range(num_s):
                post_y[s] = joint_sy[s, y] / p_y[y]
            for x in range(num_x):
                weight = p_x[x] * w_mat[x, y]
                if weight <= 0.0:
                    continue
                d = _pair_distance(post_x[x], post_y, sem_code, gen_t, gen_f)
                if not np.isfinite(d):
                    dp = np.inf
                    break
                dp += weight * d
            if dp == np.inf:
                break
        rates[b] = rate if rate > 0.0 else 0.0
        dps[b] = dp
        dos[b] = do


def _ratio_products_loops(tab, x_seq, proposals, out):
    num_b, n = proposals.shape
    for b in range(num_b):
        acc = 1.0
        for i in range(n):
            acc *= tab[x_seq[i], proposals[b, i]]
        out[b] = acc


if NUMBA_ENABLED:
    _interp_scalar = jit(_interp_scalar)
    _pair_distance = jit(_pair_distance)
    _eval_channels_jit = jit(_eval_channels_loops)
    _ratio_products_jit = jit(_ratio_products_loops)


# ---------------------------------------------------------------------------
# vectorized numpy forms
# ---------------------------------------------------------------------------

def _pairwise_semantic_numpy(post_x, post_y, sem_code, gen_t, gen_f):
    # post_x: (X, S), post_y: (B, S, Y) -> distances (B, X, Y)
    p = post_x[None, :, :, None]  # (1, X, S, 1)
    q = post_y[:, None, :, :]     # (B, 1, S, Y)
    if sem_code == 0:
        return 0.5 * np.abs(p - q).sum(axis=2)
    if sem_code == 1:
        with np.errstate(divide="ignore", invalid="ignore"):
            terms = np.where(p > 0.0, p * np.log2(p / q), 0.0)
        return np.maximum(terms.sum(axis=2), 0.0)
    if sem_code == 2:
        with np.errstate(divide="ignore", invalid="ignore"):
            terms = np.where(q > 0.0, (p - q) ** 2 / q, np.where(p > 0.0, np.inf, 0.0))
        return terms.sum(axis=2)
    with np.errstate(divide="ignore", invalid="ignore"):
        ratios = np.where(q > 0.0, p / np.where(q > 0.0, q, 1.0), 1.0)
        vals = np.interp(ratios.ravel(), gen_t, gen_f).reshape(ratios.shape)
        terms = np.where(q > 0.0, q * vals, np.where(p > 0.0, np.inf, 0.0))
    return terms.sum(axis=2)


def _eval_channels_numpy(p_sx, p_x, post_x, batch, sem_code, gen_t, gen_f, obs_cost):
    w = batch  # (B, X, Y)
    p_y = np.einsum("x,bxy->by", p_x, w)
    joint_sy = np.einsum("sx,bxy->bsy", p_sx, w)
    py_b = p_y[:, None, :]
    with np.errstate(divide="ignore", invalid="ignore"):
        log_ratio = np.where((w > 0.0) & (py_b > 0.0), np.log2(np.where(w > 0.0, w, 1.0) / np.where(py_b > 0.0, py_b, 1.0)), 0.0)
    rates = np.maximum(np.einsum("x,bxy,bxy->b", p_x, w, log_ratio), 0.0)
    dos = np.einsum("x,bxy,xy->b", p_x, w, obs_cost)
    safe_py = np.where(p_y > 0.0, p_y, 1.0)
    post_y = joint_sy / safe_py[:, None, :]
    dist = _pairwise_semantic_numpy(post_x, post_y, sem_code, gen_t, gen_f)
    weight = p_x[None, :, None] * w * (py_b > 0.0)
    active = weight > 0.0
    has_inf = np.any(active & ~np.isfinite(dist), axis=(1, 2))
    dps = np.einsum("bxy,bxy->b", weight, np.where(np.isfinite(dist), dist, 0.0))
    dps[has_inf] = np.inf
    return rates, dps, dos


def _ratio_products_numpy(tab, x_seq, proposals):
    return np.prod(tab[x_seq[None, :], proposals], axis=1)


# ---------------------------------------------------------------------------
# public entry points
# ---------------------------------------------------------------------------

def eval_channels(p_sx, p_x, post_x, batch, sem_code, gen_t=None, gen_f=None, obs_cost=None):
    """Score a batch of channels: returns (rates, expected_dp, expected_do).

    batch has shape (B, |X|, |Y|); rows of every channel must already be
    stochastic. Infinite semantic distortion is reported as +inf, never as
    an exception, so callers can treat such channels as infeasible.
    """
    batch = np.ascontiguousarray(batch, dtype=np.float64)
    gt = _EMPTY if gen_t is None else np.ascontiguousarray(gen_t, dtype=np.float64)
    gf = _EMPTY if gen_f is None else np.ascontiguousarray(gen_f, dtype=np.float64)
    if BACKEND == "numba":
        rates = np.empty(batch.shape[0])
        dps = np.empty(batch.shape[0])
        dos = np.empty(batch.shape[0])
        _eval_channels_jit(p_sx, p_x, post_x, batch, sem_code, gt, gf, obs_cost, rates, dps, dos)
        return rates, dps, dos
    return _eval_channels_numpy(p_sx, p_x, post_x, batch, sem_code, gt, gf, obs_cost)


def eval_channels_numpy_path(p_sx, p_x, post_x, batch, sem_code, gen_t=None, gen_f=None, obs_cost=None):
    """Always-vectorized twin of eval_channels, regardless of active backend."""
    batch = np.ascontiguousarray(batch, dtype=np.float64)
    gt = _EMPTY if gen_t is None else np.ascontiguousarray(gen_t, dtype=np.float64)
    gf = _EMPTY if gen_f is None else np.ascontiguousarray(gen_f, dtype=np.float64)
    return _eval_channels_numpy(p_sx, p_x, post_x, batch, sem_code, gt, gf, obs_cost)


def ratio_products(tab, x_seq, proposals):
    """Per-proposal product of tab[x_i, y_i] over block positions.

    tab is the |X| x |Y| table of marginal-to-conditional likelihood ratios
    (entries may be +inf where the conditional mass is 0); proposals has
    shape (B, n).
    """
    proposals = np.ascontiguousarray(proposals, dtype=np.int64)
    x_arr = np.ascontiguousarray(x_seq, dtype=np.int64)
    if BACKEND == "numba":
        out = np.empty(proposals.shape[0])
        _ratio_products_jit(tab, x_arr, proposals, out)
        return out
    return _ratio_products_numpy(tab, x_arr, proposals)
