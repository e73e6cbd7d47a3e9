"""Hot numeric kernels: SVM subgradient training and Monte-Carlo placement.

Kernels are numba-jitted when numba is importable. Set ``CUTAWAY_NUMBA=0``
to force the plain-Python/numpy fallback path (same functions, undecorated);
``benchmarks/bench_kernels.py`` compares the two. The ``*_impl`` names always
point at the uncompiled versions so tests can assert backend parity
in-process.

All randomness is generated by callers with ``numpy.random.default_rng`` and
passed in as arrays, so results are bitwise identical across backends.
"""

from __future__ import annotations

import os

import numpy as np

_flag = os.environ.get("CUTAWAY_NUMBA", "1").strip().lower()
NUMBA_REQUESTED = _flag not in ("0", "false", "no", "off")

if NUMBA_REQUESTED:
    try:
        from numba import njit

        NUMBA_ENABLED = True
    except ImportError:  # pragma: no cover - numba is a declared dependency
        NUMBA_ENABLED = False
else:
    NUMBA_ENABLED = False


def _jit(fn):
    if NUMBA_ENABLED:
        return njit(cache=True)(fn)
    return fn


def fit_linear_svm_impl(data, indices, indptr, y, cw, perm, dim, c, lr_scale, bias_lr):
    """Averaged stochastic subgradient descent on the weighted hinge objective.

    Minimizes 0.5*||w||^2 + c * sum_i cw[i] * max(0, 1 - y[i]*(w.x[i] + b))
    with step 1/(lambda*t), lambda = 1/(c*n), shrinking w by (1 - lr_scale/t)
    each step and averaging all iterates. ``perm`` holds one example
    permutation per epoch. Returns the averaged (w, b) and the objective
    evaluated at the averaged iterate after each epoch.
    """
    n = y.shape[0]
    epochs = perm.shape[0]
    lam = 1.0 / (c * n)
    w = np.zeros(dim, dtype=np.float64)
    b = 0.0
    w_sum = np.zeros(dim, dtype=np.float64)
    b_sum = 0.0
    history = np.zeros(epochs, dtype=np.float64)
    t = 0
    for e in range(epochs):
        for k in range(n):
            i = perm[e, k]
            t += 1
            eta = lr_scale / (lam * t)
            margin = b
            for p in range(indptr[i], indptr[i + 1]):
                margin += w[indices[p]] * data[p]
            margin *= y[i]
            shrink = 1.0 - lr_scale / t
            for d in range(dim):
                w[d] *= shrink
            if margin < 1.0:
                coef = eta * cw[i] * y[i]
                for p in range(indptr[i], indptr[i + 1]):
                    w[indices[p]] += coef * data[p]
                b += bias_lr * coef
            for d in range(dim):
                w_sum[d] += w[d]
            b_sum += b
        # objective at the averaged iterate so far
        inv = 1.0 / t
        obj = 0.0
        for d in range(dim):
            wa = w_sum[d] * inv
            obj += 0.5 * wa * wa
        ba = b_sum * inv
        for i in range(n):
            dot = ba
            for p in range(indptr[i], indptr[i + 1]):
                dot += (w_sum[indices[p]] * inv) * data[p]
            slack = 1.0 - y[i] * dot
            if slack > 0.0:
                obj += c * cw[i] * slack
        history[e] = obj
    inv = 1.0 / t
    return w_sum * inv, b_sum * inv, history


def csr_dot_impl(data, indices, indptr, w, b):
    """Decision values w.x + b for every row of a CSR matrix."""
    n = indptr.shape[0] - 1
    out = np.empty(n, dtype=np.float64)
    for i in range(n):
        acc = b
        for p in range(indptr[i], indptr[i + 1]):
            acc += w[indices[p]] * data[p]
        out[i] = acc
    return out


def mc_pair_jaccard_impl(dur_a, dur_b, u_a, u_b, perm_a, perm_b,
                         free_a, free_b, bin_s, n_bins):
    """Mean binned Jaccard over random non-overlapping placements.

    Per trial, each set's insertions are laid out left to right: sorted
    uniform offsets into the free space plus the cumulative length of the
    segments already placed (durations assigned by the trial's permutation).
    Bin coverage uses the same floor/ceil rule as the analytics module.
    """
    trials = u_a.shape[0]
    ka = dur_a.shape[0]
    kb = dur_b.shape[0]
    cover_a = np.zeros(n_bins, dtype=np.uint8)
    cover_b = np.zeros(n_bins, dtype=np.uint8)
    total = 0.0
    for tr in range(trials):
        for j in range(n_bins):
            cover_a[j] = 0
            cover_b[j] = 0
        offs = np.sort(u_a[tr] * free_a)
        acc = 0.0
        for j in range(ka):
            s = offs[j] + acc
            d = dur_a[perm_a[tr, j]]
            acc += d
            b0 = int(np.floor(s / bin_s + 1e-9))
            b1 = int(np.ceil((s + d) / bin_s - 1e-9))
            if b1 > n_bins:
                b1 = n_bins
            for bb in range(b0, b1):
                cover_a[bb] = 1
        offs = np.sort(u_b[tr] * free_b)
        acc = 0.0
        for j in range(kb):
            s = offs[j] + acc
            d = dur_b[perm_b[tr, j]]
            acc += d
            b0 = int(np.floor(s / bin_s + 1e-9))
            b1 = int(np.ceil((s + d) / bin_s - 1e-9))
            if b1 > n_bins:
                b1 = n_bins
            for bb in range(b0, b1):
                cover_b[bb] = 1
        inter = 0
        union = 0
        for j in range(n_bins):
            if cover_a[j] == 1 and cover_b[j] == 1:
                inter += 1
            if cover_a[j] == 1 or cover_b[j] == 1:
                union += 1
        if union == 0:
            total += 1.0
        else:
            total += inter / union
    return total / trials


fit_linear_svm = _jit(fit_linear_svm_impl)
csr_dot = _jit(csr_dot_impl)
mc_pair_jaccard = _jit(mc_pair_jaccard_impl)
