"""Exact random-variate samplers used by the Gibbs sweeps.

Two families live here: one-sided truncated standard normals (probit latent
utilities) and Polya-Gamma PG(1, c) variables (logit augmentation weights).
Both are vectorized rejection samplers that loop only over not-yet-accepted
entries, so draws stay exact and the expected number of passes is O(1).
"""

from __future__ import annotations

import numpy as np
from scipy.special import log_ndtr, ndtr, ndtri

# above this lower bound the inverse-CDF loses resolution; switch to rejection
_TAIL_SWITCH = 6.0


def trunc_std_normal_lower(lower, rng) -> np.ndarray:
    """Draw z ~ N(0, 1) conditioned on z > lower, elementwise.

    Inverse-CDF mapped through the upper-tail mass keeps precision for bounds
    up to 6; beyond that an exponential-envelope rejection takes over.
    """
    a = np.atleast_1d(np.asarray(lower, dtype=float))
    if not np.isfinite(a).all():
        raise ValueError("truncation bounds must be finite")
    out = np.empty_like(a)
    body = a <= _TAIL_SWITCH
    if body.any():
        ab = a[body]
        u = rng.random(ab.size)
        z = np.empty_like(ab)
        neg = ab <= 0.0
        if neg.any():
            lo = ndtr(ab[neg])
            z[neg] = ndtri(lo + u[neg] * (1.0 - lo))
        pos = ~neg
        if pos.any():
            # work in the upper tail: ndtri argument stays near 0, not near 1
            upper_mass = ndtr(-ab[pos])
            z[pos] = -ndtri((1.0 - u[pos]) * upper_mass)
        out[body] = z
    tail = ~body
    if tail.any():
        out[tail] = _exp_envelope_tail(a[tail], rng)
    return out


def _exp_envelope_tail(a: np.ndarray, rng) -> np.ndarray:
    """Rejection sampler for the deep upper tail z > a with a > 0."""
    lam = 0.5 * (a + np.sqrt(a * a + 4.0))
    out = np.empty_like(a)
    pending = np.arange(a.size)
    while pending.size:
        ap = a[pending]
        lp = lam[pending]
        x = ap + rng.standard_exponential(ap.size) / lp
        accept = rng.random(ap.size) <= np.exp(-0.5 * (x - lp) ** 2)
        hit = pending[accept]
        out[hit] = x[accept]
        pending = pending[~accept]
    return out


# Polya-Gamma PG(1, c) via the alternating-series rejection sampler for the
# Jacobi base law J*(1, z): PG(1, c) = J*(1, |c|/2) / 4. The proposal splits
# the support at _T into a truncated inverse-Gaussian piece and a shifted
# exponential piece.
_T = 0.64


def polya_gamma(tilt, rng) -> np.ndarray:
    """Draw omega ~ PG(1, tilt), elementwise. Symmetric in the sign of tilt."""
    c = np.asarray(tilt, dtype=float)
    if not np.isfinite(c).all():
        raise ValueError("tilt must be finite")
    z = 0.5 * np.abs(c).ravel()
    if z.size == 0:
        return np.empty_like(c)
    rate = np.pi ** 2 / 8.0 + 0.5 * z * z
    log_right = np.log(np.pi / (2.0 * rate)) - rate * _T
    rt = np.sqrt(_T)
    log_left = np.log(2.0) + np.logaddexp(
        -z + log_ndtr((_T * z - 1.0) / rt),
        z + log_ndtr(-(_T * z + 1.0) / rt),
    )
    right_prob = np.exp(log_right - np.logaddexp(log_right, log_left))
    out = np.empty_like(z)
    pending = np.arange(z.size)
    while pending.size:
        zz = z[pending]
        use_right = rng.random(zz.size) < right_prob[pending]
        x = np.empty(zz.size)
        if use_right.any():
            x[use_right] = _T + rng.standard_exponential(int(use_right.sum())) / rate[pending[use_right]]
        left = ~use_right
        if left.any():
            x[left] = _trunc_inv_gauss(zz[left], rng)
        ok = _series_accept(x, rng)
        hit = pending[ok]
        out[hit] = x[ok]
        pending = pending[~ok]
    return (0.25 * out).reshape(c.shape)


def _series_coef(n: int, x: np.ndarray) -> np.ndarray:
    """n-th alternating-series coefficient of the Jacobi base density."""
    c = np.pi * (n + 0.5)
    out = np.empty_like(x)
    small = x <= _T
    with np.errstate(divide="ignore", over="ignore", under="ignore"):
        if small.any():
            xs = x[small]
            out[small] = c * (2.0 / (np.pi * xs)) ** 1.5 * np.exp(-2.0 * (n + 0.5) ** 2 / xs)
        big = ~small
        if big.any():
            out[big] = c * np.exp(-0.5 * c * c * x[big])
    return out


def _series_accept(x: np.ndarray, rng) -> np.ndarray:
    """Alternating-series accept/reject decision for each proposal in x.

    The partial sums bracket the target density from both sides, so each
    element is decided after finitely many terms (usually two or three).
    """
    s = _series_coef(0, x)
    y = rng.random(x.size) * s
    accept = np.zeros(x.size, dtype=bool)
    undecided = np.arange(x.size)
    n = 0
    while undecided.size:
        n += 1
        term = _series_coef(n, x[undecided])
        if n % 2 == 1:
            s[undecided] -= term
            hit = y[undecided] <= s[undecided]
            accept[undecided[hit]] = True
            undecided = undecided[~hit]
        else:
            s[undecided] += term
            miss = y[undecided] > s[undecided]
            undecided = undecided[~miss]
    return accept


def _trunc_inv_gauss(z: np.ndarray, rng) -> np.ndarray:
    """Inverse-Gaussian IG(1/z, 1) truncated to (0, _T], elementwise, z >= 0."""
    out = np.empty_like(z)
    mean_above_cut = z * _T < 1.0
    # mean above the cut (covers z = 0): propose from the cut-anchored
    # square-root envelope and thin by the exp(-z^2 x / 2) tilt
    idx = np.flatnonzero(mean_above_cut)
    while idx.size:
        e1 = rng.standard_exponential(idx.size)
        e2 = rng.standard_exponential(idx.size)
        ok = e1 * e1 <= 2.0 * e2 / _T
        x = _T / (1.0 + _T * e1) ** 2
        ok &= rng.random(idx.size) <= np.exp(-0.5 * z[idx] ** 2 * x)
        hit = idx[ok]
        out[hit] = x[ok]
        idx = idx[~ok]
    # mean at or below the cut: draw unconstrained inverse-Gaussians by the
    # squared-normal construction and keep those landing inside (0, _T]
    idx = np.flatnonzero(~mean_above_cut)
    while idx.size:
        mu = 1.0 / z[idx]
        y = rng.standard_normal(idx.size) ** 2
        x = mu + 0.5 * mu * mu * y - 0.5 * mu * np.sqrt(4.0 * mu * y + (mu * y) ** 2)
        swap = rng.random(idx.size) > mu / (mu + x)
        x[swap] = mu[swap] ** 2 / x[swap]
        ok = x <= _T
        hit = idx[ok]
        out[hit] = x[ok]
        idx = idx[~ok]
    return out
