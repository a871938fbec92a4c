"""Compiled kernels for exponential-smoothing fits.

One-step-ahead SSE recursions for the (trend x seasonal) smoothing family
and a bounded Nelder-Mead simplex search over the smoothing parameters.
Everything here is deterministic; the only inputs are the data, the
candidate codes, fixed initial states, and fixed start points.

Parameter vector layout (full): [alpha, beta, gamma, phi]. A candidate
optimizes only the entries listed in its ``idx`` map; the rest are inert
placeholders never read by the recursion for that candidate.
"""
from __future__ import annotations

import numpy as np
from numba import njit

TREND_NONE, TREND_ADD, TREND_DAMPED = 0, 1, 2
SEAS_NONE, SEAS_ADD, SEAS_MUL = 0, 1, 2

FAILED_SSE = 1e300


@njit(cache=True)
def sse_one_step(y, m, trend, seas, alpha, beta, gamma, phi, l0, b0, s0):
    """One-step in-sample SSE of the smoothing recursion; FAILED_SSE on blow-up."""
    l = l0
    b = b0
    s = s0.copy()
    sse = 0.0
    n = y.size
    for t in range(n):
        bt = phi * b if trend != TREND_NONE else 0.0
        base = l + bt
        if seas == SEAS_NONE:
            yhat = base
            l_new = alpha * y[t] + (1.0 - alpha) * base
        elif seas == SEAS_ADD:
            su = s[t % m]
            yhat = base + su
            l_new = alpha * (y[t] - su) + (1.0 - alpha) * base
            s[t % m] = gamma * (y[t] - base) + (1.0 - gamma) * su
        else:
            su = s[t % m]
            if su == 0.0 or base == 0.0:
                return FAILED_SSE
            yhat = base * su
            l_new = alpha * (y[t] / su) + (1.0 - alpha) * base
            s[t % m] = gamma * (y[t] / base) + (1.0 - gamma) * su
        err = y[t] - yhat
        sse += err * err
        if trend != TREND_NONE:
            b = beta * (l_new - l) + (1.0 - beta) * bt
        l = l_new
        if not (np.isfinite(l) and np.isfinite(b) and np.isfinite(sse)):
            return FAILED_SSE
        if seas != SEAS_NONE and not np.isfinite(s[t % m]):
            return FAILED_SSE
    return sse


@njit(cache=True)
def final_states(y, m, trend, seas, alpha, beta, gamma, phi, l0, b0, s0):
    """Run the recursion and return (level, trend, seasonal states in time order).

    The j-th returned seasonal state belongs to time n - m + j, so the
    forecast for horizon h reads slot h - 1 - m * (ceil(h/m) - 1).
    """
    l = l0
    b = b0
    s = s0.copy()
    n = y.size
    for t in range(n):
        bt = phi * b if trend != TREND_NONE else 0.0
        base = l + bt
        if seas == SEAS_NONE:
            l_new = alpha * y[t] + (1.0 - alpha) * base
        elif seas == SEAS_ADD:
            su = s[t % m]
            l_new = alpha * (y[t] - su) + (1.0 - alpha) * base
            s[t % m] = gamma * (y[t] - base) + (1.0 - gamma) * su
        else:
            su = s[t % m]
            l_new = alpha * (y[t] / su) + (1.0 - alpha) * base
            s[t % m] = gamma * (y[t] / base) + (1.0 - gamma) * su
        if trend != TREND_NONE:
            b = beta * (l_new - l) + (1.0 - beta) * bt
        l = l_new
    ordered = np.empty(m)
    for j in range(m):
        ordered[j] = s[(n + j) % m]
    return l, b, ordered


@njit(cache=True)
def _eval_clipped(free, idx, lower, upper, y, m, trend, seas, l0, b0, s0):
    full = np.empty(4)
    full[0] = 0.5
    full[1] = 0.1
    full[2] = 0.1
    full[3] = 0.98
    for i in range(free.size):
        v = free[i]
        if v < lower[i]:
            v = lower[i]
        elif v > upper[i]:
            v = upper[i]
        full[idx[i]] = v
    return sse_one_step(
        y, m, trend, seas, full[0], full[1], full[2], full[3], l0, b0, s0
    )


@njit(cache=True)
def nelder_mead(x0, idx, lower, upper, y, m, trend, seas, l0, b0, s0, maxiter):
    """Bounded simplex minimization of the one-step SSE (clipping bounds).

    Standard reflection/expansion/contraction/shrink coefficients
    (1, 2, 0.5, 0.5); stops on simplex collapse or iteration budget.
    Returns (best free params clipped into bounds, best SSE).
    """
    ndim = x0.size
    npts = ndim + 1
    xatol = 1e-3
    frtol = 1e-9

    sim = np.empty((npts, ndim))
    fx = np.empty(npts)
    sim[0] = x0
    for i in range(ndim):
        pt = x0.copy()
        step = 0.15 * (upper[i] - lower[i])
        if pt[i] + step > upper[i]:
            pt[i] = pt[i] - step
        else:
            pt[i] = pt[i] + step
        sim[i + 1] = pt
    for i in range(npts):
        fx[i] = _eval_clipped(sim[i], idx, lower, upper, y, m, trend, seas, l0, b0, s0)

    for _ in range(maxiter):
        order = np.argsort(fx)
        sim2 = np.empty_like(sim)
        fx2 = np.empty_like(fx)
        for i in range(npts):
            sim2[i] = sim[order[i]]
            fx2[i] = fx[order[i]]
        sim = sim2
        fx = fx2

        spread = 0.0
        for i in range(1, npts):
            for j in range(ndim):
                d = abs(sim[i, j] - sim[0, j])
                if d > spread:
                    spread = d
        if spread < xatol and fx[npts - 1] - fx[0] <= frtol * (abs(fx[0]) + 1e-12):
            break

        centroid = np.zeros(ndim)
        for i in range(npts - 1):
            for j in range(ndim):
                centroid[j] += sim[i, j]
        for j in range(ndim):
            centroid[j] /= npts - 1

        xr = centroid + (centroid - sim[npts - 1])
        fr = _eval_clipped(xr, idx, lower, upper, y, m, trend, seas, l0, b0, s0)
        if fr < fx[0]:
            xe = centroid + 2.0 * (centroid - sim[npts - 1])
            fe = _eval_clipped(xe, idx, lower, upper, y, m, trend, seas, l0, b0, s0)
            if fe < fr:
                sim[npts - 1] = xe
                fx[npts - 1] = fe
            else:
                sim[npts - 1] = xr
                fx[npts - 1] = fr
        elif fr < fx[npts - 2]:
            sim[npts - 1] = xr
            fx[npts - 1] = fr
        else:
            if fr < fx[npts - 1]:
                xc = centroid + 0.5 * (centroid - sim[npts - 1])
                fc = _eval_clipped(xc, idx, lower, upper, y, m, trend, seas, l0, b0, s0)
                shrink = fc > fr
            else:
                xc = centroid - 0.5 * (centroid - sim[npts - 1])
                fc = _eval_clipped(xc, idx, lower, upper, y, m, trend, seas, l0, b0, s0)
                shrink = fc >= fx[npts - 1]
            if not shrink:
                sim[npts - 1] = xc
                fx[npts - 1] = fc
            else:
                for i in range(1, npts):
                    sim[i] = sim[0] + 0.5 * (sim[i] - sim[0])
                    fx[i] = _eval_clipped(
                        sim[i], idx, lower, upper, y, m, trend, seas, l0, b0, s0
                    )

    best = 0
    for i in range(1, npts):
        if fx[i] < fx[best]:
            best = i
    out = sim[best].copy()
    for j in range(ndim):
        if out[j] < lower[j]:
            out[j] = lower[j]
        elif out[j] > upper[j]:
            out[j] = upper[j]
    return out, fx[best]
