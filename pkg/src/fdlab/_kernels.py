"""Compiled inner loops: Runge-Kutta transfer matrices, matrix chaining, activator corrections."""

from __future__ import annotations

import math

import numpy as np
from numba import njit

_LO = 2.0**-32
_HI = 2.0**32
_LN2 = math.log(2.0)


@njit(cache=True)
def rk_matrices(q, h, A, B, E3, E5, scale):
    """Transfer matrix and scaled error of one step of Y' = [[0,1],[-q,0]] Y, Y(0) = I.

    ``q`` has shape (ns + 1, n): the coefficient at the ns stage times and at
    the step end.
    """
    ns = B.size
    n = h.size
    R = np.empty((n, 2, 2))
    err = np.empty(n)
    K = np.empty((ns + 1, 2, 2))
    for j in range(n):
        hj = h[j]
        for i in range(ns):
            y00 = 1.0
            y01 = 0.0
            y10 = 0.0
            y11 = 1.0
            for m in range(i):
                c = hj * A[i, m]
                if c != 0.0:
                    y00 += c * K[m, 0, 0]
                    y01 += c * K[m, 0, 1]
                    y10 += c * K[m, 1, 0]
                    y11 += c * K[m, 1, 1]
            qi = q[i, j]
            K[i, 0, 0] = y10
            K[i, 0, 1] = y11
            K[i, 1, 0] = -qi * y00
            K[i, 1, 1] = -qi * y01
        r00 = 1.0
        r01 = 0.0
        r10 = 0.0
        r11 = 1.0
        for m in range(ns):
            c = hj * B[m]
            r00 += c * K[m, 0, 0]
            r01 += c * K[m, 0, 1]
            r10 += c * K[m, 1, 0]
            r11 += c * K[m, 1, 1]
        qe = q[ns, j]
        K[ns, 0, 0] = r10
        K[ns, 0, 1] = r11
        K[ns, 1, 0] = -qe * r00
        K[ns, 1, 1] = -qe * r01
        n5 = 0.0
        n3 = 0.0
        for a in range(2):
            for b in range(2):
                e5 = 0.0
                e3 = 0.0
                for m in range(ns + 1):
                    e5 += E5[m] * K[m, a, b]
                    e3 += E3[m] * K[m, a, b]
                w = 1.0
                if a == 0 and b == 1:
                    w = scale
                elif a == 1 and b == 0:
                    w = 1.0 / scale
                e5 *= hj * w
                e3 *= hj * w
                n5 += e5 * e5
                n3 += e3 * e3
        den = n5 + 0.01 * n3
        err[j] = n5 / math.sqrt(den) if den > 0.0 else 0.0
        R[j, 0, 0] = r00
        R[j, 0, 1] = r01
        R[j, 1, 0] = r10
        R[j, 1, 1] = r11
    return R, err


@njit(cache=True)
def group_products(R, group, n_groups):
    """Ordered products of consecutive step matrices sharing a group id.

    Returns (P, logscale) with the true product = P * exp(logscale).
    """
    P = np.zeros((n_groups, 2, 2))
    L = np.zeros(n_groups)
    for g in range(n_groups):
        P[g, 0, 0] = 1.0
        P[g, 1, 1] = 1.0
    for s in range(R.shape[0]):
        g = group[s]
        p00 = R[s, 0, 0] * P[g, 0, 0] + R[s, 0, 1] * P[g, 1, 0]
        p01 = R[s, 0, 0] * P[g, 0, 1] + R[s, 0, 1] * P[g, 1, 1]
        p10 = R[s, 1, 0] * P[g, 0, 0] + R[s, 1, 1] * P[g, 1, 0]
        p11 = R[s, 1, 0] * P[g, 0, 1] + R[s, 1, 1] * P[g, 1, 1]
        m = max(max(abs(p00), abs(p01)), max(abs(p10), abs(p11)))
        if m > _HI or (m < _LO and m > 0.0):
            e = math.floor(math.log2(m))
            f = 2.0 ** (-e)
            p00 *= f
            p01 *= f
            p10 *= f
            p11 *= f
            L[g] += e * _LN2
        P[g, 0, 0] = p00
        P[g, 0, 1] = p01
        P[g, 1, 0] = p10
        P[g, 1, 1] = p11
    return P, L


@njit(cache=True)
def chain(P, L, u0, v0, ls0):
    """Apply interval propagators in order; output k is the state after P[k-1]."""
    n = P.shape[0]
    U = np.empty(n + 1)
    V = np.empty(n + 1)
    S = np.empty(n + 1)
    u, v, ls = u0, v0, ls0
    U[0] = u
    V[0] = v
    S[0] = ls
    for k in range(n):
        un = P[k, 0, 0] * u + P[k, 0, 1] * v
        v = P[k, 1, 0] * u + P[k, 1, 1] * v
        u = un
        ls += L[k]
        m = max(abs(u), abs(v))
        if m > _HI or (m < _LO and m > 0.0):
            e = math.floor(math.log2(m))
            f = 2.0 ** (-e)
            u *= f
            v *= f
            ls += e * _LN2
        U[k + 1] = u
        V[k + 1] = v
        S[k + 1] = ls
    return U, V, S


# ---------------------------------------------------------------------------
# activator window corrections for the default cutoff
# ---------------------------------------------------------------------------


@njit(cache=True)
def _f4(s):
    """Derivatives 0..3 of exp(-1/s)."""
    if s <= 1.0 / 700.0:
        return 0.0, 0.0, 0.0, 0.0
    x = 1.0 / s
    x2 = x * x
    f = math.exp(-x)
    return f, f * x2, f * x2 * (x2 - 2 * x), f * x2 * x2 * (x2 - 6 * x + 6)


@njit(cache=True)
def _theta(s):
    """Derivatives 0..3 of the smooth step f(s) / (f(s) + f(1 - s))."""
    if s <= 0.0:
        return 0.0, 0.0, 0.0, 0.0
    if s >= 1.0:
        return 1.0, 0.0, 0.0, 0.0
    f0, f1, f2, f3 = _f4(s)
    r0, r1, r2, r3 = _f4(1.0 - s)
    g0 = f0 + r0
    g1 = f1 - r1
    g2 = f2 + r2
    g3 = f3 - r3
    t0 = f0 / g0
    t1 = (f1 - t0 * g1) / g0
    t2 = (f2 - 2 * t1 * g1 - t0 * g2) / g0
    t3 = (f3 - 3 * t2 * g1 - 3 * t1 * g2 - t0 * g3) / g0
    return t0, t1, t2, t3


@njit(cache=True)
def _eps(t, a, b, om):
    """Derivatives 0..3 of the amplitude profile at t."""
    if t <= a or t >= b:
        return 0.0, 0.0, 0.0, 0.0
    r = 1.0 / t
    i0 = r
    i1 = -r * r
    i2 = -2.0 * r * i1
    i3 = -3.0 * r * i2
    if t >= 2 * a and t <= 0.5 * b:
        return om * i0, om * i1, om * i2, om * i3
    if t < 2 * a:
        s = (t - a) / a
        ds = 1.0 / a
    else:
        s = 2 * (b - t) / b
        ds = -2.0 / b
    t0, t1, t2, t3 = _theta(s)
    t1 *= ds
    t2 *= ds * ds
    t3 *= ds * ds * ds
    e0 = t0 * i0
    e1 = t0 * i1 + t1 * i0
    e2 = t0 * i2 + 2 * t1 * i1 + t2 * i0
    e3 = t0 * i3 + 3 * t1 * i2 + 3 * t2 * i1 + t3 * i0
    return om * e0, om * e1, om * e2, om * e3


@njit(cache=True)
def window_correction(t, a, b, om, g, k, order):
    n = t.size
    out = np.empty(n)
    g2 = g * g
    for j in range(n):
        tj = t[j]
        e0, e1, e2, e3 = _eps(tj, a, b, om)
        s = math.sin(k * tj)
        c = math.cos(k * tj)
        S2 = 2 * s * c
        C2 = c * c - s * s
        s2 = s * s
        s4 = s2 * s2
        if order == 0:
            out[j] = e0 * S2 / (4 * k) + e1 * s2 / (8 * k * k) + e0 * e0 * s4 / (64 * g2 * k * k)
        elif order == 1:
            out[j] = (e0 * C2 / 2 + e0 * e0 * s2 * s * c / (16 * g2 * k) + 3 * e1 * S2 / (8 * k)
                      + e0 * e1 * s4 / (32 * g2 * k * k) + e2 * s2 / (8 * k * k))
        else:
            out[j] = (-k * e0 * S2 + e0 * e0 * (-s4 + 3 * s2 * c * c) / (16 * g2)
                      + 1.25 * e1 * C2 + e1 * e1 * s4 / (32 * g2 * k * k)
                      + e0 * e1 * s2 * s * c / (4 * g2 * k) + e2 * S2 / (2 * k)
                      + e0 * e2 * s4 / (32 * g2 * k * k) + e3 * s2 / (8 * k * k))
    return out


def window_correction_np(t, a, b, om, g, k, order):
    return window_correction(np.ascontiguousarray(t, dtype=float), a, b, om, g, k, order)
