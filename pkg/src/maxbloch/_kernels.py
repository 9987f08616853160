"""Compiled RK4 sweeps of the Bloch equations along retarded time.

The field is known only on the sample grid; the midpoint stages use the
average of the two bracketing samples (linear interpolation).  The pair
kernels integrate pump and first-order probe harmonics as one system, with
the pump stages evaluated by the same helper as the pump-only kernel so the
pump part is bit-identical between the two.
"""

import numpy as np
from numba import njit


@njit(cache=True, inline="always")
def _pump_rhs(p, d, w, g1, g2, deq):
    dp = w * d - g2 * p
    dd = -(w.real * p.real + w.imag * p.imag) - g1 * (d - deq)
    return dp, dd


@njit(cache=True, inline="always")
def _probe_rhs(p0, d0, w0, w1, p1, d1, q, g1, g2):
    # q is conj(p_{-1}); D_{-1} = conj(d1) is never needed explicitly
    dp1 = w1 * d0 + w0 * d1 - g2 * p1
    dd1 = -0.5 * (w1 * p0.conjugate() + w0.conjugate() * p1 + w0 * q) - g1 * d1
    dq = w0.conjugate() * d1 - g2 * q
    return dp1, dd1, dq


@njit(cache=True, inline="always")
def _pump_rk4(p, d, wa, wm, wb, h, g1, g2, deq):
    k1p, k1d = _pump_rhs(p, d, wa, g1, g2, deq)
    k2p, k2d = _pump_rhs(p + 0.5 * h * k1p, d + 0.5 * h * k1d, wm, g1, g2, deq)
    k3p, k3d = _pump_rhs(p + 0.5 * h * k2p, d + 0.5 * h * k2d, wm, g1, g2, deq)
    k4p, k4d = _pump_rhs(p + h * k3p, d + h * k3d, wb, g1, g2, deq)
    pn = p + (h / 6.0) * (k1p + 2.0 * k2p + 2.0 * k3p + k4p)
    dn = d + (h / 6.0) * (k1d + 2.0 * k2d + 2.0 * k3d + k4d)
    return pn, dn


@njit(cache=True, inline="always")
def _pair_rk4(p, d, p1, d1, q, wa, wm, wb, va, vm, vb, h, g1, g2, deq):
    # stage 1
    k1p, k1d = _pump_rhs(p, d, wa, g1, g2, deq)
    l1p, l1d, l1q = _probe_rhs(p, d, wa, va, p1, d1, q, g1, g2)
    # stage 2
    sp = p + 0.5 * h * k1p
    sd = d + 0.5 * h * k1d
    k2p, k2d = _pump_rhs(sp, sd, wm, g1, g2, deq)
    l2p, l2d, l2q = _probe_rhs(
        sp, sd, wm, vm, p1 + 0.5 * h * l1p, d1 + 0.5 * h * l1d, q + 0.5 * h * l1q, g1, g2
    )
    # stage 3
    sp = p + 0.5 * h * k2p
    sd = d + 0.5 * h * k2d
    k3p, k3d = _pump_rhs(sp, sd, wm, g1, g2, deq)
    l3p, l3d, l3q = _probe_rhs(
        sp, sd, wm, vm, p1 + 0.5 * h * l2p, d1 + 0.5 * h * l2d, q + 0.5 * h * l2q, g1, g2
    )
    # stage 4
    sp = p + h * k3p
    sd = d + h * k3d
    k4p, k4d = _pump_rhs(sp, sd, wb, g1, g2, deq)
    l4p, l4d, l4q = _probe_rhs(sp, sd, wb, vb, p1 + h * l3p, d1 + h * l3d, q + h * l3q, g1, g2)

    c = h / 6.0
    pn = p + c * (k1p + 2.0 * k2p + 2.0 * k3p + k4p)
    dn = d + c * (k1d + 2.0 * k2d + 2.0 * k3d + k4d)
    p1n = p1 + c * (l1p + 2.0 * l2p + 2.0 * l3p + l4p)
    d1n = d1 + c * (l1d + 2.0 * l2d + 2.0 * l3d + l4d)
    qn = q + c * (l1q + 2.0 * l2q + 2.0 * l3q + l4q)
    return pn, dn, p1n, d1n, qn


@njit(cache=True)
def pump_step(p, d, wa, wb, h, g1, g2, deq):
    return _pump_rk4(p, d, wa, 0.5 * (wa + wb), wb, h, g1, g2, deq)


@njit(cache=True)
def pair_step(p, d, p1, d1, q, wa, wb, va, vb, h, g1, g2, deq):
    return _pair_rk4(
        p, d, p1, d1, q, wa, 0.5 * (wa + wb), wb, va, 0.5 * (va + vb), vb, h, g1, g2, deq
    )


@njit(cache=True, nogil=True)
def sweep_pump(field, h, g1, g2, deq, p_out, d_out):
    """Integrate (p0, D0) over the whole window; fills ``p_out``/``d_out``."""
    n = field.shape[0]
    p = 0j
    d = deq
    p_out[0] = p
    d_out[0] = d
    for i in range(n - 1):
        wa = field[i]
        wb = field[i + 1]
        p, d = _pump_rk4(p, d, wa, 0.5 * (wa + wb), wb, h, g1, g2, deq)
        p_out[i + 1] = p
        d_out[i + 1] = d


@njit(cache=True, nogil=True)
def sweep_pair(field0, field1, h, g1, g2, deq, p_out, d_out, p1_out, d1_out, q_out):
    n = field0.shape[0]
    p = 0j
    d = deq
    p1 = 0j
    d1 = 0j
    q = 0j
    p_out[0] = p
    d_out[0] = d
    p1_out[0] = p1
    d1_out[0] = d1
    q_out[0] = q
    for i in range(n - 1):
        wa = field0[i]
        wb = field0[i + 1]
        va = field1[i]
        vb = field1[i + 1]
        p, d, p1, d1, q = _pair_rk4(
            p, d, p1, d1, q, wa, 0.5 * (wa + wb), wb, va, 0.5 * (va + vb), vb, h, g1, g2, deq
        )
        p_out[i + 1] = p
        d_out[i + 1] = d
        p1_out[i + 1] = p1
        d1_out[i + 1] = d1
        q_out[i + 1] = q
