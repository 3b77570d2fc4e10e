"""Single-layer LSTM cell: parameters, one-step forward, exact sequence backward.

Storage is gate-stacked for speed: w is (4*hidden, embed) with the rows of
the input, forget, output and candidate gates in that order; u and b follow
the same layout. Per-gate matrices are exposed as views (w_input etc.).
The sequence forward/backward batch everything except the recurrent matvec
across time steps; the recurrent loops themselves are numba-compiled when
numba is available.
"""

import math
from dataclasses import dataclass

import numpy as np

from .numkit import sigmoid
from .prng import SplitMix64

try:
    from numba import njit
    _HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is an optional speedup
    _HAVE_NUMBA = False

GATE_ORDER = ("input", "forget", "output", "candidate")
INIT_SCALE = 0.08


@dataclass
class LstmParams:
    hidden: int
    embed: int
    w: np.ndarray  # (4*hidden, embed)
    u: np.ndarray  # (4*hidden, hidden)
    b: np.ndarray  # (4*hidden,)

    def gate_slice(self, gate: str) -> slice:
        k = GATE_ORDER.index(gate)
        return slice(k * self.hidden, (k + 1) * self.hidden)

    # per-gate views, matching the (W_g, U_g, b_g) formulation
    @property
    def w_input(self):
        return self.w[self.gate_slice("input")]

    @property
    def w_forget(self):
        return self.w[self.gate_slice("forget")]

    @property
    def w_output(self):
        return self.w[self.gate_slice("output")]

    @property
    def w_candidate(self):
        return self.w[self.gate_slice("candidate")]

    @property
    def u_input(self):
        return self.u[self.gate_slice("input")]

    @property
    def u_forget(self):
        return self.u[self.gate_slice("forget")]

    @property
    def u_output(self):
        return self.u[self.gate_slice("output")]

    @property
    def u_candidate(self):
        return self.u[self.gate_slice("candidate")]

    @property
    def b_input(self):
        return self.b[self.gate_slice("input")]

    @property
    def b_forget(self):
        return self.b[self.gate_slice("forget")]

    @property
    def b_output(self):
        return self.b[self.gate_slice("output")]

    @property
    def b_candidate(self):
        return self.b[self.gate_slice("candidate")]

    def zeros_like_grads(self) -> "LstmGrads":
        return LstmGrads(np.zeros_like(self.w), np.zeros_like(self.u), np.zeros_like(self.b))


@dataclass
class LstmGrads:
    w: np.ndarray
    u: np.ndarray
    b: np.ndarray


@dataclass
class LstmState:
    h: np.ndarray  # (hidden,)
    c: np.ndarray  # (hidden,)


@dataclass
class SeqCache:
    """Per-step activations of one forward pass, stacked (T, ...) row-major."""
    x: np.ndarray       # (T, embed)
    h_prev: np.ndarray  # (T, hidden)
    c_prev: np.ndarray  # (T, hidden)
    i: np.ndarray
    f: np.ndarray
    o: np.ndarray
    g: np.ndarray
    tc: np.ndarray      # tanh of the new cell state
    h: np.ndarray       # (T, hidden) outputs
    c: np.ndarray


def zero_state(hidden: int) -> LstmState:
    return LstmState(np.zeros(hidden), np.zeros(hidden))


def init_lstm_params(hidden: int, embed: int, rng: SplitMix64) -> LstmParams:
    """Weights i.i.d. uniform on [-0.08, 0.08] from rng, in (w rows, u rows) draw
    order; biases zero except the forget gate's, which starts at 1.0."""
    if hidden < 1 or embed < 1:
        raise ValueError(f"hidden and embed must be >= 1, got {hidden}, {embed}")
    w = rng.uniforms(4 * hidden * embed, -INIT_SCALE, INIT_SCALE).reshape(4 * hidden, embed)
    u = rng.uniforms(4 * hidden * hidden, -INIT_SCALE, INIT_SCALE).reshape(4 * hidden, hidden)
    b = np.zeros(4 * hidden)
    b[hidden:2 * hidden] = 1.0  # forget gate
    return LstmParams(hidden, embed, w, u, b)


def lstm_step(p: LstmParams, x: np.ndarray, s: LstmState) -> LstmState:
    """One gated update: c' = f*c + i*g, h' = o*tanh(c')."""
    if x.shape != (p.embed,):
        raise ValueError(f"input shape {x.shape} does not match embed size {p.embed}")
    if s.h.shape != (p.hidden,) or s.c.shape != (p.hidden,):
        raise ValueError(f"state shape {s.h.shape}/{s.c.shape} does not match hidden size {p.hidden}")
    n = p.hidden
    pre = p.w @ x + p.u @ s.h + p.b
    gates = sigmoid(pre[:3 * n])
    i, f, o = gates[:n], gates[n:2 * n], gates[2 * n:]
    g = np.tanh(pre[3 * n:])
    c = f * s.c + i * g
    return LstmState(o * np.tanh(c), c)


def _seq_forward_numpy(u, pre_x, h0, c0, h_prev, c_prev, i_a, f_a, o_a, g_a, tc_a, h_a, c_a):
    t_len, n4 = pre_x.shape
    n = n4 // 4
    h, c = h0, c0
    for t in range(t_len):
        h_prev[t] = h
        c_prev[t] = c
        pre = pre_x[t] + u @ h
        gates = sigmoid(pre[:3 * n])
        i, f, o = gates[:n], gates[n:2 * n], gates[2 * n:]
        g = np.tanh(pre[3 * n:])
        c = f * c + i * g
        tc = np.tanh(c)
        h = o * tc
        i_a[t], f_a[t], o_a[t], g_a[t] = i, f, o, g
        tc_a[t], h_a[t], c_a[t] = tc, h, c


def _seq_backward_numpy(ut, up, i_a, f_a, o_a, g_a, tc_a, c_prev, dc_final, da_all):
    t_len, n = up.shape
    dh = np.zeros(n)
    dc = dc_final.copy()
    for t in range(t_len - 1, -1, -1):
        i, f, o, g, tc = i_a[t], f_a[t], o_a[t], g_a[t], tc_a[t]
        dh = dh + up[t]
        dc = dc + dh * o * (1.0 - tc * tc)
        da = da_all[t]
        da[:n] = (dc * g) * i * (1.0 - i)
        da[n:2 * n] = (dc * c_prev[t]) * f * (1.0 - f)
        da[2 * n:3 * n] = (dh * tc) * o * (1.0 - o)
        da[3 * n:] = (dc * i) * (1.0 - g * g)
        dh = ut @ da
        dc = dc * f
    return dh, dc


if _HAVE_NUMBA:

    @njit(cache=True, inline="always")
    def _sig(z):
        if z >= 0.0:
            return 1.0 / (1.0 + math.exp(-z))
        e = math.exp(z)
        return e / (1.0 + e)

    @njit(cache=True)
    def _seq_forward_numba(u, pre_x, h0, c0, h_prev, c_prev, i_a, f_a, o_a, g_a, tc_a, h_a, c_a):
        t_len, n4 = pre_x.shape
        n = n4 // 4
        h = h0.copy()
        c = c0.copy()
        for t in range(t_len):
            for k in range(n):
                h_prev[t, k] = h[k]
                c_prev[t, k] = c[k]
            pre = pre_x[t] + np.dot(u, h)
            for k in range(n):
                i = _sig(pre[k])
                f = _sig(pre[n + k])
                o = _sig(pre[2 * n + k])
                g = math.tanh(pre[3 * n + k])
                cc = f * c[k] + i * g
                tc = math.tanh(cc)
                hh = o * tc
                i_a[t, k] = i
                f_a[t, k] = f
                o_a[t, k] = o
                g_a[t, k] = g
                tc_a[t, k] = tc
                c_a[t, k] = cc
                h_a[t, k] = hh
                c[k] = cc
                h[k] = hh

    @njit(cache=True)
    def _seq_backward_numba(ut, up, i_a, f_a, o_a, g_a, tc_a, c_prev, dc_final, da_all):
        t_len, n = up.shape
        dh = np.zeros(n)
        dc = dc_final.copy()
        for t in range(t_len - 1, -1, -1):
            for k in range(n):
                i = i_a[t, k]
                f = f_a[t, k]
                o = o_a[t, k]
                g = g_a[t, k]
                tc = tc_a[t, k]
                dhk = dh[k] + up[t, k]
                dck = dc[k] + dhk * o * (1.0 - tc * tc)
                da_all[t, k] = (dck * g) * i * (1.0 - i)
                da_all[t, n + k] = (dck * c_prev[t, k]) * f * (1.0 - f)
                da_all[t, 2 * n + k] = (dhk * tc) * o * (1.0 - o)
                da_all[t, 3 * n + k] = (dck * i) * (1.0 - g * g)
                dc[k] = dck * f
            dh = np.dot(ut, da_all[t])
        return dh, dc

    _seq_forward = _seq_forward_numba
    _seq_backward = _seq_backward_numba
else:
    _seq_forward = _seq_forward_numpy
    _seq_backward = _seq_backward_numpy


def lstm_forward(p: LstmParams, inputs, initial: LstmState):
    """Run the cell over a sequence; returns (states per step, cache for backward)."""
    t_len = len(inputs)
    n, e = p.hidden, p.embed
    x = np.ascontiguousarray(np.asarray(inputs, dtype=np.float64).reshape(t_len, e))
    if initial.h.shape != (n,) or initial.c.shape != (n,):
        raise ValueError(f"initial state does not match hidden size {n}")
    cache = SeqCache(
        x=x,
        h_prev=np.empty((t_len, n)), c_prev=np.empty((t_len, n)),
        i=np.empty((t_len, n)), f=np.empty((t_len, n)),
        o=np.empty((t_len, n)), g=np.empty((t_len, n)),
        tc=np.empty((t_len, n)), h=np.empty((t_len, n)), c=np.empty((t_len, n)),
    )
    pre_x = x @ p.w.T + p.b  # input contribution for every step at once
    _seq_forward(p.u, pre_x, np.ascontiguousarray(initial.h), np.ascontiguousarray(initial.c),
                 cache.h_prev, cache.c_prev, cache.i, cache.f, cache.o, cache.g,
                 cache.tc, cache.h, cache.c)
    states = [LstmState(cache.h[t], cache.c[t]) for t in range(t_len)]
    return states, cache


def lstm_backward_from_caches(p: LstmParams, cache: SeqCache, upstream_h,
                              upstream_c_final=None, grads: LstmGrads | None = None):
    """Exact reverse-mode pass given a forward cache.

    upstream_h[t] is dLoss/dh_t; upstream_c_final is dLoss/dc_T (default 0).
    Returns (grads, d_initial_state, d_inputs (T, embed)); grads accumulate
    in place when given.
    """
    t_len = cache.x.shape[0]
    if len(upstream_h) != t_len:
        raise ValueError(f"upstream length {len(upstream_h)} does not match sequence length {t_len}")
    n = p.hidden
    if grads is None:
        grads = p.zeros_like_grads()
    up = np.ascontiguousarray(np.asarray(upstream_h, dtype=np.float64).reshape(t_len, n))
    dc_final = np.zeros(n) if upstream_c_final is None else np.ascontiguousarray(upstream_c_final)
    da_all = np.empty((t_len, 4 * n))
    ut = np.ascontiguousarray(p.u.T)
    dh, dc = _seq_backward(ut, up, cache.i, cache.f, cache.o, cache.g, cache.tc,
                           cache.c_prev, dc_final, da_all)
    grads.w += da_all.T @ cache.x
    grads.u += da_all.T @ cache.h_prev
    grads.b += da_all.sum(axis=0)
    d_inputs = da_all @ p.w
    return grads, LstmState(dh, dc), d_inputs


def lstm_sequence_backward(p: LstmParams, inputs, initial: LstmState, upstream_h,
                           upstream_c_final=None):
    """Forward then exact backward over the whole sequence.

    Returns (param grads, gradient on the initial state, per-step input grads).
    """
    if len(upstream_h) != len(inputs):
        raise ValueError(f"upstream length {len(upstream_h)} does not match input length {len(inputs)}")
    _, cache = lstm_forward(p, inputs, initial)
    return lstm_backward_from_caches(p, cache, upstream_h, upstream_c_final)
