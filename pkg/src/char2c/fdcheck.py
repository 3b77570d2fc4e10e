"""Central finite-difference verification of every analytic gradient path.

Used by the gradcheck CLI command and by the test suite. Relative error is
|a - n| / max(|a|, |n|, floor); the floor keeps fd roundoff noise on
near-zero gradients from registering as disagreement.
"""

import numpy as np

from .lstm import LstmState, init_lstm_params, lstm_forward, lstm_sequence_backward
from .numkit import cross_entropy_from_logits
from .prng import SplitMix64
from .seq2seq import (decode_teacher_forced_loss, encode_comment,
                      init_model_params, loss_and_gradients)
from .textcodec import Vocabulary, EOS, SOS

CE_EPS = 1e-6
CE_FLOOR = 1e-8
MODEL_EPS = 1e-5
MODEL_FLOOR = 1e-4

CE_THRESHOLD = 1e-6
MODEL_THRESHOLD = 1e-4


def rel_err_max(analytic: np.ndarray, numeric: np.ndarray, floor: float) -> float:
    denom = np.maximum(np.maximum(np.abs(analytic), np.abs(numeric)), floor)
    return float(np.max(np.abs(analytic - numeric) / denom))


def fd_gradient(loss_fn, arr: np.ndarray, eps: float) -> np.ndarray:
    """Central differences of loss_fn with respect to every entry of arr, in place."""
    grad = np.zeros_like(arr)
    flat = arr.reshape(-1)
    gflat = grad.reshape(-1)
    for k in range(flat.size):
        saved = flat[k]
        flat[k] = saved + eps
        up = loss_fn()
        flat[k] = saved - eps
        down = loss_fn()
        flat[k] = saved
        gflat[k] = (up - down) / (2.0 * eps)
    return grad


def _toy_vocab(n_chars: int) -> Vocabulary:
    chars = tuple(chr(ord("a") + i) for i in range(n_chars))
    return Vocabulary((EOS, SOS) + chars)


def check_cross_entropy(seed: int) -> float:
    rng = SplitMix64(seed)
    v = 4 + rng.randbelow(9)  # 4..12
    logits = rng.uniforms(v, -3.0, 3.0)
    target = rng.randbelow(v)
    _, grad = cross_entropy_from_logits(logits, target)
    fd = fd_gradient(lambda: cross_entropy_from_logits(logits, target)[0], logits, CE_EPS)
    return rel_err_max(grad, fd, CE_FLOOR)


def check_lstm_sequence(seed: int) -> float:
    """Checks param, initial-state and input gradients of the sequence backward."""
    rng = SplitMix64(seed)
    hidden = 2 + rng.randbelow(7)   # 2..8
    embed = 2 + rng.randbelow(4)    # 2..5
    length = 1 + rng.randbelow(12)  # 1..12
    p = init_lstm_params(hidden, embed, rng)
    initial = LstmState(rng.uniforms(hidden, -0.5, 0.5), rng.uniforms(hidden, -0.5, 0.5))
    inputs = [rng.uniforms(embed, -1.0, 1.0) for _ in range(length)]
    upstream_h = [rng.uniforms(hidden, -1.0, 1.0) for _ in range(length)]
    upstream_c = rng.uniforms(hidden, -1.0, 1.0)

    def loss() -> float:
        states, _ = lstm_forward(p, inputs, initial)
        total = sum(float(u @ st.h) for u, st in zip(upstream_h, states))
        return total + float(upstream_c @ states[-1].c)

    grads, d_init, d_inputs = lstm_sequence_backward(p, inputs, initial, upstream_h, upstream_c)
    worst = 0.0
    for analytic, arr in [(grads.w, p.w), (grads.u, p.u), (grads.b, p.b),
                          (d_init.h, initial.h), (d_init.c, initial.c),
                          *zip(d_inputs, inputs)]:
        worst = max(worst, rel_err_max(analytic, fd_gradient(loss, arr, MODEL_EPS), MODEL_FLOOR))
    return worst


def check_model(seed: int) -> float:
    """Whole-model loss_and_gradients against finite differences, every parameter."""
    rng = SplitMix64(seed)
    n_chars = 4 + rng.randbelow(7)        # vocab size 6..12
    hidden = 3 + rng.randbelow(6)         # 3..8
    embed = 2 + rng.randbelow(4)          # 2..5
    comment_len = rng.randbelow(7)        # 0..6
    code_len = 1 + rng.randbelow(8)       # 1..8
    vocab = _toy_vocab(n_chars)
    params = init_model_params(hidden, embed, vocab, rng)
    comment = [2 + rng.randbelow(n_chars) for _ in range(comment_len)]
    code = [2 + rng.randbelow(n_chars) for _ in range(code_len)]

    _, grads = loss_and_gradients(params, comment, code)
    grad_by_name = dict(grads.opt_arrays())

    def loss() -> float:  # forward-only path, independent of the backward code
        state = encode_comment(params, comment)
        return decode_teacher_forced_loss(params, state, code)[0]

    worst = 0.0
    for name, arr in params.opt_arrays():
        fd = fd_gradient(loss, arr, MODEL_EPS)
        worst = max(worst, rel_err_max(grad_by_name[name], fd, MODEL_FLOOR))
    return worst


def run_suites(seeds) -> dict[str, float]:
    """Max relative error per suite over the given seeds."""
    return {
        "cross_entropy": max(check_cross_entropy(s) for s in seeds),
        "lstm_sequence": max(check_lstm_sequence(s) for s in seeds),
        "model": max(check_model(s) for s in seeds),
    }
