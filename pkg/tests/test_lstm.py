import math

import numpy as np
import numpy.testing as npt
import pytest

from char2c import fdcheck
from char2c.lstm import (LstmState, init_lstm_params, lstm_forward, lstm_step,
                         lstm_sequence_backward, zero_state)
from char2c.prng import SplitMix64


def test_init_shapes_and_views():
    p = init_lstm_params(2, 3, SplitMix64(0))
    for gate_w in (p.w_input, p.w_forget, p.w_output, p.w_candidate):
        assert gate_w.shape == (2, 3)
    for gate_u in (p.u_input, p.u_forget, p.u_output, p.u_candidate):
        assert gate_u.shape == (2, 2)
    for gate_b in (p.b_input, p.b_forget, p.b_output, p.b_candidate):
        assert gate_b.shape == (2,)


def test_init_deterministic():
    a = init_lstm_params(5, 4, SplitMix64(77))
    b = init_lstm_params(5, 4, SplitMix64(77))
    npt.assert_array_equal(a.w, b.w)
    npt.assert_array_equal(a.u, b.u)
    npt.assert_array_equal(a.b, b.b)


def test_init_range_over_a_million_draws():
    rng = SplitMix64(3)
    p1 = init_lstm_params(300, 500, rng)   # 4*(300*500) + 4*300*300 = 960k weights
    p2 = init_lstm_params(100, 50, rng)
    biggest = max(np.abs(p1.w).max(), np.abs(p1.u).max(),
                  np.abs(p2.w).max(), np.abs(p2.u).max())
    assert p1.w.size + p1.u.size + p2.w.size + p2.u.size > 1_000_000
    assert biggest <= 0.08


def test_init_biases():
    p = init_lstm_params(4, 3, SplitMix64(0))
    npt.assert_array_equal(p.b_forget, np.ones(4))
    npt.assert_array_equal(p.b_input, np.zeros(4))
    npt.assert_array_equal(p.b_output, np.zeros(4))
    npt.assert_array_equal(p.b_candidate, np.zeros(4))


def _zero_params(hidden=1, embed=1):
    p = init_lstm_params(hidden, embed, SplitMix64(0))
    p.w[:] = 0.0
    p.u[:] = 0.0
    p.b[:] = 0.0
    return p


def test_step_all_zero():
    p = _zero_params()
    out = lstm_step(p, np.zeros(1), zero_state(1))
    npt.assert_array_equal(out.h, [0.0])
    npt.assert_array_equal(out.c, [0.0])


def test_step_zero_weights_nonzero_cell():
    # gates are 0.5, candidate 0: c' = 0.5*2 = 1, h' = 0.5*tanh(1)
    p = _zero_params()
    out = lstm_step(p, np.zeros(1), LstmState(np.zeros(1), np.array([2.0])))
    npt.assert_allclose(out.c, [1.0], atol=1e-15)
    npt.assert_allclose(out.h, [0.5 * math.tanh(1.0)], atol=1e-12)
    assert abs(out.h[0] - 0.380797) < 1e-6


def test_step_saturated_gates_are_perfect_memory():
    p = _zero_params(hidden=3, embed=2)
    p.b_forget[:] = 40.0
    p.b_input[:] = -40.0
    c = np.array([0.3, -1.2, 5.0])
    out = lstm_step(p, np.array([0.7, -0.7]), LstmState(np.zeros(3), c.copy()))
    npt.assert_allclose(out.c, c, atol=1e-9)


def test_step_shape_errors():
    p = init_lstm_params(2, 3, SplitMix64(0))
    with pytest.raises(ValueError):
        lstm_step(p, np.zeros(4), zero_state(2))
    with pytest.raises(ValueError):
        lstm_step(p, np.zeros(3), zero_state(5))


def test_forward_matches_step_by_step():
    # the sequence kernel and the one-step path agree to float precision
    rng = SplitMix64(5)
    p = init_lstm_params(6, 4, rng)
    inputs = [rng.uniforms(4, -1, 1) for _ in range(9)]
    states, _ = lstm_forward(p, inputs, zero_state(6))
    s = zero_state(6)
    for x, got in zip(inputs, states):
        s = lstm_step(p, x, s)
        npt.assert_allclose(got.h, s.h, rtol=1e-13, atol=1e-15)
        npt.assert_allclose(got.c, s.c, rtol=1e-13, atol=1e-15)


def test_hidden_activation_bounded():
    rng = SplitMix64(9)
    p = init_lstm_params(8, 5, rng)
    p.w *= 40.0
    p.u *= 40.0
    inputs = [rng.uniforms(5, -3, 3) for _ in range(30)]
    states, _ = lstm_forward(p, inputs, zero_state(8))
    assert max(np.abs(st.h).max() for st in states) <= 1.0


def test_forward_deterministic_bitwise():
    rng = SplitMix64(2)
    p = init_lstm_params(7, 3, rng)
    inputs = [rng.uniforms(3, -1, 1) for _ in range(12)]
    s1, _ = lstm_forward(p, inputs, zero_state(7))
    s2, _ = lstm_forward(p, inputs, zero_state(7))
    for a, b in zip(s1, s2):
        npt.assert_array_equal(a.h, b.h)
        npt.assert_array_equal(a.c, b.c)


def test_backward_zero_upstream_gives_zero_gradients():
    rng = SplitMix64(4)
    p = init_lstm_params(5, 3, rng)
    inputs = [rng.uniforms(3, -1, 1) for _ in range(6)]
    upstream = [np.zeros(5) for _ in inputs]
    grads, d_init, d_inputs = lstm_sequence_backward(p, inputs, zero_state(5), upstream)
    assert not grads.w.any() and not grads.u.any() and not grads.b.any()
    assert not d_init.h.any() and not d_init.c.any()
    assert not np.asarray(d_inputs).any()


def test_backward_length_mismatch():
    p = init_lstm_params(2, 2, SplitMix64(0))
    with pytest.raises(ValueError, match="length"):
        lstm_sequence_backward(p, [np.zeros(2)], zero_state(2), [np.zeros(2)] * 2)


def test_backward_matches_finite_differences():
    worst = max(fdcheck.check_lstm_sequence(seed) for seed in (0, 1, 2))
    assert worst < 1e-4


def test_gradient_causality():
    # with upstream terms beyond step t zeroed, the gradient at step t must not
    # depend on later inputs
    rng = SplitMix64(11)
    p = init_lstm_params(4, 3, rng)
    inputs = [rng.uniforms(3, -1, 1) for _ in range(8)]
    t = 4
    upstream = [rng.uniforms(4, -1, 1) if k <= t else np.zeros(4)
                for k in range(len(inputs))]
    _, d_init_a, d_inputs_a = lstm_sequence_backward(p, inputs, zero_state(4), upstream)
    tampered = [x.copy() for x in inputs]
    for k in range(t + 1, len(inputs)):
        tampered[k] += 10.0
    _, d_init_b, d_inputs_b = lstm_sequence_backward(p, tampered, zero_state(4), upstream)
    npt.assert_array_equal(d_init_a.h, d_init_b.h)
    for k in range(t + 1):
        npt.assert_array_equal(d_inputs_a[k], d_inputs_b[k])
