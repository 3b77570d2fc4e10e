"""Encoder-decoder model over character ids.

The encoder reads the comment (plus a trailing <eos>) and hands its final
(h, c) to the decoder, which is trained teacher-forced: it consumes <sos>
followed by the target characters and must predict each next character,
ending on <eos>. Generation feeds the chosen character back in.
"""

from dataclasses import dataclass

import numpy as np

from . import numkit
from .lstm import (LstmGrads, LstmParams, LstmState, init_lstm_params,
                   lstm_backward_from_caches, lstm_forward, lstm_step, zero_state)
from .prng import SplitMix64
from .textcodec import EOS_ID, SOS_ID, Vocabulary, decode_ids


@dataclass
class ModelParams:
    encoder: LstmParams
    decoder: LstmParams
    enc_embedding: np.ndarray  # (V, embed)
    dec_embedding: np.ndarray  # (V, embed)
    out_proj: np.ndarray       # (V, hidden)
    out_bias: np.ndarray       # (V,)
    vocab: Vocabulary
    reverse_input: bool = False

    @property
    def hidden(self) -> int:
        return self.encoder.hidden

    @property
    def embed(self) -> int:
        return self.encoder.embed

    @property
    def vocab_size(self) -> int:
        return len(self.vocab)

    def opt_arrays(self) -> list[tuple[str, np.ndarray]]:
        """Flat (name, array) view of every learnable tensor, in a fixed order."""
        return [
            ("enc_embedding", self.enc_embedding),
            ("encoder.w", self.encoder.w),
            ("encoder.u", self.encoder.u),
            ("encoder.b", self.encoder.b),
            ("dec_embedding", self.dec_embedding),
            ("decoder.w", self.decoder.w),
            ("decoder.u", self.decoder.u),
            ("decoder.b", self.decoder.b),
            ("out_proj", self.out_proj),
            ("out_bias", self.out_bias),
        ]

    def zeros_like_grads(self) -> "ModelGrads":
        return ModelGrads(
            encoder=self.encoder.zeros_like_grads(),
            decoder=self.decoder.zeros_like_grads(),
            enc_embedding=np.zeros_like(self.enc_embedding),
            dec_embedding=np.zeros_like(self.dec_embedding),
            out_proj=np.zeros_like(self.out_proj),
            out_bias=np.zeros_like(self.out_bias),
        )


@dataclass
class ModelGrads:
    encoder: LstmGrads
    decoder: LstmGrads
    enc_embedding: np.ndarray
    dec_embedding: np.ndarray
    out_proj: np.ndarray
    out_bias: np.ndarray

    def opt_arrays(self) -> list[tuple[str, np.ndarray]]:
        return [
            ("enc_embedding", self.enc_embedding),
            ("encoder.w", self.encoder.w),
            ("encoder.u", self.encoder.u),
            ("encoder.b", self.encoder.b),
            ("dec_embedding", self.dec_embedding),
            ("decoder.w", self.decoder.w),
            ("decoder.u", self.decoder.u),
            ("decoder.b", self.decoder.b),
            ("out_proj", self.out_proj),
            ("out_bias", self.out_bias),
        ]


@dataclass
class GenerationResult:
    ids: list[int]              # emitted character ids, terminating <eos> excluded
    text: str
    terminated: bool            # True iff <eos> was emitted before max_len
    per_step_logprob: list[float]  # one per decoder step taken, <eos> step included


def init_model_params(hidden: int, embed: int, vocab: Vocabulary, rng: SplitMix64,
                      reverse_input: bool = False) -> ModelParams:
    """All weights uniform on [-0.08, 0.08] from rng; out_bias starts at zero."""
    v = len(vocab)
    enc_emb = rng.uniforms(v * embed, -0.08, 0.08).reshape(v, embed)
    encoder = init_lstm_params(hidden, embed, rng)
    dec_emb = rng.uniforms(v * embed, -0.08, 0.08).reshape(v, embed)
    decoder = init_lstm_params(hidden, embed, rng)
    out_proj = rng.uniforms(v * hidden, -0.08, 0.08).reshape(v, hidden)
    out_bias = np.zeros(v)
    return ModelParams(encoder, decoder, enc_emb, dec_emb, out_proj, out_bias,
                       vocab, reverse_input)


def _check_ids(p: ModelParams, ids, what: str, allow_specials: bool = False) -> None:
    v = p.vocab_size
    for i in ids:
        if not 0 <= i < v:
            raise ValueError(f"{what} id {i} out of range for vocabulary of size {v}")
        if not allow_specials and i in (EOS_ID, SOS_ID):
            raise ValueError(f"{what} must not contain the special id {i}")


def _encoder_input_ids(p: ModelParams, comment_ids) -> list[int]:
    ids = list(comment_ids)
    if p.reverse_input:
        ids.reverse()
    ids.append(EOS_ID)
    return ids


def encode_comment(p: ModelParams, comment_ids) -> LstmState:
    """Run the encoder over the comment followed by <eos>; returns the final state."""
    _check_ids(p, comment_ids, "comment", allow_specials=False)
    inputs = p.enc_embedding[_encoder_input_ids(p, comment_ids)]
    states, _ = lstm_forward(p.encoder, inputs, zero_state(p.hidden))
    return states[-1]


def _decode_steps(p: ModelParams, state: LstmState, target_ids):
    """Teacher-forced decoder pass; returns (input_ids, cache, losses, dlogits)."""
    input_ids = [SOS_ID] + list(target_ids)
    next_ids = list(target_ids) + [EOS_ID]
    _, cache = lstm_forward(p.decoder, p.dec_embedding[input_ids], state)
    logits = cache.h @ p.out_proj.T + p.out_bias
    losses, dlogits = numkit.cross_entropy_rows(logits, next_ids)
    return input_ids, cache, losses, dlogits


def decode_teacher_forced_loss(p: ModelParams, state: LstmState,
                               target_ids) -> tuple[float, float]:
    """Summed and per-character cross-entropy of the target given the state.

    The decoder runs len(target)+1 steps; the final step must predict <eos>.
    """
    _check_ids(p, target_ids, "target", allow_specials=False)
    _, _, losses, _ = _decode_steps(p, state, target_ids)
    total = float(losses.sum())
    return total, total / len(losses)


def loss_and_gradients(p: ModelParams, comment_ids, code_ids,
                       max_steps: int | None = None) -> tuple[float, ModelGrads]:
    """Total teacher-forced loss and its exact gradient for one training pair.

    Backpropagates through the decoder, across the state handoff, and through
    the encoder. max_steps bounds the total unrolled length (encoder+decoder).
    """
    _check_ids(p, comment_ids, "comment", allow_specials=False)
    _check_ids(p, code_ids, "code", allow_specials=False)
    n_steps = (len(comment_ids) + 1) + (len(code_ids) + 1)
    if max_steps is not None and n_steps > max_steps:
        raise ValueError(f"sample unrolls to {n_steps} steps, over the limit of {max_steps}")

    enc_ids = _encoder_input_ids(p, comment_ids)
    enc_states, enc_cache = lstm_forward(p.encoder, p.enc_embedding[enc_ids],
                                         zero_state(p.hidden))

    dec_ids, dec_cache, losses, dlogits = _decode_steps(p, enc_states[-1], code_ids)
    total = float(losses.sum())

    grads = p.zeros_like_grads()
    grads.out_proj += dlogits.T @ dec_cache.h
    grads.out_bias += dlogits.sum(axis=0)
    dh_dec = dlogits @ p.out_proj

    _, d_dec_init, d_dec_inputs = lstm_backward_from_caches(
        p.decoder, dec_cache, dh_dec, grads=grads.decoder)
    np.add.at(grads.dec_embedding, dec_ids, d_dec_inputs)

    dh_enc = np.zeros((len(enc_ids), p.hidden))
    dh_enc[-1] = d_dec_init.h
    _, _, d_enc_inputs = lstm_backward_from_caches(
        p.encoder, enc_cache, dh_enc, upstream_c_final=d_dec_init.c, grads=grads.encoder)
    np.add.at(grads.enc_embedding, enc_ids, d_enc_inputs)

    return total, grads


def _step_probs(p: ModelParams, h: np.ndarray, temperature: float | None) -> np.ndarray:
    logits = p.out_proj @ h + p.out_bias
    if temperature is not None:
        logits = logits / temperature
    # <sos> is an input-only symbol: softmax over everything else
    keep = np.arange(logits.size) != SOS_ID
    probs = np.zeros_like(logits)
    probs[keep] = numkit.softmax(logits[keep])
    return probs


def generate(p: ModelParams, state: LstmState, mode: str = "greedy",
             temperature: float = 1.0, max_len: int = 1000,
             rng: SplitMix64 | None = None) -> GenerationResult:
    """Decode from a state until <eos> or max_len characters.

    greedy: argmax each step (ties go to the lowest id; rng unused).
    sample: draw from softmax(logits/temperature) via the shared PRNG.
    """
    if max_len < 1:
        raise ValueError("max_len must be >= 1")
    if mode not in ("greedy", "sample"):
        raise ValueError(f"unknown generation mode {mode!r}")
    if mode == "sample":
        if temperature <= 0:
            raise ValueError("temperature must be > 0")
        if rng is None:
            raise ValueError("sampling requires an rng")

    h, c = state.h, state.c
    ids: list[int] = []
    logprobs: list[float] = []
    terminated = False
    next_id = SOS_ID
    for _ in range(max_len):
        st = lstm_step(p.decoder, p.dec_embedding[next_id], LstmState(h, c))
        h, c = st.h, st.c
        probs = _step_probs(p, h, temperature if mode == "sample" else None)
        chosen = int(np.argmax(probs)) if mode == "greedy" else rng.categorical(probs)
        logprobs.append(float(np.log(probs[chosen])))
        if chosen == EOS_ID:
            terminated = True
            break
        ids.append(chosen)
        next_id = chosen
    return GenerationResult(ids, decode_ids(p.vocab, ids), terminated, logprobs)
