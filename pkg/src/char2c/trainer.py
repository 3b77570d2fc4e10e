"""Training loop, gradient clipping, Adam, and portable JSON checkpoints.

Everything is deterministic given (corpus, config): sample order, parameter
init and the optimizer state all derive from the config seed through the
package PRNG, so two runs produce byte-identical checkpoints.
"""

import json
import logging
import math
import os
from dataclasses import asdict, dataclass

import numpy as np

from .corpus import SeqSample
from .prng import SplitMix64, mix64
from .seq2seq import ModelGrads, ModelParams, init_model_params, loss_and_gradients
from .lstm import GATE_ORDER, LstmParams
from .textcodec import Vocabulary, build_vocab, encode_text

log = logging.getLogger("char2c.trainer")

FORMAT_VERSION = 1


class CheckpointError(Exception):
    pass


class CorruptCheckpointError(CheckpointError):
    pass


class UnsupportedVersionError(CheckpointError):
    pass


class ShapeMismatchError(CheckpointError):
    pass


@dataclass(frozen=True)
class TrainConfig:
    hidden: int = 128
    embed: int = 32
    lr: float = 1e-3
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    clip_norm: float = 5.0
    epochs: int = 10
    seed: int = 0
    batch_accumulation: int = 1
    max_train_len: int = 700
    checkpoint_every: int = 0  # 0: only the final checkpoint
    input_reversal: bool = False

    def __post_init__(self):
        if self.lr <= 0 or self.clip_norm <= 0:
            raise ValueError("lr and clip_norm must be positive")
        if self.epochs < 0 or self.batch_accumulation < 1:
            raise ValueError("epochs must be >= 0 and batch_accumulation >= 1")
        if self.hidden < 1 or self.embed < 1:
            raise ValueError("hidden and embed must be >= 1")


@dataclass
class Checkpoint:
    format_version: int
    vocab: Vocabulary
    config: TrainConfig
    epoch: int
    params: ModelParams
    mean_char_loss: float
    max_code_len: int


# ---------------------------------------------------------------------------
# Optimizer
# ---------------------------------------------------------------------------

def global_grad_norm(grads: ModelGrads) -> float:
    total = 0.0
    for _, g in grads.opt_arrays():
        total += float(np.sum(g * g))
    return math.sqrt(total)


def clip_global_norm(grads: ModelGrads, max_norm: float) -> ModelGrads:
    """Scale every entry by max_norm/norm when the global norm exceeds max_norm."""
    if max_norm <= 0:
        raise ValueError("max_norm must be positive")
    norm = global_grad_norm(grads)
    if norm > max_norm:
        scale = max_norm / norm
        for _, g in grads.opt_arrays():
            g *= scale
    return grads


@dataclass
class AdamMoments:
    m: dict[str, np.ndarray]
    v: dict[str, np.ndarray]

    @classmethod
    def zeros_for(cls, params: ModelParams) -> "AdamMoments":
        return cls(m={n: np.zeros_like(a) for n, a in params.opt_arrays()},
                   v={n: np.zeros_like(a) for n, a in params.opt_arrays()})


def adam_step(params: ModelParams, grads: ModelGrads, moments: AdamMoments,
              t: int, cfg: TrainConfig) -> tuple[ModelParams, AdamMoments]:
    """Bias-corrected Adam update, in place on params and moments. t starts at 1."""
    if t < 1:
        raise ValueError("step index t must be >= 1")
    bc1 = 1.0 - cfg.beta1 ** t
    bc2 = 1.0 - cfg.beta2 ** t
    grad_by_name = dict(grads.opt_arrays())
    for name, p in params.opt_arrays():
        g = grad_by_name[name]
        if g.shape != p.shape:
            raise ValueError(f"gradient shape {g.shape} does not match parameter {name} {p.shape}")
        m, v = moments.m[name], moments.v[name]
        m *= cfg.beta1
        m += (1.0 - cfg.beta1) * g
        v *= cfg.beta2
        v += (1.0 - cfg.beta2) * (g * g)
        p -= cfg.lr * (m / bc1) / (np.sqrt(v / bc2) + cfg.eps)
    return params, moments


# ---------------------------------------------------------------------------
# Training
# ---------------------------------------------------------------------------

def encode_samples(vocab: Vocabulary, corpus: list[SeqSample]):
    return [(encode_text(vocab, s.comment), encode_text(vocab, s.code)) for s in corpus]


def train(corpus: list[SeqSample], cfg: TrainConfig, out_dir: str):
    """Train on the corpus; returns (final Checkpoint, per-epoch loss log rows).

    Writes checkpoint.json and loss_log.csv (epoch,updates,mean_char_loss) to
    out_dir, plus ckpt_epoch_N.json every checkpoint_every epochs. Updates
    follow the gradient of the per-character mean loss, averaged over each
    accumulation window.
    """
    if not corpus:
        raise ValueError("cannot train on an empty corpus")
    os.makedirs(out_dir, exist_ok=True)

    vocab = build_vocab(corpus)
    usable = []
    for k, (c_ids, y_ids) in enumerate(encode_samples(vocab, corpus)):
        n_steps = len(c_ids) + 1 + len(y_ids) + 1
        if n_steps > cfg.max_train_len:
            log.warning("skipping sample %d (%s): %d steps exceeds max_train_len=%d",
                        k, corpus[k].problem_id, n_steps, cfg.max_train_len)
            continue
        usable.append((c_ids, y_ids))
    if not usable:
        raise ValueError("every sample exceeds max_train_len; nothing to train on")
    max_code_len = max(len(y) for _, y in usable)

    params = init_model_params(cfg.hidden, cfg.embed, vocab, SplitMix64(cfg.seed),
                               reverse_input=cfg.input_reversal)
    moments = AdamMoments.zeros_for(params)
    t = 0
    mean_loss = 0.0
    log_rows: list[tuple[int, int, float]] = []

    for epoch in range(1, cfg.epochs + 1):
        order = list(range(len(usable)))
        SplitMix64(cfg.seed ^ mix64(epoch)).shuffle(order)
        acc = params.zeros_like_grads()
        acc_names = dict(acc.opt_arrays())
        window = 0
        loss_sum = 0.0
        for pos, idx in enumerate(order):
            c_ids, y_ids = usable[idx]
            total, grads = loss_and_gradients(params, c_ids, y_ids, max_steps=cfg.max_train_len)
            per_char = total / (len(y_ids) + 1)
            loss_sum += per_char
            scale = 1.0 / (len(y_ids) + 1)
            for name, g in grads.opt_arrays():
                acc_names[name] += scale * g
            window += 1
            if window == cfg.batch_accumulation or pos == len(order) - 1:
                for _, g in acc.opt_arrays():
                    g /= window
                clip_global_norm(acc, cfg.clip_norm)
                t += 1
                adam_step(params, acc, moments, t, cfg)
                for _, g in acc.opt_arrays():
                    g[:] = 0.0
                window = 0
        mean_loss = loss_sum / len(order)
        log_rows.append((epoch, t, mean_loss))
        log.info("epoch %d: %d updates, mean per-char loss %.6f", epoch, t, mean_loss)
        if cfg.checkpoint_every > 0 and epoch % cfg.checkpoint_every == 0:
            ckpt = Checkpoint(FORMAT_VERSION, vocab, cfg, epoch, params, mean_loss, max_code_len)
            save_checkpoint(ckpt, os.path.join(out_dir, f"ckpt_epoch_{epoch}.json"))

    ckpt = Checkpoint(FORMAT_VERSION, vocab, cfg, cfg.epochs, params, mean_loss, max_code_len)
    save_checkpoint(ckpt, os.path.join(out_dir, "checkpoint.json"))
    with open(os.path.join(out_dir, "loss_log.csv"), "w", encoding="utf-8", newline="\n") as fh:
        fh.write("epoch,updates,mean_char_loss\n")
        for epoch, updates, loss in log_rows:
            fh.write(f"{epoch},{updates},{loss!r}\n")
    return ckpt, log_rows


# ---------------------------------------------------------------------------
# Checkpoint serialization
# ---------------------------------------------------------------------------

def _checkpoint_entries(p: ModelParams) -> list[tuple[str, np.ndarray]]:
    """Named per-gate matrices, the on-disk layout of the parameters."""
    entries: list[tuple[str, np.ndarray]] = [
        ("enc_embedding", p.enc_embedding),
        ("dec_embedding", p.dec_embedding),
        ("out_proj", p.out_proj),
        ("out_bias", p.out_bias),
    ]
    for prefix, cell in (("encoder", p.encoder), ("decoder", p.decoder)):
        for gate in GATE_ORDER:
            sl = cell.gate_slice(gate)
            entries.append((f"{prefix}.W_{gate}", cell.w[sl]))
            entries.append((f"{prefix}.U_{gate}", cell.u[sl]))
            entries.append((f"{prefix}.b_{gate}", cell.b[sl]))
    return entries


def _as_2d(a: np.ndarray) -> tuple[list[int], list[float]]:
    if a.ndim == 1:
        return [1, a.shape[0]], a.tolist()
    return [a.shape[0], a.shape[1]], a.reshape(-1).tolist()


def checkpoint_to_json(ckpt: Checkpoint) -> str:
    obj = {
        "format_version": ckpt.format_version,
        "vocab": list(ckpt.vocab.symbols),
        "config": asdict(ckpt.config),
        "epoch": ckpt.epoch,
        "mean_char_loss": ckpt.mean_char_loss,
        "max_code_len": ckpt.max_code_len,
        "params": {},
    }
    for name, arr in _checkpoint_entries(ckpt.params):
        shape, data = _as_2d(arr)
        obj["params"][name] = {"shape": shape, "data": data}
    return json.dumps(obj, sort_keys=True, separators=(",", ":")) + "\n"


def save_checkpoint(ckpt: Checkpoint, path: str) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(checkpoint_to_json(ckpt))


def _expect(cond: bool, message: str) -> None:
    if not cond:
        raise ShapeMismatchError(message)


def _read_param(params_obj: dict, name: str, rows: int, cols: int) -> np.ndarray:
    if name not in params_obj:
        raise CorruptCheckpointError(f"checkpoint is missing parameter {name}")
    entry = params_obj[name]
    try:
        shape = list(entry["shape"])
        data = entry["data"]
    except (KeyError, TypeError) as e:
        raise CorruptCheckpointError(f"parameter {name} is malformed: {e}") from e
    _expect(shape == [rows, cols], f"parameter {name}: declared shape {shape}, expected [{rows}, {cols}]")
    _expect(len(data) == rows * cols, f"parameter {name}: {len(data)} values for shape {shape}")
    arr = np.asarray(data, dtype=np.float64).reshape(rows, cols)
    return arr[0] if rows == 1 and name.startswith(("out_bias", "encoder.b", "decoder.b")) else arr


def load_checkpoint(path: str) -> Checkpoint:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            obj = json.load(fh)
    except (json.JSONDecodeError, UnicodeDecodeError) as e:
        raise CorruptCheckpointError(f"corrupt checkpoint {path}: {e}") from e
    if not isinstance(obj, dict) or "format_version" not in obj:
        raise CorruptCheckpointError(f"corrupt checkpoint {path}: not a checkpoint object")
    if obj["format_version"] != FORMAT_VERSION:
        raise UnsupportedVersionError(
            f"unsupported checkpoint version {obj['format_version']} (supported: {FORMAT_VERSION})")
    try:
        vocab = Vocabulary(tuple(obj["vocab"]))
        cfg = TrainConfig(**obj["config"])
        epoch = int(obj["epoch"])
        mean_char_loss = float(obj["mean_char_loss"])
        max_code_len = int(obj["max_code_len"])
        params_obj = obj["params"]
    except (KeyError, TypeError, ValueError) as e:
        raise CorruptCheckpointError(f"corrupt checkpoint {path}: {e}") from e

    v, h, e = len(vocab), cfg.hidden, cfg.embed
    cells = {}
    for prefix in ("encoder", "decoder"):
        w = np.empty((4 * h, e))
        u = np.empty((4 * h, h))
        b = np.empty(4 * h)
        for k, gate in enumerate(GATE_ORDER):
            sl = slice(k * h, (k + 1) * h)
            w[sl] = _read_param(params_obj, f"{prefix}.W_{gate}", h, e)
            u[sl] = _read_param(params_obj, f"{prefix}.U_{gate}", h, h)
            b[sl] = _read_param(params_obj, f"{prefix}.b_{gate}", 1, h)
        cells[prefix] = LstmParams(h, e, w, u, b)
    params = ModelParams(
        encoder=cells["encoder"],
        decoder=cells["decoder"],
        enc_embedding=_read_param(params_obj, "enc_embedding", v, e),
        dec_embedding=_read_param(params_obj, "dec_embedding", v, e),
        out_proj=_read_param(params_obj, "out_proj", v, h),
        out_bias=_read_param(params_obj, "out_bias", 1, v),
        vocab=vocab,
        reverse_input=cfg.input_reversal,
    )
    return Checkpoint(FORMAT_VERSION, vocab, cfg, epoch, params, mean_char_loss, max_code_len)
