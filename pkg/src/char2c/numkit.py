"""Dense float64 matrix/vector kernels shared by the model code.

A "matrix" here is simply a 2-D numpy float64 array (row-major), a "vector"
a 1-D one. No broadcasting anywhere: shapes are checked explicitly so that
dimension bugs fail loudly instead of silently broadcasting.
"""

import numpy as np

Matrix = np.ndarray  # shape (rows, cols), dtype float64
Vector = np.ndarray  # shape (n,), dtype float64


def check_finite(name: str, a: np.ndarray) -> None:
    if not np.isfinite(a).all():
        raise ValueError(f"{name} contains non-finite entries")


def matmul(a: Matrix, b: Matrix) -> Matrix:
    """c[i][j] = sum_t a[i][t]*b[t][j]; shapes (m,k) x (k,n) -> (m,n)."""
    if a.ndim != 2 or b.ndim != 2:
        raise ValueError(f"matmul expects 2-D operands, got {a.shape} and {b.shape}")
    if a.shape[1] != b.shape[0]:
        raise ValueError(f"matmul dimension mismatch: {a.shape[0]}x{a.shape[1]} times {b.shape[0]}x{b.shape[1]}")
    check_finite("matmul lhs", a)
    check_finite("matmul rhs", b)
    return a @ b


def sigmoid(z: np.ndarray) -> np.ndarray:
    """Numerically stable logistic function."""
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


def softmax(v: Vector) -> Vector:
    """Max-shifted softmax; output entries in (0,1], sum 1."""
    if v.ndim != 1 or v.size == 0:
        raise ValueError("softmax expects a non-empty 1-D vector")
    check_finite("softmax input", v)
    e = np.exp(v - v.max())
    return e / e.sum()


def cross_entropy_from_logits(logits: Vector, target: int) -> tuple[float, Vector]:
    """loss = -log softmax(logits)[target]; gradient = softmax(logits) - onehot(target)."""
    if not 0 <= target < logits.size:
        raise ValueError(f"target id {target} out of range for {logits.size} logits")
    shifted = logits - logits.max()
    log_z = np.log(np.exp(shifted).sum())
    loss = float(log_z - shifted[target])
    grad = np.exp(shifted - log_z)
    grad[target] -= 1.0
    return loss, grad


def cross_entropy_rows(logits: Matrix, targets) -> tuple[np.ndarray, Matrix]:
    """Row-wise cross_entropy_from_logits: logits (T, V), targets (T,) ints."""
    targets = np.asarray(targets, dtype=np.intp)
    if logits.ndim != 2 or targets.shape != (logits.shape[0],):
        raise ValueError(f"expected (T, V) logits with T targets, got {logits.shape} and {targets.shape}")
    if targets.size and (targets.min() < 0 or targets.max() >= logits.shape[1]):
        raise ValueError("target id out of range")
    shifted = logits - logits.max(axis=1, keepdims=True)
    log_z = np.log(np.exp(shifted).sum(axis=1))
    rows = np.arange(targets.size)
    losses = log_z - shifted[rows, targets]
    grads = np.exp(shifted - log_z[:, None])
    grads[rows, targets] -= 1.0
    return losses, grads
